//! Small dense-vector helpers over `f64` slices.

use alloc::vec::Vec;

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm(a: &[f64]) -> f64 {
    libm::sqrt(dot(a, a))
}

pub fn distance(a: &[f64], b: &[f64]) -> f64 {
    libm::sqrt(a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum())
}

pub fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

/// Rescales `v` in place so that its norm does not exceed `max`.
pub fn clamp_norm(v: &mut [f64], max: f64) {
    let n = norm(v);
    if n > max {
        let s = max / n;
        v.iter_mut().for_each(|c| *c *= s);
    }
}

/// Unit vector along `v`, or `None` when `v` is (numerically) zero.
pub fn unit(v: &[f64]) -> Option<Vec<f64>> {
    let n = norm(v);
    (n > 1e-12).then(|| v.iter().map(|c| c / n).collect())
}

/// Angle in radians between two nonzero vectors.
pub fn angle_between(a: &[f64], b: &[f64]) -> Option<f64> {
    let (na, nb) = (norm(a), norm(b));
    if na <= 1e-12 || nb <= 1e-12 {
        return None;
    }
    Some(libm::acos((dot(a, b) / (na * nb)).clamp(-1.0, 1.0)))
}

pub fn mean<'a>(k: usize, vs: impl Iterator<Item = &'a [f64]>) -> Vec<f64> {
    let mut acc = alloc::vec![0.0; k];
    let mut count = 0usize;
    for v in vs {
        acc.iter_mut().zip(v).for_each(|(a, c)| *a += c);
        count += 1;
    }
    if count > 0 {
        acc.iter_mut().for_each(|a| *a /= count as f64);
    }
    acc
}
