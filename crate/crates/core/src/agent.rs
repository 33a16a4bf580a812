use alloc::vec::Vec;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum AgentKind {
    Regular,
    Injected,
}

/// One agent in belief space.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct AgentState {
    pub id: usize,
    pub x: Vec<f64>,
    pub v: Vec<f64>,
    /// Share of attention given to the in-group; the rest goes to injected agents.
    pub rigidity: f64,
    pub kind: AgentKind,
}

impl AgentState {
    pub fn is_regular(&self) -> bool {
        self.kind == AgentKind::Regular
    }
}
