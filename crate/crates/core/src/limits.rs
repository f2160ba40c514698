use thiserror::Error;

/// Caps that turn exponential constructions into clean errors.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Limits {
    /// States of any explicit product or composed structure.
    pub max_states: usize,
    /// Distinct traces produced by lasso enumeration.
    pub max_lassos: usize,
    /// Letters enumerated explicitly (complementation, monitor automata).
    pub max_letters: usize,
    /// Conjuncts produced by the exists-forall satisfiability reduction.
    pub max_conjuncts: usize,
    /// Candidate trace sets visited by bounded model search.
    pub max_candidates: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            max_states: 1_000_000,
            max_lassos: 100_000,
            max_letters: 1 << 12,
            max_conjuncts: 4096,
            max_candidates: 5_000_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("resource limit exceeded: {what} (cap {limit})")]
pub struct ResourceLimit {
    pub what: &'static str,
    pub limit: usize,
}

impl ResourceLimit {
    pub fn new(what: &'static str, limit: usize) -> Self {
        ResourceLimit { what, limit }
    }
}
