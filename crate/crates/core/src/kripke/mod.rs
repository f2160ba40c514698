//! Explicit-state Kripke structures.

mod compose;
mod lasso;
mod parse;
mod trace;

use std::collections::{BTreeSet, HashMap, HashSet, VecDeque};
use std::fmt;

use thiserror::Error;

use crate::limits::ResourceLimit;

pub use compose::{self_compose, split_indexed};
pub use lasso::enumerate_lassos;
pub use parse::parse_kripke;
pub use trace::{ap_set, ApSet, UltimatelyPeriodicTrace};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum KripkeError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("transition from `{from}` to undeclared state `{to}`")]
    DanglingState { from: String, to: String },
    #[error("state `{0}` has no successor")]
    DeadEnd(String),
    #[error("state `{state}` is labelled with undeclared proposition `{ap}`")]
    UnknownAP { state: String, ap: String },
    #[error("undeclared state `{0}`")]
    UnknownState(String),
    #[error("state `{0}` declared twice")]
    DuplicateState(String),
    #[error("no initial state")]
    MissingInit,
    #[error("no states declared")]
    NoStates,
    #[error("at most 64 atomic propositions are supported, got {0}")]
    TooManyPropositions(usize),
    #[error(transparent)]
    ResourceLimit(#[from] ResourceLimit),
}

/// A finite Kripke structure `(S, s0, δ, AP, L)` with a total transition
/// relation. States are identified by index; names follow declaration order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KripkeStructure {
    names: Vec<String>,
    initial: usize,
    succ: Vec<Vec<usize>>,
    ap: Vec<String>,
    labels: Vec<u64>,
}

/// Collects declarations by name and validates them in [`build`](Self::build).
#[derive(Debug, Clone, Default)]
pub struct KripkeBuilder {
    states: Vec<String>,
    init: Option<String>,
    ap: Vec<String>,
    labels: Vec<(String, Vec<String>)>,
    trans: Vec<(String, Vec<String>)>,
}

impl KripkeBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn states<S: AsRef<str>>(mut self, names: impl IntoIterator<Item = S>) -> Self {
        self.states.extend(names.into_iter().map(|s| s.as_ref().to_string()));
        self
    }

    pub fn init(mut self, name: &str) -> Self {
        self.init = Some(name.to_string());
        self
    }

    pub fn ap<S: AsRef<str>>(mut self, names: impl IntoIterator<Item = S>) -> Self {
        self.ap.extend(names.into_iter().map(|s| s.as_ref().to_string()));
        self
    }

    pub fn label<S: AsRef<str>>(mut self, state: &str, aps: impl IntoIterator<Item = S>) -> Self {
        let aps = aps.into_iter().map(|s| s.as_ref().to_string()).collect();
        self.labels.push((state.to_string(), aps));
        self
    }

    pub fn trans<S: AsRef<str>>(mut self, from: &str, to: impl IntoIterator<Item = S>) -> Self {
        let to = to.into_iter().map(|s| s.as_ref().to_string()).collect();
        self.trans.push((from.to_string(), to));
        self
    }

    pub fn build(self) -> Result<KripkeStructure, KripkeError> {
        if self.states.is_empty() {
            return Err(KripkeError::NoStates);
        }
        let mut index = HashMap::new();
        for (i, s) in self.states.iter().enumerate() {
            if index.insert(s.clone(), i).is_some() {
                return Err(KripkeError::DuplicateState(s.clone()));
            }
        }
        let mut ap: Vec<String> = Vec::new();
        for a in self.ap {
            if !ap.contains(&a) {
                ap.push(a);
            }
        }
        if ap.len() > 64 {
            return Err(KripkeError::TooManyPropositions(ap.len()));
        }
        let lookup = |s: &str| index.get(s).copied().ok_or_else(|| KripkeError::UnknownState(s.to_string()));
        let init = self.init.ok_or(KripkeError::MissingInit)?;
        let initial = lookup(&init)?;

        let mut labels = vec![0u64; self.states.len()];
        for (state, aps) in &self.labels {
            let s = lookup(state)?;
            for a in aps {
                let bit = ap.iter().position(|x| x == a).ok_or_else(|| KripkeError::UnknownAP {
                    state: state.clone(),
                    ap: a.clone(),
                })?;
                labels[s] |= 1 << bit;
            }
        }

        let mut succ: Vec<Vec<usize>> = vec![Vec::new(); self.states.len()];
        for (from, tos) in &self.trans {
            let s = lookup(from)?;
            for to in tos {
                let t = index.get(to).copied().ok_or_else(|| KripkeError::DanglingState {
                    from: from.clone(),
                    to: to.clone(),
                })?;
                if !succ[s].contains(&t) {
                    succ[s].push(t);
                }
            }
        }
        if let Some(dead) = succ.iter().position(Vec::is_empty) {
            return Err(KripkeError::DeadEnd(self.states[dead].clone()));
        }
        Ok(KripkeStructure {
            names: self.states,
            initial,
            succ,
            ap,
            labels,
        })
    }
}

impl KripkeStructure {
    pub fn builder() -> KripkeBuilder {
        KripkeBuilder::new()
    }

    /// Index-based constructor; validates the same invariants as the builder.
    pub fn from_parts(
        names: Vec<String>,
        initial: usize,
        succ: Vec<Vec<usize>>,
        ap: Vec<String>,
        labels: Vec<u64>,
    ) -> Result<Self, KripkeError> {
        let n = names.len();
        if n == 0 {
            return Err(KripkeError::NoStates);
        }
        if initial >= n {
            return Err(KripkeError::MissingInit);
        }
        if ap.len() > 64 {
            return Err(KripkeError::TooManyPropositions(ap.len()));
        }
        for (s, out) in succ.iter().enumerate() {
            if out.is_empty() {
                return Err(KripkeError::DeadEnd(names[s].clone()));
            }
            if let Some(&t) = out.iter().find(|&&t| t >= n) {
                return Err(KripkeError::DanglingState {
                    from: names[s].clone(),
                    to: t.to_string(),
                });
            }
        }
        let mask = if ap.len() == 64 { u64::MAX } else { (1u64 << ap.len()) - 1 };
        if let Some(s) = labels.iter().position(|l| l & !mask != 0) {
            return Err(KripkeError::UnknownAP {
                state: names[s].clone(),
                ap: format!("#{}", 63 - (labels[s] & !mask).leading_zeros()),
            });
        }
        Ok(KripkeStructure {
            names,
            initial,
            succ,
            ap,
            labels,
        })
    }

    pub fn num_states(&self) -> usize {
        self.names.len()
    }

    pub fn initial(&self) -> usize {
        self.initial
    }

    pub fn state_name(&self, s: usize) -> &str {
        &self.names[s]
    }

    pub fn state_index(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    pub fn successors(&self, s: usize) -> &[usize] {
        &self.succ[s]
    }

    pub fn num_transitions(&self) -> usize {
        self.succ.iter().map(Vec::len).sum()
    }

    pub fn ap(&self) -> &[String] {
        &self.ap
    }

    /// Label of `s` as a bitmask over [`ap`](Self::ap).
    pub fn label_bits(&self, s: usize) -> u64 {
        self.labels[s]
    }

    pub fn label(&self, s: usize) -> ApSet {
        self.ap
            .iter()
            .enumerate()
            .filter(|(i, _)| self.labels[s] >> i & 1 == 1)
            .map(|(_, a)| a.clone())
            .collect()
    }

    /// The same structure over proposition set `aps`: labels are intersected
    /// with `aps`, and propositions unknown to the structure are never true.
    pub fn restrict_ap(&self, aps: &[String]) -> Result<KripkeStructure, KripkeError> {
        let labels = (0..self.num_states())
            .map(|s| {
                let l = self.label(s);
                aps.iter()
                    .enumerate()
                    .filter(|(_, a)| l.contains(*a))
                    .fold(0u64, |m, (i, _)| m | 1 << i)
            })
            .collect();
        KripkeStructure::from_parts(self.names.clone(), self.initial, self.succ.clone(), aps.to_vec(), labels)
    }

    /// True iff `t` is the trace of some path from the initial state, when
    /// both are compared on the structure's propositions.
    pub fn has_trace(&self, t: &UltimatelyPeriodicTrace) -> bool {
        let own: ApSet = self.ap.iter().cloned().collect();
        let t = t.restrict(&own);
        let stem = t.stem().len();
        let len = stem + t.period().len();
        let next_pos = |p: usize| if p + 1 < len { p + 1 } else { stem };
        let letter_ok = |s: usize, p: usize| self.label(s) == *t.at(p);
        // product graph over (state, position); an infinite path exists iff a
        // reachable node lies on a cycle
        if !letter_ok(self.initial, 0) {
            return false;
        }
        let mut seen = HashSet::new();
        let mut queue = VecDeque::from([(self.initial, 0usize)]);
        seen.insert((self.initial, 0usize));
        let mut edges: HashMap<(usize, usize), Vec<(usize, usize)>> = HashMap::new();
        while let Some((s, p)) = queue.pop_front() {
            let np = next_pos(p);
            for &s2 in &self.succ[s] {
                if letter_ok(s2, np) {
                    edges.entry((s, p)).or_default().push((s2, np));
                    if seen.insert((s2, np)) {
                        queue.push_back((s2, np));
                    }
                }
            }
        }
        // prune nodes without successors until fixpoint; anything left has an
        // infinite continuation
        let mut alive: HashSet<(usize, usize)> = seen;
        loop {
            let before = alive.len();
            alive = alive
                .iter()
                .copied()
                .filter(|n| edges.get(n).is_some_and(|es| es.iter().any(|e| alive.contains(e))))
                .collect();
            if alive.len() == before {
                break;
            }
        }
        alive.contains(&(self.initial, 0))
    }

    /// States reachable from the initial state.
    pub fn reachable(&self) -> BTreeSet<usize> {
        let mut seen = BTreeSet::from([self.initial]);
        let mut stack = vec![self.initial];
        while let Some(s) = stack.pop() {
            for &t in &self.succ[s] {
                if seen.insert(t) {
                    stack.push(t);
                }
            }
        }
        seen
    }
}

/// Writes the `.kr` text format accepted by [`parse_kripke`].
impl fmt::Display for KripkeStructure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "states: {}", self.names.join(" "))?;
        writeln!(f, "init: {}", self.names[self.initial])?;
        if !self.ap.is_empty() {
            writeln!(f, "ap: {}", self.ap.join(" "))?;
        }
        for s in 0..self.num_states() {
            let l = self.label(s);
            if !l.is_empty() {
                let names: Vec<&str> = l.iter().map(String::as_str).collect();
                writeln!(f, "label: {} {}", self.names[s], names.join(" "))?;
            }
        }
        for s in 0..self.num_states() {
            let tos: Vec<&str> = self.succ[s].iter().map(|&t| self.names[t].as_str()).collect();
            writeln!(f, "trans: {} -> {}", self.names[s], tos.join(" "))?;
        }
        Ok(())
    }
}
