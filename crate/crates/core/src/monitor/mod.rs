//! Runtime monitoring of `∀ⁿ` safety sentences over finite traces that
//! arrive one at a time.

mod dfa;
mod finite;
mod store;

use std::collections::{HashSet, VecDeque};
use std::fmt;
use std::io::BufRead;
use std::ops::Range;

use thiserror::Error;

use crate::automata::{Alphabet, Letter};
use crate::formula::{classify, QuantifiedFormula, TraceVariable};
use crate::kripke::ApSet;
use crate::limits::{Limits, ResourceLimit};

pub use dfa::BadPrefixDfa;
pub use finite::{eval_body, eval_finite};
pub use store::{NodeId, PrefixTree};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MonitorError {
    #[error("{0}")]
    Fragment(String),
    #[error("trace `{0}` was already started")]
    DuplicateSession(String),
    #[error("no trace is open")]
    NoOpenTrace,
    #[error("trace `{0}` is still open")]
    TraceOpen(String),
    #[error("trace `{0}` has no events")]
    EmptyTrace(String),
    #[error(transparent)]
    ResourceLimit(#[from] ResourceLimit),
    #[error("reading the event stream: {0}")]
    Io(String),
}

/// A nonempty finite trace with a session identifier.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FiniteTrace {
    id: String,
    events: Vec<ApSet>,
}

impl FiniteTrace {
    pub fn new(id: impl Into<String>, events: Vec<ApSet>) -> Result<Self, MonitorError> {
        let id = id.into();
        if events.is_empty() {
            return Err(MonitorError::EmptyTrace(id));
        }
        Ok(FiniteTrace { id, events })
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn events(&self) -> &[ApSet] {
        &self.events
    }

    pub fn len(&self) -> usize {
        self.events.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}

/// A tuple of traces that violates the body, and the position of the last
/// event the tuple read.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Violation {
    pub tuple: Vec<String>,
    pub position: usize,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "VIOLATION tuple=({}) position={}", self.tuple.join(","), self.position)
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct MonitorOptions {
    /// Track one tuple per multiset of traces when the body is invariant
    /// under permuting its trace variables.
    pub symmetry: bool,
}

#[derive(Debug, Clone)]
struct Tuple {
    traces: Vec<usize>,
    state: usize,
    len: usize,
    /// No further events can reach this tuple.
    done: bool,
    reported: bool,
}

#[derive(Debug, Clone)]
struct Open {
    trace: usize,
    node: NodeId,
    len: usize,
    /// Letters of the stored traces, read once per session.
    stored: Vec<Vec<Letter>>,
    tuples: Range<usize>,
}

/// Sequential monitor: keeps every completed trace in a prefix tree and a
/// bad-prefix automaton state for every tuple of traces seen so far.
#[derive(Debug, Clone)]
pub struct Monitor {
    dfa: BadPrefixDfa,
    arity: usize,
    props: Vec<String>,
    symmetric: bool,
    store: PrefixTree,
    names: Vec<String>,
    known: HashSet<String>,
    /// Leaf of each completed trace.
    leaves: Vec<NodeId>,
    open: Option<Open>,
    tuples: Vec<Tuple>,
    violations: Vec<Violation>,
}

impl Monitor {
    pub fn new(f: &QuantifiedFormula, options: MonitorOptions, limits: &Limits) -> Result<Self, MonitorError> {
        let info = classify(f);
        if !info.forall_only {
            return Err(MonitorError::Fragment(format!(
                "monitoring needs a universal prefix, got `{}`",
                info.pattern
            )));
        }
        let vars = f.variables();
        let props: Vec<String> = f.propositions().into_iter().collect();
        let alphabet = Alphabet::new(props.clone(), vars.len()).map_err(|e| MonitorError::Fragment(e.to_string()))?;
        let dfa = BadPrefixDfa::build(f.body(), &vars, &alphabet, limits)?;
        let symmetric = options.symmetry && is_symmetric(f, &vars, &alphabet, &dfa, limits)?;
        Ok(Monitor {
            dfa,
            arity: vars.len(),
            props,
            symmetric,
            store: PrefixTree::new(),
            names: Vec::new(),
            known: HashSet::new(),
            leaves: Vec::new(),
            open: None,
            tuples: Vec::new(),
            violations: Vec::new(),
        })
    }

    pub fn dfa(&self) -> &BadPrefixDfa {
        &self.dfa
    }

    /// Whether the symmetry reduction is in effect.
    pub fn symmetric(&self) -> bool {
        self.symmetric
    }

    pub fn store(&self) -> &PrefixTree {
        &self.store
    }

    /// Number of tuples with an automaton state.
    pub fn num_tuples(&self) -> usize {
        self.tuples.len()
    }

    /// Every violation reported so far, in order.
    pub fn violations(&self) -> &[Violation] {
        &self.violations
    }

    /// The completed traces, read back from the prefix tree.
    pub fn traces(&self) -> Vec<FiniteTrace> {
        self.names
            .iter()
            .zip(&self.leaves)
            .map(|(id, &leaf)| FiniteTrace {
                id: id.clone(),
                events: self.store.events(leaf),
            })
            .collect()
    }

    pub fn begin_trace(&mut self, id: &str) -> Result<(), MonitorError> {
        if let Some(open) = &self.open {
            return Err(MonitorError::TraceOpen(self.names[open.trace].clone()));
        }
        if !self.known.insert(id.to_string()) {
            return Err(MonitorError::DuplicateSession(id.to_string()));
        }
        let trace = self.names.len();
        self.names.push(id.to_string());
        let stored = self
            .leaves
            .iter()
            .map(|&leaf| self.store.path(leaf).into_iter().map(|n| self.bits(self.store.event(n))).collect())
            .collect();
        let start = self.tuples.len();
        for traces in tuples_with(trace, self.arity, self.symmetric) {
            self.tuples.push(Tuple {
                traces,
                state: self.dfa.initial(),
                len: 0,
                done: false,
                reported: false,
            });
        }
        self.open = Some(Open {
            trace,
            node: PrefixTree::ROOT,
            len: 0,
            stored,
            tuples: start..self.tuples.len(),
        });
        Ok(())
    }

    /// Appends `event` to the open trace and advances every tuple that
    /// contains it. Returns the violations this event revealed.
    pub fn event(&mut self, event: &ApSet) -> Result<Vec<Violation>, MonitorError> {
        let Some(open) = self.open.as_mut() else {
            return Err(MonitorError::NoOpenTrace);
        };
        let p = open.len;
        open.len += 1;
        open.node = self.store.extend(open.node, event);
        let bits = bits_of(&self.props, event);
        let m = self.props.len();
        let mut found = Vec::new();
        for ti in open.tuples.clone() {
            let t = &mut self.tuples[ti];
            if t.done {
                continue;
            }
            let mut letter: Letter = 0;
            let mut frozen = false;
            for (c, &tr) in t.traces.iter().enumerate() {
                let b = if tr == open.trace {
                    bits
                } else if let Some(&b) = open.stored[tr].get(p) {
                    b
                } else {
                    frozen = true;
                    break;
                };
                letter |= b << (c * m);
            }
            if frozen {
                t.done = true;
                if !t.reported && self.dfa.is_violating_at_end(t.state) {
                    t.reported = true;
                    found.push((ti, t.len - 1));
                }
                continue;
            }
            t.state = self.dfa.step(t.state, letter);
            t.len += 1;
            if !t.reported && self.dfa.is_violating(t.state) {
                t.reported = true;
                found.push((ti, p));
            }
        }
        Ok(self.report(found))
    }

    /// Commits the open trace. Tuples that were still growing are checked
    /// for violations caused by the traces ending.
    pub fn end_trace(&mut self) -> Result<Vec<Violation>, MonitorError> {
        let Some(open) = self.open.as_ref() else {
            return Err(MonitorError::NoOpenTrace);
        };
        if open.len == 0 {
            return Err(MonitorError::EmptyTrace(self.names[open.trace].clone()));
        }
        let open = self.open.take().expect("checked above");
        let mut found = Vec::new();
        for ti in open.tuples.clone() {
            let t = &mut self.tuples[ti];
            if t.done {
                continue;
            }
            t.done = true;
            if !t.reported && self.dfa.is_violating_at_end(t.state) {
                t.reported = true;
                found.push((ti, t.len - 1));
            }
        }
        self.leaves.push(open.node);
        Ok(self.report(found))
    }

    fn report(&mut self, found: Vec<(usize, usize)>) -> Vec<Violation> {
        let out: Vec<Violation> = found
            .into_iter()
            .map(|(ti, position)| Violation {
                tuple: self.tuples[ti].traces.iter().map(|&t| self.names[t].clone()).collect(),
                position,
            })
            .collect();
        self.violations.extend(out.iter().cloned());
        out
    }

    fn bits(&self, event: &ApSet) -> Letter {
        bits_of(&self.props, event)
    }
}

fn bits_of(props: &[String], event: &ApSet) -> Letter {
    props
        .iter()
        .enumerate()
        .filter(|(_, p)| event.contains(*p))
        .fold(0, |acc, (i, _)| acc | 1 << i)
}

/// Tuples over traces `0..=last` that contain `last`, in lexicographic
/// order; only nondecreasing ones when `sorted`.
fn tuples_with(last: usize, arity: usize, sorted: bool) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(arity);
    fn rec(last: usize, arity: usize, sorted: bool, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == arity {
            if cur.contains(&last) {
                out.push(cur.clone());
            }
            return;
        }
        let lo = if sorted { cur.last().copied().unwrap_or(0) } else { 0 };
        for t in lo..=last {
            cur.push(t);
            rec(last, arity, sorted, cur, out);
            cur.pop();
        }
    }
    rec(last, arity, sorted, &mut cur, &mut out);
    out
}

/// The body gives the same verdicts under every swap of two adjacent trace
/// variables, hence under every permutation.
fn is_symmetric(
    f: &QuantifiedFormula,
    vars: &[TraceVariable],
    alphabet: &Alphabet,
    dfa: &BadPrefixDfa,
    limits: &Limits,
) -> Result<bool, MonitorError> {
    for i in 1..vars.len() {
        let (a, b) = (&vars[i - 1], &vars[i]);
        let swapped = f.body().rename_vars(&|v| {
            if v == a {
                Some(b.clone())
            } else if v == b {
                Some(a.clone())
            } else {
                None
            }
        });
        let other = BadPrefixDfa::build(&swapped, vars, alphabet, limits)?;
        if !equivalent(dfa, &other) {
            return Ok(false);
        }
    }
    Ok(true)
}

fn equivalent(x: &BadPrefixDfa, y: &BadPrefixDfa) -> bool {
    let letters = 1u64 << x.alphabet().bits();
    let mut seen = HashSet::from([(x.initial(), y.initial())]);
    let mut queue = VecDeque::from([(x.initial(), y.initial())]);
    while let Some((p, q)) = queue.pop_front() {
        if x.is_violating(p) != y.is_violating(q) || x.is_violating_at_end(p) != y.is_violating_at_end(q) {
            return false;
        }
        for l in 0..letters {
            let next = (x.step(p, l), y.step(q, l));
            if seen.insert(next) {
                queue.push_back(next);
            }
        }
    }
    true
}

/// Feeds a line-based event stream to `monitor`: each line lists the
/// propositions true at one position, `---` ends the current trace, and
/// end of input ends the last one. Traces are named `t1`, `t2`, …
pub fn run_stream(
    monitor: &mut Monitor,
    input: impl BufRead,
    mut on_violation: impl FnMut(&Violation),
) -> Result<(), MonitorError> {
    let mut count = 0usize;
    let mut open = false;
    for line in input.lines() {
        let line = line.map_err(|e| MonitorError::Io(e.to_string()))?;
        let line = line.trim_end_matches('\r');
        if line.trim() == "---" {
            if !open {
                count += 1;
                return Err(MonitorError::EmptyTrace(format!("t{count}")));
            }
            monitor.end_trace()?.iter().for_each(&mut on_violation);
            open = false;
            continue;
        }
        if !open {
            count += 1;
            monitor.begin_trace(&format!("t{count}"))?;
            open = true;
        }
        let event: ApSet = line.split_whitespace().map(str::to_string).collect();
        monitor.event(&event)?.iter().for_each(&mut on_violation);
    }
    if open {
        monitor.end_trace()?.iter().for_each(&mut on_violation);
    }
    Ok(())
}
