//! Satisfiability of HyperLTL sentences.
//!
//! The alternation-free fragments and `∃*∀*` reduce to LTL satisfiability
//! over a product alphabet. General sentences go through bounded model
//! search, which finds smallest models but never proves unsatisfiability.

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

use crate::automata::{emptiness, ltl_to_nba, Alphabet, AutomataError, LassoWord};
use crate::formula::{classify, Body, QuantifiedFormula, Quantifier, TraceVariable};
use crate::kripke::{ApSet, UltimatelyPeriodicTrace};
use crate::limits::{Limits, ResourceLimit};
use crate::modelcheck::evaluate_semantics;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SatStatus {
    Sat,
    Unsat,
    Unknown,
}

impl fmt::Display for SatStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SatStatus::Sat => "sat",
            SatStatus::Unsat => "unsat",
            SatStatus::Unknown => "unknown",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SatResult {
    pub status: SatStatus,
    /// A satisfying trace set; present only with [`SatStatus::Sat`].
    pub model: Option<BTreeSet<UltimatelyPeriodicTrace>>,
    pub note: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SatError {
    #[error("{0}")]
    Fragment(String),
    #[error(transparent)]
    ResourceLimit(#[from] ResourceLimit),
    #[error(transparent)]
    Automata(AutomataError),
    #[error("bounds must be at least 1")]
    InvalidBounds,
}

impl From<AutomataError> for SatError {
    fn from(e: AutomataError) -> Self {
        match e {
            AutomataError::ResourceLimit(r) => SatError::ResourceLimit(r),
            e => SatError::Automata(e),
        }
    }
}

/// Outcome of an LTL satisfiability query.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LtlSat {
    pub sat: bool,
    pub witness: Option<UltimatelyPeriodicTrace>,
}

/// Satisfiability of a body whose atoms all read the single variable `var`.
pub fn ltl_sat(body: &Body, var: &TraceVariable, limits: &Limits) -> Result<LtlSat, SatError> {
    let al = Alphabet::new(body.propositions().into_iter().collect(), 1)?;
    let nba = ltl_to_nba(body, std::slice::from_ref(var), &al, limits)?;
    let witness = emptiness(&nba).map(|w| w.traces(&al).remove(0));
    Ok(LtlSat {
        sat: witness.is_some(),
        witness,
    })
}

fn require(f: &QuantifiedFormula, ok: bool, want: &str) -> Result<(), SatError> {
    if ok {
        Ok(())
    } else {
        Err(SatError::Fragment(format!(
            "expected a sentence with prefix {want}, got `{}`",
            classify(f).pattern
        )))
    }
}

fn sat(model: BTreeSet<UltimatelyPeriodicTrace>, f: &QuantifiedFormula, note: String) -> SatResult {
    let traces: Vec<_> = model.iter().cloned().collect();
    assert!(evaluate_semantics(&traces, f), "model rejected by the semantics");
    SatResult {
        status: SatStatus::Sat,
        model: Some(model),
        note,
    }
}

fn unsat(note: String) -> SatResult {
    SatResult {
        status: SatStatus::Unsat,
        model: None,
        note,
    }
}

/// `∃*` sentences: one component of the product alphabet per variable.
pub fn sat_exists(f: &QuantifiedFormula, limits: &Limits) -> Result<SatResult, SatError> {
    require(f, classify(f).exists_only, "E+")?;
    exists_body(f, f.body(), &f.variables(), "fragment E*", limits)
}

fn exists_body(
    f: &QuantifiedFormula,
    body: &Body,
    vars: &[TraceVariable],
    method: &str,
    limits: &Limits,
) -> Result<SatResult, SatError> {
    let al = Alphabet::new(f.propositions().into_iter().collect(), vars.len())?;
    let nba = ltl_to_nba(body, vars, &al, limits)?;
    let note = format!("{method}, {} automaton states", nba.num_states());
    Ok(match emptiness(&nba) {
        Some(w) => sat(LassoWord::traces(&w, &al).into_iter().map(|t| t.normalized()).collect(), f, note),
        None => unsat(note),
    })
}

/// `∀*` sentences: all variables collapse onto one, and a single trace
/// model suffices.
pub fn sat_forall(f: &QuantifiedFormula, limits: &Limits) -> Result<SatResult, SatError> {
    require(f, classify(f).forall_only, "A+")?;
    let vars = f.variables();
    let body = f.body().rename_vars(&|_| Some(vars[0].clone()));
    exists_body(f, &body, &vars[..1], "fragment A*", limits)
}

/// `∃*∀*` sentences: every universal variable is instantiated with every
/// existential one, giving an equisatisfiable `∃*` conjunction.
pub fn sat_exists_forall(f: &QuantifiedFormula, limits: &Limits) -> Result<SatResult, SatError> {
    require(f, classify(f).exists_forall, "E+A+")?;
    let (es, us): (Vec<_>, Vec<_>) = f.prefix().iter().partition(|(q, _)| *q == Quantifier::Exists);
    let es: Vec<TraceVariable> = es.into_iter().map(|(_, v)| v.clone()).collect();
    let us: Vec<TraceVariable> = us.into_iter().map(|(_, v)| v.clone()).collect();
    let count = (es.len() as u128).checked_pow(us.len() as u32).unwrap_or(u128::MAX);
    if count > limits.max_conjuncts as u128 {
        return Err(ResourceLimit::new("exists-forall conjuncts", limits.max_conjuncts).into());
    }
    let mut conjuncts = Vec::with_capacity(count as usize);
    let mut choice = vec![0usize; us.len()];
    loop {
        conjuncts.push(f.body().rename_vars(&|v| us.iter().position(|u| u == v).map(|i| es[choice[i]].clone())));
        // odometer over the mappings
        let mut i = 0;
        while i < choice.len() && choice[i] + 1 == es.len() {
            choice[i] = 0;
            i += 1;
        }
        if i == choice.len() {
            break;
        }
        choice[i] += 1;
    }
    let method = format!("fragment E*A*, {count} conjuncts");
    exists_body(f, &Body::conjunction(conjuncts), &es, &method, limits)
}

/// Smallest-model search over sets of up to `max_traces` lasso traces with
/// stem at most `max_stem` and period at most `max_loop`.
///
/// Candidates are visited by cardinality, then by total stem plus period
/// length, then lexicographically, so the first model found is the least
/// one in that order.
pub fn sat_bounded(
    f: &QuantifiedFormula,
    max_traces: usize,
    max_stem: usize,
    max_loop: usize,
    limits: &Limits,
) -> Result<SatResult, SatError> {
    if max_traces == 0 || max_loop == 0 {
        return Err(SatError::InvalidBounds);
    }
    let pool = lasso_pool(&f.propositions().into_iter().collect::<Vec<_>>(), max_stem, max_loop, limits)?;
    let mut search = Search {
        f,
        pool: &pool,
        visited: 0,
        limit: limits.max_candidates,
        chosen: Vec::new(),
    };
    let max_len = pool.last().map_or(0, |t| t.0);
    for size in 1..=max_traces.min(pool.len()) {
        for total in size..=size * max_len {
            if let Some(model) = search.run(size, total, 0)? {
                let note = format!(
                    "bounded search, {} candidates, traces <= {max_traces}, stem <= {max_stem}, loop <= {max_loop}",
                    search.visited
                );
                return Ok(sat(model.into_iter().collect(), f, note));
            }
        }
    }
    Ok(SatResult {
        status: SatStatus::Unknown,
        model: None,
        note: format!(
            "bounded search exhausted {} candidates, traces <= {max_traces}, stem <= {max_stem}, loop <= {max_loop}",
            search.visited
        ),
    })
}

/// Distinct lasso traces within the bounds, as `(length, trace)` sorted by
/// length and then by trace order.
fn lasso_pool(
    props: &[String],
    max_stem: usize,
    max_loop: usize,
    limits: &Limits,
) -> Result<Vec<(usize, UltimatelyPeriodicTrace)>, SatError> {
    let letters: Vec<ApSet> = (0u64..1 << props.len())
        .map(|bits| props.iter().enumerate().filter(|(i, _)| bits >> i & 1 == 1).map(|(_, p)| p.clone()).collect())
        .collect();
    let words = |len: usize| -> Vec<Vec<ApSet>> {
        let mut out = vec![Vec::new()];
        for _ in 0..len {
            out = out
                .into_iter()
                .flat_map(|w| {
                    letters.iter().map(move |l| {
                        let mut w = w.clone();
                        w.push(l.clone());
                        w
                    })
                })
                .collect();
        }
        out
    };
    let raw = (0..=max_stem).map(|s| letters.len().pow(s as u32)).sum::<usize>()
        * (1..=max_loop).map(|l| letters.len().pow(l as u32)).sum::<usize>();
    if raw > limits.max_lassos {
        return Err(ResourceLimit::new("candidate lasso traces", limits.max_lassos).into());
    }
    let mut set = BTreeSet::new();
    for s in 0..=max_stem {
        for stem in words(s) {
            for l in 1..=max_loop {
                for period in words(l) {
                    let t = UltimatelyPeriodicTrace::new(stem.clone(), period).normalized();
                    set.insert((t.stem().len() + t.period().len(), t));
                }
            }
        }
    }
    Ok(set.into_iter().collect())
}

struct Search<'a> {
    f: &'a QuantifiedFormula,
    pool: &'a [(usize, UltimatelyPeriodicTrace)],
    visited: usize,
    limit: usize,
    chosen: Vec<UltimatelyPeriodicTrace>,
}

impl Search<'_> {
    /// Sets of `left` more pool entries from index `from` on with total
    /// length `budget`, in lexicographic order of pool indices.
    fn run(&mut self, left: usize, budget: usize, from: usize) -> Result<Option<Vec<UltimatelyPeriodicTrace>>, SatError> {
        if left == 0 {
            if budget != 0 {
                return Ok(None);
            }
            self.visited += 1;
            if self.visited > self.limit {
                return Err(ResourceLimit::new("bounded search candidates", self.limit).into());
            }
            return Ok(evaluate_semantics(&self.chosen, self.f).then(|| self.chosen.clone()));
        }
        for i in from..self.pool.len() {
            let (len, t) = &self.pool[i];
            // lengths are sorted, so the remaining picks cost at least `len` each
            if len * left > budget {
                break;
            }
            self.chosen.push(t.clone());
            let found = self.run(left - 1, budget - len, i + 1)?;
            self.chosen.pop();
            if found.is_some() {
                return Ok(found);
            }
        }
        Ok(None)
    }
}
