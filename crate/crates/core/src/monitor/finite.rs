use std::collections::BTreeMap;

use crate::formula::{Body, QuantifiedFormula, Quantifier, TraceVariable};
use crate::kripke::ApSet;

use super::FiniteTrace;

/// Finite-trace semantics: temporal operators stop at the end of the
/// shortest assigned trace, and `X` needs a next position on every one.
///
/// Panics if `traces` is empty.
pub fn eval_finite(traces: &[FiniteTrace], f: &QuantifiedFormula) -> bool {
    assert!(!traces.is_empty(), "finite semantics over an empty trace set");
    let mut assignment = BTreeMap::new();
    quantify(traces, f.prefix(), f.body(), &mut assignment)
}

fn quantify<'t>(
    traces: &'t [FiniteTrace],
    prefix: &[(Quantifier, TraceVariable)],
    body: &Body,
    assignment: &mut BTreeMap<TraceVariable, &'t [ApSet]>,
) -> bool {
    let Some(((q, v), rest)) = prefix.split_first() else {
        return eval_body(body, assignment)[0];
    };
    let mut each = traces.iter().map(|t| {
        assignment.insert(v.clone(), t.events());
        let r = quantify(traces, rest, body, assignment);
        assignment.remove(v);
        r
    });
    match q {
        Quantifier::Forall => each.all(|r| r),
        Quantifier::Exists => each.any(|r| r),
    }
}

/// Truth values of `body` at every position below the cut-off, under an
/// assignment of nonempty finite traces.
pub fn eval_body(body: &Body, assignment: &BTreeMap<TraceVariable, &[ApSet]>) -> Vec<bool> {
    let len = assignment.values().map(|t| t.len()).min().unwrap_or(1);
    Eval { assignment, len }.at_all(body)
}

struct Eval<'a, 'b> {
    assignment: &'a BTreeMap<TraceVariable, &'b [ApSet]>,
    len: usize,
}

impl Eval<'_, '_> {
    fn at_all(&self, b: &Body) -> Vec<bool> {
        let n = self.len;
        match b {
            Body::True => vec![true; n],
            Body::False => vec![false; n],
            Body::Atom(a) => {
                let t = self.assignment[&a.var];
                (0..n).map(|i| t[i].contains(&a.ap)).collect()
            }
            Body::Not(x) => self.at_all(x).into_iter().map(|v| !v).collect(),
            Body::And(x, y) => zip(self.at_all(x), self.at_all(y), |a, b| a && b),
            Body::Or(x, y) => zip(self.at_all(x), self.at_all(y), |a, b| a || b),
            Body::Implies(x, y) => zip(self.at_all(x), self.at_all(y), |a, b| !a || b),
            Body::Iff(x, y) => zip(self.at_all(x), self.at_all(y), |a, b| a == b),
            Body::Next(x) => {
                let v = self.at_all(x);
                (0..n).map(|i| i + 1 < n && v[i + 1]).collect()
            }
            Body::Until(x, y) => until(&self.at_all(x), &self.at_all(y)),
            Body::Finally(x) => until(&vec![true; n], &self.at_all(x)),
            Body::Globally(x) => negate(until(&vec![true; n], &negate(self.at_all(x)))),
            Body::Release(x, y) => negate(until(&negate(self.at_all(x)), &negate(self.at_all(y)))),
            Body::WeakUntil(x, y) => {
                let (a, b) = (self.at_all(x), self.at_all(y));
                let always_a = negate(until(&vec![true; n], &negate(a.clone())));
                zip(until(&a, &b), always_a, |u, g| u || g)
            }
        }
    }
}

fn zip(a: Vec<bool>, b: Vec<bool>, f: impl Fn(bool, bool) -> bool) -> Vec<bool> {
    a.into_iter().zip(b).map(|(x, y)| f(x, y)).collect()
}

fn negate(a: Vec<bool>) -> Vec<bool> {
    a.into_iter().map(|v| !v).collect()
}

/// `a U b` with the witness strictly before the cut-off.
fn until(a: &[bool], b: &[bool]) -> Vec<bool> {
    let mut out = vec![false; a.len()];
    let mut next = false;
    for i in (0..a.len()).rev() {
        next = b[i] || (a[i] && next);
        out[i] = next;
    }
    out
}
