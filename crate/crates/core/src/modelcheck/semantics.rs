use std::collections::BTreeMap;
use std::fmt;

use crate::automata::lcm;
use crate::formula::{Body, QuantifiedFormula, Quantifier, TraceVariable};
use crate::kripke::UltimatelyPeriodicTrace;

/// Partial map from trace variables to traces.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TraceAssignment(BTreeMap<TraceVariable, UltimatelyPeriodicTrace>);

impl TraceAssignment {
    pub fn new() -> Self {
        TraceAssignment::default()
    }

    pub fn insert(&mut self, var: TraceVariable, trace: UltimatelyPeriodicTrace) {
        self.0.insert(var, trace);
    }

    pub fn get(&self, var: &TraceVariable) -> Option<&UltimatelyPeriodicTrace> {
        self.0.get(var)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&TraceVariable, &UltimatelyPeriodicTrace)> {
        self.0.iter()
    }
}

impl FromIterator<(TraceVariable, UltimatelyPeriodicTrace)> for TraceAssignment {
    fn from_iter<I: IntoIterator<Item = (TraceVariable, UltimatelyPeriodicTrace)>>(iter: I) -> Self {
        TraceAssignment(iter.into_iter().collect())
    }
}

impl fmt::Display for TraceAssignment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, (v, t)) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{v} -> {t}")?;
        }
        Ok(())
    }
}

/// A trace with letters packed as bitmasks over a fixed proposition list.
#[derive(Debug, Clone)]
struct Packed {
    stem: Vec<u64>,
    period: Vec<u64>,
}

impl Packed {
    fn new(t: &UltimatelyPeriodicTrace, props: &[String]) -> Packed {
        let pack = |xs: &[crate::kripke::ApSet]| {
            xs.iter()
                .map(|s| {
                    props
                        .iter()
                        .enumerate()
                        .filter(|(_, p)| s.contains(*p))
                        .fold(0u64, |m, (j, _)| m | 1 << j)
                })
                .collect()
        };
        Packed {
            stem: pack(t.stem()),
            period: pack(t.period()),
        }
    }

    fn at(&self, i: usize) -> u64 {
        if i < self.stem.len() {
            self.stem[i]
        } else {
            self.period[(i - self.stem.len()) % self.period.len()]
        }
    }
}

#[derive(Debug, Clone, Copy)]
enum Op {
    Const(bool),
    Atom(usize, u32),
    Not(usize),
    And(usize, usize),
    Or(usize, usize),
    Implies(usize, usize),
    Iff(usize, usize),
    Next(usize),
    Until(usize, usize),
    WeakUntil(usize, usize),
    Release(usize, usize),
    Finally(usize),
    Globally(usize),
}

/// A body compiled to post-order for repeated evaluation over lassos.
struct Program {
    ops: Vec<Op>,
    used: Vec<bool>,
}

impl Program {
    fn compile(body: &Body, vars: &[TraceVariable], props: &[String]) -> Program {
        let mut p = Program {
            ops: Vec::new(),
            used: vec![false; vars.len()],
        };
        p.emit(body, vars, props);
        p
    }

    fn emit(&mut self, b: &Body, vars: &[TraceVariable], props: &[String]) -> usize {
        let un = |s: &mut Self, x: &Body| s.emit(x, vars, props);
        let op = match b {
            Body::True => Op::Const(true),
            Body::False => Op::Const(false),
            Body::Atom(a) => {
                let v = vars.iter().position(|v| *v == a.var).expect("variable is bound");
                self.used[v] = true;
                match props.iter().position(|p| *p == a.ap) {
                    Some(j) => Op::Atom(v, j as u32),
                    None => Op::Const(false),
                }
            }
            Body::Not(x) => Op::Not(un(self, x)),
            Body::And(x, y) => Op::And(un(self, x), un(self, y)),
            Body::Or(x, y) => Op::Or(un(self, x), un(self, y)),
            Body::Implies(x, y) => Op::Implies(un(self, x), un(self, y)),
            Body::Iff(x, y) => Op::Iff(un(self, x), un(self, y)),
            Body::Next(x) => Op::Next(un(self, x)),
            Body::Until(x, y) => Op::Until(un(self, x), un(self, y)),
            Body::WeakUntil(x, y) => Op::WeakUntil(un(self, x), un(self, y)),
            Body::Release(x, y) => Op::Release(un(self, x), un(self, y)),
            Body::Finally(x) => Op::Finally(un(self, x)),
            Body::Globally(x) => Op::Globally(un(self, x)),
        };
        self.ops.push(op);
        self.ops.len() - 1
    }

    /// Truth at position 0; `traces[v]` is the trace of variable `v`.
    fn run(&self, traces: &[&Packed]) -> bool {
        let active = || traces.iter().zip(&self.used).filter(|(_, &u)| u).map(|(t, _)| t);
        let stem = active().map(|t| t.stem.len()).max().unwrap_or(0);
        let period = active().map(|t| t.period.len()).fold(1, lcm);
        let n = stem + period;
        let succ = |i: usize| if i + 1 < n { i + 1 } else { stem };
        let mut val: Vec<Vec<bool>> = Vec::with_capacity(self.ops.len());
        for op in &self.ops {
            let v: Vec<bool> = match *op {
                Op::Const(c) => vec![c; n],
                Op::Atom(var, bit) => (0..n).map(|i| traces[var].at(i) >> bit & 1 == 1).collect(),
                Op::Not(x) => val[x].iter().map(|b| !b).collect(),
                Op::And(x, y) => (0..n).map(|i| val[x][i] && val[y][i]).collect(),
                Op::Or(x, y) => (0..n).map(|i| val[x][i] || val[y][i]).collect(),
                Op::Implies(x, y) => (0..n).map(|i| !val[x][i] || val[y][i]).collect(),
                Op::Iff(x, y) => (0..n).map(|i| val[x][i] == val[y][i]).collect(),
                Op::Next(x) => (0..n).map(|i| val[x][succ(i)]).collect(),
                // φ U ψ is the least fixpoint of ψ ∨ (φ ∧ X ·)
                Op::Until(x, y) => fixpoint(n, false, &succ, |i, nx| val[y][i] || (val[x][i] && nx)),
                Op::WeakUntil(x, y) => fixpoint(n, true, &succ, |i, nx| val[y][i] || (val[x][i] && nx)),
                Op::Release(x, y) => fixpoint(n, true, &succ, |i, nx| val[y][i] && (val[x][i] || nx)),
                Op::Finally(x) => fixpoint(n, false, &succ, |i, nx| val[x][i] || nx),
                Op::Globally(x) => fixpoint(n, true, &succ, |i, nx| val[x][i] && nx),
            };
            val.push(v);
        }
        val.last().is_none_or(|v| v[0])
    }
}

fn fixpoint(n: usize, init: bool, succ: &impl Fn(usize) -> usize, step: impl Fn(usize, bool) -> bool) -> Vec<bool> {
    let mut v = vec![init; n];
    loop {
        let mut changed = false;
        for i in (0..n).rev() {
            let x = step(i, v[succ(i)]);
            if x != v[i] {
                v[i] = x;
                changed = true;
            }
        }
        if !changed {
            return v;
        }
    }
}

/// Whether the traces set `traces` satisfies `f`, quantifiers ranging over
/// `traces`.
///
/// Panics if `traces` is empty.
pub fn evaluate_semantics(traces: &[UltimatelyPeriodicTrace], f: &QuantifiedFormula) -> bool {
    evaluate_from(traces, f, &TraceAssignment::new())
}

/// Like [`evaluate_semantics`], with the variables bound in `fixed` taken
/// from it instead of being quantified.
pub fn evaluate_from(traces: &[UltimatelyPeriodicTrace], f: &QuantifiedFormula, fixed: &TraceAssignment) -> bool {
    assert!(!traces.is_empty(), "quantifiers need a nonempty trace set");
    let props: Vec<String> = f.propositions().into_iter().collect();
    let vars = f.variables();
    let program = Program::compile(f.body(), &vars, &props);
    let pool: Vec<Packed> = traces.iter().map(|t| Packed::new(t, &props)).collect();
    let pinned: Vec<Option<Packed>> = vars.iter().map(|v| fixed.get(v).map(|t| Packed::new(t, &props))).collect();
    let quantifiers = f.quantifiers();
    let mut chosen: Vec<&Packed> = Vec::with_capacity(vars.len());
    quantify(&program, &quantifiers, &pool, &pinned, &mut chosen)
}

fn quantify<'a>(
    program: &Program,
    qs: &[Quantifier],
    pool: &'a [Packed],
    pinned: &'a [Option<Packed>],
    chosen: &mut Vec<&'a Packed>,
) -> bool {
    let i = chosen.len();
    if i == qs.len() {
        return program.run(chosen);
    }
    if let Some(t) = &pinned[i] {
        chosen.push(t);
        let r = quantify(program, qs, pool, pinned, chosen);
        chosen.pop();
        return r;
    }
    let want = qs[i] == Quantifier::Exists;
    for t in pool {
        chosen.push(t);
        let r = quantify(program, qs, pool, pinned, chosen);
        chosen.pop();
        if r == want {
            return want;
        }
    }
    !want
}

/// Truth of a quantifier-free body under `assignment`, which must bind every
/// variable of the body.
pub fn evaluate_body(body: &Body, assignment: &TraceAssignment) -> bool {
    let vars: Vec<TraceVariable> = assignment.iter().map(|(v, _)| v.clone()).collect();
    let props: Vec<String> = body.propositions().into_iter().collect();
    for v in body.variables() {
        assert!(assignment.get(&v).is_some(), "variable {v} is unassigned");
    }
    let program = Program::compile(body, &vars, &props);
    let packed: Vec<Packed> = assignment.iter().map(|(_, t)| Packed::new(t, &props)).collect();
    let refs: Vec<&Packed> = packed.iter().collect();
    program.run(&refs)
}
