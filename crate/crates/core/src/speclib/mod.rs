//! Generators for standard information-flow hyperproperties and the
//! distributed-synthesis encoding.
//!
//! The generators use the trace variables `p`, `p'` and `p''`. Each
//! proposition argument may name several propositions; a condition over a
//! set is the conjunction of the condition over its members.

mod arch;

use thiserror::Error;

use crate::formula::{Body, QuantifiedFormula, Quantifier, TraceVariable};

pub use arch::{parse_architecture, Architecture};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SpecError {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("invalid architecture: {0}")]
    InvalidArchitecture(String),
    #[error("architecture file, line {line}: {message}")]
    Syntax { line: usize, message: String },
}

fn var(name: &str) -> TraceVariable {
    TraceVariable::new(name).expect("fixed variable names are identifiers")
}

fn vars() -> (TraceVariable, TraceVariable, TraceVariable) {
    (var("p"), var("p'"), var("p''"))
}

fn sentence(prefix: &[(Quantifier, &TraceVariable)], body: Body) -> QuantifiedFormula {
    QuantifiedFormula::new(prefix.iter().map(|(q, v)| (*q, (*v).clone())).collect(), body)
        .expect("generated sentences bind every variable once")
}

/// `a[x] <-> a[y]` for every `a` in `aps`, conjoined.
fn agree<S: AsRef<str>>(aps: &[S], x: &TraceVariable, y: &TraceVariable) -> Body {
    Body::conjunction(aps.iter().map(|a| Body::iff(Body::atom(a.as_ref(), x), Body::atom(a.as_ref(), y))))
}

fn check_sets<S: AsRef<str>>(sets: &[(&str, &[S])]) -> Result<(), SpecError> {
    let mut seen: Vec<&str> = Vec::new();
    for (role, set) in sets {
        if set.is_empty() {
            return Err(SpecError::InvalidArgument(format!("no {role} propositions")));
        }
        for a in set.iter().map(AsRef::as_ref) {
            if !crate::formula::is_identifier(a) {
                return Err(SpecError::InvalidArgument(format!("`{a}` is not a proposition name")));
            }
            if seen.contains(&a) {
                return Err(SpecError::InvalidArgument(format!("`{a}` is used twice")));
            }
            seen.push(a);
        }
    }
    Ok(())
}

/// Observational determinism: `∀p.∀p'. (l[p] ↔ l[p']) → G (o[p] ↔ o[p'])`.
pub fn gen_obsdet<S: AsRef<str>>(low: &[S], obs: &[S]) -> Result<QuantifiedFormula, SpecError> {
    check_sets(&[("low", low), ("observable", obs)])?;
    let (p, q, _) = vars();
    let body = Body::implies(agree(low, &p, &q), Body::globally(agree(obs, &p, &q)));
    Ok(sentence(&[(Quantifier::Forall, &p), (Quantifier::Forall, &q)], body))
}

/// Noninference: `∀p.∃p'. G (¬h[p'] ∧ (l[p] ↔ l[p']) ∧ (o[p] ↔ o[p']))`.
pub fn gen_noninference<S: AsRef<str>>(high: &[S], low: &[S], obs: &[S]) -> Result<QuantifiedFormula, SpecError> {
    check_sets(&[("high", high), ("low", low), ("observable", obs)])?;
    let (p, q, _) = vars();
    let dummy = Body::conjunction(high.iter().map(|h| Body::not(Body::atom(h.as_ref(), &q))));
    let body = Body::globally(Body::and(Body::and(dummy, agree(low, &p, &q)), agree(obs, &p, &q)));
    Ok(sentence(&[(Quantifier::Forall, &p), (Quantifier::Exists, &q)], body))
}

/// Generalized noninterference:
/// `∀p.∀p'.∃p''. G ((h[p] ↔ h[p'']) ∧ (l[p'] ↔ l[p'']) ∧ (o[p'] ↔ o[p'']))`.
pub fn gen_gni<S: AsRef<str>>(high: &[S], low: &[S], obs: &[S]) -> Result<QuantifiedFormula, SpecError> {
    check_sets(&[("high", high), ("low", low), ("observable", obs)])?;
    let (p, q, r) = vars();
    let body = Body::globally(Body::and(
        Body::and(agree(high, &p, &r), agree(low, &q, &r)),
        agree(obs, &q, &r),
    ));
    Ok(sentence(
        &[(Quantifier::Forall, &p), (Quantifier::Forall, &q), (Quantifier::Exists, &r)],
        body,
    ))
}

/// `Ham(k)`: the outputs of `p` and `p'` differ in at most `k` positions.
fn ham(k: usize, o: &str, p: &TraceVariable, q: &TraceVariable) -> Body {
    (0..=k).fold(Body::False, |inner, _| {
        let same = Body::iff(Body::atom(o, p), Body::atom(o, q));
        let differ = Body::iff(Body::atom(o, p), Body::not(Body::atom(o, q)));
        Body::weak_until(same, Body::and(differ, Body::next(inner)))
    })
}

/// Minimum Hamming distance `d` between the outputs of any two traces with
/// different inputs: `∀p.∀p'. F (i[p] ↔ ¬i[p']) → ¬Ham(d−1)`.
pub fn gen_hamming(d: usize, input: &str, output: &str) -> Result<QuantifiedFormula, SpecError> {
    if d == 0 {
        return Err(SpecError::InvalidArgument("the distance must be at least 1".into()));
    }
    check_sets(&[("input", &[input][..]), ("output", &[output][..])])?;
    let (p, q, _) = vars();
    let differ = Body::finally(Body::iff(Body::atom(input, &p), Body::not(Body::atom(input, &q))));
    let body = Body::implies(differ, Body::not(ham(d - 1, output, &p, &q)));
    Ok(sentence(&[(Quantifier::Forall, &p), (Quantifier::Forall, &q)], body))
}

/// `C` may change between `x` and `y` only once `A` has:
/// `(⋁_{a∈A} ¬(a[x] ↔ a[y])) R (⋀_{c∈C} c[x] ↔ c[y])`.
pub fn gen_dependence<S: AsRef<str>>(
    a: &[S],
    c: &[S],
    x: &TraceVariable,
    y: &TraceVariable,
) -> Result<Body, SpecError> {
    for (role, set) in [("input", a), ("output", c)] {
        if set.is_empty() {
            return Err(SpecError::InvalidArgument(format!("no {role} propositions")));
        }
    }
    let changed = Body::disjunction(a.iter().map(|a| Body::not(Body::iff(Body::atom(a.as_ref(), x), Body::atom(a.as_ref(), y)))));
    Ok(Body::release(changed, agree(c, x, y)))
}

/// `∀p.∀p'. spec[p] ∧ ⋀ D(inputs(q), outputs(q))` over the non-environment
/// processes `q` in declaration order. A process without inputs or outputs
/// contributes no term.
pub fn gen_distributed(arch: &Architecture, spec: &Body) -> Result<QuantifiedFormula, SpecError> {
    let spec_vars = spec.variables();
    if spec_vars.len() > 1 {
        return Err(SpecError::InvalidArgument("the specification must use a single trace variable".into()));
    }
    let aps = arch.propositions();
    if let Some(a) = spec.propositions().into_iter().find(|a| !aps.contains(a)) {
        return Err(SpecError::InvalidArgument(format!("`{a}` is not a proposition of the architecture")));
    }
    let (p, q, _) = vars();
    let spec = spec.rename_vars(&|_| Some(p.clone()));
    let mut terms = vec![spec];
    for proc in arch.processes().iter().filter(|x| *x != arch.env()) {
        let (ins, outs) = (arch.inputs(proc), arch.outputs(proc));
        if ins.is_empty() || outs.is_empty() {
            continue;
        }
        let ins: Vec<&String> = ins.iter().collect();
        let outs: Vec<&String> = outs.iter().collect();
        terms.push(gen_dependence(&ins, &outs, &p, &q)?);
    }
    Ok(sentence(&[(Quantifier::Forall, &p), (Quantifier::Forall, &q)], Body::conjunction(terms)))
}


#[cfg(test)]
mod distributed_tests {
    use super::*;
    use crate::formula::{classify, parse_body};

    #[test]
    fn pipeline_gets_one_term_per_process() {
        let arch = parse_architecture(
            "process: env inputs{} outputs{a}\n\
             process: p1 inputs{a} outputs{b}\n\
             process: p2 inputs{b} outputs{c}\n\
             process: p3 inputs{c} outputs{d}\n\
             env: env\n",
        )
        .unwrap();
        let f = gen_distributed(&arch, &parse_body("G (a[s] -> F d[s])").unwrap()).unwrap();
        assert_eq!(
            f.to_string(),
            "forall p. forall p'. G (a[p] -> F d[p]) & !(a[p] <-> a[p']) R (b[p] <-> b[p']) \
             & !(b[p] <-> b[p']) R (c[p] <-> c[p']) & !(c[p] <-> c[p']) R (d[p] <-> d[p'])"
        );
        assert_eq!(crate::formula::parse_formula(&f.to_string()).unwrap(), f);
        assert_eq!(f.body().count(&|b| matches!(b, Body::Release(..))), 3);
    }

    #[test]
    fn single_process_observing_everything() {
        let arch = parse_architecture("process: env inputs{} outputs{a, b}\nprocess: p inputs{a, b} outputs{c}\nenv: env\n").unwrap();
        let f = gen_distributed(&arch, &Body::True).unwrap();
        assert_eq!(classify(&f).pattern, "AA");
        let (p, q, _) = vars();
        let d = gen_dependence(&["a", "b"], &["c"], &p, &q).unwrap();
        assert_eq!(f.body(), &Body::and(Body::True, d));
    }

    #[test]
    fn specification_must_fit_the_architecture() {
        let arch = parse_architecture("process: env inputs{} outputs{a}\nprocess: p inputs{a} outputs{b}\nenv: env\n").unwrap();
        assert!(gen_distributed(&arch, &parse_body("G z[s]").unwrap()).is_err());
        assert!(gen_distributed(&arch, &parse_body("G (a[s] <-> b[t])").unwrap()).is_err());
    }
}
