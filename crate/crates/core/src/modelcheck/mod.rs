//! Model checking HyperLTL sentences against Kripke structures.
//!
//! Three automata-based procedures are provided: quantifier elimination
//! ([`check_basic`]), self-composition for alternation-free sentences
//! ([`check_selfcomp`]) and language inclusion for `∀∃` sentences
//! ([`check_inclusion`]). [`oracle_check`] evaluates the semantics directly
//! on a bounded sample of lasso traces.

mod semantics;

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

pub use semantics::{evaluate_body, evaluate_from, evaluate_semantics, TraceAssignment};

use crate::automata::{
    complement, constrain_component, difference, emptiness, intersect, ltl_to_nba, project, Alphabet, AutomataError,
    BuchiAutomaton, LassoWord,
};
use crate::formula::{classify, Body, QuantifiedFormula, Quantifier, TraceVariable};
use crate::kripke::{enumerate_lassos, self_compose, KripkeError, KripkeStructure, UltimatelyPeriodicTrace};
use crate::limits::{Limits, ResourceLimit};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Strategy {
    Basic,
    SelfComposition,
    Inclusion,
}

impl Strategy {
    pub fn name(self) -> &'static str {
        match self {
            Strategy::Basic => "basic",
            Strategy::SelfComposition => "selfcomp",
            Strategy::Inclusion => "inclusion",
        }
    }

    /// Self-composition when alternation-free, inclusion for `∀∃`, the
    /// basic algorithm otherwise.
    pub fn default_for(f: &QuantifiedFormula) -> Strategy {
        let info = classify(f);
        if info.alternation_free && !f.prefix().is_empty() {
            Strategy::SelfComposition
        } else if info.pattern == "AE" {
            Strategy::Inclusion
        } else {
            Strategy::Basic
        }
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Strategy {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "basic" => Ok(Strategy::Basic),
            "selfcomp" => Ok(Strategy::SelfComposition),
            "inclusion" => Ok(Strategy::Inclusion),
            _ => Err(format!("unknown strategy `{s}`")),
        }
    }
}

/// Outcome of a model-checking run.
///
/// `witness` binds the variables of the outermost quantifier block: a
/// counterexample when a leading `∀` fails, a witness when a leading `∃`
/// holds. Its traces are restricted to the propositions of the formula.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Verdict {
    pub holds: bool,
    pub witness: Option<TraceAssignment>,
    pub strategy: Strategy,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CheckError {
    #[error("fragment error: {0}")]
    Fragment(String),
    #[error(transparent)]
    ResourceLimit(ResourceLimit),
    #[error(transparent)]
    Automata(AutomataError),
    #[error(transparent)]
    Kripke(KripkeError),
    #[error("no lasso within stem bound {0} and loop bound {1}")]
    NoLassos(usize, usize),
}

impl From<AutomataError> for CheckError {
    fn from(e: AutomataError) -> Self {
        match e {
            AutomataError::ResourceLimit(r) => CheckError::ResourceLimit(r),
            e => CheckError::Automata(e),
        }
    }
}

impl From<KripkeError> for CheckError {
    fn from(e: KripkeError) -> Self {
        match e {
            KripkeError::ResourceLimit(r) => CheckError::ResourceLimit(r),
            e => CheckError::Kripke(e),
        }
    }
}

/// The structure restricted to the formula's propositions, plus the data
/// every procedure needs.
struct Setup<'f> {
    k: KripkeStructure,
    props: Vec<String>,
    vars: Vec<TraceVariable>,
    quantifiers: Vec<Quantifier>,
    body: &'f Body,
}

impl<'f> Setup<'f> {
    fn new(k: &KripkeStructure, f: &'f QuantifiedFormula) -> Result<Self, CheckError> {
        let props: Vec<String> = f.propositions().into_iter().collect();
        let vars = f.variables();
        if props.len() * vars.len() > 64 {
            return Err(AutomataError::TooManyBits(vars.len(), props.len()).into());
        }
        Ok(Setup {
            k: k.restrict_ap(&props)?,
            props,
            vars,
            quantifiers: f.quantifiers(),
            body: f.body(),
        })
    }

    fn alphabet(&self, arity: usize) -> Alphabet {
        Alphabet::new(self.props.clone(), arity).expect("checked in Setup::new")
    }

    fn nba(&self, positive: bool, limits: &Limits) -> Result<BuchiAutomaton, CheckError> {
        let body = if positive {
            self.body.clone()
        } else {
            Body::not(self.body.clone())
        };
        Ok(ltl_to_nba(&body, &self.vars, &self.alphabet(self.vars.len()), limits)?)
    }

    /// Turns an emptiness result for the outermost block into a verdict.
    fn verdict(&self, word: Option<LassoWord>, arity: usize, strategy: Strategy) -> Verdict {
        let exists = self.quantifiers[0] == Quantifier::Exists;
        let witness = word.map(|w| {
            let traces = w.traces(&self.alphabet(arity));
            for t in &traces {
                assert!(self.k.has_trace(t), "witness trace {t} is not a trace of the structure");
            }
            self.vars
                .iter()
                .cloned()
                .zip(traces.into_iter().map(|t| t.normalized()))
                .collect::<TraceAssignment>()
        });
        Verdict {
            holds: witness.is_some() == exists,
            witness,
            strategy,
        }
    }
}

/// Number of leading quantifiers equal to the first.
fn outer_block(qs: &[Quantifier]) -> usize {
    qs.iter().take_while(|&&q| q == qs[0]).count()
}

/// Dispatches to the procedure named by `strategy`.
pub fn check(
    k: &KripkeStructure,
    f: &QuantifiedFormula,
    strategy: Strategy,
    limits: &Limits,
) -> Result<Verdict, CheckError> {
    match strategy {
        Strategy::Basic => check_basic(k, f, limits),
        Strategy::SelfComposition => check_selfcomp(k, f, limits),
        Strategy::Inclusion => check_inclusion(k, f, limits),
    }
}

/// Quantifier elimination from the innermost quantifier outwards.
///
/// The automaton for the remaining suffix is kept either for the set of
/// satisfying tuples or for its complement, whichever the next projection
/// needs; a complementation happens exactly when the quantifier kind
/// changes. The outermost quantifier block is not projected: its components
/// are all constrained to the structure and the emptiness witness gives the
/// witness or counterexample tuple.
pub fn check_basic(k: &KripkeStructure, f: &QuantifiedFormula, limits: &Limits) -> Result<Verdict, CheckError> {
    let s = Setup::new(k, f)?;
    let n = s.vars.len();
    if n == 0 {
        let a = ltl_to_nba(s.body, &[], &s.alphabet(0), limits)?;
        return Ok(Verdict {
            holds: emptiness(&a).is_some(),
            witness: None,
            strategy: Strategy::Basic,
        });
    }
    let qs = &s.quantifiers;
    let b = outer_block(qs);
    let mut positive = qs[n - 1] == Quantifier::Exists;
    let mut a = s.nba(positive, limits)?;
    for i in (b + 1..=n).rev() {
        let want = qs[i - 1] == Quantifier::Exists;
        if positive != want {
            a = complement(&a, limits)?;
            positive = want;
        }
        a = project(&constrain_component(&a, &s.k, i, limits)?, i)?.trim();
    }
    if positive != (qs[0] == Quantifier::Exists) {
        a = complement(&a, limits)?;
    }
    for c in 1..=b {
        a = constrain_component(&a, &s.k, c, limits)?;
    }
    Ok(s.verdict(emptiness(&a), b, Strategy::Basic))
}

/// Alternation-free sentences: one emptiness check on the product of the
/// `n`-fold self-composition with the automaton for the body (negated for
/// `∀*`).
pub fn check_selfcomp(k: &KripkeStructure, f: &QuantifiedFormula, limits: &Limits) -> Result<Verdict, CheckError> {
    let info = classify(f);
    if !info.alternation_free || f.prefix().is_empty() {
        return Err(CheckError::Fragment(format!(
            "self-composition needs a nonempty alternation-free prefix, got `{}`",
            info.pattern
        )));
    }
    let s = Setup::new(k, f)?;
    let n = s.vars.len();
    let system = BuchiAutomaton::from_kripke(&self_compose(&s.k, n, limits)?, &s.alphabet(n))?;
    let body = s.nba(s.quantifiers[0] == Quantifier::Exists, limits)?;
    let product = intersect(&system, &body, limits)?;
    Ok(s.verdict(emptiness(&product), n, Strategy::SelfComposition))
}

/// `∀π.∃π′` sentences: the traces of the structure must be contained in the
/// projection of (2-fold self-composition ∩ body).
pub fn check_inclusion(k: &KripkeStructure, f: &QuantifiedFormula, limits: &Limits) -> Result<Verdict, CheckError> {
    let info = classify(f);
    if info.pattern != "AE" {
        return Err(CheckError::Fragment(format!(
            "language inclusion needs the prefix `AE`, got `{}`",
            info.pattern
        )));
    }
    let s = Setup::new(k, f)?;
    // the first component needs no restriction: only traces of the
    // structure are ever tested against `good`
    let good = project(&constrain_component(&s.nba(true, limits)?, &s.k, 2, limits)?, 2)?;
    let traces = BuchiAutomaton::from_kripke(&s.k, &s.alphabet(1))?;
    let bad = difference(&traces, &good, limits)?;
    Ok(s.verdict(emptiness(&bad), 1, Strategy::Inclusion))
}

/// The lasso traces of `k` within the bounds, restricted to the
/// propositions of `f`.
pub fn sample_traces(
    k: &KripkeStructure,
    f: &QuantifiedFormula,
    stem_bound: usize,
    loop_bound: usize,
    limits: &Limits,
) -> Result<Vec<UltimatelyPeriodicTrace>, CheckError> {
    let props: Vec<String> = f.propositions().into_iter().collect();
    let k = k.restrict_ap(&props)?;
    let traces: Vec<_> = enumerate_lassos(&k, stem_bound, loop_bound, limits)?.into_iter().collect();
    if traces.is_empty() {
        return Err(CheckError::NoLassos(stem_bound, loop_bound));
    }
    Ok(traces)
}

/// Evaluates `f` directly over the lasso traces of `k` within the bounds.
/// Agrees with the automata-based procedures only relative to the bounds.
pub fn oracle_check(
    k: &KripkeStructure,
    f: &QuantifiedFormula,
    stem_bound: usize,
    loop_bound: usize,
    limits: &Limits,
) -> Result<bool, CheckError> {
    Ok(evaluate_semantics(&sample_traces(k, f, stem_bound, loop_bound, limits)?, f))
}

/// Re-checks a verdict's witness: its traces must be traces of `k`, and
/// evaluating `f` with the witness variables fixed (inner quantifiers
/// ranging over the bounded lasso sample plus the witness traces) must
/// reproduce the verdict. Verdicts without witness pass trivially.
pub fn validate_witness(
    k: &KripkeStructure,
    f: &QuantifiedFormula,
    verdict: &Verdict,
    stem_bound: usize,
    loop_bound: usize,
    limits: &Limits,
) -> Result<bool, CheckError> {
    let Some(w) = &verdict.witness else {
        return Ok(true);
    };
    let props: Vec<String> = f.propositions().into_iter().collect();
    let restricted = k.restrict_ap(&props)?;
    if !w.iter().all(|(_, t)| restricted.has_trace(t)) {
        return Ok(false);
    }
    let mut traces = sample_traces(k, f, stem_bound, loop_bound, limits)?;
    for (_, t) in w.iter() {
        if !traces.contains(t) {
            traces.push(t.clone());
        }
    }
    Ok(evaluate_from(&traces, f, w) == verdict.holds)
}
