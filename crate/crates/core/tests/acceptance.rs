//! End-to-end acceptance run: one PASS/FAIL line per criterion.

mod common;

use std::collections::BTreeMap;
use std::process::ExitCode;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use hlv_core::automata::{complement, membership, Alphabet, BuchiAutomaton, Guard, LassoWord, Transition};
use hlv_core::kripke::{ap_set, ApSet};
use hlv_core::modelcheck::{
    check, check_basic, evaluate_semantics, oracle_check, validate_witness, CheckError, Strategy, Verdict,
};
use hlv_core::monitor::{eval_body, eval_finite, FiniteTrace, Monitor, MonitorOptions, Violation};
use hlv_core::satcheck::{sat_bounded, sat_exists, sat_exists_forall, sat_forall, SatResult, SatStatus};
use hlv_core::speclib::{gen_dependence, gen_gni, gen_hamming, gen_noninference, gen_obsdet};
use hlv_core::{
    classify, parse_formula, parse_kripke, Body, IndexedAtom, KripkeStructure, Limits, QuantifiedFormula, Quantifier,
    TraceVariable, UltimatelyPeriodicTrace,
};

/// Largest lasso sample the oracle evaluates; above it the case counts as
/// resource-limited.
const ORACLE_LASSO_CAP: usize = 400;
const ORACLE_BOUNDS: (usize, usize) = (8, 8);
const STABILITY_BOUNDS: (usize, usize) = (9, 9);
/// Bounds of the inner-quantifier sample used to re-validate witnesses.
const WITNESS_BOUNDS: (usize, usize) = (3, 3);
const RANDOM_NBAS: usize = 50;
const RANDOM_MONITOR_CASES: usize = 500;
const SEED: u64 = 0x5eed;

struct Outcome {
    pass: bool,
    detail: String,
}

/// Everything the later criteria need to re-validate.
#[derive(Default)]
struct Witnesses {
    verdicts: Vec<(KripkeStructure, QuantifiedFormula, Verdict)>,
    models: Vec<(QuantifiedFormula, SatResult)>,
    violations: Vec<(QuantifiedFormula, Vec<FiniteTrace>, Violation)>,
}

type Criterion = (&'static str, Box<dyn Fn(&Limits, &mut Witnesses) -> Outcome>);

fn main() -> ExitCode {
    let limits = Limits::default();
    let mut w = Witnesses::default();
    let criteria: [Criterion; 8] = [
        ("oracle equivalence (model checking)", Box::new(oracle_equivalence)),
        ("strategy cross-agreement", Box::new(strategy_agreement)),
        ("complement partition", Box::new(complement_partition)),
        ("monitor vs finite semantics", Box::new(monitor_semantics)),
        ("hamming case study", Box::new(hamming_case_study)),
        ("satisfiability", Box::new(satisfiability)),
        ("generator golden formulas", Box::new(|_: &Limits, _: &mut Witnesses| golden_formulas())),
        ("witness validity", Box::new(witness_validity)),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let o = run(&limits, &mut w);
        let verdict = if o.pass { "PASS" } else { "FAIL" };
        println!("criterion {} {name}: {verdict} ({}; {:.1?})", i + 1, o.detail, start.elapsed());
        failed += usize::from(!o.pass);
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} criteria failed");
        ExitCode::FAILURE
    }
}

fn oracle_equivalence(limits: &Limits, w: &mut Witnesses) -> Outcome {
    let family = common::structure_family();
    let corpus = common::formula_corpus();
    let capped = Limits { max_lassos: ORACLE_LASSO_CAP, ..limits.clone() };
    let (mut agree, mut limited, mut unstable) = (0, 0, 0);
    let mut mismatches = Vec::new();
    for k in &family {
        for f in &corpus {
            let basic = check_basic(k, f, limits);
            if let Ok(v) = &basic {
                w.verdicts.push((k.clone(), f.clone(), v.clone()));
            }
            let lo = oracle_check(k, f, ORACLE_BOUNDS.0, ORACLE_BOUNDS.1, &capped);
            let hi = oracle_check(k, f, STABILITY_BOUNDS.0, STABILITY_BOUNDS.1, &capped);
            let (lo, hi) = match (lo, hi) {
                (Ok(lo), Ok(hi)) => (lo, hi),
                (Err(CheckError::ResourceLimit(_)), _) | (_, Err(CheckError::ResourceLimit(_))) => {
                    limited += 1;
                    continue;
                }
                (Err(e), _) | (_, Err(e)) => panic!("oracle failed on `{f}`: {e}"),
            };
            if lo != hi {
                unstable += 1;
                continue;
            }
            match basic {
                Ok(v) if v.holds == lo => agree += 1,
                other => mismatches.push(format!("`{f}` on\n{k}: basic {:?}, oracle {lo}", other.map(|v| v.holds))),
            }
        }
    }
    for m in mismatches.iter().take(3) {
        println!("  mismatch: {m}");
    }
    let total = family.len() * corpus.len();
    Outcome {
        pass: mismatches.is_empty() && agree > 0,
        detail: format!(
            "{} structures x {} formulas: {agree}/{} bound-stable cases agree, {limited} over the {ORACLE_LASSO_CAP}-lasso cap, {unstable} unstable between bounds {ORACLE_BOUNDS:?} and {STABILITY_BOUNDS:?}, {total} total",
            family.len(),
            corpus.len(),
            agree + mismatches.len(),
        ),
    }
}

fn strategy_agreement(limits: &Limits, w: &mut Witnesses) -> Outcome {
    let mut runs = BTreeMap::new();
    let mut bad = Vec::new();
    let basic: Vec<_> = w.verdicts.iter().map(|(k, f, v)| (k.clone(), f.clone(), v.holds)).collect();
    for (k, f, holds) in basic {
        let info = classify(&f);
        let strategy = if info.alternation_free {
            Strategy::SelfComposition
        } else if info.pattern == "AE" {
            Strategy::Inclusion
        } else {
            continue;
        };
        *runs.entry(strategy.name()).or_insert(0) += 1;
        match check(&k, &f, strategy, limits) {
            Ok(v) if v.holds == holds => w.verdicts.push((k, f, v)),
            other => bad.push(format!("{strategy} on `{f}`: {:?}, basic {holds}", other.map(|v| v.holds))),
        }
    }
    for b in bad.iter().take(3) {
        println!("  mismatch: {b}");
    }
    Outcome {
        pass: bad.is_empty(),
        detail: format!(
            "selfcomp {} cases, inclusion {} cases, {} disagreements",
            runs.get("selfcomp").unwrap_or(&0),
            runs.get("inclusion").unwrap_or(&0),
            bad.len()
        ),
    }
}

fn random_nba(rng: &mut ChaCha8Rng) -> BuchiAutomaton {
    let props: Vec<String> = (0..rng.random_range(1..=2)).map(|i| ["a", "b"][i].to_string()).collect();
    let al = Alphabet::new(props, 1).unwrap();
    let n = rng.random_range(1..=4);
    let full = al.full_mask();
    let transitions = (0..n)
        .map(|_| {
            (0..rng.random_range(0..=4))
                .map(|_| {
                    let pos = rng.random::<u64>() & full;
                    let neg = rng.random::<u64>() & full & !pos;
                    Transition { guard: Guard { pos, neg }, target: rng.random_range(0..n) }
                })
                .collect()
        })
        .collect();
    let accepting = (0..n).map(|_| rng.random_bool(0.5)).collect();
    BuchiAutomaton::new(al, vec![0], transitions, accepting)
}

fn all_words(al: &Alphabet, max: usize) -> Vec<Vec<u64>> {
    let letters: Vec<u64> = al.letters().collect();
    let mut out = vec![vec![]];
    let mut layer = vec![vec![]];
    for _ in 0..max {
        layer = layer
            .iter()
            .flat_map(|w: &Vec<u64>| letters.iter().map(move |&l| [w.clone(), vec![l]].concat()))
            .collect();
        out.extend(layer.iter().cloned());
    }
    out
}

fn complement_partition(limits: &Limits, _: &mut Witnesses) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let (mut words, mut bad, mut states) = (0usize, 0usize, 0usize);
    for _ in 0..RANDOM_NBAS {
        let a = random_nba(&mut rng);
        let c = complement(&a, limits).expect("small automata complement within the default caps");
        states = states.max(c.num_states());
        let all = all_words(a.alphabet(), 3);
        for stem in &all {
            for period in all.iter().filter(|p| !p.is_empty()) {
                let w = LassoWord::new(stem.clone(), period.clone());
                words += 1;
                if membership(&a, &w) == membership(&c, &w) {
                    bad += 1;
                }
            }
        }
    }
    Outcome {
        pass: bad == 0,
        detail: format!("{RANDOM_NBAS} automata, {words} lasso words, {bad} misclassified, largest complement {states} states"),
    }
}

const MONITOR_BODIES: [&str; 5] = [
    "forall p. forall q. G (a[p] <-> a[q])",
    "forall p. forall q. (a[p] <-> a[q]) -> G (b[p] <-> b[q])",
    "forall p. forall q. G (a[p] -> X a[q])",
    "forall p. forall q. !a[q] W (a[p] & X a[q])",
    "forall p. forall q. G ((a[p] & a[q]) -> X (b[p] <-> !b[q]))",
];

/// Replays `traces` through fresh monitors, with and without the symmetry
/// reduction, and compares against the finite semantics.
fn monitor_case(f: &QuantifiedFormula, traces: &[FiniteTrace], limits: &Limits, w: &mut Witnesses) -> Result<(), String> {
    let mut seen = Vec::new();
    for symmetry in [false, true] {
        let mut m = Monitor::new(f, MonitorOptions { symmetry }, limits).map_err(|e| e.to_string())?;
        for t in traces {
            m.begin_trace(t.id()).unwrap();
            for e in t.events() {
                m.event(e).unwrap();
            }
            m.end_trace().unwrap();
        }
        if !symmetry {
            for v in m.violations() {
                w.violations.push((f.clone(), traces.to_vec(), v.clone()));
            }
        }
        seen.push(!m.violations().is_empty());
    }
    let expected = !eval_finite(traces, f);
    if seen != [expected, expected] {
        let shown: Vec<String> = traces.iter().map(|t| format!("{:?}", t.events())).collect();
        return Err(format!("`{f}` on {shown:?}: monitor/symmetric {seen:?}, semantics violated {expected}"));
    }
    Ok(())
}

fn traces_over(props: &[&str], max_len: usize) -> Vec<Vec<ApSet>> {
    let letters: Vec<ApSet> = (0..1u32 << props.len())
        .map(|bits| ap_set(props.iter().enumerate().filter(|(i, _)| bits >> i & 1 == 1).map(|(_, p)| *p)))
        .collect();
    let mut out = Vec::new();
    let mut layer: Vec<Vec<ApSet>> = vec![vec![]];
    for _ in 0..max_len {
        layer = layer.iter().flat_map(|t| letters.iter().map(move |l| [t.clone(), vec![l.clone()]].concat())).collect();
        out.extend(layer.iter().cloned());
    }
    out
}

fn finite_set(events: &[&Vec<ApSet>]) -> Vec<FiniteTrace> {
    events.iter().enumerate().map(|(i, e)| FiniteTrace::new(format!("t{}", i + 1), (*e).clone()).unwrap()).collect()
}

fn monitor_semantics(limits: &Limits, w: &mut Witnesses) -> Outcome {
    let formulas: Vec<_> = MONITOR_BODIES.iter().map(|s| parse_formula(s).unwrap()).collect();
    let one_ap = traces_over(&["a"], 4);
    let mut sets: Vec<Vec<&Vec<ApSet>>> = Vec::new();
    for x in &one_ap {
        sets.push(vec![x]);
        for y in &one_ap {
            sets.push(vec![x, y]);
            for z in &one_ap {
                sets.push(vec![x, y, z]);
            }
        }
    }
    let exhaustive = sets.len();
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let two_ap: Vec<Vec<ApSet>> = (0..RANDOM_MONITOR_CASES * 3)
        .map(|_| {
            (0..rng.random_range(1..=6))
                .map(|_| ap_set(["a", "b"].into_iter().filter(|_| rng.random_bool(0.5))))
                .collect()
        })
        .collect();
    for c in two_ap.chunks(3) {
        let n = rng.random_range(1..=3);
        sets.push(c[..n].iter().collect());
    }
    let mut bad = Vec::new();
    let mut violated = 0;
    for set in &sets {
        let traces = finite_set(set);
        for f in &formulas {
            violated += usize::from(!eval_finite(&traces, f));
            if let Err(e) = monitor_case(f, &traces, limits, w) {
                bad.push(e);
            }
        }
    }
    for b in bad.iter().take(3) {
        println!("  mismatch: {b}");
    }
    Outcome {
        pass: bad.is_empty(),
        detail: format!(
            "{} bodies x ({exhaustive} exhaustive + {RANDOM_MONITOR_CASES} random trace sets), {violated} violated, {} disagreements",
            formulas.len(),
            bad.len()
        ),
    }
}

/// Repetition-code encoder: each input bit is emitted on `o` three times.
const HAMMING_ENCODER: &str = "\
states: b0k0 b0k1 b0k2 b1k0 b1k1 b1k2
init: b0k0
ap: i o
label: b1k0 i o
label: b1k1 o
label: b1k2 o
trans: b0k0 -> b0k1
trans: b0k1 -> b0k2
trans: b0k2 -> b0k0 b1k0
trans: b1k0 -> b1k1
trans: b1k1 -> b1k2
trans: b1k2 -> b0k0 b1k0
";

/// Number of positions where `p` and `q` differ on `ap`; `None` if they
/// differ infinitely often.
fn hamming_distance(p: &UltimatelyPeriodicTrace, q: &UltimatelyPeriodicTrace, ap: &str) -> Option<usize> {
    let lcm = |a: usize, b: usize| a * b / gcd(a, b);
    fn gcd(a: usize, b: usize) -> usize {
        if b == 0 { a } else { gcd(b, a % b) }
    }
    let stem = p.stem().len().max(q.stem().len());
    let period = lcm(p.period().len(), q.period().len());
    let differs = |i: usize| p.at(i).contains(ap) != q.at(i).contains(ap);
    if (stem..stem + period).any(differs) {
        return None;
    }
    Some((0..stem).filter(|&i| differs(i)).count())
}

fn hamming_case_study(limits: &Limits, w: &mut Witnesses) -> Outcome {
    let k = parse_kripke(HAMMING_ENCODER).unwrap();
    let run = |d: usize| {
        let f = gen_hamming(d, "i", "o").unwrap();
        let v = check(&k, &f, Strategy::default_for(&f), limits).unwrap();
        (f, v)
    };
    let (f3, v3) = run(3);
    let (f4, v4) = run(4);
    let mut notes = vec![format!("d=3 {}", if v3.holds { "holds" } else { "violated" })];
    let mut pass = v3.holds && !v4.holds;
    match v4.witness.as_ref().map(|w| w.iter().map(|(_, t)| t.clone()).collect::<Vec<_>>()) {
        Some(pair) if pair.len() == 2 => {
            let inputs_differ = hamming_distance(&pair[0], &pair[1], "i") != Some(0);
            let distance = hamming_distance(&pair[0], &pair[1], "o");
            notes.push(format!("d=4 violated, counterexample {} / {}, output distance {distance:?}", pair[0], pair[1]));
            pass &= inputs_differ && distance == Some(3);
        }
        _ => {
            notes.push(format!("d=4 holds={} without a counterexample pair", v4.holds));
            pass = false;
        }
    }
    w.verdicts.push((k.clone(), f3, v3));
    w.verdicts.push((k, f4, v4));
    Outcome { pass, detail: notes.join(", ") }
}

fn satisfiability(limits: &Limits, w: &mut Witnesses) -> Outcome {
    let mut notes = Vec::new();
    let mut pass = true;
    let (mut compared, mut bounded_sat) = (0, 0);
    for f in common::formula_corpus() {
        let info = classify(&f);
        let decided = if info.exists_only {
            sat_exists(&f, limits)
        } else if info.forall_only {
            sat_forall(&f, limits)
        } else if info.exists_forall {
            sat_exists_forall(&f, limits)
        } else {
            continue;
        }
        .unwrap();
        let bounded = sat_bounded(&f, 2, 2, 2, limits).unwrap();
        compared += 1;
        if bounded.status == SatStatus::Sat {
            bounded_sat += 1;
            if decided.status != SatStatus::Sat {
                pass = false;
                notes.push(format!("`{f}`: bounded sat, fragment {}", decided.status));
            }
        }
        if bounded.status == SatStatus::Unsat {
            pass = false;
            notes.push(format!("`{f}`: bounded search claimed unsat"));
        }
        w.models.push((f.clone(), decided));
        w.models.push((f, bounded));
    }
    let trivial = [
        ("exists p. a[p] & !a[p]", SatStatus::Unsat),
        ("exists p. G F a[p]", SatStatus::Sat),
        ("exists p. F a[p]", SatStatus::Sat),
        ("exists p. exists q. G (a[p] & !a[q])", SatStatus::Sat),
        ("exists p. a[p] & !a[p]", SatStatus::Unsat),
        ("forall p. forall q. G (a[p] <-> a[q])", SatStatus::Sat),
        ("forall p. a[p] & !a[p]", SatStatus::Unsat),
        ("forall p. forall q. a[p] & !a[q]", SatStatus::Unsat),
        ("exists p. forall q. a[q] & !a[p]", SatStatus::Unsat),
    ];
    for (text, expected) in trivial {
        let f = parse_formula(text).unwrap();
        let info = classify(&f);
        let r = if info.exists_only {
            sat_exists(&f, limits)
        } else if info.forall_only {
            sat_forall(&f, limits)
        } else {
            sat_exists_forall(&f, limits)
        }
        .unwrap();
        if r.status != expected {
            pass = false;
            notes.push(format!("`{text}`: {} instead of {expected}", r.status));
        }
        w.models.push((f, r));
    }
    for n in &notes {
        println!("  {n}");
    }
    Outcome {
        pass,
        detail: format!(
            "{compared} corpus sentences, {bounded_sat} found sat by bounded search, {} fixed examples, {} problems",
            trivial.len(),
            notes.len()
        ),
    }
}

fn var(name: &str) -> TraceVariable {
    TraceVariable::new(name).unwrap()
}

fn at(ap: &str, v: &str) -> Body {
    Body::Atom(IndexedAtom::new(ap, var(v)))
}

fn iff(a: Body, b: Body) -> Body {
    Body::Iff(Box::new(a), Box::new(b))
}

fn and(a: Body, b: Body) -> Body {
    Body::And(Box::new(a), Box::new(b))
}

fn g(a: Body) -> Body {
    Body::Globally(Box::new(a))
}

fn not(a: Body) -> Body {
    Body::Not(Box::new(a))
}

fn sentence(prefix: &[(Quantifier, &str)], body: Body) -> QuantifiedFormula {
    QuantifiedFormula::new(prefix.iter().map(|(q, v)| (*q, var(v))).collect(), body).unwrap()
}

fn golden_formulas() -> Outcome {
    use Quantifier::{Exists as E, Forall as A};
    let (p, q, r) = ("p", "p'", "p''");
    let cases = [
        (
            "obsdet",
            gen_obsdet(&["l"], &["o"]).unwrap(),
            sentence(
                &[(A, p), (A, q)],
                Body::Implies(Box::new(iff(at("l", p), at("l", q))), Box::new(g(iff(at("o", p), at("o", q))))),
            ),
        ),
        (
            "noninference",
            gen_noninference(&["h"], &["l"], &["o"]).unwrap(),
            sentence(
                &[(A, p), (E, q)],
                g(and(and(not(at("h", q)), iff(at("l", p), at("l", q))), iff(at("o", p), at("o", q)))),
            ),
        ),
        (
            "gni",
            gen_gni(&["h"], &["l"], &["o"]).unwrap(),
            sentence(
                &[(A, p), (A, q), (E, r)],
                g(and(and(iff(at("h", p), at("h", r)), iff(at("l", q), at("l", r))), iff(at("o", q), at("o", r)))),
            ),
        ),
        (
            "dependence",
            sentence(&[(A, p), (A, q)], gen_dependence(&["a"], &["c"], &var(p), &var(q)).unwrap()),
            sentence(
                &[(A, p), (A, q)],
                Body::Release(Box::new(not(iff(at("a", p), at("a", q)))), Box::new(iff(at("c", p), at("c", q)))),
            ),
        ),
    ];
    let mut bad = Vec::new();
    for (name, got, want) in &cases {
        let reparsed = parse_formula(&got.to_string()).ok();
        if got != want || reparsed.as_ref() != Some(want) {
            bad.push(*name);
            println!("  {name}: got `{got}`, want `{want}`");
        }
    }
    Outcome {
        pass: bad.is_empty(),
        detail: format!("{} generators, {} mismatched", cases.len(), bad.len()),
    }
}

fn witness_validity(limits: &Limits, w: &mut Witnesses) -> Outcome {
    let mut bad = Vec::new();
    let mut checked = [0usize; 3];
    for (k, f, v) in &w.verdicts {
        if v.witness.is_none() {
            continue;
        }
        checked[0] += 1;
        match validate_witness(k, f, v, WITNESS_BOUNDS.0, WITNESS_BOUNDS.1, limits) {
            Ok(true) => {}
            other => bad.push(format!("{} witness for `{f}`: {other:?}", v.strategy)),
        }
    }
    for (f, r) in &w.models {
        if let Some(model) = &r.model {
            checked[1] += 1;
            let traces: Vec<_> = model.iter().cloned().collect();
            if !evaluate_semantics(&traces, f) {
                bad.push(format!("model for `{f}`"));
            }
        }
    }
    for (f, traces, v) in &w.violations {
        checked[2] += 1;
        let assignment: BTreeMap<TraceVariable, &[ApSet]> = f
            .variables()
            .into_iter()
            .zip(&v.tuple)
            .map(|(x, id)| (x, traces.iter().find(|t| t.id() == id).unwrap().events()))
            .collect();
        let values = eval_body(f.body(), &assignment);
        let cut = assignment.values().map(|e| e.len()).min().unwrap();
        if values[0] || v.position >= cut {
            bad.push(format!("violation {v} of `{f}`"));
        }
    }
    for b in bad.iter().take(3) {
        println!("  invalid: {b}");
    }
    Outcome {
        pass: bad.is_empty(),
        detail: format!(
            "{} model-checking witnesses, {} satisfiability models, {} monitor violations, {} invalid",
            checked[0],
            checked[1],
            checked[2],
            bad.len()
        ),
    }
}
