use std::collections::{HashMap, VecDeque};
use std::hash::Hash;

use super::{mask, AutomataError, BuchiAutomaton, Guard, Transition};
use crate::kripke::KripkeStructure;
use crate::limits::{Limits, ResourceLimit};

/// Worklist construction of a product automaton from hashable state keys.
pub(crate) fn explore<K: Clone + Eq + Hash>(
    alphabet: &super::Alphabet,
    initial: Vec<K>,
    limits: &Limits,
    what: &'static str,
    accepting: impl Fn(&K) -> bool,
    mut successors: impl FnMut(&K) -> Result<Vec<(Guard, K)>, AutomataError>,
) -> Result<BuchiAutomaton, AutomataError> {
    let mut index: HashMap<K, usize> = HashMap::new();
    let mut keys: Vec<K> = Vec::new();
    let mut queue = VecDeque::new();
    let mut init = Vec::new();
    let mut intern = |k: K, keys: &mut Vec<K>, queue: &mut VecDeque<usize>| -> Result<usize, AutomataError> {
        if let Some(&i) = index.get(&k) {
            return Ok(i);
        }
        if keys.len() >= limits.max_states {
            return Err(ResourceLimit::new(what, limits.max_states).into());
        }
        let i = keys.len();
        index.insert(k.clone(), i);
        keys.push(k);
        queue.push_back(i);
        Ok(i)
    };
    for k in initial {
        init.push(intern(k, &mut keys, &mut queue)?);
    }
    let mut transitions: Vec<Vec<Transition>> = Vec::new();
    while let Some(i) = queue.pop_front() {
        let succ = successors(&keys[i])?;
        let mut out = Vec::with_capacity(succ.len());
        for (guard, k) in succ {
            let target = intern(k, &mut keys, &mut queue)?;
            out.push(Transition { guard, target });
        }
        out.sort();
        out.dedup();
        if transitions.len() <= i {
            transitions.resize(i + 1, Vec::new());
        }
        transitions[i] = out;
    }
    transitions.resize(keys.len(), Vec::new());
    let acc = keys.iter().map(accepting).collect();
    init.sort();
    init.dedup();
    Ok(BuchiAutomaton::new(alphabet.clone(), init, transitions, acc))
}

/// Restricts component `component` (1-based) of every accepted word to the
/// traces of `k`. Alphabet propositions that `k` does not declare are false
/// along its traces.
pub fn constrain_component(
    a: &BuchiAutomaton,
    k: &KripkeStructure,
    component: usize,
    limits: &Limits,
) -> Result<BuchiAutomaton, AutomataError> {
    let al = a.alphabet();
    if component == 0 || component > al.arity() {
        return Err(AutomataError::ComponentOutOfRange(component, al.arity()));
    }
    let c = component - 1;
    let mut bits = Vec::with_capacity(k.ap().len());
    for name in k.ap() {
        bits.push(
            al.bit(c, name)
                .ok_or_else(|| AutomataError::UnknownProposition(name.clone()))?,
        );
    }
    let comp_mask = al.component_mask(c);
    let fixed: Vec<Guard> = (0..k.num_states())
        .map(|s| {
            let l = k.label_bits(s);
            let pos = bits
                .iter()
                .enumerate()
                .filter(|(i, _)| l >> i & 1 == 1)
                .fold(0u64, |acc, (_, &b)| acc | 1 << b);
            Guard::letter(pos, comp_mask)
        })
        .collect();
    let initial = a.initial().iter().map(|&q| (q, k.initial())).collect();
    explore(
        al,
        initial,
        limits,
        "constrained product states",
        |&(q, _)| a.is_accepting(q),
        |&(q, s)| {
            let mut out = Vec::new();
            for t in a.transitions(q) {
                if let Some(g) = t.guard.and(&fixed[s]) {
                    for &s2 in k.successors(s) {
                        out.push((g, (t.target, s2)));
                    }
                }
            }
            Ok(out)
        },
    )
}

/// Existential projection: removes component `component` (1-based).
pub fn project(a: &BuchiAutomaton, component: usize) -> Result<BuchiAutomaton, AutomataError> {
    let al = a.alphabet();
    if component == 0 || component > al.arity() {
        return Err(AutomataError::ComponentOutOfRange(component, al.arity()));
    }
    let m = al.ap().len();
    let c = component - 1;
    let low = mask(c * m);
    let keep_high = !mask((c + 1) * m);
    let squeeze = |x: u64| (x & low) | ((x & keep_high) >> m);
    let transitions = (0..a.num_states())
        .map(|q| {
            let mut ts: Vec<Transition> = a
                .transitions(q)
                .iter()
                .map(|t| Transition {
                    guard: Guard {
                        pos: squeeze(t.guard.pos),
                        neg: squeeze(t.guard.neg),
                    },
                    target: t.target,
                })
                .collect();
            ts.sort();
            ts.dedup();
            ts
        })
        .collect();
    Ok(BuchiAutomaton::new(
        al.without_component(),
        a.initial().to_vec(),
        transitions,
        (0..a.num_states()).map(|q| a.is_accepting(q)).collect(),
    ))
}

/// Language intersection.
pub fn intersect(a: &BuchiAutomaton, b: &BuchiAutomaton, limits: &Limits) -> Result<BuchiAutomaton, AutomataError> {
    if a.alphabet() != b.alphabet() {
        return Err(AutomataError::AlphabetMismatch(
            a.alphabet().describe(),
            b.alphabet().describe(),
        ));
    }
    let pairs = |p: usize, q: usize| {
        let mut out = Vec::new();
        for s in a.transitions(p) {
            for t in b.transitions(q) {
                if let Some(g) = s.guard.and(&t.guard) {
                    out.push((g, s.target, t.target));
                }
            }
        }
        out
    };
    let initial = a
        .initial()
        .iter()
        .flat_map(|&p| b.initial().iter().map(move |&q| (p, q, 0u8)))
        .collect();
    let single_phase = a.all_accepting() || b.all_accepting();
    explore(
        a.alphabet(),
        initial,
        limits,
        "intersection states",
        |&(p, q, phase)| {
            if single_phase {
                a.is_accepting(p) && b.is_accepting(q)
            } else {
                phase == 0 && a.is_accepting(p)
            }
        },
        |&(p, q, phase)| {
            let next = if single_phase {
                0
            } else if phase == 0 && a.is_accepting(p) {
                1
            } else if phase == 1 && b.is_accepting(q) {
                0
            } else {
                phase
            };
            Ok(pairs(p, q).into_iter().map(|(g, p2, q2)| (g, (p2, q2, next))).collect())
        },
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::automata::testutil::{all_lassos, random_nba};
    use crate::automata::{emptiness, ltl_to_nba, membership, Alphabet, LassoWord};
    use crate::formula::{parse_body, TraceVariable};
    use crate::kripke::parse_kripke;

    fn vars(n: usize) -> Vec<TraceVariable> {
        ["p", "q"][..n].iter().map(|v| TraceVariable::new(*v).unwrap()).collect()
    }

    fn nba(text: &str, al: &Alphabet) -> BuchiAutomaton {
        ltl_to_nba(&parse_body(text).unwrap(), &vars(al.arity()), al, &Limits::default()).unwrap()
    }

    #[test]
    fn constrain_to_single_loop() {
        let al = Alphabet::new(vec!["a".into()], 1).unwrap();
        let k = parse_kripke("states: s\ninit: s\nap: a\nlabel: s a\ntrans: s -> s\n").unwrap();
        let c = constrain_component(&BuchiAutomaton::universal(al.clone()), &k, 1, &Limits::default()).unwrap();
        for w in all_lassos(&al, 2, 2) {
            assert_eq!(membership(&c, &w), w.stem.iter().chain(&w.period).all(|&l| l == 1));
        }
    }

    #[test]
    fn constrain_detects_always_a_trace() {
        let al = Alphabet::new(vec!["a".into()], 1).unwrap();
        let g = nba("G a[p]", &al);
        let k2 = parse_kripke("states: s0 s1 s2\ninit: s0\nap: a\nlabel: s1 a\ntrans: s0 -> s1 s2\ntrans: s1 -> s1\ntrans: s2 -> s2\n").unwrap();
        assert!(emptiness(&constrain_component(&g, &k2, 1, &Limits::default()).unwrap()).is_none());
        let k = parse_kripke("states: s0 s1\ninit: s0\nap: a\nlabel: s0 a\ntrans: s0 -> s0 s1\ntrans: s1 -> s1\n").unwrap();
        assert!(emptiness(&constrain_component(&g, &k, 1, &Limits::default()).unwrap()).is_some());
    }

    #[test]
    fn constrain_matches_two_condition_check() {
        let al = Alphabet::new(vec!["a".into()], 1).unwrap();
        let a = nba("F G !a[p] | G F (a[p] & X a[p])", &al);
        let k = parse_kripke("states: s0 s1 s2\ninit: s0\nap: a\nlabel: s1 a\nlabel: s2 a\ntrans: s0 -> s0 s1\ntrans: s1 -> s2 s0\ntrans: s2 -> s0\n").unwrap();
        let kb = BuchiAutomaton::from_kripke(&k, &al).unwrap();
        let c = constrain_component(&a, &k, 1, &Limits::default()).unwrap();
        for w in all_lassos(&al, 3, 3) {
            assert_eq!(membership(&c, &w), membership(&a, &w) && membership(&kb, &w), "{w:?}");
        }
    }

    #[test]
    fn projecting_equality_is_universal() {
        let al = Alphabet::new(vec!["a".into()], 2).unwrap();
        let p = project(&nba("G (a[p] <-> a[q])", &al), 1).unwrap();
        assert_eq!(p.arity(), 1);
        for w in all_lassos(p.alphabet(), 2, 2) {
            assert!(membership(&p, &w));
        }
    }

    #[test]
    fn projection_to_arity_zero() {
        let al = Alphabet::new(vec!["a".into()], 1).unwrap();
        let u = project(&BuchiAutomaton::universal(al.clone()), 1).unwrap();
        assert!(emptiness(&u).is_some());
        assert_eq!(u.alphabet().letters().count(), 1);
        assert!(emptiness(&project(&BuchiAutomaton::empty(al), 1).unwrap()).is_none());
    }

    #[test]
    fn projection_is_existential() {
        let al = Alphabet::new(vec!["a".into(), "b".into()], 2).unwrap();
        let small = al.without_component();
        for (i, text) in ["G (a[p] -> X b[q])", "F (a[q] & !b[p]) & G F b[q]"].iter().enumerate() {
            let a = nba(text, &al);
            for comp in 1..=2 {
                let p = project(&a, comp).unwrap();
                for w in all_lassos(&small, 1, 2) {
                    let lifted = all_lassos(&Alphabet::new(al.ap().to_vec(), 1).unwrap(), 1, 2)
                        .into_iter()
                        .any(|x| membership(&a, &insert(&w, &x, comp - 1, 2)));
                    assert_eq!(membership(&p, &w), lifted, "case {i} comp {comp} {w:?}");
                }
            }
        }
    }

    /// Inserts the arity-1 word `x` as component `c` of the arity-1 word `w`.
    fn insert(w: &LassoWord, x: &LassoWord, c: usize, m: usize) -> LassoWord {
        let stem = w.stem.len().max(x.stem.len());
        let period = crate::automata::lcm(w.period.len(), x.period.len());
        let letter = |i: usize| {
            let (wl, xl) = (w.at(i), x.at(i));
            if c == 0 {
                xl | wl << m
            } else {
                wl | xl << m
            }
        };
        LassoWord::new((0..stem).map(letter).collect(), (stem..stem + period).map(letter).collect())
    }

    #[test]
    fn intersections() {
        let al = Alphabet::new(vec!["a".into()], 1).unwrap();
        let f = nba("F a[p]", &al);
        let g = nba("G !a[p]", &al);
        let lim = Limits::default();
        assert!(emptiness(&intersect(&f, &g, &lim).unwrap()).is_none());
        let u = BuchiAutomaton::universal(al.clone());
        let gf = nba("G F a[p]", &al);
        let fg = nba("F G a[p] | G F !a[p]", &al);
        let both = intersect(&gf, &fg, &lim).unwrap();
        for w in all_lassos(&al, 2, 3) {
            assert_eq!(membership(&intersect(&f, &u, &lim).unwrap(), &w), membership(&f, &w));
            assert_eq!(membership(&both, &w), membership(&gf, &w) && membership(&fg, &w));
        }
        let r = random_nba(&Alphabet::new(vec!["a".into()], 2).unwrap(), 3, 7);
        assert!(intersect(&r, &f, &lim).is_err());
    }
}
