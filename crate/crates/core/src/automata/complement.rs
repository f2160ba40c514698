//! Rank-based complementation with tight rankings.
//!
//! The complement first tracks the plain subset of reachable states and may
//! at any point guess a tight level ranking, after which it checks that the
//! states of each even rank eventually all leave that rank, cycling through
//! the even ranks one at a time.

use std::collections::{BTreeSet, HashMap};

use super::ops::explore;
use super::{AutomataError, BuchiAutomaton, Guard, Letter, Transition};
use crate::limits::{Limits, ResourceLimit};

type Rank = u16;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
enum Macro {
    Subset(Vec<usize>),
    /// Ranking as `(state, rank)` sorted by state; `owing` is the set of
    /// states of rank `level` still being watched.
    Ranked {
        ranks: Vec<(usize, Rank)>,
        owing: Vec<usize>,
        level: Rank,
    },
}

impl Macro {
    fn accepting(&self) -> bool {
        match self {
            Macro::Subset(s) => s.is_empty(),
            Macro::Ranked { owing, .. } => owing.is_empty(),
        }
    }
}

struct Ctx {
    post: Vec<Vec<Vec<usize>>>,
    accepting: Vec<bool>,
    max_rank: Rank,
}

impl Ctx {
    fn post_set(&self, from: impl IntoIterator<Item = usize>, letter: usize) -> Vec<usize> {
        let set: BTreeSet<usize> = from.into_iter().flat_map(|q| self.post[q][letter].iter().copied()).collect();
        set.into_iter().collect()
    }

    /// Tight rankings of `states` with maximal rank `top`, pointwise below
    /// `bound`, even on accepting states.
    fn rankings(&self, states: &[usize], bound: &[Rank], top: Rank, out: &mut Vec<Vec<(usize, Rank)>>, cap: usize) -> bool {
        let mut current = Vec::with_capacity(states.len());
        let mut covered = vec![0usize; top as usize + 1];
        self.rank_rec(states, bound, top, 0, &mut current, &mut covered, out, cap)
    }

    #[allow(clippy::too_many_arguments)]
    fn rank_rec(
        &self,
        states: &[usize],
        bound: &[Rank],
        top: Rank,
        i: usize,
        current: &mut Vec<(usize, Rank)>,
        covered: &mut Vec<usize>,
        out: &mut Vec<Vec<(usize, Rank)>>,
        cap: usize,
    ) -> bool {
        let missing = (1..=top).step_by(2).filter(|&r| covered[r as usize] == 0).count();
        if missing > states[i..].iter().filter(|&&q| !self.accepting[q]).count() {
            return true;
        }
        if i == states.len() {
            if out.len() >= cap {
                return false;
            }
            out.push(current.clone());
            return true;
        }
        let q = states[i];
        for r in 0..=bound[i].min(top) {
            if self.accepting[q] && r % 2 == 1 {
                continue;
            }
            current.push((q, r));
            covered[r as usize] += 1;
            let ok = self.rank_rec(states, bound, top, i + 1, current, covered, out, cap);
            covered[r as usize] -= 1;
            current.pop();
            if !ok {
                return false;
            }
        }
        true
    }
}

/// A Büchi automaton accepting exactly the words `a` rejects.
pub fn complement(a: &BuchiAutomaton, limits: &Limits) -> Result<BuchiAutomaton, AutomataError> {
    let universal = BuchiAutomaton::universal(a.alphabet().clone());
    Ok(merge_letters(difference(&universal, a, limits)?))
}

/// An automaton for `L(a) \ L(b)`: the product of `a` with the complement
/// of `b`, built on the fly so that complement states are only explored
/// along words `a` can read.
pub fn difference(a: &BuchiAutomaton, b: &BuchiAutomaton, limits: &Limits) -> Result<BuchiAutomaton, AutomataError> {
    if a.alphabet() != b.alphabet() {
        return Err(AutomataError::AlphabetMismatch(
            a.alphabet().describe(),
            b.alphabet().describe(),
        ));
    }
    let b = b.trim();
    let al = a.alphabet().clone();
    if 1u128 << al.bits() > limits.max_letters as u128 {
        return Err(ResourceLimit::new("complement alphabet letters", limits.max_letters).into());
    }
    if b.num_states() == 0 {
        return Ok(a.trim());
    }
    let letters: Vec<Letter> = al.letters().collect();
    let n = b.num_states();
    let max_rank = 2 * (n - b.num_accepting());
    if max_rank > Rank::MAX as usize {
        return Err(ResourceLimit::new("complement rank bound", Rank::MAX as usize).into());
    }
    let ctx = Ctx {
        post: (0..n).map(|q| letters.iter().map(|&l| b.post(q, l)).collect()).collect(),
        accepting: (0..n).map(|q| b.is_accepting(q)).collect(),
        max_rank: max_rank as Rank,
    };
    let full = al.full_mask();
    let cap = limits.max_states;
    let single_phase = a.all_accepting();
    let start = Macro::Subset(b.initial().to_vec());
    let initial = a.initial().iter().map(|&p| (p, start.clone(), 0u8)).collect();
    let product = explore(
        &al,
        initial,
        limits,
        "complement states",
        |(p, m, phase)| {
            if single_phase {
                m.accepting()
            } else {
                *phase == 0 && a.is_accepting(*p)
            }
        },
        |(p, m, phase)| {
            let next = if single_phase {
                0
            } else if *phase == 0 && a.is_accepting(*p) {
                1
            } else if *phase == 1 && m.accepting() {
                0
            } else {
                *phase
            };
            let mut out = Vec::new();
            let mut targets = Vec::new();
            for t in a.transitions(*p) {
                for &letter in letters.iter().filter(|&&l| t.guard.matches(l)) {
                    targets.clear();
                    successors(&ctx, m, letter as usize, cap, &mut targets)?;
                    for m2 in targets.drain(..) {
                        out.push((Guard::letter(letter, full), (t.target, m2, next)));
                    }
                }
            }
            Ok(out)
        },
    )?;
    Ok(product.trim())
}

fn successors(ctx: &Ctx, m: &Macro, letter: usize, cap: usize, out: &mut Vec<Macro>) -> Result<(), AutomataError> {
    let too_many = || AutomataError::from(ResourceLimit::new("tight rankings per step", cap));
    match m {
        Macro::Subset(s) => {
            let next = ctx.post_set(s.iter().copied(), letter);
            if !next.is_empty() {
                let mut rankings = Vec::new();
                let bound = vec![ctx.max_rank; next.len()];
                for top in (1..ctx.max_rank).step_by(2) {
                    if !ctx.rankings(&next, &bound, top, &mut rankings, cap) {
                        return Err(too_many());
                    }
                }
                for ranks in rankings {
                    out.push(Macro::Ranked {
                        ranks,
                        owing: Vec::new(),
                        level: 0,
                    });
                }
            }
            out.push(Macro::Subset(next));
        }
        Macro::Ranked { ranks, owing, level } => {
            let mut bound: HashMap<usize, Rank> = HashMap::new();
            for &(q, r) in ranks {
                for &t in &ctx.post[q][letter] {
                    let e = bound.entry(t).or_insert(r);
                    *e = (*e).min(r);
                }
            }
            if bound.is_empty() {
                out.push(Macro::Subset(Vec::new()));
                return Ok(());
            }
            let mut next: Vec<usize> = bound.keys().copied().collect();
            next.sort();
            let bounds: Vec<Rank> = next.iter().map(|q| bound[q]).collect();
            let top = ranks.iter().map(|&(_, r)| r).max().unwrap_or(0);
            let mut rankings = Vec::new();
            if !ctx.rankings(&next, &bounds, top, &mut rankings, cap) {
                return Err(too_many());
            }
            let followed: BTreeSet<usize> = if owing.is_empty() {
                BTreeSet::new()
            } else {
                ctx.post_set(owing.iter().copied(), letter).into_iter().collect()
            };
            for g in rankings {
                let (owing2, level2) = if owing.is_empty() {
                    let l = (level + 2) % (top + 1);
                    (g.iter().filter(|&&(_, r)| r == l).map(|&(q, _)| q).collect(), l)
                } else {
                    (
                        g.iter()
                            .filter(|&&(q, r)| r == *level && followed.contains(&q))
                            .map(|&(q, _)| q)
                            .collect(),
                        *level,
                    )
                };
                out.push(Macro::Ranked {
                    ranks: g,
                    owing: owing2,
                    level: level2,
                });
            }
        }
    }
    Ok(())
}

/// Collapses parallel single-letter transitions that differ in one bit.
fn merge_letters(a: BuchiAutomaton) -> BuchiAutomaton {
    let full = a.alphabet().full_mask();
    let bits = a.alphabet().bits();
    let transitions = (0..a.num_states())
        .map(|q| {
            let mut set: BTreeSet<Transition> = a.transitions(q).iter().copied().collect();
            for bit in 0..bits {
                let b = 1u64 << bit;
                let mut merged = BTreeSet::new();
                for t in &set {
                    let fixed = (t.guard.pos | t.guard.neg) & b != 0;
                    let other = Transition {
                        guard: Guard {
                            pos: t.guard.pos ^ (t.guard.pos & b) | (t.guard.neg & b),
                            neg: t.guard.neg ^ (t.guard.neg & b) | (t.guard.pos & b),
                        },
                        target: t.target,
                    };
                    if fixed && set.contains(&other) {
                        merged.insert(Transition {
                            guard: Guard {
                                pos: t.guard.pos & !b,
                                neg: t.guard.neg & !b & full,
                            },
                            target: t.target,
                        });
                    } else {
                        merged.insert(*t);
                    }
                }
                set = merged;
            }
            set.into_iter().collect()
        })
        .collect();
    BuchiAutomaton::new(
        a.alphabet().clone(),
        a.initial().to_vec(),
        transitions,
        (0..a.num_states()).map(|q| a.is_accepting(q)).collect(),
    )
}
