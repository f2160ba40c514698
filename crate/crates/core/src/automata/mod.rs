//! Nondeterministic Büchi automata over tuple alphabets `(2^AP)^n`.
//!
//! A letter of arity `n` over propositions `AP` is packed into a `u64`: bit
//! `c·|AP| + j` holds proposition `j` of component `c` (0-based). Components
//! are written 1-based in proposition names, as in `a@1`. Guards are cubes
//! (conjunctions of literals); a disjunctive guard is expressed by parallel
//! transitions.

mod complement;
mod emptiness;
mod ltl;
mod ops;

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

use crate::kripke::{split_indexed, ApSet, KripkeStructure, UltimatelyPeriodicTrace};
use crate::limits::ResourceLimit;

pub use complement::{complement, difference};
pub use emptiness::{emptiness, membership};
pub use ltl::ltl_to_nba;
pub use ops::{constrain_component, intersect, project};

pub type Letter = u64;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AutomataError {
    #[error(transparent)]
    ResourceLimit(#[from] ResourceLimit),
    #[error("alphabets differ: {0} vs {1}")]
    AlphabetMismatch(String, String),
    #[error("{0} components over {1} propositions do not fit in a 64-bit letter")]
    TooManyBits(usize, usize),
    #[error("proposition `{0}` is not in the alphabet")]
    UnknownProposition(String),
    #[error("trace variable `{0}` has no component")]
    UnknownVariable(String),
    #[error("component {0} out of range for arity {1}")]
    ComponentOutOfRange(usize, usize),
}

/// The letter space `(2^ap)^arity`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Alphabet {
    ap: Vec<String>,
    arity: usize,
}

impl Alphabet {
    pub fn new(ap: Vec<String>, arity: usize) -> Result<Self, AutomataError> {
        if ap.len() * arity > 64 {
            return Err(AutomataError::TooManyBits(arity, ap.len()));
        }
        Ok(Alphabet { ap, arity })
    }

    pub fn ap(&self) -> &[String] {
        &self.ap
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn bits(&self) -> usize {
        self.ap.len() * self.arity
    }

    pub fn full_mask(&self) -> u64 {
        mask(self.bits())
    }

    /// Mask of the bits of `component` (0-based).
    pub fn component_mask(&self, component: usize) -> u64 {
        mask(self.ap.len()) << (component * self.ap.len())
    }

    pub fn bit(&self, component: usize, ap: &str) -> Option<u32> {
        let j = self.ap.iter().position(|a| a == ap)?;
        (component < self.arity).then(|| (component * self.ap.len() + j) as u32)
    }

    /// Same propositions, arity reduced by one.
    pub fn without_component(&self) -> Alphabet {
        Alphabet {
            ap: self.ap.clone(),
            arity: self.arity.saturating_sub(1),
        }
    }

    /// Every letter, in increasing order.
    pub fn letters(&self) -> impl Iterator<Item = Letter> {
        0..=self.full_mask()
    }

    /// Component `component` (0-based) of `letter` as a proposition set.
    pub fn component_set(&self, letter: Letter, component: usize) -> ApSet {
        let m = self.ap.len();
        self.ap
            .iter()
            .enumerate()
            .filter(|(j, _)| letter >> (component * m + j) & 1 == 1)
            .map(|(_, a)| a.clone())
            .collect()
    }

    /// Packs one proposition set per component; unknown propositions are
    /// ignored.
    pub fn letter_of(&self, sets: &[&ApSet]) -> Letter {
        let m = self.ap.len();
        sets.iter().enumerate().fold(0, |acc, (c, s)| {
            self.ap
                .iter()
                .enumerate()
                .filter(|(_, a)| s.contains(*a))
                .fold(acc, |acc, (j, _)| acc | 1 << (c * m + j))
        })
    }

    pub(crate) fn describe(&self) -> String {
        format!("arity {} over {{{}}}", self.arity, self.ap.join(","))
    }
}

pub(crate) fn mask(bits: usize) -> u64 {
    if bits >= 64 {
        u64::MAX
    } else {
        (1u64 << bits) - 1
    }
}

/// A conjunction of literals over letter bits. `pos & neg == 0` always.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Guard {
    pub pos: u64,
    pub neg: u64,
}

impl Guard {
    pub const TRUE: Guard = Guard { pos: 0, neg: 0 };

    /// The guard matching exactly `letter` within `full`.
    pub fn letter(letter: Letter, full: u64) -> Guard {
        Guard {
            pos: letter,
            neg: full & !letter,
        }
    }

    pub fn matches(&self, letter: Letter) -> bool {
        letter & self.pos == self.pos && letter & self.neg == 0
    }

    /// Conjunction, or `None` when contradictory.
    pub fn and(&self, other: &Guard) -> Option<Guard> {
        let g = Guard {
            pos: self.pos | other.pos,
            neg: self.neg | other.neg,
        };
        (g.pos & g.neg == 0).then_some(g)
    }

    /// Some letter satisfying the guard.
    pub fn witness(&self) -> Letter {
        self.pos
    }

    pub(crate) fn render(&self, alphabet: &Alphabet) -> String {
        let m = alphabet.ap.len();
        let mut lits = Vec::new();
        for bit in 0..alphabet.bits() {
            let name = || format!("{}@{}", alphabet.ap[bit % m], bit / m + 1);
            if self.pos >> bit & 1 == 1 {
                lits.push(name());
            } else if self.neg >> bit & 1 == 1 {
                lits.push(format!("!{}", name()));
            }
        }
        if lits.is_empty() {
            "true".to_string()
        } else {
            lits.join(" & ")
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Transition {
    pub guard: Guard,
    pub target: usize,
}

/// State-based Büchi automaton with cube-guarded transitions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BuchiAutomaton {
    alphabet: Alphabet,
    initial: Vec<usize>,
    transitions: Vec<Vec<Transition>>,
    accepting: Vec<bool>,
}

impl BuchiAutomaton {
    pub fn new(
        alphabet: Alphabet,
        initial: Vec<usize>,
        transitions: Vec<Vec<Transition>>,
        accepting: Vec<bool>,
    ) -> Self {
        assert_eq!(transitions.len(), accepting.len());
        let n = accepting.len();
        assert!(initial.iter().all(|&q| q < n));
        let full = alphabet.full_mask();
        for t in transitions.iter().flatten() {
            assert!(t.target < n, "transition target out of range");
            assert!(t.guard.pos & t.guard.neg == 0, "contradictory guard");
            assert!((t.guard.pos | t.guard.neg) & !full == 0, "guard outside the alphabet");
        }
        BuchiAutomaton {
            alphabet,
            initial,
            transitions,
            accepting,
        }
    }

    /// Accepts every word.
    pub fn universal(alphabet: Alphabet) -> Self {
        BuchiAutomaton::new(
            alphabet,
            vec![0],
            vec![vec![Transition {
                guard: Guard::TRUE,
                target: 0,
            }]],
            vec![true],
        )
    }

    /// Accepts nothing.
    pub fn empty(alphabet: Alphabet) -> Self {
        BuchiAutomaton::new(alphabet, vec![], vec![], vec![])
    }

    /// The traces of `k` as an automaton. Propositions named `a@i` belong to
    /// component `i`, plain names to component 1; alphabet propositions the
    /// structure does not mention are false along its traces.
    pub fn from_kripke(k: &KripkeStructure, alphabet: &Alphabet) -> Result<Self, AutomataError> {
        let mut bits = Vec::with_capacity(k.ap().len());
        let mut covered = 0u64;
        for name in k.ap() {
            let (base, comp) = split_indexed(name).unwrap_or((name.as_str(), 1));
            if comp > alphabet.arity() {
                return Err(AutomataError::ComponentOutOfRange(comp, alphabet.arity()));
            }
            let bit = alphabet
                .bit(comp - 1, base)
                .ok_or_else(|| AutomataError::UnknownProposition(name.clone()))?;
            bits.push(bit);
            covered |= alphabet.component_mask(comp - 1);
        }
        let letter_of = |s: usize| {
            let l = k.label_bits(s);
            bits.iter()
                .enumerate()
                .filter(|(i, _)| l >> i & 1 == 1)
                .fold(0u64, |acc, (_, &b)| acc | 1 << b)
        };
        let transitions = (0..k.num_states())
            .map(|s| {
                let g = Guard::letter(letter_of(s), covered);
                k.successors(s)
                    .iter()
                    .map(|&t| Transition { guard: g, target: t })
                    .collect()
            })
            .collect();
        Ok(BuchiAutomaton::new(
            alphabet.clone(),
            vec![k.initial()],
            transitions,
            vec![true; k.num_states()],
        ))
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn arity(&self) -> usize {
        self.alphabet.arity
    }

    pub fn num_states(&self) -> usize {
        self.accepting.len()
    }

    pub fn num_transitions(&self) -> usize {
        self.transitions.iter().map(Vec::len).sum()
    }

    pub fn initial(&self) -> &[usize] {
        &self.initial
    }

    pub fn transitions(&self, q: usize) -> &[Transition] {
        &self.transitions[q]
    }

    pub fn is_accepting(&self, q: usize) -> bool {
        self.accepting[q]
    }

    pub fn num_accepting(&self) -> usize {
        self.accepting.iter().filter(|&&a| a).count()
    }

    pub fn all_accepting(&self) -> bool {
        self.accepting.iter().all(|&a| a)
    }

    /// Successors of `q` on `letter`, sorted and deduplicated.
    pub fn post(&self, q: usize, letter: Letter) -> Vec<usize> {
        let set: BTreeSet<usize> = self.transitions[q]
            .iter()
            .filter(|t| t.guard.matches(letter))
            .map(|t| t.target)
            .collect();
        set.into_iter().collect()
    }

    /// Drops states that are unreachable or cannot reach an accepting cycle.
    /// The language is unchanged.
    pub fn trim(&self) -> BuchiAutomaton {
        let useful = emptiness::useful_states(self);
        let mut remap = vec![usize::MAX; self.num_states()];
        let mut next = 0;
        for (q, &u) in useful.iter().enumerate() {
            if u {
                remap[q] = next;
                next += 1;
            }
        }
        let mut transitions = vec![Vec::new(); next];
        let mut accepting = vec![false; next];
        for q in 0..self.num_states() {
            if remap[q] == usize::MAX {
                continue;
            }
            accepting[remap[q]] = self.accepting[q];
            let mut out: Vec<Transition> = self.transitions[q]
                .iter()
                .filter(|t| remap[t.target] != usize::MAX)
                .map(|t| Transition {
                    guard: t.guard,
                    target: remap[t.target],
                })
                .collect();
            out.sort();
            out.dedup();
            transitions[remap[q]] = out;
        }
        let initial = self
            .initial
            .iter()
            .filter(|&&q| remap[q] != usize::MAX)
            .map(|&q| remap[q])
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();
        BuchiAutomaton {
            alphabet: self.alphabet.clone(),
            initial,
            transitions,
            accepting,
        }
    }
}

/// Debug dump: one line per transition, `*` marks accepting states.
impl fmt::Display for BuchiAutomaton {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "# {} states, {}", self.num_states(), self.alphabet.describe())?;
        let mark = |q: usize| if self.accepting[q] { "*" } else { "" };
        let init: Vec<String> = self.initial.iter().map(|q| format!("q{q}{}", mark(*q))).collect();
        writeln!(f, "init: {}", init.join(" "))?;
        for q in 0..self.num_states() {
            for t in &self.transitions[q] {
                writeln!(
                    f,
                    "q{q}{} -- {} --> q{}{}",
                    mark(q),
                    t.guard.render(&self.alphabet),
                    t.target,
                    mark(t.target)
                )?;
            }
        }
        Ok(())
    }
}

/// An ultimately periodic word `stem · period^ω` over packed letters.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct LassoWord {
    pub stem: Vec<Letter>,
    pub period: Vec<Letter>,
}

impl LassoWord {
    pub fn new(stem: Vec<Letter>, period: Vec<Letter>) -> Self {
        assert!(!period.is_empty(), "a lasso word needs a nonempty period");
        LassoWord { stem, period }
    }

    pub fn at(&self, i: usize) -> Letter {
        if i < self.stem.len() {
            self.stem[i]
        } else {
            self.period[(i - self.stem.len()) % self.period.len()]
        }
    }

    /// Splits the word into one trace per component.
    pub fn traces(&self, alphabet: &Alphabet) -> Vec<UltimatelyPeriodicTrace> {
        (0..alphabet.arity())
            .map(|c| {
                let part = |xs: &[Letter]| xs.iter().map(|&l| alphabet.component_set(l, c)).collect();
                UltimatelyPeriodicTrace::new(part(&self.stem), part(&self.period))
            })
            .collect()
    }

    /// Zips traces into one word: stem length is the longest stem, period
    /// length the lcm of the periods.
    pub fn zip(traces: &[&UltimatelyPeriodicTrace], alphabet: &Alphabet) -> LassoWord {
        let stem_len = traces.iter().map(|t| t.stem().len()).max().unwrap_or(0);
        let period_len = traces.iter().map(|t| t.period().len()).fold(1, lcm);
        let letter = |i: usize| {
            let sets: Vec<&ApSet> = traces.iter().map(|t| t.at(i)).collect();
            alphabet.letter_of(&sets)
        };
        LassoWord {
            stem: (0..stem_len).map(letter).collect(),
            period: (stem_len..stem_len + period_len).map(letter).collect(),
        }
    }
}

pub(crate) fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

pub(crate) fn lcm(a: usize, b: usize) -> usize {
    a / gcd(a, b) * b
}

#[cfg(test)]
pub(crate) mod testutil;
