use std::collections::{BTreeSet, HashMap, VecDeque};
use std::fmt;

use crate::automata::{Alphabet, Guard, Letter};
use crate::formula::{is_syntactic_safety, Body, TraceVariable};
use crate::limits::{Limits, ResourceLimit};

use super::MonitorError;

type Id = usize;

/// Negation normal form under finite-trace semantics: `X` is strong (a next
/// position must exist) and `N` is its weak dual.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
enum Node {
    True,
    False,
    Lit(u32, bool),
    And(Id, Id),
    Or(Id, Id),
    X(Id),
    N(Id),
    U(Id, Id),
}

#[derive(Debug, Clone, Default)]
struct Arena {
    nodes: Vec<Node>,
    index: HashMap<Node, Id>,
}

const TRUE: Id = 0;
const FALSE: Id = 1;

impl Arena {
    fn new() -> Self {
        let mut a = Arena::default();
        a.add(Node::True);
        a.add(Node::False);
        a
    }

    fn add(&mut self, n: Node) -> Id {
        let n = match n {
            Node::And(x, y) if x == FALSE || y == FALSE => return FALSE,
            Node::And(x, y) if x == TRUE || x == y => return y,
            Node::And(x, TRUE) => return x,
            Node::Or(x, y) if x == TRUE || y == TRUE => return TRUE,
            Node::Or(x, y) if x == FALSE || x == y => return y,
            Node::Or(x, FALSE) => return x,
            Node::X(FALSE) => return FALSE,
            Node::N(TRUE) => return TRUE,
            Node::U(_, FALSE) => return FALSE,
            Node::U(_, TRUE) => return TRUE,
            n => n,
        };
        if let Some(&id) = self.index.get(&n) {
            return id;
        }
        self.nodes.push(n.clone());
        self.index.insert(n, self.nodes.len() - 1);
        self.nodes.len() - 1
    }

    /// `positive` selects the body or its negation. Fails on operators that
    /// would need a release in the result.
    fn nnf(&mut self, b: &Body, positive: bool, bit: &impl Fn(&str, &TraceVariable) -> u32) -> Result<Id, ()> {
        let node = match (b, positive) {
            (Body::True, p) | (Body::False, p) if matches!(b, Body::True) == p => Node::True,
            (Body::True, _) | (Body::False, _) => Node::False,
            (Body::Atom(a), p) => Node::Lit(bit(&a.ap, &a.var), p),
            (Body::Not(x), p) => return self.nnf(x, !p, bit),
            (Body::And(x, y), true) | (Body::Or(x, y), false) => Node::And(self.nnf(x, positive, bit)?, self.nnf(y, positive, bit)?),
            (Body::Or(x, y), true) | (Body::And(x, y), false) => Node::Or(self.nnf(x, positive, bit)?, self.nnf(y, positive, bit)?),
            (Body::Implies(x, y), true) => Node::Or(self.nnf(x, false, bit)?, self.nnf(y, true, bit)?),
            (Body::Implies(x, y), false) => Node::And(self.nnf(x, true, bit)?, self.nnf(y, false, bit)?),
            (Body::Iff(x, y), p) => {
                let (xt, xf, yt, yf) = (self.nnf(x, true, bit)?, self.nnf(x, false, bit)?, self.nnf(y, true, bit)?, self.nnf(y, false, bit)?);
                let (l, r) = if p {
                    (self.add(Node::And(xt, yt)), self.add(Node::And(xf, yf)))
                } else {
                    (self.add(Node::And(xt, yf)), self.add(Node::And(xf, yt)))
                };
                Node::Or(l, r)
            }
            (Body::Next(x), true) => Node::X(self.nnf(x, true, bit)?),
            (Body::Next(x), false) => Node::N(self.nnf(x, false, bit)?),
            (Body::Until(x, y), true) => Node::U(self.nnf(x, true, bit)?, self.nnf(y, true, bit)?),
            (Body::Finally(x), true) => Node::U(TRUE, self.nnf(x, true, bit)?),
            (Body::Globally(x), false) => Node::U(TRUE, self.nnf(x, false, bit)?),
            (Body::Release(x, y), false) => Node::U(self.nnf(x, false, bit)?, self.nnf(y, false, bit)?),
            (Body::WeakUntil(x, y), false) => {
                let (xf, yf) = (self.nnf(x, false, bit)?, self.nnf(y, false, bit)?);
                let both = self.add(Node::And(xf, yf));
                Node::U(yf, both)
            }
            (Body::Until(..) | Body::Finally(_), false) | (Body::Globally(_) | Body::Release(..) | Body::WeakUntil(..), true) => {
                return Err(())
            }
        };
        Ok(self.add(node))
    }
}

/// One way to satisfy a set of obligations at the current position.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
struct Term {
    pos: Letter,
    neg: Letter,
    strong: BTreeSet<Id>,
    weak: BTreeSet<Id>,
}

impl Term {
    fn empty() -> Self {
        Term {
            pos: 0,
            neg: 0,
            strong: BTreeSet::new(),
            weak: BTreeSet::new(),
        }
    }

    fn and(&self, o: &Term) -> Option<Term> {
        let (pos, neg) = (self.pos | o.pos, self.neg | o.neg);
        (pos & neg == 0).then(|| Term {
            pos,
            neg,
            strong: self.strong.union(&o.strong).copied().collect(),
            weak: self.weak.union(&o.weak).copied().collect(),
        })
    }
}

/// Obligations for the current position: `strong` ones need the position to
/// exist, `weak` ones hold vacuously when the word has ended.
type Obligations = (BTreeSet<Id>, BTreeSet<Id>);

/// Deterministic automaton over tuple letters recognizing the informative
/// bad prefixes of a safety body.
///
/// Every state also records whether a word ending there violates the body
/// under finite-trace semantics, which catches violations that only arise
/// from the word ending (a strong next at the last position).
#[derive(Debug, Clone)]
pub struct BadPrefixDfa {
    alphabet: Alphabet,
    initial: usize,
    /// `delta[q][letter]`
    delta: Vec<Vec<usize>>,
    violating: Vec<bool>,
    violating_at_end: Vec<bool>,
}

impl BadPrefixDfa {
    /// Component `c` of a letter reads `vars[c]`.
    pub fn build(body: &Body, vars: &[TraceVariable], alphabet: &Alphabet, limits: &Limits) -> Result<Self, MonitorError> {
        if !is_syntactic_safety(body) {
            return Err(MonitorError::Fragment("the body is not a syntactic safety formula".into()));
        }
        if vars.len() != alphabet.arity() {
            return Err(MonitorError::Fragment(format!(
                "{} trace variables for an alphabet of arity {}",
                vars.len(),
                alphabet.arity()
            )));
        }
        if let Some(v) = body.variables().into_iter().find(|v| !vars.contains(v)) {
            return Err(MonitorError::Fragment(format!("trace variable `{v}` has no component")));
        }
        if let Some(p) = body.propositions().into_iter().find(|p| !alphabet.ap().contains(p)) {
            return Err(MonitorError::Fragment(format!("proposition `{p}` is not in the alphabet")));
        }
        let letters = 1u128 << alphabet.bits();
        if letters > limits.max_letters as u128 {
            return Err(ResourceLimit::new("monitor alphabet letters", limits.max_letters).into());
        }
        let mut arena = Arena::new();
        let bit = |ap: &str, v: &TraceVariable| {
            let c = vars.iter().position(|x| x == v).expect("variable of the prefix");
            alphabet.bit(c, ap).expect("proposition of the alphabet")
        };
        let root = arena
            .nnf(body, false, &bit)
            .map_err(|_| MonitorError::Fragment("the body is not a syntactic safety formula".into()))?;
        let mut nfa = Nfa {
            arena,
            states: Vec::new(),
            index: HashMap::new(),
            terms: Vec::new(),
            limits,
        };
        let sink = nfa.state((BTreeSet::new(), BTreeSet::new()))?;
        // the first position always exists, so the root obligation is strong
        let start = if root == TRUE {
            sink
        } else {
            nfa.state((BTreeSet::from([root]), BTreeSet::new()))?
        };

        let letters = letters as usize;
        let mut sets: Vec<BTreeSet<usize>> = Vec::new();
        let mut index: HashMap<BTreeSet<usize>, usize> = HashMap::new();
        let mut queue = VecDeque::new();
        let mut intern = |s: BTreeSet<usize>, sets: &mut Vec<BTreeSet<usize>>, queue: &mut VecDeque<usize>| -> Result<usize, MonitorError> {
            let s = if s.contains(&sink) { BTreeSet::from([sink]) } else { s };
            if let Some(&q) = index.get(&s) {
                return Ok(q);
            }
            if sets.len() >= limits.max_states {
                return Err(ResourceLimit::new("monitor automaton states", limits.max_states).into());
            }
            sets.push(s.clone());
            index.insert(s, sets.len() - 1);
            queue.push_back(sets.len() - 1);
            Ok(sets.len() - 1)
        };
        let initial = intern(BTreeSet::from([start]), &mut sets, &mut queue)?;
        let mut delta = Vec::new();
        while let Some(q) = queue.pop_front() {
            let mut row = vec![0; letters];
            for (letter, slot) in row.iter_mut().enumerate() {
                let mut next = BTreeSet::new();
                for &s in &sets[q].clone() {
                    next.extend(nfa.post(s, letter as Letter)?);
                }
                *slot = intern(next, &mut sets, &mut queue)?;
            }
            delta.push(row);
        }
        let violating = sets.iter().map(|s| s.contains(&sink)).collect();
        let violating_at_end = sets.iter().map(|s| s.iter().any(|&n| nfa.states[n].0.is_empty())).collect();
        Ok(BadPrefixDfa {
            alphabet: alphabet.clone(),
            initial,
            delta,
            violating,
            violating_at_end,
        })
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn num_states(&self) -> usize {
        self.delta.len()
    }

    pub fn initial(&self) -> usize {
        self.initial
    }

    pub fn step(&self, q: usize, letter: Letter) -> usize {
        self.delta[q][letter as usize]
    }

    pub fn run(&self, word: &[Letter]) -> usize {
        word.iter().fold(self.initial, |q, &l| self.step(q, l))
    }

    /// Every extension of a word reaching `q` violates the body.
    pub fn is_violating(&self, q: usize) -> bool {
        self.violating[q]
    }

    /// A word that ends in `q` violates the body.
    pub fn is_violating_at_end(&self, q: usize) -> bool {
        self.violating_at_end[q]
    }

    /// Outgoing transitions of `q` with letters grouped into cubes.
    pub fn guards(&self, q: usize) -> Vec<(Guard, usize)> {
        let full = self.alphabet.full_mask();
        let mut by_target: Vec<(usize, Vec<Letter>)> = Vec::new();
        for (l, &t) in self.delta[q].iter().enumerate() {
            match by_target.iter_mut().find(|(x, _)| *x == t) {
                Some((_, ls)) => ls.push(l as Letter),
                None => by_target.push((t, vec![l as Letter])),
            }
        }
        let mut out = Vec::new();
        for (t, ls) in by_target {
            for g in cover(&ls, full) {
                out.push((g, t));
            }
        }
        out
    }
}

/// Cubes whose union is exactly `letters`: letters are merged pairwise on
/// one differing bit until nothing merges.
fn cover(letters: &[Letter], full: Letter) -> Vec<Guard> {
    let mut cubes: BTreeSet<(Letter, Letter)> = letters.iter().map(|&l| (l, full)).collect();
    loop {
        let mut merged = None;
        'find: for &(v, care) in &cubes {
            for b in 0..64 {
                let bit = 1 << b;
                if care & bit != 0 && cubes.contains(&(v ^ bit, care)) {
                    merged = Some(((v, care), (v ^ bit, care), (v & !bit, care & !bit)));
                    break 'find;
                }
            }
        }
        match merged {
            Some((x, y, m)) => {
                cubes.remove(&x);
                cubes.remove(&y);
                cubes.insert(m);
            }
            None => break,
        }
    }
    cubes
        .into_iter()
        .map(|(v, care)| Guard {
            pos: v & care,
            neg: !v & care,
        })
        .collect()
}

impl fmt::Display for BadPrefixDfa {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "initial {}", self.initial)?;
        for q in 0..self.num_states() {
            let mark = match (self.violating[q], self.violating_at_end[q]) {
                (true, _) => " violating",
                (false, true) => " violating-at-end",
                _ => "",
            };
            writeln!(f, "state {q}{mark}")?;
            for (g, t) in self.guards(q) {
                writeln!(f, "  {} -> {t}", g.render(&self.alphabet))?;
            }
        }
        Ok(())
    }
}

struct Nfa<'l> {
    arena: Arena,
    states: Vec<Obligations>,
    index: HashMap<Obligations, usize>,
    /// Expansion of each state, computed on first use.
    terms: Vec<Option<Vec<Term>>>,
    limits: &'l Limits,
}

impl Nfa<'_> {
    fn state(&mut self, (strong, mut weak): Obligations) -> Result<usize, MonitorError> {
        weak.remove(&TRUE);
        weak.retain(|x| !strong.contains(x));
        let key = (strong, weak);
        if let Some(&s) = self.index.get(&key) {
            return Ok(s);
        }
        if self.states.len() >= self.limits.max_states {
            return Err(ResourceLimit::new("monitor automaton states", self.limits.max_states).into());
        }
        self.states.push(key.clone());
        self.terms.push(None);
        self.index.insert(key, self.states.len() - 1);
        Ok(self.states.len() - 1)
    }

    fn post(&mut self, s: usize, letter: Letter) -> Result<Vec<usize>, MonitorError> {
        if self.terms[s].is_none() {
            let (strong, weak) = self.states[s].clone();
            let mut acc = vec![Term::empty()];
            for &o in strong.iter().chain(&weak) {
                let alts = self.expand(o);
                acc = self.product(&acc, &alts)?;
            }
            self.terms[s] = Some(acc);
        }
        let matching: Vec<Term> = self.terms[s]
            .as_ref()
            .expect("expanded above")
            .iter()
            .filter(|t| letter & t.pos == t.pos && letter & t.neg == 0)
            .cloned()
            .collect();
        matching.into_iter().map(|t| self.state((t.strong, t.weak))).collect()
    }

    fn product(&self, xs: &[Term], ys: &[Term]) -> Result<Vec<Term>, MonitorError> {
        let mut out = BTreeSet::new();
        for x in xs {
            for y in ys {
                if let Some(t) = x.and(y) {
                    out.insert(t);
                    if out.len() > self.limits.max_conjuncts {
                        return Err(ResourceLimit::new("monitor expansion terms", self.limits.max_conjuncts).into());
                    }
                }
            }
        }
        Ok(out.into_iter().collect())
    }

    /// Alternatives for satisfying `id` at a position that exists.
    fn expand(&self, id: Id) -> Vec<Term> {
        let one = |f: &dyn Fn(&mut Term)| {
            let mut t = Term::empty();
            f(&mut t);
            vec![t]
        };
        match self.arena.nodes[id] {
            Node::True => vec![Term::empty()],
            Node::False => Vec::new(),
            Node::Lit(bit, true) => one(&|t| t.pos = 1 << bit),
            Node::Lit(bit, false) => one(&|t| t.neg = 1 << bit),
            Node::X(x) => one(&|t| {
                t.strong.insert(x);
            }),
            Node::N(x) => one(&|t| {
                t.weak.insert(x);
            }),
            Node::And(x, y) => {
                let (xs, ys) = (self.expand(x), self.expand(y));
                xs.iter().flat_map(|a| ys.iter().filter_map(move |b| a.and(b))).collect()
            }
            Node::Or(x, y) => {
                let mut v = self.expand(x);
                v.extend(self.expand(y));
                v
            }
            // b | (a & X (a U b))
            Node::U(x, y) => {
                let mut v = self.expand(y);
                let later = Term {
                    strong: BTreeSet::from([id]),
                    ..Term::empty()
                };
                v.extend(self.expand(x).iter().filter_map(|a| a.and(&later)));
                v
            }
        }
    }
}
