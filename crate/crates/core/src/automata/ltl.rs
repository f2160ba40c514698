//! Tableau translation from LTL bodies to Büchi automata.
//!
//! Formulas are hash-consed in negation normal form. A tableau state is the
//! set of obligations for the current position; expanding it yields a cube
//! guard, the obligations for the next position, and the set of untils whose
//! eventuality was postponed. The resulting transition-based generalized
//! Büchi automaton has one acceptance set per until and is degeneralized
//! with a counter.

use std::collections::{BTreeSet, HashMap, HashSet, VecDeque};

use super::{Alphabet, AutomataError, BuchiAutomaton, Guard, Transition};
use crate::formula::{Body, TraceVariable};
use crate::limits::{Limits, ResourceLimit};

type Id = usize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
enum Node {
    True,
    False,
    Lit(u32, bool),
    And(Id, Id),
    Or(Id, Id),
    Next(Id),
    Until(Id, Id),
    Release(Id, Id),
}

struct Arena<'a> {
    nodes: Vec<Node>,
    index: HashMap<Node, Id>,
    vars: &'a [TraceVariable],
    alphabet: &'a Alphabet,
}

const TRUE: Id = 0;
const FALSE: Id = 1;

impl<'a> Arena<'a> {
    fn new(vars: &'a [TraceVariable], alphabet: &'a Alphabet) -> Self {
        let mut a = Arena {
            nodes: Vec::new(),
            index: HashMap::new(),
            vars,
            alphabet,
        };
        a.intern(Node::True);
        a.intern(Node::False);
        a
    }

    fn intern(&mut self, n: Node) -> Id {
        if let Some(&id) = self.index.get(&n) {
            return id;
        }
        let id = self.nodes.len();
        self.nodes.push(n);
        self.index.insert(n, id);
        id
    }

    fn and(&mut self, a: Id, b: Id) -> Id {
        match (a, b) {
            (FALSE, _) | (_, FALSE) => FALSE,
            (TRUE, x) | (x, TRUE) => x,
            _ if a == b => a,
            _ => self.intern(Node::And(a.min(b), a.max(b))),
        }
    }

    fn or(&mut self, a: Id, b: Id) -> Id {
        match (a, b) {
            (TRUE, _) | (_, TRUE) => TRUE,
            (FALSE, x) | (x, FALSE) => x,
            _ if a == b => a,
            _ => self.intern(Node::Or(a.min(b), a.max(b))),
        }
    }

    fn next(&mut self, a: Id) -> Id {
        match a {
            TRUE | FALSE => a,
            _ => self.intern(Node::Next(a)),
        }
    }

    fn until(&mut self, a: Id, b: Id) -> Id {
        match (a, b) {
            (_, TRUE) => TRUE,
            (_, FALSE) => FALSE,
            (FALSE, _) => b,
            _ => self.intern(Node::Until(a, b)),
        }
    }

    fn release(&mut self, a: Id, b: Id) -> Id {
        match (a, b) {
            (_, TRUE) => TRUE,
            (_, FALSE) => FALSE,
            (TRUE, _) => b,
            _ => self.intern(Node::Release(a, b)),
        }
    }

    /// Builds `b` (or its negation when `!pos`) in negation normal form.
    fn build(&mut self, b: &Body, pos: bool) -> Result<Id, AutomataError> {
        Ok(match b {
            Body::True => [FALSE, TRUE][pos as usize],
            Body::False => [TRUE, FALSE][pos as usize],
            Body::Atom(atom) => {
                let comp = self
                    .vars
                    .iter()
                    .position(|v| *v == atom.var)
                    .ok_or_else(|| AutomataError::UnknownVariable(atom.var.name().to_string()))?;
                let bit = self
                    .alphabet
                    .bit(comp, &atom.ap)
                    .ok_or_else(|| AutomataError::UnknownProposition(atom.ap.clone()))?;
                self.intern(Node::Lit(bit, pos))
            }
            Body::Not(x) => self.build(x, !pos)?,
            Body::And(x, y) | Body::Or(x, y) => {
                let (l, r) = (self.build(x, pos)?, self.build(y, pos)?);
                if matches!(b, Body::And(..)) == pos {
                    self.and(l, r)
                } else {
                    self.or(l, r)
                }
            }
            Body::Implies(x, y) => {
                let (l, r) = (self.build(x, !pos)?, self.build(y, pos)?);
                if pos {
                    self.or(l, r)
                } else {
                    self.and(l, r)
                }
            }
            Body::Iff(x, y) => {
                let (xp, xn) = (self.build(x, true)?, self.build(x, false)?);
                let (yp, yn) = (self.build(y, true)?, self.build(y, false)?);
                let (l, r) = if pos {
                    (self.and(xp, yp), self.and(xn, yn))
                } else {
                    (self.and(xp, yn), self.and(xn, yp))
                };
                self.or(l, r)
            }
            Body::Next(x) => {
                let x = self.build(x, pos)?;
                self.next(x)
            }
            Body::Until(x, y) | Body::Release(x, y) => {
                let (l, r) = (self.build(x, pos)?, self.build(y, pos)?);
                if matches!(b, Body::Until(..)) == pos {
                    self.until(l, r)
                } else {
                    self.release(l, r)
                }
            }
            Body::WeakUntil(x, y) => {
                let (xs, ys) = (self.build(x, pos)?, self.build(y, pos)?);
                if pos {
                    let either = self.or(xs, ys);
                    self.release(ys, either)
                } else {
                    let both = self.and(xs, ys);
                    self.until(ys, both)
                }
            }
            Body::Finally(x) => {
                let x = self.build(x, pos)?;
                if pos {
                    self.until(TRUE, x)
                } else {
                    self.release(FALSE, x)
                }
            }
            Body::Globally(x) => {
                let x = self.build(x, pos)?;
                if pos {
                    self.release(FALSE, x)
                } else {
                    self.until(TRUE, x)
                }
            }
        })
    }
}

#[derive(Clone)]
struct Partial {
    todo: Vec<Id>,
    done: HashSet<Id>,
    guard: Guard,
    next: BTreeSet<Id>,
    postponed: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
struct Step {
    guard: Guard,
    next: Vec<Id>,
    postponed: u64,
}

fn expand(nodes: &[Node], until_index: &HashMap<Id, u32>, state: &[Id]) -> Vec<Step> {
    let mut out = HashSet::new();
    let mut stack = vec![Partial {
        todo: state.to_vec(),
        done: HashSet::new(),
        guard: Guard::TRUE,
        next: BTreeSet::new(),
        postponed: 0,
    }];
    'branches: while let Some(mut p) = stack.pop() {
        while let Some(f) = p.todo.pop() {
            if !p.done.insert(f) {
                continue;
            }
            match nodes[f] {
                Node::True => {}
                Node::False => continue 'branches,
                Node::Lit(bit, positive) => {
                    let lit = if positive {
                        Guard { pos: 1 << bit, neg: 0 }
                    } else {
                        Guard { pos: 0, neg: 1 << bit }
                    };
                    match p.guard.and(&lit) {
                        Some(g) => p.guard = g,
                        None => continue 'branches,
                    }
                }
                Node::And(a, b) => p.todo.extend([a, b]),
                Node::Or(a, b) => {
                    let mut q = p.clone();
                    q.todo.push(b);
                    stack.push(q);
                    p.todo.push(a);
                }
                Node::Next(a) => {
                    p.next.insert(a);
                }
                Node::Until(a, b) => {
                    let mut q = p.clone();
                    q.todo.push(a);
                    q.next.insert(f);
                    q.postponed |= 1 << until_index[&f];
                    stack.push(q);
                    p.todo.push(b);
                }
                Node::Release(a, b) => {
                    let mut q = p.clone();
                    q.todo.push(b);
                    q.next.insert(f);
                    stack.push(q);
                    p.todo.extend([a, b]);
                }
            }
        }
        out.insert(Step {
            guard: p.guard,
            next: p.next.into_iter().collect(),
            postponed: p.postponed,
        });
    }
    let mut steps: Vec<Step> = out.into_iter().collect();
    steps.sort_by(|a, b| (&a.next, a.guard, a.postponed).cmp(&(&b.next, b.guard, b.postponed)));
    steps
}

/// Builds an automaton for `body` over `alphabet`, where atoms of trace
/// variable `vars[c]` read component `c`. Any body is accepted; derived
/// operators are rewritten on the fly.
pub fn ltl_to_nba(
    body: &Body,
    vars: &[TraceVariable],
    alphabet: &Alphabet,
    limits: &Limits,
) -> Result<BuchiAutomaton, AutomataError> {
    if vars.len() != alphabet.arity() {
        return Err(AutomataError::ComponentOutOfRange(vars.len(), alphabet.arity()));
    }
    let mut arena = Arena::new(vars, alphabet);
    let root = arena.build(body, true)?;
    let nodes = arena.nodes;
    let untils: Vec<Id> = (0..nodes.len()).filter(|&i| matches!(nodes[i], Node::Until(..))).collect();
    if untils.len() > 64 {
        return Err(ResourceLimit::new("until subformulas", 64).into());
    }
    let until_index: HashMap<Id, u32> = untils.iter().enumerate().map(|(i, &u)| (u, i as u32)).collect();
    let k = untils.len();
    let all = super::mask(k);

    // degeneralized states (obligations, counter)
    let mut index: HashMap<(Vec<Id>, usize), usize> = HashMap::new();
    let mut states: Vec<(Vec<Id>, usize)> = Vec::new();
    let mut transitions: Vec<Vec<Transition>> = Vec::new();
    let mut expansions: HashMap<Vec<Id>, Vec<Step>> = HashMap::new();
    let mut queue = VecDeque::new();
    let start = (if root == TRUE { vec![] } else { vec![root] }, 0);
    index.insert(start.clone(), 0);
    states.push(start);
    queue.push_back(0);
    while let Some(s) = queue.pop_front() {
        let (obligations, j) = states[s].clone();
        let steps = expansions
            .entry(obligations.clone())
            .or_insert_with(|| expand(&nodes, &until_index, &obligations))
            .clone();
        let mut out = Vec::with_capacity(steps.len());
        for step in steps {
            let accepted = all & !step.postponed;
            let mut j2 = if j == k { 0 } else { j };
            while j2 < k && accepted >> j2 & 1 == 1 {
                j2 += 1;
            }
            let key = (step.next, j2);
            let target = match index.get(&key) {
                Some(&t) => t,
                None => {
                    if states.len() >= limits.max_states {
                        return Err(ResourceLimit::new("tableau states", limits.max_states).into());
                    }
                    let t = states.len();
                    index.insert(key.clone(), t);
                    states.push(key);
                    queue.push_back(t);
                    t
                }
            };
            out.push(Transition {
                guard: step.guard,
                target,
            });
        }
        out.sort();
        out.dedup();
        transitions.push(out);
    }
    let accepting = states.iter().map(|(_, j)| *j == k).collect();
    Ok(BuchiAutomaton::new(alphabet.clone(), vec![0], transitions, accepting).trim())
}
