//! HyperLTL sentences: abstract syntax, concrete syntax, normal forms and
//! fragment classification.

mod classify;
mod parser;
mod printer;
mod transform;

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

pub use classify::{classify, FragmentInfo};
pub(crate) use classify::is_syntactic_safety;
pub use parser::{parse_body, parse_formula};
pub use transform::{desugar, is_core, to_nnf};

/// A trace variable bound by the quantifier prefix.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TraceVariable(String);

impl TraceVariable {
    pub fn new(name: impl Into<String>) -> Result<Self, FormulaError> {
        let name = name.into();
        if is_identifier(&name) {
            Ok(TraceVariable(name))
        } else {
            Err(FormulaError::InvalidName(name))
        }
    }

    pub fn name(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for TraceVariable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

pub(crate) fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '\'')
}

/// An atomic proposition indexed by a trace variable, written `ap[var]`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct IndexedAtom {
    pub ap: String,
    pub var: TraceVariable,
}

impl IndexedAtom {
    pub fn new(ap: impl Into<String>, var: TraceVariable) -> Self {
        IndexedAtom { ap: ap.into(), var }
    }
}

/// Quantifier-free HyperLTL formula.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Body {
    True,
    False,
    Atom(IndexedAtom),
    Not(Box<Body>),
    And(Box<Body>, Box<Body>),
    Or(Box<Body>, Box<Body>),
    Implies(Box<Body>, Box<Body>),
    Iff(Box<Body>, Box<Body>),
    Next(Box<Body>),
    Until(Box<Body>, Box<Body>),
    WeakUntil(Box<Body>, Box<Body>),
    Release(Box<Body>, Box<Body>),
    Finally(Box<Body>),
    Globally(Box<Body>),
}

/// Shorthand constructors, used heavily by generators and tests.
impl Body {
    pub fn atom(ap: &str, var: &TraceVariable) -> Body {
        Body::Atom(IndexedAtom::new(ap, var.clone()))
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(b: Body) -> Body {
        Body::Not(Box::new(b))
    }

    pub fn and(a: Body, b: Body) -> Body {
        Body::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Body, b: Body) -> Body {
        Body::Or(Box::new(a), Box::new(b))
    }

    pub fn implies(a: Body, b: Body) -> Body {
        Body::Implies(Box::new(a), Box::new(b))
    }

    pub fn iff(a: Body, b: Body) -> Body {
        Body::Iff(Box::new(a), Box::new(b))
    }

    pub fn next(b: Body) -> Body {
        Body::Next(Box::new(b))
    }

    pub fn until(a: Body, b: Body) -> Body {
        Body::Until(Box::new(a), Box::new(b))
    }

    pub fn weak_until(a: Body, b: Body) -> Body {
        Body::WeakUntil(Box::new(a), Box::new(b))
    }

    pub fn release(a: Body, b: Body) -> Body {
        Body::Release(Box::new(a), Box::new(b))
    }

    pub fn finally(b: Body) -> Body {
        Body::Finally(Box::new(b))
    }

    pub fn globally(b: Body) -> Body {
        Body::Globally(Box::new(b))
    }

    /// Left-nested conjunction; `true` for an empty iterator.
    pub fn conjunction(items: impl IntoIterator<Item = Body>) -> Body {
        items
            .into_iter()
            .reduce(Body::and)
            .unwrap_or(Body::True)
    }

    /// Left-nested disjunction; `false` for an empty iterator.
    pub fn disjunction(items: impl IntoIterator<Item = Body>) -> Body {
        items
            .into_iter()
            .reduce(Body::or)
            .unwrap_or(Body::False)
    }

    /// Immediate subformulas, left to right.
    pub fn children(&self) -> Vec<&Body> {
        match self {
            Body::True | Body::False | Body::Atom(_) => vec![],
            Body::Not(a) | Body::Next(a) | Body::Finally(a) | Body::Globally(a) => vec![a],
            Body::And(a, b)
            | Body::Or(a, b)
            | Body::Implies(a, b)
            | Body::Iff(a, b)
            | Body::Until(a, b)
            | Body::WeakUntil(a, b)
            | Body::Release(a, b) => vec![a, b],
        }
    }

    /// Operator nesting depth; atoms and constants have depth 0.
    pub fn depth(&self) -> usize {
        self.children()
            .into_iter()
            .map(|c| c.depth() + 1)
            .max()
            .unwrap_or(0)
    }

    /// Number of AST nodes.
    pub fn size(&self) -> usize {
        1 + self.children().into_iter().map(Body::size).sum::<usize>()
    }

    pub fn atoms(&self) -> BTreeSet<IndexedAtom> {
        let mut out = BTreeSet::new();
        self.visit(&mut |b| {
            if let Body::Atom(a) = b {
                out.insert(a.clone());
            }
        });
        out
    }

    /// Proposition names used anywhere in the body.
    pub fn propositions(&self) -> BTreeSet<String> {
        self.atoms().into_iter().map(|a| a.ap).collect()
    }

    pub fn variables(&self) -> BTreeSet<TraceVariable> {
        self.atoms().into_iter().map(|a| a.var).collect()
    }

    /// Pre-order traversal.
    pub fn visit(&self, f: &mut impl FnMut(&Body)) {
        f(self);
        for c in self.children() {
            c.visit(f);
        }
    }

    /// Counts nodes satisfying `pred`.
    pub fn count(&self, pred: &impl Fn(&Body) -> bool) -> usize {
        let mut n = 0;
        self.visit(&mut |b| {
            if pred(b) {
                n += 1
            }
        });
        n
    }

    /// Rewrites every atom with `f`, keeping the tree shape.
    pub fn map_atoms(&self, f: &impl Fn(&IndexedAtom) -> Body) -> Body {
        let m = |b: &Body| Box::new(b.map_atoms(f));
        match self {
            Body::True => Body::True,
            Body::False => Body::False,
            Body::Atom(a) => f(a),
            Body::Not(a) => Body::Not(m(a)),
            Body::Next(a) => Body::Next(m(a)),
            Body::Finally(a) => Body::Finally(m(a)),
            Body::Globally(a) => Body::Globally(m(a)),
            Body::And(a, b) => Body::And(m(a), m(b)),
            Body::Or(a, b) => Body::Or(m(a), m(b)),
            Body::Implies(a, b) => Body::Implies(m(a), m(b)),
            Body::Iff(a, b) => Body::Iff(m(a), m(b)),
            Body::Until(a, b) => Body::Until(m(a), m(b)),
            Body::WeakUntil(a, b) => Body::WeakUntil(m(a), m(b)),
            Body::Release(a, b) => Body::Release(m(a), m(b)),
        }
    }

    /// Replaces trace variables according to `rename`; unmapped variables stay.
    pub fn rename_vars(&self, rename: &impl Fn(&TraceVariable) -> Option<TraceVariable>) -> Body {
        self.map_atoms(&|a| {
            let var = rename(&a.var).unwrap_or_else(|| a.var.clone());
            Body::Atom(IndexedAtom::new(a.ap.clone(), var))
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Quantifier {
    Forall,
    Exists,
}

impl Quantifier {
    pub fn dual(self) -> Quantifier {
        match self {
            Quantifier::Forall => Quantifier::Exists,
            Quantifier::Exists => Quantifier::Forall,
        }
    }

    pub fn letter(self) -> char {
        match self {
            Quantifier::Forall => 'A',
            Quantifier::Exists => 'E',
        }
    }

    pub fn keyword(self) -> &'static str {
        match self {
            Quantifier::Forall => "forall",
            Quantifier::Exists => "exists",
        }
    }
}

/// A prenex HyperLTL sentence.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct QuantifiedFormula {
    prefix: Vec<(Quantifier, TraceVariable)>,
    body: Body,
}

impl QuantifiedFormula {
    /// Checks the sentence invariants: distinct prefix variables and no
    /// free variables in the body.
    pub fn new(prefix: Vec<(Quantifier, TraceVariable)>, body: Body) -> Result<Self, FormulaError> {
        let mut bound = BTreeSet::new();
        for (_, v) in &prefix {
            if !bound.insert(v.clone()) {
                return Err(FormulaError::DuplicateQuantifier(v.name().to_string()));
            }
        }
        if let Some(free) = body.variables().into_iter().find(|v| !bound.contains(v)) {
            return Err(FormulaError::UnboundVariable(free.name().to_string()));
        }
        Ok(QuantifiedFormula { prefix, body })
    }

    pub fn prefix(&self) -> &[(Quantifier, TraceVariable)] {
        &self.prefix
    }

    pub fn body(&self) -> &Body {
        &self.body
    }

    pub fn variables(&self) -> Vec<TraceVariable> {
        self.prefix.iter().map(|(_, v)| v.clone()).collect()
    }

    pub fn quantifiers(&self) -> Vec<Quantifier> {
        self.prefix.iter().map(|(q, _)| *q).collect()
    }

    /// The negated sentence with the negation pushed through the prefix.
    pub fn negate(&self) -> QuantifiedFormula {
        QuantifiedFormula {
            prefix: self.prefix.iter().map(|(q, v)| (q.dual(), v.clone())).collect(),
            body: Body::not(self.body.clone()),
        }
    }

    pub fn propositions(&self) -> BTreeSet<String> {
        self.body.propositions()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FormulaError {
    #[error("syntax error at {line}:{column}: {message}")]
    Syntax {
        /// Byte offset into the input.
        offset: usize,
        line: usize,
        column: usize,
        message: String,
    },
    #[error("trace variable `{0}` is not bound by the quantifier prefix")]
    UnboundVariable(String),
    #[error("trace variable `{0}` is quantified more than once")]
    DuplicateQuantifier(String),
    #[error("`{0}` is not a valid identifier")]
    InvalidName(String),
}
