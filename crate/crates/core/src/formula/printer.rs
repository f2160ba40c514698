use std::fmt;

use super::{Body, QuantifiedFormula};

// Binding strength, loosest first.
const IFF: u8 = 1;
const IMPLIES: u8 = 2;
const OR: u8 = 3;
const AND: u8 = 4;
const TEMPORAL: u8 = 5;
const UNARY: u8 = 6;
const ATOM: u8 = 7;

fn level(b: &Body) -> u8 {
    match b {
        Body::Iff(..) => IFF,
        Body::Implies(..) => IMPLIES,
        Body::Or(..) => OR,
        Body::And(..) => AND,
        Body::Until(..) | Body::WeakUntil(..) | Body::Release(..) => TEMPORAL,
        Body::Not(_) | Body::Next(_) | Body::Finally(_) | Body::Globally(_) => UNARY,
        Body::True | Body::False | Body::Atom(_) => ATOM,
    }
}

fn write_operand(f: &mut fmt::Formatter<'_>, b: &Body, parens: bool) -> fmt::Result {
    if parens {
        write!(f, "({b})")
    } else {
        write!(f, "{b}")
    }
}

fn write_binary(
    f: &mut fmt::Formatter<'_>,
    op: &str,
    lhs: &Body,
    rhs: &Body,
    own: u8,
    right_assoc: bool,
) -> fmt::Result {
    let (l, r) = (level(lhs), level(rhs));
    let lparen = if right_assoc { l <= own } else { l < own };
    let rparen = if right_assoc { r < own } else { r <= own };
    write_operand(f, lhs, lparen)?;
    write!(f, " {op} ")?;
    write_operand(f, rhs, rparen)
}

fn write_unary(f: &mut fmt::Formatter<'_>, op: &str, sep: &str, arg: &Body) -> fmt::Result {
    write!(f, "{op}{sep}")?;
    write_operand(f, arg, level(arg) < UNARY)
}

impl fmt::Display for Body {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Body::True => f.write_str("true"),
            Body::False => f.write_str("false"),
            Body::Atom(a) => write!(f, "{}[{}]", a.ap, a.var),
            Body::Not(a) => write_unary(f, "!", "", a),
            Body::Next(a) => write_unary(f, "X", " ", a),
            Body::Finally(a) => write_unary(f, "F", " ", a),
            Body::Globally(a) => write_unary(f, "G", " ", a),
            Body::And(a, b) => write_binary(f, "&", a, b, AND, false),
            Body::Or(a, b) => write_binary(f, "|", a, b, OR, false),
            Body::Iff(a, b) => write_binary(f, "<->", a, b, IFF, false),
            Body::Implies(a, b) => write_binary(f, "->", a, b, IMPLIES, true),
            Body::Until(a, b) => write_binary(f, "U", a, b, TEMPORAL, true),
            Body::WeakUntil(a, b) => write_binary(f, "W", a, b, TEMPORAL, true),
            Body::Release(a, b) => write_binary(f, "R", a, b, TEMPORAL, true),
        }
    }
}

impl fmt::Display for QuantifiedFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (q, v) in self.prefix() {
            write!(f, "{} {v}. ", q.keyword())?;
        }
        write!(f, "{}", self.body())
    }
}

#[cfg(test)]
mod tests {
    use crate::formula::parse_formula;

    #[test]
    fn prints_with_minimal_parentheses() {
        let src = "forall p. forall q. (l[p] <-> l[q]) -> G (o[p] <-> o[q])";
        assert_eq!(parse_formula(src).unwrap().to_string(), src);
        let src = "exists p. true";
        assert_eq!(parse_formula(src).unwrap().to_string(), src);
        let src = "forall p. !X a[p] U (b[p] U c[p]) & !(a[p] | b[p])";
        let f = parse_formula(src).unwrap();
        assert_eq!(f.to_string(), "forall p. !X a[p] U b[p] U c[p] & !(a[p] | b[p])");
        assert_eq!(parse_formula(&f.to_string()).unwrap(), f);
    }

    #[test]
    fn left_nested_temporal_needs_parens() {
        let f = parse_formula("forall p. (a[p] U b[p]) R c[p]").unwrap();
        assert_eq!(f.to_string(), "forall p. (a[p] U b[p]) R c[p]");
        let f = parse_formula("forall p. (a[p] -> b[p]) -> c[p]").unwrap();
        assert_eq!(f.to_string(), "forall p. (a[p] -> b[p]) -> c[p]");
        let f = parse_formula("forall p. a[p] <-> (b[p] <-> c[p])").unwrap();
        assert_eq!(f.to_string(), "forall p. a[p] <-> (b[p] <-> c[p])");
    }
}
