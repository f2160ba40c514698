use super::Body;

/// Rewrites derived operators into `true`, atoms, `!`, `&`, `|`, `X` and `U`.
///
/// `|` is kept as a core connective so that weak until reads as
/// `(a U b) | G a` with `G` expanded.
pub fn desugar(b: &Body) -> Body {
    let d = desugar;
    match b {
        Body::True => Body::True,
        Body::False => Body::not(Body::True),
        Body::Atom(a) => Body::Atom(a.clone()),
        Body::Not(a) => Body::not(d(a)),
        Body::And(a, c) => Body::and(d(a), d(c)),
        Body::Or(a, c) => Body::or(d(a), d(c)),
        Body::Implies(a, c) => Body::or(Body::not(d(a)), d(c)),
        Body::Iff(a, c) => Body::or(
            Body::and(d(a), d(c)),
            Body::and(Body::not(d(a)), Body::not(d(c))),
        ),
        Body::Next(a) => Body::next(d(a)),
        Body::Until(a, c) => Body::until(d(a), d(c)),
        Body::Finally(a) => eventually(d(a)),
        Body::Globally(a) => always(d(a)),
        Body::WeakUntil(a, c) => Body::or(Body::until(d(a), d(c)), always(d(a))),
        Body::Release(a, c) => Body::not(Body::until(Body::not(d(a)), Body::not(d(c)))),
    }
}

fn eventually(b: Body) -> Body {
    Body::until(Body::True, b)
}

fn always(b: Body) -> Body {
    Body::not(eventually(Body::not(b)))
}

/// True iff `b` only uses the connectives produced by [`desugar`].
pub fn is_core(b: &Body) -> bool {
    let mut ok = true;
    b.visit(&mut |n| {
        ok &= matches!(
            n,
            Body::True
                | Body::Atom(_)
                | Body::Not(_)
                | Body::And(..)
                | Body::Or(..)
                | Body::Next(_)
                | Body::Until(..)
        )
    });
    ok
}

/// Negation normal form over `&`, `|`, `X`, `U` and `R`; negation only
/// appears directly on atoms.
pub fn to_nnf(b: &Body) -> Body {
    nnf(b, false)
}

fn nnf(b: &Body, neg: bool) -> Body {
    let pos = |x: &Body| nnf(x, false);
    let negd = |x: &Body| nnf(x, true);
    match (b, neg) {
        (Body::True, false) | (Body::False, true) => Body::True,
        (Body::True, true) | (Body::False, false) => Body::False,
        (Body::Atom(a), false) => Body::Atom(a.clone()),
        (Body::Atom(a), true) => Body::not(Body::Atom(a.clone())),
        (Body::Not(a), _) => nnf(a, !neg),
        (Body::And(a, c), false) => Body::and(pos(a), pos(c)),
        (Body::And(a, c), true) => Body::or(negd(a), negd(c)),
        (Body::Or(a, c), false) => Body::or(pos(a), pos(c)),
        (Body::Or(a, c), true) => Body::and(negd(a), negd(c)),
        (Body::Implies(a, c), false) => Body::or(negd(a), pos(c)),
        (Body::Implies(a, c), true) => Body::and(pos(a), negd(c)),
        (Body::Iff(a, c), false) => Body::or(
            Body::and(pos(a), pos(c)),
            Body::and(negd(a), negd(c)),
        ),
        (Body::Iff(a, c), true) => Body::or(
            Body::and(pos(a), negd(c)),
            Body::and(negd(a), pos(c)),
        ),
        (Body::Next(a), _) => Body::next(nnf(a, neg)),
        (Body::Until(a, c), false) => Body::until(pos(a), pos(c)),
        (Body::Until(a, c), true) => Body::release(negd(a), negd(c)),
        (Body::Release(a, c), false) => Body::release(pos(a), pos(c)),
        (Body::Release(a, c), true) => Body::until(negd(a), negd(c)),
        (Body::Finally(a), false) => Body::until(Body::True, pos(a)),
        (Body::Finally(a), true) => Body::release(Body::False, negd(a)),
        (Body::Globally(a), false) => Body::release(Body::False, pos(a)),
        (Body::Globally(a), true) => Body::until(Body::True, negd(a)),
        // a W b == b R (a | b)
        (Body::WeakUntil(a, c), false) => Body::release(pos(c), Body::or(pos(a), pos(c))),
        (Body::WeakUntil(a, c), true) => Body::until(negd(c), Body::and(negd(a), negd(c))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::{parse_body, TraceVariable};

    fn p() -> TraceVariable {
        TraceVariable::new("p").unwrap()
    }

    fn a() -> Body {
        Body::atom("a", &p())
    }

    fn b() -> Body {
        Body::atom("b", &p())
    }

    #[test]
    fn desugar_finally_and_globally() {
        assert_eq!(desugar(&Body::finally(a())), Body::until(Body::True, a()));
        assert_eq!(
            desugar(&Body::globally(a())),
            Body::not(Body::until(Body::True, Body::not(a())))
        );
    }

    #[test]
    fn desugar_weak_until() {
        assert_eq!(
            desugar(&Body::weak_until(a(), b())),
            Body::or(
                Body::until(a(), b()),
                Body::not(Body::until(Body::True, Body::not(a())))
            )
        );
    }

    #[test]
    fn desugar_output_is_core() {
        let f = parse_body("(a[p] -> b[p]) <-> G (a[p] R F b[p]) W false").unwrap();
        assert!(is_core(&desugar(&f)));
        assert!(!is_core(&f));
    }

    #[test]
    fn nnf_examples() {
        assert_eq!(
            to_nnf(&Body::not(Body::and(a(), b()))),
            Body::or(Body::not(a()), Body::not(b()))
        );
        assert_eq!(
            to_nnf(&Body::not(Body::next(a()))),
            Body::next(Body::not(a()))
        );
        assert_eq!(
            to_nnf(&Body::not(Body::until(a(), b()))),
            Body::release(Body::not(a()), Body::not(b()))
        );
    }

    #[test]
    fn nnf_negations_only_on_atoms() {
        let f = parse_body("!((a[p] -> X b[p]) <-> !(G a[p] W F !b[p]))").unwrap();
        let n = to_nnf(&f);
        n.visit(&mut |x| {
            if let Body::Not(inner) = x {
                assert!(matches!(**inner, Body::Atom(_)), "{x}");
            }
            assert!(!matches!(
                x,
                Body::Implies(..) | Body::Iff(..) | Body::Finally(_) | Body::Globally(_) | Body::WeakUntil(..)
            ));
        });
    }
}
