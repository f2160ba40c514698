use super::{to_nnf, Body, QuantifiedFormula, Quantifier};

/// Syntactic fragment of a sentence.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FragmentInfo {
    /// One letter per quantifier, `A` for forall and `E` for exists.
    pub pattern: String,
    pub alternations: usize,
    pub alternation_free: bool,
    pub forall_only: bool,
    pub exists_only: bool,
    /// `E+A+`
    pub exists_forall: bool,
    /// `A+E+`
    pub forall_exists: bool,
    /// The negation normal form of the body contains no until.
    pub syntactic_safety_body: bool,
}

pub fn classify(f: &QuantifiedFormula) -> FragmentInfo {
    let qs = f.quantifiers();
    let pattern: String = qs.iter().map(|q| q.letter()).collect();
    let alternations = qs.windows(2).filter(|w| w[0] != w[1]).count();
    let nonempty = !qs.is_empty();
    let forall_only = nonempty && qs.iter().all(|q| *q == Quantifier::Forall);
    let exists_only = nonempty && qs.iter().all(|q| *q == Quantifier::Exists);
    let one_switch = |first: Quantifier| alternations == 1 && qs.first() == Some(&first);
    FragmentInfo {
        pattern,
        alternations,
        alternation_free: alternations == 0,
        forall_only,
        exists_only,
        exists_forall: one_switch(Quantifier::Exists),
        forall_exists: one_switch(Quantifier::Forall),
        syntactic_safety_body: is_syntactic_safety(f.body()),
    }
}

pub(crate) fn is_syntactic_safety(b: &Body) -> bool {
    to_nnf(b).count(&|n| matches!(n, Body::Until(..) | Body::Finally(_))) == 0
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::parse_formula;

    #[test]
    fn universal_pair() {
        let info = classify(&parse_formula("forall p. forall q. G (o[p] <-> o[q])").unwrap());
        assert_eq!(info.pattern, "AA");
        assert_eq!(info.alternations, 0);
        assert!(info.forall_only && info.alternation_free && info.syntactic_safety_body);
        assert!(!info.exists_only && !info.forall_exists && !info.exists_forall);
    }

    #[test]
    fn one_alternation() {
        let info = classify(&parse_formula("forall p. exists q. G (o[p] <-> o[q])").unwrap());
        assert_eq!(info.pattern, "AE");
        assert_eq!(info.alternations, 1);
        assert!(info.forall_exists && !info.alternation_free);
    }

    #[test]
    fn gni_shape() {
        let info = classify(
            &parse_formula("forall p. forall q. exists r. G ((h[p] <-> h[r]) & (o[q] <-> o[r]))")
                .unwrap(),
        );
        assert_eq!(info.pattern, "AAE");
        assert_eq!(info.alternations, 1);
        assert!(info.forall_exists);
    }

    #[test]
    fn safety_detection() {
        let safe = ["forall p. G a[p]", "forall p. a[p] W b[p]", "forall p. X a[p] R b[p]", "forall p. !F a[p]"];
        for s in safe {
            assert!(classify(&parse_formula(s).unwrap()).syntactic_safety_body, "{s}");
        }
        let unsafe_ = ["forall p. F a[p]", "forall p. a[p] U b[p]", "forall p. !G a[p]", "forall p. !(a[p] W b[p])"];
        for s in unsafe_ {
            assert!(!classify(&parse_formula(s).unwrap()).syntactic_safety_body, "{s}");
        }
    }

    #[test]
    fn plain_ltl_has_empty_pattern() {
        let info = classify(&parse_formula("true U false").unwrap());
        assert_eq!(info.pattern, "");
        assert!(info.alternation_free && !info.forall_only && !info.exists_only);
    }
}
