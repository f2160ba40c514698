use std::collections::BTreeSet;
use std::fmt;

/// A set of atomic propositions: one position of a trace.
pub type ApSet = BTreeSet<String>;

pub fn ap_set<'a>(names: impl IntoIterator<Item = &'a str>) -> ApSet {
    names.into_iter().map(str::to_string).collect()
}

/// An infinite trace `stem · period^ω`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct UltimatelyPeriodicTrace {
    stem: Vec<ApSet>,
    period: Vec<ApSet>,
}

impl UltimatelyPeriodicTrace {
    /// Panics if `period` is empty.
    pub fn new(stem: Vec<ApSet>, period: Vec<ApSet>) -> Self {
        assert!(!period.is_empty(), "the periodic part of a trace must be nonempty");
        UltimatelyPeriodicTrace { stem, period }
    }

    pub fn stem(&self) -> &[ApSet] {
        &self.stem
    }

    pub fn period(&self) -> &[ApSet] {
        &self.period
    }

    /// The letter at position `i`.
    pub fn at(&self, i: usize) -> &ApSet {
        if i < self.stem.len() {
            &self.stem[i]
        } else {
            &self.period[(i - self.stem.len()) % self.period.len()]
        }
    }

    /// Canonical representative: primitive period, shortest stem. Two
    /// traces denote the same infinite word iff their normal forms are equal.
    pub fn normalized(&self) -> Self {
        let (stem, period) = normalize_lasso(&self.stem, &self.period);
        UltimatelyPeriodicTrace { stem, period }
    }

    /// Same infinite word.
    pub fn same_word(&self, other: &Self) -> bool {
        self.normalized() == other.normalized()
    }

    /// All propositions occurring somewhere on the trace.
    pub fn propositions(&self) -> ApSet {
        self.stem.iter().chain(&self.period).flatten().cloned().collect()
    }

    /// Restricts every position to `aps`.
    pub fn restrict(&self, aps: &ApSet) -> Self {
        let r = |xs: &[ApSet]| xs.iter().map(|s| s.intersection(aps).cloned().collect()).collect();
        UltimatelyPeriodicTrace {
            stem: r(&self.stem),
            period: r(&self.period),
        }
    }
}

/// Primitive period and shortest stem of `stem · period^ω`.
pub(crate) fn normalize_lasso<T: PartialEq + Clone>(stem: &[T], period: &[T]) -> (Vec<T>, Vec<T>) {
    let mut period = primitive_root(period);
    let mut stem = stem.to_vec();
    while let (Some(s), Some(p)) = (stem.last(), period.last()) {
        if s != p {
            break;
        }
        stem.pop();
        period.rotate_right(1);
    }
    (stem, period)
}

fn primitive_root<T: PartialEq + Clone>(w: &[T]) -> Vec<T> {
    let n = w.len();
    (1..=n)
        .filter(|d| n.is_multiple_of(*d))
        .find(|&d| (d..n).all(|i| w[i] == w[i - d]))
        .map(|d| w[..d].to_vec())
        .unwrap_or_else(|| w.to_vec())
}

pub(crate) fn fmt_letter(f: &mut fmt::Formatter<'_>, s: &ApSet) -> fmt::Result {
    f.write_str("{")?;
    for (i, a) in s.iter().enumerate() {
        if i > 0 {
            f.write_str(",")?;
        }
        f.write_str(a)?;
    }
    f.write_str("}")
}

impl fmt::Display for UltimatelyPeriodicTrace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for s in &self.stem {
            fmt_letter(f, s)?;
            f.write_str(" ")?;
        }
        f.write_str("(")?;
        for (i, s) in self.period.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            fmt_letter(f, s)?;
        }
        f.write_str(")^w")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn a() -> ApSet {
        ap_set(["a"])
    }

    fn e() -> ApSet {
        ApSet::new()
    }

    #[test]
    fn positions_wrap_into_the_period() {
        let t = UltimatelyPeriodicTrace::new(vec![e()], vec![a(), e()]);
        let word: Vec<_> = (0..6).map(|i| t.at(i).clone()).collect();
        assert_eq!(word, vec![e(), a(), e(), a(), e(), a()]);
    }

    #[test]
    fn normal_form_identifies_equal_words() {
        let t1 = UltimatelyPeriodicTrace::new(vec![e(), a()], vec![a(), a()]);
        let t2 = UltimatelyPeriodicTrace::new(vec![e()], vec![a()]);
        assert_eq!(t1.normalized(), t2);
        let t3 = UltimatelyPeriodicTrace::new(vec![a(), e()], vec![a(), e()]);
        assert_eq!(t3.normalized(), UltimatelyPeriodicTrace::new(vec![], vec![a(), e()]));
        assert!(!t1.same_word(&t3));
    }

    #[test]
    fn display() {
        let t = UltimatelyPeriodicTrace::new(vec![e()], vec![ap_set(["a", "b"])]);
        assert_eq!(t.to_string(), "{} ({a,b})^w");
    }
}
