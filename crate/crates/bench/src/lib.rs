//! Fixtures shared by the benchmarks.

use hlv_core::kripke::{ap_set, ApSet};
use hlv_core::monitor::FiniteTrace;
use hlv_core::{parse_formula, parse_kripke, KripkeStructure, QuantifiedFormula};

/// Two traces, `({})^w` and `{} ({a})^w`.
pub const K2: &str = "\
states: s0 s1 s2
init: s0
ap: a
label: s1 a
trans: s0 -> s1 s2
trans: s1 -> s1
trans: s2 -> s2
";

/// Repetition-code encoder emitting each input bit three times on `o`.
pub const ENCODER: &str = "\
states: b0k0 b0k1 b0k2 b1k0 b1k1 b1k2
init: b0k0
ap: i o
label: b1k0 i o
label: b1k1 o
label: b1k2 o
trans: b0k0 -> b0k1
trans: b0k1 -> b0k2
trans: b0k2 -> b0k0 b1k0
trans: b1k0 -> b1k1
trans: b1k1 -> b1k2
trans: b1k2 -> b0k0 b1k0
";

pub const FORMULAS: [(&str, &str); 5] = [
    ("obsdet", "forall p. forall q. (a[p] <-> a[q]) -> G (b[p] <-> b[q])"),
    ("equal", "forall p. forall q. G (a[p] <-> a[q])"),
    ("noninference", "forall p. exists q. G (!a[q] & (b[p] <-> b[q]))"),
    ("liveness", "forall p. exists q. F (a[p] <-> b[q])"),
    ("witness", "exists p. forall q. G (a[q] -> a[p])"),
];

pub fn formula(text: &str) -> QuantifiedFormula {
    parse_formula(text).expect("fixture formulas parse")
}

pub fn structure(text: &str) -> KripkeStructure {
    parse_kripke(text).expect("fixture structures parse")
}

/// `n` states in a ring with chords, labels cycling through all subsets
/// of `{a, b}`.
pub fn ring(n: usize) -> KripkeStructure {
    let mut text = format!("states: {}\ninit: s0\nap: a b\n", (0..n).map(|s| format!("s{s}")).collect::<Vec<_>>().join(" "));
    for s in 0..n {
        let label = ["", "a", "b", "a b"][s % 4];
        if !label.is_empty() {
            text += &format!("label: s{s} {label}\n");
        }
        text += &format!("trans: s{s} -> s{} s{}\n", (s + 1) % n, (s * 2 + 1) % n);
    }
    structure(&text)
}

/// `count` traces of length `len` over `{a}`, pseudo-random but fixed.
pub fn trace_batch(count: usize, len: usize) -> Vec<FiniteTrace> {
    let mut x = 0x2545_f491_4f6c_dd1du64;
    (0..count)
        .map(|i| {
            let events: Vec<ApSet> = (0..len)
                .map(|_| {
                    x ^= x << 13;
                    x ^= x >> 7;
                    x ^= x << 17;
                    if x & 1 == 1 { ap_set(["a"]) } else { ApSet::new() }
                })
                .collect();
            FiniteTrace::new(format!("t{i}"), events).expect("len is positive")
        })
        .collect()
}
