#![allow(dead_code)]

use hlv_core::kripke::KripkeBuilder;
use hlv_core::{parse_formula, KripkeStructure, QuantifiedFormula};

/// Every structure with one or two states over `{a, b}`, and every 50th
/// three-state structure in enumeration order, skipping those that only
/// differ by swapping the two non-initial states.
pub fn structure_family() -> Vec<KripkeStructure> {
    let mut out = Vec::new();
    for n in 1..=3usize {
        let mut canonical_index = 0usize;
        let succ_choices = (1u32 << n) - 1;
        let total_succ = succ_choices.pow(n as u32);
        for succ_code in 0..total_succ {
            let succ: Vec<u32> = (0..n)
                .map(|s| succ_code / succ_choices.pow(s as u32) % succ_choices + 1)
                .collect();
            for label_code in 0..4u32.pow(n as u32) {
                let labels: Vec<u32> = (0..n).map(|s| label_code >> (2 * s) & 3).collect();
                if n == 3 {
                    let swapped = swap12(&succ, &labels);
                    if swapped < (succ.clone(), labels.clone()) {
                        continue;
                    }
                    canonical_index += 1;
                    if canonical_index % 50 != 1 {
                        continue;
                    }
                }
                out.push(build(&succ, &labels));
            }
        }
    }
    out
}

fn swap12(succ: &[u32], labels: &[u32]) -> (Vec<u32>, Vec<u32>) {
    let perm = |s: usize| [0, 2, 1][s];
    let remap = |mask: u32| (0..3).filter(|&s| mask >> s & 1 == 1).fold(0, |m, s| m | 1 << perm(s));
    let mut s2 = vec![0; 3];
    let mut l2 = vec![0; 3];
    for s in 0..3 {
        s2[perm(s)] = remap(succ[s]);
        l2[perm(s)] = labels[s];
    }
    (s2, l2)
}

fn build(succ: &[u32], labels: &[u32]) -> KripkeStructure {
    let n = succ.len();
    let names: Vec<String> = (0..n).map(|s| format!("s{s}")).collect();
    let mut b = KripkeBuilder::new().states(&names).init("s0").ap(["a", "b"]);
    for s in 0..n {
        let aps: Vec<&str> = ["a", "b"].iter().enumerate().filter(|(j, _)| labels[s] >> j & 1 == 1).map(|(_, a)| *a).collect();
        b = b.label(&names[s], aps);
        let to: Vec<&str> = (0..n).filter(|&t| succ[s] >> t & 1 == 1).map(|t| names[t].as_str()).collect();
        b = b.trans(&names[s], to);
    }
    b.build().expect("generated structures are total")
}

/// Sentences with at most two quantifiers and body depth at most three.
pub const FORMULA_CORPUS: [&str; 25] = [
    "forall p. G a[p]",
    "forall p. F a[p]",
    "exists p. F a[p]",
    "exists p. G (a[p] -> X b[p])",
    "forall p. G F a[p]",
    "exists p. F G !a[p]",
    "forall p. a[p] U b[p]",
    "forall p. !a[p] R b[p]",
    "forall p. forall q. G (a[p] <-> a[q])",
    "forall p. forall q. (a[p] <-> a[q]) -> G (b[p] <-> b[q])",
    "forall p. forall q. G (a[p] -> X a[q])",
    "forall p. forall q. F a[p] -> F a[q]",
    "forall p. forall q. a[p] U (b[q] | a[q])",
    "exists p. exists q. F (a[p] & !a[q])",
    "exists p. exists q. G (a[p] <-> X !a[q])",
    "forall p. exists q. G (!a[q] & (b[p] <-> b[q]))",
    "forall p. exists q. G (a[p] <-> !a[q])",
    "forall p. exists q. F (a[p] <-> b[q])",
    "forall p. exists q. G F (a[p] & b[q])",
    "forall p. exists q. a[q] W (b[p] & !a[p])",
    "forall p. exists q. X (a[p] <-> b[q]) & F a[q]",
    "exists p. forall q. G (a[q] -> a[p])",
    "exists p. forall q. X a[p] | G b[q]",
    "exists p. forall q. F G (a[p] -> b[q])",
    "exists p. forall q. (a[q] U b[q]) -> F a[p]",
];

pub fn formula_corpus() -> Vec<QuantifiedFormula> {
    FORMULA_CORPUS.iter().map(|s| parse_formula(s).expect("corpus formulas parse")).collect()
}
