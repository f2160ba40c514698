use std::collections::HashMap;

use super::{KripkeError, KripkeStructure};
use crate::limits::{Limits, ResourceLimit};

/// Splits an indexed proposition name `a@i` into `("a", i)`.
pub fn split_indexed(name: &str) -> Option<(&str, usize)> {
    let (base, idx) = name.rsplit_once('@')?;
    let i: usize = idx.parse().ok()?;
    (i >= 1 && !base.is_empty()).then_some((base, i))
}

/// The `n`-fold self-composition of `k`.
///
/// States are the tuples reachable from `(s0, …, s0)`, named `(u1,…,un)`.
/// Propositions are `a@i` for `i` in `1..=n` in component-major order, so
/// that bit `(i-1)·|AP| + j` of a label is proposition `j` of component `i`.
pub fn self_compose(k: &KripkeStructure, n: usize, limits: &Limits) -> Result<KripkeStructure, KripkeError> {
    assert!(n >= 1, "self-composition needs at least one copy");
    let m = k.ap().len();
    if n * m > 64 {
        return Err(KripkeError::TooManyPropositions(n * m));
    }
    let total = (k.num_states() as u128).checked_pow(n as u32).unwrap_or(u128::MAX);
    if total > limits.max_states as u128 {
        return Err(ResourceLimit::new("self-composition states", limits.max_states).into());
    }

    let start = vec![k.initial(); n];
    let mut index: HashMap<Vec<usize>, usize> = HashMap::from([(start.clone(), 0)]);
    let mut tuples = vec![start];
    let mut succ: Vec<Vec<usize>> = Vec::new();
    let mut i = 0;
    while i < tuples.len() {
        let tuple = tuples[i].clone();
        let mut out = Vec::new();
        // odometer over the successor choices of every component
        let choices: Vec<&[usize]> = tuple.iter().map(|&s| k.successors(s)).collect();
        let mut digits = vec![0usize; n];
        loop {
            let next: Vec<usize> = digits.iter().zip(&choices).map(|(&d, c)| c[d]).collect();
            let id = match index.get(&next) {
                Some(&id) => id,
                None => {
                    let id = tuples.len();
                    index.insert(next.clone(), id);
                    tuples.push(next);
                    id
                }
            };
            out.push(id);
            let mut pos = 0;
            while pos < n {
                digits[pos] += 1;
                if digits[pos] < choices[pos].len() {
                    break;
                }
                digits[pos] = 0;
                pos += 1;
            }
            if pos == n {
                break;
            }
        }
        succ.push(out);
        i += 1;
    }

    let names = tuples
        .iter()
        .map(|t| {
            let parts: Vec<&str> = t.iter().map(|&s| k.state_name(s)).collect();
            format!("({})", parts.join(","))
        })
        .collect();
    let ap = (1..=n)
        .flat_map(|i| k.ap().iter().map(move |a| format!("{a}@{i}")))
        .collect();
    let labels = tuples
        .iter()
        .map(|t| {
            t.iter()
                .enumerate()
                .fold(0u64, |acc, (c, &s)| acc | k.label_bits(s) << (c * m))
        })
        .collect();
    KripkeStructure::from_parts(names, 0, succ, ap, labels)
}
