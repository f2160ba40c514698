use std::collections::{BTreeMap, BTreeSet, HashSet};

use super::trace::normalize_lasso;
use super::{KripkeError, KripkeStructure, UltimatelyPeriodicTrace};
use crate::limits::{Limits, ResourceLimit};

type Word = (Vec<u64>, Vec<u64>);

/// Traces of lasso paths `s0…sj (sj+1…sk)^ω` with at most `stem_bound`
/// stem states and between 1 and `loop_bound` loop states, deduplicated as
/// infinite words. The stem may be empty.
pub fn enumerate_lassos(
    k: &KripkeStructure,
    stem_bound: usize,
    loop_bound: usize,
    limits: &Limits,
) -> Result<BTreeSet<UltimatelyPeriodicTrace>, KripkeError> {
    let words = lasso_words(k, stem_bound, loop_bound, limits)?;
    let to_set = |bits: &u64| k.ap().iter().enumerate().filter(|(i, _)| bits >> i & 1 == 1).map(|(_, a)| a.clone()).collect();
    Ok(words
        .iter()
        .map(|(stem, period)| {
            UltimatelyPeriodicTrace::new(stem.iter().map(to_set).collect(), period.iter().map(to_set).collect())
        })
        .collect())
}

/// Same as [`enumerate_lassos`] but with letters as label bitmasks over
/// `k.ap()`, in normal form.
pub(crate) fn lasso_words(
    k: &KripkeStructure,
    stem_bound: usize,
    loop_bound: usize,
    limits: &Limits,
) -> Result<HashSet<Word>, KripkeError> {
    let mut out = HashSet::new();
    if loop_bound == 0 {
        return Ok(out);
    }
    let mut stem = Vec::new();
    stems(k, &[k.initial()], &mut stem, stem_bound, loop_bound, limits, &mut out)?;
    Ok(out)
}

/// Walks label sequences for the stem; `here` holds every state that can sit
/// at the current position after reading `stem`.
fn stems(
    k: &KripkeStructure,
    here: &[usize],
    stem: &mut Vec<u64>,
    stem_bound: usize,
    loop_bound: usize,
    limits: &Limits,
    out: &mut HashSet<Word>,
) -> Result<(), KripkeError> {
    for &q in here {
        let mut period = Vec::new();
        loops(k, q, &[q], &mut period, loop_bound, stem, limits, out)?;
    }
    if stem.len() == stem_bound {
        return Ok(());
    }
    for (label, next) in step(k, here) {
        stem.push(label);
        stems(k, &next, stem, stem_bound, loop_bound, limits, out)?;
        stem.pop();
    }
    Ok(())
}

/// Walks label sequences of cycles through `start`.
#[allow(clippy::too_many_arguments)]
fn loops(
    k: &KripkeStructure,
    start: usize,
    here: &[usize],
    period: &mut Vec<u64>,
    loop_bound: usize,
    stem: &[u64],
    limits: &Limits,
    out: &mut HashSet<Word>,
) -> Result<(), KripkeError> {
    for (label, next) in step(k, here) {
        period.push(label);
        if next.contains(&start) {
            out.insert(normalize_lasso(stem, period));
            if out.len() > limits.max_lassos {
                return Err(ResourceLimit::new("enumerated lassos", limits.max_lassos).into());
            }
        }
        if period.len() < loop_bound {
            loops(k, start, &next, period, loop_bound, stem, limits, out)?;
        }
        period.pop();
    }
    Ok(())
}

/// Groups `here` by label and returns, per label, the successor set.
fn step(k: &KripkeStructure, here: &[usize]) -> BTreeMap<u64, Vec<usize>> {
    let mut by_label: BTreeMap<u64, BTreeSet<usize>> = BTreeMap::new();
    for &s in here {
        by_label.entry(k.label_bits(s)).or_default().extend(k.successors(s));
    }
    by_label.into_iter().map(|(l, set)| (l, set.into_iter().collect())).collect()
}
