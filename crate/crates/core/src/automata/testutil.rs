use super::*;

/// Every lasso word with stem length `<= stem_max` and period length in
/// `1..=period_max`.
pub(crate) fn all_lassos(al: &Alphabet, stem_max: usize, period_max: usize) -> Vec<LassoWord> {
    let letters: Vec<Letter> = al.letters().collect();
    let words = |len: usize| -> Vec<Vec<Letter>> {
        let mut out = vec![vec![]];
        for _ in 0..len {
            out = out
                .into_iter()
                .flat_map(|w| {
                    letters.iter().map(move |&l| {
                        let mut w = w.clone();
                        w.push(l);
                        w
                    })
                })
                .collect();
        }
        out
    };
    let mut out = Vec::new();
    for s in 0..=stem_max {
        for p in 1..=period_max {
            for stem in words(s) {
                for period in words(p) {
                    out.push(LassoWord::new(stem.clone(), period));
                }
            }
        }
    }
    out
}

/// Small pseudo-random automaton driven by a linear congruential sequence.
pub(crate) fn random_nba(al: &Alphabet, states: usize, seed: u64) -> BuchiAutomaton {
    let mut x = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
    let mut next = |n: u64| {
        x = x.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        (x >> 33) % n
    };
    let full = al.full_mask();
    let mut transitions = vec![Vec::new(); states];
    for row in transitions.iter_mut() {
        let edges = 1 + next(3) as usize;
        for _ in 0..edges {
            let pos = next(full + 1) & full;
            let neg = next(full + 1) & full & !pos;
            row.push(Transition {
                guard: Guard { pos, neg },
                target: next(states as u64) as usize,
            });
        }
    }
    let accepting = (0..states).map(|_| next(3) == 0).collect();
    BuchiAutomaton::new(al.clone(), vec![0], transitions, accepting)
}
