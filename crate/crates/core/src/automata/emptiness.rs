use std::collections::VecDeque;

use petgraph::algo::tarjan_scc;
use petgraph::graph::{DiGraph, NodeIndex};

use super::{BuchiAutomaton, LassoWord, Letter};

/// SCC summary of a graph restricted to the nodes reachable from `initial`.
struct Analysis {
    reachable: Vec<bool>,
    scc: Vec<usize>,
    /// Per SCC: nontrivial and containing an accepting node.
    good: Vec<bool>,
}

fn analyze(succ: &[Vec<usize>], accepting: &[bool], initial: &[usize]) -> Analysis {
    let n = succ.len();
    let mut reachable = vec![false; n];
    let mut stack: Vec<usize> = initial.to_vec();
    for &q in initial {
        reachable[q] = true;
    }
    while let Some(q) = stack.pop() {
        for &t in &succ[q] {
            if !reachable[t] {
                reachable[t] = true;
                stack.push(t);
            }
        }
    }
    let mut g = DiGraph::<(), ()>::with_capacity(n, 0);
    for _ in 0..n {
        g.add_node(());
    }
    for q in (0..n).filter(|&q| reachable[q]) {
        for &t in &succ[q] {
            g.add_edge(NodeIndex::new(q), NodeIndex::new(t), ());
        }
    }
    let mut scc = vec![usize::MAX; n];
    let mut good = Vec::new();
    for (i, comp) in tarjan_scc(&g).into_iter().enumerate() {
        for v in &comp {
            scc[v.index()] = i;
        }
        let cyclic = comp.len() > 1 || succ[comp[0].index()].contains(&comp[0].index());
        good.push(cyclic && reachable[comp[0].index()] && comp.iter().any(|v| accepting[v.index()]));
    }
    Analysis { reachable, scc, good }
}

fn successor_lists(a: &BuchiAutomaton) -> Vec<Vec<usize>> {
    (0..a.num_states())
        .map(|q| a.transitions(q).iter().map(|t| t.target).collect())
        .collect()
}

/// States that are reachable and can reach an accepting cycle.
pub(crate) fn useful_states(a: &BuchiAutomaton) -> Vec<bool> {
    let succ = successor_lists(a);
    let analysis = analyze(&succ, &a.accepting, &a.initial);
    let n = succ.len();
    let mut pred = vec![Vec::new(); n];
    for (q, ts) in succ.iter().enumerate() {
        for &t in ts {
            pred[t].push(q);
        }
    }
    let mut useful: Vec<bool> = (0..n).map(|q| analysis.reachable[q] && analysis.good[analysis.scc[q]]).collect();
    let mut stack: Vec<usize> = (0..n).filter(|&q| useful[q]).collect();
    while let Some(q) = stack.pop() {
        for &p in &pred[q] {
            if analysis.reachable[p] && !useful[p] {
                useful[p] = true;
                stack.push(p);
            }
        }
    }
    useful
}

/// `None` if the language is empty, otherwise an accepted lasso word.
pub fn emptiness(a: &BuchiAutomaton) -> Option<LassoWord> {
    let succ = successor_lists(a);
    let analysis = analyze(&succ, &a.accepting, &a.initial);
    let q = (0..a.num_states()).find(|&q| a.accepting[q] && analysis.reachable[q] && analysis.good[analysis.scc[q]])?;

    // shortest path from an initial state to q
    let stem = {
        let mut prev: Vec<Option<(usize, Letter)>> = vec![None; a.num_states()];
        let mut seen = vec![false; a.num_states()];
        let mut queue = VecDeque::new();
        for &i in &a.initial {
            if !seen[i] {
                seen[i] = true;
                queue.push_back(i);
            }
        }
        while let Some(s) = queue.pop_front() {
            if s == q {
                break;
            }
            for t in a.transitions(s) {
                if !seen[t.target] {
                    seen[t.target] = true;
                    prev[t.target] = Some((s, t.guard.witness()));
                    queue.push_back(t.target);
                }
            }
        }
        unwind(&prev, q)
    };

    // shortest cycle through q inside its SCC
    let period = {
        let comp = analysis.scc[q];
        let mut prev: Vec<Option<(usize, Letter)>> = vec![None; a.num_states()];
        let mut seen = vec![false; a.num_states()];
        let mut queue = VecDeque::from([q]);
        let mut closing = None;
        'search: while let Some(s) = queue.pop_front() {
            for t in a.transitions(s) {
                if t.target == q {
                    closing = Some((s, t.guard.witness()));
                    break 'search;
                }
                if analysis.scc[t.target] == comp && !seen[t.target] {
                    seen[t.target] = true;
                    prev[t.target] = Some((s, t.guard.witness()));
                    queue.push_back(t.target);
                }
            }
        }
        let (last, letter) = closing.expect("accepting state lies on a cycle");
        let mut word = unwind(&prev, last);
        word.push(letter);
        word
    };

    let w = LassoWord::new(stem, period);
    assert!(membership(a, &w), "emptiness witness rejected by its own automaton");
    Some(w)
}

fn unwind(prev: &[Option<(usize, Letter)>], mut q: usize) -> Vec<Letter> {
    let mut word = Vec::new();
    while let Some((p, l)) = prev[q] {
        word.push(l);
        q = p;
    }
    word.reverse();
    word
}

/// Whether `a` accepts `w`.
pub fn membership(a: &BuchiAutomaton, w: &LassoWord) -> bool {
    let len = w.stem.len() + w.period.len();
    let node = |q: usize, i: usize| q * len + i;
    let mut succ = vec![Vec::new(); a.num_states() * len];
    let mut accepting = vec![false; a.num_states() * len];
    for q in 0..a.num_states() {
        for i in 0..len {
            let letter = w.at(i);
            let j = if i + 1 < len { i + 1 } else { w.stem.len() };
            succ[node(q, i)] = a
                .transitions(q)
                .iter()
                .filter(|t| t.guard.matches(letter))
                .map(|t| node(t.target, j))
                .collect();
            accepting[node(q, i)] = a.accepting[q];
        }
    }
    let initial: Vec<usize> = a.initial.iter().map(|&q| node(q, 0)).collect();
    let analysis = analyze(&succ, &accepting, &initial);
    analysis.good.iter().any(|&g| g)
}
