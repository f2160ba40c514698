use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use hlv_core::kripke::{ap_set, ApSet};
use hlv_core::monitor::{FiniteTrace, Monitor, MonitorOptions};
use hlv_core::{parse_formula, Limits};

#[test]
fn storage_is_lossless_and_counts_tuples() {
    let f = parse_formula("forall p. forall q. G (a[p] -> X (b[q] | a[q]))").unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut m = Monitor::new(&f, MonitorOptions::default(), &Limits::default()).unwrap();
    let mut sent = Vec::new();
    let mut events_total = 0;
    for k in 1..=12 {
        let len = rng.random_range(1..=8);
        let events: Vec<ApSet> = (0..len)
            .map(|_| ap_set(["a", "b"].into_iter().filter(|_| rng.random_bool(0.3))))
            .collect();
        events_total += len;
        let id = format!("t{k}");
        m.begin_trace(&id).unwrap();
        for e in &events {
            m.event(e).unwrap();
        }
        m.end_trace().unwrap();
        sent.push(FiniteTrace::new(id, events).unwrap());
        assert_eq!(m.num_tuples(), k * k);
    }
    assert_eq!(m.traces(), sent);
    assert!(m.store().len() <= events_total + 1);
}

#[test]
fn violations_persist_across_sessions() {
    let f = parse_formula("forall p. forall q. G (a[p] <-> a[q])").unwrap();
    let mut m = Monitor::new(&f, MonitorOptions::default(), &Limits::default()).unwrap();
    let mut log = Vec::new();
    for (id, events) in [("x", vec![ap_set(["a"])]), ("y", vec![ap_set([])]), ("z", vec![ap_set(["a"]), ap_set([])])] {
        m.begin_trace(id).unwrap();
        for e in &events {
            log.extend(m.event(e).unwrap());
        }
        log.extend(m.end_trace().unwrap());
        assert_eq!(m.violations(), &log[..]);
    }
    let tuples: Vec<Vec<&str>> = log.iter().map(|v| v.tuple.iter().map(String::as_str).collect()).collect();
    assert!(tuples.contains(&vec!["x", "y"]) && tuples.contains(&vec!["y", "z"]));
    assert!(!tuples.contains(&vec!["x", "z"]));
}
