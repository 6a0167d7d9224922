mod common;

use common::{composition_oracle, compose_with, random_network};
use ia_core::generate::{generate, GeneratorConfig, InstanceRng, Probability};
use ia_core::pathcon::{incremental_path_consistency, path_consistency, PcConfig, SkipSet};
use ia_core::{Composition, EdgeRef, Label, Network, QueuePolicy};
use proptest::prelude::*;

/// Plain fixpoint iteration over all triples with the oracle table.
fn reference_closure(mut net: Network) -> Option<Network> {
    let t = composition_oracle();
    let n = net.n();
    loop {
        let mut changed = false;
        for i in 0..n {
            for k in 0..n {
                for j in 0..n {
                    if i == j || j == k || i == k {
                        continue;
                    }
                    let old = net.get(i, j);
                    let new = old & compose_with(&t, net.get(i, k), net.get(k, j));
                    if new.is_empty() {
                        return None;
                    }
                    if new != old {
                        net.set(i, j, new);
                        changed = true;
                    }
                }
            }
        }
        if !changed {
            return Some(net);
        }
    }
}

fn instances() -> Vec<Network> {
    let mut v = Vec::new();
    for seed in 0..6 {
        v.push(generate(&GeneratorConfig::s(12, Probability::new(1, 2).unwrap(), seed)).unwrap().network);
        // small B instances can run out of disjoint pairs
        if let Ok(g) = generate(&GeneratorConfig::b(12, seed)) {
            v.push(g.network);
        }
        let mut rng = InstanceRng::new(seed);
        v.push(random_network(&mut rng, 9, 60, 4));
    }
    v
}

#[test]
fn closure_matches_naive_fixpoint_for_every_configuration() {
    for net in instances() {
        let want = reference_closure(net.clone());
        for cfg in PcConfig::all_combinations() {
            let mut got = net.clone();
            let out = path_consistency(&mut got, &cfg);
            match &want {
                Some(w) => {
                    assert!(out.verdict.is_consistent(), "{}", cfg.fingerprint());
                    assert!(got.same_labels(w), "{}", cfg.fingerprint());
                }
                None => assert!(!out.verdict.is_consistent(), "{}", cfg.fingerprint()),
            }
        }
    }
}

#[test]
fn shadow_mode_never_catches_a_bad_skip() {
    for net in instances() {
        for cfg in PcConfig::all_combinations() {
            let mut work = net.clone();
            let out = path_consistency(&mut work, &PcConfig { shadow: true, ..cfg });
            assert_eq!(out.stats.shadow_violations, 0, "{}", cfg.fingerprint());
        }
    }
}

#[test]
fn skipping_never_adds_compositions() {
    for net in instances() {
        for comp in Composition::ALL {
            let mut plain = net.clone();
            let base = path_consistency(&mut plain, &PcConfig::new(comp, SkipSet::NONE, QueuePolicy::Fifo));
            let mut fast = net.clone();
            let out = path_consistency(&mut fast, &PcConfig::new(comp, SkipSet::ALL, QueuePolicy::Fifo));
            assert!(out.stats.compositions <= base.stats.compositions);
            if base.verdict.is_consistent() {
                assert!(fast.same_labels(&plain));
            }
        }
    }
}

#[test]
fn incremental_after_tightening_matches_full_recompute() {
    let cfg = PcConfig::new(Composition::Split, SkipSet::ALL, QueuePolicy::Fifo);
    let mut rng = InstanceRng::new(5);
    for net in instances() {
        let mut closed = net.clone();
        if !path_consistency(&mut closed, &cfg).verdict.is_consistent() {
            continue;
        }
        let edges: Vec<EdgeRef> = closed.edges().filter(|e| closed.get(e.i, e.j).cardinality() > 1).collect();
        if edges.is_empty() {
            continue;
        }
        let e = edges[rng.below(edges.len() as u64) as usize];
        let first = closed.get(e.i, e.j).iter().next().unwrap();
        let mut inc = closed.clone();
        inc.set(e.i, e.j, Label::singleton(first));
        let mut full = inc.clone();
        let a = incremental_path_consistency(&mut inc, e, &cfg);
        let b = path_consistency(&mut full, &cfg);
        assert_eq!(a.verdict.is_consistent(), b.verdict.is_consistent());
        if b.verdict.is_consistent() {
            assert!(inc.same_labels(&full));
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn closure_is_idempotent_and_tighter(seed in any::<u64>(), n in 3usize..9) {
        let mut rng = InstanceRng::new(seed);
        let net = random_network(&mut rng, n, 50, 6);
        let cfg = PcConfig::new(Composition::Split, SkipSet::ALL, QueuePolicy::Weight);
        let mut once = net.clone();
        if path_consistency(&mut once, &cfg).verdict.is_consistent() {
            for e in net.edges() {
                prop_assert!(once.get(e.i, e.j).is_subset(net.get(e.i, e.j)));
            }
            let mut twice = once.clone();
            let again = path_consistency(&mut twice, &cfg);
            prop_assert_eq!(again.stats.updates, 0);
            prop_assert!(twice.same_labels(&once));
            prop_assert!(twice.validate().is_empty());
        }
    }
}
