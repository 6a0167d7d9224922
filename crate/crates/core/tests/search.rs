mod common;

use common::{brute_force_consistent, classify, grid_consistent, labeling_count, random_network};
use ia_core::generate::{generate, GeneratorConfig, InstanceRng, Model, Probability};
use ia_core::search::{backtrack_solve, extract_scenario, verify_assignment, SearchConfig, SearchOutcome};
use ia_core::tractable::Method;
use ia_core::Network;

fn verdict(net: &Network, cfg: &SearchConfig) -> bool {
    match backtrack_solve(net, cfg).outcome {
        SearchOutcome::Solved(sub) => {
            let (_, iv) = extract_scenario(&sub).expect("solution realizes");
            assert!(verify_assignment(net, &iv));
            true
        }
        SearchOutcome::Inconsistent { .. } => false,
        other => panic!("unexpected {other:?}"),
    }
}

#[test]
fn small_networks_agree_with_grid_placement() {
    let mut rng = InstanceRng::new(2024);
    let mut seen = [0; 2];
    for _ in 0..300 {
        let n = 2 + rng.below(3) as usize;
        let net = random_network(&mut rng, n, 90, 3);
        let want = grid_consistent(&net);
        seen[want as usize] += 1;
        for m in Method::ALL {
            assert_eq!(verdict(&net, &SearchConfig::plain(m)), want, "{m}\n{}", net.to_edge_list());
        }
    }
    assert!(seen[0] > 10 && seen[1] > 10, "{seen:?}");
}

#[test]
fn up_to_six_vertices_agree_with_labeling_enumeration() {
    let mut rng = InstanceRng::new(77);
    let mut checked = 0;
    let mut seen = [0; 2];
    while checked < 150 {
        let n = 3 + rng.below(4) as usize;
        let net = random_network(&mut rng, n, 70, 2);
        if labeling_count(&net) > 20_000 {
            continue;
        }
        checked += 1;
        let want = brute_force_consistent(&net);
        seen[want as usize] += 1;
        let got: Vec<bool> = Method::ALL.iter().map(|&m| verdict(&net, &SearchConfig::plain(m))).collect();
        assert_eq!(got, [want; 3], "\n{}", net.to_edge_list());
        assert_eq!(verdict(&net, &SearchConfig::default()), want);
    }
    assert!(seen[0] > 5 && seen[1] > 5, "{seen:?}");
}

#[test]
fn generated_instances_are_solved_soundly() {
    let models = [
        Model::s(Probability::new(1, 4).unwrap()),
        Model::s(Probability::new(1, 2).unwrap()),
        Model::b(),
        Model::S { p: Probability::new(3, 4).unwrap(), embed: false },
    ];
    for seed in 0..12u64 {
        let model = models[seed as usize % models.len()];
        let Ok(g) = generate(&GeneratorConfig { model, n: 14, seed }) else { continue };
        let net = g.network;
        let mut verdicts = Vec::new();
        for m in Method::ALL {
            let res = backtrack_solve(&net, &SearchConfig { method: m, ..SearchConfig::default() });
            match res.outcome {
                SearchOutcome::Solved(sub) => {
                    let (scenario, iv) = extract_scenario(&sub).unwrap();
                    for e in net.edges() {
                        let r = scenario.relation(e.i, e.j);
                        assert!(net.get(e.i, e.j).contains(r));
                        let (a, b) = (iv.intervals[e.i], iv.intervals[e.j]);
                        let got = classify(a, b);
                        assert_eq!(got, r.name());
                    }
                    verdicts.push(true);
                }
                SearchOutcome::Inconsistent { .. } => verdicts.push(false),
                other => panic!("{other:?}"),
            }
        }
        assert!(verdicts.iter().all(|&v| v == verdicts[0]), "seed {seed}: {verdicts:?}");
        if model.letter() == 'b' || matches!(model, Model::S { embed: true, .. }) {
            assert!(verdicts[0]);
        }
    }
}

#[test]
fn search_counts_are_deterministic() {
    let net = generate(&GeneratorConfig::s(25, Probability::new(1, 4).unwrap(), 3)).unwrap().network;
    let cfg = SearchConfig::default();
    let a = backtrack_solve(&net, &cfg);
    let b = backtrack_solve(&net, &cfg);
    assert_eq!((a.stats.nodes, a.stats.backtracks, a.stats.trail_peak), (b.stats.nodes, b.stats.backtracks, b.stats.trail_peak));
    assert_eq!(a.stats.pc_total(), b.stats.pc_total());
}
