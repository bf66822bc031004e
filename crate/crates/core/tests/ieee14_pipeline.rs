//! End-to-end run over the bundled 14-bus data.

use std::collections::BTreeSet;

use gridiv::attack::{propagate, vertex_map, AttackScenario, ColoredGraph};
use gridiv::coloring::{
    color_game, color_greedy, cumulative_index, order_players, verify_nash, Algorithm, GameOptions, GameStatus, Palette,
    VulnerabilityTable,
};
use gridiv::grid_model::{load_substation_map, parse_cdf, substation_adjacency, SubstationId};
use gridiv::impact::{classify, load_impact_data, ImpactClass, ImpactConfig};
use gridiv::security_graph::{build_security_graph, extract_diversity_graph, SmTypeTable, TemplateConfig};

fn data(name: &str) -> String {
    std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/data/ieee14/").to_string() + name).unwrap()
}

struct Fixture {
    profiles: Vec<gridiv::impact::SubstationProfile>,
    m: gridiv::security_graph::SecurityGraph,
    g: gridiv::security_graph::DiversityGraph,
    psi: VulnerabilityTable,
    types: SmTypeTable,
}

fn fixture(threshold: f64) -> Fixture {
    let sys = parse_cdf(&data("ieee14.cdf")).unwrap();
    let map = load_substation_map(&data("substations.json")).unwrap();
    let adjacency = substation_adjacency(&sys, &map);
    let (_, profiles) = load_impact_data(&data("impact_gamma.csv"), None).unwrap();
    let profiles = classify(&profiles, &ImpactConfig::new(threshold, 187.38).unwrap());
    let m = build_security_graph(&profiles, &adjacency, &TemplateConfig::default()).unwrap();
    let g = extract_diversity_graph(&m);
    let types = SmTypeTable::default();
    let psi = VulnerabilityTable::build(&g, &profiles, &types).unwrap();
    Fixture { profiles, m, g, psi, types }
}

#[test]
fn graph_sizes() {
    let f = fixture(0.24);
    let his: BTreeSet<u32> =
        f.profiles.iter().filter(|p| p.impact_class == ImpactClass::High).map(|p| p.substation_id.0).collect();
    assert_eq!(his, BTreeSet::from([2, 3, 4]));
    assert_eq!((f.m.len(), f.m.edge_count()), (64, 81));
    assert_eq!((f.g.len(), f.g.edge_count()), (39, 50));
    assert_eq!((f.g.max_degree(), f.g.delta2()), (8, 7));
}

#[test]
fn game_is_proper_nash_and_beats_greedy_sigma() {
    let f = fixture(0.24);
    let palette = Palette::from_json(&data("palette.json")).unwrap();
    let order = order_players(&f.g, &f.profiles, &f.types).unwrap();
    let out = color_game(&f.g, &palette, &f.psi, &order, GameOptions::default()).unwrap();
    assert_eq!(out.status, GameStatus::Converged);
    assert!(out.coloring.is_proper(&f.g));
    assert!(verify_nash(&out.coloring, &f.psi, &f.g).is_nash());
    assert_eq!(out.coloring.algorithm, Algorithm::Game);
    assert!(out.potential_trace.windows(2).all(|w| w[1] >= w[0] - 1e-9));

    let greedy = color_greedy(&f.g, &palette).unwrap();
    assert!(greedy.is_proper(&f.g));
    assert!(out.sigma(&f.psi, &f.g) >= cumulative_index(&greedy, &f.psi, &f.g));
}

#[test]
fn attack_replay_is_consistent() {
    let f = fixture(0.24);
    let palette = Palette::from_json(&data("palette.json")).unwrap();
    let greedy = color_greedy(&f.g, &palette).unwrap();
    let vertex_of = vertex_map(&f.m, &f.g).unwrap();
    let cg = ColoredGraph::new(&f.m, &f.g, &greedy, &vertex_of).unwrap();

    let nothing = propagate(&cg, &f.profiles, &AttackScenario::capability(0, [SubstationId(2)])).unwrap();
    assert!(nothing.compromised_substations.is_empty());
    assert_eq!(nothing.total_p_lol_mw, 0.0);

    let all = propagate(&cg, &f.profiles, &AttackScenario::capability(10, [SubstationId(2)])).unwrap();
    assert_eq!(all.compromised_substations.len(), f.profiles.len());
    assert!(all.targets_reached);

    // More capability never shrinks the compromised set.
    let mut prev = BTreeSet::new();
    for k in 0..=10 {
        let r = propagate(&cg, &f.profiles, &AttackScenario::capability(k, [SubstationId(2)])).unwrap();
        assert!(prev.is_subset(&r.compromised_substations), "k = {k}");
        prev = r.compromised_substations;
    }
}
