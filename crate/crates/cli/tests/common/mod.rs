#![allow(dead_code)]

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use gridiv::coloring::{Coloring, VulnerabilityTable};
use gridiv::grid_model::SubstationId;
use gridiv::security_graph::{DiversityGraph, SecurityMechanism, SmType};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn ieee14_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/data/ieee14")
}

pub fn ieee14(name: &str) -> String {
    std::fs::read_to_string(ieee14_dir().join(name)).unwrap()
}

pub fn plain_graph(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> DiversityGraph {
    let nodes = (0..n)
        .map(|i| SecurityMechanism {
            id: format!("v{i}"),
            sm_type: SmType::SystemFirewall,
            substation_id: SubstationId(1),
            is_entry_point: false,
        })
        .collect();
    DiversityGraph::from_edges(nodes, edges)
}

/// G(n, p) with n in 5..=50 and p in [0.05, 0.5], plus random vulnerabilities.
pub fn random_instance(seed: u64) -> (DiversityGraph, VulnerabilityTable) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.gen_range(5..=50);
    let p = rng.gen_range(0.05..=0.5);
    let mut edges = Vec::new();
    for a in 0..n {
        for b in a + 1..n {
            if rng.gen_bool(p) {
                edges.push((a, b));
            }
        }
    }
    let psi = (0..n).map(|_| rng.gen_range(0.0..1.0)).collect();
    (plain_graph(n, edges), VulnerabilityTable::from_values(psi).unwrap())
}

/// Pairwise strength-vulnerability contrast, computed without the library.
pub fn brute_payoff(g: &DiversityGraph, psi: &[f64], strengths: &[u32], v: usize) -> f64 {
    g.neighbors(v)
        .iter()
        .map(|&w| (f64::from(strengths[v]) * psi[v] - f64::from(strengths[w]) * psi[w]).abs())
        .sum()
}

pub fn strengths(c: &Coloring) -> Vec<u32> {
    (0..c.len()).map(|v| c.strength_of(v)).collect()
}

/// All connected labeled graphs on n vertices, as edge lists.
pub fn connected_graphs(n: usize) -> Vec<Vec<(usize, usize)>> {
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|a| (a + 1..n).map(move |b| (a, b))).collect();
    (0..1u32 << pairs.len())
        .map(|mask| pairs.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, &e)| e).collect::<Vec<_>>())
        .filter(|edges| {
            let mut seen = BTreeSet::from([0]);
            let mut stack = vec![0];
            while let Some(x) = stack.pop() {
                for &(a, b) in edges {
                    let y = if a == x { b } else if b == x { a } else { continue };
                    if seen.insert(y) {
                        stack.push(y);
                    }
                }
            }
            seen.len() == n
        })
        .collect()
}

/// A synthetic 118-bus bundle: ring plus chords, ~100 substations, random
/// impact data and a ten-color palette. Returns the directory.
pub fn write_synthetic_118(dir: &Path, seed: u64) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n_bus = 118;
    let mut branches: BTreeSet<(usize, usize)> = (1..=n_bus).map(|b| (b, b % n_bus + 1)).map(|(a, b)| (a.min(b), a.max(b))).collect();
    while branches.len() < 186 {
        let a = rng.gen_range(1..=n_bus);
        let b = (a + rng.gen_range(2..12) - 1) % n_bus + 1;
        if a != b {
            branches.insert((a.min(b), a.max(b)));
        }
    }

    let mut cdf = String::from(" 01/01/00 SYNTHETIC      100.0 2000 W 118 BUS TEST CASE\n");
    let _ = writeln!(cdf, "BUS DATA FOLLOWS                            {n_bus} ITEMS");
    for b in 1..=n_bus {
        let load: f64 = if rng.gen_bool(0.6) { (rng.gen_range(5.0..80.0) * 10.0f64).round() / 10.0 } else { 0.0 };
        let _ = writeln!(
            cdf,
            "{b:>4} {:<12} 1  1  0 1.000   0.0 {load:>9.1} {:>9.1}    0.0    0.0 138.0 1.000 0.0 0.0 0.0 0.0 0",
            format!("Bus {b}"),
            load / 3.0
        );
    }
    cdf.push_str("-999\n");
    let _ = writeln!(cdf, "BRANCH DATA FOLLOWS                         {} ITEMS", branches.len());
    for (a, b) in &branches {
        let _ = writeln!(cdf, "{a:>4} {b:>4}  1  1 1 0  0.01 0.05 0.02 0 0 0 0 0 0.0 0.0 0.0 0.0 0.0 0.0 0.0");
    }
    cdf.push_str("-999\nEND OF DATA\n");

    // Buses 1..=36 pair up into 18 substations; the rest stand alone: 100 in total.
    let mut subs: Vec<Vec<usize>> = (0..18).map(|i| vec![2 * i + 1, 2 * i + 2]).collect();
    subs.extend((37..=n_bus).map(|b| vec![b]));
    let submap = serde_json::to_string(
        &subs.iter().enumerate().map(|(i, b)| ((i + 1).to_string(), b.clone())).collect::<std::collections::BTreeMap<_, _>>(),
    )
    .unwrap();

    let mut impact = String::from("substation_id,gamma,p_lol_mw\n");
    for i in 1..=subs.len() {
        let gamma: f64 = if rng.gen_bool(0.08) { 1.0 } else { rng.gen_range(0.0..0.6) };
        let _ = writeln!(impact, "{i},{gamma:.5},{:.2}", rng.gen_range(0.0..120.0));
    }

    let names = ["Green", "Blue", "Red", "Purple", "Yellow", "Orange", "Cyan", "Brown", "Pink", "Gray"];
    let palette: Vec<_> = names
        .iter()
        .enumerate()
        .map(|(i, n)| serde_json::json!({"name": n, "strength": 10 - i}))
        .collect();

    std::fs::create_dir_all(dir).unwrap();
    std::fs::write(dir.join("synthetic118.cdf"), cdf).unwrap();
    std::fs::write(dir.join("substations.json"), submap).unwrap();
    std::fs::write(dir.join("impact.csv"), impact).unwrap();
    std::fs::write(dir.join("palette.json"), serde_json::to_string_pretty(&palette).unwrap()).unwrap();
    std::fs::write(
        dir.join("scenario.json"),
        r#"{"mode":"capability","k":8,"entry_nodes":[],"target_substations":[2]}"#,
    )
    .unwrap();
}
