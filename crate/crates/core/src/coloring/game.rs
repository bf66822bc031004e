//! The coloring game: players are mechanisms, actions are colors.
//!
//! A first pass seats every player on the best conflict-free color against
//! the players already colored. Sequential round-robin best response follows
//! until a full round makes no move. Payoff contributions are symmetric across
//! an edge, so the sum of all payoffs changes by exactly twice the mover's gain
//! and strict improvements cannot cycle.

use std::cmp::Reverse;
use std::collections::hash_map::DefaultHasher;
use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::hash::{Hash, Hasher};

use serde::{Deserialize, Serialize};

use super::{cumulative_index, payoff, Algorithm, Coloring, Palette, VulnerabilityTable};
use crate::error::{Error, Result};
use crate::impact::SubstationProfile;
use crate::security_graph::{DiversityGraph, SmTypeTable};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct GameOptions {
    /// Accepted-move budget; defaults to 50 * n.
    pub move_cap: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GameStatus {
    Converged,
    NonConverged,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ViolationKind {
    /// The vertex shares its color with a neighbor.
    Conflict,
    /// Switching to a conflict-free color strictly raises the payoff.
    Improvement,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub vertex: usize,
    pub color: usize,
    pub kind: ViolationKind,
    pub gain: f64,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct NashCertificate {
    pub violations: Vec<Violation>,
}

impl NashCertificate {
    pub fn is_nash(&self) -> bool {
        self.violations.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GameOutcome {
    /// The final profile when converged, otherwise the best one seen
    /// (fewest conflicts, then highest sigma).
    pub coloring: Coloring,
    pub status: GameStatus,
    pub certificate: NashCertificate,
    pub satisfied: Vec<bool>,
    /// Sigma after the first pass and after every accepted move.
    pub potential_trace: Vec<f64>,
    pub moves: usize,
    pub cycle_detected: bool,
    pub order: Vec<usize>,
}

fn tolerance(x: f64) -> f64 {
    1e-12 * x.abs().max(1.0)
}

/// Players by SM priority rank, then substation gamma (high first), then
/// degree (high first), then vertex index.
pub fn order_players(g: &DiversityGraph, profiles: &[SubstationProfile], types: &SmTypeTable) -> Result<Vec<usize>> {
    let gamma: BTreeMap<_, _> = profiles.iter().map(|p| (p.substation_id, p.gamma)).collect();
    let mut keyed = Vec::with_capacity(g.len());
    for v in 0..g.len() {
        let sm = g.node(v);
        let gm = *gamma.get(&sm.substation_id).ok_or(Error::UnknownSubstation(sm.substation_id))?;
        keyed.push((types.priority_rank(sm.sm_type), gm, g.degree(v), v));
    }
    keyed.sort_by(|a, b| {
        a.0.cmp(&b.0)
            .then(b.1.total_cmp(&a.1))
            .then(b.2.cmp(&a.2))
            .then(a.3.cmp(&b.3))
    });
    Ok(keyed.into_iter().map(|k| k.3).collect())
}

/// Descending degree, ties by index.
pub fn order_by_degree(g: &DiversityGraph) -> Vec<usize> {
    let mut order: Vec<usize> = (0..g.len()).collect();
    order.sort_by_key(|&v| (Reverse(g.degree(v)), v));
    order
}

struct Board<'a> {
    g: &'a DiversityGraph,
    palette: &'a Palette,
    psi: &'a VulnerabilityTable,
}

impl Board<'_> {
    fn utility(&self, v: usize, color: usize, colors: &[Option<usize>]) -> f64 {
        let own = f64::from(self.palette.strength(color)) * self.psi.get(v);
        self.g
            .neighbors(v)
            .iter()
            .filter_map(|&w| colors[w].map(|cw| (own - f64::from(self.palette.strength(cw)) * self.psi.get(w)).abs()))
            .sum()
    }

    fn free(&self, v: usize, colors: &[Option<usize>]) -> Vec<bool> {
        let mut free = vec![true; self.palette.len()];
        for &w in self.g.neighbors(v) {
            if let Some(c) = colors[w] {
                free[c] = false;
            }
        }
        free
    }

    /// Highest-payoff color among `allowed`; ties go to the stronger color.
    fn best(&self, v: usize, allowed: impl Iterator<Item = usize>, colors: &[Option<usize>]) -> Option<(usize, f64)> {
        let mut best: Option<(usize, f64)> = None;
        for c in allowed {
            let u = self.utility(v, c, colors);
            match best {
                Some((_, bu)) if u <= bu + tolerance(bu) => {}
                _ => best = Some((c, u)),
            }
        }
        best
    }

    /// The move `v` wants to make, if any.
    fn respond(&self, v: usize, colors: &[Option<usize>]) -> Option<usize> {
        let cur = colors[v].expect("profile is total");
        let free = self.free(v, colors);
        let cur_u = self.utility(v, cur, colors);
        let any_free = free.iter().any(|&f| f);
        let allowed: Vec<usize> = (0..free.len()).filter(|&c| !any_free || free[c]).collect();
        let (b, bu) = self.best(v, allowed.into_iter(), colors)?;
        if b == cur {
            return None;
        }
        if (any_free && !free[cur]) || bu > cur_u + tolerance(cur_u) {
            Some(b)
        } else {
            None
        }
    }
}

fn profile_hash(colors: &[Option<usize>]) -> u64 {
    let mut h = DefaultHasher::new();
    colors.hash(&mut h);
    h.finish()
}

fn conflict_count(g: &DiversityGraph, colors: &[Option<usize>]) -> usize {
    g.edges().filter(|&(a, b)| colors[a] == colors[b]).count()
}

/// Run the game. The palette is cut to its strongest `delta2 + 2` colors when
/// it is larger than that.
pub fn color_game(
    g: &DiversityGraph,
    palette: &Palette,
    psi: &VulnerabilityTable,
    order: &[usize],
    opts: GameOptions,
) -> Result<GameOutcome> {
    let n = g.len();
    if psi.len() != n {
        return Err(Error::Input(format!("{} vulnerabilities for {n} vertices", psi.len())));
    }
    let mut seen_v = vec![false; n];
    if order.len() != n || order.iter().any(|&v| v >= n || std::mem::replace(&mut seen_v[v], true)) {
        return Err(Error::Input("player order is not a permutation of the vertices".into()));
    }

    let palette = palette.truncated(g.delta2() + 2);
    let board = Board { g, palette: &palette, psi };
    let k = palette.len();

    let mut colors: Vec<Option<usize>> = vec![None; n];
    for &v in order {
        let free = board.free(v, &colors);
        let pick = match board.best(v, (0..k).filter(|&c| free[c]), &colors) {
            Some((c, _)) => c,
            None => board.best(v, 0..k, &colors).expect("palette is non-empty").0,
        };
        colors[v] = Some(pick);
    }

    let sigma = |colors: &[Option<usize>]| (0..n).map(|v| board.utility(v, colors[v].unwrap(), colors)).sum::<f64>();
    let mut trace = vec![sigma(&colors)];
    let mut seen = HashSet::from([profile_hash(&colors)]);
    let mut best = (conflict_count(g, &colors), trace[0], colors.clone());
    let cap = opts.move_cap.unwrap_or(50 * n);
    let mut moves = 0;
    let mut rounds = 0;
    let mut cycle = false;
    let mut settled = false;

    'rounds: loop {
        rounds += 1;
        let mut changed = false;
        for &v in order {
            let Some(c) = board.respond(v, &colors) else { continue };
            colors[v] = Some(c);
            moves += 1;
            changed = true;
            let s = sigma(&colors);
            trace.push(s);
            let conflicts = conflict_count(g, &colors);
            if conflicts < best.0 || (conflicts == best.0 && s > best.1) {
                best = (conflicts, s, colors.clone());
            }
            if !seen.insert(profile_hash(&colors)) {
                cycle = true;
                tracing::warn!(moves, "best-response profile repeated");
                break 'rounds;
            }
            if moves >= cap {
                tracing::warn!(cap, "best-response move cap reached");
                break 'rounds;
            }
        }
        if !changed {
            settled = true;
            break;
        }
    }

    let proper = conflict_count(g, &colors) == 0;
    let final_colors = if settled && proper { colors } else { best.2 };
    let satisfied = (0..n)
        .map(|v| g.neighbors(v).iter().all(|&w| final_colors[w] != final_colors[v]))
        .collect();
    let assignment = final_colors.into_iter().map(Option::unwrap).collect();
    let coloring = Coloring::new(palette, assignment, Algorithm::Game, rounds, 0)?;
    let certificate = verify_nash(&coloring, psi, g);
    let status = if settled && proper && certificate.is_nash() {
        GameStatus::Converged
    } else {
        GameStatus::NonConverged
    };
    tracing::debug!(n, moves, rounds, ?status, "coloring game finished");
    Ok(GameOutcome {
        coloring,
        status,
        certificate,
        satisfied,
        potential_trace: trace,
        moves,
        cycle_detected: cycle,
        order: order.to_vec(),
    })
}

/// Check a total coloring for conflicts and for strictly improving
/// conflict-free deviations within the coloring's own palette.
pub fn verify_nash(c: &Coloring, psi: &VulnerabilityTable, g: &DiversityGraph) -> NashCertificate {
    let mut conflicted = BTreeSet::new();
    for (a, b) in c.conflicts(g) {
        conflicted.insert(a);
        conflicted.insert(b);
    }
    let mut violations: Vec<Violation> = conflicted
        .into_iter()
        .map(|v| Violation { vertex: v, color: c.color_of(v), kind: ViolationKind::Conflict, gain: 0.0 })
        .collect();

    let colors: Vec<Option<usize>> = c.assignment().iter().map(|&x| Some(x)).collect();
    let board = Board { g, palette: c.palette(), psi };
    for v in 0..g.len() {
        let cur_u = payoff(v, c, psi, g);
        let free = board.free(v, &colors);
        for alt in (0..c.palette().len()).filter(|&a| a != c.color_of(v) && free[a]) {
            let u = board.utility(v, alt, &colors);
            if u > cur_u + tolerance(cur_u) {
                violations.push(Violation { vertex: v, color: alt, kind: ViolationKind::Improvement, gain: u - cur_u });
            }
        }
    }
    violations.sort_by_key(|v| (v.vertex, v.color));
    NashCertificate { violations }
}

impl GameOutcome {
    pub fn sigma(&self, psi: &VulnerabilityTable, g: &DiversityGraph) -> f64 {
        cumulative_index(&self.coloring, psi, g)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid_model::SubstationId;
    use crate::impact::ImpactClass;
    use crate::security_graph::{SecurityMechanism, SmType};
    use proptest::prelude::*;

    fn graph_typed(nodes: &[(SmType, u32)], edges: &[(usize, usize)]) -> DiversityGraph {
        let nodes = nodes
            .iter()
            .enumerate()
            .map(|(i, &(t, s))| SecurityMechanism {
                id: format!("v{i}"),
                sm_type: t,
                substation_id: SubstationId(s),
                is_entry_point: false,
            })
            .collect();
        DiversityGraph::from_edges(nodes, edges.iter().copied())
    }

    fn graph(n: usize, edges: &[(usize, usize)]) -> DiversityGraph {
        graph_typed(&vec![(SmType::Vpn, 1); n], edges)
    }

    fn psi(v: &[f64]) -> VulnerabilityTable {
        VulnerabilityTable::from_values(v.to_vec()).unwrap()
    }

    fn pal(strengths: &[u32]) -> Palette {
        Palette::new(
            strengths
                .iter()
                .map(|&s| super::super::PaletteColor { name: format!("S{s}"), strength: s })
                .collect(),
        )
        .unwrap()
    }

    fn all_profiles(n: usize, k: usize) -> impl Iterator<Item = Vec<usize>> {
        (0..k.pow(n as u32)).map(move |mut code| {
            (0..n)
                .map(|_| {
                    let c = code % k;
                    code /= k;
                    c
                })
                .collect()
        })
    }

    #[test]
    fn k2_example() {
        let g = graph(2, &[(0, 1)]);
        let out = color_game(&g, &pal(&[10, 8]), &psi(&[1.0, 1.0]), &[0, 1], GameOptions::default()).unwrap();
        assert_eq!(out.status, GameStatus::Converged);
        assert_eq!(out.coloring.strength_of(0), 10);
        assert_eq!(out.coloring.strength_of(1), 8);
        assert_eq!(payoff(0, &out.coloring, &psi(&[1.0, 1.0]), &g), 2.0);
        assert!(out.certificate.is_nash());
    }

    #[test]
    fn edgeless_takes_strongest() {
        let g = graph(4, &[]);
        let out = color_game(&g, &Palette::default(), &psi(&[0.3; 4]), &[0, 1, 2, 3], GameOptions::default()).unwrap();
        assert!(out.coloring.assignment().iter().all(|&c| out.coloring.palette().strength(c) == 10));
        assert_eq!(out.sigma(&psi(&[0.3; 4]), &g), 0.0);
        assert_eq!(out.status, GameStatus::Converged);
    }

    #[test]
    fn triangle_against_brute_force() {
        let g = graph(3, &[(0, 1), (1, 2), (0, 2)]);
        let p = pal(&[10, 8, 6]);
        let ps = psi(&[0.9, 0.4, 0.2]);
        let out = color_game(&g, &p, &ps, &[0, 1, 2], GameOptions::default()).unwrap();
        assert!(out.coloring.is_proper(&g));
        assert_eq!(out.coloring.strength_of(0), 10);
        let nash: Vec<Vec<usize>> = all_profiles(3, 3)
            .filter(|a| verify_nash(&Coloring::new(p.clone(), a.clone(), Algorithm::Game, 0, 0).unwrap(), &ps, &g).is_nash())
            .collect();
        assert!(nash.contains(&out.coloring.assignment().to_vec()));
    }

    #[test]
    fn verify_flags_conflict() {
        let g = graph(2, &[(0, 1)]);
        let c = Coloring::new(pal(&[10, 8]), vec![0, 0], Algorithm::Game, 0, 0).unwrap();
        let cert = verify_nash(&c, &psi(&[1.0, 1.0]), &g);
        assert!(!cert.is_nash());
        let vs: BTreeSet<_> = cert.violations.iter().filter(|v| v.kind == ViolationKind::Conflict).map(|v| v.vertex).collect();
        assert_eq!(vs, BTreeSet::from([0, 1]));
    }

    #[test]
    fn verify_flags_improvement_on_path() {
        // Middle vertex at 8 between two 6s could move to 10 for a larger gap.
        let g = graph(3, &[(0, 1), (1, 2)]);
        let c = Coloring::new(pal(&[10, 8, 6]), vec![2, 1, 2], Algorithm::Game, 0, 0).unwrap();
        let cert = verify_nash(&c, &psi(&[1.0, 1.0, 1.0]), &g);
        assert!(cert.violations.iter().any(|v| v.vertex == 1 && v.color == 0 && v.kind == ViolationKind::Improvement));
    }

    #[test]
    fn order_examples() {
        let g = graph_typed(
            &[(SmType::Vpn, 1), (SmType::ScadaFirewall, 2), (SmType::ScadaFirewall, 1), (SmType::Vpn, 1)],
            &[],
        );
        let profiles = [
            SubstationProfile { substation_id: SubstationId(1), p_lol_mw: 5.0, l_star: Some(1.0), gamma: 1.0, impact_class: ImpactClass::High },
            SubstationProfile { substation_id: SubstationId(2), p_lol_mw: 94.24, l_star: None, gamma: 0.2427, impact_class: ImpactClass::Low },
        ];
        let order = order_players(&g, &profiles, &SmTypeTable::default()).unwrap();
        assert_eq!(order, vec![2, 1, 0, 3]);
        assert!(order_players(&g, &profiles[..1], &SmTypeTable::default()).is_err());
    }

    #[test]
    fn order_must_be_permutation() {
        let g = graph(2, &[(0, 1)]);
        assert!(color_game(&g, &Palette::default(), &psi(&[1.0, 1.0]), &[0, 0], GameOptions::default()).is_err());
        assert!(color_game(&g, &Palette::default(), &psi(&[1.0]), &[0, 1], GameOptions::default()).is_err());
    }

    #[test]
    fn small_palette_reports_non_convergence() {
        let edges: Vec<_> = (0..4).flat_map(|a| (a + 1..4).map(move |b| (a, b))).collect();
        let g = graph(4, &edges);
        let out = color_game(&g, &pal(&[10, 8, 6]), &psi(&[0.1, 0.2, 0.3, 0.4]), &[0, 1, 2, 3], GameOptions::default()).unwrap();
        assert_eq!(out.status, GameStatus::NonConverged);
        assert!(out.satisfied.iter().any(|s| !s));
        assert_eq!(out.coloring.conflicts(&g).len(), 1);
    }

    fn arb_instance() -> impl Strategy<Value = (usize, Vec<(usize, usize)>, Vec<f64>)> {
        (2usize..12).prop_flat_map(|n| {
            let pairs: Vec<(usize, usize)> = (0..n).flat_map(|a| (a + 1..n).map(move |b| (a, b))).collect();
            let m = pairs.len();
            (
                Just(n),
                proptest::sample::subsequence(pairs, 0..=m),
                proptest::collection::vec(0.0f64..1.0, n),
            )
        })
    }

    proptest! {
        #[test]
        fn degree_order_game_is_proper_nash_and_bounded((n, edges, ps) in arb_instance()) {
            let g = graph(n, &edges);
            let psi = psi(&ps);
            let out = color_game(&g, &Palette::standard(n + 2), &psi, &order_by_degree(&g), GameOptions::default()).unwrap();
            prop_assert_eq!(out.status, GameStatus::Converged);
            prop_assert!(out.coloring.is_proper(&g));
            prop_assert!(verify_nash(&out.coloring, &psi, &g).is_nash());
            prop_assert!(out.coloring.colors_used().len() <= g.delta2() + 2);
            prop_assert!(!out.cycle_detected);
            // Every accepted move raises sigma.
            for w in out.potential_trace.windows(2) {
                prop_assert!(w[1] > w[0]);
            }
        }

        #[test]
        fn payoff_scaling((n, edges, ps) in arb_instance(), lambda in 0.1f64..10.0) {
            let g = graph(n, &edges);
            let base = psi(&ps);
            let scaled = base.scaled(lambda);
            let order = order_by_degree(&g);
            let a = color_game(&g, &Palette::standard(n + 2), &base, &order, GameOptions::default()).unwrap();
            let s1 = cumulative_index(&a.coloring, &base, &g);
            let s2 = cumulative_index(&a.coloring, &scaled, &g);
            prop_assert!((s2 - lambda * s1).abs() <= 1e-9 * s2.abs().max(1.0));
            prop_assert_eq!(verify_nash(&a.coloring, &scaled, &g).is_nash(), verify_nash(&a.coloring, &base, &g).is_nash());
        }

        #[test]
        fn deterministic((n, edges, ps) in arb_instance()) {
            let g = graph(n, &edges);
            let psi = psi(&ps);
            let order = order_by_degree(&g);
            let a = color_game(&g, &Palette::standard(6), &psi, &order, GameOptions::default()).unwrap();
            let b = color_game(&g, &Palette::standard(6), &psi, &order, GameOptions::default()).unwrap();
            prop_assert_eq!(a, b);
        }
    }
}
