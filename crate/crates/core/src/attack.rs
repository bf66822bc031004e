//! Attacker replay over a colored security graph.
//!
//! Two attacker models share one traversal. In capability mode the attacker
//! exploits any mechanism whose color strength is at most `k`. In budget mode
//! the attacker holds zero-days for `k` colors, picked to do the most damage,
//! and every mechanism running an exploited color falls with it.
//!
//! Equipment is traversable once reached. The control center is reachable
//! only from the attacker node: a compromised substation mechanism does not
//! open the hub.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use serde::{Deserialize, Serialize};

use crate::coloring::{normalize, payoffs, Coloring, VulnerabilityTable};
use crate::error::{Error, Result};
use crate::grid_model::SubstationId;
use crate::impact::{total_loss_of_load, SubstationProfile};
use crate::security_graph::{DiversityGraph, NodeKind, SecurityGraph, SmType};

/// Upper bound on enumerated paths before enumeration stops with a warning.
pub const PATH_LIMIT: usize = 100_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AttackMode {
    /// Exploits every mechanism of strength <= k.
    Capability,
    /// Exploits k distinct colors.
    Budget,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AttackScenario {
    pub mode: AttackMode,
    pub k: u32,
    /// Node ids; empty means the target substations' entry points.
    #[serde(default)]
    pub entry_nodes: Vec<String>,
    pub target_substations: BTreeSet<SubstationId>,
    /// Total system load used when impact data comes as loading levels.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p_total_mw: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub attack_likelihood: Option<BTreeMap<SmType, f64>>,
}

impl AttackScenario {
    pub fn capability(k: u32, targets: impl IntoIterator<Item = SubstationId>) -> Self {
        Self {
            mode: AttackMode::Capability,
            k,
            entry_nodes: Vec::new(),
            target_substations: targets.into_iter().collect(),
            p_total_mw: None,
            attack_likelihood: None,
        }
    }

    pub fn budget(b: u32, targets: impl IntoIterator<Item = SubstationId>) -> Self {
        Self { mode: AttackMode::Budget, ..Self::capability(b, targets) }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let s: Self = serde_json::from_str(text).map_err(|e| Error::Scenario(e.to_string()))?;
        if s.target_substations.is_empty() {
            return Err(Error::Scenario("no target substations".into()));
        }
        Ok(s)
    }
}

/// What the attacker can exploit in one traversal.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ExploitRule {
    MaxStrength(u32),
    Colors(BTreeSet<usize>),
}

/// Whether vertex `v` of the diversity graph falls under `rule`.
pub fn exploitable(v: usize, c: &Coloring, rule: &ExploitRule) -> bool {
    match rule {
        ExploitRule::MaxStrength(k) => c.strength_of(v) <= *k,
        ExploitRule::Colors(set) => set.contains(&c.color_of(v)),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AttackResult {
    pub mode: AttackMode,
    pub k: u32,
    /// Budget mode only: the colors the attacker chose.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub exploited_colors: Option<Vec<String>>,
    pub compromised_sms: BTreeSet<String>,
    pub compromised_substations: BTreeSet<SubstationId>,
    pub targets_reached: bool,
    /// Non-target substations that fell before the first target.
    pub prerequisites: BTreeSet<SubstationId>,
    /// Non-target substations that fell afterwards.
    pub propagation: BTreeSet<SubstationId>,
    /// Traversal-tree paths from an entry node to each compromised mechanism.
    pub attack_paths: Vec<Vec<String>>,
    /// Mechanisms taken through a shared vulnerability rather than a path.
    pub shared_compromise: BTreeSet<String>,
    pub total_p_lol_mw: f64,
}

/// Security graph, its diversity graph and a coloring of the latter.
#[derive(Debug, Clone, Copy)]
pub struct ColoredGraph<'a> {
    pub m: &'a SecurityGraph,
    pub g: &'a DiversityGraph,
    pub c: &'a Coloring,
    vertex_of: &'a [Option<usize>],
}

/// Map from security-graph index to diversity-graph vertex.
pub fn vertex_map(m: &SecurityGraph, g: &DiversityGraph) -> Result<Vec<Option<usize>>> {
    let mut out = vec![None; m.len()];
    for v in 0..g.len() {
        let i = g
            .source_index(v)
            .filter(|&i| i < m.len() && m.node(i).id == g.node(v).id)
            .ok_or_else(|| Error::Input(format!("{} is not a vertex of this security graph", g.node(v).id)))?;
        out[i] = Some(v);
    }
    Ok(out)
}

impl<'a> ColoredGraph<'a> {
    pub fn new(m: &'a SecurityGraph, g: &'a DiversityGraph, c: &'a Coloring, vertex_of: &'a [Option<usize>]) -> Result<Self> {
        if c.len() != g.len() {
            return Err(Error::Input(format!("coloring has {} vertices, graph {}", c.len(), g.len())));
        }
        Ok(Self { m, g, c, vertex_of })
    }

    fn step_allowed(&self, from: usize, to: usize) -> bool {
        match self.m.node(to).kind {
            NodeKind::ControlCenter => self.m.node(from).kind == NodeKind::Attacker,
            NodeKind::Attacker => false,
            _ => true,
        }
    }

    fn resolve_entries(&self, ids: &[String], targets: &BTreeSet<SubstationId>) -> Result<Vec<usize>> {
        for &t in targets {
            if self.m.substation_mechanisms(t).next().is_none() {
                return Err(Error::UnknownSubstation(t));
            }
        }
        if ids.is_empty() {
            return Ok(targets
                .iter()
                .flat_map(|&t| self.m.substation_mechanisms(t).filter(|&i| self.m.node(i).entry_point))
                .collect());
        }
        ids.iter()
            .map(|id| self.m.index_of(id).ok_or_else(|| Error::UnknownNode(id.clone())))
            .collect()
    }

    fn is_target_sm(&self, i: usize, target: SubstationId) -> bool {
        self.vertex_of[i].is_some() && self.m.node(i).substation == Some(target)
    }
}

struct Closure {
    /// Security-graph indices of compromised mechanisms, in compromise order.
    order: Vec<usize>,
    parent: Vec<Option<usize>>,
    compromised: Vec<bool>,
    shared: BTreeSet<usize>,
}

fn closure(cg: &ColoredGraph, entries: &[usize], rule: &ExploitRule, spread: bool) -> Closure {
    let n = cg.m.len();
    let mut visited = vec![false; n];
    let mut compromised = vec![false; n];
    let mut parent = vec![None; n];
    let mut order = Vec::new();
    let mut shared = BTreeSet::new();
    let mut queue = VecDeque::new();

    let open = |i: usize| cg.vertex_of[i].is_none_or(|v| exploitable(v, cg.c, rule));
    for &e in entries {
        if !visited[e] && open(e) {
            visited[e] = true;
            queue.push_back(e);
        }
    }
    loop {
        while let Some(x) = queue.pop_front() {
            if cg.vertex_of[x].is_some() && !compromised[x] {
                compromised[x] = true;
                order.push(x);
            }
            for y in cg.m.neighbors(x) {
                if visited[y] || !cg.step_allowed(x, y) {
                    continue;
                }
                visited[y] = true;
                if open(y) {
                    parent[y] = Some(x);
                    queue.push_back(y);
                }
            }
        }
        if !spread {
            break;
        }
        let hit: BTreeSet<usize> = order.iter().map(|&i| cg.c.color_of(cg.vertex_of[i].unwrap())).collect();
        for (i, v) in cg.vertex_of.iter().enumerate() {
            if let Some(v) = *v {
                if !compromised[i] && hit.contains(&cg.c.color_of(v)) {
                    shared.insert(i);
                    visited[i] = true;
                    queue.push_back(i);
                }
            }
        }
        if queue.is_empty() {
            break;
        }
    }
    Closure { order, parent, compromised, shared }
}

fn subsets(items: &[usize], size: usize) -> Vec<BTreeSet<usize>> {
    fn rec(items: &[usize], size: usize, start: usize, cur: &mut Vec<usize>, out: &mut Vec<BTreeSet<usize>>) {
        if cur.len() == size {
            out.push(cur.iter().copied().collect());
            return;
        }
        for i in start..items.len() {
            cur.push(items[i]);
            rec(items, size, i + 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(items, size.min(items.len()), 0, &mut Vec::new(), &mut out);
    out
}

fn loss(substations: &BTreeSet<SubstationId>, profiles: &[SubstationProfile]) -> Result<f64> {
    total_loss_of_load(substations, profiles)
}

fn fallen_substations(cg: &ColoredGraph, cl: &Closure) -> Vec<SubstationId> {
    let mut seen = BTreeSet::new();
    cl.order
        .iter()
        .filter(|&&i| cg.m.node(i).entry_point)
        .filter_map(|&i| cg.m.node(i).substation)
        .filter(|s| seen.insert(*s))
        .collect()
}

fn tree_path(cg: &ColoredGraph, cl: &Closure, mut i: usize) -> Vec<String> {
    let mut path = vec![i];
    while let Some(p) = cl.parent[i] {
        path.push(p);
        i = p;
    }
    path.reverse();
    path.into_iter().map(|i| cg.m.node(i).id.clone()).collect()
}

/// Replay the scenario over the colored graph.
pub fn propagate(cg: &ColoredGraph, profiles: &[SubstationProfile], scenario: &AttackScenario) -> Result<AttackResult> {
    let entries = cg.resolve_entries(&scenario.entry_nodes, &scenario.target_substations)?;

    let (cl, exploited) = match scenario.mode {
        AttackMode::Capability => (closure(cg, &entries, &ExploitRule::MaxStrength(scenario.k), false), None),
        AttackMode::Budget => {
            let used: Vec<usize> = cg.c.colors_used().into_iter().collect();
            let mut best: Option<(f64, usize, Closure, BTreeSet<usize>)> = None;
            for set in subsets(&used, scenario.k as usize) {
                let cl = closure(cg, &entries, &ExploitRule::Colors(set.clone()), true);
                let p = loss(&fallen_substations(cg, &cl).into_iter().collect(), profiles)?;
                let count = cl.order.len();
                // Subsets come in lexicographic order, so strict comparison keeps the smallest.
                if best.as_ref().is_none_or(|b| p > b.0 || (p == b.0 && count > b.1)) {
                    best = Some((p, count, cl, set));
                }
            }
            let (_, _, cl, set) = best.expect("at least one subset");
            let names = set.iter().map(|&c| cg.c.palette().color(c).name.clone()).collect();
            (cl, Some(names))
        }
    };

    let fallen = fallen_substations(cg, &cl);
    let targets = &scenario.target_substations;
    let first_target = fallen.iter().position(|s| targets.contains(s));
    let split = first_target.unwrap_or(fallen.len());
    let prerequisites = fallen[..split].iter().copied().filter(|s| !targets.contains(s)).collect();
    let propagation = fallen[split..].iter().copied().filter(|s| !targets.contains(s)).collect();
    let compromised_substations: BTreeSet<SubstationId> = fallen.iter().copied().collect();

    let mut attack_paths: Vec<Vec<String>> = cl
        .order
        .iter()
        .filter(|i| !cl.shared.contains(i))
        .map(|&i| tree_path(cg, &cl, i))
        .filter(|p| entries.iter().any(|&e| cg.m.node(e).id == p[0]))
        .collect();
    attack_paths.sort();

    debug_assert!(cl.compromised.iter().filter(|&&b| b).count() == cl.order.len());
    Ok(AttackResult {
        mode: scenario.mode,
        k: scenario.k,
        exploited_colors: exploited,
        compromised_sms: cl.order.iter().map(|&i| cg.m.node(i).id.clone()).collect(),
        targets_reached: first_target.is_some(),
        prerequisites,
        propagation,
        attack_paths,
        shared_compromise: cl.shared.iter().map(|&i| cg.m.node(i).id.clone()).collect(),
        total_p_lol_mw: loss(&compromised_substations, profiles)?,
        compromised_substations,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PathDiversity {
    pub path: Vec<String>,
    pub distinct_colors: usize,
}

impl PathDiversity {
    pub fn feasible_at(&self, budget: usize) -> bool {
        self.distinct_colors <= budget
    }
}

/// All simple paths from `entry` that end at the first mechanism of the
/// target substation they reach. `max_len` bounds the number of mechanisms on
/// a path and defaults to the mechanism count.
pub fn enumerate_attack_paths(
    cg: &ColoredGraph,
    entry: &str,
    target: SubstationId,
    max_len: Option<usize>,
) -> Result<Vec<PathDiversity>> {
    if cg.m.substation_mechanisms(target).next().is_none() {
        return Err(Error::UnknownSubstation(target));
    }
    let start = cg.m.index_of(entry).ok_or_else(|| Error::UnknownNode(entry.to_string()))?;
    let max_len = max_len.unwrap_or(cg.g.len());

    struct Walk<'c, 'a> {
        cg: &'c ColoredGraph<'a>,
        target: SubstationId,
        max_len: usize,
        on_path: Vec<bool>,
        path: Vec<usize>,
        out: Vec<PathDiversity>,
        truncated: bool,
    }

    impl Walk<'_, '_> {
        fn sm_count(&self) -> usize {
            self.path.iter().filter(|&&i| self.cg.vertex_of[i].is_some()).count()
        }

        fn visit(&mut self, x: usize) {
            if self.out.len() >= PATH_LIMIT {
                self.truncated = true;
                return;
            }
            self.path.push(x);
            self.on_path[x] = true;
            if self.sm_count() <= self.max_len {
                if self.cg.is_target_sm(x, self.target) {
                    let colors: BTreeSet<usize> =
                        self.path.iter().filter_map(|&i| self.cg.vertex_of[i]).map(|v| self.cg.c.color_of(v)).collect();
                    self.out.push(PathDiversity {
                        path: self.path.iter().map(|&i| self.cg.m.node(i).id.clone()).collect(),
                        distinct_colors: colors.len(),
                    });
                } else {
                    let next: Vec<usize> = self.cg.m.neighbors(x).collect();
                    for y in next {
                        if !self.on_path[y] && self.cg.step_allowed(x, y) {
                            self.visit(y);
                        }
                    }
                }
            }
            self.on_path[x] = false;
            self.path.pop();
        }
    }

    let mut walk = Walk {
        cg,
        target,
        max_len,
        on_path: vec![false; cg.m.len()],
        path: Vec::new(),
        out: Vec::new(),
        truncated: false,
    };
    walk.visit(start);
    if walk.truncated {
        tracing::warn!(limit = PATH_LIMIT, entry, "attack path enumeration truncated");
    }
    Ok(walk.out)
}

/// Smallest number of distinct colors an attacker must exploit to reach a
/// mechanism of `target` from `entry`; `None` when no path exists at all.
pub fn min_exploits_to_compromise(cg: &ColoredGraph, entry: &str, target: SubstationId) -> Result<Option<usize>> {
    if cg.m.substation_mechanisms(target).next().is_none() {
        return Err(Error::UnknownSubstation(target));
    }
    let start = cg.m.index_of(entry).ok_or_else(|| Error::UnknownNode(entry.to_string()))?;
    let used: Vec<usize> = cg.c.colors_used().into_iter().collect();
    let reaches = |set: BTreeSet<usize>| {
        let cl = closure(cg, &[start], &ExploitRule::Colors(set), false);
        cl.order.iter().any(|&i| cg.is_target_sm(i, target))
    };
    for b in 1..=used.len() {
        if subsets(&used, b).into_iter().any(reaches) {
            return Ok(Some(b));
        }
    }
    Ok(None)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankedVertex {
    pub id: String,
    pub substation_id: SubstationId,
    pub sm_type: SmType,
    pub color: String,
    pub payoff: f64,
    pub normalized_payoff: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiversityReport {
    pub colors_used: usize,
    pub color_names: Vec<String>,
    /// Budget -> largest fraction of entry-point mechanisms sharing one of `budget` colors.
    pub entry_compromise_fraction: BTreeMap<usize, f64>,
    pub sigma: f64,
    pub top: Vec<RankedVertex>,
}

pub fn diversity_report(g: &DiversityGraph, c: &Coloring, psi: &VulnerabilityTable, top_n: usize) -> DiversityReport {
    let mut per_color: BTreeMap<usize, usize> = BTreeMap::new();
    let mut entries = 0;
    for v in (0..g.len()).filter(|&v| g.node(v).is_entry_point) {
        *per_color.entry(c.color_of(v)).or_default() += 1;
        entries += 1;
    }
    let mut counts: Vec<usize> = per_color.into_values().collect();
    counts.sort_unstable_by(|a, b| b.cmp(a));
    let entry_compromise_fraction = (1..=c.palette().len())
        .map(|b| {
            let hit: usize = counts.iter().take(b).sum();
            (b, if entries == 0 { 0.0 } else { hit as f64 / entries as f64 })
        })
        .collect();

    let u = payoffs(c, psi, g);
    let norm = normalize(&u);
    let mut ranked: Vec<usize> = (0..g.len()).collect();
    ranked.sort_by(|&a, &b| u[b].total_cmp(&u[a]).then_with(|| g.node(a).id.cmp(&g.node(b).id)));
    let top = ranked
        .into_iter()
        .take(top_n)
        .map(|v| RankedVertex {
            id: g.node(v).id.clone(),
            substation_id: g.node(v).substation_id,
            sm_type: g.node(v).sm_type,
            color: c.color_name(v).to_string(),
            payoff: u[v],
            normalized_payoff: norm[v],
        })
        .collect();

    DiversityReport {
        colors_used: c.colors_used().len(),
        color_names: c.color_names_used(),
        entry_compromise_fraction,
        sigma: u.iter().sum(),
        top,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coloring::{color_game, order_players, Algorithm, GameOptions, Palette};
    use crate::grid_model::SubstationAdjacency;
    use crate::impact::ImpactClass;
    use crate::security_graph::{build_security_graph, extract_diversity_graph, SmTypeTable, TemplateConfig};

    fn profile(id: u32, class: ImpactClass, p_lol: f64) -> SubstationProfile {
        SubstationProfile {
            substation_id: SubstationId(id),
            p_lol_mw: p_lol,
            l_star: None,
            gamma: if class == ImpactClass::High { 1.0 } else { 0.05 },
            impact_class: class,
        }
    }

    struct Fixture {
        m: SecurityGraph,
        g: DiversityGraph,
        map: Vec<Option<usize>>,
        profiles: Vec<SubstationProfile>,
    }

    // 1 (HIS) - 2 (LIS) - 3 (LIS)
    fn chain() -> Fixture {
        let profiles = vec![
            profile(1, ImpactClass::High, 5.0),
            profile(2, ImpactClass::Low, 11.2),
            profile(3, ImpactClass::Low, 0.5),
        ];
        let adj = SubstationAdjacency::from_pairs([(SubstationId(1), SubstationId(2)), (SubstationId(2), SubstationId(3))]);
        let m = build_security_graph(&profiles, &adj, &TemplateConfig::default()).unwrap();
        let g = extract_diversity_graph(&m);
        let map = vertex_map(&m, &g).unwrap();
        Fixture { m, g, map, profiles }
    }

    fn uniform(f: &Fixture, strength_index: usize) -> Coloring {
        Coloring::new(Palette::default(), vec![strength_index; f.g.len()], Algorithm::Greedy, 0, 0).unwrap()
    }

    fn game(f: &Fixture) -> Coloring {
        let psi = VulnerabilityTable::build(&f.g, &f.profiles, &SmTypeTable::default()).unwrap();
        let order = order_players(&f.g, &f.profiles, &SmTypeTable::default()).unwrap();
        color_game(&f.g, &Palette::default(), &psi, &order, GameOptions::default()).unwrap().coloring
    }

    #[test]
    fn exploitable_examples() {
        let f = chain();
        let c = uniform(&f, 0);
        assert!(!exploitable(0, &c, &ExploitRule::MaxStrength(8)));
        let c8 = uniform(&f, 1);
        assert!(exploitable(0, &c8, &ExploitRule::MaxStrength(8)));
        assert!(exploitable(0, &c, &ExploitRule::MaxStrength(10)));
    }

    #[test]
    fn k_zero_compromises_nothing() {
        let f = chain();
        let c = game(&f);
        let cg = ColoredGraph::new(&f.m, &f.g, &c, &f.map).unwrap();
        let r = propagate(&cg, &f.profiles, &AttackScenario::capability(0, [SubstationId(2)])).unwrap();
        assert!(r.compromised_sms.is_empty());
        assert_eq!(r.total_p_lol_mw, 0.0);
    }

    #[test]
    fn weak_uniform_coloring_falls_entirely() {
        let f = chain();
        let c = uniform(&f, 4);
        let cg = ColoredGraph::new(&f.m, &f.g, &c, &f.map).unwrap();
        let r = propagate(&cg, &f.profiles, &AttackScenario::capability(8, [SubstationId(3)])).unwrap();
        assert_eq!(r.compromised_substations, BTreeSet::from([SubstationId(1), SubstationId(2), SubstationId(3)]));
        assert_eq!(r.compromised_sms.len(), f.g.len());
        assert!((r.total_p_lol_mw - 16.7).abs() < 1e-12);
        assert!(r.targets_reached);
        assert_eq!(r.propagation, BTreeSet::from([SubstationId(1), SubstationId(2)]));
        for p in &r.attack_paths {
            assert!(p[0].starts_with("3S_"));
        }
    }

    #[test]
    fn scada_side_does_not_reach_other_substations() {
        let f = chain();
        let c = uniform(&f, 4);
        let cg = ColoredGraph::new(&f.m, &f.g, &c, &f.map).unwrap();
        let mut s = AttackScenario::capability(10, [SubstationId(1)]);
        s.entry_nodes = vec!["1S_fwH".into()];
        let r = propagate(&cg, &f.profiles, &s).unwrap();
        // fwH reaches the rest of substation 1 through the RTU, then the link.
        assert!(r.compromised_sms.contains("1S_vpn1"));
        s.entry_nodes = vec!["ATK".into()];
        let r = propagate(&cg, &f.profiles, &s).unwrap();
        assert_eq!(r.compromised_substations.len(), 3);
        assert!(r.attack_paths.iter().all(|p| p[0] == "ATK" && p[1] == "CC"));
    }

    #[test]
    fn unknown_inputs_are_errors() {
        let f = chain();
        let c = game(&f);
        let cg = ColoredGraph::new(&f.m, &f.g, &c, &f.map).unwrap();
        let mut s = AttackScenario::capability(8, [SubstationId(9)]);
        assert_eq!(propagate(&cg, &f.profiles, &s), Err(Error::UnknownSubstation(SubstationId(9))));
        s.target_substations = BTreeSet::from([SubstationId(1)]);
        s.entry_nodes = vec!["nope".into()];
        assert_eq!(propagate(&cg, &f.profiles, &s), Err(Error::UnknownNode("nope".into())));
    }

    #[test]
    fn capability_monotone() {
        let f = chain();
        let c = game(&f);
        let cg = ColoredGraph::new(&f.m, &f.g, &c, &f.map).unwrap();
        let mut prev = BTreeSet::new();
        for k in 0..=10 {
            let r = propagate(&cg, &f.profiles, &AttackScenario::capability(k, [SubstationId(2)])).unwrap();
            assert!(prev.is_subset(&r.compromised_sms));
            let sum: f64 = f
                .profiles
                .iter()
                .filter(|p| r.compromised_substations.contains(&p.substation_id))
                .map(|p| p.p_lol_mw)
                .sum();
            assert_eq!(r.total_p_lol_mw, sum);
            prev = r.compromised_sms;
        }
    }

    #[test]
    fn budget_saturation() {
        let f = chain();
        let c = game(&f);
        let cg = ColoredGraph::new(&f.m, &f.g, &c, &f.map).unwrap();
        let b = c.colors_used().len() as u32;
        let r = propagate(&cg, &f.profiles, &AttackScenario::budget(b, [SubstationId(2)])).unwrap();
        assert_eq!(r.compromised_sms.len(), f.g.len());
        assert_eq!(r.exploited_colors.unwrap().len(), b as usize);
    }

    #[test]
    fn budget_one_spreads_shared_color() {
        let f = chain();
        let c = uniform(&f, 2);
        let cg = ColoredGraph::new(&f.m, &f.g, &c, &f.map).unwrap();
        let r = propagate(&cg, &f.profiles, &AttackScenario::budget(1, [SubstationId(2)])).unwrap();
        assert_eq!(r.compromised_sms.len(), f.g.len());
    }

    #[test]
    fn path_enumeration_and_min_exploits() {
        let f = chain();
        let mono = uniform(&f, 0);
        let cg = ColoredGraph::new(&f.m, &f.g, &mono, &f.map).unwrap();
        let paths = enumerate_attack_paths(&cg, "3S_fw1", SubstationId(1), None).unwrap();
        assert!(!paths.is_empty());
        assert!(paths.iter().all(|p| p.distinct_colors == 1 && p.feasible_at(1)));
        assert!(paths.iter().all(|p| p.path.last().unwrap().starts_with("1S_")));
        assert_eq!(min_exploits_to_compromise(&cg, "3S_fw1", SubstationId(1)).unwrap(), Some(1));

        let diverse = game(&f);
        let cg = ColoredGraph::new(&f.m, &f.g, &diverse, &f.map).unwrap();
        let after = min_exploits_to_compromise(&cg, "3S_fw1", SubstationId(1)).unwrap().unwrap();
        assert!(after > 1);
        let paths = enumerate_attack_paths(&cg, "3S_fw1", SubstationId(1), None).unwrap();
        assert!(paths.iter().all(|p| after <= p.distinct_colors && p.distinct_colors <= p.path.len()));
        assert!(paths.iter().any(|p| p.distinct_colors == after));
    }

    #[test]
    fn disconnected_target_has_no_paths() {
        let profiles = vec![profile(1, ImpactClass::Low, 1.0), profile(2, ImpactClass::Low, 1.0)];
        let t = TemplateConfig { control_center: None, attacker: None, ..Default::default() };
        let m = build_security_graph(&profiles, &SubstationAdjacency::default(), &t).unwrap();
        let g = extract_diversity_graph(&m);
        let map = vertex_map(&m, &g).unwrap();
        let c = Coloring::monochrome(Palette::default(), g.len());
        let cg = ColoredGraph::new(&m, &g, &c, &map).unwrap();
        assert!(enumerate_attack_paths(&cg, "1S_fw1", SubstationId(2), None).unwrap().is_empty());
        assert_eq!(min_exploits_to_compromise(&cg, "1S_fw1", SubstationId(2)).unwrap(), None);
    }

    #[test]
    fn report_monochrome() {
        let f = chain();
        let c = Coloring::monochrome(Palette::default(), f.g.len());
        let psi = VulnerabilityTable::build(&f.g, &f.profiles, &SmTypeTable::default()).unwrap();
        let r = diversity_report(&f.g, &c, &psi, 10);
        assert_eq!(r.colors_used, 1);
        assert_eq!(r.entry_compromise_fraction[&1], 1.0);
        assert!((r.sigma - crate::coloring::cumulative_index(&c, &psi, &f.g)).abs() < 1e-9);
        assert_eq!(r.top.len(), 10);
    }

    #[test]
    fn scenario_json() {
        let s = AttackScenario::from_json(r#"{"mode":"capability","k":8,"entry_nodes":[],"target_substations":[2]}"#).unwrap();
        assert_eq!(s, AttackScenario::capability(8, [SubstationId(2)]));
        assert!(AttackScenario::from_json(r#"{"mode":"budget","k":2,"target_substations":[]}"#).is_err());
        assert!(AttackScenario::from_json(r#"{"mode":"both","k":2,"target_substations":[1]}"#).is_err());
    }
}
