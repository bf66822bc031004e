//! Security graph construction and diversity-graph extraction.
//!
//! The security graph holds every cyber asset: security mechanisms (SMs),
//! substation equipment (RTUs, relays), the control-center hub and the
//! attacker node. Substations are instantiated from per-class templates and
//! linked to adjacent substations through the template's link mechanism.
//!
//! The diversity graph keeps only the SMs. Two SMs are neighbors when a path
//! joins them whose interior is substation equipment only. The control center
//! and attacker are not pass-through: contracting the hub would join every
//! SCADA firewall to every other one.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};
use std::fmt;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid_model::{SubstationAdjacency, SubstationId};
use crate::impact::{ImpactClass, SubstationProfile};

const DEFAULT_TEMPLATE: &str = include_str!("../data/default_template.json");

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum SmType {
    ScadaFirewall,
    Vpn,
    SystemFirewall,
    SystemAuthentication,
}

impl SmType {
    pub const ALL: [SmType; 4] =
        [SmType::ScadaFirewall, SmType::Vpn, SmType::SystemFirewall, SmType::SystemAuthentication];
}

impl fmt::Display for SmType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SmType::ScadaFirewall => "ScadaFirewall",
            SmType::Vpn => "Vpn",
            SmType::SystemFirewall => "SystemFirewall",
            SmType::SystemAuthentication => "SystemAuthentication",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SmTypeInfo {
    /// 1 is the most critical type.
    pub priority_rank: u32,
    /// Likelihood that a substation is attacked through this type (pi).
    pub attack_likelihood: f64,
}

/// Priority and attack likelihood per SM type.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SmTypeTable(BTreeMap<SmType, SmTypeInfo>);

impl Default for SmTypeTable {
    fn default() -> Self {
        let rows = [
            (SmType::ScadaFirewall, 1, 0.1),
            (SmType::Vpn, 2, 0.2),
            (SmType::SystemFirewall, 3, 0.5),
            (SmType::SystemAuthentication, 4, 0.8),
        ];
        Self(
            rows.into_iter()
                .map(|(t, priority_rank, attack_likelihood)| (t, SmTypeInfo { priority_rank, attack_likelihood }))
                .collect(),
        )
    }
}

impl SmTypeTable {
    pub fn new(rows: BTreeMap<SmType, SmTypeInfo>) -> Result<Self> {
        let mut ranks = BTreeSet::new();
        for t in SmType::ALL {
            let info = rows.get(&t).ok_or_else(|| Error::Template(format!("no entry for SM type {t}")))?;
            if !(info.attack_likelihood > 0.0 && info.attack_likelihood <= 1.0) {
                return Err(Error::Template(format!(
                    "attack likelihood {} of {t} outside (0, 1]",
                    info.attack_likelihood
                )));
            }
            if info.priority_rank == 0 || !ranks.insert(info.priority_rank) {
                return Err(Error::Template(format!("priority rank {} of {t} is not distinct and positive", info.priority_rank)));
            }
        }
        Ok(Self(rows))
    }

    /// Replace attack likelihoods, keeping the rest.
    pub fn with_likelihoods(&self, overrides: &BTreeMap<SmType, f64>) -> Result<Self> {
        let mut rows = self.0.clone();
        for (t, &pi) in overrides {
            if let Some(info) = rows.get_mut(t) {
                info.attack_likelihood = pi;
            }
        }
        Self::new(rows)
    }

    pub fn info(&self, t: SmType) -> SmTypeInfo {
        self.0[&t]
    }

    pub fn attack_likelihood(&self, t: SmType) -> f64 {
        self.0[&t].attack_likelihood
    }

    pub fn priority_rank(&self, t: SmType) -> u32 {
        self.0[&t].priority_rank
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MechanismSpec {
    pub role: String,
    pub sm_type: SmType,
    #[serde(default)]
    pub entry_point: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassTemplate {
    pub mechanisms: Vec<MechanismSpec>,
    #[serde(default)]
    pub equipment: Vec<String>,
    #[serde(default)]
    pub edges: Vec<[String; 2]>,
    /// Mechanism wired to the control-center hub.
    pub scada_role: Option<String>,
    /// Mechanism that terminates links to adjacent substations.
    pub link_role: Option<String>,
}

impl ClassTemplate {
    fn validate(&self, class: ImpactClass) -> Result<()> {
        let mut names = BTreeSet::new();
        for name in self.mechanisms.iter().map(|m| &m.role).chain(&self.equipment) {
            if !names.insert(name.as_str()) {
                return Err(Error::Template(format!("{class}: duplicate role {name:?}")));
            }
        }
        for [a, b] in &self.edges {
            for end in [a, b] {
                if !names.contains(end.as_str()) {
                    return Err(Error::Template(format!("{class}: edge references unknown role {end:?}")));
                }
            }
            if a == b {
                return Err(Error::Template(format!("{class}: self-loop on {a:?}")));
            }
        }
        for role in [&self.scada_role, &self.link_role].into_iter().flatten() {
            if !self.mechanisms.iter().any(|m| &m.role == role) {
                return Err(Error::Template(format!("{class}: {role:?} is not a mechanism role")));
            }
        }
        Ok(())
    }
}

/// Per-class substation architecture, loaded from JSON.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TemplateConfig {
    pub classes: BTreeMap<ImpactClass, ClassTemplate>,
    #[serde(default)]
    pub control_center: Option<String>,
    #[serde(default)]
    pub attacker: Option<String>,
}

impl Default for TemplateConfig {
    fn default() -> Self {
        Self::from_json(DEFAULT_TEMPLATE).expect("bundled template is valid")
    }
}

impl TemplateConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: Self = serde_json::from_str(text).map_err(|e| Error::Template(e.to_string()))?;
        for (class, t) in &cfg.classes {
            t.validate(*class)?;
        }
        if cfg.attacker.is_some() && cfg.control_center.is_none() {
            return Err(Error::Template("an attacker node needs a control center to attach to".into()));
        }
        Ok(cfg)
    }

    pub fn class(&self, class: ImpactClass) -> Result<&ClassTemplate> {
        self.classes
            .get(&class)
            .ok_or_else(|| Error::Template(format!("template missing a class definition for {class}")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum NodeKind {
    Mechanism(SmType),
    /// RTUs, relays and other substation devices; they implement no SM.
    Equipment,
    ControlCenter,
    Attacker,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SecurityNode {
    pub id: String,
    pub kind: NodeKind,
    pub substation: Option<SubstationId>,
    pub entry_point: bool,
}

impl SecurityNode {
    pub fn sm_type(&self) -> Option<SmType> {
        match self.kind {
            NodeKind::Mechanism(t) => Some(t),
            _ => None,
        }
    }
}

/// Undirected simple graph over all cyber assets.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct SecurityGraph {
    nodes: Vec<SecurityNode>,
    adj: Vec<BTreeSet<usize>>,
    index: HashMap<String, usize>,
}

impl SecurityGraph {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_node(&mut self, node: SecurityNode) -> Result<usize> {
        if self.index.contains_key(&node.id) {
            return Err(Error::Template(format!("duplicate node id {:?}", node.id)));
        }
        let i = self.nodes.len();
        self.index.insert(node.id.clone(), i);
        self.nodes.push(node);
        self.adj.push(BTreeSet::new());
        Ok(i)
    }

    /// Self-loops are rejected; repeated edges collapse.
    pub fn add_edge(&mut self, a: usize, b: usize) -> Result<()> {
        if a == b {
            return Err(Error::Template(format!("self-loop on {:?}", self.nodes[a].id)));
        }
        self.adj[a].insert(b);
        self.adj[b].insert(a);
        Ok(())
    }

    pub fn nodes(&self) -> &[SecurityNode] {
        &self.nodes
    }

    pub fn node(&self, i: usize) -> &SecurityNode {
        &self.nodes[i]
    }

    pub fn neighbors(&self, i: usize) -> impl Iterator<Item = usize> + '_ {
        self.adj[i].iter().copied()
    }

    pub fn index_of(&self, id: &str) -> Option<usize> {
        self.index.get(id).copied()
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(BTreeSet::len).sum::<usize>() / 2
    }

    pub fn mechanism_count(&self) -> usize {
        self.nodes.iter().filter(|n| n.sm_type().is_some()).count()
    }

    /// Mechanisms of one substation, in insertion order.
    pub fn substation_mechanisms(&self, sub: SubstationId) -> impl Iterator<Item = usize> + '_ {
        self.nodes
            .iter()
            .enumerate()
            .filter(move |(_, n)| n.substation == Some(sub) && n.sm_type().is_some())
            .map(|(i, _)| i)
    }

    pub fn to_dot(&self) -> String {
        let mut out = String::from("graph security {\n");
        for n in &self.nodes {
            let (kind, shape) = match n.kind {
                NodeKind::Mechanism(t) => (t.to_string(), "box"),
                NodeKind::Equipment => ("equipment".to_string(), "ellipse"),
                NodeKind::ControlCenter => ("control_center".to_string(), "doublecircle"),
                NodeKind::Attacker => ("attacker".to_string(), "diamond"),
            };
            let sub = n.substation.map_or(String::new(), |s| s.to_string());
            let _ = writeln!(
                out,
                "  \"{}\" [shape={shape}, sm_type=\"{kind}\", substation=\"{sub}\", entry_point={}];",
                n.id, n.entry_point
            );
        }
        for (a, set) in self.adj.iter().enumerate() {
            for &b in set.iter().filter(|&&b| a < b) {
                let _ = writeln!(out, "  \"{}\" -- \"{}\";", self.nodes[a].id, self.nodes[b].id);
            }
        }
        out.push_str("}\n");
        out
    }
}

pub fn mechanism_id(sub: SubstationId, role: &str) -> String {
    format!("{sub}S_{role}")
}

fn equipment_id(sub: SubstationId, name: &str) -> String {
    format!("{sub}_{name}")
}

/// Instantiate every substation from its class template, wire SCADA
/// mechanisms to the control-center hub and join adjacent substations through
/// their link mechanisms.
pub fn build_security_graph(
    profiles: &[SubstationProfile],
    adjacency: &SubstationAdjacency,
    template: &TemplateConfig,
) -> Result<SecurityGraph> {
    let mut m = SecurityGraph::new();
    let mut scada = Vec::new();
    let mut link: BTreeMap<SubstationId, usize> = BTreeMap::new();
    let mut sorted: Vec<&SubstationProfile> = profiles.iter().collect();
    sorted.sort_by_key(|p| p.substation_id);

    for p in &sorted {
        let sub = p.substation_id;
        let t = template.class(p.impact_class)?;
        let mut local = HashMap::new();
        for spec in &t.mechanisms {
            let i = m.add_node(SecurityNode {
                id: mechanism_id(sub, &spec.role),
                kind: NodeKind::Mechanism(spec.sm_type),
                substation: Some(sub),
                entry_point: spec.entry_point,
            })?;
            local.insert(spec.role.as_str(), i);
        }
        for name in &t.equipment {
            let i = m.add_node(SecurityNode {
                id: equipment_id(sub, name),
                kind: NodeKind::Equipment,
                substation: Some(sub),
                entry_point: false,
            })?;
            local.insert(name.as_str(), i);
        }
        for [a, b] in &t.edges {
            m.add_edge(local[a.as_str()], local[b.as_str()])?;
        }
        if let Some(role) = &t.scada_role {
            scada.push(local[role.as_str()]);
        }
        if let Some(role) = &t.link_role {
            link.insert(sub, local[role.as_str()]);
        }
    }

    for (a, b) in adjacency.pairs() {
        for s in [a, b] {
            if !sorted.iter().any(|p| p.substation_id == s) {
                return Err(Error::UnknownSubstation(s));
            }
        }
        if let (Some(&la), Some(&lb)) = (link.get(&a), link.get(&b)) {
            m.add_edge(la, lb)?;
        }
    }

    if let Some(cc_id) = &template.control_center {
        let cc = m.add_node(SecurityNode {
            id: cc_id.clone(),
            kind: NodeKind::ControlCenter,
            substation: None,
            entry_point: false,
        })?;
        for s in scada {
            m.add_edge(cc, s)?;
        }
        if let Some(atk_id) = &template.attacker {
            let atk = m.add_node(SecurityNode {
                id: atk_id.clone(),
                kind: NodeKind::Attacker,
                substation: None,
                entry_point: false,
            })?;
            m.add_edge(atk, cc)?;
        }
    }
    Ok(m)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SecurityMechanism {
    pub id: String,
    pub sm_type: SmType,
    pub substation_id: SubstationId,
    pub is_entry_point: bool,
}

/// SM-only graph the coloring algorithms run on. Vertices are dense indices.
#[derive(Debug, Clone, PartialEq)]
pub struct DiversityGraph {
    nodes: Vec<SecurityMechanism>,
    adj: Vec<Vec<usize>>,
    /// Index of each vertex in the source security graph, when extracted.
    source: Vec<Option<usize>>,
    index: HashMap<String, usize>,
}

impl DiversityGraph {
    /// Build directly from mechanisms and an edge list; loops and repeats are dropped.
    pub fn from_edges(nodes: Vec<SecurityMechanism>, edges: impl IntoIterator<Item = (usize, usize)>) -> Self {
        let n = nodes.len();
        let mut sets = vec![BTreeSet::new(); n];
        for (a, b) in edges {
            assert!(a < n && b < n, "edge ({a}, {b}) out of range for {n} vertices");
            if a != b {
                sets[a].insert(b);
                sets[b].insert(a);
            }
        }
        let index = nodes.iter().enumerate().map(|(i, m)| (m.id.clone(), i)).collect();
        Self {
            nodes,
            adj: sets.into_iter().map(|s| s.into_iter().collect()).collect(),
            source: vec![None; n],
            index,
        }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn node(&self, v: usize) -> &SecurityMechanism {
        &self.nodes[v]
    }

    pub fn nodes(&self) -> &[SecurityMechanism] {
        &self.nodes
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adj[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    pub fn max_degree(&self) -> usize {
        self.adj.iter().map(Vec::len).max().unwrap_or(0)
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.adj
            .iter()
            .enumerate()
            .flat_map(|(a, ns)| ns.iter().filter(move |&&b| a < b).map(move |&b| (a, b)))
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(Vec::len).sum::<usize>() / 2
    }

    pub fn index_of(&self, id: &str) -> Option<usize> {
        self.index.get(id).copied()
    }

    pub fn source_index(&self, v: usize) -> Option<usize> {
        self.source[v]
    }

    /// Max over vertices v of the largest degree among neighbors u with
    /// deg(u) <= deg(v); 0 for an edgeless graph.
    pub fn delta2(&self) -> usize {
        (0..self.len())
            .flat_map(|v| {
                let dv = self.degree(v);
                self.adj[v].iter().map(move |&u| self.degree(u)).filter(move |&du| du <= dv)
            })
            .max()
            .unwrap_or(0)
    }
}

/// Contract the security graph onto its mechanisms.
pub fn extract_diversity_graph(m: &SecurityGraph) -> DiversityGraph {
    let mut vertex_of = vec![None; m.len()];
    let mut nodes = Vec::new();
    let mut source = Vec::new();
    for (i, n) in m.nodes().iter().enumerate() {
        if let NodeKind::Mechanism(t) = n.kind {
            vertex_of[i] = Some(nodes.len());
            source.push(Some(i));
            nodes.push(SecurityMechanism {
                id: n.id.clone(),
                sm_type: t,
                substation_id: n.substation.expect("mechanisms belong to a substation"),
                is_entry_point: n.entry_point,
            });
        }
    }

    let mut edges = Vec::new();
    for (start, v) in vertex_of.iter().enumerate() {
        let Some(v) = *v else { continue };
        let mut seen = BTreeSet::from([start]);
        let mut queue = VecDeque::from([start]);
        while let Some(x) = queue.pop_front() {
            for y in m.neighbors(x) {
                if !seen.insert(y) {
                    continue;
                }
                match m.node(y).kind {
                    NodeKind::Mechanism(_) => edges.push((v, vertex_of[y].expect("mechanism vertex"))),
                    NodeKind::Equipment => queue.push_back(y),
                    NodeKind::ControlCenter | NodeKind::Attacker => {}
                }
            }
        }
    }
    let mut g = DiversityGraph::from_edges(nodes, edges);
    g.source = source;
    g
}

#[cfg(test)]
mod tests {
    use super::*;

    fn profile(id: u32, class: ImpactClass) -> SubstationProfile {
        SubstationProfile {
            substation_id: SubstationId(id),
            p_lol_mw: 1.0,
            l_star: None,
            gamma: if class == ImpactClass::High { 1.0 } else { 0.01 },
            impact_class: class,
        }
    }

    fn sm(id: &str) -> SecurityMechanism {
        SecurityMechanism {
            id: id.into(),
            sm_type: SmType::SystemFirewall,
            substation_id: SubstationId(1),
            is_entry_point: false,
        }
    }

    pub(crate) fn two_substations() -> (SecurityGraph, DiversityGraph) {
        let profiles = [profile(1, ImpactClass::High), profile(2, ImpactClass::Low)];
        let adj = SubstationAdjacency::from_pairs([(SubstationId(1), SubstationId(2))]);
        let m = build_security_graph(&profiles, &adj, &TemplateConfig::default()).unwrap();
        let g = extract_diversity_graph(&m);
        (m, g)
    }

    fn neighbor_ids(g: &DiversityGraph, id: &str) -> BTreeSet<String> {
        let v = g.index_of(id).unwrap();
        g.neighbors(v).iter().map(|&u| g.node(u).id.clone()).collect()
    }

    #[test]
    fn two_substation_labels() {
        let (m, g) = two_substations();
        for id in ["1S_fwH", "1S_vpn1", "1S_fw11", "1S_vpn12", "2S_fwL", "2S_fw1", "2S_vpn23"] {
            assert!(m.index_of(id).is_some(), "missing {id}");
        }
        assert_eq!(g.len(), 9);
        let fw1 = neighbor_ids(&g, "2S_fw1");
        assert!(fw1.contains("2S_vpn23") && fw1.contains("1S_vpn1"), "{fw1:?}");
    }

    #[test]
    fn single_substation_has_no_links() {
        let m = build_security_graph(
            &[profile(1, ImpactClass::High)],
            &SubstationAdjacency::default(),
            &TemplateConfig::default(),
        )
        .unwrap();
        assert!(m.nodes().iter().all(|n| n.substation.is_none() || n.substation == Some(SubstationId(1))));
        let g = extract_diversity_graph(&m);
        assert_eq!(g.len(), 6);
    }

    #[test]
    fn template_count() {
        let t = TemplateConfig::default();
        let his = t.class(ImpactClass::High).unwrap().mechanisms.len();
        let lis = t.class(ImpactClass::Low).unwrap().mechanisms.len();
        let profiles: Vec<_> = (1..=10)
            .map(|i| profile(i, if [2, 3, 4].contains(&i) { ImpactClass::High } else { ImpactClass::Low }))
            .collect();
        let m = build_security_graph(&profiles, &SubstationAdjacency::default(), &t).unwrap();
        assert_eq!(m.mechanism_count(), 3 * his + 7 * lis);
    }

    #[test]
    fn missing_class_is_error() {
        let mut t = TemplateConfig::default();
        t.classes.remove(&ImpactClass::Low);
        let err = build_security_graph(&[profile(1, ImpactClass::Low)], &SubstationAdjacency::default(), &t);
        assert!(matches!(err, Err(Error::Template(_))));
    }

    #[test]
    fn bad_template_rejected() {
        let text = r#"{"classes":{"HIS":{"mechanisms":[{"role":"a","sm_type":"Vpn"}],"edges":[["a","b"]]}}}"#;
        assert!(TemplateConfig::from_json(text).is_err());
    }

    #[test]
    fn pass_through_relay() {
        let mut m = SecurityGraph::new();
        let mk = |id: &str, kind| SecurityNode { id: id.into(), kind, substation: Some(SubstationId(1)), entry_point: false };
        let a = m.add_node(mk("A", NodeKind::Mechanism(SmType::Vpn))).unwrap();
        let r = m.add_node(mk("relay", NodeKind::Equipment)).unwrap();
        let b = m.add_node(mk("B", NodeKind::Mechanism(SmType::Vpn))).unwrap();
        m.add_edge(a, r).unwrap();
        m.add_edge(r, b).unwrap();
        let g = extract_diversity_graph(&m);
        assert_eq!(g.edges().collect::<Vec<_>>(), vec![(0, 1)]);
    }

    #[test]
    fn hub_is_not_pass_through() {
        let (m, g) = two_substations();
        assert!(m.index_of("CC").is_some());
        assert!(!neighbor_ids(&g, "1S_fwH").contains("2S_fwL"));
    }

    #[test]
    fn sm_only_graph_is_fixed_point() {
        let (_, g) = two_substations();
        let mut m = SecurityGraph::new();
        for n in g.nodes() {
            m.add_node(SecurityNode {
                id: n.id.clone(),
                kind: NodeKind::Mechanism(n.sm_type),
                substation: Some(n.substation_id),
                entry_point: n.is_entry_point,
            })
            .unwrap();
        }
        for (a, b) in g.edges() {
            m.add_edge(a, b).unwrap();
        }
        let again = extract_diversity_graph(&m);
        assert_eq!(again.nodes(), g.nodes());
        assert_eq!(again.edges().collect::<Vec<_>>(), g.edges().collect::<Vec<_>>());
    }

    #[test]
    fn attributes_survive_extraction() {
        let (m, g) = two_substations();
        for v in 0..g.len() {
            let src = m.node(g.source_index(v).unwrap());
            assert_eq!(src.id, g.node(v).id);
            assert_eq!(src.substation, Some(g.node(v).substation_id));
            assert_eq!(src.sm_type(), Some(g.node(v).sm_type));
        }
    }

    #[test]
    fn delta2_examples() {
        let p3 = DiversityGraph::from_edges(vec![sm("a"), sm("b"), sm("c")], [(0, 1), (1, 2)]);
        assert_eq!(p3.delta2(), 1);
        let k4 = DiversityGraph::from_edges(
            (0..4).map(|i| sm(&i.to_string())).collect(),
            [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)],
        );
        assert_eq!(k4.delta2(), 3);
        let empty = DiversityGraph::from_edges(vec![sm("a"), sm("b")], []);
        assert_eq!(empty.delta2(), 0);
    }

    #[test]
    fn delta2_brute_force_and_bound() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..200 {
            let n = rng.gen_range(1..12);
            let edges: Vec<_> = (0..n)
                .flat_map(|a| (a + 1..n).map(move |b| (a, b)))
                .filter(|_| rng.gen_bool(0.3))
                .collect();
            let g = DiversityGraph::from_edges((0..n).map(|i| sm(&i.to_string())).collect(), edges.clone());
            let deg = |v: usize| edges.iter().filter(|&&(a, b)| a == v || b == v).count();
            let mut brute = 0;
            for &(a, b) in &edges {
                brute = brute.max(deg(a).min(deg(b)));
            }
            assert_eq!(g.delta2(), brute);
            assert!(g.delta2() <= g.max_degree());
        }
    }

    #[test]
    fn dot_has_attributes() {
        let (m, _) = two_substations();
        let dot = m.to_dot();
        assert!(dot.contains("\"1S_fwH\" [shape=box, sm_type=\"ScadaFirewall\", substation=\"1\", entry_point=true]"));
        assert!(dot.contains("\"2S_fw1\" -- \"1S_vpn1\"") || dot.contains("\"1S_vpn1\" -- \"2S_fw1\""));
    }

    #[test]
    fn likelihood_override() {
        let t = SmTypeTable::default();
        let t2 = t.with_likelihoods(&BTreeMap::from([(SmType::Vpn, 0.3)])).unwrap();
        assert_eq!(t2.attack_likelihood(SmType::Vpn), 0.3);
        assert!(t.with_likelihoods(&BTreeMap::from([(SmType::Vpn, 0.0)])).is_err());
    }
}
