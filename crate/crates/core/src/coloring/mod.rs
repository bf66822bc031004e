//! Color (software package) allocation over the diversity graph.
//!
//! A color is a software package with an integer security strength. Four
//! allocators are provided: a Luby-style randomized coloring, first-fit greedy
//! in degree order, a seeded sequential coloring by substation, and a
//! best-response coloring game whose payoff rewards strength contrast between
//! neighbors weighted by their vulnerability.

mod baselines;
mod game;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::impact::SubstationProfile;
use crate::security_graph::{DiversityGraph, SecurityMechanism, SmTypeTable};

pub use baselines::{color_greedy, color_randomized, color_sequential, RandomizedOptions};
pub use game::{
    color_game, order_by_degree, order_players, verify_nash, GameOptions, GameOutcome, GameStatus,
    NashCertificate, Violation, ViolationKind,
};

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PaletteColor {
    pub name: String,
    pub strength: u32,
}

/// Colors ordered by descending strength; index 0 is the strongest.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(transparent)]
pub struct Palette {
    colors: Vec<PaletteColor>,
}

impl<'de> Deserialize<'de> for Palette {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let colors = Vec::<PaletteColor>::deserialize(d)?;
        Palette::new(colors).map_err(serde::de::Error::custom)
    }
}

impl Palette {
    pub fn new(mut colors: Vec<PaletteColor>) -> Result<Self> {
        if colors.is_empty() {
            return Err(Error::Palette("empty palette".into()));
        }
        let mut strengths = BTreeSet::new();
        let mut names = BTreeSet::new();
        for c in &colors {
            if c.strength == 0 {
                return Err(Error::Palette(format!("{}: strength must be positive", c.name)));
            }
            if !strengths.insert(c.strength) {
                return Err(Error::Palette(format!("duplicate strength {}", c.strength)));
            }
            if !names.insert(c.name.as_str()) {
                return Err(Error::Palette(format!("duplicate color name {:?}", c.name)));
            }
        }
        colors.sort_by_key(|c| std::cmp::Reverse(c.strength));
        Ok(Self { colors })
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let colors: Vec<PaletteColor> = serde_json::from_str(text).map_err(|e| Error::Palette(e.to_string()))?;
        Self::new(colors)
    }

    /// `n` colors named `Color{s}` with strengths n..=1.
    pub fn standard(n: usize) -> Self {
        assert!(n > 0, "palette needs at least one color");
        let colors = (1..=n as u32)
            .rev()
            .map(|s| PaletteColor { name: format!("Color{s}"), strength: s })
            .collect();
        Self { colors }
    }

    pub fn len(&self) -> usize {
        self.colors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.colors.is_empty()
    }

    pub fn color(&self, i: usize) -> &PaletteColor {
        &self.colors[i]
    }

    pub fn strength(&self, i: usize) -> u32 {
        self.colors[i].strength
    }

    pub fn colors(&self) -> &[PaletteColor] {
        &self.colors
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.colors.iter().position(|c| c.name == name)
    }

    /// The `k` strongest colors.
    pub fn truncated(&self, k: usize) -> Self {
        Self { colors: self.colors[..k.clamp(1, self.len())].to_vec() }
    }

    /// Add colors until there are at least `n`. New colors take the unused
    /// strengths 10..=1 from the top, then 11, 12, ...
    pub fn extended_to(&self, n: usize) -> Self {
        let mut colors = self.colors.clone();
        let used: BTreeSet<u32> = colors.iter().map(|c| c.strength).collect();
        let fresh = (1..=10).rev().chain(11..).filter(|s| !used.contains(s));
        for s in fresh.take(n.saturating_sub(colors.len())) {
            colors.push(PaletteColor { name: format!("Color{s}"), strength: s });
        }
        colors.sort_by_key(|c| std::cmp::Reverse(c.strength));
        Self { colors }
    }
}

impl Default for Palette {
    fn default() -> Self {
        Self::from_json(include_str!("../../data/default_palette.json")).expect("bundled palette is valid")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Algorithm {
    Game,
    Greedy,
    Sequential,
    #[serde(rename = "random")]
    Randomized,
}

impl Algorithm {
    pub const ALL: [Algorithm; 4] = [Algorithm::Game, Algorithm::Greedy, Algorithm::Sequential, Algorithm::Randomized];

    pub fn is_stochastic(self) -> bool {
        matches!(self, Algorithm::Sequential | Algorithm::Randomized)
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Algorithm::Game => "game",
            Algorithm::Greedy => "greedy",
            Algorithm::Sequential => "sequential",
            Algorithm::Randomized => "random",
        })
    }
}

impl std::str::FromStr for Algorithm {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s.trim().to_ascii_lowercase().as_str() {
            "game" => Ok(Algorithm::Game),
            "greedy" => Ok(Algorithm::Greedy),
            "sequential" => Ok(Algorithm::Sequential),
            "random" | "randomized" => Ok(Algorithm::Randomized),
            other => Err(format!("unknown algorithm {other:?}")),
        }
    }
}

/// A total assignment of palette indices to diversity-graph vertices.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Coloring {
    palette: Palette,
    assignment: Vec<usize>,
    pub algorithm: Algorithm,
    pub rounds_used: usize,
    pub seed: u64,
}

impl Coloring {
    pub fn new(palette: Palette, assignment: Vec<usize>, algorithm: Algorithm, rounds_used: usize, seed: u64) -> Result<Self> {
        if let Some(&bad) = assignment.iter().find(|&&c| c >= palette.len()) {
            return Err(Error::Palette(format!("color index {bad} outside a palette of {}", palette.len())));
        }
        Ok(Self { palette, assignment, algorithm, rounds_used, seed })
    }

    /// Every vertex gets color 0.
    pub fn monochrome(palette: Palette, n: usize) -> Self {
        Self { palette, assignment: vec![0; n], algorithm: Algorithm::Greedy, rounds_used: 0, seed: 0 }
    }

    pub fn palette(&self) -> &Palette {
        &self.palette
    }

    pub fn assignment(&self) -> &[usize] {
        &self.assignment
    }

    pub fn len(&self) -> usize {
        self.assignment.len()
    }

    pub fn is_empty(&self) -> bool {
        self.assignment.is_empty()
    }

    pub fn color_of(&self, v: usize) -> usize {
        self.assignment[v]
    }

    pub fn strength_of(&self, v: usize) -> u32 {
        self.palette.strength(self.assignment[v])
    }

    pub fn color_name(&self, v: usize) -> &str {
        &self.palette.color(self.assignment[v]).name
    }

    /// Edges whose endpoints share a color.
    pub fn conflicts(&self, g: &DiversityGraph) -> Vec<(usize, usize)> {
        g.edges().filter(|&(a, b)| self.assignment[a] == self.assignment[b]).collect()
    }

    pub fn is_proper(&self, g: &DiversityGraph) -> bool {
        g.edges().all(|(a, b)| self.assignment[a] != self.assignment[b])
    }

    pub fn colors_used(&self) -> BTreeSet<usize> {
        self.assignment.iter().copied().collect()
    }

    pub fn color_names_used(&self) -> Vec<String> {
        self.colors_used().into_iter().map(|c| self.palette.color(c).name.clone()).collect()
    }
}

/// Likelihood of a substation being attacked through a mechanism: pi x gamma.
pub fn vulnerability(sm: &SecurityMechanism, gamma: f64, types: &SmTypeTable) -> f64 {
    types.attack_likelihood(sm.sm_type) * gamma
}

/// Per-vertex vulnerability (psi), indexed like the diversity graph.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct VulnerabilityTable(Vec<f64>);

impl VulnerabilityTable {
    pub fn build(g: &DiversityGraph, profiles: &[SubstationProfile], types: &SmTypeTable) -> Result<Self> {
        let gamma: BTreeMap<_, _> = profiles.iter().map(|p| (p.substation_id, p.gamma)).collect();
        g.nodes()
            .iter()
            .map(|sm| {
                let gm = gamma.get(&sm.substation_id).ok_or(Error::UnknownSubstation(sm.substation_id))?;
                Ok(vulnerability(sm, *gm, types))
            })
            .collect::<Result<_>>()
            .map(Self)
    }

    pub fn from_values(values: Vec<f64>) -> Result<Self> {
        if let Some(bad) = values.iter().find(|v| !(v.is_finite() && **v >= 0.0)) {
            return Err(Error::ImpactDomain(format!("vulnerability {bad} is not a finite non-negative number")));
        }
        Ok(Self(values))
    }

    pub fn get(&self, v: usize) -> f64 {
        self.0[v]
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn scaled(&self, lambda: f64) -> Self {
        Self(self.0.iter().map(|v| v * lambda).collect())
    }
}

fn weighted(strength: u32, psi: f64) -> f64 {
    f64::from(strength) * psi
}

/// Payoff of `v` in a possibly partial assignment. Fails if a neighbor is uncolored.
pub fn payoff_partial(
    v: usize,
    assignment: &[Option<usize>],
    palette: &Palette,
    psi: &VulnerabilityTable,
    g: &DiversityGraph,
) -> Result<f64> {
    let cv = assignment[v].ok_or(Error::UncoloredNeighbor { vertex: v, neighbor: v })?;
    let own = weighted(palette.strength(cv), psi.get(v));
    let mut total = 0.0;
    for &w in g.neighbors(v) {
        let cw = assignment[w].ok_or(Error::UncoloredNeighbor { vertex: v, neighbor: w })?;
        total += (own - weighted(palette.strength(cw), psi.get(w))).abs();
    }
    Ok(total)
}

/// Sum over neighbors of |s(c(v)) psi(v) - s(c(w)) psi(w)|.
pub fn payoff(v: usize, c: &Coloring, psi: &VulnerabilityTable, g: &DiversityGraph) -> f64 {
    let own = weighted(c.strength_of(v), psi.get(v));
    g.neighbors(v)
        .iter()
        .map(|&w| (own - weighted(c.strength_of(w), psi.get(w))).abs())
        .sum()
}

pub fn payoffs(c: &Coloring, psi: &VulnerabilityTable, g: &DiversityGraph) -> Vec<f64> {
    (0..g.len()).map(|v| payoff(v, c, psi, g)).collect()
}

/// Cumulative security index: the sum of all payoffs.
pub fn cumulative_index(c: &Coloring, psi: &VulnerabilityTable, g: &DiversityGraph) -> f64 {
    payoffs(c, psi, g).iter().sum()
}

/// Rescale to [0, 10]. A constant input maps to all zeros.
pub fn normalize(values: &[f64]) -> Vec<f64> {
    let min = values.iter().copied().fold(f64::INFINITY, f64::min);
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let range = max - min;
    values
        .iter()
        .map(|v| if range > 0.0 { (v - min) / range * 10.0 } else { 0.0 })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VertexReport {
    pub color: String,
    pub strength: u32,
    pub payoff: f64,
    pub normalized_payoff: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ColoringReport {
    pub algorithm: Algorithm,
    pub seed: u64,
    pub rounds: usize,
    pub sigma: f64,
    pub colors_used: usize,
    pub proper: bool,
    pub vertices: BTreeMap<String, VertexReport>,
}

impl ColoringReport {
    pub fn new(c: &Coloring, psi: &VulnerabilityTable, g: &DiversityGraph) -> Self {
        let u = payoffs(c, psi, g);
        let norm = normalize(&u);
        let vertices = (0..g.len())
            .map(|v| {
                (
                    g.node(v).id.clone(),
                    VertexReport {
                        color: c.color_name(v).to_string(),
                        strength: c.strength_of(v),
                        payoff: u[v],
                        normalized_payoff: norm[v],
                    },
                )
            })
            .collect();
        Self {
            algorithm: c.algorithm,
            seed: c.seed,
            rounds: c.rounds_used,
            sigma: u.iter().sum(),
            colors_used: c.colors_used().len(),
            proper: c.is_proper(g),
            vertices,
        }
    }
}

/// DOT rendering of the diversity graph, filled by color when given.
pub fn diversity_dot(g: &DiversityGraph, c: Option<&Coloring>) -> String {
    let mut out = String::from("graph diversity {\n  node [style=filled];\n");
    for (v, n) in g.nodes().iter().enumerate() {
        let _ = write!(
            out,
            "  \"{}\" [sm_type=\"{}\", substation=\"{}\", entry_point={}",
            n.id, n.sm_type, n.substation_id, n.is_entry_point
        );
        if let Some(c) = c {
            let _ = write!(out, ", fillcolor=\"{}\", strength={}", dot_color(c.color_name(v)), c.strength_of(v));
        }
        out.push_str("];\n");
    }
    for (a, b) in g.edges() {
        let _ = writeln!(out, "  \"{}\" -- \"{}\";", g.node(a).id, g.node(b).id);
    }
    out.push_str("}\n");
    out
}

// Graphviz knows the common names; synthetic ColorN entries fall back to gray.
fn dot_color(name: &str) -> String {
    if name.starts_with("Color") {
        "gray".into()
    } else {
        name.to_ascii_lowercase()
    }
}
