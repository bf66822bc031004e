//! Everything derived from the inputs before any coloring runs.

use gridiv::attack::{vertex_map, AttackScenario};
use gridiv::coloring::{order_players, Palette, VulnerabilityTable};
use gridiv::grid_model::{
    load_substation_map, parse_cdf, substation_adjacency, BusSystem, SubstationAdjacency, SubstationId, SubstationMap,
};
use gridiv::impact::{classify, load_impact_data, ImpactConfig, ImpactFormat, SubstationProfile};
use gridiv::security_graph::{
    build_security_graph, extract_diversity_graph, DiversityGraph, SecurityGraph, SmTypeTable, TemplateConfig,
};

use crate::config::{Inputs, Source};
use crate::error::{CliError, CliResult};

/// Classified impact profiles.
#[derive(Debug, Clone)]
pub struct ImpactTable {
    pub format: ImpactFormat,
    pub profiles: Vec<SubstationProfile>,
    pub threshold: f64,
    pub p_total_mw: Option<f64>,
}

impl ImpactTable {
    pub fn his(&self) -> Vec<SubstationId> {
        self.profiles
            .iter()
            .filter(|p| p.impact_class == gridiv::impact::ImpactClass::High)
            .map(|p| p.substation_id)
            .collect()
    }
}

fn parse_scenario(src: &Option<Source>) -> CliResult<Option<AttackScenario>> {
    src.as_ref()
        .map(|s| AttackScenario::from_json(&s.text).map_err(|e| CliError::Input(format!("{}: {e}", s.path.display()))))
        .transpose()
}

/// P_total precedence: flag, scenario file, then the CDF's bus load sum.
pub fn load_impact(inputs: &Inputs, threshold: f64, p_total_flag: Option<f64>) -> CliResult<ImpactTable> {
    let src = Inputs::require(&inputs.impact, "impact")?;
    let scenario = parse_scenario(&inputs.scenario)?;
    let mut p_total = p_total_flag.or(scenario.as_ref().and_then(|s| s.p_total_mw));
    if p_total.is_none() {
        if let Some(cdf) = &inputs.cdf {
            p_total = Some(parse_cdf(&cdf.text)?.bus_load_sum());
        }
    }
    let (format, profiles) =
        load_impact_data(&src.text, p_total).map_err(|e| CliError::Input(format!("{}: {e}", src.path.display())))?;
    let cfg = ImpactConfig::new(threshold, p_total.unwrap_or(1.0))?;
    Ok(ImpactTable { format, profiles: classify(&profiles, &cfg), threshold, p_total_mw: p_total })
}

/// The full pipeline state shared by the coloring and attack commands.
#[derive(Debug, Clone)]
pub struct Model {
    pub system: BusSystem,
    pub map: SubstationMap,
    pub adjacency: SubstationAdjacency,
    pub impact: ImpactTable,
    pub types: SmTypeTable,
    pub m: SecurityGraph,
    pub g: DiversityGraph,
    pub vertex_of: Vec<Option<usize>>,
    pub psi: VulnerabilityTable,
    pub order: Vec<usize>,
    pub palette: Palette,
    pub scenario: Option<AttackScenario>,
}

impl Model {
    pub fn build(inputs: &Inputs, threshold: f64, p_total: Option<f64>) -> CliResult<Self> {
        let cdf = Inputs::require(&inputs.cdf, "cdf")?;
        let system = parse_cdf(&cdf.text).map_err(|e| CliError::Input(format!("{}: {e}", cdf.path.display())))?;
        let sm = Inputs::require(&inputs.submap, "submap")?;
        let map = load_substation_map(&sm.text).map_err(|e| CliError::Input(format!("{}: {e}", sm.path.display())))?;
        for bus in map.entries().values().flatten() {
            if system.bus(*bus).is_none() {
                return Err(CliError::Input(format!("substation map names bus {bus}, which is not in the bus system")));
            }
        }
        let adjacency = substation_adjacency(&system, &map);
        let impact = load_impact(inputs, threshold, p_total)?;
        for s in map.substations() {
            if !impact.profiles.iter().any(|p| p.substation_id == s) {
                return Err(CliError::Input(format!("impact data has no row for substation {s}")));
            }
        }
        let template = match &inputs.template {
            Some(t) => TemplateConfig::from_json(&t.text).map_err(|e| CliError::Input(format!("{}: {e}", t.path.display())))?,
            None => TemplateConfig::default(),
        };
        let palette = match &inputs.palette {
            Some(p) => Palette::from_json(&p.text).map_err(|e| CliError::Input(format!("{}: {e}", p.path.display())))?,
            None => Palette::default(),
        };
        let scenario = parse_scenario(&inputs.scenario)?;
        let types = match scenario.as_ref().and_then(|s| s.attack_likelihood.as_ref()) {
            Some(pi) => SmTypeTable::default().with_likelihoods(pi)?,
            None => SmTypeTable::default(),
        };
        Self::assemble(system, map, adjacency, impact, &template, types, palette, scenario)
    }

    #[allow(clippy::too_many_arguments)]
    pub fn assemble(
        system: BusSystem,
        map: SubstationMap,
        adjacency: SubstationAdjacency,
        impact: ImpactTable,
        template: &TemplateConfig,
        types: SmTypeTable,
        palette: Palette,
        scenario: Option<AttackScenario>,
    ) -> CliResult<Self> {
        let mapped: Vec<_> = impact
            .profiles
            .iter()
            .filter(|p| map.buses(p.substation_id).is_some())
            .cloned()
            .collect();
        let m = build_security_graph(&mapped, &adjacency, template)?;
        let g = extract_diversity_graph(&m);
        let vertex_of = vertex_map(&m, &g)?;
        let psi = VulnerabilityTable::build(&g, &impact.profiles, &types)?;
        let order = order_players(&g, &impact.profiles, &types)?;
        tracing::info!(sms = g.len(), edges = g.edge_count(), delta = g.max_degree(), delta2 = g.delta2(), "diversity graph");
        Ok(Self { system, map, adjacency, impact, types, m, g, vertex_of, psi, order, palette, scenario })
    }

    pub fn substation_order(&self) -> Vec<SubstationId> {
        self.map.substations().collect()
    }
}
