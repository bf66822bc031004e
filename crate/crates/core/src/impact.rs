//! Substation impact factors and loss-of-load accounting.
//!
//! The impact factor of a substation is `(P_lol / P_total)^(L* - 1)`, where
//! `P_lol` is the load lost when the substation is switched off and `L*` the
//! loading level at which power flow diverges. Both are scenario inputs here.

// Negated comparisons below also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid_model::SubstationId;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum ImpactClass {
    #[serde(rename = "HIS")]
    High,
    #[serde(rename = "LIS")]
    Low,
}

impl fmt::Display for ImpactClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ImpactClass::High => "HIS",
            ImpactClass::Low => "LIS",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubstationProfile {
    pub substation_id: SubstationId,
    pub p_lol_mw: f64,
    /// `None` when the impact data supplied gamma directly.
    pub l_star: Option<f64>,
    pub gamma: f64,
    pub impact_class: ImpactClass,
}

impl SubstationProfile {
    /// Substations with gamma = 1 sit at the highest level of criticality.
    pub fn is_highest_criticality(&self) -> bool {
        self.gamma == 1.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ImpactConfig {
    threshold: f64,
    p_total_mw: f64,
}

impl ImpactConfig {
    pub fn new(threshold: f64, p_total_mw: f64) -> Result<Self> {
        if !(threshold > 0.0 && threshold < 1.0) {
            return Err(Error::ImpactDomain(format!("threshold {threshold} must lie strictly in (0, 1)")));
        }
        if !(p_total_mw > 0.0) || !p_total_mw.is_finite() {
            return Err(Error::ImpactDomain(format!("total load {p_total_mw} MW must be positive")));
        }
        Ok(Self { threshold, p_total_mw })
    }

    pub fn threshold(&self) -> f64 {
        self.threshold
    }

    pub fn p_total_mw(&self) -> f64 {
        self.p_total_mw
    }
}

/// `(p_lol / p_total)^(l_star - 1)`; exactly 1 when `l_star == 1`.
pub fn impact_factor(p_lol_mw: f64, p_total_mw: f64, l_star: f64) -> Result<f64> {
    if !(p_total_mw > 0.0) {
        return Err(Error::ImpactDomain(format!("total load {p_total_mw} MW must be positive")));
    }
    if !(p_lol_mw >= 0.0) || p_lol_mw > p_total_mw {
        return Err(Error::ImpactDomain(format!(
            "loss of load {p_lol_mw} MW outside [0, {p_total_mw}]"
        )));
    }
    if !(l_star >= 1.0) {
        return Err(Error::ImpactDomain(format!("loading level {l_star} is below 1")));
    }
    if l_star == 1.0 {
        return Ok(1.0);
    }
    Ok((p_lol_mw / p_total_mw).powf(l_star - 1.0))
}

/// Mark each profile HIS when `gamma > threshold`, LIS otherwise.
pub fn classify(profiles: &[SubstationProfile], cfg: &ImpactConfig) -> Vec<SubstationProfile> {
    profiles
        .iter()
        .map(|p| SubstationProfile {
            impact_class: if p.gamma > cfg.threshold { ImpactClass::High } else { ImpactClass::Low },
            ..p.clone()
        })
        .collect()
}

/// Sum of `p_lol_mw` over the compromised substations, in ascending id order.
pub fn total_loss_of_load(
    compromised: &BTreeSet<SubstationId>,
    profiles: &[SubstationProfile],
) -> Result<f64> {
    let by_id: BTreeMap<SubstationId, f64> =
        profiles.iter().map(|p| (p.substation_id, p.p_lol_mw)).collect();
    compromised.iter().try_fold(0.0, |acc, id| {
        by_id.get(id).map(|v| acc + v).ok_or(Error::UnknownSubstation(*id))
    })
}

/// Column layout of an impact data file, chosen by its header.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ImpactFormat {
    /// `substation_id,p_lol_mw,l_star`; gamma is computed.
    LoadingLevel,
    /// `substation_id,gamma,p_lol_mw`; gamma is taken as given.
    GivenGamma,
}

/// Read impact data CSV. `p_total_mw` is required for the loading-level layout.
///
/// Profiles come back unclassified (all LIS); run [`classify`] afterwards.
pub fn load_impact_data(text: &str, p_total_mw: Option<f64>) -> Result<(ImpactFormat, Vec<SubstationProfile>)> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(text.as_bytes());
    let headers = rdr.headers().map_err(|e| Error::ImpactData(e.to_string()))?.clone();
    let col = |name: &str| headers.iter().position(|h| h == name);
    let id_col = col("substation_id").ok_or_else(|| Error::ImpactData("missing substation_id column".into()))?;
    let lol_col = col("p_lol_mw").ok_or_else(|| Error::ImpactData("missing p_lol_mw column".into()))?;
    let (format, value_col) = match (col("l_star"), col("gamma")) {
        (Some(c), _) => (ImpactFormat::LoadingLevel, c),
        (None, Some(c)) => (ImpactFormat::GivenGamma, c),
        (None, None) => return Err(Error::ImpactData("need an l_star or gamma column".into())),
    };
    let p_total = match format {
        ImpactFormat::LoadingLevel => Some(p_total_mw.ok_or_else(|| {
            Error::ImpactData("loading-level impact data needs a total system load".into())
        })?),
        ImpactFormat::GivenGamma => None,
    };

    let mut profiles = Vec::new();
    let mut seen = BTreeSet::new();
    for (i, rec) in rdr.records().enumerate() {
        let row = i + 2;
        let rec = rec.map_err(|e| Error::ImpactData(format!("row {row}: {e}")))?;
        let num = |c: usize, what: &str| -> Result<f64> {
            rec.get(c)
                .and_then(|s| s.parse::<f64>().ok())
                .ok_or_else(|| Error::ImpactData(format!("row {row}: bad {what}")))
        };
        let id = rec
            .get(id_col)
            .and_then(|s| s.parse::<u32>().ok())
            .map(SubstationId)
            .ok_or_else(|| Error::ImpactData(format!("row {row}: bad substation_id")))?;
        if !seen.insert(id) {
            return Err(Error::ImpactData(format!("row {row}: duplicate substation {id}")));
        }
        let p_lol_mw = num(lol_col, "p_lol_mw")?;
        let value = num(value_col, "value")?;
        let (l_star, gamma) = match p_total {
            Some(total) => (Some(value), impact_factor(p_lol_mw, total, value)?),
            None => {
                if !(0.0..=1.0).contains(&value) {
                    return Err(Error::ImpactData(format!("row {row}: gamma {value} outside [0, 1]")));
                }
                (None, value)
            }
        };
        profiles.push(SubstationProfile {
            substation_id: id,
            p_lol_mw,
            l_star,
            gamma,
            impact_class: ImpactClass::Low,
        });
    }
    if profiles.is_empty() {
        return Err(Error::ImpactData("no substations".into()));
    }
    profiles.sort_by_key(|p| p.substation_id);
    Ok((format, profiles))
}
