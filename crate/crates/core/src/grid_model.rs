//! Bus-system ingestion.
//!
//! Reads the bus and branch sections of IEEE Common Data Format files, loads the
//! bus-to-substation grouping, and derives substation adjacency from branches.
//! Everything here is immutable once built.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct BusId(pub u32);

impl fmt::Display for BusId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SubstationId(pub u32);

impl fmt::Display for SubstationId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Bus {
    pub id: BusId,
    pub name: String,
    /// Active load (PL column), MW.
    pub load_mw: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Branch {
    pub from_bus: BusId,
    pub to_bus: BusId,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BusSystem {
    pub title: String,
    pub buses: Vec<Bus>,
    pub branches: Vec<Branch>,
    /// Defaults to the sum of bus loads; scenarios may pin a different total.
    pub total_load_mw: f64,
}

impl BusSystem {
    pub fn new(title: impl Into<String>, buses: Vec<Bus>, branches: Vec<Branch>) -> Result<Self> {
        if buses.is_empty() {
            return Err(Error::NoBuses);
        }
        let mut seen = BTreeSet::new();
        for bus in &buses {
            if !seen.insert(bus.id) {
                return Err(Error::DuplicateBus(bus.id));
            }
        }
        for (i, br) in branches.iter().enumerate() {
            for end in [br.from_bus, br.to_bus] {
                if !seen.contains(&end) {
                    return Err(Error::DanglingBranch { line: i + 1, bus: end });
                }
            }
            if br.from_bus == br.to_bus {
                return Err(Error::SelfLoop { line: i + 1, bus: br.from_bus });
            }
        }
        let total_load_mw = buses.iter().map(|b| b.load_mw).sum();
        Ok(Self { title: title.into(), buses, branches, total_load_mw })
    }

    pub fn with_total_load(mut self, total_load_mw: f64) -> Self {
        self.total_load_mw = total_load_mw;
        self
    }

    pub fn bus_load_sum(&self) -> f64 {
        self.buses.iter().map(|b| b.load_mw).sum()
    }

    pub fn bus(&self, id: BusId) -> Option<&Bus> {
        self.buses.iter().find(|b| b.id == id)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Section {
    Preamble,
    Bus,
    Branch,
    /// Any other CDF section (loss zones, interchange, tie lines); skipped.
    Other,
}

fn is_terminator(line: &str) -> bool {
    matches!(line.trim().parse::<i64>(), Ok(v) if v <= -9)
}

fn section_header(line: &str, lineno: usize) -> Result<Option<Section>> {
    let upper = line.trim().to_ascii_uppercase();
    let kind = if upper.starts_with("BUS DATA") {
        Section::Bus
    } else if upper.starts_with("BRANCH DATA") {
        Section::Branch
    } else if upper.starts_with("LOSS ZONES")
        || upper.starts_with("INTERCHANGE DATA")
        || upper.starts_with("TIE LINES")
    {
        Section::Other
    } else {
        return Ok(None);
    };
    if !upper.contains("FOLLOWS") {
        return Err(Error::Parse {
            line: lineno,
            message: format!("malformed section header {:?}", line.trim()),
        });
    }
    Ok(Some(kind))
}

fn parse_bus_id(tok: &str, lineno: usize) -> Result<BusId> {
    tok.trim().parse::<u32>().ok().filter(|&v| v > 0).map(BusId).ok_or_else(|| Error::Parse {
        line: lineno,
        message: format!("bus number {:?} is not a positive integer", tok.trim()),
    })
}

fn parse_bus_record(line: &str, lineno: usize) -> Result<Bus> {
    // Columns 1-4 bus number, 6-17 name; the numeric fields after column 18 are
    // whitespace separated: area, zone, type, voltage, angle, load MW, ...
    let chars: Vec<char> = line.chars().collect();
    if chars.len() < 18 {
        return Err(Error::Parse { line: lineno, message: "bus record too short".into() });
    }
    let field = |a: usize, b: usize| chars[a..b.min(chars.len())].iter().collect::<String>();
    let id = parse_bus_id(&field(0, 4), lineno)?;
    let name = field(5, 17).trim().to_string();
    let rest = field(18, chars.len());
    let tokens: Vec<&str> = rest.split_whitespace().collect();
    let load_tok = tokens.get(5).ok_or_else(|| Error::Parse {
        line: lineno,
        message: "bus record is missing the load MW field".into(),
    })?;
    for (i, tok) in tokens.iter().take(6).enumerate() {
        if tok.parse::<f64>().is_err() {
            return Err(Error::Parse {
                line: lineno,
                message: format!("non-numeric bus field #{} {:?}", i + 1, tok),
            });
        }
    }
    let load_mw: f64 = load_tok.parse().expect("checked above");
    Ok(Bus { id, name, load_mw })
}

fn parse_branch_record(line: &str, lineno: usize) -> Result<Branch> {
    let mut tokens = line.split_whitespace();
    let from = tokens.next().ok_or_else(|| Error::Parse {
        line: lineno,
        message: "empty branch record".into(),
    })?;
    let to = tokens.next().ok_or_else(|| Error::Parse {
        line: lineno,
        message: "branch record is missing the Z bus field".into(),
    })?;
    Ok(Branch { from_bus: parse_bus_id(from, lineno)?, to_bus: parse_bus_id(to, lineno)? })
}

/// Parse the bus and branch sections of an IEEE Common Data Format file.
///
/// Each bus record contributes its PL column as `load_mw`; each branch record
/// contributes its tap and Z bus numbers. Errors carry the 1-based line number.
pub fn parse_cdf(text: &str) -> Result<BusSystem> {
    let mut title = String::new();
    let mut section = Section::Preamble;
    let mut seen_bus = false;
    let mut seen_branch = false;
    let mut buses = Vec::new();
    let mut branches: Vec<(usize, Branch)> = Vec::new();
    let mut last_line = 0;

    for (idx, raw) in text.lines().enumerate() {
        let lineno = idx + 1;
        last_line = lineno;
        let line = raw.trim_end_matches('\r');
        if idx == 0 && section_header(line, lineno)?.is_none() {
            title = line.trim().to_string();
            continue;
        }
        if line.trim().is_empty() {
            continue;
        }
        if line.trim().eq_ignore_ascii_case("END OF DATA") {
            break;
        }
        match section {
            Section::Preamble => match section_header(line, lineno)? {
                Some(s) => {
                    seen_bus |= s == Section::Bus;
                    seen_branch |= s == Section::Branch;
                    section = s;
                }
                None => {
                    return Err(Error::Parse {
                        line: lineno,
                        message: format!("expected a section header, found {:?}", line.trim()),
                    })
                }
            },
            Section::Bus | Section::Branch | Section::Other if is_terminator(line) => {
                section = Section::Preamble;
            }
            Section::Bus => {
                buses.push(parse_bus_record(line, lineno)?);
            }
            Section::Branch => {
                branches.push((lineno, parse_branch_record(line, lineno)?));
            }
            Section::Other => {}
        }
    }

    if !seen_bus {
        return Err(Error::Parse { line: last_line, message: "missing BUS DATA section".into() });
    }
    if !seen_branch {
        return Err(Error::Parse { line: last_line, message: "missing BRANCH DATA section".into() });
    }
    if buses.is_empty() {
        return Err(Error::NoBuses);
    }

    let mut ids = BTreeSet::new();
    for bus in &buses {
        if !ids.insert(bus.id) {
            return Err(Error::DuplicateBus(bus.id));
        }
    }
    for (lineno, br) in &branches {
        for end in [br.from_bus, br.to_bus] {
            if !ids.contains(&end) {
                return Err(Error::DanglingBranch { line: *lineno, bus: end });
            }
        }
        if br.from_bus == br.to_bus {
            return Err(Error::SelfLoop { line: *lineno, bus: br.from_bus });
        }
    }

    let total_load_mw = buses.iter().map(|b| b.load_mw).sum();
    Ok(BusSystem {
        title,
        buses,
        branches: branches.into_iter().map(|(_, b)| b).collect(),
        total_load_mw,
    })
}

/// Emit a canonical CDF text that [`parse_cdf`] reads back to the same system
/// (given a title and names that fit the fixed-width fields).
pub fn to_cdf(sys: &BusSystem) -> String {
    let mut out = String::new();
    let title: String = sys.title.chars().filter(|c| *c != '\n').collect();
    let _ = writeln!(out, "{title}");
    let _ = writeln!(out, "BUS DATA FOLLOWS{:>28} ITEMS", sys.buses.len());
    for bus in &sys.buses {
        let name: String = bus.name.chars().take(12).collect();
        let _ = writeln!(
            out,
            "{:>4} {:<12} {:>2} {:>2} {:>2} {:>5} {:>7} {:>9} {:>8} {:>8} {:>7} {:>7}",
            bus.id.0, name, 1, 1, 0, "1.000", "0.0", bus.load_mw, "0.0", "0.0", "0.0", "0.0"
        );
    }
    let _ = writeln!(out, "-999");
    let _ = writeln!(out, "BRANCH DATA FOLLOWS{:>25} ITEMS", sys.branches.len());
    for br in &sys.branches {
        let _ = writeln!(
            out,
            "{:>4} {:>4}  1  1 1 0  0.0       0.0         0.0        0     0     0    0 0  0.0",
            br.from_bus.0, br.to_bus.0
        );
    }
    let _ = writeln!(out, "-999");
    let _ = writeln!(out, "END OF DATA");
    out
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SubstationMap {
    entries: BTreeMap<SubstationId, BTreeSet<BusId>>,
    #[serde(skip)]
    owner: HashMap<BusId, SubstationId>,
}

impl SubstationMap {
    pub fn new(entries: BTreeMap<SubstationId, BTreeSet<BusId>>) -> Result<Self> {
        let mut owner = HashMap::new();
        for (&sub, buses) in &entries {
            if buses.is_empty() {
                return Err(Error::EmptySubstation(sub));
            }
            for &bus in buses {
                if let Some(&first) = owner.get(&bus) {
                    return Err(Error::DuplicateAssignment { bus, first, second: sub });
                }
                owner.insert(bus, sub);
            }
        }
        for (expected, &sub) in (1u32..).zip(entries.keys()) {
            if sub.0 != expected {
                return Err(Error::NonContiguousSubstations(SubstationId(expected)));
            }
        }
        Ok(Self { entries, owner })
    }

    /// One substation per bus, numbered in bus order.
    pub fn identity(sys: &BusSystem) -> Self {
        let entries = sys
            .buses
            .iter()
            .enumerate()
            .map(|(i, b)| (SubstationId(i as u32 + 1), BTreeSet::from([b.id])))
            .collect();
        Self::new(entries).expect("identity map is valid")
    }

    pub fn substations(&self) -> impl Iterator<Item = SubstationId> + '_ {
        self.entries.keys().copied()
    }

    pub fn buses(&self, sub: SubstationId) -> Option<&BTreeSet<BusId>> {
        self.entries.get(&sub)
    }

    pub fn substation_of(&self, bus: BusId) -> Option<SubstationId> {
        self.owner.get(&bus).copied()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &BTreeMap<SubstationId, BTreeSet<BusId>> {
        &self.entries
    }
}

#[derive(Debug, Deserialize)]
struct MapRow {
    substation_id: u32,
    bus_id: u32,
}

/// Load a substation map from JSON (`{"1":[1],"4":[4,7,8,9]}`) or CSV
/// (`substation_id,bus_id` rows, header optional).
pub fn load_substation_map(text: &str) -> Result<SubstationMap> {
    let mut entries: BTreeMap<SubstationId, BTreeSet<BusId>> = BTreeMap::new();
    let mut push = |sub: u32, bus: u32| -> Result<()> {
        let set = entries.entry(SubstationId(sub)).or_default();
        if !set.insert(BusId(bus)) {
            return Err(Error::DuplicateAssignment {
                bus: BusId(bus),
                first: SubstationId(sub),
                second: SubstationId(sub),
            });
        }
        Ok(())
    };

    if text.trim_start().starts_with('{') {
        let raw: BTreeMap<String, Vec<u32>> =
            serde_json::from_str(text).map_err(|e| Error::SubstationMap(e.to_string()))?;
        for (key, buses) in raw {
            let sub: u32 = key
                .trim()
                .parse()
                .map_err(|_| Error::SubstationMap(format!("substation id {key:?} is not an integer")))?;
            if buses.is_empty() {
                return Err(Error::EmptySubstation(SubstationId(sub)));
            }
            for bus in buses {
                push(sub, bus)?;
            }
        }
    } else {
        let has_header = text
            .lines()
            .find(|l| !l.trim().is_empty())
            .is_some_and(|l| l.chars().any(|c| c.is_ascii_alphabetic()));
        let mut rdr = csv::ReaderBuilder::new()
            .has_headers(false)
            .trim(csv::Trim::All)
            .from_reader(text.as_bytes());
        for (i, rec) in rdr.records().enumerate() {
            let rec = rec.map_err(|e| Error::SubstationMap(e.to_string()))?;
            if i == 0 && has_header {
                continue;
            }
            if rec.iter().all(|f| f.is_empty()) {
                continue;
            }
            let row: MapRow = rec
                .deserialize(Some(&csv::StringRecord::from(vec!["substation_id", "bus_id"])))
                .map_err(|e| Error::SubstationMap(format!("row {}: {e}", i + 1)))?;
            push(row.substation_id, row.bus_id)?;
        }
    }
    SubstationMap::new(entries)
}

/// Symmetric, irreflexive adjacency between substations.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct SubstationAdjacency {
    neighbors: BTreeMap<SubstationId, BTreeSet<SubstationId>>,
}

impl SubstationAdjacency {
    pub fn from_pairs(pairs: impl IntoIterator<Item = (SubstationId, SubstationId)>) -> Self {
        let mut adj = Self::default();
        for (a, b) in pairs {
            adj.insert(a, b);
        }
        adj
    }

    fn insert(&mut self, a: SubstationId, b: SubstationId) {
        if a == b {
            return;
        }
        self.neighbors.entry(a).or_default().insert(b);
        self.neighbors.entry(b).or_default().insert(a);
    }

    pub fn are_adjacent(&self, a: SubstationId, b: SubstationId) -> bool {
        self.neighbors.get(&a).is_some_and(|n| n.contains(&b))
    }

    pub fn neighbors(&self, sub: SubstationId) -> impl Iterator<Item = SubstationId> + '_ {
        self.neighbors.get(&sub).into_iter().flatten().copied()
    }

    pub fn degree(&self, sub: SubstationId) -> usize {
        self.neighbors.get(&sub).map_or(0, BTreeSet::len)
    }

    /// Each unordered pair once, as `(low, high)`.
    pub fn pairs(&self) -> impl Iterator<Item = (SubstationId, SubstationId)> + '_ {
        self.neighbors
            .iter()
            .flat_map(|(&a, set)| set.iter().filter(move |&&b| a < b).map(move |&b| (a, b)))
    }

    pub fn is_empty(&self) -> bool {
        self.neighbors.is_empty()
    }
}

/// Substations A and B are adjacent iff some branch joins a bus of A to a bus
/// of B. Unmapped buses and parallel branches are ignored.
pub fn substation_adjacency(sys: &BusSystem, map: &SubstationMap) -> SubstationAdjacency {
    let mut adj = SubstationAdjacency::default();
    for br in &sys.branches {
        if let (Some(a), Some(b)) = (map.substation_of(br.from_bus), map.substation_of(br.to_bus)) {
            adj.insert(a, b);
        }
    }
    adj
}

/// Per-substation sum of bus loads, plus the load of buses outside the map.
pub fn substation_loads(sys: &BusSystem, map: &SubstationMap) -> (BTreeMap<SubstationId, f64>, f64) {
    let mut per_sub: BTreeMap<SubstationId, f64> = map.substations().map(|s| (s, 0.0)).collect();
    let mut unmapped = 0.0;
    for bus in &sys.buses {
        match map.substation_of(bus.id) {
            Some(s) => *per_sub.get_mut(&s).expect("mapped substation") += bus.load_mw,
            None => unmapped += bus.load_mw,
        }
    }
    (per_sub, unmapped)
}
