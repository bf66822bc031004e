use thiserror::Error;

use crate::grid_model::{BusId, SubstationId};

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("no buses")]
    NoBuses,

    #[error("line {line}: branch references unknown bus {bus}")]
    DanglingBranch { line: usize, bus: BusId },

    #[error("line {line}: branch {bus} -> {bus} is a self-loop")]
    SelfLoop { line: usize, bus: BusId },

    #[error("duplicate bus id {0}")]
    DuplicateBus(BusId),

    #[error("bus {bus} assigned to substations {first} and {second}")]
    DuplicateAssignment {
        bus: BusId,
        first: SubstationId,
        second: SubstationId,
    },

    #[error("substation {0} has no buses")]
    EmptySubstation(SubstationId),

    #[error("substation ids must be contiguous from 1; missing {0}")]
    NonContiguousSubstations(SubstationId),

    #[error("substation map: {0}")]
    SubstationMap(String),

    #[error("impact domain error: {0}")]
    ImpactDomain(String),

    #[error("impact data: {0}")]
    ImpactData(String),

    #[error("unknown substation {0}")]
    UnknownSubstation(SubstationId),

    #[error("template: {0}")]
    Template(String),

    #[error("palette: {0}")]
    Palette(String),

    #[error("vertex {vertex} has an uncolored neighbor {neighbor}")]
    UncoloredNeighbor { vertex: usize, neighbor: usize },

    #[error("palette exhausted at vertex {vertex}: all {size} colors used by neighbors")]
    PaletteExhausted { vertex: usize, size: usize },

    #[error("invalid input: {0}")]
    Input(String),

    #[error("randomized coloring did not terminate within {0} rounds")]
    RoundCap(usize),

    #[error("unknown node {0}")]
    UnknownNode(String),

    #[error("scenario: {0}")]
    Scenario(String),
}
