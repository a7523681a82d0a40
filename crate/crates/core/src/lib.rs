//! Constructions and finite certificates behind an explicit hyperbolic Kazhdan group.
//!
//! The crate is organised bottom-up:
//!
//! * [`group`] and [`word`]: normal-form arithmetic in cyclic, dihedral and
//!   Heisenberg groups, and freely reduced words.
//! * [`diffsets`]: perfect difference sets (verification, search, Singer cycles).
//! * [`graphs`]: Cayley, coset and link graphs with girth/diameter certificates.
//! * [`polygons`]: generalized polygon recognition and the subgroup criterion
//!   for coset-graph quadrangles.
//! * [`spectra`]: normalized Laplacian gaps and the two spectral inequalities.
//! * [`presentations`]: relator emission, Tietze elimination, abelianization,
//!   complexes of groups and link verification.
//! * [`pipeline`]: the end-to-end check runs exposed by the CLI.

pub mod diffsets;
pub mod graphs;
pub mod group;
pub mod pipeline;
pub mod polygons;
pub mod presentations;
pub mod spectra;
pub mod word;

pub use diffsets::{DifferenceSet, DifferenceSetCertificate, SignedRepresentatives};
pub use graphs::{BipartiteGraph, GraphCertificate, VertexLabel};
pub use group::{Coset, GroupElement, GroupSpec, Subgroup};
pub use polygons::{KantorReport, PolygonCertificate};
pub use presentations::{ComplexOfGroups, LinkReport, Presentation};
pub use spectra::{KazhdanVerdict, SpectralGap};
pub use word::Word;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid group: {0}")]
    InvalidGroup(String),
    #[error("invalid element: {0}")]
    InvalidElement(String),
    #[error("invalid subgroup: {0}")]
    InvalidSubgroup(String),
    #[error("generator {0} has no assigned value")]
    UnassignedGenerator(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("invalid difference set: {0}")]
    InvalidDifferenceSet(String),
    #[error("no difference set of order {q} found after exhaustive search of {nodes} nodes")]
    DifferenceSetNotFound { q: u64, nodes: u64 },
    #[error("unsupported plane order {0}")]
    UnsupportedOrder(u64),
    #[error("invalid connection set: {0}")]
    InvalidConnectionSet(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("graph is disconnected")]
    Disconnected,
    #[error("numeric spectral gap {numeric} disagrees with closed form {closed_form} for {graph}")]
    SpectralDisagreement { graph: String, numeric: f64, closed_form: f64 },
    #[error("eigensolver failed: {0}")]
    Eigensolver(String),
    #[error("presentation has no relator defining {0}")]
    NoDefiningRelator(String),
    #[error("embedding mismatch: {0}")]
    EmbeddingMismatch(String),
    #[error("unknown format {0:?}")]
    UnknownFormat(String),
    #[error("internal defect: {0}")]
    Defect(String),
}
