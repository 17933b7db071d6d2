//! Graph reconstruction from density maps via persistence-guided discrete
//! Morse theory on a 2D cubical complex.

pub mod complex;
pub mod density;
pub mod extraction;
pub mod fixtures;
pub mod geom;
pub mod io;
pub mod morse;
pub mod persistence;
pub mod pipeline;
mod union_find;
pub mod verify;

pub use complex::{Cell, ComplexError, CubicalComplex, GridSpec, Orientation};
pub use density::{
    delta_range, histogram_density, kde_density, synth_density, DensityError, DensityField, GraphEdge, GraphError,
    NoiseParams, PlanarGraph,
};
pub use extraction::{extract_graph, graph_stats, EdgeSource, ExtractError, GraphStats, ReconstructedGraph};
pub use geom::Point;
pub use io::IoError;
pub use morse::{simplify, Cancellation, DiscreteVectorField, Match, MorseError};
pub use persistence::{build_filtration, reduce, PersistenceDiagram, PersistenceError, PersistencePair};
pub use pipeline::{reconstruct, Reconstruction};
pub use verify::{check_theorem, hausdorff_distance, TheoremReport, VerifyError};

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error(transparent)]
    Complex(#[from] ComplexError),
    #[error(transparent)]
    Density(#[from] DensityError),
    #[error(transparent)]
    Persistence(#[from] PersistenceError),
    #[error(transparent)]
    Morse(#[from] MorseError),
    #[error(transparent)]
    Extract(#[from] ExtractError),
    #[error(transparent)]
    Verify(#[from] VerifyError),
    #[error(transparent)]
    Io(#[from] IoError),
}
