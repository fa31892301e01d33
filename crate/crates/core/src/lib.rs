//! Graph-based motion-compensated Haar lifting for 3-D+t volumes.
//!
//! Consecutive frames along t or z form a bipartite graph: each pixel of the
//! current frame links to a neighbourhood of pixels in the reference frame,
//! weighted by intensity similarity. Random-walk normalization of those links
//! gives the prediction and update operators of a lossless integer Haar
//! lifting step. The crate covers the volume container, synthetic phantoms,
//! graph construction, the transform, and the quality metrics used to compare
//! neighbourhoods.

pub mod error;
pub mod graph;
pub mod lifting;
pub mod metrics;
pub mod phantom;
pub mod report;
pub mod volume;

pub use error::{Error, Result};
pub use graph::{build_mc_pair, McPair, NeighborhoodKind, SparseBinary, SparseStochastic, SparseWeighted};
pub use lifting::{
    decompose_volume, forward_pair, forward_uncompensated, inverse_pair, reconstruct_volume, BandPair,
    DecomposedVolume, Method,
};
pub use metrics::{analyze_decomposition, mean_energy, psnr, AnalysisReport, PairMetrics};
pub use volume::{Axis, Dims, Frame, Volume};
