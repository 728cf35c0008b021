//! Primal-dual algorithms for covering cuts of a graph with exact rational
//! duals: moat growing for proper requirements, growth with reverse delete
//! for uncrossable requirements, a parity-tracking variant with
//! half-integral duals, and the planar reduction from multicommodity
//! flow/multicut instances to 2-edge-connectivity augmentation.

pub mod certificate;
pub mod dual;
pub mod flow;
pub mod format;
pub mod generate;
pub mod error;
pub mod graph;
pub mod harness;
pub mod gw;
pub mod instances;
pub mod oracle;
pub mod planar;
pub mod rational;
pub mod requirements;
pub mod reverse_delete;
pub mod wgmv;

pub use dual::{DualEntry, DualSolution};
pub use error::{GraphError, RequirementError, SolverError};
pub use graph::{EdgeId, Multigraph, Vertex, VertexSet};
pub use rational::Rational;
pub use requirements::{RequirementOracle, ViolatedSetMethod};
pub use wgmv::{Algorithm, WgmvCertificate};
