//! Closed-curve reconstruction from unorganised samples on meshes, in the
//! plane and in SE(3), via the intersection of the sphere-of-influence graph
//! with the dual of a geodesic Voronoi partition.

pub mod cli;
pub mod delaunay;
pub mod distance;
pub mod error;
pub mod geodesic;
pub mod graph;
pub mod io;
pub mod mesh;
pub mod metric;
pub mod par;
pub mod pipeline;
pub mod sampling;
pub mod shapes;
pub mod tsp;

pub use distance::DistanceMatrix;
pub use error::{Error, Result};
pub use graph::{EdgeTag, GraphEdge, ProximityGraph};
pub use mesh::TriMesh;
pub use par::Execution;
pub use pipeline::{Mode, Options, ReconstructionResult};
pub use tsp::Tour;
