//! Reduction of Hamiltonian cycle on planar bipartite graphs of maximum degree 3
//! to Hamiltonicity of broken Chimera and Pegasus hardware graphs.

pub mod chimera;
pub mod compose;
pub mod corpus;
pub mod enlarge;
pub mod error;
pub mod gadget;
pub mod graph;
pub mod grid;
pub mod hamiltonicity;
pub mod instance;
pub mod oracle;
pub mod pegasus;
pub mod pipeline;
pub mod render;
pub mod tentacle;

pub use chimera::{node_class, ChimeraNode, ChimeraTopology, MaterializedChimera, Orientation};
pub use compose::{compose, BrokenChimera, Element};
pub use error::{Error, Result};
pub use gadget::VertexGadget;
pub use graph::SimpleGraph;
pub use grid::{Dir, GridCoord, GridStrip, GridTentacle, Parity, RectangularGraph, StripOrientation};
pub use hamiltonicity::{extract_cycle, lift_cycle};
pub use instance::{InstanceGraph, RectangularRepresentation};
pub use pegasus::{pegasus_contains_augmented_cell, PegasusNiceModel};
pub use tentacle::TentaclePatterns;
