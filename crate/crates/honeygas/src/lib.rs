pub mod admissibility;
pub mod cli;
pub mod lattice;
pub mod dynamics;
pub mod medium;
pub mod stats;
pub mod structures;
pub mod svg;
