//! Matching multicuts: partitions of a graph into at least `ell` parts in which
//! every vertex has at most one neighbour outside its own part.
//!
//! The crate offers exact solvers (a branch-and-reduce search and a tree
//! decomposition dynamic program), kernels for subcubic graphs and for
//! enumeration under structural parameters, brute-force oracles and instance
//! generators for the related hardness constructions.

pub mod branching;
pub mod enum_cluster;
pub mod enum_kernels;
pub mod generators;
pub mod graph;
pub mod io;
pub mod modulator;
pub mod multicut;
pub mod oracle;
pub mod random;
pub mod subcubic;
pub mod treewidth;

pub use graph::{Graph, GraphError};
pub use modulator::{Modulator, ModulatorKind};
pub use multicut::{canonicalize, max_parts_of_cut, validate_multicut, Multicut, Violation, ViolationKind};
pub use oracle::SetPackingInstance;

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/multicuts.md")]
    mod multicuts {}
    #[doc = include_str!("../../../book/src/solvers.md")]
    mod solvers {}
    #[doc = include_str!("../../../book/src/subcubic.md")]
    mod subcubic {}
    #[doc = include_str!("../../../book/src/enumeration.md")]
    mod enumeration {}
    #[doc = include_str!("../../../book/src/reductions.md")]
    mod reductions {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
