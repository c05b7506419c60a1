//! Walks on countable ordinals, the ρ̄ function, and shift-increasing
//! refinement of enumerated rational spaces.
//!
//! * [`ordinal`]: Cantor-normal-form ordinals below ε₀.
//! * [`cseq`]: C-sequences (canonical fundamental sequences plus overrides).
//! * [`walks`]: ρ, ρ̄, walk traces, fibers and property checkers.
//! * [`qspace`]: exact rational point enumerations, balls, crowding, kernels.
//! * [`refine`]: the σ-tree search for strongly increasing crowded prefixes.
//! * [`cli`]: the `rhowalk` command line.

pub mod cli;
pub mod cseq;
pub mod ordinal;
pub mod qspace;
pub mod refine;
pub mod walks;

pub use ordinal::Ordinal;
pub use walks::{RhoBar, Walker};
