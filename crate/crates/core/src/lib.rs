//! Local-unitary invariant polynomials built from permutation tuples.
//!
//! A label `(σ₁,…,σ_r) ∈ S_m^r`, taken up to simultaneous conjugation, names
//! one homogeneous invariant of degree `m` in `ψ` and in `ψ̄` (pure states) or
//! of degree `m` in `ρ` (mixed states).

pub mod closedform;
pub mod contract;
pub mod error;
pub mod formula;
pub mod invgraph;
pub mod perm;
pub mod states;
pub mod verify;

pub use contract::{eval_mixed, eval_pure, InvariantSpec, Kind, Strategy};
pub use error::{Error, Result};
pub use formula::Formula;
pub use perm::{OrbitLabel, Perm, PermTuple};
pub use states::{DensityMatrix, Dims, PureState, SubsystemSet, C64};
