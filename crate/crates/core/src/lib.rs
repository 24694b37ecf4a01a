//! Bipartite entanglement via the alpha-concurrence, the family of measures
//! `Tr rho_A^alpha - 1` on pure states (`0 <= alpha <= 1/2`) extended to
//! mixed states by the convex roof.
//!
//! The crate provides
//! - exact pure-state values through the Schmidt decomposition ([`measures`]),
//! - certified lower bounds for arbitrary mixed states from the PPT and
//!   realignment separability criteria ([`measures::lower_bound_alpha`]),
//! - exact closed forms for isotropic and Werner states,
//! - a numerical upper bound by local search over pure-state
//!   decompositions ([`convex_roof`]),
//! - brute-force verifiers for the two-level ansatz minimizations behind
//!   the family closed forms ([`eta`]).
//!
//! All randomness flows through seeded ChaCha12 generators (Gaussians via
//! Box-Muller), so results are reproducible across runs and platforms.

pub mod cli;
pub mod convex_roof;
pub mod error;
pub mod eta;
pub mod measures;
pub mod qmat;
pub mod states;

pub use error::{Error, Result};
pub use measures::{Alpha, BoundBranch, BoundReport};
pub use qmat::{CMatrix, CVector, Complex64};
pub use states::{DensityMatrix, PureState, SchmidtVector, State};
