//! Exact and simulated distributions of sign-flipped statistics.
//!
//! For `ε` uniform on `{−1, +1}ⁿ` the oracle enumerates `S_n = Σ ε_i x_i`
//! and `εᵀ P ε` exactly, keeps probabilities as integer counts over `2ⁿ`,
//! and checks the moment and tail inequalities against the χ side. Bounded
//! symmetric weights `η_i` are handled by seeded Monte Carlo.

mod checks;
mod enumerate;
mod sampler;
mod test_function;

pub use checks::{
    verify_moment_inequality, verify_tail_bounds, Instance, Verdict, MOMENT_TOLERANCE,
    TAIL_TOLERANCE,
};
pub use enumerate::{
    exact_linear_distribution, exact_quadratic_distribution, SignDistribution, LINEAR_CAP,
    PROJECTOR_TOLERANCE, QUADRATIC_CAP,
};
pub use sampler::{
    monte_carlo_linear, random_projector, random_unit_vector, McEstimate, SignKind,
    SymmetricSampler,
};
pub use test_function::{chi_expectation, expectation_under, TestFunction};
