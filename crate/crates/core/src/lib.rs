//! Inferential models with p-values as plausibilities.
//!
//! An association X = a(θ, U) with U ~ Unif(0, 1), a nested predictive
//! random set S for U, and an assertion A about θ give
//! bel_x(A) = P_S{Θ_x(S) ⊆ A} and pl_x(A) = 1 − bel_x(Aᶜ). For a test
//! statistic T and null Θ₀, [`pvalue::synthesize_pvalue_set`] builds the S
//! for which pl_x(Θ₀) equals sup_{θ ∈ Θ₀} P_θ{T(X) ≥ T(x)}.

pub mod bisect;
pub mod dist;
pub mod error;
pub mod im;
pub mod models;
pub mod par;
pub mod pvalue;
pub mod sets;
pub mod stats;
pub mod validity;

pub use error::{ImError, Result};
