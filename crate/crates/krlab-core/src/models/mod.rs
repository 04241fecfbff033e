//! Model builders: each turns a concrete equation into a [`PositiveGenerator`]
//! on an appropriate grid, together with independent closed-form or
//! semi-analytic oracles for principal eigenvalues and structural constants.

pub mod coeff;
pub mod diffusion;
pub mod mitosis;
pub mod mutation;
pub mod renewal;
pub mod singular;

pub use coeff::Coeff;
pub use diffusion::{build_diffusion_1d, Diffusion1DModel};
pub use mitosis::{build_mitosis, mitosis_period, MitosisModel};
pub use mutation::{build_mutation_selection, kappa0_mutation, MutationSelectionModel};
pub use renewal::{build_renewal, euler_lotka_root, RenewalModel};
pub use singular::{build_singular_ms, kappa0_singular, SingularKappaReport, SingularMSModel};
