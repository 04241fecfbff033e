//! Canonical model presets: one named instance per model family, in a small
//! (dense-oracle-sized) and a production resolution. These are the instances
//! the acceptance suite and the example configs exercise.

use crate::error::Result;
use crate::generator::PositiveGenerator;
use crate::models::{
    build_diffusion_1d, build_mitosis, build_mutation_selection, build_renewal, build_singular_ms,
    Coeff, Diffusion1DModel, MitosisModel, MutationSelectionModel, RenewalModel, SingularMSModel,
};

pub fn renewal_constant(n: usize) -> RenewalModel {
    RenewalModel {
        death: Coeff::Constant(1.0),
        birth: Coeff::Constant(2.0),
        y_max: 20.0,
        n,
    }
}

pub fn renewal_indicator(n: usize) -> RenewalModel {
    RenewalModel {
        death: Coeff::Constant(0.0),
        birth: Coeff::Indicator {
            lo: 1.0,
            hi: 2.0,
            value: 1.0,
        },
        y_max: 4.0,
        n,
    }
}

pub fn diffusion_sine(n: usize) -> Diffusion1DModel {
    Diffusion1DModel {
        drift: Coeff::Constant(0.0),
        potential: Coeff::Constant(0.0),
        x_lo: 0.0,
        x_hi: std::f64::consts::PI,
        n,
    }
}

/// Equal mitosis with mixing growth a(x) = 1 + x (a(2x) != 2a(x)).
pub fn mitosis_mixing(q: usize, levels: usize) -> MitosisModel {
    MitosisModel {
        growth: Coeff::Affine { a: 1.0, b: 1.0 },
        frag: Coeff::Step { at: 2.0, value: 5.0 },
        x0: 1.0,
        q,
        levels,
        weight_r: 2.0,
        kb1_floor: 1.0,
    }
}

/// Equal mitosis with the non-mixing growth a(x) = x (exact dilation
/// covariance, persistent oscillations with period ln 2).
pub fn mitosis_nonmixing(q: usize, levels: usize) -> MitosisModel {
    MitosisModel {
        growth: Coeff::Linear,
        frag: Coeff::Step { at: 2.0, value: 5.0 },
        x0: 1.0,
        q,
        levels,
        weight_r: 2.0,
        kb1_floor: 1.0,
    }
}

/// Quartic well with a smooth unit-mass bump kernel on [-1, 1].
pub fn mutsel_bump(n: usize) -> MutationSelectionModel {
    MutationSelectionModel {
        kernel: Coeff::Bump,
        potential: Coeff::Power(4.0),
        radius: 4.0,
        n,
        a_lo: -1.0,
        a_hi: 1.0,
        beta: 1.0 / 16.0,
    }
}

pub fn singular_1d(n_axis: usize, epsilon: f64) -> SingularMSModel {
    SingularMSModel {
        d: 1,
        masses: vec![1.0],
        sigmas: vec![1.0],
        epsilon,
        potential: Coeff::Power(2.0),
        radius: 1.0,
        n_axis,
    }
}

pub fn singular_2d(n_axis: usize, epsilon: f64) -> SingularMSModel {
    SingularMSModel {
        d: 2,
        masses: vec![1.0, 1.0],
        sigmas: vec![1.0, 1.0],
        epsilon,
        potential: Coeff::Power(2.0),
        radius: 1.0,
        n_axis,
    }
}

/// The 2-state chain whose time-1 kernel is the column-stochastic matrix
/// [[0.5, 0.3], [0.5, 0.7]]: A = |ln 0.2| [[-0.625, 0.375], [0.625, -0.375]].
/// Hand-checkable Doeblin example with gamma = 0.2 exactly.
pub fn two_state_chain() -> Result<PositiveGenerator> {
    let rate = -(0.2f64.ln());
    let a = nalgebra::DMatrix::from_row_slice(
        2,
        2,
        &[-0.625 * rate, 0.375 * rate, 0.625 * rate, -0.375 * rate],
    );
    let grid = crate::grid::WeightedGrid::new_1d(
        vec![0.0, 1.0],
        vec![1.0, 1.0],
        vec![1.0, 1.0],
        None,
    )?;
    PositiveGenerator::new(crate::storage::MatrixOp::Dense(a), grid, "two-state")
}

/// Small (n <= 200) instance of every preset, for dense-oracle comparisons.
pub fn small_preset_generators() -> Result<Vec<(&'static str, PositiveGenerator)>> {
    Ok(vec![
        ("renewal-constant", build_renewal(&renewal_constant(160))?),
        ("renewal-indicator", build_renewal(&renewal_indicator(200))?),
        ("diffusion-sine", build_diffusion_1d(&diffusion_sine(180))?),
        ("mitosis-mixing", build_mitosis(&mitosis_mixing(16, 8))?),
        ("mitosis-nonmixing", build_mitosis(&mitosis_nonmixing(16, 8))?),
        ("mutsel-bump", build_mutation_selection(&mutsel_bump(160))?),
        ("singular-1d", build_singular_ms(&singular_1d(160, 0.1))?),
        ("singular-2d", build_singular_ms(&singular_2d(14, 0.3))?),
        ("two-state", two_state_chain()?),
    ])
}
