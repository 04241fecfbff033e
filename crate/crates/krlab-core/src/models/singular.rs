//! Mutation-selection with an axis-supported Gaussian kernel:
//!
//! ```text
//! L f(x) = eps^{-1} sum_{i=1}^d int f(x - z e_i) J_i(z / eps) dz - W(x) f(x),
//! J_i = M_i G_{sigma_i},
//! ```
//!
//! i.e. a sum over axes of one-dimensional Gaussian convolutions with standard
//! deviation eps * sigma_i and mass M_i, minus a confining potential. The
//! kernel is supported on the coordinate axes, so the generator on a tensor
//! grid is a Kronecker sum of banded one-dimensional convolution matrices.

use crate::error::{Error, Result};
use crate::generator::PositiveGenerator;
use crate::grid::WeightedGrid;
use crate::models::coeff::Coeff;
use crate::storage::{CsrMatrix, MatrixOp};

/// Gaussian tails are cut at this many standard deviations; the induced mass
/// deficit is recorded in [`SingularKappaReport`].
const GAUSS_CUTOFF_SIGMAS: f64 = 8.0;

#[derive(Debug, Clone)]
pub struct SingularMSModel {
    /// Dimension, 1 or 2.
    pub d: usize,
    /// Kernel masses M_i, one per axis.
    pub masses: Vec<f64>,
    /// Kernel widths sigma_i, one per axis.
    pub sigmas: Vec<f64>,
    /// Variance scale eps > 0.
    pub epsilon: f64,
    /// Potential W as a function of the radius |x|; W(0) = 0, confining.
    pub potential: Coeff,
    /// Domain truncation [-radius, radius]^d.
    pub radius: f64,
    /// Nodes per axis.
    pub n_axis: usize,
}

/// Constructive constants of the small-variance positivity bound.
#[derive(Debug, Clone)]
pub struct SingularKappaReport {
    pub kappa1: f64,
    pub zeta: f64,
    pub theta: f64,
    pub kappa0: f64,
    /// Per-axis kernel mass lost to the Gaussian cutoff on the grid.
    pub mass_deficit: Vec<f64>,
}

impl SingularMSModel {
    pub fn validate(&self) -> Result<()> {
        if self.d == 0 || self.d > 2 {
            return Err(Error::InvalidModel(format!("dimension {} not in {{1, 2}}", self.d)));
        }
        if self.masses.len() != self.d || self.sigmas.len() != self.d {
            return Err(Error::InvalidModel("need one mass and one sigma per axis".into()));
        }
        if self.masses.iter().any(|&m| !(m > 0.0)) || self.sigmas.iter().any(|&s| !(s > 0.0)) {
            return Err(Error::InvalidModel("masses and sigmas must be > 0".into()));
        }
        if !(self.epsilon > 0.0) || !(self.radius > 0.0) || self.n_axis < 3 {
            return Err(Error::InvalidModel("need eps > 0, radius > 0, n_axis >= 3".into()));
        }
        // log W = O(|x|^2) on the truncated domain: sampled check
        let mut worst: f64 = 0.0;
        let rmax = self.radius * (self.d as f64).sqrt();
        for i in 1..=64 {
            let r = rmax * i as f64 / 64.0;
            let wv = self.potential.eval(r);
            if wv < 0.0 {
                return Err(Error::InvalidModel(format!("potential negative at |x| = {r}")));
            }
            if wv > 1.0 {
                worst = worst.max(wv.ln() / (1.0 + r * r));
            }
        }
        if !worst.is_finite() {
            return Err(Error::InvalidModel("log W grows faster than |x|^2".into()));
        }
        Ok(())
    }

    fn axis_nodes(&self) -> Vec<f64> {
        let h = 2.0 * self.radius / self.n_axis as f64;
        (0..self.n_axis)
            .map(|j| -self.radius + (j as f64 + 0.5) * h)
            .collect()
    }

    pub fn grid(&self) -> Result<WeightedGrid> {
        let nodes = self.axis_nodes();
        let h = 2.0 * self.radius / self.n_axis as f64;
        match self.d {
            1 => WeightedGrid::new_1d(nodes, vec![h; self.n_axis], vec![1.0; self.n_axis], None),
            2 => {
                let n = self.n_axis * self.n_axis;
                WeightedGrid::new_tensor2(nodes.clone(), nodes, vec![h * h; n], vec![1.0; n])
            }
            _ => unreachable!(),
        }
    }

    /// Banded one-dimensional convolution matrix for axis `i`:
    /// C[k, l] = M_i G_{eps sigma_i}(x_k - x_l) h, cut at 8 standard deviations.
    fn axis_convolution(&self, i: usize) -> (Vec<(usize, usize, f64)>, f64) {
        let nodes = self.axis_nodes();
        let h = 2.0 * self.radius / self.n_axis as f64;
        let sd = self.epsilon * self.sigmas[i];
        let cut = GAUSS_CUTOFF_SIGMAS * sd;
        let band = (cut / h).ceil() as usize;
        let norm = self.masses[i] / (sd * (2.0 * std::f64::consts::PI).sqrt());
        let mut trips = Vec::new();
        let mut max_col_mass: f64 = 0.0;
        for l in 0..self.n_axis {
            let mut col_mass = 0.0;
            let lo = l.saturating_sub(band);
            let hi = (l + band).min(self.n_axis - 1);
            for k in lo..=hi {
                let z = (nodes[k] - nodes[l]) / sd;
                let v = norm * (-0.5 * z * z).exp() * h;
                trips.push((k, l, v));
                col_mass += v;
            }
            max_col_mass = max_col_mass.max(col_mass);
        }
        (trips, max_col_mass)
    }
}

/// Kronecker-sum assembly of the axis convolutions minus the potential.
pub fn build_singular_ms(model: &SingularMSModel) -> Result<PositiveGenerator> {
    model.validate()?;
    let grid = model.grid()?;
    let na = model.n_axis;
    let n = grid.len();
    let mut trips: Vec<(usize, usize, f64)> = Vec::new();
    match model.d {
        1 => {
            let (conv, _) = model.axis_convolution(0);
            trips.extend(conv);
            let nodes = model.axis_nodes();
            for (j, &x) in nodes.iter().enumerate() {
                trips.push((j, j, -model.potential.eval(x.abs())));
            }
        }
        2 => {
            let (c0, _) = model.axis_convolution(0);
            let (c1, _) = model.axis_convolution(1);
            // axis 0 acts on the major index, axis 1 on the minor index
            for &(k, l, v) in &c0 {
                for t in 0..na {
                    trips.push((k * na + t, l * na + t, v));
                }
            }
            for &(k, l, v) in &c1 {
                for s in 0..na {
                    trips.push((s * na + k, s * na + l, v));
                }
            }
            let nodes = model.axis_nodes();
            for s in 0..na {
                for t in 0..na {
                    let r = (nodes[s] * nodes[s] + nodes[t] * nodes[t]).sqrt();
                    trips.push((s * na + t, s * na + t, -model.potential.eval(r)));
                }
            }
        }
        _ => unreachable!(),
    }
    let op = MatrixOp::Sparse(CsrMatrix::from_triplets(n, &trips));
    let gen = PositiveGenerator::new(op, grid, "singular-ms")?;
    gen.require_metzler()?;
    Ok(gen)
}

/// Closed-form constants: kappa_1 = sum M_i, zeta = d prod M_i / (2 kappa_1^d),
/// theta = (1 - zeta^2)^{1/d}, kappa_0 = theta kappa_1; always 0 < theta < 1.
pub fn kappa0_singular(model: &SingularMSModel) -> Result<SingularKappaReport> {
    model.validate()?;
    let d = model.d as f64;
    let kappa1: f64 = model.masses.iter().sum();
    let prod: f64 = model.masses.iter().product();
    let zeta = d * prod / (2.0 * kappa1.powf(d));
    let theta = (1.0 - zeta * zeta).powf(1.0 / d);
    let kappa0 = theta * kappa1;
    let mass_deficit = (0..model.d)
        .map(|i| {
            let (_, col_mass) = model.axis_convolution(i);
            model.masses[i] - col_mass
        })
        .collect();
    Ok(SingularKappaReport {
        kappa1,
        zeta,
        theta,
        kappa0,
        mass_deficit,
    })
}
