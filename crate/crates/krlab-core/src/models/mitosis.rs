//! Growth-fragmentation with equal mitosis.
//!
//! ```text
//! d_t f + d_x (a(x) f) + K(x) f = 4 K(2x) f(t, 2x),    x > x0,
//! ```
//!
//! with zero-flux boundary at x0, K = 0 on (0, 2 x0], and absorbing truncation
//! at the top of the grid.
//!
//! The grid is geometric with ratio q: x_j = x0 * 2^{j/q}, built so that
//! x_{j+q} = 2 x_j holds bit-exactly. The dilation x -> 2x is then an exact
//! index shift by q and the gain term is a single subdiagonal band with no
//! interpolation; cell widths double exactly across octaves, so the discrete
//! operator reproduces the continuous mass balance of the gain/loss pair and
//! inherits the dyadic lattice structure of the non-mixing regime
//! (a(2x) = 2 a(x)). A uniform grid would destroy the oscillatory boundary
//! spectrum by numerical diffusion.

use crate::error::{Error, Result};
use crate::generator::PositiveGenerator;
use crate::grid::WeightedGrid;
use crate::models::coeff::Coeff;
use crate::storage::{CsrMatrix, MatrixOp};

#[derive(Debug, Clone)]
pub struct MitosisModel {
    /// Growth rate a(x) > 0, Lipschitz on [x0, inf).
    pub growth: Coeff,
    /// Total fragmentation rate K(x), zero on (0, 2 x0].
    pub frag: Coeff,
    /// Minimal size; x0 >= 1 so that power weights satisfy m >= 1.
    pub x0: f64,
    /// Dyadic subdivisions per octave.
    pub q: usize,
    /// Number of octaves; the grid spans [x0, x0 * 2^levels).
    pub levels: usize,
    /// Weight exponent: m(x) = x^r.
    pub weight_r: f64,
    /// Floor for the discrete check of x K(x)/a(x) at the last node.
    pub kb1_floor: f64,
}

impl MitosisModel {
    pub fn n(&self) -> usize {
        self.q * self.levels
    }

    /// Dyadic-exact node set: the first octave from powers of two, every
    /// further octave by exact doubling.
    pub fn nodes(&self) -> Vec<f64> {
        let n = self.n();
        let q = self.q;
        let mut x = vec![0.0; n];
        for j in 0..q.min(n) {
            x[j] = self.x0 * (j as f64 / q as f64).exp2();
        }
        for j in q..n {
            x[j] = 2.0 * x[j - q];
        }
        x
    }

    pub fn grid(&self) -> Result<WeightedGrid> {
        let nodes = self.nodes();
        // cell width of a geometric cell [x 2^{-1/2q}, x 2^{1/2q}]
        let cw = 2.0 * (0.5 * std::f64::consts::LN_2 / self.q as f64).sinh();
        let w: Vec<f64> = nodes.iter().map(|x| x * cw).collect();
        let m: Vec<f64> = nodes.iter().map(|x| x.powf(self.weight_r)).collect();
        WeightedGrid::new_1d(nodes, w, m, Some(self.q))
    }

    pub fn validate(&self) -> Result<()> {
        if self.q == 0 || self.levels < 2 {
            return Err(Error::InvalidModel(
                "need q >= 1 and at least two octaves".into(),
            ));
        }
        if !(self.x0 >= 1.0) {
            return Err(Error::InvalidModel(
                "x0 must be >= 1 so that the weight m = x^r is >= 1".into(),
            ));
        }
        let nodes = self.nodes();
        for &x in &nodes {
            if !(self.growth.eval(x) > 0.0) {
                return Err(Error::InvalidModel(format!("growth rate not positive at x = {x}")));
            }
            let k = self.frag.eval(x);
            if k < 0.0 {
                return Err(Error::InvalidModel(format!("negative fragmentation rate at x = {x}")));
            }
            if x <= 2.0 * self.x0 && k != 0.0 {
                return Err(Error::InvalidModel(format!(
                    "fragmentation rate must vanish on the first octave, K({x}) = {k}"
                )));
            }
        }
        // discrete stand-in for x K(x)/a(x) -> infinity: check the last node
        let xl = *nodes.last().unwrap();
        let ratio = xl * self.frag.eval(xl) / self.growth.eval(xl);
        if ratio < self.kb1_floor {
            return Err(Error::InvalidModel(format!(
                "x K/a = {ratio:.3} at the last node is below the floor {}",
                self.kb1_floor
            )));
        }
        Ok(())
    }

    /// Same model with fragmentation switched off (pure transport); used by
    /// the lattice-support diagnostic.
    pub fn transport_only(&self) -> MitosisModel {
        MitosisModel {
            frag: Coeff::Constant(0.0),
            kb1_floor: f64::NEG_INFINITY,
            ..self.clone()
        }
    }
}

/// Conservative upwind finite volumes for the transport, diagonal loss, and
/// the gain as an exact index shift by q.
///
/// With cell masses w_j f_j, the gain entry A[j-q, j] = 4 K(x_j) moves mass
/// 4 K w_{j-q} f_j = 2 K w_j f_j per unit time against a loss of K w_j f_j,
/// which is exactly the discrete counterpart of the continuous number balance
/// (two offspring per division, total size conserved).
pub fn build_mitosis(model: &MitosisModel) -> Result<PositiveGenerator> {
    model.validate()?;
    let grid = model.grid()?;
    let n = model.n();
    let q = model.q;
    let nodes = grid.nodes().to_vec();
    let w = grid.quad_weights().to_vec();
    let mut trips: Vec<(usize, usize, f64)> = Vec::with_capacity(4 * n);
    for j in 0..n {
        let a = model.growth.eval(nodes[j]);
        // upwind flux a_j f_j leaving cell j; zero influx at the x0 boundary
        trips.push((j, j, -a / w[j]));
        if j + 1 < n {
            trips.push((j + 1, j, a / w[j + 1]));
        }
        let k = model.frag.eval(nodes[j]);
        if k != 0.0 {
            trips.push((j, j, -k));
            if j >= q {
                trips.push((j - q, j, 4.0 * k));
            }
            // divisions with j < q would land below x0; excluded by K = 0
            // on the first octave, which validate() enforces
        }
    }
    let op = MatrixOp::Sparse(CsrMatrix::from_triplets(n, &trips));
    let gen = PositiveGenerator::new(op, grid, "mitosis")?;
    gen.require_metzler()?;
    Ok(gen)
}

/// Doubling time along the flow, `int_x^{2x} dt / a(t)`, by adaptive Simpson.
/// When a(2t) = 2 a(t) the value is independent of x; for a(t) = t it equals
/// ln 2, the oscillation period of the non-mixing boundary spectrum.
pub fn mitosis_period(growth: &Coeff, x: f64) -> Result<f64> {
    if !(x > 0.0) {
        return Err(Error::InvalidArgument("x must be > 0".into()));
    }
    let g = |t: f64| -> Result<f64> {
        let a = growth.eval(t);
        if !(a > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "growth rate vanishes at t = {t}"
            )));
        }
        Ok(1.0 / a)
    };
    adaptive_simpson(&g, x, 2.0 * x, 1e-12, 40)
}

fn adaptive_simpson(
    g: &impl Fn(f64) -> Result<f64>,
    a: f64,
    b: f64,
    tol: f64,
    depth: usize,
) -> Result<f64> {
    let m = 0.5 * (a + b);
    let (fa, fm, fb) = (g(a)?, g(m)?, g(b)?);
    fn simpson(a: f64, b: f64, fa: f64, fm: f64, fb: f64) -> f64 {
        (b - a) / 6.0 * (fa + 4.0 * fm + fb)
    }
    fn recurse(
        g: &impl Fn(f64) -> Result<f64>,
        a: f64,
        m: f64,
        b: f64,
        fa: f64,
        fm: f64,
        fb: f64,
        whole: f64,
        tol: f64,
        depth: usize,
    ) -> Result<f64> {
        let lm = 0.5 * (a + m);
        let rm = 0.5 * (m + b);
        let (flm, frm) = (g(lm)?, g(rm)?);
        let left = simpson(a, m, fa, flm, fm);
        let right = simpson(m, b, fm, frm, fb);
        if depth == 0 || (left + right - whole).abs() <= 15.0 * tol {
            return Ok(left + right + (left + right - whole) / 15.0);
        }
        Ok(recurse(g, a, lm, m, fa, flm, fm, left, tol * 0.5, depth - 1)?
            + recurse(g, m, rm, b, fm, frm, fb, right, tol * 0.5, depth - 1)?)
    }
    let whole = simpson(a, b, fa, fm, fb);
    recurse(g, a, m, b, fa, fm, fb, whole, tol, depth)
}
