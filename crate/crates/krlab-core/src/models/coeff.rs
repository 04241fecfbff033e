//! Named coefficient presets.
//!
//! Model coefficients (rates, potentials, kernels, weights) are supplied as
//! small preset expressions, e.g. `constant:2`, `power:4`, `indicator:1,2`,
//! `step:2,5`, `affine:1,1`, `bump`, `gaussian:1`, or tabulated samples
//! `table:0,1;1,2;4,0`. Presets are the canonical test surface.

use crate::error::{Error, Result};

/// Mass of exp(-1/(1-u^2)) over (-1, 1); normalizes the bump preset.
const BUMP_MASS: f64 = 0.443993816168079437823;

#[derive(Debug, Clone, PartialEq)]
pub enum Coeff {
    Constant(f64),
    /// x
    Linear,
    /// a + b x
    Affine { a: f64, b: f64 },
    /// x^p
    Power(f64),
    /// value on [lo, hi], 0 elsewhere
    Indicator { lo: f64, hi: f64, value: f64 },
    /// value * 1_{x > at}
    Step { at: f64, value: f64 },
    /// smooth bump supported on (-1, 1), normalized to unit mass
    Bump,
    /// mass * Gaussian density with standard deviation sigma
    Gaussian { sigma: f64, mass: f64 },
    /// piecewise-linear interpolation of samples, constant outside
    Table { xs: Vec<f64>, vs: Vec<f64> },
}

impl Coeff {
    pub fn parse(s: &str) -> Result<Coeff> {
        let s = s.trim();
        let (name, args) = match s.split_once(':') {
            Some((n, a)) => (n.trim(), Some(a.trim())),
            None => (s, None),
        };
        let nums = |args: Option<&str>, k: usize| -> Result<Vec<f64>> {
            let raw = args.ok_or_else(|| {
                Error::Config(format!("coefficient '{name}' needs {k} parameter(s)"))
            })?;
            let vals: Result<Vec<f64>> = raw
                .split(',')
                .map(|t| {
                    t.trim()
                        .parse::<f64>()
                        .map_err(|_| Error::Config(format!("bad number '{t}' in '{s}'")))
                })
                .collect();
            let vals = vals?;
            if vals.len() != k {
                return Err(Error::Config(format!(
                    "coefficient '{name}' needs {k} parameter(s), got {}",
                    vals.len()
                )));
            }
            Ok(vals)
        };
        match name {
            "constant" => Ok(Coeff::Constant(nums(args, 1)?[0])),
            "zero" => Ok(Coeff::Constant(0.0)),
            "linear" => Ok(Coeff::Linear),
            "affine" => {
                let v = nums(args, 2)?;
                Ok(Coeff::Affine { a: v[0], b: v[1] })
            }
            "power" => Ok(Coeff::Power(nums(args, 1)?[0])),
            "indicator" => {
                let raw = args.unwrap_or("");
                let k = raw.split(',').count();
                let v = nums(args, k.clamp(2, 3))?;
                if v[1] <= v[0] {
                    return Err(Error::Config(format!("empty indicator [{}, {}]", v[0], v[1])));
                }
                Ok(Coeff::Indicator {
                    lo: v[0],
                    hi: v[1],
                    value: if v.len() == 3 { v[2] } else { 1.0 },
                })
            }
            "step" => {
                let v = nums(args, 2)?;
                Ok(Coeff::Step { at: v[0], value: v[1] })
            }
            "bump" => Ok(Coeff::Bump),
            "gaussian" => {
                let v = nums(args, 1)?;
                if v[0] <= 0.0 {
                    return Err(Error::Config("gaussian sigma must be > 0".into()));
                }
                Ok(Coeff::Gaussian { sigma: v[0], mass: 1.0 })
            }
            "table" => {
                let raw = args.ok_or_else(|| Error::Config("table needs samples".into()))?;
                let mut xs = Vec::new();
                let mut vs = Vec::new();
                for pair in raw.split(';') {
                    let v = pair
                        .split(',')
                        .map(|t| t.trim().parse::<f64>())
                        .collect::<std::result::Result<Vec<f64>, _>>()
                        .map_err(|_| Error::Config(format!("bad table pair '{pair}'")))?;
                    if v.len() != 2 {
                        return Err(Error::Config(format!("bad table pair '{pair}'")));
                    }
                    xs.push(v[0]);
                    vs.push(v[1]);
                }
                if xs.len() < 2 || xs.windows(2).any(|w| w[1] <= w[0]) {
                    return Err(Error::Config("table abscissae must be increasing".into()));
                }
                Ok(Coeff::Table { xs, vs })
            }
            other => Err(Error::Config(format!("unknown coefficient preset '{other}'"))),
        }
    }

    pub fn eval(&self, x: f64) -> f64 {
        match self {
            Coeff::Constant(c) => *c,
            Coeff::Linear => x,
            Coeff::Affine { a, b } => a + b * x,
            Coeff::Power(p) => x.abs().powf(*p),
            Coeff::Indicator { lo, hi, value } => {
                if x >= *lo && x <= *hi {
                    *value
                } else {
                    0.0
                }
            }
            Coeff::Step { at, value } => {
                if x > *at {
                    *value
                } else {
                    0.0
                }
            }
            Coeff::Bump => {
                let u2 = x * x;
                if u2 < 1.0 {
                    (-1.0 / (1.0 - u2)).exp() / BUMP_MASS
                } else {
                    0.0
                }
            }
            Coeff::Gaussian { sigma, mass } => {
                let z = x / sigma;
                mass * (-0.5 * z * z).exp() / (sigma * (2.0 * std::f64::consts::PI).sqrt())
            }
            Coeff::Table { xs, vs } => {
                if x <= xs[0] {
                    return vs[0];
                }
                if x >= *xs.last().unwrap() {
                    return *vs.last().unwrap();
                }
                let k = xs.partition_point(|&t| t <= x) - 1;
                let t = (x - xs[k]) / (xs[k + 1] - xs[k]);
                vs[k] * (1.0 - t) + vs[k + 1] * t
            }
        }
    }

    /// The dilation identity a(2x) = 2 a(x) characterizing non-mixing growth.
    pub fn is_non_mixing_on(&self, nodes: &[f64]) -> bool {
        nodes.iter().all(|&x| {
            let lhs = self.eval(2.0 * x);
            let rhs = 2.0 * self.eval(x);
            (lhs - rhs).abs() <= 1e-13 * (1.0 + lhs.abs())
        })
    }
}
