//! Run configuration: sections of `key = value` lines.
//!
//! ```text
//! [model]
//! type = renewal
//! birth = constant:2
//! death = constant:1
//!
//! [grid]
//! y_max = 20
//! n = 2000
//! ```
//!
//! Unknown keys are errors, not warnings. Comments start with `#`.

use crate::error::{Error, Result};
use crate::generator::PositiveGenerator;
use crate::grid::WeightedGrid;
use crate::models::{
    build_diffusion_1d, build_mitosis, build_mutation_selection, build_renewal, build_singular_ms,
    Coeff, Diffusion1DModel, MitosisModel, MutationSelectionModel, RenewalModel, SingularMSModel,
};
use crate::storage::MatrixOp;
use nalgebra::DMatrix;
use std::collections::BTreeMap;

#[derive(Debug, Clone, Default)]
pub struct Section {
    entries: BTreeMap<String, String>,
    consumed: std::cell::RefCell<Vec<String>>,
}

impl Section {
    fn insert(&mut self, key: &str, value: &str) -> Result<()> {
        if self
            .entries
            .insert(key.to_string(), value.to_string())
            .is_some()
        {
            return Err(Error::Config(format!("duplicate key '{key}'")));
        }
        Ok(())
    }

    pub fn get(&self, key: &str) -> Option<String> {
        let v = self.entries.get(key).cloned();
        if v.is_some() {
            self.consumed.borrow_mut().push(key.to_string());
        }
        v
    }

    pub fn require(&self, key: &str, section: &str) -> Result<String> {
        self.get(key)
            .ok_or_else(|| Error::Config(format!("missing key '{key}' in [{section}]")))
    }

    pub fn f64(&self, key: &str, section: &str) -> Result<f64> {
        self.require(key, section)?.parse::<f64>().map_err(|_| {
            Error::Config(format!("key '{key}' in [{section}] is not a number"))
        })
    }

    pub fn f64_or(&self, key: &str, default: f64) -> Result<f64> {
        match self.get(key) {
            Some(v) => v
                .parse::<f64>()
                .map_err(|_| Error::Config(format!("key '{key}' is not a number"))),
            None => Ok(default),
        }
    }

    pub fn usize_of(&self, key: &str, section: &str) -> Result<usize> {
        self.require(key, section)?.parse::<usize>().map_err(|_| {
            Error::Config(format!("key '{key}' in [{section}] is not an integer"))
        })
    }

    pub fn usize_or(&self, key: &str, default: usize) -> Result<usize> {
        match self.get(key) {
            Some(v) => v
                .parse::<usize>()
                .map_err(|_| Error::Config(format!("key '{key}' is not an integer"))),
            None => Ok(default),
        }
    }

    pub fn string_or(&self, key: &str, default: &str) -> String {
        self.get(key).unwrap_or_else(|| default.to_string())
    }

    pub fn coeff(&self, key: &str, section: &str) -> Result<Coeff> {
        Coeff::parse(&self.require(key, section)?)
    }

    pub fn coeff_or(&self, key: &str, default: &str) -> Result<Coeff> {
        Coeff::parse(&self.string_or(key, default))
    }

    /// Comma-separated list of numbers.
    pub fn f64_list(&self, key: &str) -> Result<Option<Vec<f64>>> {
        match self.get(key) {
            None => Ok(None),
            Some(v) => {
                let vals: std::result::Result<Vec<f64>, _> =
                    v.split(',').map(|t| t.trim().parse::<f64>()).collect();
                vals.map(Some)
                    .map_err(|_| Error::Config(format!("bad number list in '{key}'")))
            }
        }
    }

    pub fn usize_list_or(&self, key: &str, default: Vec<usize>) -> Result<Vec<usize>> {
        match self.get(key) {
            None => Ok(default),
            Some(v) => v
                .split(',')
                .map(|t| {
                    t.trim()
                        .parse::<usize>()
                        .map_err(|_| Error::Config(format!("bad integer list in '{key}'")))
                })
                .collect(),
        }
    }

    /// Every key must have been consumed by now; leftovers are errors.
    fn check_consumed(&self, section: &str) -> Result<()> {
        let consumed = self.consumed.borrow();
        for key in self.entries.keys() {
            if !consumed.contains(key) {
                return Err(Error::Config(format!(
                    "unknown key '{key}' in section [{section}]"
                )));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Default)]
pub struct RunConfig {
    sections: BTreeMap<String, Section>,
}

const KNOWN_SECTIONS: &[&str] = &[
    "model", "grid", "solver", "certify", "simulate", "output", "sweep",
];

impl RunConfig {
    pub fn parse(text: &str) -> Result<RunConfig> {
        let mut sections: BTreeMap<String, Section> = BTreeMap::new();
        let mut current: Option<String> = None;
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            if line.starts_with('[') {
                if !line.ends_with(']') {
                    return Err(Error::Config(format!(
                        "line {}: malformed section header '{line}'",
                        lineno + 1
                    )));
                }
                let name = line[1..line.len() - 1].trim().to_string();
                if !KNOWN_SECTIONS.contains(&name.as_str()) {
                    return Err(Error::Config(format!("unknown section [{name}]")));
                }
                if sections.contains_key(&name) {
                    return Err(Error::Config(format!("duplicate section [{name}]")));
                }
                sections.insert(name.clone(), Section::default());
                current = Some(name);
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                Error::Config(format!("line {}: expected 'key = value'", lineno + 1))
            })?;
            let section = current
                .as_ref()
                .ok_or_else(|| Error::Config(format!("line {}: key outside any section", lineno + 1)))?;
            sections
                .get_mut(section)
                .unwrap()
                .insert(key.trim(), value.trim())?;
        }
        if !sections.contains_key("model") {
            return Err(Error::Config("missing [model] section".into()));
        }
        Ok(RunConfig { sections })
    }

    pub fn load(path: &std::path::Path) -> Result<RunConfig> {
        let text = std::fs::read_to_string(path)?;
        RunConfig::parse(&text)
    }

    pub fn section(&self, name: &str) -> Option<&Section> {
        self.sections.get(name)
    }

    pub fn model(&self) -> &Section {
        self.sections.get("model").expect("checked at parse")
    }

    fn grid_section(&self) -> Section {
        self.sections.get("grid").cloned().unwrap_or_default()
    }

    /// Declared model type.
    pub fn model_type(&self) -> Result<String> {
        self.model().require("type", "model")
    }

    /// Build the generator, with optional overrides for the resolution-like
    /// parameter (n / n_axis) and the sweep parameter epsilon.
    pub fn build_generator(
        &self,
        n_override: Option<usize>,
        epsilon_override: Option<f64>,
    ) -> Result<PositiveGenerator> {
        let model = self.model();
        let grid = self.grid_section();
        let ty = self.model_type()?;
        let gen = match ty.as_str() {
            "renewal" => {
                let m = RenewalModel {
                    death: model.coeff("death", "model")?,
                    birth: model.coeff("birth", "model")?,
                    y_max: grid.f64("y_max", "grid")?,
                    n: n_override.unwrap_or(grid.usize_of("n", "grid")?),
                };
                build_renewal(&m)?
            }
            "mitosis" => {
                let m = MitosisModel {
                    growth: model.coeff("growth", "model")?,
                    frag: model.coeff("frag", "model")?,
                    x0: grid.f64_or("x0", 1.0)?,
                    q: grid.usize_of("q", "grid").map_err(|_| {
                        Error::Config("geometric_ratio required: set 'q' in [grid]".into())
                    })?,
                    levels: grid.usize_of("levels", "grid")?,
                    weight_r: match grid.coeff_or("weight", "power:2")? {
                        Coeff::Power(r) => r,
                        Coeff::Constant(_) => 0.0,
                        other => {
                            return Err(Error::Config(format!(
                                "mitosis weight must be power:r or constant, got {other:?}"
                            )))
                        }
                    },
                    kb1_floor: grid.f64_or("kb1_floor", 1.0)?,
                };
                let _ = n_override;
                build_mitosis(&m)?
            }
            "mutation_selection" => {
                let m = MutationSelectionModel {
                    kernel: model.coeff("kernel", "model")?,
                    potential: model.coeff("potential", "model")?,
                    radius: grid.f64("radius", "grid")?,
                    n: n_override.unwrap_or(grid.usize_of("n", "grid")?),
                    a_lo: model.f64_or("a_lo", -1.0)?,
                    a_hi: model.f64_or("a_hi", 1.0)?,
                    beta: model.f64_or("beta", 1.0 / 16.0)?,
                };
                build_mutation_selection(&m)?
            }
            "singular_ms" => {
                let m = self.singular_model(n_override, epsilon_override)?;
                build_singular_ms(&m)?
            }
            "diffusion1d" => {
                let m = Diffusion1DModel {
                    drift: model.coeff_or("drift", "constant:0")?,
                    potential: model.coeff_or("potential", "constant:0")?,
                    x_lo: grid.f64_or("x_lo", 0.0)?,
                    x_hi: grid.f64("x_hi", "grid")?,
                    n: n_override.unwrap_or(grid.usize_of("n", "grid")?),
                };
                build_diffusion_1d(&m)?
            }
            "matrix" => {
                let entries = model.require("entries", "model")?;
                let rows: Vec<Vec<f64>> = entries
                    .split(';')
                    .map(|row| {
                        row.split(',')
                            .map(|t| {
                                t.trim().parse::<f64>().map_err(|_| {
                                    Error::Config(format!("bad matrix entry '{t}'"))
                                })
                            })
                            .collect()
                    })
                    .collect::<Result<_>>()?;
                let n = rows.len();
                if rows.iter().any(|r| r.len() != n) {
                    return Err(Error::Config("matrix must be square".into()));
                }
                let flat: Vec<f64> = rows.into_iter().flatten().collect();
                let weights = model
                    .f64_list("weights")?
                    .unwrap_or_else(|| vec![1.0; n]);
                let weight_m = model
                    .f64_list("weight_m")?
                    .unwrap_or_else(|| vec![1.0; n]);
                let grid_w = WeightedGrid::new_1d(
                    (0..n).map(|i| i as f64).collect(),
                    weights,
                    weight_m,
                    None,
                )?;
                PositiveGenerator::new(
                    MatrixOp::Dense(DMatrix::from_row_slice(n, n, &flat)),
                    grid_w,
                    "matrix",
                )?
            }
            other => return Err(Error::Config(format!("unknown model type '{other}'"))),
        };
        model.check_consumed("model")?;
        grid.check_consumed("grid")?;
        Ok(gen)
    }

    /// The explicit singular model (needed for kappa reports and sweeps).
    pub fn singular_model(
        &self,
        n_override: Option<usize>,
        epsilon_override: Option<f64>,
    ) -> Result<SingularMSModel> {
        let model = self.model();
        let grid = self.grid_section();
        let d = model.usize_or("d", 1)?;
        let masses = model
            .f64_list("masses")?
            .unwrap_or_else(|| vec![1.0; d]);
        let sigmas = model
            .f64_list("sigmas")?
            .unwrap_or_else(|| vec![1.0; d]);
        Ok(SingularMSModel {
            d,
            masses,
            sigmas,
            epsilon: epsilon_override
                .map(Ok)
                .unwrap_or_else(|| model.f64("epsilon", "model"))?,
            potential: model.coeff_or("potential", "power:2")?,
            radius: grid.f64("radius", "grid")?,
            n_axis: n_override.unwrap_or(grid.usize_of("n_axis", "grid")?),
        })
    }

    /// Resolution list for eig sweeps: the grid key n (or n_axis) may be a
    /// comma list.
    pub fn resolutions(&self) -> Result<Vec<usize>> {
        let grid = self.grid_section();
        let key = if self.model_type()? == "singular_ms" {
            "n_axis"
        } else {
            "n"
        };
        match grid.get(key) {
            None => Ok(vec![]),
            Some(v) => v
                .split(',')
                .map(|t| {
                    t.trim()
                        .parse::<usize>()
                        .map_err(|_| Error::Config(format!("bad resolution '{t}'")))
                })
                .collect(),
        }
    }
}
