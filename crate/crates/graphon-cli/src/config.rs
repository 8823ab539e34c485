//! Sweep configuration: a single TOML file defines the scenario, the grid
//! (n, k, graphons, sparsity, observed fraction), the replicate count and
//! the base seed. CLI flags override individual keys.

use std::collections::HashSet;
use std::fmt;
use std::path::Path;

use serde::Deserialize;

use graphon::rng::derive_seed;
use graphon::{DesignDist, FitOptions, GraphonSpec, InitStrategy, DEFAULT_COVERAGE_FLOOR};

use crate::error::{CliError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scenario {
    SbmRate,
    GraphonRate,
    BiasDecay,
    Completion,
    Opnorm,
    LowerboundAudit,
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Scenario::SbmRate => "sbm-rate",
            Scenario::GraphonRate => "graphon-rate",
            Scenario::BiasDecay => "bias-decay",
            Scenario::Completion => "completion",
            Scenario::Opnorm => "opnorm",
            Scenario::LowerboundAudit => "lowerbound-audit",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FitConfig {
    #[serde(default = "default_restarts")]
    pub restarts: usize,
    #[serde(default = "default_max_iterations")]
    pub max_iterations: usize,
    #[serde(default = "default_tolerance")]
    pub tolerance: f64,
    #[serde(default = "default_init")]
    pub init: String,
}

fn default_restarts() -> usize {
    5
}
fn default_max_iterations() -> usize {
    100
}
fn default_tolerance() -> f64 {
    1e-9
}
fn default_init() -> String {
    "spectral".into()
}

impl Default for FitConfig {
    fn default() -> Self {
        FitConfig {
            restarts: default_restarts(),
            max_iterations: default_max_iterations(),
            tolerance: default_tolerance(),
            init: default_init(),
        }
    }
}

impl FitConfig {
    pub fn to_options(&self) -> Result<FitOptions> {
        if self.restarts == 0 || self.max_iterations == 0 {
            return Err(CliError::Config("fit.restarts and fit.max_iterations must be >= 1".into()));
        }
        if self.tolerance < 0.0 {
            return Err(CliError::Config("fit.tolerance must be nonnegative".into()));
        }
        let init = match self.init.as_str() {
            "spectral" => InitStrategy::Spectral,
            "random" => InitStrategy::Random,
            other => {
                return Err(CliError::Config(format!(
                    "fit.init must be `spectral` or `random`, got `{other}`"
                )))
            }
        };
        Ok(FitOptions {
            restarts: self.restarts,
            max_iterations: self.max_iterations,
            tolerance: self.tolerance,
            init,
        })
    }
}

fn default_unit_vec() -> Vec<f64> {
    vec![1.0]
}
fn default_design() -> String {
    "grid".into()
}
fn default_c1() -> f64 {
    0.1
}
fn default_c2() -> f64 {
    0.1
}
fn default_slope_tolerance() -> f64 {
    0.3
}
fn default_graphons() -> Vec<String> {
    vec!["constant:0.5".into()]
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub scenario: Scenario,
    pub n: Vec<usize>,
    pub k: Vec<usize>,
    #[serde(default = "default_graphons")]
    pub graphons: Vec<String>,
    #[serde(default = "default_unit_vec")]
    pub beta: Vec<f64>,
    #[serde(default = "default_unit_vec")]
    pub omega_fraction: Vec<f64>,
    pub replicates: usize,
    pub base_seed: u64,
    pub output: String,
    /// "grid" or "uniform" latent design.
    #[serde(default = "default_design")]
    pub design: String,
    /// sbm-rate only: estimate blocks through the oracle interval
    /// assignment instead of fitting z.
    #[serde(default)]
    pub oracle_z: bool,
    /// graphon-rate only: ignore the k grid and pick
    /// k = ceil(n^{1/(min(alpha,1)+1)}) per point.
    #[serde(default)]
    pub auto_k: bool,
    #[serde(default = "default_c1")]
    pub c1: f64,
    #[serde(default = "default_c2")]
    pub c2: f64,
    #[serde(default = "default_slope_tolerance")]
    pub slope_tolerance: f64,
    #[serde(default)]
    pub fit: FitConfig,
}

/// One cell of the sweep grid.
#[derive(Debug, Clone)]
pub struct GridPoint {
    pub n: usize,
    pub k: usize,
    pub graphon: GraphonSpec,
    pub beta: f64,
    pub omega_fraction: f64,
}

impl ExperimentConfig {
    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::io(&format!("reading config {}", path.display()), e))?;
        toml::from_str(&text).map_err(|e| CliError::Config(format!("parsing config: {e}")))
    }

    pub fn design_dist(&self) -> Result<DesignDist> {
        match self.design.as_str() {
            "grid" => Ok(DesignDist::FixedGrid),
            "uniform" => Ok(DesignDist::IidUniform),
            other => Err(CliError::Config(format!(
                "design must be `grid` or `uniform`, got `{other}`"
            ))),
        }
    }

    /// The per-(grid point, replicate) seed: splitmix chain over the base
    /// seed, the grid index, and the replicate index.
    pub fn job_seed(&self, grid_index: usize, replicate: usize) -> u64 {
        derive_seed(self.base_seed, &[grid_index as u64, replicate as u64])
    }

    /// Validate and expand the grid in the order n, k, graphon, beta,
    /// omega_fraction; the row order of the output CSV.
    pub fn build_grid(&self) -> Result<Vec<GridPoint>> {
        if self.n.is_empty() || self.k.is_empty() || self.graphons.is_empty() {
            return Err(CliError::Config("grids for n, k and graphons must be nonempty".into()));
        }
        if self.beta.is_empty() || self.omega_fraction.is_empty() {
            return Err(CliError::Config("grids for beta and omega_fraction must be nonempty".into()));
        }
        if self.replicates == 0 {
            return Err(CliError::Config("replicates must be >= 1".into()));
        }
        self.design_dist()?;
        self.fit.to_options()?;
        if let Some(b) = self.beta.iter().find(|b| !(0.0..=1.0).contains(*b)) {
            return Err(CliError::Config(format!("beta {b} outside [0,1]")));
        }
        if let Some(f) = self.omega_fraction.iter().find(|f| !(0.0 < **f && **f <= 1.0)) {
            return Err(CliError::Config(format!("omega_fraction {f} outside (0,1]")));
        }

        let specs: Vec<GraphonSpec> = self
            .graphons
            .iter()
            .map(|id| GraphonSpec::parse(id).map_err(|e| CliError::Config(e.to_string())))
            .collect::<Result<_>>()?;

        let mut grid = Vec::new();
        for &n in &self.n {
            if n < 2 {
                return Err(CliError::Config(format!("n must be >= 2, got {n}")));
            }
            for &k in &self.k {
                for spec in &specs {
                    let k_eff = if self.scenario == Scenario::GraphonRate && self.auto_k {
                        auto_k(n, spec.alpha())
                    } else {
                        k
                    };
                    if k_eff == 0 || k_eff > n {
                        return Err(CliError::Config(format!(
                            "need 1 <= k <= n, got k = {k_eff}, n = {n}"
                        )));
                    }
                    for &beta in &self.beta {
                        for &omega_fraction in &self.omega_fraction {
                            self.check_point(n, k_eff, omega_fraction)?;
                            grid.push(GridPoint {
                                n,
                                k: k_eff,
                                graphon: spec.clone(),
                                beta,
                                omega_fraction,
                            });
                        }
                    }
                }
            }
        }

        // per-replicate seeds must be pairwise distinct across the grid
        let mut seen = HashSet::new();
        for gi in 0..grid.len() {
            for rep in 0..self.replicates {
                if !seen.insert(self.job_seed(gi, rep)) {
                    return Err(CliError::Config(format!(
                        "seed collision at grid point {gi}, replicate {rep}; change base_seed"
                    )));
                }
            }
        }
        Ok(grid)
    }

    fn check_point(&self, n: usize, k: usize, omega_fraction: f64) -> Result<()> {
        match self.scenario {
            Scenario::Completion => {
                let m = (omega_fraction * (n * n) as f64).round();
                if m < 1.0 {
                    return Err(CliError::Config(format!(
                        "omega_fraction {omega_fraction} yields an empty observation set at n = {n}"
                    )));
                }
                if omega_fraction < DEFAULT_COVERAGE_FLOOR {
                    return Err(CliError::Config(format!(
                        "omega_fraction {omega_fraction} below the completion coverage floor {DEFAULT_COVERAGE_FLOOR}"
                    )));
                }
            }
            Scenario::LowerboundAudit => {
                if k < 2 || k % 2 != 0 {
                    return Err(CliError::Config(format!(
                        "lowerbound-audit needs even k >= 2, got {k}"
                    )));
                }
                if n % k != 0 {
                    return Err(CliError::Config(format!(
                        "lowerbound-audit needs k | n, got n = {n}, k = {k}"
                    )));
                }
                let d1 = k * (k - 1) / 2;
                if d1 > graphon::MAX_PACKING_LENGTH {
                    return Err(CliError::Config(format!(
                        "k = {k} needs packings of length {d1}, beyond the supported {}",
                        graphon::MAX_PACKING_LENGTH
                    )));
                }
                let bump = self.c1 * k as f64 / n as f64;
                if !(0.0..=0.25).contains(&bump) {
                    return Err(CliError::Config(format!(
                        "c1 k / n = {bump} outside [0, 1/4]; lower c1"
                    )));
                }
                let eps = (self.c2 * (k as f64).ln() / n as f64).sqrt();
                if !(0.0..=0.25).contains(&eps) {
                    return Err(CliError::Config(format!(
                        "sqrt(c2 log k / n) = {eps} outside [0, 1/4]; lower c2"
                    )));
                }
            }
            _ => {}
        }
        Ok(())
    }
}

/// k = ceil(n^{1/(min(alpha,1)+1)}), the bias/variance balancing choice.
pub fn auto_k(n: usize, alpha: f64) -> usize {
    let exponent = 1.0 / (alpha.min(1.0) + 1.0);
    (n as f64).powf(exponent).ceil() as usize
}
