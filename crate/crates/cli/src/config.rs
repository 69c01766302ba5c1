//! The JSON run configuration.

use std::path::Path;

use hermkr_core::{CmPair, ImagQuadField, KElem, TotallyRealField};
use serde::Deserialize;

use crate::CliError;

/// Entries of `O_k`-matrices are written as `[x, y]` for `x + yω`.
pub type PairMatrix = Vec<Vec<[i64; 2]>>;

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub d_k: i64,
    #[serde(rename = "F_poly", default)]
    pub f_poly: Option<Vec<i64>>,
    #[serde(default)]
    pub m_range: Vec<i64>,
    #[serde(default)]
    pub v_list: Vec<f64>,
    #[serde(default = "default_tol")]
    pub tol: f64,
    #[serde(default)]
    pub green: Option<GreenConfig>,
    #[serde(default)]
    pub lattice: Option<LatticeConfig>,
    #[serde(default)]
    pub rho: Option<RhoConfig>,
    /// Seed for randomized test drivers; every subcommand is deterministic and draws none.
    #[serde(default)]
    #[allow(dead_code)]
    pub seed: u64,
}

fn default_tol() -> f64 {
    1e-10
}

/// A cusp chart with `Λ`-block `A` and a ray of points with fixed `u`, `Re z = x` and
/// `|q|` running geometrically from `q_start` down to `q_end`.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GreenConfig {
    pub n: usize,
    #[serde(rename = "A")]
    pub a: PairMatrix,
    /// Defaults to the first entry of `m_range`.
    #[serde(default)]
    pub m: Option<i64>,
    /// Defaults to the first entry of `v_list`.
    #[serde(default)]
    pub v: Option<f64>,
    /// `u` as `[re, im]` pairs.
    pub u: Vec<[f64; 2]>,
    #[serde(default)]
    pub x: f64,
    pub q_start: f64,
    pub q_end: f64,
    #[serde(default = "default_points_per_decade")]
    pub points_per_decade: usize,
    #[serde(default = "default_window")]
    pub window: f64,
    #[serde(default = "default_max_radius")]
    pub max_radius: f64,
}

fn default_points_per_decade() -> usize {
    2
}

fn default_window() -> f64 {
    1.0
}

fn default_max_radius() -> f64 {
    1e4
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LatticeConfig {
    pub gram: PairMatrix,
    /// Norms to count; defaults to the positive entries of `m_range`.
    #[serde(default)]
    pub counts: Option<Vec<i64>>,
    #[serde(default = "default_isotropic_bound")]
    pub isotropic_bound: u32,
    /// Isotropic vector for the normal decomposition; defaults to the first one found.
    #[serde(default)]
    pub e: Option<Vec<[i64; 2]>>,
}

fn default_isotropic_bound() -> u32 {
    2
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RhoConfig {
    /// Ideals of `F` by generators in the power basis of `θ`. When absent, every prime
    /// power of norm at most `norm_bound` is tabulated.
    #[serde(default)]
    pub ideals: Option<Vec<Vec<Vec<i64>>>>,
    #[serde(default = "default_norm_bound")]
    pub norm_bound: u64,
}

fn default_norm_bound() -> u64 {
    100
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self, CliError> {
        let cfg: RunConfig = serde_json::from_str(text).map_err(|e| CliError::Config(format!("config: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    fn validate(&self) -> Result<(), CliError> {
        self.field()?;
        if self.m_range.contains(&0) {
            return Err(CliError::Config("m_range: m = 0 is not allowed".into()));
        }
        if let Some(v) = self.v_list.iter().find(|v| !(**v > 0.0 && v.is_finite())) {
            return Err(CliError::Config(format!("v_list: {v} is not a positive real")));
        }
        if !(self.tol > 0.0) {
            return Err(CliError::Config(format!("tol: {} is not positive", self.tol)));
        }
        if let Some(g) = &self.green {
            if g.n != g.a.len() + 2 {
                return Err(CliError::Config(format!("green: n = {} but A has rank {}", g.n, g.a.len())));
            }
            if g.u.len() != g.a.len() {
                return Err(CliError::Config(format!("green: u has length {}, expected {}", g.u.len(), g.a.len())));
            }
            if !(0.0 < g.q_end && g.q_end < g.q_start && g.q_start < 1.0) {
                return Err(CliError::Config("green: need 0 < q_end < q_start < 1".into()));
            }
            if g.points_per_decade == 0 {
                return Err(CliError::Config("green: points_per_decade must be positive".into()));
            }
            square(&g.a, "green.A")?;
        }
        if let Some(l) = &self.lattice {
            square(&l.gram, "lattice.gram")?;
            if let Some(e) = &l.e {
                if e.len() != l.gram.len() {
                    return Err(CliError::Config("lattice.e: length differs from the rank".into()));
                }
            }
        }
        Ok(())
    }

    pub fn field(&self) -> Result<ImagQuadField, CliError> {
        ImagQuadField::new(self.d_k).map_err(|e| CliError::Config(format!("d_k: {e}")))
    }

    pub fn pair(&self) -> Result<CmPair, CliError> {
        let poly = self.f_poly.as_ref().ok_or_else(|| CliError::Config("F_poly is required".into()))?;
        let f = TotallyRealField::new(poly).map_err(|e| CliError::Config(format!("F_poly: {e}")))?;
        CmPair::new(self.field()?, f).map_err(|e| CliError::Config(e.to_string()))
    }
}

fn square(m: &PairMatrix, what: &str) -> Result<(), CliError> {
    if m.iter().any(|r| r.len() != m.len()) {
        return Err(CliError::Config(format!("{what}: matrix is not square")));
    }
    Ok(())
}

pub fn to_kmatrix(m: &PairMatrix) -> Vec<Vec<KElem>> {
    m.iter().map(|r| r.iter().map(|x| KElem::from_ints(x[0], x[1])).collect()).collect()
}
