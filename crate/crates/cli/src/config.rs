use std::path::{Path, PathBuf};

use dbarg_core::quadrature::QuadratureOptions;
use dbarg_core::selftest::SelftestConfig;
use dbarg_core::weight::InverseMellinOptions;
use serde::{Deserialize, Serialize};

use crate::args::Format;

pub const CONFIG_ENV: &str = "DBARG_CONFIG";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    /// Floor applied to every acceptance threshold; absent means none.
    pub tol: Option<f64>,
    pub series: f64,
    pub quadrature_rel: f64,
    pub quadrature_abs: f64,
    pub mellin_abscissa: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        let q = QuadratureOptions::default();
        Self {
            tol: None,
            series: 1e-15,
            quadrature_rel: q.rel_tol,
            quadrature_abs: q.abs_tol,
            mellin_abscissa: 0.5,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Caps {
    pub quadrature_nodes: usize,
}

impl Default for Caps {
    fn default() -> Self {
        Self {
            quadrature_nodes: QuadratureOptions::default().max_nodes,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Output {
    /// Absent means the command's own default.
    pub format: Option<Format>,
    pub path: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub tolerance: Tolerances,
    pub caps: Caps,
    pub output: Output,
    pub seed: u64,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            tolerance: Tolerances::default(),
            caps: Caps::default(),
            output: Output::default(),
            seed: SelftestConfig::default().seed,
        }
    }
}

impl RunConfig {
    /// `explicit` wins over the environment; neither means defaults.
    pub fn load(explicit: Option<&Path>) -> Result<Self, String> {
        let path = match explicit {
            Some(p) => Some(p.to_path_buf()),
            None => std::env::var_os(CONFIG_ENV)
                .filter(|v| !v.is_empty())
                .map(PathBuf::from),
        };
        let Some(path) = path else {
            return Ok(Self::default());
        };
        let text = std::fs::read_to_string(&path).map_err(|e| format!("cannot read config {}: {e}", path.display()))?;
        let cfg: Self = toml::from_str(&text).map_err(|e| format!("bad config {}: {e}", path.display()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), String> {
        let t = &self.tolerance;
        let positive = [
            ("tolerance.series", t.series),
            ("tolerance.quadrature_rel", t.quadrature_rel),
            ("tolerance.tol", t.tol.unwrap_or(1.0)),
        ];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(format!("{name} must be positive and finite, got {v}"));
            }
        }
        if !(t.quadrature_abs >= 0.0 && t.quadrature_abs.is_finite()) {
            return Err(format!(
                "tolerance.quadrature_abs must be non-negative, got {}",
                t.quadrature_abs
            ));
        }
        if !t.mellin_abscissa.is_finite() {
            return Err("tolerance.mellin_abscissa must be finite".into());
        }
        if self.caps.quadrature_nodes == 0 {
            return Err("caps.quadrature_nodes must be a positive integer".into());
        }
        Ok(())
    }

    pub fn quadrature(&self) -> QuadratureOptions {
        QuadratureOptions {
            abs_tol: self.tolerance.quadrature_abs,
            rel_tol: self.tolerance.quadrature_rel,
            max_nodes: self.caps.quadrature_nodes,
        }
    }

    pub fn inverse_mellin(&self) -> InverseMellinOptions {
        InverseMellinOptions {
            abscissa: self.tolerance.mellin_abscissa,
            quadrature: self.quadrature(),
        }
    }

    pub fn selftest(&self) -> SelftestConfig {
        SelftestConfig {
            tol_floor: self.tolerance.tol.unwrap_or(0.0),
            series_tol: self.tolerance.series,
            quadrature: self.quadrature(),
            seed: self.seed,
        }
    }
}
