//! Experiment configuration: a flat key-value TOML file overlaid on
//! per-experiment defaults, validated as a whole (every violation is
//! reported, not just the first).

use serde::{Deserialize, Serialize};
use std::fmt;
use std::path::Path;

use gauge_transfer::EXPONENT_CAP;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Experiment {
    Fig2,
    Fig3,
    Fig4,
    Fig5,
    Fig6,
    Fig7,
    Fig8,
    CrowRwa,
    Custom,
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            Experiment::Fig2 => "fig2",
            Experiment::Fig3 => "fig3",
            Experiment::Fig4 => "fig4",
            Experiment::Fig5 => "fig5",
            Experiment::Fig6 => "fig6",
            Experiment::Fig7 => "fig7",
            Experiment::Fig8 => "fig8",
            Experiment::CrowRwa => "crow-rwa",
            Experiment::Custom => "custom",
        };
        f.write_str(name)
    }
}

/// Raw file contents; unknown keys are rejected by serde.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawConfig {
    pub n_half: Option<usize>,
    pub kappa: Option<f64>,
    pub t_half: Option<f64>,
    pub h_max: Option<f64>,
    pub mismatch_delta: Option<f64>,
    pub mode_index: Option<usize>,
    pub initial: Option<String>,
    pub engine: Option<String>,
    pub samples: Option<usize>,
    pub lab_rtol: Option<f64>,
    pub disorder_kind: Option<String>,
    pub disorder_width: Option<f64>,
    pub disorder_sigma: Option<f64>,
    pub disorder_sites: Option<bool>,
    pub count: Option<usize>,
    pub seed: Option<u64>,
    pub bins: Option<usize>,
    pub sweep_min: Option<f64>,
    pub sweep_max: Option<f64>,
    pub sweep_points: Option<usize>,
    pub rho: Option<f64>,
    pub omega_ratios: Option<Vec<f64>>,
    pub gamma_over_omega: Option<f64>,
    pub phi: Option<f64>,
}

impl RawConfig {
    pub fn load(path: &Path) -> Result<Self, String> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| format!("cannot read config {}: {e}", path.display()))?;
        // keep the reason single-line and machine-parsable
        toml::from_str(&text).map_err(|e| {
            let flat: Vec<&str> = e
                .message()
                .lines()
                .filter(|l| !l.trim().is_empty())
                .collect();
            format!("config parse error: {}", flat.join(" "))
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum InitialKind {
    /// Unit excitation of the left edge site.
    LeftEdgeDelta,
    /// Normalized instantaneous eigenstate (mode `mode_index`).
    Eigenstate,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum EngineKind {
    Gauge,
    Lab,
}

/// Fully resolved parameters; echoed verbatim into every output file.
#[derive(Debug, Clone, Serialize)]
pub struct ResolvedConfig {
    pub experiment: Experiment,
    pub n_half: usize,
    pub kappa: f64,
    pub t_half: f64,
    pub h_max: f64,
    pub mismatch_delta: f64,
    pub mode_index: usize,
    pub initial: InitialKind,
    pub engine: EngineKind,
    pub samples: usize,
    pub lab_rtol: f64,
    pub disorder_kind: Option<String>,
    pub disorder_width: f64,
    pub disorder_sigma: f64,
    pub disorder_sites: bool,
    pub count: usize,
    pub seed: u64,
    pub bins: usize,
    pub sweep_min: f64,
    pub sweep_max: f64,
    pub sweep_points: usize,
    pub rho: f64,
    pub omega_ratios: Vec<f64>,
    pub gamma_over_omega: f64,
    pub phi: f64,
}

pub fn resolve(experiment: Experiment, raw: &RawConfig, seed_flag: Option<u64>) -> ResolvedConfig {
    use Experiment::*;
    let n_half_default = match experiment {
        Fig7 => 10,
        _ => 5,
    };
    let t_half_default = match experiment {
        Fig2 | Fig3 | Fig5 | Custom => 3.0,
        Fig8 => 3.33,
        _ => 3.0,
    };
    let h_max_default = match experiment {
        Fig4 | Fig6 | Fig7 => 4.0,
        Fig8 => 2.0,
        _ => 3.0,
    };
    let initial_default = match experiment {
        Fig2 | Fig3 | Fig5 => InitialKind::Eigenstate,
        _ => InitialKind::LeftEdgeDelta,
    };
    let (sweep_min_default, sweep_max_default, sweep_points_default) = match experiment {
        Fig5 => (-0.5, 0.5, 101),
        _ => (0.25, 8.0, 200),
    };
    let disorder_kind_default = match experiment {
        Fig6 | Fig7 | Fig8 => Some("uniform".to_string()),
        _ => None,
    };
    let disorder_width_default = match experiment {
        Fig6 | Fig7 => 1.0,
        _ => 0.5,
    };
    let disorder_sites_default = matches!(experiment, Fig6 | Fig7);
    let seed_default = match experiment {
        Fig6 => 7,
        Fig7 => 11,
        _ => 1,
    };

    let n_half = raw.n_half.unwrap_or(n_half_default);
    ResolvedConfig {
        experiment,
        n_half,
        kappa: raw.kappa.unwrap_or(1.0),
        t_half: raw.t_half.unwrap_or(t_half_default),
        h_max: raw.h_max.unwrap_or(h_max_default),
        mismatch_delta: raw.mismatch_delta.unwrap_or(0.0),
        mode_index: raw.mode_index.unwrap_or(n_half + 1),
        initial: match raw.initial.as_deref() {
            Some("left-edge-delta") => InitialKind::LeftEdgeDelta,
            Some("eigenstate") => InitialKind::Eigenstate,
            _ => initial_default, // bad strings are reported by validate()
        },
        engine: match raw.engine.as_deref() {
            Some("lab") => EngineKind::Lab,
            _ => EngineKind::Gauge,
        },
        samples: raw.samples.unwrap_or(401),
        lab_rtol: raw.lab_rtol.unwrap_or(1e-10),
        disorder_kind: raw.disorder_kind.clone().or(disorder_kind_default),
        disorder_width: raw.disorder_width.unwrap_or(disorder_width_default),
        disorder_sigma: raw.disorder_sigma.unwrap_or(0.5),
        disorder_sites: raw.disorder_sites.unwrap_or(disorder_sites_default),
        count: raw.count.unwrap_or(10_000),
        seed: seed_flag.or(raw.seed).unwrap_or(seed_default),
        bins: raw.bins.unwrap_or(50),
        sweep_min: raw.sweep_min.unwrap_or(sweep_min_default),
        sweep_max: raw.sweep_max.unwrap_or(sweep_max_default),
        sweep_points: raw.sweep_points.unwrap_or(sweep_points_default),
        rho: raw.rho.unwrap_or(1.0),
        omega_ratios: raw
            .omega_ratios
            .clone()
            .unwrap_or_else(|| vec![20.0, 40.0, 80.0]),
        gamma_over_omega: raw.gamma_over_omega.unwrap_or(1.0),
        phi: raw.phi.unwrap_or(0.5),
    }
}

pub struct Validation {
    pub errors: Vec<String>,
    pub warnings: Vec<String>,
}

/// Check the whole configuration, returning every violation.
pub fn validate(raw: &RawConfig, cfg: &ResolvedConfig) -> Validation {
    let mut errors = Vec::new();
    let mut warnings = Vec::new();

    if !cfg.kappa.is_finite() || cfg.kappa <= 0.0 {
        errors.push(format!("kappa must be finite and > 0 (got {})", cfg.kappa));
    }
    if !cfg.t_half.is_finite() || cfg.t_half <= 0.0 {
        errors.push(format!("T must be finite and > 0 (got {})", cfg.t_half));
    }
    if !cfg.h_max.is_finite() || cfg.h_max < 0.0 {
        errors.push(format!("h_max must be finite and >= 0 (got {})", cfg.h_max));
    }
    if cfg.samples < 2 {
        errors.push(format!("samples must be >= 2 (got {})", cfg.samples));
    }
    if cfg.count == 0 {
        errors.push("count must be >= 1".to_string());
    }
    if cfg.bins == 0 {
        errors.push("bins must be >= 1".to_string());
    }
    if cfg.sweep_points < 2 {
        errors.push(format!(
            "sweep_points must be >= 2 (got {})",
            cfg.sweep_points
        ));
    }
    if cfg.sweep_min.is_nan() || cfg.sweep_max.is_nan() || cfg.sweep_min >= cfg.sweep_max {
        errors.push(format!(
            "sweep_min must be below sweep_max (got {} >= {})",
            cfg.sweep_min, cfg.sweep_max
        ));
    }
    let mode_max = 2 * cfg.n_half + 1;
    if cfg.mode_index == 0 || cfg.mode_index > mode_max {
        errors.push(format!(
            "mode_index must lie in 1..={mode_max} (got {})",
            cfg.mode_index
        ));
    }
    if let Some(s) = raw.initial.as_deref() {
        if s != "left-edge-delta" && s != "eigenstate" {
            errors.push(format!(
                "initial must be 'left-edge-delta' or 'eigenstate' (got '{s}')"
            ));
        }
    }
    if let Some(s) = raw.engine.as_deref() {
        if s != "gauge" && s != "lab" {
            errors.push(format!("engine must be 'gauge' or 'lab' (got '{s}')"));
        }
    }
    match cfg.disorder_kind.as_deref() {
        None | Some("uniform") | Some("normal") => {}
        Some(other) => {
            errors.push(format!(
                "disorder_kind must be 'uniform' or 'normal' (got '{other}')"
            ));
        }
    }
    if cfg.disorder_kind.as_deref() == Some("uniform")
        && (!cfg.disorder_width.is_finite() || cfg.disorder_width <= 0.0)
    {
        errors.push(format!(
            "disorder_width must be finite and > 0 (got {})",
            cfg.disorder_width
        ));
    }
    if cfg.disorder_kind.as_deref() == Some("normal")
        && (!cfg.disorder_sigma.is_finite() || cfg.disorder_sigma <= 0.0)
    {
        errors.push(format!(
            "disorder_sigma must be finite and > 0 (got {})",
            cfg.disorder_sigma
        ));
    }
    if !cfg.rho.is_finite() || cfg.rho <= 0.0 {
        errors.push(format!("rho must be finite and > 0 (got {})", cfg.rho));
    }
    if !cfg.gamma_over_omega.is_finite() || cfg.gamma_over_omega < 0.0 {
        errors.push(format!(
            "gamma_over_omega must be >= 0 (got {})",
            cfg.gamma_over_omega
        ));
    }
    if cfg.omega_ratios.is_empty() {
        errors.push("omega_ratios must not be empty".to_string());
    }
    for &r in &cfg.omega_ratios {
        if !r.is_finite() || r <= 0.0 {
            errors.push(format!(
                "omega_ratios entries must be finite and > 0 (got {r})"
            ));
        }
    }
    if cfg.lab_rtol <= 0.0 || !cfg.lab_rtol.is_finite() {
        errors.push(format!(
            "lab_rtol must be finite and > 0 (got {})",
            cfg.lab_rtol
        ));
    }

    let worst_exponent = cfg.h_max * cfg.n_half as f64;
    if cfg.engine == EngineKind::Lab && worst_exponent > EXPONENT_CAP {
        warnings.push(format!(
            "|h_max * N| = {worst_exponent:.1} exceeds the exponent cap {EXPONENT_CAP}; \
             lab-frame amplitudes will overflow - use the gauge engine for observables"
        ));
    }

    Validation { errors, warnings }
}
