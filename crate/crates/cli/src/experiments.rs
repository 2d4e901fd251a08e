//! One function per experiment. Each writes its data tables (CSV with
//! metadata header) and a JSON summary into the output directory and
//! never touches anything outside it.

use std::path::Path;
use std::time::Instant;

use ndarray::Array1;
use num_complex::Complex64 as C64;
use serde_json::json;

use gauge_transfer::{
    bessel_j0, build_lab_hamiltonian, effective_params, ensemble_transfer, evolve_crow,
    evolve_gauge_frame, evolve_lab_frame, initial_eigenstate, theta_vector, transfer_probability,
    AdaptiveOptions, ChainSpec, CrowSpec, DisorderKind, DisorderRealization, EnsembleOptions,
    EvolutionProblem, GaugeRamp, LatticeState, ModeIndex, PhiSchedule, SitePotentials, Trajectory,
};

use crate::config::{EngineKind, Experiment, InitialKind, ResolvedConfig};
use crate::table::TableWriter;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Summary,
    Both,
}

impl Format {
    fn csv(self) -> bool {
        matches!(self, Format::Csv | Format::Both)
    }

    fn summary(self) -> bool {
        matches!(self, Format::Summary | Format::Both)
    }
}

#[derive(Debug)]
pub enum RunError {
    Numerical(gauge_transfer::Error),
    Io(std::io::Error),
}

impl std::fmt::Display for RunError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            RunError::Numerical(e) => write!(f, "numerical-error: {e}"),
            RunError::Io(e) => write!(f, "io-error: {e}"),
        }
    }
}

impl From<gauge_transfer::Error> for RunError {
    fn from(e: gauge_transfer::Error) -> Self {
        RunError::Numerical(e)
    }
}

impl From<std::io::Error> for RunError {
    fn from(e: std::io::Error) -> Self {
        RunError::Io(e)
    }
}

type RunResult = Result<(), RunError>;

pub fn run_experiment(cfg: &ResolvedConfig, out: &Path, format: Format) -> RunResult {
    let mut writer = TableWriter::new(out, cfg)?;
    match cfg.experiment {
        Experiment::Fig2 => trajectory_figure(cfg, &mut writer, format, "fig2", true),
        Experiment::Fig3 => trajectory_figure(cfg, &mut writer, format, "fig3", false),
        Experiment::Fig4 => fidelity_sweep(cfg, &mut writer, format),
        Experiment::Fig5 => mismatch_sweep(cfg, &mut writer, format),
        Experiment::Fig6 | Experiment::Fig7 => disordered_sweep(cfg, &mut writer, format),
        Experiment::Fig8 => disorder_statistics(cfg, &mut writer, format),
        Experiment::CrowRwa => crow_rwa(cfg, &mut writer, format),
        Experiment::Custom => custom_run(cfg, &mut writer, format),
    }
}

fn chain_of(cfg: &ResolvedConfig) -> Result<ChainSpec, gauge_transfer::Error> {
    ChainSpec::new(cfg.n_half, cfg.kappa)
}

fn ramp_of(cfg: &ResolvedConfig) -> Result<GaugeRamp, gauge_transfer::Error> {
    Ok(GaugeRamp::new(cfg.h_max, cfg.t_half)?.with_mismatch(cfg.mismatch_delta))
}

fn initial_of(
    cfg: &ResolvedConfig,
    chain: &ChainSpec,
    ramp: &GaugeRamp,
) -> Result<LatticeState, gauge_transfer::Error> {
    match cfg.initial {
        InitialKind::LeftEdgeDelta => Ok(LatticeState::left_edge_delta(chain, -ramp.t_half())),
        InitialKind::Eigenstate => {
            let l = ModeIndex::new(cfg.mode_index, chain)?;
            initial_eigenstate(chain, ramp, l).normalized()
        }
    }
}

fn disorder_kind_of(cfg: &ResolvedConfig) -> Option<DisorderKind> {
    match cfg.disorder_kind.as_deref() {
        Some("uniform") => Some(DisorderKind::UniformSymmetric {
            width: cfg.disorder_width,
        }),
        Some("normal") => Some(DisorderKind::Normal {
            sigma: cfg.disorder_sigma,
        }),
        _ => None,
    }
}

fn evolve(
    cfg: &ResolvedConfig,
    problem: &EvolutionProblem,
) -> Result<Trajectory, gauge_transfer::Error> {
    match cfg.engine {
        EngineKind::Gauge => evolve_gauge_frame(problem),
        EngineKind::Lab => evolve_lab_frame(problem),
    }
}

fn edge_probability(traj: &Trajectory) -> f64 {
    transfer_probability(traj)
}

/// fig2 / fig3: full (t, n, p_n) grid and the norm history for the
/// eigenstate-start ramp, with (fig2) or without (fig3) the
/// nonadiabaticity-cancelling gradient.
fn trajectory_figure(
    cfg: &ResolvedConfig,
    writer: &mut TableWriter,
    format: Format,
    prefix: &str,
    cancelled: bool,
) -> RunResult {
    let t0 = Instant::now();
    let chain = chain_of(cfg)?;
    let ramp = ramp_of(cfg)?;
    let pots = if cancelled {
        SitePotentials::cancellation(&chain, &ramp)
    } else {
        SitePotentials::zero(&chain)
    };
    let initial = initial_of(cfg, &chain, &ramp)?;
    let problem = EvolutionProblem::new(chain, ramp, pots, initial)?
        .with_samples(cfg.samples)
        .with_lab_rtol(cfg.lab_rtol);
    let traj = evolve(cfg, &problem)?;

    if format.csv() {
        let sites: Vec<i64> = chain.sites().collect();
        let mut rows = Vec::with_capacity(traj.times.len() * sites.len());
        for (k, &t) in traj.times.iter().enumerate() {
            for (j, &n) in sites.iter().enumerate() {
                rows.push(vec![t, n as f64, traj.pn_series[(k, j)]]);
            }
        }
        writer.write_table(&format!("{prefix}_pn.csv"), &["t", "site", "p"], rows)?;
        let norm_rows: Vec<Vec<f64>> = traj
            .times
            .iter()
            .zip(&traj.norm_series)
            .map(|(&t, &p)| vec![t, p])
            .collect();
        writer.write_table(&format!("{prefix}_norm.csv"), &["t", "norm"], norm_rows)?;
    }
    if format.summary() {
        let results = json!({
            "final_norm": traj.final_norm(),
            "min_norm": traj.min_norm(),
            "edge_probability": edge_probability(&traj),
            "elapsed_ms": t0.elapsed().as_millis() as u64,
        });
        writer.write_summary(&format!("{prefix}_summary.json"), cfg, results)?;
    }
    Ok(())
}

/// fig4: transfer probability and final norm against the interaction
/// time, ordered chain, delta start, next to the Hermitian reference.
fn fidelity_sweep(cfg: &ResolvedConfig, writer: &mut TableWriter, format: Format) -> RunResult {
    let t0 = Instant::now();
    let chain = chain_of(cfg)?;
    let m = chain.site_count();
    let mut rows = Vec::with_capacity(cfg.sweep_points);
    let mut above_count = 0usize;
    for k in 0..cfg.sweep_points {
        let kt = cfg.sweep_min
            + (cfg.sweep_max - cfg.sweep_min) * k as f64 / (cfg.sweep_points - 1) as f64;
        let t_half = kt / cfg.kappa;
        let ramp = GaugeRamp::new(cfg.h_max, t_half)?.with_mismatch(cfg.mismatch_delta);
        let problem = EvolutionProblem::new(
            chain,
            ramp,
            SitePotentials::cancellation(&chain, &ramp),
            LatticeState::left_edge_delta(&chain, -t_half),
        )?
        .with_samples(2);
        let traj = evolve_gauge_frame(&problem)?;
        let p_edge = edge_probability(&traj);
        let herm = theta_vector(&chain, t_half)[m - 1].norm_sqr();
        if p_edge > 0.99 {
            above_count += 1;
        }
        rows.push(vec![kt, p_edge, herm, traj.final_norm()]);
    }
    let fraction = above_count as f64 / cfg.sweep_points as f64;
    if format.csv() {
        writer.write_table(
            "fig4_sweep.csv",
            &["kappa_t", "p_edge", "p_edge_hermitian", "final_norm"],
            rows,
        )?;
    }
    if format.summary() {
        let results = json!({
            "fraction_above_0p99": fraction,
            "elapsed_ms": t0.elapsed().as_millis() as u64,
        });
        writer.write_summary("fig4_summary.json", cfg, results)?;
    }
    Ok(())
}

/// fig5: transfer probability against the gradient mismatch delta for
/// the eigenstate start.
fn mismatch_sweep(cfg: &ResolvedConfig, writer: &mut TableWriter, format: Format) -> RunResult {
    let t0 = Instant::now();
    let chain = chain_of(cfg)?;
    let mut rows = Vec::with_capacity(cfg.sweep_points);
    let mut best = (f64::NAN, f64::NEG_INFINITY);
    let mut min_inner = f64::INFINITY;
    for k in 0..cfg.sweep_points {
        let delta = cfg.sweep_min
            + (cfg.sweep_max - cfg.sweep_min) * k as f64 / (cfg.sweep_points - 1) as f64;
        let ramp = GaugeRamp::new(cfg.h_max, cfg.t_half)?.with_mismatch(delta);
        let initial = initial_of(cfg, &chain, &ramp)?;
        let problem = EvolutionProblem::new(
            chain,
            ramp,
            SitePotentials::cancellation(&chain, &ramp),
            initial,
        )?
        .with_samples(2);
        let p_edge = edge_probability(&evolve_gauge_frame(&problem)?);
        if p_edge > best.1 {
            best = (delta, p_edge);
        }
        if delta.abs() <= 0.2 {
            min_inner = min_inner.min(p_edge);
        }
        rows.push(vec![delta, p_edge]);
    }
    if format.csv() {
        writer.write_table("fig5_sweep.csv", &["mismatch_delta", "p_edge"], rows)?;
    }
    if format.summary() {
        let results = json!({
            "argmax_delta": best.0,
            "max_p_edge": best.1,
            "min_p_edge_within_0p2": min_inner,
            "elapsed_ms": t0.elapsed().as_millis() as u64,
        });
        writer.write_summary("fig5_summary.json", cfg, results)?;
    }
    Ok(())
}

/// fig6 / fig7: transfer-vs-time curves for one frozen disorder
/// realization, gauge-assisted against Hermitian.
fn disordered_sweep(cfg: &ResolvedConfig, writer: &mut TableWriter, format: Format) -> RunResult {
    let t0 = Instant::now();
    let prefix = cfg.experiment.to_string();
    let chain = chain_of(cfg)?;
    let kind = disorder_kind_of(cfg).expect("validated: fig6/fig7 have a disorder kind");
    let realization = if cfg.disorder_sites {
        DisorderRealization::sample(&chain, kind, cfg.seed)?
    } else {
        DisorderRealization::sample_hopping(&chain, kind, cfg.seed)?
    };
    let ramp = GaugeRamp::new(cfg.h_max, 1.0)?.with_mismatch(cfg.mismatch_delta);
    let grid: Vec<f64> = (0..cfg.sweep_points)
        .map(|k| {
            (cfg.sweep_min
                + (cfg.sweep_max - cfg.sweep_min) * k as f64 / (cfg.sweep_points - 1) as f64)
                / cfg.kappa
        })
        .collect();
    let points = gauge_transfer::disorder_sweep_t(&chain, &ramp, &realization, &grid)?;

    if format.csv() {
        let rows: Vec<Vec<f64>> = points
            .iter()
            .map(|p| vec![p.t_half * cfg.kappa, p.p_gauge, p.p_hermitian])
            .collect();
        writer.write_table(
            &format!("{prefix}_sweep.csv"),
            &["kappa_t", "p_edge", "p_edge_hermitian"],
            rows,
        )?;
        let bond_rows: Vec<Vec<f64>> = realization
            .delta_n()
            .iter()
            .enumerate()
            .map(|(i, &d)| vec![i as f64, d])
            .collect();
        writer.write_table(
            &format!("{prefix}_disorder_bonds.csv"),
            &["bond_index", "delta"],
            bond_rows,
        )?;
        let site_rows: Vec<Vec<f64>> = chain
            .sites()
            .zip(realization.e_n())
            .map(|(n, &e)| vec![n as f64, e])
            .collect();
        writer.write_table(
            &format!("{prefix}_disorder_sites.csv"),
            &["site", "energy"],
            site_rows,
        )?;
    }
    if format.summary() {
        let gauge_tail: Vec<f64> = points
            .iter()
            .filter(|p| p.t_half * cfg.kappa >= 2.0)
            .map(|p| p.p_gauge)
            .collect();
        let herm_all: Vec<f64> = points.iter().map(|p| p.p_hermitian).collect();
        let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len().max(1) as f64;
        let results = json!({
            "gauge_mean_from_kt2": mean(&gauge_tail),
            "hermitian_mean": mean(&herm_all),
            "hermitian_max": herm_all.iter().copied().fold(f64::NEG_INFINITY, f64::max),
            "elapsed_ms": t0.elapsed().as_millis() as u64,
        });
        writer.write_summary(&format!("{prefix}_summary.json"), cfg, results)?;
    }
    Ok(())
}

/// fig8: paired transfer statistics over disorder ensembles, one uniform
/// and one normal, with identical protocol parameters.
fn disorder_statistics(
    cfg: &ResolvedConfig,
    writer: &mut TableWriter,
    format: Format,
) -> RunResult {
    let t0 = Instant::now();
    let chain = chain_of(cfg)?;
    let ramp = GaugeRamp::new(cfg.h_max, cfg.t_half)?;
    let opts = EnsembleOptions::new(cfg.count, cfg.seed)
        .with_bin_count(cfg.bins)
        .with_site_disorder(cfg.disorder_sites);

    let uniform = ensemble_transfer(
        &chain,
        &ramp,
        DisorderKind::UniformSymmetric {
            width: cfg.disorder_width,
        },
        &opts,
    )?;
    let normal = ensemble_transfer(
        &chain,
        &ramp,
        DisorderKind::Normal {
            sigma: cfg.disorder_sigma,
        },
        &opts,
    )?;

    if format.csv() {
        for (name, res) in [("uniform", &uniform), ("normal", &normal)] {
            let rows: Vec<Vec<f64>> = res
                .p_transfer
                .iter()
                .zip(&res.p_hermitian)
                .enumerate()
                .map(|(i, (&pg, &ph))| vec![i as f64, pg, ph])
                .collect();
            writer.write_table(
                &format!("fig8_{name}.csv"),
                &["realization", "p_edge", "p_edge_hermitian"],
                rows,
            )?;
            let bin_w = 1.0 / cfg.bins as f64;
            let hist_rows: Vec<Vec<f64>> = (0..cfg.bins)
                .map(|b| {
                    vec![
                        b as f64 * bin_w,
                        (b + 1) as f64 * bin_w,
                        res.transfer_summary.histogram[b] as f64,
                        res.hermitian_summary.histogram[b] as f64,
                    ]
                })
                .collect();
            writer.write_table(
                &format!("fig8_hist_{name}.csv"),
                &["bin_lo", "bin_hi", "count_gauge", "count_hermitian"],
                hist_rows,
            )?;
        }
    }
    if format.summary() {
        let block = |res: &gauge_transfer::EnsembleResult| {
            json!({
                "gauge_mean": res.transfer_summary.mean,
                "gauge_std": res.transfer_summary.std_dev,
                "hermitian_mean": res.hermitian_summary.mean,
                "hermitian_std": res.hermitian_summary.std_dev,
                "separation": res.transfer_summary.mean - res.hermitian_summary.mean,
                "failures": res.failures,
            })
        };
        let results = json!({
            "uniform": block(&uniform),
            "normal": block(&normal),
            "elapsed_ms": t0.elapsed().as_millis() as u64,
        });
        writer.write_summary("fig8_summary.json", cfg, results)?;
    }
    Ok(())
}

/// crow-rwa: stroboscopic distance between the modulated resonator chain
/// and its effective constant-field model, for each Omega/rho ratio.
fn crow_rwa(cfg: &ResolvedConfig, writer: &mut TableWriter, format: Format) -> RunResult {
    let t0 = Instant::now();
    let m = 2 * cfg.n_half + 1;
    let mut rows = Vec::new();
    let mut maxima = Vec::new();
    for &ratio in &cfg.omega_ratios {
        let omega = ratio * cfg.rho;
        let spec = CrowSpec::new(cfg.rho, omega, cfg.gamma_over_omega * omega)?
            .with_phi(PhiSchedule::Constant(cfg.phi))?;
        let params = effective_params(&spec, cfg.phi);
        let period = 2.0 * std::f64::consts::PI / omega;
        let n_periods = ((3.0 / params.kappa_eff) / period).ceil() as usize;
        let mut b0 = Array1::zeros(m);
        b0[0] = C64::new(1.0, 0.0);
        let opts = AdaptiveOptions {
            rtol: 1e-9,
            ..Default::default()
        };
        let traj = evolve_crow(
            &spec,
            m,
            &b0,
            (0.0, period * n_periods as f64),
            n_periods + 1,
            &opts,
        )?;

        let chain = ChainSpec::new(cfg.n_half, params.kappa_eff)?;
        let ham = build_lab_hamiltonian(&chain, params.h_eff, &SitePotentials::zero(&chain), None)?;
        let mut worst: f64 = 0.0;
        for k in 1..traj.times.len() {
            let t = traj.times[k];
            let u = gauge_transfer::expm::expm(&ham.mapv(|z| z * C64::new(0.0, -t)));
            let mut pc: Vec<f64> = (0..m).map(|i| u[(i, 0)].norm_sqr()).collect();
            let total: f64 = pc.iter().sum();
            pc.iter_mut().for_each(|p| *p /= total);
            let mut disc: f64 = 0.0;
            for (p_raw, p_eff) in traj.pn_series.row(k).iter().zip(&pc) {
                disc = disc.max((p_raw - p_eff).abs());
            }
            rows.push(vec![ratio, t, disc]);
            worst = worst.max(disc);
        }
        maxima.push((ratio, worst));
    }
    if format.csv() {
        writer.write_table(
            "crow_rwa.csv",
            &["omega_over_rho", "t", "max_pn_discrepancy"],
            rows,
        )?;
    }
    if format.summary() {
        let monotone = maxima.windows(2).all(|w| w[1].1 < w[0].1);
        let results = json!({
            "max_discrepancy_per_ratio": maxima
                .iter()
                .map(|(r, d)| json!({"omega_over_rho": r, "discrepancy": d}))
                .collect::<Vec<_>>(),
            "monotone_decreasing": monotone,
            "bessel_j0_first_zero": bessel_j0(2.40482555769577),
            "elapsed_ms": t0.elapsed().as_millis() as u64,
        });
        writer.write_summary("crow_rwa_summary.json", cfg, results)?;
    }
    Ok(())
}

/// custom: a single fully config-driven ramp evolution. The cancellation
/// gradient follows the mismatch knob (mismatch_delta = -1 turns the
/// site potentials off entirely).
fn custom_run(cfg: &ResolvedConfig, writer: &mut TableWriter, format: Format) -> RunResult {
    let t0 = Instant::now();
    let chain = chain_of(cfg)?;
    let ramp = ramp_of(cfg)?;
    let pots = SitePotentials::cancellation(&chain, &ramp);
    let initial = initial_of(cfg, &chain, &ramp)?;
    let mut problem = EvolutionProblem::new(chain, ramp, pots, initial)?
        .with_samples(cfg.samples)
        .with_lab_rtol(cfg.lab_rtol);
    if let Some(kind) = disorder_kind_of(cfg) {
        let dis = if cfg.disorder_sites {
            DisorderRealization::sample(&chain, kind, cfg.seed)?
        } else {
            DisorderRealization::sample_hopping(&chain, kind, cfg.seed)?
        };
        problem = problem.with_disorder(dis)?;
    }
    let traj = evolve(cfg, &problem)?;

    if format.csv() {
        let sites: Vec<i64> = chain.sites().collect();
        let mut rows = Vec::with_capacity(traj.times.len() * sites.len());
        for (k, &t) in traj.times.iter().enumerate() {
            for (j, &n) in sites.iter().enumerate() {
                rows.push(vec![t, n as f64, traj.pn_series[(k, j)]]);
            }
        }
        writer.write_table("custom_pn.csv", &["t", "site", "p"], rows)?;
        let norm_rows: Vec<Vec<f64>> = traj
            .times
            .iter()
            .zip(&traj.norm_series)
            .map(|(&t, &p)| vec![t, p])
            .collect();
        writer.write_table("custom_norm.csv", &["t", "norm"], norm_rows)?;
        let final_state = traj.final_state();
        let final_pn = traj.final_pn();
        let final_rows: Vec<Vec<f64>> = sites
            .iter()
            .enumerate()
            .map(|(j, &n)| {
                let a = final_state.amplitudes()[j];
                vec![n as f64, a.re, a.im, final_pn[j]]
            })
            .collect();
        writer.write_table(
            "custom_final.csv",
            &["site", "amp_re", "amp_im", "p"],
            final_rows,
        )?;
    }
    if format.summary() {
        let results = json!({
            "final_norm": traj.final_norm(),
            "min_norm": traj.min_norm(),
            "edge_probability": edge_probability(&traj),
            "state_frame": match traj.frame() {
                gauge_transfer::Frame::Gauge => "gauge",
                gauge_transfer::Frame::Lab => "lab",
            },
            "elapsed_ms": t0.elapsed().as_millis() as u64,
        });
        writer.write_summary("custom_summary.json", cfg, results)?;
    }
    Ok(())
}
