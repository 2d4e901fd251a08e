//! Disorder realizations and Monte Carlo transfer statistics.
//!
//! Reproducibility contract: a realization is fully determined by
//! (kind, seed, chain size), and ensemble member `r` draws from the seed
//! `mix_seed(base_seed, r)`, so parallel and serial runs produce
//! bit-identical results in any scheduling order.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::chain::{ChainSpec, GaugeRamp, LatticeState, SitePotentials};
use crate::dynamics::{evolve_gauge_frame, transfer_probability, EvolutionProblem};
use crate::error::{Error, Result};

/// Distribution the per-bond (and optionally per-site) disorder is drawn
/// from. `UniformSymmetric { width: w }` samples the open interval
/// (-w, w); `Normal { sigma }` is a centered normal.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum DisorderKind {
    UniformSymmetric { width: f64 },
    Normal { sigma: f64 },
}

impl DisorderKind {
    fn validate(&self) -> Result<()> {
        let (name, v) = match self {
            DisorderKind::UniformSymmetric { width } => ("width", *width),
            DisorderKind::Normal { sigma } => ("sigma", *sigma),
        };
        if !v.is_finite() || v <= 0.0 {
            return Err(Error::InvalidParameter {
                name: "disorder",
                reason: format!("{name} must be finite and > 0, got {v}"),
            });
        }
        Ok(())
    }

    fn draw(&self, rng: &mut ChaCha8Rng) -> f64 {
        match self {
            DisorderKind::UniformSymmetric { width } => loop {
                let x = rng.gen_range(-width..*width);
                if x != -width {
                    return x;
                }
            },
            DisorderKind::Normal { sigma } => Normal::new(0.0, *sigma)
                .expect("validated sigma")
                .sample(rng),
        }
    }
}

/// One frozen draw of bond perturbations delta_n (dimensionless) and
/// site energies e_n (units of kappa), with its generation metadata.
#[derive(Debug, Clone, PartialEq)]
pub struct DisorderRealization {
    delta_n: Vec<f64>,
    e_n: Vec<f64>,
    kind: DisorderKind,
    seed: u64,
}

impl DisorderRealization {
    /// Draw both hopping and site-energy disorder. Bonds are drawn first,
    /// then sites, in storage order.
    pub fn sample(chain: &ChainSpec, kind: DisorderKind, seed: u64) -> Result<Self> {
        kind.validate()?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let delta_n = (0..chain.bond_count())
            .map(|_| kind.draw(&mut rng))
            .collect();
        let e_n = (0..chain.site_count())
            .map(|_| kind.draw(&mut rng))
            .collect();
        Ok(Self {
            delta_n,
            e_n,
            kind,
            seed,
        })
    }

    /// Draw hopping disorder only; site energies stay zero.
    pub fn sample_hopping(chain: &ChainSpec, kind: DisorderKind, seed: u64) -> Result<Self> {
        kind.validate()?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let delta_n = (0..chain.bond_count())
            .map(|_| kind.draw(&mut rng))
            .collect();
        Ok(Self {
            delta_n,
            e_n: vec![0.0; chain.site_count()],
            kind,
            seed,
        })
    }

    pub fn delta_n(&self) -> &[f64] {
        &self.delta_n
    }

    pub fn e_n(&self) -> &[f64] {
        &self.e_n
    }

    pub fn kind(&self) -> DisorderKind {
        self.kind
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }
}

/// Per-realization seed derivation: the SplitMix64 output function
/// applied to base_seed + (index+1) * golden-gamma. Documented constants
/// so other implementations can reproduce the stream.
pub fn mix_seed(base_seed: u64, index: u64) -> u64 {
    const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;
    let mut z = base_seed.wrapping_add(index.wrapping_add(1).wrapping_mul(GOLDEN_GAMMA));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Mean / standard deviation / histogram of one probability sample,
/// failures excluded.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EnsembleSummary {
    pub mean: f64,
    pub std_dev: f64,
    pub histogram: Vec<u32>,
    pub bin_count: usize,
}

fn summarize(values: &[f64], bin_count: usize) -> EnsembleSummary {
    let good: Vec<f64> = values.iter().copied().filter(|v| v.is_finite()).collect();
    let n = good.len().max(1) as f64;
    let mean = good.iter().sum::<f64>() / n;
    let var = good.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
    let mut histogram = vec![0u32; bin_count];
    for v in &good {
        let idx = ((v * bin_count as f64) as usize).min(bin_count - 1);
        histogram[idx] += 1;
    }
    EnsembleSummary {
        mean,
        std_dev: var.sqrt(),
        histogram,
        bin_count,
    }
}

/// Paired transfer statistics over an ensemble of disorder realizations:
/// for each realization the gauge-assisted run (cancellation gradient
/// applied) and the bare Hermitian run (h = gamma = 0) see identical
/// disorder. Failed realizations are recorded as NaN sentinels and
/// excluded from the summaries.
#[derive(Debug, Clone)]
pub struct EnsembleResult {
    pub p_transfer: Vec<f64>,
    pub p_hermitian: Vec<f64>,
    pub seeds: Vec<u64>,
    pub failures: usize,
    pub transfer_summary: EnsembleSummary,
    pub hermitian_summary: EnsembleSummary,
}

#[derive(Debug, Clone, Copy)]
pub struct EnsembleOptions {
    pub count: usize,
    pub base_seed: u64,
    pub bin_count: usize,
    /// Also draw site-energy disorder (bond disorder is always drawn).
    pub sites_disordered: bool,
}

impl EnsembleOptions {
    pub fn new(count: usize, base_seed: u64) -> Self {
        Self {
            count,
            base_seed,
            bin_count: 50,
            sites_disordered: false,
        }
    }

    pub fn with_bin_count(mut self, bin_count: usize) -> Self {
        self.bin_count = bin_count;
        self
    }

    pub fn with_site_disorder(mut self, yes: bool) -> Self {
        self.sites_disordered = yes;
        self
    }
}

fn paired_transfer(
    chain: &ChainSpec,
    ramp: &GaugeRamp,
    disorder: &DisorderRealization,
) -> Result<(f64, f64)> {
    let t_half = ramp.t_half();
    let initial = LatticeState::left_edge_delta(chain, -t_half);

    let gauged = EvolutionProblem::new(
        *chain,
        *ramp,
        SitePotentials::cancellation(chain, ramp),
        initial.clone(),
    )?
    .with_disorder(disorder.clone())?
    .with_samples(2);
    let p_gauge = transfer_probability(&evolve_gauge_frame(&gauged)?);

    let flat = GaugeRamp::new(0.0, t_half)?;
    let hermitian = EvolutionProblem::new(*chain, flat, SitePotentials::zero(chain), initial)?
        .with_disorder(disorder.clone())?
        .with_samples(2);
    let p_herm = transfer_probability(&evolve_gauge_frame(&hermitian)?);
    Ok((p_gauge, p_herm))
}

/// Run `count` paired evolutions in parallel. Realization `r` uses seed
/// `mix_seed(base_seed, r)`; results are collected by index, so the
/// outcome is independent of thread count and scheduling.
pub fn ensemble_transfer(
    chain: &ChainSpec,
    ramp: &GaugeRamp,
    kind: DisorderKind,
    opts: &EnsembleOptions,
) -> Result<EnsembleResult> {
    if opts.count == 0 {
        return Err(Error::InvalidParameter {
            name: "count",
            reason: "ensemble needs at least one realization".into(),
        });
    }
    kind.validate()?;
    let seeds: Vec<u64> = (0..opts.count as u64)
        .map(|r| mix_seed(opts.base_seed, r))
        .collect();
    let pairs: Vec<(f64, f64)> = seeds
        .par_iter()
        .map(|&seed| {
            let drawn = if opts.sites_disordered {
                DisorderRealization::sample(chain, kind, seed)
            } else {
                DisorderRealization::sample_hopping(chain, kind, seed)
            };
            drawn
                .and_then(|d| paired_transfer(chain, ramp, &d))
                .unwrap_or((f64::NAN, f64::NAN))
        })
        .collect();

    let p_transfer: Vec<f64> = pairs.iter().map(|p| p.0).collect();
    let p_hermitian: Vec<f64> = pairs.iter().map(|p| p.1).collect();
    let failures = p_transfer.iter().filter(|v| !v.is_finite()).count();
    let transfer_summary = summarize(&p_transfer, opts.bin_count);
    let hermitian_summary = summarize(&p_hermitian, opts.bin_count);
    Ok(EnsembleResult {
        p_transfer,
        p_hermitian,
        seeds,
        failures,
        transfer_summary,
        hermitian_summary,
    })
}

/// One point of a transfer-vs-interaction-time sweep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepPoint {
    pub t_half: f64,
    pub p_gauge: f64,
    pub p_hermitian: f64,
}

/// Sweep the interaction time for one frozen realization, recording the
/// gauge-assisted curve (ramp rescaled so alpha = h_max / T at every
/// point, cancellation gradient applied) against the bare Hermitian
/// curve.
pub fn disorder_sweep_t(
    chain: &ChainSpec,
    ramp: &GaugeRamp,
    realization: &DisorderRealization,
    t_grid: &[f64],
) -> Result<Vec<SweepPoint>> {
    t_grid
        .iter()
        .map(|&t_half| {
            let scaled = GaugeRamp::new(ramp.h_max(), t_half)?.with_mismatch(ramp.mismatch_delta());
            let (p_gauge, p_hermitian) = paired_transfer(chain, &scaled, realization)?;
            Ok(SweepPoint {
                t_half,
                p_gauge,
                p_hermitian,
            })
        })
        .collect()
}
