//! Time evolution of the amplitude equations along the gauge ramp, with
//! two independent routes:
//!
//! * [`evolve_gauge_frame`] - after the gauge transformation the
//!   generator is time-independent, so each output interval is one exact
//!   matrix exponential. With the cancellation gradient the generator is
//!   Hermitian and the gauge-frame norm is conserved.
//! * [`evolve_lab_frame`] - adaptive Runge-Kutta on the explicitly
//!   time-dependent lab equations (the ramp enters the hoppings as
//!   e^{-h(t)}, e^{+h(t)}).
//!
//! Both report the lab-frame norm P(t) and normalized site distribution
//! p_n(t); the gauge route reconstructs them through log-shifted weights
//! so large gauge exponents never overflow.

use ndarray::{Array1, Array2};
use num_complex::Complex64 as C64;

use crate::chain::{
    gauge_map, ChainSpec, Frame, GaugeRamp, LatticeState, SitePotentials, EXPONENT_CAP,
};
use crate::disorder::DisorderRealization;
use crate::error::{Error, Result};
use crate::expm::expm;
use crate::rk45::{integrate, AdaptiveOptions};

pub const DEFAULT_SAMPLES: usize = 401;

/// One evolution task: chain, ramp protocol, site potentials, optional
/// disorder, the state at t = -T, and the output grid resolution.
#[derive(Debug, Clone)]
pub struct EvolutionProblem {
    pub chain: ChainSpec,
    pub ramp: GaugeRamp,
    pub pots: SitePotentials,
    pub disorder: Option<DisorderRealization>,
    pub initial: LatticeState,
    pub samples: usize,
    pub lab_rtol: f64,
}

impl EvolutionProblem {
    pub fn new(
        chain: ChainSpec,
        ramp: GaugeRamp,
        pots: SitePotentials,
        initial: LatticeState,
    ) -> Result<Self> {
        if initial.amplitudes().len() != chain.site_count() {
            return Err(Error::DimensionMismatch {
                what: "initial state",
                expected: chain.site_count(),
                got: initial.amplitudes().len(),
            });
        }
        if pots.gamma().len() != chain.site_count() {
            return Err(Error::DimensionMismatch {
                what: "site potentials",
                expected: chain.site_count(),
                got: pots.gamma().len(),
            });
        }
        if initial.norm_sq() == 0.0 {
            return Err(Error::ZeroNorm {
                time: initial.time(),
            });
        }
        let t0 = -ramp.t_half();
        if (initial.time() - t0).abs() > 1e-9 * ramp.t_half().max(1.0) {
            return Err(Error::InvalidParameter {
                name: "initial.time",
                reason: format!("must be the ramp start {t0}, got {}", initial.time()),
            });
        }
        Ok(Self {
            chain,
            ramp,
            pots,
            disorder: None,
            initial,
            samples: DEFAULT_SAMPLES,
            lab_rtol: 1e-10,
        })
    }

    pub fn with_disorder(mut self, disorder: DisorderRealization) -> Result<Self> {
        if disorder.delta_n().len() != self.chain.bond_count() {
            return Err(Error::DimensionMismatch {
                what: "disorder delta_n",
                expected: self.chain.bond_count(),
                got: disorder.delta_n().len(),
            });
        }
        self.disorder = Some(disorder);
        Ok(self)
    }

    pub fn with_samples(mut self, samples: usize) -> Self {
        assert!(samples >= 2, "need at least the two endpoint samples");
        self.samples = samples;
        self
    }

    pub fn with_lab_rtol(mut self, rtol: f64) -> Self {
        self.lab_rtol = rtol;
        self
    }

    fn time_grid(&self) -> Vec<f64> {
        let t = self.ramp.t_half();
        let m = self.samples;
        (0..m)
            .map(|k| {
                if k == m - 1 {
                    t
                } else {
                    -t + 2.0 * t * (k as f64) / ((m - 1) as f64)
                }
            })
            .collect()
    }
}

/// Time-ordered states in one frame plus the lab-frame observables:
/// the norm P(t) and the normalized excitation distribution p_n(t)
/// (each row sums to one).
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<LatticeState>,
    pub norm_series: Vec<f64>,
    pub pn_series: Array2<f64>,
}

impl Trajectory {
    pub fn frame(&self) -> Frame {
        self.states[0].frame()
    }

    pub fn final_state(&self) -> &LatticeState {
        self.states.last().expect("trajectory is never empty")
    }

    pub fn final_norm(&self) -> f64 {
        *self.norm_series.last().expect("trajectory is never empty")
    }

    pub fn final_pn(&self) -> ndarray::ArrayView1<'_, f64> {
        self.pn_series.row(self.pn_series.nrows() - 1)
    }

    pub fn min_norm(&self) -> f64 {
        self.norm_series
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min)
    }
}

/// Lab-frame norm and normalized distribution from amplitudes carrying a
/// per-site log-weight `w_n` (so |c_n|^2 = e^{2 w_n} |amp_n|^2). The
/// distribution is formed after subtracting the largest exponent, which
/// keeps h_max N up to the cap representable.
fn lab_observables(
    amps: &Array1<C64>,
    weights: impl Iterator<Item = f64>,
    time: f64,
) -> Result<(f64, Vec<f64>)> {
    let logs: Vec<f64> = amps
        .iter()
        .zip(weights)
        .map(|(a, w)| {
            let m = a.norm();
            if m == 0.0 {
                f64::NEG_INFINITY
            } else {
                2.0 * (w + m.ln())
            }
        })
        .collect();
    let s = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if s == f64::NEG_INFINITY {
        return Err(Error::ZeroNorm { time });
    }
    let shifted: Vec<f64> = logs.iter().map(|&l| (l - s).exp()).collect();
    let total: f64 = shifted.iter().sum();
    if !total.is_finite() || total <= 0.0 {
        return Err(Error::ZeroNorm { time });
    }
    let pn: Vec<f64> = shifted.iter().map(|v| v / total).collect();
    let norm = s.exp() * total;
    Ok((norm, pn))
}

fn trajectory_from_states(
    chain: &ChainSpec,
    ramp: &GaugeRamp,
    times: Vec<f64>,
    states: Vec<LatticeState>,
) -> Result<Trajectory> {
    let m = chain.site_count();
    let mut norm_series = Vec::with_capacity(times.len());
    let mut pn_series = Array2::zeros((times.len(), m));
    for (k, (t, state)) in times.iter().zip(&states).enumerate() {
        let (norm, pn) = match state.frame() {
            Frame::Gauge => {
                let h = ramp.h_at(*t);
                lab_observables(state.amplitudes(), chain.sites().map(|n| h * n as f64), *t)?
            }
            Frame::Lab => lab_observables(state.amplitudes(), std::iter::repeat(0.0), *t)?,
        };
        norm_series.push(norm);
        for (j, p) in pn.iter().enumerate() {
            pn_series[(k, j)] = *p;
        }
    }
    Ok(Trajectory {
        times,
        states,
        norm_series,
        pn_series,
    })
}

/// Time-independent gauge-frame generator: hopping kappa (1 + delta_n)
/// on the bonds and E_n - i gamma_n - i n alpha on the diagonal. The
/// ramp slope enters only through the -i n alpha nonadiabatic term;
/// gamma_n = -n alpha cancels it exactly.
fn gauge_generator(problem: &EvolutionProblem) -> Array2<C64> {
    let chain = &problem.chain;
    let m = chain.site_count();
    let kappa = chain.kappa();
    let alpha = problem.ramp.alpha();
    let mut g = Array2::zeros((m, m));
    for i in 0..m {
        let n = chain.site(i) as f64;
        let e_dis = problem
            .disorder
            .as_ref()
            .map_or(0.0, |d| kappa * d.e_n()[i]);
        g[(i, i)] = C64::new(
            problem.pots.real_energy()[i] + e_dis,
            -problem.pots.gamma()[i] - n * alpha,
        );
        if i + 1 < m {
            let bond = 1.0 + problem.disorder.as_ref().map_or(0.0, |d| d.delta_n()[i]);
            let hop = C64::new(kappa * bond, 0.0);
            g[(i, i + 1)] = hop;
            g[(i + 1, i)] = hop;
        }
    }
    g
}

/// Evolve in the gauge frame, where the generator is time-independent:
/// one matrix exponential per output interval, applied repeatedly.
/// States are returned in the gauge frame; P(t) and p_n(t) are lab-frame
/// observables reconstructed with log-shifted weights.
pub fn evolve_gauge_frame(problem: &EvolutionProblem) -> Result<Trajectory> {
    let times = problem.time_grid();
    let h0 = problem.ramp.h_at(times[0]);
    let start = gauge_map(&problem.initial, &problem.chain, Frame::Gauge, h0)?;

    let g = gauge_generator(problem);
    let dt = times[1] - times[0];
    let step = expm(&g.mapv(|z| z * C64::new(0.0, -dt)));

    let mut states = Vec::with_capacity(times.len());
    states.push(start);
    for k in 1..times.len() {
        let next = step.dot(states[k - 1].amplitudes());
        states.push(LatticeState::new(next, Frame::Gauge, times[k]));
    }
    trajectory_from_states(&problem.chain, &problem.ramp, times, states)
}

/// Evolve the explicitly time-dependent lab equations with the adaptive
/// Runge-Kutta integrator. The whole ramp must keep |h(t) n| under the
/// exponent cap; otherwise use the gauge route.
pub fn evolve_lab_frame(problem: &EvolutionProblem) -> Result<Trajectory> {
    let chain = &problem.chain;
    let worst = problem.ramp.h_max() * chain.max_abs_site();
    if worst > EXPONENT_CAP {
        return Err(Error::ExponentOverflow {
            exponent: worst,
            cap: EXPONENT_CAP,
        });
    }
    let times = problem.time_grid();
    let h0 = problem.ramp.h_at(times[0]);
    let start = gauge_map(&problem.initial, chain, Frame::Lab, h0)?;

    let m = chain.site_count();
    let kappa = chain.kappa();
    let bonds: Vec<f64> = (0..chain.bond_count())
        .map(|i| kappa * (1.0 + problem.disorder.as_ref().map_or(0.0, |d| d.delta_n()[i])))
        .collect();
    let diag: Vec<C64> = (0..m)
        .map(|i| {
            let e_dis = problem
                .disorder
                .as_ref()
                .map_or(0.0, |d| kappa * d.e_n()[i]);
            C64::new(
                problem.pots.real_energy()[i] + e_dis,
                -problem.pots.gamma()[i],
            )
        })
        .collect();
    let ramp = problem.ramp;
    let rhs = move |t: f64, c: &Array1<C64>| {
        let h = ramp.h_at(t);
        let up = (-h).exp();
        let dn = h.exp();
        let mut dc = Array1::zeros(m);
        for i in 0..m {
            let mut acc = diag[i] * c[i];
            if i + 1 < m {
                acc += C64::new(bonds[i] * up, 0.0) * c[i + 1];
            }
            if i > 0 {
                acc += C64::new(bonds[i - 1] * dn, 0.0) * c[i - 1];
            }
            dc[i] = acc * C64::new(0.0, -1.0);
        }
        dc
    };

    let opts = AdaptiveOptions {
        rtol: problem.lab_rtol,
        ..Default::default()
    };
    let raw = integrate(&rhs, &times, start.amplitudes().clone(), &opts)?;
    let states = times
        .iter()
        .zip(raw)
        .map(|(t, amps)| LatticeState::new(amps, Frame::Lab, *t))
        .collect();
    trajectory_from_states(chain, &problem.ramp, times, states)
}

/// Normalized excitation at the right edge site at final time.
pub fn transfer_probability(traj: &Trajectory) -> f64 {
    let pn = traj.final_pn();
    pn[pn.len() - 1]
}
