//! Coupled-resonator (CROW) realization of the imaginary gauge field:
//! a chain of single-mode cavities with a fast, complex-phase modulation
//! of the site frequencies. Averaging over the modulation period leaves
//! an effective Hatano-Nelson chain with hopping kappa = rho J0(Gamma/Omega)
//! and gauge field h = (Gamma/Omega) sinh(phi); ramping phi(t) as
//! asinh(Omega alpha t / Gamma) synthesizes the linear gauge ramp.
//!
//! [`evolve_crow`] integrates the unaveraged coupled-mode equations, so
//! the rotating-wave reduction can be checked stroboscopically against
//! the effective model.

use ndarray::{Array1, Array2};
use num_complex::Complex64 as C64;
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::rk45::{integrate, AdaptiveOptions};

/// Modulation phase schedule. The asinh ramp keeps the modulation
/// amplitude fixed while the effective gauge field grows linearly:
/// h(t) = (Gamma/Omega) sinh(phi(t)) = alpha t.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PhiSchedule {
    Constant(f64),
    RampAsinh,
}

/// Physical parameters of the modulated resonator chain.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CrowSpec {
    /// Bare inter-cavity coupling.
    pub rho: f64,
    /// Carrier resonance frequency (a gauge choice; observables are
    /// independent of it).
    pub omega0: f64,
    /// Modulation frequency Omega.
    pub omega_mod: f64,
    /// Modulation amplitude Gamma.
    pub gamma_mod: f64,
    /// Gain/loss gradient rate (the dc imaginary part of the site
    /// frequency offset).
    pub alpha: f64,
    pub phi: PhiSchedule,
}

/// Ratio Omega/rho below which the rotating-wave reduction is not
/// trusted for validation runs.
pub const DEFAULT_RWA_MIN_RATIO: f64 = 20.0;

impl CrowSpec {
    pub fn new(rho: f64, omega_mod: f64, gamma_mod: f64) -> Result<Self> {
        if !rho.is_finite() || rho <= 0.0 {
            return Err(Error::InvalidParameter {
                name: "rho",
                reason: format!("coupling must be finite and > 0, got {rho}"),
            });
        }
        if !omega_mod.is_finite() || omega_mod <= 0.0 {
            return Err(Error::InvalidParameter {
                name: "omega_mod",
                reason: format!("modulation frequency must be finite and > 0, got {omega_mod}"),
            });
        }
        if !gamma_mod.is_finite() || gamma_mod < 0.0 {
            return Err(Error::InvalidParameter {
                name: "gamma_mod",
                reason: format!("modulation amplitude must be finite and >= 0, got {gamma_mod}"),
            });
        }
        Ok(Self {
            rho,
            omega0: 0.0,
            omega_mod,
            gamma_mod,
            alpha: 0.0,
            phi: PhiSchedule::Constant(0.0),
        })
    }

    pub fn with_omega0(mut self, omega0: f64) -> Self {
        self.omega0 = omega0;
        self
    }

    pub fn with_alpha(mut self, alpha: f64) -> Self {
        self.alpha = alpha;
        self
    }

    pub fn with_phi(mut self, phi: PhiSchedule) -> Result<Self> {
        if matches!(phi, PhiSchedule::RampAsinh) && self.gamma_mod == 0.0 {
            return Err(Error::InvalidParameter {
                name: "phi",
                reason: "the asinh ramp needs a nonzero modulation amplitude".into(),
            });
        }
        self.phi = phi;
        Ok(self)
    }

    pub fn rwa_ratio(&self) -> f64 {
        self.omega_mod / self.rho
    }

    pub fn is_rwa_regime(&self, min_ratio: f64) -> bool {
        self.rwa_ratio() >= min_ratio
    }

    pub fn phi_at(&self, t: f64) -> f64 {
        match self.phi {
            PhiSchedule::Constant(phi) => phi,
            PhiSchedule::RampAsinh => (self.omega_mod * self.alpha * t / self.gamma_mod).asinh(),
        }
    }

    /// Complex site-frequency offset rate: i alpha + Gamma cos(Omega t + i phi(t)).
    pub fn delta_omega(&self, t: f64) -> C64 {
        let phi = self.phi_at(t);
        let arg = C64::new(self.omega_mod * t, phi);
        C64::new(0.0, self.alpha) + arg.cos() * self.gamma_mod
    }
}

/// Effective Hatano-Nelson parameters after the rotating-wave reduction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EffectiveParams {
    pub kappa_eff: f64,
    pub h_eff: f64,
}

/// kappa = rho J0(Gamma/Omega), h = (Gamma/Omega) sinh(phi).
pub fn effective_params(spec: &CrowSpec, phi: f64) -> EffectiveParams {
    let depth = spec.gamma_mod / spec.omega_mod;
    EffectiveParams {
        kappa_eff: spec.rho * bessel_j0(depth),
        h_eff: depth * phi.sinh(),
    }
}

/// Bessel function of the first kind, order zero. Alternating power
/// series up to |x| = 12, Hankel asymptotic expansion beyond; absolute
/// accuracy better than 1e-12 over |x| <= 20.
pub fn bessel_j0(x: f64) -> f64 {
    let ax = x.abs();
    if ax <= 12.0 {
        let q = -0.25 * x * x;
        let mut term = 1.0;
        let mut sum = 1.0;
        for k in 1..200 {
            term *= q / ((k * k) as f64);
            sum += term;
            if term.abs() < 1e-18 * sum.abs().max(1.0) {
                break;
            }
        }
        sum
    } else {
        // c_k = ((2k-1)!!)^2 / (k! 8^k), split into the two cosine phases
        let w = ax - PI / 4.0;
        let mut c = [0.0f64; 20];
        c[0] = 1.0;
        for k in 1..20 {
            let tk = 2.0 * k as f64 - 1.0;
            c[k] = c[k - 1] * tk * tk / (8.0 * k as f64);
        }
        let x2 = ax * ax;
        let mut p = 0.0;
        let mut q = 0.0;
        let mut xp = 1.0; // x^{-2m}
        for m in 0..10 {
            let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
            p += sign * c[2 * m] * xp;
            q += sign * c[2 * m + 1] * xp / ax;
            xp /= x2;
        }
        (2.0 / (PI * ax)).sqrt() * (w.cos() * p + w.sin() * q)
    }
}

/// Accumulated modulation phase Phi(t) = Gamma int_0^t cos(Omega xi + i phi(xi)) dxi.
/// Constant phi uses the closed form (Gamma/Omega)[sin(Omega t + i phi) - i sinh phi];
/// any other schedule falls back to adaptive quadrature.
pub fn accumulated_phase(spec: &CrowSpec, t: f64) -> C64 {
    match spec.phi {
        PhiSchedule::Constant(phi) => {
            let depth = spec.gamma_mod / spec.omega_mod;
            let s = C64::new(spec.omega_mod * t, phi).sin();
            (s - C64::new(0.0, phi.sinh())) * depth
        }
        _ => accumulated_phase_quadrature(spec, t),
    }
}

/// Quadrature route for the accumulated phase, valid for any schedule.
pub fn accumulated_phase_quadrature(spec: &CrowSpec, t: f64) -> C64 {
    if t == 0.0 {
        return C64::new(0.0, 0.0);
    }
    let f = |xi: f64| {
        let arg = C64::new(spec.omega_mod * xi, spec.phi_at(xi));
        arg.cos() * spec.gamma_mod
    };
    // chunked adaptive Simpson, at most half a modulation period per chunk
    let chunk = (PI / spec.omega_mod).min(t.abs());
    let n_chunks = (t.abs() / chunk).ceil() as usize;
    let step = t / n_chunks as f64;
    let tol = 1e-13 * (spec.gamma_mod * chunk).max(1e-3);
    let mut acc = C64::new(0.0, 0.0);
    for k in 0..n_chunks {
        let a = step * k as f64;
        let b = a + step;
        acc += simpson_adaptive(&f, a, b, tol);
    }
    acc
}

fn simpson_rule(fa: C64, fm: C64, fb: C64, h: f64) -> C64 {
    (fa + fm * 4.0 + fb) * (h / 6.0)
}

fn simpson_adaptive<F: Fn(f64) -> C64>(f: &F, a: f64, b: f64, tol: f64) -> C64 {
    #[allow(clippy::too_many_arguments)]
    fn recurse<F: Fn(f64) -> C64>(
        f: &F,
        a: f64,
        b: f64,
        fa: C64,
        fm: C64,
        fb: C64,
        whole: C64,
        tol: f64,
        depth: u32,
    ) -> C64 {
        let m = 0.5 * (a + b);
        let lm = 0.5 * (a + m);
        let rm = 0.5 * (m + b);
        let flm = f(lm);
        let frm = f(rm);
        let left = simpson_rule(fa, flm, fm, m - a);
        let right = simpson_rule(fm, frm, fb, b - m);
        let delta = left + right - whole;
        if depth == 0 || delta.norm() <= 15.0 * tol {
            left + right + delta / 15.0
        } else {
            recurse(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
                + recurse(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
        }
    }
    let fa = f(a);
    let fb = f(b);
    let fm = f(0.5 * (a + b));
    let whole = simpson_rule(fa, fm, fb, b - a);
    recurse(f, a, b, fa, fm, fb, whole, tol, 28)
}

/// Raw coupled-mode trajectory: resonator amplitudes b_n plus the
/// carrier-removed amplitudes c_n = b_n e^{+i omega0 t + i Phi(t) n}.
/// The norm and distribution series are taken from b_n.
#[derive(Debug, Clone)]
pub struct CrowTrajectory {
    pub times: Vec<f64>,
    pub resonator_amplitudes: Vec<Array1<C64>>,
    pub rotating_amplitudes: Vec<Array1<C64>>,
    pub norm_series: Vec<f64>,
    pub pn_series: Array2<f64>,
}

impl CrowTrajectory {
    pub fn final_pn(&self) -> ndarray::ArrayView1<'_, f64> {
        self.pn_series.row(self.pn_series.nrows() - 1)
    }
}

fn crow_site(idx: usize, size: usize) -> i64 {
    idx as i64 - (size / 2) as i64
}

/// Integrate the unaveraged coupled-mode equations
/// i db_n/dt = rho (b_{n+1} + b_{n-1}) + omega0 b_n + n delta_omega(t) b_n
/// over `t_span`, sampling `samples` uniformly spaced times.
pub fn evolve_crow(
    spec: &CrowSpec,
    chain_size: usize,
    initial: &Array1<C64>,
    t_span: (f64, f64),
    samples: usize,
    opts: &AdaptiveOptions,
) -> Result<CrowTrajectory> {
    if chain_size == 0 {
        return Err(Error::InvalidParameter {
            name: "chain_size",
            reason: "need at least one cavity".into(),
        });
    }
    if initial.len() != chain_size {
        return Err(Error::DimensionMismatch {
            what: "initial amplitudes",
            expected: chain_size,
            got: initial.len(),
        });
    }
    let (t0, t1) = t_span;
    if t0.is_nan() || t1.is_nan() || t1 <= t0 {
        return Err(Error::InvalidParameter {
            name: "t_span",
            reason: format!("end must exceed start, got ({t0}, {t1})"),
        });
    }
    assert!(samples >= 2);

    let m = chain_size;
    let rho = spec.rho;
    let omega0 = spec.omega0;
    let spec_copy = *spec;
    let rhs = move |t: f64, b: &Array1<C64>| {
        let dw = spec_copy.delta_omega(t);
        let mut db = Array1::zeros(m);
        for i in 0..m {
            let n = crow_site(i, m) as f64;
            let mut acc = (dw * n + omega0) * b[i];
            if i + 1 < m {
                acc += b[i + 1] * rho;
            }
            if i > 0 {
                acc += b[i - 1] * rho;
            }
            db[i] = acc * C64::new(0.0, -1.0);
        }
        db
    };

    let times: Vec<f64> = (0..samples)
        .map(|k| {
            if k == samples - 1 {
                t1
            } else {
                t0 + (t1 - t0) * k as f64 / (samples - 1) as f64
            }
        })
        .collect();
    let resonator = integrate(&rhs, &times, initial.clone(), opts)?;

    let mut rotating = Vec::with_capacity(samples);
    let mut norm_series = Vec::with_capacity(samples);
    let mut pn_series = Array2::zeros((samples, m));
    for (k, (t, b)) in times.iter().zip(&resonator).enumerate() {
        let phase = accumulated_phase(spec, *t);
        let carrier = C64::new(0.0, omega0 * t).exp();
        let c = Array1::from_iter((0..m).map(|i| {
            let n = crow_site(i, m) as f64;
            b[i] * carrier * (C64::new(0.0, 1.0) * phase * n).exp()
        }));
        rotating.push(c);
        let norm: f64 = b.iter().map(|z| z.norm_sqr()).sum();
        if norm <= 0.0 {
            return Err(Error::ZeroNorm { time: *t });
        }
        for i in 0..m {
            pn_series[(k, i)] = b[i].norm_sqr() / norm;
        }
        norm_series.push(norm);
    }
    Ok(CrowTrajectory {
        times,
        resonator_amplitudes: resonator,
        rotating_amplitudes: rotating,
        norm_series,
        pn_series,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    // frozen high-precision references
    const J0_TABLE: [(f64, f64); 9] = [
        (0.5, 0.9384698072408129),
        (1.0, 0.7651976865579666),
        (3.7, -0.3992302033711911),
        (5.0, -0.1775967713143383),
        (8.0, 0.1716508071375539),
        (11.9, 0.02504944169958956),
        (12.1, 0.06966677360680739),
        (15.0, -0.014224472826780773),
        (19.7, 0.17942725365878742),
    ];

    #[test]
    fn j0_at_zero_is_one() {
        assert_eq!(bessel_j0(0.0), 1.0);
    }

    #[test]
    fn j0_vanishes_at_the_first_zero() {
        assert!(bessel_j0(2.40482555769577).abs() < 1e-10);
    }

    #[test]
    fn j0_matches_a_forty_term_series_oracle() {
        // independent truncated alternating series at x = 1
        let x: f64 = 1.0;
        let mut term = 1.0f64;
        let mut oracle = 1.0f64;
        for k in 1..=40 {
            term *= -(x * x) / (4.0 * (k * k) as f64);
            oracle += term;
        }
        assert!((bessel_j0(1.0) - oracle).abs() < 1e-13);
    }

    #[test]
    fn j0_table_and_symmetry() {
        for &(x, v) in &J0_TABLE {
            assert!((bessel_j0(x) - v).abs() < 1e-12, "J0({x})");
            assert_eq!(bessel_j0(x), bessel_j0(-x));
        }
    }

    #[test]
    fn effective_params_limits() {
        let spec = CrowSpec::new(2.0, 50.0, 0.0).unwrap();
        let p = effective_params(&spec, 1.2);
        assert_eq!(p.kappa_eff, 2.0);
        assert_eq!(p.h_eff, 0.0);

        // coherent destruction of tunneling at the first Bessel zero
        let spec = CrowSpec::new(1.0, 50.0, 50.0 * 2.40482555769577).unwrap();
        let p = effective_params(&spec, 0.0);
        assert!(p.kappa_eff.abs() < 1e-10);

        let spec = CrowSpec::new(1.0, 50.0, 50.0).unwrap();
        let p = effective_params(&spec, 1.0);
        assert!((p.h_eff - 1.1752011936438014).abs() < 1e-12);
        assert!(p.kappa_eff.abs() <= spec.rho);
    }

    #[test]
    fn accumulated_phase_closed_form_basics() {
        let spec = CrowSpec::new(1.0, 10.0, 3.0)
            .unwrap()
            .with_phi(PhiSchedule::Constant(0.7))
            .unwrap();
        assert_eq!(accumulated_phase(&spec, 0.0), C64::new(0.0, 0.0));

        // real sinusoid over half a period integrates to zero
        let real = CrowSpec::new(1.0, 10.0, 3.0).unwrap();
        let phi = accumulated_phase(&real, PI / 10.0);
        assert!(phi.norm() < 1e-12);

        // stroboscopic times cancel the whole accumulated phase
        let t = 2.0 * PI / 10.0;
        assert!(accumulated_phase(&spec, t).norm() < 1e-12);
    }

    #[test]
    fn quadrature_matches_the_closed_form_for_constant_phi() {
        let spec = CrowSpec::new(1.0, 25.0, 12.0)
            .unwrap()
            .with_phi(PhiSchedule::Constant(0.45))
            .unwrap();
        for &t in &[0.13, 0.77, -0.6, 3.1] {
            let exact = accumulated_phase(&spec, t);
            let quad = accumulated_phase_quadrature(&spec, t);
            assert!((exact - quad).norm() < 1e-8, "t={t}: {exact} vs {quad}");
        }
    }

    #[test]
    fn unmodulated_chain_follows_the_hermitian_propagator() {
        use crate::chain::ChainSpec;
        use crate::spectral::hermitian_propagator;

        let spec = CrowSpec::new(1.0, 50.0, 0.0).unwrap();
        let m = 7;
        let mut b0 = Array1::zeros(m);
        b0[0] = C64::new(1.0, 0.0);
        let t1 = 2.4;
        let traj = evolve_crow(&spec, m, &b0, (0.0, t1), 9, &AdaptiveOptions::default()).unwrap();

        let chain = ChainSpec::new(3, 1.0).unwrap();
        let u = hermitian_propagator(&chain, t1 / 2.0);
        let expect: Vec<f64> = (0..m).map(|i| u.entries()[(i, 0)].norm_sqr()).collect();
        let got = traj.final_pn();
        for i in 0..m {
            assert!((got[i] - expect[i]).abs() < 1e-6, "site {i}");
        }
    }

    #[test]
    fn carrier_frequency_does_not_move_the_distribution() {
        let base = CrowSpec::new(1.0, 40.0, 40.0)
            .unwrap()
            .with_phi(PhiSchedule::Constant(0.4))
            .unwrap();
        let shifted = base.with_omega0(5.0);
        let m = 5;
        let mut b0 = Array1::zeros(m);
        b0[m / 2] = C64::new(1.0, 0.0);
        let t1 = 1.0;
        let a = evolve_crow(&base, m, &b0, (0.0, t1), 5, &AdaptiveOptions::default()).unwrap();
        let b = evolve_crow(&shifted, m, &b0, (0.0, t1), 5, &AdaptiveOptions::default()).unwrap();
        for k in 0..a.times.len() {
            for i in 0..m {
                assert!((a.pn_series[(k, i)] - b.pn_series[(k, i)]).abs() < 1e-10);
                // carrier-removed amplitudes also agree up to the pure
                // carrier phase, which norm_sqr ignores
                let pa = a.rotating_amplitudes[k][i].norm_sqr();
                let pb = b.rotating_amplitudes[k][i].norm_sqr();
                assert!((pa - pb).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn gauge_sign_convention_matches_the_chain_model() {
        use crate::chain::{build_lab_hamiltonian, ChainSpec, GaugeRamp, SitePotentials};

        // effective lab equation: i dc/dt = kappa[e^{-h} c_{n+1} + e^{+h} c_{n-1}] + i n alpha c_n,
        // i.e. the chain Hamiltonian with gamma_n = -n alpha
        let spec = CrowSpec::new(1.0, 50.0, 50.0).unwrap().with_alpha(0.3);
        let params = effective_params(&spec, 0.8);
        let m = 7usize;
        let mut eff = Array2::<C64>::zeros((m, m));
        for i in 0..m {
            let n = crow_site(i, m) as f64;
            eff[(i, i)] = C64::new(0.0, n * spec.alpha);
            if i + 1 < m {
                eff[(i, i + 1)] = C64::new(params.kappa_eff * (-params.h_eff).exp(), 0.0);
                eff[(i + 1, i)] = C64::new(params.kappa_eff * params.h_eff.exp(), 0.0);
            }
        }
        let chain = ChainSpec::new(3, params.kappa_eff).unwrap();
        let ramp = GaugeRamp::new(spec.alpha, 1.0).unwrap(); // alpha = h_max / T = 0.3
        let pots = SitePotentials::cancellation(&chain, &ramp);
        let ham = build_lab_hamiltonian(&chain, params.h_eff, &pots, None).unwrap();
        for i in 0..m {
            for j in 0..m {
                assert!((eff[(i, j)] - ham[(i, j)]).norm() < 1e-15);
            }
        }
    }

    #[test]
    fn invalid_specs_are_rejected() {
        assert!(CrowSpec::new(0.0, 1.0, 1.0).is_err());
        assert!(CrowSpec::new(1.0, 0.0, 1.0).is_err());
        assert!(CrowSpec::new(1.0, 1.0, -1.0).is_err());
        assert!(CrowSpec::new(1.0, 1.0, 0.0)
            .unwrap()
            .with_phi(PhiSchedule::RampAsinh)
            .is_err());
    }
}
