//! Closed forms for the centered odd chain: the cosine spectrum, the
//! gauge-localized eigenstates, the Hermitian propagator over the ramp
//! window, the exactly-transferred final states under nonadiabaticity
//! cancellation, and the final-norm bookkeeping. These are the oracles
//! the dynamic engines are tested against.

use ndarray::{Array1, Array2};
use num_complex::Complex64 as C64;
use std::f64::consts::PI;

use crate::chain::{ChainSpec, Frame, GaugeRamp, LatticeState, EXPONENT_CAP};
use crate::error::{Error, Result};

/// 1-based mode label `l` for the `2N+1` chain modes; energies descend
/// with `l`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ModeIndex(usize);

impl ModeIndex {
    pub fn new(l: usize, chain: &ChainSpec) -> Result<Self> {
        let max = mode_count(chain);
        if l == 0 || l > max {
            return Err(Error::ModeOutOfRange { l, max });
        }
        Ok(Self(l))
    }

    /// The zero-energy mode l = N+1 (the dark-state-like mode whose
    /// middle site stays empty).
    pub fn zero_energy(chain: &ChainSpec) -> Self {
        Self(chain.n_half() + 1)
    }

    pub fn get(&self) -> usize {
        self.0
    }
}

fn assert_centered_odd(chain: &ChainSpec) {
    assert!(
        chain.is_centered_odd(),
        "closed forms exist only for the centered odd site layout"
    );
}

pub fn mode_count(chain: &ChainSpec) -> usize {
    assert_centered_odd(chain);
    2 * chain.n_half() + 1
}

/// sin(pi l (n + N + 1) / (2(N+1))) addressed by storage index.
fn mode_sin(chain: &ChainSpec, l: usize, idx: usize) -> f64 {
    let denom = 2.0 * (chain.n_half() as f64 + 1.0);
    (PI * l as f64 * (idx as f64 + 1.0) / denom).sin()
}

/// Energies E_l = 2 kappa cos(pi l / (2(N+1))), l = 1..=2N+1, in mode
/// order (descending values).
pub fn hermitian_spectrum(chain: &ChainSpec) -> Vec<f64> {
    let m = mode_count(chain);
    let denom = 2.0 * (chain.n_half() as f64 + 1.0);
    (1..=m)
        .map(|l| 2.0 * chain.kappa() * (PI * l as f64 / denom).cos())
        .collect()
}

/// Eigenstate of the chain at constant gauge field `h` (zero site
/// potentials): component (1/sqrt(N+1)) e^{h n} sin(pi l (n+N+1)/(2(N+1)))
/// at site n. Exponentially localized at the left edge for h < 0 and at
/// the right edge for h > 0.
pub fn gauge_eigenstate(chain: &ChainSpec, h: f64, l: ModeIndex) -> Result<Array1<C64>> {
    assert_centered_odd(chain);
    let worst = h.abs() * chain.n_half() as f64;
    if worst > EXPONENT_CAP {
        return Err(Error::ExponentOverflow {
            exponent: worst,
            cap: EXPONENT_CAP,
        });
    }
    let m = chain.site_count();
    let norm = 1.0 / ((chain.n_half() as f64 + 1.0).sqrt());
    Ok(Array1::from_iter((0..m).map(|i| {
        let n = chain.site(i) as f64;
        C64::new(norm * (h * n).exp() * mode_sin(chain, l.get(), i), 0.0)
    })))
}

/// Unitary propagator of the Hermitian chain over the interaction window
/// (duration 2T), built from the spectral sum.
#[derive(Debug, Clone, PartialEq)]
pub struct PropagatorMatrix {
    entries: Array2<C64>,
    t_half: f64,
    kappa: f64,
}

impl PropagatorMatrix {
    pub fn entries(&self) -> &Array2<C64> {
        &self.entries
    }

    pub fn t_half(&self) -> f64 {
        self.t_half
    }

    pub fn kappa(&self) -> f64 {
        self.kappa
    }
}

/// Propagator entries U_{n,l} = (1/(N+1)) sum_sigma sin(.. l ..) sin(.. n ..)
/// e^{-2 i T E_sigma}, mapping amplitudes at t = -T to amplitudes at t = +T.
pub fn hermitian_propagator(chain: &ChainSpec, t_half: f64) -> PropagatorMatrix {
    assert_centered_odd(chain);
    let m = chain.site_count();
    let energies = hermitian_spectrum(chain);
    let scale = 1.0 / (chain.n_half() as f64 + 1.0);
    // cache the sine table: rows sigma, cols storage index
    let sines = Array2::from_shape_fn((m, m), |(s, i)| mode_sin(chain, s + 1, i));
    let phases: Vec<C64> = energies
        .iter()
        .map(|e| C64::new(0.0, -2.0 * t_half * e).exp())
        .collect();
    let mut entries = Array2::zeros((m, m));
    for i_n in 0..m {
        for i_l in 0..m {
            let mut acc = C64::new(0.0, 0.0);
            for s in 0..m {
                acc += phases[s] * (sines[(s, i_l)] * sines[(s, i_n)]);
            }
            entries[(i_n, i_l)] = acc * scale;
        }
    }
    PropagatorMatrix {
        entries,
        t_half,
        kappa: chain.kappa(),
    }
}

/// Distribution the excitation reaches in the Hermitian limit when the
/// chain starts on its left edge: the propagator column from site -N.
/// |theta_N|^2 is the Hermitian transfer probability and also estimates
/// the final norm of the gauge-assisted transfer.
pub fn theta_vector(chain: &ChainSpec, t_half: f64) -> Array1<C64> {
    hermitian_propagator(chain, t_half)
        .entries
        .column(0)
        .to_owned()
}

/// Instantaneous eigenstate at the start of the ramp (t = -T, field
/// -h_max), localized at the left edge: c_n = e^{-h_max (n+N)} sin(...).
/// Lab frame, unnormalized.
pub fn initial_eigenstate(chain: &ChainSpec, ramp: &GaugeRamp, l: ModeIndex) -> LatticeState {
    assert_centered_odd(chain);
    let m = chain.site_count();
    let h_max = ramp.h_max();
    let n_half = chain.n_half() as f64;
    let amplitudes = Array1::from_iter((0..m).map(|i| {
        let n = chain.site(i) as f64;
        C64::new(
            (-h_max * (n + n_half)).exp() * mode_sin(chain, l.get(), i),
            0.0,
        )
    }));
    LatticeState::new(amplitudes, Frame::Lab, -ramp.t_half())
}

fn require_exact_cancellation(ramp: &GaugeRamp) -> Result<()> {
    if ramp.mismatch_delta() != 0.0 {
        return Err(Error::MismatchUnsupported {
            delta: ramp.mismatch_delta(),
        });
    }
    Ok(())
}

/// Final state of the ramp when the chain starts in the instantaneous
/// eigenstate `l` and the cancellation gradient is applied:
/// c_n(T) = e^{h_max (n-N)} sin(...) e^{-2 i E_l T}, the mirror image of
/// the initial state localized at the right edge.
pub fn exact_final_state_from_eigenstate(
    chain: &ChainSpec,
    ramp: &GaugeRamp,
    l: ModeIndex,
) -> Result<Array1<C64>> {
    assert_centered_odd(chain);
    require_exact_cancellation(ramp)?;
    let m = chain.site_count();
    let h_max = ramp.h_max();
    let n_half = chain.n_half() as f64;
    let energy = hermitian_spectrum(chain)[l.get() - 1];
    let phase = C64::new(0.0, -2.0 * energy * ramp.t_half()).exp();
    Ok(Array1::from_iter((0..m).map(|i| {
        let n = chain.site(i) as f64;
        phase * ((h_max * (n - n_half)).exp() * mode_sin(chain, l.get(), i))
    })))
}

/// Final state of the ramp for the left-edge delta start:
/// c_n(T) = e^{h_max (n-N)} theta_n.
pub fn exact_final_state_from_delta(chain: &ChainSpec, ramp: &GaugeRamp) -> Result<Array1<C64>> {
    assert_centered_odd(chain);
    require_exact_cancellation(ramp)?;
    let theta = theta_vector(chain, ramp.t_half());
    let h_max = ramp.h_max();
    let n_half = chain.n_half() as f64;
    Ok(Array1::from_iter(
        chain
            .sites()
            .zip(theta.iter())
            .map(|(n, th)| th * (h_max * (n as f64 - n_half)).exp()),
    ))
}

/// Closed-form ramp endpoint for an arbitrary lab-frame initial state
/// under exact cancellation:
/// c_n(T) = sum_l U_{n,l} e^{h_max (n + l)} c_l(-T).
pub fn exact_final_state(
    chain: &ChainSpec,
    ramp: &GaugeRamp,
    initial_lab: &Array1<C64>,
) -> Result<Array1<C64>> {
    assert_centered_odd(chain);
    require_exact_cancellation(ramp)?;
    let m = chain.site_count();
    if initial_lab.len() != m {
        return Err(Error::DimensionMismatch {
            what: "initial state",
            expected: m,
            got: initial_lab.len(),
        });
    }
    let worst = 2.0 * ramp.h_max() * chain.n_half() as f64;
    if worst > EXPONENT_CAP {
        return Err(Error::ExponentOverflow {
            exponent: worst,
            cap: EXPONENT_CAP,
        });
    }
    let u = hermitian_propagator(chain, ramp.t_half());
    let h_max = ramp.h_max();
    let mut out = Array1::zeros(m);
    for i_n in 0..m {
        let n = chain.site(i_n) as f64;
        let mut acc = C64::new(0.0, 0.0);
        for i_l in 0..m {
            let l = chain.site(i_l) as f64;
            acc += u.entries[(i_n, i_l)] * initial_lab[i_l] * (h_max * (n + l)).exp();
        }
        out[i_n] = acc;
    }
    Ok(out)
}

/// Gram-like matrix W_{l,sigma} = sum_n U_{n,l} U*_{n,sigma}
/// e^{h_max (2n + l + sigma)} whose quadratic form gives the final norm
/// for any initial state; the identity when h_max = 0.
pub fn w_matrix(chain: &ChainSpec, ramp: &GaugeRamp) -> Result<Array2<C64>> {
    assert_centered_odd(chain);
    require_exact_cancellation(ramp)?;
    let worst = 2.0 * ramp.h_max() * chain.n_half() as f64;
    if worst > EXPONENT_CAP {
        return Err(Error::ExponentOverflow {
            exponent: worst,
            cap: EXPONENT_CAP,
        });
    }
    let m = chain.site_count();
    let u = hermitian_propagator(chain, ramp.t_half());
    let h_max = ramp.h_max();
    let mut w = Array2::zeros((m, m));
    for i_l in 0..m {
        let l = chain.site(i_l) as f64;
        for i_s in 0..m {
            let s = chain.site(i_s) as f64;
            let mut acc = C64::new(0.0, 0.0);
            for i_n in 0..m {
                let n = chain.site(i_n) as f64;
                acc += u.entries[(i_n, i_l)]
                    * u.entries[(i_n, i_s)].conj()
                    * (h_max * (2.0 * n + l + s)).exp();
            }
            w[(i_l, i_s)] = acc;
        }
    }
    Ok(w)
}

/// Final norm P(T) = sum_{l,sigma} W_{l,sigma} c_l(-T) c*_sigma(-T) for an
/// arbitrary lab-frame initial state under exact cancellation.
pub fn final_norm_general(
    chain: &ChainSpec,
    ramp: &GaugeRamp,
    initial_lab: &Array1<C64>,
) -> Result<f64> {
    let m = chain.site_count();
    if initial_lab.len() != m {
        return Err(Error::DimensionMismatch {
            what: "initial state",
            expected: m,
            got: initial_lab.len(),
        });
    }
    let w = w_matrix(chain, ramp)?;
    let mut acc = C64::new(0.0, 0.0);
    for i_l in 0..m {
        for i_s in 0..m {
            acc += w[(i_l, i_s)] * initial_lab[i_l] * initial_lab[i_s].conj();
        }
    }
    debug_assert!(acc.im.abs() <= 1e-10 * acc.re.abs().max(1.0));
    Ok(acc.re)
}

/// Final norm for the left-edge delta start:
/// P(T) = sum_n |theta_n|^2 e^{2 h_max (n-N)}. Equal to 1 at h_max = 0,
/// strictly below 1 for h_max > 0, and close to |theta_N|^2 once
/// h_max is of order one.
pub fn final_norm_delta(chain: &ChainSpec, ramp: &GaugeRamp) -> Result<f64> {
    assert_centered_odd(chain);
    require_exact_cancellation(ramp)?;
    let theta = theta_vector(chain, ramp.t_half());
    let h_max = ramp.h_max();
    let n_half = chain.n_half() as f64;
    Ok(chain
        .sites()
        .zip(theta.iter())
        .map(|(n, th)| th.norm_sqr() * (2.0 * h_max * (n as f64 - n_half)).exp())
        .sum())
}
