//! Chain geometry, gauge ramp protocol, site potentials and the lab-frame
//! Hamiltonian of the non-Hermitian tight-binding chain.
//!
//! Site amplitudes live on a contiguous index window, by default the
//! centered odd layout `-N ..= N` with `2N+1` sites and open boundary
//! conditions. The imaginary gauge field `h` weights left/right hopping
//! asymmetrically, `kappa e^{-h}` and `kappa e^{+h}` (Hatano-Nelson form),
//! and the gauge transformation `c_n = a_n e^{h n}` maps between the lab
//! frame (`c_n`) and the gauge frame (`a_n`).

use ndarray::{Array1, Array2};
use num_complex::Complex64 as C64;

use crate::disorder::DisorderRealization;
use crate::error::{Error, Result};

/// Largest |h * n| ever exponentiated into lab-frame amplitudes.
///
/// e^60 ~ 1e26 leaves headroom for the squared magnitudes entering the
/// norm; beyond this, callers must stay in the gauge frame.
pub const EXPONENT_CAP: f64 = 60.0;

/// Static lattice geometry and the uniform hopping rate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChainSpec {
    n_half: usize,
    kappa: f64,
    site_count: usize,
}

impl ChainSpec {
    /// Centered odd chain with sites `-N ..= N` (`2N+1` sites).
    pub fn new(n_half: usize, kappa: f64) -> Result<Self> {
        Self::with_site_count(n_half, kappa, 2 * n_half + 1)
    }

    /// Chain over the window `-N ..` with an explicit site count, which
    /// permits even-length chains. `1 <= site_count <= 2N+1`.
    pub fn with_site_count(n_half: usize, kappa: f64, site_count: usize) -> Result<Self> {
        if !kappa.is_finite() || kappa <= 0.0 {
            return Err(Error::InvalidParameter {
                name: "kappa",
                reason: format!("hopping rate must be finite and > 0, got {kappa}"),
            });
        }
        if site_count == 0 || site_count > 2 * n_half + 1 {
            return Err(Error::InvalidParameter {
                name: "site_count",
                reason: format!("must lie in 1..={}, got {site_count}", 2 * n_half + 1),
            });
        }
        Ok(Self {
            n_half,
            kappa,
            site_count,
        })
    }

    pub fn n_half(&self) -> usize {
        self.n_half
    }

    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    pub fn site_count(&self) -> usize {
        self.site_count
    }

    pub fn bond_count(&self) -> usize {
        self.site_count - 1
    }

    /// True for the default `-N ..= N` layout all closed forms assume.
    pub fn is_centered_odd(&self) -> bool {
        self.site_count == 2 * self.n_half + 1
    }

    pub fn has_even_site_count(&self) -> bool {
        self.site_count.is_multiple_of(2)
    }

    /// Site index of storage slot `idx` (slot 0 is the left edge `-N`).
    pub fn site(&self, idx: usize) -> i64 {
        idx as i64 - self.n_half as i64
    }

    pub fn sites(&self) -> impl Iterator<Item = i64> + '_ {
        (0..self.site_count).map(|i| self.site(i))
    }

    /// Largest |n| over the window.
    pub fn max_abs_site(&self) -> f64 {
        self.sites().map(|n| n.abs()).max().unwrap_or(0) as f64
    }
}

/// The time protocol of the imaginary gauge field: a linear ramp
/// h(t) = alpha t from -h_max at t = -T to +h_max at t = +T, with
/// slope alpha = h_max / T. `mismatch_delta` scales the cancellation
/// potentials to gamma_n = -(1 + delta) alpha n.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaugeRamp {
    h_max: f64,
    t_half: f64,
    mismatch_delta: f64,
}

impl GaugeRamp {
    pub fn new(h_max: f64, t_half: f64) -> Result<Self> {
        if !h_max.is_finite() || h_max < 0.0 {
            return Err(Error::InvalidParameter {
                name: "h_max",
                reason: format!("gauge amplitude must be finite and >= 0, got {h_max}"),
            });
        }
        if !t_half.is_finite() || t_half <= 0.0 {
            return Err(Error::InvalidParameter {
                name: "t_half",
                reason: format!("half interaction time must be finite and > 0, got {t_half}"),
            });
        }
        Ok(Self {
            h_max,
            t_half,
            mismatch_delta: 0.0,
        })
    }

    pub fn with_mismatch(mut self, delta: f64) -> Self {
        self.mismatch_delta = delta;
        self
    }

    pub fn h_max(&self) -> f64 {
        self.h_max
    }

    pub fn t_half(&self) -> f64 {
        self.t_half
    }

    pub fn mismatch_delta(&self) -> f64 {
        self.mismatch_delta
    }

    /// Ramp slope alpha = h_max / T; never set independently.
    pub fn alpha(&self) -> f64 {
        self.h_max / self.t_half
    }

    /// Gauge field at time `t`. Evaluated as h_max * (t/T) so the
    /// endpoints are exactly -h_max and +h_max.
    pub fn h_at(&self, t: f64) -> f64 {
        self.h_max * (t / self.t_half)
    }
}

/// Imaginary site potentials gamma_n (gain for gamma < 0, loss for
/// gamma > 0) plus optional real site energies, both in units of
/// inverse time.
#[derive(Debug, Clone, PartialEq)]
pub struct SitePotentials {
    gamma: Vec<f64>,
    real_energy: Vec<f64>,
}

impl SitePotentials {
    /// gamma_n = E_n = 0 everywhere.
    pub fn zero(chain: &ChainSpec) -> Self {
        Self {
            gamma: vec![0.0; chain.site_count()],
            real_energy: vec![0.0; chain.site_count()],
        }
    }

    /// The nonadiabaticity-cancelling gradient gamma_n = -(1 + delta) alpha n.
    /// With delta = 0 this makes the gauge-frame generator Hermitian for
    /// any ramp slope.
    pub fn cancellation(chain: &ChainSpec, ramp: &GaugeRamp) -> Self {
        let factor = (1.0 + ramp.mismatch_delta()) * ramp.alpha();
        Self {
            gamma: chain.sites().map(|n| -factor * n as f64).collect(),
            real_energy: vec![0.0; chain.site_count()],
        }
    }

    pub fn from_parts(chain: &ChainSpec, gamma: Vec<f64>, real_energy: Vec<f64>) -> Result<Self> {
        if gamma.len() != chain.site_count() {
            return Err(Error::DimensionMismatch {
                what: "gamma",
                expected: chain.site_count(),
                got: gamma.len(),
            });
        }
        if real_energy.len() != chain.site_count() {
            return Err(Error::DimensionMismatch {
                what: "real_energy",
                expected: chain.site_count(),
                got: real_energy.len(),
            });
        }
        Ok(Self { gamma, real_energy })
    }

    pub fn gamma(&self) -> &[f64] {
        &self.gamma
    }

    pub fn real_energy(&self) -> &[f64] {
        &self.real_energy
    }
}

/// Which amplitudes a state stores: lab frame c_n or gauge frame a_n,
/// related by c_n = a_n e^{h n}.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Frame {
    Lab,
    Gauge,
}

/// Complex amplitude vector over the chain window at one instant.
#[derive(Debug, Clone, PartialEq)]
pub struct LatticeState {
    amplitudes: Array1<C64>,
    frame: Frame,
    time: f64,
}

impl LatticeState {
    pub fn new(amplitudes: Array1<C64>, frame: Frame, time: f64) -> Self {
        Self {
            amplitudes,
            frame,
            time,
        }
    }

    /// Unit excitation of the left edge site, lab frame.
    pub fn left_edge_delta(chain: &ChainSpec, time: f64) -> Self {
        let mut amplitudes = Array1::zeros(chain.site_count());
        amplitudes[0] = C64::new(1.0, 0.0);
        Self {
            amplitudes,
            frame: Frame::Lab,
            time,
        }
    }

    pub fn amplitudes(&self) -> &Array1<C64> {
        &self.amplitudes
    }

    pub fn frame(&self) -> Frame {
        self.frame
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    /// Sum of squared magnitudes in the stored frame.
    pub fn norm_sq(&self) -> f64 {
        self.amplitudes.iter().map(|c| c.norm_sqr()).sum()
    }

    pub fn normalized(&self) -> Result<Self> {
        let n = self.norm_sq();
        if n <= 0.0 {
            return Err(Error::ZeroNorm { time: self.time });
        }
        let scale = C64::new(1.0 / n.sqrt(), 0.0);
        Ok(Self {
            amplitudes: self.amplitudes.mapv(|c| c * scale),
            frame: self.frame,
            time: self.time,
        })
    }
}

/// Convert a state between lab and gauge frames at gauge field `h_now`.
///
/// Lab -> Gauge divides the amplitude at site n by e^{h n}; Gauge -> Lab
/// multiplies. The time tag is unchanged; `h_now` is passed explicitly so
/// constant-field uses do not need a ramp. Fails when any |h n| exceeds
/// [`EXPONENT_CAP`].
pub fn gauge_map(
    state: &LatticeState,
    chain: &ChainSpec,
    target: Frame,
    h_now: f64,
) -> Result<LatticeState> {
    if state.amplitudes.len() != chain.site_count() {
        return Err(Error::DimensionMismatch {
            what: "state amplitudes",
            expected: chain.site_count(),
            got: state.amplitudes.len(),
        });
    }
    if state.frame == target {
        return Ok(state.clone());
    }
    let worst = h_now.abs() * chain.max_abs_site();
    if worst > EXPONENT_CAP {
        return Err(Error::ExponentOverflow {
            exponent: worst,
            cap: EXPONENT_CAP,
        });
    }
    let sign = match target {
        Frame::Gauge => -1.0, // a_n = c_n e^{-h n}
        Frame::Lab => 1.0,    // c_n = a_n e^{+h n}
    };
    let amplitudes = Array1::from_iter(
        chain
            .sites()
            .zip(state.amplitudes.iter())
            .map(|(n, c)| c * C64::new((sign * h_now * n as f64).exp(), 0.0)),
    );
    Ok(LatticeState {
        amplitudes,
        frame: target,
        time: state.time,
    })
}

/// Lab-frame Hamiltonian matrix at gauge field `h`:
/// upper diagonal kappa (1 + delta_n) e^{-h}, lower diagonal
/// kappa (1 + delta_n) e^{+h}, diagonal E_n - i gamma_n. Disorder site
/// energies are given in units of kappa and added to `pots.real_energy`.
pub fn build_lab_hamiltonian(
    chain: &ChainSpec,
    h: f64,
    pots: &SitePotentials,
    disorder: Option<&DisorderRealization>,
) -> Result<Array2<C64>> {
    let m = chain.site_count();
    if pots.gamma.len() != m {
        return Err(Error::DimensionMismatch {
            what: "gamma",
            expected: m,
            got: pots.gamma.len(),
        });
    }
    if let Some(d) = disorder {
        if d.delta_n().len() != chain.bond_count() {
            return Err(Error::DimensionMismatch {
                what: "disorder delta_n",
                expected: chain.bond_count(),
                got: d.delta_n().len(),
            });
        }
        if d.e_n().len() != m {
            return Err(Error::DimensionMismatch {
                what: "disorder e_n",
                expected: m,
                got: d.e_n().len(),
            });
        }
    }
    let kappa = chain.kappa();
    let up = kappa * (-h).exp();
    let dn = kappa * h.exp();
    let mut mat = Array2::zeros((m, m));
    for i in 0..m {
        let e_dis = disorder.map_or(0.0, |d| kappa * d.e_n()[i]);
        mat[(i, i)] = C64::new(pots.real_energy[i] + e_dis, -pots.gamma[i]);
        if i + 1 < m {
            let bond = 1.0 + disorder.map_or(0.0, |d| d.delta_n()[i]);
            mat[(i, i + 1)] = C64::new(up * bond, 0.0);
            mat[(i + 1, i)] = C64::new(dn * bond, 0.0);
        }
    }
    Ok(mat)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn single_site_chain_is_scalar() {
        let chain = ChainSpec::new(0, 1.0).unwrap();
        let pots = SitePotentials::from_parts(&chain, vec![0.7], vec![0.3]).unwrap();
        let h = build_lab_hamiltonian(&chain, 2.5, &pots, None).unwrap();
        assert_eq!(h.dim(), (1, 1));
        assert_eq!(h[(0, 0)], c(0.3, -0.7));
    }

    #[test]
    fn hermitian_limit_is_exactly_symmetric() {
        let chain = ChainSpec::new(1, 2.0).unwrap();
        let pots = SitePotentials::zero(&chain);
        let h = build_lab_hamiltonian(&chain, 0.0, &pots, None).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                assert_eq!(h[(i, j)], h[(j, i)].conj());
            }
        }
        assert_eq!(h[(0, 1)], c(2.0, 0.0));
        assert_eq!(h[(1, 2)], c(2.0, 0.0));
        assert_eq!(h[(0, 2)], c(0.0, 0.0));
    }

    #[test]
    fn gauge_field_weights_hops_asymmetrically() {
        let chain = ChainSpec::new(1, 1.0).unwrap();
        let pots = SitePotentials::zero(&chain);
        let h = build_lab_hamiltonian(&chain, 0.5, &pots, None).unwrap();
        assert!((h[(0, 1)].re - (-0.5f64).exp()).abs() < 1e-15);
        assert!((h[(1, 0)].re - 0.5f64.exp()).abs() < 1e-15);
    }

    #[test]
    fn cancellation_preset_matches_gradient() {
        let chain = ChainSpec::new(3, 1.0).unwrap();
        let ramp = GaugeRamp::new(2.0, 4.0).unwrap();
        let pots = SitePotentials::cancellation(&chain, &ramp);
        let alpha = ramp.alpha();
        for (i, n) in chain.sites().enumerate() {
            assert_eq!(pots.gamma()[i], -(n as f64) * alpha);
        }
        // mismatch scales the gradient
        let pots = SitePotentials::cancellation(&chain, &ramp.with_mismatch(0.5));
        assert!((pots.gamma()[0] - 1.5 * alpha * 3.0).abs() < 1e-15);
    }

    #[test]
    fn ramp_endpoints_are_exact() {
        let ramp = GaugeRamp::new(3.0, 7.0).unwrap();
        assert_eq!(ramp.h_at(-7.0), -3.0);
        assert_eq!(ramp.h_at(7.0), 3.0);
        assert_eq!(ramp.h_at(0.0), 0.0);
        assert!((ramp.alpha() * ramp.t_half() - ramp.h_max()).abs() < 1e-15);
    }

    #[test]
    fn gauge_map_identity_at_zero_field() {
        let chain = ChainSpec::new(2, 1.0).unwrap();
        let amps = Array1::from_vec(vec![c(0.1, 0.2); 5]);
        let s = LatticeState::new(amps, Frame::Lab, -1.0);
        let g = gauge_map(&s, &chain, Frame::Gauge, 0.0).unwrap();
        assert_eq!(g.amplitudes(), s.amplitudes());
        assert_eq!(g.frame(), Frame::Gauge);
        assert_eq!(g.time(), s.time());
    }

    #[test]
    fn left_edge_excitation_shrinks_into_gauge_frame() {
        // at h = -h_max the left edge weight e^{-h n} = e^{-h_max N}
        let n_half = 4;
        let h_max = 2.0;
        let chain = ChainSpec::new(n_half, 1.0).unwrap();
        let s = LatticeState::left_edge_delta(&chain, -1.0);
        let g = gauge_map(&s, &chain, Frame::Gauge, -h_max).unwrap();
        let expected = (-h_max * n_half as f64).exp();
        assert!((g.amplitudes()[0].re - expected).abs() < 1e-15 * expected);
    }

    #[test]
    fn gauge_round_trip_is_machine_precision() {
        let chain = ChainSpec::new(5, 1.0).unwrap();
        let amps = Array1::from_iter((0..11).map(|i| c(0.3 + i as f64, 1.0 - 0.2 * i as f64)));
        let s = LatticeState::new(amps, Frame::Lab, 0.5);
        let rt = gauge_map(
            &gauge_map(&s, &chain, Frame::Gauge, 3.0).unwrap(),
            &chain,
            Frame::Lab,
            3.0,
        )
        .unwrap();
        for (a, b) in s.amplitudes().iter().zip(rt.amplitudes().iter()) {
            assert!((a - b).norm() <= 1e-12 * a.norm());
        }
    }

    #[test]
    fn exponent_cap_is_enforced() {
        let chain = ChainSpec::new(10, 1.0).unwrap();
        let s = LatticeState::left_edge_delta(&chain, 0.0);
        let err = gauge_map(&s, &chain, Frame::Gauge, 6.5).unwrap_err();
        assert!(matches!(err, Error::ExponentOverflow { .. }));
    }

    #[test]
    fn even_site_count_window() {
        let chain = ChainSpec::with_site_count(5, 1.0, 10).unwrap();
        assert!(chain.has_even_site_count());
        assert!(!chain.is_centered_odd());
        let sites: Vec<i64> = chain.sites().collect();
        assert_eq!(sites.first(), Some(&-5));
        assert_eq!(sites.last(), Some(&4));
        assert_eq!(chain.bond_count(), 9);
    }

    #[test]
    fn invalid_parameters_are_rejected() {
        assert!(ChainSpec::new(1, 0.0).is_err());
        assert!(ChainSpec::new(1, -1.0).is_err());
        assert!(ChainSpec::with_site_count(1, 1.0, 0).is_err());
        assert!(ChainSpec::with_site_count(1, 1.0, 4).is_err());
        assert!(GaugeRamp::new(-0.1, 1.0).is_err());
        assert!(GaugeRamp::new(1.0, 0.0).is_err());
        let chain = ChainSpec::new(1, 1.0).unwrap();
        assert!(SitePotentials::from_parts(&chain, vec![0.0; 2], vec![0.0; 3]).is_err());
    }
}
