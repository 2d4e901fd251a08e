//! Cross-checks of the closed forms against independent dense linear
//! algebra: a general nonsymmetric eigensolver for the non-Hermitian
//! chain, a self-adjoint eigensolver for the Hermitian limit, and the
//! in-crate matrix exponential for the propagator.

use faer::complex_native::c64;
use faer::{Mat, Side};
use ndarray::Array2;
use num_complex::Complex64 as C64;

use gauge_transfer::{
    build_lab_hamiltonian, expm::expm, gauge_eigenstate, hermitian_propagator, hermitian_spectrum,
    theta_vector, ChainSpec, GaugeRamp, ModeIndex, SitePotentials,
};

fn to_faer(a: &Array2<C64>) -> Mat<c64> {
    Mat::from_fn(a.nrows(), a.ncols(), |i, j| {
        c64::new(a[(i, j)].re, a[(i, j)].im)
    })
}

fn sorted_real_eigenvalues(a: &Array2<C64>) -> Vec<f64> {
    let evals: Vec<c64> = to_faer(a).eigenvalues();
    for e in &evals {
        assert!(e.im.abs() < 1e-10, "eigenvalue {e:?} is not real");
    }
    let mut re: Vec<f64> = evals.iter().map(|e| e.re).collect();
    re.sort_by(|x, y| x.partial_cmp(y).unwrap());
    re
}

#[test]
fn gauge_field_leaves_the_spectrum_untouched() {
    // pseudo-Hermiticity: eigenvalues of the open chain with any constant
    // gauge field coincide with the h = 0 spectrum
    let chain = ChainSpec::new(5, 1.0).unwrap();
    let pots = SitePotentials::zero(&chain);
    let closed = {
        let mut e = hermitian_spectrum(&chain);
        e.sort_by(|x, y| x.partial_cmp(y).unwrap());
        e
    };
    for &h in &[0.0, 0.25, 0.5, 1.5, 3.0] {
        let ham = build_lab_hamiltonian(&chain, h, &pots, None).unwrap();
        let eigs = sorted_real_eigenvalues(&ham);
        for (a, b) in eigs.iter().zip(&closed) {
            assert!((a - b).abs() < 1e-10, "h={h}: {a} vs {b}");
        }
    }
}

#[test]
fn closed_form_spectrum_matches_the_dense_eigensolver() {
    for n_half in [1usize, 5, 15] {
        let chain = ChainSpec::new(n_half, 1.0).unwrap();
        let pots = SitePotentials::zero(&chain);
        let ham = build_lab_hamiltonian(&chain, 0.0, &pots, None).unwrap();
        let eig = to_faer(&ham).selfadjoint_eigendecomposition(Side::Lower);
        let m = chain.site_count();
        let mut numeric: Vec<f64> = (0..m).map(|i| eig.s().column_vector().read(i).re).collect();
        numeric.sort_by(|x, y| x.partial_cmp(y).unwrap());
        let mut closed = hermitian_spectrum(&chain);
        closed.sort_by(|x, y| x.partial_cmp(y).unwrap());
        for (a, b) in numeric.iter().zip(&closed) {
            assert!((a - b).abs() < 1e-12, "N={n_half}: {a} vs {b}");
        }
    }
}

#[test]
fn closed_form_eigenvectors_match_the_dense_eigensolver() {
    // the spectrum is nondegenerate, so matching eigenvalues pins each
    // eigenvector up to phase; compare projectively
    let chain = ChainSpec::new(4, 1.0).unwrap();
    let pots = SitePotentials::zero(&chain);
    let ham = build_lab_hamiltonian(&chain, 0.0, &pots, None).unwrap();
    let eig = to_faer(&ham).selfadjoint_eigendecomposition(Side::Lower);
    let m = chain.site_count();
    let closed = hermitian_spectrum(&chain);
    for l in 1..=m {
        let v = gauge_eigenstate(&chain, 0.0, ModeIndex::new(l, &chain).unwrap()).unwrap();
        // locate the numeric eigenpair with the same energy (ascending order)
        let target = closed[l - 1];
        let mut idx = 0;
        let mut best = f64::INFINITY;
        for i in 0..m {
            let d = (eig.s().column_vector().read(i).re - target).abs();
            if d < best {
                best = d;
                idx = i;
            }
        }
        assert!(best < 1e-12);
        let mut overlap = c64::new(0.0, 0.0);
        let mut norm_num = 0.0;
        for i in 0..m {
            let u = eig.u().read(i, idx);
            overlap += u.conj() * c64::new(v[i].re, v[i].im);
            norm_num += u.norm_sqr();
        }
        let norm_closed: f64 = v.iter().map(|z| z.norm_sqr()).sum();
        let cos = overlap.norm() / (norm_num.sqrt() * norm_closed.sqrt());
        assert!((cos - 1.0).abs() < 1e-10, "mode {l}: overlap {cos}");
    }
}

#[test]
fn gauge_hamiltonian_is_similar_to_the_bare_one() {
    // H(h) = S H(0) S^{-1} with S = diag(e^{h n})
    let chain = ChainSpec::new(5, 1.0).unwrap();
    let pots = SitePotentials::zero(&chain);
    let h = 1.2;
    let bare = build_lab_hamiltonian(&chain, 0.0, &pots, None).unwrap();
    let gauged = build_lab_hamiltonian(&chain, h, &pots, None).unwrap();
    let m = chain.site_count();
    let mut similar = Array2::<C64>::zeros((m, m));
    for (i, n) in chain.sites().enumerate() {
        for (j, l) in chain.sites().enumerate() {
            similar[(i, j)] = bare[(i, j)] * C64::new((h * (n - l) as f64).exp(), 0.0);
        }
    }
    let scale: f64 = gauged.iter().map(|z| z.norm()).fold(0.0, f64::max);
    for i in 0..m {
        for j in 0..m {
            assert!((similar[(i, j)] - gauged[(i, j)]).norm() <= 1e-10 * scale);
        }
    }
}

#[test]
fn closed_form_eigenstates_are_complete_at_zero_field() {
    let chain = ChainSpec::new(6, 1.0).unwrap();
    let m = chain.site_count();
    let mut sum = Array2::<C64>::zeros((m, m));
    for l in 1..=m {
        let v = gauge_eigenstate(&chain, 0.0, ModeIndex::new(l, &chain).unwrap()).unwrap();
        for i in 0..m {
            for j in 0..m {
                sum[(i, j)] += v[i] * v[j].conj();
            }
        }
    }
    for i in 0..m {
        for j in 0..m {
            let expect = if i == j { 1.0 } else { 0.0 };
            assert!((sum[(i, j)] - C64::new(expect, 0.0)).norm() < 1e-10);
        }
    }
}

#[test]
fn propagator_matches_the_matrix_exponential() {
    let chain = ChainSpec::new(5, 1.0).unwrap();
    let t_half = 3.0;
    let u = hermitian_propagator(&chain, t_half);
    let pots = SitePotentials::zero(&chain);
    let ham = build_lab_hamiltonian(&chain, 0.0, &pots, None).unwrap();
    let reference = expm(&ham.mapv(|z| z * C64::new(0.0, -2.0 * t_half)));
    let m = chain.site_count();
    for i in 0..m {
        for j in 0..m {
            assert!((u.entries()[(i, j)] - reference[(i, j)]).norm() < 1e-10);
        }
    }
    // the transferred distribution is the left-edge column
    let theta = theta_vector(&chain, t_half);
    for i in 0..m {
        assert!((theta[i] - reference[(i, 0)]).norm() < 1e-10);
    }
}

#[test]
fn eigensolver_confirms_the_spectrum_with_cancellation_potentials() {
    // with the cancellation gradient the spectrum acquires the imaginary
    // parts -i gamma_n only through the non-normal structure; at h = 0.5
    // and gamma = E = 0 the dense solver must reproduce the cosine band
    let chain = ChainSpec::new(5, 1.0).unwrap();
    let ham = build_lab_hamiltonian(&chain, 0.5, &SitePotentials::zero(&chain), None).unwrap();
    let eigs = sorted_real_eigenvalues(&ham);
    let mut closed = hermitian_spectrum(&chain);
    closed.sort_by(|x, y| x.partial_cmp(y).unwrap());
    for (a, b) in eigs.iter().zip(&closed) {
        assert!((a - b).abs() < 1e-10);
    }
}

#[test]
fn disordered_hamiltonian_stays_pseudo_hermitian() {
    // hopping disorder commutes with the gauge similarity, so the
    // disordered spectrum is also h-independent
    use gauge_transfer::{DisorderKind, DisorderRealization};
    let chain = ChainSpec::new(4, 1.0).unwrap();
    let kind = DisorderKind::UniformSymmetric { width: 0.5 };
    let dis = DisorderRealization::sample(&chain, kind, 11).unwrap();
    let pots = SitePotentials::zero(&chain);
    let bare = build_lab_hamiltonian(&chain, 0.0, &pots, Some(&dis)).unwrap();
    let gauged = build_lab_hamiltonian(&chain, 0.8, &pots, Some(&dis)).unwrap();
    let a = sorted_real_eigenvalues(&bare);
    let b = sorted_real_eigenvalues(&gauged);
    for (x, y) in a.iter().zip(&b) {
        assert!((x - y).abs() < 1e-10);
    }
}

#[test]
fn ramp_keeps_closed_form_exact_for_every_mode_and_grid_point() {
    // the final state formula against the gauge-frame engine over a small
    // (kT, h_max) grid and all modes
    use gauge_transfer::{
        evolve_gauge_frame, exact_final_state_from_eigenstate, gauge_map, initial_eigenstate,
        EvolutionProblem, Frame,
    };
    let chain = ChainSpec::new(3, 1.0).unwrap();
    for &kt in &[0.7, 3.0] {
        for &h_max in &[0.5, 2.0] {
            let ramp = GaugeRamp::new(h_max, kt).unwrap();
            let pots = SitePotentials::cancellation(&chain, &ramp);
            for l in 1..=7 {
                let li = ModeIndex::new(l, &chain).unwrap();
                let initial = initial_eigenstate(&chain, &ramp, li);
                let problem = EvolutionProblem::new(chain, ramp, pots.clone(), initial)
                    .unwrap()
                    .with_samples(9);
                let traj = evolve_gauge_frame(&problem).unwrap();
                let exact_lab = exact_final_state_from_eigenstate(&chain, &ramp, li).unwrap();
                let exact_gauge = gauge_map(
                    &gauge_transfer::LatticeState::new(exact_lab, Frame::Lab, kt),
                    &chain,
                    Frame::Gauge,
                    h_max,
                )
                .unwrap();
                let got = traj.final_state();
                let scale = exact_gauge.norm_sq().sqrt();
                for (a, b) in got.amplitudes().iter().zip(exact_gauge.amplitudes().iter()) {
                    assert!((a - b).norm() <= 1e-8 * scale, "kT={kt} h={h_max} l={l}");
                }
            }
        }
    }
}
