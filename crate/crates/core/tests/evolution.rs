use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeMap;
use taylor_lab::constraints::{constraint_matrix, ConstraintKind};
use taylor_lab::evolution::*;
use taylor_lab::fourier::TWO_PI;
use taylor_lab::linalg::{expm, hermitian_eigh, CMatrix, CVector};
use taylor_lab::operators::{diffusion, induction_parts, taylor_residual, Geostrophic};
use taylor_lab::{
    BackgroundField, Error, FourierSeries, ModeContext, ModeField, OperatorMatrix, WaveVector,
};

fn ctx(w: WaveVector) -> ModeContext {
    ModeContext::new(&BackgroundField::canonical(), w).unwrap()
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

#[test]
fn diffusion_only_exponential_is_diagonal() {
    let ctx = ctx(WaveVector(1, 2));
    let m = 10;
    let g = OperatorMatrix::assemble("diffusion", m, |b| diffusion(&ctx, b)).entries;
    let h = 0.003;
    let e = expm(&g.scale(h)).unwrap();
    let w = 2 * m + 1;
    for i in 0..3 * w {
        let n = (i % w) as f64 - m as f64;
        let want = (-h * (TWO_PI * TWO_PI * n * n + ctx.xi_norm.powi(2))).exp();
        assert!((e[(i, i)] - want).norm() <= 1e-12 * want, "row {i}");
    }
    assert!((&e - CMatrix::from_diagonal(&e.diagonal())).norm() < 1e-14);
}

#[test]
fn exponential_matches_eigendecomposition() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let b = ModeField::random_decaying(6, &mut rng).to_vector();
    let n = b.len();
    let raw = CMatrix::from_fn(n, n, |i, j| {
        b[(i * 7 + j * 3) % n] * c(1.0, (i as f64 - j as f64) * 0.1)
    });
    let herm = (&raw + raw.adjoint()).scale(0.5);
    let (vals, vecs) = hermitian_eigh(&herm);
    let oracle = &vecs
        * CMatrix::from_diagonal(&CVector::from_iterator(
            n,
            vals.iter().map(|v| c(v.exp(), 0.0)),
        ))
        * vecs.adjoint();
    let ours = expm(&herm).unwrap();
    assert!((&ours - &oracle).norm() < 1e-10 * oracle.norm());
    assert!((&ours - herm.exp()).norm() < 1e-10 * oracle.norm());
}

#[test]
fn propagator_semigroup_and_zero_data() {
    let ctx = ctx(WaveVector(1, 1));
    let mut p = build_propagator(&ctx, 16).unwrap();
    assert!(p.invariance_defect() < 1e-8);
    let h = 0.02;
    let e1 = p.exponential(h).unwrap().clone();
    let e2 = p.exponential(2.0 * h).unwrap().clone();
    let e3 = p.exponential(3.0 * h).unwrap().clone();
    assert!((&e1 * &e2 - &e3).norm() < 1e-10 * e3.norm().max(1.0));
    assert!((&e1 * &e1 - &e2).norm() < 1e-10 * e2.norm().max(1.0));
    let zero = ModeField::zeros(16);
    assert_eq!(p.step(&zero, h).unwrap(), zero);
}

#[test]
fn step_rejects_unconstrained_data() {
    let ctx = ctx(WaveVector(1, 0));
    let mut p = build_propagator(&ctx, 8).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let b = ModeField::random_decaying(8, &mut rng);
    assert!(matches!(
        p.step(&b, 0.01),
        Err(Error::ConstraintViolated { .. })
    ));
}

#[test]
fn projection_matches_kkt_least_squares() {
    let ctx = ctx(WaveVector(2, 1));
    let m = 8;
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let b = ModeField::random_decaying(m, &mut rng);
    let k = constraint_matrix(&ctx, m, ConstraintKind::DivergenceAndTaylor);
    let (r, n) = k.shape();
    let mut kkt = CMatrix::zeros(n + r, n + r);
    kkt.view_mut((0, 0), (n, n)).fill_with_identity();
    kkt.view_mut((0, n), (n, r)).copy_from(&k.adjoint());
    kkt.view_mut((n, 0), (r, n)).copy_from(&k);
    let mut rhs = CVector::zeros(n + r);
    rhs.rows_mut(0, n).copy_from(&b.to_vector());
    let sol = kkt.lu().solve(&rhs).unwrap();
    let oracle = ModeField::from_vector(m, &sol.rows(0, n).into_owned());
    let pb = project_constraints(&ctx, &b);
    assert!(pb.sub(&oracle).norm() < 1e-12);
    let (t, d) = constraint_residuals(&ctx, &pb);
    assert!(t < 1e-12 && d < 1e-12);
    let v = random_constrained(&ctx, m, &mut rng);
    assert!(b.sub(&pb).inner(&v).norm() < 1e-12);
}

#[test]
fn energy_identity_by_finite_differences() {
    let ctx = ctx(WaveVector(1, 0));
    let m = 16;
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let b = random_constrained(&ctx, m, &mut rng);
    let mut p = build_propagator(&ctx, m).unwrap();
    let parts = induction_parts(&ctx, &b, Geostrophic::Included);
    let power = parts.ind_m.add(&parts.ind_g).inner(&b).re;
    let grad = ctx.xi_norm.powi(2) * b.norm_sqr() + b.d3().norm_sqr();
    let defect = |h: f64, p: &mut ModePropagator| {
        let next = p.step(&b, h).unwrap();
        (next.norm_sqr() - b.norm_sqr()) / h + 2.0 * grad - 2.0 * power
    };
    let coarse = defect(2e-6, &mut p);
    let fine = defect(1e-6, &mut p);
    assert!(
        fine.abs() < 0.6 * coarse.abs(),
        "coarse {coarse:.3e}, fine {fine:.3e}"
    );
    let extrapolated = 2.0 * fine - coarse;
    assert!(
        extrapolated.abs() < 1e-5 * grad,
        "extrapolated {extrapolated:.3e}, grad {grad:.3e}"
    );
}

#[test]
fn taylor_residual_does_not_drift() {
    let ctx = ctx(WaveVector(2, 1));
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut b = random_constrained(&ctx, 24, &mut rng);
    let mut p = build_propagator(&ctx, 24).unwrap();
    for _ in 0..10 {
        b = p.step(&b, 0.05).unwrap();
    }
    assert!(taylor_residual(&ctx, &b).norm() < 1e-8);
}

#[test]
fn heat_decay_of_the_zero_mode() {
    let b0 = [
        FourierSeries::cos(1, 1.0),
        FourierSeries::sin(2, 0.5),
        FourierSeries::zeros(2),
    ];
    let b = heat_zero_mode(&b0, 0.1).unwrap();
    let factor = b[0].coeff(1).re / b0[0].coeff(1).re;
    assert!((factor - (-0.4 * std::f64::consts::PI.powi(2)).exp()).abs() < 1e-15);
    assert!(b[0].coeff(0).norm() == 0.0);
}

fn pair_state(m: usize) -> SimulationState {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let mut modes = BTreeMap::new();
    for w in [WaveVector(1, 0), WaveVector(1, 2)] {
        let b = random_constrained(&ctx(w), m, &mut rng);
        modes.insert(w.neg(), b.map(FourierSeries::conj));
        modes.insert(w, b);
    }
    let zero = [
        FourierSeries::cos(1, 0.3),
        FourierSeries::sin(1, 0.2),
        FourierSeries::zeros(1),
    ];
    SimulationState {
        time: 0.0,
        modes,
        zero_mode: zero,
        log: Vec::new(),
    }
}

#[test]
fn conjugate_pairs_assemble_to_a_real_divergence_free_field() {
    let state = pair_state(8);
    let snap = assemble_full_field(&state, [4, 4, 8]);
    assert!(snap.conjugate_symmetric);
    assert!(snap.max_imag < 1e-12);
    assert!(snap.max_divergence < 1e-6);
}

#[test]
fn finite_difference_divergence_oracle() {
    let state = pair_state(8);
    let d = 1e-3;
    let f = |x: [f64; 3], i: usize| -> f64 {
        let g = |s: f64| {
            let mut y = x;
            y[i] += s;
            state.eval(y)[i].re
        };
        (8.0 * (g(d) - g(-d)) - (g(2.0 * d) - g(-2.0 * d))) / (12.0 * d)
    };
    for x in [[0.1, 0.7, 0.3], [0.55, 0.2, 0.9], [0.0, 0.0, 0.0]] {
        let div = f(x, 0) + f(x, 1) + f(x, 2);
        assert!(div.abs() < 1e-6, "fd divergence {div:.3e} at {x:?}");
    }
}

#[test]
fn zero_mode_only_field_is_horizontally_constant() {
    let mut state = pair_state(4);
    state.modes.clear();
    let a = state.eval([0.1, 0.2, 0.4]);
    let b = state.eval([0.8, 0.5, 0.4]);
    assert!(a.iter().zip(&b).all(|(p, q)| (p - q).norm() < 1e-15));
}

#[test]
fn abscissa_of_diffusion_dominated_modes() {
    let rows = abscissa_sweep(
        &BackgroundField::canonical(),
        &[WaveVector(1, 0), WaveVector(4, 0)],
        12,
        Geostrophic::Included,
    )
    .unwrap();
    for r in &rows {
        assert!(r.restricted < 0.0);
        assert!(r.restricted <= -r.xi_norm.powi(2) * 0.9);
    }
}
