use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use taylor_lab::evolution::random_constrained;
use taylor_lab::normal_form::{build_q, homological_rhs, DEFAULT_RESONANCE_TOL};
use taylor_lab::operators::proj_eta;
use taylor_lab::spectral::*;
use taylor_lab::{BackgroundField, BackgroundTerm, Error, ModeContext, ModeField, WaveVector};

fn flat() -> BackgroundField {
    BackgroundField::new(&[
        BackgroundTerm::cos(1, 1, 1.0),
        BackgroundTerm::sin(2, 1, 1.0),
        BackgroundTerm::cos(2, 2, 0.5),
    ])
    .unwrap()
}

#[test]
fn eigen_relations_on_a_two_mode_background() {
    for w in [WaveVector(1, 0), WaveVector(2, -1)] {
        let ctx = ModeContext::new(&flat(), w).unwrap();
        let basis = build_basis(&ctx, 6, 64).unwrap();
        assert!(verify_a_on_basis(&ctx, &basis).max_residual < 1e-10);
        assert!(basis.gram_defect() < 1e-10);
        for k in [-3, 1, 5] {
            let e = basis.e(k);
            let de = apply_d(&ctx, e).resized(64);
            let want = e.resized(64).scale(basis.mu(k).unwrap());
            assert!(de.checked_sub(&want).unwrap().norm() < 1e-10, "k = {k}");
        }
    }
}

#[test]
fn band_projector_is_an_orthogonal_projection_inside_eta_perp() {
    let ctx = ModeContext::new(&flat(), WaveVector(1, 1)).unwrap();
    let basis = build_basis(&ctx, 4, 48).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let b = ModeField::random_decaying(48, &mut rng);
    let p = proj_band(&basis, 3, &b).unwrap();
    assert!(proj_band(&basis, 3, &p).unwrap().sub(&p).norm() < 1e-12);
    assert!(proj_eta(&ctx, &p).norm() < 1e-12);
    let rest = proj_band_complement(&ctx, &basis, 3, &b).unwrap();
    assert!(rest.inner(&p).norm() < 1e-12);
}

#[test]
fn guards_on_basis_size_and_resolution() {
    let ctx = ModeContext::new(&flat(), WaveVector(1, 0)).unwrap();
    assert!(matches!(
        build_basis(&ctx, 5, 16),
        Err(Error::InvalidInput(_))
    ));
    let basis = build_basis(&ctx, 2, 24).unwrap();
    assert!(matches!(
        basis.band_matrix(3),
        Err(Error::BandExceedsBasis {
            band: 3,
            available: 2
        })
    ));
    let rough = BackgroundField::new(&[
        BackgroundTerm::cos(1, 5, 4.0),
        BackgroundTerm::sin(2, 4, 4.0),
    ])
    .unwrap();
    let ctx = ModeContext::new(&rough, WaveVector(1, 0)).unwrap();
    assert!(matches!(
        build_basis(&ctx, 2, 8),
        Err(Error::ResolutionExceeded { .. })
    ));
}

#[test]
fn d3_band_norm_grows_with_the_band() {
    let ctx = ModeContext::new(&flat(), WaveVector(1, 0)).unwrap();
    let basis = build_basis(&ctx, 8, 40).unwrap();
    let norms: Vec<f64> = [2, 4, 8]
        .iter()
        .map(|&n| d3_band_norm(&basis, n).unwrap())
        .collect();
    assert!(norms.windows(2).all(|w| w[1] > w[0]));
}

#[test]
fn normal_form_on_two_mode_background() {
    let ctx = ModeContext::new(&flat(), WaveVector(8, 0)).unwrap();
    let basis = build_basis(&ctx, 4, 32).unwrap();
    let nf = build_q(&ctx, &basis, 4, DEFAULT_RESONANCE_TOL).unwrap();
    assert!(nf.commutator_residual < 1e-10);
    assert!(nf.max_resonance_residual() < 1e-10);
    assert!(homological_rhs(&ctx, &basis, 2, -1).norm() < 1e-10);
    assert!(homological_rhs(&ctx, &basis, 0, 2).norm() > 1e-6);
    assert!(nf.d3_squared_commutator_norm() > 0.0);

    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let b = random_constrained(&ctx, 32, &mut rng);
    let d = nf.conjugate(&ctx, &b).unwrap();
    let back = nf.unconjugate(&ctx, &d).unwrap();
    assert!(back.sub(&b).norm() < 1e-12 * b.norm());

    let coarse = ModeContext::new(&flat(), WaveVector(1, 0)).unwrap();
    let basis = build_basis(&coarse, 4, 32).unwrap();
    let nf = build_q(&coarse, &basis, 4, DEFAULT_RESONANCE_TOL).unwrap();
    if coarse.eps * nf.q_norm >= 0.5 {
        assert!(matches!(
            nf.conjugate(&coarse, &b),
            Err(Error::RegimeViolation { .. })
        ));
    }
}

fn coefficients(basis: &SpectralBasis, k_max: i64, b: &ModeField) -> Vec<num_complex::Complex64> {
    let minus = (-k_max..=k_max).map(|k| b.inner(&basis.phi_minus(k)));
    let plus = (-2 * k_max..=2 * k_max + 1).map(|j| b.inner(&basis.phi_plus(j)));
    minus.chain(plus).collect()
}

#[test]
fn eigenvector_family_is_orthonormal_and_complete_on_its_span() {
    let ctx = ModeContext::new(&flat(), WaveVector(1, 0)).unwrap();
    let k = 6;
    let basis = build_basis(&ctx, k as usize, 48).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let weights = coefficients(&basis, k, &ModeField::random_decaying(48, &mut rng));
    let mut span = ModeField::zeros(48);
    let fields = (-k..=k)
        .map(|i| basis.phi_minus(i))
        .chain((-2 * k..=2 * k + 1).map(|j| basis.phi_plus(j)));
    for (w, f) in weights.iter().zip(fields) {
        span = span.axpy(*w, &f);
    }
    let energy: f64 = coefficients(&basis, k, &span)
        .iter()
        .map(|c| c.norm_sqr())
        .sum();
    assert!((energy - span.norm_sqr()).abs() < 1e-8 * span.norm_sqr());

    let b = ModeField::random_decaying(48, &mut rng);
    let bessel: f64 = coefficients(&basis, k, &b)
        .iter()
        .map(|c| c.norm_sqr())
        .sum();
    assert!(bessel <= b.norm_sqr() * (1.0 + 1e-12));
}
