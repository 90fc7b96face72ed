use num_complex::Complex64;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use taylor_lab::background::TrigKind;
use taylor_lab::evolution::random_constrained;
use taylor_lab::fourier::TWO_PI;
use taylor_lab::linalg::op_norm;
use taylor_lab::operators::*;
use taylor_lab::spectral::assemble_d;
use taylor_lab::{
    BackgroundField, BackgroundTerm, Error, FourierSeries, ModeContext, ModeField, OperatorMatrix,
    WaveVector,
};

const M: usize = 12;

fn background() -> impl Strategy<Value = BackgroundField> {
    (
        0.3f64..1.5,
        0.3f64..1.5,
        -0.6f64..0.6,
        1u32..=3,
        any::<bool>(),
    )
        .prop_map(|(a1, a2, a3, n, sin)| {
            let kind = if sin { TrigKind::Sin } else { TrigKind::Cos };
            BackgroundField::new(&[
                BackgroundTerm::cos(1, 1, a1),
                BackgroundTerm::sin(2, 1, a2),
                BackgroundTerm {
                    component: 1,
                    mode: n,
                    amplitude: a3,
                    kind,
                },
            ])
            .unwrap()
        })
}

fn wave() -> impl Strategy<Value = WaveVector> {
    (-3i64..=3, -3i64..=3)
        .prop_filter("nonzero", |&(a, b)| a != 0 || b != 0)
        .prop_map(|(a, b)| WaveVector(a, b))
}

fn assemble(ctx: &ModeContext, op: fn(&ModeContext, &ModeField) -> ModeField) -> OperatorMatrix {
    OperatorMatrix::assemble("op", M, |b| op(ctx, b))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn a_is_skew_and_cm_is_hermitian(bg in background(), w in wave()) {
        let ctx = ModeContext::new(&bg, w).unwrap();
        prop_assert!(assemble(&ctx, op_a).anti_hermitian_defect() < 1e-12);
        prop_assert!(assemble(&ctx, op_am).anti_hermitian_defect() < 1e-12);
        prop_assert!(assemble(&ctx, op_cm).hermitian_defect() < 1e-12);
        prop_assert!(assemble_d(&ctx, M).anti_hermitian_defect() < 1e-12);
    }

    #[test]
    fn projections_are_orthogonal(bg in background(), w in wave()) {
        let ctx = ModeContext::new(&bg, w).unwrap();
        for op in [proj_e0 as fn(&ModeContext, &ModeField) -> ModeField, proj_eta, proj_eta_perp] {
            let p = assemble(&ctx, op).entries;
            prop_assert!((&p * &p - &p).norm() < 1e-12);
            prop_assert!((&p - p.adjoint()).norm() < 1e-12);
        }
        let pe = assemble(&ctx, proj_e0).entries;
        let am = assemble(&ctx, op_am).entries;
        prop_assert!(op_norm(&(&pe * &am * &pe)) < 1e-12);
    }

    #[test]
    fn taylor_formula_on_constrained_fields(bg in background(), w in wave(), seed in any::<u64>()) {
        let ctx = ModeContext::new(&bg, w).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let b = random_constrained(&ctx, M, &mut rng);
        let direct = proj_e0(&ctx, &b);
        let formula = proj_e0_via_taylor(&ctx, &b).unwrap();
        prop_assert!(direct.sub(&formula).norm() < 1e-10 * b.norm().max(1.0));
    }

    #[test]
    fn generator_preserves_constraints(bg in background(), w in wave(), seed in any::<u64>()) {
        let ctx = ModeContext::new(&bg, w).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let b = random_constrained(&ctx, M, &mut rng);
        let lb = full_induction(&ctx, &b);
        let scale = lb.norm().max(1.0);
        prop_assert!(taylor_residual(&ctx, &lb).norm() < 1e-10 * scale);
        prop_assert!(divergence_residual(&ctx, &lb) < 1e-10 * scale);
    }

    #[test]
    fn remainder_decomposition_is_definitional(bg in background(), w in wave(), seed in any::<u64>()) {
        let ctx = ModeContext::new(&bg, w).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let b = ModeField::random_decaying(M, &mut rng);
        let eps = ctx.eps;
        let lhs = full_induction(&ctx, &b).sub(&diffusion(&ctx, &b)).scale_re(eps.powi(3));
        let rhs = op_a(&ctx, &b).add(&op_c(&ctx, &b).scale_re(eps)).add(&op_r(&ctx, &b).scale_re(eps));
        prop_assert!(lhs.sub(&rhs).norm() < 1e-12 * lhs.norm().max(1.0));
    }
}

#[test]
fn diffusion_symbol() {
    let ctx = ModeContext::new(&BackgroundField::canonical(), WaveVector(1, 2)).unwrap();
    let e = FourierSeries::exp_mode(3);
    let b = ModeField::new(
        [e.clone(), FourierSeries::zeros(0), FourierSeries::zeros(0)],
        4,
    );
    let d = diffusion(&ctx, &b);
    let want = -(TWO_PI * TWO_PI * (9.0 + 5.0));
    assert!((d.comp(0).coeff(3) - want).norm() < 1e-10);
}

#[test]
fn vertical_constant_is_constrained_and_untouched_by_projection() {
    let ctx = ModeContext::new(&BackgroundField::canonical(), WaveVector(1, 0)).unwrap();
    let z = Complex64::new(0.0, 0.0);
    let b = ModeField::constant([z, z, Complex64::new(1.5, -0.5)], 6);
    assert!(taylor_residual(&ctx, &b).norm() < 1e-15);
    assert!(divergence_residual(&ctx, &b) < 1e-15);
    assert!(proj_e0(&ctx, &b).norm() < 1e-15);
}

#[test]
fn formula_refuses_unconstrained_input() {
    let ctx = ModeContext::new(&BackgroundField::canonical(), WaveVector(1, 0)).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let b = ModeField::random_decaying(8, &mut rng);
    assert!(matches!(
        proj_e0_via_taylor(&ctx, &b),
        Err(Error::ConstraintViolated { .. })
    ));
}

#[test]
fn zero_wavevector_is_rejected() {
    assert!(matches!(
        ModeContext::new(&BackgroundField::canonical(), WaveVector(0, 0)),
        Err(Error::ZeroMode)
    ));
}
