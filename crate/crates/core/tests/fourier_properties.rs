use num_complex::Complex64;
use proptest::prelude::*;
use taylor_lab::fourier::{FourierSeries, TWO_PI};
use taylor_lab::Error;

fn series(max_trunc: usize) -> impl Strategy<Value = FourierSeries> {
    (0..=max_trunc).prop_flat_map(|m| {
        prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 2 * m + 1).prop_map(move |v| {
            let c = v
                .into_iter()
                .map(|(re, im)| Complex64::new(re, im))
                .collect();
            FourierSeries::from_coeffs(m, c).unwrap()
        })
    })
}

fn close(a: Complex64, b: Complex64, tol: f64) -> bool {
    (a - b).norm() <= tol * (1.0 + a.norm().max(b.norm()))
}

proptest! {
    #[test]
    fn antiderivative_inverts_derivative_on_zero_mean(f in series(8)) {
        let g = f.antiderivative_zero_mean().derivative();
        prop_assert!(g.checked_sub(&f.mean_removed()).unwrap().norm() < 1e-13);
        prop_assert!(f.derivative().antiderivative_zero_mean().checked_sub(&f.mean_removed()).unwrap().norm() < 1e-12);
    }

    #[test]
    fn product_is_pointwise(f in series(6), g in series(6), x in 0.0f64..1.0) {
        let p = f.product(&g);
        prop_assert!(close(p.eval(x), f.eval(x) * g.eval(x), 1e-12));
        prop_assert_eq!(p.truncation(), f.truncation() + g.truncation());
        prop_assert!(p.widening_sub(&g.product(&f)).norm() < 1e-14);
    }

    #[test]
    fn truncated_multiply_reports_discarded_tail(f in series(6), g in series(6)) {
        let full = f.product(&g);
        let keep = full.truncation() / 2;
        let (short, tail) = f.multiply(&g, keep);
        prop_assert!((short.norm_sqr() + tail * tail - full.norm_sqr()).abs() < 1e-12 * (1.0 + full.norm_sqr()));
    }

    #[test]
    fn inner_product_matches_quadrature(f in series(6), g in series(6)) {
        let n = 64;
        let fs = f.samples(n);
        let gs = g.samples(n);
        let quad: Complex64 = fs.iter().zip(&gs).map(|(a, b)| a * b.conj()).sum::<Complex64>() / n as f64;
        prop_assert!(close(f.inner(&g), quad, 1e-12));
    }

    #[test]
    fn collocation_round_trip(f in series(10)) {
        let m = f.truncation();
        let (back, tail) = FourierSeries::from_samples(&f.samples(2 * m + 1), m);
        prop_assert!(tail < 1e-12);
        prop_assert!(back.checked_sub(&f).unwrap().norm() < 1e-12);
    }

    #[test]
    fn conj_is_an_involution_and_pointwise(f in series(6), x in 0.0f64..1.0) {
        prop_assert_eq!(f.conj().conj(), f.clone());
        prop_assert!(close(f.conj().eval(x), f.eval(x).conj(), 1e-13));
        prop_assert!(f.widening_add(&f.conj()).is_real(1e-14));
    }

    #[test]
    fn derivative_symbol(n in -20i64..=20, x in 0.0f64..1.0) {
        let e = FourierSeries::exp_mode(n);
        let d = e.derivative();
        prop_assert!(close(d.eval(x), Complex64::new(0.0, TWO_PI * n as f64) * e.eval(x), 1e-12));
    }

    #[test]
    fn json_round_trip(f in series(5)) {
        prop_assert_eq!(FourierSeries::from_json(&f.to_json()).unwrap(), f);
    }
}

#[test]
fn mismatched_truncations_are_rejected() {
    let a = FourierSeries::zeros(2);
    let b = FourierSeries::zeros(3);
    assert!(matches!(
        a.checked_add(&b),
        Err(Error::TruncationMismatch { left: 2, right: 3 })
    ));
    assert_eq!(a.widening_add(&b).truncation(), 3);
}
