//! Period-one Fourier series: products, derivatives, antiderivatives and
//! collocation.

use num_complex::Complex64;
use taylor_lab::FourierSeries;

fn main() -> taylor_lab::Result<()> {
    let f = FourierSeries::cos(1, 1.0).widening_add(&FourierSeries::sin(3, 0.25));
    let g = FourierSeries::sin(2, 2.0);

    let fg = f.product(&g);
    let x = 0.3;
    println!("(fg)(x) = {:.12}", fg.eval(x).re);
    println!("f(x)g(x) = {:.12}", (f.eval(x) * g.eval(x)).re);

    let (short, tail) = f.multiply(&g, 2);
    println!(
        "truncated product keeps {} modes, discarded tail norm {tail:.3e}",
        2 * short.truncation() + 1
    );

    let back = f.derivative().antiderivative_zero_mean();
    println!("‖∂⁻¹∂f − f‖ = {:.2e}", back.checked_sub(&f)?.norm());

    let samples = fg.samples(2 * fg.truncation() + 1);
    let (recovered, aliasing) = FourierSeries::from_samples(&samples, fg.truncation());
    println!(
        "collocation round trip error {:.2e}, aliasing {aliasing:.2e}",
        recovered.checked_sub(&fg)?.norm()
    );

    let shifted = FourierSeries::from_modes(
        2,
        &[
            (-1, Complex64::new(0.0, 1.0)),
            (2, Complex64::new(0.5, 0.0)),
        ],
    )?;
    println!(
        "⟨f, h⟩ = {:.6}, real: {}",
        f.inner(&shifted.resized(3)),
        shifted.is_real(1e-14)
    );
    Ok(())
}
