//! The explicit eigenbasis of the leading operator, checked against a Schur
//! decomposition of its assembled matrix.

use taylor_lab::linalg::eigenvalues;
use taylor_lab::spectral::*;
use taylor_lab::{BackgroundField, ModeContext, WaveVector};

fn main() -> taylor_lab::Result<()> {
    let ctx = ModeContext::new(&BackgroundField::canonical(), WaveVector(1, 0))?;
    let basis = build_basis(&ctx, 4, 32)?;
    println!(
        "gram defect {:.2e}, worst tail {:.2e}",
        basis.gram_defect(),
        basis.max_tail()
    );

    let mut numeric = eigenvalues(&assemble_d(&ctx, 32).entries)?;
    numeric.sort_by(|a, b| a.im.total_cmp(&b.im));
    for k in [1, 2, 3, 4] {
        let mu = basis.mu(k).unwrap();
        let nearest = numeric
            .iter()
            .min_by(|a, b| (*a - mu).norm().total_cmp(&(*b - mu).norm()))
            .unwrap();
        println!(
            "k = {k}: μ = {:+.10}i, nearest numeric {:+.10}i",
            mu.im, nearest.im
        );
    }

    let report = verify_a_on_basis(&ctx, &basis);
    println!("‖AΦ − λΦ‖ max {:.2e}", report.max_residual);
    for n in [1, 2, 4] {
        println!("band {n}: ‖∂₃ P_N‖ = {:.4}", d3_band_norm(&basis, n)?);
    }
    Ok(())
}
