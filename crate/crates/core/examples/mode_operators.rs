//! Assemble the per-mode operators as matrices and check their symmetries.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use taylor_lab::evolution::random_constrained;
use taylor_lab::linalg::op_norm;
use taylor_lab::operators::*;
use taylor_lab::{BackgroundField, ModeContext, OperatorMatrix, WaveVector};

fn main() -> taylor_lab::Result<()> {
    let m = 16;
    let ctx = ModeContext::new(&BackgroundField::canonical(), WaveVector(1, 1))?;

    let a = OperatorMatrix::assemble("A", m, |b| op_a(&ctx, b));
    let cm = OperatorMatrix::assemble("C_m", m, |b| op_cm(&ctx, b));
    let am = OperatorMatrix::assemble("A_m", m, |b| op_am(&ctx, b));
    let pe = OperatorMatrix::assemble("Pi_e0", m, |b| proj_e0(&ctx, b));
    println!("A skew defect      {:.2e}", a.anti_hermitian_defect());
    println!("C_m Hermitian defect {:.2e}", cm.hermitian_defect());
    println!(
        "‖Π A_m Π‖          {:.2e}",
        op_norm(&(&pe.entries * &am.entries * &pe.entries))
    );

    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let b = random_constrained(&ctx, m, &mut rng);
    println!(
        "constrained sample: taylor {:.2e}, divergence {:.2e}",
        taylor_residual(&ctx, &b).norm(),
        divergence_residual(&ctx, &b)
    );

    let via_formula = proj_e0_via_taylor(&ctx, &b)?;
    println!(
        "Π_e0 b vs Taylor formula: {:.2e}",
        proj_e0(&ctx, &b).sub(&via_formula).norm()
    );

    let lb = full_induction(&ctx, &b);
    println!(
        "L b stays constrained: taylor {:.2e}",
        taylor_residual(&ctx, &lb).norm()
    );
    Ok(())
}
