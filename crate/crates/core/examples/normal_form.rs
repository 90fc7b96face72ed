//! First-order normal form on a band: the homological solution, resonances
//! and the conjugation it induces.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use taylor_lab::evolution::random_constrained;
use taylor_lab::normal_form::{build_q, DEFAULT_RESONANCE_TOL};
use taylor_lab::spectral::build_basis;
use taylor_lab::{BackgroundField, BackgroundTerm, ModeContext, WaveVector};

fn main() -> taylor_lab::Result<()> {
    let bg = BackgroundField::new(&[
        BackgroundTerm::cos(1, 1, 1.0),
        BackgroundTerm::sin(2, 1, 1.0),
        BackgroundTerm::cos(2, 2, 0.5),
    ])?;
    let ctx = ModeContext::new(&bg, WaveVector(8, 0))?;
    let basis = build_basis(&ctx, 4, 32)?;
    let nf = build_q(&ctx, &basis, 3, DEFAULT_RESONANCE_TOL)?;

    println!("band indices {:?}", nf.indices);
    println!("‖Q‖ = {:.4}, ε‖Q‖ = {:.4}", nf.q_norm, ctx.eps * nf.q_norm);
    println!("commutator residual {:.2e}", nf.commutator_residual);
    println!(
        "{} resonant pairs, worst residual {:.2e}",
        nf.resonances.len(),
        nf.max_resonance_residual()
    );

    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let b = random_constrained(&ctx, 32, &mut rng);
    let d = nf.conjugate(&ctx, &b)?;
    let back = nf.unconjugate(&ctx, &d)?;
    println!(
        "conjugation round trip {:.2e}",
        back.sub(&b).norm() / b.norm()
    );
    Ok(())
}
