//! Horizontal background fields and the per-mode quantities derived from them.

use taylor_lab::{BackgroundField, BackgroundTerm, ModeContext, WaveVector};

fn main() -> taylor_lab::Result<()> {
    let canonical = BackgroundField::canonical();
    let tilted = BackgroundField::new(&[
        BackgroundTerm::cos(1, 1, 1.0),
        BackgroundTerm::sin(2, 1, 1.0),
        BackgroundTerm::cos(2, 2, 0.5),
    ])?;

    for (name, bg) in [("canonical", &canonical), ("tilted", &tilted)] {
        println!(
            "{name}: degree {}, gram min eigenvalue {:.4}, delta {:.4}",
            bg.degree(),
            bg.gram_min_eigenvalue(),
            bg.delta()
        );
        for w in [WaveVector(1, 0), WaveVector(0, 1), WaveVector(3, 4)] {
            let ctx = ModeContext::new(bg, w)?;
            println!(
                "  ξ/2π = ({:>2},{:>2})  ε = {:.4}  ‖β‖² = {:.4}  ψ(0.25) = {:+.4}",
                w.0,
                w.1,
                ctx.eps,
                ctx.beta_norm_sq,
                ctx.psi_phase().eval(0.25)
            );
        }
    }

    match ModeContext::new(&canonical, WaveVector(0, 0)) {
        Err(e) => println!("zero mode rejected: {e}"),
        Ok(_) => unreachable!(),
    }
    Ok(())
}
