//! Spectral abscissa of the restricted generator across horizontal scales,
//! with and without the geostrophic correction.

use taylor_lab::evolution::abscissa_sweep;
use taylor_lab::operators::Geostrophic;
use taylor_lab::{BackgroundField, WaveVector};

fn main() -> taylor_lab::Result<()> {
    let waves: Vec<_> = [1, 2, 4, 8].into_iter().map(|n| WaveVector(n, 0)).collect();
    let bg = BackgroundField::canonical();
    for (label, geo) in [
        ("with geostrophic", Geostrophic::Included),
        ("without", Geostrophic::Disabled),
    ] {
        println!("{label}");
        for row in abscissa_sweep(&bg, &waves, 24, geo)? {
            println!(
                "  |ξ| = {:>8.3}  restricted {:>12.4}  full {:>12.4}",
                row.xi_norm, row.restricted, row.full
            );
        }
    }
    Ok(())
}
