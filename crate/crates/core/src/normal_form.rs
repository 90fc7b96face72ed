//! First-order normal form on the low-mode band.
//!
//! On `span{Φ⁺_j : −2N ≤ j ≤ 2N+1}` the homological equation
//! `[Q_N, A] + Π_N^♭ C Π_N^♭ = S` is solved entrywise:
//! `Q_{ji} = rhs(i, j) / (λ_i − λ_j)` with
//! `rhs(i, j) = −⟨CΦ_i, Φ_j⟩ + ⟨C_m Π_{e0}Φ_i, Π_{e0}Φ_j⟩`.
//! Resonant entries (`λ_i = λ_j`) are set to zero; there the right-hand side
//! must vanish.

use crate::background::ModeContext;
use crate::error::{Error, Result};
use crate::field::{ModeField, OperatorMatrix};
use crate::fourier::TWO_PI;
use crate::linalg::{op_norm, CMatrix, CVector};
use crate::operators::{op_a, op_c, op_cm, proj_e0};
use crate::spectral::{band_indices, SpectralBasis};
use num_complex::Complex64;
use rayon::prelude::*;
use serde_json::{json, Value};
use std::fmt::Write as _;

pub const DEFAULT_RESONANCE_TOL: f64 = 1e-8;

#[derive(Clone, Debug)]
pub struct Resonance {
    pub i: i64,
    pub j: i64,
    pub lambda_i: Complex64,
    pub lambda_j: Complex64,
    pub residual: f64,
}

#[derive(Clone, Debug)]
pub struct NormalFormData {
    pub band: usize,
    pub truncation: usize,
    pub indices: Vec<i64>,
    pub lambdas: Vec<Complex64>,
    /// Band columns `Φ⁺_j` as stacked coefficient vectors.
    pub phi: CMatrix,
    /// `Q_{ji}`, row `j`, column `i`.
    pub q: CMatrix,
    /// `S_{ji} = ⟨C_mΠ_{e0}Φ_i, Π_{e0}Φ_j⟩`.
    pub s: CMatrix,
    /// `⟨CΦ_i, Φ_j⟩`.
    pub c_band: CMatrix,
    pub resonances: Vec<Resonance>,
    pub commutator_residual: f64,
    pub q_norm: f64,
}

struct BandImages {
    phi: Vec<ModeField>,
    c_phi: Vec<ModeField>,
    pe_phi: Vec<ModeField>,
    cm_pe_phi: Vec<ModeField>,
}

fn band_images(ctx: &ModeContext, basis: &SpectralBasis, idx: &[i64]) -> BandImages {
    let rows: Vec<_> = idx
        .par_iter()
        .map(|&j| {
            let phi = basis.phi_plus(j);
            let c_phi = op_c(ctx, &phi);
            let pe = proj_e0(ctx, &phi);
            let cm_pe = op_cm(ctx, &pe);
            (phi, c_phi, pe, cm_pe)
        })
        .collect();
    let mut out = BandImages {
        phi: vec![],
        c_phi: vec![],
        pe_phi: vec![],
        cm_pe_phi: vec![],
    };
    for (a, b, c, d) in rows {
        out.phi.push(a);
        out.c_phi.push(b);
        out.pe_phi.push(c);
        out.cm_pe_phi.push(d);
    }
    out
}

/// Right-hand side of the homological equation for the pair `(i, j)`.
pub fn homological_rhs(ctx: &ModeContext, basis: &SpectralBasis, i: i64, j: i64) -> Complex64 {
    let phi_i = basis.phi_plus(i);
    let phi_j = basis.phi_plus(j);
    let s = op_cm(ctx, &proj_e0(ctx, &phi_i)).inner(&proj_e0(ctx, &phi_j));
    s - op_c(ctx, &phi_i).inner(&phi_j)
}

fn is_resonant(a: Complex64, b: Complex64) -> bool {
    (a - b).norm() <= 1e-12 * (1.0 + a.norm() + b.norm())
}

/// Solves the homological equation on the band of size `N`.
pub fn build_q(
    ctx: &ModeContext,
    basis: &SpectralBasis,
    n: usize,
    tol: f64,
) -> Result<NormalFormData> {
    let phi = basis.band_matrix(n)?;
    let idx = band_indices(n);
    let lambdas: Vec<Complex64> = idx.iter().map(|&j| basis.lambda(j)).collect();
    let img = band_images(ctx, basis, &idx);
    let b = idx.len();
    let c_band = CMatrix::from_fn(b, b, |r, c| img.c_phi[c].inner(&img.phi[r]));
    let s = CMatrix::from_fn(b, b, |r, c| img.cm_pe_phi[c].inner(&img.pe_phi[r]));
    let mut q = CMatrix::zeros(b, b);
    let mut resonances = Vec::new();
    for r in 0..b {
        for c in 0..b {
            let rhs = s[(r, c)] - c_band[(r, c)];
            if is_resonant(lambdas[c], lambdas[r]) {
                resonances.push(Resonance {
                    i: idx[c],
                    j: idx[r],
                    lambda_i: lambdas[c],
                    lambda_j: lambdas[r],
                    residual: rhs.norm(),
                });
            } else {
                q[(r, c)] = rhs / (lambdas[c] - lambdas[r]);
            }
        }
    }
    if let Some(bad) = resonances.iter().find(|r| r.residual >= tol) {
        return Err(Error::ResonanceViolation {
            i: bad.i,
            j: bad.j,
            residual: bad.residual,
        });
    }
    let m = basis.truncation;
    let a = OperatorMatrix::assemble("A", m, |f| op_a(ctx, f)).entries;
    let qn = &phi * &q * phi.adjoint();
    let comm = &qn * &a - &a * &qn + &phi * (&c_band - &s) * phi.adjoint();
    Ok(NormalFormData {
        band: n,
        truncation: m,
        indices: idx,
        lambdas,
        q_norm: op_norm(&q),
        commutator_residual: op_norm(&comm),
        phi,
        q,
        s,
        c_band,
        resonances,
    })
}

impl NormalFormData {
    pub fn max_resonance_residual(&self) -> f64 {
        self.resonances
            .iter()
            .map(|r| r.residual)
            .fold(0.0, f64::max)
    }

    /// `Q_N = Φ Q Φᴴ` on the full coefficient space.
    pub fn q_full(&self) -> CMatrix {
        &self.phi * &self.q * self.phi.adjoint()
    }

    /// `‖[Q_N, ∂₃²]‖_op`.
    pub fn d3_squared_commutator_norm(&self) -> f64 {
        let m = self.truncation as i64;
        let w = 2 * m + 1;
        let symbol: Vec<f64> = (0..3 * w)
            .map(|i| -(TWO_PI * (i % w - m) as f64).powi(2))
            .collect();
        let qn = self.q_full();
        let comm = CMatrix::from_fn(qn.nrows(), qn.ncols(), |r, c| {
            qn[(r, c)] * (symbol[c] - symbol[r])
        });
        op_norm(&comm)
    }

    fn band_coeffs(&self, b: &ModeField) -> CVector {
        self.phi.adjoint() * b.resized(self.truncation).to_vector()
    }

    fn check_regime(&self, eps: f64) -> Result<()> {
        let value = eps * self.q_norm;
        if value >= 0.5 {
            return Err(Error::RegimeViolation { value });
        }
        Ok(())
    }

    /// `d = (Id + εQ_N) b`.
    pub fn conjugate(&self, ctx: &ModeContext, b: &ModeField) -> Result<ModeField> {
        self.check_regime(ctx.eps)?;
        let v = b.resized(self.truncation).to_vector();
        let d = &v + (&self.phi * (&self.q * self.band_coeffs(b))).scale(ctx.eps);
        Ok(ModeField::from_vector(self.truncation, &d))
    }

    /// Inverse of [`Self::conjugate`] by a direct solve on the band.
    pub fn unconjugate(&self, ctx: &ModeContext, d: &ModeField) -> Result<ModeField> {
        self.check_regime(ctx.eps)?;
        let v = d.resized(self.truncation).to_vector();
        let c = self.band_coeffs(d);
        let n = self.q.nrows();
        let system = CMatrix::identity(n, n) + self.q.scale(ctx.eps);
        let y = system
            .lu()
            .solve(&c)
            .ok_or_else(|| Error::IllConditioned("singular conjugation".into()))?;
        let b = &v - &self.phi * c + &self.phi * y;
        Ok(ModeField::from_vector(self.truncation, &b))
    }

    pub fn to_json(&self) -> Value {
        let mat = |m: &CMatrix| -> Value {
            (0..m.nrows())
                .map(|r| {
                    (0..m.ncols())
                        .map(|c| json!([m[(r, c)].re, m[(r, c)].im]))
                        .collect::<Vec<_>>()
                })
                .collect::<Vec<_>>()
                .into()
        };
        json!({
            "band": self.band,
            "truncation": self.truncation,
            "indices": self.indices,
            "lambda": self.lambdas.iter().map(|l| json!([l.re, l.im])).collect::<Vec<_>>(),
            "q": mat(&self.q),
            "s": mat(&self.s),
            "q_norm": self.q_norm,
            "commutator_residual": self.commutator_residual,
            "max_resonance_residual": self.max_resonance_residual(),
        })
    }

    /// `i,j,lambda_i_im,lambda_j_im,abs_rhs` rows.
    pub fn resonance_csv(&self) -> String {
        let mut out = String::from("i,j,lambda_i_re,lambda_i_im,lambda_j_re,lambda_j_im,abs_rhs\n");
        for r in &self.resonances {
            let _ = writeln!(
                out,
                "{},{},{:.12e},{:.12e},{:.12e},{:.12e},{:.6e}",
                r.i, r.j, r.lambda_i.re, r.lambda_i.im, r.lambda_j.re, r.lambda_j.im, r.residual
            );
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::background::{BackgroundField, WaveVector};
    use crate::spectral::build_basis;

    #[test]
    fn small_band_on_canonical_background() {
        let ctx = ModeContext::new(&BackgroundField::canonical(), WaveVector(1, 0)).unwrap();
        let basis = build_basis(&ctx, 3, 24).unwrap();
        let nf = build_q(&ctx, &basis, 3, DEFAULT_RESONANCE_TOL).unwrap();
        assert!(nf.commutator_residual < 1e-8, "{}", nf.commutator_residual);
        assert!(nf.max_resonance_residual() < 1e-8);
        let rhs = homological_rhs(&ctx, &basis, 0, 1);
        assert!(rhs.norm() < 1e-8);
        let pairs: Vec<(i64, i64)> = nf.resonances.iter().map(|r| (r.i, r.j)).collect();
        assert!(pairs.contains(&(0, 1)) && pairs.contains(&(1, 0)));
        assert!(pairs.contains(&(4, -3)) && pairs.contains(&(-3, 4)));
    }
}
