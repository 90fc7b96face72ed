//! Explicit eigenbasis of the leading skew-adjoint operator `A`.
//!
//! With `Ψ(x₃) = ∫₀^{x₃} β_η²`, the scalar functions
//! `e_k = β_η exp(2πik Ψ/Ψ(1)) / ‖β_η‖` diagonalize
//! `D = Π⊥_{e0} β_η ∂₃⁻¹ β_η Π⊥_{e0}` with eigenvalues
//! `μ_k = ‖β_η‖²/(2ikπ)`. Vector eigenfunctions of `A` are
//!
//! * `Φ⁻_k = (η, 0) e_k` in the kernel,
//! * `Φ⁺_{2k} = (η⊥, −i) e_k/√2` with eigenvalue `μ_k`,
//! * `Φ⁺_{2k+1} = (η⊥, +i) e_k/√2` with eigenvalue `−μ_k`.

use crate::background::ModeContext;
use crate::constraints::{ConstraintKind, ConstraintSpace};
use crate::error::{Error, Result};
use crate::field::{ModeField, OperatorMatrix};
use crate::fourier::{FourierSeries, TWO_PI};
use crate::linalg::{hermitian_eigenvalues, hermitian_radius, CMatrix};
use crate::operators::{op_a, op_c, proj_eta_perp};
use num_complex::Complex64;
use rayon::prelude::*;
use serde_json::{json, Value};
use std::f64::consts::FRAC_1_SQRT_2;

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

#[derive(Clone, Debug)]
pub struct SpectralBasis {
    pub eta: [f64; 2],
    pub beta_norm_sq: f64,
    pub k_max: usize,
    pub truncation: usize,
    e: Vec<FourierSeries>,
    tails: Vec<f64>,
}

/// `k` such that a `Φ⁺` index is `2k` or `2k+1`.
pub fn plus_index_k(j: i64) -> i64 {
    j.div_euclid(2)
}

/// `Φ⁺` indices `−2N..=2N+1` of the band `Π_N^♭`.
pub fn band_indices(n: usize) -> Vec<i64> {
    (-2 * n as i64..=2 * n as i64 + 1).collect()
}

pub fn build_basis(ctx: &ModeContext, k_max: usize, trunc: usize) -> Result<SpectralBasis> {
    if 4 * k_max > trunc {
        return Err(Error::InvalidInput(format!(
            "basis size K = {k_max} exceeds truncation/4 = {}",
            trunc / 4
        )));
    }
    let n_points = (8 * trunc).max(64);
    let beta = ctx.beta.samples(n_points);
    let periodic = ctx.psi.periodic.samples(n_points);
    let slope = ctx.psi.slope;
    let norm = ctx.beta_norm_sq.sqrt();
    let built: Vec<(FourierSeries, f64)> = (-(k_max as i64)..=k_max as i64)
        .into_par_iter()
        .map(|k| {
            let samples: Vec<Complex64> = (0..n_points)
                .map(|j| {
                    let x = j as f64 / n_points as f64;
                    let psi = slope * x + periodic[j].re;
                    beta[j] * Complex64::from_polar(1.0 / norm, TWO_PI * k as f64 * psi / slope)
                })
                .collect();
            FourierSeries::from_samples(&samples, trunc)
        })
        .collect();
    for (i, (_, tail)) in built.iter().enumerate() {
        if *tail > 1e-8 {
            return Err(Error::ResolutionExceeded {
                k: i as i64 - k_max as i64,
                tail: *tail,
            });
        }
    }
    let (e, tails) = built.into_iter().unzip();
    Ok(SpectralBasis {
        eta: ctx.eta,
        beta_norm_sq: ctx.beta_norm_sq,
        k_max,
        truncation: trunc,
        e,
        tails,
    })
}

impl SpectralBasis {
    pub fn e(&self, k: i64) -> &FourierSeries {
        assert!(k.unsigned_abs() as usize <= self.k_max, "e_{k} not stored");
        &self.e[(k + self.k_max as i64) as usize]
    }

    pub fn tail(&self, k: i64) -> f64 {
        self.tails[(k + self.k_max as i64) as usize]
    }

    pub fn max_tail(&self) -> f64 {
        self.tails.iter().copied().fold(0.0, f64::max)
    }

    /// `μ_k`; `None` for `k = 0` where `1/μ₀ = 0`.
    pub fn mu(&self, k: i64) -> Option<Complex64> {
        (k != 0).then(|| Complex64::new(0.0, -self.beta_norm_sq / (TWO_PI * k as f64)))
    }

    pub fn inv_mu(&self, k: i64) -> Complex64 {
        self.mu(k).map_or(ZERO, |m| 1.0 / m)
    }

    /// Eigenvalue of `A` on `Φ⁺_j`.
    pub fn lambda(&self, j: i64) -> Complex64 {
        let k = plus_index_k(j);
        match (self.mu(k), j.rem_euclid(2)) {
            (None, _) => ZERO,
            (Some(m), 0) => m,
            (Some(m), _) => -m,
        }
    }

    pub fn phi_minus(&self, k: i64) -> ModeField {
        let v = [
            Complex64::new(self.eta[0], 0.0),
            Complex64::new(self.eta[1], 0.0),
            ZERO,
        ];
        ModeField::profile_times(self.e(k), v, self.truncation)
    }

    pub fn phi_plus(&self, j: i64) -> ModeField {
        let k = plus_index_k(j);
        let third = if j.rem_euclid(2) == 0 { -1.0 } else { 1.0 };
        let v = [
            Complex64::new(-self.eta[1] * FRAC_1_SQRT_2, 0.0),
            Complex64::new(self.eta[0] * FRAC_1_SQRT_2, 0.0),
            Complex64::new(0.0, third * FRAC_1_SQRT_2),
        ];
        ModeField::profile_times(self.e(k), v, self.truncation)
    }

    fn check_band(&self, n: usize) -> Result<()> {
        if n > self.k_max {
            return Err(Error::BandExceedsBasis {
                band: n,
                available: self.k_max,
            });
        }
        Ok(())
    }

    /// Columns `Φ⁺_j`, `j = −2N..=2N+1`, as stacked coefficient vectors.
    pub fn band_matrix(&self, n: usize) -> Result<CMatrix> {
        self.check_band(n)?;
        let cols: Vec<_> = band_indices(n)
            .into_iter()
            .map(|j| self.phi_plus(j).to_vector())
            .collect();
        Ok(CMatrix::from_columns(&cols))
    }

    /// Largest entry of `ΦᴴΦ − I` over all stored `Φ⁻` and `Φ⁺`.
    pub fn gram_defect(&self) -> f64 {
        let k = self.k_max as i64;
        let mut cols: Vec<_> = (-k..=k).map(|i| self.phi_minus(i).to_vector()).collect();
        cols.extend(
            band_indices(self.k_max)
                .into_iter()
                .map(|j| self.phi_plus(j).to_vector()),
        );
        let phi = CMatrix::from_columns(&cols);
        let g = phi.adjoint() * &phi - CMatrix::identity(cols.len(), cols.len());
        g.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn to_json(&self) -> Value {
        let k = self.k_max as i64;
        let entries: Vec<Value> = (-k..=k)
            .map(|i| {
                let mu = self.mu(i).map(|m| json!([m.re, m.im]));
                json!({ "k": i, "mu": mu, "tail": self.tail(i), "coeffs": self.e(i).to_json() })
            })
            .collect();
        json!({
            "eta": self.eta,
            "beta_norm_sq": self.beta_norm_sq,
            "k_max": self.k_max,
            "truncation": self.truncation,
            "e": entries,
        })
    }
}

/// `D = Π⊥_{e0} β_η ∂₃⁻¹ β_η Π⊥_{e0}` on scalar series.
pub fn apply_d(ctx: &ModeContext, f: &FourierSeries) -> FourierSeries {
    let perp = |g: &FourierSeries| g.widening_sub(&ctx.e0.scale(g.inner(&ctx.e0)));
    let g = perp(f);
    let h = ctx
        .beta
        .product(&ctx.beta.product(&g).antiderivative_zero_mean());
    perp(&h).resized(f.truncation())
}

pub fn assemble_d(ctx: &ModeContext, trunc: usize) -> OperatorMatrix {
    OperatorMatrix::assemble_scalar("D", trunc, |f| apply_d(ctx, f))
}

/// Residual of every eigen-relation of `A` on the stored basis.
#[derive(Clone, Debug)]
pub struct BasisReport {
    pub max_residual: f64,
    /// `(family, index, ‖AΦ − λΦ‖)` with family `"minus"` or `"plus"`.
    pub residuals: Vec<(&'static str, i64, f64)>,
}

pub fn verify_a_on_basis(ctx: &ModeContext, basis: &SpectralBasis) -> BasisReport {
    let k = basis.k_max as i64;
    let mut residuals: Vec<(&'static str, i64, f64)> = (-k..=k)
        .into_par_iter()
        .map(|i| ("minus", i, op_a(ctx, &basis.phi_minus(i)).norm()))
        .collect();
    residuals.extend(
        band_indices(basis.k_max)
            .into_par_iter()
            .map(|j| {
                let phi = basis.phi_plus(j);
                let r = op_a(ctx, &phi).axpy(-basis.lambda(j), &phi).norm();
                ("plus", j, r)
            })
            .collect::<Vec<_>>(),
    );
    let max_residual = residuals.iter().map(|r| r.2).fold(0.0, f64::max);
    BasisReport {
        max_residual,
        residuals,
    }
}

/// `Π_N^♭ b = Σ_{j=−2N}^{2N+1} (b|Φ⁺_j) Φ⁺_j`.
pub fn proj_band(basis: &SpectralBasis, n: usize, b: &ModeField) -> Result<ModeField> {
    basis.check_band(n)?;
    let b = b.resized(basis.truncation);
    Ok(band_indices(n)
        .into_iter()
        .fold(ModeField::zeros(basis.truncation), |acc, j| {
            let phi = basis.phi_plus(j);
            acc.axpy(b.inner(&phi), &phi)
        }))
}

/// `Π_N^♯ = Π_η⊥ − Π_N^♭`.
pub fn proj_band_complement(
    ctx: &ModeContext,
    basis: &SpectralBasis,
    n: usize,
    b: &ModeField,
) -> Result<ModeField> {
    let low = proj_band(basis, n, b)?;
    Ok(proj_eta_perp(ctx, &b.resized(basis.truncation)).sub(&low))
}

/// `‖∂₃ Π_N^♭‖_op`.
pub fn d3_band_norm(basis: &SpectralBasis, n: usize) -> Result<f64> {
    basis.check_band(n)?;
    let cols: Vec<_> = band_indices(n)
        .into_iter()
        .map(|j| basis.phi_plus(j).d3().to_vector())
        .collect();
    let d = CMatrix::from_columns(&cols);
    let top = hermitian_eigenvalues(&(d.adjoint() * &d))
        .last()
        .copied()
        .unwrap_or(0.0);
    Ok(top.max(0.0).sqrt())
}

/// Precomputed pieces for sweeping the high-mode gap over `N`.
pub struct GapStudy<'a> {
    basis: &'a SpectralBasis,
    c: CMatrix,
    constraints: ConstraintSpace,
    reduced_full: CMatrix,
}

impl<'a> GapStudy<'a> {
    pub fn new(ctx: &ModeContext, basis: &'a SpectralBasis) -> Result<Self> {
        let m = basis.truncation;
        let c = OperatorMatrix::assemble("C", m, |b| op_c(ctx, b)).entries;
        let perp = OperatorMatrix::assemble("Pi_eta_perp", m, |b| proj_eta_perp(ctx, b)).entries;
        let constraints = ConstraintSpace::new(ctx, m, ConstraintKind::DivergenceAndTaylor)?;
        let reduced_full = constraints.compress(&(&perp * &c * &perp));
        Ok(Self {
            basis,
            c,
            constraints,
            reduced_full,
        })
    }

    /// `sup |⟨CΠ_η⊥b, Π_η⊥b⟩ − ⟨CΠ_N^♭b, Π_N^♭b⟩|` over unit constrained `b`.
    pub fn gap(&self, n: usize) -> Result<f64> {
        let phi = self.basis.band_matrix(n)?;
        let w = self.constraints.basis.adjoint() * &phi;
        let c_band = phi.adjoint() * &self.c * &phi;
        let diff = &self.reduced_full - &w * c_band * w.adjoint();
        Ok(hermitian_radius(&diff))
    }
}

pub fn high_mode_gap(ctx: &ModeContext, basis: &SpectralBasis, n: usize) -> Result<f64> {
    GapStudy::new(ctx, basis)?.gap(n)
}
