//! Per-mode vector fields and dense operator matrices.

use crate::fourier::FourierSeries;
use crate::linalg::{op_norm, CMatrix, CVector};
use num_complex::Complex64;
use rand::Rng;
use rayon::prelude::*;
use serde_json::{json, Value};

/// Fourier coefficient `b̂(ξ, x₃)` of one horizontal mode: three series of a
/// common truncation.
#[derive(Clone, Debug, PartialEq)]
pub struct ModeField {
    comps: [FourierSeries; 3],
}

impl ModeField {
    pub fn zeros(trunc: usize) -> Self {
        Self {
            comps: std::array::from_fn(|_| FourierSeries::zeros(trunc)),
        }
    }

    /// Brings all three components to truncation `trunc`.
    pub fn new(comps: [FourierSeries; 3], trunc: usize) -> Self {
        Self {
            comps: comps.map(|c| c.resized(trunc)),
        }
    }

    /// Widens to the largest truncation among the components.
    pub fn from_components(comps: [FourierSeries; 3]) -> Self {
        let m = comps
            .iter()
            .map(FourierSeries::truncation)
            .max()
            .unwrap_or(0);
        Self::new(comps, m)
    }

    /// `f · v` for a scalar profile `f` and a constant vector `v`.
    pub fn profile_times(f: &FourierSeries, v: [Complex64; 3], trunc: usize) -> Self {
        Self::new(v.map(|vj| f.scale(vj)), trunc)
    }

    pub fn constant(v: [Complex64; 3], trunc: usize) -> Self {
        Self::new(v.map(FourierSeries::constant), trunc)
    }

    pub fn truncation(&self) -> usize {
        self.comps[0].truncation()
    }

    pub fn dim(&self) -> usize {
        3 * (2 * self.truncation() + 1)
    }

    pub fn comp(&self, i: usize) -> &FourierSeries {
        &self.comps[i]
    }

    pub fn components(&self) -> &[FourierSeries; 3] {
        &self.comps
    }

    pub fn into_components(self) -> [FourierSeries; 3] {
        self.comps
    }

    /// Stacked coefficients, index `c·(2M+1) + (n+M)`.
    pub fn to_vector(&self) -> CVector {
        CVector::from_iterator(
            self.dim(),
            self.comps.iter().flat_map(|c| c.coeffs().iter().copied()),
        )
    }

    pub fn from_vector(trunc: usize, v: &CVector) -> Self {
        let w = 2 * trunc + 1;
        assert_eq!(
            v.len(),
            3 * w,
            "vector length does not match truncation {trunc}"
        );
        Self {
            comps: std::array::from_fn(|c| {
                FourierSeries::from_coeffs(trunc, v.rows(c * w, w).iter().copied().collect())
                    .expect("slice length matches")
            }),
        }
    }

    pub fn resized(&self, trunc: usize) -> Self {
        Self {
            comps: std::array::from_fn(|i| self.comps[i].resized(trunc)),
        }
    }

    pub fn map(&self, f: impl Fn(&FourierSeries) -> FourierSeries) -> Self {
        Self::from_components(std::array::from_fn(|i| f(&self.comps[i])))
    }

    pub fn add(&self, other: &Self) -> Self {
        self.axpy(Complex64::new(1.0, 0.0), other)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.axpy(Complex64::new(-1.0, 0.0), other)
    }

    /// `self + a·other`, widened to the larger truncation.
    pub fn axpy(&self, a: Complex64, other: &Self) -> Self {
        Self::from_components(std::array::from_fn(|i| {
            self.comps[i].widening_axpy(a, &other.comps[i])
        }))
    }

    pub fn scale(&self, a: Complex64) -> Self {
        Self {
            comps: std::array::from_fn(|i| self.comps[i].scale(a)),
        }
    }

    pub fn scale_re(&self, a: f64) -> Self {
        self.scale(Complex64::new(a, 0.0))
    }

    pub fn inner(&self, other: &Self) -> Complex64 {
        (0..3).map(|i| self.comps[i].inner(&other.comps[i])).sum()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.comps.iter().map(FourierSeries::norm_sqr).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn d3(&self) -> Self {
        self.map(FourierSeries::derivative)
    }

    pub fn mean(&self) -> [Complex64; 3] {
        std::array::from_fn(|i| self.comps[i].mean())
    }

    /// Random coefficients with `|b̂_n| ∝ (1+|n|)⁻²`, uniform phase.
    pub fn random_decaying<R: Rng + ?Sized>(trunc: usize, rng: &mut R) -> Self {
        Self {
            comps: std::array::from_fn(|_| {
                let coeffs = (-(trunc as i64)..=trunc as i64)
                    .map(|n| {
                        let amp = rng.random_range(0.0..1.0) / (1.0 + n.abs() as f64).powi(2);
                        Complex64::from_polar(amp, rng.random_range(0.0..std::f64::consts::TAU))
                    })
                    .collect();
                FourierSeries::from_coeffs(trunc, coeffs).expect("dense length")
            }),
        }
    }

    pub fn to_json(&self) -> Value {
        json!(self
            .comps
            .iter()
            .map(FourierSeries::to_json)
            .collect::<Vec<_>>())
    }
}

/// Dense matrix of a linear per-mode operator acting on stacked coefficients.
#[derive(Clone, Debug)]
pub struct OperatorMatrix {
    pub label: String,
    pub truncation: usize,
    /// 3 for vector operators, 1 for scalar ones.
    pub components: usize,
    pub entries: CMatrix,
}

impl OperatorMatrix {
    /// Applies `op` to every basis coefficient vector.
    pub fn assemble<F>(label: &str, trunc: usize, op: F) -> Self
    where
        F: Fn(&ModeField) -> ModeField + Sync,
    {
        let n = 3 * (2 * trunc + 1);
        let cols: Vec<CVector> = (0..n)
            .into_par_iter()
            .map(|j| {
                let mut e = CVector::zeros(n);
                e[j] = Complex64::new(1.0, 0.0);
                op(&ModeField::from_vector(trunc, &e))
                    .resized(trunc)
                    .to_vector()
            })
            .collect();
        Self {
            label: label.to_string(),
            truncation: trunc,
            components: 3,
            entries: CMatrix::from_columns(&cols),
        }
    }

    pub fn assemble_scalar<F>(label: &str, trunc: usize, op: F) -> Self
    where
        F: Fn(&FourierSeries) -> FourierSeries + Sync,
    {
        let n = 2 * trunc + 1;
        let cols: Vec<CVector> = (0..n)
            .into_par_iter()
            .map(|j| {
                let mut coeffs = vec![Complex64::new(0.0, 0.0); n];
                coeffs[j] = Complex64::new(1.0, 0.0);
                let e = FourierSeries::from_coeffs(trunc, coeffs).expect("dense length");
                CVector::from_vec(op(&e).resized(trunc).into_coeffs())
            })
            .collect();
        Self {
            label: label.to_string(),
            truncation: trunc,
            components: 1,
            entries: CMatrix::from_columns(&cols),
        }
    }

    pub fn apply(&self, b: &ModeField) -> ModeField {
        assert_eq!(self.components, 3);
        ModeField::from_vector(
            self.truncation,
            &(&self.entries * b.resized(self.truncation).to_vector()),
        )
    }

    pub fn apply_scalar(&self, f: &FourierSeries) -> FourierSeries {
        assert_eq!(self.components, 1);
        let v = CVector::from_vec(f.resized(self.truncation).into_coeffs());
        FourierSeries::from_coeffs(
            self.truncation,
            (&self.entries * v).iter().copied().collect(),
        )
        .expect("dense length")
    }

    /// `‖M − Mᴴ‖₂`.
    pub fn hermitian_defect(&self) -> f64 {
        op_norm(&(&self.entries - self.entries.adjoint()))
    }

    /// `‖M + Mᴴ‖₂`.
    pub fn anti_hermitian_defect(&self) -> f64 {
        op_norm(&(&self.entries + self.entries.adjoint()))
    }

    /// Row-major `[re, im]` pairs.
    pub fn to_json(&self) -> Value {
        let (r, c) = self.entries.shape();
        let entries: Vec<Value> = (0..r)
            .flat_map(|i| (0..c).map(move |j| (i, j)))
            .map(|(i, j)| json!([self.entries[(i, j)].re, self.entries[(i, j)].im]))
            .collect();
        json!({
            "label": self.label,
            "truncation": self.truncation,
            "components": self.components,
            "rows": r,
            "cols": c,
            "entries": entries,
        })
    }
}
