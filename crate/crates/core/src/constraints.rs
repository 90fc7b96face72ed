//! Linear constraint sets of a single mode: divergence (one row per vertical
//! mode) and the two scalar Taylor conditions.

use crate::background::ModeContext;
use crate::error::Result;
use crate::field::ModeField;
use crate::fourier::TWO_PI;
use crate::linalg::{complementary_bases, CMatrix, CVector};
use crate::operators::taylor_residual;
use num_complex::Complex64;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ConstraintKind {
    Divergence,
    DivergenceAndTaylor,
}

/// Stacked constraint matrix with unit-norm rows.
pub fn constraint_matrix(ctx: &ModeContext, trunc: usize, kind: ConstraintKind) -> CMatrix {
    let w = 2 * trunc + 1;
    let dim = 3 * w;
    let extra = match kind {
        ConstraintKind::Divergence => 0,
        ConstraintKind::DivergenceAndTaylor => 2,
    };
    let mut k = CMatrix::zeros(w + extra, dim);
    for (row, n) in (-(trunc as i64)..=trunc as i64).enumerate() {
        k[(row, row)] = Complex64::new(0.0, ctx.eta[0]);
        k[(row, w + row)] = Complex64::new(0.0, ctx.eta[1]);
        k[(row, 2 * w + row)] = Complex64::new(0.0, ctx.eps * TWO_PI * n as f64);
    }
    if extra == 2 {
        for col in 0..dim {
            let mut e = CVector::zeros(dim);
            e[col] = Complex64::new(1.0, 0.0);
            let r = taylor_residual(ctx, &ModeField::from_vector(trunc, &e));
            k[(w, col)] = r.perp;
            k[(w + 1, col)] = r.vertical;
        }
    }
    for mut row in k.row_iter_mut() {
        let nrm = row.norm();
        if nrm > 0.0 {
            row /= Complex64::new(nrm, 0.0);
        }
    }
    k
}

/// Orthonormal bases of a constraint set and of its orthogonal complement.
#[derive(Clone, Debug)]
pub struct ConstraintSpace {
    pub truncation: usize,
    pub kind: ConstraintKind,
    /// Normalized constraint rows.
    pub rows: CMatrix,
    /// Orthonormal basis of `range(Kᴴ)`.
    pub normal: CMatrix,
    /// Orthonormal basis of `ker K`.
    pub basis: CMatrix,
}

impl ConstraintSpace {
    pub fn new(ctx: &ModeContext, trunc: usize, kind: ConstraintKind) -> Result<Self> {
        let rows = constraint_matrix(ctx, trunc, kind);
        let (normal, basis) = complementary_bases(&rows)?;
        Ok(Self {
            truncation: trunc,
            kind,
            rows,
            normal,
            basis,
        })
    }

    pub fn dim(&self) -> usize {
        self.basis.ncols()
    }

    pub fn project_vector(&self, v: &CVector) -> CVector {
        v - &self.normal * (self.normal.adjoint() * v)
    }

    pub fn project(&self, b: &ModeField) -> ModeField {
        let v = b.resized(self.truncation).to_vector();
        ModeField::from_vector(self.truncation, &self.project_vector(&v))
    }

    /// `N Nᴴ`.
    pub fn projector(&self) -> CMatrix {
        &self.basis * self.basis.adjoint()
    }

    /// `Nᴴ M N`.
    pub fn compress(&self, m: &CMatrix) -> CMatrix {
        self.basis.adjoint() * m * &self.basis
    }
}
