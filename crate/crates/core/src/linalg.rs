//! Dense complex linear-algebra helpers built on `nalgebra`.

use crate::error::{Error, Result};
use nalgebra::{DMatrix, DVector, Schur, SymmetricEigen, QR};
use num_complex::Complex64;

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

pub fn hermitian_part(m: &CMatrix) -> CMatrix {
    (m + m.adjoint()).scale(0.5)
}

/// Largest singular value.
pub fn op_norm(m: &CMatrix) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    m.clone().singular_values().max()
}

/// Eigenvalues of the Hermitian part, ascending.
pub fn hermitian_eigenvalues(m: &CMatrix) -> Vec<f64> {
    if m.is_empty() {
        return Vec::new();
    }
    let mut v: Vec<f64> = SymmetricEigen::new(hermitian_part(m))
        .eigenvalues
        .iter()
        .copied()
        .collect();
    v.sort_by(f64::total_cmp);
    v
}

/// Eigen-decomposition of a Hermitian matrix, eigenvalues ascending.
pub fn hermitian_eigh(m: &CMatrix) -> (Vec<f64>, CMatrix) {
    let eig = SymmetricEigen::new(hermitian_part(m));
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = CMatrix::from_fn(m.nrows(), order.len(), |r, c| {
        eig.eigenvectors[(r, order[c])]
    });
    (values, vectors)
}

/// `sup_{‖x‖=1} |Re⟨Mx, x⟩|`.
pub fn hermitian_radius(m: &CMatrix) -> f64 {
    hermitian_eigenvalues(m)
        .into_iter()
        .map(f64::abs)
        .fold(0.0, f64::max)
}

/// Eigenvalues of a general complex matrix via the complex Schur form.
pub fn eigenvalues(m: &CMatrix) -> Result<Vec<Complex64>> {
    if m.is_empty() {
        return Ok(Vec::new());
    }
    let schur = Schur::try_new(m.clone(), f64::EPSILON, 100 * m.nrows().max(10))
        .ok_or_else(|| Error::EigenFailure(format!("Schur iteration, n = {}", m.nrows())))?;
    let (_, t) = schur.unpack();
    Ok(t.diagonal().iter().copied().collect())
}

/// Largest real part of the spectrum.
pub fn spectral_abscissa(m: &CMatrix) -> Result<f64> {
    Ok(eigenvalues(m)?
        .into_iter()
        .map(|z| z.re)
        .fold(f64::NEG_INFINITY, f64::max))
}

/// Orthonormal bases of `range(Kᴴ)` and `ker K` from one Householder QR of `[Kᴴ | I]`.
pub fn complementary_bases(k: &CMatrix) -> Result<(CMatrix, CMatrix)> {
    let (r, n) = k.shape();
    if r > n {
        return Err(Error::InvalidInput(format!(
            "{r} constraints on {n} unknowns"
        )));
    }
    let mut stacked = CMatrix::zeros(n, r + n);
    stacked.view_mut((0, 0), (n, r)).copy_from(&k.adjoint());
    for i in 0..n {
        stacked[(i, r + i)] = Complex64::new(1.0, 0.0);
    }
    let qr = QR::new(stacked);
    let rr = qr.r();
    let scale = (0..r).map(|i| rr[(i, i)].norm()).fold(0.0, f64::max);
    if let Some(i) = (0..r).find(|&i| rr[(i, i)].norm() <= 1e-12 * scale) {
        return Err(Error::InvalidInput(format!(
            "constraint row {i} is linearly dependent"
        )));
    }
    let q = qr.q();
    Ok((
        q.columns(0, r).into_owned(),
        q.columns(r, n - r).into_owned(),
    ))
}

const PADE13: [f64; 14] = [
    64_764_752_532_480_000.0,
    32_382_376_266_240_000.0,
    7_771_770_303_897_600.0,
    1_187_353_796_428_800.0,
    129_060_195_264_000.0,
    10_559_470_521_600.0,
    670_442_572_800.0,
    33_522_128_640.0,
    1_323_241_920.0,
    40_840_800.0,
    960_960.0,
    16_380.0,
    182.0,
    1.0,
];
const THETA13: f64 = 5.371_920_351_148_152;

fn norm1(m: &CMatrix) -> f64 {
    m.column_iter()
        .map(|c| c.iter().map(|z| z.norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// Matrix exponential by scaling and squaring with the degree-13 Padé approximant.
pub fn expm(a: &CMatrix) -> Result<CMatrix> {
    let n = a.nrows();
    let nrm = norm1(a);
    if !nrm.is_finite() {
        return Err(Error::IllConditioned("non-finite generator".into()));
    }
    let s = if nrm > THETA13 {
        (nrm / THETA13).log2().ceil() as i32
    } else {
        0
    };
    let a = a.scale(0.5f64.powi(s));
    let b = |i: usize| Complex64::new(PADE13[i], 0.0);
    let id = CMatrix::identity(n, n);
    let a2 = &a * &a;
    let a4 = &a2 * &a2;
    let a6 = &a4 * &a2;
    let inner_u = &a6 * (a6.scale(PADE13[13]) + a4.scale(PADE13[11]) + a2.scale(PADE13[9]))
        + a6.scale(PADE13[7])
        + a4.scale(PADE13[5])
        + a2.scale(PADE13[3])
        + &id * b(1);
    let u = &a * inner_u;
    let v = &a6 * (a6.scale(PADE13[12]) + a4.scale(PADE13[10]) + a2.scale(PADE13[8]))
        + a6.scale(PADE13[6])
        + a4.scale(PADE13[4])
        + a2.scale(PADE13[2])
        + &id * b(0);
    let lu = (&v - &u).lu();
    let mut r = lu
        .solve(&(&v + &u))
        .ok_or_else(|| Error::IllConditioned("singular Padé denominator".into()))?;
    for _ in 0..s {
        r = &r * &r;
    }
    if r.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::IllConditioned("non-finite exponential".into()));
    }
    Ok(r)
}
