//! Truncated Fourier series on the unit-period interval.
//!
//! A [`FourierSeries`] of truncation `M` stores the dense coefficient vector
//! `f̂_n` for `n ∈ [−M, M]` and represents `f(x) = Σ f̂_n e^{2πinx}`.

use crate::error::{Error, Result};
use num_complex::Complex64;
use rustfft::FftPlanner;
use serde_json::{json, Value};
use std::f64::consts::PI;

pub const TWO_PI: f64 = 2.0 * PI;

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

#[derive(Clone, Debug, PartialEq)]
pub struct FourierSeries {
    trunc: usize,
    coeffs: Vec<Complex64>,
}

impl FourierSeries {
    pub fn zeros(trunc: usize) -> Self {
        Self {
            trunc,
            coeffs: vec![ZERO; 2 * trunc + 1],
        }
    }

    pub fn constant(value: Complex64) -> Self {
        Self {
            trunc: 0,
            coeffs: vec![value],
        }
    }

    /// Builds a series from a dense coefficient vector ordered `n = −M..=M`.
    pub fn from_coeffs(trunc: usize, coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.len() != 2 * trunc + 1 {
            return Err(Error::InvalidInput(format!(
                "expected {} coefficients for truncation {trunc}, got {}",
                2 * trunc + 1,
                coeffs.len()
            )));
        }
        Ok(Self { trunc, coeffs })
    }

    pub fn from_modes(trunc: usize, modes: &[(i64, Complex64)]) -> Result<Self> {
        let mut out = Self::zeros(trunc);
        for &(n, c) in modes {
            if n.unsigned_abs() as usize > trunc {
                return Err(Error::InvalidInput(format!(
                    "mode {n} outside truncation {trunc}"
                )));
            }
            out.coeffs[(n + trunc as i64) as usize] += c;
        }
        Ok(out)
    }

    /// `amplitude · cos(2πnx)`.
    pub fn cos(n: u32, amplitude: f64) -> Self {
        let m = n as usize;
        let mut out = Self::zeros(m);
        out.coeffs[m + m] += Complex64::new(amplitude / 2.0, 0.0);
        out.coeffs[0] += Complex64::new(amplitude / 2.0, 0.0);
        out
    }

    /// `amplitude · sin(2πnx)`.
    pub fn sin(n: u32, amplitude: f64) -> Self {
        let m = n as usize;
        let mut out = Self::zeros(m);
        out.coeffs[m + m] += Complex64::new(0.0, -amplitude / 2.0);
        out.coeffs[0] += Complex64::new(0.0, amplitude / 2.0);
        out
    }

    /// `e^{2πinx}` at truncation `|n|`.
    pub fn exp_mode(n: i64) -> Self {
        let m = n.unsigned_abs() as usize;
        let mut out = Self::zeros(m);
        out.coeffs[(n + m as i64) as usize] = Complex64::new(1.0, 0.0);
        out
    }

    pub fn truncation(&self) -> usize {
        self.trunc
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<Complex64> {
        self.coeffs
    }

    pub fn coeff(&self, n: i64) -> Complex64 {
        if n.unsigned_abs() as usize > self.trunc {
            ZERO
        } else {
            self.coeffs[(n + self.trunc as i64) as usize]
        }
    }

    pub fn modes(&self) -> impl Iterator<Item = (i64, Complex64)> + '_ {
        let m = self.trunc as i64;
        self.coeffs
            .iter()
            .enumerate()
            .map(move |(i, &c)| (i as i64 - m, c))
    }

    /// Largest `|n|` carrying a nonzero coefficient.
    pub fn degree(&self) -> usize {
        self.modes()
            .filter(|(_, c)| c.norm_sqr() > 0.0)
            .map(|(n, _)| n.unsigned_abs() as usize)
            .max()
            .unwrap_or(0)
    }

    /// Explicit resampling: zero-pads or cuts to truncation `m`.
    pub fn resized(&self, m: usize) -> Self {
        let mut out = Self::zeros(m);
        let keep = m.min(self.trunc) as i64;
        for n in -keep..=keep {
            out.coeffs[(n + m as i64) as usize] = self.coeff(n);
        }
        out
    }

    /// L² norm of the modes with `|n| > m`.
    pub fn tail_norm(&self, m: usize) -> f64 {
        self.modes()
            .filter(|(n, _)| n.unsigned_abs() as usize > m)
            .map(|(_, c)| c.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    fn check_same(&self, other: &Self) -> Result<()> {
        if self.trunc != other.trunc {
            return Err(Error::TruncationMismatch {
                left: self.trunc,
                right: other.trunc,
            });
        }
        Ok(())
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        Ok(self.widening_add(other))
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        Ok(self.widening_sub(other))
    }

    /// Sum at the larger of the two truncations.
    pub fn widening_add(&self, other: &Self) -> Self {
        self.widening_axpy(Complex64::new(1.0, 0.0), other)
    }

    pub fn widening_sub(&self, other: &Self) -> Self {
        self.widening_axpy(Complex64::new(-1.0, 0.0), other)
    }

    /// `self + a·other` at the larger of the two truncations.
    pub fn widening_axpy(&self, a: Complex64, other: &Self) -> Self {
        let mut out = self.resized(self.trunc.max(other.trunc));
        let m = out.trunc as i64;
        for (n, c) in other.modes() {
            out.coeffs[(n + m) as usize] += a * c;
        }
        out
    }

    pub fn scale(&self, a: Complex64) -> Self {
        Self {
            trunc: self.trunc,
            coeffs: self.coeffs.iter().map(|c| a * c).collect(),
        }
    }

    pub fn scale_re(&self, a: f64) -> Self {
        self.scale(Complex64::new(a, 0.0))
    }

    pub fn derivative(&self) -> Self {
        Self {
            trunc: self.trunc,
            coeffs: self
                .modes()
                .map(|(n, c)| c * Complex64::new(0.0, TWO_PI * n as f64))
                .collect(),
        }
    }

    /// Mean-removal projection `P`.
    pub fn mean_removed(&self) -> Self {
        let mut out = self.clone();
        out.coeffs[self.trunc] = ZERO;
        out
    }

    pub fn mean(&self) -> Complex64 {
        self.coeffs[self.trunc]
    }

    /// Pointwise complex conjugate: `f̂_n ↦ conj(f̂_{−n})`.
    pub fn conj(&self) -> Self {
        Self {
            trunc: self.trunc,
            coeffs: self.coeffs.iter().rev().map(|c| c.conj()).collect(),
        }
    }

    /// `∫₀¹ f · conj(g)`.
    pub fn inner(&self, other: &Self) -> Complex64 {
        let m = self.trunc.min(other.trunc) as i64;
        (-m..=m)
            .map(|n| self.coeff(n) * other.coeff(n).conj())
            .sum()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    /// `∂₃⁻¹ := P ∫ P`, dividing mode `n ≠ 0` by `2πin`.
    pub fn antiderivative_zero_mean(&self) -> Self {
        Self {
            trunc: self.trunc,
            coeffs: self
                .modes()
                .map(|(n, c)| {
                    if n == 0 {
                        ZERO
                    } else {
                        c / Complex64::new(0.0, TWO_PI * n as f64)
                    }
                })
                .collect(),
        }
    }

    /// Exact product at truncation `M_f + M_g`.
    pub fn product(&self, other: &Self) -> Self {
        let trunc = self.trunc + other.trunc;
        let mut coeffs = vec![ZERO; 2 * trunc + 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.norm_sqr() == 0.0 {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                coeffs[i + j] += a * b;
            }
        }
        Self { trunc, coeffs }
    }

    /// Product truncated to `out_trunc`, with the L² norm of the discarded tail.
    pub fn multiply(&self, other: &Self, out_trunc: usize) -> (Self, f64) {
        let full = self.product(other);
        let tail = full.tail_norm(out_trunc);
        (full.resized(out_trunc), tail)
    }

    pub fn eval(&self, x: f64) -> Complex64 {
        self.modes()
            .map(|(n, c)| c * Complex64::from_polar(1.0, TWO_PI * n as f64 * x))
            .sum()
    }

    /// Values at the uniform grid `j / n_points`.
    pub fn samples(&self, n_points: usize) -> Vec<Complex64> {
        assert!(n_points > 0, "collocation needs at least one point");
        if n_points < 2 * self.trunc + 2 {
            log::warn!(
                "collocation on {n_points} points aliases a series of truncation {}",
                self.trunc
            );
        }
        let p = n_points as i64;
        let mut buf = vec![ZERO; n_points];
        for (n, c) in self.modes() {
            buf[n.rem_euclid(p) as usize] += c;
        }
        FftPlanner::new()
            .plan_fft_inverse(n_points)
            .process(&mut buf);
        buf
    }

    /// Inverse collocation by DFT, keeping `|n| ≤ trunc`; also returns the
    /// L² norm of every discarded DFT coefficient.
    pub fn from_samples(samples: &[Complex64], trunc: usize) -> (Self, f64) {
        let p = samples.len();
        let mut buf = samples.to_vec();
        FftPlanner::new().plan_fft_forward(p).process(&mut buf);
        let scale = 1.0 / p as f64;
        let resolved = ((p - 1) / 2).min(trunc) as i64;
        let mut out = Self::zeros(trunc);
        let mut kept = vec![false; p];
        for n in -resolved..=resolved {
            let idx = n.rem_euclid(p as i64) as usize;
            out.coeffs[(n + trunc as i64) as usize] = buf[idx] * scale;
            kept[idx] = true;
        }
        let tail = buf
            .iter()
            .zip(&kept)
            .filter(|(_, &k)| !k)
            .map(|(c, _)| (c * scale).norm_sqr())
            .sum::<f64>()
            .sqrt();
        (out, tail)
    }

    pub fn is_real(&self, tol: f64) -> bool {
        self.modes()
            .all(|(n, c)| (c - self.coeff(-n).conj()).norm() <= tol)
    }

    pub fn is_zero_mean(&self) -> bool {
        self.mean() == ZERO
    }

    /// `[[n, re, im], ...]` for every stored mode.
    pub fn to_json(&self) -> Value {
        Value::Array(self.modes().map(|(n, c)| json!([n, c.re, c.im])).collect())
    }

    pub fn from_json(value: &Value) -> Result<Self> {
        let bad = || Error::InvalidInput("series JSON must be [[n, re, im], ...]".into());
        let rows = value.as_array().ok_or_else(bad)?;
        let mut modes = Vec::with_capacity(rows.len());
        for row in rows {
            let r = row.as_array().filter(|r| r.len() == 3).ok_or_else(bad)?;
            let n = r[0].as_i64().ok_or_else(bad)?;
            let re = r[1].as_f64().ok_or_else(bad)?;
            let im = r[2].as_f64().ok_or_else(bad)?;
            modes.push((n, Complex64::new(re, im)));
        }
        let trunc = modes
            .iter()
            .map(|(n, _)| n.unsigned_abs() as usize)
            .max()
            .unwrap_or(0);
        Self::from_modes(trunc, &modes)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn close(a: &FourierSeries, b: &FourierSeries, tol: f64) -> bool {
        a.widening_sub(b).norm() < tol
    }

    #[test]
    fn derivative_symbol() {
        let d = FourierSeries::exp_mode(3).derivative();
        assert!((d.coeff(3) - c(0.0, 6.0 * PI)).norm() < 1e-14);
    }

    #[test]
    fn mean_removal() {
        let f = FourierSeries::constant(c(1.0, 0.0)).widening_add(&FourierSeries::cos(1, 1.0));
        assert!(close(&f.mean_removed(), &FourierSeries::cos(1, 1.0), 1e-15));
    }

    #[test]
    fn cos_inner_product_matches_quadrature() {
        let f = FourierSeries::cos(1, 1.0);
        let quad: f64 = (0..256)
            .map(|j| (TWO_PI * j as f64 / 256.0).cos().powi(2))
            .sum::<f64>()
            / 256.0;
        assert!((f.inner(&f).re - quad).abs() < 1e-14);
        assert!((f.inner(&f).re - 0.5).abs() < 1e-15);
    }

    #[test]
    fn antiderivative_examples() {
        assert_eq!(
            FourierSeries::constant(c(1.0, 0.0)).antiderivative_zero_mean(),
            FourierSeries::zeros(0)
        );
        let s = FourierSeries::cos(1, 1.0).antiderivative_zero_mean();
        assert!(close(&s, &FourierSeries::sin(1, 1.0 / TWO_PI), 1e-16));
        let c2 = FourierSeries::cos(1, 1.0).product(&FourierSeries::cos(1, 1.0));
        let s2 = c2.antiderivative_zero_mean();
        assert!(close(&s2, &FourierSeries::sin(2, 1.0 / (8.0 * PI)), 1e-16));
    }

    #[test]
    fn products() {
        let cc = FourierSeries::cos(1, 1.0).product(&FourierSeries::cos(1, 1.0));
        let want = FourierSeries::constant(c(0.5, 0.0)).widening_add(&FourierSeries::cos(2, 0.5));
        assert!(close(&cc, &want, 1e-16));
        let cs = FourierSeries::cos(1, 1.0).product(&FourierSeries::sin(1, 1.0));
        assert!(close(&cs, &FourierSeries::sin(2, 0.5), 1e-16));
        let (t, tail) = cc.multiply(&FourierSeries::cos(1, 1.0), 1);
        assert_eq!(t.truncation(), 1);
        assert!((tail - (2.0f64 * 0.125 * 0.125).sqrt()).abs() < 1e-15);
    }

    #[test]
    fn mismatched_truncation_is_an_error() {
        let a = FourierSeries::zeros(2);
        let b = FourierSeries::zeros(3);
        assert!(matches!(
            a.checked_add(&b),
            Err(Error::TruncationMismatch { left: 2, right: 3 })
        ));
        assert_eq!(a.widening_add(&b).truncation(), 3);
    }

    #[test]
    fn collocation_of_single_mode() {
        let s = FourierSeries::exp_mode(1).samples(8);
        for (j, v) in s.iter().enumerate() {
            let want = Complex64::from_polar(1.0, TWO_PI * j as f64 / 8.0);
            assert!((v - want).norm() < 1e-15);
        }
    }

    #[test]
    fn bessel_tail_of_phase() {
        let samples: Vec<Complex64> = (0..256)
            .map(|j| Complex64::from_polar(1.0, (TWO_PI * j as f64 / 256.0).sin()))
            .collect();
        let (f, tail) = FourierSeries::from_samples(&samples, 32);
        assert!(tail < 1e-10);
        // J_1(1) is the first harmonic of exp(i sin θ)
        assert!((f.coeff(1).re - 0.440_050_585_744_933_5).abs() < 1e-14);
    }

    #[test]
    fn conj_and_realness() {
        let f = FourierSeries::cos(2, 1.0).widening_add(&FourierSeries::sin(1, 3.0));
        assert!(f.is_real(1e-15));
        assert!(f.is_zero_mean());
        let g = f.scale(c(0.0, 1.0));
        assert!(!g.is_real(1e-3));
        assert!(close(&g.conj(), &f.scale(c(0.0, -1.0)), 1e-15));
    }

    #[test]
    fn json_round_trip() {
        let f = FourierSeries::from_modes(2, &[(-2, c(1.0, 2.0)), (1, c(-0.5, 0.0))]).unwrap();
        let back = FourierSeries::from_json(&f.to_json()).unwrap();
        assert_eq!(back, f);
    }
}
