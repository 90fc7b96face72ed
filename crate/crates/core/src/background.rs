//! Stationary horizontal background field `B(x₃) = (B₁, B₂, 0)` and the
//! per-wavevector profiles derived from it.

use crate::error::{Error, Result};
use crate::fourier::{FourierSeries, TWO_PI};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum TrigKind {
    #[default]
    Cos,
    Sin,
}

/// One trigonometric term `amplitude · cos/sin(2π·mode·x₃)` of `B_component`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BackgroundTerm {
    pub component: u8,
    pub mode: u32,
    pub amplitude: f64,
    #[serde(default)]
    pub kind: TrigKind,
}

impl BackgroundTerm {
    pub fn cos(component: u8, mode: u32, amplitude: f64) -> Self {
        Self {
            component,
            mode,
            amplitude,
            kind: TrigKind::Cos,
        }
    }

    pub fn sin(component: u8, mode: u32, amplitude: f64) -> Self {
        Self {
            component,
            mode,
            amplitude,
            kind: TrigKind::Sin,
        }
    }
}

const GRAM_FLOOR: f64 = 1e-12;

#[derive(Clone, Debug)]
pub struct BackgroundField {
    b1: FourierSeries,
    b2: FourierSeries,
    gram: [[f64; 2]; 2],
}

impl BackgroundField {
    pub fn new(terms: &[BackgroundTerm]) -> Result<Self> {
        let mut b = [FourierSeries::zeros(0), FourierSeries::zeros(0)];
        for t in terms {
            if t.mode == 0 {
                return Err(Error::InvalidInput(
                    "background terms need mode n >= 1".into(),
                ));
            }
            if !t.amplitude.is_finite() {
                return Err(Error::InvalidInput(
                    "background amplitude must be finite".into(),
                ));
            }
            let slot = match t.component {
                1 => 0,
                2 => 1,
                c => {
                    return Err(Error::InvalidInput(format!(
                        "background component must be 1 or 2, got {c}"
                    )))
                }
            };
            let term = match t.kind {
                TrigKind::Cos => FourierSeries::cos(t.mode, t.amplitude),
                TrigKind::Sin => FourierSeries::sin(t.mode, t.amplitude),
            };
            b[slot] = b[slot].widening_add(&term);
        }
        let [b1, b2] = b;
        Self::from_profiles(b1, b2)
    }

    /// `B* = (cos 2πx₃, sin 2πx₃, 0)`.
    pub fn canonical() -> Self {
        Self::new(&[
            BackgroundTerm::cos(1, 1, 1.0),
            BackgroundTerm::sin(2, 1, 1.0),
        ])
        .expect("canonical background is non-degenerate")
    }

    pub fn from_profiles(b1: FourierSeries, b2: FourierSeries) -> Result<Self> {
        if !b1.is_real(1e-14) || !b2.is_real(1e-14) {
            return Err(Error::InvalidInput(
                "background profiles must be real".into(),
            ));
        }
        if !b1.is_zero_mean() || !b2.is_zero_mean() {
            return Err(Error::InvalidInput(
                "background profiles must have zero mean".into(),
            ));
        }
        let g12 = b1.inner(&b2).re;
        let gram = [[b1.norm_sqr(), g12], [g12, b2.norm_sqr()]];
        let field = Self { b1, b2, gram };
        let lambda_min = field.gram_min_eigenvalue();
        if !(lambda_min > GRAM_FLOOR) {
            return Err(Error::DegenerateDirection { lambda_min });
        }
        Ok(field)
    }

    pub fn b1(&self) -> &FourierSeries {
        &self.b1
    }

    pub fn b2(&self) -> &FourierSeries {
        &self.b2
    }

    pub fn gram(&self) -> [[f64; 2]; 2] {
        self.gram
    }

    pub fn degree(&self) -> usize {
        self.b1.degree().max(self.b2.degree())
    }

    pub fn gram_min_eigenvalue(&self) -> f64 {
        let [[a, b], [_, d]] = self.gram;
        let mid = 0.5 * (a + d);
        let rad = (0.25 * (a - d) * (a - d) + b * b).sqrt();
        mid - rad
    }

    /// `δ = min_η ‖B_h·η‖ = sqrt(λ_min(G))`.
    pub fn delta(&self) -> f64 {
        self.gram_min_eigenvalue().max(0.0).sqrt()
    }

    /// `ηᵀGη`.
    pub fn beta_norm_sq(&self, eta: [f64; 2]) -> f64 {
        let g = self.gram;
        eta[0] * eta[0] * g[0][0] + 2.0 * eta[0] * eta[1] * g[0][1] + eta[1] * eta[1] * g[1][1]
    }

    pub fn scaled(&self, s: f64) -> Result<Self> {
        Self::from_profiles(self.b1.scale_re(s), self.b2.scale_re(s))
    }

    /// `B_h·v` for a real horizontal vector `v`.
    pub fn project(&self, v: [f64; 2]) -> FourierSeries {
        self.b1.scale_re(v[0]).widening_add(&self.b2.scale_re(v[1]))
    }
}

/// Horizontal lattice point `ξ = 2π(m₁, m₂)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct WaveVector(pub i64, pub i64);

impl WaveVector {
    pub fn xi(self) -> [f64; 2] {
        [TWO_PI * self.0 as f64, TWO_PI * self.1 as f64]
    }

    pub fn is_zero(self) -> bool {
        self.0 == 0 && self.1 == 0
    }

    pub fn neg(self) -> Self {
        Self(-self.0, -self.1)
    }

    pub fn norm(self) -> f64 {
        let [a, b] = self.xi();
        a.hypot(b)
    }
}

/// `Ψ(x₃) = slope·x₃ + periodic(x₃)`, normalized so that `Ψ(0) = 0`.
#[derive(Clone, Debug)]
pub struct Phase {
    pub slope: f64,
    pub periodic: FourierSeries,
}

impl Phase {
    pub fn eval(&self, x: f64) -> f64 {
        self.slope * x + self.periodic.eval(x).re
    }
}

/// Everything derived from one horizontal wavevector.
#[derive(Clone, Debug)]
pub struct ModeContext {
    pub wave: WaveVector,
    pub xi: [f64; 2],
    pub xi_norm: f64,
    pub eps: f64,
    pub eta: [f64; 2],
    pub eta_perp: [f64; 2],
    /// `β_η = B_h·η`
    pub beta: FourierSeries,
    /// `β_η′`
    pub beta_prime: FourierSeries,
    /// `β′_{η⊥} = B_h′·η⊥`
    pub beta_perp_prime: FourierSeries,
    pub beta_norm_sq: f64,
    pub e0: FourierSeries,
    /// `(B₁, B₂)`
    pub b_h: [FourierSeries; 2],
    /// `(B₁′, B₂′)`
    pub b_prime: [FourierSeries; 2],
    pub psi: Phase,
}

impl ModeContext {
    pub fn new(bg: &BackgroundField, wave: WaveVector) -> Result<Self> {
        if wave.is_zero() {
            return Err(Error::ZeroMode);
        }
        let xi = wave.xi();
        let xi_norm = xi[0].hypot(xi[1]);
        let eps = 1.0 / xi_norm;
        let eta = [xi[0] * eps, xi[1] * eps];
        let eta_perp = [-eta[1], eta[0]];
        let beta = bg.project(eta);
        let beta_prime = beta.derivative();
        let beta_perp_prime = bg.project(eta_perp).derivative();
        let beta_norm_sq = beta.norm_sqr();
        let e0 = beta.scale_re(1.0 / beta_norm_sq.sqrt());
        let b_h = [bg.b1.clone(), bg.b2.clone()];
        let b_prime = [bg.b1.derivative(), bg.b2.derivative()];
        let psi = psi_phase_of(&beta);
        Ok(Self {
            wave,
            xi,
            xi_norm,
            eps,
            eta,
            eta_perp,
            beta,
            beta_prime,
            beta_perp_prime,
            beta_norm_sq,
            e0,
            b_h,
            b_prime,
            psi,
        })
    }

    pub fn psi_phase(&self) -> &Phase {
        &self.psi
    }

    /// `B′ = (B₁′, B₂′, 0)` as three scalar profiles.
    pub fn b_prime3(&self) -> [FourierSeries; 3] {
        [
            self.b_prime[0].clone(),
            self.b_prime[1].clone(),
            FourierSeries::zeros(0),
        ]
    }

    /// `(η, 0)` as a complex 3-vector.
    pub fn eta3(&self) -> [Complex64; 3] {
        [
            Complex64::new(self.eta[0], 0.0),
            Complex64::new(self.eta[1], 0.0),
            Complex64::new(0.0, 0.0),
        ]
    }
}

fn psi_phase_of(beta: &FourierSeries) -> Phase {
    let sq = beta.product(beta);
    let slope = sq.mean().re;
    let mut periodic = sq.mean_removed().antiderivative_zero_mean();
    let at_zero = periodic.eval(0.0);
    periodic = periodic.widening_sub(&FourierSeries::constant(at_zero));
    Phase { slope, periodic }
}
