//! Per-mode operators of the linearized induction equation.
//!
//! Scaled operators (`A_m`, `C_m`, `A`, `C`, `R`) act on the direction
//! `η = ξ/|ξ|`; the full induction operator acts at the unscaled wavevector
//! `ξ`. Every product with a background profile is formed exactly at
//! extended truncation and cut back to the truncation of the input field.

use crate::background::ModeContext;
use crate::error::{Error, Result};
use crate::field::ModeField;
use crate::fourier::FourierSeries;
use num_complex::Complex64;

type Triple = [FourierSeries; 3];

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

fn triple_sum(a: &Triple, b: &Triple) -> Triple {
    std::array::from_fn(|i| a[i].widening_add(&b[i]))
}

/// `v × b` for a constant vector `v`.
fn cross_const(v: [Complex64; 3], b: &Triple) -> Triple {
    [
        b[2].scale(v[1]).widening_sub(&b[1].scale(v[2])),
        b[0].scale(v[2]).widening_sub(&b[2].scale(v[0])),
        b[1].scale(v[0]).widening_sub(&b[0].scale(v[1])),
    ]
}

fn cross(a: &Triple, b: &Triple) -> Triple {
    [
        a[1].product(&b[2]).widening_sub(&a[2].product(&b[1])),
        a[2].product(&b[0]).widening_sub(&a[0].product(&b[2])),
        a[0].product(&b[1]).widening_sub(&a[1].product(&b[0])),
    ]
}

/// `−iβ ∂₃⁻¹(β f)`.
fn beta_sandwich(ctx: &ModeContext, f: &FourierSeries) -> FourierSeries {
    ctx.beta
        .product(&ctx.beta.product(f).antiderivative_zero_mean())
        .scale(-I)
}

/// `A_m b = −iβ_η ∂₃⁻¹(β_η (η,0)×b)`.
pub fn op_am(ctx: &ModeContext, b: &ModeField) -> ModeField {
    let w = cross_const(ctx.eta3(), b.components());
    ModeField::new(w.map(|wj| beta_sandwich(ctx, &wj)), b.truncation())
}

fn cm_scalar(ctx: &ModeContext, f: &FourierSeries) -> FourierSeries {
    let a = ctx
        .beta
        .product(&ctx.beta_perp_prime.product(f).antiderivative_zero_mean());
    let c = ctx
        .beta_perp_prime
        .product(&ctx.beta.product(f).antiderivative_zero_mean());
    c.widening_sub(&a).scale_re(0.5)
}

/// `C_m b = −½β_η∂₃⁻¹(β′_{η⊥}b) + ½β′_{η⊥}∂₃⁻¹(β_η b)`, componentwise.
pub fn op_cm(ctx: &ModeContext, b: &ModeField) -> ModeField {
    ModeField::new(
        std::array::from_fn(|i| cm_scalar(ctx, b.comp(i))),
        b.truncation(),
    )
}

/// Componentwise projection onto `e₀`.
pub fn proj_e0(ctx: &ModeContext, b: &ModeField) -> ModeField {
    let coeffs = std::array::from_fn(|i| b.comp(i).inner(&ctx.e0));
    ModeField::profile_times(&ctx.e0, coeffs, b.truncation())
}

pub fn proj_e0_perp(ctx: &ModeContext, b: &ModeField) -> ModeField {
    b.sub(&proj_e0(ctx, b))
}

/// Pointwise projection onto `(η, 0)`.
pub fn proj_eta(ctx: &ModeContext, b: &ModeField) -> ModeField {
    let s = b
        .comp(0)
        .scale_re(ctx.eta[0])
        .widening_add(&b.comp(1).scale_re(ctx.eta[1]));
    ModeField::profile_times(&s, ctx.eta3(), b.truncation())
}

pub fn proj_eta_perp(ctx: &ModeContext, b: &ModeField) -> ModeField {
    b.sub(&proj_eta(ctx, b))
}

/// `A = Π⊥_{e0} A_m Π⊥_{e0}`.
pub fn op_a(ctx: &ModeContext, b: &ModeField) -> ModeField {
    proj_e0_perp(ctx, &op_am(ctx, &proj_e0_perp(ctx, b)))
}

/// `C b = C_m b + A_m(β_η V) − (i/‖β_η‖²)(∫β_η (A_m b)₃) B′` with
/// `V = ‖β_η‖⁻² ∫ i b₃ B′`.
pub fn op_c(ctx: &ModeContext, b: &ModeField) -> ModeField {
    let m = b.truncation();
    let nb2 = ctx.beta_norm_sq;
    let bp = ctx.b_prime3();
    let v: [Complex64; 3] = std::array::from_fn(|j| I * b.comp(2).product(&bp[j]).mean() / nb2);
    let corr = op_am(
        ctx,
        &ModeField::profile_times(&ctx.beta, v, m + ctx.beta.truncation()),
    );
    let am3 = op_am(ctx, b).comp(2).clone();
    let s = -I * ctx.beta.product(&am3).mean() / nb2;
    let last = ModeField::new(bp.map(|p| p.scale(s)), m);
    op_cm(ctx, b).add(&corr.resized(m)).add(&last)
}

/// Scaled Taylor residual `(r⊥, r₃)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TaylorResidual {
    pub perp: Complex64,
    pub vertical: Complex64,
}

impl TaylorResidual {
    pub fn norm(&self) -> f64 {
        self.perp.norm().hypot(self.vertical.norm())
    }
}

/// `r⊥ = η⊥·∫(iβ_η b_h + ε b₃ B_h′)`, `r₃ = ∫β_η b₃`.
pub fn taylor_residual(ctx: &ModeContext, b: &ModeField) -> TaylorResidual {
    let r: [Complex64; 2] = std::array::from_fn(|j| {
        I * ctx.beta.product(b.comp(j)).mean() + ctx.eps * b.comp(2).product(&ctx.b_prime[j]).mean()
    });
    TaylorResidual {
        perp: ctx.eta_perp[0] * r[0] + ctx.eta_perp[1] * r[1],
        vertical: ctx.beta.product(b.comp(2)).mean(),
    }
}

/// Scaled divergence `iη·b_h + ε∂₃b₃`.
pub fn divergence(ctx: &ModeContext, b: &ModeField) -> FourierSeries {
    b.comp(0)
        .scale(I * ctx.eta[0])
        .widening_add(&b.comp(1).scale(I * ctx.eta[1]))
        .widening_add(&b.comp(2).derivative().scale_re(ctx.eps))
}

pub fn divergence_residual(ctx: &ModeContext, b: &ModeField) -> f64 {
    divergence(ctx, b).norm()
}

/// Per-mode curl with `∇ = (iξ₁, iξ₂, ∂₃)`.
pub fn curl(ctx: &ModeContext, v: &Triple) -> Triple {
    let [x1, x2] = ctx.xi;
    [
        v[2].scale(I * x2).widening_sub(&v[1].derivative()),
        v[0].derivative().widening_sub(&v[2].scale(I * x1)),
        v[1].scale(I * x1).widening_sub(&v[0].scale(I * x2)),
    ]
}

fn background3(ctx: &ModeContext) -> Triple {
    [
        ctx.b_h[0].clone(),
        ctx.b_h[1].clone(),
        FourierSeries::zeros(0),
    ]
}

/// Linearized Laplace force `F = curl b × B + curl B × b`.
pub fn lorentz_force(ctx: &ModeContext, b: &ModeField) -> Triple {
    let bv = background3(ctx);
    let curl_b0 = [
        ctx.b_prime[1].scale_re(-1.0),
        ctx.b_prime[0].clone(),
        FourierSeries::zeros(0),
    ];
    triple_sum(
        &cross(&curl(ctx, b.components()), &bv),
        &cross(&curl_b0, b.components()),
    )
}

/// `∫ curl F dx₃`: the unscaled solvability condition for the balance equation.
pub fn curl_form_residual(ctx: &ModeContext, b: &ModeField) -> [Complex64; 3] {
    let cf = curl(ctx, &lorentz_force(ctx, b));
    std::array::from_fn(|i| cf[i].mean())
}

/// `Π_{e0} b` computed from `b₃` alone, valid on constrained fields.
pub fn proj_e0_via_taylor(ctx: &ModeContext, b: &ModeField) -> Result<ModeField> {
    let scale = 1.0f64.max(b.norm());
    let taylor = taylor_residual(ctx, b).norm();
    let div = divergence_residual(ctx, b);
    if taylor > 1e-10 * scale || div > 1e-10 * scale {
        return Err(Error::ConstraintViolated {
            taylor,
            divergence: div,
        });
    }
    let bp = ctx.b_prime3();
    let eta = ctx.eta3();
    let w: [Complex64; 3] = std::array::from_fn(|j| {
        I * b.comp(2).product(&bp[j]).mean()
            - 2.0 * I * eta[j] * ctx.beta_prime.product(b.comp(2)).mean()
    });
    let coeff = ctx.eps / ctx.beta_norm_sq;
    Ok(ModeField::profile_times(
        &ctx.beta,
        w.map(|wj| wj * coeff),
        b.truncation(),
    ))
}

/// Whether the geostrophic velocity enters the induction operator.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Geostrophic {
    #[default]
    Included,
    Disabled,
}

/// Velocity and induction contributions of one application of `L̂`.
#[derive(Clone, Debug)]
pub struct InductionParts {
    pub u_m: ModeField,
    pub u_g: [Complex64; 3],
    pub ind_m: ModeField,
    pub ind_g: ModeField,
    pub diffusion: ModeField,
}

/// `û_m = ∂₃⁻¹ curl F`, returned at its exact (extended) truncation.
pub fn magnetostrophic_u(ctx: &ModeContext, b: &ModeField) -> ModeField {
    let cf = curl(ctx, &lorentz_force(ctx, b));
    ModeField::from_components(cf.map(|c| c.antiderivative_zero_mean()))
}

/// `(∂₃² − |ξ|²) b`.
pub fn diffusion(ctx: &ModeContext, b: &ModeField) -> ModeField {
    let k2 = ctx.xi_norm * ctx.xi_norm;
    b.map(|c| c.derivative().derivative().widening_sub(&c.scale_re(k2)))
}

/// `curl(û × B) = iβ_ξ û − û₃ B′` for a divergence-free `û`.
fn induction_of_constant(ctx: &ModeContext, u: [Complex64; 3], trunc: usize) -> ModeField {
    let beta_xi = ctx.beta.scale_re(ctx.xi_norm);
    let bp = ctx.b_prime3();
    ModeField::new(
        std::array::from_fn(|j| beta_xi.scale(I * u[j]).widening_sub(&bp[j].scale(u[2]))),
        trunc,
    )
}

fn geostrophic_from(ctx: &ModeContext, g: &ModeField) -> [Complex64; 3] {
    let k2 = ctx.xi_norm * ctx.xi_norm;
    let beta_xi = ctx.beta.scale_re(ctx.xi_norm);
    let bp = ctx.b_prime3();
    let denom = ctx.beta_norm_sq * k2;
    let w: [Complex64; 3] = std::array::from_fn(|j| {
        (I * beta_xi.product(g.comp(j)).mean() + g.comp(2).product(&bp[j]).mean()) / denom
    });
    let xi = ctx.xi;
    let dot = (xi[0] * w[0] + xi[1] * w[1]) / k2;
    [w[0] - xi[0] * dot, w[1] - xi[1] * dot, w[2]]
}

pub fn induction_parts(ctx: &ModeContext, b: &ModeField, geo: Geostrophic) -> InductionParts {
    let m = b.truncation();
    let u_m = magnetostrophic_u(ctx, b);
    let bv = background3(ctx);
    let ind_m = ModeField::from_components(curl(ctx, &cross(u_m.components(), &bv)));
    let diff = diffusion(ctx, b);
    let (u_g, ind_g) = match geo {
        Geostrophic::Included => {
            let u_g = geostrophic_from(ctx, &ind_m.add(&diff));
            (u_g, induction_of_constant(ctx, u_g, m))
        }
        Geostrophic::Disabled => ([Complex64::new(0.0, 0.0); 3], ModeField::zeros(m)),
    };
    InductionParts {
        u_m,
        u_g,
        ind_m,
        ind_g,
        diffusion: diff,
    }
}

/// Constant geostrophic velocity `û_g`.
pub fn geostrophic_u(ctx: &ModeContext, b: &ModeField) -> [Complex64; 3] {
    induction_parts(ctx, b, Geostrophic::Included).u_g
}

/// `L̂b = curl((û_m + û_g) × B) + (∂₃² − |ξ|²) b`.
pub fn full_induction(ctx: &ModeContext, b: &ModeField) -> ModeField {
    full_induction_with(ctx, b, Geostrophic::Included)
}

pub fn full_induction_with(ctx: &ModeContext, b: &ModeField, geo: Geostrophic) -> ModeField {
    let p = induction_parts(ctx, b, geo);
    p.ind_m
        .add(&p.ind_g)
        .add(&p.diffusion)
        .resized(b.truncation())
}

/// `R := ε²(L̂ − diffusion) − A/ε − C`.
pub fn op_r(ctx: &ModeContext, b: &ModeField) -> ModeField {
    let p = induction_parts(ctx, b, Geostrophic::Included);
    let eps = ctx.eps;
    p.ind_m
        .add(&p.ind_g)
        .resized(b.truncation())
        .scale_re(eps * eps)
        .sub(&op_a(ctx, b).scale_re(1.0 / eps))
        .sub(&op_c(ctx, b))
}
