//! Exact linear propagation of horizontal modes.

use crate::background::{BackgroundField, ModeContext, WaveVector};
use crate::constraints::{constraint_matrix, ConstraintKind, ConstraintSpace};
use crate::error::{Error, Result};
use crate::field::{ModeField, OperatorMatrix};
use crate::fourier::{FourierSeries, TWO_PI};
use crate::linalg::{expm, hermitian_eigenvalues, op_norm, spectral_abscissa, CMatrix};
use crate::operators::{
    divergence_residual, full_induction_with, induction_parts, taylor_residual, Geostrophic,
};
use num_complex::Complex64;
use rayon::prelude::*;
use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;

pub const DRIFT_TOL: f64 = 1e-7;

/// Orthogonal projection onto the divergence-free, Taylor-constrained fields,
/// by a Lagrange-multiplier solve.
pub fn project_constraints(ctx: &ModeContext, b: &ModeField) -> ModeField {
    let m = b.truncation();
    let k = constraint_matrix(ctx, m, ConstraintKind::DivergenceAndTaylor);
    let v = b.to_vector();
    let gram = &k * k.adjoint();
    let multipliers = gram
        .lu()
        .solve(&(&k * &v))
        .expect("constraint rows are independent for a valid context");
    ModeField::from_vector(m, &(v - k.adjoint() * multipliers))
}

/// Largest of the scaled divergence and Taylor residuals, relative to `max(1, ‖b‖)`.
pub fn constraint_residuals(ctx: &ModeContext, b: &ModeField) -> (f64, f64) {
    (taylor_residual(ctx, b).norm(), divergence_residual(ctx, b))
}

/// Random field with `|b̂_n| ∝ (1+|n|)⁻²`, projected onto the constraints.
pub fn random_constrained<R: rand::Rng + ?Sized>(
    ctx: &ModeContext,
    trunc: usize,
    rng: &mut R,
) -> ModeField {
    project_constraints(ctx, &ModeField::random_decaying(trunc, rng))
}

pub struct ModePropagator {
    pub ctx: ModeContext,
    pub truncation: usize,
    pub generator: OperatorMatrix,
    pub constraints: ConstraintSpace,
    pub restricted_abscissa: f64,
    /// Largest eigenvalue of the Hermitian part of the generator.
    pub numerical_abscissa: f64,
    cache: HashMap<u64, CMatrix>,
}

pub fn build_propagator(ctx: &ModeContext, trunc: usize) -> Result<ModePropagator> {
    build_propagator_with(ctx, trunc, Geostrophic::Included)
}

pub fn build_propagator_with(
    ctx: &ModeContext,
    trunc: usize,
    geo: Geostrophic,
) -> Result<ModePropagator> {
    let generator = assemble_generator(ctx, trunc, geo);
    let constraints = ConstraintSpace::new(ctx, trunc, ConstraintKind::DivergenceAndTaylor)?;
    let restricted_abscissa = spectral_abscissa(&constraints.compress(&generator.entries))?;
    let numerical_abscissa = hermitian_eigenvalues(&generator.entries)
        .last()
        .copied()
        .unwrap_or(0.0);
    Ok(ModePropagator {
        ctx: ctx.clone(),
        truncation: trunc,
        generator,
        constraints,
        restricted_abscissa,
        numerical_abscissa,
        cache: HashMap::new(),
    })
}

pub fn assemble_generator(ctx: &ModeContext, trunc: usize, geo: Geostrophic) -> OperatorMatrix {
    OperatorMatrix::assemble("L", trunc, |b| full_induction_with(ctx, b, geo))
}

impl ModePropagator {
    pub fn unconstrained_abscissa(&self) -> Result<f64> {
        spectral_abscissa(&self.generator.entries)
    }

    /// `‖(Id − Π)GΠ‖` for the constraint projector `Π`.
    pub fn invariance_defect(&self) -> f64 {
        let n = &self.constraints.basis;
        let gn = &self.generator.entries * n;
        op_norm(&(&gn - n * (n.adjoint() * &gn)))
    }

    /// `exp(hG)`, cached per step size.
    pub fn exponential(&mut self, h: f64) -> Result<&CMatrix> {
        let key = h.to_bits();
        if !self.cache.contains_key(&key) {
            let e = expm(&self.generator.entries.scale(h))?;
            let bound = (h * self.numerical_abscissa).exp() * (1.0 + 1e-8);
            let nrm = op_norm(&e);
            if !(nrm <= bound) {
                return Err(Error::IllConditioned(format!(
                    "|exp(hG)| = {nrm:.6e} exceeds exp(h*omega) = {bound:.6e}"
                )));
            }
            self.cache.insert(key, e);
        }
        Ok(&self.cache[&key])
    }

    /// `b(t+h) = exp(hG) b(t)` for a constrained `b`.
    pub fn step(&mut self, b: &ModeField, h: f64) -> Result<ModeField> {
        let scale = 1.0f64.max(b.norm());
        let (taylor, divergence) = constraint_residuals(&self.ctx, b);
        if taylor > DRIFT_TOL * scale || divergence > DRIFT_TOL * scale {
            return Err(Error::ConstraintViolated { taylor, divergence });
        }
        let m = self.truncation;
        let v = b.resized(m).to_vector();
        let out = ModeField::from_vector(m, &(self.exponential(h)? * v));
        let (taylor, divergence) = constraint_residuals(&self.ctx, &out);
        if taylor > DRIFT_TOL * scale || divergence > DRIFT_TOL * scale {
            return Err(Error::ConstraintDrift { taylor, divergence });
        }
        Ok(out)
    }
}

/// Exact heat flow of the zero horizontal mode: `b̂_n ↦ e^{−4π²n²t} b̂_n`.
pub fn heat_zero_mode(b0: &[FourierSeries; 3], t: f64) -> Result<[FourierSeries; 3]> {
    if b0.iter().any(|c| !c.is_zero_mean()) {
        return Err(Error::InvalidInput(
            "zero-mode data must have zero vertical mean".into(),
        ));
    }
    let out = b0.clone().map(|c| {
        let m = c.truncation();
        let coeffs = c
            .modes()
            .map(|(n, a)| a * (-(TWO_PI * n as f64).powi(2) * t).exp())
            .collect();
        FourierSeries::from_coeffs(m, coeffs).expect("dense length")
    });
    Ok(out)
}

#[derive(Clone, Debug, PartialEq)]
pub struct AbscissaRow {
    pub wave: WaveVector,
    pub xi_norm: f64,
    pub restricted: f64,
    pub full: f64,
}

/// Spectral abscissas of the generator, restricted to the constraint subspace
/// and unrestricted, for each wavevector.
pub fn abscissa_sweep(
    bg: &BackgroundField,
    waves: &[WaveVector],
    trunc: usize,
    geo: Geostrophic,
) -> Result<Vec<AbscissaRow>> {
    waves
        .par_iter()
        .map(|&wave| {
            let ctx = ModeContext::new(bg, wave)?;
            let g = assemble_generator(&ctx, trunc, geo);
            let cs = ConstraintSpace::new(&ctx, trunc, ConstraintKind::DivergenceAndTaylor)?;
            Ok(AbscissaRow {
                wave,
                xi_norm: ctx.xi_norm,
                restricted: spectral_abscissa(&cs.compress(&g.entries))?,
                full: spectral_abscissa(&g.entries)?,
            })
        })
        .collect()
}

pub fn abscissa_csv(rows: &[AbscissaRow]) -> String {
    let mut out = String::from("xi_norm,abscissa_restricted,abscissa_full\n");
    for r in rows {
        let _ = writeln!(
            out,
            "{:.10e},{:.10e},{:.10e}",
            r.xi_norm, r.restricted, r.full
        );
    }
    out
}

/// Per-mode energy `‖b‖²`, gradient energy `|ξ|²‖b‖² + ‖∂₃b‖²`, residuals and
/// the mode-wise induction power `Re⟨curl(u×B), b⟩`.
#[derive(Clone, Debug, PartialEq)]
pub struct DiagnosticsRow {
    pub t: f64,
    pub mode_index: usize,
    pub energy: f64,
    pub grad_energy: f64,
    pub taylor_res: f64,
    pub div_res: f64,
    pub induction_power: f64,
}

pub fn mode_diagnostics(
    ctx: &ModeContext,
    b: &ModeField,
    t: f64,
    mode_index: usize,
) -> DiagnosticsRow {
    let (taylor_res, div_res) = constraint_residuals(ctx, b);
    let p = induction_parts(ctx, b, Geostrophic::Included);
    let power = p.ind_m.add(&p.ind_g).inner(b).re;
    DiagnosticsRow {
        t,
        mode_index,
        energy: b.norm_sqr(),
        grad_energy: ctx.xi_norm.powi(2) * b.norm_sqr() + b.d3().norm_sqr(),
        taylor_res,
        div_res,
        induction_power: power,
    }
}

fn zero_mode_diagnostics(z: &[FourierSeries; 3], t: f64) -> DiagnosticsRow {
    let energy = z.iter().map(FourierSeries::norm_sqr).sum();
    let grad_energy = z.iter().map(|c| c.derivative().norm_sqr()).sum();
    DiagnosticsRow {
        t,
        mode_index: 0,
        energy,
        grad_energy,
        taylor_res: 0.0,
        div_res: z[2].norm(),
        induction_power: 0.0,
    }
}

#[derive(Clone, Debug)]
pub struct SimulationState {
    pub time: f64,
    pub modes: BTreeMap<WaveVector, ModeField>,
    pub zero_mode: [FourierSeries; 3],
    pub log: Vec<DiagnosticsRow>,
}

impl SimulationState {
    pub fn energy(&self) -> f64 {
        self.modes.values().map(ModeField::norm_sqr).sum::<f64>()
            + self
                .zero_mode
                .iter()
                .map(FourierSeries::norm_sqr)
                .sum::<f64>()
    }

    pub fn diagnostics_csv(&self) -> String {
        let mut out =
            String::from("t,mode_index,energy,grad_energy,taylor_res,div_res,induction_power\n");
        for r in &self.log {
            let _ = writeln!(
                out,
                "{:.6},{},{:.10e},{:.10e},{:.3e},{:.3e},{:.10e}",
                r.t,
                r.mode_index,
                r.energy,
                r.grad_energy,
                r.taylor_res,
                r.div_res,
                r.induction_power
            );
        }
        out
    }

    /// `Σ_ξ e^{iξ·x_h} b̂(ξ, x₃)` plus the zero mode, at one point.
    pub fn eval(&self, x: [f64; 3]) -> [Complex64; 3] {
        let mut out = std::array::from_fn(|i| self.zero_mode[i].eval(x[2]));
        for (w, b) in &self.modes {
            let [k1, k2] = w.xi();
            let phase = Complex64::from_polar(1.0, k1 * x[0] + k2 * x[1]);
            for (i, o) in out.iter_mut().enumerate() {
                *o += phase * b.comp(i).eval(x[2]);
            }
        }
        out
    }

    /// Divergence `Σ_ξ e^{iξ·x_h}(iξ·b̂_h + ∂₃b̂₃)` plus `∂₃` of the zero mode.
    pub fn divergence_at(&self, x: [f64; 3]) -> Complex64 {
        let mut out = self.zero_mode[2].derivative().eval(x[2]);
        for (w, b) in &self.modes {
            let [k1, k2] = w.xi();
            let phase = Complex64::from_polar(1.0, k1 * x[0] + k2 * x[1]);
            let d = Complex64::new(0.0, k1) * b.comp(0).eval(x[2])
                + Complex64::new(0.0, k2) * b.comp(1).eval(x[2])
                + b.comp(2).derivative().eval(x[2]);
            out += phase * d;
        }
        out
    }

    /// Whether `b̂(−ξ) = conj(b̂(ξ))` for every stored mode.
    pub fn is_conjugate_symmetric(&self, tol: f64) -> bool {
        self.modes
            .iter()
            .all(|(w, b)| match self.modes.get(&w.neg()) {
                Some(p) => b.sub(&p.map(FourierSeries::conj)).norm() <= tol * (1.0 + b.norm()),
                None => false,
            })
            && self.zero_mode.iter().all(|c| c.is_real(tol))
    }
}

/// Physical-space samples on a uniform `n1 × n2 × n3` grid, `x₃` fastest.
#[derive(Clone, Debug)]
pub struct Snapshot {
    pub dims: [usize; 3],
    pub values: Vec<[f64; 3]>,
    pub max_imag: f64,
    pub max_divergence: f64,
    pub conjugate_symmetric: bool,
}

impl Snapshot {
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "dims": self.dims,
            "order": "x1, x2, x3 with x3 fastest",
            "max_imag": self.max_imag,
            "max_divergence": self.max_divergence,
            "conjugate_symmetric": self.conjugate_symmetric,
            "values": self.values,
        })
    }
}

pub fn assemble_full_field(state: &SimulationState, dims: [usize; 3]) -> Snapshot {
    let conjugate_symmetric = state.is_conjugate_symmetric(1e-12);
    if !conjugate_symmetric {
        log::warn!("mode set is not conjugate-symmetric; the assembled field is complex");
    }
    let points: Vec<[f64; 3]> = (0..dims[0])
        .flat_map(|i| (0..dims[1]).flat_map(move |j| (0..dims[2]).map(move |k| (i, j, k))))
        .map(|(i, j, k)| {
            [
                i as f64 / dims[0] as f64,
                j as f64 / dims[1] as f64,
                k as f64 / dims[2] as f64,
            ]
        })
        .collect();
    let samples: Vec<([Complex64; 3], Complex64)> = points
        .par_iter()
        .map(|&x| (state.eval(x), state.divergence_at(x)))
        .collect();
    let max_imag = samples
        .iter()
        .flat_map(|(v, _)| v.iter().map(|z| z.im.abs()))
        .fold(0.0, f64::max);
    let max_divergence = samples.iter().map(|(_, d)| d.norm()).fold(0.0, f64::max);
    Snapshot {
        dims,
        values: samples.iter().map(|(v, _)| v.map(|z| z.re)).collect(),
        max_imag,
        max_divergence,
        conjugate_symmetric,
    }
}

/// Independent per-mode propagators advancing a [`SimulationState`].
pub struct Simulation {
    pub propagators: Vec<ModePropagator>,
    pub state: SimulationState,
    initial_zero_mode: [FourierSeries; 3],
}

impl Simulation {
    /// `initial` pairs each wavevector with constrained data.
    pub fn new(
        bg: &BackgroundField,
        trunc: usize,
        initial: Vec<(WaveVector, ModeField)>,
        zero_mode: [FourierSeries; 3],
    ) -> Result<Self> {
        heat_zero_mode(&zero_mode, 0.0)?;
        let propagators = initial
            .par_iter()
            .map(|(w, _)| build_propagator(&ModeContext::new(bg, *w)?, trunc))
            .collect::<Result<Vec<_>>>()?;
        let modes = initial.into_iter().collect();
        let mut sim = Self {
            propagators,
            state: SimulationState {
                time: 0.0,
                modes,
                zero_mode: zero_mode.clone(),
                log: Vec::new(),
            },
            initial_zero_mode: zero_mode,
        };
        sim.record();
        Ok(sim)
    }

    fn record(&mut self) {
        let t = self.state.time;
        self.state
            .log
            .push(zero_mode_diagnostics(&self.state.zero_mode, t));
        for (i, p) in self.propagators.iter().enumerate() {
            let b = &self.state.modes[&p.ctx.wave];
            self.state.log.push(mode_diagnostics(&p.ctx, b, t, i + 1));
        }
    }

    /// Advances every mode by `h` and logs diagnostics.
    pub fn advance(&mut self, h: f64) -> Result<()> {
        let modes = &self.state.modes;
        let updated = self
            .propagators
            .par_iter_mut()
            .map(|p| {
                let b = &modes[&p.ctx.wave];
                Ok((p.ctx.wave, p.step(b, h)?))
            })
            .collect::<Result<Vec<_>>>()?;
        for (w, b) in updated {
            self.state.modes.insert(w, b);
        }
        self.state.time += h;
        self.state.zero_mode = heat_zero_mode(&self.initial_zero_mode, self.state.time)?;
        self.record();
        Ok(())
    }
}
