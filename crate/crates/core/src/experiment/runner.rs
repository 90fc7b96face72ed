use super::config::{eps_mode, ExperimentKind, InitialData, RunConfig};
use super::{fingerprint, Check, ExperimentError, Output, RunReport, SCHEMA_VERSION};
use crate::background::{BackgroundField, BackgroundTerm, ModeContext, WaveVector};
use crate::constraints::{ConstraintKind, ConstraintSpace};
use crate::evolution::{
    abscissa_csv, abscissa_sweep, assemble_full_field, build_propagator, random_constrained,
    Simulation,
};
use crate::field::{ModeField, OperatorMatrix};
use crate::fourier::{FourierSeries, TWO_PI};
use crate::linalg::{eigenvalues, hermitian_eigh, hermitian_radius, op_norm, CMatrix, CVector};
use crate::normal_form::build_q;
use crate::operators::{
    diffusion, divergence_residual, full_induction, op_a, op_am, op_c, op_cm, op_r, proj_e0,
    proj_e0_via_taylor, proj_eta, proj_eta_perp, taylor_residual, Geostrophic,
};
use crate::spectral::{
    apply_d, assemble_d, band_indices, build_basis, d3_band_norm, verify_a_on_basis, GapStudy,
};
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::json;
use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::path::Path;

type Checks = Result<Vec<Check>, ExperimentError>;

/// Runs one experiment, writing artifacts and `report.json` into `out_dir`.
///
/// Failing checks are reported, not returned as errors; see
/// [`RunReport::into_result`].
pub fn run(cfg: &RunConfig, out_dir: &Path) -> Result<RunReport, ExperimentError> {
    cfg.validate()?;
    let bg = cfg.background_field()?;
    let mut out = Output::new(out_dir)?;
    let checks = match cfg.kind {
        ExperimentKind::SpectralCheck => spectral_check(cfg, &bg, &mut out),
        ExperimentKind::NormalformCheck => normalform_check(cfg, &bg, &mut out),
        ExperimentKind::ConstraintCheck => constraint_check(cfg, &bg, &mut out),
        ExperimentKind::Evolve => evolve(cfg, &bg, &mut out),
        ExperimentKind::AbscissaSweep => abscissa(cfg, &bg, &mut out),
        ExperimentKind::ScalingStudy => scaling_study(cfg, &bg, &mut out),
    }?;
    let mut report = RunReport {
        schema_version: SCHEMA_VERSION,
        kind: cfg.kind,
        seed: cfg.seed,
        passed: false,
        checks,
        fingerprint: fingerprint(cfg),
        artifacts: out.artifacts,
    };
    report.artifacts.push("report.json".into());
    report.passed = report.failing().is_empty();
    let mut text = serde_json::to_string_pretty(&report).expect("report serializes");
    text.push('\n');
    std::fs::write(out_dir.join("report.json"), text)?;
    log::info!(
        "{}: {} checks, passed = {}",
        cfg.kind.name(),
        report.checks.len(),
        report.passed
    );
    Ok(report)
}

fn tag(w: WaveVector) -> String {
    format!("{}_{}", w.0, w.1)
}

fn mode_rng(seed: u64, index: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index as u64);
    rng
}

/// Least-squares slope of `ln y` against `ln x`.
pub(crate) fn loglog_slope(points: &[(f64, f64)]) -> f64 {
    let n = points.len() as f64;
    let lx: Vec<f64> = points.iter().map(|p| p.0.ln()).collect();
    let ly: Vec<f64> = points.iter().map(|p| p.1.ln()).collect();
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = lx.iter().map(|x| (x - mx).powi(2)).sum();
    sxy / sxx
}

fn series_vector(f: &FourierSeries, trunc: usize) -> CVector {
    CVector::from_column_slice(f.resized(trunc).coeffs())
}

struct SpectralMode {
    wave: WaveVector,
    eig_err: f64,
    vec_err: f64,
    a_residual: f64,
    gram_defect: f64,
    a_skew: f64,
    cm_herm: f64,
    pam: f64,
    commute: f64,
    mu1_err: Option<f64>,
    csv: String,
    basis: serde_json::Value,
}

fn spectral_mode(
    bg: &BackgroundField,
    wave: WaveVector,
    m: usize,
    k_max: usize,
    canonical: bool,
) -> crate::Result<SpectralMode> {
    let ctx = ModeContext::new(bg, wave)?;
    let basis = build_basis(&ctx, k_max, m)?;
    let d = assemble_d(&ctx, m).entries;
    let eigs = eigenvalues(&d)?;
    let (vals, vecs) = hermitian_eigh(&d.map(|z| z * Complex64::i()));
    let mut csv = String::from(
        "k,mu_re,mu_im,numerical_re,numerical_im,eigenvalue_rel_err,eigenvector_l2_err\n",
    );
    let (mut eig_err, mut vec_err) = (0.0f64, 0.0f64);
    let k = k_max as i64;
    for kk in (-k..=k).filter(|&kk| kk != 0) {
        let mu = basis.mu(kk).expect("k != 0");
        let nearest = eigs
            .iter()
            .copied()
            .min_by(|a, b| (a - mu).norm().total_cmp(&(b - mu).norm()))
            .expect("nonempty spectrum");
        let rel = (nearest - mu).norm() / mu.norm();
        let target = (Complex64::i() * mu).re;
        let idx = (0..vals.len())
            .min_by(|&a, &b| {
                (vals[a] - target)
                    .abs()
                    .total_cmp(&(vals[b] - target).abs())
            })
            .expect("nonempty spectrum");
        let v = vecs.column(idx);
        let e = series_vector(basis.e(kk), m);
        let overlap = v.dotc(&e);
        let phase = if overlap.norm() > 0.0 {
            overlap / overlap.norm()
        } else {
            Complex64::new(1.0, 0.0)
        };
        let verr = (&e - v * phase).norm();
        eig_err = eig_err.max(rel);
        vec_err = vec_err.max(verr);
        let _ = writeln!(
            csv,
            "{kk},{:.15e},{:.15e},{:.15e},{:.15e},{rel:.3e},{verr:.3e}",
            mu.re, mu.im, nearest.re, nearest.im
        );
    }
    let a = OperatorMatrix::assemble("A", m, |b| op_a(&ctx, b));
    let cm = OperatorMatrix::assemble("C_m", m, |b| op_cm(&ctx, b));
    let am = OperatorMatrix::assemble("A_m", m, |b| op_am(&ctx, b)).entries;
    let pe = OperatorMatrix::assemble("Pi_e0", m, |b| proj_e0(&ctx, b)).entries;
    let pn = OperatorMatrix::assemble("Pi_eta", m, |b| proj_eta(&ctx, b)).entries;
    let mu1_err = (canonical && wave.1 == 0).then(|| {
        let want = Complex64::new(0.0, -1.0 / (2.0 * TWO_PI));
        (basis.mu(1).expect("k = 1") - want).norm() / want.norm()
    });
    Ok(SpectralMode {
        wave,
        eig_err,
        vec_err,
        a_residual: verify_a_on_basis(&ctx, &basis).max_residual,
        gram_defect: basis.gram_defect(),
        a_skew: a.anti_hermitian_defect(),
        cm_herm: cm.hermitian_defect(),
        pam: op_norm(&(&pe * &am * &pe)),
        commute: op_norm(&(&pe * &pn - &pn * &pe)),
        mu1_err,
        csv,
        basis: basis.to_json(),
    })
}

fn spectral_check(cfg: &RunConfig, bg: &BackgroundField, out: &mut Output) -> Checks {
    let tol = &cfg.tolerances;
    let canonical = cfg.background
        == [
            BackgroundTerm::cos(1, 1, 1.0),
            BackgroundTerm::sin(2, 1, 1.0),
        ];
    let modes = cfg
        .waves()
        .par_iter()
        .map(|&w| spectral_mode(bg, w, cfg.truncation, cfg.basis_size(), canonical))
        .collect::<crate::Result<Vec<_>>>()?;
    let mut checks = Vec::new();
    for r in modes {
        let t = tag(r.wave);
        checks.push(Check::at_most(
            format!("eigenvalue_match[{t}]"),
            r.eig_err,
            tol.eigenvalue_rel,
        ));
        checks.push(Check::at_most(
            format!("eigenvector_match[{t}]"),
            r.vec_err,
            tol.eigenvector_l2,
        ));
        checks.push(Check::at_most(
            format!("a_eigen_relation[{t}]"),
            r.a_residual,
            tol.eigenvalue_rel,
        ));
        checks.push(Check::at_most(
            format!("basis_orthonormality[{t}]"),
            r.gram_defect,
            tol.eigenvalue_rel,
        ));
        checks.push(Check::at_most(
            format!("a_anti_hermitian[{t}]"),
            r.a_skew,
            tol.structure,
        ));
        checks.push(Check::at_most(
            format!("cm_hermitian[{t}]"),
            r.cm_herm,
            tol.structure,
        ));
        checks.push(Check::at_most(
            format!("pi_e0_am_pi_e0[{t}]"),
            r.pam,
            tol.structure,
        ));
        checks.push(Check::at_most(
            format!("pi_e0_pi_eta_commute[{t}]"),
            r.commute,
            tol.structure,
        ));
        if let Some(e) = r.mu1_err {
            checks.push(Check::at_most(
                format!("mu1_closed_form[{t}]"),
                e,
                tol.eigenvalue_rel,
            ));
        }
        out.write(&format!("spectrum_{t}.csv"), &r.csv)?;
        out.write_json(&format!("basis_{t}.json"), &r.basis)?;
    }
    Ok(checks)
}

/// Resonant pairs required by the eigenvalue labels: the diagonal and
/// `(2k, −2k+1)` in both orders.
pub(crate) fn expected_resonances(n: usize) -> BTreeSet<(i64, i64)> {
    let idx = band_indices(n);
    let mut set: BTreeSet<(i64, i64)> = idx.iter().map(|&j| (j, j)).collect();
    let n = n as i64;
    for k in -n..=n {
        set.insert((2 * k, 1 - 2 * k));
        set.insert((1 - 2 * k, 2 * k));
    }
    set
}

fn normalform_check(cfg: &RunConfig, bg: &BackgroundField, out: &mut Output) -> Checks {
    let tol = &cfg.tolerances;
    let n = cfg.band;
    let results = cfg
        .waves()
        .par_iter()
        .map(|&w| {
            let ctx = ModeContext::new(bg, w)?;
            let basis = build_basis(&ctx, cfg.basis_size().max(n), cfg.truncation)?;
            Ok((w, build_q(&ctx, &basis, n, f64::INFINITY)?))
        })
        .collect::<crate::Result<Vec<_>>>()?;
    let expected = expected_resonances(n);
    let mut checks = Vec::new();
    for (w, nf) in results {
        let t = tag(w);
        let found: BTreeSet<(i64, i64)> = nf.resonances.iter().map(|r| (r.i, r.j)).collect();
        let missing = expected.difference(&found).count() + found.difference(&expected).count();
        checks.push(Check::at_most(
            format!("resonance_rhs[{t}]"),
            nf.max_resonance_residual(),
            tol.resonance,
        ));
        checks.push(Check::at_most(
            format!("resonance_set[{t}]"),
            missing as f64,
            0.0,
        ));
        checks.push(Check::at_most(
            format!("commutator_identity[{t}]"),
            nf.commutator_residual,
            tol.commutator,
        ));
        checks
            .push(Check::at_most(format!("q_norm[{t}]"), nf.q_norm, f64::INFINITY).informational());
        out.write_json(&format!("normal_form_{t}.json"), &nf.to_json())?;
        out.write(&format!("resonances_{t}.csv"), &nf.resonance_csv())?;
    }
    Ok(checks)
}

struct ConstraintMode {
    wave: WaveVector,
    taylor_formula: f64,
    projection: f64,
    invariance: f64,
    oracle: Vec<(&'static str, f64)>,
    decomposition: f64,
}

type Op<'a> = Box<dyn Fn(&ModeField) -> ModeField + Sync + 'a>;

fn constraint_mode(
    bg: &BackgroundField,
    w: WaveVector,
    cfg: &RunConfig,
    index: usize,
) -> crate::Result<ConstraintMode> {
    let ctx = ModeContext::new(bg, w)?;
    let m = cfg.truncation;
    let mut rng = mode_rng(cfg.seed, index);
    let mut taylor_formula = 0.0f64;
    let mut projection = 0.0f64;
    for _ in 0..cfg.samples {
        let b = random_constrained(&ctx, m, &mut rng);
        let scale = b.norm().max(1.0);
        let direct = proj_e0(&ctx, &b);
        let formula = proj_e0_via_taylor(&ctx, &b)?;
        taylor_formula = taylor_formula.max(direct.sub(&formula).norm() / scale);
        let residual = taylor_residual(&ctx, &b)
            .norm()
            .max(divergence_residual(&ctx, &b));
        projection = projection.max(residual / scale);
    }

    let ops: Vec<(&'static str, Op)> = vec![
        ("A_m", Box::new(|b: &ModeField| op_am(&ctx, b))),
        ("C_m", Box::new(|b: &ModeField| op_cm(&ctx, b))),
        ("A", Box::new(|b: &ModeField| op_a(&ctx, b))),
        ("C", Box::new(|b: &ModeField| op_c(&ctx, b))),
        ("R", Box::new(|b: &ModeField| op_r(&ctx, b))),
        ("L", Box::new(|b: &ModeField| full_induction(&ctx, b))),
        ("diffusion", Box::new(|b: &ModeField| diffusion(&ctx, b))),
        ("Pi_e0", Box::new(|b: &ModeField| proj_e0(&ctx, b))),
        ("Pi_eta", Box::new(|b: &ModeField| proj_eta(&ctx, b))),
        (
            "Pi_eta_perp",
            Box::new(|b: &ModeField| proj_eta_perp(&ctx, b)),
        ),
    ];
    let fields: Vec<ModeField> = (0..cfg.samples)
        .map(|_| ModeField::random_decaying(m, &mut rng))
        .collect();
    let mut oracle: Vec<(&'static str, f64)> = ops
        .iter()
        .map(|(name, op)| {
            let mat = OperatorMatrix::assemble(name, m, op);
            let err = fields
                .iter()
                .map(|b| {
                    let want = op(b).resized(m);
                    mat.apply(b).sub(&want).norm() / want.norm().max(1.0)
                })
                .fold(0.0, f64::max);
            (*name, err)
        })
        .collect();
    let d = assemble_d(&ctx, m);
    let d_err = fields
        .iter()
        .map(|b| {
            let want = apply_d(&ctx, b.comp(0)).resized(m);
            d.apply_scalar(b.comp(0))
                .checked_sub(&want)
                .expect("same truncation")
                .norm()
                / want.norm().max(1.0)
        })
        .fold(0.0, f64::max);
    oracle.push(("D", d_err));

    let eps = ctx.eps;
    let decomposition = fields
        .iter()
        .map(|b| {
            let l = full_induction(&ctx, b)
                .sub(&diffusion(&ctx, b))
                .scale_re(eps.powi(3));
            let a = op_a(&ctx, b);
            let c = op_c(&ctx, b).scale_re(eps);
            let r = op_r(&ctx, b).scale_re(eps);
            let scale = [l.norm(), a.norm(), c.norm(), b.norm(), 1.0]
                .into_iter()
                .fold(0.0, f64::max);
            l.sub(&a.add(&c).add(&r)).norm() / scale
        })
        .fold(0.0, f64::max);

    let invariance = build_propagator(&ctx, m)?.invariance_defect();
    Ok(ConstraintMode {
        wave: w,
        taylor_formula,
        projection,
        invariance,
        oracle,
        decomposition,
    })
}

fn constraint_check(cfg: &RunConfig, bg: &BackgroundField, out: &mut Output) -> Checks {
    let tol = &cfg.tolerances;
    let waves = cfg.waves();
    let results = waves
        .par_iter()
        .enumerate()
        .map(|(i, &w)| constraint_mode(bg, w, cfg, i))
        .collect::<crate::Result<Vec<_>>>()?;
    let mut checks = Vec::new();
    let mut csv = String::from("mode,quantity,value\n");
    for r in results {
        let t = tag(r.wave);
        checks.push(Check::at_most(
            format!("taylor_projection_formula[{t}]"),
            r.taylor_formula,
            tol.taylor_formula,
        ));
        checks.push(Check::at_most(
            format!("projected_residuals[{t}]"),
            r.projection,
            tol.structure,
        ));
        checks.push(Check::at_most(
            format!("constraint_invariance[{t}]"),
            r.invariance,
            tol.invariance,
        ));
        for (name, err) in &r.oracle {
            checks.push(Check::at_most(
                format!("oracle_{name}[{t}]"),
                *err,
                tol.oracle,
            ));
            let _ = writeln!(csv, "{t},oracle_{name},{err:.6e}");
        }
        checks.push(Check::at_most(
            format!("decomposition[{t}]"),
            r.decomposition,
            tol.decomposition,
        ));
        let _ = writeln!(
            csv,
            "{t},taylor_projection_formula,{:.6e}",
            r.taylor_formula
        );
        let _ = writeln!(csv, "{t},projected_residuals,{:.6e}", r.projection);
        let _ = writeln!(csv, "{t},constraint_invariance,{:.6e}", r.invariance);
        let _ = writeln!(csv, "{t},decomposition,{:.6e}", r.decomposition);
    }
    out.write("constraint_residuals.csv", &csv)?;
    Ok(checks)
}

fn random_zero_mode(trunc: usize, rng: &mut ChaCha8Rng) -> [FourierSeries; 3] {
    let raw = ModeField::random_decaying(trunc, rng);
    let real = |c: &FourierSeries| c.widening_add(&c.conj()).scale_re(0.5).mean_removed();
    [
        real(raw.comp(0)),
        real(raw.comp(1)),
        FourierSeries::zeros(trunc),
    ]
}

fn evolve(cfg: &RunConfig, bg: &BackgroundField, out: &mut Output) -> Checks {
    let tol = &cfg.tolerances;
    let m = cfg.truncation;
    let mut rng = mode_rng(cfg.seed, 0);
    let mut initial: Vec<(WaveVector, ModeField)> = Vec::new();
    for w in cfg.waves() {
        if initial.iter().any(|(v, _)| *v == w) {
            continue;
        }
        let b = match cfg.initial {
            InitialData::Random => random_constrained(&ModeContext::new(bg, w)?, m, &mut rng),
            InitialData::Zero => ModeField::zeros(m),
        };
        if cfg.conjugate_pairs && !cfg.waves().contains(&w.neg()) {
            initial.push((w.neg(), b.map(FourierSeries::conj)));
        }
        initial.push((w, b));
    }
    let zero = match cfg.initial {
        InitialData::Random => random_zero_mode(m, &mut rng),
        InitialData::Zero => std::array::from_fn(|_| FourierSeries::zeros(m)),
    };
    let first = initial[0].clone();
    let mut sim = Simulation::new(bg, m, initial, zero.clone())?;
    let (steps, h) = cfg.time_grid();
    for _ in 0..steps {
        sim.advance(h)?;
    }

    let mut checks = Vec::new();
    let log = &sim.state.log;
    let max_res = |f: fn(&crate::evolution::DiagnosticsRow) -> f64| {
        log.iter()
            .filter(|r| r.mode_index > 0)
            .map(f)
            .fold(0.0, f64::max)
    };
    checks.push(Check::at_most(
        "taylor_residual_max",
        max_res(|r| r.taylor_res),
        tol.constraint,
    ));
    checks.push(Check::at_most(
        "divergence_residual_max",
        max_res(|r| r.div_res),
        tol.constraint,
    ));

    let p = &mut sim.propagators[0];
    let half = p.step(&first.1, h)?;
    let twice = p.step(&half, h)?;
    let once = p.step(&first.1, 2.0 * h)?;
    let semigroup = if first.1.norm() > 0.0 {
        twice.sub(&once).norm() / first.1.norm()
    } else {
        twice.sub(&once).norm()
    };
    checks.push(Check::at_most(
        "semigroup_composition",
        semigroup,
        tol.semigroup,
    ));

    let mut bound_ratio = 0.0f64;
    for (i, p) in sim.propagators.iter().enumerate() {
        let rate = p.restricted_abscissa.max(0.0);
        let rows: Vec<_> = log.iter().filter(|r| r.mode_index == i + 1).collect();
        let e0 = rows[0].energy;
        for r in &rows {
            let bound = e0 * (2.0 * rate * r.t).exp();
            if r.energy > 0.0 {
                bound_ratio = bound_ratio.max(r.energy / bound);
            }
        }
    }
    checks.push(Check::at_most("energy_bound", bound_ratio, 1.0 + 1e-9));

    let t_end = sim.state.time;
    let c0 = zero[0].coeff(1);
    if c0.norm() > 0.0 {
        let ct = sim.state.zero_mode[0].coeff(1);
        let rate = -(ct.norm() / c0.norm()).ln() / t_end;
        let want = TWO_PI * TWO_PI;
        checks.push(Check::at_most(
            "zero_mode_decay_rate",
            (rate - want).abs() / want,
            tol.decay_rate_rel,
        ));
    }
    if cfg.initial == InitialData::Zero {
        let max_energy = log.iter().map(|r| r.energy).fold(0.0, f64::max);
        checks.push(Check::at_most("zero_data_stays_zero", max_energy, 0.0));
    }

    let snapshot = assemble_full_field(&sim.state, [8, 8, 16]);
    checks.push(Check::at_most(
        "grid_divergence",
        snapshot.max_divergence,
        tol.grid_divergence,
    ));
    if cfg.conjugate_pairs {
        checks.push(Check::at_most(
            "real_field",
            snapshot.max_imag,
            tol.grid_divergence,
        ));
    }
    out.write("diagnostics.csv", &sim.state.diagnostics_csv())?;
    out.write_json("snapshot.json", &snapshot.to_json())?;
    let summary = sim
        .propagators
        .iter()
        .map(|p| json!({"mode": [p.ctx.wave.0, p.ctx.wave.1], "restricted_abscissa": p.restricted_abscissa}))
        .collect::<Vec<_>>();
    out.write_json(
        "propagators.json",
        &json!({ "t_final": t_end, "steps": steps, "modes": summary }),
    )?;
    out.plots()?;
    Ok(checks)
}

/// Largest value after the first two entries against the first two, with
/// relative slack.
pub(crate) fn trend_check(name: &str, values: &[f64], slack: f64) -> Check {
    let reference = values[..2]
        .iter()
        .copied()
        .fold(f64::NEG_INFINITY, f64::max);
    let rest = values[2..]
        .iter()
        .copied()
        .fold(f64::NEG_INFINITY, f64::max);
    Check::at_most(name, rest, reference + slack * reference.abs())
}

fn abscissa(cfg: &RunConfig, bg: &BackgroundField, out: &mut Output) -> Checks {
    let waves = cfg.waves();
    let rows = abscissa_sweep(bg, &waves, cfg.truncation, Geostrophic::Included)?;
    let restricted: Vec<f64> = rows.iter().map(|r| r.restricted).collect();
    let mut checks = vec![trend_check(
        "abscissa_no_upward_trend",
        &restricted,
        cfg.tolerances.trend_slack,
    )];
    out.write("abscissa.csv", &abscissa_csv(&rows))?;
    if cfg.geostrophic_demo {
        let demo = abscissa_sweep(bg, &waves, cfg.truncation, Geostrophic::Disabled)?;
        let values: Vec<f64> = demo.iter().map(|r| r.restricted).collect();
        checks.push(
            trend_check(
                "abscissa_no_upward_trend_without_geostrophic",
                &values,
                cfg.tolerances.trend_slack,
            )
            .informational(),
        );
        out.write("abscissa_no_geostrophic.csv", &abscissa_csv(&demo))?;
    }
    out.plots()?;
    Ok(checks)
}

/// Scaled sizes of the remainder, the constraint term and `S` on constrained fields.
pub(crate) struct EpsPoint {
    pub eps: f64,
    pub r_ratio: f64,
    pub c2: f64,
    pub s_ratio: f64,
}

pub(crate) fn eps_point(
    bg: &BackgroundField,
    eps: f64,
    m: usize,
) -> Result<EpsPoint, ExperimentError> {
    let ctx = ModeContext::new(bg, eps_mode(eps)?)?;
    let eps = ctx.eps;
    let cs = ConstraintSpace::new(&ctx, m, ConstraintKind::DivergenceAndTaylor)?;
    let div = ConstraintSpace::new(&ctx, m, ConstraintKind::Divergence)?;
    let r = OperatorMatrix::assemble("R", m, |b| op_r(&ctx, b)).entries;
    let c = OperatorMatrix::assemble("C", m, |b| op_c(&ctx, b)).entries;
    let perp = OperatorMatrix::assemble("Pi_eta_perp", m, |b| proj_eta_perp(&ctx, b)).entries;
    let s = OperatorMatrix::assemble("S", m, |b| proj_e0(&ctx, &op_cm(&ctx, &proj_e0(&ctx, b))))
        .entries;
    let c2: CMatrix = &c - &perp * &c * &perp;
    Ok(EpsPoint {
        eps,
        r_ratio: hermitian_radius(&cs.compress(&r)) / eps,
        c2: op_norm(&div.compress(&c2)),
        s_ratio: hermitian_radius(&cs.compress(&s)) / eps,
    })
}

fn scaling_study(cfg: &RunConfig, bg: &BackgroundField, out: &mut Output) -> Checks {
    let tol = &cfg.tolerances;
    let mut checks = Vec::new();
    if cfg.eps_sweep.len() >= 2 {
        let mut eps = cfg.eps_sweep.clone();
        eps.sort_by(|a, b| b.total_cmp(a));
        let points = eps
            .par_iter()
            .map(|&e| eps_point(bg, e, cfg.truncation))
            .collect::<Result<Vec<_>, _>>()?;
        let bounded = |name: &str, values: Vec<f64>| {
            let threshold = ((1.0 + tol.trend_slack) * values[0]).max(tol.structure);
            let worst = values[1..]
                .iter()
                .copied()
                .fold(f64::NEG_INFINITY, f64::max);
            Check::at_most(name, worst, threshold)
        };
        checks.push(bounded(
            "remainder_bounded",
            points.iter().map(|p| p.r_ratio).collect(),
        ));
        checks.push(bounded(
            "s_term_bounded",
            points.iter().map(|p| p.s_ratio).collect(),
        ));
        let slope = loglog_slope(&points.iter().map(|p| (p.eps, p.c2)).collect::<Vec<_>>());
        checks.push(Check::at_least("c2_loglog_slope", slope, tol.c2_slope_min));
        let mut csv = String::from("eps,r_ratio,c2,s_ratio\n");
        for p in &points {
            let _ = writeln!(
                csv,
                "{:.10e},{:.10e},{:.10e},{:.10e}",
                p.eps, p.r_ratio, p.c2, p.s_ratio
            );
        }
        out.write("eps_scaling.csv", &csv)?;
    }
    let wave = cfg.waves()[0];
    let ctx = ModeContext::new(bg, wave)?;
    if cfg.band_sweep.len() >= 2 {
        let nmax = *cfg.band_sweep.iter().max().expect("nonempty");
        let basis = build_basis(&ctx, nmax, cfg.truncation)?;
        let norms = cfg
            .band_sweep
            .par_iter()
            .map(|&n| Ok((n as f64, d3_band_norm(&basis, n)?)))
            .collect::<crate::Result<Vec<_>>>()?;
        let slope = loglog_slope(&norms);
        checks.push(Check::at_least(
            "d3_band_slope_min",
            slope,
            tol.d3_slope_min,
        ));
        checks.push(Check::at_most("d3_band_slope_max", slope, tol.d3_slope_max));
        let mut csv = String::from("n,d3_norm\n");
        for (n, v) in &norms {
            let _ = writeln!(csv, "{n},{v:.10e}");
        }
        out.write("band_scaling.csv", &csv)?;
    }
    if cfg.gap_sweep.len() >= 2 {
        let nmax = *cfg.gap_sweep.iter().max().expect("nonempty");
        let basis = build_basis(&ctx, nmax, cfg.truncation)?;
        let study = GapStudy::new(&ctx, &basis)?;
        let gaps = cfg
            .gap_sweep
            .par_iter()
            .map(|&n| study.gap(n))
            .collect::<crate::Result<Vec<_>>>()?;
        let first = gaps[0];
        let last = *gaps.last().expect("nonempty");
        checks.push(Check::at_most(
            "high_mode_gap_decay",
            last,
            (first / tol.gap_ratio).max(tol.structure),
        ));
        let mut csv = String::from("n,gap\n");
        for (n, g) in cfg.gap_sweep.iter().zip(&gaps) {
            let _ = writeln!(csv, "{n},{g:.10e}");
        }
        out.write("gap_scaling.csv", &csv)?;
    }
    out.plots()?;
    Ok(checks)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn slope_of_power_law() {
        let pts: Vec<(f64, f64)> = [1.0, 2.0, 4.0, 8.0]
            .iter()
            .map(|&x: &f64| (x, 3.0 * x.powf(1.5)))
            .collect();
        assert!((loglog_slope(&pts) - 1.5).abs() < 1e-12);
    }

    #[test]
    fn resonance_set_for_one_band() {
        let set = expected_resonances(1);
        assert!(set.contains(&(0, 1)) && set.contains(&(2, -1)) && set.contains(&(-2, 3)));
        assert_eq!(set.len(), 6 + 6);
    }

    #[test]
    fn trend_rule() {
        assert!(trend_check("t", &[-40.0, -80.0, -300.0, -41.0], 0.1).passed);
        assert!(!trend_check("t", &[-40.0, -80.0, -300.0, -30.0], 0.1).passed);
    }
}
