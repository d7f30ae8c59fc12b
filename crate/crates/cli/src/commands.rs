use std::f64::consts::PI;
use std::path::Path;

use dbarg_core::algebra::{
    convergence_radii, Coefficients, CustomPsi, DeclaredLimits, ExpPoly, PsiSpec, Representation,
};
use dbarg_core::error::Error;
use dbarg_core::kernel::{kernel_feq_residual, kernel_g};
use dbarg_core::quadrature::{
    adjointness_residual, moment_recursion_check, parseval_check, radial_moment, reproducing_check, ReductionMode,
};
use dbarg_core::ring::{RingCase, RingVariant};
use dbarg_core::selftest::{run_criterion, ErrorInfo, CRITERIA};
use dbarg_core::transport::transport_weight;
use dbarg_core::weight::{log_grid, LogPowerWeight, Modulation, WeightFunction};
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::args::{Command, Mode, PsiArgs, PsiFamily, Variant};
use crate::config::RunConfig;
use crate::report::{num, Outcome};

pub enum Failure {
    Usage(String),
    Lib(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

type Run = Result<Outcome, Failure>;

pub fn name(cmd: &Command) -> &'static str {
    match cmd {
        Command::Radii(_) => "radii",
        Command::Factorials { .. } => "factorials",
        Command::Coherent { .. } => "coherent",
        Command::Kernel { .. } => "kernel",
        Command::Weight { .. } => "weight",
        Command::Moments { .. } => "moments",
        Command::Parseval { .. } => "parseval",
        Command::Reproduce { .. } => "reproduce",
        Command::Adjoint { .. } => "adjoint",
        Command::PsiFromF { .. } => "psi-from-f",
        Command::Transport { .. } => "transport",
        Command::RingDemo { .. } => "ring-demo",
        Command::Selftest { .. } => "selftest",
    }
}

pub fn run(cmd: &Command, cfg: &RunConfig) -> Run {
    match cmd {
        Command::Radii(psi) => radii(psi),
        Command::Factorials { psi, n } => factorials(psi, *n.start(), *n.end()),
        Command::Coherent { psi, z } => coherent(psi, *z, cfg),
        Command::Kernel { psi, points } => {
            let xs = if points.x.is_empty() {
                let (lo, hi, count) = points.grid;
                log_grid(lo, hi, count)
            } else {
                points.x.clone()
            };
            kernel(psi, &xs, cfg)
        }
        Command::Weight { psi, lo, hi, points } => weight(psi, *lo, *hi, *points, cfg),
        Command::Moments { psi, n } => moments(psi, *n.start(), *n.end(), cfg),
        Command::Parseval { psi, vectors } => {
            let w = build_weight(psi, cfg)?;
            let rep = representation(psi)?;
            let mode = reduction(vectors.mode);
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
            let mut rows = Vec::with_capacity(vectors.trials);
            for trial in 0..vectors.trials {
                let f = Coefficients::random(&mut rng, *vectors.support.start(), *vectors.support.end());
                let r = parseval_check(&w, &rep, &f, mode, &cfg.quadrature())?;
                rows.push(json!({
                    "trial": trial,
                    "l2_norm_sq": num(f.l2_norm_sq()),
                    "integral": num(r.report.value),
                    "rel_err": num(r.rel_err),
                    "nodes_used": r.report.nodes_used,
                }));
            }
            Ok(Outcome::rows(rows))
        }
        Command::Reproduce { psi, vectors, zeta } => {
            let w = build_weight(psi, cfg)?;
            let rep = representation(psi)?;
            let mode = reduction(vectors.mode);
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
            let mut rows = Vec::with_capacity(vectors.trials);
            for trial in 0..vectors.trials {
                let f = Coefficients::random(&mut rng, *vectors.support.start(), *vectors.support.end());
                let r = reproducing_check(&w, &rep, *zeta, &f, mode, &cfg.quadrature())?;
                rows.push(json!({
                    "trial": trial,
                    "direct_re": num(r.direct.re),
                    "direct_im": num(r.direct.im),
                    "integral_re": num(r.integral.re),
                    "integral_im": num(r.integral.im),
                    "residual": num(r.residual),
                    "nodes_used": r.nodes_used,
                }));
            }
            Ok(Outcome::rows(rows).with_summary(json!({ "zeta_re": zeta.re, "zeta_im": zeta.im })))
        }
        Command::Adjoint { psi, m, n } => {
            let w = build_weight(psi, cfg)?;
            let rep = representation(psi)?;
            let mut rows = Vec::new();
            for mi in m.clone() {
                for ni in n.clone() {
                    let r = adjointness_residual(&w, &rep, mi, ni, &cfg.quadrature())?;
                    rows.push(json!({
                        "m": mi,
                        "n": ni,
                        "lhs": num(r.lhs),
                        "rhs": num(r.rhs),
                        "residual": num(r.residual),
                    }));
                }
            }
            Ok(Outcome::rows(rows))
        }
        Command::PsiFromF { psi, rho } => psi_from_f(psi, rho, cfg),
        Command::Transport { psi, choice, n } => {
            let base = build_weight(psi, cfg)?;
            let spec = PsiSpec::transported(psi_spec(psi)?, choice.clone());
            let moved = transport_weight(&base, choice)?;
            let rec = moment_recursion_check(&moved, &spec, *n.start(), *n.end(), &cfg.quadrature())?;
            let mut rows = Vec::with_capacity(rec.rows.len());
            for r in &rec.rows {
                rows.push(json!({
                    "n": r.n,
                    "moment": num(r.moment),
                    "abs_err_estimate": num(r.abs_err_estimate),
                    "psi2_next": num(spec.psi((r.n + 1) as f64)?),
                    "recursion_residual": num(r.residual),
                }));
            }
            let terms: Vec<Value> = choice.terms().iter().map(|&(a, alpha)| json!([a, alpha])).collect();
            Ok(Outcome::rows(rows).with_summary(json!({
                "choice": terms,
                "max_residual": num(rec.max_residual),
            })))
        }
        Command::RingDemo { variant, q, steps } => ring_demo(*variant, *q, *steps),
        Command::Selftest { only } => selftest(only, cfg),
    }
}

fn reduction(mode: Mode) -> ReductionMode {
    match mode {
        Mode::Analytic => ReductionMode::Analytic,
        Mode::Grid => ReductionMode::TensorGrid,
    }
}

pub fn psi_spec(args: &PsiArgs) -> Result<PsiSpec, Failure> {
    Ok(match args.psi {
        PsiFamily::Qexp => PsiSpec::q_exp(args.lambda, args.q)?,
        PsiFamily::Expoly => {
            if args.coeffs.is_empty() {
                return Err(Failure::Usage("--psi expoly needs --coeffs".into()));
            }
            PsiSpec::exp_poly(args.coeffs.clone())?
        }
        PsiFamily::Logpower => PsiSpec::log_power(args.nu, args.order)?,
        PsiFamily::CustomTable => {
            let path = args
                .table
                .as_deref()
                .ok_or_else(|| Failure::Usage("--psi custom-table needs --table".into()))?;
            let table = LogLinearTable::read(path).map_err(Failure::Usage)?;
            let label = format!("table:{}", path.display());
            let custom = CustomPsi::new(label, move |x| table.eval(x));
            let custom = match (args.limit_neg, args.limit_pos) {
                (Some(at_neg_inf), Some(at_pos_inf)) => custom.with_limits(DeclaredLimits { at_neg_inf, at_pos_inf }),
                (None, None) => custom,
                _ => {
                    return Err(Failure::Usage(
                        "declare both --limit-neg and --limit-pos, or neither".into(),
                    ))
                }
            };
            PsiSpec::Custom(custom)
        }
    })
}

fn representation(args: &PsiArgs) -> Result<Representation, Failure> {
    Ok(Representation::with_mu(psi_spec(args)?, args.mu))
}

/// The weight naturally attached to each family; tables have none.
fn build_weight(args: &PsiArgs, cfg: &RunConfig) -> Result<WeightFunction, Failure> {
    Ok(match args.psi {
        PsiFamily::Qexp => match args.modulation {
            None => WeightFunction::q_closed(args.lambda, args.q)?,
            Some(amp) => {
                if amp.is_nan() || amp.abs() >= 1.0 {
                    return Err(
                        Error::InvalidSpec(format!("modulation amplitude must satisfy |A| < 1, got {amp}")).into(),
                    );
                }
                let ln_q = args.q.ln();
                let h = Modulation::new(args.q, move |x: f64| 1.0 + amp * (2.0 * PI * x.ln() / ln_q).cos())?;
                WeightFunction::q_modulated(args.lambda, args.q, h)?
            }
        },
        PsiFamily::Expoly => WeightFunction::bernoulli(ExpPoly::new(args.coeffs.clone())?, cfg.inverse_mellin())?,
        PsiFamily::Logpower => WeightFunction::log_power(LogPowerWeight::new(args.nu, args.order)?)?,
        PsiFamily::CustomTable => {
            return Err(Error::InvalidSpec("a tabulated psi has no associated weight".into()).into())
        }
    })
}

fn radii(psi: &PsiArgs) -> Run {
    let r = convergence_radii(&psi_spec(psi)?)?;
    Ok(Outcome::rows(vec![serde_json::to_value(r).expect("radii serialize")]))
}

fn factorials(psi: &PsiArgs, nmin: i64, nmax: i64) -> Run {
    let rep = representation(psi)?;
    let table = rep.factorial_table(nmin, nmax)?;
    let mut rows = Vec::new();
    for n in table.indices() {
        rows.push(json!({
            "n": n,
            "psi": num(rep.ln_psi_at(n)?.exp()),
            "ln_factorial": num(table.ln_value(n)),
            "factorial": num(table.value(n)),
            "moment": num(table.moment(n)),
        }));
    }
    Ok(Outcome::rows(rows))
}

fn coherent(psi: &PsiArgs, z: Complex64, cfg: &RunConfig) -> Run {
    let rep = representation(psi)?;
    let v = rep.coherent_vector(z, cfg.tolerance.series)?;
    let rows = v
        .indices()
        .zip(&v.coefficients)
        .map(|(n, c)| json!({ "n": n, "re": num(c.re), "im": num(c.im), "abs": num(c.norm()) }))
        .collect();
    Ok(Outcome::rows(rows).with_summary(json!({
        "z_re": z.re,
        "z_im": z.im,
        "nmin": v.nmin,
        "nmax": v.nmax,
        "squared_norm": num(v.squared_norm()),
        "tail_bound": num(v.tail_bound),
        "eigen_residual": num(v.eigen_residual(&rep)?),
    })))
}

fn kernel(psi: &PsiArgs, xs: &[f64], cfg: &RunConfig) -> Run {
    let rep = representation(psi)?;
    let tol = cfg.tolerance.series;
    let mut rows = Vec::with_capacity(xs.len());
    for &x in xs {
        let g = kernel_g(&rep, Complex64::new(x, 0.0), tol)?;
        let feq = kernel_feq_residual(&rep, x, tol)?;
        rows.push(json!({
            "x": num(x),
            "re": num(g.value.re),
            "im": num(g.value.im),
            "tail_bound": num(g.tail_bound),
            "n_lo": g.terms_used.0,
            "n_hi": g.terms_used.1,
            "feq_rel_residual": num(feq / (x.abs() * g.value.norm())),
        }));
    }
    Ok(Outcome::rows(rows))
}

fn weight(psi: &PsiArgs, lo: f64, hi: f64, points: usize, cfg: &RunConfig) -> Run {
    if !(lo > 0.0 && hi > lo && points >= 2) {
        return Err(Failure::Usage(
            "weight grid needs 0 < lo < hi and at least 2 points".into(),
        ));
    }
    let w = build_weight(psi, cfg)?;
    let mut rows = Vec::with_capacity(points);
    for x in log_grid(lo, hi, points) {
        rows.push(json!({ "x": num(x), "F": num(w.eval(x)?) }));
    }
    let summary = serde_json::to_value(w.summary()).expect("summary serializes");
    Ok(Outcome::rows(rows).with_summary(summary))
}

fn moments(psi: &PsiArgs, nmin: i64, nmax: i64, cfg: &RunConfig) -> Run {
    let w = build_weight(psi, cfg)?;
    let rep = representation(psi)?;
    let opts = cfg.quadrature();
    // both sides are normalized to M(0) = 1
    let m0 = radial_moment(&w, 0, &opts)?.value;
    let mut rows = Vec::new();
    for n in nmin..=nmax {
        let r = radial_moment(&w, n, &opts)?;
        let measured = r.value / m0;
        let oracle = rep.moment(n)? / rep.moment(0)?;
        rows.push(json!({
            "n": n,
            "moment": num(measured),
            "oracle": num(oracle),
            "rel_err": num((measured - oracle).abs() / oracle.abs()),
            "abs_err_estimate": num(r.abs_err_estimate / m0),
            "nodes_used": r.nodes_used,
        }));
    }
    Ok(Outcome::rows(rows))
}

fn psi_from_f(psi: &PsiArgs, rho: &[f64], cfg: &RunConfig) -> Run {
    let w = build_weight(psi, cfg)?;
    let spec = psi_spec(psi)?;
    let mellin = w
        .mellin()
        .ok_or_else(|| Error::UnsupportedProvenance("this weight carries no Mellin transform".into()))?;
    let mut rows = Vec::with_capacity(rho.len());
    for &r in rho {
        let ln_psi = mellin.ln_eval(r + 1.0)? - mellin.ln_eval(r)?;
        let declared = spec.ln_psi(r)?;
        rows.push(json!({
            "rho": num(r),
            "psi": num(ln_psi.exp()),
            "ln_psi": num(ln_psi),
            "declared_psi": num(declared.exp()),
            "ln_residual": num((ln_psi - declared).abs()),
        }));
    }
    Ok(Outcome::rows(rows))
}

fn ring_demo(variant: Variant, q: f64, steps: u32) -> Run {
    let variant = match variant {
        Variant::Exterior => RingVariant::ExteriorDisk,
        Variant::Disk => RingVariant::Disk,
    };
    let case = RingCase::new(variant, q)?;
    let rows = (1..=steps)
        .map(|k| {
            let i = case.vanishing_propagation(k);
            json!({ "step": k, "lower": num(i.lower), "upper": num(i.upper), "excluded_points": i.excluded.len() })
        })
        .collect();
    let (lo, hi) = case.support();
    let radii = convergence_radii(&case.psi_spec())?;
    Ok(Outcome::rows(rows).with_summary(json!({
        "variant": variant,
        "q": q,
        "support": [num(lo), num(hi)],
        "radii": radii,
    })))
}

fn selftest(only: &[u8], cfg: &RunConfig) -> Run {
    let ids: Vec<u8> = if only.is_empty() {
        CRITERIA.iter().map(|(id, _)| *id).collect()
    } else {
        only.to_vec()
    };
    let st = cfg.selftest();
    let mut out = Outcome::default();
    for id in ids {
        let r = run_criterion(id, &st).ok_or_else(|| Failure::Usage(format!("no criterion with id {id}")))?;
        let tag = if r.passed { "PASS" } else { "FAIL" };
        eprintln!("criterion {:>2} {tag}  {}", r.id, r.name);
        if let Some(e) = &r.error {
            let mut v = serde_json::to_value::<&ErrorInfo>(e).expect("error info serializes");
            v["criterion"] = json!(r.id);
            out.errors.push(v);
        }
        out.failed |= !r.passed;
        out.results
            .push(serde_json::to_value(&r).expect("criterion serializes"));
    }
    Ok(out)
}

/// `ln ψ` linear in `x` between samples and along the end segments beyond.
struct LogLinearTable {
    xs: Vec<f64>,
    ln_ys: Vec<f64>,
}

impl LogLinearTable {
    fn read(path: &Path) -> Result<Self, String> {
        let mut reader = csv::ReaderBuilder::new()
            .has_headers(false)
            .trim(csv::Trim::All)
            .comment(Some(b'#'))
            .from_path(path)
            .map_err(|e| format!("cannot read table {}: {e}", path.display()))?;
        let (mut xs, mut ln_ys) = (Vec::new(), Vec::new());
        for (line, record) in reader.records().enumerate() {
            let record = record.map_err(|e| format!("table {}: {e}", path.display()))?;
            let parsed: Option<(f64, f64)> = match (record.get(0), record.get(1)) {
                (Some(a), Some(b)) => a.parse().ok().zip(b.parse().ok()),
                _ => None,
            };
            match parsed {
                Some((x, y)) => {
                    if !(y > 0.0 && y.is_finite() && x.is_finite()) {
                        return Err(format!("table row {}: psi must be positive and finite", line + 1));
                    }
                    xs.push(x);
                    ln_ys.push(y.ln());
                }
                None if line == 0 => continue,
                None => return Err(format!("table row {}: expected two numbers", line + 1)),
            }
        }
        if xs.len() < 2 {
            return Err("table needs at least two samples".into());
        }
        if xs.windows(2).any(|w| w[1] <= w[0]) {
            return Err("table x values must be strictly increasing".into());
        }
        Ok(Self { xs, ln_ys })
    }

    fn eval(&self, x: f64) -> f64 {
        let last = self.xs.len() - 1;
        let k = self.xs.partition_point(|&t| t <= x).clamp(1, last);
        let (x0, x1) = (self.xs[k - 1], self.xs[k]);
        let (y0, y1) = (self.ln_ys[k - 1], self.ln_ys[k]);
        (y0 + (y1 - y0) * (x - x0) / (x1 - x0)).exp()
    }
}
