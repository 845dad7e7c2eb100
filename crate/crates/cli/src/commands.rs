use std::fs::File;
use std::io::BufWriter;

use siflow_core::appendix::{
    generate_novichkov, novichkov_residuals, run_suite, AppendixError, NovichkovOutcome,
    NovichkovParams, Suite,
};
use siflow_core::bracket::{
    random_phase_points, verify_superintegrability, verify_superintegrability_numeric,
};
use siflow_core::geodesic::{integrate, write_csv, IntegrateError, PhaseState};
use siflow_core::global::{classify_global, Classification, GlobalExampleSpec};
use siflow_core::model::{
    verify_b_recurrence, verify_b_tilde, verify_c_derivative, verify_profile_equation,
    CoefficientSet, ModelError, ModelSpec, RelationCheck,
};
use siflow_core::numeric::{precision_from_env, HpFloat};
use siflow_core::phase::assemble_model;
use siflow_core::radical::AlgebraError;
use thiserror::Error;

use crate::config::{self, Config, ConfigError};
use crate::report::{sci, Block, Report};

/// Process exit status.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Exit {
    Pass = 0,
    CheckFailed = 1,
    Parse = 2,
    Domain = 3,
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("config has no [{0}] section")]
    MissingSection(&'static str),
    #[error("{0}")]
    Usage(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("cannot write {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
}

impl CliError {
    pub fn exit(&self) -> Exit {
        match self {
            CliError::Config(ConfigError::Domain { .. }) | CliError::Domain(_) => Exit::Domain,
            CliError::Model(ModelError::Algebra(AlgebraError::Domain { .. })) => Exit::Domain,
            CliError::Model(_) => Exit::CheckFailed,
            _ => Exit::Parse,
        }
    }
}

/// Flags shared by every command.
#[derive(Debug, Clone)]
pub struct Options {
    pub seed: u64,
    pub cases: Option<usize>,
    pub symbolic_max_n: usize,
    pub csv: Option<String>,
}

pub type Outcome = Result<(Report, Exit), CliError>;

fn status(report: &mut Report, ok: bool) -> Exit {
    report.status = if ok { "pass" } else { "fail" }.to_string();
    if ok {
        Exit::Pass
    } else {
        Exit::CheckFailed
    }
}

fn model_of(cfg: &Config) -> Result<&ModelSpec, CliError> {
    cfg.model.as_ref().ok_or(CliError::MissingSection("model"))
}

fn model_block(spec: &ModelSpec) -> Block {
    let mut b = Block::new("model");
    b.push("parity", spec.parity);
    b.push("n", spec.n());
    b.push("F", spec.f_poly());
    for (i, r) in spec.roots.iter().enumerate() {
        let params: Vec<String> = r.params.iter().map(|p| p.to_string()).collect();
        b.push(
            format!("root {}", i + 1),
            format!(
                "a = {}, multiplicity {}, sign {}, params [{}]",
                r.value,
                r.multiplicity,
                r.sign,
                params.join(", ")
            ),
        );
    }
    if spec.parity == siflow_core::model::Parity::Odd {
        b.push("nu", &spec.nu);
    }
    let hi = spec
        .domain
        .hi
        .as_ref()
        .map_or("inf".to_string(), |h| h.to_string());
    b.push("domain", format!("({}, {hi})", spec.domain.lo));
    b
}

pub fn build(path: &str, _opts: &Options) -> Outcome {
    let cfg = config::load(path)?;
    let spec = model_of(&cfg)?;
    let cs = CoefficientSet::build(spec)?;
    let mut report = Report::new("build", Some(path), None);
    report.add(model_block(spec));
    let mut prof = Block::new("profile");
    prof.push("x", &cs.x);
    prof.push("x'", &cs.dx);
    report.add(prof);
    let mut b = Block::new("b");
    for (k, v) in cs.b.iter().enumerate() {
        b.push(format!("b_{k}"), v);
    }
    report.add(b);
    let mut c = Block::new("c");
    for (k, v) in cs.c.iter().enumerate().skip(1) {
        c.push(format!("c_{k}"), v);
    }
    report.add(c);
    let exit = status(&mut report, true);
    Ok((report, exit))
}

fn relation_lines(block: &mut Block, checks: &[RelationCheck]) -> bool {
    for c in checks {
        let v = match (&c.passed, &c.residual) {
            (true, _) => "exact-zero".to_string(),
            (false, Some(r)) => format!("FAIL residual {r}"),
            (false, None) => "FAIL".to_string(),
        };
        block.push(c.label.clone(), v);
    }
    checks.iter().all(|c| c.passed)
}

pub fn verify(path: &str, opts: &Options) -> Outcome {
    let cfg = config::load(path)?;
    let spec = model_of(&cfg)?;
    let v = &cfg.verify;
    let cs = CoefficientSet::build(spec)?;
    let mut report = Report::new("verify", Some(path), Some(opts.seed));
    report.add(model_block(spec));
    let mut ok = true;

    if v.profile {
        let mut b = Block::new("profile equation");
        ok &= relation_lines(&mut b, &[verify_profile_equation(spec, &cs.x)]);
        report.add(b);
    }
    if v.recurrences {
        let mut b = Block::new("recurrences");
        ok &= relation_lines(&mut b, &verify_b_recurrence(spec, &cs)?);
        ok &= relation_lines(&mut b, &verify_c_derivative(spec, &cs));
        ok &= relation_lines(&mut b, &verify_b_tilde(spec, &cs));
        report.add(b);
    }
    if v.brackets {
        let model = assemble_model(spec)?;
        let mut b = Block::new("brackets");
        if spec.n() <= opts.symbolic_max_n {
            b.push("mode", "exact");
            let rep = verify_superintegrability(&model).map_err(ModelError::from)?;
            for c in &rep.checks {
                let value = if c.passed {
                    "exact-zero".to_string()
                } else {
                    format!(
                        "FAIL {} residual terms: {}",
                        c.residual_terms,
                        c.residual.clone().unwrap_or_default()
                    )
                };
                b.push(c.label, value);
            }
            ok &= rep.all_pass();
        } else {
            let digits = precision_from_env();
            let tol = v
                .tolerance
                .unwrap_or_else(|| 10f64.powi(15 - digits as i32));
            let pts = random_phase_points::<HpFloat>(&model, v.points, opts.seed, digits);
            let rep = verify_superintegrability_numeric(&model, &pts, digits, tol, digits)
                .map_err(ModelError::from)?;
            b.push(
                "mode",
                format!(
                    "numeric, {digits} digits, {} points, tolerance {}",
                    v.points,
                    sci(tol)
                ),
            );
            for c in &rep.checks {
                let verdict = if c.passed { "ok" } else { "FAIL" };
                b.push(
                    c.label,
                    format!("{verdict} max residual {}", sci(c.max_residual)),
                );
            }
            ok &= rep.all_pass();
        }
        report.add(b);
    }
    let exit = status(&mut report, ok);
    Ok((report, exit))
}

pub fn run_integrate(path: &str, opts: &Options) -> Outcome {
    let cfg = config::load(path)?;
    let spec = model_of(&cfg)?;
    let it = cfg
        .integrate
        .as_ref()
        .ok_or(CliError::MissingSection("integrate"))?;
    if !spec.domain.contains_f64(it.a) {
        return Err(CliError::Domain(format!(
            "line {}: a = {} lies outside the model domain",
            it.line, it.a
        )));
    }
    if it.h.is_nan() || it.h <= 0.0 || it.t.is_nan() || it.t <= 0.0 {
        return Err(CliError::Usage(format!(
            "line {}: need h > 0 and t > 0",
            it.line
        )));
    }
    let model = assemble_model(spec)?;
    let s0 = PhaseState {
        t: 0.0,
        a: it.a,
        y: it.y,
        pa: it.pa,
        py: it.py,
    };
    let tr = integrate(&model, s0, it.t, it.h, it.every, ()).map_err(|e| match e {
        IntegrateError::InitialOutside(inner) => CliError::Domain(inner.to_string()),
        other => CliError::Usage(other.to_string()),
    })?;

    let csv_path = opts
        .csv
        .clone()
        .unwrap_or_else(|| "trajectory.csv".to_string());
    let file = File::create(&csv_path).map_err(|source| CliError::Io {
        path: csv_path.clone(),
        source,
    })?;
    write_csv(&tr, BufWriter::new(file)).map_err(|source| CliError::Io {
        path: csv_path.clone(),
        source,
    })?;

    let mut report = Report::new("integrate", Some(path), None);
    report.add(model_block(spec));
    let mut b = Block::new("trajectory");
    b.push("step", sci(it.h));
    b.push("duration", it.t);
    b.push("samples", tr.samples.len());
    b.push("final t", tr.samples.last().map_or(0.0, |s| s.state.t));
    b.push("exited domain", tr.exited);
    b.push("csv", &csv_path);
    report.add(b);
    let mut d = Block::new("relative drift");
    d.push("H", sci(tr.drift.h));
    d.push("Py", sci(tr.drift.py));
    d.push("S1", sci(tr.drift.s1));
    d.push("S2", sci(tr.drift.s2));
    let worst = tr.drift.max();
    let ok = match it.tolerance {
        Some(tol) => {
            d.push("tolerance", sci(tol));
            worst <= tol
        }
        None => true,
    };
    report.add(d);
    let exit = status(&mut report, ok);
    Ok((report, exit))
}

fn global_block(spec: &GlobalExampleSpec) -> Block {
    let mut b = Block::new("family");
    b.push("name", spec.family);
    let mu: Vec<String> = spec.mu.iter().map(|m| m.to_string()).collect();
    b.push("mu", mu.join(", "));
    if !spec.nu.is_empty() {
        let nu: Vec<String> = spec.nu.iter().map(|m| m.to_string()).collect();
        b.push("nu", nu.join(", "));
    }
    if let Some((a1, a2)) = &spec.band {
        b.push("band", format!("({a1}, {a2})"));
    }
    for (a, xi) in &spec.simple {
        b.push(format!("simple root {a}"), format!("xi = {xi}"));
    }
    b
}

pub fn classify(path: &str, _opts: &Options) -> Outcome {
    let cfg = config::load(path)?;
    let spec = cfg
        .classify
        .as_ref()
        .ok_or(CliError::MissingSection("classify"))?;
    let mut report = Report::new("classify", Some(path), None);
    report.add(global_block(spec));
    let tag = classify_global(spec);
    let mut b = Block::new("classification");
    b.push("manifold", &tag);
    match spec.to_model_spec() {
        Ok(m) => b.push(
            "model",
            format!("{} parity, n = {}, F = {}", m.parity, m.n(), m.f_poly()),
        ),
        Err(e) => b.push("model", format!("unavailable: {e}")),
    }
    report.add(b);
    let ok = !matches!(tag, Classification::Rejected(_));
    if ok {
        let mut t = Block::new("coordinate change");
        let (lo, hi) = spec.interval();
        let top = hi.unwrap_or(lo + 4.0);
        for j in 1..=4 {
            let u = lo + (top - lo) * j as f64 / 5.0;
            if let Ok((omega, tt)) = spec.omega_transform(u) {
                t.push(
                    format!("u = {u:.3}"),
                    format!("Omega = {}, t = {}", sci(omega), sci(tt)),
                );
            }
        }
        report.add(t);
    }
    let exit = status(&mut report, ok);
    Ok((report, exit))
}

pub fn appendix(suite: Option<&str>, opts: &Options) -> Outcome {
    let suites = match suite {
        None => vec![Suite::A, Suite::B, Suite::C],
        Some(s) => vec![Suite::from_name(s)
            .ok_or_else(|| CliError::Usage(format!("unknown suite `{s}` (A, B or C)")))?],
    };
    let cases = opts.cases.unwrap_or(100);
    let mut report = Report::new("appendix", None, Some(opts.seed));
    let mut ok = true;
    for s in suites {
        let rep = run_suite(s, cases, opts.seed)
            .map_err(|e: AppendixError| CliError::Usage(e.to_string()))?;
        let mut b = Block::new(format!("suite {s}"));
        for t in &rep.tallies {
            b.push(t.identity, format!("{}/{} pass", t.passed, t.total));
            for f in &t.failures {
                b.push(
                    format!("{} FAIL", t.identity),
                    format!("{} ({})", f.case, f.detail.clone().unwrap_or_default()),
                );
            }
        }
        b.push("total", format!("{}/{} pass", rep.passed(), rep.total()));
        ok &= rep.all_pass();
        report.add(b);
    }
    let exit = status(&mut report, ok);
    Ok((report, exit))
}

fn residual_text(r: &siflow_core::radical::RadicalElement) -> String {
    if r.is_zero() {
        "exact-zero".to_string()
    } else {
        format!("FAIL {r}")
    }
}

fn novichkov_block(title: String, p: &NovichkovParams, o: &NovichkovOutcome) -> Block {
    let mut b = Block::new(title);
    b.push("parameters", &p.branch);
    b.push("b1, t0", format!("{}, {}", p.b1, p.t0));
    let consts: Vec<String> = p.b_constants().iter().map(|c| c.to_string()).collect();
    b.push("B_0..B_4", consts.join(", "));
    b.push("N1 residual", residual_text(&o.residual_n1));
    b.push("N2 residual", residual_text(&o.residual_n2));
    b.push("T + a x + 2F x'", residual_text(&o.residual_t));
    b.push("B_5", &o.b5_closed);
    b.push("B_6", &o.b6_closed);
    b
}

pub fn novichkov(path: Option<&str>, opts: &Options) -> Outcome {
    let mut report = Report::new("novichkov", path, Some(opts.seed));
    let single = match path {
        Some(p) => config::load(p)?.novichkov,
        None => None,
    };
    let novichkov_err = |e: AppendixError| match e {
        AppendixError::ZeroRoot | AppendixError::UseMultipleBranch => {
            CliError::Domain(e.to_string())
        }
        other => CliError::Usage(other.to_string()),
    };
    let ok = match single {
        Some(p) => {
            let o = novichkov_residuals(&p).map_err(novichkov_err)?;
            report.add(novichkov_block("parametric solution".to_string(), &p, &o));
            o.passed()
        }
        None => {
            let cases = opts.cases.unwrap_or(50);
            let mut ok = true;
            for (multiple, name) in [(false, "distinct roots"), (true, "double root")] {
                let mut passed = 0;
                let mut b = Block::new(name);
                for p in generate_novichkov(multiple, cases, opts.seed) {
                    let o = novichkov_residuals(&p).map_err(novichkov_err)?;
                    let good = o.passed()
                        && o.b5.as_ref() == Some(&o.b5_closed)
                        && o.b6.as_ref() == Some(&o.b6_closed);
                    if good {
                        passed += 1;
                    } else {
                        b.push("FAIL", &p.branch);
                    }
                }
                b.push("exact residuals", format!("{passed}/{cases} pass"));
                ok &= passed == cases;
                report.add(b);
            }
            ok
        }
    };
    let exit = status(&mut report, ok);
    Ok((report, exit))
}
