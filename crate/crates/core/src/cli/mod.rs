//! Command-line front end.
//!
//! Every subcommand turns its inputs into a list of [`Job`]s, parses all of
//! them before running anything, and writes `<out>/report.txt` plus one CSV
//! directory per simulation job. Exit codes: 0 when the analysis completed
//! (whatever the verdicts), 1 when outputs could not be written, 2 for usage
//! and config errors.

pub mod config;
pub mod report;
pub mod reproduce;

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use thiserror::Error;

use crate::divcheck::{
    check_closed_loop, check_necessary_c1, check_necessary_c2, check_sufficient, check_theorem1,
    flux_sphere_estimate, CheckConfig,
};
use crate::exec::Exec;
use crate::linalg::eigenvalues;
use crate::lincheck::{
    check_linear_condition, find_certificate, linear_ground_truth, GroundTruth, LinearCondition,
};
use crate::sim::{phase_portrait, write_portrait};
use crate::synth::{default_poles, synthesize_with_poles, verify_closed_loop};

pub use config::{Config, ConfigError, Overrides};
pub use report::Report;
pub use reproduce::{Case, Job, Kind};

use config::{CheckSpec, DensitySpec, LinearSpec, SimulateSpec, SystemSpec, Theorem};

#[derive(Debug, Parser)]
#[command(
    name = "divstab",
    version,
    about = "Divergence and matrix-inequality stability checks"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// INI config for analyze, linear, synth and simulate.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Directory for report.txt and trajectory CSVs.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true)]
    samples: Option<usize>,
    #[arg(long, global = true)]
    tol: Option<f64>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Sampled divergence checks on a nonlinear system.
    Analyze,
    /// Check or search a matrix-inequality certificate.
    Linear,
    /// Synthesize state feedback with a decay-rate certificate.
    Synth,
    /// Integrate trajectories and classify them.
    Simulate,
    /// Run a built-in case.
    Reproduce {
        #[arg(value_enum)]
        case: Case,
    },
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("cannot write {path}: {message}")]
    Output { path: String, message: String },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Output { .. } => 1,
        }
    }
}

/// Parses `argv` (program name first), runs the command and returns the
/// process exit code. The report is also printed to stdout.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    let ov = Overrides {
        seed: cli.seed,
        samples: cli.samples,
        tol: cli.tol,
    };
    let result = match cli.command {
        Command::Reproduce { case } => {
            let command = format!("reproduce {}", case.name());
            execute(&command, &reproduce::jobs(case), &ov, &cli.out)
        }
        Command::Analyze => from_file(
            "analyze",
            Kind::Analyze,
            cli.config.as_deref(),
            &ov,
            &cli.out,
        ),
        Command::Linear => from_file("linear", Kind::Linear, cli.config.as_deref(), &ov, &cli.out),
        Command::Synth => from_file("synth", Kind::Synth, cli.config.as_deref(), &ov, &cli.out),
        Command::Simulate => from_file(
            "simulate",
            Kind::Simulate,
            cli.config.as_deref(),
            &ov,
            &cli.out,
        ),
    };
    match result {
        Ok(text) => {
            print!("{text}");
            0
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn from_file(
    name: &'static str,
    kind: Kind,
    path: Option<&Path>,
    ov: &Overrides,
    out: &Path,
) -> Result<String, CliError> {
    let path = path.ok_or(ConfigError::NoConfig(name))?;
    let text = fs::read_to_string(path).map_err(|e| ConfigError::Unreadable {
        path: path.display().to_string(),
        message: e.to_string(),
    })?;
    let jobs = [Job {
        label: name.to_string(),
        kind,
        config: text,
    }];
    execute(name, &jobs, ov, out)
}

enum Plan {
    Analyze {
        sys: SystemSpec,
        dens: DensitySpec,
        check: CheckSpec,
    },
    Linear(LinearSpec, LinearCondition),
    Synth(LinearSpec, f64),
    Simulate(SystemSpec, SimulateSpec),
}

fn plan(kind: Kind, cfg: &Config, ov: &Overrides) -> Result<Plan, ConfigError> {
    let invalid = |block: &'static str, key: &str, message: &str| ConfigError::Invalid {
        block,
        key: key.to_string(),
        message: message.to_string(),
    };
    match kind {
        Kind::Analyze => {
            let sys = cfg.system()?;
            let dim = sys.field.dim();
            let dens = cfg.density(dim)?;
            let check = cfg.check(dim, ov)?;
            if check.theorem == Theorem::Theorem1 && dens.s.is_none() {
                return Err(invalid(
                    "density",
                    "family",
                    "theorem1 needs family = grad-norm with S",
                ));
            }
            if check.theorem == Theorem::ClosedLoop && sys.g.is_none() {
                return Err(invalid(
                    "system",
                    "g",
                    "closed-loop checks need g and u1..um",
                ));
            }
            Ok(Plan::Analyze { sys, dens, check })
        }
        Kind::Linear => {
            let spec = cfg.linear(ov)?;
            let cond = spec.mode.ok_or_else(|| ConfigError::MissingKey {
                block: "linear",
                key: "mode".into(),
            })?;
            let searchable = matches!(
                cond,
                LinearCondition::Theorem7 { .. } | LinearCondition::Corollary1 { .. }
            );
            let closed_loop = spec.b.is_some() && spec.k.is_some();
            if !searchable && !closed_loop && spec.p.is_none() {
                return Err(invalid(
                    "linear",
                    "P",
                    &format!(
                        "mode {} has no certificate search, so P is required",
                        cond.name()
                    ),
                ));
            }
            if spec.k.is_none() && spec.b.is_some() {
                return Err(invalid("linear", "K", "B is given without K"));
            }
            Ok(Plan::Linear(spec, cond))
        }
        Kind::Synth => {
            let spec = cfg.linear(ov)?;
            if spec.b.is_none() {
                return Err(ConfigError::MissingKey {
                    block: "linear",
                    key: "B".into(),
                });
            }
            let gamma = spec.gamma.ok_or_else(|| ConfigError::MissingKey {
                block: "linear",
                key: "gamma".into(),
            })?;
            Ok(Plan::Synth(spec, gamma))
        }
        Kind::Simulate => {
            let sys = cfg.system()?;
            let sim = cfg.simulate(sys.field.dim())?;
            Ok(Plan::Simulate(sys, sim))
        }
    }
}

/// Parses and runs `jobs`, writes `<out>/report.txt` and returns its text.
pub fn execute(
    command: &str,
    jobs: &[Job],
    ov: &Overrides,
    out: &Path,
) -> Result<String, CliError> {
    let mut plans = Vec::with_capacity(jobs.len());
    let mut header_cfg = None;
    for job in jobs {
        let cfg = Config::parse(&job.config)?;
        if header_cfg.is_none() && cfg.has_block("check") {
            header_cfg = Some(cfg.effective_check_config(ov));
        }
        plans.push(plan(job.kind, &cfg, ov)?);
    }
    let header_cfg = header_cfg.unwrap_or_else(|| {
        Config::parse("")
            .expect("empty config")
            .effective_check_config(ov)
    });
    let parts: Vec<(&str, &str)> = jobs
        .iter()
        .map(|j| (j.label.as_str(), j.config.as_str()))
        .collect();
    let mut rep = Report::new(command, &report::config_hash(&parts), &header_cfg);

    fs::create_dir_all(out).map_err(|e| output_error(out, &e))?;
    for (job, plan) in jobs.iter().zip(&plans) {
        rep.detail_block(&job.label, job.kind.name());
        run_plan(&job.label, plan, out, &mut rep)?;
    }
    let text = rep.into_string();
    let path = out.join("report.txt");
    fs::write(&path, &text).map_err(|e| output_error(&path, &e))?;
    Ok(text)
}

fn output_error(path: &Path, e: &std::io::Error) -> CliError {
    CliError::Output {
        path: path.display().to_string(),
        message: e.to_string(),
    }
}

fn run_plan(label: &str, plan: &Plan, out: &Path, rep: &mut Report) -> Result<(), CliError> {
    match plan {
        Plan::Analyze { sys, dens, check } => analyze(label, sys, dens, check, rep),
        Plan::Linear(spec, cond) => linear(label, spec, *cond, rep),
        Plan::Synth(spec, gamma) => synth(label, spec, *gamma, rep),
        Plan::Simulate(sys, sim) => {
            rep.detail("field", field_text(sys));
            match phase_portrait(&sys.field, &sim.points, &sim.cfg, Exec::default()) {
                Ok(entries) => {
                    let dir = out.join(label);
                    write_portrait(&dir, &entries).map_err(|e| output_error(&dir, &e))?;
                    rep.portrait(label, &entries, &sim.cfg, &format!("{label}/"));
                }
                Err(e) => inconclusive(rep, &format!("{label}/simulate"), &e),
            }
        }
    }
    Ok(())
}

fn field_text(sys: &SystemSpec) -> String {
    let comps: Vec<String> = sys
        .field
        .components()
        .iter()
        .enumerate()
        .map(|(i, e)| format!("f{} = {e}", i + 1))
        .collect();
    comps.join(", ")
}

fn inconclusive(rep: &mut Report, label: &str, e: &dyn std::fmt::Display) {
    rep.result(label, "INCONCLUSIVE", &[]);
    rep.detail("error", e);
}

fn analyze(label: &str, sys: &SystemSpec, dens: &DensitySpec, check: &CheckSpec, rep: &mut Report) {
    let f = &sys.field;
    let cfg: &CheckConfig = &check.cfg;
    rep.detail("field", field_text(sys));
    if let (Some(g), Some(u)) = (&sys.g, &sys.u) {
        let rows: Vec<String> = g
            .iter()
            .map(|r| {
                r.iter()
                    .map(|e| e.to_string())
                    .collect::<Vec<_>>()
                    .join(",")
            })
            .collect();
        let inputs: Vec<String> = u.iter().map(|e| e.to_string()).collect();
        rep.detail(
            "inputs",
            format!("g = {}, u = {}", rows.join("; "), inputs.join(", ")),
        );
    }
    rep.detail("density", dens.density.describe());
    rep.detail(
        "region",
        format!(
            "{} <= |x| <= {}{}",
            check.region.r_min(),
            check.region.r_max(),
            check
                .region
                .bounds()
                .map(|b| format!(" within box {b:?}"))
                .unwrap_or_default()
        ),
    );
    rep.detail(
        "settings",
        format!(
            "seed={} samples={} tol={:e} beta={}",
            cfg.seed, cfg.samples, cfg.tol, cfg.beta
        ),
    );

    if check.theorem == Theorem::Flux {
        match flux_sphere_estimate(f, dens.density.rho(), check.flux_radius, cfg) {
            Ok(est) => rep.flux(label, &est),
            Err(e) => inconclusive(rep, &format!("{label}/flux"), &e),
        }
        return;
    }
    for &case in &check.cases {
        let (name, result) = match check.theorem {
            Theorem::Necessary if case == 1 => (
                "necessary-c1".to_string(),
                check_necessary_c1(f, &dens.density, &check.region, cfg),
            ),
            Theorem::Necessary => (
                "necessary-c2".to_string(),
                check_necessary_c2(f, &dens.density, &check.region, cfg),
            ),
            Theorem::Sufficient => (
                format!("sufficient-case{case}"),
                check_sufficient(f, &dens.density, &check.region, cfg, case),
            ),
            Theorem::Theorem1 => {
                let s = dens.s.as_ref().expect("planned with S");
                (
                    format!("theorem1-case{case}"),
                    check_theorem1(f, s, &check.region, cfg, case),
                )
            }
            Theorem::ClosedLoop => {
                let g = sys.g.as_deref().expect("planned with g");
                let u = sys.u.as_deref().expect("planned with u");
                (
                    format!("closed-loop-case{case}"),
                    check_closed_loop(f, g, u, &dens.density, &check.region, cfg, case),
                )
            }
            Theorem::Flux => unreachable!("handled above"),
        };
        match result {
            Ok(v) => rep.verdict(label, &v),
            Err(e) => inconclusive(rep, &format!("{label}/{name}"), &e),
        }
    }
}

fn linear(label: &str, spec: &LinearSpec, cond: LinearCondition, rep: &mut Report) {
    rep.detail("A", &spec.a);
    rep.detail("condition", cond);
    if let (Some(b), Some(k)) = (&spec.b, &spec.k) {
        let name = format!("{label}/closed-loop");
        match verify_closed_loop(&spec.a, b, k, cond, spec.p.as_ref()) {
            Ok(r) => {
                let status = r
                    .check
                    .as_ref()
                    .map_or("NO_CERTIFICATE".to_string(), |c| c.state.to_string());
                let pd = r
                    .check
                    .as_ref()
                    .map_or("n/a".to_string(), |c| c.p_positive_definite.to_string());
                rep.result(
                    &name,
                    &status,
                    &[
                        ("p_pd", pd),
                        ("ground_truth", r.ground_truth.to_string()),
                        ("unsound", r.unsound.to_string()),
                    ],
                );
                rep.detail("B", b);
                rep.detail("K", k);
                rep.detail("closed_loop", &r.closed_loop);
                rep.detail("closed_loop_spectrum", &r.spectrum);
                if let Some(c) = &r.check {
                    linear_details(rep, c);
                }
                let shifted = cond.shifted_matrix(&r.closed_loop);
                if let Ok(s) = eigenvalues(&shifted) {
                    rep.detail("shifted_spectrum", s);
                }
                if let Some(s) = &r.search {
                    rep.detail(
                        "search",
                        if s.found() {
                            "certificate found"
                        } else {
                            "no certificate"
                        },
                    );
                }
            }
            Err(e) => inconclusive(rep, &name, &e),
        }
        return;
    }
    if let Some(p) = &spec.p {
        let name = format!("{label}/{}", cond.name());
        let checked = check_linear_condition(&spec.a, p, cond)
            .and_then(|c| Ok((linear_ground_truth(&spec.a)?, c)));
        match checked {
            Ok((truth, c)) => {
                let unsound =
                    c.holds_strict() && c.p_positive_definite && truth == GroundTruth::Unstable;
                rep.result(
                    &name,
                    &c.state.to_string(),
                    &[
                        ("p_pd", c.p_positive_definite.to_string()),
                        ("ground_truth", truth.to_string()),
                        ("unsound", unsound.to_string()),
                    ],
                );
                rep.detail("P", p);
                linear_details(rep, &c);
                if let Ok(s) = eigenvalues(&spec.a) {
                    rep.detail("spectrum", s);
                }
            }
            Err(e) => inconclusive(rep, &name, &e),
        }
        return;
    }
    let name = format!("{label}/certificate");
    let searched =
        find_certificate(&spec.a, cond).and_then(|s| Ok((linear_ground_truth(&spec.a)?, s)));
    match searched {
        Ok((truth, s)) => {
            let trace = s.trace_side_ok.map_or("n/a".to_string(), |t| t.to_string());
            rep.result(
                &name,
                if s.found() { "FOUND" } else { "NOT_FOUND" },
                &[
                    ("shifted_max_real", format!("{:e}", s.shifted_max_real)),
                    ("trace_side_ok", trace),
                    ("ground_truth", truth.to_string()),
                ],
            );
            rep.detail("shifted", &s.shifted);
            if let Some(p) = &s.p {
                rep.detail("P", p);
            }
            if let Some(c) = &s.report {
                linear_details(rep, c);
            }
        }
        Err(e) => inconclusive(rep, &name, &e),
    }
}

fn linear_details(rep: &mut Report, c: &crate::lincheck::LinearCheckReport) {
    rep.detail("slack", &c.slack);
    rep.detail(
        "slack_eigenvalues",
        format!(
            "max={:e} min={:e} tol={:e}",
            c.max_eigenvalue, c.min_eigenvalue, c.tol
        ),
    );
    rep.detail("trace", c.trace);
    if let Some(ok) = c.trace_side_ok {
        rep.detail("trace_side_ok", ok);
    }
}

fn synth(label: &str, spec: &LinearSpec, gamma: f64, rep: &mut Report) {
    let b = spec.b.as_ref().expect("planned with B");
    let poles = spec
        .poles
        .clone()
        .unwrap_or_else(|| default_poles(spec.a.rows(), gamma));
    rep.detail("A", &spec.a);
    rep.detail("B", b);
    rep.detail("gamma", gamma);
    let name = format!("{label}/synth");
    match synthesize_with_poles(&spec.a, b, gamma, &poles, spec.seed) {
        Ok(r) => {
            rep.result(
                &name,
                "SYNTHESIZED",
                &[
                    ("max_real", format!("{:e}", r.spectrum.max_real())),
                    ("certificate", r.certificate.state.to_string()),
                    ("p_pd", r.certificate.p_positive_definite.to_string()),
                ],
            );
            rep.detail("K", &r.k);
            rep.detail("P", &r.p);
            rep.detail("closed_loop_spectrum", &r.spectrum);
            let pol: Vec<String> = r.poles.iter().map(|p| p.to_string()).collect();
            rep.detail("poles", pol.join(","));
            rep.detail("attempts", r.attempts);
            linear_details(rep, &r.certificate);
        }
        Err(e) => {
            rep.result(&name, "FAILED", &[]);
            rep.detail("error", e);
        }
    }
}
