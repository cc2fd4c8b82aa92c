//! INI-style analysis configuration.
//!
//! Blocks are `[system]`, `[density]`, `[check]`, `[linear]` and
//! `[simulate]`. Matrices are written `a,b; c,d`, numbers may be constant
//! expressions such as `-1/3`, and expressions may be quoted. Unknown blocks,
//! unknown keys and repeated keys are rejected so that typos cannot silently
//! fall back to defaults.

use ini::{Ini, ParseOption, Properties};
use thiserror::Error;

use crate::density::{
    grad_norm_density, norm_power_density, quadratic_form_density, DensityFunction, ScalarFunction,
};
use crate::divcheck::{CheckConfig, Region};
use crate::expr::{parse_expr, Expr, VectorField};
use crate::linalg::Matrix;
use crate::lincheck::LinearCondition;
use crate::sim::{circle_grid, SimConfig};

const BLOCKS: [&str; 5] = ["system", "density", "check", "linear", "simulate"];

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConfigError {
    #[error("cannot read config {path}: {message}")]
    Unreadable { path: String, message: String },
    #[error("config syntax error at {0}")]
    Syntax(String),
    #[error("missing [{0}] block")]
    MissingBlock(&'static str),
    #[error("unknown block [{0}]")]
    UnknownBlock(String),
    #[error("block [{0}] appears more than once")]
    DuplicateBlock(String),
    #[error("keys outside any block: {0}")]
    Unsectioned(String),
    #[error("[{block}] is missing `{key}`")]
    MissingKey { block: &'static str, key: String },
    #[error("[{block}] has unknown key `{key}`")]
    UnknownKey { block: &'static str, key: String },
    #[error("[{block}] sets `{key}` more than once")]
    DuplicateKey { block: &'static str, key: String },
    #[error("[{block}] {key}: {message}")]
    Invalid {
        block: &'static str,
        key: String,
        message: String,
    },
    #[error("`{0}` needs --config <path>")]
    NoConfig(&'static str),
}

/// Command-line values that take precedence over the `[check]` and
/// `[linear]` blocks.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub samples: Option<usize>,
    pub tol: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct Config {
    ini: Ini,
}

/// One block with its allowed keys already verified.
struct Block<'a> {
    name: &'static str,
    props: &'a Properties,
}

impl Config {
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let opt = ParseOption {
            enabled_escape: false,
            ..ParseOption::default()
        };
        let ini =
            Ini::load_from_str_opt(text, opt).map_err(|e| ConfigError::Syntax(e.to_string()))?;
        if let Some((k, _)) = ini.general_section().iter().next() {
            return Err(ConfigError::Unsectioned(k.to_string()));
        }
        let mut seen: Vec<&str> = Vec::new();
        for name in ini.sections().flatten() {
            if !BLOCKS.contains(&name) {
                return Err(ConfigError::UnknownBlock(name.to_string()));
            }
            if seen.contains(&name) {
                return Err(ConfigError::DuplicateBlock(name.to_string()));
            }
            seen.push(name);
        }
        Ok(Self { ini })
    }

    pub fn has_block(&self, name: &str) -> bool {
        self.ini.section(Some(name)).is_some()
    }

    fn block(
        &self,
        name: &'static str,
        allowed: impl Fn(&str) -> bool,
    ) -> Result<Option<Block<'_>>, ConfigError> {
        let Some(props) = self.ini.section(Some(name)) else {
            return Ok(None);
        };
        let mut seen: Vec<&str> = Vec::new();
        for (k, _) in props.iter() {
            if !allowed(k) {
                return Err(ConfigError::UnknownKey {
                    block: name,
                    key: k.to_string(),
                });
            }
            if seen.contains(&k) {
                return Err(ConfigError::DuplicateKey {
                    block: name,
                    key: k.to_string(),
                });
            }
            seen.push(k);
        }
        Ok(Some(Block { name, props }))
    }

    fn required(
        &self,
        name: &'static str,
        allowed: impl Fn(&str) -> bool,
    ) -> Result<Block<'_>, ConfigError> {
        self.block(name, allowed)?
            .ok_or(ConfigError::MissingBlock(name))
    }

    pub fn system(&self) -> Result<SystemSpec, ConfigError> {
        let b = self.required("system", |k| {
            k == "dim" || k == "g" || indexed(k, "f").is_some() || indexed(k, "u").is_some()
        })?;
        let dim = b.req_usize("dim")?;
        if dim == 0 {
            return Err(b.invalid("dim", "must be at least 1"));
        }
        let mut comps = Vec::with_capacity(dim);
        for i in 1..=dim {
            let key = format!("f{i}");
            comps.push(b.req_expr(&key, dim)?);
        }
        for (k, _) in b.props.iter() {
            if indexed(k, "f").is_some_and(|i| i > dim) {
                return Err(b.invalid(k, &format!("index exceeds dim = {dim}")));
            }
        }
        let field = VectorField::new(comps).map_err(|e| b.invalid("f", &e.to_string()))?;

        let g = match b.get("g") {
            None => None,
            Some(text) => {
                let rows = b.expr_rows("g", text, dim)?;
                if rows.len() != dim {
                    return Err(b.invalid("g", &format!("needs {dim} rows, got {}", rows.len())));
                }
                Some(rows)
            }
        };
        let u_keys = b
            .props
            .iter()
            .filter(|(k, _)| indexed(k, "u").is_some())
            .count();
        let u = match &g {
            None if u_keys > 0 => return Err(b.invalid("u1", "inputs need a `g` matrix")),
            None => None,
            Some(rows) => {
                let m = rows[0].len();
                if u_keys != m {
                    return Err(
                        b.invalid("u", &format!("g has {m} columns, so u1..u{m} are required"))
                    );
                }
                let mut u = Vec::with_capacity(m);
                for j in 1..=m {
                    u.push(b.req_expr(&format!("u{j}"), dim)?);
                }
                Some(u)
            }
        };
        Ok(SystemSpec { field, g, u })
    }

    pub fn density(&self, dim: usize) -> Result<DensitySpec, ConfigError> {
        let b = self.required("density", |k| {
            matches!(k, "family" | "alpha" | "P" | "S" | "rho" | "rho_inv")
        })?;
        let family = b.req("family")?;
        let allowed: &[&str] = match family {
            "norm-power" => &["family", "alpha"],
            "quadratic-form" => &["family", "alpha", "P"],
            "grad-norm" => &["family", "S"],
            "custom" => &["family", "rho", "rho_inv"],
            other => {
                return Err(b.invalid(
                    "family",
                    &format!(
                        "`{other}` is not one of norm-power, quadratic-form, grad-norm, custom"
                    ),
                ))
            }
        };
        if let Some((k, _)) = b.props.iter().find(|(k, _)| !allowed.contains(k)) {
            return Err(b.invalid(k, &format!("not used by family {family}")));
        }
        let bad = |key: &str, e: &dyn std::fmt::Display| b.invalid(key, &e.to_string());
        let (density, s) = match family {
            "norm-power" => {
                let alpha = b.req_f64("alpha")?;
                (
                    norm_power_density(alpha, dim).map_err(|e| bad("alpha", &e))?,
                    None,
                )
            }
            "quadratic-form" => {
                let alpha = b.req_f64("alpha")?;
                let p = b.req_matrix("P")?;
                if p.rows() != dim || p.cols() != dim {
                    return Err(b.invalid("P", &format!("must be {dim}x{dim}")));
                }
                (
                    quadratic_form_density(&p, alpha).map_err(|e| bad("P", &e))?,
                    None,
                )
            }
            "grad-norm" => {
                let s =
                    ScalarFunction::new(dim, b.req_expr("S", dim)?).map_err(|e| bad("S", &e))?;
                (grad_norm_density(&s), Some(s))
            }
            _ => {
                let rho = b.req_expr("rho", dim)?;
                let rho_inv = match b.get("rho_inv") {
                    Some(_) => b.req_expr("rho_inv", dim)?,
                    None => Expr::div(Expr::Const(1.0), rho.clone()),
                };
                (
                    DensityFunction::custom(dim, rho, rho_inv).map_err(|e| bad("rho", &e))?,
                    None,
                )
            }
        };
        Ok(DensitySpec { density, s })
    }

    pub fn check(&self, dim: usize, ov: &Overrides) -> Result<CheckSpec, ConfigError> {
        let b = self.required("check", |k| {
            matches!(
                k,
                "theorem"
                    | "cases"
                    | "r_min"
                    | "r_max"
                    | "box"
                    | "samples"
                    | "tol"
                    | "beta"
                    | "seed"
                    | "flux_radius"
            )
        })?;
        let theorem = match b.req("theorem")? {
            "necessary" => Theorem::Necessary,
            "sufficient" => Theorem::Sufficient,
            "theorem1" => Theorem::Theorem1,
            "closed-loop" => Theorem::ClosedLoop,
            "flux" => Theorem::Flux,
            other => return Err(b.invalid(
                "theorem",
                &format!(
                    "`{other}` is not one of necessary, sufficient, theorem1, closed-loop, flux"
                ),
            )),
        };
        let max_case = theorem.max_case();
        let cases = match b.get("cases") {
            None => (1..=max_case).collect(),
            Some(text) => {
                let mut cases = Vec::new();
                for part in text.split(',') {
                    let c: u8 = part.trim().parse().map_err(|_| {
                        b.invalid("cases", &format!("`{}` is not a case number", part.trim()))
                    })?;
                    if c == 0 || c > max_case {
                        return Err(
                            b.invalid("cases", &format!("case {c} is outside 1..={max_case}"))
                        );
                    }
                    if !cases.contains(&c) {
                        cases.push(c);
                    }
                }
                cases
            }
        };

        let defaults = CheckConfig::default();
        let mut cfg = CheckConfig {
            samples: b.opt_usize("samples")?.unwrap_or(defaults.samples),
            tol: b.opt_f64("tol")?.unwrap_or(defaults.tol),
            seed: b.opt_u64("seed")?.unwrap_or(defaults.seed),
            beta: b.opt_f64("beta")?.unwrap_or(defaults.beta),
            ..defaults
        };
        apply_overrides(&mut cfg, ov);
        cfg.validate()
            .map_err(|e| b.invalid("samples/tol/beta", &e.to_string()))?;

        let r_min = b.opt_f64("r_min")?.unwrap_or(0.1);
        let r_max = b.opt_f64("r_max")?.unwrap_or(2.0);
        let mut region = Region::annulus(dim, r_min, r_max)
            .map_err(|e| b.invalid("r_min/r_max", &e.to_string()))?;
        if b.get("box").is_some() {
            let m = b.req_matrix("box")?;
            if m.cols() != 2 {
                return Err(b.invalid("box", "each row must be `lo, hi`"));
            }
            let bounds = (0..m.rows()).map(|i| (m[(i, 0)], m[(i, 1)])).collect();
            region = region
                .with_box(bounds)
                .map_err(|e| b.invalid("box", &e.to_string()))?;
        }
        let flux_radius = b.opt_f64("flux_radius")?.unwrap_or(1.0);
        if !(flux_radius > 0.0 && flux_radius.is_finite()) {
            return Err(b.invalid("flux_radius", "must be positive"));
        }
        Ok(CheckSpec {
            theorem,
            cases,
            region,
            cfg,
            flux_radius,
        })
    }

    /// The `[check]` settings after overrides, or the defaults when the
    /// block is absent. Used for the report header.
    pub fn effective_check_config(&self, ov: &Overrides) -> CheckConfig {
        let mut cfg = CheckConfig::default();
        if let Some(p) = self.ini.section(Some("check")) {
            let num = |k: &str| p.get(k).and_then(|t| constant(t).ok());
            if let Some(v) = num("samples") {
                cfg.samples = v as usize;
            }
            if let Some(v) = num("tol") {
                cfg.tol = v;
            }
            if let Some(v) = p.get("seed").and_then(|t| t.trim().parse().ok()) {
                cfg.seed = v;
            }
        }
        apply_overrides(&mut cfg, ov);
        cfg
    }

    pub fn linear(&self, ov: &Overrides) -> Result<LinearSpec, ConfigError> {
        let b = self.required("linear", |k| {
            matches!(
                k,
                "A" | "B" | "K" | "P" | "mode" | "alpha" | "kappa" | "gamma" | "poles" | "seed"
            )
        })?;
        let a = b.req_matrix("A")?;
        if !a.is_square() {
            return Err(b.invalid("A", "must be square"));
        }
        let n = a.rows();
        let opt_matrix = |key: &str| -> Result<Option<Matrix>, ConfigError> {
            match b.get(key) {
                None => Ok(None),
                Some(_) => b.req_matrix(key).map(Some),
            }
        };
        let bm = opt_matrix("B")?;
        if let Some(bm) = &bm {
            if bm.rows() != n {
                return Err(b.invalid("B", &format!("must have {n} rows")));
            }
        }
        let k = opt_matrix("K")?;
        if let Some(k) = &k {
            let Some(bm) = &bm else {
                return Err(b.invalid("K", "needs B"));
            };
            if k.rows() != bm.cols() || k.cols() != n {
                return Err(b.invalid("K", &format!("must be {}x{n}", bm.cols())));
            }
        }
        let p = opt_matrix("P")?;
        if let Some(p) = &p {
            if p.rows() != n || p.cols() != n {
                return Err(b.invalid("P", &format!("must be {n}x{n}")));
            }
        }
        let mode = match b.get("mode") {
            None => None,
            Some(m) => {
                let (param, build): (&str, fn(f64) -> LinearCondition) =
                    match m {
                        "rantzer-eq7" => ("alpha", |alpha| LinearCondition::RantzerEq7 { alpha }),
                        "eq07" => ("alpha", |alpha| LinearCondition::Eq07 { alpha }),
                        "theorem7" => ("kappa", |kappa| LinearCondition::Theorem7 { kappa }),
                        "corollary1" => ("gamma", |gamma| LinearCondition::Corollary1 { gamma }),
                        other => return Err(b.invalid(
                            "mode",
                            &format!(
                                "`{other}` is not one of rantzer-eq7, eq07, theorem7, corollary1"
                            ),
                        )),
                    };
                let cond = build(b.req_f64(param)?);
                cond.validate()
                    .map_err(|e| b.invalid(param, &e.to_string()))?;
                Some(cond)
            }
        };
        let gamma = b.opt_f64("gamma")?;
        let poles = match b.get("poles") {
            None => None,
            Some(text) => {
                let poles = text
                    .split(',')
                    .map(|t| constant(t).map_err(|m| b.invalid("poles", &m)))
                    .collect::<Result<Vec<_>, _>>()?;
                if poles.len() != n {
                    return Err(b.invalid("poles", &format!("needs {n} values")));
                }
                Some(poles)
            }
        };
        let seed = ov
            .seed
            .or(b.opt_u64("seed")?)
            .unwrap_or(crate::synth::DEFAULT_SEED);
        Ok(LinearSpec {
            a,
            b: bm,
            k,
            p,
            mode,
            gamma,
            poles,
            seed,
        })
    }

    pub fn simulate(&self, dim: usize) -> Result<SimulateSpec, ConfigError> {
        let b = self.required("simulate", |k| {
            matches!(k, "points" | "circle" | "dt" | "T" | "delta_c" | "r_esc")
        })?;
        let mut points = Vec::new();
        if b.get("points").is_some() {
            let m = b.req_matrix("points")?;
            if m.cols() != dim {
                return Err(b.invalid("points", &format!("each point needs {dim} coordinates")));
            }
            points.extend((0..m.rows()).map(|i| m.row(i).to_vec()));
        }
        if let Some(text) = b.get("circle") {
            let parts: Vec<&str> = text.split(',').collect();
            if parts.len() != 2 {
                return Err(b.invalid("circle", "expected `count, radius`"));
            }
            let count: usize = parts[0]
                .trim()
                .parse()
                .map_err(|_| b.invalid("circle", "count must be a positive integer"))?;
            let r = constant(parts[1]).map_err(|m| b.invalid("circle", &m))?;
            if dim != 2 || count == 0 || r <= 0.0 {
                return Err(b.invalid("circle", "needs dim = 2, count >= 1 and radius > 0"));
            }
            points.extend(circle_grid(count, r));
        }
        if points.is_empty() {
            return Err(ConfigError::MissingKey {
                block: "simulate",
                key: "points".into(),
            });
        }
        let d = SimConfig::default();
        let cfg = SimConfig {
            dt: b.opt_f64("dt")?.unwrap_or(d.dt),
            t_end: b.opt_f64("T")?.unwrap_or(d.t_end),
            r_esc: b.opt_f64("r_esc")?.unwrap_or(d.r_esc),
            delta_c: b.opt_f64("delta_c")?.unwrap_or(d.delta_c),
        };
        cfg.validate()
            .map_err(|e| b.invalid("dt/T/delta_c/r_esc", &e.to_string()))?;
        Ok(SimulateSpec { points, cfg })
    }
}

fn apply_overrides(cfg: &mut CheckConfig, ov: &Overrides) {
    if let Some(s) = ov.seed {
        cfg.seed = s;
    }
    if let Some(n) = ov.samples {
        cfg.samples = n;
    }
    if let Some(t) = ov.tol {
        cfg.tol = t;
    }
}

/// `f3` with prefix `f` gives `Some(3)`.
fn indexed(key: &str, prefix: &str) -> Option<usize> {
    let rest = key.strip_prefix(prefix)?;
    if rest.is_empty() || rest.starts_with('0') || !rest.bytes().all(|c| c.is_ascii_digit()) {
        return None;
    }
    rest.parse().ok()
}

/// A closed constant expression such as `0.5` or `-1/3`.
fn constant(text: &str) -> Result<f64, String> {
    let e = parse_expr(text.trim(), 1).map_err(|e| format!("`{}`: {e}", text.trim()))?;
    if !e.is_closed() {
        return Err(format!("`{}` must be a constant", text.trim()));
    }
    let v = e.eval(&[]).map_err(|e| format!("`{}`: {e}", text.trim()))?;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(format!("`{}` is not finite", text.trim()))
    }
}

impl Block<'_> {
    fn get(&self, key: &str) -> Option<&str> {
        self.props.get(key)
    }

    fn req(&self, key: &str) -> Result<&str, ConfigError> {
        self.get(key).ok_or_else(|| ConfigError::MissingKey {
            block: self.name,
            key: key.to_string(),
        })
    }

    fn invalid(&self, key: &str, message: &str) -> ConfigError {
        ConfigError::Invalid {
            block: self.name,
            key: key.to_string(),
            message: message.to_string(),
        }
    }

    fn req_f64(&self, key: &str) -> Result<f64, ConfigError> {
        constant(self.req(key)?).map_err(|m| self.invalid(key, &m))
    }

    fn opt_f64(&self, key: &str) -> Result<Option<f64>, ConfigError> {
        self.get(key).map(|_| self.req_f64(key)).transpose()
    }

    fn req_usize(&self, key: &str) -> Result<usize, ConfigError> {
        let t = self.req(key)?.trim();
        t.parse()
            .map_err(|_| self.invalid(key, &format!("`{t}` is not a non-negative integer")))
    }

    fn opt_usize(&self, key: &str) -> Result<Option<usize>, ConfigError> {
        self.get(key).map(|_| self.req_usize(key)).transpose()
    }

    fn opt_u64(&self, key: &str) -> Result<Option<u64>, ConfigError> {
        self.get(key)
            .map(|t| {
                t.trim().parse().map_err(|_| {
                    self.invalid(key, &format!("`{}` is not an unsigned integer", t.trim()))
                })
            })
            .transpose()
    }

    fn req_expr(&self, key: &str, dim: usize) -> Result<Expr, ConfigError> {
        let t = self.req(key)?;
        parse_expr(t.trim(), dim).map_err(|e| self.invalid(key, &e.to_string()))
    }

    fn req_matrix(&self, key: &str) -> Result<Matrix, ConfigError> {
        let text = self.req(key)?;
        let rows = text
            .split(';')
            .map(|row| {
                row.split(',')
                    .map(|t| constant(t).map_err(|m| self.invalid(key, &m)))
                    .collect::<Result<Vec<f64>, _>>()
            })
            .collect::<Result<Vec<_>, _>>()?;
        Matrix::from_rows(&rows).map_err(|e| self.invalid(key, &e.to_string()))
    }

    fn expr_rows(&self, key: &str, text: &str, dim: usize) -> Result<Vec<Vec<Expr>>, ConfigError> {
        let rows = text
            .split(';')
            .map(|row| {
                row.split(',')
                    .map(|t| {
                        parse_expr(t.trim(), dim).map_err(|e| self.invalid(key, &e.to_string()))
                    })
                    .collect::<Result<Vec<_>, _>>()
            })
            .collect::<Result<Vec<_>, _>>()?;
        let width = rows[0].len();
        if rows.iter().any(|r| r.len() != width) {
            return Err(self.invalid(key, "rows must all have the same length"));
        }
        Ok(rows)
    }
}

#[derive(Debug, Clone)]
pub struct SystemSpec {
    pub field: VectorField,
    /// `n x m` input matrix, present together with `u`.
    pub g: Option<Vec<Vec<Expr>>>,
    pub u: Option<Vec<Expr>>,
}

#[derive(Debug, Clone)]
pub struct DensitySpec {
    pub density: DensityFunction,
    /// Set for the grad-norm family.
    pub s: Option<ScalarFunction>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Theorem {
    Necessary,
    Sufficient,
    Theorem1,
    ClosedLoop,
    Flux,
}

impl Theorem {
    fn max_case(self) -> u8 {
        match self {
            Theorem::Necessary | Theorem::Theorem1 => 2,
            Theorem::Sufficient | Theorem::ClosedLoop => 3,
            Theorem::Flux => 1,
        }
    }
}

#[derive(Debug, Clone)]
pub struct CheckSpec {
    pub theorem: Theorem,
    pub cases: Vec<u8>,
    pub region: Region,
    pub cfg: CheckConfig,
    pub flux_radius: f64,
}

#[derive(Debug, Clone)]
pub struct LinearSpec {
    pub a: Matrix,
    pub b: Option<Matrix>,
    pub k: Option<Matrix>,
    pub p: Option<Matrix>,
    pub mode: Option<LinearCondition>,
    pub gamma: Option<f64>,
    pub poles: Option<Vec<f64>>,
    pub seed: u64,
}

#[derive(Debug, Clone)]
pub struct SimulateSpec {
    pub points: Vec<Vec<f64>>,
    pub cfg: SimConfig,
}

#[cfg(test)]
mod tests {
    use super::*;

    const EX1: &str = "\
[system]
dim = 2
f1 = \"x2\"
f2 = \"-x1 - x1^2*x2 - x2^3\"

[density]
family = norm-power
alpha = 2

[check]
theorem = necessary
cases = 1, 2
r_min = 0.1
r_max = 2
";

    #[test]
    fn parses_a_full_analysis_config() {
        let c = Config::parse(EX1).unwrap();
        let sys = c.system().unwrap();
        assert_eq!(sys.field.dim(), 2);
        assert!(sys.g.is_none());
        let d = c.density(2).unwrap();
        assert_eq!(d.density.rho().eval(&[1.0, 1.0]).unwrap(), 4.0);
        let chk = c.check(2, &Overrides::default()).unwrap();
        assert_eq!(chk.theorem, Theorem::Necessary);
        assert_eq!(chk.cases, vec![1, 2]);
        assert_eq!(chk.cfg.samples, 2000);
        assert_eq!(chk.region.r_max(), 2.0);
    }

    #[test]
    fn overrides_take_precedence() {
        let c = Config::parse(EX1).unwrap();
        let ov = Overrides {
            seed: Some(7),
            samples: Some(300),
            tol: Some(1e-6),
        };
        let chk = c.check(2, &ov).unwrap();
        assert_eq!((chk.cfg.seed, chk.cfg.samples, chk.cfg.tol), (7, 300, 1e-6));
        assert_eq!(c.effective_check_config(&ov).samples, 300);
    }

    #[test]
    fn missing_block_is_named() {
        let c = Config::parse("[check]\ntheorem = necessary\n").unwrap();
        let e = c.system().unwrap_err();
        assert_eq!(e, ConfigError::MissingBlock("system"));
        assert!(e.to_string().contains("[system]"));
    }

    #[test]
    fn rejects_unknown_and_repeated_entries() {
        assert!(matches!(
            Config::parse("[sytem]\ndim = 2\n"),
            Err(ConfigError::UnknownBlock(_))
        ));
        assert!(matches!(
            Config::parse("dim = 2\n"),
            Err(ConfigError::Unsectioned(_))
        ));
        let c = Config::parse("[system]\ndim = 1\nf1 = -x1\nfoo = 1\n").unwrap();
        assert!(matches!(c.system(), Err(ConfigError::UnknownKey { .. })));
        let c = Config::parse("[system]\ndim = 1\nf1 = -x1\nf1 = x1\n").unwrap();
        assert!(matches!(c.system(), Err(ConfigError::DuplicateKey { .. })));
        let c = Config::parse("[system]\ndim = 1\nf1 = -x1\nf2 = x1\n").unwrap();
        assert!(matches!(c.system(), Err(ConfigError::Invalid { .. })));
    }

    #[test]
    fn matrices_and_constants() {
        let c = Config::parse(
            "[linear]\nA = 0,1; 1,1\nB = 0; 1\nK = -3, -4\nmode = corollary1\ngamma = 1/2\n",
        )
        .unwrap();
        let l = c.linear(&Overrides::default()).unwrap();
        assert_eq!(l.a, Matrix::from_rows(&[[0.0, 1.0], [1.0, 1.0]]).unwrap());
        assert_eq!(l.b.unwrap().cols(), 1);
        assert_eq!(l.mode, Some(LinearCondition::Corollary1 { gamma: 0.5 }));
        let ragged = Config::parse("[linear]\nA = 0,1; 1\n").unwrap();
        assert!(ragged.linear(&Overrides::default()).is_err());
        let wrong_k = Config::parse("[linear]\nA = 0,1; 1,1\nB = 0; 1\nK = 1,2,3\n").unwrap();
        assert!(wrong_k.linear(&Overrides::default()).is_err());
    }

    #[test]
    fn inputs_follow_g() {
        let text = "[system]\ndim = 2\nf1 = x2\nf2 = x1\ng = 0; 1\nu1 = \"-3*x1 - 4*x2\"\n";
        let sys = Config::parse(text).unwrap().system().unwrap();
        assert_eq!(sys.g.unwrap().len(), 2);
        assert_eq!(sys.u.unwrap().len(), 1);
        let missing_u = "[system]\ndim = 2\nf1 = x2\nf2 = x1\ng = 0; 1\n";
        assert!(Config::parse(missing_u).unwrap().system().is_err());
    }

    #[test]
    fn simulate_points_and_circle() {
        let text = "[simulate]\npoints = 0.5,0.5; 2,0.01\ncircle = 4, 2\nT = 10\n";
        let s = Config::parse(text).unwrap().simulate(2).unwrap();
        assert_eq!(s.points.len(), 6);
        assert_eq!(s.cfg.t_end, 10.0);
        assert!(Config::parse("[simulate]\nT = 1\n")
            .unwrap()
            .simulate(2)
            .is_err());
    }

    #[test]
    fn density_families() {
        let c = Config::parse("[density]\nfamily = grad-norm\nS = \"(x1^2 + x2^2)/2\"\n").unwrap();
        assert!(c.density(2).unwrap().s.is_some());
        let c = Config::parse("[density]\nfamily = custom\nrho = \"x1^2 + x2^2\"\n").unwrap();
        let d = c.density(2).unwrap().density;
        assert_eq!(d.rho_inv().eval(&[1.0, 1.0]).unwrap(), 0.5);
        let c = Config::parse("[density]\nfamily = norm-power\nalpha = 2\nP = 1,0; 0,1\n").unwrap();
        assert!(c.density(2).is_err());
    }
}
