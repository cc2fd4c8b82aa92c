//! Fixed-step RK4 trajectories, their classification, and CSV output.
//!
//! Classification uses the thresholds first: escape beyond `r_esc` (or a
//! non-finite state) is DIVERGED and reaching `delta_c` is CONVERGED. A
//! trajectory that runs to the horizon is classified by the log-log slope of
//! `|x|` against `t` over the last half of the horizon, which separates
//! algebraic decay and growth from orbits of constant size.

use std::fmt;
use std::fs;
use std::io::{self, Write};
use std::path::Path;

use thiserror::Error;

use crate::exec::Exec;
use crate::expr::{EvalError, VectorField};

/// Slope magnitude of `log|x|` against `log t` that counts as a trend.
pub const TREND_SLOPE: f64 = 0.25;
/// Trailing share of the horizon used for the trend fit.
pub const TREND_WINDOW: f64 = 0.5;
const TREND_POINTS: usize = 256;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SimError {
    #[error("time step must be positive and no larger than the horizon (dt = {dt}, T = {t_end})")]
    InvalidStep { dt: f64, t_end: f64 },
    #[error("thresholds must satisfy 0 < delta_c < r_esc (delta_c = {delta_c}, r_esc = {r_esc})")]
    InvalidThresholds { delta_c: f64, r_esc: f64 },
    #[error("initial point has dimension {got}, field has dimension {expected}")]
    DimensionMismatch { expected: usize, got: usize },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimConfig {
    pub dt: f64,
    pub t_end: f64,
    pub r_esc: f64,
    pub delta_c: f64,
}

impl Default for SimConfig {
    fn default() -> Self {
        Self {
            dt: 1e-3,
            t_end: 50.0,
            r_esc: 1e6,
            delta_c: 1e-8,
        }
    }
}

impl SimConfig {
    pub fn validate(&self) -> Result<(), SimError> {
        if !(self.dt > 0.0 && self.t_end >= self.dt && self.t_end.is_finite()) {
            return Err(SimError::InvalidStep {
                dt: self.dt,
                t_end: self.t_end,
            });
        }
        if !(self.delta_c > 0.0 && self.delta_c < self.r_esc) {
            return Err(SimError::InvalidThresholds {
                delta_c: self.delta_c,
                r_esc: self.r_esc,
            });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Termination {
    Horizon,
    /// `|x| ≥ r_esc`, or a state overflowed.
    Escape,
    /// `|x| ≤ delta_c`.
    Converged,
    /// The field could not be evaluated; the trajectory is truncated.
    EvalFailed(EvalError),
}

impl Termination {
    pub fn as_str(&self) -> &'static str {
        match self {
            Self::Horizon => "horizon",
            Self::Escape => "escape",
            Self::Converged => "converged",
            Self::EvalFailed(_) => "eval-error",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub dt: f64,
    pub t_end: f64,
    pub times: Vec<f64>,
    pub states: Vec<Vec<f64>>,
    pub termination: Termination,
}

impl Trajectory {
    pub fn final_state(&self) -> &[f64] {
        self.states
            .last()
            .expect("trajectory holds the initial state")
    }

    pub fn final_time(&self) -> f64 {
        *self
            .times
            .last()
            .expect("trajectory holds the initial time")
    }

    pub fn dim(&self) -> usize {
        self.states[0].len()
    }
}

fn norm(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>().sqrt()
}

struct Rk4 {
    k: [Vec<f64>; 4],
    tmp: Vec<f64>,
}

impl Rk4 {
    fn new(n: usize) -> Self {
        Self {
            k: [vec![0.0; n], vec![0.0; n], vec![0.0; n], vec![0.0; n]],
            tmp: vec![0.0; n],
        }
    }

    fn step(&mut self, f: &VectorField, x: &[f64], dt: f64) -> Result<Vec<f64>, EvalError> {
        let [k1, k2, k3, k4] = &mut self.k;
        f.eval_into(x, k1)?;
        for (t, (xi, ki)) in self.tmp.iter_mut().zip(x.iter().zip(k1.iter())) {
            *t = xi + 0.5 * dt * ki;
        }
        f.eval_into(&self.tmp, k2)?;
        for (t, (xi, ki)) in self.tmp.iter_mut().zip(x.iter().zip(k2.iter())) {
            *t = xi + 0.5 * dt * ki;
        }
        f.eval_into(&self.tmp, k3)?;
        for (t, (xi, ki)) in self.tmp.iter_mut().zip(x.iter().zip(k3.iter())) {
            *t = xi + dt * ki;
        }
        f.eval_into(&self.tmp, k4)?;
        Ok((0..x.len())
            .map(|i| x[i] + dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]))
            .collect())
    }
}

/// Classical RK4 with default thresholds.
pub fn integrate_rk4(
    f: &VectorField,
    x0: &[f64],
    dt: f64,
    t_end: f64,
) -> Result<Trajectory, SimError> {
    integrate(
        f,
        x0,
        &SimConfig {
            dt,
            t_end,
            ..SimConfig::default()
        },
    )
}

/// Integrates `round(T/dt)` steps of size `dt`, stopping early at the escape
/// radius or the convergence threshold.
pub fn integrate(f: &VectorField, x0: &[f64], cfg: &SimConfig) -> Result<Trajectory, SimError> {
    cfg.validate()?;
    if x0.len() != f.dim() {
        return Err(SimError::DimensionMismatch {
            expected: f.dim(),
            got: x0.len(),
        });
    }
    let steps = ((cfg.t_end / cfg.dt).round() as usize).max(1);
    let mut times = vec![0.0];
    let mut states = vec![x0.to_vec()];
    let settled = |x: &[f64]| {
        let r = norm(x);
        if !r.is_finite() || r >= cfg.r_esc {
            Some(Termination::Escape)
        } else if r <= cfg.delta_c {
            Some(Termination::Converged)
        } else {
            None
        }
    };
    let mut termination = settled(x0).unwrap_or(Termination::Horizon);
    if termination == Termination::Horizon {
        let mut rk = Rk4::new(x0.len());
        let mut x = x0.to_vec();
        for k in 1..=steps {
            match rk.step(f, &x, cfg.dt) {
                Err(e) => {
                    termination = Termination::EvalFailed(e);
                    break;
                }
                Ok(next) if next.iter().any(|v| !v.is_finite()) => {
                    termination = Termination::Escape;
                    break;
                }
                Ok(next) => x = next,
            }
            times.push(k as f64 * cfg.dt);
            states.push(x.clone());
            if let Some(t) = settled(&x) {
                termination = t;
                break;
            }
        }
    }
    Ok(Trajectory {
        dt: cfg.dt,
        t_end: cfg.t_end,
        times,
        states,
        termination,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TrajectoryClass {
    Converged,
    Diverged,
    Bounded,
}

impl fmt::Display for TrajectoryClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Converged => "CONVERGED",
            Self::Diverged => "DIVERGED",
            Self::Bounded => "BOUNDED",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Classification {
    pub class: TrajectoryClass,
    /// `threshold`, `trend`, or `eval-error`.
    pub basis: &'static str,
    pub trend_slope: Option<f64>,
    pub final_norm: f64,
}

/// Least-squares slope of `log|x|` against `log t` over the trailing window.
pub fn trend_slope(tr: &Trajectory) -> Option<f64> {
    let t_final = tr.final_time();
    let start = tr
        .times
        .partition_point(|&t| t < t_final * (1.0 - TREND_WINDOW))
        .max(1);
    let len = tr.times.len().saturating_sub(start);
    if len < 2 {
        return None;
    }
    let stride = (len / TREND_POINTS).max(1);
    let pts: Vec<(f64, f64)> = (start..tr.times.len())
        .step_by(stride)
        .filter_map(|i| {
            let r = norm(&tr.states[i]);
            (r > 0.0 && tr.times[i] > 0.0).then(|| (tr.times[i].ln(), r.ln()))
        })
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

pub fn classify_trajectory(tr: &Trajectory, delta_c: f64, r_esc: f64) -> Classification {
    let final_norm = norm(tr.final_state());
    let with = |class, basis, trend_slope| Classification {
        class,
        basis,
        trend_slope,
        final_norm,
    };
    if matches!(tr.termination, Termination::Escape)
        || !final_norm.is_finite()
        || final_norm >= r_esc
    {
        return with(TrajectoryClass::Diverged, "threshold", None);
    }
    if final_norm <= delta_c {
        return with(TrajectoryClass::Converged, "threshold", None);
    }
    if matches!(tr.termination, Termination::EvalFailed(_)) {
        return with(TrajectoryClass::Bounded, "eval-error", None);
    }
    let slope = trend_slope(tr);
    let class = match slope {
        Some(s) if s <= -TREND_SLOPE => TrajectoryClass::Converged,
        Some(s) if s >= TREND_SLOPE => TrajectoryClass::Diverged,
        _ => TrajectoryClass::Bounded,
    };
    with(class, "trend", slope)
}

#[derive(Debug, Clone, PartialEq)]
pub struct PortraitEntry {
    pub x0: Vec<f64>,
    pub trajectory: Trajectory,
    pub classification: Classification,
}

/// One classified trajectory per initial point, in input order.
pub fn phase_portrait(
    f: &VectorField,
    grid: &[Vec<f64>],
    cfg: &SimConfig,
    exec: Exec,
) -> Result<Vec<PortraitEntry>, SimError> {
    cfg.validate()?;
    if let Some(p) = grid.iter().find(|p| p.len() != f.dim()) {
        return Err(SimError::DimensionMismatch {
            expected: f.dim(),
            got: p.len(),
        });
    }
    let out = exec.map_slice(grid, |x0| {
        let trajectory = integrate(f, x0, cfg).expect("inputs validated above");
        let classification = classify_trajectory(&trajectory, cfg.delta_c, cfg.r_esc);
        PortraitEntry {
            x0: x0.clone(),
            trajectory,
            classification,
        }
    });
    Ok(out)
}

/// Evenly spaced points on the circle of radius `r` in the `x1, x2` plane.
pub fn circle_grid(count: usize, r: f64) -> Vec<Vec<f64>> {
    (0..count)
        .map(|k| {
            let th = 2.0 * std::f64::consts::PI * k as f64 / count as f64;
            vec![r * th.cos(), r * th.sin()]
        })
        .collect()
}

pub fn write_trajectory_csv<W: Write>(w: &mut W, tr: &Trajectory) -> io::Result<()> {
    let header: Vec<String> = (1..=tr.dim()).map(|i| format!("x{i}")).collect();
    writeln!(w, "t,{}", header.join(","))?;
    for (t, x) in tr.times.iter().zip(&tr.states) {
        write!(w, "{t}")?;
        for v in x {
            write!(w, ",{v}")?;
        }
        writeln!(w)?;
    }
    Ok(())
}

pub fn write_manifest_csv<W: Write>(w: &mut W, entries: &[PortraitEntry]) -> io::Result<()> {
    let n = entries.first().map_or(0, |e| e.x0.len());
    let header: Vec<String> = (1..=n).map(|i| format!("x0_{i}")).collect();
    writeln!(w, "index,{},class,t_final", header.join(","))?;
    for (i, e) in entries.iter().enumerate() {
        write!(w, "{i}")?;
        for v in &e.x0 {
            write!(w, ",{v}")?;
        }
        writeln!(
            w,
            ",{},{}",
            e.classification.class,
            e.trajectory.final_time()
        )?;
    }
    Ok(())
}

/// Writes `trajectory_{i}.csv` per entry and `manifest.csv` into `dir`.
pub fn write_portrait(dir: &Path, entries: &[PortraitEntry]) -> io::Result<()> {
    fs::create_dir_all(dir)?;
    for (i, e) in entries.iter().enumerate() {
        let mut w = io::BufWriter::new(fs::File::create(dir.join(format!("trajectory_{i}.csv")))?);
        write_trajectory_csv(&mut w, &e.trajectory)?;
        w.flush()?;
    }
    let mut w = io::BufWriter::new(fs::File::create(dir.join("manifest.csv"))?);
    write_manifest_csv(&mut w, entries)?;
    w.flush()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn decay() -> VectorField {
        VectorField::parse(&["-x1"]).unwrap()
    }

    fn cls(f: &VectorField, x0: &[f64], t_end: f64) -> TrajectoryClass {
        let cfg = SimConfig {
            t_end,
            ..SimConfig::default()
        };
        let tr = integrate(f, x0, &cfg).unwrap();
        classify_trajectory(&tr, cfg.delta_c, cfg.r_esc).class
    }

    #[test]
    fn exponential_decay() {
        let tr = integrate_rk4(&decay(), &[1.0], 0.01, 10.0).unwrap();
        assert!((tr.final_state()[0] - (-10.0f64).exp()).abs() < 1e-6);
        assert_eq!(tr.termination, Termination::Horizon);
        assert!(tr.times.windows(2).all(|w| w[1] > w[0]));
        assert_eq!(tr.times.len(), 1001);
    }

    #[test]
    fn equilibrium_is_stationary() {
        let f = VectorField::parse(&["x2", "-x1 - x1^2*x2 - x2^3"]).unwrap();
        let tr = integrate_rk4(&f, &[0.0, 0.0], 0.01, 1.0).unwrap();
        assert!(tr.states.iter().all(|x| x.iter().all(|&v| v == 0.0)));
        assert_eq!(
            classify_trajectory(&tr, 1e-8, 1e6).class,
            TrajectoryClass::Converged
        );
    }

    #[test]
    fn example3_basin() {
        let f = VectorField::parse(&["-x1 + x1^2 - x2^2", "-x2 + 2*x1*x2"]).unwrap();
        assert_eq!(cls(&f, &[0.5, 0.5], 50.0), TrajectoryClass::Converged);
        assert_eq!(cls(&f, &[1.5, 0.0], 50.0), TrajectoryClass::Diverged);
    }

    #[test]
    fn example3_blowup_time() {
        // z = x1 + i·x2 solves z' = z² - z; from z0 = 1.5 it blows up at ln 3.
        let f = VectorField::parse(&["-x1 + x1^2 - x2^2", "-x2 + 2*x1*x2"]).unwrap();
        let tr = integrate_rk4(&f, &[1.5, 0.0], 1e-4, 5.0).unwrap();
        assert_eq!(tr.termination, Termination::Escape);
        assert!((tr.final_time() - 3f64.ln()).abs() < 1e-3);
    }

    #[test]
    fn example4_cycle_and_spiral() {
        let f = VectorField::parse(&["x2 - 2*x1*x3^2", "-x1 - 2*x2*x3^2", "-2*x3^3"]).unwrap();
        assert_eq!(cls(&f, &[1.0, 0.5, 0.0], 50.0), TrajectoryClass::Bounded);
        assert_eq!(cls(&f, &[1.0, 0.0, 0.5], 50.0), TrajectoryClass::Converged);
    }

    #[test]
    fn example2_partial_stability() {
        let f = VectorField::parse(&["-x1", "0.1*x2 - x1^2*x2"]).unwrap();
        let cfg = SimConfig {
            t_end: 200.0,
            ..SimConfig::default()
        };
        let tr = integrate(&f, &[0.1, 0.1], &cfg).unwrap();
        assert_eq!(
            classify_trajectory(&tr, cfg.delta_c, cfg.r_esc).class,
            TrajectoryClass::Diverged
        );
        assert!(tr.final_state()[0].abs() <= 1e-6);
    }

    #[test]
    fn example1_portraits() {
        let stable = VectorField::parse(&["x2", "-x1 - x1^2*x2 - x2^3"]).unwrap();
        let unstable = VectorField::parse(&["x2", "x1 - x1^2*x2 - x2^3"]).unwrap();
        let grid = circle_grid(8, 2.0);
        let cfg = SimConfig::default();
        let a = phase_portrait(&stable, &grid, &cfg, Exec::default()).unwrap();
        assert!(a
            .iter()
            .all(|e| e.classification.class == TrajectoryClass::Converged));
        let b = phase_portrait(&unstable, &grid, &cfg, Exec::default()).unwrap();
        assert!(b
            .iter()
            .any(|e| e.classification.class == TrajectoryClass::Diverged));
    }

    #[test]
    fn rk4_fourth_order() {
        let exact = (-1.0f64).exp();
        let e1 = (integrate_rk4(&decay(), &[1.0], 1e-2, 1.0)
            .unwrap()
            .final_state()[0]
            - exact)
            .abs();
        let e2 = (integrate_rk4(&decay(), &[1.0], 5e-3, 1.0)
            .unwrap()
            .final_state()[0]
            - exact)
            .abs();
        let ratio = e1 / e2;
        assert!((12.0..=20.0).contains(&ratio), "ratio {ratio}");
    }

    #[test]
    fn domain_error_truncates() {
        let f = VectorField::parse(&["1 + 0*ln(1 - x1)"]).unwrap();
        let tr = integrate_rk4(&f, &[0.5], 1e-2, 2.0).unwrap();
        assert!(
            matches!(tr.termination, Termination::EvalFailed(_)),
            "{:?} {:?}",
            tr.termination,
            tr.final_state()
        );
        assert!(tr.final_state()[0] < 1.0);
        let c = classify_trajectory(&tr, 1e-8, 1e6);
        assert_eq!(c.basis, "eval-error");
    }

    #[test]
    fn invalid_inputs() {
        assert!(integrate_rk4(&decay(), &[1.0], 0.0, 1.0).is_err());
        assert!(integrate_rk4(&decay(), &[1.0], 1.0, 0.5).is_err());
        assert!(integrate_rk4(&decay(), &[1.0, 2.0], 0.1, 1.0).is_err());
    }

    #[test]
    fn csv_layout() {
        let tr = integrate_rk4(&decay(), &[1.0], 0.5, 1.0).unwrap();
        let mut buf = Vec::new();
        write_trajectory_csv(&mut buf, &tr).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "t,x1");
        assert_eq!(lines.len(), 4);
        assert!(lines[1].starts_with("0,1"));

        let entries = phase_portrait(
            &decay(),
            &[vec![1.0], vec![2.0]],
            &SimConfig::default(),
            Exec::Sequential,
        )
        .unwrap();
        let mut buf = Vec::new();
        write_manifest_csv(&mut buf, &entries).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("index,x0_1,class,t_final\n0,1,CONVERGED,"));
    }
}
