//! Plain-text report: a header, then one `RESULT:` line per check followed
//! by indented detail lines. Nothing time- or thread-dependent is written,
//! so identical inputs give identical bytes.

use std::fmt::{Display, Write};

use sha2::{Digest, Sha256};

use crate::divcheck::{CheckConfig, FluxEstimate, Verdict, LIMIT_ZERO};
use crate::sim::{PortraitEntry, SimConfig, TREND_SLOPE, TREND_WINDOW};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// SHA-256 over `(label, text)` pairs, length-prefixed so that moving bytes
/// between parts changes the digest.
pub fn config_hash(parts: &[(&str, &str)]) -> String {
    let mut h = Sha256::new();
    for (label, text) in parts {
        for s in [label, text] {
            h.update((s.len() as u64).to_le_bytes());
            h.update(s.as_bytes());
        }
    }
    hex::encode(h.finalize())
}

pub struct Report {
    text: String,
}

impl Report {
    pub fn new(command: &str, hash: &str, cfg: &CheckConfig) -> Self {
        let sim = SimConfig::default();
        let mut text = String::new();
        let _ = writeln!(text, "divstab report");
        let _ = writeln!(text, "version: {VERSION}");
        let _ = writeln!(text, "command: {command}");
        let _ = writeln!(text, "config_hash: {hash}");
        let _ = writeln!(text, "seed: {}", cfg.seed);
        let _ = writeln!(text, "samples: {}", cfg.samples);
        let _ = writeln!(text, "tol: {:e}", cfg.tol);
        let _ = writeln!(
            text,
            "thresholds: band=tol*(1+max|v|) limit_zero={LIMIT_ZERO:e} limit_steps={} limit_directions={} \
             plane_fraction={} linear_tol=1e-9*(1+max|slack|) delta_c={:e} r_esc={:e} trend_slope={TREND_SLOPE} \
             trend_window={TREND_WINDOW}",
            cfg.limit_steps, cfg.limit_directions, cfg.plane_fraction, sim.delta_c, sim.r_esc
        );
        Self { text }
    }

    pub fn result(&mut self, label: &str, status: &str, fields: &[(&str, String)]) {
        let _ = write!(self.text, "\nRESULT: {label} {status}");
        for (k, v) in fields {
            let _ = write!(self.text, " {k}={v}");
        }
        self.text.push('\n');
    }

    /// Opens the section for one job; its context lines follow.
    pub fn detail_block(&mut self, label: &str, kind: &str) {
        let _ = write!(self.text, "\nJOB: {label} {kind}\n");
    }

    pub fn detail(&mut self, key: &str, value: impl Display) {
        let _ = writeln!(self.text, "  {key}: {value}");
    }

    pub fn as_str(&self) -> &str {
        &self.text
    }

    pub fn into_string(self) -> String {
        self.text
    }

    pub fn verdict(&mut self, label: &str, v: &Verdict) {
        let witness = v
            .witness
            .as_ref()
            .map_or("none".to_string(), |w| point(&w.point));
        self.result(
            &format!("{label}/{}", v.check),
            v.status.as_str(),
            &[
                ("strict", v.strict.to_string()),
                ("samples", v.samples.to_string()),
                ("witness", witness),
            ],
        );
        self.detail("condition", &v.condition);
        if let Some(m) = &v.margins {
            self.detail(
                "margins",
                format!("min={:e} max={:e} mean={:e}", m.min, m.max, m.mean),
            );
        }
        self.detail("band", format!("{:e}", v.band));
        self.detail(
            "counts",
            format!(
                "satisfied={} boundary={} violated={}",
                v.counts.satisfied, v.counts.boundary, v.counts.violated
            ),
        );
        if let Some(w) = &v.witness {
            self.detail(
                "witness",
                format!("{} value={:e} ({})", point(&w.point), w.value, w.condition),
            );
        }
        for s in &v.sides {
            self.detail(
                "side",
                format!(
                    "{} {} satisfied={} boundary={} violated={}",
                    s.condition,
                    if s.holds() { "holds" } else { "violated" },
                    s.counts.satisfied,
                    s.counts.boundary,
                    s.counts.violated
                ),
            );
            if let Some(w) = &s.worst {
                self.detail(
                    "side_witness",
                    format!("{} value={:e}", point(&w.point), w.value),
                );
            }
        }
        if !v.equality_locus.is_empty() {
            let locus: Vec<String> = v.equality_locus.iter().map(|j| format!("x{j}=0")).collect();
            self.detail("equality_locus", locus.join(" "));
        }
        for l in &v.limits {
            let text = match (&l.error, l.magnitudes.last(), l.radii.last()) {
                (Some(e), _, _) => format!("{} -> error ({e})", l.quantity),
                (None, Some(last), Some(radius)) => {
                    let state = if l.is_zero { "zero" } else { "not zero" };
                    format!(
                        "{} -> {state} (max |value| {last:e} at radius {radius:e})",
                        l.quantity
                    )
                }
                (None, ..) => format!(
                    "{} -> {}",
                    l.quantity,
                    if l.is_zero { "zero" } else { "not zero" }
                ),
            };
            self.detail("limit", text);
        }
        if let Some(i) = &v.integrability {
            self.detail(
                "integrability",
                format!(
                    "radial exponent {:.3} in dimension {} -> {}",
                    i.exponent,
                    i.dim,
                    if i.likely_integrable {
                        "likely integrable"
                    } else {
                        "likely not integrable"
                    }
                ),
            );
        }
        if let Some(e) = &v.domain_error {
            self.detail("domain_error", e);
        }
        if let Some(c) = v.claim() {
            self.detail("claim", c);
        }
        for n in &v.notes {
            self.detail("note", n);
        }
    }

    pub fn flux(&mut self, label: &str, est: &FluxEstimate) {
        let agree =
            est.flux.signum() == est.volume_integral.signum() && est.relative_difference() <= 0.05;
        self.result(
            &format!("{label}/flux"),
            if agree { "AGREE" } else { "DISAGREE" },
            &[
                ("flux", format!("{:e}", est.flux)),
                ("volume_integral", format!("{:e}", est.volume_integral)),
                (
                    "relative_difference",
                    format!("{:.4}", est.relative_difference()),
                ),
            ],
        );
        self.detail("radius", est.radius);
        self.detail("inner_radius", est.inner_radius);
        self.detail("samples", est.samples);
        self.detail("agreement", "same sign and relative difference <= 0.05");
    }

    pub fn portrait(
        &mut self,
        label: &str,
        entries: &[PortraitEntry],
        cfg: &SimConfig,
        csv_dir: &str,
    ) {
        for (i, e) in entries.iter().enumerate() {
            let c = &e.classification;
            self.result(
                &format!("{label}/trajectory_{i}"),
                &c.class.to_string(),
                &[
                    ("x0", point(&e.x0)),
                    ("basis", c.basis.to_string()),
                    ("final_norm", format!("{:e}", c.final_norm)),
                ],
            );
            self.detail("termination", e.trajectory.termination.as_str());
            self.detail("final_time", e.trajectory.final_time());
            self.detail("final_state", point(e.trajectory.final_state()));
            if let Some(s) = c.trend_slope {
                self.detail("trend_slope", format!("{s:.4}"));
            }
            if let crate::sim::Termination::EvalFailed(err) = &e.trajectory.termination {
                self.detail("domain_error", err);
            }
        }
        self.detail(
            "integration",
            format!(
                "rk4 dt={} T={} delta_c={:e} r_esc={:e} csv={csv_dir}",
                cfg.dt, cfg.t_end, cfg.delta_c, cfg.r_esc
            ),
        );
    }
}

/// `(a, b, c)` with full precision.
pub fn point(x: &[f64]) -> String {
    let parts: Vec<String> = x.iter().map(|v| v.to_string()).collect();
    format!("({})", parts.join(","))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hash_is_stable_and_order_sensitive() {
        let a = config_hash(&[("x", "abc"), ("y", "d")]);
        assert_eq!(a, config_hash(&[("x", "abc"), ("y", "d")]));
        assert_ne!(a, config_hash(&[("x", "ab"), ("y", "cd")]));
        assert_eq!(a.len(), 64);
    }

    #[test]
    fn result_lines_are_greppable() {
        let mut r = Report::new("analyze", "00", &CheckConfig::default());
        r.result("job/check", "VIOLATED", &[("strict", "false".into())]);
        r.detail("condition", "x < 0");
        let text = r.into_string();
        assert!(text.contains("\nRESULT: job/check VIOLATED strict=false\n  condition: x < 0\n"));
        assert!(text.starts_with("divstab report\nversion: "));
        assert!(text.contains("seed: 42\nsamples: 2000\ntol: 1e-9\n"));
    }
}
