//! Built-in cases. Every case is a list of labelled configs run through the
//! same parser and pipeline as user-supplied files.

use clap::ValueEnum;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Case {
    Ex1,
    Ex2,
    Ex3,
    Ex4,
    RantzerEq7,
    RantzerSynth,
    Thm7,
    Corollary1,
}

impl Case {
    pub fn name(self) -> &'static str {
        match self {
            Case::Ex1 => "ex1",
            Case::Ex2 => "ex2",
            Case::Ex3 => "ex3",
            Case::Ex4 => "ex4",
            Case::RantzerEq7 => "rantzer-eq7",
            Case::RantzerSynth => "rantzer-synth",
            Case::Thm7 => "thm7",
            Case::Corollary1 => "corollary1",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kind {
    Analyze,
    Linear,
    Synth,
    Simulate,
}

impl Kind {
    pub fn name(self) -> &'static str {
        match self {
            Kind::Analyze => "analyze",
            Kind::Linear => "linear",
            Kind::Synth => "synth",
            Kind::Simulate => "simulate",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Job {
    pub label: String,
    pub kind: Kind,
    pub config: String,
}

fn job(label: &str, kind: Kind, config: impl Into<String>) -> Job {
    Job {
        label: label.to_string(),
        kind,
        config: config.into(),
    }
}

fn ex1_system(c: i32) -> String {
    format!("[system]\ndim = 2\nf1 = \"x2\"\nf2 = \"-({c})*x1 - x1^2*x2 - x2^3\"\n")
}

const EX2_SYSTEM: &str = "[system]\ndim = 2\nf1 = \"-x1\"\nf2 = \"0.1*x2 - x1^2*x2\"\n";
const EX3_SYSTEM: &str = "[system]\ndim = 2\nf1 = \"-x1 + x1^2 - x2^2\"\nf2 = \"-x2 + 2*x1*x2\"\n";
const EX4_SYSTEM: &str =
    "[system]\ndim = 3\nf1 = \"x2 - 2*x1*x3^2\"\nf2 = \"-x1 - 2*x2*x3^2\"\nf3 = \"-2*x3^3\"\n";
const ANNULUS: &str = "r_min = 0.1\nr_max = 2\nsamples = 2000\nseed = 42\n";

const RANTZER_A: &str = "A = 0,1; 1,1\n";
const RANTZER_B: &str = "B = 0; 1\n";
const RANTZER_K: &str = "K = -0.7082, -2.2651\n";
const RANTZER_P: &str = "P = 0.7712,0.3508; 0.3508,1.122\n";

pub fn jobs(case: Case) -> Vec<Job> {
    match case {
        Case::Ex1 => {
            let mut out = Vec::new();
            for (tag, c) in [("c1", 1), ("cm1", -1)] {
                out.push(job(
                    &format!("ex1-{tag}"),
                    Kind::Analyze,
                    format!(
                        "{}\n[density]\nfamily = norm-power\nalpha = 2\n\n[check]\ntheorem = necessary\ncases = 1, 2\n{ANNULUS}",
                        ex1_system(c)
                    ),
                ));
            }
            out.push(job(
                "ex1-c1-flux",
                Kind::Analyze,
                format!(
                    "{}\n[density]\nfamily = norm-power\nalpha = 1\n\n[check]\ntheorem = flux\nflux_radius = 1\nsamples = 1000000\nseed = 42\n",
                    ex1_system(1)
                ),
            ));
            for (tag, c) in [("c1", 1), ("cm1", -1)] {
                out.push(job(
                    &format!("ex1-{tag}-portrait"),
                    Kind::Simulate,
                    format!("{}\n[simulate]\ncircle = 8, 2\ndt = 0.001\nT = 50\n", ex1_system(c)),
                ));
            }
            out
        }
        Case::Ex2 => vec![
            job(
                "ex2",
                Kind::Analyze,
                format!(
                    "{EX2_SYSTEM}\n[density]\nfamily = norm-power\nalpha = 2\n\n[check]\ntheorem = necessary\ncases = 1\n{ANNULUS}"
                ),
            ),
            job(
                "ex2",
                Kind::Analyze,
                format!(
                    "{EX2_SYSTEM}\n[density]\nfamily = norm-power\nalpha = 2\n\n[check]\ntheorem = sufficient\ncases = 1\n{ANNULUS}"
                ),
            ),
            job(
                "ex2-sim",
                Kind::Simulate,
                format!("{EX2_SYSTEM}\n[simulate]\npoints = 0.1, 0.1\ndt = 0.001\nT = 200\n"),
            ),
        ],
        Case::Ex3 => vec![
            job(
                "ex3",
                Kind::Analyze,
                format!(
                    "{EX3_SYSTEM}\n[density]\nfamily = norm-power\nalpha = 2\n\n[check]\ntheorem = necessary\ncases = 2\n{ANNULUS}"
                ),
            ),
            job(
                "ex3-sim",
                Kind::Simulate,
                format!("{EX3_SYSTEM}\n[simulate]\npoints = 0.5,0.5; 2,0.01; 1.5,0\ndt = 0.001\nT = 50\n"),
            ),
        ],
        Case::Ex4 => vec![
            job(
                "ex4",
                Kind::Analyze,
                format!(
                    "{EX4_SYSTEM}\n[density]\nfamily = norm-power\nalpha = 3\n\n[check]\ntheorem = sufficient\ncases = 1, 2, 3\nbeta = 1\n{ANNULUS}"
                ),
            ),
            job(
                "ex4-sim",
                Kind::Simulate,
                format!("{EX4_SYSTEM}\n[simulate]\npoints = 1,0.5,0; 1,0,0.5\ndt = 0.001\nT = 50\n"),
            ),
        ],
        Case::RantzerEq7 => vec![
            job(
                "rantzer-eq7-unstable",
                Kind::Linear,
                format!("[linear]\n{RANTZER_A}P = 0.6,0.3; 0.3,0.9\nmode = rantzer-eq7\nalpha = 0.2\n"),
            ),
            job(
                "rantzer-eq7-stable",
                Kind::Linear,
                "[linear]\nA = 0,1; -1,-1\nP = -1.5,-0.75; -0.75,-1.5\nmode = rantzer-eq7\nalpha = 1\n",
            ),
        ],
        Case::RantzerSynth => vec![
            job(
                "rantzer-synth",
                Kind::Linear,
                format!("[linear]\n{RANTZER_A}{RANTZER_B}{RANTZER_K}{RANTZER_P}mode = rantzer-eq7\nalpha = 1\n"),
            ),
            job(
                "rantzer-synth-density",
                Kind::Analyze,
                "[system]\ndim = 2\nf1 = \"x2\"\nf2 = \"x1 + x2\"\ng = 0; 1\nu1 = \"-0.7082*x1 - 2.2651*x2\"\n\n\
                 [density]\nfamily = quadratic-form\nP = 0.7712,0.3508; 0.3508,1.122\nalpha = 1\n\n\
                 [check]\ntheorem = closed-loop\ncases = 1\nr_min = 0.1\nr_max = 2\nsamples = 2000\nseed = 42\n",
            ),
            job(
                "rantzer-synth-sim",
                Kind::Simulate,
                "[system]\ndim = 2\nf1 = \"x2\"\nf2 = \"x1 + x2 - 0.7082*x1 - 2.2651*x2\"\n\n\
                 [simulate]\npoints = 1,0; 0,1\ndt = 0.001\nT = 50\n",
            ),
        ],
        Case::Thm7 => vec![
            job(
                "thm7-unstable",
                Kind::Linear,
                format!("[linear]\n{RANTZER_A}mode = theorem7\nkappa = 0\n"),
            ),
            job(
                "thm7-stable",
                Kind::Linear,
                "[linear]\nA = 0,1; -1,-1\nmode = theorem7\nkappa = 0.5\n",
            ),
            job(
                "thm7-boundary",
                Kind::Linear,
                "[linear]\nA = 0,1; -1,-1\nmode = theorem7\nkappa = 1\n",
            ),
            job(
                "thm7-positive-trace",
                Kind::Linear,
                "[linear]\nA = 1,0; 0,-0.5\nmode = theorem7\nkappa = 6\n",
            ),
        ],
        Case::Corollary1 => vec![
            job(
                "corollary1-found",
                Kind::Linear,
                "[linear]\nA = 0,1; -1,-1\nmode = corollary1\ngamma = 0.5\n",
            ),
            job(
                "corollary1-too-fast",
                Kind::Linear,
                "[linear]\nA = 0,1; -1,-1\nmode = corollary1\ngamma = 2\n",
            ),
            job(
                "corollary1-synth",
                Kind::Synth,
                format!("[linear]\n{RANTZER_A}{RANTZER_B}gamma = 1\n"),
            ),
        ],
    }
}
