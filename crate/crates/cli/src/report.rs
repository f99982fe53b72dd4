//! Serializable reports. Field order is declaration order; numbers are
//! rounded to 15 significant digits before serialization.

use qubit_coexist::coexist::{BoundaryCurve, BoundarySample};
use qubit_coexist::oracle::OracleResult;
use qubit_coexist::selftest::{SelfTestReport, SuiteOutcome};
use qubit_coexist::witness::FoundWitness;
use qubit_coexist::{BlochEffect64, Vec3, Verdict64, WitnessObservable64};
use serde::Serialize;

/// Rounds to 15 significant digits; `-0` becomes `0`.
pub fn r15(x: f64) -> f64 {
    if !x.is_finite() {
        return x;
    }
    let y: f64 = format!("{x:.14e}").parse().expect("formatted float parses");
    if y == 0.0 {
        0.0
    } else {
        y
    }
}

fn v3(v: Vec3<f64>) -> [f64; 3] {
    v.to_array().map(r15)
}

#[derive(Debug, Serialize)]
pub struct EffectOut {
    pub alpha: f64,
    pub a: [f64; 3],
}

impl From<&BlochEffect64> for EffectOut {
    fn from(e: &BlochEffect64) -> Self {
        Self {
            alpha: r15(e.alpha()),
            a: v3(e.avec()),
        }
    }
}

#[derive(Debug, Serialize)]
pub struct WitnessOut {
    pub gamma: f64,
    pub g: [f64; 3],
    pub source: String,
    pub worst_residual: f64,
    pub effects: Vec<EffectOut>,
}

impl WitnessOut {
    pub fn new(found: &FoundWitness<f64>, obs: &WitnessObservable64) -> Self {
        Self {
            gamma: r15(found.witness.gamma),
            g: v3(found.witness.gvec),
            source: format!("{:?}", found.source),
            worst_residual: r15(found.report.worst_residual()),
            effects: obs.effects.iter().map(EffectOut::from).collect(),
        }
    }
}

#[derive(Debug, Serialize)]
pub struct OracleOut {
    pub coexistent: bool,
    pub margin: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gamma: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub g: Option<[f64; 3]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gamma_interval: Option<[f64; 2]>,
}

impl From<&OracleResult<f64>> for OracleOut {
    fn from(r: &OracleResult<f64>) -> Self {
        Self {
            coexistent: r.coexistent,
            margin: r15(r.margin),
            gamma: r.certificate.map(|c| r15(c.gamma)),
            g: r.certificate.map(|c| v3(c.gvec)),
            gamma_interval: r.gamma_interval.map(|(lo, hi)| [r15(lo), r15(hi)]),
        }
    }
}

#[derive(Debug, Serialize)]
pub struct VerdictReport {
    pub coexistent: bool,
    pub regime: &'static str,
    #[serde(rename = "sharpnessA")]
    pub sharpness_a: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub b0: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub w: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub by_max: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<WitnessOut>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub oracle: Option<OracleOut>,
}

impl From<&Verdict64> for VerdictReport {
    fn from(v: &Verdict64) -> Self {
        Self {
            coexistent: v.coexistent,
            regime: v.regime.as_str(),
            sharpness_a: r15(v.sharpness_a),
            b0: v.b0.map(r15),
            w: v.w.map(r15),
            by_max: v.by_max.map(r15),
            witness: None,
            oracle: None,
        }
    }
}

#[derive(Debug, Serialize)]
pub struct SampleOut {
    pub bx: f64,
    pub r: f64,
    pub regime: &'static str,
}

impl From<&BoundarySample<f64>> for SampleOut {
    fn from(s: &BoundarySample<f64>) -> Self {
        Self {
            bx: r15(s.bx),
            r: r15(s.r),
            regime: s.regime.as_str(),
        }
    }
}

#[derive(Debug, Serialize)]
pub struct CurveOut {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub preset: Option<&'static str>,
    pub alpha: f64,
    pub a: f64,
    pub beta: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub b0: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub w: Option<f64>,
    pub samples: Vec<SampleOut>,
}

impl CurveOut {
    pub fn new(c: &BoundaryCurve<f64>, preset: Option<&'static str>) -> Self {
        Self {
            preset,
            alpha: r15(c.alpha),
            a: r15(c.a),
            beta: r15(c.beta),
            b0: c.interval.map(|i| r15(i.b0)),
            w: c.interval.map(|i| r15(i.w)),
            samples: c.samples.iter().map(SampleOut::from).collect(),
        }
    }
}

pub fn curve_csv(c: &BoundaryCurve<f64>) -> String {
    let mut out = String::from("bx,r,regime\n");
    for s in &c.samples {
        out.push_str(&format!("{},{},{}\n", r15(s.bx), r15(s.r), s.regime));
    }
    out
}

#[derive(Debug, Serialize)]
pub struct SharpnessOut {
    pub alpha: f64,
    pub a: [f64; 3],
    pub sharpness: f64,
    pub projection: bool,
    pub trivial: bool,
}

impl From<&BlochEffect64> for SharpnessOut {
    fn from(e: &BlochEffect64) -> Self {
        Self {
            alpha: r15(e.alpha()),
            a: v3(e.avec()),
            sharpness: r15(e.sharpness()),
            projection: e.is_nontrivial_projection(),
            trivial: e.is_trivial(),
        }
    }
}

pub fn sharpness_csv(e: &BlochEffect64) -> String {
    let a = v3(e.avec());
    format!(
        "alpha,ax,ay,az,sharpness\n{},{},{},{},{}\n",
        r15(e.alpha()),
        a[0],
        a[1],
        a[2],
        r15(e.sharpness())
    )
}

#[derive(Debug, Serialize)]
pub struct SuiteOut {
    pub name: &'static str,
    pub passed: bool,
    pub checked: usize,
    pub skipped: usize,
    pub failures: usize,
    /// `null` when the suite recorded no finite extreme.
    pub worst: f64,
}

impl From<&SuiteOutcome> for SuiteOut {
    fn from(s: &SuiteOutcome) -> Self {
        Self {
            name: s.name,
            passed: s.passed(),
            checked: s.checked,
            skipped: s.skipped,
            failures: s.failures,
            worst: r15(s.worst),
        }
    }
}

#[derive(Debug, Serialize)]
pub struct SelfTestOut {
    pub passed: bool,
    pub samples: usize,
    pub seed: u64,
    pub grid: usize,
    pub injected: usize,
    pub suites: Vec<SuiteOut>,
}

impl SelfTestOut {
    pub fn new(
        r: &SelfTestReport,
        samples: usize,
        seed: u64,
        grid: usize,
        injected: usize,
    ) -> Self {
        Self {
            passed: r.passed(),
            samples,
            seed,
            grid,
            injected,
            suites: r.suites.iter().map(SuiteOut::from).collect(),
        }
    }
}
