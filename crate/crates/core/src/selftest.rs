//! Seeded consistency suites run by the `selftest` command.
//!
//! Each suite draws its own random instances from `seed` and reports how many
//! were checked, skipped (inside a boundary band, or invalid input) and failed.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, UnitSphere};

use crate::bloch::{sharpness, BlochEffect, RelativePair};
use crate::coexist::{
    busch_criterion, by_max, classify, decide, liu_criterion, molnar_criterion,
    restricted_interval, SpecialVerdict, Verdict,
};
use crate::oracle::sweep_report;
use crate::vector::Vec3;
use crate::witness::{assemble_observable, find_witness};

/// An injected pair, or the reason it could not be parsed.
pub type InputPair = Result<(BlochEffect<f64>, BlochEffect<f64>), String>;

/// Pairs whose closed-form decision is this close to flipping are skipped.
pub const DECISION_BAND: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct SuiteOutcome {
    pub name: &'static str,
    pub checked: usize,
    pub skipped: usize,
    pub failures: usize,
    /// Suite-specific worst value: largest error, or smallest decision margin
    /// (infinite when no checked instance was in `C3`).
    pub worst: f64,
}

impl SuiteOutcome {
    fn new(name: &'static str) -> Self {
        Self {
            name,
            checked: 0,
            skipped: 0,
            failures: 0,
            worst: 0.0,
        }
    }

    pub fn passed(&self) -> bool {
        self.failures == 0
    }

    fn record(&mut self, ok: bool) {
        self.checked += 1;
        if !ok {
            self.failures += 1;
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct SelfTestReport {
    pub suites: Vec<SuiteOutcome>,
}

impl SelfTestReport {
    pub fn passed(&self) -> bool {
        self.suites.iter().all(SuiteOutcome::passed)
    }
}

fn rng_for(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

fn unit_vector<R: Rng>(rng: &mut R) -> Vec3<f64> {
    let d: [f64; 3] = UnitSphere.sample(rng);
    Vec3::from_array(d)
}

/// Any effect: `α ∈ [0, 2]`, `a ∈ [0, min(α, 2 − α)]`, uniform direction.
pub fn random_effect<R: Rng>(rng: &mut R) -> BlochEffect<f64> {
    let alpha = 2.0 * rng.gen::<f64>();
    let len = alpha.min(2.0 - alpha) * rng.gen::<f64>();
    BlochEffect::new(alpha, unit_vector(rng).scale(len))
        .expect("sampled inside the admissible ball")
}

/// Distance of a verdict from flipping; infinite outside `C3`.
pub fn decision_margin(p: &RelativePair<f64>, v: &Verdict<f64>) -> f64 {
    v.by_max.map_or(f64::INFINITY, |m| m - p.by)
}

fn decided(a: &BlochEffect<f64>, b: &BlochEffect<f64>) -> (bool, f64) {
    let red = crate::bloch::relative_pair(a, b);
    let v = classify(&red.pair);
    (v.coexistent, decision_margin(&red.pair, &v))
}

pub fn sharpness_suite(n: usize, seed: u64) -> SuiteOutcome {
    let mut out = SuiteOutcome::new("sharpness");
    let mut rng = rng_for(seed, 1);
    let tol = 1e-12;
    for _ in 0..n {
        let e = random_effect(&mut rng);
        let s = e.sharpness();
        let sc = e.complement().sharpness();
        let axis = unit_vector(&mut rng);
        let angle = std::f64::consts::TAU * rng.gen::<f64>();
        let sr = e.rotated(axis, angle).sharpness();
        out.worst = out.worst.max((s - sc).abs()).max((s - sr).abs());
        out.record((s - sc).abs() <= tol);
        out.record((s - sr).abs() <= tol);
        out.record((0.0..=1.0).contains(&s));
        // Random effects are neither projections nor trivial.
        out.record(s < 1.0 - tol);
        out.record(s > 0.0);
        if e.alpha() <= 1.0 {
            out.record(s <= e.alpha() + tol);
        }
    }
    // Exact parameter values.
    out.record(sharpness(1.0, 1.0) == 1.0);
    for k in 0..=20 {
        let alpha = k as f64 / 10.0;
        out.record(sharpness(alpha, 0.0) == 0.0);
        if alpha <= 1.0 {
            out.record((sharpness(alpha, alpha) - alpha).abs() <= tol);
        }
    }
    out
}

pub fn complement_suite(n: usize, seed: u64) -> SuiteOutcome {
    let mut out = SuiteOutcome::new("complement-invariance");
    out.worst = f64::INFINITY;
    let mut rng = rng_for(seed, 2);
    for _ in 0..n {
        let a = random_effect(&mut rng);
        let b = random_effect(&mut rng);
        let (base, margin) = decided(&a, &b);
        if margin.abs() < DECISION_BAND {
            out.skipped += 1;
            continue;
        }
        out.worst = out.worst.min(margin.abs());
        let ac = a.complement();
        let bc = b.complement();
        let ok = [(&ac, &b), (&a, &bc), (&ac, &bc)]
            .iter()
            .all(|(x, y)| decide(x, y).coexistent == base);
        out.record(ok);
    }
    out
}

pub fn rotation_suite(n: usize, seed: u64) -> SuiteOutcome {
    let mut out = SuiteOutcome::new("rotation-invariance");
    out.worst = f64::INFINITY;
    let mut rng = rng_for(seed, 3);
    for _ in 0..n {
        let a = random_effect(&mut rng);
        let b = random_effect(&mut rng);
        let axis = unit_vector(&mut rng);
        let angle = std::f64::consts::TAU * rng.gen::<f64>();
        let (base, margin) = decided(&a, &b);
        if margin.abs() < DECISION_BAND {
            out.skipped += 1;
            continue;
        }
        out.worst = out.worst.min(margin.abs());
        let rotated = decide(&a.rotated(axis, angle), &b.rotated(axis, angle)).coexistent;
        let swapped = decide(&b, &a).coexistent;
        out.record(rotated == base && swapped == base);
    }
    out
}

/// `λ = 0, 1/9, …, 1`.
pub fn lambda_samples() -> impl Iterator<Item = f64> {
    (0..10).map(|k| k as f64 / 9.0)
}

fn coexistent_partner<R: Rng>(rng: &mut R, a: &BlochEffect<f64>) -> BlochEffect<f64> {
    loop {
        let b = random_effect(rng);
        let (ok, margin) = decided(a, &b);
        if ok && margin >= DECISION_BAND {
            return b;
        }
    }
}

pub fn convexity_suite(n: usize, seed: u64) -> SuiteOutcome {
    let mut out = SuiteOutcome::new("convex-combination");
    out.worst = f64::INFINITY;
    let mut rng = rng_for(seed, 4);
    for _ in 0..n {
        let a = random_effect(&mut rng);
        let b = coexistent_partner(&mut rng, &a);
        let c = coexistent_partner(&mut rng, &a);
        for lambda in lambda_samples() {
            let m = b.mix(&c, lambda);
            let (ok, margin) = decided(&a, &m);
            out.worst = out.worst.min(margin);
            out.record(ok);
        }
    }
    out
}

pub fn scaling_suite(n: usize, seed: u64) -> SuiteOutcome {
    let mut out = SuiteOutcome::new("scaling");
    out.worst = f64::INFINITY;
    let mut rng = rng_for(seed, 5);
    for _ in 0..n {
        let a = random_effect(&mut rng);
        let b = coexistent_partner(&mut rng, &a);
        for lambda in lambda_samples() {
            let (ok, margin) = decided(&a, &b.scaled(lambda));
            out.worst = out.worst.min(margin);
            out.record(ok);
        }
    }
    out
}

/// Random canonical pairs on the domain of each closed-form criterion.
pub fn special_domain_pair<R: Rng>(
    rng: &mut R,
    which: crate::coexist::SpecialCase,
) -> RelativePair<f64> {
    use crate::coexist::SpecialCase::*;
    let theta = std::f64::consts::PI * rng.gen::<f64>();
    match which {
        Busch => {
            let a = rng.gen::<f64>();
            let b = rng.gen::<f64>();
            RelativePair::new(1.0, a, 1.0, b * theta.cos(), b * theta.sin())
        }
        Liu => {
            let alpha = 1.0 - rng.gen::<f64>();
            let a = alpha * rng.gen::<f64>();
            RelativePair::new(alpha, a, 1.0, 0.0, rng.gen::<f64>())
        }
        Molnar => {
            let alpha = 1.0 - rng.gen::<f64>();
            let beta = 1.0 - rng.gen::<f64>();
            RelativePair::new(alpha, alpha, beta, beta * theta.cos(), beta * theta.sin())
        }
    }
}

pub fn special_case_suite(n: usize, seed: u64) -> SuiteOutcome {
    use crate::coexist::SpecialCase::*;
    let mut out = SuiteOutcome::new("special-cases");
    out.worst = f64::INFINITY;
    let mut rng = rng_for(seed, 6);
    for which in [Busch, Liu, Molnar] {
        let criterion: fn(&RelativePair<f64>) -> Option<SpecialVerdict<f64>> = match which {
            Busch => busch_criterion,
            Liu => liu_criterion,
            Molnar => molnar_criterion,
        };
        for _ in 0..n {
            let p = special_domain_pair(&mut rng, which);
            let Some(s) = criterion(&p) else {
                out.record(false);
                continue;
            };
            if s.margin.abs() < DECISION_BAND {
                out.skipped += 1;
                continue;
            }
            out.worst = out.worst.min(s.margin.abs());
            out.record(classify(&p).coexistent == s.coexistent);
        }
    }
    out
}

pub fn tangency_suite(n: usize, seed: u64) -> SuiteOutcome {
    let mut out = SuiteOutcome::new("junction-tangency");
    let mut rng = rng_for(seed, 7);
    let mut done = 0;
    while done < n {
        let alpha = 1.0 - rng.gen::<f64>();
        let a = alpha * (1.0 - rng.gen::<f64>());
        let s = sharpness(alpha, a);
        let beta = 1.0 - s * rng.gen::<f64>();
        let Some(iv) = restricted_interval(alpha, a, beta) else {
            continue;
        };
        done += 1;
        for bx in [iv.lower(), iv.upper()] {
            let r = by_max(alpha, a, beta, bx).map(|y| bx.hypot(y));
            let err = r.map_or(f64::INFINITY, |r| (r - beta).abs());
            out.worst = out.worst.max(err);
            out.record(err <= 1e-9);
        }
        for k in 1..=100 {
            let bx = iv.lower() + 2.0 * iv.w * k as f64 / 101.0;
            let ok = by_max(alpha, a, beta, bx).is_ok_and(|y| bx.hypot(y) < beta);
            out.record(ok);
        }
    }
    out
}

pub fn witness_suite(n: usize, seed: u64) -> SuiteOutcome {
    let mut out = SuiteOutcome::new("witness-completeness");
    let mut rng = rng_for(seed, 8);
    let mut done = 0;
    while done < n {
        let a = random_effect(&mut rng);
        let b = random_effect(&mut rng);
        if !decide(&a, &b).coexistent {
            continue;
        }
        done += 1;
        let ok = match find_witness(&a, &b) {
            Ok(Some(found)) => match assemble_observable(&a, &b, &found.witness) {
                Ok(obs) => {
                    let norm = obs.normalization_error();
                    let psd = obs.min_eigenvalue();
                    let ma = obs.marginal_a();
                    let mb = obs.marginal_b();
                    let marg = (ma.alpha() - a.alpha())
                        .abs()
                        .max((mb.alpha() - b.alpha()).abs())
                        .max(ma.avec().max_abs_diff(a.avec()))
                        .max(mb.avec().max_abs_diff(b.avec()));
                    out.worst = out.worst.max(norm).max(marg).max(-psd);
                    norm <= 1e-12
                        && psd >= -1e-9
                        && obs.max_eigenvalue() <= 1.0 + 1e-9
                        && marg <= 1e-15
                }
                Err(_) => false,
            },
            _ => false,
        };
        out.record(ok);
    }
    out
}

/// Oracle agreement on `n` random pairs plus any extra pairs.
pub fn oracle_suite(
    n: usize,
    seed: u64,
    grid: usize,
    extra: &[(BlochEffect<f64>, BlochEffect<f64>)],
) -> SuiteOutcome {
    let mut out = SuiteOutcome::new("oracle-agreement");
    let mut pairs = crate::oracle::sweep_pairs::<f64>(n, seed);
    pairs.extend_from_slice(extra);
    let report = sweep_report(&pairs, seed, grid);
    out.checked = report.agreements + report.disagreements.len();
    out.failures = report.disagreements.len();
    out.skipped = report.boundary_band;
    out.worst = report.min_abs_margin;
    out
}

/// Runs every suite. `extra` pairs join the oracle comparison; invalid
/// entries count as skipped inputs.
pub fn run_all(n: usize, seed: u64, grid: usize, extra: &[InputPair]) -> SelfTestReport {
    let valid: Vec<_> = extra
        .iter()
        .filter_map(|r| r.as_ref().ok().copied())
        .collect();
    let invalid = extra.len() - valid.len();
    let mut oracle = oracle_suite(n, seed, grid, &valid);
    oracle.skipped += invalid;
    SelfTestReport {
        suites: vec![
            sharpness_suite(n, seed),
            complement_suite(n, seed),
            rotation_suite(n, seed),
            convexity_suite(n, seed),
            scaling_suite(n, seed),
            special_case_suite(n, seed),
            tangency_suite(n.clamp(1, 100), seed),
            witness_suite(n, seed),
            oracle,
        ],
    }
}
