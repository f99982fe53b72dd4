//! Closed-form coexistence decision for a canonical pair.
//!
//! With `S = S(A)` the sharpness of `A`, a pair falls into exactly one of
//! three regimes:
//!
//! * `C1`: `β ≤ 1 − S`; coexistent for every `b⃗`.
//! * `C2`: `β > 1 − S` and `|b_x − b₀| ≥ w`; coexistent.
//! * `C3`: `β > 1 − S` and `|b_x − b₀| < w`; coexistent iff `b_y ≤ b_y^max(b_x)`.
//!
//! Commuting pairs (parallel Bloch vectors, or a trivial effect) are always
//! coexistent and reported separately.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::bloch::{relative_pair, sharpness, BlochEffect, RelativePair};
use crate::scalar::{sqrt0, Real};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Regime {
    C1,
    C2,
    C3,
    TrivialParallel,
}

impl Regime {
    pub fn as_str(self) -> &'static str {
        match self {
            Regime::C1 => "C1",
            Regime::C2 => "C2",
            Regime::C3 => "C3",
            Regime::TrivialParallel => "TrivialParallel",
        }
    }
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// The interval `(b₀ − w, b₀ + w)` of `b_x` values on which the length of `b⃗`
/// is restricted below `β`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RestrictedInterval<T> {
    pub b0: T,
    pub w: T,
    /// The discriminant `D = (aw)²` before clamping.
    pub discriminant: T,
}

impl<T: Real> RestrictedInterval<T> {
    pub fn lower(&self) -> T {
        self.b0 - self.w
    }

    pub fn upper(&self) -> T {
        self.b0 + self.w
    }

    /// `|b_x − b₀| < w` with the comparison tolerance applied in favour of `C2`.
    pub fn contains(&self, bx: T) -> bool {
        (bx - self.b0).abs() < self.w - T::tolerances().compare
    }
}

/// `D = (1 − α)² − β[(1 − α)² + 1 − a²] + β²`.
pub fn discriminant<T: Real>(alpha: T, a: T, beta: T) -> T {
    let u = (T::one() - alpha) * (T::one() - alpha);
    u - beta * (u + T::one() - a * a) + beta * beta
}

/// `β > 1 − S(α, a)` up to the comparison tolerance.
pub fn above_threshold<T: Real>(alpha: T, a: T, beta: T) -> bool {
    beta > T::one() - sharpness(alpha, a) + T::tolerances().compare
}

/// `(b₀, w)` when `β > 1 − S(α, a)` and `a > 0`.
pub fn restricted_interval<T: Real>(alpha: T, a: T, beta: T) -> Option<RestrictedInterval<T>> {
    if a <= T::zero() || !above_threshold(alpha, a, beta) {
        return None;
    }
    let d = discriminant(alpha, a, beta);
    debug_assert!(
        d >= -T::tolerances().discriminant,
        "discriminant {d} negative above the sharpness threshold"
    );
    let b0 = (T::one() - alpha) * (T::one() - beta) / a;
    let w = sqrt0(d) / a;
    Some(RestrictedInterval {
        b0,
        w,
        discriminant: d,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Verdict<T> {
    pub coexistent: bool,
    pub regime: Regime,
    pub sharpness_a: T,
    pub b0: Option<T>,
    pub w: Option<T>,
    pub by_max: Option<T>,
    pub discriminant: Option<T>,
}

/// Decides a canonical pair.
pub fn classify<T: Real>(p: &RelativePair<T>) -> Verdict<T> {
    let tol = T::tolerances().compare;
    let s = sharpness(p.alpha, p.a);
    let interval = restricted_interval(p.alpha, p.a, p.beta);
    let mut v = Verdict {
        coexistent: true,
        regime: Regime::C1,
        sharpness_a: s,
        b0: interval.map(|i| i.b0),
        w: interval.map(|i| i.w),
        by_max: None,
        discriminant: interval.map(|i| i.discriminant),
    };
    if p.is_commuting() {
        v.regime = Regime::TrivialParallel;
        return v;
    }
    let Some(iv) = interval else {
        return v;
    };
    if !iv.contains(p.bx) {
        v.regime = Regime::C2;
        return v;
    }
    let ymax = by_max_unchecked(p.alpha, p.a, p.beta, p.bx, iv.b0);
    v.regime = Regime::C3;
    v.by_max = Some(ymax);
    v.coexistent = p.by <= ymax + tol;
    v
}

/// Reduces and classifies an arbitrary pair of effects.
pub fn decide<T: Real>(a: &BlochEffect<T>, b: &BlochEffect<T>) -> Verdict<T> {
    classify(&relative_pair(a, b).pair)
}

/// `true` iff `A` and `B` are parts of a common observable.
pub fn is_coexistent<T: Real>(a: &BlochEffect<T>, b: &BlochEffect<T>) -> bool {
    decide(a, b).coexistent
}

#[derive(Debug, Clone, Copy, PartialEq, Error)]
pub enum DomainError {
    #[error("a = 0: the restricted interval does not exist")]
    ZeroBlochVector,
    #[error("beta does not exceed 1 - S(A); every b is allowed")]
    BelowThreshold,
    #[error("|bx - b0| = {offset} exceeds w = {w}")]
    OutsideInterval { offset: f64, w: f64 },
}

/// Largest allowed perpendicular component at `b_x` inside the restricted interval.
///
/// The closed endpoints `b₀ ± w` are accepted; there `√(b_x² + b_y^max²) = β`.
pub fn by_max<T: Real>(alpha: T, a: T, beta: T, bx: T) -> Result<T, DomainError> {
    if a <= T::zero() {
        return Err(DomainError::ZeroBlochVector);
    }
    let iv = restricted_interval(alpha, a, beta).ok_or(DomainError::BelowThreshold)?;
    let offset = (bx - iv.b0).abs();
    if offset > iv.w + T::tolerances().compare {
        return Err(DomainError::OutsideInterval {
            offset: offset.as_f64(),
            w: iv.w.as_f64(),
        });
    }
    Ok(by_max_unchecked(alpha, a, beta, bx, iv.b0))
}

pub(crate) fn by_max_unchecked<T: Real>(alpha: T, a: T, beta: T, bx: T, b0: T) -> T {
    let two = T::lit(2.0);
    let a2 = a * a;
    let shift = a * (bx - b0);
    let gap = T::one() - beta;
    let upper = ((two - alpha) * (two - alpha) - a2) * (a2 - (shift + gap) * (shift + gap));
    let lower = (alpha * alpha - a2) * (a2 - (shift - gap) * (shift - gap));
    (sqrt0(upper) + sqrt0(lower)) / (two * a)
}

/// One point of the allowed-region boundary.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundarySample<T> {
    pub bx: T,
    /// Length of the longest allowed `b⃗` with this `b_x`.
    pub r: T,
    /// `C1`/`C2` on the circular arc `r = β`, `C3` on the restricted curve.
    pub regime: Regime,
}

impl<T: Real> BoundarySample<T> {
    /// Perpendicular component of the boundary vector.
    pub fn by(&self) -> T {
        sqrt0(self.r * self.r - self.bx * self.bx)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryCurve<T> {
    pub alpha: T,
    pub a: T,
    pub beta: T,
    pub interval: Option<RestrictedInterval<T>>,
    pub samples: Vec<BoundarySample<T>>,
}

impl<T: Real> BoundaryCurve<T> {
    /// Sample with the smallest `r`.
    pub fn min_sample(&self) -> Option<&BoundarySample<T>> {
        self.samples
            .iter()
            .min_by(|x, y| x.r.partial_cmp(&y.r).unwrap_or(std::cmp::Ordering::Equal))
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CurveError {
    #[error("need 0 < alpha <= 1, got {0}")]
    Alpha(f64),
    #[error("need 0 <= a <= alpha, got a = {0}")]
    BlochLength(f64),
    #[error("need 0 < beta <= 1, got {0}")]
    Beta(f64),
    #[error("need at least 16 samples, got {0}")]
    TooFewSamples(usize),
}

pub const MIN_CURVE_SAMPLES: usize = 16;

/// Samples the boundary of the allowed region for fixed `(α, a, β)`.
///
/// `b_x` runs uniformly over `[−β, β]`; the junctions `b₀ ± w` are always
/// inserted as exact samples.
pub fn boundary_curve<T: Real>(
    alpha: T,
    a: T,
    beta: T,
    n_samples: usize,
) -> Result<BoundaryCurve<T>, CurveError> {
    if !(alpha > T::zero() && alpha <= T::one()) {
        return Err(CurveError::Alpha(alpha.as_f64()));
    }
    if !(a >= T::zero() && a <= alpha) {
        return Err(CurveError::BlochLength(a.as_f64()));
    }
    if !(beta > T::zero() && beta <= T::one()) {
        return Err(CurveError::Beta(beta.as_f64()));
    }
    if n_samples < MIN_CURVE_SAMPLES {
        return Err(CurveError::TooFewSamples(n_samples));
    }

    let interval = restricted_interval(alpha, a, beta);
    let step = (beta + beta) / T::from_usize(n_samples - 1).expect("sample count");
    let mut xs: Vec<T> = (0..n_samples)
        .map(|i| -beta + step * T::from_usize(i).expect("index"))
        .collect();
    // Pin the last sample to β exactly.
    if let Some(last) = xs.last_mut() {
        *last = beta;
    }
    if let Some(iv) = interval {
        let tol = T::tolerances().compare;
        for j in [iv.lower(), iv.upper()] {
            if j < -beta - tol || j > beta + tol {
                continue;
            }
            let j = j.max(-beta).min(beta);
            // A junction within rounding of a uniform sample replaces it,
            // except at the pinned ends ±β.
            match xs.iter_mut().find(|x| (**x - j).abs() <= tol) {
                Some(x) if x.abs() == beta => {}
                Some(x) => *x = j,
                None => xs.push(j),
            }
        }
    }
    xs.sort_by(|x, y| x.partial_cmp(y).expect("finite abscissae"));
    xs.dedup();

    let samples = xs
        .into_iter()
        .map(|bx| match interval {
            None => BoundarySample {
                bx,
                r: beta,
                regime: Regime::C1,
            },
            Some(iv) if (bx - iv.b0).abs() < iv.w => {
                let y = by_max_unchecked(alpha, a, beta, bx, iv.b0);
                BoundarySample {
                    bx,
                    r: bx.hypot(y).min(beta),
                    regime: Regime::C3,
                }
            }
            Some(_) => BoundarySample {
                bx,
                r: beta,
                regime: Regime::C2,
            },
        })
        .collect();

    Ok(BoundaryCurve {
        alpha,
        a,
        beta,
        interval,
        samples,
    })
}

/// Parameter sets of the four stock allowed-region plots.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FigurePreset {
    Fig1a,
    Fig1b,
    Fig1c,
    Fig1d,
}

impl FigurePreset {
    pub const ALL: [FigurePreset; 4] = [Self::Fig1a, Self::Fig1b, Self::Fig1c, Self::Fig1d];

    /// `(α, a, β)`.
    pub fn params<T: Real>(self) -> (T, T, T) {
        let (alpha, a, beta) = match self {
            Self::Fig1a => (0.6, 0.5, 0.6),
            Self::Fig1b => (0.6, 0.5, 0.9),
            Self::Fig1c => (0.6, 0.5, 1.0),
            Self::Fig1d => (0.6, 0.6, 0.9),
        };
        (T::lit(alpha), T::lit(a), T::lit(beta))
    }

    pub fn name(self) -> &'static str {
        match self {
            Self::Fig1a => "fig1a",
            Self::Fig1b => "fig1b",
            Self::Fig1c => "fig1c",
            Self::Fig1d => "fig1d",
        }
    }
}

impl FromStr for FigurePreset {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| {
                format!("unknown preset {s:?}; expected one of fig1a, fig1b, fig1c, fig1d")
            })
    }
}

/// Known closed-form criteria valid on sub-families of pairs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpecialCase {
    /// `α = β = 1`: `‖a⃗ + b⃗‖ + ‖a⃗ − b⃗‖ ≤ 2`.
    Busch,
    /// `β = 1`, `a⃗ ⊥ b⃗`: `b ≤ ½√((2 − α)² − a²) + ½√(α² − a²)`.
    Liu,
    /// `a = α`, `b = β`: `b⃗ ∥ a⃗` or `a⃗·b⃗ ≤ 2 − 2α − 2β + αβ`.
    Molnar,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpecialVerdict<T> {
    pub which: SpecialCase,
    pub coexistent: bool,
    /// Signed slack of the closed-form inequality; negative means violated.
    pub margin: T,
}

fn near<T: Real>(x: T, y: T) -> bool {
    (x - y).abs() <= T::tolerances().compare
}

fn special<T: Real>(which: SpecialCase, margin: T) -> SpecialVerdict<T> {
    SpecialVerdict {
        which,
        coexistent: margin >= -T::tolerances().compare,
        margin,
    }
}

pub fn busch_criterion<T: Real>(p: &RelativePair<T>) -> Option<SpecialVerdict<T>> {
    if !(near(p.alpha, T::one()) && near(p.beta, T::one())) {
        return None;
    }
    let sum = (p.a + p.bx).hypot(p.by);
    let diff = (p.a - p.bx).hypot(p.by);
    Some(special(SpecialCase::Busch, T::lit(2.0) - sum - diff))
}

pub fn liu_criterion<T: Real>(p: &RelativePair<T>) -> Option<SpecialVerdict<T>> {
    if !(near(p.beta, T::one()) && near(p.bx, T::zero())) {
        return None;
    }
    let two = T::lit(2.0);
    let half = T::lit(0.5);
    let a2 = p.a * p.a;
    let bound =
        half * sqrt0((two - p.alpha) * (two - p.alpha) - a2) + half * sqrt0(p.alpha * p.alpha - a2);
    Some(special(SpecialCase::Liu, bound - p.b()))
}

pub fn molnar_criterion<T: Real>(p: &RelativePair<T>) -> Option<SpecialVerdict<T>> {
    if !(near(p.a, p.alpha) && near(p.b(), p.beta)) {
        return None;
    }
    let two = T::lit(2.0);
    let (alpha, beta) = (p.alpha, p.beta);
    let small = T::one() - alpha - beta;
    let parallel = p.bx - beta;
    let rhs = two - two * alpha - two * beta + alpha * beta;
    let dot = rhs - p.dot();
    Some(special(SpecialCase::Molnar, small.max(parallel).max(dot)))
}

/// The first closed-form criterion whose domain contains `p`, evaluated
/// without reference to [`classify`].
pub fn special_case_verdict<T: Real>(p: &RelativePair<T>) -> Option<SpecialVerdict<T>> {
    busch_criterion(p)
        .or_else(|| liu_criterion(p))
        .or_else(|| molnar_criterion(p))
}
