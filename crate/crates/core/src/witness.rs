//! Explicit four-outcome observables certifying coexistence.
//!
//! `A` and `B` coexist iff some effect `G₁` satisfies `0 ≤ G₁ ≤ A`, `G₁ ≤ B`
//! and `A + B − 1 ≤ G₁`; the observable is then
//! `(G₁, A − G₁, B − G₁, 1 + G₁ − A − B)`.

use thiserror::Error;

use crate::bloch::{relative_pair, BlochEffect, HermitianMatrix2, RelativePair};
use crate::coexist::{classify, Regime};
use crate::oracle::{disks_at, oracle_coexistent, DEFAULT_GRID};
use crate::scalar::{sqrt0, Real};
use crate::vector::{Vec2, Vec3};

/// Parameters of `G₁ = ½(γ·1 + g⃗·σ)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Witness<T> {
    pub gamma: T,
    pub gvec: Vec3<T>,
}

impl<T: Real> Witness<T> {
    pub fn new(gamma: T, gvec: Vec3<T>) -> Self {
        Self { gamma, gvec }
    }

    pub fn to_matrix(&self) -> HermitianMatrix2<T> {
        BlochEffect::new_unchecked(self.gamma, self.gvec).to_matrix()
    }
}

/// Outcome of checking a candidate `G₁` against both formulations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InequalityReport<T> {
    /// `‖g⃗‖ − γ`, `‖a⃗ − g⃗‖ − (α − γ)`, `‖b⃗ − g⃗‖ − (β − γ)`,
    /// `‖a⃗ + b⃗ − g⃗‖ − (2 + γ − α − β)`. Non-positive when satisfied.
    pub residuals: [T; 4],
    /// Smallest eigenvalues of `G₁`, `A − G₁`, `B − G₁`, `1 + G₁ − A − B`.
    pub min_eigenvalues: [T; 4],
    pub holds: bool,
}

impl<T: Real> InequalityReport<T> {
    pub fn worst_residual(&self) -> T {
        self.residuals
            .iter()
            .copied()
            .fold(T::neg_infinity(), T::max)
    }

    pub fn worst_eigenvalue(&self) -> T {
        self.min_eigenvalues
            .iter()
            .copied()
            .fold(T::infinity(), T::min)
    }
}

/// Checks the four norm inequalities and, independently, positivity of the
/// four 2×2 operators.
pub fn operator_inequalities_hold<T: Real>(
    a: &BlochEffect<T>,
    b: &BlochEffect<T>,
    wt: &Witness<T>,
) -> InequalityReport<T> {
    let two = T::lit(2.0);
    let (alpha, beta, gamma) = (a.alpha(), b.alpha(), wt.gamma);
    let (av, bv, g) = (a.avec(), b.avec(), wt.gvec);
    let residuals = [
        g.norm() - gamma,
        (av - g).norm() - (alpha - gamma),
        (bv - g).norm() - (beta - gamma),
        (av + bv - g).norm() - (two + gamma - alpha - beta),
    ];

    let g1 = wt.to_matrix();
    let ma = a.to_matrix();
    let mb = b.to_matrix();
    let ops = [
        g1,
        ma - g1,
        mb - g1,
        HermitianMatrix2::identity() + g1 - ma - mb,
    ];
    let min_eigenvalues = ops.map(|m| m.eigenvalues().0);

    let tol = T::tolerances().psd;
    let holds = residuals.iter().all(|&r| r <= tol) && min_eigenvalues.iter().all(|&e| e >= -tol);
    InequalityReport {
        residuals,
        min_eigenvalues,
        holds,
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GammaIntervalError {
    #[error("b = {b} differs from beta = {beta}; the interval is defined for full-length b only")]
    NotFullLength { b: f64, beta: f64 },
    #[error("parallel vectors with a = alpha; use the commuting construction")]
    Degenerate,
}

/// Range of `γ` for which the tangency point `γ b⃗/b` of the first and third
/// disks lies in the other two, when `b = β`.
///
/// Returns `[max(γ_m, 0), min(γ_M, α, β)]`, or `None` when `γ_M < γ_m`.
pub fn gamma_interval_2ci<T: Real>(
    p: &RelativePair<T>,
) -> Result<Option<(T, T)>, GammaIntervalError> {
    let tol = T::tolerances();
    let b = p.b();
    if (b - p.beta).abs() > tol.operator_bound {
        return Err(GammaIntervalError::NotFullLength {
            b: b.as_f64(),
            beta: p.beta.as_f64(),
        });
    }
    let two = T::lit(2.0);
    let half_beta = T::lit(0.5) * p.beta;
    let dot = p.dot();
    let upper_den = p.alpha * p.beta - dot;
    let lower_den = upper_den - two * p.beta;
    if upper_den <= tol.compare || lower_den >= -tol.compare {
        return Err(GammaIntervalError::Degenerate);
    }
    let gamma_max = half_beta * (p.alpha * p.alpha - p.a * p.a) / upper_den;
    let k = two - p.alpha - p.beta;
    let sum2 = p.a * p.a + two * dot + b * b;
    let gamma_min = half_beta * (k * k - sum2) / lower_den;
    if gamma_max - gamma_min < -tol.compare {
        return Ok(None);
    }
    let lo = gamma_min.max(T::zero());
    let hi = gamma_max.min(p.alpha.min(p.beta)).max(lo);
    Ok(Some((lo, hi)))
}

/// `γ` at which the upper crossing points of disks 1–2 and 3–4 coincide,
/// for a pair on the restricted part of the boundary.
pub fn gamma_4ci<T: Real>(p: &RelativePair<T>) -> T {
    let two = T::lit(2.0);
    T::lit(0.5) * (p.dot() + p.alpha * p.beta - two * (T::one() - p.alpha) * (T::one() - p.beta))
}

/// Upper crossing point of the circles `‖g‖ = γ` and `‖g − a⃗‖ = α − γ`.
fn upper_crossing<T: Real>(alpha: T, a: T, gamma: T) -> Vec2<T> {
    let two = T::lit(2.0);
    let x = alpha * (two * gamma - alpha) / (two * a) + a / two;
    Vec2::new(x, sqrt0(gamma * gamma - x * x))
}

/// Planar witness for a canonical, non-commuting, coexistent pair.
///
/// The pair sits between a boundary point `(b_x, ŷ)` and its mirror
/// `(b_x, −ŷ)`, both coexistent. Their witnesses mirror each other, so the
/// mixture reproducing `b_y` keeps `γ` and scales the `y` component of `g⃗`
/// by `b_y / ŷ`.
fn planar_witness<T: Real>(
    p: &RelativePair<T>,
    regime: Regime,
    by_max: Option<T>,
) -> Option<(T, Vec2<T>)> {
    match regime {
        Regime::C1 | Regime::C2 => {
            let top = sqrt0(p.beta * p.beta - p.bx * p.bx);
            if top <= T::zero() {
                return None;
            }
            let full = p.with_by(top);
            let (lo, hi) = gamma_interval_2ci(&full).ok()??;
            let gamma = T::lit(0.5) * (lo + hi);
            let s = gamma / p.beta;
            Some((gamma, Vec2::new(p.bx * s, p.by * s)))
        }
        Regime::C3 => {
            let top = by_max?;
            if top <= T::zero() {
                return None;
            }
            let edge = p.with_by(top);
            let gamma = gamma_4ci(&edge);
            let g = upper_crossing(p.alpha, p.a, gamma);
            Some((gamma, Vec2::new(g.x, g.y * p.by / top)))
        }
        Regime::TrivialParallel => None,
    }
}

/// Largest out-of-plane component keeping `g⃗` inside all four balls.
///
/// Lifting makes at least one `Gᵢ` rank one; for the SIC pair it recovers
/// `g⃗ = (1, 1, 1)/(2√3)` with every inequality tight.
fn normal_lift<T: Real>(p: &RelativePair<T>, gamma: T, g: Vec2<T>) -> T {
    disks_at(p, gamma)
        .disks
        .iter()
        .map(|d| {
            let r = d.radius.max(T::zero());
            let dist = g.dist(d.center);
            sqrt0(r * r - dist * dist)
        })
        .fold(T::infinity(), T::min)
}

/// `G₁ = AB` for commuting effects (parallel Bloch vectors or a trivial effect).
pub fn commuting_witness<T: Real>(a: &BlochEffect<T>, b: &BlochEffect<T>) -> Witness<T> {
    let half = T::lit(0.5);
    let (alpha, beta) = (a.alpha(), b.alpha());
    let (av, bv) = (a.avec(), b.avec());
    Witness::new(
        half * (alpha * beta + av.dot(bv)),
        (bv.scale(alpha) + av.scale(beta)).scale(half),
    )
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum WitnessError {
    #[error("pair classified coexistent but no witness passed the operator checks (worst residual {worst_residual:e})")]
    Internal { worst_residual: f64 },
    #[error("witness violates the operator inequalities (worst residual {worst_residual:e}, worst eigenvalue {worst_eigenvalue:e})")]
    Rejected {
        worst_residual: f64,
        worst_eigenvalue: f64,
    },
}

/// Which construction produced a witness.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WitnessSource {
    Commuting,
    FullLength,
    FourCircle,
    Oracle,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FoundWitness<T> {
    pub witness: Witness<T>,
    pub source: WitnessSource,
    pub report: InequalityReport<T>,
}

/// Constructs `G₁` for a coexistent pair; `Ok(None)` when the pair is not coexistent.
pub fn find_witness<T: Real>(
    a: &BlochEffect<T>,
    b: &BlochEffect<T>,
) -> Result<Option<FoundWitness<T>>, WitnessError> {
    let red = relative_pair(a, b);
    let verdict = classify(&red.pair);
    if !verdict.coexistent {
        return Ok(None);
    }

    let accept = |w: Witness<T>, source| {
        let report = operator_inequalities_hold(a, b, &w);
        report.holds.then_some(FoundWitness {
            witness: w,
            source,
            report,
        })
    };

    let analytic = if red.pair.is_commuting() {
        accept(commuting_witness(a, b), WitnessSource::Commuting)
    } else {
        planar_witness(&red.pair, verdict.regime, verdict.by_max).and_then(|(gamma, g)| {
            let mut gamma = gamma;
            let lift = normal_lift(&red.pair, gamma, g);
            let mut gvec = red.frame.lift(g.x, g.y) + red.frame.normal().scale(lift);
            // Undo the complements: (A', 1 − B) → (A', B) → (A, B).
            if red.report.complemented_b {
                gamma = red.a_effect.alpha() - gamma;
                gvec = red.a_effect.avec() - gvec;
            }
            if red.report.complemented_a {
                gamma = b.alpha() - gamma;
                gvec = b.avec() - gvec;
            }
            let source = if verdict.regime == Regime::C3 {
                WitnessSource::FourCircle
            } else {
                WitnessSource::FullLength
            };
            accept(Witness::new(gamma, gvec), source)
        })
    };
    if let Some(found) = analytic {
        return Ok(Some(found));
    }

    let oracle = oracle_coexistent(a, b, DEFAULT_GRID);
    if let Some(found) = oracle
        .certificate
        .and_then(|c| accept(Witness::new(c.gamma, c.gvec), WitnessSource::Oracle))
    {
        return Ok(Some(found));
    }
    Err(WitnessError::Internal {
        worst_residual: oracle.margin.as_f64(),
    })
}

/// The four effects `G₁ … G₄` of a witness observable.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WitnessObservable<T> {
    pub effects: [BlochEffect<T>; 4],
    pub witness: Witness<T>,
}

impl<T: Real> WitnessObservable<T> {
    /// Trace coefficient and Bloch vector of `ΣGᵢ`; `(2, 0⃗)` for the identity.
    pub fn total(&self) -> (T, Vec3<T>) {
        self.effects
            .iter()
            .fold((T::zero(), Vec3::zero()), |(s, v), e| {
                (s + e.alpha(), v + e.avec())
            })
    }

    /// Largest entrywise deviation of `ΣGᵢ` from the identity matrix.
    pub fn normalization_error(&self) -> T {
        let sum = self
            .effects
            .iter()
            .map(|e| e.to_matrix())
            .reduce(|x, y| x + y)
            .expect("four effects");
        sum.max_abs_diff(&HermitianMatrix2::identity())
    }

    /// Smallest eigenvalue over the four effects.
    pub fn min_eigenvalue(&self) -> T {
        self.effects
            .iter()
            .map(|e| e.to_matrix().eigenvalues().0)
            .fold(T::infinity(), T::min)
    }

    /// Largest eigenvalue over the four effects.
    pub fn max_eigenvalue(&self) -> T {
        self.effects
            .iter()
            .map(|e| e.to_matrix().eigenvalues().1)
            .fold(T::neg_infinity(), T::max)
    }

    /// `G₁ + G₂`, which equals `A`.
    pub fn marginal_a(&self) -> BlochEffect<T> {
        let [g1, g2, _, _] = self.effects;
        BlochEffect::new_unchecked(g1.alpha() + g2.alpha(), g1.avec() + g2.avec())
    }

    /// `G₁ + G₃`, which equals `B`.
    pub fn marginal_b(&self) -> BlochEffect<T> {
        let [g1, _, g3, _] = self.effects;
        BlochEffect::new_unchecked(g1.alpha() + g3.alpha(), g1.avec() + g3.avec())
    }
}

/// `(G₁, A − G₁, B − G₁, 1 + G₁ − A − B)` for an accepted witness.
pub fn assemble_observable<T: Real>(
    a: &BlochEffect<T>,
    b: &BlochEffect<T>,
    wt: &Witness<T>,
) -> Result<WitnessObservable<T>, WitnessError> {
    let report = operator_inequalities_hold(a, b, wt);
    if !report.holds {
        return Err(WitnessError::Rejected {
            worst_residual: report.worst_residual().as_f64(),
            worst_eigenvalue: report.worst_eigenvalue().as_f64(),
        });
    }
    let two = T::lit(2.0);
    let (alpha, beta, gamma) = (a.alpha(), b.alpha(), wt.gamma);
    let (av, bv, g) = (a.avec(), b.avec(), wt.gvec);
    let effects = [
        BlochEffect::new_unchecked(gamma, g),
        BlochEffect::new_unchecked(alpha - gamma, av - g),
        BlochEffect::new_unchecked(beta - gamma, bv - g),
        BlochEffect::new_unchecked(two + gamma - alpha - beta, g - av - bv),
    ];
    Ok(WitnessObservable {
        effects,
        witness: *wt,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn eff(alpha: f64, v: [f64; 3]) -> BlochEffect<f64> {
        BlochEffect::from_parts(alpha, v).unwrap()
    }

    fn sic() -> (BlochEffect<f64>, BlochEffect<f64>, Witness<f64>) {
        let s = 1.0 / 3.0_f64.sqrt();
        let a = eff(1.0, [s, 0.0, 0.0]);
        let b = eff(1.0, [0.0, s, 0.0]);
        let w = Witness::new(0.5, Vec3::new(s / 2.0, s / 2.0, s / 2.0));
        (a, b, w)
    }

    #[test]
    fn projection_with_itself() {
        let p = eff(1.0, [0.0, 0.0, 1.0]);
        let w = Witness::new(1.0, p.avec());
        let r = operator_inequalities_hold(&p, &p, &w);
        assert!(r.holds);
        assert_eq!(r.residuals[0], 0.0);
        assert_eq!(r.residuals[1], 0.0);
        assert_eq!(r.residuals[2], 0.0);

        let obs = assemble_observable(&p, &p, &w).unwrap();
        let [g1, g2, g3, g4] = obs.effects;
        assert_eq!(g1, p);
        assert_eq!((g2.alpha(), g2.avec()), (0.0, Vec3::zero()));
        assert_eq!((g3.alpha(), g3.avec()), (0.0, Vec3::zero()));
        assert_eq!(g4, p.complement());
    }

    #[test]
    fn sic_witness_is_tight_in_the_first_inequality() {
        let (a, b, w) = sic();
        let r = operator_inequalities_hold(&a, &b, &w);
        assert!(r.holds, "{r:?}");
        assert!(r.residuals[0].abs() <= 1e-12);
        let obs = assemble_observable(&a, &b, &w).unwrap();
        for e in &obs.effects {
            assert_abs_diff_eq!(e.alpha(), 0.5, epsilon = 1e-15);
        }
        assert!(obs.normalization_error() <= 1e-15);
    }

    #[test]
    fn orthogonal_projections_reject_every_grid_witness() {
        let p = eff(1.0, [0.0, 0.0, 1.0]);
        let q = eff(1.0, [0.0, 1.0, 0.0]);
        let n = 24;
        for i in 0..=n {
            let gamma = i as f64 / n as f64;
            for j in 0..=n {
                for k in 0..=n {
                    let g = Vec3::new(0.0, j as f64 / n as f64, k as f64 / n as f64);
                    assert!(!operator_inequalities_hold(&p, &q, &Witness::new(gamma, g)).holds);
                }
            }
        }
        assert_eq!(find_witness(&p, &q).unwrap(), None);
    }

    #[test]
    fn full_length_interval() {
        let s = 1.0 / 3.0_f64.sqrt();
        // b = β = 1 perpendicular to a: violates a² + b² ≤ 1 + (a·b)².
        let p = RelativePair::new(1.0, s, 1.0, 0.0, 1.0);
        assert_eq!(gamma_interval_2ci(&p).unwrap(), None);
        let p = RelativePair::new(1.0, 1.0, 1.0, 0.0, 1.0);
        assert_eq!(gamma_interval_2ci(&p).unwrap(), None);
        for theta in [0.3_f64, 1.2, 2.5] {
            let p = RelativePair::new(0.6, 0.5, 0.6, 0.6 * theta.cos(), 0.6 * theta.sin());
            let (lo, hi) = gamma_interval_2ci(&p).unwrap().unwrap();
            assert!(lo <= hi);
        }
        let short = RelativePair::new(0.6, 0.5, 0.6, 0.1, 0.1);
        assert!(matches!(
            gamma_interval_2ci(&short),
            Err(GammaIntervalError::NotFullLength { .. })
        ));
        let para = RelativePair::new(0.7, 0.7, 0.5, 0.5, 0.0);
        assert_eq!(
            gamma_interval_2ci(&para),
            Err(GammaIntervalError::Degenerate)
        );
    }

    #[test]
    fn sic_find_witness() {
        let (a, b, _) = sic();
        let found = find_witness(&a, &b).unwrap().unwrap();
        assert!(found.report.holds);
        assert_abs_diff_eq!(found.witness.gamma, 0.5, epsilon = 1e-12);
        assert_eq!(found.source, WitnessSource::FourCircle);
        let g = 1.0 / (2.0 * 3.0_f64.sqrt());
        assert!(
            found.witness.gvec.max_abs_diff(Vec3::new(g, g, g)) <= 1e-12,
            "{:?}",
            found.witness.gvec
        );
        assert!(found.report.worst_residual().abs() <= 1e-12);
    }

    #[test]
    fn commuting_pair_uses_product() {
        let a = eff(0.8, [0.0, 0.0, 0.5]);
        let b = eff(1.3, [0.0, 0.0, -0.6]);
        let found = find_witness(&a, &b).unwrap().unwrap();
        assert_eq!(found.source, WitnessSource::Commuting);
        // diag entries of AB: (0.65·0.35, 0.15·0.95)
        let m = found.witness.to_matrix();
        assert_abs_diff_eq!(m.entries[0].re, 0.65 * 0.35, epsilon = 1e-15);
        assert_abs_diff_eq!(m.entries[3].re, 0.15 * 0.95, epsilon = 1e-15);
    }

    #[test]
    fn four_circle_gamma() {
        let a = eff(0.6, [0.5, 0.0, 0.0]);
        let b = eff(1.0, [0.0, 0.8196, 0.0]);
        let found = find_witness(&a, &b).unwrap().unwrap();
        assert_eq!(found.source, WitnessSource::FourCircle);
        assert_abs_diff_eq!(found.witness.gamma, 0.3, epsilon = 1e-15);
        assert!(found.report.worst_residual() <= 1e-9);

        // On the boundary itself all four inequalities are tight.
        let top = crate::coexist::by_max(0.6, 0.5, 1.0, 0.0).unwrap();
        let b = eff(1.0, [0.0, top, 0.0]);
        let found = find_witness(&a, &b).unwrap().unwrap();
        for r in found.report.residuals {
            assert!(r.abs() <= 1e-9, "{:?}", found.report);
        }
    }

    #[test]
    fn complemented_inputs_map_back() {
        let a = eff(0.6, [0.5, 0.0, 0.0]);
        let b = eff(0.9, [0.1, 0.2, 0.2]);
        for (x, y) in [
            (a, b),
            (a.complement(), b),
            (a, b.complement()),
            (a.complement(), b.complement()),
        ] {
            let found = find_witness(&x, &y).unwrap().unwrap();
            let obs = assemble_observable(&x, &y, &found.witness).unwrap();
            assert!(obs.marginal_a().avec().max_abs_diff(x.avec()) < 1e-15);
            assert!(obs.marginal_b().avec().max_abs_diff(y.avec()) < 1e-15);
        }
    }

    #[test]
    fn rejected_witness() {
        let (a, b, _) = sic();
        let bad = Witness::new(0.9, Vec3::zero());
        assert!(matches!(
            assemble_observable(&a, &b, &bad),
            Err(WitnessError::Rejected { .. })
        ));
    }
}
