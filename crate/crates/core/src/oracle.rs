//! Brute-force coexistence check on the four-disk system.
//!
//! For a trial witness `G₁ = ½(γ·1 + g⃗·σ)` the four operator inequalities
//! `0 ≤ G₁ ≤ A, B` and `A + B − 1 ≤ G₁` become
//!
//! ```text
//! ‖g⃗‖ ≤ γ,  ‖a⃗ − g⃗‖ ≤ α − γ,  ‖b⃗ − g⃗‖ ≤ β − γ,  ‖a⃗ + b⃗ − g⃗‖ ≤ 2 + γ − α − β,
//! ```
//!
//! i.e. `g⃗` must lie in four disks in the plane of `a⃗` and `b⃗`. This module
//! decides feasibility geometrically and never consults the closed-form
//! classifier.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, UnitSphere};
use rayon::prelude::*;

use crate::bloch::{BlochEffect, RelativePair};
use crate::coexist::Regime;
use crate::scalar::Real;
use crate::vector::{Vec2, Vec3};

pub const DEFAULT_GRID: usize = 10_000;
pub const MIN_GRID: usize = 100;
/// Oracle results with `|margin|` below this are not compared strictly.
pub const BOUNDARY_BAND: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Disk<T> {
    pub center: Vec2<T>,
    pub radius: T,
}

impl<T: Real> Disk<T> {
    pub fn contains(&self, p: Vec2<T>, slack: T) -> bool {
        p.dist(self.center) <= self.radius + slack
    }

    /// Signed distance of `p` outside the disk.
    pub fn excess(&self, p: Vec2<T>) -> T {
        p.dist(self.center) - self.radius
    }
}

/// The four disks at a fixed `γ`: centers `0, a⃗, b⃗, a⃗ + b⃗`, radii
/// `γ, α − γ, β − γ, 2 + γ − α − β`. A negative radius means the disk is empty.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiskSystem<T> {
    pub disks: [Disk<T>; 4],
    pub gamma: T,
}

impl<T: Real> DiskSystem<T> {
    pub fn new(alpha: T, beta: T, avec: Vec2<T>, bvec: Vec2<T>, gamma: T) -> Self {
        let two = T::lit(2.0);
        let disk = |center, radius| Disk { center, radius };
        Self {
            disks: [
                disk(Vec2::zero(), gamma),
                disk(avec, alpha - gamma),
                disk(bvec, beta - gamma),
                disk(avec + bvec, two + gamma - alpha - beta),
            ],
            gamma,
        }
    }

    pub fn radii(&self) -> [T; 4] {
        self.disks.map(|d| d.radius)
    }

    /// Same centers with every radius grown by `t`.
    pub fn inflated(&self, t: T) -> Self {
        let mut out = *self;
        for d in &mut out.disks {
            d.radius = d.radius + t;
        }
        out
    }

    /// Largest excess of `p` over the four disks.
    pub fn max_excess(&self, p: Vec2<T>) -> T {
        self.disks
            .iter()
            .map(|d| d.excess(p))
            .fold(T::neg_infinity(), T::max)
    }
}

/// Disks for a canonical pair.
pub fn disks_at<T: Real>(p: &RelativePair<T>, gamma: T) -> DiskSystem<T> {
    DiskSystem::new(
        p.alpha,
        p.beta,
        Vec2::new(p.a, T::zero()),
        Vec2::new(p.bx, p.by),
        gamma,
    )
}

/// Intersection points of two circles, accepting tangencies within `slack`.
pub fn circle_intersections<T: Real>(d1: &Disk<T>, d2: &Disk<T>, slack: T) -> Option<[Vec2<T>; 2]> {
    let delta = d2.center - d1.center;
    let dist = delta.norm();
    let (r1, r2) = (d1.radius, d2.radius);
    if dist <= T::zero() || dist > r1 + r2 + slack || dist < (r1 - r2).abs() - slack {
        return None;
    }
    let along = (r1 * r1 - r2 * r2 + dist * dist) / (dist + dist);
    let h2 = r1 * r1 - along * along;
    let h = if h2 > T::zero() { h2.sqrt() } else { T::zero() };
    let unit = delta.scale(dist.recip());
    let mid = d1.center + unit.scale(along);
    let off = unit.perp().scale(h);
    Some([mid + off, mid - off])
}

fn feasible_with_slack<T: Real>(d: &DiskSystem<T>, slack: T) -> Option<Vec2<T>> {
    if d.disks.iter().any(|k| k.radius < -slack) {
        return None;
    }
    let mut disks = d.disks;
    for k in &mut disks {
        k.radius = k.radius.max(T::zero());
    }
    let inside = |p: Vec2<T>| disks.iter().all(|k| k.contains(p, slack));

    // A nonempty intersection either has a vertex where two boundary circles
    // cross, or it is one whole disk and contains that disk's center.
    if let Some(c) = disks.iter().map(|k| k.center).find(|&c| inside(c)) {
        return Some(c);
    }
    for i in 0..4 {
        for j in (i + 1)..4 {
            if let Some(pts) = circle_intersections(&disks[i], &disks[j], slack) {
                if let Some(p) = pts.into_iter().find(|&p| inside(p)) {
                    return Some(p);
                }
            }
        }
    }
    None
}

/// A common point of the four disks, if any (membership slack `1e-12` in `f64`).
pub fn disks_feasible<T: Real>(d: &DiskSystem<T>) -> Option<Vec2<T>> {
    feasible_with_slack(d, T::tolerances().membership)
}

/// `min_g max_i (‖g − c_i‖ − r_i)`: how far the radii must grow (positive)
/// or may shrink (negative) before the intersection appears or vanishes.
///
/// Feasibility uses the membership slack: every vertex of the intersection
/// lies on two circles and would otherwise be lost to rounding.
pub fn inflation_margin<T: Real>(d: &DiskSystem<T>) -> T {
    let mut lo = -d.radii().into_iter().fold(T::zero(), T::max) - T::one();
    let mut hi = T::lit(4.0);
    for _ in 0..200 {
        let mid = T::lit(0.5) * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if disks_feasible(&d.inflated(mid)).is_some() {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    hi
}

/// The pair laid out in its own plane, with the frame used to lift points back.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlanarInstance<T> {
    pub alpha: T,
    pub beta: T,
    pub avec: Vec2<T>,
    pub bvec: Vec2<T>,
    pub ex: Vec3<T>,
    pub ey: Vec3<T>,
}

impl<T: Real> PlanarInstance<T> {
    /// Projects the original (uncomplemented) pair onto the plane of its Bloch vectors.
    pub fn new(a: &BlochEffect<T>, b: &BlochEffect<T>) -> Self {
        let (av, bv) = (a.avec(), b.avec());
        let ex = av
            .normalized()
            .or_else(|| bv.normalized())
            .unwrap_or_else(|| Vec3::new(T::one(), T::zero(), T::zero()));
        let bx = bv.dot(ex);
        let rest = bv - ex.scale(bx);
        let ey = rest.normalized().unwrap_or_else(|| ex.any_perpendicular());
        Self {
            alpha: a.alpha(),
            beta: b.alpha(),
            avec: Vec2::new(av.dot(ex), av.dot(ey)),
            bvec: Vec2::new(bx, rest.dot(ey)),
            ex,
            ey,
        }
    }

    pub fn disks(&self, gamma: T) -> DiskSystem<T> {
        DiskSystem::new(self.alpha, self.beta, self.avec, self.bvec, gamma)
    }

    /// `[max(0, α + β − 2), min(α, β)]`, outside of which some radius is negative.
    pub fn gamma_range(&self) -> (T, T) {
        let lo = (self.alpha + self.beta - T::lit(2.0)).max(T::zero());
        (lo, self.alpha.min(self.beta))
    }

    pub fn lift(&self, p: Vec2<T>) -> Vec3<T> {
        self.ex.scale(p.x) + self.ey.scale(p.y)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Certificate<T> {
    pub gamma: T,
    /// Common point in the instance plane.
    pub point: Vec2<T>,
    /// The same point as a Bloch vector.
    pub gvec: Vec3<T>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OracleResult<T> {
    pub coexistent: bool,
    /// Smallest uniform radius change that flips feasibility, minimised over
    /// `γ`. Negative: feasible with that much room. Positive: infeasible by that much.
    pub margin: T,
    pub certificate: Option<Certificate<T>>,
    /// Refined endpoints of the feasible `γ` set.
    pub gamma_interval: Option<(T, T)>,
    /// Grid points at which the disks intersect.
    pub grid_hits: usize,
    /// Maximal runs of consecutive feasible grid points.
    pub feasible_runs: usize,
}

fn golden_min<T: Real, F: Fn(T) -> T>(f: F, mut lo: T, mut hi: T) -> (T, T) {
    let inv_phi = T::lit(0.618_033_988_749_894_9);
    let mut x1 = hi - inv_phi * (hi - lo);
    let mut x2 = lo + inv_phi * (hi - lo);
    let (mut f1, mut f2) = (f(x1), f(x2));
    for _ in 0..200 {
        if hi - lo <= T::epsilon() * T::lit(4.0) {
            break;
        }
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - inv_phi * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + inv_phi * (hi - lo);
            f2 = f(x2);
        }
    }
    let candidates = [(lo, f(lo)), (x1, f1), (x2, f2), (hi, f(hi))];
    candidates.into_iter().fold(
        (lo, T::infinity()),
        |best, c| if c.1 < best.1 { c } else { best },
    )
}

fn refine_edge<T: Real>(inst: &PlanarInstance<T>, mut inside: T, mut outside: T) -> T {
    let stop = T::lit(1e-10).max(T::epsilon() * T::lit(8.0));
    while (inside - outside).abs() > stop {
        let mid = T::lit(0.5) * (inside + outside);
        if disks_feasible(&inst.disks(mid)).is_some() {
            inside = mid;
        } else {
            outside = mid;
        }
    }
    inside
}

/// Decides coexistence by scanning `γ` and testing disk feasibility exactly.
///
/// `grid` is clamped to at least [`MIN_GRID`].
pub fn oracle_coexistent<T: Real>(
    a: &BlochEffect<T>,
    b: &BlochEffect<T>,
    grid: usize,
) -> OracleResult<T> {
    let grid = grid.max(MIN_GRID);
    let inst = PlanarInstance::new(a, b);
    let (g_lo, g_hi) = inst.gamma_range();
    let span = g_hi - g_lo;
    let gamma_at = |i: usize| {
        if i == grid {
            g_hi
        } else {
            g_lo + span * T::from_usize(i).expect("index") / T::from_usize(grid).expect("grid")
        }
    };

    let mut first = None;
    let mut last = None;
    let mut grid_hits = 0;
    let mut feasible_runs = 0;
    let mut prev = false;
    if span >= T::zero() {
        for i in 0..=grid {
            let hit = disks_feasible(&inst.disks(gamma_at(i))).is_some();
            if hit {
                grid_hits += 1;
                first.get_or_insert(i);
                last = Some(i);
                if !prev {
                    feasible_runs += 1;
                }
            }
            prev = hit;
        }
    }

    let (g_star, margin) = if span >= T::zero() {
        golden_min(|g| inflation_margin(&inst.disks(g)), g_lo, g_hi)
    } else {
        (g_lo, T::infinity())
    };
    let deepest = if span >= T::zero() {
        disks_feasible(&inst.disks(g_star))
    } else {
        None
    };

    let gamma_interval = match (first, last) {
        (Some(f), Some(l)) => {
            let lo = if f == 0 {
                gamma_at(0)
            } else {
                refine_edge(&inst, gamma_at(f), gamma_at(f - 1))
            };
            let hi = if l == grid {
                gamma_at(grid)
            } else {
                refine_edge(&inst, gamma_at(l), gamma_at(l + 1))
            };
            Some((lo, hi))
        }
        _ => deepest.map(|_| (g_star, g_star)),
    };

    let certificate = match deepest {
        Some(point) => Some(Certificate {
            gamma: g_star,
            point,
            gvec: inst.lift(point),
        }),
        None => first.and_then(|i| {
            let gamma = gamma_at(i);
            disks_feasible(&inst.disks(gamma)).map(|point| Certificate {
                gamma,
                point,
                gvec: inst.lift(point),
            })
        }),
    };

    OracleResult {
        coexistent: certificate.is_some(),
        margin,
        certificate,
        gamma_interval,
        grid_hits,
        feasible_runs,
    }
}

/// `α ∈ (0, 1]`, `a ∈ [0, α]` uniform, direction uniform on the sphere.
pub fn random_canonical_effect<T: Real, R: Rng + ?Sized>(rng: &mut R) -> BlochEffect<T> {
    let alpha = 1.0 - rng.gen::<f64>();
    let len = alpha * rng.gen::<f64>();
    let dir: [f64; 3] = UnitSphere.sample(rng);
    let v = Vec3::new(
        T::lit(dir[0] * len),
        T::lit(dir[1] * len),
        T::lit(dir[2] * len),
    );
    BlochEffect::new(T::lit(alpha), v).expect("sampled inside the admissible ball")
}

#[derive(Debug, Clone, PartialEq)]
pub struct Disagreement<T> {
    pub index: usize,
    pub a: BlochEffect<T>,
    pub b: BlochEffect<T>,
    pub classify: bool,
    pub oracle: bool,
    pub margin: T,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepReport<T> {
    pub n: usize,
    pub seed: u64,
    pub grid: usize,
    pub agreements: usize,
    /// Instances within [`BOUNDARY_BAND`] of the decision flip.
    pub boundary_band: usize,
    pub disagreements: Vec<Disagreement<T>>,
    pub coexistent: usize,
    pub regime_counts: [usize; 4],
    /// Smallest `|margin|` among strictly compared instances.
    pub min_abs_margin: T,
}

impl<T: Real> SweepReport<T> {
    pub fn passed(&self) -> bool {
        self.disagreements.is_empty()
    }
}

fn regime_slot(r: Regime) -> usize {
    match r {
        Regime::C1 => 0,
        Regime::C2 => 1,
        Regime::C3 => 2,
        Regime::TrivialParallel => 3,
    }
}

/// Generates the `n` sweep instances for `seed`.
pub fn sweep_pairs<T: Real>(n: usize, seed: u64) -> Vec<(BlochEffect<T>, BlochEffect<T>)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| {
            let a = random_canonical_effect(&mut rng);
            let b = random_canonical_effect(&mut rng);
            (a, b)
        })
        .collect()
}

/// Compares the oracle with the closed-form classifier on given pairs.
pub fn compare_pairs<T: Real>(
    pairs: &[(BlochEffect<T>, BlochEffect<T>)],
    grid: usize,
) -> Vec<(bool, OracleResult<T>, Regime)> {
    pairs
        .par_iter()
        .map(|(a, b)| {
            let v = crate::coexist::decide(a, b);
            (v.coexistent, oracle_coexistent(a, b, grid), v.regime)
        })
        .collect()
}

/// Oracle vs classifier on `n` seeded random pairs.
pub fn oracle_agreement_sweep<T: Real>(n: usize, seed: u64, grid: usize) -> SweepReport<T> {
    let pairs = sweep_pairs::<T>(n.max(1), seed);
    sweep_report(&pairs, seed, grid)
}

/// Builds the agreement report for an explicit list of pairs.
pub fn sweep_report<T: Real>(
    pairs: &[(BlochEffect<T>, BlochEffect<T>)],
    seed: u64,
    grid: usize,
) -> SweepReport<T> {
    let band = T::lit(BOUNDARY_BAND);
    let results = compare_pairs(pairs, grid);
    let mut report = SweepReport {
        n: pairs.len(),
        seed,
        grid: grid.max(MIN_GRID),
        agreements: 0,
        boundary_band: 0,
        disagreements: Vec::new(),
        coexistent: 0,
        regime_counts: [0; 4],
        min_abs_margin: T::infinity(),
    };
    for (index, ((a, b), (closed, oracle, regime))) in pairs.iter().zip(results).enumerate() {
        report.regime_counts[regime_slot(regime)] += 1;
        if closed {
            report.coexistent += 1;
        }
        if oracle.margin.abs() < band {
            report.boundary_band += 1;
            continue;
        }
        report.min_abs_margin = report.min_abs_margin.min(oracle.margin.abs());
        if closed == oracle.coexistent {
            report.agreements += 1;
        } else {
            report.disagreements.push(Disagreement {
                index,
                a: *a,
                b: *b,
                classify: closed,
                oracle: oracle.coexistent,
                margin: oracle.margin,
            });
        }
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn eff(alpha: f64, v: [f64; 3]) -> BlochEffect<f64> {
        BlochEffect::from_parts(alpha, v).unwrap()
    }

    #[test]
    fn disk_examples() {
        let p = RelativePair::new(0.8, 0.5, 0.6, 0.1, 0.3);
        let d = disks_at(&p, 0.0);
        assert_eq!(d.disks[0].radius, 0.0);
        let d = disks_at(&p, 0.6);
        assert_abs_diff_eq!(d.disks[2].radius, 0.0);

        let d = disks_at(&RelativePair::new(1.0, 1.0, 1.0, 0.0, 1.0), 0.5);
        assert_eq!(d.radii(), [0.5; 4]);
        let centers: Vec<_> = d.disks.iter().map(|k| (k.center.x, k.center.y)).collect();
        assert_eq!(
            centers,
            vec![(0.0, 0.0), (1.0, 0.0), (0.0, 1.0), (1.0, 1.0)]
        );
    }

    #[test]
    fn c1_pair_is_feasible_at_interior_gamma() {
        let p = RelativePair::new(0.6, 0.5, 0.6, 0.2, 0.3);
        assert!(disks_feasible(&disks_at(&p, 0.3)).is_some());
    }

    #[test]
    fn orthogonal_projections_never_feasible() {
        let p = RelativePair::new(1.0, 1.0, 1.0, 0.0, 1.0);
        for i in 0..=1000 {
            let g = i as f64 / 1000.0;
            assert!(disks_feasible(&disks_at(&p, g)).is_none(), "gamma = {g}");
        }
        let r = oracle_coexistent(&eff(1.0, [0.0, 0.0, 1.0]), &eff(1.0, [0.0, 1.0, 0.0]), 1000);
        assert!(!r.coexistent);
        assert!(r.margin > 1e-3);
        assert!(r.certificate.is_none());
    }

    #[test]
    fn sic_pair_point() {
        let s = 1.0 / 3.0_f64.sqrt();
        let p = RelativePair::new(1.0, s, 1.0, 0.0, s);
        let d = disks_at(&p, 0.5);
        let want = Vec2::new(s / 2.0, s / 2.0);
        assert!(d.disks.iter().all(|k| k.contains(want, 1e-12)));
        assert!(disks_feasible(&d).is_some());
    }

    #[test]
    fn tangent_circles_are_found() {
        let d1 = Disk {
            center: Vec2::new(0.0, 0.0),
            radius: 0.5,
        };
        let d2 = Disk {
            center: Vec2::new(1.0, 0.0),
            radius: 0.5,
        };
        let [p, q] = circle_intersections(&d1, &d2, 1e-12).unwrap();
        assert_abs_diff_eq!(p.x, 0.5);
        assert_abs_diff_eq!(q.y, 0.0);
        let far = Disk {
            center: Vec2::new(1.1, 0.0),
            radius: 0.5,
        };
        assert!(circle_intersections(&d1, &far, 1e-12).is_none());
    }

    #[test]
    fn margin_sign() {
        let p = RelativePair::new(0.6, 0.5, 0.6, 0.2, 0.3);
        assert!(inflation_margin(&disks_at(&p, 0.3)) < 0.0);
        let q = RelativePair::new(1.0, 1.0, 1.0, 0.0, 1.0);
        assert!(inflation_margin(&disks_at(&q, 0.5)) > 0.0);
    }

    #[test]
    fn sweep_smoke() {
        let r = oracle_agreement_sweep::<f64>(20, 7, 500);
        assert_eq!(r.n, 20);
        assert!(r.passed(), "{:?}", r.disagreements);
        assert_eq!(r.agreements + r.boundary_band, 20);
    }

    #[test]
    fn sweep_is_deterministic() {
        let a = sweep_pairs::<f64>(5, 99);
        let b = sweep_pairs::<f64>(5, 99);
        assert_eq!(a, b);
    }
}
