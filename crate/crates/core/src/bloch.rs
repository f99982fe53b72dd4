//! Qubit effects in Bloch form and reduction of a pair to relative coordinates.
//!
//! An effect is written `A = ½(α·1 + a⃗·σ)` with `‖a⃗‖ ≤ α ≤ 2 − ‖a⃗‖`. For a pair
//! `(A, B)` only the lengths of the Bloch vectors and the angle between them
//! matter, so every pair is reduced to a [`RelativePair`] after replacing any
//! effect with trace coefficient above one by its complement.

use num_complex::Complex;
use thiserror::Error;

use crate::scalar::{sqrt0, Real};
use crate::vector::Vec3;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EffectError {
    #[error("effect parameters must be finite")]
    NotFinite,
    #[error("trace coefficient alpha = {alpha} is below the Bloch vector length {norm} (operator not positive)")]
    BelowNorm { alpha: f64, norm: f64 },
    #[error(
        "trace coefficient alpha = {alpha} exceeds 2 - {norm} (operator exceeds the identity)"
    )]
    AboveComplement { alpha: f64, norm: f64 },
    #[error("matrix is not Hermitian (deviation {deviation:e})")]
    NotHermitian { deviation: f64 },
    #[error("eigenvalue {eigenvalue} lies outside [0, 1]")]
    EigenvalueOutOfRange { eigenvalue: f64 },
}

/// A qubit effect `½(α·1 + a⃗·σ)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlochEffect<T> {
    alpha: T,
    avec: Vec3<T>,
}

impl<T: Real> BlochEffect<T> {
    /// Validates `‖a⃗‖ ≤ α ≤ 2 − ‖a⃗‖` up to the operator-bound tolerance.
    pub fn new(alpha: T, avec: Vec3<T>) -> Result<Self, EffectError> {
        if !alpha.is_finite() || !avec.is_finite() {
            return Err(EffectError::NotFinite);
        }
        let tol = T::tolerances().operator_bound;
        let norm = avec.norm();
        if norm - alpha > tol {
            return Err(EffectError::BelowNorm {
                alpha: alpha.as_f64(),
                norm: norm.as_f64(),
            });
        }
        if alpha + norm - T::lit(2.0) > tol {
            return Err(EffectError::AboveComplement {
                alpha: alpha.as_f64(),
                norm: norm.as_f64(),
            });
        }
        Ok(Self { alpha, avec })
    }

    pub fn from_parts(alpha: T, avec: [T; 3]) -> Result<Self, EffectError> {
        Self::new(alpha, Vec3::from_array(avec))
    }

    /// Bypasses validation. Callers must guarantee the invariant.
    pub(crate) fn new_unchecked(alpha: T, avec: Vec3<T>) -> Self {
        Self { alpha, avec }
    }

    /// `λ·1` for `0 ≤ λ ≤ 1`.
    pub fn trivial(lambda: T) -> Result<Self, EffectError> {
        Self::new(lambda + lambda, Vec3::zero())
    }

    pub fn alpha(&self) -> T {
        self.alpha
    }

    pub fn avec(&self) -> Vec3<T> {
        self.avec
    }

    /// Length of the Bloch vector.
    pub fn norm(&self) -> T {
        self.avec.norm()
    }

    /// `1 − A`, i.e. `(2 − α, −a⃗)`.
    pub fn complement(&self) -> Self {
        Self {
            alpha: T::lit(2.0) - self.alpha,
            avec: -self.avec,
        }
    }

    /// Sharpness of this effect; see [`sharpness`].
    pub fn sharpness(&self) -> T {
        sharpness(self.alpha, self.norm())
    }

    /// Non-trivial projection: `A² = A`, `A ≠ 0, 1`.
    pub fn is_nontrivial_projection(&self) -> bool {
        let tol = T::tolerances().compare;
        (self.alpha - T::one()).abs() <= tol && (self.norm() - T::one()).abs() <= tol
    }

    /// Multiple of the identity.
    pub fn is_trivial(&self) -> bool {
        self.norm() <= T::tolerances().compare
    }

    /// `λA` for `0 ≤ λ ≤ 1`.
    pub fn scaled(&self, lambda: T) -> Self {
        Self::new_unchecked(self.alpha * lambda, self.avec.scale(lambda))
    }

    /// `λA + (1 − λ)C`, which is again an effect for `λ ∈ [0, 1]`.
    pub fn mix(&self, other: &Self, lambda: T) -> Self {
        let mu = T::one() - lambda;
        Self::new_unchecked(
            lambda * self.alpha + mu * other.alpha,
            self.avec.scale(lambda) + other.avec.scale(mu),
        )
    }

    /// Conjugation by the unitary whose Bloch action is the given rotation.
    pub fn rotated(&self, axis: Vec3<T>, angle: T) -> Self {
        Self::new_unchecked(self.alpha, self.avec.rotated(axis, angle))
    }

    /// `½(α·1 + a⃗·σ)` as a 2×2 matrix.
    pub fn to_matrix(&self) -> HermitianMatrix2<T> {
        let half = T::lit(0.5);
        let Vec3 { x, y, z } = self.avec;
        HermitianMatrix2::new([
            Complex::new(half * (self.alpha + z), T::zero()),
            Complex::new(half * x, -half * y),
            Complex::new(half * x, half * y),
            Complex::new(half * (self.alpha - z), T::zero()),
        ])
    }

    /// Pauli decomposition of a Hermitian matrix with spectrum in `[0, 1]`.
    pub fn from_matrix(m: &HermitianMatrix2<T>) -> Result<Self, EffectError> {
        if !m
            .entries
            .iter()
            .all(|c| c.re.is_finite() && c.im.is_finite())
        {
            return Err(EffectError::NotFinite);
        }
        let tol = T::tolerances();
        let deviation = m.hermitian_deviation();
        if deviation > tol.hermitian {
            return Err(EffectError::NotHermitian {
                deviation: deviation.as_f64(),
            });
        }
        let (lo, hi) = m.eigenvalues();
        if lo < -tol.operator_bound {
            return Err(EffectError::EigenvalueOutOfRange {
                eigenvalue: lo.as_f64(),
            });
        }
        if hi > T::one() + tol.operator_bound {
            return Err(EffectError::EigenvalueOutOfRange {
                eigenvalue: hi.as_f64(),
            });
        }
        let [m00, m01, m10, m11] = m.entries;
        // Average the off-diagonal pair so that tiny anti-Hermitian parts cancel.
        let off = (m10 + m01.conj()).scale(T::lit(0.5));
        let alpha = m00.re + m11.re;
        let avec = Vec3::new(off.re + off.re, off.im + off.im, m00.re - m11.re);
        Ok(Self::new_unchecked(alpha, avec))
    }
}

/// Sharpness `S(α, a)`: 1 for non-trivial projections, 0 for multiples of the identity.
///
/// `S(α, a) = ½(a² + α(2 − α) − √((α² − a²)((2 − α)² − a²)))`. With
/// `P = a² + α(2 − α)` and `Q` the product under the root, `P² − Q = 4a²`, so
/// the value is evaluated as `2a² / (P + √Q)`, which has no cancellation near
/// `a = 0`. `Q` is clamped at zero; it vanishes for projections.
pub fn sharpness<T: Real>(alpha: T, a: T) -> T {
    let two = T::lit(2.0);
    let a2 = a * a;
    let beta = two - alpha;
    let p = a2 + alpha * beta;
    let q = (alpha * alpha - a2) * (beta * beta - a2);
    let den = p + sqrt0(q);
    if den <= T::zero() {
        return T::zero();
    }
    (two * a2 / den).max(T::zero()).min(T::one())
}

/// 2×2 complex matrix in row-major order.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HermitianMatrix2<T> {
    pub entries: [Complex<T>; 4],
}

impl<T: Real> HermitianMatrix2<T> {
    pub fn new(entries: [Complex<T>; 4]) -> Self {
        Self { entries }
    }

    pub fn identity() -> Self {
        let o = Complex::new(T::one(), T::zero());
        let z = Complex::new(T::zero(), T::zero());
        Self::new([o, z, z, o])
    }

    pub fn hermitian_deviation(&self) -> T {
        let [m00, m01, m10, m11] = self.entries;
        let d = (m01 - m10.conj()).norm();
        d.max(m00.im.abs()).max(m11.im.abs())
    }

    pub fn trace(&self) -> T {
        self.entries[0].re + self.entries[3].re
    }

    /// Eigenvalues `(λ_min, λ_max)` of the Hermitian part.
    pub fn eigenvalues(&self) -> (T, T) {
        let [m00, m01, m10, m11] = self.entries;
        let half = T::lit(0.5);
        let mean = half * (m00.re + m11.re);
        let diff = half * (m00.re - m11.re);
        let off = (m01 + m10.conj()).scale(half);
        let radius = diff.hypot(off.norm());
        (mean - radius, mean + radius)
    }

    pub fn max_abs_diff(&self, o: &Self) -> T {
        self.entries
            .iter()
            .zip(o.entries.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(T::zero(), T::max)
    }
}

impl<T: Real> std::ops::Add for HermitianMatrix2<T> {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        let mut e = self.entries;
        for (x, y) in e.iter_mut().zip(o.entries) {
            *x = *x + y;
        }
        Self::new(e)
    }
}

impl<T: Real> std::ops::Sub for HermitianMatrix2<T> {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        let mut e = self.entries;
        for (x, y) in e.iter_mut().zip(o.entries) {
            *x = *x - y;
        }
        Self::new(e)
    }
}

/// A pair in canonical relative coordinates.
///
/// `bx` is the component of `b⃗` along `a⃗`, `by ≥ 0` the length of the
/// perpendicular part.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RelativePair<T> {
    pub alpha: T,
    pub a: T,
    pub beta: T,
    pub bx: T,
    pub by: T,
}

impl<T: Real> RelativePair<T> {
    pub fn new(alpha: T, a: T, beta: T, bx: T, by: T) -> Self {
        Self {
            alpha,
            a,
            beta,
            bx,
            by,
        }
    }

    /// Length of `b⃗`.
    pub fn b(&self) -> T {
        self.bx.hypot(self.by)
    }

    /// `a⃗·b⃗`.
    pub fn dot(&self) -> T {
        self.a * self.bx
    }

    /// One of the effects is a multiple of the identity.
    pub fn is_trivial(&self) -> bool {
        let tol = T::tolerances().compare;
        self.a <= tol || self.b() <= tol
    }

    /// `a⃗` and `b⃗` are (anti)parallel, so the effects commute.
    pub fn is_commuting(&self) -> bool {
        self.is_trivial() || self.by <= T::tolerances().compare
    }

    /// Same `(α, a, β, b_x)` with a different perpendicular component.
    pub fn with_by(&self, by: T) -> Self {
        Self { by, ..*self }
    }

    /// Canonical form: `0 ≤ α, β ≤ 1`, `b ≤ β`, `a ≤ α`, `b_y ≥ 0`.
    pub fn is_canonical(&self) -> bool {
        let tol = T::tolerances().operator_bound;
        self.alpha >= T::zero()
            && self.alpha <= T::one() + tol
            && self.beta >= T::zero()
            && self.beta <= T::one() + tol
            && self.a >= T::zero()
            && self.a <= self.alpha + tol
            && self.by >= T::zero()
            && self.b() <= self.beta + tol
    }
}

/// Which complements were taken while reducing a pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct ReductionReport {
    pub complemented_a: bool,
    pub complemented_b: bool,
    /// `α = 0`, `β = 0`, `a⃗ = 0` or `b⃗ = 0` after reduction.
    pub trivial: bool,
}

/// Orthonormal frame of the plane containing the reduced Bloch vectors.
///
/// `ex` points along the reduced `a⃗`; `ey` along the perpendicular part of
/// the reduced `b⃗`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlanarFrame<T> {
    pub ex: Vec3<T>,
    pub ey: Vec3<T>,
}

impl<T: Real> PlanarFrame<T> {
    pub fn lift(&self, x: T, y: T) -> Vec3<T> {
        self.ex.scale(x) + self.ey.scale(y)
    }

    /// Unit normal `e_x × e_y`.
    pub fn normal(&self) -> Vec3<T> {
        self.ex.cross(self.ey)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReducedPair<T> {
    pub pair: RelativePair<T>,
    pub report: ReductionReport,
    pub frame: PlanarFrame<T>,
    /// The effects after complementation, in the original orientation.
    pub a_effect: BlochEffect<T>,
    pub b_effect: BlochEffect<T>,
}

/// Reduces `(A, B)` to canonical relative coordinates.
pub fn relative_pair<T: Real>(a_eff: &BlochEffect<T>, b_eff: &BlochEffect<T>) -> ReducedPair<T> {
    let complemented_a = a_eff.alpha() > T::one();
    let complemented_b = b_eff.alpha() > T::one();
    let ra = if complemented_a {
        a_eff.complement()
    } else {
        *a_eff
    };
    let rb = if complemented_b {
        b_eff.complement()
    } else {
        *b_eff
    };

    let avec = ra.avec();
    let bvec = rb.avec();
    let a = avec.norm();
    let b = bvec.norm();
    let tol = T::tolerances().compare;

    let (pair, frame) = match avec.normalized() {
        Some(ex) if a > T::zero() => {
            let bx = avec.dot(bvec) / a;
            // |a × b| / a avoids the cancellation in sqrt(b² − bx²) for near-parallel vectors.
            let by = avec.cross(bvec).norm() / a;
            let perp = bvec - ex.scale(bx);
            let ey = perp.normalized().unwrap_or_else(|| ex.any_perpendicular());
            (
                RelativePair::new(ra.alpha(), a, rb.alpha(), bx, by),
                PlanarFrame { ex, ey },
            )
        }
        _ => {
            let ex = bvec
                .normalized()
                .unwrap_or_else(|| Vec3::new(T::zero(), T::zero(), T::one()));
            let frame = PlanarFrame {
                ex,
                ey: ex.any_perpendicular(),
            };
            (
                RelativePair::new(ra.alpha(), T::zero(), rb.alpha(), b, T::zero()),
                frame,
            )
        }
    };

    let trivial = a <= tol || b <= tol || ra.alpha() <= tol || rb.alpha() <= tol;
    ReducedPair {
        pair,
        report: ReductionReport {
            complemented_a,
            complemented_b,
            trivial,
        },
        frame,
        a_effect: ra,
        b_effect: rb,
    }
}
