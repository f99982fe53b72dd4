//! Deciding whether two qubit effects belong to one observable.
//!
//! Two effects `A`, `B` on `ℂ²` are *coexistent* when both are event-effects
//! of a single observable. This crate decides coexistence in closed form
//! ([`coexist::classify`]), samples the boundary of the allowed region,
//! constructs explicit four-outcome witness observables ([`witness`]), and
//! cross-checks everything against a brute-force geometric search
//! ([`oracle`]).
//!
//! All algorithms are generic over [`Real`] (`f32` or `f64`); the `*64`
//! aliases below are the usual entry points.
//!
//! ```
//! use qubit_coexist::{BlochEffect64, is_coexistent};
//!
//! let s = 1.0 / 3.0_f64.sqrt();
//! let x = BlochEffect64::from_parts(1.0, [s, 0.0, 0.0]).unwrap();
//! let y = BlochEffect64::from_parts(1.0, [0.0, s, 0.0]).unwrap();
//! assert!(is_coexistent(&x, &y));
//! ```

pub mod bloch;
pub mod coexist;
pub mod oracle;
pub mod scalar;
pub mod selftest;
pub mod vector;
pub mod witness;

pub use bloch::{
    relative_pair, sharpness, BlochEffect, EffectError, HermitianMatrix2, PlanarFrame, ReducedPair,
    ReductionReport, RelativePair,
};
pub use coexist::{
    boundary_curve, by_max, classify, decide, is_coexistent, special_case_verdict, BoundaryCurve,
    BoundarySample, FigurePreset, Regime, RestrictedInterval, SpecialCase, SpecialVerdict, Verdict,
};
pub use oracle::{
    disks_at, disks_feasible, oracle_agreement_sweep, oracle_coexistent, DiskSystem, OracleResult,
};
pub use scalar::{Real, Tolerances};
pub use vector::{Vec2, Vec3};
pub use witness::{
    assemble_observable, find_witness, gamma_interval_2ci, operator_inequalities_hold,
    InequalityReport, Witness, WitnessObservable,
};

pub type BlochEffect64 = BlochEffect<f64>;
pub type BlochEffect32 = BlochEffect<f32>;
pub type RelativePair64 = RelativePair<f64>;
pub type RelativePair32 = RelativePair<f32>;
pub type Verdict64 = Verdict<f64>;
pub type Verdict32 = Verdict<f32>;
pub type BoundaryCurve64 = BoundaryCurve<f64>;
pub type Witness64 = Witness<f64>;
pub type WitnessObservable64 = WitnessObservable<f64>;
pub type DiskSystem64 = DiskSystem<f64>;
pub type OracleResult64 = OracleResult<f64>;
pub type Vec3f64 = Vec3<f64>;
