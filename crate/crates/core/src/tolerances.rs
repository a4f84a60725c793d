//! Numerical tolerances and guard thresholds used across the crate.
//!
//! Kept in one place so that every check quotes the same constant and tests can
//! cross-reference them. These are defaults; functions that accept an explicit
//! tolerance document the override.

/// Absolute tolerance on |a·d − b·c − 1| for a matrix to count as symplectic.
pub const DET_TOL: f64 = 1e-12;

/// Compatibility residual |a(t) + m·ḃ(t)| tolerance when ḃ comes from an
/// analytic derivative evaluator.
pub const HJ_TOL_ANALYTIC: f64 = 1e-8;

/// Compatibility residual tolerance when ḃ comes from central finite differences.
pub const HJ_TOL_FD: f64 = 1e-6;

/// Representation coefficients with magnitude at or below this floor are treated
/// as vanishing (caustic / degenerate representation).
pub const COEFF_FLOOR: f64 = 1e-10;

/// Relative step for central time differences: h = FD_STEP_REL · max(1, |t|).
pub const FD_STEP_REL: f64 = 1e-5;

/// Fraction of total norm tolerated outside the sampled region. Also the bound
/// on norm found in the outer 5% of a Crank–Nicolson grid before the run aborts.
pub const GRID_TOL: f64 = 1e-6;

/// Fraction of the grid (per side) that counts as the boundary zone for the
/// Crank–Nicolson spill check.
pub const BOUNDARY_FRACTION: f64 = 0.05;

/// Minimum samples per local phase period of the kernel, measured over the
/// integration range that actually carries amplitude.
pub const MIN_SAMPLES_PER_PERIOD: f64 = 8.0;

/// Samples below this fraction of the peak magnitude are outside the effective
/// support for resolution checks.
pub const SUPPORT_FLOOR: f64 = 1e-10;

/// Safety factor in the Crank–Nicolson resolution guard Δt ≤ Δq²·m/ħ · safety.
/// The scheme is unconditionally stable; the guard is about accuracy.
pub const CN_SAFETY: f64 = 0.5;

/// Relative slack when deciding whether grids satisfy the FFT frequency-matching
/// condition Δq·ΔQ·N = 2πħ|b|.
pub const FAST_MATCH_RTOL: f64 = 1e-9;
