//! Symplectic 2×2 matrices, one-parameter transform families, and the
//! compatibility condition linking them to Hamilton–Jacobi theory.
//!
//! A matrix (a, b; c, d) encodes the linear canonical transformation
//! Q = a·q + b·p, P = c·q + d·p. Preserving the Poisson bracket {Q, P} = 1
//! is exactly the unit-determinant constraint a·d − b·c = 1. A family t ↦ M(t)
//! describes evolution; it generates quantum dynamics iff a(t) = −m·ḃ(t).

use crate::error::{Error, Result};
use crate::tolerances::{COEFF_FLOOR, DET_TOL, FD_STEP_REL, HJ_TOL_ANALYTIC, HJ_TOL_FD};
use serde::{Deserialize, Serialize};

/// ħ and the particle mass, shared by every construction in the crate.
#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq)]
pub struct PhysicalConstants {
    pub hbar: f64,
    pub mass: f64,
}

impl PhysicalConstants {
    pub fn new(hbar: f64, mass: f64) -> Result<Self> {
        if !(hbar.is_finite() && hbar > 0.0) {
            return Err(Error::InvalidInput(format!("hbar must be positive, got {hbar}")));
        }
        if !(mass.is_finite() && mass > 0.0) {
            return Err(Error::InvalidInput(format!("mass must be positive, got {mass}")));
        }
        Ok(Self { hbar, mass })
    }
}

impl Default for PhysicalConstants {
    /// Natural units ħ = m = 1.
    fn default() -> Self {
        Self { hbar: 1.0, mass: 1.0 }
    }
}

/// Coefficients of Q = a·q + b·p, P = c·q + d·p. Construction does not validate;
/// call [`SymplecticMatrix::validate`] or use [`SymplecticMatrix::checked`].
#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq)]
pub struct SymplecticMatrix {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
}

/// Outcome of the determinant check. Reports, never rejects.
#[derive(Debug, Clone, Copy)]
pub struct ValidationReport {
    /// |a·d − b·c − 1|
    pub det_error: f64,
    pub ok: bool,
}

impl SymplecticMatrix {
    pub fn new(a: f64, b: f64, c: f64, d: f64) -> Self {
        Self { a, b, c, d }
    }

    /// Constructs and rejects anything violating |ad − bc − 1| ≤ DET_TOL.
    pub fn checked(a: f64, b: f64, c: f64, d: f64) -> Result<Self> {
        let m = Self::new(a, b, c, d);
        let report = m.validate();
        if report.ok {
            Ok(m)
        } else {
            Err(Error::NotSymplectic { det_error: report.det_error, tol: DET_TOL })
        }
    }

    pub fn identity() -> Self {
        Self::new(1.0, 0.0, 0.0, 1.0)
    }

    pub fn determinant(&self) -> f64 {
        self.a * self.d - self.b * self.c
    }

    pub fn validate(&self) -> ValidationReport {
        let det_error = (self.determinant() - 1.0).abs();
        ValidationReport { det_error, ok: det_error.is_finite() && det_error <= DET_TOL }
    }

    fn require_valid(&self) -> Result<()> {
        let report = self.validate();
        if report.ok {
            Ok(())
        } else {
            Err(Error::NotSymplectic { det_error: report.det_error, tol: DET_TOL })
        }
    }

    /// Group product: the transformation `first`, then `self`.
    /// Rejects inputs that are not symplectic.
    pub fn compose(&self, first: &SymplecticMatrix) -> Result<SymplecticMatrix> {
        self.require_valid()?;
        first.require_valid()?;
        Ok(SymplecticMatrix::new(
            self.a * first.a + self.b * first.c,
            self.a * first.b + self.b * first.d,
            self.c * first.a + self.d * first.c,
            self.c * first.b + self.d * first.d,
        ))
    }

    /// Inverse (d, −b; −c, a); exact because the determinant is 1.
    pub fn inverse(&self) -> Result<SymplecticMatrix> {
        self.require_valid()?;
        Ok(SymplecticMatrix::new(self.d, -self.b, -self.c, self.a))
    }

    /// Applies the transformation to a phase-space point.
    pub fn map(&self, q: f64, p: f64) -> (f64, f64) {
        (self.a * q + self.b * p, self.c * q + self.d * p)
    }
}

/// Time derivatives (ȧ, ḃ, ċ, ḋ) of a family's coefficients.
#[derive(Debug, Clone, Copy)]
pub struct CoefficientRates {
    pub da: f64,
    pub db: f64,
    pub dc: f64,
    pub dd: f64,
}

type EvalFn = dyn Fn(f64) -> SymplecticMatrix + Send + Sync;
type RatesFn = dyn Fn(f64) -> CoefficientRates + Send + Sync;

/// One-parameter family t ↦ M(t). Singular times are the zeros of b(t), where the
/// position-position representation degenerates (caustics); they are located
/// numerically on demand. Families satisfying a = −m·ḃ have only simple zeros of
/// b, because (a, b) = (0, 0) would contradict ad − bc = 1.
pub struct TransformFamily {
    label: String,
    eval: Box<EvalFn>,
    rates: Option<Box<RatesFn>>,
}

impl TransformFamily {
    pub fn new(label: impl Into<String>, eval: impl Fn(f64) -> SymplecticMatrix + Send + Sync + 'static) -> Self {
        Self { label: label.into(), eval: Box::new(eval), rates: None }
    }

    /// Attaches analytic coefficient derivatives; checks then use HJ_TOL_ANALYTIC.
    pub fn with_rates(mut self, rates: impl Fn(f64) -> CoefficientRates + Send + Sync + 'static) -> Self {
        self.rates = Some(Box::new(rates));
        self
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn matrix_at(&self, t: f64) -> SymplecticMatrix {
        (self.eval)(t)
    }

    pub fn has_analytic_rates(&self) -> bool {
        self.rates.is_some()
    }

    /// ḃ etc. at time t: analytic if declared, otherwise central differences with
    /// the default step h = FD_STEP_REL · max(1, |t|).
    pub fn rates_at(&self, t: f64) -> CoefficientRates {
        match &self.rates {
            Some(r) => r(t),
            None => self.rates_fd(t, FD_STEP_REL * t.abs().max(1.0)),
        }
    }

    /// Central-difference coefficient derivatives with an explicit step.
    /// Truncation error is O(h²).
    pub fn rates_fd(&self, t: f64, h: f64) -> CoefficientRates {
        let plus = self.matrix_at(t + h);
        let minus = self.matrix_at(t - h);
        let inv = 1.0 / (2.0 * h);
        CoefficientRates {
            da: (plus.a - minus.a) * inv,
            db: (plus.b - minus.b) * inv,
            dc: (plus.c - minus.c) * inv,
            dd: (plus.d - minus.d) * inv,
        }
    }

    /// True where |b(t)| sits at the coefficient floor, i.e. the qQ representation
    /// is degenerate.
    pub fn is_singular(&self, t: f64) -> bool {
        self.matrix_at(t).b.abs() <= COEFF_FLOOR
    }

    /// Zeros of b(t) strictly inside (lo, hi), located by a sign-change scan plus
    /// bisection. Zeros of compatible families are simple, so the scan is complete
    /// once the sampling resolves neighbouring zeros.
    pub fn singular_times_in(&self, lo: f64, hi: f64) -> Vec<f64> {
        const SCAN: usize = 1024;
        if !(hi > lo) {
            return Vec::new();
        }
        let step = (hi - lo) / SCAN as f64;
        let mut zeros = Vec::new();
        let mut t_prev = lo;
        let mut b_prev = self.matrix_at(t_prev).b;
        for i in 1..=SCAN {
            let t = lo + i as f64 * step;
            let b = self.matrix_at(t).b;
            if b_prev == 0.0 {
                if t_prev > lo {
                    zeros.push(t_prev);
                }
            } else if b.signum() != b_prev.signum() && b != 0.0 {
                let (mut x0, mut x1, mut f0) = (t_prev, t, b_prev);
                for _ in 0..200 {
                    let mid = 0.5 * (x0 + x1);
                    let fm = self.matrix_at(mid).b;
                    if fm == 0.0 {
                        x0 = mid;
                        x1 = mid;
                        break;
                    }
                    if fm.signum() == f0.signum() {
                        x0 = mid;
                        f0 = fm;
                    } else {
                        x1 = mid;
                    }
                    if x1 - x0 <= f64::EPSILON * (1.0 + mid.abs()) {
                        break;
                    }
                }
                zeros.push(0.5 * (x0 + x1));
            }
            t_prev = t;
            b_prev = b;
        }
        zeros
    }

    /// Number of caustics (zeros of b) crossed when going from 0⁺ to t.
    pub fn caustic_crossings(&self, t: f64) -> usize {
        if t <= 0.0 {
            return 0;
        }
        // The open interval excludes the common b(0) = 0 of identity-based
        // families and the endpoint itself.
        let eps = 1e-9 * t.abs().max(1.0);
        self.singular_times_in(eps, t - eps).len()
    }
}

impl std::fmt::Debug for TransformFamily {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("TransformFamily")
            .field("label", &self.label)
            .field("analytic_rates", &self.rates.is_some())
            .finish()
    }
}

/// Result of the a(t) = −m·ḃ(t) check.
#[derive(Debug, Clone, Copy)]
pub struct CompatibilityReport {
    /// |a(t) + m·ḃ(t)|
    pub residual: f64,
    /// Tolerance actually applied (analytic vs finite-difference rates).
    pub tol: f64,
    pub ok: bool,
    pub analytic: bool,
}

/// Checks the compatibility condition a(t) = −m·ḃ(t) that makes the family's
/// W₁ solve the classical Hamilton–Jacobi equation. The full derivation also
/// ties c and d to the potential; matching the potential is checked elsewhere
/// (classical residual), so only this condition is enforced here.
///
/// Errors when t is a singular time of the family.
pub fn hj_compatibility(family: &TransformFamily, t: f64, constants: &PhysicalConstants) -> Result<CompatibilityReport> {
    if family.is_singular(t) {
        return Err(Error::SingularTime { family: family.label().to_string(), t });
    }
    let m = family.matrix_at(t);
    let rates = family.rates_at(t);
    let analytic = family.has_analytic_rates();
    let residual = (m.a + constants.mass * rates.db).abs();
    let tol = if analytic { HJ_TOL_ANALYTIC } else { HJ_TOL_FD };
    Ok(CompatibilityReport { residual, tol, ok: residual <= tol, analytic })
}

/// As [`hj_compatibility`] but turning failure into an error, for call sites that
/// must not proceed with an incompatible family.
pub fn require_hj_compatible(family: &TransformFamily, t: f64, constants: &PhysicalConstants) -> Result<CompatibilityReport> {
    let report = hj_compatibility(family, t, constants)?;
    if report.ok {
        Ok(report)
    } else {
        Err(Error::HjIncompatible {
            family: family.label().to_string(),
            t,
            residual: report.residual,
            tol: report.tol,
        })
    }
}
