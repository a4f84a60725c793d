//! Hamilton–Jacobi route to the propagator phase.
//!
//! For quadratic Hamiltonians H = p²/2m + V(q) with quadratic V, the classical
//! W₁(q, Q; t) of a compatible family solves the classical Hamilton–Jacobi
//! equation, and the full complex action S = W₁ + iħ·ln√b solves its quantum
//! counterpart exactly: the O(ħ) term (iħ/2m)·∂²S/∂q² is q-independent for a
//! quadratic S, so the correction integrates to iħ·ln√b via
//! F ≡ (1/2m)·∂²S/∂q² = −a/(2mb) = ḃ/(2b).
//!
//! Exp(iS/ħ) then reproduces the closed-form kernel up to one constant factor
//! per family.

use crate::error::{Error, Result};
use crate::generating::w1_from_matrix;
use crate::symplectic::{require_hj_compatible, PhysicalConstants, TransformFamily};
use crate::tolerances::{COEFF_FLOOR, FD_STEP_REL};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// V(q) = k0 + k1·q + k2·q². The type admits nothing beyond quadratic, which is
/// the regime where every construction in this crate is exact.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadraticPotential {
    pub k0: f64,
    pub k1: f64,
    pub k2: f64,
}

impl QuadraticPotential {
    pub fn new(k0: f64, k1: f64, k2: f64) -> Self {
        Self { k0, k1, k2 }
    }

    pub fn zero() -> Self {
        Self::new(0.0, 0.0, 0.0)
    }

    pub fn value(&self, q: f64) -> f64 {
        self.k0 + self.k1 * q + self.k2 * q * q
    }
}

/// Complex quadratic action S(q) = qq·q² + q1·q + q0 at a fixed time and fixed
/// new-coordinate Q. For actions assembled here qq and q1 stay real; only q0
/// carries the iħ·ln√b correction (plus a real −ħπ/2 branch shift when b < 0,
/// the principal value of iħ·ln√b).
#[derive(Debug, Clone, Copy)]
pub struct QuantumAction {
    pub qq: Complex64,
    pub q1: Complex64,
    pub q0: Complex64,
    pub time: f64,
    /// The frozen new coordinate Q the action is parameterized by.
    pub new_position: f64,
}

impl QuantumAction {
    pub fn value(&self, q: f64) -> Complex64 {
        (self.qq * q + self.q1) * q + self.q0
    }

    /// ∂S/∂q
    pub fn derivative(&self, q: f64) -> Complex64 {
        2.0 * self.qq * q + self.q1
    }

    /// ∂²S/∂q², constant in q because S is quadratic.
    pub fn second_derivative(&self) -> Complex64 {
        2.0 * self.qq
    }
}

/// Coefficient time-derivatives of W₁: d/dt of (1/b, −a/2b, −d/2b).
fn w1_rates(family: &TransformFamily, t: f64) -> Result<(f64, f64, f64)> {
    let m = family.matrix_at(t);
    if m.b.abs() <= COEFF_FLOOR {
        return Err(Error::SingularRepresentation {
            coefficient: "b",
            representation: "qQ",
            value: m.b,
            floor: COEFF_FLOOR,
        });
    }
    let r = family.rates_at(t);
    let b2 = m.b * m.b;
    let dcross = -r.db / b2;
    let dxx = -(r.da * m.b - m.a * r.db) / (2.0 * b2);
    let dyy = -(r.dd * m.b - m.d * r.db) / (2.0 * b2);
    Ok((dcross, dxx, dyy))
}

/// Residual of the classical Hamilton–Jacobi equation
/// (1/2m)·(∂W₁/∂q)² + V(q) + ∂W₁/∂t at fixed (q, Q). Zero (to rounding) exactly
/// when the family belongs to the dynamics generated by V. Signed, so a wrong
/// potential shows up as its own mismatch.
pub fn classical_hj_residual(
    family: &TransformFamily,
    potential: &QuadraticPotential,
    t: f64,
    q: f64,
    big_q: f64,
    constants: &PhysicalConstants,
) -> Result<f64> {
    let w = w1_from_matrix(&family.matrix_at(t))?;
    let (dcross, dxx, dyy) = w1_rates(family, t)?;
    let dwdq = w.grad_x(q, big_q);
    let dwdt = dcross * q * big_q + dxx * q * q + dyy * big_q * big_q;
    Ok(dwdq * dwdq / (2.0 * constants.mass) + potential.value(q) + dwdt)
}

/// F(t) = (1/2m)·∂²W₁/∂q² = −a/(2mb); for compatible families also ḃ/(2b),
/// the logarithmic derivative of √b. Independent of q by construction.
pub fn compute_f(family: &TransformFamily, t: f64, constants: &PhysicalConstants) -> Result<f64> {
    let m = family.matrix_at(t);
    if m.b.abs() <= COEFF_FLOOR {
        return Err(Error::SingularRepresentation {
            coefficient: "b",
            representation: "qQ",
            value: m.b,
            floor: COEFF_FLOOR,
        });
    }
    Ok(-m.a / (2.0 * constants.mass * m.b))
}

/// W₁ packaged as an action with no quantum correction; the comparison object
/// for seeing what the iħ·ln√b term buys.
pub fn classical_action(
    family: &TransformFamily,
    t: f64,
    big_q: f64,
    constants: &PhysicalConstants,
) -> Result<QuantumAction> {
    require_hj_compatible(family, t, constants)?;
    let w = w1_from_matrix(&family.matrix_at(t))?;
    Ok(QuantumAction {
        qq: Complex64::new(w.xx, 0.0),
        q1: Complex64::new(w.cross * big_q, 0.0),
        q0: Complex64::new(w.yy * big_q * big_q, 0.0),
        time: t,
        new_position: big_q,
    })
}

/// S = W₁ + iħ·ln√b with the principal branch of the logarithm: for b < 0 the
/// constant gains Re = −ħπ/2 on top of Im = ħ·ln√|b|. Requires the family to
/// pass the compatibility check (else the split into W₁ + correction is not a
/// solution of anything).
pub fn assemble_action(
    family: &TransformFamily,
    t: f64,
    big_q: f64,
    constants: &PhysicalConstants,
) -> Result<QuantumAction> {
    let mut s = classical_action(family, t, big_q, constants)?;
    let b = family.matrix_at(t).b;
    let log_sqrt_b = 0.5 * Complex64::new(b, 0.0).ln();
    s.q0 += Complex64::i() * constants.hbar * log_sqrt_b;
    Ok(s)
}

/// Residual of the quantum Hamilton–Jacobi equation
/// (1/2m)·(∂S/∂q)² + V(q) + ∂S/∂t − (iħ/2m)·∂²S/∂q²
/// for any action family t ↦ S(·, t). The time derivative uses central
/// differences with h = FD_STEP_REL · max(1, |t|); spatial derivatives are
/// analytic. Complex-valued: real and imaginary parts must vanish separately
/// for an exact solution.
pub fn quantum_residual_of(
    action_at: impl Fn(f64) -> Result<QuantumAction>,
    potential: &QuadraticPotential,
    t: f64,
    q: f64,
    constants: &PhysicalConstants,
) -> Result<Complex64> {
    let h = FD_STEP_REL * t.abs().max(1.0);
    let s = action_at(t)?;
    let splus = action_at(t + h)?;
    let sminus = action_at(t - h)?;
    let dsdt = (splus.value(q) - sminus.value(q)) / (2.0 * h);
    let dsdq = s.derivative(q);
    let kinetic = dsdq * dsdq / (2.0 * constants.mass);
    let correction = Complex64::i() * constants.hbar / (2.0 * constants.mass) * s.second_derivative();
    Ok(kinetic + potential.value(q) + dsdt - correction)
}

/// [`quantum_residual_of`] applied to the assembled S = W₁ + iħ·ln√b of a family.
pub fn quantum_residual(
    family: &TransformFamily,
    potential: &QuadraticPotential,
    t: f64,
    q: f64,
    big_q: f64,
    constants: &PhysicalConstants,
) -> Result<Complex64> {
    quantum_residual_of(
        |tt| assemble_action(family, tt, big_q, constants),
        potential,
        t,
        q,
        constants,
    )
}
