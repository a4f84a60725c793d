//! Quadratic generating functions of the four classical kinds.
//!
//! For a linear canonical transformation Q = a·q + b·p, P = c·q + d·p, each kind
//! mixes one old and one new variable:
//!
//! - W₁(q, Q) = qQ/b − (a/2b)·q² − (d/2b)·Q²,  needs b ≠ 0
//! - W₂(q, P) = qP/d − (c/2d)·q² + (b/2d)·P²,  needs d ≠ 0
//! - W₃(p, Q) = −pQ/a + (b/2a)·p² − (c/2a)·Q², needs a ≠ 0
//! - W₄(p, P) = −pP/c + (d/2c)·p² + (a/2c)·P², needs c ≠ 0
//!
//! All four are stored as the triple (cross, xx, yy) of W = cross·x·y + xx·x² + yy·y²,
//! where x is the old-side variable and y the new-side one. The gradient
//! prescriptions below recover the transformation itself; for W₁ they read
//! p = ∂W₁/∂q, P = −∂W₁/∂Q, and the other kinds follow the standard Legendre
//! pattern (W₂: Q = ∂W₂/∂P; W₃: q = −∂W₃/∂p, P = −∂W₃/∂Q; W₄: q = −∂W₄/∂p,
//! Q = ∂W₄/∂P).

use crate::error::{Error, Result};
use crate::symplectic::SymplecticMatrix;
use crate::tolerances::COEFF_FLOOR;
use serde::{Deserialize, Serialize};

/// Which old/new variable pair the function mixes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum GeneratingKind {
    /// W₁(q, Q)
    W1,
    /// W₂(q, P)
    W2,
    /// W₃(p, Q)
    W3,
    /// W₄(p, P)
    W4,
}

impl GeneratingKind {
    /// Names of (old-side, new-side) variables, for messages and file headers.
    pub fn variables(&self) -> (&'static str, &'static str) {
        match self {
            GeneratingKind::W1 => ("q", "Q"),
            GeneratingKind::W2 => ("q", "P"),
            GeneratingKind::W3 => ("p", "Q"),
            GeneratingKind::W4 => ("p", "P"),
        }
    }
}

/// W(x, y) = cross·x·y + xx·x² + yy·y² with x the old and y the new variable.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadraticGeneratingFunction {
    pub kind: GeneratingKind,
    pub cross: f64,
    pub xx: f64,
    pub yy: f64,
}

fn check_coefficient(name: &'static str, representation: &'static str, value: f64) -> Result<f64> {
    if value.abs() <= COEFF_FLOOR {
        Err(Error::SingularRepresentation {
            coefficient: name,
            representation,
            value,
            floor: COEFF_FLOOR,
        })
    } else {
        Ok(value)
    }
}

/// W₁ coefficients (1/b, −a/2b, −d/2b); rejects b at the floor (caustic).
pub fn w1_from_matrix(m: &SymplecticMatrix) -> Result<QuadraticGeneratingFunction> {
    let b = check_coefficient("b", "qQ", m.b)?;
    Ok(QuadraticGeneratingFunction {
        kind: GeneratingKind::W1,
        cross: 1.0 / b,
        xx: -m.a / (2.0 * b),
        yy: -m.d / (2.0 * b),
    })
}

/// W₂ coefficients (1/d, −c/2d, b/2d); rejects d at the floor.
pub fn w2_from_matrix(m: &SymplecticMatrix) -> Result<QuadraticGeneratingFunction> {
    let d = check_coefficient("d", "qP", m.d)?;
    Ok(QuadraticGeneratingFunction {
        kind: GeneratingKind::W2,
        cross: 1.0 / d,
        xx: -m.c / (2.0 * d),
        yy: m.b / (2.0 * d),
    })
}

/// W₃ coefficients (−1/a, b/2a, −c/2a); rejects a at the floor.
pub fn w3_from_matrix(m: &SymplecticMatrix) -> Result<QuadraticGeneratingFunction> {
    let a = check_coefficient("a", "pQ", m.a)?;
    Ok(QuadraticGeneratingFunction {
        kind: GeneratingKind::W3,
        cross: -1.0 / a,
        xx: m.b / (2.0 * a),
        yy: -m.c / (2.0 * a),
    })
}

/// W₄ coefficients (−1/c, d/2c, a/2c); rejects c at the floor.
pub fn w4_from_matrix(m: &SymplecticMatrix) -> Result<QuadraticGeneratingFunction> {
    let c = check_coefficient("c", "pP", m.c)?;
    Ok(QuadraticGeneratingFunction {
        kind: GeneratingKind::W4,
        cross: -1.0 / c,
        xx: m.d / (2.0 * c),
        yy: m.a / (2.0 * c),
    })
}

/// Dispatches on kind.
pub fn from_matrix(kind: GeneratingKind, m: &SymplecticMatrix) -> Result<QuadraticGeneratingFunction> {
    match kind {
        GeneratingKind::W1 => w1_from_matrix(m),
        GeneratingKind::W2 => w2_from_matrix(m),
        GeneratingKind::W3 => w3_from_matrix(m),
        GeneratingKind::W4 => w4_from_matrix(m),
    }
}

impl QuadraticGeneratingFunction {
    pub fn value(&self, x: f64, y: f64) -> f64 {
        self.cross * x * y + self.xx * x * x + self.yy * y * y
    }

    /// ∂W/∂x at (x, y).
    pub fn grad_x(&self, x: f64, y: f64) -> f64 {
        self.cross * y + 2.0 * self.xx * x
    }

    /// ∂W/∂y at (x, y).
    pub fn grad_y(&self, x: f64, y: f64) -> f64 {
        self.cross * x + 2.0 * self.yy * y
    }
}

/// Applies the kind's gradient prescription at a point (x, y) of the function's
/// own variables. Returns the two conjugate partners:
///
/// - W₁(q, Q) → (p, P)
/// - W₂(q, P) → (p, Q)
/// - W₃(p, Q) → (q, P)
/// - W₄(p, P) → (q, Q)
pub fn induced_map(w: &QuadraticGeneratingFunction, x: f64, y: f64) -> (f64, f64) {
    match w.kind {
        GeneratingKind::W1 => (w.grad_x(x, y), -w.grad_y(x, y)),
        GeneratingKind::W2 => (w.grad_x(x, y), w.grad_y(x, y)),
        GeneratingKind::W3 => (-w.grad_x(x, y), -w.grad_y(x, y)),
        GeneratingKind::W4 => (-w.grad_x(x, y), w.grad_y(x, y)),
    }
}

/// Reconstructs the symplectic matrix a generating function came from. Three
/// coefficients are read off directly; the fourth is solved from ad − bc = 1,
/// so the result is symplectic by construction. Rejects a vanishing cross
/// coefficient, which is the kind-specific invertibility condition.
pub fn roundtrip_matrix(w: &QuadraticGeneratingFunction) -> Result<SymplecticMatrix> {
    let cross = check_coefficient("cross", "generating", w.cross)?;
    let m = match w.kind {
        GeneratingKind::W1 => {
            let b = 1.0 / cross;
            let a = -2.0 * w.xx / cross;
            let d = -2.0 * w.yy / cross;
            SymplecticMatrix::new(a, b, (a * d - 1.0) * cross, d)
        }
        GeneratingKind::W2 => {
            let d = 1.0 / cross;
            let c = -2.0 * w.xx / cross;
            let b = 2.0 * w.yy / cross;
            SymplecticMatrix::new((1.0 + b * c) * cross, b, c, d)
        }
        GeneratingKind::W3 => {
            let a = -1.0 / cross;
            let b = -2.0 * w.xx / cross;
            let c = 2.0 * w.yy / cross;
            SymplecticMatrix::new(a, b, c, (1.0 + b * c) / a)
        }
        GeneratingKind::W4 => {
            let c = -1.0 / cross;
            let d = -2.0 * w.xx / cross;
            let a = -2.0 * w.yy / cross;
            SymplecticMatrix::new(a, (a * d - 1.0) / c, c, d)
        }
    };
    Ok(m)
}
