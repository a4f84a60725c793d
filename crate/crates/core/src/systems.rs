//! Built-in transform families and their potentials.

use crate::hamilton_jacobi::QuadraticPotential;
use crate::symplectic::{CoefficientRates, PhysicalConstants, SymplecticMatrix, TransformFamily};

/// Free particle: (a, b, c, d) = (1, −t/m, 0, 1). Satisfies a = −m·ḃ; b vanishes
/// only at t = 0.
pub fn free_particle(constants: &PhysicalConstants) -> TransformFamily {
    let m = constants.mass;
    TransformFamily::new("free", move |t| SymplecticMatrix::new(1.0, -t / m, 0.0, 1.0))
        .with_rates(move |_| CoefficientRates { da: 0.0, db: -1.0 / m, dc: 0.0, dd: 0.0 })
}

/// Harmonic oscillator at angular frequency ω:
/// (cos ωt, −sin ωt/(mω), mω·sin ωt, cos ωt). Caustics at ωt = nπ.
///
/// Panics if ω is not positive and finite; use the CLI/config layer for
/// user-facing validation.
pub fn harmonic_oscillator(constants: &PhysicalConstants, omega: f64) -> TransformFamily {
    assert!(omega.is_finite() && omega > 0.0, "omega must be positive, got {omega}");
    let m = constants.mass;
    let eval = move |t: f64| {
        let (s, c) = (omega * t).sin_cos();
        SymplecticMatrix::new(c, -s / (m * omega), m * omega * s, c)
    };
    let rates = move |t: f64| {
        let (s, c) = (omega * t).sin_cos();
        CoefficientRates {
            da: -omega * s,
            db: -c / m,
            dc: m * omega * omega * c,
            dd: -omega * s,
        }
    };
    TransformFamily::new(format!("harmonic(omega={omega})"), eval).with_rates(rates)
}

/// V = 0.
pub fn free_potential() -> QuadraticPotential {
    QuadraticPotential::zero()
}

/// V(q) = m·ω²·q²/2.
pub fn harmonic_potential(constants: &PhysicalConstants, omega: f64) -> QuadraticPotential {
    QuadraticPotential::new(0.0, 0.0, 0.5 * constants.mass * omega * omega)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn presets_stay_symplectic_over_time() {
        let units = PhysicalConstants { hbar: 1.0, mass: 1.7 };
        let free = free_particle(&units);
        let ho = harmonic_oscillator(&units, 2.3);
        for i in 0..50 {
            let t = -2.0 + 0.17 * i as f64;
            assert!(free.matrix_at(t).validate().ok, "free at t = {t}");
            assert!(ho.matrix_at(t).validate().ok, "oscillator at t = {t}");
        }
    }

    #[test]
    fn presets_start_at_the_identity() {
        let units = PhysicalConstants::default();
        for family in [free_particle(&units), harmonic_oscillator(&units, 0.8)] {
            let m = family.matrix_at(0.0);
            assert_eq!((m.a, m.b, m.c, m.d), (1.0, 0.0, 0.0, 1.0), "{}", family.label());
        }
    }

    #[test]
    fn oscillator_scales_with_mass_and_frequency() {
        let units = PhysicalConstants { hbar: 1.0, mass: 2.0 };
        let omega = 0.5;
        let ho = harmonic_oscillator(&units, omega);
        let t = 1.0;
        let m = ho.matrix_at(t);
        assert!((m.b + (omega * t).sin() / (units.mass * omega)).abs() < 1e-15);
        assert!((m.c - units.mass * omega * (omega * t).sin()).abs() < 1e-15);
    }

    #[test]
    fn harmonic_potential_curvature() {
        let units = PhysicalConstants { hbar: 1.0, mass: 3.0 };
        let v = harmonic_potential(&units, 2.0);
        assert_eq!(v.value(1.0), 6.0, "m*omega^2/2 = 6");
    }
}
