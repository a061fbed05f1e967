//! Physical constants threaded through every operator construction.
//!
//! All builders take an explicit [`UnitSystem`] so the algebraic identities can
//! be exercised both in natural units (the default, where exact floating-point
//! cancellations are provable) and with dimensionful constants.

use serde::{Deserialize, Serialize};

use crate::error::CoreError;

/// The four constants every construction depends on.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UnitSystem {
    /// Reduced Planck constant.
    pub hbar: f64,
    /// Rest mass of the oscillating particle.
    pub m0: f64,
    /// Oscillator angular frequency.
    pub omega: f64,
    /// Speed of light.
    pub c: f64,
}

impl Default for UnitSystem {
    /// Natural units: hbar = m0 = omega = c = 1.
    fn default() -> Self {
        Self {
            hbar: 1.0,
            m0: 1.0,
            omega: 1.0,
            c: 1.0,
        }
    }
}

impl UnitSystem {
    /// Natural units, spelled out for readability at call sites.
    pub fn natural() -> Self {
        Self::default()
    }

    /// Validate that every constant is finite and strictly positive.
    pub fn validate(&self) -> Result<(), CoreError> {
        let all = [self.hbar, self.m0, self.omega, self.c];
        if all.iter().all(|v| v.is_finite() && *v > 0.0) {
            Ok(())
        } else {
            Err(CoreError::NonPositiveUnits)
        }
    }

    /// Characteristic oscillator length sqrt(hbar / (m0 omega)).
    pub fn oscillator_length(&self) -> f64 {
        (self.hbar / (self.m0 * self.omega)).sqrt()
    }

    /// Oscillator energy quantum hbar*omega.
    pub fn quantum(&self) -> f64 {
        self.hbar * self.omega
    }

    /// Rest energy m0*c^2.
    pub fn rest_energy(&self) -> f64 {
        self.m0 * self.c * self.c
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn natural_units_are_unity() {
        let u = UnitSystem::natural();
        assert_eq!(u.hbar, 1.0);
        assert_eq!(u.m0, 1.0);
        assert_eq!(u.omega, 1.0);
        assert_eq!(u.c, 1.0);
        u.validate().unwrap();
        assert_eq!(u.oscillator_length(), 1.0);
        assert_eq!(u.quantum(), 1.0);
        assert_eq!(u.rest_energy(), 1.0);
    }

    #[test]
    fn rejects_nonpositive_constants() {
        let mut u = UnitSystem::natural();
        u.m0 = 0.0;
        assert!(matches!(u.validate(), Err(CoreError::NonPositiveUnits)));
        u.m0 = -1.0;
        assert!(matches!(u.validate(), Err(CoreError::NonPositiveUnits)));
        u.m0 = f64::NAN;
        assert!(matches!(u.validate(), Err(CoreError::NonPositiveUnits)));
    }

    #[test]
    fn derived_scales() {
        let u = UnitSystem {
            hbar: 2.0,
            m0: 0.5,
            omega: 4.0,
            c: 3.0,
        };
        u.validate().unwrap();
        assert!((u.oscillator_length() - 1.0).abs() < 1e-15);
        assert!((u.quantum() - 8.0).abs() < 1e-15);
        assert!((u.rest_energy() - 4.5).abs() < 1e-15);
    }
}
