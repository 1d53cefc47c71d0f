use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Frequencies of the two modes with the derived couplings
/// `alpha = w1^2 + w2^2` and `beta = w1^2 w2^2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PuParams {
    omega1: f64,
    omega2: f64,
    alpha: f64,
    beta: f64,
}

impl PuParams {
    pub fn new(omega1: f64, omega2: f64) -> Result<Self> {
        let valid = omega1.is_finite() && omega2.is_finite() && omega1 > 0.0 && omega2 > 0.0 && omega1 != omega2;
        if !valid {
            return Err(Error::DegenerateFrequencies { omega1, omega2 });
        }
        let (w1, w2) = (omega1 * omega1, omega2 * omega2);
        Ok(Self {
            omega1,
            omega2,
            alpha: w1 + w2,
            beta: w1 * w2,
        })
    }

    pub fn omega1(&self) -> f64 {
        self.omega1
    }

    pub fn omega2(&self) -> f64 {
        self.omega2
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    /// `R_i = w_i^2 (w1^2 - w2^2)`, the mode normalisation constants.
    pub fn mode_constants(&self) -> (f64, f64) {
        let d = self.omega1 * self.omega1 - self.omega2 * self.omega2;
        (self.omega1 * self.omega1 * d, self.omega2 * self.omega2 * d)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn figure_frequencies() {
        let p = PuParams::new(1.0, 2.0).unwrap();
        assert_eq!(p.alpha(), 5.0);
        assert_eq!(p.beta(), 4.0);
    }

    #[test]
    fn fractional_frequencies() {
        let p = PuParams::new(0.5, 1.5).unwrap();
        assert_eq!(p.alpha(), 2.5);
        assert_eq!(p.beta(), 0.5625);
    }

    #[test]
    fn degenerate_rejected() {
        assert!(matches!(
            PuParams::new(1.0, 1.0),
            Err(Error::DegenerateFrequencies { .. })
        ));
        assert!(PuParams::new(0.0, 1.0).is_err());
        assert!(PuParams::new(-1.0, 2.0).is_err());
        assert!(PuParams::new(f64::NAN, 2.0).is_err());
    }
}
