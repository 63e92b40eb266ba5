//! Sinusoidal feature basis for aerodynamic coefficient regression.
//!
//! Features are products of harmonics in the angle of attack and sideslip,
//! optionally scaled by `ln(Re / re_reference)` to capture the slow Reynolds
//! dependence. The three families cover the parities that a left/right
//! symmetric airframe produces: odd-in-alpha (lift-like), odd-in-beta
//! (side-force-like), and even-even (drag-like, including the level offsets).

use crate::ad::Real;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum TermFamily {
    /// `sin(k alpha) cos(m beta)` — odd in alpha, even in beta.
    #[serde(rename = "sin-cos")]
    SinCos,
    /// `cos(k alpha) sin(m beta)` — even in alpha, odd in beta.
    #[serde(rename = "cos-sin")]
    CosSin,
    /// `cos(k alpha) cos(m beta)` — even in both.
    #[serde(rename = "cos-cos")]
    CosCos,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BasisTerm {
    pub family: TermFamily,
    pub k: u8,
    pub m: u8,
    /// Multiply the harmonic by `ln(Re / re_reference)`.
    pub re_scaled: bool,
}

impl BasisTerm {
    pub fn eval<T: Real>(&self, alpha: T, beta: T, log_re_ratio: T) -> T {
        let k = T::from_f64(f64::from(self.k));
        let m = T::from_f64(f64::from(self.m));
        let harmonic = match self.family {
            TermFamily::SinCos => (alpha * k).sin() * (beta * m).cos(),
            TermFamily::CosSin => (alpha * k).cos() * (beta * m).sin(),
            TermFamily::CosCos => (alpha * k).cos() * (beta * m).cos(),
        };
        if self.re_scaled {
            harmonic * log_re_ratio
        } else {
            harmonic
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BasisDescriptor {
    pub terms: Vec<BasisTerm>,
    /// Reference Reynolds number for the logarithmic scaling.
    pub re_reference: f64,
}

impl BasisDescriptor {
    /// Default basis: harmonics up to order 3 in both angles across the three
    /// parity families, each with and without Reynolds scaling. The pure
    /// constant is excluded; the fit carries it as an unpenalized intercept.
    pub fn default_basis() -> Self {
        let mut terms = Vec::new();
        for re_scaled in [false, true] {
            for k in 1..=3u8 {
                for m in 0..=3u8 {
                    terms.push(BasisTerm {
                        family: TermFamily::SinCos,
                        k,
                        m,
                        re_scaled,
                    });
                }
            }
            for k in 0..=3u8 {
                for m in 1..=3u8 {
                    terms.push(BasisTerm {
                        family: TermFamily::CosSin,
                        k,
                        m,
                        re_scaled,
                    });
                }
            }
            for k in 0..=3u8 {
                for m in 0..=3u8 {
                    if k == 0 && m == 0 && !re_scaled {
                        continue;
                    }
                    terms.push(BasisTerm {
                        family: TermFamily::CosCos,
                        k,
                        m,
                        re_scaled,
                    });
                }
            }
        }
        Self {
            terms,
            re_reference: 2e5,
        }
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    #[inline]
    pub fn log_re_ratio<T: Real>(&self, reynolds: T) -> T {
        (reynolds / T::from_f64(self.re_reference)).max(T::from_f64(1e-12)).ln()
    }

    /// Evaluate all features at one sample point.
    pub fn features<T: Real>(&self, alpha: T, beta: T, reynolds: T, out: &mut [T]) {
        debug_assert_eq!(out.len(), self.terms.len());
        let log_re = self.log_re_ratio(reynolds);
        for (slot, term) in out.iter_mut().zip(self.terms.iter()) {
            *slot = term.eval(alpha, beta, log_re);
        }
    }

    /// Weighted sum of features plus intercept.
    pub fn predict<T: Real>(
        &self,
        weights: &[f64],
        intercept: f64,
        alpha: T,
        beta: T,
        reynolds: T,
    ) -> T {
        debug_assert_eq!(weights.len(), self.terms.len());
        let log_re = self.log_re_ratio(reynolds);
        let mut acc = T::from_f64(intercept);
        for (w, term) in weights.iter().zip(self.terms.iter()) {
            if *w != 0.0 {
                acc += term.eval(alpha, beta, log_re) * T::from_f64(*w);
            }
        }
        acc
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn default_basis_has_expected_size_and_no_constant() {
        let basis = BasisDescriptor::default_basis();
        // 12 + 12 + 16 per scaling level, minus the unscaled constant.
        assert_eq!(basis.len(), 2 * (12 + 12 + 16) - 1);
        assert!(!basis.terms.iter().any(|t| t.family == TermFamily::CosCos
            && t.k == 0
            && t.m == 0
            && !t.re_scaled));
    }

    #[test]
    fn families_have_the_claimed_parities() {
        let (a, b) = (0.15, -0.2);
        let sc = BasisTerm {
            family: TermFamily::SinCos,
            k: 2,
            m: 1,
            re_scaled: false,
        };
        let cs = BasisTerm {
            family: TermFamily::CosSin,
            k: 1,
            m: 3,
            re_scaled: false,
        };
        let cc = BasisTerm {
            family: TermFamily::CosCos,
            k: 2,
            m: 2,
            re_scaled: false,
        };
        assert_relative_eq!(sc.eval(-a, b, 0.0), -sc.eval(a, b, 0.0));
        assert_relative_eq!(sc.eval(a, -b, 0.0), sc.eval(a, b, 0.0));
        assert_relative_eq!(cs.eval(a, -b, 0.0), -cs.eval(a, b, 0.0));
        assert_relative_eq!(cc.eval(-a, -b, 0.0), cc.eval(a, b, 0.0));
    }

    #[test]
    fn predict_matches_manual_sum() {
        let basis = BasisDescriptor::default_basis();
        let mut weights = vec![0.0; basis.len()];
        weights[0] = 2.0;
        weights[5] = -0.7;
        let (a, b, re) = (0.1, 0.05, 3e5);
        let mut feats = vec![0.0; basis.len()];
        basis.features(a, b, re, &mut feats);
        let manual = 0.3 + 2.0 * feats[0] - 0.7 * feats[5];
        assert_relative_eq!(basis.predict(&weights, 0.3, a, b, re), manual, epsilon = 1e-15);
    }
}
