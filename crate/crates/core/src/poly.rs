//! Real polynomials of low degree and root isolation on bounded intervals.
//!
//! Roots are isolated by recursing on the derivative: the critical points of
//! `p` split the search interval into pieces on which `p` is monotone, and each
//! piece with a sign change holds exactly one root, which is then polished by
//! safeguarded Newton iteration falling back to bisection.

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Width below which a bracketed root is considered resolved, in the
/// polynomial's variable (seconds for obstacle trajectories).
pub const ROOT_TOLERANCE: f64 = 1e-9;

const MAX_POLISH_ITERATIONS: usize = 200;

/// Polynomial with coefficients stored lowest degree first.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Polynomial {
    coeffs: Vec<f64>,
}

impl Polynomial {
    pub fn new(coeffs: Vec<f64>) -> Self {
        Self { coeffs }
    }

    pub fn constant(c: f64) -> Self {
        Self { coeffs: vec![c] }
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    /// Degree ignoring exactly-zero leading coefficients; the zero
    /// polynomial reports degree 0.
    pub fn degree(&self) -> usize {
        self.coeffs
            .iter()
            .rposition(|&c| c != 0.0)
            .unwrap_or(0)
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c)
    }

    pub fn derivative(&self) -> Polynomial {
        if self.coeffs.len() <= 1 {
            return Polynomial::constant(0.0);
        }
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(k, &c)| k as f64 * c)
            .collect();
        Polynomial { coeffs }
    }

    /// `self - c`.
    pub fn shifted(&self, c: f64) -> Polynomial {
        let mut coeffs = if self.coeffs.is_empty() {
            vec![0.0]
        } else {
            self.coeffs.clone()
        };
        coeffs[0] -= c;
        Polynomial { coeffs }
    }

    /// All real roots in `[lo, hi]`, sorted ascending. Identically-zero
    /// polynomials report no roots; callers classify such cases with a
    /// direct evaluation.
    pub fn roots_in(&self, lo: f64, hi: f64) -> Result<Vec<f64>> {
        if self.coeffs.iter().any(|c| !c.is_finite()) || !lo.is_finite() || !hi.is_finite() {
            return Err(self.numerical("non-finite coefficient or bound"));
        }
        if hi < lo {
            return Ok(Vec::new());
        }
        let mut roots = Vec::new();
        self.roots_rec(lo, hi, &mut roots)?;
        roots.sort_by(f64::total_cmp);
        roots.dedup_by(|a, b| (*a - *b).abs() <= ROOT_TOLERANCE);
        Ok(roots)
    }

    fn roots_rec(&self, lo: f64, hi: f64, out: &mut Vec<f64>) -> Result<()> {
        let deg = self.degree();
        let c = &self.coeffs;
        match deg {
            0 => Ok(()),
            1 => {
                let r = -c[0] / c[1];
                if r >= lo && r <= hi {
                    out.push(r);
                }
                Ok(())
            }
            _ => {
                let mut breaks = vec![lo];
                breaks.extend(self.derivative().roots_in(lo, hi)?);
                breaks.push(hi);
                for w in breaks.windows(2) {
                    let (a, b) = (w[0], w[1]);
                    let (fa, fb) = (self.eval(a), self.eval(b));
                    if fa == 0.0 {
                        out.push(a);
                    }
                    if fb == 0.0 {
                        out.push(b);
                    }
                    if fa * fb < 0.0 {
                        out.push(self.polish(a, b, fa)?);
                    }
                }
                Ok(())
            }
        }
    }

    /// Converge on the single sign change inside `[a, b]`.
    fn polish(&self, mut a: f64, mut b: f64, fa: f64) -> Result<f64> {
        let d = self.derivative();
        let neg_at_a = fa < 0.0;
        let mut x = 0.5 * (a + b);
        for _ in 0..MAX_POLISH_ITERATIONS {
            let fx = self.eval(x);
            if fx == 0.0 {
                return Ok(x);
            }
            if (fx < 0.0) == neg_at_a {
                a = x;
            } else {
                b = x;
            }
            if b - a <= ROOT_TOLERANCE {
                return Ok(0.5 * (a + b));
            }
            let dx = d.eval(x);
            let newton = x - fx / dx;
            x = if dx != 0.0 && newton > a && newton < b {
                newton
            } else {
                0.5 * (a + b)
            };
            if !x.is_finite() {
                return Err(self.numerical("iterate became non-finite"));
            }
        }
        Err(self.numerical("bracket did not shrink below tolerance"))
    }

    /// Minimum and maximum of the polynomial over `[lo, hi]`.
    pub fn range_on(&self, lo: f64, hi: f64) -> Result<(f64, f64)> {
        let mut min = self.eval(lo).min(self.eval(hi));
        let mut max = self.eval(lo).max(self.eval(hi));
        for r in self.derivative().roots_in(lo, hi)? {
            let v = self.eval(r);
            min = min.min(v);
            max = max.max(v);
        }
        Ok((min, max))
    }

    fn numerical(&self, reason: &str) -> Error {
        Error::Numerical {
            coeffs: self.coeffs.clone(),
            reason: reason.to_string(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn evaluates_lowest_first() {
        let p = Polynomial::new(vec![1.0, 2.0, 1.0]);
        assert_eq!(p.eval(3.0), 16.0);
        assert_eq!(p.derivative().coeffs(), &[2.0, 2.0]);
    }

    #[test]
    fn linear_and_quadratic_roots() {
        let p = Polynomial::new(vec![2.0, -1.0]);
        assert_eq!(p.roots_in(0.0, 10.0).unwrap(), vec![2.0]);
        let q = Polynomial::new(vec![2.0, -3.0, 1.0]); // (x-1)(x-2)
        let r = q.roots_in(0.0, 10.0).unwrap();
        assert_eq!(r.len(), 2);
        assert!((r[0] - 1.0).abs() < 1e-9 && (r[1] - 2.0).abs() < 1e-9);
        assert!(q.roots_in(1.2, 1.8).unwrap().is_empty());
    }

    #[test]
    fn double_root_is_found_at_tangency() {
        // (x-1)^2 touches zero without a sign change; the critical point hits it exactly.
        let p = Polynomial::new(vec![1.0, -2.0, 1.0]);
        let r = p.roots_in(0.0, 3.0).unwrap();
        assert_eq!(r, vec![1.0]);
    }

    #[test]
    fn quintic_roots() {
        // (x-0.5)(x-1.5)(x-2.5)(x-3.5)(x-4.5)
        let roots = [0.5, 1.5, 2.5, 3.5, 4.5];
        let mut c = vec![1.0];
        for r in roots {
            let mut next = vec![0.0; c.len() + 1];
            for (k, &ck) in c.iter().enumerate() {
                next[k + 1] += ck;
                next[k] -= r * ck;
            }
            c = next;
        }
        let found = Polynomial::new(c).roots_in(0.0, 5.0).unwrap();
        assert_eq!(found.len(), 5);
        for (a, b) in found.iter().zip(roots) {
            assert!((a - b).abs() < 1e-8, "{a} vs {b}");
        }
    }

    #[test]
    fn non_finite_coefficients_are_reported() {
        let p = Polynomial::new(vec![f64::NAN, 1.0]);
        match p.roots_in(0.0, 1.0) {
            Err(Error::Numerical { coeffs, .. }) => assert_eq!(coeffs.len(), 2),
            other => panic!("expected numerical error, got {other:?}"),
        }
    }

    #[test]
    fn range_uses_interior_extremum() {
        let p = Polynomial::new(vec![0.0, 4.0, -1.0]); // max 4 at x=2
        let (lo, hi) = p.range_on(0.0, 5.0).unwrap();
        assert!((hi - 4.0).abs() < 1e-12);
        assert!((lo + 5.0).abs() < 1e-12);
    }

    proptest! {
        #[test]
        fn roots_match_sign_changes(c in prop::collection::vec(-3.0f64..3.0, 2..7)) {
            let p = Polynomial::new(c);
            let roots = p.roots_in(-2.0, 2.0).unwrap();
            for &r in &roots {
                prop_assert!((-2.0..=2.0).contains(&r));
            }
            // Every sign change on a fine grid is bracketed by a reported root.
            let n = 4000;
            for k in 0..n {
                let a = -2.0 + 4.0 * k as f64 / n as f64;
                let b = -2.0 + 4.0 * (k + 1) as f64 / n as f64;
                if p.eval(a) * p.eval(b) < 0.0 {
                    prop_assert!(roots.iter().any(|&r| r >= a - 1e-7 && r <= b + 1e-7));
                }
            }
        }
    }
}
