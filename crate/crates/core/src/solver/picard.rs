use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};

/// Scalar data of `x = a + Lx + B(x, x)`: `‖a‖`, `‖L‖ ≤ λ`, `‖B‖ ≤ γ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FixedPointProblem {
    pub a_norm: f64,
    pub lambda: f64,
    pub gamma: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FixedPointReport {
    /// `λ < 1` and `4γ‖a‖ < (1-λ)²`.
    pub feasible: bool,
    /// The condition in the literal form `4λ‖a‖ < (1-λ)²`, reported for audit.
    pub literal_condition: bool,
    pub r1: f64,
    pub r2: f64,
    /// `s₀ = 0`, `s_{n+1} = ‖a‖ + λ s_n + γ s_n²`; the first `TRACE_LEN`.
    pub iterates: Vec<f64>,
    /// Last iterate computed.
    pub limit: f64,
    pub steps: usize,
    /// The iteration became stationary before the step cap.
    pub converged: bool,
}

const TRACE_LEN: usize = 10_000;
const MAX_STEPS: usize = 100_000_000;

impl FixedPointProblem {
    pub fn new(a_norm: f64, lambda: f64, gamma: f64) -> Result<Self> {
        if !(a_norm >= 0.0 && lambda >= 0.0 && gamma >= 0.0) {
            return domain("fixed-point data must be nonnegative");
        }
        Ok(Self { a_norm, lambda, gamma })
    }
}

/// Roots of `γr² - (1-λ)r + ‖a‖ = 0` (`r2 = ∞` in the linear case) and the
/// majorant iteration.
pub fn picard_fixed_point(p: &FixedPointProblem) -> FixedPointReport {
    let FixedPointProblem { a_norm, lambda, gamma } = *p;
    let gap = 1.0 - lambda;
    let literal_condition = 4.0 * lambda * a_norm < gap * gap;
    let (feasible, r1, r2) = if gamma == 0.0 {
        if gap > 0.0 {
            (true, a_norm / gap, f64::INFINITY)
        } else {
            (false, f64::NAN, f64::NAN)
        }
    } else {
        let disc = gap * gap - 4.0 * gamma * a_norm;
        if gap > 0.0 && disc > 0.0 {
            let sq = disc.sqrt();
            // The small root via the conjugate form avoids cancellation.
            let r1 = 2.0 * a_norm / (gap + sq);
            let r2 = (gap + sq) / (2.0 * gamma);
            (true, r1, r2)
        } else {
            (false, f64::NAN, f64::NAN)
        }
    };
    // Near λ = 1 or a double root the contraction factor approaches 1, so
    // the iteration runs well past the stored trace.
    let mut iterates = vec![0.0];
    let mut s: f64 = 0.0;
    let mut steps = 0;
    let mut converged = false;
    while steps < MAX_STEPS {
        let next = a_norm + lambda * s + gamma * s * s;
        steps += 1;
        if iterates.len() < TRACE_LEN {
            iterates.push(next);
        }
        if !next.is_finite() || next > 1e300 {
            s = next;
            break;
        }
        if (next - s).abs() <= 1e-15 * next.max(1e-300) {
            s = next;
            converged = true;
            break;
        }
        s = next;
    }
    FixedPointReport { feasible, literal_condition, r1, r2, iterates, limit: s, steps, converged }
}

impl FixedPointReport {
    pub fn final_iterate(&self) -> f64 {
        self.limit
    }

    pub fn monotone(&self) -> bool {
        self.iterates.windows(2).all(|w| w[1] >= w[0])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn worked_examples() {
        let r = picard_fixed_point(&FixedPointProblem::new(0.1, 0.2, 0.5).unwrap());
        assert!(r.feasible);
        assert!((r.r1 - 0.136675).abs() < 1e-6);
        assert!((r.r2 - 1.463325).abs() < 1e-6);
        assert!(r.monotone() && r.final_iterate() <= r.r1 * (1.0 + 1e-9));

        let r = picard_fixed_point(&FixedPointProblem::new(0.0, 0.0, 1.0).unwrap());
        assert_eq!((r.r1, r.r2), (0.0, 1.0));
        assert!(r.iterates.iter().all(|&s| s == 0.0));

        let r = picard_fixed_point(&FixedPointProblem::new(0.3, 0.5, 1.0).unwrap());
        assert!(!r.feasible);
        assert!(!r.literal_condition);
    }

    #[test]
    fn linear_case() {
        let r = picard_fixed_point(&FixedPointProblem::new(0.2, 0.5, 0.0).unwrap());
        assert!(r.feasible);
        assert!((r.r1 - 0.4).abs() < 1e-15);
        assert!((r.final_iterate() - 0.4).abs() < 1e-12);
    }
}
