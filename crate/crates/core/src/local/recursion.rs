use serde::{Deserialize, Serialize};

/// Which branch of the energy recursion lemma applies.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RecursionCase {
    /// `e(c⁺) = 0`, bound `16α²`.
    I,
    /// `0 < e(c⁺) < 16α²` with `αγ < 1/64`, bound `64α²`.
    Ii,
    /// `16α² ≤ e(c⁺) ≤ 1/(256γ²)`, bound `4e(c⁺)`.
    Iii,
    Fail(String),
}

impl RecursionCase {
    pub fn label(&self) -> &str {
        match self {
            RecursionCase::I => "i",
            RecursionCase::Ii => "ii",
            RecursionCase::Iii => "iii",
            RecursionCase::Fail(_) => "fail",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RecursionVerdict {
    pub case: RecursionCase,
    /// Bound on `e` at the end of the window; `NaN` on failure.
    pub bound: f64,
}

/// For continuous nondecreasing `e` on `(c, c + τ)` with
/// `e(t) ≤ e(c⁺) + αe^{1/2} + βe + γe^{3/2}`, bound `e` at the end of the window.
pub fn energy_recursion_check(e_cplus: f64, alpha: f64, beta: f64, gamma: f64) -> RecursionVerdict {
    let fail = |msg: String| RecursionVerdict { case: RecursionCase::Fail(msg), bound: f64::NAN };
    if !(beta < 0.5) {
        return fail(format!("beta < 1/2 violated (beta = {beta})"));
    }
    if !(alpha * gamma < 1.0 / 16.0) {
        return fail(format!("alpha*gamma < 1/16 violated (alpha*gamma = {})", alpha * gamma));
    }
    let a2 = alpha * alpha;
    // Boundary values like e = 16α² should not flip on the last bit.
    let low = 16.0 * a2 * (1.0 - 4.0 * f64::EPSILON);
    if e_cplus == 0.0 {
        return RecursionVerdict { case: RecursionCase::I, bound: 16.0 * a2 };
    }
    if e_cplus > 0.0 && e_cplus < low {
        if alpha * gamma < 1.0 / 64.0 {
            return RecursionVerdict { case: RecursionCase::Ii, bound: 64.0 * a2 };
        }
        return fail(format!("alpha*gamma < 1/64 violated (alpha*gamma = {})", alpha * gamma));
    }
    let cap = 1.0 / (256.0 * gamma * gamma);
    if e_cplus >= low && e_cplus <= cap {
        return RecursionVerdict { case: RecursionCase::Iii, bound: 4.0 * e_cplus };
    }
    fail(format!("e(c+) = {e_cplus} outside [0, 1/(256 gamma^2) = {cap}]"))
}
