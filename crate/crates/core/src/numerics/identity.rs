use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IdentityResidual {
    /// `|LHS - RHS|` with the last term taken literally as `(1/W1 - 1/W2)`.
    pub residual: f64,
    /// `|LHS - RHS|` with the last term squared, `(1/W1 - 1/W2)^2`.
    /// This reading is an exact identity; the literal one is not.
    pub residual_squared: f64,
    /// `<v1 - v2, v1/W1 - v2/W2> - |v1/W1 - v2/W2|^2`, nonnegative in theory.
    pub slack: f64,
}

/// Evaluates `<v1-v2, v1/W1 - v2/W2>` against `((W1+W2)/2)(|v1/W1 - v2/W2|^2 + (1/W1 - 1/W2))`,
/// `W_i = sqrt(1 + |v_i|^2)`, plus the inequality slack.
pub fn vector_identity_residual(v1: &[f64], v2: &[f64]) -> Result<IdentityResidual> {
    if v1.len() != v2.len() {
        return Err(Error::Argument(format!(
            "dimension mismatch: {} vs {}",
            v1.len(),
            v2.len()
        )));
    }
    let n1: f64 = v1.iter().map(|a| a * a).sum();
    let n2: f64 = v2.iter().map(|a| a * a).sum();
    let w1 = (1.0 + n1).sqrt();
    let w2 = (1.0 + n2).sqrt();
    let mut lhs = 0.0;
    let mut diff2 = 0.0;
    for (a, b) in v1.iter().zip(v2) {
        let d = a / w1 - b / w2;
        lhs += (a - b) * d;
        diff2 += d * d;
    }
    let dinv = 1.0 / w1 - 1.0 / w2;
    let half = 0.5 * (w1 + w2);
    Ok(IdentityResidual {
        residual: (lhs - half * (diff2 + dinv)).abs(),
        residual_squared: (lhs - half * (diff2 + dinv * dinv)).abs(),
        slack: lhs - diff2,
    })
}
