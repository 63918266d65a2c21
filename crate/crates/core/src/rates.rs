//! Information rates in bits/s/Hz.
//!
//! All `log` terms are base 2. The matrix fractions of the relayed rates are
//! read as `N (D)^{-1}` with the denominator inverted on the right, and the
//! determinant is taken in modulus.

use crate::error::{Error, Result};
use crate::linalg::{ensure_product, ensure_square, log2_abs_det, CMatrix};
use crate::precoding::SignalCovariance;

/// Rates of one legitimate receiver against one (worst-case) eavesdropper.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct RateSample {
    pub r_d: f64,
    pub r_e: f64,
    pub r_secrecy: f64,
    pub r_secrecy_clipped: f64,
}

impl RateSample {
    pub fn new(r_d: f64, r_e: f64) -> Self {
        let r_secrecy = r_d - r_e;
        Self {
            r_d,
            r_e,
            r_secrecy,
            r_secrecy_clipped: r_secrecy.max(0.0),
        }
    }

    /// Adds legitimate and eavesdropper rates; the clipped value is
    /// recomputed on the sum.
    pub fn combine(self, other: RateSample) -> Self {
        Self::new(self.r_d + other.r_d, self.r_e + other.r_e)
    }
}

impl std::iter::Sum for RateSample {
    fn sum<I: Iterator<Item = RateSample>>(iter: I) -> Self {
        iter.fold(RateSample::default(), RateSample::combine)
    }
}

/// `H Q H^H`.
fn sandwich(h: &CMatrix, q: &CMatrix) -> CMatrix {
    h * q * h.adjoint()
}

fn check_covariance(context: &'static str, h: &CMatrix, q: &SignalCovariance) -> Result<()> {
    ensure_square(context, &q.matrix, q.dim())?;
    ensure_product(context, h, q.dim())
}

/// `log2 det(I + H Q H^H)`.
pub fn logdet_capacity(h: &CMatrix, q: &SignalCovariance) -> Result<f64> {
    check_covariance("logdet_capacity", h, q)?;
    let n = h.nrows();
    let m = CMatrix::identity(n, n) + sandwich(h, &q.matrix);
    Ok(log2_abs_det(&m).max(0.0))
}

/// Forwarded signal term `H P H_sr Q H_sr^H P^H H^H` and denominator
/// `H Q H^H + I` shared by the destination and eavesdropper rates.
fn relayed_terms(
    context: &'static str,
    h: &CMatrix,
    p_d: &CMatrix,
    h_sr: &CMatrix,
    q: &SignalCovariance,
) -> Result<(CMatrix, CMatrix)> {
    ensure_product(context, h, p_d.nrows())?;
    ensure_product(context, p_d, h_sr.nrows())?;
    check_covariance(context, h_sr, q)?;
    check_covariance(context, h, q)?;
    let chain = h * p_d * h_sr;
    let numerator = sandwich(&chain, &q.matrix);
    let n = h.nrows();
    let denominator = sandwich(h, &q.matrix) + CMatrix::identity(n, n);
    Ok((numerator, denominator))
}

/// `1/2 log2 det(I + A (B + I)^{-1})` with
/// `A = H_rd P_d H_sr Q H_sr^H P_d^H H_rd^H` and `B = H_rd Q H_rd^H`.
pub fn destination_rate(
    h_rd: &CMatrix,
    p_d: &CMatrix,
    h_sr: &CMatrix,
    q: &SignalCovariance,
) -> Result<f64> {
    let (a, x) = relayed_terms("destination_rate", h_rd, p_d, h_sr, q)?;
    // det(I + A X^-1) = det(X + A) / det(X)
    Ok((0.5 * (log2_abs_det(&(&x + a)) - log2_abs_det(&x))).max(0.0))
}

/// `1/2 log2 det(Gamma + A_e (B_e + I)^{-1})` with
/// `Gamma = I + H_se Q H_se^H`.
pub fn eavesdropper_rate(
    h_re: &CMatrix,
    p_d: &CMatrix,
    h_sr: &CMatrix,
    h_se: &CMatrix,
    q: &SignalCovariance,
) -> Result<f64> {
    let (a, x) = relayed_terms("eavesdropper_rate", h_re, p_d, h_sr, q)?;
    check_covariance("eavesdropper_rate", h_se, q)?;
    let n = h_re.nrows();
    if h_se.nrows() != n {
        return Err(Error::DimensionMismatch {
            context: "eavesdropper_rate",
            expected: format!("{n} eavesdropper rows"),
            found: format!("{} rows", h_se.nrows()),
        });
    }
    let gamma = CMatrix::identity(n, n) + sandwich(h_se, &q.matrix);
    // det(G + A X^-1) = det(G X + A) / det(X)
    Ok((0.5 * (log2_abs_det(&(gamma * &x + a)) - log2_abs_det(&x))).max(0.0))
}

/// `R = R_d - R_e` for one user and one eavesdropper.
pub fn secrecy_rate(
    h_rd: &CMatrix,
    h_re: &CMatrix,
    h_se: &CMatrix,
    p_d: &CMatrix,
    h_sr: &CMatrix,
    q: &SignalCovariance,
) -> Result<RateSample> {
    let r_d = destination_rate(h_rd, p_d, h_sr, q)?;
    let r_e = eavesdropper_rate(h_re, p_d, h_sr, h_se, q)?;
    Ok(RateSample::new(r_d, r_e))
}

/// Single-phase secrecy rate at a fixed covariance, without the 1/2 factor.
pub fn direct_secrecy_rate(h_ba: &CMatrix, h_ea: &CMatrix, q: &SignalCovariance) -> Result<f64> {
    Ok(logdet_capacity(h_ba, q)? - logdet_capacity(h_ea, q)?)
}
