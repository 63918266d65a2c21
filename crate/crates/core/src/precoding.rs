//! Zero-forcing precoders and the fixed transmit covariance.

use num_complex::Complex64;

use crate::error::{dims, Error, Result};
use crate::linalg::{norm1, CMatrix, CVector, MAX_CONDITION};

/// Which link a precoder was built for.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LinkTarget {
    /// Source towards the listed relays (Phase I).
    SourceToRelays(Vec<usize>),
    /// Listed relays towards the listed users (Phase II).
    RelaysToUsers {
        relays: Vec<usize>,
        users: Vec<usize>,
    },
    /// Source straight to every user.
    SourceToUsers,
    Unspecified,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Precoder {
    /// Transmit antennas x streams.
    pub matrix: CMatrix,
    pub target: LinkTarget,
}

impl Precoder {
    /// Columns for stream block `index` of width `width`.
    pub fn stream_block(&self, index: usize, width: usize) -> CMatrix {
        self.matrix.columns(index * width, width).into_owned()
    }
}

/// Right pseudo-inverse `H^H (H H^H)^{-1}`.
///
/// Requires `rows(H) <= cols(H)` and a Gram matrix `H H^H` whose 1-norm
/// condition number stays below [`MAX_CONDITION`]; otherwise the channel is
/// reported as singular and the caller redraws it. Computed from a thin QR
/// factorization of `H^H`, so `H P = I` holds to roughly `eps * cond(H)`.
/// No power normalization is applied.
pub fn zf_precoder(h: &CMatrix, target: LinkTarget) -> Result<Precoder> {
    let rows = h.nrows();
    if rows == 0 || rows > h.ncols() {
        return Err(Error::DimensionMismatch {
            context: "zf_precoder",
            expected: "rows <= cols".into(),
            found: dims(rows, h.ncols()),
        });
    }
    let qr = h.adjoint().qr();
    let r = qr.r();
    let singular = || Error::SingularChannel {
        condition: f64::INFINITY,
    };
    if r.diagonal().iter().any(|d| d.norm() == 0.0) {
        return Err(singular());
    }
    // X = R^{-H}, so P = Q X and (H H^H)^{-1} = X^H X.
    let r_inv_adj = r
        .adjoint()
        .solve_lower_triangular(&CMatrix::identity(rows, rows))
        .ok_or_else(singular)?;
    let gram = r.adjoint() * &r;
    let gram_inv = r_inv_adj.adjoint() * &r_inv_adj;
    let condition = norm1(&gram) * norm1(&gram_inv);
    if !condition.is_finite() || condition > MAX_CONDITION {
        return Err(Error::SingularChannel { condition });
    }
    Ok(Precoder {
        matrix: qr.q() * r_inv_adj,
        target,
    })
}

/// Transmit covariance `Q_s` with trace `E_s`.
#[derive(Debug, Clone, PartialEq)]
pub struct SignalCovariance {
    pub matrix: CMatrix,
    pub total_power: f64,
}

impl SignalCovariance {
    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn trace(&self) -> f64 {
        self.matrix.trace().re
    }

    /// Same covariance with every entry scaled by `factor`.
    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            matrix: &self.matrix * Complex64::from(factor),
            total_power: self.total_power * factor,
        }
    }
}

/// Uniform power allocation `Q = (E_s / streams) I`.
pub fn signal_covariance(streams: usize, total_power: f64) -> Result<SignalCovariance> {
    if streams == 0 {
        return Err(Error::InvalidParameter("stream count must be >= 1".into()));
    }
    if !(total_power > 0.0 && total_power.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "total power must be > 0, got {total_power}"
        )));
    }
    let per_stream = total_power / streams as f64;
    Ok(SignalCovariance {
        matrix: CMatrix::identity(streams, streams) * Complex64::from(per_stream),
        total_power,
    })
}

/// Symbols plus their precoded transmit vector.
#[derive(Debug, Clone, PartialEq)]
pub struct PilotBlock {
    pub symbols: CVector,
    pub transmit: CVector,
}

/// `x = P s`.
pub fn precode(p: &Precoder, s: &CVector) -> Result<PilotBlock> {
    if p.matrix.ncols() != s.len() {
        return Err(Error::DimensionMismatch {
            context: "precode",
            expected: format!("{} symbols", p.matrix.ncols()),
            found: format!("{} symbols", s.len()),
        });
    }
    Ok(PilotBlock {
        symbols: s.clone(),
        transmit: &p.matrix * s,
    })
}
