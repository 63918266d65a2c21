//! Small dense complex matrix helpers on top of `nalgebra`.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{dims, Error, Result};

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

/// Largest admissible 1-norm condition number of a Gram matrix before inversion.
pub const MAX_CONDITION: f64 = 1e12;

pub fn frobenius_sq(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum()
}

pub fn norm_sq(v: &CVector) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum()
}

/// Maximum absolute column sum.
pub fn norm1(m: &CMatrix) -> f64 {
    m.column_iter()
        .map(|c| c.iter().map(|z| z.norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// `log2 |det(m)|` via LU. Returns `-inf` for an exactly singular matrix.
pub fn log2_abs_det(m: &CMatrix) -> f64 {
    debug_assert!(m.is_square());
    if m.nrows() == 0 {
        return 0.0;
    }
    m.clone().lu().determinant().norm().log2()
}

pub(crate) fn ensure_square(context: &'static str, m: &CMatrix, n: usize) -> Result<()> {
    if m.nrows() != n || m.ncols() != n {
        return Err(Error::DimensionMismatch {
            context,
            expected: dims(n, n),
            found: dims(m.nrows(), m.ncols()),
        });
    }
    Ok(())
}

pub(crate) fn ensure_product(
    context: &'static str,
    left: &CMatrix,
    right_rows: usize,
) -> Result<()> {
    if left.ncols() != right_rows {
        return Err(Error::DimensionMismatch {
            context,
            expected: format!("{} columns", right_rows),
            found: format!("{} columns", left.ncols()),
        });
    }
    Ok(())
}

/// Stacks matrices vertically; all must share a column count.
pub fn vstack<'a, I>(blocks: I) -> CMatrix
where
    I: IntoIterator<Item = &'a CMatrix>,
{
    let blocks: Vec<&CMatrix> = blocks.into_iter().collect();
    let cols = blocks.first().map_or(0, |b| b.ncols());
    let rows = blocks.iter().map(|b| b.nrows()).sum();
    let mut out = CMatrix::zeros(rows, cols);
    let mut r = 0;
    for b in blocks {
        out.view_mut((r, 0), (b.nrows(), cols)).copy_from(b);
        r += b.nrows();
    }
    out
}

/// Gathers the listed column blocks of width `width`, in the given order.
pub fn gather_column_blocks(m: &CMatrix, blocks: &[usize], width: usize) -> CMatrix {
    let mut out = CMatrix::zeros(m.nrows(), blocks.len() * width);
    for (k, &b) in blocks.iter().enumerate() {
        out.view_mut((0, k * width), (m.nrows(), width))
            .copy_from(&m.columns(b * width, width));
    }
    out
}
