//! Continuous-time LTI state-space model `x' = Ax + Bu`, `y = Cx`.

use crate::error::{Error, Result};
use crate::matrix::Matrix;

/// State-space triple with validated dimensions.
#[derive(Clone, Debug, PartialEq)]
pub struct StateSpaceModel {
    pub a: Matrix,
    pub b: Matrix,
    pub c: Matrix,
}

impl StateSpaceModel {
    pub fn new(a: Matrix, b: Matrix, c: Matrix) -> Result<Self> {
        if !a.is_square() {
            return Err(Error::DimensionError(format!(
                "A must be square, got {}x{}",
                a.rows(),
                a.cols()
            )));
        }
        let n = a.rows();
        if n == 0 {
            return Err(Error::DimensionError("state dimension must be >= 1".into()));
        }
        if b.rows() != n {
            return Err(Error::DimensionError(format!(
                "B has {} rows, expected {}",
                b.rows(),
                n
            )));
        }
        if c.cols() != n {
            return Err(Error::DimensionError(format!(
                "C has {} columns, expected {}",
                c.cols(),
                n
            )));
        }
        Ok(StateSpaceModel { a, b, c })
    }

    /// State dimension.
    pub fn n(&self) -> usize {
        self.a.rows()
    }

    /// Input count.
    pub fn p(&self) -> usize {
        self.b.cols()
    }

    /// Output count.
    pub fn q(&self) -> usize {
        self.c.rows()
    }
}
