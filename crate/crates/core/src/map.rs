//! Common interface for holomorphic mappings of the ball with analytic Jacobians.

use crate::error::Result;
use crate::func1d::{Func1D, Holo1};
use crate::holomap::HoloMap;
use crate::linalg::{CMatrix, CVec};
use crate::real::C;

/// A holomorphic mapping B^n -> C^n exposing exact evaluation and Jacobian.
pub trait BallMap: Send + Sync {
    fn dim(&self) -> usize;
    fn eval(&self, z: &CVec<f64>) -> Result<CVec<f64>>;
    fn jacobian(&self, z: &CVec<f64>) -> Result<CMatrix<f64>>;
    fn is_normalized(&self) -> bool;

    fn solve_jacobian(&self, z: &CVec<f64>, w: &CVec<f64>) -> Result<CVec<f64>> {
        self.jacobian(z)?.lu()?.solve(w)
    }

    fn det_jacobian(&self, z: &CVec<f64>) -> Result<C<f64>> {
        Ok(self.jacobian(z)?.lu()?.det())
    }
}

impl BallMap for HoloMap<f64> {
    fn dim(&self) -> usize {
        HoloMap::dim(self)
    }

    fn eval(&self, z: &CVec<f64>) -> Result<CVec<f64>> {
        HoloMap::eval(self, z)
    }

    fn jacobian(&self, z: &CVec<f64>) -> Result<CMatrix<f64>> {
        HoloMap::jacobian(self, z)
    }

    fn is_normalized(&self) -> bool {
        HoloMap::is_normalized(self)
    }
}

/// A 1-D disk function viewed as a mapping with n = 1.
pub struct Func1DMap(pub Func1D<f64>);

impl BallMap for Func1DMap {
    fn dim(&self) -> usize {
        1
    }

    fn eval(&self, z: &CVec<f64>) -> Result<CVec<f64>> {
        Ok(CVec(vec![self.0.value(z[0])]))
    }

    fn jacobian(&self, z: &CVec<f64>) -> Result<CMatrix<f64>> {
        let mut m = CMatrix::zero(1);
        m[(0, 0)] = self.0.d1(z[0]);
        Ok(m)
    }

    fn is_normalized(&self) -> bool {
        self.0.is_normalized()
    }
}
