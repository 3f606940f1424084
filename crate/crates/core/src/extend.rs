//! Extension operators lifting disk functions (and lower-dimensional maps)
//! to locally biholomorphic mappings of a higher-dimensional ball.

use crate::error::{Error, Result};
use crate::func1d::{Func1D, Holo1};
use crate::holomap::HoloMap;
use crate::linalg::{CMatrix, CVec};
use crate::map::BallMap;
use crate::power::{monitor_branch_path, principal_power};
use crate::real::C;

const ZERO_BASE_TOL: f64 = 1e-14;

/// Exponents (alpha_hat, beta_hat) of the power factors.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ExtensionParams {
    pub alpha_hat: f64,
    pub beta_hat: f64,
}

impl ExtensionParams {
    pub fn new(alpha_hat: f64, beta_hat: f64) -> Result<Self> {
        if !(alpha_hat >= 0.0 && beta_hat >= 0.0) {
            return Err(Error::InvalidParam(
                "extension exponents must be nonnegative".into(),
            ));
        }
        Ok(ExtensionParams {
            alpha_hat,
            beta_hat,
        })
    }

    /// The chain-regime constraint: alpha_hat in \[0,1\], beta_hat in \[0,1/2\],
    /// alpha_hat + beta_hat <= 1.
    pub fn in_chain_regime(&self) -> bool {
        (0.0..=1.0).contains(&self.alpha_hat)
            && (0.0..=0.5).contains(&self.beta_hat)
            && self.alpha_hat + self.beta_hat <= 1.0 + 1e-15
    }

    pub fn require_chain_regime(&self) -> Result<()> {
        if self.in_chain_regime() {
            Ok(())
        } else {
            Err(Error::InvalidParam(format!(
                "exponents ({}, {}) outside the chain regime [0,1] x [0,1/2] with sum <= 1",
                self.alpha_hat, self.beta_hat
            )))
        }
    }
}

/// The second-component factor (f(z1)/z1)^{alpha_hat} (f'(z1))^{beta_hat},
/// with both branches anchored to 1 at z1 = 0 and verified along the radial path.
pub(crate) fn rs_factor(
    base: &dyn Holo1<f64>,
    params: &ExtensionParams,
    z1: C<f64>,
) -> Result<C<f64>> {
    let mut g = C::new(1.0, 0.0);
    if params.alpha_hat != 0.0 {
        monitor_branch_path(|t: f64| {
            let u = z1 * t;
            let v = base.value(u);
            if u.norm() > ZERO_BASE_TOL && v.norm() < ZERO_BASE_TOL {
                return Err(Error::ZeroOfBase { re: u.re, im: u.im });
            }
            Ok(base.ratio0(u))
        })?;
        g *= principal_power(base.ratio0(z1), params.alpha_hat)?;
    }
    if params.beta_hat != 0.0 {
        monitor_branch_path(|t: f64| Ok(base.d1(z1 * t)))?;
        g *= principal_power(base.d1(z1), params.beta_hat)?;
    }
    Ok(g)
}

/// (f(z1), z_tilde * factor) over any 1-D base implementing the disk interface.
pub(crate) fn rs_eval(
    base: &dyn Holo1<f64>,
    params: &ExtensionParams,
    n: usize,
    z: &CVec<f64>,
) -> Result<CVec<f64>> {
    if z.dim() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: z.dim(),
        });
    }
    let g = rs_factor(base, params, z[0])?;
    let mut out = CVec::zero(n);
    out[0] = base.value(z[0]);
    for i in 1..n {
        out[i] = z[i] * g;
    }
    Ok(out)
}

/// Analytic Jacobian of the lifted map via the product and chain rules.
pub(crate) fn rs_jacobian(
    base: &dyn Holo1<f64>,
    params: &ExtensionParams,
    n: usize,
    z: &CVec<f64>,
) -> Result<CMatrix<f64>> {
    if z.dim() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: z.dim(),
        });
    }
    let z1 = z[0];
    let g = rs_factor(base, params, z1)?;
    let d1 = base.d1(z1);
    // G'/G = alpha_hat (f'/f - 1/z1) + beta_hat f''/f'
    let mut dlog = C::new(0.0, 0.0);
    if params.alpha_hat != 0.0 {
        dlog += base.log_deriv_excess(z1) * params.alpha_hat;
    }
    if params.beta_hat != 0.0 {
        if d1.norm() < ZERO_BASE_TOL {
            return Err(Error::SingularJacobian {
                pivot: d1.norm(),
                threshold: ZERO_BASE_TOL,
            });
        }
        dlog += base.d2(z1) / d1 * params.beta_hat;
    }
    let gp = g * dlog;
    let mut m = CMatrix::zero(n);
    m[(0, 0)] = d1;
    for i in 1..n {
        m[(i, 0)] = z[i] * gp;
        m[(i, i)] = g;
    }
    Ok(m)
}

/// A closure-valued extension: fractional powers leave the polynomial ring,
/// so these maps evaluate analytically instead of carrying coefficient tables.
#[derive(Clone, Debug)]
pub enum ExtendedMap {
    /// z -> (f(z1), z_tilde (f(z1)/z1)^{alpha_hat} (f'(z1))^{beta_hat}).
    RsLike {
        base: Func1D<f64>,
        params: ExtensionParams,
        n: usize,
    },
    /// z -> (f(z_hat), z_{n+1} (det J_f(z_hat))^{alpha_hat}).
    DetPower { base: HoloMap<f64>, alpha_hat: f64 },
}

/// The square-root extension operator: alpha_hat = 0, beta_hat = 1/2.
pub fn roper_suffridge(f: &Func1D<f64>, n: usize) -> Result<ExtendedMap> {
    modified_rs(f, ExtensionParams::new(0.0, 0.5)?, n)
}

/// The two-exponent modification of the square-root extension operator.
pub fn modified_rs(f: &Func1D<f64>, params: ExtensionParams, n: usize) -> Result<ExtendedMap> {
    if n < 2 {
        return Err(Error::InvalidParam("extension needs n >= 2".into()));
    }
    if !f.is_normalized() {
        return Err(Error::InvalidParam(
            "extension base must be normalized".into(),
        ));
    }
    Ok(ExtendedMap::RsLike {
        base: f.clone(),
        params,
        n,
    })
}

/// The determinant-power extension B^n -> B^{n+1}; the scalar power of
/// det J_f is anchored to 1 at the origin.
pub fn pfaltzgraff_suffridge(f: &HoloMap<f64>, alpha_hat: f64) -> Result<ExtendedMap> {
    if alpha_hat < 0.0 {
        return Err(Error::InvalidParam(
            "extension exponent must be nonnegative".into(),
        ));
    }
    if !f.is_normalized() {
        return Err(Error::InvalidParam(
            "extension base must be normalized".into(),
        ));
    }
    Ok(ExtendedMap::DetPower {
        base: f.clone(),
        alpha_hat,
    })
}

fn det_at(base: &HoloMap<f64>, zhat: &CVec<f64>) -> Result<C<f64>> {
    Ok(base.jacobian(zhat)?.lu()?.det())
}

impl ExtendedMap {
    pub fn params(&self) -> ExtensionParams {
        match self {
            ExtendedMap::RsLike { params, .. } => *params,
            ExtendedMap::DetPower { alpha_hat, .. } => ExtensionParams {
                alpha_hat: *alpha_hat,
                beta_hat: 0.0,
            },
        }
    }

    /// Operator description for report files.
    pub fn metadata(&self) -> serde_json::Value {
        match self {
            ExtendedMap::RsLike { base, params, n } => serde_json::json!({
                "operator": "modified-roper-suffridge",
                "alpha_hat": params.alpha_hat,
                "beta_hat": params.beta_hat,
                "n": n,
                "base": base.to_json(),
                "square_root_form": params.alpha_hat == 0.0 && params.beta_hat == 0.5,
            }),
            ExtendedMap::DetPower { base, alpha_hat } => {
                let n_in = base.dim();
                serde_json::json!({
                    "operator": "det-power-extension",
                    "alpha_hat": alpha_hat,
                    "n_in": n_in,
                    "n_out": n_in + 1,
                    "base": base.to_json(),
                    "pfaltzgraff_suffridge_coincidence":
                        (alpha_hat - 1.0 / (n_in as f64 + 1.0)).abs() < 1e-12,
                })
            }
        }
    }
}

impl BallMap for ExtendedMap {
    fn dim(&self) -> usize {
        match self {
            ExtendedMap::RsLike { n, .. } => *n,
            ExtendedMap::DetPower { base, .. } => base.dim() + 1,
        }
    }

    fn eval(&self, z: &CVec<f64>) -> Result<CVec<f64>> {
        match self {
            ExtendedMap::RsLike { base, params, n } => rs_eval(base, params, *n, z),
            ExtendedMap::DetPower { base, alpha_hat } => {
                let n = base.dim();
                if z.dim() != n + 1 {
                    return Err(Error::DimensionMismatch {
                        expected: n + 1,
                        got: z.dim(),
                    });
                }
                let zhat = CVec(z.0[..n].to_vec());
                let dpow = if *alpha_hat == 0.0 {
                    C::new(1.0, 0.0)
                } else {
                    monitor_branch_path(|t: f64| det_at(base, &zhat.scale(C::new(t, 0.0))))?;
                    principal_power(det_at(base, &zhat)?, *alpha_hat)?
                };
                let mut out = CVec::zero(n + 1);
                let head = base.eval(&zhat)?;
                for i in 0..n {
                    out[i] = head[i];
                }
                out[n] = z[n] * dpow;
                Ok(out)
            }
        }
    }

    fn jacobian(&self, z: &CVec<f64>) -> Result<CMatrix<f64>> {
        match self {
            ExtendedMap::RsLike { base, params, n } => rs_jacobian(base, params, *n, z),
            ExtendedMap::DetPower { base, alpha_hat } => {
                let n = base.dim();
                if z.dim() != n + 1 {
                    return Err(Error::DimensionMismatch {
                        expected: n + 1,
                        got: z.dim(),
                    });
                }
                let zhat = CVec(z.0[..n].to_vec());
                let jf = base.jacobian(&zhat)?;
                let lu = jf.lu()?;
                let dpow = if *alpha_hat == 0.0 {
                    C::new(1.0, 0.0)
                } else {
                    principal_power(lu.det(), *alpha_hat)?
                };
                let mut m = CMatrix::zero(n + 1);
                for i in 0..n {
                    for j in 0..n {
                        m[(i, j)] = jf[(i, j)];
                    }
                }
                // d/dz_j (det^a) = a det^a tr(J^{-1} dJ/dz_j) by the determinant's
                // differentiation rule.
                if *alpha_hat != 0.0 {
                    for j in 0..n {
                        let mj = base.second_partials(&zhat, j)?;
                        let mut trace = C::new(0.0, 0.0);
                        for i in 0..n {
                            let mut col = CVec::zero(n);
                            for k in 0..n {
                                col[k] = mj[(k, i)];
                            }
                            trace += lu.solve(&col)?[i];
                        }
                        m[(n, j)] = z[n] * dpow * *alpha_hat * trace;
                    }
                }
                m[(n, n)] = dpow;
                Ok(m)
            }
        }
    }

    fn is_normalized(&self) -> bool {
        true
    }
}
