//! The exponent optimization behind the density bound: `delta` from the
//! divisor-in-interval estimate, and the `kappa` that balances
//! `kappa*delta = lambda*ln 2 = mu(kappa, lambda)`.

use serde::Serialize;

use crate::error::{Error, Result};

/// Published value of `lambda`; reported alongside the computed one.
pub const LAMBDA_PUBLISHED: f64 = 0.07452;
/// Allowed gap between the computed and the published `lambda`.
pub const LAMBDA_TOLERANCE: f64 = 5e-4;

const KAPPA_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Exponents {
    pub delta: f64,
    pub kappa: f64,
    pub lambda: f64,
    /// `kappa * delta`, the saving exponent on `log x`.
    pub exponent: f64,
    /// `|mu(kappa, lambda) - kappa*delta|` at the solution.
    pub mu_residual: f64,
    pub lambda_published: f64,
}

/// `1 - (1 + ln ln 2) / ln 2`.
pub fn ford_delta() -> f64 {
    let l2 = std::f64::consts::LN_2;
    1.0 - (1.0 + l2.ln()) / l2
}

/// `mu = (1-kappa)/2 - lambda ln(e(1-kappa)/(2 lambda))`.
pub fn mu(kappa: f64, lambda: f64) -> f64 {
    0.5 * (1.0 - kappa) - lambda * (std::f64::consts::E * (1.0 - kappa) / (2.0 * lambda)).ln()
}

/// Solves for `kappa` by bisection and derives `lambda = kappa*delta/ln 2`.
pub fn solve_exponents() -> Result<Exponents> {
    let delta = ford_delta();
    let l2 = std::f64::consts::LN_2;
    let residual = |k: f64| mu(k, k * delta / l2) - k * delta;
    // lambda < (1-kappa)/2 holds exactly for kappa below this bound; at the
    // bound itself the residual is -kappa*delta < 0.
    let upper = l2 / (l2 + 2.0 * delta);
    let (mut lo, mut hi) = (1e-9, upper);
    if residual(lo) <= 0.0 || residual(hi) >= 0.0 {
        return Err(Error::NoRoot("kappa bracket has no sign change".into()));
    }
    while hi - lo > KAPPA_TOL {
        let mid = 0.5 * (lo + hi);
        if residual(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let kappa = 0.5 * (lo + hi);
    let exponent = kappa * delta;
    let lambda = exponent / l2;
    if lambda >= 0.5 * (1.0 - kappa) {
        return Err(Error::NoRoot(format!(
            "lambda = {lambda} is not below (1 - kappa)/2"
        )));
    }
    Ok(Exponents {
        delta,
        kappa,
        lambda,
        exponent,
        mu_residual: residual(kappa).abs(),
        lambda_published: LAMBDA_PUBLISHED,
    })
}
