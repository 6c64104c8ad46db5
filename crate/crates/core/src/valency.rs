//! Valencies of periodic circle actions.

use std::fmt;

use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// The valency `(m, lambda, sigma)` of an oriented circle under a periodic
/// map: `m` is the orbit length of the circle, `lambda` the order of the
/// first-return rotation, and `sigma` its rotation numerator.
///
/// Well-formed valencies have `0 <= sigma < lambda`, `gcd(sigma, lambda) = 1`
/// and `sigma = 0` exactly when `lambda = 1`.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "(u64, u64, u64)", into = "(u64, u64, u64)")]
pub struct Valency {
    m: u64,
    lambda: u64,
    sigma: u64,
}

impl Valency {
    pub fn new(m: u64, lambda: u64, sigma: u64) -> Result<Self> {
        let fail = |reason: &str| Error::InvalidValency {
            m,
            lambda,
            sigma,
            reason: reason.to_string(),
        };
        if m == 0 || lambda == 0 {
            return Err(fail("m and lambda must be positive"));
        }
        if sigma >= lambda {
            return Err(fail("sigma must lie in [0, lambda)"));
        }
        if (sigma == 0) != (lambda == 1) {
            return Err(fail("sigma = 0 exactly when lambda = 1"));
        }
        if sigma != 0 && sigma.gcd(&lambda) != 1 {
            return Err(fail("sigma and lambda must be coprime"));
        }
        Ok(Valency { m, lambda, sigma })
    }

    pub fn m(&self) -> u64 {
        self.m
    }

    pub fn lambda(&self) -> u64 {
        self.lambda
    }

    pub fn sigma(&self) -> u64 {
        self.sigma
    }

    /// Total sheet count `m * lambda` over the quotient circle.
    pub fn sheets(&self) -> u64 {
        self.m
            .checked_mul(self.lambda)
            .expect("valency sheet count overflows u64")
    }
}

impl fmt::Display for Valency {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{},{})", self.m, self.lambda, self.sigma)
    }
}

impl fmt::Debug for Valency {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl TryFrom<(u64, u64, u64)> for Valency {
    type Error = Error;
    fn try_from(t: (u64, u64, u64)) -> Result<Self> {
        Valency::new(t.0, t.1, t.2)
    }
}

impl From<Valency> for (u64, u64, u64) {
    fn from(v: Valency) -> Self {
        (v.m, v.lambda, v.sigma)
    }
}

/// The unique representative of `m` in `[0, n)`, for `n >= 1`.
///
/// Total on all signed `m`; this is the `sigma(m, n)` used to read rotation
/// numerators off multiplicity sequences.
pub fn remainder_sigma(m: i64, n: u64) -> u64 {
    assert!(n > 0, "modulus must be positive");
    m.rem_euclid(n as i64) as u64
}
