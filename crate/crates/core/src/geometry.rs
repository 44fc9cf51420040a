//! The symmetric `1 + n + 2` configuration and its ring interaction sum.
//!
//! Bodies are always serialized in the order given by [`BodyIndexing`]:
//! index `0` is the center, `1..=n` are the ring bodies at angles `2*pi*k/n`,
//! `n + 1` is the north pole `(0, 0, alpha)` and `n + 2` the south pole
//! `(0, 0, -alpha)`. Positions are at unit scale; the time-dependent scale
//! `r(t)` is applied in [`crate::dynamics`].

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::reduced::MassTriple;
use crate::summation::compensated_sum;

pub type Vec3 = [f64; 3];

/// Shape parameters of the symmetric configuration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SymmetricConfig {
    n: usize,
    alpha: f64,
}

impl SymmetricConfig {
    pub fn new(n: usize, alpha: f64) -> Result<Self> {
        if n < 2 {
            return Err(Error::Domain(format!("ring size n = {n} must be at least 2")));
        }
        if !(alpha.is_finite() && alpha > 0.0) {
            return Err(Error::Domain(format!("pole height alpha = {alpha} must be positive and finite")));
        }
        Ok(Self { n, alpha })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// Total number of bodies, `n + 3`.
    pub fn body_count(&self) -> usize {
        self.n + 3
    }

    pub fn indexing(&self) -> BodyIndexing {
        BodyIndexing { n: self.n }
    }
}

/// Fixed body ordering: center, ring (increasing angle), north pole, south pole.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BodyIndexing {
    n: usize,
}

impl BodyIndexing {
    pub const CENTER: usize = 0;

    pub fn new(n: usize) -> Self {
        Self { n }
    }

    pub fn len(&self) -> usize {
        self.n + 3
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Index of ring body `k` (`1 <= k <= n`).
    pub fn ring(&self, k: usize) -> usize {
        debug_assert!((1..=self.n).contains(&k));
        k
    }

    pub fn ring_range(&self) -> std::ops::RangeInclusive<usize> {
        1..=self.n
    }

    pub fn north(&self) -> usize {
        self.n + 1
    }

    pub fn south(&self) -> usize {
        self.n + 2
    }
}

/// Unit-scale positions of all `n + 3` bodies in [`BodyIndexing`] order.
pub fn build_points(config: &SymmetricConfig) -> Vec<Vec3> {
    let n = config.n;
    let mut points = Vec::with_capacity(config.body_count());
    points.push([0.0, 0.0, 0.0]);
    for k in 1..=n {
        // Each angle from its own index; incremental rotation would drift.
        let theta = 2.0 * PI * (k as f64) / (n as f64);
        let (s, c) = theta.sin_cos();
        points.push([c, s, 0.0]);
    }
    points.push([0.0, 0.0, config.alpha]);
    points.push([0.0, 0.0, -config.alpha]);
    points
}

/// Ring sum `H_n = sum_{j=1}^{n-1} 1 / (4 sin(pi j / n))`.
///
/// This is the magnitude of the (inward) attraction exerted on one vertex of
/// a unit regular `n`-gon by the other `n - 1` unit masses.
pub fn h_sum(n: usize) -> Result<f64> {
    if n < 2 {
        return Err(Error::Domain(format!("H_n needs n >= 2, got {n}")));
    }
    let nf = n as f64;
    Ok(compensated_sum(
        (1..n).map(|j| 0.25 / (PI * (j as f64) / nf).sin()),
    ))
}

/// Per-body masses in [`BodyIndexing`] order: `[m0, m1 (n times), m2, m2]`.
pub fn mass_vector(n: usize, masses: &MassTriple) -> Vec<f64> {
    let mut out = Vec::with_capacity(n + 3);
    out.push(masses.m0);
    out.extend(std::iter::repeat(masses.m1).take(n));
    out.push(masses.m2);
    out.push(masses.m2);
    out
}
