use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};

use super::norm;

/// A convex body `K` with `r B ⊂ K ⊂ D B`, known through its projection.
///
/// `project` must be idempotent and non-expansive;
/// [`check_projection_contract`] tests both on random points.
pub trait ConvexDomain {
    fn dim(&self) -> usize;
    fn inner_radius(&self) -> f64;
    fn outer_radius(&self) -> f64;
    fn project(&self, x: &[f64]) -> Vec<f64>;

    /// `D / r`.
    fn kappa(&self) -> f64 {
        self.outer_radius() / self.inner_radius()
    }
}

/// The Euclidean ball of radius `D` in `R^d`, with a declared inner radius.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EuclideanBall {
    dim: usize,
    inner: f64,
    outer: f64,
}

impl EuclideanBall {
    pub fn new(dim: usize, inner_radius: f64, outer_radius: f64) -> Result<Self> {
        if dim == 0 {
            return Err(Error::invalid("domain dimension must be >= 1"));
        }
        if !(inner_radius > 0.0 && inner_radius <= outer_radius && outer_radius.is_finite()) {
            return Err(Error::invalid(format!(
                "radii must satisfy 0 < r <= D, got r = {inner_radius}, D = {outer_radius}"
            )));
        }
        Ok(Self {
            dim,
            inner: inner_radius,
            outer: outer_radius,
        })
    }
}

impl ConvexDomain for EuclideanBall {
    fn dim(&self) -> usize {
        self.dim
    }

    fn inner_radius(&self) -> f64 {
        self.inner
    }

    fn outer_radius(&self) -> f64 {
        self.outer
    }

    fn project(&self, x: &[f64]) -> Vec<f64> {
        let n = norm(x);
        if n <= self.outer {
            x.to_vec()
        } else {
            x.iter().map(|v| v * self.outer / n).collect()
        }
    }
}

/// Checks idempotence and non-expansiveness of `domain.project` on
/// `trials` random Gaussian pairs with spread `3 D`.
pub fn check_projection_contract<D, R>(domain: &D, rng: &mut R, trials: usize) -> Result<()>
where
    D: ConvexDomain + ?Sized,
    R: Rng + ?Sized,
{
    let spread = 3.0 * domain.outer_radius();
    let point = |rng: &mut R| -> Vec<f64> {
        (0..domain.dim())
            .map(|_| spread * rng.sample::<f64, _>(StandardNormal))
            .collect()
    };
    for _ in 0..trials {
        let (a, b) = (point(rng), point(rng));
        let (pa, pb) = (domain.project(&a), domain.project(&b));
        let again = domain.project(&pa);
        let drift: f64 = norm(&pa.iter().zip(&again).map(|(x, y)| x - y).collect::<Vec<_>>());
        if drift > 1e-9 * (1.0 + norm(&pa)) {
            return Err(Error::invalid(format!("projection is not idempotent at {a:?}")));
        }
        let before = norm(&a.iter().zip(&b).map(|(x, y)| x - y).collect::<Vec<_>>());
        let after = norm(&pa.iter().zip(&pb).map(|(x, y)| x - y).collect::<Vec<_>>());
        if after > before * (1.0 + 1e-9) + 1e-12 {
            return Err(Error::invalid(format!("projection expands {a:?}, {b:?}")));
        }
    }
    Ok(())
}
