//! Product distributions on (0,1)^d: densities, CDFs, samplers, and the
//! quantile-quadrature reference values used to certify the grid pipeline.
//!
//! All types are immutable after construction. Evaluation and sampling are
//! pure given an explicit generator state, so callers may share them freely
//! across threads.

mod factor;
mod quadrature;

pub use factor::{Factor1D, INVERT_TOL};
pub use quadrature::{gauss_legendre_01, ref_w2sq_1d, ref_w2sq_product};

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A product of 1D factors: density(x) = ∏ factorℓ(xℓ).
///
/// Serializes to the CLI's distribution JSON: `{"d": 2, "factors": [...]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ProductDensityRepr", into = "ProductDensityRepr")]
pub struct ProductDensity {
    factors: Vec<Factor1D>,
}

#[derive(Serialize, Deserialize)]
struct ProductDensityRepr {
    d: usize,
    factors: Vec<Factor1D>,
}

impl TryFrom<ProductDensityRepr> for ProductDensity {
    type Error = Error;
    fn try_from(repr: ProductDensityRepr) -> Result<Self> {
        if repr.d != repr.factors.len() {
            return Err(Error::Mismatch(format!(
                "declared d={} but {} factors given",
                repr.d,
                repr.factors.len()
            )));
        }
        ProductDensity::new(repr.factors)
    }
}

impl From<ProductDensity> for ProductDensityRepr {
    fn from(p: ProductDensity) -> Self {
        ProductDensityRepr { d: p.factors.len(), factors: p.factors }
    }
}

impl ProductDensity {
    pub fn new(factors: Vec<Factor1D>) -> Result<Self> {
        if factors.is_empty() {
            return Err(Error::InvalidParameter("dimension must be >= 1".into()));
        }
        for f in &factors {
            f.validate()?;
        }
        Ok(ProductDensity { factors })
    }

    pub fn d(&self) -> usize {
        self.factors.len()
    }

    pub fn factors(&self) -> &[Factor1D] {
        &self.factors
    }

    pub fn factor(&self, axis: usize) -> &Factor1D {
        &self.factors[axis]
    }

    /// Product bound: C = ∏ Cᵢ, so C⁻¹ ≤ density ≤ C on the open cube.
    pub fn bound_c(&self) -> f64 {
        self.factors.iter().map(Factor1D::bound_c).product()
    }

    /// Density at a point strictly inside (0,1)^d.
    pub fn density(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.d() {
            return Err(Error::Mismatch(format!(
                "point has dimension {} but density has d={}",
                x.len(),
                self.d()
            )));
        }
        let mut v = 1.0;
        for (f, &xi) in self.factors.iter().zip(x) {
            v *= f.density(xi)?;
        }
        Ok(v)
    }

    /// Draws `n` i.i.d. points by per-axis inverse-CDF sampling.
    ///
    /// Deterministic for a fixed generator state: the k-th point consumes
    /// exactly d uniforms in axis order.
    pub fn sample<R: Rng>(&self, rng: &mut R, n: usize) -> Result<PointCloud> {
        if n < 1 {
            return Err(Error::InvalidParameter("sample size must be >= 1".into()));
        }
        let d = self.d();
        let mut coords = Vec::with_capacity(n * d);
        for _ in 0..n {
            for f in &self.factors {
                let u = loop {
                    // gen::<f64>() is uniform on [0,1); reject the single
                    // value 0 so quantiles stay strictly inside (0,1).
                    let u: f64 = rng.gen();
                    if u > 0.0 {
                        break u;
                    }
                };
                coords.push(f.quantile(u)?);
            }
        }
        Ok(PointCloud { d, coords })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("product density serializes")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }
}

/// `n` points in (0,1)^d, stored flat in row-major order.
#[derive(Debug, Clone, PartialEq)]
pub struct PointCloud {
    d: usize,
    coords: Vec<f64>,
}

impl PointCloud {
    /// Builds a cloud, validating that every coordinate is strictly inside (0,1).
    pub fn new(d: usize, coords: Vec<f64>) -> Result<Self> {
        if d == 0 || coords.len() % d != 0 {
            return Err(Error::InvalidParameter(format!(
                "coordinate buffer of length {} is not a multiple of d={d}",
                coords.len()
            )));
        }
        for &c in &coords {
            if !(c > 0.0 && c < 1.0) {
                return Err(Error::Domain(format!("coordinate {c} not in (0,1)")));
            }
        }
        Ok(PointCloud { d, coords })
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn len(&self) -> usize {
        self.coords.len() / self.d
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.coords[i * self.d..(i + 1) * self.d]
    }

    pub fn iter(&self) -> impl Iterator<Item = &[f64]> {
        self.coords.chunks_exact(self.d)
    }

    /// Coordinates of one axis across all points.
    pub fn axis(&self, axis: usize) -> Vec<f64> {
        self.iter().map(|p| p[axis]).collect()
    }
}
