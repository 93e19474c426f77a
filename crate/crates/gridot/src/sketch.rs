//! Cell-center grid sketching: projecting points and analytic measures onto
//! the regular L-per-axis grid on (0,1)^d.
//!
//! Cells are half-open `[a/L, (a+1)/L)` with the last cell closed at 1, so
//! indexing is deterministic when floating-point samples land exactly on a
//! boundary. Index arithmetic is integer throughout.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::measures::{PointCloud, ProductDensity};

/// A regular grid with `L` divisions per axis; the cell edge length is h = 1/L.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GridSpec {
    d: usize,
    l: u32,
}

impl GridSpec {
    pub fn new(d: usize, l: u32) -> Result<Self> {
        if d == 0 {
            return Err(Error::InvalidParameter("dimension must be >= 1".into()));
        }
        if l == 0 {
            return Err(Error::InvalidParameter("grid divisions L must be >= 1".into()));
        }
        let cells = (l as u128).checked_pow(d as u32).ok_or_else(|| {
            Error::Overflow(format!("L^d overflows for L={l}, d={d}"))
        })?;
        if cells > (1 << 31) {
            return Err(Error::Overflow(format!(
                "grid has {cells} cells, beyond the supported 2^31"
            )));
        }
        Ok(GridSpec { d, l })
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn l(&self) -> u32 {
        self.l
    }

    pub fn h(&self) -> f64 {
        1.0 / self.l as f64
    }

    pub fn num_cells(&self) -> usize {
        (self.l as usize).pow(self.d as u32)
    }

    /// Lexicographic rank of a multi-index (first coordinate most significant).
    pub fn rank(&self, idx: &[u32]) -> usize {
        debug_assert_eq!(idx.len(), self.d);
        let mut r = 0usize;
        for &a in idx {
            r = r * self.l as usize + a as usize;
        }
        r
    }

    pub fn unrank(&self, mut rank: usize) -> Vec<u32> {
        let mut idx = vec![0u32; self.d];
        for i in (0..self.d).rev() {
            idx[i] = (rank % self.l as usize) as u32;
            rank /= self.l as usize;
        }
        idx
    }

    /// Multi-index of the cell containing `x`: aℓ = floor(xℓ·L), clamped to
    /// L−1 if the product rounds up to L.
    pub fn cell_index(&self, x: &[f64]) -> Result<Vec<u32>> {
        if x.len() != self.d {
            return Err(Error::Mismatch(format!(
                "point dimension {} vs grid dimension {}",
                x.len(),
                self.d
            )));
        }
        let mut idx = Vec::with_capacity(self.d);
        for &c in x {
            if !(c > 0.0 && c < 1.0) {
                return Err(Error::Domain(format!("coordinate {c} not in (0,1)")));
            }
            let a = (c * self.l as f64).floor() as u32;
            idx.push(a.min(self.l - 1));
        }
        Ok(idx)
    }

    /// Center of the cell with the given multi-index: ((2a+1)/(2L), …).
    pub fn cell_center(&self, idx: &[u32]) -> Result<Vec<f64>> {
        if idx.len() != self.d {
            return Err(Error::Mismatch(format!(
                "index dimension {} vs grid dimension {}",
                idx.len(),
                self.d
            )));
        }
        idx.iter()
            .map(|&a| {
                if a >= self.l {
                    Err(Error::Domain(format!("index {a} out of bounds for L={}", self.l)))
                } else {
                    Ok((2.0 * a as f64 + 1.0) / (2.0 * self.l as f64))
                }
            })
            .collect()
    }
}

/// A discrete measure on grid-cell centers with integer counts summing to `k`
/// (cell masses are counts/k, so every mass is a multiple of 1/k).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GridHistogram {
    grid: GridSpec,
    counts: Vec<u64>,
    k: u64,
}

impl GridHistogram {
    /// Builds a histogram from dense per-cell counts in rank order.
    pub fn from_counts(grid: GridSpec, counts: Vec<u64>) -> Result<Self> {
        if counts.len() != grid.num_cells() {
            return Err(Error::Mismatch(format!(
                "{} counts for a grid of {} cells",
                counts.len(),
                grid.num_cells()
            )));
        }
        let k: u64 = counts.iter().try_fold(0u64, |acc, &c| {
            acc.checked_add(c)
                .ok_or_else(|| Error::Overflow("histogram total overflows u64".into()))
        })?;
        if k == 0 {
            return Err(Error::InvalidParameter("histogram total k must be positive".into()));
        }
        Ok(GridHistogram { grid, counts, k })
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn k(&self) -> u64 {
        self.k
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn count(&self, idx: &[u32]) -> u64 {
        self.counts[self.grid.rank(idx)]
    }

    /// Nonzero cells as (multi-index, count), ascending lexicographic.
    pub fn nonzero(&self) -> Vec<(Vec<u32>, u64)> {
        self.counts
            .iter()
            .enumerate()
            .filter(|(_, &c)| c > 0)
            .map(|(r, &c)| (self.grid.unrank(r), c))
            .collect()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&HistogramRepr::from(self)).expect("histogram serializes")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let repr: HistogramRepr = serde_json::from_str(s)?;
        repr.try_into()
    }
}

/// Sparse JSON form: `{"d":…, "L":…, "k":…, "counts":[[a₁,…,a_d,count],…]}`.
#[derive(Serialize, Deserialize)]
struct HistogramRepr {
    d: usize,
    #[serde(rename = "L")]
    l: u32,
    k: u64,
    counts: Vec<Vec<u64>>,
}

impl From<&GridHistogram> for HistogramRepr {
    fn from(h: &GridHistogram) -> Self {
        let entries = h
            .nonzero()
            .into_iter()
            .map(|(idx, c)| {
                let mut row: Vec<u64> = idx.into_iter().map(u64::from).collect();
                row.push(c);
                row
            })
            .collect();
        HistogramRepr { d: h.grid.d(), l: h.grid.l(), k: h.k, counts: entries }
    }
}

impl TryFrom<HistogramRepr> for GridHistogram {
    type Error = Error;
    fn try_from(repr: HistogramRepr) -> Result<Self> {
        let grid = GridSpec::new(repr.d, repr.l)?;
        let mut counts = vec![0u64; grid.num_cells()];
        for row in &repr.counts {
            if row.len() != repr.d + 1 {
                return Err(Error::Mismatch(format!(
                    "sparse entry {row:?} should hold {} indices plus a count",
                    repr.d
                )));
            }
            let mut idx = Vec::with_capacity(repr.d);
            for &a in &row[..repr.d] {
                if a >= repr.l as u64 {
                    return Err(Error::Domain(format!("index {a} out of bounds for L={}", repr.l)));
                }
                idx.push(a as u32);
            }
            let r = grid.rank(&idx);
            if counts[r] != 0 {
                return Err(Error::Mismatch(format!("duplicate cell {idx:?} in sparse counts")));
            }
            counts[r] = row[repr.d];
        }
        let h = GridHistogram::from_counts(grid, counts)?;
        if h.k != repr.k {
            return Err(Error::Mismatch(format!(
                "declared k={} but counts sum to {}",
                repr.k, h.k
            )));
        }
        Ok(h)
    }
}

/// Sketches a point cloud onto the grid: count per cell, k = n.
pub fn sketch_sample(grid: GridSpec, pts: &PointCloud) -> Result<GridHistogram> {
    if pts.d() != grid.d() {
        return Err(Error::Mismatch(format!(
            "cloud dimension {} vs grid dimension {}",
            pts.d(),
            grid.d()
        )));
    }
    let mut counts = vec![0u64; grid.num_cells()];
    for p in pts.iter() {
        let idx = grid.cell_index(p)?;
        counts[grid.rank(&idx)] += 1;
    }
    GridHistogram::from_counts(grid, counts)
}

/// Sketches an analytic product measure onto the grid.
///
/// Exact cell masses are products of per-axis CDF increments; they are then
/// apportioned to integer counts summing to `k_quant` by largest-remainder
/// rounding (ties broken by ascending cell rank), so every cell mass moves by
/// at most 1/k_quant.
pub fn sketch_analytic(grid: GridSpec, p: &ProductDensity, k_quant: u64) -> Result<GridHistogram> {
    if p.d() != grid.d() {
        return Err(Error::Mismatch(format!(
            "density dimension {} vs grid dimension {}",
            p.d(),
            grid.d()
        )));
    }
    if k_quant < grid.num_cells() as u64 {
        return Err(Error::InvalidParameter(format!(
            "k_quant={k_quant} below the cell count {}",
            grid.num_cells()
        )));
    }
    if k_quant > (1u64 << 53) {
        return Err(Error::Overflow(
            "k_quant beyond 2^53 loses integer precision in f64 apportionment".into(),
        ));
    }
    let l = grid.l();
    // Per-axis interval masses cdf((a+1)/L) − cdf(a/L).
    let mut axis_weights: Vec<Vec<f64>> = Vec::with_capacity(grid.d());
    for f in p.factors() {
        let mut w = Vec::with_capacity(l as usize);
        for a in 0..l {
            let lo = f.cdf(a as f64 / l as f64)?;
            let hi = f.cdf((a + 1) as f64 / l as f64)?;
            w.push(hi - lo);
        }
        axis_weights.push(w);
    }

    let cells = grid.num_cells();
    let mut floors = vec![0u64; cells];
    let mut fracs = vec![0.0f64; cells];
    let mut assigned: u64 = 0;
    for r in 0..cells {
        let idx = grid.unrank(r);
        let mass: f64 = idx
            .iter()
            .enumerate()
            .map(|(axis, &a)| axis_weights[axis][a as usize])
            .product();
        let target = mass * k_quant as f64;
        let fl = target.floor();
        floors[r] = fl as u64;
        fracs[r] = target - fl;
        assigned += floors[r];
    }

    // Distribute the leftover units to the largest fractional parts.
    if assigned < k_quant {
        let mut order: Vec<usize> = (0..cells).collect();
        order.sort_by(|&a, &b| {
            fracs[b].partial_cmp(&fracs[a]).unwrap().then(a.cmp(&b))
        });
        let leftover = (k_quant - assigned) as usize;
        for &r in order.iter().take(leftover) {
            floors[r] += 1;
        }
    } else if assigned > k_quant {
        // Possible only through accumulated rounding when every target is
        // integral; retract from the smallest fractional parts.
        let mut order: Vec<usize> = (0..cells).filter(|&r| floors[r] > 0).collect();
        order.sort_by(|&a, &b| {
            fracs[a].partial_cmp(&fracs[b]).unwrap().then(a.cmp(&b))
        });
        let mut excess = assigned - k_quant;
        for &r in &order {
            if excess == 0 {
                break;
            }
            floors[r] -= 1;
            excess -= 1;
        }
    }

    GridHistogram::from_counts(grid, floors)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measures::Factor1D;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn cell_index_basic_and_boundary() {
        let g = GridSpec::new(1, 2).unwrap();
        assert_eq!(g.cell_index(&[0.3]).unwrap(), vec![0]);
        // Boundary goes right under the half-open rule.
        assert_eq!(g.cell_index(&[0.5]).unwrap(), vec![1]);
        let g2 = GridSpec::new(2, 4).unwrap();
        assert_eq!(g2.cell_index(&[0.999999, 0.25]).unwrap(), vec![3, 1]);
    }

    #[test]
    fn cell_index_rejects_outside_points() {
        let g = GridSpec::new(1, 2).unwrap();
        assert!(g.cell_index(&[0.0]).is_err());
        assert!(g.cell_index(&[1.0]).is_err());
        assert!(g.cell_index(&[0.5, 0.5]).is_err());
    }

    #[test]
    fn cell_centers() {
        let g = GridSpec::new(1, 2).unwrap();
        assert_eq!(g.cell_center(&[0]).unwrap(), vec![0.25]);
        assert_eq!(g.cell_center(&[1]).unwrap(), vec![0.75]);
        let g2 = GridSpec::new(2, 3).unwrap();
        let c = g2.cell_center(&[1, 2]).unwrap();
        assert!((c[0] - 0.5).abs() < 1e-15);
        assert!((c[1] - 5.0 / 6.0).abs() < 1e-15);
        assert!(g2.cell_center(&[3, 0]).is_err());
    }

    #[test]
    fn rank_round_trip() {
        let g = GridSpec::new(3, 5).unwrap();
        for r in 0..g.num_cells() {
            assert_eq!(g.rank(&g.unrank(r)), r);
        }
    }

    #[test]
    fn index_center_round_trip_and_half_cell_radius() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for &(d, l) in &[(1usize, 7u32), (2, 4), (3, 3)] {
            let g = GridSpec::new(d, l).unwrap();
            for r in 0..g.num_cells() {
                let idx = g.unrank(r);
                let center = g.cell_center(&idx).unwrap();
                assert_eq!(g.cell_index(&center).unwrap(), idx);
            }
            let bound = (d as f64).sqrt() * g.h() / 2.0;
            for _ in 0..10_000 {
                let x: Vec<f64> = (0..d).map(|_| rng.gen_range(1e-12..1.0)).collect();
                let idx = g.cell_index(&x).unwrap();
                let c = g.cell_center(&idx).unwrap();
                let dist: f64 = x
                    .iter()
                    .zip(&c)
                    .map(|(a, b)| (a - b) * (a - b))
                    .sum::<f64>()
                    .sqrt();
                assert!(dist <= bound + 1e-12, "dist {dist} > {bound}");
            }
        }
    }

    #[test]
    fn sketch_sample_conserves_mass() {
        let g = GridSpec::new(2, 10).unwrap();
        let cloud = PointCloud::new(2, vec![0.05, 0.05, 0.051, 0.052, 0.053, 0.051, 0.052, 0.057])
            .unwrap();
        let h = sketch_sample(g, &cloud).unwrap();
        assert_eq!(h.k(), 4);
        assert_eq!(h.count(&[0, 0]), 4);
        assert_eq!(h.counts().iter().sum::<u64>(), 4);
    }

    #[test]
    fn single_point_yields_single_nonzero_cell() {
        let g = GridSpec::new(2, 10).unwrap();
        let cloud = PointCloud::new(2, vec![0.33, 0.77]).unwrap();
        let h = sketch_sample(g, &cloud).unwrap();
        assert_eq!(h.nonzero().len(), 1);
        assert_eq!(h.nonzero()[0], (vec![3, 7], 1));
    }

    #[test]
    fn uniform_counts_concentrate_binomially() {
        let n = 1000;
        let g = GridSpec::new(2, 4).unwrap();
        let p = ProductDensity::new(vec![Factor1D::uniform(); 2]).unwrap();
        let cloud = p.sample(&mut ChaCha8Rng::seed_from_u64(100), n).unwrap();
        let h = sketch_sample(g, &cloud).unwrap();
        let mean = n as f64 / 16.0;
        let sigma = (n as f64 * (1.0 / 16.0) * (15.0 / 16.0)).sqrt();
        for &c in h.counts() {
            assert!(
                (c as f64 - mean).abs() <= 4.0 * sigma,
                "count {c} outside 4σ of {mean}"
            );
        }
    }

    #[test]
    fn analytic_uniform_is_exactly_uniform() {
        for l in [2u32, 3, 4, 7] {
            let g = GridSpec::new(2, l).unwrap();
            let p = ProductDensity::new(vec![Factor1D::uniform(); 2]).unwrap();
            let per_cell = 37u64;
            let k = per_cell * g.num_cells() as u64;
            let h = sketch_analytic(g, &p, k).unwrap();
            assert!(h.counts().iter().all(|&c| c == per_cell), "L={l}: {:?}", h.counts());
        }
    }

    #[test]
    fn analytic_two_cell_split_matches_cdf() {
        let f = Factor1D::smooth_sine(0.5, 1).unwrap();
        let g = GridSpec::new(1, 2).unwrap();
        let p = ProductDensity::new(vec![f.clone()]).unwrap();
        let k = 1_000_000u64;
        let h = sketch_analytic(g, &p, k).unwrap();
        let left = f.cdf(0.5).unwrap();
        assert!((h.counts()[0] as f64 / k as f64 - left).abs() <= 1.0 / k as f64);
        assert!((h.counts()[1] as f64 / k as f64 - (1.0 - left)).abs() <= 1.0 / k as f64);
    }

    #[test]
    fn largest_remainder_stays_within_one_unit() {
        let p = ProductDensity::new(vec![
            Factor1D::holder_cusp(0.5, 0.3, 0.5).unwrap(),
            Factor1D::smooth_sine(0.4, 1).unwrap(),
        ])
        .unwrap();
        let g = GridSpec::new(2, 8).unwrap();
        let k = 100_000_000u64;
        let h = sketch_analytic(g, &p, k).unwrap();
        assert_eq!(h.k(), k);
        for r in 0..g.num_cells() {
            let idx = g.unrank(r);
            let mass: f64 = (0..2)
                .map(|axis| {
                    let f = p.factor(axis);
                    let a = idx[axis];
                    f.cdf((a + 1) as f64 / 8.0).unwrap() - f.cdf(a as f64 / 8.0).unwrap()
                })
                .product();
            let err = (h.counts()[r] as f64 / k as f64 - mass).abs();
            assert!(err <= 1.0000001 / k as f64, "cell {idx:?}: {err}");
        }
    }

    #[test]
    fn k_quant_below_cell_count_rejected() {
        let g = GridSpec::new(2, 4).unwrap();
        let p = ProductDensity::new(vec![Factor1D::uniform(); 2]).unwrap();
        assert!(sketch_analytic(g, &p, 15).is_err());
    }

    #[test]
    fn histogram_json_round_trip() {
        let g = GridSpec::new(2, 3).unwrap();
        let mut counts = vec![0u64; 9];
        counts[0] = 2;
        counts[4] = 1;
        counts[8] = 5;
        let h = GridHistogram::from_counts(g, counts).unwrap();
        let s = h.to_json();
        assert_eq!(
            s,
            r#"{"d":2,"L":3,"k":8,"counts":[[0,0,2],[1,1,1],[2,2,5]]}"#
        );
        let back = GridHistogram::from_json(&s).unwrap();
        assert_eq!(h, back);
    }

    #[test]
    fn histogram_json_rejects_bad_payloads() {
        assert!(GridHistogram::from_json(r#"{"d":1,"L":2,"k":1,"counts":[[2,1]]}"#).is_err());
        assert!(GridHistogram::from_json(r#"{"d":1,"L":2,"k":5,"counts":[[0,1]]}"#).is_err());
        assert!(
            GridHistogram::from_json(r#"{"d":1,"L":2,"k":2,"counts":[[0,1],[0,1]]}"#).is_err()
        );
    }
}
