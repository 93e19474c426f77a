//! Independent reference implementations of optimal transport on small
//! instances, used to certify the flow pipeline without validating it against
//! itself.
//!
//! Two algorithmically unrelated oracles are provided: exhaustive assignment
//! enumeration for unit masses, and a northwest-corner transportation tableau
//! that repeatedly cancels the most negative basis cycle. Grid-aligned
//! variants work in exact integer arithmetic: squared center distances are
//! integers after scaling by L², so certified equalities are integer
//! equalities, never float comparisons.

use crate::error::{Error, Result};
use crate::sketch::GridHistogram;

/// Weighted atoms in (0,1)^d with positive integer masses (denominator = Σ masses).
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteMeasure {
    d: usize,
    points: Vec<Vec<f64>>,
    masses: Vec<u64>,
}

impl DiscreteMeasure {
    pub fn new(points: Vec<Vec<f64>>, masses: Vec<u64>) -> Result<Self> {
        if points.is_empty() || points.len() != masses.len() {
            return Err(Error::InvalidParameter(
                "measure needs matching nonempty point and mass lists".into(),
            ));
        }
        let d = points[0].len();
        for p in &points {
            if p.len() != d {
                return Err(Error::Mismatch("inconsistent point dimensions".into()));
            }
        }
        if masses.iter().any(|&m| m == 0) {
            return Err(Error::InvalidParameter("masses must be positive".into()));
        }
        for i in 0..points.len() {
            for j in (i + 1)..points.len() {
                if points[i] == points[j] {
                    return Err(Error::InvalidParameter(format!(
                        "duplicate support point {:?}",
                        points[i]
                    )));
                }
            }
        }
        Ok(DiscreteMeasure { d, points, masses })
    }

    /// Unit-mass atoms.
    pub fn unit(points: Vec<Vec<f64>>) -> Result<Self> {
        let n = points.len();
        Self::new(points, vec![1; n])
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn total_mass(&self) -> u64 {
        self.masses.iter().sum()
    }

    pub fn points(&self) -> &[Vec<f64>] {
        &self.points
    }

    pub fn masses(&self) -> &[u64] {
        &self.masses
    }
}

fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// The folklore 1D estimator: sort both samples, average squared differences
/// of order statistics.
pub fn ot_1d_sorted(p_pts: &[f64], q_pts: &[f64]) -> Result<f64> {
    if p_pts.len() != q_pts.len() {
        return Err(Error::Mismatch(format!(
            "sample sizes differ: {} vs {}",
            p_pts.len(),
            q_pts.len()
        )));
    }
    if p_pts.is_empty() {
        return Err(Error::InvalidParameter("empty samples".into()));
    }
    let mut p = p_pts.to_vec();
    let mut q = q_pts.to_vec();
    p.sort_by(|a, b| a.partial_cmp(b).unwrap());
    q.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = p.len() as f64;
    Ok(p.iter().zip(&q).map(|(a, b)| (a - b) * (a - b)).sum::<f64>() / n)
}

/// Exhaustive assignment oracle for uniform unit-mass measures with n ≤ 8
/// atoms: minimum over all n! pairings of the mean squared displacement.
pub fn ot_enumerate(p: &DiscreteMeasure, q: &DiscreteMeasure) -> Result<f64> {
    check_pair(p, q)?;
    let n = p.len();
    if n != q.len() || p.masses.iter().any(|&m| m != 1) || q.masses.iter().any(|&m| m != 1) {
        return Err(Error::InvalidParameter(
            "ot_enumerate needs equal-size unit-mass measures".into(),
        ));
    }
    if n > 8 {
        return Err(Error::SizeLimit(format!("ot_enumerate supports n <= 8, got {n}")));
    }
    let cost: Vec<Vec<f64>> = p
        .points
        .iter()
        .map(|a| q.points.iter().map(|b| sq_dist(a, b)).collect())
        .collect();
    let best = min_assignment(&cost, f64::INFINITY);
    Ok(best / n as f64)
}

fn min_assignment<C: TableauCost>(cost: &[Vec<C>], inf: C) -> C {
    let n = cost.len();
    let mut used = vec![false; n];
    let mut best = inf;
    let partial = C::ZERO;
    fn rec<C: TableauCost>(
        row: usize,
        n: usize,
        cost: &[Vec<C>],
        used: &mut [bool],
        partial: C,
        best: &mut C,
    ) {
        if row == n {
            if partial < *best {
                *best = partial;
            }
            return;
        }
        for j in 0..n {
            if !used[j] {
                let next = partial + cost[row][j];
                if next < *best {
                    used[j] = true;
                    rec(row + 1, n, cost, used, next, best);
                    used[j] = false;
                }
            }
        }
    }
    rec(0, n, cost, &mut used, partial, &mut best);
    best
}

/// Exact transportation cost by tableau cycle canceling.
///
/// Starts from the northwest-corner basic feasible plan and repeatedly pivots
/// on the non-basic cell with the most negative reduced cost (the unique
/// basis cycle through it is canceled). Masses stay integral throughout, so
/// with rational costs the optimum is exact. Falls back to Bland's rule after
/// a long degenerate streak.
pub fn ot_cycle_cancel(p: &DiscreteMeasure, q: &DiscreteMeasure) -> Result<f64> {
    check_pair(p, q)?;
    if p.len() + q.len() > 40 {
        return Err(Error::SizeLimit(format!(
            "ot_cycle_cancel supports combined sizes <= 40, got {}",
            p.len() + q.len()
        )));
    }
    let k = p.total_mass();
    if k != q.total_mass() {
        return Err(Error::Mismatch(format!(
            "total masses differ: {k} vs {}",
            q.total_mass()
        )));
    }
    let supply: Vec<i64> = p.masses.iter().map(|&m| m as i64).collect();
    let demand: Vec<i64> = q.masses.iter().map(|&m| m as i64).collect();
    let cost: Vec<Vec<f64>> = p
        .points
        .iter()
        .map(|a| q.points.iter().map(|b| sq_dist(a, b)).collect())
        .collect();
    let total = transportation_min_cost(&supply, &demand, &cost)?;
    Ok(total / k as f64)
}

/// Integer tableau oracle for two histograms on the same grid.
///
/// Returns the scaled optimum N with W₂² = N / (k·L²); N is exact, so pipeline
/// certification is an integer comparison.
pub fn ot_cycle_cancel_grid(hp: &GridHistogram, hq: &GridHistogram) -> Result<i128> {
    let (pa, qa) = grid_atoms(hp, hq)?;
    if pa.len() + qa.len() > 40 {
        return Err(Error::SizeLimit(format!(
            "grid tableau oracle supports combined supports <= 40, got {}",
            pa.len() + qa.len()
        )));
    }
    let supply: Vec<i64> = pa.iter().map(|&(_, c)| c as i64).collect();
    let demand: Vec<i64> = qa.iter().map(|&(_, c)| c as i64).collect();
    let cost: Vec<Vec<i128>> = pa
        .iter()
        .map(|(a, _)| qa.iter().map(|(b, _)| grid_sq_dist(a, b)).collect())
        .collect();
    transportation_min_cost(&supply, &demand, &cost)
}

/// Integer enumeration oracle for two histograms with total mass k ≤ 8.
///
/// Counts are unit-expanded into individual atoms and all pairings are tried.
/// Returns the scaled optimum N with W₂² = N / (k·L²).
pub fn ot_enumerate_grid(hp: &GridHistogram, hq: &GridHistogram) -> Result<i128> {
    let (pa, qa) = grid_atoms(hp, hq)?;
    if hp.k() > 8 {
        return Err(Error::SizeLimit(format!(
            "grid enumeration supports k <= 8, got {}",
            hp.k()
        )));
    }
    let expand = |atoms: &[(Vec<u32>, u64)]| -> Vec<Vec<u32>> {
        let mut units = Vec::new();
        for (idx, c) in atoms {
            for _ in 0..*c {
                units.push(idx.clone());
            }
        }
        units
    };
    let pu = expand(&pa);
    let qu = expand(&qa);
    let cost: Vec<Vec<i128>> = pu
        .iter()
        .map(|a| qu.iter().map(|b| grid_sq_dist(a, b)).collect())
        .collect();
    Ok(min_assignment(&cost, i128::MAX))
}

fn grid_atoms(
    hp: &GridHistogram,
    hq: &GridHistogram,
) -> Result<(Vec<(Vec<u32>, u64)>, Vec<(Vec<u32>, u64)>)> {
    if hp.grid() != hq.grid() {
        return Err(Error::Mismatch("histograms live on different grids".into()));
    }
    if hp.k() != hq.k() {
        return Err(Error::Mismatch(format!(
            "histogram totals differ: {} vs {}",
            hp.k(),
            hq.k()
        )));
    }
    Ok((hp.nonzero(), hq.nonzero()))
}

/// Integer squared index distance Σ(aℓ−bℓ)²; equals L²·‖center(a)−center(b)‖².
fn grid_sq_dist(a: &[u32], b: &[u32]) -> i128 {
    a.iter()
        .zip(b)
        .map(|(&x, &y)| {
            let d = x as i128 - y as i128;
            d * d
        })
        .sum()
}

/// Cost arithmetic shared by the integer and float tableau paths.
pub(crate) trait TableauCost:
    Copy + PartialOrd + std::ops::Add<Output = Self> + std::ops::Sub<Output = Self>
{
    const ZERO: Self;
    fn mul_mass(self, mass: i64) -> Self;
    /// Strictly improving reduced cost (below −eps for floats, below 0 exactly
    /// for integers).
    fn is_improving(self) -> bool;
}

impl TableauCost for i128 {
    const ZERO: Self = 0;
    fn mul_mass(self, mass: i64) -> Self {
        self * mass as i128
    }
    fn is_improving(self) -> bool {
        self < 0
    }
}

impl TableauCost for f64 {
    const ZERO: Self = 0.0;
    fn mul_mass(self, mass: i64) -> Self {
        self * mass as f64
    }
    fn is_improving(self) -> bool {
        self < -1e-12
    }
}

/// Minimum transportation cost between integer supplies and demands under the
/// given cost table. Returns Σ flowᵢⱼ·cᵢⱼ at the optimum.
pub(crate) fn transportation_min_cost<C: TableauCost>(
    supply: &[i64],
    demand: &[i64],
    cost: &[Vec<C>],
) -> Result<C> {
    let m = supply.len();
    let n = demand.len();
    if m == 0 || n == 0 {
        return Err(Error::InvalidParameter("empty transportation instance".into()));
    }
    let total: i64 = supply.iter().sum();
    if total != demand.iter().sum::<i64>() {
        return Err(Error::Mismatch("supply and demand totals differ".into()));
    }

    // Northwest-corner initial basis: exactly m+n−1 cells, zero flows allowed.
    let mut flow = vec![vec![0i64; n]; m];
    let mut basis = vec![vec![false; n]; m];
    {
        let mut rem_a = supply.to_vec();
        let mut rem_b = demand.to_vec();
        let (mut i, mut j) = (0usize, 0usize);
        loop {
            let t = rem_a[i].min(rem_b[j]);
            flow[i][j] = t;
            basis[i][j] = true;
            rem_a[i] -= t;
            rem_b[j] -= t;
            if i == m - 1 && j == n - 1 {
                break;
            }
            if rem_a[i] == 0 && i < m - 1 {
                i += 1;
            } else {
                j += 1;
            }
        }
    }

    let max_iters = 10_000 * (m * n + 1);
    let mut degenerate_streak = 0usize;
    let mut bland = false;
    for _ in 0..max_iters {
        // Dual potentials from the basis tree: u[i] + v[j] = c[i][j].
        let (u, v) = tableau_potentials(m, n, &basis, cost)?;

        // Entering cell: most negative reduced cost (Bland: first negative).
        let mut entering: Option<(usize, usize, C)> = None;
        'scan: for i in 0..m {
            for j in 0..n {
                if basis[i][j] {
                    continue;
                }
                let r = cost[i][j] - u[i] - v[j];
                if r.is_improving() {
                    match entering {
                        Some((_, _, best)) if !(r < best) => {}
                        _ => entering = Some((i, j, r)),
                    }
                    if bland {
                        break 'scan;
                    }
                }
            }
        }
        let Some((ei, ej, _)) = entering else {
            let mut total_cost = C::ZERO;
            for i in 0..m {
                for j in 0..n {
                    if flow[i][j] > 0 {
                        total_cost = total_cost + cost[i][j].mul_mass(flow[i][j]);
                    }
                }
            }
            return Ok(total_cost);
        };

        // The unique basis cycle through (ei,ej): path from row ei to col ej.
        let cells = basis_cycle(m, n, &basis, ei, ej)?;
        // cells[0] = (ei,ej) gets +θ, then alternate −,+,−,…
        let mut theta = i64::MAX;
        let mut leaving: Option<(usize, usize)> = None;
        for (pos, &(i, j)) in cells.iter().enumerate() {
            if pos % 2 == 0 {
                continue;
            }
            let better = flow[i][j] < theta
                || (flow[i][j] == theta && leaving.map_or(true, |l| (i, j) < l));
            if better {
                theta = flow[i][j];
                leaving = Some((i, j));
            }
        }
        let (li, lj) = leaving
            .ok_or_else(|| Error::Internal("cycle without decreasing positions".into()))?;
        for (pos, &(i, j)) in cells.iter().enumerate() {
            if pos % 2 == 0 {
                flow[i][j] += theta;
            } else {
                flow[i][j] -= theta;
            }
        }
        basis[ei][ej] = true;
        basis[li][lj] = false;

        if theta == 0 {
            degenerate_streak += 1;
            if degenerate_streak > 2 * (m + n) * (m + n) {
                bland = true;
            }
        } else {
            degenerate_streak = 0;
        }
    }
    Err(Error::Internal("transportation tableau did not terminate".into()))
}

fn tableau_potentials<C: TableauCost>(
    m: usize,
    n: usize,
    basis: &[Vec<bool>],
    cost: &[Vec<C>],
) -> Result<(Vec<C>, Vec<C>)> {
    let mut u = vec![None; m];
    let mut v = vec![None; n];
    u[0] = Some(C::ZERO);
    // Nodes 0..m are rows, m..m+n are cols.
    let mut stack = vec![0usize];
    while let Some(node) = stack.pop() {
        if node < m {
            let ui = u[node].unwrap();
            for j in 0..n {
                if basis[node][j] && v[j].is_none() {
                    v[j] = Some(cost[node][j] - ui);
                    stack.push(m + j);
                }
            }
        } else {
            let j = node - m;
            let vj = v[j].unwrap();
            for i in 0..m {
                if basis[i][j] && u[i].is_none() {
                    u[i] = Some(cost[i][j] - vj);
                    stack.push(i);
                }
            }
        }
    }
    let u: Option<Vec<C>> = u.into_iter().collect();
    let v: Option<Vec<C>> = v.into_iter().collect();
    match (u, v) {
        (Some(u), Some(v)) => Ok((u, v)),
        _ => Err(Error::Internal("basis graph is not spanning".into())),
    }
}

/// Cells of the unique cycle created by adding (ei,ej) to the basis tree,
/// starting with (ei,ej) itself and alternating directions around the cycle.
fn basis_cycle(
    m: usize,
    n: usize,
    basis: &[Vec<bool>],
    ei: usize,
    ej: usize,
) -> Result<Vec<(usize, usize)>> {
    // BFS from row ei to col ej over basic cells.
    let nodes = m + n;
    let mut parent = vec![usize::MAX; nodes];
    let mut seen = vec![false; nodes];
    let mut queue = std::collections::VecDeque::new();
    seen[ei] = true;
    queue.push_back(ei);
    while let Some(node) = queue.pop_front() {
        if node == m + ej {
            break;
        }
        if node < m {
            for j in 0..n {
                if basis[node][j] && !seen[m + j] {
                    seen[m + j] = true;
                    parent[m + j] = node;
                    queue.push_back(m + j);
                }
            }
        } else {
            let j = node - m;
            for i in 0..m {
                if basis[i][j] && !seen[i] {
                    seen[i] = true;
                    parent[i] = node;
                    queue.push_back(i);
                }
            }
        }
    }
    if !seen[m + ej] {
        return Err(Error::Internal("basis tree does not connect entering cell".into()));
    }
    let mut cells = vec![(ei, ej)];
    let mut node = m + ej;
    while node != ei {
        let par = parent[node];
        let (i, j) = if node < m { (node, par - m) } else { (par, node - m) };
        cells.push((i, j));
        node = par;
    }
    Ok(cells)
}

fn check_pair(p: &DiscreteMeasure, q: &DiscreteMeasure) -> Result<()> {
    if p.d() != q.d() {
        return Err(Error::Mismatch(format!(
            "dimension mismatch: {} vs {}",
            p.d(),
            q.d()
        )));
    }
    Ok(())
}
