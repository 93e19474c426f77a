//! The (d+1)-partite min-cost flow reduction for grid transport.
//!
//! Squared Euclidean cost between cell centers is separable: with centers
//! ((2a₁+1)/2L, …) and ((2b₁+1)/2L, …), ‖x−y‖² = (1/L²)·Σℓ (aℓ−bℓ)². The
//! layered graph rewrites one coordinate per layer: a layer-ℓ node carries the
//! mixed index (b₁..bℓ, a_{ℓ+1}..a_d) and its arcs into layer ℓ+1 replace
//! coordinate ℓ+1 at integer cost (a_{ℓ+1}−b_{ℓ+1})². Any source→sink path
//! therefore costs exactly L²·‖center(a)−center(b)‖², and path decompositions
//! of feasible flows are transportation plans of equal cost.
//!
//! Supplies/demands are the integer histogram counts (masses scaled by k) and
//! costs are scaled by L², so the instance is fully integral; the exact
//! optimum ŌPT recovers W₂² = ŌPT/(k·L²).

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::sketch::{GridHistogram, GridSpec};

/// One directed arc: layer ℓ → ℓ+1, rewriting a single coordinate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FlowArc {
    pub from: u32,
    pub to: u32,
    /// Scaled integer cost (aℓ−bℓ)², in [0, (L−1)²].
    pub cost: i64,
    /// Always k: tight enough to leave the feasible region unchanged.
    pub capacity: i64,
}

/// The layered integral min-cost flow instance built from two histograms.
#[derive(Debug, Clone)]
pub struct FlowNetwork {
    grid: GridSpec,
    k: u64,
    supply: Vec<i64>,
    arcs: Vec<FlowArc>,
}

impl FlowNetwork {
    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    /// Total transported mass (the scaled instance ships exactly k units).
    pub fn k(&self) -> u64 {
        self.k
    }

    pub fn num_nodes(&self) -> usize {
        (self.grid.d() + 1) * self.grid.num_cells()
    }

    pub fn num_arcs(&self) -> usize {
        self.arcs.len()
    }

    pub fn arcs(&self) -> &[FlowArc] {
        &self.arcs
    }

    /// Node imbalance: positive at layer-0 sources, negative at layer-d sinks.
    pub fn supply(&self) -> &[i64] {
        &self.supply
    }

    /// Which layer (0..=d) a node id belongs to.
    pub fn layer_of(&self, node: usize) -> usize {
        node / self.grid.num_cells()
    }

    /// The mixed multi-index (b₁..bℓ, a_{ℓ+1}..a_d) of a node.
    pub fn node_index(&self, node: usize) -> Vec<u32> {
        self.grid.unrank(node % self.grid.num_cells())
    }

    pub fn node_id(&self, layer: usize, idx: &[u32]) -> usize {
        layer * self.grid.num_cells() + self.grid.rank(idx)
    }

    /// DIMACS min-cost-flow text form (1-indexed nodes).
    pub fn to_dimacs(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "c grid transport instance d={} L={} k={}", self.grid.d(), self.grid.l(), self.k);
        let _ = writeln!(out, "p min {} {}", self.num_nodes(), self.num_arcs());
        for (node, &s) in self.supply.iter().enumerate() {
            if s != 0 {
                let _ = writeln!(out, "n {} {}", node + 1, s);
            }
        }
        for a in &self.arcs {
            let _ = writeln!(out, "a {} {} 0 {} {}", a.from + 1, a.to + 1, a.capacity, a.cost);
        }
        out
    }
}

/// Headroom guard: the worst-case objective k·d·(L−1)² must fit in a signed
/// 64-bit integer with at least one spare bit.
fn check_overflow_guard(grid: &GridSpec, k: u64) -> Result<()> {
    let worst = (k as i128)
        * (grid.d() as i128)
        * ((grid.l() as i128 - 1) * (grid.l() as i128 - 1));
    if worst > (i64::MAX / 2) as i128 {
        return Err(Error::Overflow(format!(
            "k·d·(L−1)² = {worst} exceeds the i64 headroom guard (k={k}, d={}, L={})",
            grid.d(),
            grid.l()
        )));
    }
    Ok(())
}

/// Builds the scaled (d+1)-partite instance from two histograms on one grid.
///
/// Node ids are `layer·L^d + lexicographic rank`; arcs are emitted by
/// ascending source id, then ascending rewritten coordinate, so instance
/// bytes are deterministic.
pub fn build_partite(hp: &GridHistogram, hq: &GridHistogram) -> Result<FlowNetwork> {
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
    let grid = *hp.grid();
    let k = hp.k();
    check_overflow_guard(&grid, k)?;

    let d = grid.d();
    let l = grid.l() as usize;
    let cells = grid.num_cells();
    let num_nodes = (d + 1) * cells;
    let num_arcs = d * cells * l;

    let mut supply = vec![0i64; num_nodes];
    for (r, &c) in hp.counts().iter().enumerate() {
        supply[r] = c as i64;
    }
    for (r, &c) in hq.counts().iter().enumerate() {
        supply[d * cells + r] -= c as i64;
    }

    // stride of coordinate `layer` in the rank: L^(d−1−layer)
    let mut arcs = Vec::with_capacity(num_arcs);
    for layer in 0..d {
        let stride = l.pow((d - 1 - layer) as u32);
        for rank in 0..cells {
            let from = (layer * cells + rank) as u32;
            let a_coord = (rank / stride) % l;
            let base = rank - a_coord * stride;
            for b_coord in 0..l {
                let to_rank = base + b_coord * stride;
                let to = ((layer + 1) * cells + to_rank) as u32;
                let diff = a_coord as i64 - b_coord as i64;
                arcs.push(FlowArc { from, to, cost: diff * diff, capacity: k as i64 });
            }
        }
    }
    debug_assert_eq!(arcs.len(), num_arcs);

    Ok(FlowNetwork { grid, k, supply, arcs })
}

/// Walks the canonical layered path from layer-0 cell `a` to layer-d cell `b`
/// (rewriting coordinate ℓ when crossing into layer ℓ+1) and sums the arc
/// costs found in the built network. Equals L²·‖center(a)−center(b)‖², i.e.
/// Σℓ(aℓ−bℓ)², exactly in integer arithmetic.
pub fn path_cost_identity_check(net: &FlowNetwork, a: &[u32], b: &[u32]) -> Result<i64> {
    let grid = net.grid();
    let d = grid.d();
    let l = grid.l() as usize;
    if a.len() != d || b.len() != d {
        return Err(Error::Mismatch("index dimensions differ from the grid".into()));
    }
    if a.iter().chain(b).any(|&c| c as usize >= l) {
        return Err(Error::Domain("cell index out of bounds".into()));
    }
    let cells = grid.num_cells();
    let mut mixed: Vec<u32> = a.to_vec();
    let mut total = 0i64;
    for layer in 0..d {
        let from_rank = grid.rank(&mixed);
        // Arc layout: layer block of cells·L arcs, L per node in rank order.
        let arc_id = layer * cells * l + from_rank * l + b[layer] as usize;
        let arc = net.arcs()[arc_id];
        mixed[layer] = b[layer];
        let expect_from = (layer * cells + from_rank) as u32;
        let expect_to = ((layer + 1) * cells + grid.rank(&mixed)) as u32;
        if arc.from != expect_from || arc.to != expect_to {
            return Err(Error::Internal(format!(
                "arc {arc_id} connects {}→{} instead of {expect_from}→{expect_to}",
                arc.from, arc.to
            )));
        }
        total += arc.cost;
    }
    Ok(total)
}

/// Recovers W₂² from the integer optimum: ŌPT / (k·L²).
pub fn descale(opt_int: i64, k: u64, l: u32) -> Result<f64> {
    if k == 0 || l == 0 {
        return Err(Error::InvalidParameter("descale needs k >= 1 and L >= 1".into()));
    }
    if opt_int < 0 {
        return Err(Error::InvalidParameter("negative optimal cost".into()));
    }
    let denom = k as i128 * (l as i128) * (l as i128);
    Ok(opt_int as f64 / denom as f64)
}
