//! Exact integral min-cost flow on the layered grid instances.
//!
//! Successive shortest augmenting paths with node potentials: initial
//! potentials come from one relaxation sweep over the layered DAG (node ids
//! are already topologically ordered), each round runs Dijkstra on
//! nonnegative reduced costs from a super source, and the bottleneck residual
//! amount is pushed. All arithmetic is on 64-bit integers; there is no
//! floating point anywhere in the solver, so exactness claims are integer
//! claims. The returned potentials certify optimality: every arc with
//! positive residual capacity has nonnegative reduced cost.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};
use crate::flowgraph::FlowNetwork;

const INF: i64 = i64::MAX / 4;
const UNSET: u32 = u32::MAX;

/// An optimal integral flow with its complementary-slackness certificate.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FlowSolution {
    /// Flow per arc, parallel to `FlowNetwork::arcs`.
    pub flow: Vec<i64>,
    /// Node potentials under which every residual arc has reduced cost ≥ 0
    /// (reduced cost of arc (u,v) is cost + π(u) − π(v)).
    pub potentials: Vec<i64>,
    /// Exact minimum of the scaled integer objective (ŌPT).
    pub opt_cost: i64,
}

struct Residual {
    n: usize,
    // paired edges: e ^ 1 is the reverse of e
    to: Vec<u32>,
    res: Vec<i64>,
    cost: Vec<i64>,
    adj_off: Vec<u32>,
    adj: Vec<u32>,
}

impl Residual {
    fn build(net: &FlowNetwork) -> (Self, usize, usize, i64) {
        let n_orig = net.num_nodes();
        let src = n_orig;
        let sink = n_orig + 1;
        let n = n_orig + 2;

        let mut froms: Vec<u32> = Vec::new();
        let mut to = Vec::new();
        let mut res = Vec::new();
        let mut cost = Vec::new();
        let mut push_edge = |u: u32, v: u32, cap: i64, c: i64| {
            froms.push(u);
            to.push(v);
            res.push(cap);
            cost.push(c);
        };

        // Original arcs first so flow extraction is res[2i+1].
        for a in net.arcs() {
            push_edge(a.from, a.to, a.capacity, a.cost);
            push_edge(a.to, a.from, 0, -a.cost);
        }
        let mut total_supply = 0i64;
        for (node, &s) in net.supply().iter().enumerate() {
            if s > 0 {
                total_supply += s;
                push_edge(src as u32, node as u32, s, 0);
                push_edge(node as u32, src as u32, 0, 0);
            } else if s < 0 {
                push_edge(node as u32, sink as u32, -s, 0);
                push_edge(sink as u32, node as u32, 0, 0);
            }
        }

        let m = to.len();
        let mut deg = vec![0u32; n + 1];
        for &f in &froms {
            deg[f as usize + 1] += 1;
        }
        for i in 0..n {
            deg[i + 1] += deg[i];
        }
        let adj_off = deg.clone();
        let mut fill = deg;
        let mut adj = vec![0u32; m];
        for (e, &f) in froms.iter().enumerate() {
            adj[fill[f as usize] as usize] = e as u32;
            fill[f as usize] += 1;
        }

        (Residual { n, to, res, cost, adj_off, adj }, src, sink, total_supply)
    }

    fn edges_of(&self, node: usize) -> &[u32] {
        &self.adj[self.adj_off[node] as usize..self.adj_off[node + 1] as usize]
    }
}

/// Initial potentials by one topological relaxation sweep of the layered DAG.
///
/// Node ids ascend with the layer, so a single pass settles exact shortest
/// distances from the supply set. Nodes no source can reach get the largest
/// finite distance, which keeps all reduced costs nonnegative.
fn dag_potentials(net: &FlowNetwork, src: usize, sink: usize) -> Vec<i64> {
    let n = net.num_nodes();
    let mut dist = vec![INF; n + 2];
    dist[src] = 0;
    for (node, &s) in net.supply().iter().enumerate() {
        if s > 0 {
            dist[node] = 0;
        }
    }
    for a in net.arcs() {
        let du = dist[a.from as usize];
        if du < INF {
            let cand = du + a.cost;
            if cand < dist[a.to as usize] {
                dist[a.to as usize] = cand;
            }
        }
    }
    for (node, &s) in net.supply().iter().enumerate() {
        if s < 0 && dist[node] < dist[sink] {
            dist[sink] = dist[node];
        }
    }
    let max_finite = dist.iter().copied().filter(|&d| d < INF).max().unwrap_or(0);
    for d in &mut dist {
        if *d >= INF {
            *d = max_finite;
        }
    }
    dist
}

pub fn solve_mcf(net: &FlowNetwork) -> Result<FlowSolution> {
    solve_internal(net, None)
}

/// Like [`solve_mcf`], writing one line per augmentation to `trace`.
pub fn solve_mcf_traced(net: &FlowNetwork, trace: &mut dyn std::io::Write) -> Result<FlowSolution> {
    solve_internal(net, Some(trace))
}

fn solve_internal(
    net: &FlowNetwork,
    mut trace: Option<&mut dyn std::io::Write>,
) -> Result<FlowSolution> {
    let (mut g, src, sink, total_supply) = Residual::build(net);
    if total_supply != -net.supply().iter().filter(|&&s| s < 0).sum::<i64>() {
        return Err(Error::Internal("unbalanced supplies in flow instance".into()));
    }
    let n = g.n;
    let mut pi = dag_potentials(net, src, sink);
    let mut dist = vec![INF; n];
    let mut parent = vec![UNSET; n];
    let mut heap: BinaryHeap<Reverse<(i64, u32)>> = BinaryHeap::new();

    let mut remaining = total_supply;
    let mut iter = 0u64;
    while remaining > 0 {
        // Dijkstra on reduced costs; ties pop the lowest node id first.
        dist.fill(INF);
        parent.fill(UNSET);
        dist[src] = 0;
        heap.clear();
        heap.push(Reverse((0, src as u32)));
        while let Some(Reverse((du, u))) = heap.pop() {
            let u = u as usize;
            if du > dist[u] {
                continue;
            }
            if u == sink {
                break;
            }
            for &e in g.edges_of(u) {
                let e = e as usize;
                if g.res[e] <= 0 {
                    continue;
                }
                let v = g.to[e] as usize;
                let nd = du + g.cost[e] + pi[u] - pi[v];
                if nd < dist[v] {
                    dist[v] = nd;
                    parent[v] = e as u32;
                    heap.push(Reverse((nd, v as u32)));
                }
            }
        }
        if dist[sink] >= INF {
            return Err(Error::Internal(
                "no augmenting path though supply remains; instance construction bug".into(),
            ));
        }

        let d_sink = dist[sink];
        for v in 0..n {
            pi[v] += dist[v].min(d_sink);
        }

        let mut bottleneck = remaining;
        let mut v = sink;
        while v != src {
            let e = parent[v] as usize;
            bottleneck = bottleneck.min(g.res[e]);
            v = g.to[e ^ 1] as usize;
        }
        let mut v = sink;
        while v != src {
            let e = parent[v] as usize;
            g.res[e] -= bottleneck;
            g.res[e ^ 1] += bottleneck;
            v = g.to[e ^ 1] as usize;
        }
        remaining -= bottleneck;
        iter += 1;
        if let Some(w) = trace.as_deref_mut() {
            let _ = writeln!(
                w,
                "iter={iter} pushed={bottleneck} path_reduced_cost={d_sink} remaining={remaining}"
            );
        }
    }

    let mut flow = Vec::with_capacity(net.num_arcs());
    let mut opt: i128 = 0;
    for (i, a) in net.arcs().iter().enumerate() {
        let f = g.res[2 * i + 1];
        flow.push(f);
        opt += f as i128 * a.cost as i128;
    }
    let opt_cost = i64::try_from(opt)
        .map_err(|_| Error::Overflow("objective exceeded i64 despite guard".into()))?;
    let potentials = pi[..net.num_nodes()].to_vec();
    Ok(FlowSolution { flow, potentials, opt_cost })
}

/// Complementary-slackness audit: conservation, capacities, nonnegative
/// reduced costs on all residual arcs, and the recorded objective.
pub fn verify_optimality(net: &FlowNetwork, sol: &FlowSolution) -> bool {
    optimality_violations(net, sol).is_empty()
}

/// Diagnostic version of [`verify_optimality`]; empty means certified.
pub fn optimality_violations(net: &FlowNetwork, sol: &FlowSolution) -> Vec<String> {
    let mut bad = Vec::new();
    if sol.flow.len() != net.num_arcs() || sol.potentials.len() != net.num_nodes() {
        bad.push(format!(
            "shape mismatch: {} flows for {} arcs, {} potentials for {} nodes",
            sol.flow.len(),
            net.num_arcs(),
            sol.potentials.len(),
            net.num_nodes()
        ));
        return bad;
    }
    let mut net_out = vec![0i128; net.num_nodes()];
    let mut objective: i128 = 0;
    for (i, (a, &f)) in net.arcs().iter().zip(&sol.flow).enumerate() {
        if f < 0 || f > a.capacity {
            bad.push(format!("arc {i}: flow {f} outside [0, {}]", a.capacity));
        }
        net_out[a.from as usize] += f as i128;
        net_out[a.to as usize] -= f as i128;
        objective += f as i128 * a.cost as i128;
        let reduced =
            a.cost as i128 + sol.potentials[a.from as usize] as i128 - sol.potentials[a.to as usize] as i128;
        if f < a.capacity && reduced < 0 {
            bad.push(format!("arc {i}: residual forward arc has reduced cost {reduced}"));
        }
        if f > 0 && -reduced < 0 {
            bad.push(format!("arc {i}: residual backward arc has reduced cost {}", -reduced));
        }
    }
    for (node, &s) in net.supply().iter().enumerate() {
        if net_out[node] != s as i128 {
            bad.push(format!(
                "node {node}: net outflow {} differs from supply {s}",
                net_out[node]
            ));
        }
    }
    if objective != sol.opt_cost as i128 {
        bad.push(format!(
            "recorded objective {} differs from recomputed {objective}",
            sol.opt_cost
        ));
    }
    bad
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::flowgraph::{build_partite, descale};
    use crate::oracle::{ot_cycle_cancel_grid, ot_enumerate_grid};
    use crate::sketch::{GridHistogram, GridSpec};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn hist(grid: GridSpec, entries: &[(usize, u64)]) -> GridHistogram {
        let mut counts = vec![0u64; grid.num_cells()];
        for &(r, c) in entries {
            counts[r] += c;
        }
        GridHistogram::from_counts(grid, counts).unwrap()
    }

    #[test]
    fn identical_histograms_cost_zero() {
        let grid = GridSpec::new(2, 3).unwrap();
        let h = hist(grid, &[(0, 2), (4, 3), (8, 1)]);
        let net = build_partite(&h, &h).unwrap();
        let sol = solve_mcf(&net).unwrap();
        assert_eq!(sol.opt_cost, 0);
        assert!(verify_optimality(&net, &sol));
    }

    #[test]
    fn two_cell_unit_move() {
        let grid = GridSpec::new(1, 2).unwrap();
        let hp = hist(grid, &[(0, 1)]);
        let hq = hist(grid, &[(1, 1)]);
        let net = build_partite(&hp, &hq).unwrap();
        let sol = solve_mcf(&net).unwrap();
        assert_eq!(sol.opt_cost, 1);
        assert_eq!(descale(sol.opt_cost, 1, 2).unwrap(), 0.25);
        assert!(verify_optimality(&net, &sol));
    }

    #[test]
    fn matches_both_oracles_on_random_instances() {
        let mut rng = ChaCha8Rng::seed_from_u64(31337);
        for trial in 0..200 {
            let d = rng.gen_range(1..=3usize);
            let l = rng.gen_range(2..=4u32);
            let grid = GridSpec::new(d, l).unwrap();
            let k = rng.gen_range(1..=12u64);
            let random_hist = |rng: &mut ChaCha8Rng| {
                let mut counts = vec![0u64; grid.num_cells()];
                for _ in 0..k {
                    let c = rng.gen_range(0..grid.num_cells());
                    counts[c] += 1;
                }
                GridHistogram::from_counts(grid, counts).unwrap()
            };
            let hp = random_hist(&mut rng);
            let hq = random_hist(&mut rng);
            let net = build_partite(&hp, &hq).unwrap();
            let sol = solve_mcf(&net).unwrap();
            assert!(verify_optimality(&net, &sol), "trial {trial}");
            let oracle = ot_cycle_cancel_grid(&hp, &hq).unwrap();
            assert_eq!(sol.opt_cost as i128, oracle, "trial {trial}: d={d} L={l} k={k}");
            if k <= 8 {
                assert_eq!(sol.opt_cost as i128, ot_enumerate_grid(&hp, &hq).unwrap());
            }
        }
    }

    #[test]
    fn solver_is_deterministic() {
        let grid = GridSpec::new(2, 4).unwrap();
        let hp = hist(grid, &[(0, 3), (5, 2), (10, 5)]);
        let hq = hist(grid, &[(3, 4), (7, 6)]);
        let net = build_partite(&hp, &hq).unwrap();
        let a = solve_mcf(&net).unwrap();
        let b = solve_mcf(&net).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn tampered_solution_fails_verification() {
        let grid = GridSpec::new(1, 3).unwrap();
        let hp = hist(grid, &[(0, 2)]);
        let hq = hist(grid, &[(2, 2)]);
        let net = build_partite(&hp, &hq).unwrap();
        let sol = solve_mcf(&net).unwrap();
        assert!(verify_optimality(&net, &sol));

        // Break conservation on one arc.
        let mut broken = sol.clone();
        let idx = broken.flow.iter().position(|&f| f > 0).unwrap();
        broken.flow[idx] -= 1;
        assert!(!verify_optimality(&net, &broken));
        assert!(!optimality_violations(&net, &broken).is_empty());

        // Shift one unit to a sibling arc with a different head: source
        // outflow is preserved but both heads now violate conservation.
        let mut rerouted = sol.clone();
        rerouted.flow[idx] -= 1;
        let from = net.arcs()[idx].from;
        let sibling = net
            .arcs()
            .iter()
            .position(|a| a.from == from && a.to != net.arcs()[idx].to)
            .unwrap();
        rerouted.flow[sibling] += 1;
        assert!(!verify_optimality(&net, &rerouted));
    }

    #[test]
    fn trace_emits_lines() {
        let grid = GridSpec::new(1, 2).unwrap();
        let hp = hist(grid, &[(0, 3)]);
        let hq = hist(grid, &[(1, 3)]);
        let net = build_partite(&hp, &hq).unwrap();
        let mut buf = Vec::new();
        let sol = solve_mcf_traced(&net, &mut buf).unwrap();
        assert_eq!(sol.opt_cost, 3);
        let text = String::from_utf8(buf).unwrap();
        assert!(text.contains("iter=1"));
    }
}
