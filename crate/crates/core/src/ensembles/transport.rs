//! Transportation simplex for small dense optimal-transport problems.
//!
//! Basic feasible solutions are spanning trees of the bipartite supply/demand
//! graph with `m + n - 1` cells. Each pivot prices the non-basic cells with the
//! potentials `u_i + v_j = c_ij`, brings in the most negative reduced cost and
//! pushes flow around the unique cycle it closes in the tree. After a run of
//! degenerate pivots the entering rule switches to the lowest-index negative cell
//! (Bland), which rules out cycling.

use alloc::collections::VecDeque;
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};

const DEGENERATE_RUN: usize = 50;
const PRICE_TOLERANCE: f64 = 1e-12;

/// Optimal plan of a transportation problem.
#[derive(Debug, Clone, PartialEq)]
pub struct TransportPlan {
    pub cost: f64,
    /// Basic cells `(i, j, flow)`.
    pub flows: Vec<(usize, usize, f64)>,
    pub pivots: usize,
}

/// Minimizes `Σ c_ij x_ij` subject to row sums `supply` and column sums `demand`.
///
/// `cost` is row-major `m × n`. Supplies and demands must be nonnegative with
/// equal totals (to `1e-9`); the residual is absorbed into the last demand.
pub fn solve_transport(supply: &[f64], demand: &[f64], cost: &[f64]) -> Result<TransportPlan> {
    let (m, n) = (supply.len(), demand.len());
    if m == 0 || n == 0 || cost.len() != m * n {
        return Err(Error::Infeasible("empty or misshapen transport problem".into()));
    }
    if supply.iter().chain(demand).any(|&x| !(x >= 0.0)) {
        return Err(Error::Infeasible("negative marginal".into()));
    }
    let (sa, sb): (f64, f64) = (supply.iter().sum(), demand.iter().sum());
    if (sa - sb).abs() > 1e-9 {
        return Err(Error::Infeasible(format!("marginal totals differ: {sa} vs {sb}")));
    }
    let mut b = demand.to_vec();
    b[n - 1] = (b[n - 1] + sa - sb).max(0.0);
    let c = |i: usize, j: usize| cost[i * n + j];

    // northwest corner start
    let mut a_rem = supply.to_vec();
    let mut basis: Vec<(usize, usize, f64)> = Vec::with_capacity(m + n - 1);
    let (mut i, mut j) = (0, 0);
    loop {
        let q = a_rem[i].min(b[j]);
        basis.push((i, j, q));
        a_rem[i] -= q;
        b[j] -= q;
        if i == m - 1 && j == n - 1 {
            break;
        }
        if j == n - 1 || (i < m - 1 && a_rem[i] <= b[j]) {
            a_rem[i] = 0.0;
            i += 1;
        } else {
            b[j] = 0.0;
            j += 1;
        }
    }
    debug_assert_eq!(basis.len(), m + n - 1);

    let mut pivots = 0;
    let mut degenerate = 0;
    let max_pivots = 50 * (m + n) * (m + n) + 1000;
    loop {
        let (u, v) = potentials(&basis, m, n, &c);
        let mut in_basis = vec![false; m * n];
        for &(i, j, _) in &basis {
            in_basis[i * n + j] = true;
        }
        let bland = degenerate >= DEGENERATE_RUN;
        let mut entering: Option<(usize, usize)> = None;
        let mut best = -PRICE_TOLERANCE;
        'scan: for i in 0..m {
            for j in 0..n {
                if in_basis[i * n + j] {
                    continue;
                }
                let d = c(i, j) - u[i] - v[j];
                if d < best {
                    entering = Some((i, j));
                    if bland {
                        break 'scan;
                    }
                    best = d;
                }
            }
        }
        let Some((ei, ej)) = entering else {
            let total = basis.iter().map(|&(i, j, x)| x * c(i, j)).sum();
            return Ok(TransportPlan {
                cost: total,
                flows: basis,
                pivots,
            });
        };
        pivots += 1;
        if pivots > max_pivots {
            return Err(Error::Numerical("transport simplex did not terminate".into()));
        }
        // tree path from column ej back to row ei
        let path = tree_path(&basis, m, n, ei, m + ej);
        // path[0] touches column ej and gets -θ, then signs alternate
        let mut theta = f64::INFINITY;
        let mut leaving = usize::MAX;
        for (step, &cell) in path.iter().enumerate() {
            if step % 2 == 0 {
                let x = basis[cell].2;
                if x < theta || (x == theta && cell < leaving) {
                    theta = x;
                    leaving = cell;
                }
            }
        }
        for (step, &cell) in path.iter().enumerate() {
            if step % 2 == 0 {
                basis[cell].2 -= theta;
            } else {
                basis[cell].2 += theta;
            }
        }
        if theta <= 0.0 {
            degenerate += 1;
        } else {
            degenerate = 0;
        }
        basis[leaving] = (ei, ej, theta);
    }
}

fn potentials(
    basis: &[(usize, usize, f64)],
    m: usize,
    n: usize,
    c: &impl Fn(usize, usize) -> f64,
) -> (Vec<f64>, Vec<f64>) {
    let adj = adjacency(basis, m, n);
    let mut pot = vec![f64::NAN; m + n];
    pot[0] = 0.0;
    let mut queue = VecDeque::from([0usize]);
    while let Some(node) = queue.pop_front() {
        for &(next, cell) in &adj[node] {
            if !pot[next].is_nan() {
                continue;
            }
            let (i, j, _) = basis[cell];
            // u_i + v_j = c_ij
            pot[next] = c(i, j) - pot[node];
            queue.push_back(next);
        }
    }
    (pot[..m].to_vec(), pot[m..].to_vec())
}

fn adjacency(basis: &[(usize, usize, f64)], m: usize, n: usize) -> Vec<Vec<(usize, usize)>> {
    let mut adj = vec![Vec::new(); m + n];
    for (k, &(i, j, _)) in basis.iter().enumerate() {
        adj[i].push((m + j, k));
        adj[m + j].push((i, k));
    }
    adj
}

/// Basis cells on the tree path from node `to` back to node `from`, starting
/// with the cell incident to `to`.
fn tree_path(basis: &[(usize, usize, f64)], m: usize, n: usize, from: usize, to: usize) -> Vec<usize> {
    let adj = adjacency(basis, m, n);
    let mut parent: Vec<Option<(usize, usize)>> = vec![None; m + n];
    let mut seen = vec![false; m + n];
    seen[from] = true;
    let mut queue = VecDeque::from([from]);
    while let Some(node) = queue.pop_front() {
        if node == to {
            break;
        }
        for &(next, cell) in &adj[node] {
            if !seen[next] {
                seen[next] = true;
                parent[next] = Some((node, cell));
                queue.push_back(next);
            }
        }
    }
    let mut path = Vec::new();
    let mut node = to;
    while node != from {
        let (prev, cell) = parent[node].expect("basis is a spanning tree");
        path.push(cell);
        node = prev;
    }
    path
}
