//! Independent reference implementations for cross-checking the library.
#![allow(dead_code, clippy::needless_range_loop)]

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use trapnet_core::graph::{LatticeGraph, Partition};
use trapnet_core::linalg::Matrix;

/// Cyclic Jacobi eigen-decomposition of a dense symmetric matrix.
/// Returns ascending eigenvalues and the eigenvectors as columns of `v`
/// (`v[i][k]` is component `i` of vector `k`).
pub fn jacobi_eigen(a: &[Vec<f64>]) -> (Vec<f64>, Vec<Vec<f64>>) {
    let n = a.len();
    let mut a: Vec<Vec<f64>> = a.to_vec();
    let mut v = vec![vec![0.0; n]; n];
    for (i, row) in v.iter_mut().enumerate() {
        row[i] = 1.0;
    }
    for _sweep in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[i][j] * a[i][j])
            .sum();
        if off < 1e-30 {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                if a[p][q].abs() < 1e-300 {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let (akp, akq) = (a[k][p], a[k][q]);
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let (apk, aqk) = (a[p][k], a[q][k]);
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
                for row in v.iter_mut() {
                    let (vp, vq) = (row[p], row[q]);
                    row[p] = c * vp - s * vq;
                    row[q] = s * vp + c * vq;
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&x, &y| a[x][x].total_cmp(&a[y][y]));
    let values = order.iter().map(|&k| a[k][k]).collect();
    let vectors = (0..n).map(|i| order.iter().map(|&k| v[i][k]).collect()).collect();
    (values, vectors)
}

pub fn dense(h: &Matrix) -> Vec<Vec<f64>> {
    (0..h.rows()).map(|i| h.row(i).to_vec()).collect()
}

/// A full-graph eigenspace restricted to vectors supported inside a
/// subgraph: an energy and an orthonormal basis (full-length vectors).
#[derive(Debug)]
pub struct ConfinedSpace {
    pub energy: f64,
    pub basis: Vec<Vec<f64>>,
}

/// Exhaustive search: every eigenvector of the full Hamiltonian whose
/// amplitude vanishes outside `l`, grouped by energy.
pub fn brute_force_confined(graph: &LatticeGraph, partition: &Partition, l: usize) -> Vec<ConfinedSpace> {
    let h = dense(&graph.hamiltonian());
    let n = h.len();
    let (values, vectors) = jacobi_eigen(&h);
    let scale = h.iter().map(|r| r.iter().map(|x| x.abs()).sum::<f64>()).fold(0.0, f64::max).max(1.0);
    let outside: Vec<usize> = (0..n).filter(|&i| partition.subgraph_of(i) != l).collect();
    let mut out = Vec::new();
    let mut start = 0;
    while start < n {
        let mut end = start + 1;
        while end < n && values[end] - values[end - 1] < 1e-8 * scale {
            end += 1;
        }
        let d = end - start;
        // Gram matrix of the outside components over the eigenspace basis.
        let gram: Vec<Vec<f64>> = (0..d)
            .map(|a| {
                (0..d)
                    .map(|b| outside.iter().map(|&o| vectors[o][start + a] * vectors[o][start + b]).sum())
                    .collect()
            })
            .collect();
        let (gv, gvec) = jacobi_eigen(&gram);
        let mut basis = Vec::new();
        for (c, &lam) in gv.iter().enumerate() {
            if lam < 1e-14 {
                let mut v = vec![0.0; n];
                for a in 0..d {
                    for (i, vi) in v.iter_mut().enumerate() {
                        *vi += gvec[a][c] * vectors[i][start + a];
                    }
                }
                for &o in &outside {
                    v[o] = 0.0;
                }
                let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
                v.iter_mut().for_each(|x| *x /= norm);
                basis.push(v);
            }
        }
        if !basis.is_empty() {
            let energy = values[start..end].iter().sum::<f64>() / d as f64;
            out.push(ConfinedSpace { energy, basis });
        }
        start = end;
    }
    out
}

/// `sum_k v_k v_k^T` as a dense matrix.
pub fn projector(basis: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let n = basis.first().map_or(0, |v| v.len());
    let mut p = vec![vec![0.0; n]; n];
    for v in basis {
        for i in 0..n {
            for j in 0..n {
                p[i][j] += v[i] * v[j];
            }
        }
    }
    p
}

pub fn max_diff(a: &[Vec<f64>], b: &[Vec<f64>]) -> f64 {
    a.iter()
        .zip(b)
        .flat_map(|(x, y)| x.iter().zip(y).map(|(p, q)| (p - q).abs()))
        .fold(0.0, f64::max)
}

/// Random connected-ish graph with small-integer hoppings (so degeneracies
/// and exact nodes are common) and a random partition into 2 or 3 blocks.
pub fn random_graph(rng: &mut ChaCha8Rng) -> (LatticeGraph, Partition) {
    let n = rng.gen_range(2..=12);
    let weights = [1.0, 1.0, 1.0, 2.0, 0.5];
    let mut hops = Vec::new();
    for i in 1..n {
        let j = rng.gen_range(0..i);
        hops.push((j, i, weights[rng.gen_range(0..weights.len())]));
    }
    let extra = rng.gen_range(0..=n);
    for _ in 0..extra {
        let (i, j) = (rng.gen_range(0..n), rng.gen_range(0..n));
        if i == j || hops.iter().any(|&(a, b, _)| (a, b) == (i.min(j), i.max(j)) || (a, b) == (i.max(j), i.min(j))) {
            continue;
        }
        hops.push((i.min(j), i.max(j), weights[rng.gen_range(0..weights.len())]));
    }
    let graph = LatticeGraph::from_hoppings(n, &hops).unwrap();
    let blocks = rng.gen_range(2..=3).min(n);
    let mut assignment: Vec<usize> = (0..n).map(|_| rng.gen_range(0..blocks)).collect();
    for (b, slot) in assignment.iter_mut().enumerate().take(blocks) {
        *slot = b;
    }
    let partition = Partition::new(&graph, assignment).unwrap();
    (graph, partition)
}

/// True when no outside site is bonded to two or more sites of `l`.
pub fn no_shared_outside_neighbor(graph: &LatticeGraph, partition: &Partition, l: usize) -> bool {
    let n = graph.site_count();
    let mut count = vec![0usize; n];
    for h in partition.couplings() {
        let (a, b) = (partition.subgraph_of(h.i), partition.subgraph_of(h.j));
        if a == l && b != l {
            count[h.j] += 1;
        } else if b == l && a != l {
            count[h.i] += 1;
        }
    }
    count.iter().all(|&c| c < 2)
}
