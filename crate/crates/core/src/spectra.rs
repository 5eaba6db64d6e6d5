//! Subgraph eigenmodes, wave nodes, and certification of trapped modes.
//!
//! A subgraph eigenmode whose amplitude vanishes on every joint site is also
//! an eigenstate of the whole network: the coupling terms never see it.
//! Within a degenerate eigenspace the test is done on the space, not on the
//! basis vectors the eigensolver happened to return.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;
use core::fmt;

#[allow(unused_imports)] // float methods come from libm without std
use num_traits::Float;

use crate::graph::{LatticeGraph, Partition};
use crate::linalg::{self, LinalgError, Matrix, SymmetricEigen};

/// Relative amplitude below which a site counts as a wave node.
pub const NODE_TOLERANCE: f64 = 1e-9;
/// Relative energy window (in units of `||H||`) for degeneracy grouping.
pub const DEGENERACY_TOLERANCE: f64 = 1e-8;

#[derive(Clone, Debug, PartialEq)]
pub struct EigenMode {
    pub energy: f64,
    /// Unit-norm amplitudes over the subgraph's sites (local order).
    pub amplitudes: Vec<f64>,
    /// Local indices (into `amplitudes`) of the wave nodes.
    pub nodes: Vec<usize>,
    /// Modes sharing this id are degenerate.
    pub degeneracy_group: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub enum SpectraError {
    Linalg(LinalgError),
    SubgraphOutOfRange { subgraph: usize, count: usize },
    EmptySubgraph { subgraph: usize },
    DimensionMismatch { expected: usize, found: usize },
}

impl fmt::Display for SpectraError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SpectraError::Linalg(e) => write!(f, "{e}"),
            SpectraError::SubgraphOutOfRange { subgraph, count } => {
                write!(f, "subgraph {subgraph} does not exist (partition has {count})")
            }
            SpectraError::EmptySubgraph { subgraph } => write!(f, "subgraph {subgraph} has no sites"),
            SpectraError::DimensionMismatch { expected, found } => {
                write!(f, "vector has {found} entries, graph has {expected} sites")
            }
        }
    }
}

impl core::error::Error for SpectraError {}

impl From<LinalgError> for SpectraError {
    fn from(e: LinalgError) -> Self {
        SpectraError::Linalg(e)
    }
}

/// Ascending eigenpairs of a real symmetric matrix.
pub fn diagonalize(h: &Matrix) -> Result<SymmetricEigen, SpectraError> {
    Ok(linalg::eigh(h)?)
}

/// Local indices where `|g_j| < NODE_TOLERANCE * max |g|`.
pub fn wave_nodes(amplitudes: &[f64]) -> Vec<usize> {
    let scale = linalg::max_abs(amplitudes);
    (0..amplitudes.len())
        .filter(|&j| amplitudes[j].abs() < NODE_TOLERANCE * scale)
        .collect()
}

/// Group ids for ascending energies: consecutive values closer than
/// `tol` share a group.
pub fn degeneracy_groups(energies: &[f64], tol: f64) -> Vec<usize> {
    let mut groups = Vec::with_capacity(energies.len());
    let mut id = 0;
    for (i, e) in energies.iter().enumerate() {
        if i > 0 && e - energies[i - 1] > tol {
            id += 1;
        }
        groups.push(id);
    }
    groups
}

fn degeneracy_tolerance(h: &Matrix) -> f64 {
    DEGENERACY_TOLERANCE * h.norm_inf().max(f64::MIN_POSITIVE)
}

/// Numerical eigenmodes of `h` with node sets and degeneracy groups.
pub fn eigenmodes(h: &Matrix) -> Result<Vec<EigenMode>, SpectraError> {
    let eig = diagonalize(h)?;
    let groups = degeneracy_groups(&eig.values, degeneracy_tolerance(h));
    Ok(eig
        .vectors()
        .zip(&eig.values)
        .zip(groups)
        .map(|((v, &energy), degeneracy_group)| EigenMode {
            energy,
            amplitudes: v.to_vec(),
            nodes: wave_nodes(v),
            degeneracy_group,
        })
        .collect())
}

/// Analytic modes of a uniform open chain of `size` sites with hopping
/// `kappa`: `g_j = sqrt(2/(size+1)) sin(k j)`, `k = n pi/(size+1)`,
/// `energy = -2 kappa cos k`, for `n = 1..=size` (ascending energy).
///
/// Nodes are found by integer arithmetic: site `j` is a node of mode `n`
/// exactly when `(size + 1)` divides `n j`. Amplitudes at nodes are stored
/// as exact zeros.
pub fn open_chain_modes(size: usize, kappa: f64) -> Vec<EigenMode> {
    let period = size + 1;
    let norm = (2.0 / period as f64).sqrt();
    (1..=size)
        .map(|n| {
            let k = n as f64 * PI / period as f64;
            let nodes: Vec<usize> = (1..=size).filter(|j| (n * j) % period == 0).map(|j| j - 1).collect();
            let amplitudes = (1..=size)
                .map(|j| {
                    if (n * j) % period == 0 {
                        0.0
                    } else {
                        norm * (k * j as f64).sin()
                    }
                })
                .collect();
            EigenMode {
                energy: -2.0 * kappa * k.cos(),
                amplitudes,
                nodes,
                degeneracy_group: n - 1,
            }
        })
        .collect()
}

/// A subgraph eigenmode that is also an eigenstate of the whole network.
#[derive(Clone, Debug, PartialEq)]
pub struct TrappingCertificate {
    pub subgraph: usize,
    pub energy: f64,
    /// Unit vector over all sites of the graph, zero outside the subgraph.
    pub vector: Vec<f64>,
    /// `||H psi - energy psi||_inf` on the full Hamiltonian.
    pub residual: f64,
}

impl TrappingCertificate {
    /// Sites carrying non-zero amplitude.
    pub fn support(&self) -> Vec<usize> {
        (0..self.vector.len()).filter(|&i| self.vector[i] != 0.0).collect()
    }
}

/// How the decoupling of a subgraph mode from the rest of the network is
/// tested.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum TrapCriterion {
    /// Every joint site is a wave node.
    #[default]
    JointNodes,
    /// The coupling bonds send zero net amplitude to each outside site.
    /// Strictly weaker than [`TrapCriterion::JointNodes`]: amplitudes on
    /// two joints bonded to the same outside site may cancel.
    CouplingCancellation,
}

/// Trapped modes of subgraph `l`, using [`TrapCriterion::JointNodes`].
pub fn find_trapping_modes(
    graph: &LatticeGraph,
    partition: &Partition,
    l: usize,
) -> Result<Vec<TrappingCertificate>, SpectraError> {
    find_trapping_modes_with(graph, partition, l, TrapCriterion::JointNodes)
}

pub fn find_trapping_modes_with(
    graph: &LatticeGraph,
    partition: &Partition,
    l: usize,
    criterion: TrapCriterion,
) -> Result<Vec<TrappingCertificate>, SpectraError> {
    if l >= partition.subgraph_count() {
        return Err(SpectraError::SubgraphOutOfRange {
            subgraph: l,
            count: partition.subgraph_count(),
        });
    }
    let (hl, sites) = partition.subgraph_hamiltonian(graph, l);
    if sites.is_empty() {
        return Err(SpectraError::EmptySubgraph { subgraph: l });
    }
    let n_local = sites.len();
    let mut local = vec![usize::MAX; graph.site_count()];
    for (a, &s) in sites.iter().enumerate() {
        local[s] = a;
    }

    // Each row is a linear functional on local amplitudes that must vanish.
    let constraints: Vec<Vec<(usize, f64)>> = match criterion {
        TrapCriterion::JointNodes => partition
            .joint_sites(l)
            .iter()
            .map(|&s| vec![(local[s], 1.0)])
            .collect(),
        TrapCriterion::CouplingCancellation => {
            let mut rows: Vec<(usize, Vec<(usize, f64)>)> = Vec::new();
            for hop in partition.couplings() {
                let (inside, outside) = if partition.subgraph_of(hop.i) == l {
                    (hop.i, hop.j)
                } else if partition.subgraph_of(hop.j) == l {
                    (hop.j, hop.i)
                } else {
                    continue;
                };
                match rows.iter_mut().find(|(o, _)| *o == outside) {
                    Some((_, row)) => row.push((local[inside], hop.strength)),
                    None => rows.push((outside, vec![(local[inside], hop.strength)])),
                }
            }
            rows.into_iter().map(|(_, row)| row).collect()
        }
    };
    let row_scale = constraints
        .iter()
        .flat_map(|r| r.iter().map(|(_, w)| w.abs()))
        .fold(0.0f64, f64::max)
        .max(f64::MIN_POSITIVE);

    let full = graph.hamiltonian();
    let eig = linalg::eigh(&hl)?;
    let groups = degeneracy_groups(&eig.values, degeneracy_tolerance(&hl));

    let mut out = Vec::new();
    let mut start = 0;
    while start < n_local {
        let mut end = start + 1;
        while end < n_local && groups[end] == groups[start] {
            end += 1;
        }
        let basis: Vec<&[f64]> = (start..end).map(|i| eig.vector(i)).collect();

        // constraint matrix restricted to this eigenspace: rows x d
        let d = basis.len();
        let mut a = Matrix::zeros(constraints.len(), d);
        for (r, row) in constraints.iter().enumerate() {
            for (c, g) in basis.iter().enumerate() {
                a[(r, c)] = row.iter().map(|&(j, w)| w * g[j]).sum();
            }
        }
        let svd = linalg::right_singular(&a);
        for (sigma, x) in svd.values.iter().zip(&svd.vectors) {
            if *sigma > 1e-6 * row_scale {
                continue;
            }
            let mut g = vec![0.0; n_local];
            for (c, v) in basis.iter().enumerate() {
                for j in 0..n_local {
                    g[j] += x[c] * v[j];
                }
            }
            let norm = linalg::norm2(&g);
            g.iter_mut().for_each(|v| *v /= norm);
            let scale = linalg::max_abs(&g);
            let leak = constraints
                .iter()
                .map(|row| row.iter().map(|&(j, w)| w * g[j]).sum::<f64>().abs())
                .fold(0.0f64, f64::max);
            if leak >= NODE_TOLERANCE * scale * row_scale {
                continue;
            }
            let hg = hl.mul_vec(&g);
            let energy = linalg::dot(&g, &hg);
            let mut vector = vec![0.0; graph.site_count()];
            for (a, &s) in sites.iter().enumerate() {
                vector[s] = g[a];
            }
            let residual = eigen_residual(&full, &vector, energy);
            out.push(TrappingCertificate {
                subgraph: l,
                energy,
                vector,
                residual,
            });
        }
        start = end;
    }
    Ok(out)
}

/// `||H psi - energy psi||_inf` for a dense `H`.
pub fn eigen_residual(h: &Matrix, psi: &[f64], energy: f64) -> f64 {
    h.mul_vec(psi)
        .iter()
        .zip(psi)
        .map(|(hp, p)| (hp - energy * p).abs())
        .fold(0.0, f64::max)
}

/// Re-checks a certificate against the full assembled Hamiltonian of
/// `graph`, which need not be the graph the certificate was found on.
pub fn verify_trapping(graph: &LatticeGraph, certificate: &TrappingCertificate) -> Result<f64, SpectraError> {
    if certificate.vector.len() != graph.site_count() {
        return Err(SpectraError::DimensionMismatch {
            expected: graph.site_count(),
            found: certificate.vector.len(),
        });
    }
    Ok(eigen_residual(&graph.hamiltonian(), &certificate.vector, certificate.energy))
}
