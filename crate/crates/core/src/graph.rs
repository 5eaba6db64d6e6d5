//! Tight-binding networks: sites, hoppings, on-site potentials, and the
//! partition of a network into subgraphs joined by coupling bonds.

use alloc::collections::BTreeSet;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::linalg::Matrix;

/// A bond between two distinct sites. The Hamiltonian entry is `-strength`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Hopping {
    pub i: usize,
    pub j: usize,
    pub strength: f64,
}

impl Hopping {
    pub fn new(i: usize, j: usize, strength: f64) -> Self {
        Hopping { i, j, strength }
    }

    /// The endpoint that is not `site`, if `site` is an endpoint.
    pub fn other(&self, site: usize) -> Option<usize> {
        if self.i == site {
            Some(self.j)
        } else if self.j == site {
            Some(self.i)
        } else {
            None
        }
    }
}

/// Unvalidated description of a network, as read from a file or built by
/// hand.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct GraphSpec {
    pub sites: usize,
    pub hoppings: Vec<(usize, usize, f64)>,
    pub potentials: Vec<(usize, f64)>,
    pub labels: Vec<(usize, String)>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum GraphError {
    NoSites,
    SelfLoop { site: usize },
    DuplicateHopping { i: usize, j: usize },
    IndexOutOfRange { index: usize, site_count: usize },
    NonFiniteHopping { i: usize, j: usize },
    NonFinitePotential { site: usize },
    DuplicatePotential { site: usize },
    PartitionLength { expected: usize, found: usize },
}

impl fmt::Display for GraphError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GraphError::NoSites => write!(f, "graph must have at least one site"),
            GraphError::SelfLoop { site } => write!(f, "self-loop hopping at site {site}"),
            GraphError::DuplicateHopping { i, j } => {
                write!(f, "duplicate hopping between sites {i} and {j}")
            }
            GraphError::IndexOutOfRange { index, site_count } => write!(
                f,
                "site index {index} out of range for a graph of {site_count} sites"
            ),
            GraphError::NonFiniteHopping { i, j } => {
                write!(f, "hopping ({i}, {j}) has a non-finite strength")
            }
            GraphError::NonFinitePotential { site } => {
                write!(f, "potential at site {site} is not finite")
            }
            GraphError::DuplicatePotential { site } => {
                write!(f, "potential for site {site} given more than once")
            }
            GraphError::PartitionLength { expected, found } => write!(
                f,
                "partition assigns {found} sites but the graph has {expected}"
            ),
        }
    }
}

impl core::error::Error for GraphError {}

/// Validated tight-binding network.
///
/// Invariants: no self-loops, at most one hopping per unordered pair, every
/// index below `site_count`, all strengths and potentials finite.
#[derive(Clone, Debug, PartialEq)]
pub struct LatticeGraph {
    site_count: usize,
    hoppings: Vec<Hopping>,
    potentials: Vec<f64>,
    labels: Vec<Option<String>>,
}

impl LatticeGraph {
    /// Validates a [`GraphSpec`].
    pub fn from_spec(spec: &GraphSpec) -> Result<Self, GraphError> {
        if spec.sites == 0 {
            return Err(GraphError::NoSites);
        }
        let n = spec.sites;
        let check = |index: usize| {
            if index < n {
                Ok(())
            } else {
                Err(GraphError::IndexOutOfRange {
                    index,
                    site_count: n,
                })
            }
        };

        let mut seen = BTreeSet::new();
        let mut hoppings = Vec::with_capacity(spec.hoppings.len());
        for &(i, j, k) in &spec.hoppings {
            check(i)?;
            check(j)?;
            if i == j {
                return Err(GraphError::SelfLoop { site: i });
            }
            if !k.is_finite() {
                return Err(GraphError::NonFiniteHopping { i, j });
            }
            if !seen.insert((i.min(j), i.max(j))) {
                return Err(GraphError::DuplicateHopping { i, j });
            }
            hoppings.push(Hopping::new(i, j, k));
        }

        let mut potentials = vec![0.0; n];
        let mut given = vec![false; n];
        for &(site, mu) in &spec.potentials {
            check(site)?;
            if !mu.is_finite() {
                return Err(GraphError::NonFinitePotential { site });
            }
            if given[site] {
                return Err(GraphError::DuplicatePotential { site });
            }
            given[site] = true;
            potentials[site] = mu;
        }

        let mut labels = vec![None; n];
        for (site, label) in &spec.labels {
            check(*site)?;
            labels[*site] = Some(label.clone());
        }

        Ok(LatticeGraph {
            site_count: n,
            hoppings,
            potentials,
            labels,
        })
    }

    /// Convenience constructor from a hopping list with zero potentials.
    pub fn from_hoppings(sites: usize, hoppings: &[(usize, usize, f64)]) -> Result<Self, GraphError> {
        Self::from_spec(&GraphSpec {
            sites,
            hoppings: hoppings.to_vec(),
            ..GraphSpec::default()
        })
    }

    pub fn site_count(&self) -> usize {
        self.site_count
    }

    pub fn hoppings(&self) -> &[Hopping] {
        &self.hoppings
    }

    pub fn potentials(&self) -> &[f64] {
        &self.potentials
    }

    pub fn label(&self, site: usize) -> Option<&str> {
        self.labels.get(site).and_then(|l| l.as_deref())
    }

    pub(crate) fn set_label(&mut self, site: usize, label: String) {
        self.labels[site] = Some(label);
    }

    /// Single-particle Hamiltonian in the site basis:
    /// `H[i][j] = -kappa_ij` on bonds and `H[i][i] = mu_i`.
    pub fn hamiltonian(&self) -> Matrix {
        let mut h = Matrix::zeros(self.site_count, self.site_count);
        for (i, &mu) in self.potentials.iter().enumerate() {
            h[(i, i)] = mu;
        }
        for hop in &self.hoppings {
            h[(hop.i, hop.j)] = -hop.strength;
            h[(hop.j, hop.i)] = -hop.strength;
        }
        h
    }

    /// `H psi` using the bond list directly.
    pub fn apply(&self, psi: &[f64]) -> Vec<f64> {
        assert_eq!(psi.len(), self.site_count);
        let mut out: Vec<f64> = psi.iter().zip(&self.potentials).map(|(p, mu)| p * mu).collect();
        for hop in &self.hoppings {
            out[hop.i] -= hop.strength * psi[hop.j];
            out[hop.j] -= hop.strength * psi[hop.i];
        }
        out
    }

    /// Copy of the graph with every hopping passed through `f`.
    pub fn map_hoppings<F>(&self, mut f: F) -> LatticeGraph
    where
        F: FnMut(&Hopping) -> f64,
    {
        let mut g = self.clone();
        for hop in g.hoppings.iter_mut() {
            hop.strength = f(hop);
        }
        g
    }
}

/// Assignment of every site to a subgraph, plus the derived joint sites and
/// inter-subgraph couplings.
#[derive(Clone, Debug, PartialEq)]
pub struct Partition {
    assignment: Vec<usize>,
    subgraph_count: usize,
    joints: Vec<Vec<usize>>,
    couplings: Vec<Hopping>,
}

impl Partition {
    /// `assignment[i]` is the subgraph of site `i`. Subgraph indices run from
    /// 0 to the largest label; labels that are skipped give empty subgraphs.
    pub fn new(graph: &LatticeGraph, assignment: Vec<usize>) -> Result<Self, GraphError> {
        if assignment.len() != graph.site_count() {
            return Err(GraphError::PartitionLength {
                expected: graph.site_count(),
                found: assignment.len(),
            });
        }
        let subgraph_count = assignment.iter().max().map_or(0, |m| m + 1);
        let mut joints = vec![BTreeSet::new(); subgraph_count];
        let mut couplings = Vec::new();
        for hop in graph.hoppings() {
            let (li, lj) = (assignment[hop.i], assignment[hop.j]);
            if li != lj {
                joints[li].insert(hop.i);
                joints[lj].insert(hop.j);
                couplings.push(*hop);
            }
        }
        Ok(Partition {
            assignment,
            subgraph_count,
            joints: joints.into_iter().map(|s| s.into_iter().collect()).collect(),
            couplings,
        })
    }

    /// Single-block partition.
    pub fn trivial(graph: &LatticeGraph) -> Self {
        Self::new(graph, vec![0; graph.site_count()]).expect("length matches by construction")
    }

    pub fn subgraph_count(&self) -> usize {
        self.subgraph_count
    }

    pub fn subgraph_of(&self, site: usize) -> usize {
        self.assignment[site]
    }

    pub fn assignment(&self) -> &[usize] {
        &self.assignment
    }

    /// Sites of subgraph `l`, ascending.
    pub fn sites(&self, l: usize) -> Vec<usize> {
        (0..self.assignment.len())
            .filter(|&i| self.assignment[i] == l)
            .collect()
    }

    /// Sites of `l` bonded to some other subgraph, ascending.
    pub fn joint_sites(&self, l: usize) -> &[usize] {
        self.joints.get(l).map_or(&[], |v| v.as_slice())
    }

    /// Every hopping whose endpoints lie in different subgraphs.
    pub fn couplings(&self) -> &[Hopping] {
        &self.couplings
    }

    /// `H_l`: the Hamiltonian restricted to subgraph `l`, together with the
    /// global site index of each local row.
    pub fn subgraph_hamiltonian(&self, graph: &LatticeGraph, l: usize) -> (Matrix, Vec<usize>) {
        let sites = self.sites(l);
        let mut local = vec![usize::MAX; graph.site_count()];
        for (a, &s) in sites.iter().enumerate() {
            local[s] = a;
        }
        let mut h = Matrix::zeros(sites.len(), sites.len());
        for (a, &s) in sites.iter().enumerate() {
            h[(a, a)] = graph.potentials()[s];
        }
        for hop in graph.hoppings() {
            if self.assignment[hop.i] == l && self.assignment[hop.j] == l {
                let (a, b) = (local[hop.i], local[hop.j]);
                h[(a, b)] = -hop.strength;
                h[(b, a)] = -hop.strength;
            }
        }
        (h, sites)
    }

    /// `H_lm` embedded in the full site basis: only the bonds between
    /// subgraphs `l` and `m`.
    pub fn coupling_hamiltonian(&self, graph: &LatticeGraph, l: usize, m: usize) -> Matrix {
        let n = graph.site_count();
        let mut h = Matrix::zeros(n, n);
        for hop in &self.couplings {
            let (li, lj) = (self.assignment[hop.i], self.assignment[hop.j]);
            if (li == l && lj == m) || (li == m && lj == l) {
                h[(hop.i, hop.j)] = -hop.strength;
                h[(hop.j, hop.i)] = -hop.strength;
            }
        }
        h
    }
}
