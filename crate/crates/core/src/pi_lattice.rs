//! The pi-shaped lattice: a straight chain `c` with two side chains `a` and
//! `b` of length `N0` hanging from `c_1` and `c_L`.
//!
//! The infinite chain is truncated to `M` sites beyond each joint with hard
//! walls. Flat site order follows the unfolded path
//!
//! ```text
//! c_{1-M} .. c_0 | a_N0 .. a_1  c_1 .. c_L  b_1 .. b_N0 | c_{L+1} .. c_{L+M}
//!   left lead    |          central chain (2 N0 + L)     |   right lead
//! ```
//!
//! so the left-right mirror is index reversal, and with `kappa == kappa0`
//! the central block is a uniform open chain.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::graph::{GraphError, LatticeGraph, Partition};
use crate::spectra::{self, EigenMode, SpectraError};

/// Subgraph labels of [`build_pi_lattice`]'s partition.
pub const LEFT_LEAD: usize = 0;
pub const CENTRAL: usize = 1;
pub const RIGHT_LEAD: usize = 2;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PiLatticeSpec {
    /// Side-chain length.
    pub n0: usize,
    /// Joint separation along `c` (joints are `c_1` and `c_L`).
    pub len: usize,
    /// Hopping along chain `c`.
    pub kappa: f64,
    /// Hopping along the side chains and across the joints.
    pub kappa0: f64,
    /// Lead sites kept beyond each joint.
    pub m: usize,
}

impl PiLatticeSpec {
    pub fn uniform(n0: usize, len: usize, m: usize) -> Self {
        PiLatticeSpec {
            n0,
            len,
            kappa: 1.0,
            kappa0: 1.0,
            m,
        }
    }

    pub fn validate(&self) -> Result<(), PiSpecError> {
        if self.n0 < 1 {
            return Err(PiSpecError::SideChainTooShort { n0: self.n0 });
        }
        if self.len < 2 {
            return Err(PiSpecError::JointSeparationTooShort { len: self.len });
        }
        if !(self.kappa > 0.0 && self.kappa.is_finite()) {
            return Err(PiSpecError::NonPositiveHopping { name: "kappa", value: self.kappa });
        }
        if !(self.kappa0 > 0.0 && self.kappa0.is_finite()) {
            return Err(PiSpecError::NonPositiveHopping { name: "kappa0", value: self.kappa0 });
        }
        Ok(())
    }

    pub fn sites(&self) -> PiSites {
        PiSites {
            n0: self.n0,
            len: self.len,
            m: self.m,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum PiSpecError {
    SideChainTooShort { n0: usize },
    JointSeparationTooShort { len: usize },
    NonPositiveHopping { name: &'static str, value: f64 },
    Graph(GraphError),
}

impl fmt::Display for PiSpecError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PiSpecError::SideChainTooShort { n0 } => write!(f, "N0 must be at least 1 (got {n0})"),
            PiSpecError::JointSeparationTooShort { len } => {
                write!(f, "L must be at least 2 (got {len})")
            }
            PiSpecError::NonPositiveHopping { name, value } => {
                write!(f, "{name} must be positive and finite (got {value})")
            }
            PiSpecError::Graph(e) => write!(f, "{e}"),
        }
    }
}

impl core::error::Error for PiSpecError {}

impl From<GraphError> for PiSpecError {
    fn from(e: GraphError) -> Self {
        PiSpecError::Graph(e)
    }
}

/// Named site of the pi-lattice.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PiSite {
    /// `a_i`, `1 <= i <= N0`; `a_1` touches `c_1`.
    A(usize),
    /// `b_i`, `1 <= i <= N0`; `b_1` touches `c_L`.
    B(usize),
    /// `c_j` for `1 - M <= j <= L + M`.
    C(isize),
}

/// Flat index map for a truncated pi-lattice.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PiSites {
    pub n0: usize,
    pub len: usize,
    pub m: usize,
}

impl PiSites {
    pub fn total(&self) -> usize {
        2 * self.n0 + self.len + 2 * self.m
    }

    /// Central chain length, `2 N0 + L`.
    pub fn central_len(&self) -> usize {
        2 * self.n0 + self.len
    }

    /// Flat indices of the central chain in path order.
    pub fn central(&self) -> core::ops::Range<usize> {
        self.m..self.m + self.central_len()
    }

    /// Flat index of the 1-based central-chain position `p`.
    pub fn central_position(&self, p: usize) -> usize {
        assert!(p >= 1 && p <= self.central_len(), "central position out of range");
        self.m + p - 1
    }

    /// 1-based central positions of the joints `c_1` and `c_L`.
    pub fn joint_positions(&self) -> (usize, usize) {
        (self.n0 + 1, self.n0 + self.len)
    }

    pub fn a(&self, i: usize) -> usize {
        assert!(i >= 1 && i <= self.n0, "a_{i} out of range");
        self.m + self.n0 - i
    }

    pub fn b(&self, i: usize) -> usize {
        assert!(i >= 1 && i <= self.n0, "b_{i} out of range");
        self.m + self.n0 + self.len + i - 1
    }

    pub fn c(&self, j: isize) -> usize {
        let (m, l) = (self.m as isize, self.len as isize);
        assert!(j >= 1 - m && j <= l + m, "c_{j} out of range");
        if j <= 0 {
            (j + m - 1) as usize
        } else if j <= l {
            (m + self.n0 as isize + j - 1) as usize
        } else {
            (m + 2 * self.n0 as isize + l + (j - l - 1)) as usize
        }
    }

    pub fn index(&self, site: PiSite) -> usize {
        match site {
            PiSite::A(i) => self.a(i),
            PiSite::B(i) => self.b(i),
            PiSite::C(j) => self.c(j),
        }
    }

    pub fn site(&self, index: usize) -> PiSite {
        assert!(index < self.total());
        let (m, n0, l) = (self.m, self.n0, self.len);
        if index < m {
            PiSite::C(index as isize + 1 - m as isize)
        } else if index < m + n0 {
            PiSite::A(m + n0 - index)
        } else if index < m + n0 + l {
            PiSite::C((index - m - n0 + 1) as isize)
        } else if index < m + 2 * n0 + l {
            PiSite::B(index - m - n0 - l + 1)
        } else {
            PiSite::C((l + 1 + index - m - 2 * n0 - l) as isize)
        }
    }

    pub fn name(&self, index: usize) -> String {
        match self.site(index) {
            PiSite::A(i) => format!("a{i}"),
            PiSite::B(i) => format!("b{i}"),
            PiSite::C(j) => format!("c{j}"),
        }
    }

    /// Left-right mirror image of a site.
    pub fn mirror(&self, index: usize) -> usize {
        self.total() - 1 - index
    }
}

/// Builds the truncated pi-lattice with its three-way partition
/// (left lead | central chain | right lead).
pub fn build_pi_lattice(spec: &PiLatticeSpec) -> Result<(LatticeGraph, Partition, PiSites), PiSpecError> {
    spec.validate()?;
    let sites = spec.sites();
    let (n0, l, m) = (spec.n0, spec.len as isize, spec.m as isize);

    let mut hoppings = Vec::with_capacity(sites.total());
    for j in (1 - m)..(l + m) {
        hoppings.push((sites.c(j), sites.c(j + 1), spec.kappa));
    }
    for i in 1..n0 {
        hoppings.push((sites.a(i), sites.a(i + 1), spec.kappa0));
        hoppings.push((sites.b(i), sites.b(i + 1), spec.kappa0));
    }
    hoppings.push((sites.a(1), sites.c(1), spec.kappa0));
    hoppings.push((sites.b(1), sites.c(l), spec.kappa0));

    let mut graph = LatticeGraph::from_hoppings(sites.total(), &hoppings)?;
    for idx in 0..sites.total() {
        graph.set_label(idx, sites.name(idx));
    }

    let central = sites.central();
    let assignment = (0..sites.total())
        .map(|i| {
            if i < central.start {
                LEFT_LEAD
            } else if i < central.end {
                CENTRAL
            } else {
                RIGHT_LEAD
            }
        })
        .collect();
    let partition = Partition::new(&graph, assignment)?;
    Ok((graph, partition, sites))
}

/// Eigenmodes of the isolated central chain (ascending energy), with
/// amplitudes in central path order. For `kappa == kappa0` these are the
/// analytic open-chain modes.
pub fn central_modes(spec: &PiLatticeSpec) -> Result<Vec<EigenMode>, SpectraError> {
    let sites = spec.sites();
    if spec.kappa == spec.kappa0 {
        return Ok(spectra::open_chain_modes(sites.central_len(), spec.kappa));
    }
    let bare = PiLatticeSpec { m: 0, ..*spec };
    let (graph, _, _) = build_pi_lattice(&bare).map_err(|_| SpectraError::EmptySubgraph { subgraph: CENTRAL })?;
    spectra::eigenmodes(&graph.hamiltonian())
}

/// Places central-chain amplitudes (path order) on the full lattice.
pub fn embed_central(sites: &PiSites, central: &[f64]) -> Vec<f64> {
    assert_eq!(central.len(), sites.central_len());
    let mut v = alloc::vec![0.0; sites.total()];
    v[sites.central()].copy_from_slice(central);
    v
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::Matrix;

    #[test]
    fn fig2_central_chain() {
        let (g, p, s) = build_pi_lattice(&PiLatticeSpec::uniform(3, 5, 0)).unwrap();
        assert_eq!(s.central_len(), 11);
        assert_eq!(g.site_count(), 11);
        assert_eq!(s.joint_positions(), (4, 8));
        assert_eq!(s.central_position(4), s.c(1));
        assert_eq!(s.central_position(8), s.c(5));
        assert!(p.joint_sites(CENTRAL).is_empty());
    }

    #[test]
    fn joints_with_leads() {
        let (_, p, s) = build_pi_lattice(&PiLatticeSpec::uniform(2, 4, 3)).unwrap();
        assert_eq!(s.central_len(), 8);
        assert_eq!(s.joint_positions(), (3, 6));
        assert_eq!(p.joint_sites(CENTRAL), &[s.c(1), s.c(4)]);
        assert_eq!(p.joint_sites(LEFT_LEAD), &[s.c(0)]);
        assert_eq!(p.joint_sites(RIGHT_LEAD), &[s.c(5)]);
    }

    #[test]
    fn smallest_lattice_with_leads() {
        let (g, _, s) = build_pi_lattice(&PiLatticeSpec::uniform(1, 2, 1)).unwrap();
        // 2 N0 + L + 2 M
        assert_eq!(g.site_count(), 6);
        let path: Vec<usize> = (1..=4).map(|p| s.central_position(p)).collect();
        assert_eq!(path, vec![s.a(1), s.c(1), s.c(2), s.b(1)]);
        let h = g.hamiltonian();
        for w in path.windows(2) {
            assert_eq!(h[(w[0], w[1])], -1.0);
        }
    }

    #[test]
    fn five_site_matrix_matches_hand_enumeration() {
        // N0 = 1, L = 3, M = 0: a1 - c1 - c2 - c3 - b1.
        let (g, _, s) = build_pi_lattice(&PiLatticeSpec::uniform(1, 3, 0)).unwrap();
        let mut want = Matrix::zeros(5, 5);
        let bonds = [
            (s.a(1), s.c(1)),
            (s.c(1), s.c(2)),
            (s.c(2), s.c(3)),
            (s.b(1), s.c(3)),
        ];
        for (i, j) in bonds {
            want[(i, j)] = -1.0;
            want[(j, i)] = -1.0;
        }
        assert_eq!(g.hamiltonian(), want);
    }

    #[test]
    fn central_block_is_uniform_chain() {
        for (n0, l) in [(1, 2), (2, 4), (3, 5), (4, 7)] {
            let (g, _, s) = build_pi_lattice(&PiLatticeSpec::uniform(n0, l, 0)).unwrap();
            let h = g.hamiltonian();
            let n = s.central_len();
            for i in 0..n {
                for j in 0..n {
                    let want = if i.abs_diff(j) == 1 { -1.0 } else { 0.0 };
                    assert_eq!(h[(i, j)], want);
                }
            }
        }
    }

    #[test]
    fn site_map_roundtrip_and_mirror() {
        let s = PiSites { n0: 2, len: 4, m: 3 };
        for idx in 0..s.total() {
            assert_eq!(s.index(s.site(idx)), idx);
        }
        assert_eq!(s.mirror(s.a(2)), s.b(2));
        assert_eq!(s.mirror(s.c(1)), s.c(4));
        assert_eq!(s.mirror(s.c(-2)), s.c(7));
        assert_eq!(s.name(s.c(-2)), "c-2");
        assert_eq!(s.name(s.b(1)), "b1");
    }

    #[test]
    fn spec_validation() {
        let mut spec = PiLatticeSpec::uniform(0, 4, 0);
        assert_eq!(spec.validate(), Err(PiSpecError::SideChainTooShort { n0: 0 }));
        spec.n0 = 1;
        spec.len = 1;
        assert_eq!(spec.validate(), Err(PiSpecError::JointSeparationTooShort { len: 1 }));
        spec.len = 2;
        spec.kappa0 = 0.0;
        assert!(matches!(spec.validate(), Err(PiSpecError::NonPositiveHopping { name: "kappa0", .. })));
    }
}
