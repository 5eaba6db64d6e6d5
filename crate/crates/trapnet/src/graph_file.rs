//! JSON network files.
//!
//! ```json
//! {
//!   "sites": 4,
//!   "hoppings": [[0, 1, 1.0], [1, 2, 1.0], [2, 3, 0.5]],
//!   "potentials": {"3": 0.2},
//!   "labels": {"0": "left"},
//!   "partition": [0, 0, 1, 1]
//! }
//! ```
//!
//! Hoppings are `[i, j, kappa]` and enter the Hamiltonian as `-kappa`.
//! `potentials`, `labels` and `partition` are optional; without a partition
//! every site is in subgraph 0.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use serde::Deserialize;
use trapnet_core::{GraphSpec, LatticeGraph, Partition};

use crate::error::CliError;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraphFile {
    pub sites: usize,
    pub hoppings: Vec<(usize, usize, f64)>,
    #[serde(default)]
    pub potentials: BTreeMap<String, f64>,
    #[serde(default)]
    pub labels: BTreeMap<String, String>,
    pub partition: Option<Vec<usize>>,
}

fn site_key(key: &str, what: &str) -> Result<usize, CliError> {
    key.trim()
        .parse()
        .map_err(|_| CliError::Input(format!("{what} key {key:?} is not a site index")))
}

impl GraphFile {
    pub fn parse(text: &str, origin: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::json(origin, &e))
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = fs::read_to_string(path).map_err(|source| CliError::Read {
            path: path.to_path_buf(),
            source,
        })?;
        Self::parse(&text, &path.display().to_string())
    }

    pub fn build(&self) -> Result<(LatticeGraph, Partition), CliError> {
        let spec = GraphSpec {
            sites: self.sites,
            hoppings: self.hoppings.clone(),
            potentials: self
                .potentials
                .iter()
                .map(|(k, &v)| Ok((site_key(k, "potential")?, v)))
                .collect::<Result<_, CliError>>()?,
            labels: self
                .labels
                .iter()
                .map(|(k, v)| Ok((site_key(k, "label")?, v.clone())))
                .collect::<Result<_, CliError>>()?,
        };
        let graph = LatticeGraph::from_spec(&spec)?;
        let partition = match &self.partition {
            Some(assignment) => Partition::new(&graph, assignment.clone())?,
            None => Partition::trivial(&graph),
        };
        Ok((graph, partition))
    }
}
