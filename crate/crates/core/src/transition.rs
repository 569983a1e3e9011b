//! Per-realization transition matrices.
//!
//! For a transient raster k the diagonal is the holding probability and each
//! open neighbor m receives weight `exp(-(len(m) + 1))`, where `len(m)` is the
//! hop distance from m to the trapping set. Off-diagonal weights are scaled to
//! sum to `1 - holding`. Trapping rows are absorbing.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{GraphError, RasterGraph, RasterId};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TransitionError {
    #[error("holding probability {0} is outside [0, 1)")]
    InvalidHolding(f64),
    #[error("trapping set is empty")]
    EmptyTrappingSet,
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// Conditions noticed while building a matrix; none of them is fatal.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "raster")]
pub enum TransitionWarning {
    /// A transient raster with no open neighbor; its row is pure holding.
    NoAdjacentNonBlocked(RasterId),
    /// The trapping set cannot be reached; neighbor weights are uniform.
    UnreachableTarget(RasterId),
}

/// One value of the static joint variable D.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DRealization {
    pub index: usize,
    pub target: String,
    pub immediacy: String,
    pub holding: f64,
}

impl DRealization {
    pub fn label(&self) -> String {
        format!("{}/{}", self.target, self.immediacy)
    }
}

/// Dense row-stochastic matrix over the graph's node indices.
#[derive(Debug, Clone, PartialEq)]
pub struct TransitionModel {
    n: usize,
    matrix: Vec<f64>,
    rows: Vec<Vec<(usize, f64)>>,
    trapping: Vec<usize>,
    is_trapping: Vec<bool>,
    holding: f64,
    warnings: Vec<TransitionWarning>,
}

impl TransitionModel {
    /// Wraps an explicit matrix; rows must be stochastic within 1e-12.
    pub fn from_dense(n: usize, matrix: Vec<f64>, trapping: Vec<usize>, holding: f64) -> Self {
        assert_eq!(matrix.len(), n * n, "matrix must be n x n");
        let rows = (0..n)
            .map(|i| (0..n).filter_map(|j| Some((j, matrix[i * n + j])).filter(|&(_, p)| p != 0.0)).collect())
            .collect();
        let mut is_trapping = vec![false; n];
        for &t in &trapping {
            is_trapping[t] = true;
        }
        Self { n, matrix, rows, trapping, is_trapping, holding, warnings: Vec::new() }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn get(&self, from: usize, to: usize) -> f64 {
        self.matrix[from * self.n + to]
    }

    pub fn row(&self, from: usize) -> &[f64] {
        &self.matrix[from * self.n..(from + 1) * self.n]
    }

    /// Nonzero entries of a row as (column, probability).
    pub fn sparse_row(&self, from: usize) -> &[(usize, f64)] {
        &self.rows[from]
    }

    pub fn trapping(&self) -> &[usize] {
        &self.trapping
    }

    pub fn is_trapping(&self, index: usize) -> bool {
        self.is_trapping[index]
    }

    pub fn holding(&self) -> f64 {
        self.holding
    }

    pub fn warnings(&self) -> &[TransitionWarning] {
        &self.warnings
    }

    /// Row vector times matrix: `out = x P`.
    pub fn propagate_into(&self, x: &[f64], out: &mut [f64]) {
        out.iter_mut().for_each(|v| *v = 0.0);
        for (i, &xi) in x.iter().enumerate() {
            if xi != 0.0 {
                for &(j, p) in &self.rows[i] {
                    out[j] += xi * p;
                }
            }
        }
    }

    pub fn propagate(&self, x: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.n];
        self.propagate_into(x, &mut out);
        out
    }

    /// Audit export: one line per nonzero entry, `row,col,probability` with raster ids.
    pub fn to_csv(&self, graph: &RasterGraph) -> Result<String, csv::Error> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["row", "col", "probability"])?;
        for i in 0..self.n {
            for &(j, p) in &self.rows[i] {
                w.serialize((graph.id(i), graph.id(j), p))?;
            }
        }
        Ok(String::from_utf8(w.into_inner().map_err(|e| e.into_error())?).expect("csv output is utf-8"))
    }
}

/// Builds the transition matrix for one trapping set and holding probability.
pub fn build_transition_matrix(
    graph: &RasterGraph,
    trapping: &[RasterId],
    holding: f64,
) -> Result<TransitionModel, TransitionError> {
    if !(0.0..1.0).contains(&holding) {
        return Err(TransitionError::InvalidHolding(holding));
    }
    if trapping.is_empty() {
        return Err(TransitionError::EmptyTrappingSet);
    }
    let trap = graph.indices(trapping)?;
    let n = graph.len();
    let dist = graph.distances_to(&trap);
    let mut is_trap = vec![false; n];
    for &t in &trap {
        is_trap[t] = true;
    }
    let mut matrix = vec![0.0; n * n];
    let mut warnings = Vec::new();
    for k in 0..n {
        let row = &mut matrix[k * n..(k + 1) * n];
        if is_trap[k] || graph.is_blocked(k) {
            row[k] = 1.0;
            continue;
        }
        let nbs: Vec<usize> = graph.open_neighbors(k).collect();
        if nbs.is_empty() {
            warnings.push(TransitionWarning::NoAdjacentNonBlocked(graph.id(k)));
            row[k] = 1.0;
            continue;
        }
        let weights: Vec<f64> = if dist[k].is_some() {
            // every open neighbor of a node that reaches the set also reaches it
            nbs.iter().map(|&m| (-(f64::from(dist[m].unwrap()) + 1.0)).exp()).collect()
        } else {
            warnings.push(TransitionWarning::UnreachableTarget(graph.id(k)));
            vec![1.0; nbs.len()]
        };
        let total: f64 = weights.iter().sum();
        row[k] = holding;
        for (&m, w) in nbs.iter().zip(weights) {
            row[m] += w / total * (1.0 - holding);
        }
    }
    let mut model = TransitionModel::from_dense(n, matrix, trap, holding);
    model.warnings = warnings;
    Ok(model)
}
