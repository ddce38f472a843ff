//! Weighted influence graphs in compressed sparse row form.
//!
//! Entry `a_ij` is the influence of agent `j` on agent `i`; row `i` therefore
//! holds the incoming influences of agent `i`. Diagonals are always zero and
//! all weights are nonnegative.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum BlockLabel {
    L,
    R,
    Unlabeled,
}

impl BlockLabel {
    pub fn as_str(self) -> &'static str {
        match self {
            BlockLabel::L => "L",
            BlockLabel::R => "R",
            BlockLabel::Unlabeled => "unlabeled",
        }
    }
}

/// How edge weights were assigned at construction time.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Normalization {
    /// Every incident edge of agent `i` carries weight `a / deg(i)`, so each
    /// nonzero row sums to `a`. Isolated agents have all-zero rows.
    #[serde(rename = "row-normalized")]
    RowNormalized,
    /// Every edge carries weight `a`.
    #[serde(rename = "unit-weight")]
    UnitWeight,
}

#[derive(Debug, Clone)]
pub struct InfluenceGraph {
    row_ptr: Vec<usize>,
    col_idx: Vec<u32>,
    weights: Vec<f64>,
    /// Weighted row sums (the Laplacian diagonal), cached at construction.
    row_sums: Vec<f64>,
    labels: Vec<BlockLabel>,
    normalization: Normalization,
}

impl InfluenceGraph {
    /// Builds the graph from an undirected simple edge set. Duplicate edges
    /// are deduplicated; self loops are rejected.
    pub fn from_undirected_edges(
        n: usize,
        edges: &[(u32, u32)],
        labels: Vec<BlockLabel>,
        normalization: Normalization,
        a: f64,
    ) -> Result<Self> {
        if labels.len() != n {
            return Err(Error::invalid(format!(
                "label count {} does not match agent count {n}",
                labels.len()
            )));
        }
        if !(a > 0.0) || !a.is_finite() {
            return Err(Error::invalid(format!("influence budget a must be positive, got {a}")));
        }
        let mut adj: Vec<Vec<u32>> = vec![Vec::new(); n];
        for &(u, v) in edges {
            if u == v {
                return Err(Error::invalid(format!("self loop at node {u}")));
            }
            let (u, v) = (u as usize, v as usize);
            if u >= n || v >= n {
                return Err(Error::invalid(format!(
                    "edge ({u}, {v}) out of range for {n} agents"
                )));
            }
            adj[u].push(v as u32);
            adj[v].push(u as u32);
        }
        let mut row_ptr = Vec::with_capacity(n + 1);
        let mut col_idx = Vec::new();
        let mut weights = Vec::new();
        row_ptr.push(0);
        for neigh in adj.iter_mut() {
            neigh.sort_unstable();
            neigh.dedup();
            let deg = neigh.len();
            let w = match normalization {
                Normalization::RowNormalized => {
                    if deg == 0 {
                        0.0
                    } else {
                        a / deg as f64
                    }
                }
                Normalization::UnitWeight => a,
            };
            for &j in neigh.iter() {
                col_idx.push(j);
                weights.push(w);
            }
            row_ptr.push(col_idx.len());
        }
        let row_sums = row_sums(&row_ptr, &weights);
        Ok(InfluenceGraph { row_ptr, col_idx, weights, row_sums, labels, normalization })
    }

    /// Builds a graph from an explicit dense weight matrix (tests, small
    /// hand-constructed networks). Weights are stored as given; the
    /// normalization tag is `UnitWeight` by convention.
    pub fn from_dense(rows: &[Vec<f64>], labels: Vec<BlockLabel>) -> Result<Self> {
        let n = rows.len();
        if labels.len() != n {
            return Err(Error::invalid("label count does not match matrix size"));
        }
        let mut row_ptr = Vec::with_capacity(n + 1);
        let mut col_idx = Vec::new();
        let mut weights = Vec::new();
        row_ptr.push(0);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(Error::invalid(format!("row {i} has length {} != {n}", row.len())));
            }
            for (j, &w) in row.iter().enumerate() {
                if !w.is_finite() || w < 0.0 {
                    return Err(Error::invalid(format!("weight a[{i}][{j}] = {w} must be finite and >= 0")));
                }
                if i == j && w != 0.0 {
                    return Err(Error::invalid(format!("diagonal a[{i}][{i}] must be zero")));
                }
                if w > 0.0 {
                    col_idx.push(j as u32);
                    weights.push(w);
                }
            }
            row_ptr.push(col_idx.len());
        }
        let row_sums = row_sums(&row_ptr, &weights);
        Ok(InfluenceGraph {
            row_ptr,
            col_idx,
            weights,
            row_sums,
            labels,
            normalization: Normalization::UnitWeight,
        })
    }

    pub fn agent_count(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[BlockLabel] {
        &self.labels
    }

    pub fn normalization(&self) -> Normalization {
        self.normalization
    }

    pub fn neighbors(&self, i: usize) -> (&[u32], &[f64]) {
        let r = self.row_ptr[i]..self.row_ptr[i + 1];
        (&self.col_idx[r.clone()], &self.weights[r])
    }

    pub fn degree(&self, i: usize) -> usize {
        self.row_ptr[i + 1] - self.row_ptr[i]
    }

    /// Weighted row sum of row `i` (the Laplacian diagonal entry).
    pub fn row_sum(&self, i: usize) -> f64 {
        self.row_sums[i]
    }

    pub fn max_row_sum(&self) -> f64 {
        self.row_sums.iter().cloned().fold(0.0, f64::max)
    }

    pub fn edge_count(&self) -> usize {
        self.col_idx.len() / 2
    }

    pub fn weight(&self, i: usize, j: usize) -> f64 {
        let (cols, ws) = self.neighbors(i);
        match cols.binary_search(&(j as u32)) {
            Ok(k) => ws[k],
            Err(_) => 0.0,
        }
    }

    pub fn is_symmetric(&self, rel_tol: f64) -> bool {
        for i in 0..self.agent_count() {
            let (cols, ws) = self.neighbors(i);
            for (&j, &w) in cols.iter().zip(ws) {
                let wt = self.weight(j as usize, i);
                let scale = w.abs().max(wt.abs()).max(f64::MIN_POSITIVE);
                if (w - wt).abs() > rel_tol * scale {
                    return false;
                }
            }
        }
        true
    }

    /// The symmetric part (A + A^T) / 2, labels preserved.
    pub fn symmetrized(&self) -> Self {
        let n = self.agent_count();
        let mut dense = vec![vec![0.0; n]; n];
        for i in 0..n {
            let (cols, ws) = self.neighbors(i);
            for (&j, &w) in cols.iter().zip(ws) {
                dense[i][j as usize] += 0.5 * w;
                dense[j as usize][i] += 0.5 * w;
            }
        }
        InfluenceGraph::from_dense(&dense, self.labels.clone())
            .expect("symmetrization preserves validity")
    }

    /// Social-learning drift: out[i] = sum_j a_ij (x[j] - x[i]) = (A x)_i - rowsum_i x_i.
    pub fn social_drift_into(&self, x: &[f64], out: &mut [f64]) {
        for i in 0..self.agent_count() {
            let (cols, ws) = self.neighbors(i);
            let mut acc = 0.0;
            for (&j, &w) in cols.iter().zip(ws) {
                acc += w * x[j as usize];
            }
            out[i] = acc - self.row_sums[i] * x[i];
        }
    }

    /// Same- and cross-block neighbor counts of agent `i` (adjacency, not weights).
    pub fn same_cross_degrees(&self, i: usize) -> (usize, usize) {
        let li = self.labels[i];
        let (cols, _) = self.neighbors(i);
        let mut same = 0;
        let mut cross = 0;
        for &j in cols {
            if self.labels[j as usize] == li {
                same += 1;
            } else {
                cross += 1;
            }
        }
        (same, cross)
    }

    pub fn block_indices(&self, label: BlockLabel) -> Vec<usize> {
        (0..self.agent_count()).filter(|&i| self.labels[i] == label).collect()
    }

    /// Mean opinion of each block, `(mean_L, mean_R)`; `None` for empty blocks.
    pub fn block_means(&self, x: &[f64]) -> (Option<f64>, Option<f64>) {
        let mut sum_l = 0.0;
        let mut n_l = 0usize;
        let mut sum_r = 0.0;
        let mut n_r = 0usize;
        for (i, &lab) in self.labels.iter().enumerate() {
            match lab {
                BlockLabel::L => {
                    sum_l += x[i];
                    n_l += 1;
                }
                BlockLabel::R => {
                    sum_r += x[i];
                    n_r += 1;
                }
                BlockLabel::Unlabeled => {}
            }
        }
        (
            (n_l > 0).then(|| sum_l / n_l as f64),
            (n_r > 0).then(|| sum_r / n_r as f64),
        )
    }

    pub fn undirected_edge_list(&self) -> Vec<(u32, u32)> {
        let mut edges = Vec::with_capacity(self.col_idx.len() / 2);
        for i in 0..self.agent_count() {
            let (cols, _) = self.neighbors(i);
            for &j in cols {
                if (i as u32) < j {
                    edges.push((i as u32, j));
                }
            }
        }
        edges
    }

    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        let n = self.agent_count();
        let mut dense = vec![vec![0.0; n]; n];
        for i in 0..n {
            let (cols, ws) = self.neighbors(i);
            for (&j, &w) in cols.iter().zip(ws) {
                dense[i][j as usize] = w;
            }
        }
        dense
    }
}

fn row_sums(row_ptr: &[usize], weights: &[f64]) -> Vec<f64> {
    row_ptr
        .windows(2)
        .map(|w| weights[w[0]..w[1]].iter().sum())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn labels(n: usize) -> Vec<BlockLabel> {
        (0..n).map(|i| if i % 2 == 0 { BlockLabel::L } else { BlockLabel::R }).collect()
    }

    #[test]
    fn row_normalized_rows_sum_to_a() {
        let edges = [(0, 1), (0, 2), (0, 3), (1, 2)];
        let g = InfluenceGraph::from_undirected_edges(
            4,
            &edges,
            labels(4),
            Normalization::RowNormalized,
            1.5,
        )
        .unwrap();
        for i in 0..4 {
            if g.degree(i) > 0 {
                assert!((g.row_sum(i) - 1.5).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn isolated_agents_have_zero_rows() {
        let g = InfluenceGraph::from_undirected_edges(
            3,
            &[(0, 1)],
            labels(3),
            Normalization::RowNormalized,
            1.0,
        )
        .unwrap();
        assert_eq!(g.degree(2), 0);
        assert_eq!(g.row_sum(2), 0.0);
    }

    #[test]
    fn laplacian_rows_sum_to_zero_exactly() {
        // diag - sum(offdiag) computed in the same order is exactly zero
        let edges = [(0, 1), (1, 2), (0, 2), (2, 3)];
        let g = InfluenceGraph::from_undirected_edges(
            4,
            &edges,
            labels(4),
            Normalization::RowNormalized,
            1.0,
        )
        .unwrap();
        for i in 0..4 {
            let (_, ws) = g.neighbors(i);
            let off: f64 = ws.iter().sum();
            assert_eq!(g.row_sum(i) - off, 0.0);
        }
    }

    #[test]
    fn duplicate_edges_are_deduplicated() {
        let g = InfluenceGraph::from_undirected_edges(
            3,
            &[(0, 1), (1, 0), (0, 1)],
            labels(3),
            Normalization::UnitWeight,
            1.0,
        )
        .unwrap();
        assert_eq!(g.degree(0), 1);
        assert_eq!(g.edge_count(), 1);
    }

    #[test]
    fn self_loop_rejected() {
        let err = InfluenceGraph::from_undirected_edges(
            3,
            &[(1, 1)],
            labels(3),
            Normalization::UnitWeight,
            1.0,
        );
        assert!(matches!(err, Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn symmetry_check_and_symmetrization() {
        let dense = vec![
            vec![0.0, 1.0, 0.0],
            vec![0.0, 0.0, 1.0],
            vec![1.0, 0.0, 0.0],
        ];
        let g = InfluenceGraph::from_dense(&dense, labels(3)).unwrap();
        assert!(!g.is_symmetric(1e-12));
        let s = g.symmetrized();
        assert!(s.is_symmetric(1e-12));
        assert!((s.weight(0, 1) - 0.5).abs() < 1e-15);
        assert!((s.weight(1, 0) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn social_drift_matches_dense_laplacian() {
        let dense = vec![
            vec![0.0, 2.0, 0.5],
            vec![2.0, 0.0, 0.0],
            vec![0.5, 0.0, 0.0],
        ];
        let g = InfluenceGraph::from_dense(&dense, labels(3)).unwrap();
        let x = [1.0, -2.0, 0.5];
        let mut out = [0.0; 3];
        g.social_drift_into(&x, &mut out);
        for i in 0..3 {
            let expect: f64 = (0..3).map(|j| dense[i][j] * (x[j] - x[i])).sum();
            assert!((out[i] - expect).abs() < 1e-14);
        }
    }
}
