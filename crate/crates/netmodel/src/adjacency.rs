use std::io::Write;

use matrixkit::{DenseMatrix, SymmetricOperator};
use rand::Rng;

use crate::rng::row_stream;
use crate::{ModelError, ProbabilityMatrix, Result};

/// How the diagonal of a sampled adjacency matrix is filled.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum DiagonalMode {
    /// `A_ii = 0` (simple graph).
    #[default]
    Hollow,
    /// `A_ii ~ Bernoulli(P_ii)`.
    Bernoulli,
}

impl DiagonalMode {
    pub fn as_str(&self) -> &'static str {
        match self {
            DiagonalMode::Hollow => "hollow",
            DiagonalMode::Bernoulli => "bernoulli",
        }
    }
}

impl std::str::FromStr for DiagonalMode {
    type Err = ModelError;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "hollow" => Ok(DiagonalMode::Hollow),
            "bernoulli" => Ok(DiagonalMode::Bernoulli),
            other => Err(ModelError::InvalidArgument(format!("unknown diagonal mode '{other}'"))),
        }
    }
}

/// Symmetric binary adjacency matrix stored in compressed sparse rows.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AdjacencyMatrix {
    n: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<u32>,
    diagonal_mode: DiagonalMode,
}

impl AdjacencyMatrix {
    /// Build from the upper-triangle neighbour lists (`j ≥ i`, ascending).
    fn from_upper(n: usize, upper: Vec<Vec<u32>>, diagonal_mode: DiagonalMode) -> Self {
        let mut degree = vec![0usize; n];
        for (i, row) in upper.iter().enumerate() {
            for &j in row {
                degree[i] += 1;
                if j as usize != i {
                    degree[j as usize] += 1;
                }
            }
        }
        let mut row_ptr = vec![0usize; n + 1];
        for i in 0..n {
            row_ptr[i + 1] = row_ptr[i] + degree[i];
        }
        let mut fill = row_ptr[..n].to_vec();
        let mut col_idx = vec![0u32; row_ptr[n]];
        // Rows are visited in ascending order, so lower-triangle entries land
        // first and every row ends up sorted.
        for (i, row) in upper.iter().enumerate() {
            for &j in row {
                col_idx[fill[i]] = j;
                fill[i] += 1;
                if j as usize != i {
                    col_idx[fill[j as usize]] = i as u32;
                    fill[j as usize] += 1;
                }
            }
        }
        Self { n, row_ptr, col_idx, diagonal_mode }
    }

    /// Validate a dense symmetric 0/1 matrix.
    pub fn from_dense(m: &DenseMatrix, diagonal_mode: DiagonalMode) -> Result<Self> {
        let n = m.rows();
        if m.cols() != n {
            return Err(ModelError::InvalidAdjacency("matrix is not square".into()));
        }
        let mut upper = vec![Vec::new(); n];
        for (i, row) in upper.iter_mut().enumerate() {
            for j in 0..n {
                let v = m.get(i, j);
                if v != 0.0 && v != 1.0 {
                    return Err(ModelError::InvalidAdjacency(format!("entry ({i}, {j}) = {v} is not binary")));
                }
                if v != m.get(j, i) {
                    return Err(ModelError::InvalidAdjacency(format!("entry ({i}, {j}) breaks symmetry")));
                }
                if i == j && v == 1.0 && diagonal_mode == DiagonalMode::Hollow {
                    return Err(ModelError::InvalidAdjacency(format!("hollow matrix has A[{i}][{i}] = 1")));
                }
                if j >= i && v == 1.0 {
                    row.push(j as u32);
                }
            }
        }
        Ok(Self::from_upper(n, upper, diagonal_mode))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn diagonal_mode(&self) -> DiagonalMode {
        self.diagonal_mode
    }

    /// Sorted neighbour list of vertex `i` (includes `i` for a self-loop).
    pub fn neighbors(&self, i: usize) -> &[u32] {
        &self.col_idx[self.row_ptr[i]..self.row_ptr[i + 1]]
    }

    pub fn degree(&self, i: usize) -> usize {
        self.row_ptr[i + 1] - self.row_ptr[i]
    }

    /// Number of stored ones (both triangles plus the diagonal).
    pub fn nnz(&self) -> usize {
        self.col_idx.len()
    }

    /// Number of undirected edges `i < j`.
    pub fn edge_count(&self) -> usize {
        let loops = (0..self.n).filter(|&i| self.get(i, i)).count();
        (self.nnz() - loops) / 2
    }

    pub fn get(&self, i: usize, j: usize) -> bool {
        self.neighbors(i).binary_search(&(j as u32)).is_ok()
    }

    pub fn to_dense(&self) -> DenseMatrix {
        let mut m = DenseMatrix::zeros(self.n, self.n);
        for i in 0..self.n {
            for &j in self.neighbors(i) {
                m.set(i, j as usize, 1.0);
            }
        }
        m
    }

    /// Iterator over edges `(i, j)` with `i ≤ j`.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.n).flat_map(move |i| {
            self.neighbors(i).iter().filter(move |&&j| j as usize >= i).map(move |&j| (i, j as usize))
        })
    }
}

impl SymmetricOperator for AdjacencyMatrix {
    fn dim(&self) -> usize {
        self.n
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        for (i, yi) in y.iter_mut().enumerate() {
            *yi = self.neighbors(i).iter().map(|&j| x[j as usize]).sum();
        }
    }
}

/// Write one `i,j` line per edge (`i ≤ j`, 0-indexed).
pub fn write_edge_list<W: Write>(adj: &AdjacencyMatrix, mut out: W) -> Result<()> {
    for (i, j) in adj.edges() {
        writeln!(out, "{i},{j}")?;
    }
    Ok(())
}

/// Sample `A` with independent `A_ij ~ Bernoulli(P_ij)` for `i < j`.
/// Equivalent to [`sample_adjacency_trial`] with trial index 0.
pub fn sample_adjacency(p: &ProbabilityMatrix, seed: u64, mode: DiagonalMode) -> AdjacencyMatrix {
    sample_adjacency_trial(p, seed, 0, mode)
}

/// Sample the adjacency matrix of trial `trial` under the global seed.
///
/// Row `i` draws from its own stream keyed by `(seed, trial, i)`, so the
/// result does not depend on how trials are scheduled across threads.
pub fn sample_adjacency_trial(p: &ProbabilityMatrix, seed: u64, trial: u64, mode: DiagonalMode) -> AdjacencyMatrix {
    let n = p.n();
    let entries = p.entries();
    let mut upper = Vec::with_capacity(n);
    for i in 0..n {
        let mut rng = row_stream(seed, trial, i as u64);
        let row = entries.row(i);
        let mut nbrs = Vec::new();
        if mode == DiagonalMode::Bernoulli && rng.gen::<f64>() < row[i] {
            nbrs.push(i as u32);
        }
        for (j, &pij) in row.iter().enumerate().skip(i + 1) {
            if rng.gen::<f64>() < pij {
                nbrs.push(j as u32);
            }
        }
        upper.push(nbrs);
    }
    AdjacencyMatrix::from_upper(n, upper, mode)
}
