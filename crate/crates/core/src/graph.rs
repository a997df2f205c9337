//! Immutable undirected simple graphs.
//!
//! Vertices carry external string labels mapped to dense ids `0..n` in
//! first-appearance order. Adjacency is stored in CSR form with sorted
//! neighbor lists. Degree classes and two-hop neighborhoods are indexed
//! because every variance computation needs them.

use std::collections::HashMap;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Compressed sparse rows: `rows[i]` is `targets[offsets[i]..offsets[i + 1]]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Csr {
    offsets: Vec<usize>,
    targets: Vec<usize>,
}

impl Csr {
    fn from_rows(rows: &[Vec<usize>]) -> Self {
        let mut offsets = Vec::with_capacity(rows.len() + 1);
        let mut targets = Vec::with_capacity(rows.iter().map(Vec::len).sum());
        offsets.push(0);
        for row in rows {
            targets.extend_from_slice(row);
            offsets.push(targets.len());
        }
        Self { offsets, targets }
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[usize] {
        &self.targets[self.offsets[i]..self.offsets[i + 1]]
    }

    #[inline]
    pub fn row_len(&self, i: usize) -> usize {
        self.offsets[i + 1] - self.offsets[i]
    }

    pub fn rows(&self) -> usize {
        self.offsets.len() - 1
    }

    /// Total number of stored entries.
    pub fn nnz(&self) -> usize {
        self.targets.len()
    }

    /// Sparse 0/1 matrix times a dense vector: `out[i] = Σ_{j ∈ row i} x[j]`.
    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        (0..self.rows())
            .map(|i| crate::sum::sum(self.row(i).iter().map(|&j| x[j])))
            .collect()
    }
}

/// The vertices sharing one degree value.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DegreeClass {
    pub degree: usize,
    pub members: Vec<usize>,
}

/// Degree and denseness summary of a graph.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DegreeStats {
    pub n: usize,
    pub edges: usize,
    /// Maximum degree.
    pub d_mx: usize,
    /// Average degree.
    pub d_av: f64,
    /// `(1/n) Σ_{i: d(i) ≥ 1} 1/d(i)`.
    pub d_avi: f64,
    /// Median degree (mean of the two middle values when `n` is even).
    pub d_med: f64,
    /// Largest two-hop neighborhood.
    pub d_mx2: usize,
    /// `d_mx2⁴ / n`. Small values indicate a sparse enough graph for the
    /// studentized statistic to behave like its large-sample limit.
    pub denseness_ratio: f64,
    pub isolated: usize,
}

#[derive(Debug)]
pub struct Graph {
    labels: Vec<String>,
    label_index: HashMap<String, usize>,
    adjacency: Csr,
    classes: Vec<DegreeClass>,
    class_of: Vec<usize>,
    duplicates_collapsed: usize,
    two_hop: OnceLock<Csr>,
}

impl Clone for Graph {
    fn clone(&self) -> Self {
        let two_hop = OnceLock::new();
        if let Some(csr) = self.two_hop.get() {
            let _ = two_hop.set(csr.clone());
        }
        Self {
            labels: self.labels.clone(),
            label_index: self.label_index.clone(),
            adjacency: self.adjacency.clone(),
            classes: self.classes.clone(),
            class_of: self.class_of.clone(),
            duplicates_collapsed: self.duplicates_collapsed,
            two_hop,
        }
    }
}

impl PartialEq for Graph {
    fn eq(&self, other: &Self) -> bool {
        self.labels == other.labels && self.adjacency == other.adjacency
    }
}

/// Build a graph from labelled edge pairs plus an optional list of declared
/// vertices (needed for isolated vertices).
///
/// Declared vertices get ids first, in list order; remaining labels get ids
/// in order of first appearance in `edges`. Repeated and reversed pairs are
/// collapsed.
pub fn build_graph<S: AsRef<str>>(edges: &[(S, S)], vertices: Option<&[S]>) -> Result<Graph> {
    let mut labels: Vec<String> = Vec::new();
    let mut label_index: HashMap<String, usize> = HashMap::new();
    let mut intern = |label: &str| -> usize {
        if let Some(&id) = label_index.get(label) {
            return id;
        }
        let id = labels.len();
        labels.push(label.to_owned());
        label_index.insert(label.to_owned(), id);
        id
    };

    for v in vertices.unwrap_or(&[]) {
        intern(v.as_ref());
    }
    let mut pairs = Vec::with_capacity(edges.len());
    for (a, b) in edges {
        let (a, b) = (a.as_ref(), b.as_ref());
        if a == b {
            return Err(Error::SelfLoop { label: a.to_owned() });
        }
        pairs.push((intern(a), intern(b)));
    }
    if labels.is_empty() {
        return Err(Error::EmptyGraph);
    }
    Graph::assemble(labels, label_index, &pairs)
}

impl Graph {
    /// Build from dense ids `0..n`; labels are the decimal ids.
    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        if n == 0 {
            return Err(Error::EmptyGraph);
        }
        let labels: Vec<String> = (0..n).map(|i| i.to_string()).collect();
        for &(a, b) in edges {
            if a >= n || b >= n {
                return Err(Error::Index { index: a.max(b), n });
            }
            if a == b {
                return Err(Error::SelfLoop { label: labels[a].clone() });
            }
        }
        let label_index = labels.iter().cloned().zip(0..).collect();
        Self::assemble(labels, label_index, edges)
    }

    fn assemble(
        labels: Vec<String>,
        label_index: HashMap<String, usize>,
        pairs: &[(usize, usize)],
    ) -> Result<Self> {
        let n = labels.len();
        let mut rows: Vec<Vec<usize>> = vec![Vec::new(); n];
        for &(a, b) in pairs {
            rows[a].push(b);
            rows[b].push(a);
        }
        let mut stored = 0;
        for row in &mut rows {
            row.sort_unstable();
            row.dedup();
            stored += row.len();
        }
        let edge_count = stored / 2;
        let duplicates_collapsed = pairs.len() - edge_count;

        if n < 2 || edge_count == n * (n - 1) / 2 {
            return Err(Error::CompleteGraph);
        }
        if let Some(i) = rows.iter().position(|r| r.len() == n - 1) {
            return Err(Error::ClosedNeighborhood {
                label: labels[i].clone(),
                others: n - 1,
            });
        }

        let mut by_degree: std::collections::BTreeMap<usize, Vec<usize>> = Default::default();
        for (i, row) in rows.iter().enumerate() {
            by_degree.entry(row.len()).or_default().push(i);
        }
        let mut class_of = vec![0; n];
        let classes: Vec<DegreeClass> = by_degree
            .into_iter()
            .enumerate()
            .map(|(k, (degree, members))| {
                for &v in &members {
                    class_of[v] = k;
                }
                DegreeClass { degree, members }
            })
            .collect();

        Ok(Self {
            labels,
            label_index,
            adjacency: Csr::from_rows(&rows),
            classes,
            class_of,
            duplicates_collapsed,
            two_hop: OnceLock::new(),
        })
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.labels.len()
    }

    pub fn edge_count(&self) -> usize {
        self.adjacency.nnz() / 2
    }

    /// Number of input pairs dropped as repeats or reversed repeats.
    pub fn duplicates_collapsed(&self) -> usize {
        self.duplicates_collapsed
    }

    #[inline]
    pub fn degree(&self, i: usize) -> usize {
        self.adjacency.row_len(i)
    }

    pub fn degrees(&self) -> Vec<usize> {
        (0..self.n()).map(|i| self.degree(i)).collect()
    }

    #[inline]
    pub fn neighbors(&self, i: usize) -> &[usize] {
        self.adjacency.row(i)
    }

    pub fn adjacency(&self) -> &Csr {
        &self.adjacency
    }

    pub fn label(&self, i: usize) -> &str {
        &self.labels[i]
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn id_of(&self, label: &str) -> Option<usize> {
        self.label_index.get(label).copied()
    }

    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        self.neighbors(i).binary_search(&j).is_ok()
    }

    /// Unique edges `(i, j)` with `i < j`, sorted by `i` then `j`.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.n()).flat_map(move |i| {
            self.neighbors(i)
                .iter()
                .filter(move |&&j| j > i)
                .map(move |&j| (i, j))
        })
    }

    /// Degree classes in increasing degree order; each member list is sorted.
    pub fn degree_classes(&self) -> &[DegreeClass] {
        &self.classes
    }

    /// Index into [`Graph::degree_classes`] of the class containing `i`.
    #[inline]
    pub fn class_of(&self, i: usize) -> usize {
        self.class_of[i]
    }

    /// Vertices within two edges of each vertex, excluding the vertex itself.
    /// Computed on first use and cached.
    pub fn two_neighborhoods(&self) -> &Csr {
        self.two_hop
            .get_or_init(|| Csr::from_rows(&two_hop_rows(self.n(), |i| self.neighbors(i))))
    }

    pub fn two_neighborhood(&self, i: usize) -> Result<&[usize]> {
        if i >= self.n() {
            return Err(Error::Index { index: i, n: self.n() });
        }
        Ok(self.two_neighborhoods().row(i))
    }

    pub fn degree_stats(&self) -> DegreeStats {
        let two_hop = self.two_neighborhoods();
        stats_from_parts(self.n(), self.edge_count(), |i| self.degree(i), |i| {
            two_hop.row_len(i)
        })
    }
}

fn two_hop_rows<'a>(n: usize, neighbors: impl Fn(usize) -> &'a [usize]) -> Vec<Vec<usize>> {
    let mut stamp = vec![usize::MAX; n];
    (0..n)
        .map(|i| {
            stamp[i] = i;
            let mut row = Vec::new();
            for &j in neighbors(i) {
                if stamp[j] != i {
                    stamp[j] = i;
                    row.push(j);
                }
                for &k in neighbors(j) {
                    if stamp[k] != i {
                        stamp[k] = i;
                        row.push(k);
                    }
                }
            }
            row.sort_unstable();
            row
        })
        .collect()
}

fn stats_from_parts(
    n: usize,
    edges: usize,
    degree: impl Fn(usize) -> usize,
    two_hop_len: impl Fn(usize) -> usize,
) -> DegreeStats {
    let mut degrees: Vec<usize> = (0..n).map(degree).collect();
    let d_mx = degrees.iter().copied().max().unwrap_or(0);
    let d_av = 2.0 * edges as f64 / n as f64;
    let d_avi = crate::sum::sum(
        degrees
            .iter()
            .filter(|&&d| d > 0)
            .map(|&d| 1.0 / d as f64),
    ) / n as f64;
    let isolated = degrees.iter().filter(|&&d| d == 0).count();
    degrees.sort_unstable();
    let d_med = if n % 2 == 1 {
        degrees[n / 2] as f64
    } else {
        (degrees[n / 2 - 1] + degrees[n / 2]) as f64 / 2.0
    };
    let d_mx2 = (0..n).map(two_hop_len).max().unwrap_or(0);
    DegreeStats {
        n,
        edges,
        d_mx,
        d_av,
        d_avi,
        d_med,
        d_mx2,
        denseness_ratio: (d_mx2 as f64).powi(4) / n as f64,
        isolated,
    }
}

/// Degree statistics of an edge list on `0..n` without the validity checks
/// [`Graph`] enforces, so graphs the estimators reject (for example one with
/// a vertex adjacent to all others) can still be diagnosed.
pub fn degree_stats_of_edges(n: usize, edges: &[(usize, usize)]) -> Result<DegreeStats> {
    if n == 0 {
        return Err(Error::EmptyGraph);
    }
    let mut rows: Vec<Vec<usize>> = vec![Vec::new(); n];
    for &(a, b) in edges {
        if a >= n || b >= n {
            return Err(Error::Index { index: a.max(b), n });
        }
        if a == b {
            return Err(Error::SelfLoop { label: a.to_string() });
        }
        rows[a].push(b);
        rows[b].push(a);
    }
    for row in &mut rows {
        row.sort_unstable();
        row.dedup();
    }
    let edge_count = rows.iter().map(Vec::len).sum::<usize>() / 2;
    let two_hop = two_hop_rows(n, |i| rows[i].as_slice());
    Ok(stats_from_parts(n, edge_count, |i| rows[i].len(), |i| {
        two_hop[i].len()
    }))
}

/// Free-function form of [`Graph::degree_stats`].
pub fn degree_stats(g: &Graph) -> DegreeStats {
    g.degree_stats()
}

/// Free-function form of [`Graph::two_neighborhood`].
pub fn two_neighborhood(g: &Graph, i: usize) -> Result<&[usize]> {
    g.two_neighborhood(i)
}
