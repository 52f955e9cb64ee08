//! Weighted bipartite graphs and their reduction to a square matrix of
//! virtual-output-queue lengths.
//!
//! Input port `i` of the emulated crossbar corresponds to left vertex `i`,
//! output port `j` to right vertex `j`, and the queue length `w[i][j]` to the
//! weight of edge `(i, j)`. Missing and negative edges become empty queues.

use std::collections::HashSet;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Edge {
    pub left: usize,
    pub right: usize,
    pub weight: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BipartiteGraph {
    num_left: usize,
    num_right: usize,
    edges: Vec<Edge>,
}

impl BipartiteGraph {
    /// Rejects out-of-range endpoints, duplicate `(left, right)` pairs and
    /// non-finite weights.
    pub fn new(num_left: usize, num_right: usize, edges: Vec<Edge>) -> Result<Self> {
        let mut seen = HashSet::with_capacity(edges.len());
        for e in &edges {
            check_edge(num_left, num_right, e)?;
            if !seen.insert((e.left, e.right)) {
                return Err(Error::invalid(format!(
                    "duplicate edge ({}, {})",
                    e.left, e.right
                )));
            }
        }
        Ok(Self {
            num_left,
            num_right,
            edges,
        })
    }

    pub fn num_left(&self) -> usize {
        self.num_left
    }

    pub fn num_right(&self) -> usize {
        self.num_right
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }
}

fn check_edge(num_left: usize, num_right: usize, e: &Edge) -> Result<()> {
    if e.left >= num_left {
        return Err(Error::invalid(format!(
            "left index {} out of range (num_left = {num_left})",
            e.left
        )));
    }
    if e.right >= num_right {
        return Err(Error::invalid(format!(
            "right index {} out of range (num_right = {num_right})",
            e.right
        )));
    }
    if !e.weight.is_finite() {
        return Err(Error::invalid(format!("non-finite weight {}", e.weight)));
    }
    Ok(())
}

/// Dense `n x n` matrix of nonnegative queue lengths, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightMatrix {
    n: usize,
    w: Vec<f64>,
}

impl WeightMatrix {
    pub fn new(n: usize, w: Vec<f64>) -> Result<Self> {
        if n == 0 {
            return Err(Error::invalid("matrix must have at least one port"));
        }
        if w.len() != n * n {
            return Err(Error::invalid(format!(
                "expected {} entries for n = {n}, got {}",
                n * n,
                w.len()
            )));
        }
        if let Some(bad) = w.iter().find(|x| !x.is_finite() || **x < 0.0) {
            return Err(Error::invalid(format!(
                "weights must be finite and nonnegative, found {bad}"
            )));
        }
        Ok(Self { n, w })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        if let Some(r) = rows.iter().find(|r| r.len() != n) {
            return Err(Error::invalid(format!(
                "row of length {} in a {n}-row matrix",
                r.len()
            )));
        }
        Self::new(n, rows.concat())
    }

    pub fn zeros(n: usize) -> Result<Self> {
        Self::new(n, vec![0.0; n * n])
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, input: usize, output: usize) -> f64 {
        self.w[input * self.n + output]
    }

    #[inline]
    pub fn row(&self, input: usize) -> &[f64] {
        &self.w[input * self.n..(input + 1) * self.n]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.w.chunks_exact(self.n)
    }

    pub fn max_weight(&self) -> f64 {
        self.w.iter().copied().fold(0.0, f64::max)
    }

    /// Complete bipartite graph with one edge per entry, zero entries included.
    pub fn to_graph(&self) -> BipartiteGraph {
        let edges = (0..self.n)
            .flat_map(|i| {
                (0..self.n).map(move |j| (i, j))
            })
            .map(|(left, right)| Edge {
                left,
                right,
                weight: self.get(left, right),
            })
            .collect();
        BipartiteGraph {
            num_left: self.n,
            num_right: self.n,
            edges,
        }
    }

    /// Same matrix with rows reordered: row `k` of the result is row
    /// `order[k]` of `self`.
    pub fn permute_rows(&self, order: &[usize]) -> Result<Self> {
        Error::check_dim(self.n, order.len())?;
        let w = order.iter().flat_map(|&r| self.row(r).iter().copied()).collect();
        Self::new(self.n, w)
    }
}

/// Balances and densifies `graph`: `n = max(num_left, num_right)`, dummy
/// vertices and missing edges become zero-length queues, negative-weight
/// edges are dropped.
pub fn reduce(graph: &BipartiteGraph) -> Result<WeightMatrix> {
    let n = graph.num_left.max(graph.num_right);
    if n == 0 {
        return Err(Error::invalid("graph has no vertices"));
    }
    let mut w = vec![0.0; n * n];
    for e in &graph.edges {
        if e.weight > 0.0 {
            w[e.left * n + e.right] = e.weight;
        }
    }
    WeightMatrix::new(n, w)
}

/// Complete `n x n` instance with entries drawn i.i.d. uniform on `[lo, hi)`.
pub fn generate_complete_uniform(n: usize, lo: f64, hi: f64, seed: u64) -> Result<WeightMatrix> {
    if n == 0 {
        return Err(Error::invalid("n must be at least 1"));
    }
    if !(lo >= 0.0) {
        return Err(Error::invalid(format!("lower bound {lo} must be nonnegative")));
    }
    if !(lo < hi) || !hi.is_finite() {
        return Err(Error::invalid(format!("empty weight range [{lo}, {hi})")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let w = (0..n * n).map(|_| rng.random_range(lo..hi)).collect();
    WeightMatrix::new(n, w)
}

fn parse_err(path: &Path, line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        path: path.to_path_buf(),
        line,
        message: message.into(),
    }
}

fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Non-empty, non-comment lines with their 1-based line numbers.
fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(k, l)| (k + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}

fn parse_field<T: std::str::FromStr>(path: &Path, line: usize, tok: &str, what: &str) -> Result<T> {
    tok.parse()
        .map_err(|_| parse_err(path, line, format!("invalid {what} `{tok}`")))
}

/// Parses the edge-list format: a `n_left n_right` header, then one
/// `i j w` line per edge. Lines starting with `#` are comments.
pub fn parse_graph(text: &str, path: &Path) -> Result<BipartiteGraph> {
    let mut lines = content_lines(text);
    let (hline, header) = lines
        .next()
        .ok_or_else(|| parse_err(path, 1, "missing `n_left n_right` header"))?;
    let sizes: Vec<&str> = header.split_whitespace().collect();
    if sizes.len() != 2 {
        return Err(parse_err(path, hline, "header must be `n_left n_right`"));
    }
    let num_left: usize = parse_field(path, hline, sizes[0], "vertex count")?;
    let num_right: usize = parse_field(path, hline, sizes[1], "vertex count")?;

    let mut edges = Vec::new();
    let mut seen = HashSet::new();
    for (line, l) in lines {
        let toks: Vec<&str> = l.split_whitespace().collect();
        if toks.len() != 3 {
            return Err(parse_err(path, line, "edge line must be `i j w`"));
        }
        let e = Edge {
            left: parse_field(path, line, toks[0], "left index")?,
            right: parse_field(path, line, toks[1], "right index")?,
            weight: parse_field(path, line, toks[2], "weight")?,
        };
        check_edge(num_left, num_right, &e).map_err(|err| match err {
            Error::InvalidInput(m) => parse_err(path, line, m),
            other => other,
        })?;
        if !seen.insert((e.left, e.right)) {
            return Err(parse_err(
                path,
                line,
                format!("duplicate edge ({}, {})", e.left, e.right),
            ));
        }
        edges.push(e);
    }
    Ok(BipartiteGraph {
        num_left,
        num_right,
        edges,
    })
}

pub fn read_graph(path: impl AsRef<Path>) -> Result<BipartiteGraph> {
    let path = path.as_ref();
    parse_graph(&read_text(path)?, path)
}

/// Parses the matrix format: `n` on the first line, then `n` rows of `n`
/// whitespace-separated decimals.
pub fn parse_matrix(text: &str, path: &Path) -> Result<WeightMatrix> {
    let mut lines = content_lines(text);
    let (hline, header) = lines
        .next()
        .ok_or_else(|| parse_err(path, 1, "missing size header"))?;
    let n: usize = parse_field(path, hline, header, "matrix size")?;
    if n == 0 {
        return Err(parse_err(path, hline, "matrix size must be at least 1"));
    }
    let mut w = Vec::with_capacity(n * n);
    let mut rows = 0;
    for (line, l) in lines {
        if rows == n {
            return Err(parse_err(path, line, format!("more than {n} rows")));
        }
        let before = w.len();
        for tok in l.split_whitespace() {
            let x: f64 = parse_field(path, line, tok, "weight")?;
            if !x.is_finite() || x < 0.0 {
                return Err(parse_err(path, line, format!("weight {tok} must be finite and nonnegative")));
            }
            w.push(x);
        }
        if w.len() - before != n {
            return Err(parse_err(
                path,
                line,
                format!("expected {n} entries, found {}", w.len() - before),
            ));
        }
        rows += 1;
    }
    if rows != n {
        return Err(parse_err(path, hline, format!("expected {n} rows, found {rows}")));
    }
    WeightMatrix::new(n, w)
}

pub fn read_matrix(path: impl AsRef<Path>) -> Result<WeightMatrix> {
    let path = path.as_ref();
    parse_matrix(&read_text(path)?, path)
}

/// Reads either file format, telling them apart by the header: one field
/// for a matrix, two for an edge list. Edge lists are reduced.
pub fn read_instance(path: impl AsRef<Path>) -> Result<WeightMatrix> {
    let path = path.as_ref();
    let text = read_text(path)?;
    let header_fields = content_lines(&text)
        .next()
        .map_or(0, |(_, l)| l.split_whitespace().count());
    if header_fields == 1 {
        parse_matrix(&text, path)
    } else {
        reduce(&parse_graph(&text, path)?)
    }
}

pub fn format_matrix(matrix: &WeightMatrix) -> String {
    let mut out = String::new();
    writeln!(out, "{}", matrix.n()).unwrap();
    for row in matrix.rows() {
        let mut sep = "";
        for x in row {
            // `{}` on f64 prints the shortest representation that parses back
            // to the same value.
            write!(out, "{sep}{x}").unwrap();
            sep = " ";
        }
        out.push('\n');
    }
    out
}

pub fn write_matrix(matrix: &WeightMatrix, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, format_matrix(matrix)).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn edge(left: usize, right: usize, weight: f64) -> Edge {
        Edge { left, right, weight }
    }

    fn p() -> &'static Path {
        Path::new("test.txt")
    }

    #[test]
    fn reduce_single_edge() {
        let g = BipartiteGraph::new(1, 1, vec![edge(0, 0, 5.0)]).unwrap();
        let m = reduce(&g).unwrap();
        assert_eq!(m, WeightMatrix::from_rows(&[vec![5.0]]).unwrap());
    }

    #[test]
    fn reduce_pads_unbalanced_graph() {
        let g = BipartiteGraph::new(2, 3, vec![edge(0, 0, 4.0), edge(1, 2, 7.0)]).unwrap();
        let m = reduce(&g).unwrap();
        assert_eq!(m.n(), 3);
        for i in 0..3 {
            for j in 0..3 {
                let expect = match (i, j) {
                    (0, 0) => 4.0,
                    (1, 2) => 7.0,
                    _ => 0.0,
                };
                assert_eq!(m.get(i, j), expect);
            }
        }
    }

    #[test]
    fn reduce_drops_negative_edges() {
        let g = BipartiteGraph::new(2, 2, vec![edge(0, 1, -3.0), edge(0, 0, 2.0)]).unwrap();
        let m = reduce(&g).unwrap();
        assert_eq!(m.get(0, 1), 0.0);
        assert_eq!(m.get(0, 0), 2.0);
    }

    #[test]
    fn reduce_rejects_empty_graph() {
        let g = BipartiteGraph::new(0, 0, vec![]).unwrap();
        assert!(matches!(reduce(&g), Err(Error::InvalidInput(_))));
    }

    #[test]
    fn graph_rejects_duplicates_and_bad_indices() {
        assert!(BipartiteGraph::new(2, 2, vec![edge(0, 0, 1.0), edge(0, 0, 2.0)]).is_err());
        assert!(BipartiteGraph::new(2, 2, vec![edge(2, 0, 1.0)]).is_err());
        assert!(BipartiteGraph::new(2, 2, vec![edge(0, 0, f64::NAN)]).is_err());
    }

    #[test]
    fn generate_in_range_and_deterministic() {
        let m = generate_complete_uniform(100, 10.0, 100.0, 7).unwrap();
        assert_eq!(m.rows().count(), 100);
        assert!(m.rows().flatten().all(|x| (10.0..=100.0).contains(x)));
        assert_eq!(m, generate_complete_uniform(100, 10.0, 100.0, 7).unwrap());
        assert_ne!(m, generate_complete_uniform(100, 10.0, 100.0, 8).unwrap());

        let one = generate_complete_uniform(1, 2.0, 3.0, 0).unwrap();
        assert!((2.0..=3.0).contains(&one.get(0, 0)));
    }

    #[test]
    fn generate_rejects_bad_ranges() {
        assert!(generate_complete_uniform(4, -1.0, 1.0, 0).is_err());
        assert!(generate_complete_uniform(4, 5.0, 5.0, 0).is_err());
        assert!(generate_complete_uniform(0, 0.0, 1.0, 0).is_err());
    }

    #[test]
    fn parse_graph_with_comments() {
        let text = "# a tiny graph\n2 3\n0 0 4\n\n# second edge\n1 2 7.5\n";
        let g = parse_graph(text, p()).unwrap();
        assert_eq!((g.num_left(), g.num_right()), (2, 3));
        assert_eq!(g.edges(), &[edge(0, 0, 4.0), edge(1, 2, 7.5)]);
    }

    #[test]
    fn empty_edge_list_reduces_to_zero_matrix() {
        let g = parse_graph("2 2\n", p()).unwrap();
        assert_eq!(reduce(&g).unwrap(), WeightMatrix::zeros(2).unwrap());
    }

    #[test]
    fn parse_errors_name_the_line() {
        let cases = [
            ("2 2\n0 0 1\n2 0 1\n", 3),
            ("2 2\n0 0 abc\n", 2),
            ("2 2\n0 0\n", 2),
            ("2 2\n# c\n0 1 1\n0 1 2\n", 4),
            ("two 2\n", 1),
        ];
        for (text, want) in cases {
            match parse_graph(text, p()) {
                Err(Error::Parse { line, .. }) => assert_eq!(line, want, "{text:?}"),
                other => panic!("expected parse error for {text:?}, got {other:?}"),
            }
        }
    }

    #[test]
    fn matrix_parse_errors() {
        assert!(matches!(parse_matrix("2\n1 2\n", p()), Err(Error::Parse { line: 1, .. })));
        assert!(matches!(parse_matrix("2\n1 2\n3\n", p()), Err(Error::Parse { line: 3, .. })));
        assert!(matches!(parse_matrix("1\n-1\n", p()), Err(Error::Parse { line: 2, .. })));
        assert!(matches!(parse_matrix("1\n1\n2\n", p()), Err(Error::Parse { line: 3, .. })));
    }

    #[test]
    fn read_instance_detects_format() {
        let dir = std::env::temp_dir().join(format!("rqps-inst-{}", std::process::id()));
        fs::create_dir_all(&dir).unwrap();
        let mpath = dir.join("m.txt");
        let gpath = dir.join("g.txt");
        let m = WeightMatrix::from_rows(&[vec![1.0, 2.0], vec![3.0, 4.5]]).unwrap();
        write_matrix(&m, &mpath).unwrap();
        fs::write(&gpath, "1 2\n0 1 9\n").unwrap();
        assert_eq!(read_instance(&mpath).unwrap(), m);
        let g = read_instance(&gpath).unwrap();
        assert_eq!(g.get(0, 1), 9.0);
        assert_eq!(g.n(), 2);
        assert!(matches!(read_instance(dir.join("missing")), Err(Error::Io { .. })));
        fs::remove_dir_all(&dir).unwrap();
    }

    proptest! {
        #[test]
        fn matrix_text_round_trip(n in 1usize..8, seed in any::<u64>()) {
            let m = generate_complete_uniform(n, 10.0, 100.0, seed).unwrap();
            let back = parse_matrix(&format_matrix(&m), p()).unwrap();
            prop_assert_eq!(back, m);
        }

        #[test]
        fn reduce_reproduces_complete_matrix(n in 1usize..8, seed in any::<u64>()) {
            let m = generate_complete_uniform(n, 0.0, 50.0, seed).unwrap();
            prop_assert_eq!(reduce(&m.to_graph()).unwrap(), m);
        }

        #[test]
        fn reduce_is_square_and_nonnegative(
            nl in 0usize..6,
            nr in 1usize..6,
            raw in prop::collection::vec((0usize..6, 0usize..6, -10.0f64..10.0), 0..20),
        ) {
            let mut seen = HashSet::new();
            let edges: Vec<Edge> = raw
                .into_iter()
                .filter(|(l, r, _)| *l < nl && *r < nr && seen.insert((*l, *r)))
                .map(|(l, r, w)| edge(l, r, w))
                .collect();
            let g = BipartiteGraph::new(nl, nr, edges).unwrap();
            let m = reduce(&g).unwrap();
            prop_assert_eq!(m.n(), nl.max(nr));
            prop_assert!(m.rows().flatten().all(|x| *x >= 0.0));
        }
    }
}
