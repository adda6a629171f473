//! Undirected binary networks, single snapshot or a panel of snapshots.
//!
//! Nodes are 0-based in memory. Edge-list files and every report written by
//! this crate use 1-based node ids, which is what the published datasets use.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};

/// How node identifiers in an edge-list file map onto 0-based indices.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum IndexBase {
    /// 0-based if any identifier equals 0, otherwise 1-based.
    #[default]
    Auto,
    Zero,
    One,
}

/// A symmetric, loop-free binary network stored as its upper triangle.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StaticNetwork {
    n: usize,
    edges: BTreeSet<(usize, usize)>,
    labels: Option<Vec<String>>,
    attributes: BTreeMap<usize, String>,
}

impl StaticNetwork {
    /// An edgeless network on `n` nodes.
    pub fn empty(n: usize) -> Self {
        StaticNetwork {
            n,
            edges: BTreeSet::new(),
            labels: None,
            attributes: BTreeMap::new(),
        }
    }

    /// Builds a network from 0-based pairs. Pairs are normalised to `i < j`;
    /// duplicates collapse.
    pub fn from_edges(n: usize, pairs: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let mut net = StaticNetwork::empty(n);
        for (a, b) in pairs {
            net.insert(a, b)?;
        }
        Ok(net)
    }

    pub fn insert(&mut self, a: usize, b: usize) -> Result<()> {
        if a == b {
            return Err(Error::InvalidArgument(format!("self-loop on node {}", a + 1)));
        }
        for idx in [a, b] {
            if idx >= self.n {
                return Err(Error::NodeOutOfRange { index: idx + 1, n: self.n });
            }
        }
        self.edges.insert((a.min(b), a.max(b)));
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Upper-triangle pairs `(i, j)` with `i < j`, 0-based, in sorted order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.edges.iter().copied()
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        self.edges.contains(&(a.min(b), a.max(b)))
    }

    /// Number of ties incident to node `i` (0-based).
    pub fn degree(&self, i: usize) -> Result<usize> {
        if i >= self.n {
            return Err(Error::NodeOutOfRange { index: i + 1, n: self.n });
        }
        Ok(self.edges.iter().filter(|&&(a, b)| a == i || b == i).count())
    }

    pub fn degrees(&self) -> Vec<usize> {
        let mut deg = vec![0; self.n];
        for &(a, b) in &self.edges {
            deg[a] += 1;
            deg[b] += 1;
        }
        deg
    }

    /// Row-major `n × n` symmetric indicator matrix with a zero diagonal.
    pub fn adjacency(&self) -> Vec<bool> {
        let mut adj = vec![false; self.n * self.n];
        for &(a, b) in &self.edges {
            adj[a * self.n + b] = true;
            adj[b * self.n + a] = true;
        }
        adj
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    pub fn set_labels(&mut self, labels: Vec<String>) -> Result<()> {
        if labels.len() != self.n {
            return Err(Error::InvalidArgument(format!(
                "{} labels given for {} nodes",
                labels.len(),
                self.n
            )));
        }
        self.labels = Some(labels);
        Ok(())
    }

    /// Display name of node `i`: its label, or its 1-based id.
    pub fn node_name(&self, i: usize) -> String {
        match &self.labels {
            Some(l) => l[i].clone(),
            None => (i + 1).to_string(),
        }
    }

    pub fn attributes(&self) -> &BTreeMap<usize, String> {
        &self.attributes
    }

    pub fn set_attribute(&mut self, i: usize, tag: impl Into<String>) -> Result<()> {
        if i >= self.n {
            return Err(Error::NodeOutOfRange { index: i + 1, n: self.n });
        }
        self.attributes.insert(i, tag.into());
        Ok(())
    }

    fn padded(mut self, n: usize) -> Self {
        self.n = self.n.max(n);
        self
    }

    /// Writes the edge list with 1-based ids, one pair per line.
    pub fn write_edge_list<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "# {} nodes, {} edges", self.n, self.edges.len())?;
        for &(a, b) in &self.edges {
            writeln!(out, "{} {}", a + 1, b + 1)?;
        }
        Ok(())
    }

    pub fn to_edge_list_string(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "# {} nodes, {} edges", self.n, self.edges.len());
        for &(a, b) in &self.edges {
            let _ = writeln!(s, "{} {}", a + 1, b + 1);
        }
        s
    }
}

/// `T >= 2` snapshots over a common node set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DynamicNetwork {
    n: usize,
    snapshots: Vec<StaticNetwork>,
}

impl DynamicNetwork {
    pub fn new(snapshots: Vec<StaticNetwork>) -> Result<Self> {
        if snapshots.len() < 2 {
            return Err(Error::InvalidArgument(format!(
                "a dynamic network needs at least 2 snapshots, got {}",
                snapshots.len()
            )));
        }
        let n = snapshots.iter().map(StaticNetwork::n).max().unwrap_or(0);
        let snapshots = snapshots.into_iter().map(|s| s.padded(n)).collect();
        Ok(DynamicNetwork { n, snapshots })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn time_points(&self) -> usize {
        self.snapshots.len()
    }

    pub fn snapshots(&self) -> &[StaticNetwork] {
        &self.snapshots
    }

    pub fn snapshot(&self, t: usize) -> &StaticNetwork {
        &self.snapshots[t]
    }
}

/// Either kind of observed network, as handed to the samplers.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Network {
    Static(StaticNetwork),
    Dynamic(DynamicNetwork),
}

impl Network {
    pub fn n(&self) -> usize {
        match self {
            Network::Static(s) => s.n(),
            Network::Dynamic(d) => d.n(),
        }
    }

    pub fn time_points(&self) -> usize {
        match self {
            Network::Static(_) => 1,
            Network::Dynamic(d) => d.time_points(),
        }
    }

    pub fn snapshot(&self, t: usize) -> &StaticNetwork {
        match self {
            Network::Static(s) => {
                assert_eq!(t, 0, "a static network has a single snapshot");
                s
            }
            Network::Dynamic(d) => d.snapshot(t),
        }
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.snapshot(0).labels()
    }
}

impl From<StaticNetwork> for Network {
    fn from(s: StaticNetwork) -> Self {
        Network::Static(s)
    }
}

impl From<DynamicNetwork> for Network {
    fn from(d: DynamicNetwork) -> Self {
        Network::Dynamic(d)
    }
}

struct RawEdges {
    pairs: Vec<(u64, u64)>,
    has_zero: bool,
    max_id: u64,
}

fn parse_raw(text: &str, path: &Path) -> Result<RawEdges> {
    let mut pairs = Vec::new();
    let mut has_zero = false;
    let mut max_id = 0;
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let err = |message: String| Error::Parse {
            path: path.to_path_buf(),
            line: lineno + 1,
            message,
        };
        let mut tokens = line
            .split(|c: char| c.is_whitespace() || c == ',')
            .filter(|t| !t.is_empty());
        let mut next_id = || -> Result<u64> {
            let tok = tokens
                .next()
                .ok_or_else(|| err("expected two node identifiers".into()))?;
            tok.parse::<u64>()
                .map_err(|_| err(format!("`{tok}` is not a non-negative integer node id")))
        };
        let a = next_id()?;
        let b = next_id()?;
        if a == b {
            return Err(err(format!("self-loop on node {a}")));
        }
        has_zero |= a == 0 || b == 0;
        max_id = max_id.max(a).max(b);
        pairs.push((a, b));
    }
    Ok(RawEdges {
        pairs,
        has_zero,
        max_id,
    })
}

fn build(raw: &RawEdges, zero_based: bool, n_hint: Option<usize>, path: &Path) -> Result<StaticNetwork> {
    let offset = u64::from(!zero_based);
    if !zero_based && raw.has_zero {
        return Err(Error::Parse {
            path: path.to_path_buf(),
            line: 0,
            message: "node id 0 in a file declared 1-based".into(),
        });
    }
    let seen = if raw.pairs.is_empty() {
        0
    } else {
        (raw.max_id + 1 - offset) as usize
    };
    let n = seen.max(n_hint.unwrap_or(0));
    let pairs = raw
        .pairs
        .iter()
        .map(|&(a, b)| ((a - offset) as usize, (b - offset) as usize));
    StaticNetwork::from_edges(n, pairs)
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

/// Parses edge-list text. See [`load_edge_list`].
pub fn parse_edge_list(text: &str, base: IndexBase, n_hint: Option<usize>) -> Result<StaticNetwork> {
    let path = PathBuf::from("<text>");
    let raw = parse_raw(text, &path)?;
    let zero = match base {
        IndexBase::Auto => raw.has_zero,
        IndexBase::Zero => true,
        IndexBase::One => false,
    };
    build(&raw, zero, n_hint, &path)
}

/// Reads a whitespace- or comma-separated edge list. Lines starting with `#`
/// are comments, tokens after the first two on a line are ignored, and
/// repeated pairs are kept once. `n` is the largest id seen unless `n_hint`
/// is larger.
pub fn load_edge_list(path: impl AsRef<Path>, n_hint: Option<usize>) -> Result<StaticNetwork> {
    load_edge_list_with_base(path, IndexBase::Auto, n_hint)
}

pub fn load_edge_list_with_base(
    path: impl AsRef<Path>,
    base: IndexBase,
    n_hint: Option<usize>,
) -> Result<StaticNetwork> {
    let path = path.as_ref();
    let raw = parse_raw(&read(path)?, path)?;
    let zero = match base {
        IndexBase::Auto => raw.has_zero,
        IndexBase::Zero => true,
        IndexBase::One => false,
    };
    build(&raw, zero, n_hint, path)
}

/// Loads an ordered list of snapshot files over a shared node set. The index
/// base is detected jointly so that all snapshots agree.
pub fn load_snapshots<P: AsRef<Path>>(paths: &[P]) -> Result<DynamicNetwork> {
    load_snapshots_with_base(paths, IndexBase::Auto)
}

pub fn load_snapshots_with_base<P: AsRef<Path>>(paths: &[P], base: IndexBase) -> Result<DynamicNetwork> {
    if paths.len() < 2 {
        return Err(Error::InvalidArgument(format!(
            "a dynamic network needs at least 2 snapshot files, got {}",
            paths.len()
        )));
    }
    let wrap = |index: usize, e: Error| Error::Snapshot {
        index: index + 1,
        source: Box::new(e),
    };
    let mut raws = Vec::with_capacity(paths.len());
    for (t, p) in paths.iter().enumerate() {
        let p = p.as_ref();
        let raw = read(p).and_then(|text| parse_raw(&text, p)).map_err(|e| wrap(t, e))?;
        raws.push(raw);
    }
    let zero = match base {
        IndexBase::Auto => raws.iter().any(|r| r.has_zero),
        IndexBase::Zero => true,
        IndexBase::One => false,
    };
    let mut snapshots = Vec::with_capacity(raws.len());
    for (t, raw) in raws.iter().enumerate() {
        snapshots.push(build(raw, zero, None, paths[t].as_ref()).map_err(|e| wrap(t, e))?);
    }
    DynamicNetwork::new(snapshots)
}

/// Reads `id value` lines (1-based ids) into a map of 0-based node → tag.
pub fn load_node_tags(path: impl AsRef<Path>) -> Result<BTreeMap<usize, String>> {
    let path = path.as_ref();
    let text = read(path)?;
    let mut tags = BTreeMap::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let err = |message: String| Error::Parse {
            path: path.to_path_buf(),
            line: lineno + 1,
            message,
        };
        let (id, tag) = line
            .split_once(|c: char| c.is_whitespace() || c == ',')
            .ok_or_else(|| err("expected `id tag`".into()))?;
        let id: usize = id
            .parse()
            .map_err(|_| err(format!("`{id}` is not a node id")))?;
        if id == 0 {
            return Err(err("node ids in tag files are 1-based".into()));
        }
        tags.insert(id - 1, tag.trim().to_string());
    }
    Ok(tags)
}
