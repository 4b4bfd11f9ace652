//! The multidimensional network model: an edge-labeled undirected weighted
//! multigraph (V, E, L) with at most one edge per (node, node, dimension)
//! triple, plus edge-list ingestion and the split into per-dimension slices.
//!
//! Node and dimension names are arbitrary non-whitespace byte tokens; the
//! loader is byte-transparent and never assumes UTF-8.

use std::collections::HashMap;
use std::io::{BufRead, BufReader, Write as IoWrite};
use std::path::Path;

use crate::{Error, Result, Weight};

/// Dense internal node identifier; the original label is kept in the
/// network's registry.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NodeId(pub(crate) u32);

impl NodeId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// Dense internal dimension (edge label) identifier.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DimensionId(pub(crate) u32);

impl DimensionId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// Bijective label <-> dense id table, insertion ordered.
#[derive(Debug, Default, Clone)]
struct Registry {
    names: Vec<Box<[u8]>>,
    ids: HashMap<Box<[u8]>, u32>,
}

impl Registry {
    fn intern(&mut self, name: &[u8]) -> u32 {
        if let Some(&id) = self.ids.get(name) {
            return id;
        }
        let id = self.names.len() as u32;
        self.names.push(name.into());
        self.ids.insert(name.into(), id);
        id
    }

    fn get(&self, name: &[u8]) -> Option<u32> {
        self.ids.get(name).copied()
    }

    fn name(&self, id: u32) -> &[u8] {
        &self.names[id as usize]
    }

    fn len(&self) -> usize {
        self.names.len()
    }
}

/// Edges of a single dimension, canonicalized to `u < v` and deduplicated.
/// Insertion order is preserved so that downstream iteration (adjacency,
/// serialization) is reproducible for a given input.
#[derive(Debug, Clone)]
struct Slice<W> {
    edges: Vec<(u32, u32, W)>,
    index: HashMap<(u32, u32), usize>,
    adj: HashMap<u32, Vec<u32>>,
}

impl<W: Weight> Slice<W> {
    fn new() -> Self {
        Slice {
            edges: Vec::new(),
            index: HashMap::new(),
            adj: HashMap::new(),
        }
    }

    /// Adds `(u, v)` with weight `w`, summing into an existing edge.
    fn add(&mut self, u: u32, v: u32, w: W) {
        let key = if u <= v { (u, v) } else { (v, u) };
        match self.index.get(&key) {
            Some(&i) => {
                let total = self.edges[i].2 + w;
                self.edges[i].2 = total;
            }
            None => {
                self.index.insert(key, self.edges.len());
                self.edges.push((key.0, key.1, w));
                self.adj.entry(key.0).or_default().push(key.1);
                self.adj.entry(key.1).or_default().push(key.0);
            }
        }
    }

    fn weight(&self, u: u32, v: u32) -> Option<W> {
        let key = if u <= v { (u, v) } else { (v, u) };
        self.index.get(&key).map(|&i| self.edges[i].2)
    }
}

/// Options for the edge-list parser.
#[derive(Debug, Clone)]
pub struct ParseOptions {
    /// Weight assumed when a line has no weight field.
    pub default_weight: f64,
}

impl Default for ParseOptions {
    fn default() -> Self {
        ParseOptions { default_weight: 1.0 }
    }
}

/// An edge-labeled undirected weighted multigraph.
///
/// Invariants: at most one edge per `(u, v, d)` triple (duplicates sum their
/// weights at insertion), no self-loops, all weights strictly positive, and
/// node/dimension ids dense in first-appearance order.
///
/// The network is conceptually immutable once loaded; all query methods take
/// `&self` and the structure is safe to share across threads.
#[derive(Debug, Clone)]
pub struct MultidimNetwork<W> {
    nodes: Registry,
    dims: Registry,
    slices: Vec<Slice<W>>,
}

impl<W: Weight> Default for MultidimNetwork<W> {
    fn default() -> Self {
        Self::new()
    }
}

impl<W: Weight> MultidimNetwork<W> {
    pub fn new() -> Self {
        MultidimNetwork {
            nodes: Registry::default(),
            dims: Registry::default(),
            slices: Vec::new(),
        }
    }

    /// Registers a node label (idempotent) and returns its dense id.
    pub fn intern_node(&mut self, label: &[u8]) -> NodeId {
        NodeId(self.nodes.intern(label))
    }

    /// Registers a dimension name (idempotent) and returns its dense id.
    /// A registered dimension may have zero edges; `split` drops such slices.
    pub fn ensure_dimension(&mut self, name: &[u8]) -> DimensionId {
        let id = self.dims.intern(name);
        while self.slices.len() < self.dims.len() {
            self.slices.push(Slice::new());
        }
        DimensionId(id)
    }

    /// Adds the undirected edge `(u, v, d)`. A repeated triple sums weights.
    pub fn add_edge(&mut self, u: NodeId, v: NodeId, d: DimensionId, w: W) -> Result<()> {
        if u == v {
            return Err(Error::Validation(format!(
                "self-loop on node {}",
                String::from_utf8_lossy(self.node_label(u))
            )));
        }
        if !(w > W::zero()) {
            return Err(Error::Validation(format!("edge weight must be > 0, got {w}")));
        }
        if u.index() >= self.nodes.len() || v.index() >= self.nodes.len() {
            return Err(Error::Lookup("node id out of range".into()));
        }
        if d.index() >= self.slices.len() {
            return Err(Error::Lookup("dimension id out of range".into()));
        }
        self.slices[d.index()].add(u.0, v.0, w);
        Ok(())
    }

    /// Interns labels then adds the edge.
    pub fn add_edge_by_name(&mut self, u: &[u8], v: &[u8], d: &[u8], w: W) -> Result<()> {
        let u = self.intern_node(u);
        let v = self.intern_node(v);
        let d = self.ensure_dimension(d);
        self.add_edge(u, v, d, w)
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn dimension_count(&self) -> usize {
        self.dims.len()
    }

    /// Total number of distinct `(u, v, d)` edges.
    pub fn edge_count(&self) -> usize {
        self.slices.iter().map(|s| s.edges.len()).sum()
    }

    pub fn dimension_edge_count(&self, d: DimensionId) -> usize {
        self.slices[d.index()].edges.len()
    }

    pub fn node_id(&self, label: &[u8]) -> Option<NodeId> {
        self.nodes.get(label).map(NodeId)
    }

    pub fn node_label(&self, id: NodeId) -> &[u8] {
        self.nodes.name(id.0)
    }

    pub fn dimension_id(&self, name: &[u8]) -> Option<DimensionId> {
        self.dims.get(name).map(DimensionId)
    }

    pub fn dimension_name(&self, id: DimensionId) -> &[u8] {
        self.dims.name(id.0)
    }

    pub fn node_ids(&self) -> impl Iterator<Item = NodeId> {
        (0..self.nodes.len() as u32).map(NodeId)
    }

    pub fn dimension_ids(&self) -> impl Iterator<Item = DimensionId> {
        (0..self.dims.len() as u32).map(DimensionId)
    }

    /// Iterates all edges as `(u, v, d, weight)` with `u < v`, dimensions in
    /// id order and edges in insertion order.
    pub fn edges(&self) -> impl Iterator<Item = (NodeId, NodeId, DimensionId, W)> + '_ {
        self.slices.iter().enumerate().flat_map(|(d, s)| {
            s.edges
                .iter()
                .map(move |&(u, v, w)| (NodeId(u), NodeId(v), DimensionId(d as u32), w))
        })
    }

    pub fn edge_weight(&self, u: NodeId, v: NodeId, d: DimensionId) -> Option<W> {
        self.slices.get(d.index())?.weight(u.0, v.0)
    }

    /// True iff `n` has at least one `d`-labeled edge adjacent to it, i.e.
    /// the node belongs to that dimension.
    pub fn appears_in(&self, n: NodeId, d: DimensionId) -> bool {
        self.slices
            .get(d.index())
            .map_or(false, |s| s.adj.contains_key(&n.0))
    }

    /// Number of distinct `(u, v, d)` edges with both endpoints in `nodes`
    /// and `d` in `dims`.
    pub fn edges_among(&self, nodes: &[NodeId], dims: &[DimensionId]) -> Result<usize> {
        for &n in nodes {
            if n.index() >= self.nodes.len() {
                return Err(Error::Lookup(format!("unknown node id {}", n.0)));
            }
        }
        for &d in dims {
            if d.index() >= self.dims.len() {
                return Err(Error::Lookup(format!("unknown dimension id {}", d.0)));
            }
        }
        let member: std::collections::HashSet<u32> = nodes.iter().map(|n| n.0).collect();
        let mut count = 0;
        for &d in dims {
            let slice = &self.slices[d.index()];
            for &u in &member {
                if let Some(neigh) = slice.adj.get(&u) {
                    count += neigh.iter().filter(|&&v| v > u && member.contains(&v)).count();
                }
            }
        }
        Ok(count)
    }

    /// Splits the network into one [`MonoNetwork`] per dimension with at
    /// least one edge, replicating every node into each dimension where it
    /// has an adjacent edge. Slices come out in dimension-id order and the
    /// union of their edge sets is exactly the parent's edge set.
    pub fn split(&self) -> Vec<MonoNetwork<W>> {
        self.slices
            .iter()
            .enumerate()
            .filter(|(_, s)| !s.edges.is_empty())
            .map(|(d, s)| MonoNetwork::from_slice(DimensionId(d as u32), s))
            .collect()
    }

    /// Collapses all dimensions into a single monodimensional network,
    /// summing the weights of parallel edges. The result carries the
    /// synthetic dimension id 0.
    pub fn collapse(&self) -> MonoNetwork<W> {
        let mut combined: Slice<W> = Slice::new();
        for slice in &self.slices {
            for &(u, v, w) in &slice.edges {
                combined.add(u, v, w);
            }
        }
        MonoNetwork::from_slice(DimensionId(0), &combined)
    }

    /// Parses the whitespace-separated edge-list format
    /// `u v d [w]` (one edge per line, `#` comment lines, weight defaulting
    /// to `options.default_weight`). Duplicate `(u, v, d)` lines sum their
    /// weights. Tokens are treated as raw bytes.
    pub fn parse_edgelist<R: BufRead>(mut reader: R, options: &ParseOptions) -> Result<Self> {
        let mut net = Self::new();
        let mut buf: Vec<u8> = Vec::new();
        let mut line_no = 0usize;
        loop {
            buf.clear();
            if reader.read_until(b'\n', &mut buf)? == 0 {
                break;
            }
            line_no += 1;
            let line = trim_ascii(&buf);
            if line.is_empty() || line[0] == b'#' {
                continue;
            }
            let fields: Vec<&[u8]> = line
                .split(|b: &u8| b.is_ascii_whitespace())
                .filter(|f| !f.is_empty())
                .collect();
            if fields.len() != 3 && fields.len() != 4 {
                return Err(Error::Parse {
                    line: line_no,
                    reason: format!("expected 3 or 4 fields, got {}", fields.len()),
                });
            }
            let weight = if fields.len() == 4 {
                parse_weight(fields[3], line_no)?
            } else {
                options.default_weight
            };
            if !(weight > 0.0) {
                return Err(Error::Validation(format!(
                    "line {line_no}: edge weight must be > 0, got {weight}"
                )));
            }
            if fields[0] == fields[1] {
                return Err(Error::Validation(format!(
                    "line {line_no}: self-loop on node {}",
                    String::from_utf8_lossy(fields[0])
                )));
            }
            let w = W::from_f64(weight).ok_or_else(|| Error::Parse {
                line: line_no,
                reason: format!("weight {weight} not representable"),
            })?;
            net.add_edge_by_name(fields[0], fields[1], fields[2], w)?;
        }
        Ok(net)
    }

    pub fn load_edgelist<P: AsRef<Path>>(path: P, options: &ParseOptions) -> Result<Self> {
        let file = std::fs::File::open(path)?;
        Self::parse_edgelist(BufReader::new(file), options)
    }

    /// Writes the network back in the edge-list format, one `u v d w` line
    /// per edge, dimensions in id order. Reloading the output yields an
    /// isomorphic network (identical registries, edges, and weights).
    pub fn write_edgelist<Out: IoWrite>(&self, out: &mut Out) -> std::io::Result<()> {
        for (d, slice) in self.slices.iter().enumerate() {
            let dname = self.dims.name(d as u32);
            for &(u, v, w) in &slice.edges {
                out.write_all(self.nodes.name(u))?;
                out.write_all(b"\t")?;
                out.write_all(self.nodes.name(v))?;
                out.write_all(b"\t")?;
                out.write_all(dname)?;
                writeln!(out, "\t{w}")?;
            }
        }
        Ok(())
    }
}

fn trim_ascii(mut s: &[u8]) -> &[u8] {
    while let Some((&b, rest)) = s.split_first() {
        if b.is_ascii_whitespace() {
            s = rest;
        } else {
            break;
        }
    }
    while let Some((&b, rest)) = s.split_last() {
        if b.is_ascii_whitespace() {
            s = rest;
        } else {
            break;
        }
    }
    s
}

fn parse_weight(token: &[u8], line: usize) -> Result<f64> {
    std::str::from_utf8(token)
        .ok()
        .and_then(|t| t.parse::<f64>().ok())
        .ok_or_else(|| Error::Parse {
            line,
            reason: format!("non-numeric weight {:?}", String::from_utf8_lossy(token)),
        })
}

/// One dimension's slice of the parent network: the nodes with at least one
/// edge in that dimension (so every node has degree >= 1) and exactly the
/// edges carrying that label. Nodes keep their parent ids; adjacency is
/// indexed by a local dense index for the detection algorithms.
#[derive(Debug, Clone)]
pub struct MonoNetwork<W> {
    dimension: DimensionId,
    nodes: Vec<NodeId>,
    adj: Vec<Vec<(u32, W)>>,
    edge_count: usize,
}

impl<W: Weight> MonoNetwork<W> {
    fn from_slice(dimension: DimensionId, slice: &Slice<W>) -> Self {
        let mut nodes: Vec<u32> = slice.adj.keys().copied().collect();
        nodes.sort_unstable();
        let local: HashMap<u32, u32> = nodes
            .iter()
            .enumerate()
            .map(|(i, &n)| (n, i as u32))
            .collect();
        let mut adj: Vec<Vec<(u32, W)>> = vec![Vec::new(); nodes.len()];
        for &(u, v, w) in &slice.edges {
            let (lu, lv) = (local[&u], local[&v]);
            adj[lu as usize].push((lv, w));
            adj[lv as usize].push((lu, w));
        }
        MonoNetwork {
            dimension,
            nodes: nodes.into_iter().map(NodeId).collect(),
            adj,
            edge_count: slice.edges.len(),
        }
    }

    pub fn dimension(&self) -> DimensionId {
        self.dimension
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    /// Parent-network ids of this slice's nodes, ascending.
    pub fn nodes(&self) -> &[NodeId] {
        &self.nodes
    }

    /// Parent id of the node at a local index.
    pub fn node_at(&self, local: usize) -> NodeId {
        self.nodes[local]
    }

    pub fn local_index(&self, node: NodeId) -> Option<usize> {
        self.nodes.binary_search(&node).ok()
    }

    /// Weighted neighbors of the node at a local index, as local indices.
    pub fn neighbors(&self, local: usize) -> &[(u32, W)] {
        &self.adj[local]
    }

    /// Iterates edges as `(u, v, weight)` in parent ids, each edge once.
    pub fn edges(&self) -> impl Iterator<Item = (NodeId, NodeId, W)> + '_ {
        self.adj.iter().enumerate().flat_map(move |(lu, neigh)| {
            neigh
                .iter()
                .filter(move |&&(lv, _)| (lu as u32) < lv)
                .map(move |&(lv, w)| (self.nodes[lu], self.nodes[lv as usize], w))
        })
    }
}
