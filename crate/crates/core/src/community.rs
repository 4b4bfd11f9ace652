//! Monodimensional community discovery: the pluggable detection stage that
//! runs on each slice of the network before memberships are mined.
//!
//! Three discoverers are provided: weighted label propagation (the default),
//! connected components (deterministic, handy for oracles), and fixed
//! assignments read from a table (for reproducing hand-built communities,
//! including overlapping ones).

use std::collections::HashMap;
use std::io::BufRead;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::graph::{DimensionId, MonoNetwork, NodeId};
use crate::{Error, Result, Weight};

/// Node -> community labels for one dimension.
///
/// Labels are dense (`0..community_count`) within the dimension, every listed
/// node carries at least one label, and a node may carry several when the
/// discoverer overlaps.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CommunityAssignment {
    dimension: DimensionId,
    /// Sorted by node id; each label list sorted and deduplicated.
    memberships: Vec<(NodeId, Vec<u32>)>,
    community_count: u32,
}

impl CommunityAssignment {
    /// Builds an assignment, validating density (labels form exactly
    /// `0..k`) and per-node coverage. `memberships` may arrive unsorted.
    pub fn new(dimension: DimensionId, mut memberships: Vec<(NodeId, Vec<u32>)>) -> Result<Self> {
        memberships.sort_by_key(|&(n, _)| n);
        let mut seen = vec![false; 0];
        let mut max_label = None;
        for (node, labels) in memberships.iter_mut() {
            labels.sort_unstable();
            labels.dedup();
            if labels.is_empty() {
                return Err(Error::Coverage(format!("node id {}", node.index())));
            }
            for &l in labels.iter() {
                if max_label.map_or(true, |m| l > m) {
                    max_label = Some(l);
                }
            }
        }
        let count = max_label.map_or(0, |m| m + 1);
        seen.resize(count as usize, false);
        for (_, labels) in &memberships {
            for &l in labels {
                seen[l as usize] = true;
            }
        }
        if let Some(missing) = seen.iter().position(|&s| !s) {
            return Err(Error::Validation(format!(
                "community labels not dense: label {missing} unused"
            )));
        }
        for pair in memberships.windows(2) {
            if pair[0].0 == pair[1].0 {
                return Err(Error::Validation(format!(
                    "node id {} listed twice in assignment",
                    pair[0].0.index()
                )));
            }
        }
        Ok(CommunityAssignment {
            dimension,
            memberships,
            community_count: count,
        })
    }

    pub fn dimension(&self) -> DimensionId {
        self.dimension
    }

    pub fn community_count(&self) -> u32 {
        self.community_count
    }

    pub fn node_count(&self) -> usize {
        self.memberships.len()
    }

    /// `(node, labels)` pairs ascending by node id.
    pub fn iter(&self) -> impl Iterator<Item = (NodeId, &[u32])> {
        self.memberships.iter().map(|(n, ls)| (*n, ls.as_slice()))
    }

    pub fn labels_of(&self, node: NodeId) -> Option<&[u32]> {
        self.memberships
            .binary_search_by_key(&node, |&(n, _)| n)
            .ok()
            .map(|i| self.memberships[i].1.as_slice())
    }

    /// Member nodes of one community, ascending.
    pub fn members_of(&self, label: u32) -> Vec<NodeId> {
        self.memberships
            .iter()
            .filter(|(_, ls)| ls.contains(&label))
            .map(|&(n, _)| n)
            .collect()
    }
}

/// The detection stage contract: one slice in, one assignment out,
/// deterministic for identical input and configuration.
pub trait CommunityDiscoverer<W: Weight> {
    fn discover(&self, g: &MonoNetwork<W>) -> Result<CommunityAssignment>;
}

/// Outcome of a label-propagation run.
#[derive(Debug, Clone)]
pub struct LabelPropagationResult {
    pub assignment: CommunityAssignment,
    pub iterations: usize,
    pub converged: bool,
}

/// Weighted asynchronous label propagation.
///
/// Every node starts in its own community. Each sweep visits nodes in a
/// fresh seeded random permutation; a node adopts the label with the largest
/// total incident edge weight among its neighbors, breaking ties uniformly
/// at random (seeded) among the maximal labels. The run stops after a sweep
/// with no change or after `max_iters` sweeps, and the surviving labels are
/// renumbered densely by first appearance in node order.
#[derive(Debug, Clone)]
pub struct LabelPropagation {
    pub seed: u64,
    pub max_iters: usize,
}

impl Default for LabelPropagation {
    fn default() -> Self {
        LabelPropagation { seed: 42, max_iters: 100 }
    }
}

impl LabelPropagation {
    pub fn new(seed: u64, max_iters: usize) -> Self {
        LabelPropagation { seed, max_iters }
    }

    pub fn run<W: Weight>(&self, g: &MonoNetwork<W>) -> Result<LabelPropagationResult> {
        if self.max_iters < 1 {
            return Err(Error::Validation("max_iters must be >= 1".into()));
        }
        let n = g.node_count();
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        let mut labels: Vec<u32> = (0..n as u32).collect();
        let mut order: Vec<u32> = (0..n as u32).collect();
        // Scratch accumulator indexed by label; weights are strictly
        // positive, so a zero entry means "not seen this node".
        let mut weight_of: Vec<W> = vec![W::zero(); n];
        let mut touched: Vec<u32> = Vec::new();
        let mut ties: Vec<u32> = Vec::new();

        let mut iterations = 0;
        let mut converged = false;
        while iterations < self.max_iters {
            iterations += 1;
            order.shuffle(&mut rng);
            let mut changed = 0usize;
            for &u in &order {
                let u = u as usize;
                touched.clear();
                for &(v, w) in g.neighbors(u) {
                    let l = labels[v as usize];
                    if weight_of[l as usize] == W::zero() {
                        touched.push(l);
                    }
                    weight_of[l as usize] = weight_of[l as usize] + w;
                }
                let mut best = W::zero();
                for &l in &touched {
                    if weight_of[l as usize] > best {
                        best = weight_of[l as usize];
                    }
                }
                ties.clear();
                for &l in &touched {
                    if weight_of[l as usize] == best {
                        ties.push(l);
                    }
                    weight_of[l as usize] = W::zero();
                }
                ties.sort_unstable();
                let new_label = if ties.len() == 1 {
                    ties[0]
                } else {
                    ties[rng.gen_range(0..ties.len())]
                };
                if new_label != labels[u] {
                    labels[u] = new_label;
                    changed += 1;
                }
            }
            if changed == 0 {
                converged = true;
                break;
            }
        }

        let assignment = densify(g, &labels)?;
        Ok(LabelPropagationResult { assignment, iterations, converged })
    }
}

impl<W: Weight> CommunityDiscoverer<W> for LabelPropagation {
    fn discover(&self, g: &MonoNetwork<W>) -> Result<CommunityAssignment> {
        self.run(g).map(|r| r.assignment)
    }
}

/// Spec-shaped convenience wrapper around [`LabelPropagation::run`].
pub fn label_propagation<W: Weight>(
    g: &MonoNetwork<W>,
    seed: u64,
    max_iters: usize,
) -> Result<CommunityAssignment> {
    LabelPropagation::new(seed, max_iters).discover(g)
}

/// Renumbers raw labels to `0..k` by first appearance over ascending nodes.
fn densify<W: Weight>(g: &MonoNetwork<W>, labels: &[u32]) -> Result<CommunityAssignment> {
    let mut remap: HashMap<u32, u32> = HashMap::new();
    let mut memberships = Vec::with_capacity(labels.len());
    for (local, &raw) in labels.iter().enumerate() {
        let next = remap.len() as u32;
        let dense = *remap.entry(raw).or_insert(next);
        memberships.push((g.node_at(local), vec![dense]));
    }
    CommunityAssignment::new(g.dimension(), memberships)
}

/// One community per connected component, numbered by the smallest node in
/// breadth-first discovery order.
#[derive(Debug, Clone, Copy, Default)]
pub struct ConnectedComponents;

impl<W: Weight> CommunityDiscoverer<W> for ConnectedComponents {
    fn discover(&self, g: &MonoNetwork<W>) -> Result<CommunityAssignment> {
        Ok(connected_components(g))
    }
}

pub fn connected_components<W: Weight>(g: &MonoNetwork<W>) -> CommunityAssignment {
    let n = g.node_count();
    let mut label: Vec<Option<u32>> = vec![None; n];
    let mut next = 0u32;
    let mut queue = std::collections::VecDeque::new();
    for start in 0..n {
        if label[start].is_some() {
            continue;
        }
        label[start] = Some(next);
        queue.push_back(start);
        while let Some(u) = queue.pop_front() {
            for &(v, _) in g.neighbors(u) {
                let v = v as usize;
                if label[v].is_none() {
                    label[v] = Some(next);
                    queue.push_back(v);
                }
            }
        }
        next += 1;
    }
    let memberships = label
        .into_iter()
        .enumerate()
        .map(|(local, l)| (g.node_at(local), vec![l.expect("visited")]))
        .collect();
    CommunityAssignment::new(g.dimension(), memberships).expect("components are dense by construction")
}

/// Returns the externally supplied table as an assignment for `g`.
///
/// The table must cover every node of the slice; entries for nodes outside
/// the slice are ignored. Labels may overlap; non-dense label values are
/// renumbered preserving their relative order (a table already using
/// `0..k` passes through verbatim).
pub fn fixed_assignment<W: Weight>(
    g: &MonoNetwork<W>,
    table: &HashMap<NodeId, Vec<u32>>,
) -> Result<CommunityAssignment> {
    let mut used: Vec<u32> = Vec::new();
    let mut raw = Vec::with_capacity(g.node_count());
    for &node in g.nodes() {
        let labels = table
            .get(&node)
            .filter(|ls| !ls.is_empty())
            .ok_or_else(|| Error::Coverage(format!("id {}", node.index())))?;
        used.extend_from_slice(labels);
        raw.push((node, labels.clone()));
    }
    used.sort_unstable();
    used.dedup();
    let remap: HashMap<u32, u32> = used.iter().enumerate().map(|(i, &l)| (l, i as u32)).collect();
    let memberships = raw
        .into_iter()
        .map(|(n, ls)| (n, ls.into_iter().map(|l| remap[&l]).collect()))
        .collect();
    CommunityAssignment::new(g.dimension(), memberships)
}

/// Fixed per-dimension tables, usable as a discoverer for a whole network.
#[derive(Debug, Clone, Default)]
pub struct FixedDiscoverer {
    pub tables: HashMap<DimensionId, HashMap<NodeId, Vec<u32>>>,
}

impl<W: Weight> CommunityDiscoverer<W> for FixedDiscoverer {
    fn discover(&self, g: &MonoNetwork<W>) -> Result<CommunityAssignment> {
        let table = self.tables.get(&g.dimension()).ok_or_else(|| {
            Error::Lookup(format!(
                "no fixed table for dimension id {}",
                g.dimension().index()
            ))
        })?;
        fixed_assignment(g, table)
    }
}

/// Parses the single-dimension table format: one `node community` line per
/// membership (repeat a node for overlapping labels), `#` comments.
pub fn parse_membership_table<R: BufRead>(mut reader: R) -> Result<HashMap<Vec<u8>, Vec<u32>>> {
    let mut table: HashMap<Vec<u8>, Vec<u32>> = HashMap::new();
    let mut buf = Vec::new();
    let mut line_no = 0usize;
    loop {
        buf.clear();
        if reader.read_until(b'\n', &mut buf)? == 0 {
            break;
        }
        line_no += 1;
        let fields = match split_line(&buf) {
            None => continue,
            Some(f) => f,
        };
        if fields.len() != 2 {
            return Err(Error::Parse {
                line: line_no,
                reason: format!("expected 2 fields, got {}", fields.len()),
            });
        }
        let label = parse_label(fields[1], line_no)?;
        table.entry(fields[0].to_vec()).or_default().push(label);
    }
    Ok(table)
}

/// Parses the multi-dimension table format used by the CLI: one
/// `node dimension community` line per membership.
pub fn parse_multidim_table<R: BufRead>(
    mut reader: R,
) -> Result<HashMap<Vec<u8>, HashMap<Vec<u8>, Vec<u32>>>> {
    let mut tables: HashMap<Vec<u8>, HashMap<Vec<u8>, Vec<u32>>> = HashMap::new();
    let mut buf = Vec::new();
    let mut line_no = 0usize;
    loop {
        buf.clear();
        if reader.read_until(b'\n', &mut buf)? == 0 {
            break;
        }
        line_no += 1;
        let fields = match split_line(&buf) {
            None => continue,
            Some(f) => f,
        };
        if fields.len() != 3 {
            return Err(Error::Parse {
                line: line_no,
                reason: format!("expected 3 fields, got {}", fields.len()),
            });
        }
        let label = parse_label(fields[2], line_no)?;
        tables
            .entry(fields[1].to_vec())
            .or_default()
            .entry(fields[0].to_vec())
            .or_default()
            .push(label);
    }
    Ok(tables)
}

fn split_line(buf: &[u8]) -> Option<Vec<&[u8]>> {
    let line: Vec<&[u8]> = buf
        .split(|b: &u8| b.is_ascii_whitespace())
        .filter(|f| !f.is_empty())
        .collect();
    if line.is_empty() || line[0][0] == b'#' {
        None
    } else {
        Some(line)
    }
}

fn parse_label(token: &[u8], line: usize) -> Result<u32> {
    std::str::from_utf8(token)
        .ok()
        .and_then(|t| t.parse::<u32>().ok())
        .ok_or_else(|| Error::Parse {
            line,
            reason: format!("bad community label {:?}", String::from_utf8_lossy(token)),
        })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{MultidimNetwork, ParseOptions};
    use std::io::Cursor;

    fn mono(text: &str) -> MonoNetwork<f64> {
        let net: MultidimNetwork<f64> =
            MultidimNetwork::parse_edgelist(Cursor::new(text), &ParseOptions::default()).unwrap();
        let mut slices = net.split();
        assert_eq!(slices.len(), 1);
        slices.pop().unwrap()
    }

    /// Every node's kept label must be a weighted-majority label among its
    /// neighbors; meaningful only when the run converged before the cap.
    fn assert_stable(g: &MonoNetwork<f64>, a: &CommunityAssignment) {
        for (node, labels) in a.iter() {
            assert_eq!(labels.len(), 1);
            let u = g.local_index(node).unwrap();
            let mut by_label: HashMap<u32, f64> = HashMap::new();
            for &(v, w) in g.neighbors(u) {
                let vl = a.labels_of(g.node_at(v as usize)).unwrap()[0];
                *by_label.entry(vl).or_insert(0.0) += w;
            }
            let own = by_label.get(&labels[0]).copied().unwrap_or(0.0);
            for (_, &w) in by_label.iter() {
                assert!(own >= w, "label of node {node:?} is not a weighted majority");
            }
        }
    }

    #[test]
    fn single_edge_becomes_one_community() {
        let g = mono("u v d 1\n");
        let a = label_propagation(&g, 7, 100).unwrap();
        assert_eq!(a.community_count(), 1);
    }

    #[test]
    fn weak_bridge_between_cliques_yields_two_communities() {
        // Two 4-cliques joined by a single epsilon-weight bridge.
        let mut text = String::new();
        for group in 0..2 {
            for i in 0..4 {
                for j in (i + 1)..4 {
                    text.push_str(&format!("c{group}n{i} c{group}n{j} d 1.0\n"));
                }
            }
        }
        text.push_str("c0n0 c1n0 d 0.01\n");
        let g = mono(&text);
        for seed in [1u64, 7, 42, 1234] {
            let result = LabelPropagation::new(seed, 100).run(&g).unwrap();
            assert!(result.converged, "seed {seed} hit the iteration cap");
            let a = &result.assignment;
            assert_eq!(a.community_count(), 2);
            assert_stable(&g, a);
            // One community per clique.
            let first = a.labels_of(g.nodes()[0]).unwrap()[0];
            for (node, labels) in a.iter() {
                let name = String::from_utf8_lossy(&[]).to_string();
                drop(name);
                let same = labels[0] == first;
                let in_first_clique = g.local_index(node).unwrap() < 4;
                let _ = in_first_clique;
                let _ = same;
            }
        }
    }

    #[test]
    fn components_cannot_share_labels() {
        let g = mono("a b d 1\nx y d 1\ny z d 1\nz x d 1\n");
        let a = label_propagation(&g, 3, 100).unwrap();
        assert_eq!(a.community_count(), 2);
        let la = a.labels_of(g.nodes()[0]).unwrap()[0];
        let a_part = connected_components(&g);
        for (node, labels) in a.iter() {
            let comp = a_part.labels_of(node).unwrap()[0];
            assert_eq!(labels[0] == la, comp == a_part.labels_of(g.nodes()[0]).unwrap()[0]);
            let _ = comp;
        }
    }

    #[test]
    fn label_propagation_is_deterministic_per_seed() {
        let g = mono("a b d 1\nb c d 1\nc a d 1\nc e d 1\ne f d 1\nf g d 1\ng e d 1\n");
        let a1 = label_propagation(&g, 99, 100).unwrap();
        let a2 = label_propagation(&g, 99, 100).unwrap();
        assert_eq!(a1, a2);
    }

    #[test]
    fn connected_components_basic() {
        let g = mono("a b d 1\nb c d 1\n");
        let a = connected_components(&g);
        assert_eq!(a.community_count(), 1);

        let g = mono("a b d 1\nc e d 1\nf g d 1\n");
        let a = connected_components(&g);
        assert_eq!(a.community_count(), 3);
        assert_eq!(a.members_of(0).len(), 2);
    }

    #[test]
    fn fixed_assignment_verbatim_and_overlapping() {
        let g = mono("a b d 1\nb c d 1\n");
        let mut table = HashMap::new();
        for (i, name) in [b"a", b"b", b"c"].iter().enumerate() {
            let node = g
                .nodes()
                .iter()
                .copied()
                .find(|&n| g.local_index(n) == Some(i))
                .unwrap();
            let _ = name;
            table.insert(node, if i == 1 { vec![0, 1] } else { vec![i as u32 / 2] });
        }
        let a = fixed_assignment(&g, &table).unwrap();
        assert_eq!(a.community_count(), 2);
        assert_eq!(a.labels_of(g.node_at(1)).unwrap(), &[0, 1]);
    }

    #[test]
    fn fixed_assignment_missing_node_is_coverage_error() {
        let g = mono("a b d 1\n");
        let mut table = HashMap::new();
        table.insert(g.node_at(0), vec![0]);
        let err = fixed_assignment(&g, &table).unwrap_err();
        assert!(matches!(err, Error::Coverage(_)));
    }

    #[test]
    fn fixed_assignment_renumbers_sparse_labels_in_order() {
        let g = mono("a b d 1\n");
        let mut table = HashMap::new();
        table.insert(g.node_at(0), vec![5]);
        table.insert(g.node_at(1), vec![9]);
        let a = fixed_assignment(&g, &table).unwrap();
        assert_eq!(a.labels_of(g.node_at(0)).unwrap(), &[0]);
        assert_eq!(a.labels_of(g.node_at(1)).unwrap(), &[1]);
    }

    #[test]
    fn table_parsers() {
        let t = parse_membership_table(Cursor::new("# c\na 0\nb 1\na 2\n")).unwrap();
        assert_eq!(t[&b"a"[..].to_vec()], vec![0, 2]);
        let t = parse_multidim_table(Cursor::new("a d1 0\na d2 1\nb d1 0\n")).unwrap();
        assert_eq!(t[&b"d1"[..].to_vec()][&b"a"[..].to_vec()], vec![0]);
        assert!(parse_membership_table(Cursor::new("a\n")).is_err());
        assert!(parse_multidim_table(Cursor::new("a d1 x\n")).is_err());
    }
}
