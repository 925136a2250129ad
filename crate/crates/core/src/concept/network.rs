use std::cmp::Ordering;
use std::collections::{BinaryHeap, HashMap, VecDeque};
use std::fmt::Write as _;
use std::path::Path;
use std::sync::OnceLock;

use super::metric::DistanceMetric;
use super::Concept;
use crate::error::{Error, Result};

/// Networks up to this many nodes keep a dense all-pairs cache, filled one
/// source row at a time.
const DENSE_CACHE_LIMIT: usize = 4096;

/// Undirected weighted graph over concept ids. The distance between two
/// concepts is the length of the shortest path between their nodes.
#[derive(Debug)]
pub struct SemanticNetwork {
    ids: Vec<String>,
    index: HashMap<String, usize>,
    adjacency: Vec<Vec<(usize, f64)>>,
    null: usize,
    rows: Option<Vec<OnceLock<Vec<f64>>>>,
}

#[derive(PartialEq)]
struct Frontier(f64, usize);

impl Eq for Frontier {}

impl PartialOrd for Frontier {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Frontier {
    // reversed: BinaryHeap is a max-heap
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .0
            .total_cmp(&self.0)
            .then_with(|| other.1.cmp(&self.1))
    }
}

impl SemanticNetwork {
    /// Builds a network from `(a, b, length)` edges. Parallel edges keep
    /// the shortest length.
    pub fn new<I, S>(edges: I, null_id: &str) -> Result<Self>
    where
        I: IntoIterator<Item = (S, S, f64)>,
        S: AsRef<str>,
    {
        let mut ids = Vec::new();
        let mut index = HashMap::new();
        let mut lengths: HashMap<(usize, usize), f64> = HashMap::new();
        let mut intern = |id: &str, ids: &mut Vec<String>| -> usize {
            *index.entry(id.to_string()).or_insert_with(|| {
                ids.push(id.to_string());
                ids.len() - 1
            })
        };

        for (a, b, len) in edges {
            let (a, b) = (a.as_ref(), b.as_ref());
            if !(len.is_finite() && len > 0.0) {
                return Err(Error::InvalidNetwork(format!(
                    "edge {a} - {b} has length {len}, must be positive"
                )));
            }
            if a == b {
                return Err(Error::InvalidNetwork(format!("self loop on `{a}`")));
            }
            let (ia, ib) = (intern(a, &mut ids), intern(b, &mut ids));
            let key = (ia.min(ib), ia.max(ib));
            let slot = lengths.entry(key).or_insert(len);
            *slot = slot.min(len);
        }

        let null = intern(null_id, &mut ids);

        let mut adjacency = vec![Vec::new(); ids.len()];
        let mut sorted: Vec<_> = lengths.into_iter().collect();
        sorted.sort_by_key(|x| x.0);
        for ((a, b), len) in sorted {
            adjacency[a].push((b, len));
            adjacency[b].push((a, len));
        }

        // every node must be reachable from the nullconcept
        let mut seen = vec![false; ids.len()];
        let mut queue = VecDeque::from([null]);
        seen[null] = true;
        while let Some(u) = queue.pop_front() {
            for &(v, _) in &adjacency[u] {
                if !seen[v] {
                    seen[v] = true;
                    queue.push_back(v);
                }
            }
        }
        if let Some(i) = seen.iter().position(|s| !s) {
            return Err(Error::InvalidNetwork(format!(
                "`{}` is not reachable from the nullconcept `{}`",
                ids[i], ids[null]
            )));
        }

        let rows = (ids.len() <= DENSE_CACHE_LIMIT)
            .then(|| (0..ids.len()).map(|_| OnceLock::new()).collect());
        Ok(Self {
            ids,
            index,
            adjacency,
            null,
            rows,
        })
    }

    /// Parses the text format: one `<idA> <idB> <length>` line per edge and
    /// one `null <id>` line. Blank lines and `#` comments are ignored.
    pub fn parse(text: &str, source: &str) -> Result<Self> {
        let mut edges = Vec::new();
        let mut null_id: Option<String> = None;
        let err = |line: usize, message: String| Error::Parse {
            path: source.to_string(),
            line,
            message,
        };
        for (n, raw) in text.lines().enumerate() {
            let line_no = n + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split_whitespace().collect();
            match fields[..] {
                ["null", id] => {
                    if null_id.replace(id.to_string()).is_some() {
                        return Err(err(line_no, "more than one `null` line".into()));
                    }
                }
                [a, b, len] => {
                    let len: f64 = len
                        .parse()
                        .map_err(|_| err(line_no, format!("bad edge length `{len}`")))?;
                    edges.push((a.to_string(), b.to_string(), len));
                }
                _ => {
                    return Err(err(
                        line_no,
                        format!("expected `<a> <b> <length>` or `null <id>`, got `{line}`"),
                    ))
                }
            }
        }
        let null_id = null_id.ok_or_else(|| err(0, "missing `null <id>` line".into()))?;
        Self::new(edges, &null_id).map_err(|e| match e {
            Error::InvalidNetwork(m) => err(0, m),
            other => other,
        })
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)?;
        Self::parse(&text, &path.display().to_string())
    }

    /// Serializes back to the text format, edges sorted by node order.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (a, nbrs) in self.adjacency.iter().enumerate() {
            for &(b, len) in nbrs {
                if a < b {
                    let _ = writeln!(out, "{} {} {}", self.ids[a], self.ids[b], len);
                }
            }
        }
        let _ = writeln!(out, "null {}", self.ids[self.null]);
        out
    }

    pub fn node_ids(&self) -> impl Iterator<Item = &str> {
        self.ids.iter().map(String::as_str)
    }

    pub fn null_id(&self) -> &str {
        &self.ids[self.null]
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn contains(&self, id: &str) -> bool {
        self.index.contains_key(id)
    }

    fn node(&self, id: &str) -> Result<usize> {
        self.index
            .get(id)
            .copied()
            .ok_or_else(|| Error::UnknownConcept(id.to_string()))
    }

    fn dijkstra(&self, source: usize, target: Option<usize>) -> Vec<f64> {
        let mut dist = vec![f64::INFINITY; self.ids.len()];
        let mut heap = BinaryHeap::new();
        dist[source] = 0.0;
        heap.push(Frontier(0.0, source));
        while let Some(Frontier(d, u)) = heap.pop() {
            if d > dist[u] {
                continue;
            }
            if Some(u) == target {
                break;
            }
            for &(v, len) in &self.adjacency[u] {
                let nd = d + len;
                if nd < dist[v] {
                    dist[v] = nd;
                    heap.push(Frontier(nd, v));
                }
            }
        }
        dist
    }

    fn between(&self, a: usize, b: usize) -> f64 {
        if a == b {
            return 0.0;
        }
        // query from the smaller index so d(a, b) and d(b, a) share a row
        let (src, dst) = (a.min(b), a.max(b));
        match &self.rows {
            Some(rows) => rows[src].get_or_init(|| self.dijkstra(src, None))[dst],
            None => self.dijkstra(src, Some(dst))[dst],
        }
    }

    /// Shortest-path length between two node ids.
    pub fn network_distance(&self, a: &str, b: &str) -> Result<f64> {
        let (ia, ib) = (self.node(a)?, self.node(b)?);
        Ok(self.between(ia, ib))
    }
}

impl DistanceMetric for SemanticNetwork {
    fn distance(&self, a: &Concept, b: &Concept) -> Result<f64> {
        let ia = if a.is_null { self.null } else { self.node(&a.id)? };
        let ib = if b.is_null { self.null } else { self.node(&b.id)? };
        Ok(self.between(ia, ib))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const SHAPES: &str = "triangle square 1\ntriangle 0 1\nsquare 0 1\n0 circle 1\nnull 0\n";

    #[test]
    fn shapes_network_distances() {
        let net = SemanticNetwork::parse(SHAPES, "shapes").unwrap();
        assert_eq!(net.network_distance("triangle", "square").unwrap(), 1.0);
        assert_eq!(net.network_distance("triangle", "circle").unwrap(), 2.0);
        assert_eq!(net.network_distance("circle", "triangle").unwrap(), 2.0);
        assert_eq!(net.network_distance("square", "square").unwrap(), 0.0);
        assert_eq!(net.to_null(&Concept::symbol("circle")).unwrap(), 1.0);
        let err = net.network_distance("triangle", "hexagon").unwrap_err();
        assert!(err.to_string().contains("hexagon"));
    }

    #[test]
    fn text_round_trip() {
        let net = SemanticNetwork::parse(SHAPES, "shapes").unwrap();
        let again = SemanticNetwork::parse(&net.to_text(), "again").unwrap();
        for a in net.node_ids() {
            for b in net.node_ids() {
                assert_eq!(
                    net.network_distance(a, b).unwrap(),
                    again.network_distance(a, b).unwrap()
                );
            }
        }
    }

    #[test]
    fn rejects_bad_networks() {
        assert!(SemanticNetwork::parse("a b 1\n", "x").is_err());
        assert!(SemanticNetwork::parse("a b 0\nnull a\n", "x").is_err());
        assert!(SemanticNetwork::parse("a b -2\nnull a\n", "x").is_err());
        assert!(SemanticNetwork::parse("a b 1,5\nnull a\n", "x").is_err());
        assert!(SemanticNetwork::parse("a b 1\nc d 1\nnull a\n", "x").is_err());
        assert!(SemanticNetwork::parse("a b 1\nnull a\nnull b\n", "x").is_err());
        assert!(SemanticNetwork::parse("a b 1 2\nnull a\n", "x").is_err());
    }

    #[test]
    fn weighted_paths_prefer_shorter_total() {
        let net =
            SemanticNetwork::new([("0", "a", 5.0), ("0", "b", 1.0), ("b", "a", 1.5)], "0").unwrap();
        assert_eq!(net.network_distance("0", "a").unwrap(), 2.5);
    }
}
