//! Ordered tree edit distance (Zhang & Shasha) with metric-driven costs.

use serde::{Deserialize, Serialize};

use crate::concept::{Concept, DistanceMetric};
use crate::error::Result;

/// Ordered, labeled tree. Children order is significant.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LabeledTree {
    pub label: Concept,
    pub children: Vec<LabeledTree>,
}

impl LabeledTree {
    pub fn leaf(label: Concept) -> Self {
        Self {
            label,
            children: Vec::new(),
        }
    }

    pub fn new(label: Concept, children: Vec<LabeledTree>) -> Self {
        Self { label, children }
    }

    /// Number of nodes.
    pub fn size(&self) -> usize {
        1 + self.children.iter().map(LabeledTree::size).sum::<usize>()
    }

    /// Labels in pre-order.
    pub fn labels(&self) -> Vec<&Concept> {
        let mut out = Vec::with_capacity(self.size());
        let mut stack = vec![self];
        while let Some(node) = stack.pop() {
            out.push(&node.label);
            stack.extend(node.children.iter().rev());
        }
        out
    }
}

/// Post-order view of a forest. `None` labels mark the synthetic root that
/// joins a forest into one tree; it is free to keep, delete or insert.
struct PostOrder<'a> {
    labels: Vec<Option<&'a Concept>>,
    leftmost: Vec<usize>,
    keyroots: Vec<usize>,
}

impl<'a> PostOrder<'a> {
    fn tree(root: &'a LabeledTree) -> Self {
        let mut view = Self::empty();
        view.visit(root);
        view.finish()
    }

    fn forest(roots: &'a [LabeledTree]) -> Self {
        let mut view = Self::empty();
        let first = view.labels.len();
        for r in roots {
            view.visit(r);
        }
        view.labels.push(None);
        view.leftmost.push(first);
        view.finish()
    }

    fn empty() -> Self {
        Self {
            labels: Vec::new(),
            leftmost: Vec::new(),
            keyroots: Vec::new(),
        }
    }

    fn visit(&mut self, node: &'a LabeledTree) -> usize {
        let mut leftmost = None;
        for child in &node.children {
            let l = self.visit(child);
            leftmost.get_or_insert(l);
        }
        let me = self.labels.len();
        self.labels.push(Some(&node.label));
        self.leftmost.push(leftmost.unwrap_or(me));
        self.leftmost[me]
    }

    fn finish(mut self) -> Self {
        // a keyroot is the highest node for each distinct leftmost leaf
        let n = self.labels.len();
        let mut highest = vec![None; n];
        for (i, &l) in self.leftmost.iter().enumerate() {
            highest[l] = Some(i);
        }
        self.keyroots = highest.into_iter().flatten().collect();
        self.keyroots.sort_unstable();
        self
    }

    fn len(&self) -> usize {
        self.labels.len()
    }
}

fn null_costs<M: DistanceMetric + ?Sized>(view: &PostOrder, metric: &M) -> Result<Vec<f64>> {
    view.labels
        .iter()
        .map(|l| l.map_or(Ok(0.0), |c| metric.to_null(c)))
        .collect()
}

fn zhang_shasha<M: DistanceMetric + ?Sized>(
    a: &PostOrder,
    b: &PostOrder,
    metric: &M,
) -> Result<f64> {
    let (n, m) = (a.len(), b.len());
    let del = null_costs(a, metric)?;
    let ins = null_costs(b, metric)?;
    let mut relabel = vec![0.0; n * m];
    for (i, x) in a.labels.iter().enumerate() {
        for (j, y) in b.labels.iter().enumerate() {
            relabel[i * m + j] = match (x, y) {
                (Some(x), Some(y)) => metric.distance(x, y)?,
                (None, None) => 0.0,
                (None, Some(_)) => ins[j],
                (Some(_), None) => del[i],
            };
        }
    }

    let mut tree_dist = vec![0.0; n * m];
    let mut forest = vec![0.0; (n + 1) * (m + 1)];
    for &ki in &a.keyroots {
        for &kj in &b.keyroots {
            let (li, lj) = (a.leftmost[ki], b.leftmost[kj]);
            let (rows, cols) = (ki - li + 2, kj - lj + 2);
            let fd = |r: usize, c: usize| r * cols + c;
            forest[fd(0, 0)] = 0.0;
            for r in 1..rows {
                forest[fd(r, 0)] = forest[fd(r - 1, 0)] + del[li + r - 1];
            }
            for c in 1..cols {
                forest[fd(0, c)] = forest[fd(0, c - 1)] + ins[lj + c - 1];
            }
            for r in 1..rows {
                let x = li + r - 1;
                for c in 1..cols {
                    let y = lj + c - 1;
                    let drop_x = forest[fd(r - 1, c)] + del[x];
                    let add_y = forest[fd(r, c - 1)] + ins[y];
                    if a.leftmost[x] == li && b.leftmost[y] == lj {
                        let keep = forest[fd(r - 1, c - 1)] + relabel[x * m + y];
                        let best = drop_x.min(add_y).min(keep);
                        forest[fd(r, c)] = best;
                        tree_dist[x * m + y] = best;
                    } else {
                        let (pr, pc) = (a.leftmost[x] - li, b.leftmost[y] - lj);
                        let keep = forest[fd(pr, pc)] + tree_dist[x * m + y];
                        forest[fd(r, c)] = drop_x.min(add_y).min(keep);
                    }
                }
            }
        }
    }
    Ok(tree_dist[n * m - 1])
}

/// Minimal cost of an edit script turning `a` into `b` while preserving
/// ancestor and sibling order. Relabel costs `d(x, y)`, deletion `d(x, 0)`,
/// insertion `d(0, y)`.
pub fn tree_edit_distance<M: DistanceMetric + ?Sized>(
    a: &LabeledTree,
    b: &LabeledTree,
    metric: &M,
) -> Result<f64> {
    zhang_shasha(&PostOrder::tree(a), &PostOrder::tree(b), metric)
}

/// Tree edit distance between two ordered forests (either may be empty).
/// Each forest hangs below a synthetic zero-cost root.
pub fn forest_edit_distance<M: DistanceMetric + ?Sized>(
    a: &[LabeledTree],
    b: &[LabeledTree],
    metric: &M,
) -> Result<f64> {
    zhang_shasha(&PostOrder::forest(a), &PostOrder::forest(b), metric)
}
