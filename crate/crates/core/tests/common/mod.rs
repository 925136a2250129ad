//! Brute-force oracles shared by the oracle and acceptance suites.
#![allow(dead_code)]

use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use scratch_creativity::align::{hungarian, sequence_edit_distance, tree_edit_distance, LabeledTree};
use scratch_creativity::concept::{Concept, DiscreteMetric};
use scratch_creativity::rank::{kendall_tau, TauVariant};
use scratch_creativity::Error;

/// Tree shape as parent links in preorder; node 0 is the root.
pub type Shape = Vec<Option<usize>>;

pub fn shapes(n: usize) -> Vec<Shape> {
    // ordered trees are built by attaching each next preorder node to a
    // node on the current rightmost path
    fn grow(cur: &mut Shape, path: &mut Vec<usize>, n: usize, out: &mut Vec<Shape>) {
        if cur.len() == n {
            out.push(cur.clone());
            return;
        }
        for depth in 0..path.len() {
            let parent = path[depth];
            let id = cur.len();
            cur.push(Some(parent));
            let saved: Vec<usize> = path.drain(depth + 1..).collect();
            path.push(id);
            grow(cur, path, n, out);
            path.pop();
            path.extend(saved);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    grow(&mut vec![None], &mut vec![0], n, &mut out);
    out
}

pub fn ancestors(shape: &Shape) -> Vec<Vec<bool>> {
    let n = shape.len();
    let mut anc = vec![vec![false; n]; n];
    for v in 0..n {
        let mut p = shape[v];
        while let Some(a) = p {
            anc[a][v] = true;
            p = shape[a];
        }
    }
    anc
}

/// Every mapping that keeps one-to-one correspondence, the ancestor
/// relation and preorder.
pub fn tai_mappings(a: &Shape, b: &Shape) -> Vec<Vec<(usize, usize)>> {
    let (aa, ab) = (ancestors(a), ancestors(b));
    let mut out = Vec::new();
    #[allow(clippy::too_many_arguments)]
    fn rec(
        i: usize,
        next_j: usize,
        cur: &mut Vec<(usize, usize)>,
        na: usize,
        nb: usize,
        aa: &[Vec<bool>],
        ab: &[Vec<bool>],
        out: &mut Vec<Vec<(usize, usize)>>,
    ) {
        if i == na {
            out.push(cur.clone());
            return;
        }
        rec(i + 1, next_j, cur, na, nb, aa, ab, out);
        for j in next_j..nb {
            if cur.iter().all(|&(x, y)| aa[x][i] == ab[y][j]) {
                cur.push((i, j));
                rec(i + 1, j + 1, cur, na, nb, aa, ab, out);
                cur.pop();
            }
        }
    }
    rec(0, 0, &mut Vec::new(), a.len(), b.len(), &aa, &ab, &mut out);
    out
}

pub fn build(shape: &Shape, labels: &[usize], names: &[&str]) -> LabeledTree {
    fn node(v: usize, shape: &Shape, labels: &[usize], names: &[&str]) -> LabeledTree {
        let children = (v + 1..shape.len())
            .filter(|&c| shape[c] == Some(v))
            .map(|c| node(c, shape, labels, names))
            .collect();
        LabeledTree::new(Concept::symbol(names[labels[v]]), children)
    }
    node(0, shape, labels, names)
}

pub fn labelings(n: usize, k: usize) -> Vec<Vec<usize>> {
    (0..k.pow(n as u32))
        .map(|mut code| {
            (0..n)
                .map(|_| {
                    let d = code % k;
                    code /= k;
                    d
                })
                .collect()
        })
        .collect()
}

/// Labelings whose symbols first appear in order 0, 1, 2, ...
pub fn canonical_labelings(n: usize, k: usize) -> Vec<Vec<usize>> {
    labelings(n, k)
        .into_iter()
        .filter(|l| {
            let mut top = 0;
            l.iter().all(|&s| {
                let ok = s <= top;
                if s == top {
                    top += 1;
                }
                ok
            })
        })
        .collect()
}

pub struct Family {
    pub shape: Shape,
    pub labels: Vec<Vec<usize>>,
    pub trees: Vec<LabeledTree>,
}

impl Family {
    pub fn new(shape: Shape, labels: Vec<Vec<usize>>) -> Self {
        let trees = labels.iter().map(|l| build(&shape, l, &SYMBOLS)).collect();
        Self { shape, labels, trees }
    }
}

pub fn mapping_cost(
    map: &[(usize, usize)],
    la: &[usize],
    lb: &[usize],
    rel: &dyn Fn(usize, usize) -> f64,
    del: &dyn Fn(usize) -> f64,
) -> f64 {
    let (mut used_a, mut used_b) = (0u32, 0u32);
    let mut cost = 0.0;
    for &(i, j) in map {
        used_a |= 1 << i;
        used_b |= 1 << j;
        cost += rel(la[i], lb[j]);
    }
    cost += (0..la.len()).filter(|&i| used_a & (1 << i) == 0).map(|i| del(la[i])).sum::<f64>();
    cost += (0..lb.len()).filter(|&j| used_b & (1 << j) == 0).map(|j| del(lb[j])).sum::<f64>();
    cost
}

pub const SYMBOLS: [&str; 3] = ["a", "b", "c"];

pub fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for pos in 0..=p.len() {
            let mut q = p.clone();
            q.insert(pos, n - 1);
            out.push(q);
        }
    }
    out
}

pub fn levenshtein(a: &[char], b: &[char], memo: &mut HashMap<(usize, usize), usize>) -> usize {
    if a.is_empty() {
        return b.len();
    }
    if b.is_empty() {
        return a.len();
    }
    if let Some(&v) = memo.get(&(a.len(), b.len())) {
        return v;
    }
    let (ra, rb) = (&a[1..], &b[1..]);
    let sub = levenshtein(ra, rb, memo) + usize::from(a[0] != b[0]);
    let v = sub.min(levenshtein(ra, b, memo) + 1).min(levenshtein(a, rb, memo) + 1);
    memo.insert((a.len(), b.len()), v);
    v
}

/// Tau from concordant and discordant counts with the tie-group
/// correction terms.
pub fn tau_by_counts(a: &[i64], b: &[i64], tau_b: bool) -> Option<f64> {
    let n = a.len() as i64;
    let (mut nc, mut nd) = (0i64, 0i64);
    for i in 0..a.len() {
        for j in i + 1..a.len() {
            let s = (a[i] - a[j]) * (b[i] - b[j]);
            if s > 0 {
                nc += 1;
            } else if s < 0 {
                nd += 1;
            }
        }
    }
    let n0 = n * (n - 1) / 2;
    if !tau_b {
        return Some((nc - nd) as f64 / n0 as f64);
    }
    let ties = |v: &[i64]| {
        let mut counts: HashMap<i64, i64> = HashMap::new();
        for x in v {
            *counts.entry(*x).or_default() += 1;
        }
        counts.values().map(|t| t * (t - 1) / 2).sum::<i64>()
    };
    let (n1, n2) = (ties(a), ties(b));
    if n0 == n1 || n0 == n2 {
        return None;
    }
    Some((nc - nd) as f64 / (((n0 - n1) as f64) * ((n0 - n2) as f64)).sqrt())
}


/// Unit-cost tree edit distance against minimum-cost mapping enumeration
/// on every pair of trees with at most `max_nodes` nodes over three
/// symbols. Returns the number of pairs checked.
pub fn check_tree_edit_distance(max_nodes: usize) -> Result<usize, String> {
    // symbol renaming preserves unit-cost distances, so the left tree
    // only needs canonical labelings
    let family = |canonical: bool| -> Vec<Family> {
        (1..=max_nodes)
            .flat_map(|n| shapes(n).into_iter().map(move |s| (n, s)))
            .map(|(n, s)| Family::new(s, if canonical { canonical_labelings(n, 3) } else { labelings(n, 3) }))
            .collect()
    };
    let (left, right) = (family(true), family(false));
    let rel = |x: usize, y: usize| if x == y { 0.0 } else { 1.0 };
    let del = |_: usize| 1.0;
    left.par_iter()
        .map(|fa| {
            let mut n = 0;
            for fb in &right {
                let maps = tai_mappings(&fa.shape, &fb.shape);
                for (la, ta) in fa.labels.iter().zip(&fa.trees) {
                    for (lb, tb) in fb.labels.iter().zip(&fb.trees) {
                        let want = maps
                            .iter()
                            .map(|m| mapping_cost(m, la, lb, &rel, &del))
                            .fold(f64::INFINITY, f64::min);
                        let got = tree_edit_distance(ta, tb, &DiscreteMetric).map_err(|e| e.to_string())?;
                        if got != want {
                            return Err(format!("{la:?} {:?} vs {lb:?} {:?}: {got} != {want}", fa.shape, fb.shape));
                        }
                        n += 1;
                    }
                }
            }
            Ok(n)
        })
        .sum()
}

/// Hungarian totals against permutation search on random integer
/// matrices up to 7 x 7, square and rectangular.
pub fn check_hungarian(trials: usize, seed: u64) -> Result<(), String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let perms: Vec<Vec<Vec<usize>>> = (0..=7).map(permutations).collect();
    for trial in 0..trials {
        let rows = rng.gen_range(1..=7);
        let cols = if trial % 3 == 0 { rng.gen_range(1..=7) } else { rows };
        let cost: Vec<Vec<f64>> = (0..rows)
            .map(|_| (0..cols).map(|_| rng.gen_range(0..50) as f64).collect())
            .collect();
        let n = rows.max(cols);
        let at = |i: usize, j: usize| if i < rows && j < cols { cost[i][j] } else { 0.0 };
        let best = perms[n]
            .iter()
            .map(|p| p.iter().enumerate().map(|(i, &j)| at(i, j)).sum::<f64>())
            .fold(f64::INFINITY, f64::min);
        let a = hungarian(&cost).map_err(|e| e.to_string())?;
        let from_pairs: f64 = a.pairs.iter().map(|&(i, j)| at(i, j)).sum();
        let mut cols_used: Vec<usize> = a.pairs.iter().map(|p| p.1).collect();
        cols_used.sort_unstable();
        if a.total != best || from_pairs != best || cols_used != (0..n).collect::<Vec<_>>() {
            return Err(format!("trial {trial}: {cost:?} gave {} (pairs {from_pairs}), best {best}", a.total));
        }
    }
    Ok(())
}

/// Unit-cost sequence edit distance against memoized Levenshtein
/// recursion on random strings.
pub fn check_levenshtein(pairs: usize, seed: u64) -> Result<(), String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let alphabet = ['a', 'b', 'c', 'd'];
    for _ in 0..pairs {
        let word = |rng: &mut ChaCha8Rng| -> Vec<char> {
            let n = rng.gen_range(0..12);
            (0..n).map(|_| alphabet[rng.gen_range(0..alphabet.len())]).collect()
        };
        let (a, b) = (word(&mut rng), word(&mut rng));
        let concepts = |w: &[char]| w.iter().map(|c| Concept::symbol(c.to_string())).collect::<Vec<_>>();
        let got = sequence_edit_distance(&concepts(&a), &concepts(&b), &DiscreteMetric).map_err(|e| e.to_string())?;
        let want = levenshtein(&a, &b, &mut HashMap::new()) as f64;
        if got != want {
            return Err(format!("{a:?} {b:?}: {got} != {want}"));
        }
    }
    Ok(())
}

/// Tau-b and tau-a against pair counting on random integer lists with
/// ties. Returns the largest absolute deviation.
pub fn check_kendall(lists: usize, seed: u64) -> Result<f64, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = 0.0f64;
    for _ in 0..lists {
        let n = rng.gen_range(2..=30);
        let range = rng.gen_range(1..=10);
        let a: Vec<i64> = (0..n).map(|_| rng.gen_range(0..range)).collect();
        let b: Vec<i64> = (0..n).map(|_| rng.gen_range(0..range)).collect();
        let fa: Vec<f64> = a.iter().map(|&x| x as f64).collect();
        let fb: Vec<f64> = b.iter().map(|&x| x as f64).collect();
        match (tau_by_counts(&a, &b, true), kendall_tau(&fa, &fb, TauVariant::B)) {
            (Some(want), Ok(got)) => worst = worst.max((got - want).abs()),
            (None, Err(Error::UndefinedTau(_))) => {}
            (want, got) => return Err(format!("{a:?} {b:?}: {got:?} vs {want:?}")),
        }
        let got = kendall_tau(&fa, &fb, TauVariant::A).map_err(|e| e.to_string())?;
        worst = worst.max((got - tau_by_counts(&a, &b, false).unwrap()).abs());
    }
    Ok(worst)
}
