//! CART classification trees on Gini impurity, grown best-first.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::data::Dataset;
use crate::rng::SeededRng;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Splitter {
    /// Exhaustive search over midpoints between distinct values.
    #[default]
    Best,
    /// One uniform threshold per candidate feature.
    Random,
}

impl FromStr for Splitter {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "best" => Ok(Splitter::Best),
            "random" => Ok(Splitter::Random),
            other => Err(format!("unknown splitter `{other}`")),
        }
    }
}

impl fmt::Display for Splitter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Splitter::Best => "best",
            Splitter::Random => "random",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TreeParams {
    pub max_depth: usize,
    pub max_leaves: Option<usize>,
    /// Nodes with fewer rows are never split.
    pub min_split: usize,
    /// Features sampled per node.
    pub max_features: usize,
    pub splitter: Splitter,
}

impl TreeParams {
    /// Depth 8, at most 15 leaves, splits need 10% of the training rows,
    /// `ceil(sqrt(d))` features per node.
    pub fn single_tree(n_train: usize, n_features: usize, splitter: Splitter) -> Self {
        TreeParams {
            max_depth: 8,
            max_leaves: Some(15),
            min_split: ((0.1 * n_train as f64).ceil() as usize).max(2),
            max_features: sqrt_features(n_features),
            splitter,
        }
    }
}

pub(crate) fn sqrt_features(d: usize) -> usize {
    ((d as f64).sqrt().ceil() as usize).clamp(1, d.max(1))
}

#[derive(Debug, Clone, PartialEq)]
pub enum Node {
    Leaf {
        positive: usize,
        total: usize,
        depth: usize,
    },
    Split {
        feature: usize,
        threshold: f64,
        left: usize,
        right: usize,
        total: usize,
        depth: usize,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct DecisionTree {
    nodes: Vec<Node>,
}

#[derive(Debug, Clone, Copy)]
struct SplitChoice {
    feature: usize,
    threshold: f64,
    gain: f64,
}

struct Candidate {
    node: usize,
    rows: Vec<usize>,
    depth: usize,
    split: SplitChoice,
}

impl PartialEq for Candidate {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Candidate {}

impl PartialOrd for Candidate {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Candidate {
    // Highest gain first, then the earliest created node.
    fn cmp(&self, other: &Self) -> Ordering {
        self.split
            .gain
            .total_cmp(&other.split.gain)
            .then(other.node.cmp(&self.node))
    }
}

fn gini(pos: usize, total: usize) -> f64 {
    if total == 0 {
        return 0.0;
    }
    let p = pos as f64 / total as f64;
    2.0 * p * (1.0 - p)
}

/// Weighted impurity decrease `n * G(node) - n_l * G(left) - n_r * G(right)`.
fn gain(pos: usize, total: usize, left_pos: usize, left_total: usize) -> f64 {
    let right_pos = pos - left_pos;
    let right_total = total - left_total;
    total as f64 * gini(pos, total)
        - left_total as f64 * gini(left_pos, left_total)
        - right_total as f64 * gini(right_pos, right_total)
}

struct Builder<'a> {
    data: &'a Dataset,
    params: TreeParams,
}

impl Builder<'_> {
    fn best_threshold(&self, rows: &[usize], feature: usize, pos: usize) -> Option<SplitChoice> {
        let mut sorted: Vec<(f64, bool)> = rows
            .iter()
            .map(|&i| (self.data.row(i)[feature], self.data.label(i)))
            .collect();
        sorted.sort_by(|a, b| a.0.total_cmp(&b.0));
        let n = sorted.len();
        let mut best: Option<SplitChoice> = None;
        let mut left_pos = 0;
        for i in 0..n - 1 {
            left_pos += usize::from(sorted[i].1);
            let (lo, hi) = (sorted[i].0, sorted[i + 1].0);
            if lo == hi {
                continue;
            }
            let g = gain(pos, n, left_pos, i + 1);
            if best.is_none_or(|b| g > b.gain) {
                let mid = lo + (hi - lo) / 2.0;
                let threshold = if mid >= hi { lo } else { mid };
                best = Some(SplitChoice {
                    feature,
                    threshold,
                    gain: g,
                });
            }
        }
        best
    }

    fn random_threshold(&self, rows: &[usize], feature: usize, pos: usize, rng: &mut SeededRng) -> Option<SplitChoice> {
        let values = rows.iter().map(|&i| self.data.row(i)[feature]);
        let (lo, hi) = values.fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), v| (l.min(v), h.max(v)));
        if lo >= hi {
            return None;
        }
        let mut threshold = rng.random_range(lo..hi);
        if threshold >= hi {
            threshold = lo;
        }
        let (mut left_pos, mut left_total) = (0, 0);
        for &i in rows {
            if self.data.row(i)[feature] <= threshold {
                left_total += 1;
                left_pos += usize::from(self.data.label(i));
            }
        }
        Some(SplitChoice {
            feature,
            threshold,
            gain: gain(pos, rows.len(), left_pos, left_total),
        })
    }

    /// Evaluates `max_features` shuffled features, continuing past that
    /// budget only while no valid split has been found.
    fn find_split(&self, rows: &[usize], depth: usize, rng: &mut SeededRng) -> Option<SplitChoice> {
        let pos = rows.iter().filter(|&&i| self.data.label(i)).count();
        if depth >= self.params.max_depth || rows.len() < self.params.min_split || pos == 0 || pos == rows.len() {
            return None;
        }
        let mut features: Vec<usize> = (0..self.data.n_features()).collect();
        features.shuffle(rng);
        let mut best: Option<SplitChoice> = None;
        for (visited, &f) in features.iter().enumerate() {
            if visited >= self.params.max_features && best.is_some() {
                break;
            }
            let choice = match self.params.splitter {
                Splitter::Best => self.best_threshold(rows, f, pos),
                Splitter::Random => self.random_threshold(rows, f, pos, rng),
            };
            if let Some(c) = choice {
                if best.is_none_or(|b| c.gain > b.gain) {
                    best = Some(c);
                }
            }
        }
        best
    }
}

impl DecisionTree {
    /// Grows a tree on `rows` of `data` (repeats allowed, as in a bootstrap).
    pub fn fit(data: &Dataset, rows: &[usize], params: TreeParams, rng: &mut SeededRng) -> Self {
        let builder = Builder { data, params };
        let leaf = |rows: &[usize], depth: usize| Node::Leaf {
            positive: rows.iter().filter(|&&i| data.label(i)).count(),
            total: rows.len(),
            depth,
        };
        let mut nodes = vec![leaf(rows, 0)];
        let mut heap = BinaryHeap::new();
        if let Some(split) = builder.find_split(rows, 0, rng) {
            heap.push(Candidate {
                node: 0,
                rows: rows.to_vec(),
                depth: 0,
                split,
            });
        }
        let mut leaves = 1;
        while let Some(cand) = heap.pop() {
            if params.max_leaves.is_some_and(|m| leaves >= m) {
                break;
            }
            let SplitChoice { feature, threshold, .. } = cand.split;
            let (left_rows, right_rows): (Vec<usize>, Vec<usize>) =
                cand.rows.iter().partition(|&&i| data.row(i)[feature] <= threshold);
            if left_rows.is_empty() || right_rows.is_empty() {
                continue;
            }
            let left = nodes.len();
            let right = left + 1;
            nodes.push(leaf(&left_rows, cand.depth + 1));
            nodes.push(leaf(&right_rows, cand.depth + 1));
            nodes[cand.node] = Node::Split {
                feature,
                threshold,
                left,
                right,
                total: cand.rows.len(),
                depth: cand.depth,
            };
            leaves += 1;
            for (node, child_rows) in [(left, left_rows), (right, right_rows)] {
                if let Some(split) = builder.find_split(&child_rows, cand.depth + 1, rng) {
                    heap.push(Candidate {
                        node,
                        rows: child_rows,
                        depth: cand.depth + 1,
                        split,
                    });
                }
            }
        }
        DecisionTree { nodes }
    }

    fn leaf_for(&self, x: &[f64]) -> &Node {
        let mut at = 0;
        loop {
            match &self.nodes[at] {
                Node::Split {
                    feature,
                    threshold,
                    left,
                    right,
                    ..
                } => at = if x[*feature] <= *threshold { *left } else { *right },
                leaf => return leaf,
            }
        }
    }

    /// Positive fraction of the leaf `x` falls into.
    pub fn score(&self, x: &[f64]) -> f64 {
        match self.leaf_for(x) {
            Node::Leaf { positive, total, .. } => *positive as f64 / *total as f64,
            Node::Split { .. } => unreachable!(),
        }
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn n_leaves(&self) -> usize {
        self.nodes.iter().filter(|n| matches!(n, Node::Leaf { .. })).count()
    }

    pub fn depth(&self) -> usize {
        self.nodes
            .iter()
            .map(|n| match n {
                Node::Leaf { depth, .. } | Node::Split { depth, .. } => *depth,
            })
            .max()
            .unwrap_or(0)
    }

    /// Row counts of every internal node.
    pub fn split_sizes(&self) -> impl Iterator<Item = usize> + '_ {
        self.nodes.iter().filter_map(|n| match n {
            Node::Split { total, .. } => Some(*total),
            Node::Leaf { .. } => None,
        })
    }

    #[cfg(test)]
    pub(crate) fn from_nodes(nodes: Vec<Node>) -> Self {
        DecisionTree { nodes }
    }
}
