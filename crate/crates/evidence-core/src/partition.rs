//! Regression-tree partitioning of a posterior sample cloud.
//!
//! A CART regression tree is grown on (point, ψ) pairs with the classic
//! stopping rules (minimum node size to attempt a split, minimum child size,
//! a complexity threshold relative to the root sum of squares, and a depth
//! cap). The fitted tree then induces an axis-aligned partition of the
//! sample bounding box: each leaf owns the sub-box carved out by the splits
//! on the path from the root, and the sample indices that route to it.
//!
//! Split selection scans axes and thresholds in ascending order and only
//! replaces the incumbent on a strictly better score, so ties resolve to the
//! lowest axis and then the lowest threshold, and refitting the same data
//! reproduces the same tree bit for bit.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};

/// One posterior draw with its negative log unnormalized density ψ.
#[derive(Clone, Debug, PartialEq)]
pub struct LabeledSample {
    pub point: Vec<f64>,
    pub psi: f64,
}

/// Stopping rules for tree growth.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TreeConfig {
    /// Smallest node size at which a split is attempted.
    pub min_split: usize,
    /// Smallest admissible child size.
    pub min_bucket: usize,
    /// A split must reduce the sum of squares by at least this fraction of
    /// the root sum of squares.
    pub complexity: f64,
    /// Maximum tree depth (root at depth 0).
    pub max_depth: usize,
}

impl Default for TreeConfig {
    fn default() -> Self {
        Self {
            min_split: 20,
            min_bucket: 7,
            complexity: 0.01,
            max_depth: 30,
        }
    }
}

/// Axis-aligned box ∏ [lower_i, upper_i] with strictly positive edges.
#[derive(Clone, Debug, PartialEq)]
pub struct Rect {
    lower: Vec<f64>,
    upper: Vec<f64>,
}

impl Rect {
    pub fn new(lower: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        if lower.is_empty() {
            return Err(Error::EmptyInput("rectangle bounds"));
        }
        if lower.len() != upper.len() {
            return Err(Error::LengthMismatch {
                context: "Rect::new",
                left: lower.len(),
                right: upper.len(),
            });
        }
        for (axis, (a, b)) in lower.iter().zip(&upper).enumerate() {
            if !(b - a > 0.0) || !a.is_finite() || !b.is_finite() {
                return Err(Error::NonPositiveEdge { axis });
            }
        }
        Ok(Self { lower, upper })
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    pub fn lower(&self) -> &[f64] {
        &self.lower
    }

    pub fn upper(&self) -> &[f64] {
        &self.upper
    }

    /// Σ ln(upper_i − lower_i); stays finite long after the linear-domain
    /// volume would underflow.
    pub fn log_volume(&self) -> f64 {
        self.lower
            .iter()
            .zip(&self.upper)
            .map(|(a, b)| libm::log(b - a))
            .sum()
    }

    /// Closed-box membership.
    pub fn contains(&self, x: &[f64]) -> bool {
        x.len() == self.dim()
            && x.iter()
                .zip(self.lower.iter().zip(&self.upper))
                .all(|(v, (a, b))| *a <= *v && *v <= *b)
    }
}

/// Smallest closed box containing every point. Degenerate axes (all points
/// sharing one coordinate) are rejected, because a zero-volume box cannot
/// carry probability mass.
pub fn bounding_box(points: &[Vec<f64>]) -> Result<Rect> {
    let first = points.first().ok_or(Error::EmptyInput("bounding_box points"))?;
    let d = first.len();
    let mut lower = first.clone();
    let mut upper = first.clone();
    for p in points.iter().skip(1) {
        if p.len() != d {
            return Err(Error::LengthMismatch {
                context: "bounding_box",
                left: p.len(),
                right: d,
            });
        }
        for i in 0..d {
            lower[i] = lower[i].min(p[i]);
            upper[i] = upper[i].max(p[i]);
        }
    }
    for axis in 0..d {
        if !(upper[axis] - lower[axis] > 0.0) {
            return Err(Error::DegenerateAxis { axis });
        }
    }
    Rect::new(lower, upper)
}

#[derive(Clone, Debug, PartialEq)]
enum Node {
    Internal {
        axis: usize,
        threshold: f64,
        left: usize,
        right: usize,
    },
    Leaf {
        mean: f64,
        count: usize,
    },
}

/// A fitted regression tree. Points with `x[axis] ≤ threshold` route left,
/// both during fitting and during prediction.
#[derive(Clone, Debug, PartialEq)]
pub struct RegressionTree {
    dim: usize,
    nodes: Vec<Node>,
}

struct SplitChoice {
    axis: usize,
    threshold: f64,
    reduction: f64,
}

fn node_sse(psi: &[f64], idx: &[usize]) -> f64 {
    let m = idx.len() as f64;
    let sum: f64 = idx.iter().map(|&i| psi[i]).sum();
    let mean = sum / m;
    idx.iter().map(|&i| (psi[i] - mean) * (psi[i] - mean)).sum()
}

/// Best admissible split of `idx`, or None. Scans axes ascending and, within
/// an axis, thresholds ascending, keeping strictly better candidates only.
fn best_split(
    points: &[Vec<f64>],
    psi: &[f64],
    idx: &[usize],
    min_bucket: usize,
    parent_sse: f64,
) -> Option<SplitChoice> {
    let d = points[idx[0]].len();
    let m = idx.len();
    let mut best: Option<SplitChoice> = None;
    let mut order: Vec<usize> = idx.to_vec();
    for axis in 0..d {
        order.sort_by(|&a, &b| points[a][axis].total_cmp(&points[b][axis]));
        // Prefix sums of ψ and ψ² in axis order turn every left/right SSE
        // into O(1): SSE = Σψ² − (Σψ)²/m.
        let mut pre = Vec::with_capacity(m + 1);
        let mut pre2 = Vec::with_capacity(m + 1);
        pre.push(0.0);
        pre2.push(0.0);
        for &i in &order {
            pre.push(pre.last().unwrap() + psi[i]);
            pre2.push(pre2.last().unwrap() + psi[i] * psi[i]);
        }
        for k in 1..m {
            let lo = points[order[k - 1]][axis];
            let hi = points[order[k]][axis];
            if !(lo < hi) {
                continue;
            }
            let t = 0.5 * (lo + hi);
            // Adjacent floats can make the midpoint collapse onto one of
            // them, which would route samples inconsistently; skip those.
            if !(lo < t && t < hi) {
                continue;
            }
            if k < min_bucket || m - k < min_bucket {
                continue;
            }
            let left_sse = pre2[k] - pre[k] * pre[k] / k as f64;
            let rs = pre[m] - pre[k];
            let rs2 = pre2[m] - pre2[k];
            let right_sse = rs2 - rs * rs / (m - k) as f64;
            let reduction = parent_sse - left_sse - right_sse;
            let better = match &best {
                None => true,
                Some(b) => reduction > b.reduction,
            };
            if better {
                best = Some(SplitChoice {
                    axis,
                    threshold: t,
                    reduction,
                });
            }
        }
    }
    best
}

/// Grows a regression tree on the labeled samples.
pub fn fit_regression_tree(samples: &[LabeledSample], config: &TreeConfig) -> Result<RegressionTree> {
    if samples.is_empty() {
        return Err(Error::EmptyInput("fit_regression_tree samples"));
    }
    if config.min_bucket == 0 || config.min_split < 2 * config.min_bucket {
        return Err(Error::InvalidParameter {
            name: "tree min_split/min_bucket",
        });
    }
    let d = samples[0].point.len();
    if d == 0 {
        return Err(Error::EmptyInput("sample dimension"));
    }
    for s in samples {
        if s.point.len() != d {
            return Err(Error::LengthMismatch {
                context: "fit_regression_tree",
                left: s.point.len(),
                right: d,
            });
        }
        if !s.psi.is_finite() || s.point.iter().any(|v| !v.is_finite()) {
            return Err(Error::Domain {
                what: "non-finite sample in fit_regression_tree",
            });
        }
    }
    let points: Vec<Vec<f64>> = samples.iter().map(|s| s.point.clone()).collect();
    let psi: Vec<f64> = samples.iter().map(|s| s.psi).collect();
    let all: Vec<usize> = (0..samples.len()).collect();
    let root_sse = node_sse(&psi, &all);
    // A constant response leaves only rounding dust in the sum of squares;
    // without this floor the complexity gate (a fraction of that same dust)
    // would wave spurious splits through.
    let max_abs = psi.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let dust = 4.0 * f64::EPSILON * (1.0 + max_abs);
    if root_sse <= samples.len() as f64 * dust * dust {
        let mean: f64 = psi.iter().sum::<f64>() / psi.len() as f64;
        return Ok(RegressionTree {
            dim: d,
            nodes: alloc::vec![Node::Leaf {
                mean,
                count: samples.len(),
            }],
        });
    }
    let threshold_gain = config.complexity * root_sse;

    let mut nodes = Vec::new();
    grow(
        &points,
        &psi,
        all,
        0,
        config,
        threshold_gain,
        &mut nodes,
    );
    Ok(RegressionTree { dim: d, nodes })
}

/// Recursively grows the subtree over `idx`, returning its node index.
fn grow(
    points: &[Vec<f64>],
    psi: &[f64],
    idx: Vec<usize>,
    depth: usize,
    config: &TreeConfig,
    threshold_gain: f64,
    nodes: &mut Vec<Node>,
) -> usize {
    let make_leaf = |nodes: &mut Vec<Node>, idx: &[usize]| {
        let mean: f64 = idx.iter().map(|&i| psi[i]).sum::<f64>() / idx.len() as f64;
        nodes.push(Node::Leaf {
            mean,
            count: idx.len(),
        });
        nodes.len() - 1
    };
    if idx.len() < config.min_split || depth >= config.max_depth {
        return make_leaf(nodes, &idx);
    }
    let sse = node_sse(psi, &idx);
    let split = match best_split(points, psi, &idx, config.min_bucket, sse) {
        Some(s) if s.reduction > 0.0 && s.reduction >= threshold_gain => s,
        _ => return make_leaf(nodes, &idx),
    };
    let (left_idx, right_idx): (Vec<usize>, Vec<usize>) = idx
        .iter()
        .partition(|&&i| points[i][split.axis] <= split.threshold);
    // Reserve this node's slot before the children claim theirs.
    let me = nodes.len();
    nodes.push(Node::Leaf { mean: 0.0, count: 0 });
    let left = grow(points, psi, left_idx, depth + 1, config, threshold_gain, nodes);
    let right = grow(points, psi, right_idx, depth + 1, config, threshold_gain, nodes);
    nodes[me] = Node::Internal {
        axis: split.axis,
        threshold: split.threshold,
        left,
        right,
    };
    me
}

impl RegressionTree {
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Index of the leaf node that `x` routes to.
    fn leaf_node(&self, x: &[f64]) -> usize {
        let mut at = 0;
        loop {
            match &self.nodes[at] {
                Node::Internal {
                    axis,
                    threshold,
                    left,
                    right,
                } => {
                    at = if x[*axis] <= *threshold { *left } else { *right };
                }
                Node::Leaf { .. } => return at,
            }
        }
    }

    /// Leaf mean at `x`.
    pub fn predict(&self, x: &[f64]) -> f64 {
        match &self.nodes[self.leaf_node(x)] {
            Node::Leaf { mean, .. } => *mean,
            Node::Internal { .. } => unreachable!("leaf_node returns a leaf"),
        }
    }

    pub fn leaf_count(&self) -> usize {
        self.nodes
            .iter()
            .filter(|n| matches!(n, Node::Leaf { .. }))
            .count()
    }

    /// Maximum depth over nodes (root at 0).
    pub fn depth(&self) -> usize {
        fn rec(nodes: &[Node], at: usize) -> usize {
            match &nodes[at] {
                Node::Leaf { .. } => 0,
                Node::Internal { left, right, .. } => 1 + rec(nodes, *left).max(rec(nodes, *right)),
            }
        }
        rec(&self.nodes, 0)
    }
}

/// One partition cell: its sub-box, the indices of the samples routed to it,
/// and the leaf's fitted mean ψ.
#[derive(Clone, Debug, PartialEq)]
pub struct Cell {
    pub rect: Rect,
    pub members: Vec<usize>,
    pub leaf_mean: f64,
}

/// The partition of the bounding box induced by a fitted tree.
#[derive(Clone, Debug, PartialEq)]
pub struct DyadicPartition {
    pub bounding_box: Rect,
    pub cells: Vec<Cell>,
}

/// Carves `bounding_box` along the tree's splits and routes every sample to
/// its cell. Cells appear in left-before-right traversal order.
pub fn extract_partition(
    tree: &RegressionTree,
    bounding_box: &Rect,
    samples: &[LabeledSample],
) -> Result<DyadicPartition> {
    if bounding_box.dim() != tree.dim {
        return Err(Error::LengthMismatch {
            context: "extract_partition",
            left: bounding_box.dim(),
            right: tree.dim,
        });
    }
    let mut membership: Vec<Vec<usize>> = vec![Vec::new(); tree.nodes.len()];
    for (i, s) in samples.iter().enumerate() {
        if s.point.len() != tree.dim {
            return Err(Error::LengthMismatch {
                context: "extract_partition",
                left: s.point.len(),
                right: tree.dim,
            });
        }
        membership[tree.leaf_node(&s.point)].push(i);
    }
    let mut cells = Vec::new();
    collect_cells(tree, 0, bounding_box.clone(), &membership, &mut cells)?;
    Ok(DyadicPartition {
        bounding_box: bounding_box.clone(),
        cells,
    })
}

fn collect_cells(
    tree: &RegressionTree,
    at: usize,
    rect: Rect,
    membership: &[Vec<usize>],
    out: &mut Vec<Cell>,
) -> Result<()> {
    match &tree.nodes[at] {
        Node::Leaf { mean, .. } => {
            out.push(Cell {
                rect,
                members: membership[at].clone(),
                leaf_mean: *mean,
            });
            Ok(())
        }
        Node::Internal {
            axis,
            threshold,
            left,
            right,
        } => {
            let mut left_upper = rect.upper().to_vec();
            left_upper[*axis] = *threshold;
            let mut right_lower = rect.lower().to_vec();
            right_lower[*axis] = *threshold;
            let left_rect = Rect::new(rect.lower().to_vec(), left_upper)?;
            let right_rect = Rect::new(right_lower, rect.upper().to_vec())?;
            collect_cells(tree, *left, left_rect, membership, out)?;
            collect_cells(tree, *right, right_rect, membership, out)
        }
    }
}
