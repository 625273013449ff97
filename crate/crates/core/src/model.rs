//! Self-affine sponge specifications.
//!
//! A sponge in `[0,1]^d` is described by a nested alphabet tree of depth `d`.
//! A node at level `k` carries the contraction ratio `a_{i1..ik}` and the
//! translation `u_{i1..ik}` of the coordinate it controls. Coordinates are
//! numbered so that `x_1` is the finest direction: level `k` acts on
//! coordinate `x_{d+1-k}`, level `d` on `x_1`. A leaf `(i1, .., id)` is one
//! map of the iterated function system, and its image of the unit cube is a
//! box whose `x_{d+1-k}` edge has length `a_{i1..ik}`.

use std::ops::Range;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Result, SpongeError};
use crate::roots;

/// Absolute slack used when comparing sums and gaps of ratios.
pub const GEOMETRY_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AlphabetNode {
    pub ratio: f64,
    pub offset: f64,
    #[serde(default)]
    pub children: Vec<AlphabetNode>,
}

impl AlphabetNode {
    pub fn leaf(ratio: f64, offset: f64) -> Self {
        AlphabetNode { ratio, offset, children: Vec::new() }
    }

    pub fn new(ratio: f64, offset: f64, children: Vec<AlphabetNode>) -> Self {
        AlphabetNode { ratio, offset, children }
    }
}

/// Flattened view of one node of the alphabet tree.
#[derive(Debug, Clone, PartialEq)]
pub struct Node {
    /// Zero-based child indices from the root.
    pub path: Vec<usize>,
    pub ratio: f64,
    pub log_ratio: f64,
    pub offset: f64,
    /// Index of the parent in the previous level.
    pub parent: Option<usize>,
    /// Indices of the children in the next level.
    pub children: Range<usize>,
}

impl Node {
    /// One-based dotted address, e.g. `"2.1"` for the path `[1, 0]`.
    pub fn word(&self) -> String {
        dotted(&self.path)
    }
}

pub fn dotted(path: &[usize]) -> String {
    path.iter().map(|i| (i + 1).to_string()).collect::<Vec<_>>().join(".")
}

/// A validated-shape sponge: tree of depth exactly `d` plus flat indices.
#[derive(Debug, Clone, PartialEq)]
pub struct SpongeSpec {
    d: usize,
    tree: Vec<AlphabetNode>,
    levels: Vec<Vec<Node>>,
    /// For each leaf, its node index at levels `1..=d`.
    chains: Vec<Vec<usize>>,
}

impl SpongeSpec {
    /// Builds the flat indices. Only the shape is checked here; numeric
    /// constraints are the business of [`validate`].
    pub fn new(d: usize, tree: Vec<AlphabetNode>) -> Result<Self> {
        if d < 1 {
            return Err(SpongeError::Structure { path: vec![], constraint: "d must be >= 1".into() });
        }
        if tree.is_empty() {
            return Err(SpongeError::Structure {
                path: vec![],
                constraint: "tree must have at least one level-1 node".into(),
            });
        }
        let mut levels: Vec<Vec<Node>> = vec![Vec::new(); d];
        fn walk(
            nodes: &[AlphabetNode],
            level: usize,
            d: usize,
            parent: Option<usize>,
            prefix: &mut Vec<usize>,
            levels: &mut Vec<Vec<Node>>,
        ) -> Result<Range<usize>> {
            let start = levels[level - 1].len();
            for (i, node) in nodes.iter().enumerate() {
                prefix.push(i);
                if level < d && node.children.is_empty() {
                    return Err(SpongeError::Structure {
                        path: prefix.clone(),
                        constraint: format!("level-{level} node needs at least one child (d = {d})"),
                    });
                }
                if level == d && !node.children.is_empty() {
                    return Err(SpongeError::Structure {
                        path: prefix.clone(),
                        constraint: format!("tree deeper than d = {d}"),
                    });
                }
                let idx = levels[level - 1].len();
                levels[level - 1].push(Node {
                    path: prefix.clone(),
                    ratio: node.ratio,
                    log_ratio: node.ratio.ln(),
                    offset: node.offset,
                    parent,
                    children: 0..0,
                });
                if level < d {
                    let range = walk(&node.children, level + 1, d, Some(idx), prefix, levels)?;
                    levels[level - 1][idx].children = range;
                }
                prefix.pop();
            }
            Ok(start..levels[level - 1].len())
        }
        walk(&tree, 1, d, None, &mut Vec::new(), &mut levels)?;

        let chains = (0..levels[d - 1].len())
            .map(|leaf| {
                let mut chain = vec![0; d];
                let mut idx = leaf;
                for level in (1..=d).rev() {
                    chain[level - 1] = idx;
                    if let Some(p) = levels[level - 1][idx].parent {
                        idx = p;
                    }
                }
                chain
            })
            .collect();
        Ok(SpongeSpec { d, tree, levels, chains })
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn tree(&self) -> &[AlphabetNode] {
        &self.tree
    }

    /// Nodes at `level` (one-based, `1..=d`), in lexicographic order.
    pub fn level(&self, level: usize) -> &[Node] {
        &self.levels[level - 1]
    }

    pub fn leaves(&self) -> &[Node] {
        &self.levels[self.d - 1]
    }

    pub fn leaf_count(&self) -> usize {
        self.levels[self.d - 1].len()
    }

    /// Words of length `d - 1` (the set usually written 𝓙). For `d = 1` this
    /// is empty.
    pub fn j_words(&self) -> &[Node] {
        if self.d < 2 {
            &[]
        } else {
            &self.levels[self.d - 2]
        }
    }

    pub fn j_count(&self) -> usize {
        self.j_words().len()
    }

    /// Node index of `leaf` at each level `1..=d`.
    pub fn chain(&self, leaf: usize) -> &[usize] {
        &self.chains[leaf]
    }

    /// Index of the ancestor at `to_level` of node `idx` at `from_level`.
    pub fn ancestor(&self, from_level: usize, idx: usize, to_level: usize) -> usize {
        debug_assert!(to_level <= from_level);
        let mut idx = idx;
        for level in (to_level + 1..=from_level).rev() {
            idx = self.levels[level - 1][idx].parent.expect("non-root level has a parent");
        }
        idx
    }

    /// Log-ratios of the leaves below each word of 𝓙.
    pub fn fiber_log_ratios(&self) -> Vec<Vec<f64>> {
        self.j_words()
            .iter()
            .map(|j| self.leaves()[j.children.clone()].iter().map(|n| n.log_ratio).collect())
            .collect()
    }

    /// Zero-based coordinate index controlled by `level`.
    pub fn coordinate_of_level(&self, level: usize) -> usize {
        self.d - level
    }

    /// Copy of the spec with every ratio passed through `f(level, index, ratio)`
    /// and offsets either kept or re-packed to the left.
    pub fn map_ratios<F>(&self, repack: bool, f: F) -> Result<SpongeSpec>
    where
        F: Fn(usize, usize, f64) -> f64,
    {
        fn rebuild<F: Fn(usize, usize, f64) -> f64>(
            spec: &SpongeSpec,
            level: usize,
            range: Range<usize>,
            repack: bool,
            f: &F,
        ) -> Vec<AlphabetNode> {
            let mut cursor = 0.0;
            range
                .map(|idx| {
                    let node = &spec.levels[level - 1][idx];
                    let ratio = f(level, idx, node.ratio);
                    let offset = if repack { cursor } else { node.offset };
                    cursor += ratio;
                    let children = if level < spec.d {
                        rebuild(spec, level + 1, node.children.clone(), repack, f)
                    } else {
                        Vec::new()
                    };
                    AlphabetNode { ratio, offset, children }
                })
                .collect()
        }
        let tree = rebuild(self, 1, 0..self.levels[0].len(), repack, &f);
        SpongeSpec::new(self.d, tree)
    }

    /// All ratios multiplied by `factor`; offsets unchanged.
    pub fn scaled(&self, factor: f64) -> Result<SpongeSpec> {
        self.map_ratios(false, |_, _, r| r * factor)
    }

    /// Largest per-level ratio over all nodes at that level.
    pub fn max_ratio(&self, level: usize) -> f64 {
        self.level(level).iter().map(|n| n.ratio).fold(f64::MIN, f64::max)
    }

    pub fn min_ratio(&self, level: usize) -> f64 {
        self.level(level).iter().map(|n| n.ratio).fold(f64::MAX, f64::min)
    }
}

// ---------------------------------------------------------------------------
// validation

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Violation {
    pub path: Vec<usize>,
    pub constraint: String,
    pub values: Vec<f64>,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidationReport {
    pub ok: bool,
    pub violations: Vec<Violation>,
}

/// Checks the ratio, nesting, packing and offset constraints of every
/// sibling group. Violations are reported, never raised.
pub fn validate(spec: &SpongeSpec) -> ValidationReport {
    let mut violations = Vec::new();
    let mut push = |path: &[usize], constraint: &str, values: Vec<f64>, message: String| {
        violations.push(Violation {
            path: path.to_vec(),
            constraint: constraint.to_string(),
            values,
            message,
        });
    };

    let mut groups: Vec<(Vec<usize>, Option<f64>, Vec<&Node>)> = Vec::new();
    groups.push((vec![], None, spec.level(1).iter().collect()));
    for level in 1..spec.d() {
        for node in spec.level(level) {
            let kids = spec.level(level + 1)[node.children.clone()].iter().collect();
            groups.push((node.path.clone(), Some(node.ratio), kids));
        }
    }

    for (parent_path, parent_ratio, kids) in groups {
        for node in &kids {
            if !(node.ratio > 0.0 && node.ratio < 1.0) {
                push(&node.path, "ratio_range", vec![node.ratio], format!("ratio {} not in (0, 1)", node.ratio));
            }
            if !(node.offset >= 0.0 && node.offset < 1.0) {
                push(&node.path, "offset_range", vec![node.offset], format!("offset {} not in [0, 1)", node.offset));
            }
            if let Some(pr) = parent_ratio {
                if node.ratio > pr {
                    push(
                        &node.path,
                        "nesting",
                        vec![node.ratio, pr],
                        format!("ratio {} exceeds parent ratio {}", node.ratio, pr),
                    );
                }
            }
        }
        let sum: f64 = kids.iter().map(|n| n.ratio).sum();
        if sum > 1.0 + GEOMETRY_SLACK {
            push(&parent_path, "sibling_sum", vec![sum], format!("sibling ratio sum {} > 1", sum));
        }
        for pair in kids.windows(2) {
            let (cur, next) = (pair[0], pair[1]);
            if next.offset <= cur.offset {
                push(
                    &next.path,
                    "offset_order",
                    vec![cur.offset, next.offset],
                    format!("offset {} not after previous offset {}", next.offset, cur.offset),
                );
            }
            let gap = next.offset - cur.offset;
            if gap < cur.ratio - GEOMETRY_SLACK {
                push(&cur.path, "gap", vec![gap, cur.ratio], format!("gap {} < ratio {}", gap, cur.ratio));
            }
        }
        if let Some(last) = kids.last() {
            let gap = 1.0 - last.offset;
            if gap < last.ratio - GEOMETRY_SLACK {
                push(&last.path, "last_gap", vec![gap, last.ratio], format!("gap to 1 {} < ratio {}", gap, last.ratio));
            }
        }
    }

    ValidationReport { ok: violations.is_empty(), violations }
}

// ---------------------------------------------------------------------------
// construction

/// Number of children per node, level by level in lexicographic order.
///
/// `levels[0]` has a single entry (the number of level-1 symbols), and
/// `levels[k]` lists the child counts of the level-`k` nodes.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CountTree {
    levels: Vec<Vec<usize>>,
}

impl CountTree {
    pub fn new(levels: Vec<Vec<usize>>) -> Result<Self> {
        if levels.is_empty() || levels[0].len() != 1 {
            return Err(SpongeError::Structure {
                path: vec![],
                constraint: "first count level must hold exactly one count".into(),
            });
        }
        for (k, level) in levels.iter().enumerate() {
            if level.contains(&0) {
                return Err(SpongeError::Structure {
                    path: vec![],
                    constraint: format!("count level {} contains a zero", k + 1),
                });
            }
            if k + 1 < levels.len() {
                let expected: usize = level.iter().sum();
                if levels[k + 1].len() != expected {
                    return Err(SpongeError::Structure {
                        path: vec![],
                        constraint: format!(
                            "count level {} has {} entries, expected {}",
                            k + 2,
                            levels[k + 1].len(),
                            expected
                        ),
                    });
                }
            }
        }
        Ok(CountTree { levels })
    }

    /// Every node has `m` children, `d` levels deep.
    pub fn uniform(d: usize, m: usize) -> Self {
        let levels = (0..d).map(|k| vec![m; m.pow(k as u32)]).collect();
        CountTree { levels }
    }

    pub fn depth(&self) -> usize {
        self.levels.len()
    }

    pub fn levels(&self) -> &[Vec<usize>] {
        &self.levels
    }
}

/// Reference ratios `(a, b, c)` of a three-level sponge and a tolerance `ε`.
/// Level 1 uses `c`, level 2 `b`, level 3 `a`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BaseTriple {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub epsilon: f64,
}

impl BaseTriple {
    pub fn new(a: f64, b: f64, c: f64, epsilon: f64) -> Result<Self> {
        if !(0.0 < a && a <= b && b <= c && c < 1.0) {
            return Err(SpongeError::OutOfRange(format!("need 0 < a <= b <= c < 1, got ({a}, {b}, {c})")));
        }
        if epsilon.is_nan() || epsilon < 0.0 {
            return Err(SpongeError::OutOfRange(format!("epsilon {epsilon} < 0")));
        }
        Ok(BaseTriple { a, b, c, epsilon })
    }

    pub fn sierpinski(a: f64, b: f64, c: f64) -> Result<Self> {
        Self::new(a, b, c, 0.0)
    }

    /// Reference ratios indexed by level, level 1 first.
    pub fn level_ratios(&self) -> [f64; 3] {
        [self.c, self.b, self.a]
    }
}

/// Sierpinski sponge with level-constant ratios (`ratios[k-1]` at level `k`)
/// and left-packed offsets.
pub fn make_sierpinski_levels(counts: &CountTree, ratios: &[f64]) -> Result<SpongeSpec> {
    let d = counts.depth();
    if ratios.len() != d {
        return Err(SpongeError::Dimension { expected: format!("{} ratios", d), found: ratios.len() });
    }
    let mut cursor = vec![0usize; d];
    fn build(
        counts: &CountTree,
        ratios: &[f64],
        level: usize,
        count: usize,
        cursor: &mut Vec<usize>,
        prefix: &mut Vec<usize>,
    ) -> Result<Vec<AlphabetNode>> {
        let ratio = ratios[level - 1];
        if count as f64 * ratio > 1.0 + GEOMETRY_SLACK {
            return Err(SpongeError::Packing { path: prefix.clone(), count, ratio });
        }
        let mut nodes = Vec::with_capacity(count);
        for i in 0..count {
            prefix.push(i);
            let children = if level < counts.depth() {
                let slot = cursor[level];
                cursor[level] += 1;
                let n = counts.levels()[level][slot];
                build(counts, ratios, level + 1, n, cursor, prefix)?
            } else {
                Vec::new()
            };
            prefix.pop();
            nodes.push(AlphabetNode { ratio, offset: i as f64 * ratio, children });
        }
        Ok(nodes)
    }
    let m = counts.levels()[0][0];
    let tree = build(counts, ratios, 1, m, &mut cursor, &mut Vec::new())?;
    SpongeSpec::new(d, tree)
}

/// Three-level Sierpinski sponge with ratios `(c, b, a)` at levels 1, 2, 3.
pub fn make_sierpinski(counts: &CountTree, base: &BaseTriple) -> Result<SpongeSpec> {
    if counts.depth() != 3 {
        return Err(SpongeError::Dimension { expected: "3".into(), found: counts.depth() });
    }
    if base.epsilon != 0.0 {
        return Err(SpongeError::OutOfRange(format!("Sierpinski base needs epsilon = 0, got {}", base.epsilon)));
    }
    make_sierpinski_levels(counts, &base.level_ratios())
}

/// Multiplies every ratio by `exp(δ)`, `δ ~ U[-ε, ε]` drawn per node in
/// depth-first order from a generator seeded with `seed`. Each draw is
/// clamped to the interval that keeps nesting and sibling packing feasible
/// for the siblings still to come. Offsets are re-packed to the left.
pub fn perturb(spec: &SpongeSpec, epsilon: f64, seed: u64) -> Result<SpongeSpec> {
    if epsilon.is_nan() || epsilon < 0.0 {
        return Err(SpongeError::OutOfRange(format!("epsilon {epsilon} < 0")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let shrink = (-epsilon).exp();

    fn group(
        spec: &SpongeSpec,
        level: usize,
        range: Range<usize>,
        parent_ratio: f64,
        epsilon: f64,
        shrink: f64,
        rng: &mut ChaCha8Rng,
    ) -> Result<Vec<AlphabetNode>> {
        let nodes = &spec.level(level)[range];
        let draws: Vec<f64> = nodes.iter().map(|_| epsilon * (2.0 * rng.random::<f64>() - 1.0)).collect();
        let mut used = 0.0;
        let mut ratios = Vec::with_capacity(nodes.len());
        for (s, node) in nodes.iter().enumerate() {
            let reserve: f64 = nodes[s + 1..].iter().map(|n| n.ratio * shrink).sum();
            let r = node.ratio;
            let lo = -epsilon;
            let mut hi = epsilon
                .min((parent_ratio / r).ln())
                .min(((1.0 - used - reserve) / r).ln())
                .min(((1.0 - GEOMETRY_SLACK) / r).ln());
            if hi < lo {
                if hi > lo - 1e-9 {
                    hi = lo;
                } else {
                    return Err(SpongeError::InfeasiblePerturbation { path: node.path.clone(), lo, hi });
                }
            }
            let delta = draws[s].clamp(lo, hi);
            let new_ratio = if delta == 0.0 { r } else { (r * delta.exp()).min(parent_ratio) };
            used += new_ratio;
            ratios.push(new_ratio);
        }
        let mut out = Vec::with_capacity(nodes.len());
        let mut cursor = 0.0;
        for (node, &ratio) in nodes.iter().zip(&ratios) {
            let children = if level < spec.d() {
                group(spec, level + 1, node.children.clone(), ratio, epsilon, shrink, rng)?
            } else {
                Vec::new()
            };
            out.push(AlphabetNode { ratio, offset: cursor, children });
            cursor += ratio;
        }
        Ok(out)
    }

    let tree = group(spec, 1, 0..spec.level(1).len(), 1.0, epsilon, shrink, &mut rng)?;
    SpongeSpec::new(spec.d(), tree)
}

/// Smallest `ε` for which every level-`k` ratio is within `exp(±ε)` of
/// `reference[k-1]`.
pub fn classify_levels(spec: &SpongeSpec, reference: &[f64]) -> Result<f64> {
    if reference.len() != spec.d() {
        return Err(SpongeError::Dimension { expected: format!("{} reference ratios", spec.d()), found: reference.len() });
    }
    let mut eps: f64 = 0.0;
    for (k, &base) in reference.iter().enumerate() {
        let lb = base.ln();
        for node in spec.level(k + 1) {
            eps = eps.max((node.log_ratio - lb).abs());
        }
    }
    Ok(eps)
}

/// `ε_min` such that `spec` is an `(a, b, c; ε)`-sponge for every `ε ≥ ε_min`.
/// The `epsilon` field of `base` is ignored.
pub fn classify(spec: &SpongeSpec, base: &BaseTriple) -> Result<f64> {
    require_d3(spec)?;
    classify_levels(spec, &base.level_ratios())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FittedBase {
    pub base: BaseTriple,
    /// Whether the fitted ratios satisfy `a <= b <= c`.
    pub ordered: bool,
}

/// Per level, the log-midpoint of the extreme ratios; `ε` is the resulting
/// classification.
pub fn fit_base(spec: &SpongeSpec) -> Result<FittedBase> {
    require_d3(spec)?;
    let mid = |level: usize| ((spec.min_ratio(level).ln() + spec.max_ratio(level).ln()) / 2.0).exp();
    let (c, b, a) = (mid(1), mid(2), mid(3));
    let epsilon = classify_levels(spec, &[c, b, a])?;
    Ok(FittedBase { base: BaseTriple { a, b, c, epsilon }, ordered: a <= b && b <= c })
}

fn require_d3(spec: &SpongeSpec) -> Result<()> {
    if spec.d() != 3 {
        return Err(SpongeError::Dimension { expected: "3".into(), found: spec.d() });
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Moran roots

/// Unique `t ∈ [0, 1]` with `Σ exp(t · log_ratios[k]) = 1`.
///
/// The left side is strictly decreasing in `t`, at least 1 at `t = 0` and at
/// most 1 at `t = 1` for a feasible fiber, so the root is bracketed.
pub fn moran_root(log_ratios: &[f64]) -> f64 {
    let h = |t: f64| {
        let (mut s, mut ds) = (0.0, 0.0);
        for &l in log_ratios {
            let e = (t * l).exp();
            s += e;
            ds += e * l;
        }
        (1.0 - s, -ds)
    };
    roots::bisect_polish(h, 0.0, 1.0, 1e-12, 2).x
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TBounds {
    pub t_low: f64,
    pub t_high: f64,
    /// `t_ij`, aligned with [`SpongeSpec::j_words`].
    pub per_pair: Vec<f64>,
}

pub fn t_bounds(spec: &SpongeSpec) -> Result<TBounds> {
    if spec.d() < 2 {
        return Err(SpongeError::Dimension { expected: ">= 2".into(), found: spec.d() });
    }
    let per_pair: Vec<f64> = spec.fiber_log_ratios().iter().map(|f| moran_root(f)).collect();
    let t_low = per_pair.iter().copied().fold(f64::INFINITY, f64::min);
    let t_high = per_pair.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    Ok(TBounds { t_low, t_high, per_pair })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HipPoint {
    pub t: f64,
    /// `(i, j, j')`, zero-based, with differing fiber sums at `t`.
    pub witness: Option<(usize, usize, usize)>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HipReport {
    pub holds: bool,
    pub t_low: f64,
    pub t_high: f64,
    pub points: Vec<HipPoint>,
    pub note: String,
}

/// Checks on a grid of `grid_size` interior points of `(t_low, t_high)` that
/// some level-1 symbol has two fibers with different `Σ_k a_ijk^t`.
/// A finite grid cannot certify the condition on the whole interval.
pub fn check_hip(spec: &SpongeSpec, grid_size: usize) -> Result<HipReport> {
    require_d3(spec)?;
    if grid_size < 2 {
        return Err(SpongeError::OutOfRange(format!("grid_size {grid_size} < 2")));
    }
    let tb = t_bounds(spec)?;
    if tb.t_high - tb.t_low <= 0.0 {
        return Err(SpongeError::DegenerateRange { t: tb.t_low });
    }
    let fibers = spec.fiber_log_ratios();
    let points: Vec<HipPoint> = (0..grid_size)
        .map(|g| {
            let t = tb.t_low + (tb.t_high - tb.t_low) * (g + 1) as f64 / (grid_size + 1) as f64;
            let sums: Vec<f64> = fibers.iter().map(|f| f.iter().map(|l| (t * l).exp()).sum()).collect();
            let witness = spec.level(1).iter().enumerate().find_map(|(i, node)| {
                let r = node.children.clone();
                for j in r.clone() {
                    for jp in j + 1..r.end {
                        let (s, sp) = (sums[j], sums[jp]);
                        if (s - sp).abs() > 1e-10 * s.abs().max(sp.abs()) {
                            return Some((i, j - r.start, jp - r.start));
                        }
                    }
                }
                None
            });
            HipPoint { t, witness }
        })
        .collect();
    let holds = points.iter().all(|p| p.witness.is_some());
    Ok(HipReport {
        holds,
        t_low: tb.t_low,
        t_high: tb.t_high,
        points,
        note: "grid check of the genericity condition, not a proof".into(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cube3() -> SpongeSpec {
        make_sierpinski_levels(&CountTree::uniform(3, 2), &[0.5, 0.5, 0.5]).unwrap()
    }

    fn base_quarter_third_half() -> BaseTriple {
        BaseTriple::sierpinski(0.25, 1.0 / 3.0, 0.5).unwrap()
    }

    #[test]
    fn full_cube_is_valid() {
        let spec = cube3();
        assert_eq!(spec.leaf_count(), 8);
        assert!(validate(&spec).ok);
    }

    #[test]
    fn overfull_siblings_are_reported() {
        let tree = vec![AlphabetNode::leaf(0.6, 0.0), AlphabetNode::leaf(0.6, 0.4)];
        let spec = SpongeSpec::new(1, tree).unwrap();
        let report = validate(&spec);
        assert!(!report.ok);
        let sum = report.violations.iter().find(|v| v.constraint == "sibling_sum").unwrap();
        assert!((sum.values[0] - 1.2).abs() < 1e-12);
        assert!(sum.message.contains("> 1"));
    }

    #[test]
    fn overlapping_offsets_are_reported() {
        let tree = vec![AlphabetNode::leaf(0.5, 0.0), AlphabetNode::leaf(0.5, 0.4)];
        let spec = SpongeSpec::new(1, tree).unwrap();
        let report = validate(&spec);
        let gap = report.violations.iter().find(|v| v.constraint == "gap").unwrap();
        assert_eq!(gap.message, "gap 0.4 < ratio 0.5");
        assert_eq!(gap.path, vec![0]);
    }

    #[test]
    fn nesting_violation_has_a_path() {
        let tree = vec![AlphabetNode::new(0.3, 0.0, vec![AlphabetNode::leaf(0.4, 0.0)])];
        let spec = SpongeSpec::new(2, tree).unwrap();
        let report = validate(&spec);
        assert_eq!(report.violations.len(), 1);
        assert_eq!(report.violations[0].constraint, "nesting");
        assert_eq!(report.violations[0].path, vec![0, 0]);
    }

    #[test]
    fn shape_errors() {
        let shallow = vec![AlphabetNode::leaf(0.5, 0.0)];
        assert!(matches!(SpongeSpec::new(2, shallow), Err(SpongeError::Structure { .. })));
        let deep = vec![AlphabetNode::new(0.5, 0.0, vec![AlphabetNode::leaf(0.5, 0.0)])];
        assert!(matches!(SpongeSpec::new(1, deep), Err(SpongeError::Structure { .. })));
    }

    #[test]
    fn sierpinski_eight_leaves() {
        let counts = CountTree::new(vec![vec![2], vec![2, 2], vec![2, 2, 2, 2]]).unwrap();
        let base = base_quarter_third_half();
        let spec = make_sierpinski(&counts, &base).unwrap();
        assert_eq!(spec.leaf_count(), 8);
        assert!(validate(&spec).ok);
        assert_eq!(classify(&spec, &base).unwrap(), 0.0);
        for leaf in spec.leaves() {
            assert_eq!(leaf.ratio, 0.25);
        }
        assert_eq!(spec.level(2)[1].offset, 1.0 / 3.0);
    }

    #[test]
    fn sierpinski_single_chain() {
        let counts = CountTree::new(vec![vec![1], vec![1], vec![1]]).unwrap();
        let spec = make_sierpinski(&counts, &BaseTriple::sierpinski(0.2, 0.3, 0.5).unwrap()).unwrap();
        assert_eq!(spec.leaf_count(), 1);
        assert!(validate(&spec).ok);
    }

    #[test]
    fn sierpinski_packing_error() {
        let counts = CountTree::new(vec![vec![1], vec![1], vec![3]]).unwrap();
        let err = make_sierpinski(&counts, &BaseTriple::sierpinski(0.5, 0.5, 0.5).unwrap()).unwrap_err();
        assert!(matches!(err, SpongeError::Packing { count: 3, .. }));
    }

    #[test]
    fn count_tree_shape_checked() {
        assert!(CountTree::new(vec![vec![2], vec![1]]).is_err());
        assert!(CountTree::new(vec![vec![2], vec![1, 0]]).is_err());
    }

    #[test]
    fn perturb_zero_is_identity() {
        let counts = CountTree::new(vec![vec![2], vec![2, 1], vec![1, 2, 2]]).unwrap();
        let spec = make_sierpinski(&counts, &BaseTriple::sierpinski(0.2, 0.3, 0.5).unwrap()).unwrap();
        let same = perturb(&spec, 0.0, 99).unwrap();
        assert_eq!(same, spec);
    }

    #[test]
    fn perturb_bounded_and_deterministic() {
        let counts = CountTree::new(vec![vec![2], vec![2, 1], vec![1, 2, 2]]).unwrap();
        let base = BaseTriple::sierpinski(0.2, 0.3, 0.5).unwrap();
        let spec = make_sierpinski(&counts, &base).unwrap();
        let p1 = perturb(&spec, 0.05, 1).unwrap();
        let p2 = perturb(&spec, 0.05, 1).unwrap();
        assert_eq!(p1, p2);
        assert!(validate(&p1).ok);
        assert!(classify(&p1, &base).unwrap() <= 0.05 + 1e-15);
        assert!(classify(&p1, &base).unwrap() > 0.0);
        assert_ne!(p1, perturb(&spec, 0.05, 2).unwrap());
    }

    #[test]
    fn perturb_full_packing_stays_valid() {
        // every sibling group packs exactly to 1
        let spec = cube3();
        for seed in 0..20 {
            let p = perturb(&spec, 0.1, seed).unwrap();
            assert!(validate(&p).ok, "seed {seed}: {:?}", validate(&p).violations);
            assert!(classify_levels(&p, &[0.5, 0.5, 0.5]).unwrap() <= 0.1 + 1e-15);
        }
    }

    #[test]
    fn classify_examples() {
        let e = 0.1f64;
        let tree = vec![
            AlphabetNode::new(0.5 * (-e).exp(), 0.0, vec![AlphabetNode::new(0.25, 0.0, vec![AlphabetNode::leaf(0.125, 0.0)])]),
            AlphabetNode::new(0.5 * e.exp(), 0.5, vec![AlphabetNode::new(0.25, 0.0, vec![AlphabetNode::leaf(0.125, 0.0)])]),
        ];
        let spec = SpongeSpec::new(3, tree).unwrap();
        let base = BaseTriple::sierpinski(0.125, 0.25, 0.5).unwrap();
        assert!((classify(&spec, &base).unwrap() - 0.1).abs() < 1e-15);
        let halved = BaseTriple { c: 0.25, ..base };
        assert!(classify(&spec, &halved).unwrap() >= 2f64.ln());
    }

    #[test]
    fn fit_base_midpoint() {
        let tree = vec![
            AlphabetNode::new(0.4, 0.0, vec![AlphabetNode::new(0.25, 0.0, vec![AlphabetNode::leaf(0.125, 0.0)])]),
            AlphabetNode::new(0.5, 0.4, vec![AlphabetNode::new(0.25, 0.0, vec![AlphabetNode::leaf(0.125, 0.0)])]),
        ];
        let spec = SpongeSpec::new(3, tree).unwrap();
        let fit = fit_base(&spec).unwrap();
        assert!((fit.base.c - 0.2f64.sqrt()).abs() < 1e-15);
        assert!((fit.base.epsilon - 0.5 * (0.5f64 / 0.4).ln()).abs() < 1e-15);
        assert_eq!(fit.base.b, 0.25);
        assert!(fit.ordered);

        let uniform = make_sierpinski(&CountTree::uniform(3, 2), &base_quarter_third_half()).unwrap();
        let fit = fit_base(&uniform).unwrap();
        assert_eq!(fit.base.epsilon, 0.0);
        assert_eq!(fit.base.a, 0.25);
    }

    #[test]
    fn moran_closed_forms() {
        assert_eq!(moran_root(&[0.5f64.ln()]), 0.0);
        assert!((moran_root(&[0.25f64.ln(), 0.25f64.ln()]) - 0.5).abs() < 1e-12);
        assert_eq!(moran_root(&[0.5f64.ln(), 0.5f64.ln()]), 1.0);
        let a = 1.0 / 6.0f64;
        let t = moran_root(&[a.ln(); 4]);
        assert!((t - 4f64.ln() / 6f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn t_bounds_on_sierpinski() {
        let counts = CountTree::new(vec![vec![2], vec![2, 2], vec![1, 2, 3, 4]]).unwrap();
        let a = 0.2;
        let spec = make_sierpinski(&counts, &BaseTriple::sierpinski(a, 0.25, 0.5).unwrap()).unwrap();
        let tb = t_bounds(&spec).unwrap();
        for (t, m) in tb.per_pair.iter().zip([1.0f64, 2.0, 3.0, 4.0]) {
            assert!((t - m.ln() / -a.ln()).abs() < 1e-12);
        }
        assert_eq!(tb.t_low, 0.0);
        assert!((tb.t_high - 4f64.ln() / 5f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn hip_examples() {
        // within each i the fibers coincide, across i they differ
        let tree = vec![
            AlphabetNode::new(0.5, 0.0, vec![
                AlphabetNode::new(0.25, 0.0, vec![AlphabetNode::leaf(0.25, 0.0)]),
                AlphabetNode::new(0.25, 0.25, vec![AlphabetNode::leaf(0.25, 0.0)]),
            ]),
            AlphabetNode::new(0.5, 0.5, vec![
                AlphabetNode::new(0.25, 0.0, vec![AlphabetNode::leaf(0.25, 0.0), AlphabetNode::leaf(0.25, 0.25)]),
                AlphabetNode::new(0.25, 0.25, vec![AlphabetNode::leaf(0.25, 0.0), AlphabetNode::leaf(0.25, 0.25)]),
            ]),
        ];
        let spec = SpongeSpec::new(3, tree).unwrap();
        let report = check_hip(&spec, 101).unwrap();
        assert!(!report.holds);
        assert!(report.points.iter().all(|p| p.witness.is_none()));

        let tree = vec![AlphabetNode::new(0.5, 0.0, vec![
            AlphabetNode::new(0.25, 0.0, vec![AlphabetNode::leaf(0.25, 0.0)]),
            AlphabetNode::new(0.25, 0.25, vec![AlphabetNode::leaf(0.25, 0.0), AlphabetNode::leaf(0.25, 0.25)]),
        ])];
        let spec = SpongeSpec::new(3, tree).unwrap();
        let report = check_hip(&spec, 101).unwrap();
        assert!(report.holds);
        assert_eq!(report.points[0].witness, Some((0, 0, 1)));

        let uniform = make_sierpinski(&CountTree::uniform(3, 2), &base_quarter_third_half()).unwrap();
        assert!(matches!(check_hip(&uniform, 101), Err(SpongeError::DegenerateRange { .. })));
    }

    #[test]
    fn dotted_words() {
        let spec = cube3();
        assert_eq!(spec.leaves()[5].word(), "2.1.2");
        assert_eq!(spec.j_words()[3].word(), "2.2");
        assert_eq!(spec.ancestor(3, 5, 1), 1);
        assert_eq!(spec.chain(5), &[1, 2, 5]);
    }
}
