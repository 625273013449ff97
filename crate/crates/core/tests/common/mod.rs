#![allow(dead_code)]

use rand::Rng;
use sponge::model::{make_sierpinski, AlphabetNode, BaseTriple, CountTree, SpongeSpec};

/// Random feasible three-level spec with left-packed offsets.
pub fn random_spec<R: Rng>(rng: &mut R, max_children: usize) -> SpongeSpec {
    fn group<R: Rng>(rng: &mut R, level: usize, parent: f64, max_children: usize) -> Vec<AlphabetNode> {
        let m = rng.random_range(1..=max_children);
        let cap = parent.min(1.0 / m as f64 - 1e-9);
        let mut cursor = 0.0;
        (0..m)
            .map(|_| {
                let r = rng.random_range(0.05 * cap..=cap);
                let kids = if level < 3 { group(rng, level + 1, r, max_children) } else { Vec::new() };
                let node = AlphabetNode::new(r, cursor, kids);
                cursor += r;
                node
            })
            .collect()
    }
    SpongeSpec::new(3, group(rng, 1, 0.999, max_children)).expect("well-formed tree")
}

/// Random fiber of `1..=6` ratios with sum at most 1.
pub fn random_fiber<R: Rng>(rng: &mut R) -> Vec<f64> {
    let m = rng.random_range(1..=6);
    (0..m).map(|_| rng.random_range(0.01..1.0 / m as f64)).collect()
}

/// The three-level Sierpinski sponge with ratios (1/6, 1/4, 1/2), two columns
/// of two and three rows, and fibers of 2, 5 | 3, 1, 4 boxes.
pub fn sweep_base() -> SpongeSpec {
    make_sierpinski(&sweep_counts(), &sweep_triple()).unwrap()
}

pub fn sweep_counts() -> CountTree {
    CountTree::new(vec![vec![2], vec![2, 3], vec![2, 5, 3, 1, 4]]).unwrap()
}

pub fn sweep_triple() -> BaseTriple {
    BaseTriple::sierpinski(1.0 / 6.0, 0.25, 0.5).unwrap()
}

/// Independent cut-index oracle: linear scan over freshly summed logs.
pub fn cut_oracle(spec: &SpongeSpec, symbols: &[usize], n: usize) -> Vec<usize> {
    let log_at = |level: usize, s: usize| spec.level(level)[spec.chain(s)[level - 1]].ratio.ln();
    let target: f64 = symbols[..n].iter().map(|&s| log_at(1, s)).sum();
    let mut out = vec![n];
    for level in 2..=spec.d() {
        let mut sum = 0.0;
        let mut best = 0;
        for (m, &s) in symbols[..n].iter().enumerate() {
            sum += log_at(level, s);
            if sum >= target - 1e-10 * (1.0 + target.abs()) {
                best = m + 1;
            } else {
                break;
            }
        }
        out.push(best);
    }
    out
}
