//! Symbolic coding of a sponge: words over the leaves, basic boxes, cut
//! indices, approximate cubes and their Bernoulli mass, plus sampling,
//! enumeration of n-approximations and a box-counting sanity estimator.
//!
//! Products of thousands of ratios underflow, so every length and mass is
//! carried as a logarithm.

use std::collections::HashSet;

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Result, SpongeError};
use crate::measures::{symbol_weights, t_of_p, ProbVector};
use crate::model::SpongeSpec;

/// Relative slack in log-space comparisons of cumulative ratio sums.
///
/// Sums such as `k·log(1/4)` and `2k·log(1/2)` are equal in exact arithmetic
/// but not in floating point; ties count as satisfied.
pub const CUT_SLACK: f64 = 1e-10;

/// Absolute slack for comparing two cumulative log sums of magnitude `scale`.
pub fn log_slack(scale: f64) -> f64 {
    CUT_SLACK * (1.0 + scale.abs())
}

/// Finite word over the leaves of a spec, with cumulative log-ratios.
#[derive(Debug, Clone, PartialEq)]
pub struct Word {
    symbols: Vec<usize>,
    /// `cum[k-1][l]` is the sum of the level-`k` log-ratios of the first `l`
    /// symbols.
    cum: Vec<Vec<f64>>,
}

impl Word {
    pub fn new(spec: &SpongeSpec, symbols: Vec<usize>) -> Result<Self> {
        if let Some(&bad) = symbols.iter().find(|&&s| s >= spec.leaf_count()) {
            return Err(SpongeError::OutOfRange(format!("symbol {bad} is not a leaf index")));
        }
        let d = spec.d();
        let mut cum: Vec<Vec<f64>> = (0..d).map(|_| Vec::with_capacity(symbols.len() + 1)).collect();
        for c in cum.iter_mut() {
            c.push(0.0);
        }
        for &s in &symbols {
            let chain = spec.chain(s);
            for level in 1..=d {
                let l = spec.level(level)[chain[level - 1]].log_ratio;
                let last = *cum[level - 1].last().unwrap();
                cum[level - 1].push(last + l);
            }
        }
        Ok(Word { symbols, cum })
    }

    pub fn symbols(&self) -> &[usize] {
        &self.symbols
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    /// `Σ_{l < len} log a` at `level` over the first `len` symbols.
    pub fn cum_log(&self, level: usize, len: usize) -> f64 {
        self.cum[level - 1][len]
    }
}

/// Cut indices `(L^0 = n, L^1, .., L^{d-1})`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CutIndices {
    pub values: Vec<usize>,
}

impl CutIndices {
    pub fn n(&self) -> usize {
        self.values[0]
    }

    pub fn get(&self, k: usize) -> usize {
        self.values[k]
    }
}

/// Smallest `n` for which every cut index is at least 1.
pub fn cut_threshold(spec: &SpongeSpec) -> f64 {
    let min_leaf = spec.min_ratio(spec.d());
    let max_top = spec.max_ratio(1);
    min_leaf.ln() / max_top.ln()
}

/// `L^k = max{m >= 1 : Σ_{l<=m} log a^{(k+1)} >= Σ_{l<=n} log a^{(1)}}`.
///
/// Level-`(k+1)` ratios never exceed level-1 ratios, so `L^k <= n` and the
/// first `n` symbols certify maximality.
pub fn cut_indices(spec: &SpongeSpec, w: &Word, n: usize) -> Result<CutIndices> {
    if w.len() < n {
        return Err(SpongeError::WordTooShort { len: w.len(), n });
    }
    let threshold = cut_threshold(spec);
    if (n as f64) < threshold - 1e-12 || n == 0 {
        return Err(SpongeError::BelowThreshold { n, threshold });
    }
    let target = w.cum_log(1, n);
    let floor = target - log_slack(target);
    let mut values = vec![n];
    for level in 2..=spec.d() {
        let cum = &w.cum[level - 1][1..=n];
        let l = cum.partition_point(|&s| s >= floor);
        if l == 0 {
            return Err(SpongeError::BelowThreshold { n, threshold });
        }
        values.push(l);
    }
    Ok(CutIndices { values })
}

/// Cut indices for every `n` in `from..=to`, advancing each `L^k` with a
/// forward pointer instead of searching from scratch.
pub fn cut_indices_sweep(spec: &SpongeSpec, w: &Word, from: usize, to: usize) -> Result<Vec<CutIndices>> {
    if w.len() < to {
        return Err(SpongeError::WordTooShort { len: w.len(), n: to });
    }
    let first = cut_indices(spec, w, from.max(1))?;
    let mut pointers = first.values[1..].to_vec();
    let mut out = Vec::with_capacity(to.saturating_sub(from) + 1);
    for n in from.max(1)..=to {
        let target = w.cum_log(1, n);
        let floor = target - log_slack(target);
        for (k, ptr) in pointers.iter_mut().enumerate() {
            let cum = &w.cum[k + 1];
            while *ptr < n && cum[*ptr + 1] >= floor {
                *ptr += 1;
            }
        }
        let mut values = Vec::with_capacity(spec.d());
        values.push(n);
        values.extend_from_slice(&pointers);
        out.push(CutIndices { values });
    }
    Ok(out)
}

/// Axis-parallel box in coordinate order `x_1, .., x_d`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GeoBox {
    pub corner: Vec<f64>,
    pub log_edges: Vec<f64>,
}

impl GeoBox {
    pub fn unit(d: usize) -> Self {
        GeoBox { corner: vec![0.0; d], log_edges: vec![0.0; d] }
    }

    pub fn edges(&self) -> Vec<f64> {
        self.log_edges.iter().map(|l| l.exp()).collect()
    }

    pub fn volume(&self) -> f64 {
        self.log_edges.iter().sum::<f64>().exp()
    }

    /// Applies the leaf map innermost: the result is the sub-box of `self`
    /// that the leaf occupies in the unit cube.
    pub fn refine(&self, spec: &SpongeSpec, leaf: usize) -> GeoBox {
        let mut out = self.clone();
        let chain = spec.chain(leaf);
        for level in 1..=spec.d() {
            let node = &spec.level(level)[chain[level - 1]];
            let c = spec.coordinate_of_level(level);
            out.corner[c] += self.log_edges[c].exp() * node.offset;
            out.log_edges[c] += node.log_ratio;
        }
        out
    }

    pub fn contains(&self, other: &GeoBox, tol: f64) -> bool {
        let (e, oe) = (self.edges(), other.edges());
        (0..self.corner.len()).all(|c| {
            other.corner[c] >= self.corner[c] - tol && other.corner[c] + oe[c] <= self.corner[c] + e[c] + tol
        })
    }
}

/// Image of the unit cube under the maps of the first `len` symbols of `w`,
/// where each coordinate uses only the first `lens[k-1]` symbols at level `k`.
fn partial_box(spec: &SpongeSpec, w: &Word, lens: &[usize]) -> GeoBox {
    let d = spec.d();
    let mut corner = vec![0.0; d];
    let mut log_edges = vec![0.0; d];
    for level in 1..=d {
        let c = spec.coordinate_of_level(level);
        let mut scale = 1.0;
        let mut origin = 0.0;
        for &s in &w.symbols()[..lens[level - 1]] {
            let node = &spec.level(level)[spec.chain(s)[level - 1]];
            origin += scale * node.offset;
            scale *= node.ratio;
        }
        corner[c] = origin;
        log_edges[c] = w.cum_log(level, lens[level - 1]);
    }
    GeoBox { corner, log_edges }
}

/// The basic box of the whole word.
pub fn box_of_word(spec: &SpongeSpec, w: &Word) -> Result<GeoBox> {
    if w.is_empty() {
        return Err(SpongeError::OutOfRange("empty word".into()));
    }
    Ok(partial_box(spec, w, &vec![w.len(); spec.d()]))
}

/// Geometric image of the approximate cube `B_n(ω)`: the level-`k` coordinate
/// keeps the first `L^{k-1}` symbols.
pub fn approx_cube(spec: &SpongeSpec, w: &Word, n: usize) -> Result<GeoBox> {
    let cut = cut_indices(spec, w, n)?;
    Ok(partial_box(spec, w, &cut.values))
}

/// `log(edge_k / Π_{l<=n} a^{(1)})` for every level `k`; each lies in
/// `[0, -log min leaf ratio]` up to [`log_slack`].
pub fn sandwich_log_ratios(spec: &SpongeSpec, w: &Word, cut: &CutIndices) -> Vec<f64> {
    let base = w.cum_log(1, cut.n());
    (1..=spec.d()).map(|level| w.cum_log(level, cut.get(level - 1)) - base).collect()
}

/// Precomputed log factors of the Bernoulli measure attached to `p`.
#[derive(Debug, Clone)]
pub struct CubeMeasure {
    d: usize,
    /// `log_p[k-1][idx]`: log mass of level-`k` node `idx`, `k <= d-1`.
    log_p: Vec<Vec<f64>>,
    /// `log(a^t / Σ_fiber a^t)` per leaf.
    log_fiber: Vec<f64>,
    pub t: f64,
}

impl CubeMeasure {
    pub fn new(spec: &SpongeSpec, p: &ProbVector) -> Self {
        let t = t_of_p(spec, p);
        let d = spec.d();
        let log_p = (1..d).map(|k| p.marginal(k).iter().map(|m| m.ln()).collect()).collect();
        let mut log_fiber = vec![0.0; spec.leaf_count()];
        for j in spec.j_words() {
            let fiber = &spec.leaves()[j.children.clone()];
            let log_total = fiber.iter().map(|n| (t * n.log_ratio).exp()).sum::<f64>().ln();
            for (o, leaf) in fiber.iter().enumerate() {
                log_fiber[j.children.start + o] = t * leaf.log_ratio - log_total;
            }
        }
        CubeMeasure { d, log_p, log_fiber, t }
    }

    /// `log μ̃_p(B_n(ω))` given the cut indices of `w` at `n`.
    pub fn log_mass(&self, spec: &SpongeSpec, w: &Word, cut: &CutIndices) -> Result<f64> {
        let d = self.d;
        let mut total = 0.0;
        let mut add = |level: usize, range: std::ops::Range<usize>| -> Result<()> {
            for pos in range {
                let s = w.symbols()[pos];
                let v = self.log_p[level - 1][spec.chain(s)[level - 1]];
                if v == f64::NEG_INFINITY {
                    return Err(SpongeError::ZeroMass { position: pos });
                }
                total += v;
            }
            Ok(())
        };
        // level d-1 words up to L^{d-2}; level k words on (L^k, L^{k-1}]
        add(d - 1, 0..cut.get(d - 2))?;
        for k in 1..d - 1 {
            add(k, cut.get(k)..cut.get(k - 1))?;
        }
        for pos in 0..cut.get(d - 1) {
            total += self.log_fiber[w.symbols()[pos]];
        }
        Ok(total)
    }
}

/// `μ̃_p(B_n(ω))`.
pub fn cube_measure(spec: &SpongeSpec, p: &ProbVector, w: &Word, n: usize) -> Result<f64> {
    let cut = cut_indices(spec, w, n)?;
    Ok(CubeMeasure::new(spec, p).log_mass(spec, w, &cut)?.exp())
}

/// Generator for stream `stream` of seed `seed`.
pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

pub(crate) fn draw_symbols<R: Rng>(weights: &[f64], n: usize, rng: &mut R) -> Result<Vec<usize>> {
    let dist = WeightedIndex::new(weights).map_err(|e| SpongeError::InvalidProb(e.to_string()))?;
    Ok((0..n).map(|_| dist.sample(rng)).collect())
}

/// `n` i.i.d. symbols drawn with the Bernoulli weights attached to `p`.
pub fn sample_word(spec: &SpongeSpec, p: &ProbVector, n: usize, seed: u64) -> Result<Word> {
    let weights = symbol_weights(spec, p).weights;
    let symbols = draw_symbols(&weights, n, &mut stream_rng(seed, 0))?;
    Word::new(spec, symbols)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DimEstimate {
    pub mean: f64,
    pub stderr: f64,
    pub n: usize,
    pub trials: usize,
    pub seed: u64,
}

/// Monte-Carlo mean of `log μ̃_p(B_n(ω)) / Σ_{l<=n} log a^{(1)}` over
/// `trials` independent words; trial `i` uses stream `i + 1` of `seed`.
pub fn pointwise_dim_estimate(spec: &SpongeSpec, p: &ProbVector, n: usize, trials: usize, seed: u64) -> Result<DimEstimate> {
    if trials == 0 {
        return Err(SpongeError::OutOfRange("trials must be positive".into()));
    }
    let weights = symbol_weights(spec, p).weights;
    let measure = CubeMeasure::new(spec, p);
    let samples: Vec<f64> = (0..trials)
        .into_par_iter()
        .map(|trial| {
            let symbols = draw_symbols(&weights, n, &mut stream_rng(seed, trial as u64 + 1))?;
            let w = Word::new(spec, symbols)?;
            let cut = cut_indices(spec, &w, n)?;
            Ok(measure.log_mass(spec, &w, &cut)? / w.cum_log(1, n))
        })
        .collect::<Result<Vec<f64>>>()?;
    let mean = samples.iter().sum::<f64>() / trials as f64;
    let stderr = if trials > 1 {
        let var = samples.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (trials - 1) as f64;
        (var / trials as f64).sqrt()
    } else {
        0.0
    };
    Ok(DimEstimate { mean, stderr, n, trials, seed })
}

/// All basic boxes of order `n` (the `n`-approximation).
pub fn enumerate_approximation(spec: &SpongeSpec, n: usize, cap: usize) -> Result<Vec<GeoBox>> {
    let count = (spec.leaf_count() as f64).powi(n as i32);
    if count > cap as f64 {
        return Err(SpongeError::CapExceeded { count, cap });
    }
    let mut boxes = vec![GeoBox::unit(spec.d())];
    for _ in 0..n {
        boxes = boxes
            .iter()
            .flat_map(|b| (0..spec.leaf_count()).map(move |leaf| b.refine(spec, leaf)))
            .collect();
    }
    Ok(boxes)
}

/// What to cover in [`box_count_estimate`].
#[derive(Debug, Clone, Copy)]
pub enum CoverInput<'a> {
    Points(&'a [Vec<f64>]),
    Boxes(&'a [GeoBox]),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoxCountEstimate {
    pub slope: f64,
    pub r2: f64,
    /// `(δ, N(δ))` per scale.
    pub counts: Vec<(f64, usize)>,
    /// Always `"sanity"`: an upper indicator, not a dimension value.
    pub kind: &'static str,
}

fn cell_range(lo: f64, hi: f64, delta: f64) -> std::ops::Range<i64> {
    let cells = (1.0 / delta).ceil() as i64;
    let a = ((lo / delta) + 1e-9).floor() as i64;
    let b = ((hi / delta) - 1e-9).ceil() as i64;
    let a = a.clamp(0, cells - 1);
    let b = b.clamp(a + 1, cells);
    a..b
}

/// Least-squares slope of `log N(δ)` against `log(1/δ)` on a grid cover.
pub fn box_count_estimate(input: CoverInput<'_>, scales: &[f64]) -> Result<BoxCountEstimate> {
    let distinct: HashSet<u64> = scales.iter().map(|s| s.to_bits()).collect();
    if distinct.len() < 3 {
        return Err(SpongeError::DegenerateScales(format!("need at least 3 distinct scales, got {}", distinct.len())));
    }
    if let Some(bad) = scales.iter().find(|s| !(**s > 0.0 && **s <= 1.0)) {
        return Err(SpongeError::DegenerateScales(format!("scale {bad} not in (0, 1]")));
    }
    let counts: Vec<(f64, usize)> = scales
        .iter()
        .map(|&delta| {
            let mut cells: HashSet<Vec<i64>> = HashSet::new();
            match input {
                CoverInput::Points(points) => {
                    for x in points {
                        cells.insert(x.iter().map(|&v| cell_range(v, v, delta).start).collect());
                    }
                }
                CoverInput::Boxes(boxes) => {
                    for b in boxes {
                        let edges = b.edges();
                        let ranges: Vec<_> =
                            (0..b.corner.len()).map(|c| cell_range(b.corner[c], b.corner[c] + edges[c], delta)).collect();
                        let mut idx: Vec<i64> = ranges.iter().map(|r| r.start).collect();
                        'outer: loop {
                            cells.insert(idx.clone());
                            for c in 0..idx.len() {
                                idx[c] += 1;
                                if idx[c] < ranges[c].end {
                                    continue 'outer;
                                }
                                idx[c] = ranges[c].start;
                            }
                            break;
                        }
                    }
                }
            }
            (delta, cells.len())
        })
        .collect();
    let xs: Vec<f64> = counts.iter().map(|(d, _)| -d.ln()).collect();
    let ys: Vec<f64> = counts.iter().map(|(_, n)| (*n as f64).ln()).collect();
    let (slope, r2) = linear_fit(&xs, &ys);
    Ok(BoxCountEstimate { slope, r2, counts, kind: "sanity" })
}

/// Ordinary least squares `y ≈ α + β x`; returns `(β, r²)`.
pub(crate) fn linear_fit(xs: &[f64], ys: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    let slope = sxy / sxx;
    let r2 = if syy == 0.0 { 1.0 } else { sxy * sxy / (sxx * syy) };
    (slope, r2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measures::dim_formula;
    use crate::model::{make_sierpinski, make_sierpinski_levels, AlphabetNode, BaseTriple, CountTree};

    fn lg_spec() -> SpongeSpec {
        make_sierpinski(&CountTree::uniform(3, 2), &BaseTriple::sierpinski(0.25, 1.0 / 3.0, 0.5).unwrap()).unwrap()
    }

    #[test]
    fn basic_box_of_one_and_two_symbols() {
        let spec = lg_spec();
        let w = Word::new(&spec, vec![0]).unwrap();
        let b = box_of_word(&spec, &w).unwrap();
        assert_eq!(b.corner, vec![0.0; 3]);
        let e = b.edges();
        assert!((e[0] - 0.25).abs() < 1e-15 && (e[1] - 1.0 / 3.0).abs() < 1e-15 && (e[2] - 0.5).abs() < 1e-15);
        let w = Word::new(&spec, vec![0, 0]).unwrap();
        let e = box_of_word(&spec, &w).unwrap().edges();
        assert!((e[0] - 1.0 / 16.0).abs() < 1e-15 && (e[1] - 1.0 / 9.0).abs() < 1e-15 && (e[2] - 0.25).abs() < 1e-15);
    }

    #[test]
    fn boxes_nest_along_words() {
        let spec = lg_spec();
        let w = Word::new(&spec, vec![7, 3, 5, 1, 6]).unwrap();
        for len in 1..w.len() {
            let short = Word::new(&spec, w.symbols()[..len].to_vec()).unwrap();
            let long = Word::new(&spec, w.symbols()[..len + 1].to_vec()).unwrap();
            assert!(box_of_word(&spec, &short).unwrap().contains(&box_of_word(&spec, &long).unwrap(), 1e-15));
        }
    }

    #[test]
    fn floor_formulas_for_uniform_ratios() {
        let spec = make_sierpinski_levels(&CountTree::uniform(3, 1), &[0.5, 0.25, 0.125]).unwrap();
        let w = Word::new(&spec, vec![0; 200]).unwrap();
        for n in 3..=200 {
            let cut = cut_indices(&spec, &w, n).unwrap();
            assert_eq!(cut.get(1), n / 2, "n = {n}");
            assert_eq!(cut.get(2), n / 3, "n = {n}");
        }
    }

    #[test]
    fn threshold_and_length_checks() {
        let spec = make_sierpinski_levels(&CountTree::uniform(3, 1), &[0.5, 0.25, 0.125]).unwrap();
        let w = Word::new(&spec, vec![0; 10]).unwrap();
        assert!(matches!(cut_indices(&spec, &w, 2), Err(SpongeError::BelowThreshold { .. })));
        assert!(matches!(cut_indices(&spec, &w, 11), Err(SpongeError::WordTooShort { .. })));
    }

    #[test]
    fn sweep_matches_search() {
        let spec = make_sierpinski_levels(&CountTree::new(vec![vec![2], vec![2, 1], vec![1, 2, 3]]).unwrap(), &[0.45, 0.3, 0.2])
            .unwrap();
        let p = ProbVector::uniform(&spec);
        let w = sample_word(&spec, &p, 400, 3).unwrap();
        let sweep = cut_indices_sweep(&spec, &w, 3, 400).unwrap();
        for cut in sweep {
            assert_eq!(cut, cut_indices(&spec, &w, cut.n()).unwrap());
        }
    }

    #[test]
    fn cube_equals_basic_box_for_cube_spec() {
        let spec = make_sierpinski_levels(&CountTree::uniform(3, 2), &[0.5, 0.5, 0.5]).unwrap();
        let w = Word::new(&spec, vec![3, 6, 1, 0]).unwrap();
        let cube = approx_cube(&spec, &w, 4).unwrap();
        assert_eq!(cube, box_of_word(&spec, &w).unwrap());
        for e in cube.edges() {
            assert!((e - 1.0 / 16.0).abs() < 1e-15);
        }
        let p = ProbVector::uniform(&spec);
        let m = cube_measure(&spec, &p, &Word::new(&spec, vec![3, 6]).unwrap(), 2).unwrap();
        assert!((m - 8f64.powi(-2)).abs() < 1e-15);
    }

    #[test]
    fn single_chain_sandwich_is_tight() {
        let spec = make_sierpinski_levels(&CountTree::uniform(3, 1), &[0.5, 0.25, 0.125]).unwrap();
        let w = Word::new(&spec, vec![0; 6]).unwrap();
        let cut = cut_indices(&spec, &w, 6).unwrap();
        for r in sandwich_log_ratios(&spec, &w, &cut) {
            assert!(r.abs() < 1e-12);
        }
    }

    #[test]
    fn cube_measure_single_symbol() {
        let spec = make_sierpinski_levels(&CountTree::new(vec![vec![2], vec![1, 1], vec![1, 1]]).unwrap(), &[0.5, 0.5, 0.5])
            .unwrap();
        let p = ProbVector::new(&spec, vec![0.3, 0.7]).unwrap();
        let w = Word::new(&spec, vec![1]).unwrap();
        assert!((cube_measure(&spec, &p, &w, 1).unwrap() - 0.7).abs() < 1e-15);
    }

    #[test]
    fn zero_mass_is_an_error() {
        let spec = lg_spec();
        let p = ProbVector::new(&spec, vec![0.5, 0.5, 0.0, 0.0]).unwrap();
        let w = Word::new(&spec, vec![0, 7, 0, 0, 0]).unwrap();
        assert!(matches!(cube_measure(&spec, &p, &w, 5), Err(SpongeError::ZeroMass { position: 1 })));
    }

    #[test]
    fn sampling_is_deterministic() {
        let spec = lg_spec();
        let p = ProbVector::uniform(&spec);
        assert_eq!(sample_word(&spec, &p, 50, 9).unwrap(), sample_word(&spec, &p, 50, 9).unwrap());
        assert_ne!(sample_word(&spec, &p, 50, 9).unwrap(), sample_word(&spec, &p, 50, 10).unwrap());
        let point = ProbVector::new(&spec, vec![0.0, 1.0, 0.0, 0.0]).unwrap();
        let w = sample_word(&spec, &point, 100, 1).unwrap();
        assert!(w.symbols().iter().all(|&s| spec.chain(s)[1] == 1));
    }

    #[test]
    fn estimate_exact_on_cube() {
        let spec = make_sierpinski_levels(&CountTree::uniform(3, 2), &[0.5, 0.5, 0.5]).unwrap();
        let p = ProbVector::uniform(&spec);
        for n in [5, 50, 300] {
            let est = pointwise_dim_estimate(&spec, &p, n, 4, 1).unwrap();
            assert!((est.mean - 3.0).abs() < 1e-12);
        }
    }

    #[test]
    fn estimate_on_carpet_like_spec_has_no_fiber_term() {
        let spec = make_sierpinski_levels(&CountTree::new(vec![vec![2], vec![2, 1], vec![1, 1, 1]]).unwrap(), &[0.5, 0.25, 0.2])
            .unwrap();
        let p = ProbVector::new(&spec, vec![0.2, 0.3, 0.5]).unwrap();
        assert_eq!(t_of_p(&spec, &p), 0.0);
        let est = pointwise_dim_estimate(&spec, &p, 4000, 50, 5).unwrap();
        let dim = dim_formula(&spec, &p).unwrap();
        assert!((est.mean - dim).abs() < 0.02 * dim, "{} vs {}", est.mean, dim);
    }

    #[test]
    fn enumeration_counts_and_volume() {
        let spec = lg_spec();
        assert_eq!(enumerate_approximation(&spec, 0, 1).unwrap(), vec![GeoBox::unit(3)]);
        let one = enumerate_approximation(&spec, 1, 100).unwrap();
        assert_eq!(one.len(), 8);
        let two = enumerate_approximation(&spec, 2, 100).unwrap();
        assert_eq!(two.len(), 64);
        let vol1: f64 = one.iter().map(|b| b.volume()).sum();
        let vol2: f64 = two.iter().map(|b| b.volume()).sum();
        assert!((vol2 - vol1 * vol1).abs() < 1e-14);
        assert!(matches!(enumerate_approximation(&spec, 3, 100), Err(SpongeError::CapExceeded { .. })));
    }

    #[test]
    fn approximation_interiors_are_disjoint() {
        let spec = make_sierpinski_levels(&CountTree::new(vec![vec![2], vec![2, 1], vec![1, 2, 3]]).unwrap(), &[0.45, 0.3, 0.2])
            .unwrap();
        let boxes = enumerate_approximation(&spec, 2, 1000).unwrap();
        for (i, a) in boxes.iter().enumerate() {
            let ea = a.edges();
            for b in &boxes[i + 1..] {
                let eb = b.edges();
                let overlap = (0..3).all(|c| {
                    a.corner[c] < b.corner[c] + eb[c] - 1e-12 && b.corner[c] < a.corner[c] + ea[c] - 1e-12
                });
                assert!(!overlap);
            }
        }
    }

    #[test]
    fn box_count_examples() {
        let mut rng = stream_rng(4, 0);
        let cube: Vec<Vec<f64>> = (0..200_000).map(|_| (0..3).map(|_| rng.random::<f64>()).collect()).collect();
        let scales = [0.5, 0.25, 0.125, 1.0 / 16.0];
        let est = box_count_estimate(CoverInput::Points(&cube), &scales).unwrap();
        assert!((est.slope - 3.0).abs() < 0.1, "{}", est.slope);
        assert_eq!(est.kind, "sanity");

        let segment: Vec<Vec<f64>> = (0..10_000).map(|i| vec![i as f64 / 10_000.0, 0.3, 0.7]).collect();
        let est = box_count_estimate(CoverInput::Points(&segment), &[0.1, 0.01, 0.001]).unwrap();
        assert!((est.slope - 1.0).abs() < 0.1, "{}", est.slope);

        // product Cantor set: two pieces of ratio 1/4 per axis
        let cantor = SpongeSpec::new(3, {
            let fiber = || vec![AlphabetNode::leaf(0.25, 0.0), AlphabetNode::leaf(0.25, 0.75)];
            let mid = || vec![AlphabetNode::new(0.25, 0.0, fiber()), AlphabetNode::new(0.25, 0.75, fiber())];
            vec![AlphabetNode::new(0.25, 0.0, mid()), AlphabetNode::new(0.25, 0.75, mid())]
        })
        .unwrap();
        let boxes = enumerate_approximation(&cantor, 4, 10_000).unwrap();
        let est = box_count_estimate(CoverInput::Boxes(&boxes), &[0.25, 1.0 / 16.0, 1.0 / 64.0, 1.0 / 256.0]).unwrap();
        let oracle = 3.0 * 2f64.ln() / 4f64.ln();
        assert!((est.slope - oracle).abs() < 1e-9, "{} vs {}", est.slope, oracle);

        assert!(matches!(box_count_estimate(CoverInput::Points(&segment), &[0.1, 0.1, 0.01]), Err(SpongeError::DegenerateScales(_))));
    }
}
