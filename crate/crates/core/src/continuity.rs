//! Perturbation experiments around a Sierpinski sponge: sweeps of `VP` over
//! `ε`, the Lipschitz envelope fit, the bracket check on fresh perturbations,
//! the transfer-of-`p` gap and the bounds on `L_n^k / n`.

use rand::RngCore;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Result, SpongeError};
use crate::measures::{dim_formula, symbol_weights, ProbVector};
use crate::model::{classify, fit_base, perturb, t_bounds, BaseTriple, SpongeSpec};
use crate::symbolic::{cut_indices, draw_symbols, stream_rng, Word};
use crate::variational::{vp, VPResult, VpOptions};

/// Default sweep grid.
pub const DEFAULT_EPS_GRID: [f64; 5] = [0.0025, 0.005, 0.01, 0.02, 0.04];
pub const DEFAULT_K: usize = 8;

/// Slack for comparisons of optimizer outputs.
pub const VP_SLACK: f64 = 1e-9;

const SWEEP_TAG: u64 = 1;
const HOLDOUT_TAG: u64 = 2;

/// Seed of cell `(a, b)` under `tag`; distinct cells get unrelated seeds.
pub fn cell_seed(seed: u64, tag: u64, a: u64, b: u64) -> u64 {
    stream_rng(seed, (tag << 48) | (a << 24) | b).next_u64()
}

/// An unperturbed sponge together with its fitted base and `VP`.
#[derive(Debug, Clone)]
pub struct Baseline {
    pub spec: SpongeSpec,
    pub base: BaseTriple,
    pub vp: VPResult,
}

impl Baseline {
    pub fn new(spec: &SpongeSpec, opts: &VpOptions) -> Result<Self> {
        let tb = t_bounds(spec)?;
        if tb.t_low >= tb.t_high {
            return Err(SpongeError::DegenerateRange { t: tb.t_low });
        }
        let fitted = fit_base(spec)?;
        if fitted.base.epsilon != 0.0 {
            return Err(SpongeError::OutOfRange(format!(
                "base spec is not Sierpinski: ratios vary by up to {} in log",
                fitted.base.epsilon
            )));
        }
        Ok(Baseline { spec: spec.clone(), base: fitted.base, vp: vp(spec, opts)? })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub eps: f64,
    pub seed: u64,
    pub vp: f64,
    pub deviation: f64,
    pub converged: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepReport {
    pub base: BaseTriple,
    pub vp0: f64,
    pub rows: Vec<SweepRow>,
    /// `(ε, max deviation over converged rows)` per grid value.
    pub max_deviation: Vec<(f64, f64)>,
    /// Least-squares slope through the origin on the per-`ε` maxima.
    pub c_fit: f64,
    /// Envelope: `c_fit` raised until it dominates every fitting point.
    pub c_hat: f64,
    /// Centered `r²` of the through-origin fit.
    pub linearity_r2: f64,
    pub max_ratio: f64,
    pub median_ratio: f64,
    pub excluded: usize,
}

/// `VP` of `K` perturbations per nonzero `ε`, plus the unperturbed row.
///
/// Perturbation `k` uses [`cell_seed`]`(seed, 1, 0, k)` at every `ε`.
pub fn sweep(baseline: &Baseline, eps_grid: &[f64], k: usize, seed: u64, opts: &VpOptions) -> Result<SweepReport> {
    if let Some(bad) = eps_grid.iter().find(|e| !(**e >= 0.0 && e.is_finite())) {
        return Err(SpongeError::OutOfRange(format!("eps {bad} must be finite and non-negative")));
    }
    let mut grid: Vec<f64> = eps_grid.iter().copied().filter(|&e| e > 0.0).collect();
    grid.sort_by(f64::total_cmp);
    grid.dedup();
    let vp0 = baseline.vp.value;
    let cells: Vec<(usize, usize)> = (0..grid.len()).flat_map(|e| (0..k).map(move |j| (e, j))).collect();
    let rows: Vec<SweepRow> = cells
        .par_iter()
        .map(|&(e, j)| {
            let s = cell_seed(seed, SWEEP_TAG, 0, j as u64);
            let spec = perturb(&baseline.spec, grid[e], s)?;
            let r = vp(&spec, opts)?;
            Ok(SweepRow { eps: grid[e], seed: s, vp: r.value, deviation: (r.value - vp0).abs(), converged: r.converged })
        })
        .collect::<Result<Vec<_>>>()?;
    let mut all = vec![SweepRow { eps: 0.0, seed, vp: vp0, deviation: 0.0, converged: baseline.vp.converged }];
    all.extend(rows);
    let excluded = all.iter().filter(|r| !r.converged).count();
    let max_deviation: Vec<(f64, f64)> = grid
        .iter()
        .map(|&e| {
            let m = all.iter().filter(|r| r.eps == e && r.converged).map(|r| r.deviation).fold(0.0, f64::max);
            (e, m)
        })
        .collect();
    let fit = envelope_fit(&max_deviation);
    Ok(SweepReport {
        base: baseline.base,
        vp0,
        rows: all,
        max_deviation,
        c_fit: fit.c_fit,
        c_hat: fit.c_hat,
        linearity_r2: fit.r2,
        max_ratio: fit.max_ratio,
        median_ratio: fit.median_ratio,
        excluded,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnvelopeFit {
    pub c_fit: f64,
    pub c_hat: f64,
    pub r2: f64,
    pub max_ratio: f64,
    pub median_ratio: f64,
}

/// Through-origin least squares of `y ≈ C x`, its envelope and diagnostics.
pub fn envelope_fit(points: &[(f64, f64)]) -> EnvelopeFit {
    if points.is_empty() {
        return EnvelopeFit { c_fit: 0.0, c_hat: 0.0, r2: 1.0, max_ratio: 0.0, median_ratio: 0.0 };
    }
    let sxy: f64 = points.iter().map(|(x, y)| x * y).sum();
    let sxx: f64 = points.iter().map(|(x, _)| x * x).sum();
    let c_fit = sxy / sxx;
    let mut ratios: Vec<f64> = points.iter().map(|(x, y)| y / x).collect();
    ratios.sort_by(f64::total_cmp);
    let max_ratio = *ratios.last().unwrap();
    let median_ratio = if ratios.len() % 2 == 1 {
        ratios[ratios.len() / 2]
    } else {
        0.5 * (ratios[ratios.len() / 2 - 1] + ratios[ratios.len() / 2])
    };
    let mean_y = points.iter().map(|(_, y)| y).sum::<f64>() / points.len() as f64;
    let ss_res: f64 = points.iter().map(|(x, y)| (y - c_fit * x).powi(2)).sum();
    let ss_tot: f64 = points.iter().map(|(_, y)| (y - mean_y).powi(2)).sum();
    let r2 = if ss_tot == 0.0 { if ss_res == 0.0 { 1.0 } else { 0.0 } } else { 1.0 - ss_res / ss_tot };
    EnvelopeFit { c_fit, c_hat: c_fit.max(max_ratio), r2, max_ratio, median_ratio }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SandwichReport {
    /// Classified `ε` of the perturbed spec against the baseline base.
    pub eps: f64,
    pub vp_eps: f64,
    pub vp0: f64,
    pub lower: f64,
    pub upper: f64,
    pub inside: bool,
    pub converged: bool,
    pub note: &'static str,
}

/// Checks `|VP(ε) - VP(0)| <= Ĉ ε`.
///
/// The Hausdorff dimension is bracketed by `[VP, VP + Cε]` but never
/// computed; this checks the `VP`-level consequence only.
pub fn sandwich_check(baseline: &Baseline, spec_eps: &SpongeSpec, c_hat: f64, opts: &VpOptions) -> Result<SandwichReport> {
    let eps = classify(spec_eps, &baseline.base)?;
    let r = vp(spec_eps, opts)?;
    let vp0 = baseline.vp.value;
    let (lower, upper) = (vp0 - c_hat * eps, vp0 + c_hat * eps);
    Ok(SandwichReport {
        eps,
        vp_eps: r.value,
        vp0,
        lower,
        upper,
        inside: r.value >= lower - VP_SLACK && r.value <= upper + VP_SLACK,
        converged: r.converged,
        note: "Hausdorff dimension is bracketed between VP and VP + C*eps, not computed",
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HoldoutReport {
    pub draws: usize,
    pub inside: usize,
    pub pass_rate: f64,
    pub checks: Vec<SandwichReport>,
}

/// `draws` fresh perturbations, cycling through `eps_grid`, with seeds
/// disjoint from those of [`sweep`].
pub fn holdout(baseline: &Baseline, eps_grid: &[f64], draws: usize, c_hat: f64, seed: u64, opts: &VpOptions) -> Result<HoldoutReport> {
    let grid: Vec<f64> = eps_grid.iter().copied().filter(|&e| e > 0.0).collect();
    if grid.is_empty() {
        return Err(SpongeError::OutOfRange("hold-out needs a positive eps".into()));
    }
    let checks: Vec<SandwichReport> = (0..draws)
        .into_par_iter()
        .map(|i| {
            let eps = grid[i % grid.len()];
            let spec = perturb(&baseline.spec, eps, cell_seed(seed, HOLDOUT_TAG, i as u64, 0))?;
            sandwich_check(baseline, &spec, c_hat, opts)
        })
        .collect::<Result<Vec<_>>>()?;
    let inside = checks.iter().filter(|c| c.inside).count();
    Ok(HoldoutReport { draws, inside, pass_rate: inside as f64 / draws.max(1) as f64, checks })
}

fn same_alphabet(a: &SpongeSpec, b: &SpongeSpec) -> bool {
    a.d() == b.d()
        && (1..=a.d()).all(|k| {
            let (x, y) = (a.level(k), b.level(k));
            x.len() == y.len() && x.iter().zip(y).all(|(m, n)| m.children == n.children)
        })
}

/// `VP(0)` minus the dimension of the perturbed spec at the baseline argmax.
pub fn lower_bound_gap(baseline: &Baseline, spec_eps: &SpongeSpec) -> Result<f64> {
    if !same_alphabet(&baseline.spec, spec_eps) {
        return Err(SpongeError::Structure { path: vec![], constraint: "alphabets differ".into() });
    }
    let p = ProbVector::new(spec_eps, baseline.vp.argmax.weights().to_vec())?;
    Ok(baseline.vp.value - dim_formula(spec_eps, &p)?)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RatioBand {
    pub target: f64,
    pub lower: f64,
    pub upper: f64,
    pub observed_min: f64,
    pub observed_max: f64,
    pub violations: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LRatioReport {
    /// `A = 3 / |log b|`, valid for every `n >= 1` while `ε <= |log b| / 3`.
    pub a_const: f64,
    pub eps: f64,
    pub n: usize,
    pub samples: usize,
    pub l1: RatioBand,
    pub l2: RatioBand,
    pub violations: usize,
}

/// Tolerance for the band comparisons of `L / n`.
pub const RATIO_TOL: f64 = 1e-9;

/// Checks
/// `log c/log b - 1/n - Aε <= L_n^1/n <= log c/log b + Aε` and the same for
/// `L_n^2` against `log c/log a`, over uniformly drawn words.
pub fn check_l_ratio_bounds(spec_eps: &SpongeSpec, base: &BaseTriple, samples: usize, n: usize, seed: u64) -> Result<LRatioReport> {
    let eps = classify(spec_eps, base)?;
    let (la, lb, lc) = (base.a.ln(), base.b.ln(), base.c.ln());
    let a_const = 3.0 / lb.abs();
    if eps > lb.abs() / 3.0 {
        return Err(SpongeError::OutOfRange(format!("eps {eps} exceeds |log b| / 3 = {}", lb.abs() / 3.0)));
    }
    let weights = symbol_weights(spec_eps, &ProbVector::uniform(spec_eps)).weights;
    let ratios: Vec<(f64, f64)> = (0..samples)
        .into_par_iter()
        .map(|s| {
            let symbols = draw_symbols(&weights, n, &mut stream_rng(seed, s as u64))?;
            let w = Word::new(spec_eps, symbols)?;
            let cut = cut_indices(spec_eps, &w, n)?;
            Ok((cut.get(1) as f64 / n as f64, cut.get(2) as f64 / n as f64))
        })
        .collect::<Result<Vec<_>>>()?;
    let band = |target: f64, pick: fn(&(f64, f64)) -> f64| {
        let lower = target - 1.0 / n as f64 - a_const * eps;
        let upper = target + a_const * eps;
        let values = ratios.iter().map(pick);
        RatioBand {
            target,
            lower,
            upper,
            observed_min: values.clone().fold(f64::INFINITY, f64::min),
            observed_max: values.clone().fold(f64::NEG_INFINITY, f64::max),
            violations: values.filter(|&r| r < lower - RATIO_TOL || r > upper + RATIO_TOL).count(),
        }
    };
    let l1 = band(lc / lb, |r| r.0);
    let l2 = band(lc / la, |r| r.1);
    let violations = l1.violations + l2.violations;
    Ok(LRatioReport { a_const, eps, n, samples, l1, l2, violations })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{make_sierpinski, CountTree};
    use crate::measures::t_of_p;

    fn base_spec() -> SpongeSpec {
        make_sierpinski(
            &CountTree::new(vec![vec![2], vec![2, 3], vec![2, 5, 3, 1, 4]]).unwrap(),
            &BaseTriple::sierpinski(1.0 / 6.0, 0.25, 0.5).unwrap(),
        )
        .unwrap()
    }

    fn opts() -> VpOptions {
        VpOptions { starts: 4, ..Default::default() }
    }

    #[test]
    fn zero_grid_sweep() {
        let b = Baseline::new(&base_spec(), &opts()).unwrap();
        let r = sweep(&b, &[0.0], 8, 1, &opts()).unwrap();
        assert_eq!(r.rows.len(), 1);
        assert_eq!(r.rows[0].deviation, 0.0);
        assert_eq!(r.c_hat, 0.0);
    }

    #[test]
    fn sweep_row_count_and_envelope() {
        let b = Baseline::new(&base_spec(), &opts()).unwrap();
        let r = sweep(&b, &[0.005, 0.01, 0.02], 3, 1, &opts()).unwrap();
        assert_eq!(r.rows.len(), 10);
        assert!(r.rows.windows(2).all(|w| w[0].eps <= w[1].eps));
        for row in &r.rows[1..] {
            assert!(row.deviation <= r.c_hat * row.eps + 1e-15);
        }
    }

    #[test]
    fn envelope_on_exact_line() {
        let f = envelope_fit(&[(1.0, 2.0), (2.0, 4.0), (4.0, 8.0)]);
        assert!((f.c_fit - 2.0).abs() < 1e-15 && (f.c_hat - 2.0).abs() < 1e-15 && (f.r2 - 1.0).abs() < 1e-15);
    }

    #[test]
    fn sandwich_at_zero() {
        let b = Baseline::new(&base_spec(), &opts()).unwrap();
        let r = sandwich_check(&b, &base_spec(), 1.0, &opts()).unwrap();
        assert_eq!(r.eps, 0.0);
        assert!(r.inside);
    }

    #[test]
    fn gap_zero_and_uniform_shift() {
        let spec = base_spec();
        let b = Baseline::new(&spec, &opts()).unwrap();
        assert!(lower_bound_gap(&b, &spec).unwrap().abs() < 1e-12);

        // scaling the fiber ratios by e^{-ε} moves t by ≈ ε t / (-log a) to first order
        let p = b.vp.argmax.clone();
        let t0 = t_of_p(&spec, &p);
        let eps: f64 = 1e-5;
        let shrunk = spec.map_ratios(false, |level, _, r| if level == 3 { r * (-eps).exp() } else { r }).unwrap();
        let t1 = t_of_p(&shrunk, &ProbVector::new(&shrunk, p.weights().to_vec()).unwrap());
        let predicted = eps * t0 / -(1.0f64 / 6.0).ln();
        assert!(((t0 - t1) - predicted).abs() < 1e-8, "{} vs {predicted}", t0 - t1);
    }

    #[test]
    fn l_ratio_bounds_unperturbed() {
        let spec = base_spec();
        let base = BaseTriple::sierpinski(1.0 / 6.0, 0.25, 0.5).unwrap();
        let r = check_l_ratio_bounds(&spec, &base, 50, 1000, 3).unwrap();
        assert_eq!(r.violations, 0);
        assert!(r.l1.observed_max <= r.l1.target + 1e-12 && r.l1.observed_min >= r.l1.target - 1e-3 - 1e-12);
    }

    #[test]
    fn l_ratio_bounds_perturbed() {
        let base = BaseTriple::sierpinski(1.0 / 6.0, 0.25, 0.5).unwrap();
        let spec = perturb(&base_spec(), 0.02, 5).unwrap();
        assert_eq!(check_l_ratio_bounds(&spec, &base, 100, 1000, 3).unwrap().violations, 0);
    }

    #[test]
    fn baseline_requires_sierpinski_with_gap() {
        let spec = perturb(&base_spec(), 0.01, 1).unwrap();
        assert!(Baseline::new(&spec, &opts()).is_err());
    }
}
