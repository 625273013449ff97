//! Maximization of the dimension functional over the simplex, a brute-force
//! grid oracle, and the monotone solver cascade that produces the
//! two-parameter family of Bernoulli measures `p(t, ρ)` for `d = 3`.

use std::cell::RefCell;
use std::ops::Range;

use rand_distr::{Distribution, Exp1};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Result, SpongeError, Stage};
use crate::measures::{dim_formula, lambda_k, t_of_p, DimFunctional, ProbVector};
use crate::model::{t_bounds, BaseTriple, SpongeSpec};
use crate::roots::{expand_bracket, safeguarded_newton};
use crate::symbolic::stream_rng;

/// Absolute tolerance on cascade residuals.
pub const CASCADE_TOL: f64 = 1e-10;

/// Bracket expansion limit for `α` and `λ₁`.
pub const BRACKET_LIMIT: f64 = 1e6;

/// Scan range and step for the `λ₂` sign-change search.
pub const LAMBDA2_RANGE: (f64, f64) = (-50.0, 50.0);
pub const LAMBDA2_STEP: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct VpOptions {
    pub starts: usize,
    pub max_iter: usize,
    /// Threshold on the norm of the projected gradient step.
    pub tol: f64,
    pub seed: u64,
}

impl Default for VpOptions {
    fn default() -> Self {
        VpOptions { starts: 16, max_iter: 2000, tol: 1e-7, seed: 0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VPResult {
    pub value: f64,
    #[serde(skip)]
    pub argmax: ProbVector,
    pub starts: usize,
    pub converged_starts: usize,
    /// Max minus min of the values reached by converged starts.
    pub spread: f64,
    pub interior: bool,
    /// Whether the start that produced `argmax` met the tolerance.
    pub converged: bool,
    pub iterations: usize,
}

#[derive(Debug, Clone)]
struct Ascent {
    x: Vec<f64>,
    value: f64,
    converged: bool,
    iterations: usize,
}

/// Euclidean projection onto the probability simplex.
pub fn project_simplex(v: &[f64]) -> Vec<f64> {
    let mut u = v.to_vec();
    u.sort_by(|a, b| b.total_cmp(a));
    let mut cum = 0.0;
    let mut theta = 0.0;
    for (k, &uk) in u.iter().enumerate() {
        cum += uk;
        let cand = (cum - 1.0) / (k + 1) as f64;
        if uk - cand > 0.0 {
            theta = cand;
        }
    }
    v.iter().map(|&x| (x - theta).max(0.0)).collect()
}

const GRAD_STEP: f64 = 1e-6;

fn numeric_gradient(f: &DimFunctional<'_>, x: &[f64], fx: f64) -> Vec<f64> {
    let mut g = vec![0.0; x.len()];
    let mut probe = x.to_vec();
    for i in 0..x.len() {
        let xi = x[i];
        probe[i] = xi + GRAD_STEP;
        let up = f.eval(&probe);
        if xi >= GRAD_STEP {
            probe[i] = xi - GRAD_STEP;
            let down = f.eval(&probe);
            g[i] = (up - down) / (2.0 * GRAD_STEP);
        } else {
            g[i] = (up - fx) / GRAD_STEP;
        }
        probe[i] = xi;
    }
    g
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Spectral projected-gradient ascent with Armijo backtracking.
fn ascend(f: &DimFunctional<'_>, start: Vec<f64>, opts: &VpOptions) -> Ascent {
    let mut x = project_simplex(&start);
    let mut fx = f.eval(&x);
    let mut g = numeric_gradient(f, &x, fx);
    let mut step = 1.0;
    for iter in 0..opts.max_iter {
        let shifted: Vec<f64> = x.iter().zip(&g).map(|(a, b)| a + b).collect();
        let pg: Vec<f64> = project_simplex(&shifted).iter().zip(&x).map(|(a, b)| a - b).collect();
        if dot(&pg, &pg).sqrt() < opts.tol {
            return Ascent { x, value: fx, converged: true, iterations: iter };
        }
        let mut s = step;
        let mut accepted = None;
        for _ in 0..60 {
            let trial: Vec<f64> = x.iter().zip(&g).map(|(a, b)| a + s * b).collect();
            let y = project_simplex(&trial);
            let fy = f.eval(&y);
            let dir: Vec<f64> = y.iter().zip(&x).map(|(a, b)| a - b).collect();
            if fy.is_finite() && fy >= fx + 1e-4 * dot(&g, &dir) {
                accepted = Some((y, fy, dir));
                break;
            }
            s *= 0.5;
        }
        let Some((y, fy, dir)) = accepted else {
            // no ascent direction within floating point resolution
            let converged = dot(&pg, &pg).sqrt() < 100.0 * opts.tol;
            return Ascent { x, value: fx, converged, iterations: iter };
        };
        let gy = numeric_gradient(f, &y, fy);
        let diff: Vec<f64> = g.iter().zip(&gy).map(|(a, b)| a - b).collect();
        let curvature = dot(&dir, &diff);
        step = if curvature > 0.0 { (dot(&dir, &dir) / curvature).clamp(1e-10, 1e10) } else { 1.0 };
        x = y;
        fx = fy;
        g = gy;
    }
    Ascent { x, value: fx, converged: false, iterations: opts.max_iter }
}

/// `sup_p (Σ λ_k(p) + t(p))` by multi-start projected ascent; start `s` is a
/// symmetric Dirichlet(1) draw from stream `s` of the seed.
pub fn vp(spec: &SpongeSpec, opts: &VpOptions) -> Result<VPResult> {
    if spec.d() < 2 {
        return Err(SpongeError::Dimension { expected: ">= 2".into(), found: spec.d() });
    }
    if opts.starts == 0 {
        return Err(SpongeError::OutOfRange("starts must be positive".into()));
    }
    let f = DimFunctional::new(spec);
    let n = spec.j_count();
    if n == 1 {
        let p = ProbVector::uniform(spec);
        let value = dim_formula(spec, &p)?;
        return Ok(VPResult {
            value,
            argmax: p,
            starts: opts.starts,
            converged_starts: opts.starts,
            spread: 0.0,
            interior: true,
            converged: true,
            iterations: 0,
        });
    }
    let runs: Vec<Ascent> = (0..opts.starts)
        .into_par_iter()
        .map(|s| {
            let mut rng = stream_rng(opts.seed, s as u64);
            let start: Vec<f64> = (0..n).map(|_| Exp1.sample(&mut rng)).collect();
            let total: f64 = start.iter().sum();
            let start = start.iter().map(|v: &f64| v / total).collect();
            ascend(&f, start, opts)
        })
        .collect();
    let mut best = 0;
    for (i, r) in runs.iter().enumerate() {
        if r.value > runs[best].value {
            best = i;
        }
    }
    let good: Vec<f64> = runs.iter().filter(|r| r.converged).map(|r| r.value).collect();
    let spread = if good.is_empty() {
        0.0
    } else {
        good.iter().copied().fold(f64::MIN, f64::max) - good.iter().copied().fold(f64::MAX, f64::min)
    };
    let argmax = ProbVector::normalized(spec, runs[best].x.clone())?;
    let value = dim_formula(spec, &argmax)?;
    Ok(VPResult {
        value,
        interior: argmax.is_interior(),
        argmax,
        starts: opts.starts,
        converged_starts: good.len(),
        spread,
        converged: runs[best].converged,
        iterations: runs.iter().map(|r| r.iterations).sum(),
    })
}

/// Maximum of the dimension functional over the grid `{k / resolution}` of
/// the simplex.
pub fn vp_grid_oracle(spec: &SpongeSpec, resolution: usize) -> Result<f64> {
    let n = spec.j_count();
    if n > 4 {
        return Err(SpongeError::TooManyWords(n));
    }
    if resolution == 0 {
        return Err(SpongeError::OutOfRange("resolution must be positive".into()));
    }
    let f = DimFunctional::new(spec);
    if n == 1 {
        return Ok(f.eval(&[1.0]));
    }
    fn best_over(f: &DimFunctional<'_>, prefix: &mut Vec<f64>, left: usize, slots: usize, res: f64) -> f64 {
        if slots == 1 {
            prefix.push(left as f64 / res);
            let v = f.eval(prefix);
            prefix.pop();
            return if v.is_nan() { f64::NEG_INFINITY } else { v };
        }
        let mut best = f64::NEG_INFINITY;
        for k in 0..=left {
            prefix.push(k as f64 / res);
            best = best.max(best_over(f, prefix, left - k, slots - 1, res));
            prefix.pop();
        }
        best
    }
    let res = resolution as f64;
    let best = (0..=resolution)
        .into_par_iter()
        .map(|k| {
            let mut prefix = vec![k as f64 / res];
            best_over(&f, &mut prefix, resolution - k, n - 1, res)
        })
        .reduce(|| f64::NEG_INFINITY, f64::max);
    Ok(best)
}

fn logsumexp(xs: impl Iterator<Item = f64> + Clone) -> f64 {
    let m = xs.clone().fold(f64::NEG_INFINITY, f64::max);
    if m == f64::NEG_INFINITY {
        return m;
    }
    m + xs.map(|x| (x - m).exp()).sum::<f64>().ln()
}

/// Precomputed log-ratios of a three-level spec for the cascade.
#[derive(Debug, Clone)]
pub struct Cascade {
    log_c: Vec<f64>,
    log_b: Vec<f64>,
    groups: Vec<Range<usize>>,
    fibers: Vec<Vec<f64>>,
}

/// Everything the cascade equations need at one parameter point.
#[derive(Debug, Clone)]
pub struct CascadeState {
    /// `log p_ij`, aligned with the words of length 2.
    pub log_p: Vec<f64>,
    pub p_i: Vec<f64>,
    pub log_gamma: Vec<f64>,
    /// `log C`.
    pub log_c_norm: f64,
    /// `F = Σ p_ij log S_ij`.
    pub f: f64,
    /// `∂F/∂α`.
    pub df: f64,
    /// `H = Σ p_i log γ_i`.
    pub h: f64,
    /// `-Σ p_i log c_i`, the derivative of `log C` in `λ₁`.
    pub dlogc_dl1: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AlphaSolve {
    pub alpha: f64,
    pub residual: f64,
    /// All fiber sums coincide and vanish in log, so every `α` is a root.
    pub degenerate: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Lambda1Solve {
    pub lambda1: f64,
    pub alpha: f64,
    /// `C - 1`.
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Lambda2Solve {
    pub lambda2: f64,
    pub lambda1: f64,
    pub alpha: f64,
    pub residual: f64,
    /// Every root found on the scan range.
    pub roots: Vec<f64>,
    pub multiple: bool,
}

impl Cascade {
    pub fn new(spec: &SpongeSpec) -> Result<Self> {
        if spec.d() != 3 {
            return Err(SpongeError::Dimension { expected: "3".into(), found: spec.d() });
        }
        Ok(Cascade {
            log_c: spec.level(1).iter().map(|n| n.log_ratio).collect(),
            log_b: spec.level(2).iter().map(|n| n.log_ratio).collect(),
            groups: spec.level(1).iter().map(|n| n.children.clone()).collect(),
            fibers: spec.fiber_log_ratios(),
        })
    }

    /// `log Σ_k a_ijk^t` for every fiber.
    pub fn log_fiber_sums(&self, t: f64) -> Vec<f64> {
        self.fibers.iter().map(|f| logsumexp(f.iter().map(|l| t * l))).collect()
    }

    pub fn state(&self, s: &[f64], alpha: f64, l1: f64, l2: f64, rho: f64) -> CascadeState {
        let log_g: Vec<f64> = self.log_b.iter().zip(s).map(|(b, s)| l2 * b + alpha * s).collect();
        let log_gamma: Vec<f64> = self.groups.iter().map(|g| logsumexp(log_g[g.clone()].iter().copied())).collect();
        let log_top: Vec<f64> = self.log_c.iter().zip(&log_gamma).map(|(c, g)| l1 * c + rho * g).collect();
        let log_c_norm = -logsumexp(log_top.iter().copied());
        let p_i: Vec<f64> = log_top.iter().map(|v| (v + log_c_norm).exp()).collect();
        let mut log_p = vec![0.0; s.len()];
        let (mut f, mut h, mut second, mut within, mut dlogc) = (0.0, 0.0, 0.0, 0.0, 0.0);
        for (i, g) in self.groups.iter().enumerate() {
            let (mut m, mut m2) = (0.0, 0.0);
            for ij in g.clone() {
                let log_q = log_g[ij] - log_gamma[i];
                log_p[ij] = log_top[i] + log_c_norm + log_q;
                let q = log_q.exp();
                m += q * s[ij];
                m2 += q * s[ij] * s[ij];
            }
            f += p_i[i] * m;
            second += p_i[i] * m * m;
            within += p_i[i] * (m2 - m * m).max(0.0);
            h += p_i[i] * log_gamma[i];
            dlogc -= p_i[i] * self.log_c[i];
        }
        let df = rho * (second - f * f).max(0.0) + within;
        CascadeState { log_p, p_i, log_gamma, log_c_norm, f, df, h, dlogc_dl1: dlogc }
    }

    fn alpha(&self, s: &[f64], l1: f64, l2: f64, rho: f64) -> Result<AlphaSolve> {
        let hi_s = s.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let lo_s = s.iter().copied().fold(f64::INFINITY, f64::min);
        let diagnostic = || format!("log A_t = {hi_s}, log B_t = {lo_s}");
        if hi_s - lo_s <= 1e-14 * (1.0 + hi_s.abs()) {
            if hi_s.abs() <= 1e-12 {
                return Ok(AlphaSolve { alpha: 0.0, residual: hi_s, degenerate: true });
            }
            return Err(SpongeError::NoBracket { stage: Stage::Alpha, detail: diagnostic() });
        }
        let f = |a: f64| self.state(s, a, l1, l2, rho).f;
        let (lo, hi) = expand_bracket(f, BRACKET_LIMIT)
            .map_err(|_| SpongeError::NoBracket { stage: Stage::Alpha, detail: diagnostic() })?;
        let root = if lo == hi {
            lo
        } else {
            safeguarded_newton(
                |a| {
                    let st = self.state(s, a, l1, l2, rho);
                    (st.f, st.df)
                },
                lo,
                hi,
                1e-15,
                300,
            )
            .x
        };
        Ok(AlphaSolve { alpha: root, residual: f(root), degenerate: false })
    }

    fn lambda1(&self, s: &[f64], l2: f64, rho: f64) -> Result<Lambda1Solve> {
        let failure: RefCell<Option<SpongeError>> = RefCell::new(None);
        let eval = |l1: f64| -> Option<(CascadeState, f64)> {
            match self.alpha(s, l1, l2, rho) {
                Ok(a) => Some((self.state(s, a.alpha, l1, l2, rho), a.alpha)),
                Err(e) => {
                    failure.borrow_mut().get_or_insert(e);
                    None
                }
            }
        };
        let g = |l1: f64| eval(l1).map_or(f64::NAN, |(st, _)| st.log_c_norm);
        let bracket = expand_bracket(g, BRACKET_LIMIT);
        if let Some(e) = failure.borrow_mut().take() {
            return Err(e);
        }
        let (lo, hi) = bracket.map_err(|(a, b)| SpongeError::NoBracket {
            stage: Stage::Lambda1,
            detail: format!("log C at the bracket ends: {a}, {b}"),
        })?;
        let root = if lo == hi {
            lo
        } else {
            // ∂ log C / ∂α = -ρF vanishes once α solves F = 0
            safeguarded_newton(
                |l1| eval(l1).map_or((f64::NAN, f64::NAN), |(st, _)| (st.log_c_norm, st.dlogc_dl1)),
                lo,
                hi,
                1e-15,
                300,
            )
            .x
        };
        if let Some(e) = failure.borrow_mut().take() {
            return Err(e);
        }
        let (st, alpha) = eval(root).ok_or_else(|| failure.borrow_mut().take().expect("recorded failure"))?;
        Ok(Lambda1Solve { lambda1: root, alpha, residual: st.log_c_norm.exp() - 1.0 })
    }

    fn h_at(&self, s: &[f64], l2: f64, rho: f64) -> Result<(f64, Lambda1Solve)> {
        let l1 = self.lambda1(s, l2, rho)?;
        Ok((self.state(s, l1.alpha, l1.lambda1, l2, rho).h, l1))
    }

    fn lambda2(&self, s: &[f64], rho: f64) -> Result<Lambda2Solve> {
        let (lo, hi) = LAMBDA2_RANGE;
        let steps = ((hi - lo) / LAMBDA2_STEP).round() as usize;
        let grid: Vec<f64> = (0..=steps).map(|k| lo + k as f64 * LAMBDA2_STEP).collect();
        let values: Vec<Result<f64>> = grid.par_iter().map(|&l2| self.h_at(s, l2, rho).map(|(h, _)| h)).collect();
        let mut roots = Vec::new();
        let mut decreasing = Vec::new();
        let mut first_err = None;
        for k in 0..steps {
            let (a, b) = match (&values[k], &values[k + 1]) {
                (Ok(a), Ok(b)) => (*a, *b),
                (Err(_), _) | (_, Err(_)) => {
                    if first_err.is_none() {
                        first_err = Some(k);
                    }
                    continue;
                }
            };
            if a == 0.0 {
                roots.push(grid[k]);
                decreasing.push(b < 0.0);
                continue;
            }
            if a * b < 0.0 {
                roots.push(self.bisect_h(s, rho, grid[k], grid[k + 1], a)?);
                decreasing.push(a > 0.0);
            }
        }
        if let Ok(last) = values[steps] {
            if last == 0.0 {
                roots.push(grid[steps]);
                decreasing.push(false);
            }
        }
        if roots.is_empty() {
            if let Some(k) = first_err {
                if values.iter().all(|v| v.is_err()) {
                    return Err(self.h_at(s, grid[k], rho).expect_err("recorded failure"));
                }
            }
            let end = |v: &Result<f64>| v.as_ref().copied().unwrap_or(f64::NAN);
            return Err(SpongeError::NoRoot { lo, hi, h_lo: end(&values[0]), h_hi: end(&values[steps]) });
        }
        let distance = |x: f64| (-x).max(x - 1.0).max(0.0);
        let pool: Vec<usize> = if decreasing.iter().any(|&d| d) {
            (0..roots.len()).filter(|&k| decreasing[k]).collect()
        } else {
            (0..roots.len()).collect()
        };
        let pick = pool.iter().copied().min_by(|&a, &b| distance(roots[a]).total_cmp(&distance(roots[b]))).unwrap();
        let lambda2 = roots[pick];
        let (h, l1) = self.h_at(s, lambda2, rho)?;
        Ok(Lambda2Solve { lambda2, lambda1: l1.lambda1, alpha: l1.alpha, residual: h, multiple: roots.len() > 1, roots })
    }

    fn bisect_h(&self, s: &[f64], rho: f64, mut lo: f64, mut hi: f64, h_lo: f64) -> Result<f64> {
        let sign_lo = h_lo.signum();
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi || hi - lo <= 1e-14 * (1.0 + mid.abs()) {
                break;
            }
            let (h, _) = self.h_at(s, mid, rho)?;
            if h == 0.0 {
                return Ok(mid);
            }
            if h.signum() == sign_lo {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Ok(0.5 * (lo + hi))
    }
}

/// Root `α` of `F(α) = 0` at fixed `(λ₁, λ₂, t, ρ)`.
pub fn solve_alpha(spec: &SpongeSpec, lambda1: f64, lambda2: f64, t: f64, rho: f64) -> Result<AlphaSolve> {
    let c = Cascade::new(spec)?;
    c.alpha(&c.log_fiber_sums(t), lambda1, lambda2, rho)
}

/// `λ₁` with `C(α(λ₁), λ₁, λ₂, t, ρ) = 1`.
pub fn solve_lambda1(spec: &SpongeSpec, lambda2: f64, t: f64, rho: f64) -> Result<Lambda1Solve> {
    let c = Cascade::new(spec)?;
    c.lambda1(&c.log_fiber_sums(t), lambda2, rho)
}

/// `λ₂` with `H = 0`, scanning for sign changes instead of assuming
/// monotonicity. Among several roots, prefers those where `H` decreases and
/// then the one nearest `[0, 1]`.
pub fn solve_lambda2(spec: &SpongeSpec, t: f64, rho: f64) -> Result<Lambda2Solve> {
    let c = Cascade::new(spec)?;
    c.lambda2(&c.log_fiber_sums(t), rho)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FamilyParams {
    pub t: f64,
    pub rho: f64,
    pub alpha: f64,
    pub lambda1: f64,
    pub lambda2: f64,
    pub gamma: Vec<f64>,
    pub normalizer: f64,
    #[serde(skip)]
    pub p: ProbVector,
    pub residual_f: f64,
    pub residual_c: f64,
    pub residual_h: f64,
    /// `t(p) - t`.
    pub residual_t: f64,
    /// `λ₁(p)` and `λ₂(p)` evaluated as functionals of `p`.
    pub lambda1_p: f64,
    pub lambda2_p: f64,
    pub lambda2_roots: Vec<f64>,
    pub alpha_degenerate: bool,
}

impl FamilyParams {
    pub fn max_residual(&self) -> f64 {
        [self.residual_f, self.residual_c, self.residual_h, self.residual_t]
            .iter()
            .fold(0.0, |m, r| m.max(r.abs()))
    }

    pub fn coincidence_error(&self) -> f64 {
        (self.lambda1_p - self.lambda1).abs().max((self.lambda2_p - self.lambda2).abs())
    }
}

fn stage(e: SpongeError, s: Stage) -> SpongeError {
    match e {
        SpongeError::NoBracket { stage, detail } if stage != s => {
            SpongeError::NoBracket { stage: s, detail: format!("{stage}: {detail}") }
        }
        other => other,
    }
}

/// The measure `p(t, ρ)` with `t(p) = t`, solved through the full cascade.
pub fn family_p(spec: &SpongeSpec, t: f64, rho: f64) -> Result<FamilyParams> {
    let cascade = Cascade::new(spec)?;
    let tb = t_bounds(spec)?;
    if tb.t_low >= tb.t_high {
        return Err(SpongeError::DegenerateRange { t: tb.t_low });
    }
    if !(t > tb.t_low && t < tb.t_high) {
        return Err(SpongeError::OutOfRange(format!("t = {t} not in ({}, {})", tb.t_low, tb.t_high)));
    }
    if !(rho > 0.0 && rho <= 1.0) {
        return Err(SpongeError::OutOfRange(format!("rho = {rho} not in (0, 1]")));
    }
    let s = cascade.log_fiber_sums(t);
    let l2 = cascade.lambda2(&s, rho)?;
    let alpha_solve = cascade.alpha(&s, l2.lambda1, l2.lambda2, rho).map_err(|e| stage(e, Stage::Alpha))?;
    let st = cascade.state(&s, alpha_solve.alpha, l2.lambda1, l2.lambda2, rho);
    let p = ProbVector::normalized(spec, st.log_p.iter().map(|l| l.exp()).collect())?;
    let lambda1_p = lambda_k(spec, &p, 1)?;
    let lambda2_p = lambda_k(spec, &p, 2)?;
    Ok(FamilyParams {
        t,
        rho,
        alpha: alpha_solve.alpha,
        lambda1: l2.lambda1,
        lambda2: l2.lambda2,
        gamma: st.log_gamma.iter().map(|g| g.exp()).collect(),
        normalizer: st.log_c_norm.exp(),
        residual_f: st.f,
        residual_c: st.log_c_norm.exp() - 1.0,
        residual_h: st.h,
        residual_t: t_of_p(spec, &p) - t,
        lambda1_p,
        lambda2_p,
        lambda2_roots: l2.roots,
        alpha_degenerate: alpha_solve.degenerate,
        p,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Witness {
    pub rho: f64,
    pub t: f64,
    pub target_alpha: f64,
    pub params: FamilyParams,
}

/// `ρ* = log c / log b` and `t*` with `α(t*, ρ*) = log b / log a`.
pub fn witness_params(spec: &SpongeSpec, base: &BaseTriple) -> Result<Witness> {
    let rho = base.c.ln() / base.b.ln();
    let target = base.b.ln() / base.a.ln();
    let tb = t_bounds(spec)?;
    if tb.t_low >= tb.t_high {
        return Err(SpongeError::DegenerateRange { t: tb.t_low });
    }
    let gap = tb.t_high - tb.t_low;
    let alpha_at = |t: f64| family_p(spec, t, rho).map(|f| f.alpha - target);
    let offsets = [0.5, 0.25, 0.1, 1e-2, 1e-3, 1e-4, 1e-6, 1e-8];
    let no_bracket = |detail: String| SpongeError::NoBracket { stage: Stage::Witness, detail };
    let mut lo = None;
    for &o in &offsets {
        let t = tb.t_low + o * gap;
        if alpha_at(t)? < 0.0 {
            lo = Some(t);
            break;
        }
    }
    let mut hi = None;
    for &o in &offsets {
        let t = tb.t_high - o * gap;
        if alpha_at(t)? > 0.0 {
            hi = Some(t);
            break;
        }
    }
    let (Some(mut lo), Some(mut hi)) = (lo, hi) else {
        return Err(no_bracket(format!("alpha does not straddle {target} on the probed t range")));
    };
    if lo > hi {
        return Err(no_bracket(format!("alpha is not increasing in t near {target}")));
    }
    while hi - lo > 1e-13 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if alpha_at(mid)? < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let t = 0.5 * (lo + hi);
    let params = family_p(spec, t, rho)?;
    Ok(Witness { rho, t, target_alpha: target, params })
}
