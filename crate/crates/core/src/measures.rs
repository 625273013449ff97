//! Bernoulli measures on a sponge: probability vectors on the words of
//! length `d - 1`, the entropy-ratio functionals `λ_k`, the random Moran
//! exponent `t(p)` and the resulting per-symbol weights.

use crate::error::{Result, SpongeError};
use crate::model::SpongeSpec;
use crate::roots;

/// Tolerance on `Σ p = 1` accepted by [`ProbVector::new`].
pub const SUM_TOLERANCE: f64 = 1e-9;

/// Probability weights on the words of length `d - 1`, with marginals cached
/// at every level `1..=d-1`.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbVector {
    weights: Vec<f64>,
    /// `marginals[k-1][idx]` is the mass of level-`k` node `idx`.
    marginals: Vec<Vec<f64>>,
}

impl ProbVector {
    /// Accepts non-negative weights summing to 1 within [`SUM_TOLERANCE`];
    /// the stored vector is renormalized exactly.
    pub fn new(spec: &SpongeSpec, weights: Vec<f64>) -> Result<Self> {
        let sum: f64 = weights.iter().sum();
        if (sum - 1.0).abs() > SUM_TOLERANCE {
            return Err(SpongeError::InvalidProb(format!("weights sum to {sum}, not 1")));
        }
        Self::normalized(spec, weights)
    }

    /// Rescales any non-negative, not-all-zero weights to sum to 1.
    pub fn normalized(spec: &SpongeSpec, mut weights: Vec<f64>) -> Result<Self> {
        if spec.d() < 2 {
            return Err(SpongeError::Dimension { expected: ">= 2".into(), found: spec.d() });
        }
        if weights.len() != spec.j_count() {
            return Err(SpongeError::InvalidProb(format!(
                "{} weights for {} words",
                weights.len(),
                spec.j_count()
            )));
        }
        if let Some(w) = weights.iter().find(|w| !w.is_finite() || **w < 0.0) {
            return Err(SpongeError::InvalidProb(format!("weight {w} is not a finite non-negative number")));
        }
        let sum: f64 = weights.iter().sum();
        if sum.is_nan() || sum <= 0.0 {
            return Err(SpongeError::InvalidProb("all weights are zero".into()));
        }
        if sum != 1.0 {
            weights.iter_mut().for_each(|w| *w /= sum);
        }
        let top = spec.d() - 1;
        let mut marginals = vec![Vec::new(); top];
        marginals[top - 1] = weights.clone();
        for level in (1..top).rev() {
            let mut m = vec![0.0; spec.level(level).len()];
            for (idx, node) in spec.level(level + 1).iter().enumerate() {
                m[node.parent.expect("level > 1")] += marginals[level][idx];
            }
            marginals[level - 1] = m;
        }
        Ok(ProbVector { weights, marginals })
    }

    pub fn uniform(spec: &SpongeSpec) -> Self {
        let n = spec.j_count();
        Self::normalized(spec, vec![1.0; n]).expect("uniform weights are valid")
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Masses of the level-`level` nodes, `1 <= level <= d - 1`.
    pub fn marginal(&self, level: usize) -> &[f64] {
        &self.marginals[level - 1]
    }

    /// All weights strictly positive.
    pub fn is_interior(&self) -> bool {
        self.weights.iter().all(|&w| w > 0.0)
    }
}

fn xlogx(x: f64) -> f64 {
    if x > 0.0 {
        x * x.ln()
    } else {
        0.0
    }
}

fn neg_entropy(masses: &[f64]) -> f64 {
    masses.iter().map(|&m| xlogx(m)).sum()
}

/// Level-`k` entropy increment over the level-`k` mean log-ratio.
pub fn lambda_k(spec: &SpongeSpec, p: &ProbVector, k: usize) -> Result<f64> {
    if k == 0 || k >= spec.d() {
        return Err(SpongeError::OutOfRange(format!("level {k} not in 1..{}", spec.d())));
    }
    let masses = p.marginal(k);
    let mut numerator = neg_entropy(masses);
    if k > 1 {
        numerator -= neg_entropy(p.marginal(k - 1));
    }
    let denominator: f64 = spec.level(k).iter().zip(masses).map(|(n, &m)| m * n.log_ratio).sum();
    if denominator == 0.0 {
        return Err(SpongeError::DegenerateDenominator { level: k });
    }
    // numerator <= 0 and denominator < 0; clamp the -0.0 case
    Ok((numerator / denominator).max(0.0))
}

/// Sum of `λ_k` over `k = 1..d-1`.
pub fn lambda_sum(spec: &SpongeSpec, p: &ProbVector) -> Result<f64> {
    (1..spec.d()).map(|k| lambda_k(spec, p, k)).sum()
}

/// Value and `t`-derivative of `Σ_j p_j log Σ_k a_jk^t`.
pub(crate) fn moran_average(fibers: &[Vec<f64>], weights: &[f64], t: f64) -> (f64, f64) {
    let (mut g, mut dg) = (0.0, 0.0);
    for (fiber, &w) in fibers.iter().zip(weights) {
        if w == 0.0 {
            continue;
        }
        let (mut s, mut ds) = (0.0, 0.0);
        for &l in fiber {
            let e = (t * l).exp();
            s += e;
            ds += e * l;
        }
        g += w * s.ln();
        dg += w * ds / s;
    }
    (g, dg)
}

/// Root in `[0, 1]` of `t ↦ Σ_j p_j log Σ_k a_jk^t`, using precomputed
/// fiber log-ratios.
pub fn t_of_weights(fibers: &[Vec<f64>], weights: &[f64]) -> f64 {
    let f = |t: f64| {
        let (g, dg) = moran_average(fibers, weights, t);
        (-g, -dg)
    };
    roots::bisect_polish(f, 0.0, 1.0, 1e-12, 2).x
}

/// The random Moran exponent `t(p)`.
pub fn t_of_p(spec: &SpongeSpec, p: &ProbVector) -> f64 {
    t_of_weights(&spec.fiber_log_ratios(), p.weights())
}

/// Residual of the averaged Moran equation at `t`.
pub fn moran_residual(spec: &SpongeSpec, p: &ProbVector, t: f64) -> f64 {
    moran_average(&spec.fiber_log_ratios(), p.weights(), t).0
}

/// Probability of each leaf under the Bernoulli measure attached to `p`.
#[derive(Debug, Clone, PartialEq)]
pub struct SymbolWeights {
    pub weights: Vec<f64>,
    pub t: f64,
}

pub fn symbol_weights(spec: &SpongeSpec, p: &ProbVector) -> SymbolWeights {
    let t = t_of_p(spec, p);
    symbol_weights_at(spec, p, t)
}

/// Leaf weights `p_j · a^t / Σ a^t` for a given exponent `t`.
pub fn symbol_weights_at(spec: &SpongeSpec, p: &ProbVector, t: f64) -> SymbolWeights {
    let mut weights = vec![0.0; spec.leaf_count()];
    for (j, node) in spec.j_words().iter().enumerate() {
        let fiber = &spec.leaves()[node.children.clone()];
        let powers: Vec<f64> = fiber.iter().map(|n| (t * n.log_ratio).exp()).collect();
        let total: f64 = powers.iter().sum();
        for (offset, power) in powers.iter().enumerate() {
            weights[node.children.start + offset] = p.weights()[j] * power / total;
        }
    }
    SymbolWeights { weights, t }
}

/// `Σ_k λ_k(p) + t(p)`, the dimension of the Bernoulli measure attached to `p`.
pub fn dim_formula(spec: &SpongeSpec, p: &ProbVector) -> Result<f64> {
    Ok(lambda_sum(spec, p)? + t_of_p(spec, p))
}

/// Reusable evaluator of the dimension functional on raw weight vectors.
///
/// Caches the fiber log-ratios so the inner Moran solve does not rebuild them.
#[derive(Debug, Clone)]
pub struct DimFunctional<'a> {
    spec: &'a SpongeSpec,
    fibers: Vec<Vec<f64>>,
}

impl<'a> DimFunctional<'a> {
    pub fn new(spec: &'a SpongeSpec) -> Self {
        DimFunctional { spec, fibers: spec.fiber_log_ratios() }
    }

    pub fn spec(&self) -> &SpongeSpec {
        self.spec
    }

    /// Dimension at `weights / Σ weights`.
    pub fn eval(&self, weights: &[f64]) -> f64 {
        let p = match ProbVector::normalized(self.spec, weights.to_vec()) {
            Ok(p) => p,
            Err(_) => return f64::NAN,
        };
        let lambda = lambda_sum(self.spec, &p).unwrap_or(f64::NAN);
        lambda + t_of_weights(&self.fibers, p.weights())
    }

    pub fn t(&self, weights: &[f64]) -> f64 {
        t_of_weights(&self.fibers, weights)
    }
}
