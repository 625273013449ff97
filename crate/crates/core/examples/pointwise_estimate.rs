//! Monte-Carlo estimate of the local dimension of a Bernoulli measure along
//! sampled words, next to the exact dimension formula.
//!
//! ```text
//! cargo run --release --example pointwise_estimate
//! ```

use sponge::measures::{dim_formula, ProbVector};
use sponge::model::{make_sierpinski, BaseTriple, CountTree};
use sponge::symbolic::pointwise_dim_estimate;

fn main() -> sponge::Result<()> {
    let counts = CountTree::new(vec![vec![2], vec![2, 3], vec![2, 5, 3, 1, 4]])?;
    let spec = make_sierpinski(&counts, &BaseTriple::sierpinski(1.0 / 6.0, 0.25, 0.5)?)?;
    let p = ProbVector::normalized(&spec, vec![1.0, 2.0, 1.0, 3.0, 2.0])?;
    println!("exact dim = {:.6}", dim_formula(&spec, &p)?);
    for n in [100, 1_000, 10_000] {
        let e = pointwise_dim_estimate(&spec, &p, n, 64, 11)?;
        println!("n = {n:>6}: {:.6} +- {:.6}", e.mean, e.stderr);
    }
    Ok(())
}
