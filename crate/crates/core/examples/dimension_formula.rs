//! Lyapunov-type exponents, the random Moran exponent and the dimension of
//! a few Bernoulli measures on one sponge.

use sponge::measures::{dim_formula, lambda_k, symbol_weights, t_of_p, ProbVector};
use sponge::model::{make_sierpinski, BaseTriple, CountTree};

fn main() -> sponge::Result<()> {
    let counts = CountTree::new(vec![vec![2], vec![2, 3], vec![2, 5, 3, 1, 4]])?;
    let spec = make_sierpinski(&counts, &BaseTriple::sierpinski(1.0 / 6.0, 0.25, 0.5)?)?;

    let candidates = [
        ("uniform", ProbVector::uniform(&spec)),
        ("by fiber size", ProbVector::normalized(&spec, vec![2.0, 5.0, 3.0, 1.0, 4.0])?),
        ("skewed", ProbVector::normalized(&spec, vec![1.0, 1.0, 4.0, 4.0, 4.0])?),
    ];
    println!("{:>14}  {:>9}  {:>9}  {:>9}  {:>9}", "p", "lambda_1", "lambda_2", "t", "dim");
    for (name, p) in &candidates {
        println!(
            "{name:>14}  {:>9.6}  {:>9.6}  {:>9.6}  {:>9.6}",
            lambda_k(&spec, p, 1)?,
            lambda_k(&spec, p, 2)?,
            t_of_p(&spec, p),
            dim_formula(&spec, p)?
        );
    }

    let sw = symbol_weights(&spec, &candidates[0].1);
    let words: Vec<String> = spec.leaves().iter().zip(&sw.weights).map(|(n, w)| format!("{}:{w:.4}", n.word())).collect();
    println!("leaf weights at t = {:.6}: {}", sw.t, words.join(" "));
    Ok(())
}
