//! Solve the two-parameter family of measures on a (t, rho) grid and print
//! the residuals of every equation.

use sponge::model::{make_sierpinski, t_bounds, BaseTriple, CountTree};
use sponge::variational::family_p;

fn main() -> sponge::Result<()> {
    let counts = CountTree::new(vec![vec![2], vec![2, 3], vec![2, 5, 3, 1, 4]])?;
    let spec = make_sierpinski(&counts, &BaseTriple::sierpinski(1.0 / 6.0, 0.25, 0.5)?)?;
    let tb = t_bounds(&spec)?;

    println!("{:>7} {:>5} {:>10} {:>10} {:>10} {:>9}", "t", "rho", "alpha", "lambda1", "lambda2", "residual");
    for u in [0.2, 0.5, 0.8] {
        let t = tb.t_low + u * (tb.t_high - tb.t_low);
        for rho in [0.25, 0.5, 1.0] {
            let f = family_p(&spec, t, rho)?;
            println!(
                "{t:>7.4} {rho:>5.2} {:>10.6} {:>10.6} {:>10.6} {:>9.1e}",
                f.alpha,
                f.lambda1,
                f.lambda2,
                f.max_residual()
            );
        }
    }
    Ok(())
}
