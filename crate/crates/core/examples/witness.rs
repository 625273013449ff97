//! The measure picked out by rho* = log c / log b and alpha = log b / log a
//! attains the variational supremum on an unperturbed sponge.

use sponge::measures::dim_formula;
use sponge::model::{make_sierpinski, BaseTriple, CountTree};
use sponge::variational::{vp, witness_params, VpOptions};

fn main() -> sponge::Result<()> {
    let base = BaseTriple::sierpinski(1.0 / 6.0, 0.25, 0.5)?;
    let counts = CountTree::new(vec![vec![2], vec![2, 3], vec![2, 5, 3, 1, 4]])?;
    let spec = make_sierpinski(&counts, &base)?;

    let w = witness_params(&spec, &base)?;
    println!("rho* = {:.6}, t* = {:.8}, target alpha = {:.6}", w.rho, w.t, w.target_alpha);
    println!("residual {:.1e}", w.params.max_residual());
    let at_witness = dim_formula(&spec, &w.params.p)?;
    let best = vp(&spec, &VpOptions::default())?;
    println!("dim at witness = {at_witness:.10}");
    println!("vp             = {:.10}", best.value);
    Ok(())
}
