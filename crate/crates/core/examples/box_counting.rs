//! Grid box counting on an approximation and on sampled points. The slope is
//! a sanity indicator only; it is not the Hausdorff dimension.

use sponge::measures::ProbVector;
use sponge::model::{make_sierpinski, BaseTriple, CountTree};
use sponge::symbolic::{box_count_estimate, box_of_word, enumerate_approximation, sample_word, CoverInput, Word};

fn main() -> sponge::Result<()> {
    let counts = CountTree::new(vec![vec![2], vec![2, 3], vec![2, 5, 3, 1, 4]])?;
    let spec = make_sierpinski(&counts, &BaseTriple::sierpinski(1.0 / 6.0, 0.25, 0.5)?)?;
    let scales = [1.0 / 8.0, 1.0 / 16.0, 1.0 / 32.0, 1.0 / 64.0];

    let boxes = enumerate_approximation(&spec, 4, 1_000_000)?;
    let est = box_count_estimate(CoverInput::Boxes(&boxes), &scales)?;
    println!("boxes:  slope {:.4} (r2 {:.4}, {})", est.slope, est.r2, est.kind);

    let p = ProbVector::uniform(&spec);
    let points: Vec<Vec<f64>> = (0..20_000u64)
        .map(|seed| {
            let w: Word = sample_word(&spec, &p, 12, seed)?;
            Ok(box_of_word(&spec, &w)?.corner)
        })
        .collect::<sponge::Result<_>>()?;
    let est = box_count_estimate(CoverInput::Points(&points), &scales)?;
    println!("points: slope {:.4} (r2 {:.4}, {})", est.slope, est.r2, est.kind);
    for (delta, n) in &est.counts {
        println!("  delta {delta:.5}: {n} cells");
    }
    Ok(())
}
