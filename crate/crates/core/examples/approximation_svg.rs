//! Write the order-2 approximation of a sponge as CSV boxes and as an SVG
//! projection onto each coordinate plane.
//!
//! ```text
//! cargo run --example approximation_svg -- out_dir
//! ```

use std::path::PathBuf;

use sponge::io::{render_svg, write_boxes_csv, Plane};
use sponge::model::{make_sierpinski, BaseTriple, CountTree};
use sponge::symbolic::enumerate_approximation;

fn main() -> sponge::Result<()> {
    let dir = PathBuf::from(std::env::args().nth(1).unwrap_or_else(|| ".".into()));
    std::fs::create_dir_all(&dir)?;
    let counts = CountTree::new(vec![vec![2], vec![2, 3], vec![2, 5, 3, 1, 4]])?;
    let spec = make_sierpinski(&counts, &BaseTriple::sierpinski(1.0 / 6.0, 0.25, 0.5)?)?;

    let boxes = enumerate_approximation(&spec, 2, 10_000)?;
    write_boxes_csv(&boxes, std::fs::File::create(dir.join("boxes.csv"))?)?;
    for (name, plane) in [("xy", Plane::Xy), ("yz", Plane::Yz), ("xz", Plane::Xz)] {
        let path = dir.join(format!("approx_{name}.svg"));
        std::fs::write(&path, render_svg(&boxes, plane)?)?;
        println!("wrote {}", path.display());
    }
    let volume: f64 = boxes.iter().map(|b| b.volume()).sum();
    println!("{} boxes, total volume {volume:.6e}", boxes.len());
    Ok(())
}
