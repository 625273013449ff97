//! File formats: spec JSON, probability vectors keyed by dotted words, CSV
//! tables and SVG renderings of approximations.

use std::collections::{BTreeMap, HashSet};
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::continuity::SweepReport;
use crate::error::{Result, SpongeError};
use crate::measures::ProbVector;
use crate::model::{AlphabetNode, SpongeSpec};
use crate::symbolic::GeoBox;
use crate::variational::FamilyParams;

#[derive(Debug, Deserialize)]
struct RawNode {
    ratio: f64,
    #[serde(default)]
    offset: Option<f64>,
    #[serde(default)]
    children: Vec<RawNode>,
}

#[derive(Debug, Deserialize)]
struct RawSpec {
    d: usize,
    tree: Vec<RawNode>,
}

#[derive(Serialize)]
struct SpecOut<'a> {
    d: usize,
    tree: &'a [AlphabetNode],
}

/// Missing offsets continue from the previous sibling's far edge.
fn resolve(nodes: Vec<RawNode>) -> Vec<AlphabetNode> {
    let mut cursor = 0.0;
    nodes
        .into_iter()
        .map(|n| {
            let offset = n.offset.unwrap_or(cursor);
            cursor = offset + n.ratio;
            AlphabetNode::new(n.ratio, offset, resolve(n.children))
        })
        .collect()
}

pub fn spec_from_json(text: &str) -> Result<SpongeSpec> {
    let raw: RawSpec = serde_json::from_str(text)?;
    SpongeSpec::new(raw.d, resolve(raw.tree))
}

pub fn spec_to_json(spec: &SpongeSpec) -> String {
    serde_json::to_string_pretty(&SpecOut { d: spec.d(), tree: spec.tree() }).expect("spec serializes")
}

pub fn load_spec(path: impl AsRef<Path>) -> Result<SpongeSpec> {
    spec_from_json(&std::fs::read_to_string(path)?)
}

pub fn save_spec(spec: &SpongeSpec, path: impl AsRef<Path>) -> Result<()> {
    std::fs::write(path, spec_to_json(spec) + "\n")?;
    Ok(())
}

/// Weights keyed by the dotted word of each element of 𝓙, in index order.
pub fn prob_to_map(spec: &SpongeSpec, p: &ProbVector) -> Vec<(String, f64)> {
    spec.j_words().iter().zip(p.weights()).map(|(n, &w)| (n.word(), w)).collect()
}

/// JSON object `{"1.1": w, ...}`; keys missing from the object get weight 0.
pub fn prob_from_json(spec: &SpongeSpec, text: &str) -> Result<ProbVector> {
    let map: BTreeMap<String, f64> = serde_json::from_str(text)?;
    let words: Vec<String> = spec.j_words().iter().map(|n| n.word()).collect();
    if let Some(unknown) = map.keys().find(|k| !words.contains(k)) {
        return Err(SpongeError::InvalidProb(format!("unknown word {unknown}")));
    }
    ProbVector::new(spec, words.iter().map(|w| map.get(w).copied().unwrap_or(0.0)).collect())
}

pub fn load_prob(spec: &SpongeSpec, path: impl AsRef<Path>) -> Result<ProbVector> {
    prob_from_json(spec, &std::fs::read_to_string(path)?)
}

/// Ordered JSON object for a probability vector.
pub fn prob_json(spec: &SpongeSpec, p: &ProbVector) -> serde_json::Value {
    let mut m = serde_json::Map::new();
    for (w, v) in prob_to_map(spec, p) {
        m.insert(w, v.into());
    }
    serde_json::Value::Object(m)
}

/// One row per box: corner coordinates then edge lengths.
pub fn write_boxes_csv<W: Write>(boxes: &[GeoBox], out: W) -> Result<()> {
    let d = boxes.first().map_or(0, |b| b.corner.len());
    let mut w = csv::Writer::from_writer(out);
    let header: Vec<String> =
        (1..=d).map(|c| format!("corner_{c}")).chain((1..=d).map(|c| format!("edge_{c}"))).collect();
    w.write_record(&header)?;
    for b in boxes {
        w.write_record(b.corner.iter().chain(b.edges().iter()).map(|v| v.to_string()))?;
    }
    w.flush()?;
    Ok(())
}

/// `eps,seed,vp,deviation,converged`, one row per sweep cell.
pub fn write_sweep_csv<W: Write>(report: &SweepReport, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for row in &report.rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}

/// Two columns `eps,max_deviation`.
pub fn write_plot_csv<W: Write>(report: &SweepReport, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["eps", "max_deviation"])?;
    for (e, m) in &report.max_deviation {
        w.write_record([e.to_string(), m.to_string()])?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Serialize)]
struct FamilyRow {
    t: f64,
    rho: f64,
    alpha: f64,
    lambda1: f64,
    lambda2: f64,
    residual_f: f64,
    residual_c: f64,
    residual_h: f64,
    residual_t: f64,
    lambda1_p: f64,
    lambda2_p: f64,
}

/// Table of solved `(t, ρ)` points.
pub fn write_family_csv<W: Write>(rows: &[FamilyParams], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for f in rows {
        w.serialize(FamilyRow {
            t: f.t,
            rho: f.rho,
            alpha: f.alpha,
            lambda1: f.lambda1,
            lambda2: f.lambda2,
            residual_f: f.residual_f,
            residual_c: f.residual_c,
            residual_h: f.residual_h,
            residual_t: f.residual_t,
            lambda1_p: f.lambda1_p,
            lambda2_p: f.lambda2_p,
        })?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Plane {
    Xy,
    Yz,
    Xz,
}

impl Plane {
    /// Zero-based coordinates drawn horizontally and vertically.
    pub fn axes(self) -> (usize, usize) {
        match self {
            Plane::Xy => (0, 1),
            Plane::Yz => (1, 2),
            Plane::Xz => (0, 2),
        }
    }
}

impl std::str::FromStr for Plane {
    type Err = SpongeError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "xy" => Ok(Plane::Xy),
            "yz" => Ok(Plane::Yz),
            "xz" => Ok(Plane::Xz),
            other => Err(SpongeError::OutOfRange(format!("plane {other} is not one of xy, yz, xz"))),
        }
    }
}

/// Projected rectangles `(x, y, w, h)` with exact duplicates removed.
pub fn project(boxes: &[GeoBox], plane: Plane) -> Result<Vec<[f64; 4]>> {
    let (h, v) = plane.axes();
    if let Some(b) = boxes.first() {
        if b.corner.len() <= v {
            return Err(SpongeError::Dimension { expected: format!(">= {}", v + 1), found: b.corner.len() });
        }
    }
    let mut seen = HashSet::new();
    let mut rects = Vec::new();
    for b in boxes {
        let e = b.edges();
        let r = [b.corner[h], b.corner[v], e[h], e[v]];
        if seen.insert(r.map(f64::to_bits)) {
            rects.push(r);
        }
    }
    Ok(rects)
}

/// SVG 1.1 document on the unit square; the vertical axis points up.
pub fn render_svg(boxes: &[GeoBox], plane: Plane) -> Result<String> {
    let rects = project(boxes, plane)?;
    let mut s = String::from(
        "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n\
         <svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" viewBox=\"0 0 1 1\" width=\"800\" height=\"800\">\n\
         <g fill=\"#1f3b5c\">\n",
    );
    for [x, y, w, h] in rects {
        s.push_str(&format!("<rect x=\"{x}\" y=\"{}\" width=\"{w}\" height=\"{h}\"/>\n", 1.0 - y - h));
    }
    s.push_str("</g>\n</svg>\n");
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{make_sierpinski_levels, CountTree};
    use crate::symbolic::enumerate_approximation;

    fn cube() -> SpongeSpec {
        make_sierpinski_levels(&CountTree::uniform(3, 2), &[0.5, 0.5, 0.5]).unwrap()
    }

    #[test]
    fn spec_round_trip() {
        let spec = crate::model::perturb(&cube(), 0.05, 2).unwrap();
        let back = spec_from_json(&spec_to_json(&spec)).unwrap();
        assert_eq!(back, spec);
    }

    #[test]
    fn missing_offsets_are_packed_left() {
        let text = r#"{"d": 2, "tree": [
            {"ratio": 0.5, "children": [{"ratio": 0.25}, {"ratio": 0.25}]},
            {"ratio": 0.25, "children": [{"ratio": 0.2}]}
        ]}"#;
        let spec = spec_from_json(text).unwrap();
        assert_eq!(spec.level(1)[1].offset, 0.5);
        assert_eq!(spec.level(2)[1].offset, 0.25);
    }

    #[test]
    fn prob_by_words() {
        let spec = cube();
        let p = prob_from_json(&spec, r#"{"1.1": 0.5, "2.2": 0.5}"#).unwrap();
        assert_eq!(p.weights(), &[0.5, 0.0, 0.0, 0.5]);
        assert!(prob_from_json(&spec, r#"{"3.1": 1.0}"#).is_err());
    }

    #[test]
    fn projection_merges_duplicates() {
        let spec = cube();
        let one = enumerate_approximation(&spec, 1, 100).unwrap();
        let rects = project(&one, Plane::Yz).unwrap();
        assert_eq!(rects.len(), 4);
        let area: f64 = rects.iter().map(|r| r[2] * r[3]).sum();
        assert!((area - 1.0).abs() < 1e-15);
        let zero = enumerate_approximation(&spec, 0, 1).unwrap();
        assert_eq!(project(&zero, Plane::Xy).unwrap(), vec![[0.0, 0.0, 1.0, 1.0]]);
        let svg = render_svg(&one, Plane::Xz).unwrap();
        assert_eq!(svg.matches("<rect").count(), 4);
        assert!(svg.contains("viewBox=\"0 0 1 1\""));
    }
}
