use std::fmt::Write as _;

use thiserror::Error;

use crate::cpmap::CpMap;
use crate::solver::PackingSolution;
use crate::Complex64;

/// Overlap tolerated between non-adjacent circles of an unbranched packing, relative to the largest radius.
pub const OVERLAP_TOL_REL: f64 = 1e-8;

#[derive(Debug, Error, Clone, PartialEq)]
#[error("unbranched packing has overlapping circles (overlap {overlap:e})")]
pub struct OverlapError {
    pub overlap: f64,
}

/// For an unbranched target, checks that no two non-adjacent circles overlap.
pub fn overlap_audit(map: &CpMap) -> Result<(), OverlapError> {
    if !map.target().branch.is_empty() {
        return Ok(());
    }
    let overlap = map.max_overlap();
    let scale = map.target().radii.as_slice().iter().copied().fold(0.0, f64::max);
    if overlap > OVERLAP_TOL_REL * scale {
        return Err(OverlapError { overlap });
    }
    Ok(())
}

const CANVAS: f64 = 600.0;
const MARGIN: f64 = 12.0;
const GAP: f64 = 24.0;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RenderOptions {
    pub edges: bool,
}

impl Default for RenderOptions {
    fn default() -> Self {
        Self { edges: true }
    }
}

struct Bounds {
    min: Complex64,
    max: Complex64,
}

impl Bounds {
    fn of(p: &PackingSolution) -> Self {
        let mut min = Complex64::new(f64::INFINITY, f64::INFINITY);
        let mut max = Complex64::new(f64::NEG_INFINITY, f64::NEG_INFINITY);
        for (c, r) in p.centers.iter().zip(p.radii.as_slice()) {
            min.re = min.re.min(c.re - r);
            min.im = min.im.min(c.im - r);
            max.re = max.re.max(c.re + r);
            max.im = max.im.max(c.im + r);
        }
        Self { min, max }
    }

    fn span(&self) -> f64 {
        (self.max.re - self.min.re).max(self.max.im - self.min.im).max(f64::MIN_POSITIVE)
    }
}

/// Draws one packing into a `CANVAS`-sized panel whose left edge is at `x0`.
fn panel(out: &mut String, p: &PackingSolution, x0: f64, opts: RenderOptions) {
    let b = Bounds::of(p);
    let scale = (CANVAS - 2.0 * MARGIN) / b.span();
    // y flipped so the picture has the usual orientation
    let map = |z: Complex64| (x0 + MARGIN + (z.re - b.min.re) * scale, MARGIN + (b.max.im - z.im) * scale);
    let c = &p.complex;
    let orders = p.branch.order_table(c.vertex_count());

    out.push_str("<g>\n");
    if opts.edges {
        for &(u, w) in c.edges() {
            let (x1, y1) = map(p.centers[u]);
            let (x2, y2) = map(p.centers[w]);
            let _ = writeln!(
                out,
                r##"<line x1="{x1:.3}" y1="{y1:.3}" x2="{x2:.3}" y2="{y2:.3}" stroke="#9aa" stroke-width="0.5"/>"##
            );
        }
    }
    for (v, &order) in orders.iter().enumerate() {
        let (x, y) = map(p.centers[v]);
        let r = p.radii[v] * scale;
        let (fill, stroke) = if order > 0 {
            ("#e4572e", "#7a1f0b")
        } else if c.is_boundary(v) {
            ("#d9e6f2", "#335")
        } else {
            ("none", "#335")
        };
        let _ = writeln!(
            out,
            r#"<circle cx="{x:.3}" cy="{y:.3}" r="{r:.3}" fill="{fill}" fill-opacity="0.6" stroke="{stroke}" stroke-width="0.6"/>"#
        );
    }
    out.push_str("</g>\n");
}

fn document(width: f64, body: &str) -> String {
    format!(
        "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n\
         <svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"{width:.0}\" height=\"{CANVAS:.0}\" viewBox=\"0 0 {width:.0} {CANVAS:.0}\">\n\
         <rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n{body}</svg>\n"
    )
}

/// SVG of a single packing. Branch vertices are filled red, boundary circles light blue.
pub fn render_packing_svg(p: &PackingSolution, opts: RenderOptions) -> String {
    let mut body = String::new();
    panel(&mut body, p, 0.0, opts);
    document(CANVAS, &body)
}

/// Target packing of a cp-map, audited for overlaps first when unbranched.
pub fn render_map_svg(map: &CpMap, opts: RenderOptions) -> Result<String, OverlapError> {
    overlap_audit(map)?;
    Ok(render_packing_svg(map.target(), opts))
}

/// Regular source packing on the left, target on the right.
pub fn render_pair_svg(map: &CpMap, opts: RenderOptions) -> Result<String, OverlapError> {
    overlap_audit(map)?;
    let mut body = String::new();
    panel(&mut body, map.source(), 0.0, opts);
    panel(&mut body, map.target(), CANVAS + GAP, opts);
    Ok(document(2.0 * CANVAS + GAP, &body))
}
