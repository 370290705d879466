//! Flat SVG dump of an instance: points, segments, and the certified
//! overlap point. Purely illustrative; coordinates are rounded for display
//! and certify nothing.

use num_traits::ToPrimitive;
use overlap_core::geom::{AffineInstance, RationalPoint};

pub fn render(inst: &AffineInstance, overlap: &RationalPoint) -> String {
    let to_f = |r: &overlap_core::rational::Rational| r.to_f64().unwrap_or(0.0);
    let xs: Vec<f64> = inst.points().iter().map(|p| to_f(&p.x)).collect();
    let ys: Vec<f64> = inst.points().iter().map(|p| to_f(&p.y)).collect();
    let (min_x, max_x) = xs.iter().fold((f64::MAX, f64::MIN), |(lo, hi), &v| {
        (lo.min(v), hi.max(v))
    });
    let (min_y, max_y) = ys.iter().fold((f64::MAX, f64::MIN), |(lo, hi), &v| {
        (lo.min(v), hi.max(v))
    });
    let span = (max_x - min_x).max(max_y - min_y).max(1e-9);
    let pad = span * 0.05;
    let scale = 800.0 / (span + 2.0 * pad);
    let tx = |x: f64| (x - min_x + pad) * scale;
    let ty = |y: f64| 800.0 - (y - min_y + pad) * scale;

    let mut out = String::new();
    out.push_str(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"800\" height=\"800\" viewBox=\"0 0 800 800\">\n",
    );
    out.push_str("<rect width=\"800\" height=\"800\" fill=\"white\"/>\n");
    for (i, &[a, b]) in inst.skeleton().edges().iter().enumerate() {
        let _ = i;
        out.push_str(&format!(
            "<line x1=\"{:.2}\" y1=\"{:.2}\" x2=\"{:.2}\" y2=\"{:.2}\" stroke=\"#8888cc\" stroke-width=\"1\"/>\n",
            tx(xs[a as usize]),
            ty(ys[a as usize]),
            tx(xs[b as usize]),
            ty(ys[b as usize]),
        ));
    }
    for (x, y) in xs.iter().zip(&ys) {
        out.push_str(&format!(
            "<circle cx=\"{:.2}\" cy=\"{:.2}\" r=\"5\" fill=\"#222266\"/>\n",
            tx(*x),
            ty(*y)
        ));
    }
    out.push_str(&format!(
        "<circle cx=\"{:.2}\" cy=\"{:.2}\" r=\"7\" fill=\"#cc2222\" stroke=\"black\"/>\n",
        tx(to_f(&overlap.x)),
        ty(to_f(&overlap.y))
    ));
    out.push_str("</svg>\n");
    out
}
