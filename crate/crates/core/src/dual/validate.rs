//! The eight-property well-behavedness validator and the refinement driver.
//!
//! Everything is checked with exact predicates against the actual placed
//! images; a failure is data (a witness), not an exception. The properties:
//!
//! 1. no placed point lies on a dual edge, and no dual vertex lies on an
//!    image segment;
//! 2. every placed point has a unique containing triangle `t*_v`, free of
//!    all other placed points;
//! 3. an image with one end inside a dual triangle and one outside crosses
//!    exactly one of its edges;
//! 4. a dual edge with one end inside an image triangle and one outside
//!    crosses exactly one of its image edges;
//! 5. only images at `v` may touch `t*_v`;
//! 6. a dual edge not separated by an image triangle meets at most two of
//!    its image edges;
//! 7. a dual edge outside `t*_v` meets images of at most one edge at `v`;
//! 8. an image meets at most two edges of any dual triangle.

use super::build::build_triangulation;
use super::DualTriangulation;
use crate::geom::exact::{self, HPt};
use crate::geom::AffineInstance;
use crate::rational::{ratio, Rational};
use num_traits::ToPrimitive;

/// Identifies one of the eight well-behavedness properties.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct PropertyId(pub u8);

/// A witness that a property fails, in terms of simplex indices.
#[derive(Clone, Debug)]
pub enum Violation {
    /// Property 1: placed point on a dual edge.
    PointOnDualEdge { vertex: usize, dual_edge: usize },
    /// Property 1: dual vertex on an image segment.
    DualVertexOnImage { dual_vertex: usize, edge: usize },
    /// Property 2: no unique containing triangle for a placed point.
    NoContainingTriangle { vertex: usize, hits: usize },
    /// Property 2: another placed point inside `t*_v`.
    ForeignPoint { vertex: usize, other: usize },
    /// Property 3 or 8 (images against dual triangles).
    ImageCrossings {
        property: u8,
        edge: usize,
        dual_triangle: usize,
        crossings: usize,
    },
    /// Property 4 or 6 (dual edges against image triangles).
    DualEdgeCrossings {
        property: u8,
        dual_edge: usize,
        triangle: usize,
        crossings: usize,
    },
    /// Property 5: a non-incident image touches `t*_v`.
    ImageTouchesCore { vertex: usize, edge: usize },
    /// Property 7: a dual edge outside `t*_v` meets two images at `v`.
    TwoImagesAtVertex {
        vertex: usize,
        dual_edge: usize,
        edge_a: usize,
        edge_b: usize,
    },
}

impl Violation {
    pub fn property(&self) -> PropertyId {
        PropertyId(match self {
            Violation::PointOnDualEdge { .. } | Violation::DualVertexOnImage { .. } => 1,
            Violation::NoContainingTriangle { .. } | Violation::ForeignPoint { .. } => 2,
            Violation::ImageCrossings { property, .. } => *property,
            Violation::DualEdgeCrossings { property, .. } => *property,
            Violation::ImageTouchesCore { .. } => 5,
            Violation::TwoImagesAtVertex { .. } => 7,
        })
    }
}

/// Outcome of the eight checks, with the located `t*_v` triangles on success.
#[derive(Clone, Debug)]
pub struct WellBehavedCertificate {
    pub pass: [bool; 8],
    pub witnesses: Vec<Violation>,
    /// For each instance vertex, the dual triangle containing its image.
    pub core_triangle: Vec<Option<u32>>,
}

impl WellBehavedCertificate {
    pub fn valid(&self) -> bool {
        self.pass.iter().all(|&p| p)
    }
}

/// Refinement gave up: no round produced a valid triangulation.
#[derive(Clone, Debug)]
pub struct RefinementExhausted {
    pub rounds: usize,
    /// Failure summary of each round, in order.
    pub failures: Vec<String>,
}

impl std::fmt::Display for RefinementExhausted {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "no well-behaved triangulation after {} rounds: [{}]",
            self.rounds,
            self.failures.join("; ")
        )
    }
}

impl std::error::Error for RefinementExhausted {}

const MAX_WITNESSES: usize = 16;
const IBOX_SHIFT: usize = 20;

#[derive(Clone, Copy)]
struct IBox {
    x0: i64,
    x1: i64,
    y0: i64,
    y1: i64,
}

impl IBox {
    fn overlaps(&self, other: &IBox) -> bool {
        self.x0 <= other.x1 && other.x0 <= self.x1 && self.y0 <= other.y1 && other.y0 <= self.y1
    }
}

fn ibox(pts: &[&HPt]) -> IBox {
    let mut b = IBox {
        x0: i64::MAX / 4,
        x1: i64::MIN / 4,
        y0: i64::MAX / 4,
        y1: i64::MIN / 4,
    };
    for p in pts {
        let scale = Rational::from_integer(num_bigint::BigInt::from(1i64 << IBOX_SHIFT));
        let fx = (p.x() * &scale).floor().numer().to_i64().unwrap_or(i64::MAX / 8);
        let fy = (p.y() * scale).floor().numer().to_i64().unwrap_or(i64::MAX / 8);
        b.x0 = b.x0.min(fx);
        b.x1 = b.x1.max(fx + 1);
        b.y0 = b.y0.min(fy);
        b.y1 = b.y1.max(fy + 1);
    }
    b
}

struct Checker {
    fail_fast: bool,
    pass: [bool; 8],
    witnesses: Vec<Violation>,
    core_triangle: Vec<Option<u32>>,
}

impl Checker {
    fn record(&mut self, violation: Violation) -> bool {
        let prop = violation.property().0 as usize - 1;
        self.pass[prop] = false;
        if self.witnesses.len() < MAX_WITNESSES {
            self.witnesses.push(violation);
        }
        self.fail_fast
    }

    fn done_early(&self) -> bool {
        self.fail_fast && self.pass.iter().any(|p| !p)
    }
}

/// Runs all eight property checks.
pub fn validate_well_behaved(
    inst: &AffineInstance,
    xstar: &DualTriangulation,
) -> WellBehavedCertificate {
    validate(inst, xstar, false)
}

fn validate(
    inst: &AffineInstance,
    xstar: &DualTriangulation,
    fail_fast: bool,
) -> WellBehavedCertificate {
    let n = inst.n();
    let skel = inst.skeleton();
    let mut ck = Checker {
        fail_fast,
        pass: [true; 8],
        witnesses: Vec::new(),
        core_triangle: vec![None; n],
    };

    let image_boxes: Vec<IBox> = skel
        .edges()
        .iter()
        .map(|&[a, b]| ibox(&[inst.hpoint(a as usize), inst.hpoint(b as usize)]))
        .collect();
    let hull_box = ibox(&inst.hpoints().iter().collect::<Vec<_>>());
    let dual_edge_boxes: Vec<IBox> = xstar
        .edges()
        .iter()
        .map(|&[a, b]| ibox(&[xstar.hpt(a as usize), xstar.hpt(b as usize)]))
        .collect();
    let dual_tri_boxes: Vec<IBox> = xstar
        .triangles()
        .iter()
        .map(|&[a, b, c]| {
            ibox(&[
                xstar.hpt(a as usize),
                xstar.hpt(b as usize),
                xstar.hpt(c as usize),
            ])
        })
        .collect();
    let point_boxes: Vec<IBox> = (0..n).map(|v| ibox(&[inst.hpoint(v)])).collect();

    // property 1a: placed points on dual edges
    'p1a: for v in 0..n {
        for (e, &[a, b]) in xstar.edges().iter().enumerate() {
            if !point_boxes[v].overlaps(&dual_edge_boxes[e]) {
                continue;
            }
            if exact::on_segment(inst.hpoint(v), xstar.hpt(a as usize), xstar.hpt(b as usize))
                && ck.record(Violation::PointOnDualEdge { vertex: v, dual_edge: e }) {
                    break 'p1a;
                }
        }
    }
    if ck.done_early() {
        return finish(ck);
    }

    // property 1b: dual vertices on image segments
    let dual_vertex_boxes: Vec<IBox> = (0..xstar.vertex_count())
        .map(|dv| ibox(&[xstar.hpt(dv)]))
        .collect();
    'p1b: for (e, &[a, b]) in skel.edges().iter().enumerate() {
        let (pa, pb) = (inst.hpoint(a as usize), inst.hpoint(b as usize));
        for dv in 0..xstar.vertex_count() {
            if !image_boxes[e].overlaps(&dual_vertex_boxes[dv]) {
                continue;
            }
            if exact::on_segment(xstar.hpt(dv), pa, pb)
                && ck.record(Violation::DualVertexOnImage { dual_vertex: dv, edge: e }) {
                    break 'p1b;
                }
        }
    }
    if ck.done_early() {
        return finish(ck);
    }

    // property 2: unique containing triangle per placed point, no foreigners
    for v in 0..n {
        let p = inst.hpoint(v);
        let pb = &point_boxes[v];
        let mut strict_hit: Option<u32> = None;
        let mut hits = 0usize;
        for (t, &[a, b, c]) in xstar.triangles().iter().enumerate() {
            if !pb.overlaps(&dual_tri_boxes[t]) {
                continue;
            }
            if exact::strictly_in_triangle(
                p,
                xstar.hpt(a as usize),
                xstar.hpt(b as usize),
                xstar.hpt(c as usize),
            ) {
                hits += 1;
                strict_hit = Some(t as u32);
            }
        }
        if hits != 1 {
            if ck.record(Violation::NoContainingTriangle { vertex: v, hits }) {
                return finish(ck);
            }
            continue;
        }
        let t = strict_hit.unwrap();
        ck.core_triangle[v] = Some(t);
        let [a, b, c] = xstar.triangles()[t as usize];
        for u in 0..n {
            if u != v
                && exact::in_closed_triangle(
                    inst.hpoint(u),
                    xstar.hpt(a as usize),
                    xstar.hpt(b as usize),
                    xstar.hpt(c as usize),
                )
                && ck.record(Violation::ForeignPoint { vertex: v, other: u }) {
                    return finish(ck);
                }
        }
    }
    if ck.done_early() {
        return finish(ck);
    }

    // properties 3 and 8: images against dual triangles
    'p38: for (e, &[a, b]) in skel.edges().iter().enumerate() {
        let (pa, pb) = (inst.hpoint(a as usize), inst.hpoint(b as usize));
        for t in 0..xstar.triangle_count() {
            if !image_boxes[e].overlaps(&dual_tri_boxes[t]) {
                continue;
            }
            let [ta, tb, tc] = xstar.triangles()[t];
            let (qa, qb, qc) = (
                xstar.hpt(ta as usize),
                xstar.hpt(tb as usize),
                xstar.hpt(tc as usize),
            );
            let crossings = [(qa, qb), (qb, qc), (qc, qa)]
                .iter()
                .filter(|(x, y)| exact::segments_intersect(pa, pb, x, y))
                .count();
            if crossings > 2
                && ck.record(Violation::ImageCrossings {
                    property: 8,
                    edge: e,
                    dual_triangle: t,
                    crossings,
                }) {
                    break 'p38;
                }
            let ina = exact::strictly_in_triangle(pa, qa, qb, qc);
            let inb = exact::strictly_in_triangle(pb, qa, qb, qc);
            if ina != inb && crossings != 1
                && ck.record(Violation::ImageCrossings {
                    property: 3,
                    edge: e,
                    dual_triangle: t,
                    crossings,
                }) {
                    break 'p38;
                }
        }
    }
    if ck.done_early() {
        return finish(ck);
    }

    // properties 4, 6 and 7: dual edges against the images
    let image_tri_boxes: Vec<IBox> = skel
        .triangles()
        .iter()
        .map(|&[a, b, c]| {
            ibox(&[
                inst.hpoint(a as usize),
                inst.hpoint(b as usize),
                inst.hpoint(c as usize),
            ])
        })
        .collect();
    'p467: for de in 0..xstar.edge_count() {
        if !dual_edge_boxes[de].overlaps(&hull_box) {
            continue;
        }
        let [da, db] = xstar.edges()[de];
        let (ea, eb) = (xstar.hpt(da as usize), xstar.hpt(db as usize));

        // which image segments does this dual edge meet?
        let mut met: Vec<usize> = Vec::new();
        for (e, &[a, b]) in skel.edges().iter().enumerate() {
            if !dual_edge_boxes[de].overlaps(&image_boxes[e]) {
                continue;
            }
            if exact::segments_intersect(
                ea,
                eb,
                inst.hpoint(a as usize),
                inst.hpoint(b as usize),
            ) {
                met.push(e);
            }
        }

        // property 7 at每 vertex: at most one incident image met unless the
        // dual edge lies inside t*_v
        for v in 0..n {
            let at_v: Vec<usize> = met
                .iter()
                .copied()
                .filter(|&e| skel.edges()[e].contains(&(v as u32)))
                .collect();
            if at_v.len() >= 2 {
                let inside_core = ck.core_triangle[v].is_some_and(|t| {
                    let [ta, tb, tc] = xstar.triangles()[t as usize];
                    let (qa, qb, qc) = (
                        xstar.hpt(ta as usize),
                        xstar.hpt(tb as usize),
                        xstar.hpt(tc as usize),
                    );
                    exact::in_closed_triangle(ea, qa, qb, qc)
                        && exact::in_closed_triangle(eb, qa, qb, qc)
                });
                if !inside_core
                    && ck.record(Violation::TwoImagesAtVertex {
                        vertex: v,
                        dual_edge: de,
                        edge_a: at_v[0],
                        edge_b: at_v[1],
                    }) {
                        break 'p467;
                    }
            }
        }

        // properties 4 and 6 against every image triangle
        for (t, &[a, b, c]) in skel.triangles().iter().enumerate() {
            if !dual_edge_boxes[de].overlaps(&image_tri_boxes[t]) {
                continue;
            }
            let (pa, pb, pc) = (
                inst.hpoint(a as usize),
                inst.hpoint(b as usize),
                inst.hpoint(c as usize),
            );
            let e_ab = skel.edge_index(a as usize, b as usize);
            let e_ac = skel.edge_index(a as usize, c as usize);
            let e_bc = skel.edge_index(b as usize, c as usize);
            let crossings = [e_ab, e_ac, e_bc]
                .iter()
                .filter(|e| met.contains(e))
                .count();
            let ina = exact::strictly_in_triangle(ea, pa, pb, pc);
            let inb = exact::strictly_in_triangle(eb, pa, pb, pc);
            if ina != inb {
                if crossings != 1
                    && ck.record(Violation::DualEdgeCrossings {
                        property: 4,
                        dual_edge: de,
                        triangle: t,
                        crossings,
                    }) {
                        break 'p467;
                    }
            } else if crossings > 2
                && ck.record(Violation::DualEdgeCrossings {
                    property: 6,
                    dual_edge: de,
                    triangle: t,
                    crossings,
                }) {
                    break 'p467;
                }
        }
    }
    if ck.done_early() {
        return finish(ck);
    }

    // property 5: non-incident images keep clear of t*_v
    'p5: for v in 0..n {
        let Some(t) = ck.core_triangle[v] else {
            continue;
        };
        let [ta, tb, tc] = xstar.triangles()[t as usize];
        let (qa, qb, qc) = (
            xstar.hpt(ta as usize),
            xstar.hpt(tb as usize),
            xstar.hpt(tc as usize),
        );
        for (e, &[a, b]) in skel.edges().iter().enumerate() {
            if skel.edges()[e].contains(&(v as u32)) {
                continue;
            }
            if exact::segment_meets_triangle(
                inst.hpoint(a as usize),
                inst.hpoint(b as usize),
                qa,
                qb,
                qc,
            )
                && ck.record(Violation::ImageTouchesCore { vertex: v, edge: e }) {
                    break 'p5;
                }
        }
    }

    finish(ck)
}

fn finish(ck: Checker) -> WellBehavedCertificate {
    WellBehavedCertificate {
        pass: ck.pass,
        witnesses: ck.witnesses,
        core_triangle: ck.core_triangle,
    }
}

/// Halves the mesh scale and reseeds, up to twelve rounds, until the
/// validator passes. The instance must already be scaled into the half ball.
pub fn refine_until_valid(
    inst: &AffineInstance,
    seed: u64,
) -> Result<(DualTriangulation, WellBehavedCertificate), RefinementExhausted> {
    refine_from(inst, seed, ratio(1, 4))
}

/// As [`refine_until_valid`] but with a caller-chosen starting mesh scale.
pub fn refine_from(
    inst: &AffineInstance,
    seed: u64,
    start_mesh: crate::rational::Rational,
) -> Result<(DualTriangulation, WellBehavedCertificate), RefinementExhausted> {
    const ROUNDS: usize = 12;
    let mut failures = Vec::new();
    let mut mesh = start_mesh;
    for round in 0..ROUNDS {
        let round_seed = seed
            .wrapping_mul(0x9E37_79B9_7F4A_7C15)
            .wrapping_add(round as u64);
        match build_triangulation(inst, &mesh, round_seed) {
            Err(err) => failures.push(format!("round {round}: {err}")),
            Ok(xstar) => {
                let fast = validate(inst, &xstar, true);
                if fast.valid() {
                    let full = validate(inst, &xstar, false);
                    debug_assert!(full.valid());
                    return Ok((xstar, full));
                }
                let first = fast
                    .witnesses
                    .first()
                    .map(|w| format!("{w:?}"))
                    .unwrap_or_else(|| "unknown".into());
                failures.push(format!(
                    "round {round}: property {} failed: {first}",
                    fast.witnesses
                        .first()
                        .map(|w| w.property().0)
                        .unwrap_or_default()
                ));
            }
        }
        mesh /= ratio(2, 1);
    }
    Err(RefinementExhausted {
        rounds: ROUNDS,
        failures,
    })
}
