//! The intersection map between a triangulation and the placed images, and
//! its exact duality identities.
//!
//! For a dual vertex, edge, or triangle the map records which image
//! triangles contain it, which image segments it meets, and which placed
//! points it contains. On a well-behaved triangulation two identities hold
//! simplex by simplex:
//!
//! ```text
//! i(v*) + i(u*)            = δ i(e*)    for every dual edge e* = {v*, u*}
//! i(e*1) + i(e*2) + i(e*3) = δ i(t*)    for every dual triangle t*
//! ```
//!
//! and the images' fundamental class `Σ_{t*} i(t*)` is the all-ones vertex
//! vector: every placed point lies in exactly one dual triangle.

use super::DualTriangulation;
use crate::complex::{Chain0, Chain1, Chain2};
use crate::geom::exact::{self};
use crate::geom::AffineInstance;
use crate::rational::ratio;

/// The three graded layers of the intersection map.
#[derive(Clone, Debug)]
pub struct IntersectionMap {
    /// Per dual vertex: the image triangles containing it.
    pub i0: Vec<Chain2>,
    /// Per dual edge: the image segments it meets.
    pub i1: Vec<Chain1>,
    /// Per dual triangle: the placed points it contains.
    pub i2: Vec<Chain0>,
}

/// Counterexamples found by [`check_duality`]; empty on a validated mesh.
#[derive(Clone, Debug, Default)]
pub struct DualityReport {
    pub edge_failures: Vec<u32>,
    pub triangle_failures: Vec<u32>,
}

impl DualityReport {
    pub fn ok(&self) -> bool {
        self.edge_failures.is_empty() && self.triangle_failures.is_empty()
    }
}

/// Computes all three layers with exact predicates.
pub fn intersection_map(inst: &AffineInstance, xstar: &DualTriangulation) -> IntersectionMap {
    let skel = inst.skeleton();
    let quarter = ratio(1, 16); // squared radius of the 1/4 ball
    // everything placed lives strictly inside the 1/4 ball, so dual vertices
    // farther than that see nothing
    let i0: Vec<Chain2> = (0..xstar.vertex_count())
        .map(|dv| {
            let p = xstar.hpt(dv);
            let mut chain = skel.zero_chain2();
            if exact::dist2_origin(p) < quarter {
                for (t, &[a, b, c]) in skel.triangles().iter().enumerate() {
                    if exact::in_closed_triangle(
                        p,
                        inst.hpoint(a as usize),
                        inst.hpoint(b as usize),
                        inst.hpoint(c as usize),
                    ) {
                        chain.set(t, true);
                    }
                }
            }
            chain
        })
        .collect();

    let i1: Vec<Chain1> = xstar
        .edges()
        .iter()
        .map(|&[da, db]| {
            let mut chain = skel.zero_chain1();
            // images live strictly inside the 1/4 ball and dual edges are
            // far shorter than 1/4, so an edge meeting an image has an
            // endpoint inside the half ball
            if xstar.vertex_in_half_ball(da as usize) || xstar.vertex_in_half_ball(db as usize) {
                let (ea, eb) = (xstar.hpt(da as usize), xstar.hpt(db as usize));
                for (e, &[a, b]) in skel.edges().iter().enumerate() {
                    if exact::segments_intersect(
                        ea,
                        eb,
                        inst.hpoint(a as usize),
                        inst.hpoint(b as usize),
                    ) {
                        chain.set(e, true);
                    }
                }
            }
            chain
        })
        .collect();

    let mut i2: Vec<Chain0> = (0..xstar.triangle_count())
        .map(|_| skel.zero_chain0())
        .collect();
    for v in 0..inst.n() {
        let p = inst.hpoint(v);
        for (t, &[a, b, c]) in xstar.triangles().iter().enumerate() {
            if exact::in_closed_triangle(
                p,
                xstar.hpt(a as usize),
                xstar.hpt(b as usize),
                xstar.hpt(c as usize),
            ) {
                i2[t].set(v, true);
            }
        }
    }

    IntersectionMap { i0, i1, i2 }
}

/// Verifies both duality identities for every dual simplex.
pub fn check_duality(
    inst: &AffineInstance,
    xstar: &DualTriangulation,
    imap: &IntersectionMap,
) -> DualityReport {
    let skel = inst.skeleton();
    let mut report = DualityReport::default();
    for (e, &[da, db]) in xstar.edges().iter().enumerate() {
        let mut lhs = imap.i0[da as usize].clone();
        lhs.add_assign(&imap.i0[db as usize]);
        let rhs = skel.coboundary1(&imap.i1[e]);
        if lhs != rhs {
            report.edge_failures.push(e as u32);
        }
    }
    for t in 0..xstar.triangle_count() {
        let [e1, e2, e3] = xstar.triangle_edges(t);
        let mut lhs = imap.i1[e1 as usize].clone();
        lhs.add_assign(&imap.i1[e2 as usize]);
        lhs.add_assign(&imap.i1[e3 as usize]);
        let rhs = skel.coboundary0(&imap.i2[t]);
        if lhs != rhs {
            report.triangle_failures.push(t as u32);
        }
    }
    report
}

/// True iff the sum of `i(t*)` over all dual triangles is the all-ones
/// vertex vector.
pub fn fundamental_class_check(inst: &AffineInstance, imap: &IntersectionMap) -> bool {
    let skel = inst.skeleton();
    let mut total = skel.zero_chain0();
    for chain in &imap.i2 {
        total.add_assign(chain);
    }
    total == skel.full_chain0()
}
