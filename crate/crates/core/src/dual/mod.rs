//! Dual triangulations of the unit ball and the folding-map machinery.
//!
//! The instance is scaled into the half ball, a triangulation of the unit
//! ball is built around it, and an eight-property validator certifies that
//! the triangulation is well behaved with respect to the placed images. On a
//! validated triangulation the intersection map satisfies exact duality
//! identities, the images' fundamental class sums to the all-ones vertex
//! vector, and the folding construction always terminates with an odd number
//! of defective dual triangles; that odd count is the combinatorial shadow of
//! the overlap theorem.

mod build;
mod folding;
mod intersect;
mod validate;

pub use build::{build_triangulation, BuildError};
pub use folding::{construct_folding_attempt, FoldingAttempt, FoldingError, WeightReport};
pub use intersect::{
    check_duality, fundamental_class_check, intersection_map, DualityReport, IntersectionMap,
};
pub use validate::{
    refine_from, refine_until_valid, validate_well_behaved, PropertyId, RefinementExhausted,
    Violation, WellBehavedCertificate,
};

use crate::geom::exact::{self, HPt};
use crate::geom::{AffineInstance, RationalPoint};
use crate::rational::{ratio, Rational};
use num_traits::Signed;

/// Sentinel for "no second coface" on boundary edges.
pub const NO_TRIANGLE: u32 = u32::MAX;

/// A geometric triangulation of (a polygonal approximation of) the unit ball,
/// with per-simplex half-ball flags and a designated base vertex outside the
/// half ball.
#[derive(Clone, Debug)]
pub struct DualTriangulation {
    points: Vec<RationalPoint>,
    hpts: Vec<HPt>,
    /// Vertex pairs `(a, b)` with `a < b`.
    edges: Vec<[u32; 2]>,
    /// Vertex triples, counterclockwise.
    triangles: Vec<[u32; 3]>,
    /// Edge ids of each triangle.
    tri_edges: Vec<[u32; 3]>,
    /// One or two incident triangles per edge (`NO_TRIANGLE` when boundary).
    edge_tris: Vec<[u32; 2]>,
    vertex_in_half_ball: Vec<bool>,
    edge_meets_half_ball: Vec<bool>,
    tri_meets_half_ball: Vec<bool>,
    /// Lexicographically smallest vertex outside the half ball.
    base_vertex: u32,
    mesh: Rational,
    seed: u64,
}

impl DualTriangulation {
    pub fn vertex_count(&self) -> usize {
        self.points.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn triangle_count(&self) -> usize {
        self.triangles.len()
    }

    pub fn point(&self, v: usize) -> &RationalPoint {
        &self.points[v]
    }

    pub fn hpt(&self, v: usize) -> &HPt {
        &self.hpts[v]
    }

    pub fn edges(&self) -> &[[u32; 2]] {
        &self.edges
    }

    pub fn triangles(&self) -> &[[u32; 3]] {
        &self.triangles
    }

    pub fn triangle_edges(&self, t: usize) -> [u32; 3] {
        self.tri_edges[t]
    }

    pub fn edge_triangles(&self, e: usize) -> [u32; 2] {
        self.edge_tris[e]
    }

    pub fn is_boundary_edge(&self, e: usize) -> bool {
        self.edge_tris[e][1] == NO_TRIANGLE
    }

    /// True if the vertex lies in the closed half ball `B/2`.
    pub fn vertex_in_half_ball(&self, v: usize) -> bool {
        self.vertex_in_half_ball[v]
    }

    /// True if the closed edge segment meets the closed half ball.
    pub fn edge_meets_half_ball(&self, e: usize) -> bool {
        self.edge_meets_half_ball[e]
    }

    /// True if the closed triangle region meets the closed half ball.
    pub fn triangle_meets_half_ball(&self, t: usize) -> bool {
        self.tri_meets_half_ball[t]
    }

    /// The designated vertex `u*` outside the half ball, used as the endpoint
    /// of every folding path.
    pub fn base_vertex(&self) -> u32 {
        self.base_vertex
    }

    pub fn mesh(&self) -> &Rational {
        &self.mesh
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Line-oriented text export: a header with the three simplex counts,
    /// then vertex, edge and triangle lines with exact `num/den` rationals.
    pub fn write_text<W: std::io::Write>(&self, out: &mut W) -> std::io::Result<()> {
        writeln!(
            out,
            "{} {} {}",
            self.points.len(),
            self.edges.len(),
            self.triangles.len()
        )?;
        for (i, p) in self.points.iter().enumerate() {
            writeln!(
                out,
                "{} {} {}",
                i,
                crate::rational::format_rational(&p.x),
                crate::rational::format_rational(&p.y)
            )?;
        }
        for (i, [a, b]) in self.edges.iter().enumerate() {
            writeln!(out, "{} {} {}", i, a, b)?;
        }
        for (i, [e1, e2, e3]) in self.tri_edges.iter().enumerate() {
            writeln!(out, "{} {} {} {}", i, e1, e2, e3)?;
        }
        Ok(())
    }
}

/// Exact similarity taking the instance strictly inside the ball of radius
/// `1/4` about the origin (hence strictly inside the half ball). An instance
/// that already fits is returned unchanged, translation and all.
pub fn scale_into_half_ball(inst: &AffineInstance) -> AffineInstance {
    let quarter2 = ratio(1, 16);
    let inside = inst
        .hpoints()
        .iter()
        .all(|p| exact::dist2_origin(p) <= quarter2);
    if inside {
        return inst.clone();
    }
    let xs: Vec<&Rational> = inst.points().iter().map(|p| &p.x).collect();
    let ys: Vec<&Rational> = inst.points().iter().map(|p| &p.y).collect();
    let (min_x, max_x) = (
        (*xs.iter().min().unwrap()).clone(),
        (*xs.iter().max().unwrap()).clone(),
    );
    let (min_y, max_y) = (
        (*ys.iter().min().unwrap()).clone(),
        (*ys.iter().max().unwrap()).clone(),
    );
    let center = RationalPoint::new(
        (min_x + max_x) / ratio(2, 1),
        (min_y + max_y) / ratio(2, 1),
    );
    let radius_l1 = inst
        .points()
        .iter()
        .map(|p| {
            let dx = (&p.x - &center.x).abs();
            let dy = (&p.y - &center.y).abs();
            dx + dy
        })
        .max()
        .expect("instance has points");
    // |.|_2 <= |.|_1, so an L1 radius of 15/64 puts every point strictly
    // inside the 1/4 ball
    let scale = ratio(15, 64) / radius_l1;
    inst.similarity(&center, &scale)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::{random_instance, DistributionMode};
    use crate::overlap;

    #[test]
    fn scaling_is_identity_when_already_small() {
        let inst = AffineInstance::uniform(vec![
            RationalPoint::new(ratio(1, 100), ratio(1, 100)),
            RationalPoint::new(ratio(-1, 50), ratio(1, 64)),
            RationalPoint::new(ratio(1, 32), ratio(-1, 40)),
        ])
        .unwrap();
        let scaled = scale_into_half_ball(&inst);
        assert_eq!(scaled.points(), inst.points());
    }

    #[test]
    fn scaling_lands_strictly_inside_quarter_ball() {
        let inst = random_instance(7, 5, DistributionMode::Uniform);
        let scaled = scale_into_half_ball(&inst);
        let bound = ratio(1, 16);
        for p in scaled.hpoints() {
            assert!(exact::dist2_origin(p) < bound);
        }
    }

    #[test]
    fn scaling_preserves_depth_certificates() {
        let inst = random_instance(6, 9, DistributionMode::RandomRational);
        let before = overlap::find_overlap_point(&inst);
        let scaled = scale_into_half_ball(&inst);
        let after = overlap::find_overlap_point(&scaled);
        assert_eq!(before.count, after.count);
        assert_eq!(before.weighted, after.weighted);
        assert_eq!(before.covering, after.covering);
    }
}
