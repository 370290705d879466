//! Certified overlap points: where many triangles of an instance meet.
//!
//! The depth of a query point is the set of closed triangles containing it.
//! Closed containment makes depth upper semicontinuous, so its maximum over
//! the plane is attained at a candidate point: a placed vertex or a proper
//! crossing of two placed segments. The search therefore scans exactly that
//! finite candidate set; nothing else can beat it.
//!
//! Certified bounds (exact rational comparisons, no tolerance):
//!
//! * uniform weights: `count >= (2/9 - 3/n) * C(n,3)`,
//! * any vertex distribution `p`: `weighted >= 1/13 - 3/(13(n-1))`.
//!
//! Per-candidate depth is not counted triangle by triangle; an angular sweep
//! around the query point counts the complementary "avoiding" triples (those
//! inside an open half-plane) in `O(n log n)` exact operations, together with
//! per-vertex incidence counts that give the weighted depth. The returned
//! certificate is recomputed by the brute-force route, so the two independent
//! counting paths check each other on every call.

use crate::complex::Chain2;
use crate::geom::exact::{self, HPt, HVec};
use crate::geom::{AffineInstance, RationalPoint};
use crate::rational::{binomial, ratio, Rational};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Exact evidence that a point is covered by a specific set of triangles.
#[derive(Clone, Debug)]
pub struct DepthCertificate {
    pub point: RationalPoint,
    /// The triangles whose closed image contains the point.
    pub covering: Chain2,
    pub count: usize,
    /// Total extended weight of the covering set.
    pub weighted: Rational,
}

/// `1/13 - 3/(13(n-1))`: the weighted overlap guarantee.
pub fn weighted_overlap_bound(n: usize) -> Rational {
    ratio(1, 13) - ratio(3, 13 * (n as i64 - 1))
}

/// `(2/9 - 3/n) * C(n,3)`: the uniform count guarantee.
pub fn uniform_count_bound(n: usize) -> Rational {
    (ratio(2, 9) - ratio(3, n as i64)) * Rational::from_integer(binomial(n, 3))
}

/// All overlap candidates: placed vertices plus every proper crossing of two
/// disjoint placed segments, deduplicated and sorted lexicographically.
pub fn candidate_points(inst: &AffineInstance) -> Vec<RationalPoint> {
    candidates_h(inst)
        .iter()
        .map(|h| RationalPoint::new(h.x(), h.y()))
        .collect()
}

pub(crate) fn candidates_h(inst: &AffineInstance) -> Vec<HPt> {
    let skel = inst.skeleton();
    let pts = inst.hpoints();
    let mut out: Vec<HPt> = pts.to_vec();
    let edges = skel.edges();
    for (i, &[a, b]) in edges.iter().enumerate() {
        for &[c, d] in &edges[i + 1..] {
            if a == c || a == d || b == c || b == d {
                continue; // segments sharing a vertex only meet there
            }
            let (pa, pb) = (&pts[a as usize], &pts[b as usize]);
            let (pc, pd) = (&pts[c as usize], &pts[d as usize]);
            if exact::segments_cross_properly(pa, pb, pc, pd) {
                let q = exact::line_intersection(pa, pb, pc, pd)
                    .expect("properly crossing segments are not parallel");
                out.push(q);
            }
        }
    }
    out.sort_by(exact::cmp_lex);
    out.dedup_by(|a, b| exact::points_equal(a, b));
    out
}

/// Brute-force depth: tests the query against every closed triangle.
pub fn depth_at(inst: &AffineInstance, q: &RationalPoint) -> DepthCertificate {
    let skel = inst.skeleton();
    let pts = inst.hpoints();
    let hq = q.to_hpt();
    let mut covering = skel.zero_chain2();
    for (t, &[a, b, c]) in skel.triangles().iter().enumerate() {
        if exact::in_closed_triangle(&hq, &pts[a as usize], &pts[b as usize], &pts[c as usize]) {
            covering.set(t, true);
        }
    }
    let count = covering.count();
    let weighted = inst.distribution().chain2_weight(skel, &covering);
    DepthCertificate {
        point: q.clone(),
        covering,
        count,
        weighted,
    }
}

/// Per-vertex incidence counts of the covering set at `q`: `m[v]` is the
/// number of covering triangles with `v` as a vertex, computed by the angular
/// sweep without enumerating triangles.
fn sweep_counts(pts: &[HPt], q: &HPt) -> (u64, Vec<u64>) {
    let n = pts.len();
    let mut at_q: Option<usize> = None;
    let mut dirs: Vec<(usize, HVec)> = Vec::with_capacity(n);
    for (i, p) in pts.iter().enumerate() {
        let d = exact::direction(q, p);
        if d.is_zero() {
            debug_assert!(at_q.is_none(), "coincident instance points");
            at_q = Some(i);
        } else {
            dirs.push((i, d));
        }
    }
    dirs.sort_by(|(ia, da), (ib, db)| exact::cmp_angle(da, db).then(ia.cmp(ib)));
    let m = dirs.len();

    // h[i]: points strictly within the open half-turn after i, plus
    // same-direction points later in the tie order. Each open-half-plane
    // triple is counted once, led by its angularly first member.
    let in_range = |i: usize, j: usize| -> bool {
        let (ia, da) = &dirs[i];
        let (ib, db) = &dirs[j];
        match exact::cross_sign(da, db) {
            1 => true,
            0 => exact::dot_sign(da, db) > 0 && ib > ia,
            _ => false,
        }
    };
    let mut h = vec![0u64; m];
    for i in 0..m {
        for j in 0..m {
            if i != j && in_range(i, j) {
                h[i] += 1;
            }
        }
    }
    let avoiding: u64 = h.iter().map(|&k| k * k.saturating_sub(1) / 2).sum();

    // avoiding triples through each vertex: lead C(h,2) of your own, and
    // h_u - 1 for every leader u whose range contains you
    let mut avoid_v = vec![0u64; n];
    for i in 0..m {
        avoid_v[dirs[i].0] += h[i] * h[i].saturating_sub(1) / 2;
        if h[i] > 0 {
            for j in 0..m {
                if i != j && in_range(i, j) {
                    avoid_v[dirs[j].0] += h[i] - 1;
                }
            }
        }
    }
    debug_assert_eq!(avoid_v.iter().sum::<u64>(), 3 * avoiding);

    let c2 = |k: u64| k.saturating_sub(1) * k / 2;
    let c3 = |k: u64| {
        if k < 3 {
            0
        } else {
            k * (k - 1) * (k - 2) / 6
        }
    };
    let nn = n as u64;
    let mut covered = vec![0u64; n];
    let count;
    match at_q {
        Some(z) => {
            count = c2(nn - 1) + c3(nn - 1) - avoiding;
            for (v, cov) in covered.iter_mut().enumerate() {
                if v == z {
                    *cov = c2(nn - 1);
                } else {
                    *cov = (nn - 2) + c2(nn - 2) - avoid_v[v];
                }
            }
        }
        None => {
            count = c3(nn) - avoiding;
            for (v, cov) in covered.iter_mut().enumerate() {
                *cov = c2(nn - 1) - avoid_v[v];
            }
        }
    }
    debug_assert_eq!(covered.iter().sum::<u64>(), 3 * count);
    (count, covered)
}

/// Scaled integer vertex weights sharing one denominator, for exact
/// depth-score comparison without per-candidate rational arithmetic.
struct ScaledWeights {
    nums: Vec<BigInt>,
    denom: BigInt,
}

impl ScaledWeights {
    fn new(inst: &AffineInstance) -> Self {
        let mut denom = BigInt::one();
        for w in inst.distribution().weights() {
            denom = denom.lcm(w.denom());
        }
        let nums = inst
            .distribution()
            .weights()
            .iter()
            .map(|w| w.numer() * (&denom / w.denom()))
            .collect();
        ScaledWeights { nums, denom }
    }

    fn score(&self, covered: &[u64]) -> BigInt {
        let mut acc = BigInt::zero();
        for (w, &m) in self.nums.iter().zip(covered) {
            if m != 0 {
                acc += w * BigInt::from(m);
            }
        }
        acc
    }

    /// Converts a score back into the weighted depth.
    fn weighted(&self, score: &BigInt, n: usize) -> Rational {
        Rational::new(score.clone(), &self.denom * binomial(n - 1, 2))
    }
}

/// Finds the candidate of maximum weighted depth (ties: higher count, then
/// lexicographically smallest point) and certifies the overlap bounds on it.
///
/// Panics if a certified bound fails: the bounds are theorems for every
/// generic instance, so a violation means a defect in this library, not in
/// the input.
pub fn find_overlap_point(inst: &AffineInstance) -> DepthCertificate {
    let n = inst.n();
    let cands = candidates_h(inst);
    let weights = ScaledWeights::new(inst);
    let pts = inst.hpoints();

    let eval = |idx: usize| -> (BigInt, u64, usize) {
        let (count, covered) = sweep_counts(pts, &cands[idx]);
        (weights.score(&covered), count, idx)
    };
    // ties resolve toward the lexicographically smaller point, so the
    // reduction is order-independent and safe to run in parallel
    let better = |a: &(BigInt, u64, usize), b: &(BigInt, u64, usize)| -> bool {
        match (a.0.cmp(&b.0), a.1.cmp(&b.1)) {
            (std::cmp::Ordering::Greater, _) => true,
            (std::cmp::Ordering::Less, _) => false,
            (_, std::cmp::Ordering::Greater) => true,
            (_, std::cmp::Ordering::Less) => false,
            _ => exact::cmp_lex(&cands[a.2], &cands[b.2]) == std::cmp::Ordering::Less,
        }
    };

    #[cfg(feature = "parallel")]
    let best = (0..cands.len())
        .into_par_iter()
        .map(eval)
        .reduce_with(|a, b| if better(&a, &b) { a } else { b })
        .expect("candidate set is nonempty");
    #[cfg(not(feature = "parallel"))]
    let best = (0..cands.len())
        .map(eval)
        .reduce(|a, b| if better(&a, &b) { a } else { b })
        .expect("candidate set is nonempty");

    let (score, fast_count, idx) = best;
    let point = RationalPoint::new(cands[idx].x(), cands[idx].y());
    let cert = depth_at(inst, &point);
    assert_eq!(
        cert.count as u64, fast_count,
        "sweep count disagrees with brute-force covering at {point}"
    );
    assert_eq!(
        cert.weighted,
        weights.weighted(&score, n),
        "sweep weight disagrees with brute-force covering at {point}"
    );

    assert!(
        cert.weighted >= weighted_overlap_bound(n),
        "weighted overlap bound violated at n={n}: depth {} < bound {}",
        cert.weighted,
        weighted_overlap_bound(n)
    );
    if inst.distribution().is_uniform() {
        let count = Rational::from_integer(BigInt::from(cert.count));
        assert!(
            count >= uniform_count_bound(n),
            "uniform overlap bound violated at n={n}: count {} < bound {}",
            cert.count,
            uniform_count_bound(n)
        );
    }
    cert
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::{random_instance, DistributionMode};
    use crate::rational::rat_int;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn unit_square() -> AffineInstance {
        AffineInstance::uniform(vec![
            RationalPoint::from_ints(0, 0),
            RationalPoint::from_ints(1, 0),
            RationalPoint::from_ints(1, 1),
            RationalPoint::from_ints(0, 1),
        ])
        .unwrap()
    }

    #[test]
    fn triangle_candidates_are_vertices() {
        let inst = AffineInstance::uniform(vec![
            RationalPoint::from_ints(0, 0),
            RationalPoint::from_ints(4, 0),
            RationalPoint::from_ints(0, 4),
        ])
        .unwrap();
        assert_eq!(candidate_points(&inst).len(), 3);
        let cert = find_overlap_point(&inst);
        assert_eq!(cert.count, 1);
        assert_eq!(cert.weighted, rat_int(1));
    }

    #[test]
    fn square_candidates_include_center() {
        let inst = unit_square();
        let cands = candidate_points(&inst);
        assert_eq!(cands.len(), 5, "4 vertices + 1 diagonal crossing");
        assert!(cands.contains(&RationalPoint::new(ratio(1, 2), ratio(1, 2))));
    }

    #[test]
    fn square_center_depth() {
        let inst = unit_square();
        let center = RationalPoint::new(ratio(1, 2), ratio(1, 2));
        let cert = depth_at(&inst, &center);
        assert_eq!(cert.count, 4, "center lies on the boundary of all 4 triangles");
        assert_eq!(cert.weighted, rat_int(1));
        let best = find_overlap_point(&inst);
        assert_eq!(best.point, center);
        assert_eq!(best.count, 4);
    }

    #[test]
    fn sweep_matches_brute_force_on_random_instances() {
        for seed in 0..6u64 {
            let inst = random_instance(7, seed, DistributionMode::RandomRational);
            let weights = ScaledWeights::new(&inst);
            for q in candidates_h(&inst) {
                let (count, covered) = sweep_counts(inst.hpoints(), &q);
                let cert = depth_at(&inst, &RationalPoint::new(q.x(), q.y()));
                assert_eq!(count, cert.count as u64);
                assert_eq!(weights.weighted(&weights.score(&covered), inst.n()), cert.weighted);
            }
        }
    }

    #[test]
    fn sweep_matches_brute_force_at_random_probes() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for seed in 0..4u64 {
            let inst = random_instance(8, seed, DistributionMode::Uniform);
            for _ in 0..250 {
                let q = RationalPoint::new(
                    ratio(rng.gen_range(-100..1100), rng.gen_range(1..8)),
                    ratio(rng.gen_range(-100..1100), rng.gen_range(1..8)),
                );
                let (count, _) = sweep_counts(inst.hpoints(), &q.to_hpt());
                assert_eq!(count, depth_at(&inst, &q).count as u64);
            }
        }
    }

    #[test]
    fn max_depth_beats_every_candidate_and_probe() {
        let inst = random_instance(9, 11, DistributionMode::RandomRational);
        let best = find_overlap_point(&inst);
        for c in candidate_points(&inst) {
            assert!(depth_at(&inst, &c).weighted <= best.weighted);
        }
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..500 {
            let q = RationalPoint::new(
                ratio(rng.gen_range(-2048..2048), 2),
                ratio(rng.gen_range(-2048..2048), 2),
            );
            assert!(depth_at(&inst, &q).weighted <= best.weighted);
        }
    }

    #[test]
    fn overlap_bounds_hold_on_random_instances() {
        for seed in 0..5u64 {
            // find_overlap_point asserts both bounds internally
            find_overlap_point(&random_instance(14, seed, DistributionMode::Uniform));
            find_overlap_point(&random_instance(9, seed, DistributionMode::RandomRational));
        }
    }
}
