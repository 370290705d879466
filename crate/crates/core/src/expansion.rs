//! Constructive coboundary expansion.
//!
//! Each reduction replaces a cochain by a lighter representative of the same
//! coboundary class. Vertex chains reduce by complementation: `δU = δ(V∖U)`,
//! and whichever side has weight at most `1/2` satisfies
//! `p(U₀) < p(δU)` whenever `U ∉ {∅, V}`. Edge chains reduce by adding the
//! cut of a neighborhood: for `N_v = {u : {v,u} ∈ F}` the correction `δN_v`
//! cancels every edge of `F` at `v`, and averaging over `v` yields a choice
//! with
//!
//! ```text
//! p(F + δN_v) <= 3(n-2) p(δF) / (2n)   ( < (3/2) p(δF) )
//! ```
//!
//! Degenerate inputs (`U ∈ {∅, V}`, `F` a cocycle) reduce to the zero chain,
//! where the strict forms are vacuous.

use crate::complex::{Chain0, Chain1, Skeleton, VertexDistribution};
use crate::rational::Rational;
use num_traits::Zero;

/// A weight-reduced representative of a vertex cochain class.
#[derive(Clone, Debug)]
pub struct VertexReduction {
    /// `U₀ ∈ {U, V∖U}` with `p(U₀) <= 1/2` (ties prefer `U`).
    pub u0: Chain0,
    /// `p(U₀)`.
    pub weight: Rational,
    /// `p(δU)`, the weight of the shared coboundary.
    pub boundary_weight: Rational,
}

/// A weight-reduced representative of an edge cochain class.
#[derive(Clone, Debug)]
pub struct EdgeReduction {
    /// `F₀ = F + δN_v` for the minimizing vertex `v`.
    pub f0: Chain1,
    /// The vertex whose neighborhood cut was added (smallest on ties).
    pub chosen_vertex: usize,
    /// `p(F₀)`.
    pub weight: Rational,
    /// `p(δF)`.
    pub boundary_weight: Rational,
}

/// Counting form of the vertex reduction: `|δU| = |U₀| (n - |U₀|)`.
#[derive(Clone, Debug)]
pub struct UniformVertexReduction {
    pub u0: Chain0,
    pub size: usize,
    pub boundary_size: usize,
}

/// Result of the exhaustive-coset edge checker.
#[derive(Clone, Debug)]
pub struct CosetMinimum {
    /// The smallest chain in the coset `F + {cuts}`.
    pub f0: Chain1,
    /// `|F₀| / max(1, |δF|)`, always at most 3.
    pub ratio: Rational,
    pub boundary_size: usize,
}

/// Error from the exhaustive checker when the skeleton is too large.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct TooLarge {
    pub n: usize,
    pub limit: usize,
}

impl std::fmt::Display for TooLarge {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "exhaustive coset search needs n <= {}, got {}",
            self.limit, self.n
        )
    }
}

impl std::error::Error for TooLarge {}

/// Picks the lighter of `U` and its complement; the zero chain for `U ∈ {∅, V}`.
pub fn reduce_vertex_cochain(
    skel: &Skeleton,
    u: &Chain0,
    p: &VertexDistribution,
) -> VertexReduction {
    let n = skel.n();
    assert_eq!(u.len(), n);
    assert_eq!(p.n(), n);
    let count = u.count();
    if count == 0 || count == n {
        return VertexReduction {
            u0: skel.zero_chain0(),
            weight: Rational::zero(),
            boundary_weight: Rational::zero(),
        };
    }
    let boundary_weight = p.chain1_weight(skel, &skel.coboundary0(u));
    let wu = p.chain0_weight(u);
    let complement = skel.full_chain0().plus(u);
    let wc = p.chain0_weight(&complement);
    // tie prefers U itself
    let (u0, weight) = if wu <= wc { (u.clone(), wu) } else { (complement, wc) };
    VertexReduction {
        u0,
        weight,
        boundary_weight,
    }
}

/// Scans all `n` neighborhood corrections and keeps the lightest.
pub fn reduce_edge_cochain(skel: &Skeleton, f: &Chain1, p: &VertexDistribution) -> EdgeReduction {
    let n = skel.n();
    assert_eq!(f.len(), skel.edge_count());
    assert_eq!(p.n(), n);
    let edge_weights = p.edge_weight_table(skel);
    reduce_edge_cochain_with(skel, f, p, &edge_weights)
}

/// As [`reduce_edge_cochain`] but reusing a precomputed edge weight table.
pub(crate) fn reduce_edge_cochain_with(
    skel: &Skeleton,
    f: &Chain1,
    p: &VertexDistribution,
    edge_weights: &[Rational],
) -> EdgeReduction {
    let n = skel.n();
    let chain_weight = |c: &Chain1| -> Rational {
        c.iter_ones()
            .fold(Rational::zero(), |acc, e| acc + &edge_weights[e])
    };
    let mut best: Option<(Chain1, usize, Rational)> = None;
    for v in 0..n {
        let mut neighborhood = skel.zero_chain0();
        for u in 0..n {
            if u != v && f.get(skel.edge_index(u, v)) {
                neighborhood.set(u, true);
            }
        }
        let candidate = f.plus(&skel.coboundary0(&neighborhood));
        let w = chain_weight(&candidate);
        let better = match &best {
            None => true,
            Some((_, _, bw)) => w < *bw,
        };
        if better {
            best = Some((candidate, v, w));
        }
    }
    let (f0, chosen_vertex, weight) = best.expect("n >= 3 vertices scanned");
    let boundary_weight = p.chain2_weight(skel, &skel.coboundary1(f));
    EdgeReduction {
        f0,
        chosen_vertex,
        weight,
        boundary_weight,
    }
}

/// Counting reduction: `U₀ ∈ {U, V∖U}` with `|U₀| <= n/2`, and
/// `|δU| = |U₀| (n - |U₀|)` exactly.
pub fn reduce_vertex_uniform(skel: &Skeleton, u: &Chain0) -> UniformVertexReduction {
    let n = skel.n();
    assert_eq!(u.len(), n);
    let count = u.count();
    let u0 = if 2 * count <= n {
        u.clone()
    } else {
        skel.full_chain0().plus(u)
    };
    let size = u0.count();
    let boundary_size = skel.coboundary0(&u0).count();
    debug_assert_eq!(boundary_size, size * (n - size));
    UniformVertexReduction {
        u0,
        size,
        boundary_size,
    }
}

/// Exhaustive coset minimization: the smallest `F + δU` over all `U ⊆ V`,
/// which always satisfies `|F₀| <= 3 |δF|`.
///
/// This is a checker, not a constructive reduction; it enumerates all `2ⁿ`
/// cuts and is gated on `n <= limit`.
pub fn verify_lemma_one_third(
    skel: &Skeleton,
    f: &Chain1,
    limit: usize,
) -> Result<CosetMinimum, TooLarge> {
    let n = skel.n();
    if n > limit {
        return Err(TooLarge { n, limit });
    }
    assert_eq!(f.len(), skel.edge_count());
    let mut best: Option<Chain1> = None;
    for mask in 0u64..(1u64 << n) {
        let mut u = skel.zero_chain0();
        for v in 0..n {
            if mask >> v & 1 == 1 {
                u.set(v, true);
            }
        }
        let candidate = f.plus(&skel.coboundary0(&u));
        if best.as_ref().is_none_or(|b| candidate.count() < b.count()) {
            best = Some(candidate);
        }
    }
    let f0 = best.expect("at least the empty cut was scanned");
    let boundary_size = skel.coboundary1(f).count();
    assert!(
        f0.count() <= 3 * boundary_size,
        "coset minimum {} exceeds 3|δF| = {}",
        f0.count(),
        3 * boundary_size
    );
    let ratio = Rational::new(
        (f0.count() as i64).into(),
        (boundary_size.max(1) as i64).into(),
    );
    Ok(CosetMinimum {
        f0,
        ratio,
        boundary_size,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{rat_int, ratio};
    use num_traits::Zero;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_distribution(n: usize, rng: &mut ChaCha8Rng) -> VertexDistribution {
        let raw: Vec<i64> = (0..n).map(|_| rng.gen_range(1..=1 << 16)).collect();
        let total: i64 = raw.iter().sum();
        VertexDistribution::from_weights(raw.iter().map(|&w| ratio(w, total)).collect()).unwrap()
    }

    fn chain0_from_mask(skel: &Skeleton, mask: u64) -> Chain0 {
        let mut u = skel.zero_chain0();
        for v in 0..skel.n() {
            if mask >> v & 1 == 1 {
                u.set(v, true);
            }
        }
        u
    }

    fn chain1_from_mask(skel: &Skeleton, mask: u64) -> Chain1 {
        let mut f = skel.zero_chain1();
        for e in 0..skel.edge_count() {
            if mask >> e & 1 == 1 {
                f.set(e, true);
            }
        }
        f
    }

    #[test]
    fn vertex_reduction_examples() {
        let skel = Skeleton::new(4).unwrap();
        let p = VertexDistribution::uniform(4);
        let r = reduce_vertex_cochain(&skel, &skel.vertex_chain(&[0, 1, 2]), &p);
        assert_eq!(r.u0, skel.vertex_chain(&[3]));
        assert_eq!(r.weight, ratio(1, 4));
        assert_eq!(r.boundary_weight, ratio(1, 2));
        assert!(r.weight < r.boundary_weight);

        let full = reduce_vertex_cochain(&skel, &skel.full_chain0(), &p);
        assert!(full.u0.is_zero());
        assert!(full.weight.is_zero() && full.boundary_weight.is_zero());
    }

    #[test]
    fn vertex_reduction_tie_prefers_input() {
        let skel = Skeleton::new(4).unwrap();
        let p = VertexDistribution::from_weights(vec![
            ratio(1, 2),
            ratio(1, 6),
            ratio(1, 6),
            ratio(1, 6),
        ])
        .unwrap();
        let u = skel.vertex_chain(&[0]);
        let r = reduce_vertex_cochain(&skel, &u, &p);
        assert_eq!(r.u0, u, "tie at p = 1/2 keeps U");
        assert_eq!(r.weight, ratio(1, 2));
        assert_eq!(r.boundary_weight, ratio(2, 3));
    }

    #[test]
    fn edge_reduction_star_cancels() {
        let skel = Skeleton::new(4).unwrap();
        let p = VertexDistribution::uniform(4);
        let f = skel.coboundary0(&skel.vertex_chain(&[0]));
        let r = reduce_edge_cochain(&skel, &f, &p);
        assert!(r.f0.is_zero(), "star of a vertex reduces to zero");
        assert_eq!(r.chosen_vertex, 0);
        assert!(r.weight.is_zero());
    }

    #[test]
    fn edge_reduction_single_edge() {
        let skel = Skeleton::new(4).unwrap();
        let p = VertexDistribution::uniform(4);
        let f = skel.edge_chain(&[(0, 1)]);
        let r = reduce_edge_cochain(&skel, &f, &p);
        assert_eq!(r.f0, f, "an isolated edge is already minimal");
        assert_eq!(r.weight, ratio(1, 6));
        assert_eq!(r.boundary_weight, ratio(1, 2));
        // the chosen vertex has an empty neighborhood: v = 2 comes first
        assert_eq!(r.chosen_vertex, 2);
        // sharper bound 3(n-2)/(2n) * p(δF) = (3/8)(1/2)
        assert!(r.weight <= ratio(3, 8) * r.boundary_weight);
    }

    #[test]
    fn uniform_reduction_counts() {
        let skel = Skeleton::new(6).unwrap();
        let r = reduce_vertex_uniform(&skel, &chain0_from_mask(&skel, 0b011110));
        assert_eq!(r.size, 2);
        assert_eq!(r.boundary_size, 8);

        let skel5 = Skeleton::new(5).unwrap();
        let r5 = reduce_vertex_uniform(&skel5, &chain0_from_mask(&skel5, 0b00110));
        assert_eq!(r5.size, 2);
        assert_eq!(r5.boundary_size, 6);

        let zero = reduce_vertex_uniform(&skel, &skel.zero_chain0());
        assert_eq!(zero.size, 0);
        assert_eq!(zero.boundary_size, 0);
    }

    #[test]
    fn coset_checker_examples() {
        let skel = Skeleton::new(4).unwrap();
        // a cut chain reduces to zero
        let cut = skel.coboundary0(&skel.vertex_chain(&[0, 2]));
        let r = verify_lemma_one_third(&skel, &cut, 6).unwrap();
        assert!(r.f0.is_zero());
        assert_eq!(r.ratio, rat_int(0));

        let f = skel.edge_chain(&[(0, 1)]);
        let r = verify_lemma_one_third(&skel, &f, 6).unwrap();
        assert_eq!(r.boundary_size, 2);
        assert_eq!(r.f0.count(), 1);

        let skel8 = Skeleton::new(8).unwrap();
        assert!(verify_lemma_one_third(&skel8, &skel8.zero_chain1(), 6).is_err());
    }

    #[test]
    fn reductions_preserve_class_and_bounds_exhaustive_n4() {
        let skel = Skeleton::new(4).unwrap();
        let n = 4i64;
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let dists: Vec<_> = (0..12).map(|_| random_distribution(4, &mut rng)).collect();
        for mask in 0u64..(1 << skel.edge_count()) {
            let f = chain1_from_mask(&skel, mask);
            let df = skel.coboundary1(&f);
            for p in &dists {
                let r = reduce_edge_cochain(&skel, &f, p);
                assert_eq!(skel.coboundary1(&r.f0), df, "class must be preserved");
                let sharp = ratio(3 * (n - 2), 2 * n) * &r.boundary_weight;
                assert!(r.weight <= sharp, "sharp averaging bound");
                assert!(r.weight <= ratio(3, 2) * &r.boundary_weight);
            }
        }
        for mask in 0u64..(1 << 4) {
            let u = chain0_from_mask(&skel, mask);
            let du = skel.coboundary0(&u);
            for p in &dists {
                let r = reduce_vertex_cochain(&skel, &u, p);
                assert_eq!(skel.coboundary0(&r.u0), du);
                if mask != 0 && mask != 0b1111 {
                    assert!(
                        r.weight < r.boundary_weight,
                        "strict expansion for proper subsets"
                    );
                }
            }
        }
    }

    #[test]
    fn triple_counting_identity() {
        // sum over v of the weight of triangles of δF at v is 3 p(δF)
        let skel = Skeleton::new(5).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        for _ in 0..20 {
            let mask = rng.gen_range(0..1u64 << skel.edge_count());
            let f = chain1_from_mask(&skel, mask);
            let p = random_distribution(5, &mut rng);
            let df = skel.coboundary1(&f);
            let mut total = Rational::zero();
            for v in 0..5 {
                for t in df.iter_ones() {
                    let [a, b, c] = skel.triangle(t);
                    if [a, b, c].contains(&(v as u32)) {
                        total += p.triangle_weight(a as usize, b as usize, c as usize);
                    }
                }
            }
            assert_eq!(total, rat_int(3) * p.chain2_weight(&skel, &df));
        }
    }

    #[test]
    fn coset_bound_random_n5() {
        let skel = Skeleton::new(5).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..200 {
            let mask = rng.gen_range(0..1u64 << skel.edge_count());
            let f = chain1_from_mask(&skel, mask);
            let r = verify_lemma_one_third(&skel, &f, 6).unwrap();
            assert_eq!(skel.coboundary1(&r.f0), skel.coboundary1(&f));
            assert!(r.f0.count() <= 3 * r.boundary_size);
        }
    }
}
