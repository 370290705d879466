//! Exhaustive small-case suites for the chain calculus and the expansion
//! inequalities. Each suite returns the first failure it finds, so the exit
//! status can name the broken property.

use overlap_core::complex::{Chain0, Chain1, KernelClass, Skeleton, VertexDistribution};
use overlap_core::expansion;
use overlap_core::rational::{ratio, Rational};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub struct SuiteOutcome {
    pub name: &'static str,
    pub cases: usize,
    pub failure: Option<String>,
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

fn random_distribution(n: usize, rng: &mut ChaCha8Rng) -> VertexDistribution {
    let raw: Vec<i64> = (0..n).map(|_| rng.gen_range(1..=1 << 16)).collect();
    let total: i64 = raw.iter().sum();
    VertexDistribution::from_weights(raw.iter().map(|&w| ratio(w, total)).collect())
        .expect("positive weights normalize")
}

/// δδ = 0 for every vertex subset, exhaustively.
pub fn delta_delta_zero(max_n: usize) -> SuiteOutcome {
    let mut cases = 0;
    for n in 3..=max_n {
        let skel = Skeleton::new(n).unwrap();
        for mask in 0..(1u64 << n) {
            cases += 1;
            let u = chain0_from_mask(&skel, mask);
            if !skel.coboundary1(&skel.coboundary0(&u)).is_zero() {
                return SuiteOutcome {
                    name: "delta_delta_zero",
                    cases,
                    failure: Some(format!("n={n} subset {mask:#b}")),
                };
            }
        }
    }
    SuiteOutcome {
        name: "delta_delta_zero",
        cases,
        failure: None,
    }
}

/// The kernel of the vertex coboundary is exactly the empty and full sets.
pub fn vertex_kernel(max_n: usize) -> SuiteOutcome {
    let mut cases = 0;
    for n in 3..=max_n {
        let skel = Skeleton::new(n).unwrap();
        for mask in 0..(1u64 << n) {
            cases += 1;
            let u = chain0_from_mask(&skel, mask);
            let boundary_zero = skel.coboundary0(&u).is_zero();
            let class = skel.kernel_vertex_witness(&u);
            let expected_kernel = mask == 0 || mask == (1 << n) - 1;
            if class.is_kernel() != expected_kernel || boundary_zero != expected_kernel {
                return SuiteOutcome {
                    name: "vertex_kernel",
                    cases,
                    failure: Some(format!("n={n} subset {mask:#b} classified {class:?}")),
                };
            }
        }
    }
    SuiteOutcome {
        name: "vertex_kernel",
        cases,
        failure: None,
    }
}

/// The kernel of the edge coboundary is exactly the cut space, exhaustively
/// over all edge sets (n <= 5 keeps this to 2^10).
pub fn edge_kernel_is_cut_space(max_n: usize) -> SuiteOutcome {
    let mut cases = 0;
    for n in 3..=max_n.min(5) {
        let skel = Skeleton::new(n).unwrap();
        for mask in 0..(1u64 << skel.edge_count()) {
            cases += 1;
            let f = chain1_from_mask(&skel, mask);
            let in_kernel = skel.coboundary1(&f).is_zero();
            match skel.cut_decomposition(&f) {
                Ok(u) => {
                    if !in_kernel || skel.coboundary0(&u) != f {
                        return SuiteOutcome {
                            name: "edge_kernel_is_cut_space",
                            cases,
                            failure: Some(format!("n={n} edges {mask:#b}: bad decomposition")),
                        };
                    }
                }
                Err(_) => {
                    if in_kernel {
                        return SuiteOutcome {
                            name: "edge_kernel_is_cut_space",
                            cases,
                            failure: Some(format!("n={n} edges {mask:#b}: cocycle rejected")),
                        };
                    }
                }
            }
        }
    }
    SuiteOutcome {
        name: "edge_kernel_is_cut_space",
        cases,
        failure: None,
    }
}

/// Weighted vertex expansion: `p(U0) < p(δU)` strictly off the kernel, with
/// class preservation; exhaustive subsets, sampled distributions.
pub fn vertex_expansion(max_n: usize, seed: u64, dists: usize) -> SuiteOutcome {
    let mut cases = 0;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for n in 3..=max_n {
        let skel = Skeleton::new(n).unwrap();
        let ps: Vec<_> = (0..dists).map(|_| random_distribution(n, &mut rng)).collect();
        for mask in 0..(1u64 << n) {
            let u = chain0_from_mask(&skel, mask);
            let du = skel.coboundary0(&u);
            for p in &ps {
                cases += 1;
                let r = expansion::reduce_vertex_cochain(&skel, &u, p);
                if skel.coboundary0(&r.u0) != du {
                    return SuiteOutcome {
                        name: "vertex_expansion",
                        cases,
                        failure: Some(format!("n={n} subset {mask:#b}: class changed")),
                    };
                }
                let proper = mask != 0 && mask != (1 << n) - 1;
                if proper && r.weight >= r.boundary_weight {
                    return SuiteOutcome {
                        name: "vertex_expansion",
                        cases,
                        failure: Some(format!(
                            "n={n} subset {mask:#b}: p(U0) = {} !< p(dU) = {}",
                            r.weight, r.boundary_weight
                        )),
                    };
                }
            }
        }
    }
    SuiteOutcome {
        name: "vertex_expansion",
        cases,
        failure: None,
    }
}

/// Weighted edge expansion: class preservation and both the sharp
/// `3(n-2)/(2n)` and stated `3/2` bounds; exhaustive edge sets for n <= 5.
pub fn edge_expansion(max_n: usize, seed: u64, dists: usize) -> SuiteOutcome {
    let mut cases = 0;
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xE);
    for n in 3..=max_n.min(5) {
        let skel = Skeleton::new(n).unwrap();
        let ps: Vec<_> = (0..dists).map(|_| random_distribution(n, &mut rng)).collect();
        let sharp = ratio(3 * (n as i64 - 2), 2 * n as i64);
        for mask in 0..(1u64 << skel.edge_count()) {
            let f = chain1_from_mask(&skel, mask);
            let df = skel.coboundary1(&f);
            for p in &ps {
                cases += 1;
                let r = expansion::reduce_edge_cochain(&skel, &f, p);
                if skel.coboundary1(&r.f0) != df {
                    return SuiteOutcome {
                        name: "edge_expansion",
                        cases,
                        failure: Some(format!("n={n} edges {mask:#b}: class changed")),
                    };
                }
                let cap = &sharp * &r.boundary_weight;
                if r.weight > cap || r.weight > ratio(3, 2) * &r.boundary_weight {
                    return SuiteOutcome {
                        name: "edge_expansion",
                        cases,
                        failure: Some(format!(
                            "n={n} edges {mask:#b}: p(F0) = {} above bound {}",
                            r.weight, cap
                        )),
                    };
                }
            }
        }
    }
    SuiteOutcome {
        name: "edge_expansion",
        cases,
        failure: None,
    }
}

/// Counting form of the vertex lemma: `|δU| = |U0| (n - |U0|)`, `|U0| <= n/2`.
pub fn uniform_counting(max_n: usize) -> SuiteOutcome {
    let mut cases = 0;
    for n in 3..=max_n {
        let skel = Skeleton::new(n).unwrap();
        for mask in 0..(1u64 << n) {
            cases += 1;
            let u = chain0_from_mask(&skel, mask);
            let r = expansion::reduce_vertex_uniform(&skel, &u);
            if 2 * r.size > n || r.boundary_size != r.size * (n - r.size) {
                return SuiteOutcome {
                    name: "uniform_counting",
                    cases,
                    failure: Some(format!("n={n} subset {mask:#b}")),
                };
            }
        }
    }
    SuiteOutcome {
        name: "uniform_counting",
        cases,
        failure: None,
    }
}

/// Exhaustive-coset edge bound `|F0| <= 3 |δF|` on random chains.
pub fn coset_bound(max_n: usize, seed: u64, samples: usize) -> SuiteOutcome {
    let mut cases = 0;
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x13);
    for n in 4..=max_n.min(6) {
        let skel = Skeleton::new(n).unwrap();
        for _ in 0..samples {
            cases += 1;
            let mask = rng.gen_range(0..1u64 << skel.edge_count());
            let f = chain1_from_mask(&skel, mask);
            match expansion::verify_lemma_one_third(&skel, &f, 6) {
                Ok(r) => {
                    if skel.coboundary1(&r.f0) != skel.coboundary1(&f) {
                        return SuiteOutcome {
                            name: "coset_bound",
                            cases,
                            failure: Some(format!("n={n} edges {mask:#b}: class changed")),
                        };
                    }
                }
                Err(e) => {
                    return SuiteOutcome {
                        name: "coset_bound",
                        cases,
                        failure: Some(e.to_string()),
                    }
                }
            }
        }
    }
    SuiteOutcome {
        name: "coset_bound",
        cases,
        failure: None,
    }
}

/// The linear extensions of any distribution are themselves distributions.
pub fn weight_normalization(max_n: usize, seed: u64) -> SuiteOutcome {
    let mut cases = 0;
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x77);
    for n in 3..=max_n {
        let skel = Skeleton::new(n).unwrap();
        for _ in 0..20 {
            cases += 1;
            let p = random_distribution(n, &mut rng);
            let mut all_edges = skel.zero_chain1();
            for e in 0..skel.edge_count() {
                all_edges.set(e, true);
            }
            let mut all_tris = skel.zero_chain2();
            for t in 0..skel.triangle_count() {
                all_tris.set(t, true);
            }
            let one = Rational::from_integer(1.into());
            if p.chain1_weight(&skel, &all_edges) != one
                || p.chain2_weight(&skel, &all_tris) != one
            {
                return SuiteOutcome {
                    name: "weight_normalization",
                    cases,
                    failure: Some(format!("n={n}: extension does not normalize")),
                };
            }
        }
    }
    SuiteOutcome {
        name: "weight_normalization",
        cases,
        failure: None,
    }
}

/// Exercise the full-set classification once more via cut decomposition of
/// boundaries of random subsets (round trips must close).
pub fn cut_round_trip(max_n: usize, seed: u64) -> SuiteOutcome {
    let mut cases = 0;
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5a);
    for n in 3..=max_n {
        let skel = Skeleton::new(n).unwrap();
        for _ in 0..50 {
            cases += 1;
            let mask = rng.gen_range(0..1u64 << n);
            let u = chain0_from_mask(&skel, mask);
            let f = skel.coboundary0(&u);
            match skel.cut_decomposition(&f) {
                Ok(w) => {
                    if skel.coboundary0(&w) != f {
                        return SuiteOutcome {
                            name: "cut_round_trip",
                            cases,
                            failure: Some(format!("n={n} subset {mask:#b}")),
                        };
                    }
                }
                Err(e) => {
                    return SuiteOutcome {
                        name: "cut_round_trip",
                        cases,
                        failure: Some(format!("n={n} subset {mask:#b}: {e}")),
                    }
                }
            }
        }
    }
    SuiteOutcome {
        name: "cut_round_trip",
        cases,
        failure: None,
    }
}

/// Full/empty classifications agree with the coboundary, using the witness.
pub fn kernel_witnesses(max_n: usize) -> SuiteOutcome {
    let mut cases = 0;
    for n in 3..=max_n {
        let skel = Skeleton::new(n).unwrap();
        for mask in 1..((1u64 << n) - 1) {
            cases += 1;
            let u = chain0_from_mask(&skel, mask);
            match skel.kernel_vertex_witness(&u) {
                KernelClass::NotKernel { witness_edge } => {
                    let [a, b] = skel.edge(witness_edge);
                    if u.get(a as usize) == u.get(b as usize) {
                        return SuiteOutcome {
                            name: "kernel_witnesses",
                            cases,
                            failure: Some(format!("n={n} subset {mask:#b}: witness not a cut edge")),
                        };
                    }
                }
                other => {
                    return SuiteOutcome {
                        name: "kernel_witnesses",
                        cases,
                        failure: Some(format!("n={n} subset {mask:#b} classified {other:?}")),
                    }
                }
            }
        }
    }
    SuiteOutcome {
        name: "kernel_witnesses",
        cases,
        failure: None,
    }
}

/// Runs everything; exhaustive parts are gated on `max_n`.
pub fn run_all(max_n: usize, seed: u64) -> Vec<SuiteOutcome> {
    let exhaustive_n = max_n.min(6);
    vec![
        delta_delta_zero(exhaustive_n),
        vertex_kernel(exhaustive_n),
        kernel_witnesses(exhaustive_n),
        edge_kernel_is_cut_space(exhaustive_n),
        cut_round_trip(exhaustive_n, seed),
        vertex_expansion(exhaustive_n.min(5), seed, 25),
        edge_expansion(exhaustive_n.min(5), seed, 10),
        uniform_counting(exhaustive_n),
        coset_bound(exhaustive_n, seed, 250),
        weight_normalization(exhaustive_n, seed),
    ]
}
