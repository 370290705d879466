//! The folding-map construction and its inevitable odd defect count.
//!
//! A folding assigns a vertex set `H(e*)` to every dual edge so that the
//! three assignments around any dual triangle sum to `i(t*)`, and vanishes
//! on edges clear of the half ball. Summing that identity over all dual
//! triangles kills every interior edge (counted twice) and every boundary
//! edge (outside the half ball), yet the right-hand side is the all-ones
//! vector — so a true folding cannot exist. Running the construction anyway
//! produces, at every stage, exact cochains whose defects are confined to an
//! odd set of dual triangles where the closing identity returns the full
//! vertex set instead of the empty one.
//!
//! Stages, for a validated triangulation with intersection map `i`:
//!
//! 1. along a breadth-first path from each half-ball vertex `v*` to the base
//!    vertex, the edge sets `i(e*)` telescope to an `F` with `δF = i(v*)`;
//!    the weighted edge reduction turns it into `H0(v*)`;
//! 2. for each edge meeting the half ball, `a = i(e*) + H0(v*1) + H0(v*2)`
//!    is a cocycle; its cut decomposition followed by the weighted vertex
//!    reduction gives `H1(e*)`;
//! 3. for each dual triangle, `b = i(t*) + H1(e*1) + H1(e*2) + H1(e*3)` has
//!    `δb = 0`, hence is empty or full; the full ones are the defects.

use super::intersect::IntersectionMap;
use super::DualTriangulation;
use crate::complex::{Chain0, Chain1, VertexDistribution};
use crate::expansion;
use crate::geom::AffineInstance;
use crate::rational::{ratio, Rational};
use num_traits::Zero;
use std::collections::VecDeque;

/// Weight bookkeeping for one folding run.
#[derive(Clone, Debug)]
pub struct WeightReport {
    /// `(v*, p(i(v*)), p(H0(v*)))` for every half-ball dual vertex.
    pub stage1: Vec<(u32, Rational, Rational)>,
    /// `(e*, p(i(e*)), p(a), p(H1(e*)))` for every edge meeting the half ball.
    pub stage2: Vec<(u32, Rational, Rational, Rational)>,
    /// Edges whose ingredients obey the folding-theorem hypothesis bounds
    /// `p(i(v*)) <= c` at both ends and `p(i(e*)) <= c + 1/(n-1)`.
    pub hypothesis_edges: usize,
    /// Of those, how many satisfy `p(a) < 4c + 1/(n-1)` strictly (all are
    /// asserted to satisfy it non-strictly).
    pub hypothesis_strict: usize,
}

/// The two assignment stages plus the defect set.
#[derive(Clone, Debug)]
pub struct FoldingAttempt {
    /// Edge chains per dual vertex; zero outside the half ball.
    pub h0: Vec<Chain1>,
    /// Vertex chains per dual edge; zero off the half ball.
    pub h1: Vec<Chain0>,
    /// Dual triangles where the closing identity returns the full vertex
    /// set. Always odd in number.
    pub defects: Vec<u32>,
    pub weights: WeightReport,
}

/// Internal inconsistencies that a validated triangulation cannot produce.
#[derive(Clone, Debug)]
pub enum FoldingError {
    /// A telescoped edge chain failed `δF = i(v*)`.
    Stage1 { dual_vertex: u32 },
    /// An `a`-cochain was not a cocycle.
    Stage2 { dual_edge: u32 },
    /// A `b`-cochain was neither empty nor full.
    Stage3 { dual_triangle: u32 },
    /// An even (or zero) defect count, which would contradict the overlap
    /// theorem itself.
    EvenDefects { count: usize },
    /// A stage weight bound failed.
    WeightBound { detail: String },
}

impl std::fmt::Display for FoldingError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            FoldingError::Stage1 { dual_vertex } => {
                write!(f, "duality violation telescoping at dual vertex {dual_vertex}")
            }
            FoldingError::Stage2 { dual_edge } => {
                write!(f, "duality violation at dual edge {dual_edge}: a is not a cocycle")
            }
            FoldingError::Stage3 { dual_triangle } => {
                write!(f, "duality violation at dual triangle {dual_triangle}: b is a proper subset")
            }
            FoldingError::EvenDefects { count } => {
                write!(f, "defect count {count} is even; the parity argument is broken")
            }
            FoldingError::WeightBound { detail } => write!(f, "weight bound failed: {detail}"),
        }
    }
}

impl std::error::Error for FoldingError {}

/// Runs the three-stage construction. Requires a validated triangulation
/// whose duality identities hold (the caller checks them; violations here
/// surface as errors rather than silent nonsense).
pub fn construct_folding_attempt(
    inst: &AffineInstance,
    xstar: &DualTriangulation,
    imap: &IntersectionMap,
    p: &VertexDistribution,
) -> Result<FoldingAttempt, FoldingError> {
    let skel = inst.skeleton();
    let n = inst.n();
    let nv = xstar.vertex_count();
    let ne = xstar.edge_count();
    let nt = xstar.triangle_count();
    let edge_weights = p.edge_weight_table(skel);

    // breadth-first tree rooted at the base vertex, neighbors in index order
    let mut adjacency: Vec<Vec<(u32, u32)>> = vec![Vec::new(); nv];
    for (e, &[a, b]) in xstar.edges().iter().enumerate() {
        adjacency[a as usize].push((b, e as u32));
        adjacency[b as usize].push((a, e as u32));
    }
    for list in &mut adjacency {
        list.sort_unstable();
    }
    let root = xstar.base_vertex() as usize;
    let mut parent_edge: Vec<Option<u32>> = vec![None; nv];
    let mut telescoped: Vec<Option<Chain1>> = vec![None; nv];
    telescoped[root] = Some(skel.zero_chain1());
    let mut queue = VecDeque::from([root]);
    while let Some(v) = queue.pop_front() {
        let base = telescoped[v].clone().expect("visited in order");
        for &(w, e) in &adjacency[v] {
            if telescoped[w as usize].is_none() && w as usize != root {
                let mut f = base.clone();
                f.add_assign(&imap.i1[e as usize]);
                telescoped[w as usize] = Some(f);
                parent_edge[w as usize] = Some(e);
                queue.push_back(w as usize);
            }
        }
    }

    // stage 1: H0 on half-ball vertices
    let three_halves = ratio(3, 2);
    let mut h0: Vec<Chain1> = vec![skel.zero_chain1(); nv];
    let mut stage1 = Vec::new();
    for v in 0..nv {
        if !xstar.vertex_in_half_ball(v) {
            debug_assert!(imap.i0[v].is_zero());
            continue;
        }
        let f = telescoped[v]
            .clone()
            .ok_or(FoldingError::Stage1 { dual_vertex: v as u32 })?;
        if skel.coboundary1(&f) != imap.i0[v] {
            return Err(FoldingError::Stage1 { dual_vertex: v as u32 });
        }
        let reduction = expansion::reduce_edge_cochain_with(skel, &f, p, &edge_weights);
        let weight_i0 = p.chain2_weight(skel, &imap.i0[v]);
        if reduction.weight > &three_halves * &weight_i0 {
            return Err(FoldingError::WeightBound {
                detail: format!("p(H0) > 3/2 p(i(v*)) at dual vertex {v}"),
            });
        }
        stage1.push((v as u32, weight_i0, reduction.weight.clone()));
        h0[v] = reduction.f0;
    }

    // stage 2: H1 on edges meeting the half ball
    let c_bound = crate::overlap::weighted_overlap_bound(n);
    let inv_n1 = ratio(1, n as i64 - 1);
    let hypothesis_cap = &c_bound + &inv_n1;
    let a_cap = ratio(4, 1) * &c_bound + &inv_n1;
    let mut h1: Vec<Chain0> = vec![skel.zero_chain0(); ne];
    let mut stage2 = Vec::new();
    let mut hypothesis_edges = 0usize;
    let mut hypothesis_strict = 0usize;
    let stage1_weight: std::collections::HashMap<u32, &Rational> =
        stage1.iter().map(|(v, wi, _)| (*v, wi)).collect();
    for e in 0..ne {
        if !xstar.edge_meets_half_ball(e) {
            continue;
        }
        let [da, db] = xstar.edges()[e];
        let mut a = imap.i1[e].clone();
        a.add_assign(&h0[da as usize]);
        a.add_assign(&h0[db as usize]);
        let u = skel
            .cut_decomposition(&a)
            .map_err(|_| FoldingError::Stage2 { dual_edge: e as u32 })?;
        let reduction = expansion::reduce_vertex_cochain(skel, &u, p);
        let weight_a = {
            let mut acc = Rational::zero();
            for idx in a.iter_ones() {
                acc += &edge_weights[idx];
            }
            acc
        };
        if reduction.weight > weight_a {
            return Err(FoldingError::WeightBound {
                detail: format!("p(H1) > p(a) at dual edge {e}"),
            });
        }
        // hypothesis accounting from the folding theorem
        let weight_i1 = {
            let mut acc = Rational::zero();
            for idx in imap.i1[e].iter_ones() {
                acc += &edge_weights[idx];
            }
            acc
        };
        let ends_ok = [da, db].iter().all(|dv| {
            stage1_weight
                .get(dv)
                .is_none_or(|wi| *wi <= &c_bound)
        });
        if ends_ok && weight_i1 <= hypothesis_cap {
            hypothesis_edges += 1;
            if weight_a < a_cap {
                hypothesis_strict += 1;
            } else if weight_a > a_cap {
                return Err(FoldingError::WeightBound {
                    detail: format!("p(a) exceeds 4c + 1/(n-1) at dual edge {e}"),
                });
            }
        }
        stage2.push((e as u32, weight_i1, weight_a, reduction.weight.clone()));
        h1[e] = reduction.u0;
    }

    // stage 3: close every dual triangle
    let full = skel.full_chain0();
    let mut defects = Vec::new();
    for t in 0..nt {
        let [e1, e2, e3] = xstar.triangle_edges(t);
        let mut b = imap.i2[t].clone();
        b.add_assign(&h1[e1 as usize]);
        b.add_assign(&h1[e2 as usize]);
        b.add_assign(&h1[e3 as usize]);
        if b.is_zero() {
            continue;
        }
        if b == full {
            defects.push(t as u32);
        } else {
            // δb = 0 would force b ∈ {∅, V}; a proper subset means duality
            // failed upstream
            return Err(FoldingError::Stage3 {
                dual_triangle: t as u32,
            });
        }
    }
    if defects.len() % 2 == 0 {
        return Err(FoldingError::EvenDefects {
            count: defects.len(),
        });
    }

    Ok(FoldingAttempt {
        h0,
        h1,
        defects,
        weights: WeightReport {
            stage1,
            stage2,
            hypothesis_edges,
            hypothesis_strict,
        },
    })
}
