//! The complete 2-skeleton on `n` vertices and its GF(2) chain calculus.
//!
//! Vertices are `0..n`, edges are all 2-subsets and triangles all 3-subsets,
//! both enumerated lexicographically on their sorted vertex tuples. The
//! coboundary operator sends a vertex set to the edges meeting it oddly and
//! an edge set to the triangles containing an odd number of its edges, so
//! `δδ = 0`. Vertex weights extend linearly to edges and triangles:
//!
//! ```text
//! p({u,v})   = (p(u) + p(v)) / (n - 1)
//! p({u,v,w}) = (p(u) + p(v) + p(w)) / C(n-1, 2)
//! ```
//!
//! which makes the extensions probability distributions on edges and on
//! triangles whenever `p` is one on vertices.

use crate::bits::F2Vec;
use crate::rational::{binomial, Rational};
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// A GF(2) chain of `DIM`-simplices (0 = vertices, 1 = edges, 2 = triangles).
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Chain<const DIM: usize> {
    bits: F2Vec,
}

pub type Chain0 = Chain<0>;
pub type Chain1 = Chain<1>;
pub type Chain2 = Chain<2>;

impl<const DIM: usize> Chain<DIM> {
    pub fn zero(len: usize) -> Self {
        Chain {
            bits: F2Vec::zeros(len),
        }
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn get(&self, i: usize) -> bool {
        self.bits.get(i)
    }

    pub fn set(&mut self, i: usize, value: bool) {
        self.bits.set(i, value)
    }

    pub fn flip(&mut self, i: usize) {
        self.bits.flip(i)
    }

    pub fn is_zero(&self) -> bool {
        self.bits.is_zero()
    }

    pub fn count(&self) -> usize {
        self.bits.count_ones()
    }

    pub fn iter_ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.bits.iter_ones()
    }

    pub fn first_one(&self) -> Option<usize> {
        self.bits.first_one()
    }

    /// `self += other` over GF(2).
    pub fn add_assign(&mut self, other: &Self) {
        self.bits.xor_assign(&other.bits)
    }

    /// `self + other` over GF(2).
    pub fn plus(&self, other: &Self) -> Self {
        let mut out = self.clone();
        out.add_assign(other);
        out
    }

    /// True if the support of `self` is contained in the support of `other`.
    pub fn is_subset(&self, other: &Self) -> bool {
        self.bits.is_subset(&other.bits)
    }
}

/// Errors from skeleton construction and chain operations.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum ComplexError {
    /// The skeleton needs at least 3 vertices to have triangles.
    TooFewVertices { n: usize },
    /// A chain handed to `cut_decomposition` is not a cocycle; the witness
    /// triangle contains an odd number of its edges but `δF` must vanish.
    NotACocycle { witness_triangle: usize },
}

impl std::fmt::Display for ComplexError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ComplexError::TooFewVertices { n } => {
                write!(f, "skeleton needs n >= 3 vertices, got {n}")
            }
            ComplexError::NotACocycle { witness_triangle } => {
                write!(f, "chain is not a cocycle: triangle {witness_triangle} meets it oddly")
            }
        }
    }
}

impl std::error::Error for ComplexError {}

/// How a vertex chain sits relative to the kernel of the degree-0 coboundary.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum KernelClass {
    Empty,
    Full,
    /// Not in the kernel; `witness_edge` is the smallest edge of `δU`.
    NotKernel { witness_edge: usize },
}

impl KernelClass {
    pub fn is_kernel(&self) -> bool {
        !matches!(self, KernelClass::NotKernel { .. })
    }
}

/// The complete 2-skeleton `(V, E, T)` on `n` vertices.
#[derive(Clone, Debug)]
pub struct Skeleton {
    n: usize,
    edges: Vec<[u32; 2]>,
    triangles: Vec<[u32; 3]>,
    edge_index: Vec<u32>,
    tri_row_offset: Vec<u32>,
}

impl Skeleton {
    pub fn new(n: usize) -> Result<Self, ComplexError> {
        if n < 3 {
            return Err(ComplexError::TooFewVertices { n });
        }
        let mut edges = Vec::with_capacity(n * (n - 1) / 2);
        let mut edge_index = vec![u32::MAX; n * n];
        for u in 0..n {
            for v in (u + 1)..n {
                edge_index[u * n + v] = edges.len() as u32;
                edge_index[v * n + u] = edges.len() as u32;
                edges.push([u as u32, v as u32]);
            }
        }
        let mut triangles = Vec::with_capacity(n * (n - 1) * (n - 2) / 6);
        let mut tri_row_offset = vec![0u32; n + 1];
        for a in 0..n {
            tri_row_offset[a] = triangles.len() as u32;
            for b in (a + 1)..n {
                for c in (b + 1)..n {
                    triangles.push([a as u32, b as u32, c as u32]);
                }
            }
        }
        tri_row_offset[n] = triangles.len() as u32;
        Ok(Skeleton {
            n,
            edges,
            triangles,
            edge_index,
            tri_row_offset,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn triangle_count(&self) -> usize {
        self.triangles.len()
    }

    pub fn edges(&self) -> &[[u32; 2]] {
        &self.edges
    }

    pub fn triangles(&self) -> &[[u32; 3]] {
        &self.triangles
    }

    pub fn edge(&self, i: usize) -> [u32; 2] {
        self.edges[i]
    }

    pub fn triangle(&self, i: usize) -> [u32; 3] {
        self.triangles[i]
    }

    /// Index of the edge `{u, v}`, `u != v`.
    pub fn edge_index(&self, u: usize, v: usize) -> usize {
        debug_assert_ne!(u, v);
        self.edge_index[u * self.n + v] as usize
    }

    /// Index of the triangle on three distinct vertices.
    pub fn triangle_index(&self, a: usize, b: usize, c: usize) -> usize {
        let mut t = [a, b, c];
        t.sort_unstable();
        let [a, b, c] = t;
        debug_assert!(a < b && b < c && c < self.n);
        // rank within row `a`, then edge rank of {b,c} in the suffix a+1..n
        let row = self.tri_row_offset[a] as usize;
        let m = self.n - a - 1; // vertices after a
        let bb = b - a - 1;
        let cc = c - a - 1;
        row + bb * m - bb * (bb + 1) / 2 + (cc - bb - 1)
    }

    pub fn zero_chain0(&self) -> Chain0 {
        Chain::zero(self.n)
    }

    pub fn zero_chain1(&self) -> Chain1 {
        Chain::zero(self.edge_count())
    }

    pub fn zero_chain2(&self) -> Chain2 {
        Chain::zero(self.triangle_count())
    }

    pub fn vertex_chain(&self, vertices: &[usize]) -> Chain0 {
        let mut c = self.zero_chain0();
        for &v in vertices {
            c.set(v, true);
        }
        c
    }

    pub fn edge_chain(&self, edges: &[(usize, usize)]) -> Chain1 {
        let mut c = self.zero_chain1();
        for &(u, v) in edges {
            c.set(self.edge_index(u, v), true);
        }
        c
    }

    /// The all-ones vertex chain (the full vertex set).
    pub fn full_chain0(&self) -> Chain0 {
        let mut c = self.zero_chain0();
        for v in 0..self.n {
            c.set(v, true);
        }
        c
    }

    /// `δU`: the edges meeting `U` in exactly one vertex.
    pub fn coboundary0(&self, u: &Chain0) -> Chain1 {
        assert_eq!(u.len(), self.n);
        let mut out = self.zero_chain1();
        for (i, &[a, b]) in self.edges.iter().enumerate() {
            if u.get(a as usize) != u.get(b as usize) {
                out.set(i, true);
            }
        }
        out
    }

    /// `δF`: the triangles containing an odd number of edges of `F`.
    pub fn coboundary1(&self, f: &Chain1) -> Chain2 {
        assert_eq!(f.len(), self.edge_count());
        let mut out = self.zero_chain2();
        for (i, &[a, b, c]) in self.triangles.iter().enumerate() {
            let (a, b, c) = (a as usize, b as usize, c as usize);
            let parity = f.get(self.edge_index(a, b))
                ^ f.get(self.edge_index(a, c))
                ^ f.get(self.edge_index(b, c));
            if parity {
                out.set(i, true);
            }
        }
        out
    }

    /// Classifies `U` against the kernel of `δ⁰`, which is exactly `{∅, V}`.
    pub fn kernel_vertex_witness(&self, u: &Chain0) -> KernelClass {
        assert_eq!(u.len(), self.n);
        if u.is_zero() {
            return KernelClass::Empty;
        }
        if u.count() == self.n {
            return KernelClass::Full;
        }
        let boundary = self.coboundary0(u);
        let witness_edge = boundary
            .first_one()
            .expect("a proper nonempty vertex set always has a cut edge");
        KernelClass::NotKernel { witness_edge }
    }

    /// Inverts `δ⁰` on a cocycle: given `F` with `δF = 0`, returns `U` with
    /// `δU = F`.
    ///
    /// A nonzero cocycle is a complete bipartite graph covering all of `V`;
    /// the returned class is the one containing the smallest-index
    /// non-isolated vertex. `F = 0` yields `U = ∅`.
    pub fn cut_decomposition(&self, f: &Chain1) -> Result<Chain0, ComplexError> {
        assert_eq!(f.len(), self.edge_count());
        let delta = self.coboundary1(f);
        if let Some(witness_triangle) = delta.first_one() {
            return Err(ComplexError::NotACocycle { witness_triangle });
        }
        let mut u = self.zero_chain0();
        if f.is_zero() {
            return Ok(u);
        }
        // 2-color the graph of F by BFS from the smallest touched vertex.
        let mut color = vec![u8::MAX; self.n];
        let mut adj: Vec<Vec<usize>> = vec![Vec::new(); self.n];
        for e in f.iter_ones() {
            let [a, b] = self.edges[e];
            adj[a as usize].push(b as usize);
            adj[b as usize].push(a as usize);
        }
        let root = (0..self.n)
            .find(|&v| !adj[v].is_empty())
            .expect("nonzero chain has a non-isolated vertex");
        color[root] = 0;
        let mut queue = std::collections::VecDeque::from([root]);
        while let Some(v) = queue.pop_front() {
            for &w in &adj[v] {
                if color[w] == u8::MAX {
                    color[w] = 1 - color[v];
                    queue.push_back(w);
                } else {
                    debug_assert_ne!(color[w], color[v], "cocycle graph must be bipartite");
                }
            }
        }
        for v in 0..self.n {
            if color[v] == 0 {
                u.set(v, true);
            }
        }
        debug_assert_eq!(self.coboundary0(&u), *f);
        Ok(u)
    }
}

/// Exact nonnegative vertex weights summing to one.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct VertexDistribution {
    weights: Vec<Rational>,
}

/// Errors from distribution construction.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum DistributionError {
    NegativeWeight { vertex: usize },
    NotNormalized { total: String },
    WrongLength { expected: usize, got: usize },
}

impl std::fmt::Display for DistributionError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            DistributionError::NegativeWeight { vertex } => {
                write!(f, "negative weight at vertex {vertex}")
            }
            DistributionError::NotNormalized { total } => {
                write!(f, "weights sum to {total}, expected 1")
            }
            DistributionError::WrongLength { expected, got } => {
                write!(f, "expected {expected} weights, got {got}")
            }
        }
    }
}

impl std::error::Error for DistributionError {}

impl VertexDistribution {
    pub fn uniform(n: usize) -> Self {
        let w = Rational::new(1.into(), (n as i64).into());
        VertexDistribution {
            weights: vec![w; n],
        }
    }

    pub fn from_weights(weights: Vec<Rational>) -> Result<Self, DistributionError> {
        if let Some(vertex) = weights.iter().position(|w| w.is_negative()) {
            return Err(DistributionError::NegativeWeight { vertex });
        }
        let total: Rational = weights.iter().fold(Rational::zero(), |acc, w| acc + w);
        if !total.is_one() {
            return Err(DistributionError::NotNormalized {
                total: crate::rational::format_rational(&total),
            });
        }
        Ok(VertexDistribution { weights })
    }

    pub fn n(&self) -> usize {
        self.weights.len()
    }

    pub fn weights(&self) -> &[Rational] {
        &self.weights
    }

    pub fn vertex(&self, v: usize) -> &Rational {
        &self.weights[v]
    }

    pub fn is_uniform(&self) -> bool {
        self.weights.windows(2).all(|w| w[0] == w[1])
    }

    /// Extended weight of the edge `{u, v}`.
    pub fn edge_weight(&self, u: usize, v: usize) -> Rational {
        let n = self.weights.len();
        (&self.weights[u] + &self.weights[v]) / BigRational::from_integer((n as i64 - 1).into())
    }

    /// Extended weight of the triangle `{a, b, c}`.
    pub fn triangle_weight(&self, a: usize, b: usize, c: usize) -> Rational {
        let n = self.weights.len();
        (&self.weights[a] + &self.weights[b] + &self.weights[c])
            / BigRational::from_integer(binomial(n - 1, 2))
    }

    /// Per-edge extended weights in skeleton edge order.
    pub fn edge_weight_table(&self, skel: &Skeleton) -> Vec<Rational> {
        skel.edges()
            .iter()
            .map(|&[u, v]| self.edge_weight(u as usize, v as usize))
            .collect()
    }

    /// Per-triangle extended weights in skeleton triangle order.
    pub fn triangle_weight_table(&self, skel: &Skeleton) -> Vec<Rational> {
        skel.triangles()
            .iter()
            .map(|&[a, b, c]| self.triangle_weight(a as usize, b as usize, c as usize))
            .collect()
    }

    /// `p(U)` for a vertex chain.
    pub fn chain0_weight(&self, u: &Chain0) -> Rational {
        u.iter_ones()
            .fold(Rational::zero(), |acc, v| acc + &self.weights[v])
    }

    /// `p(F)` for an edge chain under the linear extension.
    pub fn chain1_weight(&self, skel: &Skeleton, f: &Chain1) -> Rational {
        let n = skel.n();
        let mut sum = Rational::zero();
        for e in f.iter_ones() {
            let [u, v] = skel.edge(e);
            sum += &self.weights[u as usize] + &self.weights[v as usize];
        }
        sum / BigRational::from_integer((n as i64 - 1).into())
    }

    /// `p(S)` for a triangle chain under the linear extension.
    pub fn chain2_weight(&self, skel: &Skeleton, s: &Chain2) -> Rational {
        let n = skel.n();
        let mut sum = Rational::zero();
        for t in s.iter_ones() {
            let [a, b, c] = skel.triangle(t);
            sum += &self.weights[a as usize] + &self.weights[b as usize] + &self.weights[c as usize];
        }
        sum / BigRational::from_integer(binomial(n - 1, 2))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{rat_int, ratio};

    fn full_edges(skel: &Skeleton) -> Chain1 {
        let mut f = skel.zero_chain1();
        for i in 0..skel.edge_count() {
            f.set(i, true);
        }
        f
    }

    #[test]
    fn rejects_tiny_skeletons() {
        assert!(matches!(
            Skeleton::new(2),
            Err(ComplexError::TooFewVertices { n: 2 })
        ));
    }

    #[test]
    fn counts_and_indices() {
        let skel = Skeleton::new(7).unwrap();
        assert_eq!(skel.edge_count(), 21);
        assert_eq!(skel.triangle_count(), 35);
        for (i, &[u, v]) in skel.edges().iter().enumerate() {
            assert_eq!(skel.edge_index(u as usize, v as usize), i);
            assert_eq!(skel.edge_index(v as usize, u as usize), i);
        }
        for (i, &[a, b, c]) in skel.triangles().iter().enumerate() {
            assert_eq!(skel.triangle_index(a as usize, b as usize, c as usize), i);
            assert_eq!(skel.triangle_index(c as usize, a as usize, b as usize), i);
        }
    }

    #[test]
    fn coboundary0_star_of_vertex() {
        let skel = Skeleton::new(4).unwrap();
        let star = skel.coboundary0(&skel.vertex_chain(&[0]));
        assert_eq!(star, skel.edge_chain(&[(0, 1), (0, 2), (0, 3)]));
    }

    #[test]
    fn coboundary0_kills_empty_and_full() {
        for n in 3..7 {
            let skel = Skeleton::new(n).unwrap();
            assert!(skel.coboundary0(&skel.zero_chain0()).is_zero());
            assert!(skel.coboundary0(&skel.full_chain0()).is_zero());
        }
    }

    #[test]
    fn coboundary1_single_edge_n3() {
        let skel = Skeleton::new(3).unwrap();
        let f = skel.edge_chain(&[(0, 1)]);
        let d = skel.coboundary1(&f);
        assert_eq!(d.iter_ones().collect::<Vec<_>>(), vec![0]);
    }

    #[test]
    fn coboundary1_two_disjoint_edges_n4() {
        // each of the four triangles contains exactly one of the two edges
        let skel = Skeleton::new(4).unwrap();
        let f = skel.edge_chain(&[(0, 1), (2, 3)]);
        let d = skel.coboundary1(&f);
        assert_eq!(d.count(), 4);
    }

    #[test]
    fn delta_delta_is_zero() {
        for n in 3..=8 {
            let skel = Skeleton::new(n).unwrap();
            for v in 0..n {
                let u = skel.vertex_chain(&[v]);
                assert!(skel.coboundary1(&skel.coboundary0(&u)).is_zero());
            }
            // a few arbitrary subsets via bit patterns
            for pattern in [0b1011usize, 0b0110, 0b111, (1 << n) - 2] {
                let mut u = skel.zero_chain0();
                for v in 0..n {
                    if pattern >> v & 1 == 1 {
                        u.set(v, true);
                    }
                }
                assert!(skel.coboundary1(&skel.coboundary0(&u)).is_zero());
            }
        }
    }

    #[test]
    fn kernel_classification() {
        let skel = Skeleton::new(6).unwrap();
        assert_eq!(
            skel.kernel_vertex_witness(&skel.full_chain0()),
            KernelClass::Full
        );
        assert_eq!(
            skel.kernel_vertex_witness(&skel.zero_chain0()),
            KernelClass::Empty
        );
        let skel4 = Skeleton::new(4).unwrap();
        match skel4.kernel_vertex_witness(&skel4.vertex_chain(&[0, 1])) {
            KernelClass::NotKernel { witness_edge } => {
                // smallest cut edge is {0,2}
                assert_eq!(skel4.edge(witness_edge), [0, 2]);
            }
            other => panic!("expected NotKernel, got {other:?}"),
        }
    }

    #[test]
    fn cut_decomposition_round_trip() {
        let skel = Skeleton::new(5).unwrap();
        let f = skel.coboundary0(&skel.vertex_chain(&[0, 1]));
        let u = skel.cut_decomposition(&f).unwrap();
        assert_eq!(skel.coboundary0(&u), f);
        let count = u.count();
        assert!(count == 2 || count == 3);

        assert!(skel.cut_decomposition(&skel.zero_chain1()).unwrap().is_zero());
    }

    #[test]
    fn cut_decomposition_rejects_non_cocycles() {
        let skel = Skeleton::new(3).unwrap();
        let f = full_edges(&skel);
        assert_eq!(
            skel.cut_decomposition(&f),
            Err(ComplexError::NotACocycle {
                witness_triangle: 0
            })
        );
    }

    #[test]
    fn kernel_of_coboundary1_is_cut_space_n4() {
        // exhaustive over all 2^6 edge sets
        let skel = Skeleton::new(4).unwrap();
        for mask in 0u32..(1 << skel.edge_count()) {
            let mut f = skel.zero_chain1();
            for e in 0..skel.edge_count() {
                if mask >> e & 1 == 1 {
                    f.set(e, true);
                }
            }
            let in_kernel = skel.coboundary1(&f).is_zero();
            match skel.cut_decomposition(&f) {
                Ok(u) => {
                    assert!(in_kernel);
                    assert_eq!(skel.coboundary0(&u), f);
                }
                Err(_) => assert!(!in_kernel),
            }
        }
    }

    #[test]
    fn uniform_weights() {
        let skel = Skeleton::new(4).unwrap();
        let p = VertexDistribution::uniform(4);
        let e = skel.edge_chain(&[(0, 1)]);
        assert_eq!(p.chain1_weight(&skel, &e), ratio(1, 6));
        let mut t = skel.zero_chain2();
        t.set(0, true);
        assert_eq!(p.chain2_weight(&skel, &t), ratio(1, 4));
    }

    #[test]
    fn extended_weights_are_distributions() {
        let skel = Skeleton::new(6).unwrap();
        let p = VertexDistribution::from_weights(vec![
            ratio(1, 2),
            ratio(1, 4),
            ratio(1, 8),
            ratio(1, 16),
            ratio(1, 32),
            ratio(1, 32),
        ])
        .unwrap();
        let mut all_edges = skel.zero_chain1();
        for i in 0..skel.edge_count() {
            all_edges.set(i, true);
        }
        let mut all_tris = skel.zero_chain2();
        for i in 0..skel.triangle_count() {
            all_tris.set(i, true);
        }
        assert_eq!(p.chain1_weight(&skel, &all_edges), rat_int(1));
        assert_eq!(p.chain2_weight(&skel, &all_tris), rat_int(1));
    }

    #[test]
    fn distribution_validation() {
        assert!(matches!(
            VertexDistribution::from_weights(vec![ratio(1, 2), ratio(1, 2), ratio(-1, 2)]),
            Err(DistributionError::NegativeWeight { vertex: 2 })
        ));
        assert!(matches!(
            VertexDistribution::from_weights(vec![ratio(1, 2), ratio(1, 4)]),
            Err(DistributionError::NotNormalized { .. })
        ));
    }
}
