//! Construction of candidate well-behaved triangulations.
//!
//! The ball is covered by an adaptively refined dyadic grid, but a plain
//! grid can never be well behaved near a placed vertex: every image segment
//! leaving `f(v)` must exit the containing triangle `t*_v`, the neighbor
//! across each `t*_v` edge has only two other edges, and each of those may
//! meet at most one image at `v`. So at most six images can leave `t*_v`,
//! split two-two-two across its sides. Each instance vertex therefore gets a
//! hand-built gadget inside a private 2x2 block of grid cells:
//!
//! * guard rays hugging every image plus compass fillers, so consecutive
//!   rays always sandwich at most one image;
//! * a hexagonal core: `t*_v` on three splitter rays chosen so each side
//!   faces at most two images, plus one switch triangle per side whose apex
//!   ray separates that side's image pair;
//! * a star-polygon ring on all rays, zipped angularly out to the block
//!   boundary, with extra boundary vertices injected into every angular
//!   window so no mesh edge ever spans two images of the same star.
//!
//! Outside the blocks the grid refines wherever two images sharing a vertex
//! approach each other (their separation grows linearly away from the shared
//! vertex, so this terminates), and coarsens to 1/8 cells elsewhere. All
//! vertices are jittered deterministically from the seed. The assembled
//! complex must tile exactly (positive triangles, manifold edges, one
//! boundary cycle, area identity) or construction fails.
//!
//! Nothing downstream trusts this construction: the eight-property validator
//! re-certifies the result from scratch.

use super::{DualTriangulation, NO_TRIANGLE};
use crate::geom::exact::{self, HPt, HVec};
use crate::geom::{AffineInstance, RationalPoint};
use crate::rational::{ratio, Rational};
use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap};

const MAX_LEVEL: u32 = 58;
const MAX_LEAVES: usize = 2_000_000;
/// Dyadic scale for conservative integer bounding boxes.
const IBOX_SHIFT: usize = 20;

/// Why a construction attempt was abandoned. The refinement driver treats
/// any of these as a failed round.
#[derive(Clone, Debug)]
pub enum BuildError {
    /// The adaptive grid exceeded its size or depth budget.
    Budget { detail: String },
    /// No valid splitter/apex structure exists at this vertex. With more
    /// than six images (n > 7) this is a theorem, not bad luck: a triangle
    /// has only three sides and each can pass at most two images.
    Gadget { vertex: usize, detail: String },
    /// A geometric invariant failed while assembling the complex.
    Geometry { detail: String },
}

impl std::fmt::Display for BuildError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            BuildError::Budget { detail } => write!(f, "mesh budget exceeded: {detail}"),
            BuildError::Gadget { vertex, detail } => {
                write!(f, "no valid vertex gadget at vertex {vertex}: {detail}")
            }
            BuildError::Geometry { detail } => write!(f, "mesh geometry failure: {detail}"),
        }
    }
}

impl std::error::Error for BuildError {}

fn geom_err<T>(detail: impl Into<String>) -> Result<T, BuildError> {
    Err(BuildError::Geometry {
        detail: detail.into(),
    })
}

fn tag_err(e: BuildError, tag: &str) -> BuildError {
    match e {
        BuildError::Geometry { detail } => BuildError::Geometry {
            detail: format!("{tag}: {detail}"),
        },
        other => other,
    }
}

// ---------------------------------------------------------------------------
// deterministic jitter

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    x ^ (x >> 31)
}

fn hash_chain(seed: u64, parts: &[u64]) -> u64 {
    let mut h = splitmix64(seed ^ 0xA076_1D64_78BD_642F);
    for &p in parts {
        h = splitmix64(h ^ p);
    }
    h
}

/// A signed jitter coefficient in `[-2^20, 2^20)`.
fn jitter_coeff(h: u64) -> i64 {
    (h & ((1 << 21) - 1)) as i64 - (1 << 20)
}

// ---------------------------------------------------------------------------
// dyadic cells

fn pow2(e: usize) -> BigInt {
    BigInt::one() << e
}

/// Dyadic coordinate `-1 + i * 2^(1-level)` as an exact rational.
fn dyadic(level: u32, i: u64) -> Rational {
    Rational::new(BigInt::from(i) * 2 - pow2(level as usize), pow2(level as usize))
}

/// The same coordinate scaled by `2^MAX_LEVEL`, as the exact integer key.
fn dyadic_key(level: u32, i: u64) -> i128 {
    debug_assert!(level <= MAX_LEVEL);
    ((i as i128) << (MAX_LEVEL + 1 - level)) - (1i128 << MAX_LEVEL)
}

fn key_to_rational(k: i128) -> Rational {
    Rational::new(BigInt::from(k), pow2(MAX_LEVEL as usize))
}

/// Cell side `2^(1-level)`.
fn side_of(level: u32) -> Rational {
    Rational::new(BigInt::from(2), pow2(level as usize))
}

/// Jitter with amplitude `side/8 = 2^(-level-2)` at 21-bit granularity.
fn jitter_value(k: i64, level: u32) -> Rational {
    Rational::new(BigInt::from(k), pow2(level as usize + 23))
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
struct Cell {
    level: u32,
    ix: u64,
    iy: u64,
}

impl Cell {
    fn x0(&self) -> Rational {
        dyadic(self.level, self.ix)
    }

    fn y0(&self) -> Rational {
        dyadic(self.level, self.iy)
    }

    fn x1(&self) -> Rational {
        dyadic(self.level, self.ix + 1)
    }

    fn y1(&self) -> Rational {
        dyadic(self.level, self.iy + 1)
    }

    fn child(&self, dx: u64, dy: u64) -> Cell {
        Cell {
            level: self.level + 1,
            ix: 2 * self.ix + dx,
            iy: 2 * self.iy + dy,
        }
    }
}

/// Conservative integer box at the ibox scale.
#[derive(Clone, Copy, Debug)]
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

fn floor_scaled(r: &Rational) -> i64 {
    let scaled = r * Rational::from_integer(pow2(IBOX_SHIFT));
    scaled.floor().numer().to_i64().unwrap_or(i64::MAX / 4)
}

fn ibox_of_points(pts: &[&HPt]) -> IBox {
    let mut b = IBox {
        x0: i64::MAX / 4,
        x1: i64::MIN / 4,
        y0: i64::MAX / 4,
        y1: i64::MIN / 4,
    };
    for p in pts {
        let fx = floor_scaled(&p.x());
        let fy = floor_scaled(&p.y());
        b.x0 = b.x0.min(fx);
        b.x1 = b.x1.max(fx + 1);
        b.y0 = b.y0.min(fy);
        b.y1 = b.y1.max(fy + 1);
    }
    b
}

// ---------------------------------------------------------------------------
// direction (angular) helpers on top of the exact kernel

/// 0 = same direction as `u`, 1 = strictly counterclockwise within a half
/// turn, 2 = opposite, 3 = strictly clockwise within a half turn.
fn dir_class(u: &HVec, x: &HVec) -> u8 {
    match (exact::cross_sign(u, x), exact::dot_sign(u, x)) {
        (0, d) if d > 0 => 0,
        (c, _) if c > 0 => 1,
        (0, _) => 2,
        _ => 3,
    }
}

/// Compares counterclockwise arcs from `u`: `arc(u->a)` vs `arc(u->b)`.
fn arc_cmp(u: &HVec, a: &HVec, b: &HVec) -> Ordering {
    let (ca, cb) = (dir_class(u, a), dir_class(u, b));
    if ca != cb {
        return ca.cmp(&cb);
    }
    match ca {
        0 | 2 => Ordering::Equal,
        _ => match exact::cross_sign(a, b) {
            1 => Ordering::Less,
            -1 => Ordering::Greater,
            _ => Ordering::Equal,
        },
    }
}

/// True when `c` lies strictly inside the counterclockwise arc from `u` to
/// `w`; arcs may exceed a half turn.
fn ccw_between(u: &HVec, c: &HVec, w: &HVec) -> bool {
    dir_class(u, c) != 0 && dir_class(u, w) != 0 && arc_cmp(u, c, w) == Ordering::Less
}

fn hvec_big(v: &HVec) -> [BigInt; 2] {
    match v {
        HVec::Small([x, y]) => [BigInt::from(*x), BigInt::from(*y)],
        HVec::Big(b) => (**b).clone(),
    }
}

fn hvec_from_big(x: BigInt, y: BigInt) -> HVec {
    use num_integer::Integer;
    let g = x.gcd(&y);
    let (x, y) = if g.is_zero() || g.is_one() {
        (x, y)
    } else {
        (x / &g, y / &g)
    };
    match (x.to_i128(), y.to_i128()) {
        (Some(a), Some(b)) => HVec::Small([a, b]),
        _ => HVec::Big(Box::new([x, y])),
    }
}

/// `a*u + b*w`, reduced.
fn hvec_combine(u: &HVec, a: &BigInt, w: &HVec, b: &BigInt) -> HVec {
    let [ux, uy] = hvec_big(u);
    let [wx, wy] = hvec_big(w);
    hvec_from_big(a * ux + b * wx, a * uy + b * wy)
}

fn l1_norm(v: &HVec) -> BigInt {
    let [x, y] = hvec_big(v);
    x.abs() + y.abs()
}

/// The L1-weighted angular midpoint of the counterclockwise arc `(u, w)`,
/// valid for arcs under a half turn.
fn arc_midpoint(u: &HVec, w: &HVec) -> HVec {
    hvec_combine(u, &l1_norm(w), w, &l1_norm(u))
}

/// Rotates `d` by `±atan(2^-j)`: exact integer shear of the direction.
fn guard_pair(d: &HVec, j: usize) -> (HVec, HVec) {
    let [x, y] = hvec_big(d);
    let s = pow2(j);
    let minus = hvec_from_big(&s * &x + &y, &s * &y - &x);
    let plus = hvec_from_big(&s * &x - &y, &s * &y + &x);
    (minus, plus)
}

/// Position on the ray from `p` along `d` at distance `radius`, accurate to
/// a relative `2^-prec` (the L2 norm is normalized by an integer square
/// root). Keeping consecutive ray vertices at equal radii up to `2^-prec`
/// ensures ring chords are never close to radial, which the fan and zip
/// triangulations rely on.
fn place_on_ray_normalized(
    p: &HPt,
    d: &HVec,
    radius: &Rational,
    prec: usize,
    common_factor: &Rational,
) -> RationalPoint {
    let [dx, dy] = hvec_big(d);
    let s2 = (&dx * &dx + &dy * &dy) << (2 * prec);
    let root = s2.sqrt(); // floor
    let t = radius * common_factor * Rational::new(pow2(prec), root);
    RationalPoint::new(
        p.x() + Rational::from_integer(dx) * &t,
        p.y() + Rational::from_integer(dy) * &t,
    )
}

/// Sixteen primitive directions, counterclockwise from the positive x-axis,
/// with gaps under 27 degrees.
const COMPASS: [[i128; 2]; 16] = [
    [1, 0],
    [2, 1],
    [1, 1],
    [1, 2],
    [0, 1],
    [-1, 2],
    [-1, 1],
    [-2, 1],
    [-1, 0],
    [-2, -1],
    [-1, -1],
    [-1, -2],
    [0, -1],
    [1, -2],
    [1, -1],
    [2, -1],
];

// ---------------------------------------------------------------------------
// gadget blocks

#[derive(Clone, Debug)]
struct Block {
    vertex: usize,
    level: u32,
    /// Lower-left cell of the 2x2 block.
    bx: u64,
    by: u64,
}

impl Block {
    fn contains_cell_strictly(&self, c: &Cell) -> bool {
        if c.level >= self.level {
            return false;
        }
        let shift = self.level - c.level;
        for dx in 0..2u64 {
            for dy in 0..2u64 {
                if (self.bx + dx) >> shift == c.ix && (self.by + dy) >> shift == c.iy {
                    return true;
                }
            }
        }
        false
    }

    fn is_block_cell(&self, c: &Cell) -> bool {
        c.level == self.level
            && (c.ix == self.bx || c.ix == self.bx + 1)
            && (c.iy == self.by || c.iy == self.by + 1)
    }

    fn x0(&self) -> Rational {
        dyadic(self.level, self.bx)
    }

    fn y0(&self) -> Rational {
        dyadic(self.level, self.by)
    }

    fn x1(&self) -> Rational {
        dyadic(self.level, self.bx + 2)
    }

    fn y1(&self) -> Rational {
        dyadic(self.level, self.by + 2)
    }
}

// ---------------------------------------------------------------------------
// mesh accumulation

struct MeshBuilder {
    points: Vec<RationalPoint>,
    hpts: Vec<HPt>,
    triangles: Vec<[u32; 3]>,
}

impl MeshBuilder {
    fn add_vertex(&mut self, p: RationalPoint) -> u32 {
        let h = p.to_hpt();
        self.points.push(p);
        self.hpts.push(h);
        (self.points.len() - 1) as u32
    }

    fn hpt(&self, v: u32) -> &HPt {
        &self.hpts[v as usize]
    }

    fn add_triangle(&mut self, a: u32, b: u32, c: u32) -> Result<(), BuildError> {
        if exact::orient(self.hpt(a), self.hpt(b), self.hpt(c)) <= 0 {
            return geom_err(format!("non-ccw triangle ({a}, {b}, {c})"));
        }
        self.triangles.push([a, b, c]);
        Ok(())
    }
}

/// A vertex injected on a gadget block side, visible both to the gadget zip
/// and to the ambient cell fan across that side. It sits exactly on the
/// jittered boundary polyline, so inserting it never bends the boundary.
struct SideVertex {
    /// True if the side is horizontal (constant y).
    horizontal: bool,
    /// The pre-jitter line coordinate of the side (for membership tests).
    fixed: Rational,
    /// A pre-jitter coordinate strictly between the bracketing vertices'
    /// keys: decides which ambient cell side owns the vertex.
    member_along: Rational,
    /// The true coordinate along the side, used for ordering.
    sort_along: Rational,
    id: u32,
}

/// Angular scaffolding around one instance vertex, precomputed before any
/// triangles exist.
struct Gadget {
    /// All rays, counterclockwise; every gap holds at most one image.
    rays: Vec<HVec>,
    /// Ray indices of the hexagonal core, alternating splitter and apex.
    hex_ray: Vec<usize>,
    /// Positions of the core vertices (same order as `hex_ray`); indices 0,
    /// 2, 4 are the corners of `t*_v`.
    hex_pos: Vec<RationalPoint>,
    /// Radial normalization precision, tied to the guard tightness.
    prec: usize,
}

// ---------------------------------------------------------------------------
// entry point

/// Builds a candidate triangulation around a scaled instance. `mesh` caps
/// the gadget block size; halving it (and reseeding) is the refinement step.
pub fn build_triangulation(
    inst: &AffineInstance,
    mesh: &Rational,
    seed: u64,
) -> Result<DualTriangulation, BuildError> {
    let n = inst.n();
    let quarter2 = ratio(1, 16);
    if inst
        .hpoints()
        .iter()
        .any(|p| exact::dist2_origin(p) >= quarter2)
    {
        return geom_err("instance must be scaled strictly inside the 1/4 ball");
    }
    if !mesh.is_positive() {
        return geom_err("mesh must be positive");
    }

    let skel = inst.skeleton();
    let images: Vec<[u32; 2]> = skel.edges().to_vec();
    let image_boxes: Vec<IBox> = images
        .iter()
        .map(|&[a, b]| ibox_of_points(&[inst.hpoint(a as usize), inst.hpoint(b as usize)]))
        .collect();
    let incident: Vec<Vec<usize>> = (0..n)
        .map(|v| {
            images
                .iter()
                .enumerate()
                .filter(|(_, e)| e.contains(&(v as u32)))
                .map(|(i, _)| i)
                .collect()
        })
        .collect();

    let blocks = place_blocks(inst, &images, &incident, mesh)?;

    let mut leaves: Vec<(Cell, Option<usize>)> = Vec::new();
    explore(
        Cell {
            level: 0,
            ix: 0,
            iy: 0,
        },
        inst,
        &images,
        &image_boxes,
        &incident,
        &blocks,
        &mut leaves,
    )?;

    // deterministic leaf order
    leaves.sort_by_key(|(c, _)| (c.level, c.ix, c.iy));

    // corner vertices: every ordinary-leaf corner, plus block-cell corners on
    // the block perimeter. Key -> finest incident level (for jitter bounds).
    let mut corner_level: BTreeMap<(i128, i128), u32> = BTreeMap::new();
    for (cell, gadget) in &leaves {
        let keys: &[(u64, u64)] = match gadget {
            None => &[(0, 0), (1, 0), (0, 1), (1, 1)],
            Some(v) => {
                let b = &blocks[*v];
                match (cell.ix == b.bx, cell.iy == b.by) {
                    (true, true) => &[(0, 0), (1, 0), (0, 1)],
                    (false, true) => &[(0, 0), (1, 0), (1, 1)],
                    (true, false) => &[(0, 0), (0, 1), (1, 1)],
                    (false, false) => &[(1, 0), (0, 1), (1, 1)],
                }
            }
        };
        for &(dx, dy) in keys {
            let key = (
                dyadic_key(cell.level, cell.ix + dx),
                dyadic_key(cell.level, cell.iy + dy),
            );
            corner_level
                .entry(key)
                .and_modify(|l| *l = (*l).max(cell.level))
                .or_insert(cell.level);
        }
    }

    let mut mb = MeshBuilder {
        points: Vec::new(),
        hpts: Vec::new(),
        triangles: Vec::new(),
    };
    let mut by_col: BTreeMap<(i128, i128), u32> = BTreeMap::new(); // (x, y) -> id
    let mut by_row: BTreeMap<(i128, i128), u32> = BTreeMap::new(); // (y, x) -> id
    let one = ratio(1, 1);
    for (&(kx, ky), &level) in &corner_level {
        let h = hash_chain(
            seed,
            &[1, kx as u64, (kx >> 64) as u64, ky as u64, (ky >> 64) as u64],
        );
        let x = key_to_rational(kx) + jitter_value(jitter_coeff(h), level);
        let y = key_to_rational(ky) + jitter_value(jitter_coeff(splitmix64(h ^ 0x77)), level);
        if &x * &x + &y * &y > one {
            return geom_err("jittered corner escaped the unit ball");
        }
        let id = mb.add_vertex(RationalPoint::new(x, y));
        by_col.insert((kx, ky), id);
        by_row.insert((ky, kx), id);
    }

    // gadget scaffolding and injected boundary vertices, before any fans
    let mut side_vertices: Vec<SideVertex> = Vec::new();
    let mut gadgets: Vec<Option<Gadget>> = (0..n).map(|_| None).collect();
    for b in &blocks {
        let g = prepare_gadget(inst, b, seed, &mut mb, &by_col, &by_row, &mut side_vertices)?;
        gadgets[b.vertex] = Some(g);
    }

    for (cell, gadget) in &leaves {
        if gadget.is_none() {
            fan_cell(cell, seed, &mut mb, &by_col, &by_row, &side_vertices)?;
        }
    }

    for b in &blocks {
        let g = gadgets[b.vertex].as_ref().unwrap();
        build_gadget_interior(inst, b, g, seed, &mut mb, &by_col, &by_row, &side_vertices)?;
    }

    assemble(mb, mesh.clone(), seed)
}

// ---------------------------------------------------------------------------
// scales and blocks

fn place_blocks(
    inst: &AffineInstance,
    images: &[[u32; 2]],
    incident: &[Vec<usize>],
    mesh: &Rational,
) -> Result<Vec<Block>, BuildError> {
    let n = inst.n();
    let mut min_pair2: Option<Rational> = None;
    for a in 0..n {
        for b in (a + 1)..n {
            let d = exact::dist2(inst.hpoint(a), inst.hpoint(b));
            if min_pair2.as_ref().is_none_or(|m| d < *m) {
                min_pair2 = Some(d);
            }
        }
    }
    let min_pair2 = min_pair2.expect("n >= 3");

    let mut blocks = Vec::with_capacity(n);
    for v in 0..n {
        let mut d5sq = min_pair2.clone();
        for (e, &[a, b]) in images.iter().enumerate() {
            if incident[v].contains(&e) {
                continue;
            }
            let d = exact::dist2_point_segment(
                inst.hpoint(v),
                inst.hpoint(a as usize),
                inst.hpoint(b as usize),
            );
            if d < d5sq {
                d5sq = d;
            }
        }
        // block cell side: side <= min(pair/8, d5/4, mesh), side <= 1/32
        let bound2 = [
            &min_pair2 / ratio(64, 1),
            &d5sq / ratio(16, 1),
            mesh * mesh,
        ]
        .into_iter()
        .min()
        .unwrap();
        let mut level = 6u32;
        loop {
            let side = side_of(level);
            if &side * &side <= bound2 {
                break;
            }
            level += 1;
            if level > MAX_LEVEL - 2 {
                return Err(BuildError::Budget {
                    detail: format!("gadget block at vertex {v} below the depth floor"),
                });
            }
        }
        let side = side_of(level);
        let p = inst.point(v);
        let (bx, by) = (block_anchor(&p.x, &side), block_anchor(&p.y, &side));
        blocks.push(Block {
            vertex: v,
            level,
            bx,
            by,
        });
    }
    for a in 0..n {
        for b in (a + 1)..n {
            let (p, q) = (&blocks[a], &blocks[b]);
            let disjoint =
                p.x1() <= q.x0() || q.x1() <= p.x0() || p.y1() <= q.y0() || q.y1() <= p.y0();
            if !disjoint {
                return geom_err(format!("gadget blocks {a} and {b} overlap"));
            }
        }
    }
    Ok(blocks)
}

/// Anchor index such that the coordinate lies in the central half of the
/// two-cell span starting there.
fn block_anchor(coord: &Rational, side: &Rational) -> u64 {
    let shifted = (coord + ratio(1, 1)) / side;
    let idx = shifted
        .floor()
        .numer()
        .to_u64()
        .expect("coordinate well inside the domain");
    let frac_ge_half = &shifted - Rational::from_integer(BigInt::from(idx)) >= ratio(1, 2);
    if frac_ge_half {
        idx
    } else {
        idx - 1
    }
}

// ---------------------------------------------------------------------------
// adaptive grid

#[allow(clippy::too_many_arguments)]
fn explore(
    cell: Cell,
    inst: &AffineInstance,
    images: &[[u32; 2]],
    image_boxes: &[IBox],
    incident: &[Vec<usize>],
    blocks: &[Block],
    leaves: &mut Vec<(Cell, Option<usize>)>,
) -> Result<(), BuildError> {
    if leaves.len() > MAX_LEAVES {
        return Err(BuildError::Budget {
            detail: format!("more than {MAX_LEAVES} leaves"),
        });
    }
    for b in blocks {
        if b.is_block_cell(&cell) {
            leaves.push((cell, Some(b.vertex)));
            return Ok(());
        }
    }
    let split = cell.level < 4
        || blocks.iter().any(|b| b.contains_cell_strictly(&cell))
        || strip_rule_split(&cell, inst, images, image_boxes, incident);
    if split {
        if cell.level >= MAX_LEVEL {
            return Err(BuildError::Budget {
                detail: "refinement exceeded the depth floor".into(),
            });
        }
        for (dx, dy) in [(0, 0), (1, 0), (0, 1), (1, 1)] {
            explore(
                cell.child(dx, dy),
                inst,
                images,
                image_boxes,
                incident,
                blocks,
                leaves,
            )?;
        }
        return Ok(());
    }
    // keep the cell only when it sits safely inside the unit disk
    let side = side_of(cell.level);
    let margin = ratio(1, 1) - side / ratio(4, 1);
    let margin2 = &margin * &margin;
    let corners = [
        (cell.x0(), cell.y0()),
        (cell.x1(), cell.y0()),
        (cell.x0(), cell.y1()),
        (cell.x1(), cell.y1()),
    ];
    if corners.iter().all(|(x, y)| x * x + y * y <= margin2) {
        leaves.push((cell, None));
    }
    Ok(())
}

/// True when two images sharing a vertex both meet the cell inflated by an
/// eighth of its side: a fan edge of this cell could then cross both.
fn strip_rule_split(
    cell: &Cell,
    inst: &AffineInstance,
    images: &[[u32; 2]],
    image_boxes: &[IBox],
    incident: &[Vec<usize>],
) -> bool {
    let side = side_of(cell.level);
    let pad = &side / ratio(8, 1);
    let x0 = cell.x0() - &pad;
    let x1 = cell.x1() + &pad;
    let y0 = cell.y0() - &pad;
    let y1 = cell.y1() + &pad;
    let cell_box = IBox {
        x0: floor_scaled(&x0),
        x1: floor_scaled(&x1) + 1,
        y0: floor_scaled(&y0),
        y1: floor_scaled(&y1) + 1,
    };
    let mut corners: Option<[HPt; 4]> = None;
    let mut hit_cache: HashMap<usize, bool> = HashMap::new();
    let mut hits = |e: usize, corners: &mut Option<[HPt; 4]>| -> bool {
        if let Some(&h) = hit_cache.get(&e) {
            return h;
        }
        let result = if !cell_box.overlaps(&image_boxes[e]) {
            false
        } else {
            let [a, b] = images[e];
            let pa = inst.hpoint(a as usize);
            let pb = inst.hpoint(b as usize);
            let inside = |p: &HPt| {
                let (px, py) = (p.x(), p.y());
                px >= x0 && px <= x1 && py >= y0 && py <= y1
            };
            if inside(pa) || inside(pb) {
                true
            } else {
                let cs = corners.get_or_insert_with(|| {
                    [
                        HPt::from_rationals(&x0, &y0),
                        HPt::from_rationals(&x1, &y0),
                        HPt::from_rationals(&x1, &y1),
                        HPt::from_rationals(&x0, &y1),
                    ]
                });
                (0..4).any(|i| exact::segments_intersect(pa, pb, &cs[i], &cs[(i + 1) % 4]))
            }
        };
        hit_cache.insert(e, result);
        result
    };
    for list in incident {
        for (i, &e1) in list.iter().enumerate() {
            if !hits(e1, &mut corners) {
                continue;
            }
            for &e2 in &list[i + 1..] {
                if hits(e2, &mut corners) {
                    return true;
                }
            }
        }
    }
    false
}

// ---------------------------------------------------------------------------
// ordinary cell fans

fn side_points(
    mb: &MeshBuilder,
    by_row: &BTreeMap<(i128, i128), u32>,
    by_col: &BTreeMap<(i128, i128), u32>,
    side_vertices: &[SideVertex],
    horizontal: bool,
    fixed: i128,
    lo: i128,
    hi: i128,
    reverse: bool,
) -> Vec<u32> {
    // membership on the side comes from the pre-jitter keys, but the order
    // along it must follow the jittered positions the fans actually see
    let map = if horizontal { by_row } else { by_col };
    let along_of = |id: u32| -> Rational {
        let p = &mb.points[id as usize];
        if horizontal {
            p.x.clone()
        } else {
            p.y.clone()
        }
    };
    let mut found: Vec<(Rational, u32)> = map
        .range((fixed, lo + 1)..(fixed, hi))
        .map(|(_, &id)| (along_of(id), id))
        .collect();
    let fixed_r = key_to_rational(fixed);
    let lo_r = key_to_rational(lo);
    let hi_r = key_to_rational(hi);
    for sv in side_vertices {
        if sv.horizontal == horizontal
            && sv.fixed == fixed_r
            && sv.member_along > lo_r
            && sv.member_along < hi_r
        {
            found.push((sv.sort_along.clone(), sv.id));
        }
    }
    found.sort_by(|a, b| a.0.cmp(&b.0));
    if reverse {
        found.reverse();
    }
    found.into_iter().map(|(_, id)| id).collect()
}

fn fan_cell(
    cell: &Cell,
    seed: u64,
    mb: &mut MeshBuilder,
    by_col: &BTreeMap<(i128, i128), u32>,
    by_row: &BTreeMap<(i128, i128), u32>,
    side_vertices: &[SideVertex],
) -> Result<(), BuildError> {
    let kx0 = dyadic_key(cell.level, cell.ix);
    let kx1 = dyadic_key(cell.level, cell.ix + 1);
    let ky0 = dyadic_key(cell.level, cell.iy);
    let ky1 = dyadic_key(cell.level, cell.iy + 1);
    let corner = |a: i128, b: i128| -> Result<u32, BuildError> {
        by_col.get(&(a, b)).copied().ok_or(BuildError::Geometry {
            detail: "missing corner vertex".into(),
        })
    };

    let mut cycle: Vec<u32> = Vec::with_capacity(8);
    cycle.push(corner(kx0, ky0)?);
    cycle.extend(side_points(mb, by_row, by_col, side_vertices, true, ky0, kx0, kx1, false));
    cycle.push(corner(kx1, ky0)?);
    cycle.extend(side_points(mb, by_row, by_col, side_vertices, false, kx1, ky0, ky1, false));
    cycle.push(corner(kx1, ky1)?);
    cycle.extend(side_points(mb, by_row, by_col, side_vertices, true, ky1, kx0, kx1, true));
    cycle.push(corner(kx0, ky1)?);
    cycle.extend(side_points(mb, by_row, by_col, side_vertices, false, kx0, ky0, ky1, true));

    let h = hash_chain(seed, &[2, cell.level as u64, cell.ix, cell.iy]);
    let half = side_of(cell.level) / ratio(2, 1);
    let cx = cell.x0() + &half + jitter_value(jitter_coeff(h), cell.level);
    let cy = cell.y0() + &half + jitter_value(jitter_coeff(splitmix64(h ^ 0x77)), cell.level);
    let center = mb.add_vertex(RationalPoint::new(cx, cy));

    for i in 0..cycle.len() {
        mb.add_triangle(center, cycle[i], cycle[(i + 1) % cycle.len()])
            .map_err(|e| tag_err(e, "cell fan"))?;
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// gadget scaffolding

#[allow(clippy::too_many_arguments)]
fn prepare_gadget(
    inst: &AffineInstance,
    block: &Block,
    seed: u64,
    mb: &mut MeshBuilder,
    by_col: &BTreeMap<(i128, i128), u32>,
    by_row: &BTreeMap<(i128, i128), u32>,
    side_vertices: &mut Vec<SideVertex>,
) -> Result<Gadget, BuildError> {
    let v = block.vertex;
    let n = inst.n();
    let p = inst.hpoint(v);
    let gadget_err = |detail: String| BuildError::Gadget { vertex: v, detail };

    // image directions, counterclockwise
    let mut image_dirs: Vec<(HVec, usize)> = (0..n)
        .filter(|&u| u != v)
        .map(|u| (exact::direction(p, inst.hpoint(u)), u))
        .collect();
    image_dirs.sort_by(|a, b| exact::cmp_angle(&a.0, &b.0));
    let k = image_dirs.len();
    for i in 0..k {
        let (a, b) = (&image_dirs[i].0, &image_dirs[(i + 1) % k].0);
        if exact::cross_sign(a, b) == 0 && i + 1 < k {
            return Err(gadget_err("two collinear image directions".into()));
        }
    }
    let dirs: Vec<HVec> = image_dirs.iter().map(|d| d.0.clone()).collect();

    // guards hugging every image, compass and antipodal fillers, then the
    // splitter search; when no splitter triple fits, tighten the guards and
    // retry (narrow windows near image antipodes may need closer hugging)
    let r_core = Rational::new(BigInt::one(), pow2(block.level as usize + 3));
    #[allow(clippy::type_complexity)]
    let mut chosen: Option<(Vec<usize>, Vec<RationalPoint>, Vec<HVec>, Vec<Option<usize>>, usize)> =
        None;
    let mut j = 2usize;
    'tighten: while j <= 64 {
        // find the first tightness level where every guard is valid
        let mut guards: Vec<(HVec, HVec)> = Vec::new();
        loop {
            guards.clear();
            for d in &dirs {
                guards.push(guard_pair(d, j));
            }
            let ok = (0..k).all(|i| {
                let next = &guards[(i + 1) % k].0;
                exact::cross_sign(&guards[i].0, &dirs[i]) > 0
                    && exact::cross_sign(&dirs[i], &guards[i].1) > 0
                    && ccw_between(&dirs[i], next, &dirs[(i + 1) % k])
                    && ccw_between(&dirs[i], &guards[i].1, next)
            });
            if ok {
                break;
            }
            j += 1;
            if j > 64 {
                return Err(gadget_err("guard rays did not stabilize".into()));
            }
        }

        // rays: guards plus fillers (compass and guard antipodes) that land
        // strictly inside image-free arcs
        let mut rays: Vec<HVec> = Vec::new();
        for g in &guards {
            rays.push(g.0.clone());
            rays.push(g.1.clone());
        }
        let mut fillers: Vec<HVec> = COMPASS.iter().map(|&c| HVec::Small(c)).collect();
        for g in &guards {
            for side in [&g.0, &g.1] {
                let [x, y] = hvec_big(side);
                fillers.push(hvec_from_big(-x, -y));
            }
        }
        for dir in fillers {
            let free = (0..k).any(|i| {
                let from = &guards[i].1;
                let to = &guards[(i + 1) % k].0;
                ccw_between(from, &dir, to)
            });
            if free && !rays.iter().any(|r| {
                exact::cross_sign(r, &dir) == 0 && exact::dot_sign(r, &dir) > 0
            }) {
                rays.push(dir);
            }
        }
        rays.sort_by(exact::cmp_angle);
        let m = rays.len();
        for i in 0..m {
            // every gap, including the wrap-around one, stays under a
            // quarter turn (the compass fillers guarantee this)
            let (a, b) = (&rays[i], &rays[(i + 1) % m]);
            if !(exact::cross_sign(a, b) > 0 && exact::dot_sign(a, b) > 0) {
                return Err(gadget_err(format!("ray gap {i} is not acute")));
            }
        }
        let mut gap_image: Vec<Option<usize>> = vec![None; m];
        for (img, d) in dirs.iter().enumerate() {
            let gap = (0..m)
                .find(|&i| ccw_between(&rays[i], d, &rays[(i + 1) % m]))
                .ok_or_else(|| gadget_err(format!("image {img} not inside any ray gap")))?;
            if gap_image[gap].is_some() {
                return Err(gadget_err(format!("two images in ray gap {gap}")));
            }
            gap_image[gap] = Some(img);
        }

        // splitters: three rays, each sector under a half turn, holding at
        // most two images, and admitting a switch apex ray
        let sector_images = |from: usize, to: usize| -> Vec<usize> {
            let mut out = Vec::new();
            let mut g = from;
            while g != to {
                if let Some(img) = gap_image[g] {
                    out.push(img);
                }
                g = (g + 1) % m;
            }
            out
        };
        let apex_for = |from: usize, to: usize, imgs: &[usize]| -> Option<usize> {
            match imgs {
                [] => {
                    let mut interior = Vec::new();
                    let mut g = (from + 1) % m;
                    while g != to {
                        interior.push(g);
                        g = (g + 1) % m;
                    }
                    if interior.is_empty() {
                        None
                    } else {
                        Some(interior[interior.len() / 2])
                    }
                }
                [a] => {
                    let da = &dirs[*a];
                    let mut g = (from + 1) % m;
                    while g != to {
                        if ccw_between(da, &rays[g], &rays[to]) {
                            return Some(g);
                        }
                        g = (g + 1) % m;
                    }
                    None
                }
                [a, b] => {
                    let (da, db) = (&dirs[*a], &dirs[*b]);
                    let mut g = (from + 1) % m;
                    while g != to {
                        if ccw_between(da, &rays[g], db) {
                            return Some(g);
                        }
                        g = (g + 1) % m;
                    }
                    None
                }
                _ => None,
            }
        };
        // one radial factor for the whole core: relative jitter 2^-12
        let prec = j + 30;
        let core_factor = Rational::new(
            BigInt::from((1i64 << 32) + jitter_coeff(hash_chain(seed, &[3, v as u64, 0]))),
            pow2(32),
        );

        'search: for sa in 0..m {
            for sb in (sa + 1)..m {
                for sc in (sb + 1)..m {
                    let sectors = [(sa, sb), (sb, sc), (sc, sa)];
                    if !(exact::cross_sign(&rays[sa], &rays[sb]) > 0
                        && exact::cross_sign(&rays[sb], &rays[sc]) > 0
                        && exact::cross_sign(&rays[sc], &rays[sa]) > 0)
                    {
                        continue;
                    }
                    let imgs: Vec<Vec<usize>> = sectors
                        .iter()
                        .map(|&(f, t)| sector_images(f, t))
                        .collect();
                    if imgs.iter().any(|sct| sct.len() > 2) {
                        continue;
                    }
                    let apexes: Option<Vec<usize>> = sectors
                        .iter()
                        .zip(&imgs)
                        .map(|(&(f, t), sct)| apex_for(f, t, sct))
                        .collect();
                    let Some(apexes) = apexes else { continue };
                    // apexes sit strictly outside the corner radius so thin
                    // switch triangles can never invert
                    let apex_radius = &r_core * ratio(9, 8);
                    let ray_seq = vec![sa, apexes[0], sb, apexes[1], sc, apexes[2]];
                    let pos: Vec<RationalPoint> = ray_seq
                        .iter()
                        .enumerate()
                        .map(|(slot, &r)| {
                            let radius = if slot % 2 == 0 { &r_core } else { &apex_radius };
                            place_on_ray_normalized(p, &rays[r], radius, prec, &core_factor)
                        })
                        .collect();
                    if verify_hexcore(inst, v, &pos) {
                        chosen = Some((ray_seq, pos, rays.clone(), gap_image.clone(), prec));
                        break 'search;
                    }
                }
            }
        }
        if chosen.is_some() {
            break 'tighten;
        }
        j += 2;
    }
    let Some((hex_ray, hex_pos, rays, gap_image, prec)) = chosen else {
        return Err(gadget_err(format!(
            "no splitter triple covers {k} images two per side"
        )));
    };
    let m = rays.len();

    // inject boundary vertices: one per angular window (ray gaps split at
    // image directions), so that no boundary or zip edge spans two images
    let mut windows: Vec<(HVec, HVec)> = Vec::new();
    for i in 0..m {
        let a = rays[i].clone();
        let b = rays[(i + 1) % m].clone();
        match gap_image[i] {
            None => windows.push((a, b)),
            Some(img) => {
                windows.push((a, dirs[img].clone()));
                windows.push((dirs[img].clone(), b));
            }
        }
    }
    for (wi, (u, w)) in windows.iter().enumerate() {
        let mid = arc_midpoint(u, w);
        debug_assert!(ccw_between(u, &mid, w));
        inject_window_vertex(inst, block, &mid, mb, by_col, by_row, side_vertices)
            .map_err(|d| gadget_err(format!("window {wi}: {d}")))?;
    }

    Ok(Gadget {
        rays,
        hex_ray,
        hex_pos,
        prec,
    })
}

/// Exact acceptance test for a candidate hexagonal core: the center point is
/// strictly inside `t*_v`, every hexagon boundary edge meets at most one
/// image, and every `t*_v` edge meets at most two.
fn verify_hexcore(inst: &AffineInstance, v: usize, pos: &[RationalPoint]) -> bool {
    let hp: Vec<HPt> = pos.iter().map(|q| q.to_hpt()).collect();
    let p = inst.hpoint(v);
    if !exact::strictly_in_triangle(p, &hp[0], &hp[2], &hp[4]) {
        return false;
    }
    // all six boundary triangles of the core must be counterclockwise
    for (a, b, c) in [(0, 1, 2), (2, 3, 4), (4, 5, 0), (0, 2, 4)] {
        if exact::orient(&hp[a], &hp[b], &hp[c]) <= 0 {
            return false;
        }
    }
    let images: Vec<&HPt> = (0..inst.n())
        .filter(|&u| u != v)
        .map(|u| inst.hpoint(u))
        .collect();
    let crossings = |a: &HPt, b: &HPt| -> usize {
        images
            .iter()
            .filter(|q| exact::segments_intersect(a, b, p, q))
            .count()
    };
    for i in 0..6 {
        if crossings(&hp[i], &hp[(i + 1) % 6]) > 1 {
            return false;
        }
    }
    for (a, b) in [(0, 2), (2, 4), (4, 0)] {
        if crossings(&hp[a], &hp[b]) > 2 {
            return false;
        }
    }
    true
}

/// One entry of the block boundary polyline: a vertex with its owning side
/// (0 south, 1 east, 2 north, 3 west) and its pre-jitter coordinate along
/// that side.
struct PolyEntry {
    id: u32,
    side: u8,
    member_along: Rational,
}

/// The block boundary cycle, counterclockwise from the SW corner, with side
/// bookkeeping. Every vertex currently on the perimeter appears.
fn block_polyline(
    block: &Block,
    mb: &MeshBuilder,
    by_col: &BTreeMap<(i128, i128), u32>,
    by_row: &BTreeMap<(i128, i128), u32>,
    side_vertices: &[SideVertex],
) -> Result<Vec<PolyEntry>, String> {
    let kx0 = dyadic_key(block.level, block.bx);
    let kx1 = dyadic_key(block.level, block.bx + 2);
    let ky0 = dyadic_key(block.level, block.by);
    let ky1 = dyadic_key(block.level, block.by + 2);
    let corner = |a: i128, b: i128| -> Result<u32, String> {
        by_col
            .get(&(a, b))
            .copied()
            .ok_or_else(|| "missing block corner vertex".to_string())
    };
    let mut out: Vec<PolyEntry> = Vec::new();
    let push_side = |side: u8,
                         corner_id: u32,
                         corner_member: i128,
                         horizontal: bool,
                         fixed: i128,
                         lo: i128,
                         hi: i128,
                         reverse: bool,
                         out: &mut Vec<PolyEntry>| {
        out.push(PolyEntry {
            id: corner_id,
            side,
            member_along: key_to_rational(corner_member),
        });
        let map = if horizontal { by_row } else { by_col };
        let along_of = |id: u32| -> Rational {
            let p = &mb.points[id as usize];
            if horizontal {
                p.x.clone()
            } else {
                p.y.clone()
            }
        };
        let mut found: Vec<(Rational, Rational, u32)> = map
            .range((fixed, lo + 1)..(fixed, hi))
            .map(|(&(_, along), &id)| (along_of(id), key_to_rational(along), id))
            .collect();
        let fixed_r = key_to_rational(fixed);
        let lo_r = key_to_rational(lo);
        let hi_r = key_to_rational(hi);
        for sv in side_vertices {
            if sv.horizontal == horizontal
                && sv.fixed == fixed_r
                && sv.member_along > lo_r
                && sv.member_along < hi_r
            {
                found.push((sv.sort_along.clone(), sv.member_along.clone(), sv.id));
            }
        }
        found.sort_by(|a, b| a.0.cmp(&b.0));
        if reverse {
            found.reverse();
        }
        for (_, member, id) in found {
            out.push(PolyEntry {
                id,
                side,
                member_along: member,
            });
        }
    };
    push_side(0, corner(kx0, ky0)?, kx0, true, ky0, kx0, kx1, false, &mut out);
    push_side(1, corner(kx1, ky0)?, ky0, false, kx1, ky0, ky1, false, &mut out);
    push_side(2, corner(kx1, ky1)?, kx1, true, ky1, kx0, kx1, true, &mut out);
    push_side(3, corner(kx0, ky1)?, ky1, false, kx0, ky0, ky1, true, &mut out);
    Ok(out)
}

/// Splits the boundary polyline segment crossed by the window's bisector
/// ray, inserting the crossing point as a new vertex. Sitting exactly on the
/// old segment, the new vertex subdivides the boundary without bending it,
/// and its direction from the gadget center is the bisector itself.
#[allow(clippy::too_many_arguments)]
fn inject_window_vertex(
    inst: &AffineInstance,
    block: &Block,
    mid: &HVec,
    mb: &mut MeshBuilder,
    by_col: &BTreeMap<(i128, i128), u32>,
    by_row: &BTreeMap<(i128, i128), u32>,
    side_vertices: &mut Vec<SideVertex>,
) -> Result<u32, String> {
    let v = block.vertex;
    let p = inst.hpoint(v);
    let poly = block_polyline(block, mb, by_col, by_row, side_vertices)?;
    let [mx, my] = hvec_big(mid);
    let along_ray = HPt::from_rationals(
        &(p.x() + Rational::from_integer(mx)),
        &(p.y() + Rational::from_integer(my)),
    );
    for i in 0..poly.len() {
        let a = &poly[i];
        let b = &poly[(i + 1) % poly.len()];
        let (pa, pb) = (mb.hpt(a.id).clone(), mb.hpt(b.id).clone());
        // the ray p -> mid crosses this boundary segment iff the endpoints
        // straddle the ray line on its forward side
        let oa = exact::orient(p, &along_ray, &pa);
        let ob = exact::orient(p, &along_ray, &pb);
        if oa == 0 || ob == 0 {
            // the ray hits a boundary vertex exactly; caller retries
            if exact::dot_sign(mid, &exact::direction(p, &pa)) > 0
                || exact::dot_sign(mid, &exact::direction(p, &pb)) > 0
            {
                return Err("bisector ray hits an existing boundary vertex".into());
            }
            continue;
        }
        if oa == ob {
            continue;
        }
        let q = exact::line_intersection(p, &along_ray, &pa, &pb)
            .ok_or("bisector parallel to a boundary segment")?;
        // forward side of the ray only
        if exact::dot_sign(mid, &exact::direction(p, &q)) <= 0 {
            continue;
        }
        debug_assert!(exact::on_segment(&q, &pa, &pb));
        let pos = RationalPoint::new(q.x(), q.y());
        let (horizontal, fixed) = match a.side {
            0 => (true, block.y0()),
            1 => (false, block.x1()),
            2 => (true, block.y1()),
            _ => (false, block.x0()),
        };
        // when the segment closes a side, the far endpoint's coordinate
        // lives on the next side's axis; use this side's end instead
        let b_member = if b.side == a.side {
            b.member_along.clone()
        } else {
            match a.side {
                0 => block.x1(),
                1 => block.y1(),
                2 => block.x0(),
                _ => block.y0(),
            }
        };
        let member_along = (&a.member_along + b_member) / ratio(2, 1);
        let sort_along = if horizontal { pos.x.clone() } else { pos.y.clone() };
        let id = mb.add_vertex(pos);
        if std::env::var("MESH_DEBUG").is_ok() {
            eprintln!(
                "inject v{} block({},{},{}) side={} bracket=({} m={}, {} m={}) member={} sort={}",
                id, block.level, block.bx, block.by, a.side,
                a.id, a.member_along, b.id, b.member_along, member_along, sort_along
            );
        }
        side_vertices.push(SideVertex {
            horizontal,
            fixed,
            member_along,
            sort_along,
            id,
        });
        return Ok(id);
    }
    Err("bisector ray never crosses the block boundary".into())
}

// ---------------------------------------------------------------------------
// gadget interiors

#[allow(clippy::too_many_arguments)]
fn build_gadget_interior(
    inst: &AffineInstance,
    block: &Block,
    gadget: &Gadget,
    seed: u64,
    mb: &mut MeshBuilder,
    by_col: &BTreeMap<(i128, i128), u32>,
    by_row: &BTreeMap<(i128, i128), u32>,
    side_vertices: &[SideVertex],
) -> Result<(), BuildError> {
    let v = block.vertex;
    let p = inst.hpoint(v).clone();
    let m = gadget.rays.len();

    // hexagonal core vertices and triangles
    let hex_ids: Vec<u32> = gadget
        .hex_pos
        .iter()
        .map(|q| mb.add_vertex(q.clone()))
        .collect();
    mb.add_triangle(hex_ids[0], hex_ids[2], hex_ids[4])?; // t*_v
    for i in [0usize, 2, 4] {
        mb.add_triangle(hex_ids[i], hex_ids[i + 1], hex_ids[(i + 2) % 6])?;
    }

    // full ring on all rays at radius side/8 (twice the core radius), all
    // vertices at one normalized radius so no ring chord is near-radial
    let r_ring = Rational::new(BigInt::one(), pow2(block.level as usize + 2));
    let ring_factor = Rational::new(
        BigInt::from((1i64 << 32) + jitter_coeff(hash_chain(seed, &[5, v as u64]))),
        pow2(32),
    );
    let ring_ids: Vec<u32> = (0..m)
        .map(|r| {
            mb.add_vertex(place_on_ray_normalized(
                &p,
                &gadget.rays[r],
                &r_ring,
                gadget.prec,
                &ring_factor,
            ))
        })
        .collect();

    // hexagon -> ring: fan each core vertex across its ray span
    for h in 0..6 {
        let r_from = gadget.hex_ray[h];
        let r_to = gadget.hex_ray[(h + 1) % 6];
        let mut r = r_from;
        while r != r_to {
            let r_next = (r + 1) % m;
            mb.add_triangle(hex_ids[h], ring_ids[r], ring_ids[r_next])
                .map_err(|e| tag_err(e, &format!("hex fan at core vertex {h}")))?;
            r = r_next;
        }
        mb.add_triangle(hex_ids[h], ring_ids[r_to], hex_ids[(h + 1) % 6])
            .map_err(|e| tag_err(e, &format!("core closing fan at vertex {h}")))?;
    }

    // block boundary cycle, counterclockwise from the SW corner
    let kx0 = dyadic_key(block.level, block.bx);
    let kx1 = dyadic_key(block.level, block.bx + 2);
    let ky0 = dyadic_key(block.level, block.by);
    let ky1 = dyadic_key(block.level, block.by + 2);
    let corner = |a: i128, b: i128| -> Result<u32, BuildError> {
        by_col.get(&(a, b)).copied().ok_or(BuildError::Geometry {
            detail: "missing block corner vertex".into(),
        })
    };
    let mut boundary: Vec<u32> = Vec::new();
    boundary.push(corner(kx0, ky0)?);
    boundary.extend(side_points(mb, by_row, by_col, side_vertices, true, ky0, kx0, kx1, false));
    boundary.push(corner(kx1, ky0)?);
    boundary.extend(side_points(mb, by_row, by_col, side_vertices, false, kx1, ky0, ky1, false));
    boundary.push(corner(kx1, ky1)?);
    boundary.extend(side_points(mb, by_row, by_col, side_vertices, true, ky1, kx0, kx1, true));
    boundary.push(corner(kx0, ky1)?);
    boundary.extend(side_points(mb, by_row, by_col, side_vertices, false, kx0, ky0, ky1, true));

    // angular zip from the ring to the boundary cycle
    let ring_items: Vec<(u32, HVec)> = (0..m)
        .map(|r| (ring_ids[r], gadget.rays[r].clone()))
        .collect();
    let boundary_items: Vec<(u32, HVec)> = boundary
        .iter()
        .map(|&id| (id, exact::direction(&p, mb.hpt(id))))
        .collect();
    zip_annulus(mb, &ring_items, &boundary_items)
}

/// Triangulates the annulus between two radially separated cycles that are
/// both star-shaped around the same center and angularly sorted.
fn zip_annulus(
    mb: &mut MeshBuilder,
    inner: &[(u32, HVec)],
    outer: &[(u32, HVec)],
) -> Result<(), BuildError> {
    let rotate_to_min = |items: &[(u32, HVec)]| -> Result<Vec<(u32, HVec)>, BuildError> {
        let min_idx = (0..items.len())
            .min_by(|&a, &b| exact::cmp_angle(&items[a].1, &items[b].1))
            .expect("nonempty cycle");
        let mut rotated: Vec<(u32, HVec)> = Vec::with_capacity(items.len());
        for i in 0..items.len() {
            rotated.push(items[(min_idx + i) % items.len()].clone());
        }
        for w in rotated.windows(2) {
            if exact::cmp_angle(&w[0].1, &w[1].1) != Ordering::Less {
                return geom_err("cycle is not strictly sorted by angle");
            }
        }
        Ok(rotated)
    };
    let inner = rotate_to_min(inner)?;
    let outer = rotate_to_min(outer)?;

    // merge both cycles by angle; inner vertices win ties
    #[derive(Clone)]
    enum Ev {
        Inner(usize),
        Outer(usize),
    }
    let mut events: Vec<Ev> = Vec::with_capacity(inner.len() + outer.len());
    let (mut i, mut o) = (0usize, 0usize);
    while i < inner.len() || o < outer.len() {
        let take_inner = if i == inner.len() {
            false
        } else if o == outer.len() {
            true
        } else {
            exact::cmp_angle(&inner[i].1, &outer[o].1) != Ordering::Greater
        };
        if take_inner {
            events.push(Ev::Inner(i));
            i += 1;
        } else {
            events.push(Ev::Outer(o));
            o += 1;
        }
    }

    // start from the first inner event; the last inner/outer seen before it
    // (cyclically) are the wrap-around partners
    let start = events
        .iter()
        .position(|e| matches!(e, Ev::Inner(_)))
        .expect("inner cycle nonempty");
    let mut cur_inner = match events[start] {
        Ev::Inner(idx) => idx,
        Ev::Outer(_) => unreachable!(),
    };
    let mut cur_outer = {
        // last outer event before `start`, cyclically
        let mut idx = None;
        for s in 1..=events.len() {
            let e = &events[(start + events.len() - s) % events.len()];
            if let Ev::Outer(oi) = e {
                idx = Some(*oi);
                break;
            }
        }
        idx.expect("outer cycle nonempty")
    };
    for s in 1..=events.len() {
        let e = &events[(start + s) % events.len()];
        match e {
            Ev::Inner(ni) => {
                mb.add_triangle(inner[cur_inner].0, outer[cur_outer].0, inner[*ni].0)?;
                cur_inner = *ni;
            }
            Ev::Outer(no) => {
                mb.add_triangle(inner[cur_inner].0, outer[cur_outer].0, outer[*no].0)?;
                cur_outer = *no;
            }
        }
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// assembly and global invariants

fn assemble(mb: MeshBuilder, mesh: Rational, seed: u64) -> Result<DualTriangulation, BuildError> {
    let nv = mb.points.len();
    let mut edge_ids: HashMap<(u32, u32), u32> = HashMap::new();
    let mut edges: Vec<[u32; 2]> = Vec::new();
    let mut edge_tris: Vec<[u32; 2]> = Vec::new();
    let mut tri_edges: Vec<[u32; 3]> = Vec::with_capacity(mb.triangles.len());
    for (t, &[a, b, c]) in mb.triangles.iter().enumerate() {
        let mut ids = [0u32; 3];
        for (slot, (x, y)) in [(a, b), (b, c), (c, a)].into_iter().enumerate() {
            let key = (x.min(y), x.max(y));
            let id = *edge_ids.entry(key).or_insert_with(|| {
                edges.push([key.0, key.1]);
                edge_tris.push([NO_TRIANGLE, NO_TRIANGLE]);
                (edges.len() - 1) as u32
            });
            let slots = &mut edge_tris[id as usize];
            if slots[0] == NO_TRIANGLE {
                slots[0] = t as u32;
            } else if slots[1] == NO_TRIANGLE {
                slots[1] = t as u32;
            } else {
                return geom_err(format!("edge {id} has more than two triangles"));
            }
            ids[slot] = id;
        }
        tri_edges.push(ids);
    }

    let nt = mb.triangles.len() as i64;
    let ne = edges.len() as i64;
    if nv as i64 - ne + nt != 1 {
        return geom_err(format!(
            "Euler characteristic {} is not a disk",
            nv as i64 - ne + nt
        ));
    }

    // boundary must be one simple cycle, entirely outside the 3/4 circle
    let origin = HPt::Small([0, 0, 1]);
    let three_quarters2 = ratio(9, 16);
    let mut boundary_next: HashMap<u32, u32> = HashMap::new();
    let mut boundary_count = 0usize;
    for (e, &[a, b]) in edges.iter().enumerate() {
        if edge_tris[e][1] != NO_TRIANGLE {
            continue;
        }
        boundary_count += 1;
        if exact::dist2_point_segment(&origin, &mb.hpts[a as usize], &mb.hpts[b as usize])
            <= three_quarters2
        {
            return geom_err("boundary edge inside the 3/4 circle");
        }
        // orient the boundary edge as its unique triangle does
        let t = edge_tris[e][0] as usize;
        let [p, q, r] = mb.triangles[t];
        let (from, to) = if (p, q) == (a, b) || (q, r) == (a, b) || (r, p) == (a, b) {
            (a, b)
        } else {
            (b, a)
        };
        if boundary_next.insert(from, to).is_some() {
            return geom_err("boundary is not a simple cycle");
        }
    }
    if boundary_count == 0 {
        return geom_err("no boundary edges");
    }
    let start = *boundary_next.keys().min().expect("boundary nonempty");
    let mut walk = start;
    let mut steps = 0usize;
    loop {
        walk = *boundary_next
            .get(&walk)
            .ok_or(BuildError::Geometry {
                detail: "boundary walk broke".into(),
            })?;
        steps += 1;
        if walk == start {
            break;
        }
        if steps > boundary_count {
            return geom_err("boundary has more than one cycle");
        }
    }
    if steps != boundary_count {
        return geom_err("boundary has more than one cycle");
    }

    // the signed areas of the triangles must add up to the area enclosed by
    // the boundary cycle: an exact certificate that the triangles tile
    let mut tri_area2 = Rational::zero();
    for &[a, b, c] in &mb.triangles {
        let (pa, pb, pc) = (
            &mb.points[a as usize],
            &mb.points[b as usize],
            &mb.points[c as usize],
        );
        tri_area2 += (&pb.x - &pa.x) * (&pc.y - &pa.y) - (&pc.x - &pa.x) * (&pb.y - &pa.y);
    }
    let mut boundary_area2 = Rational::zero();
    let mut walk = start;
    loop {
        let next = boundary_next[&walk];
        let (pa, pb) = (&mb.points[walk as usize], &mb.points[next as usize]);
        boundary_area2 += &pa.x * &pb.y - &pb.x * &pa.y;
        walk = next;
        if walk == start {
            break;
        }
    }
    if tri_area2 != boundary_area2 {
        return geom_err("triangle areas do not tile the boundary region");
    }

    // the origin must be covered (the region then contains the 3/4 disk,
    // because no boundary edge enters it)
    let quarter = ratio(1, 4);
    let origin_covered = mb.triangles.iter().any(|&[a, b, c]| {
        exact::in_closed_triangle(
            &origin,
            &mb.hpts[a as usize],
            &mb.hpts[b as usize],
            &mb.hpts[c as usize],
        )
    });
    if !origin_covered {
        return geom_err("origin is not covered by the mesh");
    }

    // half-ball flags
    let vertex_dist2: Vec<Rational> = mb.hpts.iter().map(exact::dist2_origin).collect();
    let vertex_in_half_ball: Vec<bool> = vertex_dist2.iter().map(|d| *d <= quarter).collect();
    let edge_meets_half_ball: Vec<bool> = edges
        .iter()
        .map(|&[a, b]| {
            if vertex_in_half_ball[a as usize] || vertex_in_half_ball[b as usize] {
                return true;
            }
            if vertex_dist2[a as usize] > three_quarters2
                && vertex_dist2[b as usize] > three_quarters2
            {
                return false;
            }
            exact::dist2_point_segment(&origin, &mb.hpts[a as usize], &mb.hpts[b as usize])
                <= quarter
        })
        .collect();
    let tri_meets_half_ball: Vec<bool> = (0..mb.triangles.len())
        .map(|t| {
            let te = tri_edges[t];
            te.iter().any(|&e| edge_meets_half_ball[e as usize]) || {
                let [a, b, c] = mb.triangles[t];
                exact::in_closed_triangle(
                    &origin,
                    &mb.hpts[a as usize],
                    &mb.hpts[b as usize],
                    &mb.hpts[c as usize],
                )
            }
        })
        .collect();

    let base_vertex = (0..nv)
        .filter(|&v| vertex_dist2[v] > quarter)
        .min_by(|&a, &b| exact::cmp_lex(&mb.hpts[a], &mb.hpts[b]))
        .ok_or(BuildError::Geometry {
            detail: "no vertex outside the half ball".into(),
        })? as u32;

    Ok(DualTriangulation {
        points: mb.points,
        hpts: mb.hpts,
        edges,
        triangles: mb.triangles,
        tri_edges,
        edge_tris,
        vertex_in_half_ball,
        edge_meets_half_ball,
        tri_meets_half_ball,
        base_vertex,
        mesh,
        seed,
    })
}
