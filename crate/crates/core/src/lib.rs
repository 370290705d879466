//! Exact machinery for topological overlap in the plane.
//!
//! Given `n` generic points in the plane, every triple spans a triangle and
//! some point of the plane is covered by many of these triangles: at least a
//! `2/9 - 3/n` fraction of them, and under arbitrary vertex weights at least
//! a `1/13 - 3/(13(n-1))` weighted fraction. This crate implements, over
//! exact rationals end to end:
//!
//! * the GF(2) chain calculus of the complete 2-skeleton and its coboundary
//!   expansion inequalities ([`complex`], [`expansion`]),
//! * certified overlap-point search for straight-edge instances
//!   ([`geom`], [`overlap`]),
//! * well-behaved dual triangulations of the unit ball, the intersection map,
//!   its duality identities, and the folding-map construction whose odd
//!   defect count realizes the overlap obstruction ([`dual`]),
//! * the minimax-dual distribution on the plane, via an exact-rational
//!   simplex solve of the underlying zero-sum game ([`game`], [`simplex`]).
//!
//! Nothing in a certified path rounds: every bound is checked as an exact
//! rational inequality.

pub mod bits;
pub mod complex;
pub mod dual;
pub mod expansion;
pub mod game;
pub mod geom;
pub mod overlap;
pub mod rational;
pub mod simplex;
