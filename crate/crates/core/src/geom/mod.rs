//! Exact-rational planar geometry: points, generic straight-edge instances,
//! and the integer predicate kernel underneath them.

pub mod exact;

mod instance;

pub use instance::{
    random_instance, AffineInstance, DistributionMode, GeometryError, RationalPoint,
};
