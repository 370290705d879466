//! Straight-edge instances: `n` generic rational points realizing the
//! complete 2-skeleton in the plane.
//!
//! Genericity means no two coincident and no three collinear points. It is
//! validated at construction and never silently repaired: exact certificates
//! downstream would be meaningless on a perturbed copy.

use crate::complex::{Skeleton, VertexDistribution};
use crate::geom::exact::{self, HPt};
use crate::rational::Rational;
use num_bigint::BigInt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// A point of the plane with exact rational coordinates.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Debug)]
pub struct RationalPoint {
    pub x: Rational,
    pub y: Rational,
}

impl RationalPoint {
    pub fn new(x: Rational, y: Rational) -> Self {
        RationalPoint { x, y }
    }

    pub fn from_ints(x: i64, y: i64) -> Self {
        RationalPoint {
            x: Rational::from_integer(BigInt::from(x)),
            y: Rational::from_integer(BigInt::from(y)),
        }
    }

    pub fn to_hpt(&self) -> HPt {
        HPt::from_rationals(&self.x, &self.y)
    }
}

impl std::fmt::Display for RationalPoint {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "({}, {})",
            crate::rational::format_rational(&self.x),
            crate::rational::format_rational(&self.y)
        )
    }
}

/// Validation failures for instances.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum GeometryError {
    TooFewPoints { n: usize },
    CoincidentPoints { a: usize, b: usize },
    CollinearPoints { a: usize, b: usize, c: usize },
    DistributionMismatch { points: usize, weights: usize },
}

impl std::fmt::Display for GeometryError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            GeometryError::TooFewPoints { n } => write!(f, "need at least 3 points, got {n}"),
            GeometryError::CoincidentPoints { a, b } => {
                write!(f, "degenerate instance: points {a} and {b} coincide")
            }
            GeometryError::CollinearPoints { a, b, c } => {
                write!(f, "degenerate instance: points {a}, {b}, {c} are collinear")
            }
            GeometryError::DistributionMismatch { points, weights } => {
                write!(f, "{points} points but {weights} vertex weights")
            }
        }
    }
}

impl std::error::Error for GeometryError {}

/// How generated instances pick their vertex distribution.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum DistributionMode {
    Uniform,
    /// Independent positive integer weights, normalized exactly.
    RandomRational,
}

/// `n` generic rational points with a vertex distribution: the straight-edge
/// realization of the complete 2-skeleton. Edges are segments and triangles
/// are closed filled triangles between the placed vertices.
#[derive(Clone, Debug)]
pub struct AffineInstance {
    skeleton: Skeleton,
    points: Vec<RationalPoint>,
    hpoints: Vec<HPt>,
    distribution: VertexDistribution,
}

impl AffineInstance {
    pub fn new(
        points: Vec<RationalPoint>,
        distribution: VertexDistribution,
    ) -> Result<Self, GeometryError> {
        let n = points.len();
        if n < 3 {
            return Err(GeometryError::TooFewPoints { n });
        }
        if distribution.n() != n {
            return Err(GeometryError::DistributionMismatch {
                points: n,
                weights: distribution.n(),
            });
        }
        let hpoints: Vec<HPt> = points.iter().map(|p| p.to_hpt()).collect();
        for a in 0..n {
            for b in (a + 1)..n {
                if exact::points_equal(&hpoints[a], &hpoints[b]) {
                    return Err(GeometryError::CoincidentPoints { a, b });
                }
            }
        }
        for a in 0..n {
            for b in (a + 1)..n {
                for c in (b + 1)..n {
                    if exact::orient(&hpoints[a], &hpoints[b], &hpoints[c]) == 0 {
                        return Err(GeometryError::CollinearPoints { a, b, c });
                    }
                }
            }
        }
        let skeleton = Skeleton::new(n).expect("n >= 3 checked above");
        Ok(AffineInstance {
            skeleton,
            points,
            hpoints,
            distribution,
        })
    }

    pub fn uniform(points: Vec<RationalPoint>) -> Result<Self, GeometryError> {
        let n = points.len();
        AffineInstance::new(points, VertexDistribution::uniform(n))
    }

    pub fn n(&self) -> usize {
        self.points.len()
    }

    pub fn skeleton(&self) -> &Skeleton {
        &self.skeleton
    }

    pub fn points(&self) -> &[RationalPoint] {
        &self.points
    }

    pub fn point(&self, v: usize) -> &RationalPoint {
        &self.points[v]
    }

    pub fn hpoint(&self, v: usize) -> &HPt {
        &self.hpoints[v]
    }

    pub fn hpoints(&self) -> &[HPt] {
        &self.hpoints
    }

    pub fn distribution(&self) -> &VertexDistribution {
        &self.distribution
    }

    /// Same points under a different vertex distribution.
    pub fn with_distribution(&self, distribution: VertexDistribution) -> Result<Self, GeometryError> {
        if distribution.n() != self.n() {
            return Err(GeometryError::DistributionMismatch {
                points: self.n(),
                weights: distribution.n(),
            });
        }
        Ok(AffineInstance {
            skeleton: self.skeleton.clone(),
            points: self.points.clone(),
            hpoints: self.hpoints.clone(),
            distribution,
        })
    }

    /// Applies the exact affine map `q = origin + scale * (p - center)`.
    /// A positive scale preserves all orientation predicates, so the
    /// combinatorics of the instance are unchanged.
    pub fn similarity(&self, center: &RationalPoint, scale: &Rational) -> AffineInstance {
        assert!(scale > &Rational::from_integer(0.into()));
        let points: Vec<RationalPoint> = self
            .points
            .iter()
            .map(|p| RationalPoint::new((&p.x - &center.x) * scale, (&p.y - &center.y) * scale))
            .collect();
        let hpoints = points.iter().map(|p| p.to_hpt()).collect();
        AffineInstance {
            skeleton: self.skeleton.clone(),
            points,
            hpoints,
            distribution: self.distribution.clone(),
        }
    }
}

/// Coordinate range for generated instances (a 1024 x 1024 integer grid keeps
/// every downstream determinant within the i128 fast path).
const GEN_GRID: i64 = 1024;

/// Draws `n` generic integer-grid points, rejection-resampling any point that
/// collides with or is collinear through earlier ones. Deterministic per seed.
pub fn random_instance(n: usize, seed: u64, mode: DistributionMode) -> AffineInstance {
    assert!(n >= 3, "need at least 3 points");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut points: Vec<RationalPoint> = Vec::with_capacity(n);
    let mut hpoints: Vec<HPt> = Vec::with_capacity(n);
    while points.len() < n {
        let x = rng.gen_range(0..GEN_GRID);
        let y = rng.gen_range(0..GEN_GRID);
        let p = RationalPoint::from_ints(x, y);
        let hp = p.to_hpt();
        let clashes = hpoints.iter().any(|q| exact::points_equal(q, &hp))
            || pairs(hpoints.len())
                .any(|(a, b)| exact::orient(&hpoints[a], &hpoints[b], &hp) == 0);
        if !clashes {
            points.push(p);
            hpoints.push(hp);
        }
    }
    let distribution = match mode {
        DistributionMode::Uniform => VertexDistribution::uniform(n),
        DistributionMode::RandomRational => {
            let raw: Vec<i64> = (0..n).map(|_| rng.gen_range(1..=1 << 16)).collect();
            let total: i64 = raw.iter().sum();
            VertexDistribution::from_weights(
                raw.iter()
                    .map(|&w| Rational::new(w.into(), total.into()))
                    .collect(),
            )
            .expect("positive weights normalized exactly")
        }
    };
    AffineInstance::new(points, distribution).expect("rejection sampling yields a generic instance")
}

fn pairs(n: usize) -> impl Iterator<Item = (usize, usize)> {
    (0..n).flat_map(move |a| ((a + 1)..n).map(move |b| (a, b)))
}
