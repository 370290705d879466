//! The plain-text instance file format.
//!
//! ```text
//! overlap-instance v1
//! n 4
//! seed 7
//! point 0 3/1 4/1
//! ...
//! p 0 1/4            (optional; omitted for a uniform distribution)
//! ```
//!
//! All rationals are canonical `num/den`. Writing what was read reproduces
//! the bytes exactly, so files can be diffed and hashed.

use overlap_core::complex::VertexDistribution;
use overlap_core::geom::{AffineInstance, RationalPoint};
use overlap_core::rational::{format_rational, parse_rational, Rational};

pub const FORMAT_TAG: &str = "overlap-instance v1";

/// A parsed instance file, preserving everything needed for byte-identical
/// round-trips.
#[derive(Clone, Debug)]
pub struct InstanceFile {
    pub points: Vec<RationalPoint>,
    /// Explicit vertex weights; `None` means uniform (and no `p` lines).
    pub weights: Option<Vec<Rational>>,
    pub seed: Option<u64>,
}

impl InstanceFile {
    pub fn to_instance(&self) -> Result<AffineInstance, String> {
        let n = self.points.len();
        let dist = match &self.weights {
            None => VertexDistribution::uniform(n),
            Some(w) => VertexDistribution::from_weights(w.clone()).map_err(|e| e.to_string())?,
        };
        AffineInstance::new(self.points.clone(), dist).map_err(|e| e.to_string())
    }

    pub fn write(&self) -> String {
        let mut out = String::new();
        out.push_str(FORMAT_TAG);
        out.push('\n');
        out.push_str(&format!("n {}\n", self.points.len()));
        if let Some(seed) = self.seed {
            out.push_str(&format!("seed {seed}\n"));
        }
        for (i, p) in self.points.iter().enumerate() {
            out.push_str(&format!(
                "point {} {} {}\n",
                i,
                format_rational(&p.x),
                format_rational(&p.y)
            ));
        }
        if let Some(weights) = &self.weights {
            for (i, w) in weights.iter().enumerate() {
                out.push_str(&format!("p {} {}\n", i, format_rational(w)));
            }
        }
        out
    }

    pub fn parse(text: &str) -> Result<InstanceFile, String> {
        let mut lines = text.lines();
        let header = lines.next().ok_or("empty instance file")?;
        if header.trim() != FORMAT_TAG {
            return Err(format!("unrecognized header {header:?}"));
        }
        let mut n: Option<usize> = None;
        let mut seed: Option<u64> = None;
        let mut points: Vec<Option<RationalPoint>> = Vec::new();
        let mut weights: Vec<Option<Rational>> = Vec::new();
        let mut has_weights = false;
        for (lineno, line) in lines.enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut tokens = line.split_whitespace();
            let key = tokens.next().unwrap();
            let rest: Vec<&str> = tokens.collect();
            let fail = |msg: &str| Err(format!("line {}: {msg}", lineno + 2));
            match key {
                "n" => {
                    let [value] = rest[..] else {
                        return fail("expected `n <count>`");
                    };
                    let count: usize = value.parse().map_err(|_| "bad vertex count")?;
                    n = Some(count);
                    points = vec![None; count];
                    weights = vec![None; count];
                }
                "seed" => {
                    let [value] = rest[..] else {
                        return fail("expected `seed <u64>`");
                    };
                    seed = Some(value.parse().map_err(|_| "bad seed")?);
                }
                "point" => {
                    let [idx, x, y] = rest[..] else {
                        return fail("expected `point <idx> <x> <y>`");
                    };
                    let idx: usize = idx.parse().map_err(|_| "bad point index")?;
                    if idx >= points.len() {
                        return fail("point index out of range (missing or bad `n` line?)");
                    }
                    if points[idx].is_some() {
                        return fail("duplicate point index");
                    }
                    points[idx] = Some(RationalPoint::new(parse_rational(x)?, parse_rational(y)?));
                }
                "p" => {
                    let [idx, w] = rest[..] else {
                        return fail("expected `p <idx> <weight>`");
                    };
                    let idx: usize = idx.parse().map_err(|_| "bad weight index")?;
                    if idx >= weights.len() {
                        return fail("weight index out of range");
                    }
                    if weights[idx].is_some() {
                        return fail("duplicate weight index");
                    }
                    has_weights = true;
                    weights[idx] = Some(parse_rational(w)?);
                }
                other => return fail(&format!("unknown directive {other:?}")),
            }
        }
        let n = n.ok_or("missing `n` line")?;
        let points: Vec<RationalPoint> = points
            .into_iter()
            .enumerate()
            .map(|(i, p)| p.ok_or(format!("missing point {i}")))
            .collect::<Result<_, _>>()?;
        debug_assert_eq!(points.len(), n);
        let weights = if has_weights {
            Some(
                weights
                    .into_iter()
                    .enumerate()
                    .map(|(i, w)| w.ok_or(format!("missing weight {i}")))
                    .collect::<Result<Vec<_>, _>>()?,
            )
        } else {
            None
        };
        Ok(InstanceFile {
            points,
            weights,
            seed,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use overlap_core::rational::ratio;

    #[test]
    fn round_trip_is_byte_identical() {
        let file = InstanceFile {
            points: vec![
                RationalPoint::from_ints(0, 0),
                RationalPoint::from_ints(7, 1),
                RationalPoint::new(ratio(1, 3), ratio(-4, 9)),
            ],
            weights: Some(vec![ratio(1, 2), ratio(1, 3), ratio(1, 6)]),
            seed: Some(99),
        };
        let text = file.write();
        let parsed = InstanceFile::parse(&text).unwrap();
        assert_eq!(parsed.write(), text);
        assert!(parsed.to_instance().is_ok());
    }

    #[test]
    fn rejects_malformed_files() {
        assert!(InstanceFile::parse("").is_err());
        assert!(InstanceFile::parse("wrong header\nn 3\n").is_err());
        let missing = format!("{FORMAT_TAG}\nn 3\npoint 0 0/1 0/1\n");
        assert!(InstanceFile::parse(&missing).is_err());
    }
}
