//! The minimax dual of overlap: a zero-sum game between a point player and a
//! vertex player.
//!
//! The point player picks a location `r`, the vertex player a vertex `v`, and
//! the payoff is the fraction of triangles at `v` whose image covers `r`:
//! `|{t : v ∈ t, r ∈ f(t)}| / C(n-1, 2)`. Since the payoff depends on `r`
//! only through its coverage set, an optimal mixed strategy for the point
//! player is supported on finitely many coverage classes, one representative
//! candidate point each. Solving the game exactly yields a distribution `μ`
//! on the plane with
//!
//! ```text
//! sum over t containing v of μ(f(t)) >= 1/13 - 3/(13(n-1))   for every v,
//! ```
//!
//! together with the adversarial vertex distribution `p*` certifying the
//! value from the other side.

use crate::complex::Chain2;
use crate::geom::{AffineInstance, RationalPoint};
use crate::overlap::{self, DepthCertificate};
use crate::rational::{binomial, Rational};
use crate::simplex;
use num_traits::{One, Signed, Zero};
use std::collections::HashMap;

/// One deduplicated coverage pattern with a representative point.
#[derive(Clone, Debug)]
pub struct GameRow {
    /// Lexicographically smallest candidate realizing this coverage.
    pub point: RationalPoint,
    pub coverage: Chain2,
    /// Payoff against each vertex.
    pub payoff: Vec<Rational>,
}

/// The full payoff matrix: rows are coverage patterns, columns are vertices.
#[derive(Clone, Debug)]
pub struct GameMatrix {
    pub n: usize,
    pub rows: Vec<GameRow>,
}

/// Exact equilibrium of the game.
#[derive(Clone, Debug)]
pub struct GameSolution {
    pub value: Rational,
    /// Point-player strategy, aligned with the matrix rows.
    pub mu: Vec<Rational>,
    /// Vertex-player strategy.
    pub p_star: Vec<Rational>,
}

/// Exactness audit of a solved game.
#[derive(Clone, Debug)]
pub struct DualityReport {
    /// `min_v` payoff of `μ` (equals the value).
    pub mu_guarantee: Rational,
    /// `max_r` payoff against `p*` (equals the value).
    pub p_star_cap: Rational,
    /// The weighted overlap certificate under `p*`; its depth equals the value.
    pub overlap_under_p_star: DepthCertificate,
}

/// Raised when recomputation contradicts the claimed equilibrium.
#[derive(Clone, Debug)]
pub struct GapDetected {
    pub detail: String,
}

impl std::fmt::Display for GapDetected {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "duality gap detected: {}", self.detail)
    }
}

impl std::error::Error for GapDetected {}

/// Builds the payoff matrix from the candidate coverage patterns,
/// deduplicated and with strictly dominated rows removed.
pub fn build_game(inst: &AffineInstance) -> GameMatrix {
    let n = inst.n();
    let skel = inst.skeleton();
    let denom = Rational::from_integer(binomial(n - 1, 2));
    let mut seen: HashMap<Chain2, usize> = HashMap::new();
    let mut patterns: Vec<(RationalPoint, Chain2)> = Vec::new();
    // candidate_points is sorted, so the first representative is the
    // lexicographically smallest point of its class
    for point in overlap::candidate_points(inst) {
        let cert = overlap::depth_at(inst, &point);
        if !seen.contains_key(&cert.covering) {
            seen.insert(cert.covering.clone(), patterns.len());
            patterns.push((point, cert.covering));
        }
    }
    // drop rows whose coverage is strictly contained in another pattern
    let dominated: Vec<bool> = patterns
        .iter()
        .map(|(_, cov)| {
            patterns
                .iter()
                .any(|(_, other)| other != cov && cov.is_subset(other))
        })
        .collect();
    let rows = patterns
        .into_iter()
        .zip(dominated)
        .filter(|(_, dom)| !dom)
        .map(|((point, coverage), _)| {
            let payoff = (0..n)
                .map(|v| {
                    let mut at_v = 0i64;
                    for t in coverage.iter_ones() {
                        if skel.triangle(t).contains(&(v as u32)) {
                            at_v += 1;
                        }
                    }
                    Rational::from_integer(at_v.into()) / &denom
                })
                .collect();
            GameRow {
                point,
                coverage,
                payoff,
            }
        })
        .collect();
    GameMatrix { n, rows }
}

/// Solves the game exactly.
///
/// The value is positive (a vertex's own location covers every triangle at
/// it), so the normalized LP `max Σy : M y <= 1, y >= 0` has optimum `1/value`
/// with `p* = y · value`, and the dual prices scale to `μ`.
pub fn solve_game(game: &GameMatrix) -> GameSolution {
    assert!(!game.rows.is_empty(), "game must have at least one row");
    let m: Vec<Vec<Rational>> = game.rows.iter().map(|r| r.payoff.clone()).collect();
    let ones_rows = vec![Rational::one(); game.rows.len()];
    let ones_cols = vec![Rational::one(); game.n];
    let sol = simplex::solve_max_leq(&m, &ones_rows, &ones_cols);
    assert!(
        sol.objective.is_positive(),
        "game value must be positive for a generic instance"
    );
    let value = Rational::one() / &sol.objective;
    let p_star: Vec<Rational> = sol.primal.iter().map(|y| y * &value).collect();
    let mu: Vec<Rational> = sol.dual.iter().map(|d| d * &value).collect();
    debug_assert!(p_star.iter().fold(Rational::zero(), |a, b| a + b).is_one());
    debug_assert!(mu.iter().fold(Rational::zero(), |a, b| a + b).is_one());
    GameSolution { value, mu, p_star }
}

/// Recomputes both sides of the equilibrium from scratch and checks the
/// minimax guarantee, exactly.
pub fn verify_duality_gap(
    inst: &AffineInstance,
    game: &GameMatrix,
    sol: &GameSolution,
) -> Result<DualityReport, GapDetected> {
    let n = game.n;
    let fail = |detail: String| Err(GapDetected { detail });

    if sol.mu.iter().any(|w| w.is_negative()) || sol.p_star.iter().any(|w| w.is_negative()) {
        return fail("negative strategy weight".into());
    }
    let mu_total: Rational = sol.mu.iter().fold(Rational::zero(), |a, b| a + b);
    let p_total: Rational = sol.p_star.iter().fold(Rational::zero(), |a, b| a + b);
    if !mu_total.is_one() || !p_total.is_one() {
        return fail(format!("strategies not normalized: |μ|={mu_total}, |p*|={p_total}"));
    }

    // the vertex player cannot push μ below the value
    let mu_guarantee = (0..n)
        .map(|v| {
            game.rows
                .iter()
                .zip(&sol.mu)
                .fold(Rational::zero(), |acc, (row, w)| acc + w * &row.payoff[v])
        })
        .min()
        .expect("n >= 3 columns");
    // the point player cannot push p* above the value
    let p_star_cap = game
        .rows
        .iter()
        .map(|row| {
            row.payoff
                .iter()
                .zip(&sol.p_star)
                .fold(Rational::zero(), |acc, (pay, w)| acc + pay * w)
        })
        .max()
        .expect("rows nonempty");

    if mu_guarantee != sol.value {
        return fail(format!(
            "μ guarantees {mu_guarantee} but claimed value is {}",
            sol.value
        ));
    }
    if p_star_cap != sol.value {
        return fail(format!(
            "p* caps the payoff at {p_star_cap} but claimed value is {}",
            sol.value
        ));
    }
    let bound = overlap::weighted_overlap_bound(n);
    if sol.value < bound {
        return fail(format!("value {} below overlap bound {bound}", sol.value));
    }

    // the best reply to p* is precisely the deepest point under p*, so the
    // overlap search must reproduce the value exactly
    let p_star = crate::complex::VertexDistribution::from_weights(sol.p_star.clone())
        .map_err(|e| GapDetected {
            detail: format!("p* is not a distribution: {e}"),
        })?;
    let reweighted = inst
        .with_distribution(p_star)
        .expect("same point count");
    let overlap_under_p_star = overlap::find_overlap_point(&reweighted);
    if overlap_under_p_star.weighted != sol.value {
        return fail(format!(
            "max depth under p* is {} but value is {}",
            overlap_under_p_star.weighted, sol.value
        ));
    }

    Ok(DualityReport {
        mu_guarantee,
        p_star_cap,
        overlap_under_p_star,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::{random_instance, DistributionMode};
    use crate::rational::{rat_int, ratio};

    #[test]
    fn triangle_game_has_value_one() {
        let inst = AffineInstance::uniform(vec![
            RationalPoint::from_ints(0, 0),
            RationalPoint::from_ints(3, 0),
            RationalPoint::from_ints(0, 3),
        ])
        .unwrap();
        let game = build_game(&inst);
        assert_eq!(game.rows.len(), 1, "single surviving pattern: the triangle");
        let sol = solve_game(&game);
        assert_eq!(sol.value, rat_int(1));
        assert_eq!(sol.mu, vec![rat_int(1)]);
        verify_duality_gap(&inst, &game, &sol).unwrap();
    }

    #[test]
    fn square_game_has_value_one() {
        let inst = AffineInstance::uniform(vec![
            RationalPoint::from_ints(0, 0),
            RationalPoint::from_ints(1, 0),
            RationalPoint::from_ints(1, 1),
            RationalPoint::from_ints(0, 1),
        ])
        .unwrap();
        let game = build_game(&inst);
        // the center covers all 4 triangles; every vertex sees 3/3 = 1
        let sol = solve_game(&game);
        assert_eq!(sol.value, rat_int(1));
        verify_duality_gap(&inst, &game, &sol).unwrap();
    }

    #[test]
    fn random_games_have_zero_gap_and_meet_the_bound() {
        for seed in 0..8u64 {
            let inst = random_instance(6, seed, DistributionMode::Uniform);
            let game = build_game(&inst);
            let sol = solve_game(&game);
            let report = verify_duality_gap(&inst, &game, &sol).unwrap();
            assert_eq!(report.mu_guarantee, sol.value);
            assert!(sol.value >= overlap::weighted_overlap_bound(6));
        }
    }

    #[test]
    fn dominated_row_removal_preserves_value() {
        for seed in 20..26u64 {
            let inst = random_instance(6, seed, DistributionMode::Uniform);
            let skel = inst.skeleton();
            let n = inst.n();
            let denom = Rational::from_integer(crate::rational::binomial(n - 1, 2));
            // rebuild the matrix without the domination filter
            let mut seen = std::collections::HashSet::new();
            let mut rows = Vec::new();
            for point in overlap::candidate_points(&inst) {
                let cert = overlap::depth_at(&inst, &point);
                if seen.insert(cert.covering.clone()) {
                    let payoff: Vec<Rational> = (0..n)
                        .map(|v| {
                            let mut at_v = 0i64;
                            for t in cert.covering.iter_ones() {
                                if skel.triangle(t).contains(&(v as u32)) {
                                    at_v += 1;
                                }
                            }
                            Rational::from_integer(at_v.into()) / &denom
                        })
                        .collect();
                    rows.push(GameRow {
                        point,
                        coverage: cert.covering,
                        payoff,
                    });
                }
            }
            let unfiltered = GameMatrix { n, rows };
            let filtered = build_game(&inst);
            assert!(filtered.rows.len() <= unfiltered.rows.len());
            assert_eq!(solve_game(&filtered).value, solve_game(&unfiltered).value);
        }
    }

    #[test]
    fn relabeling_vertices_preserves_value() {
        use rand::seq::SliceRandom;
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(31);
        for seed in 0..4u64 {
            let inst = random_instance(6, seed, DistributionMode::Uniform);
            let value = solve_game(&build_game(&inst)).value;
            let mut order: Vec<usize> = (0..6).collect();
            order.shuffle(&mut rng);
            let permuted = AffineInstance::uniform(
                order.iter().map(|&i| inst.point(i).clone()).collect(),
            )
            .unwrap();
            assert_eq!(solve_game(&build_game(&permuted)).value, value);
        }
    }

    #[test]
    fn weighted_value_is_at_least_the_bound_for_small_n() {
        let inst = random_instance(4, 5, DistributionMode::Uniform);
        let sol = solve_game(&build_game(&inst));
        // 1/13 - 3/39 = 0: the bound is vacuous at n = 4 but must still hold
        assert_eq!(overlap::weighted_overlap_bound(4), ratio(0, 1));
        assert!(sol.value >= ratio(0, 1));
    }
}
