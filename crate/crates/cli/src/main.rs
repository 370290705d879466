//! Command-line front end: instance generation, overlap certification, the
//! folding pipeline, the minimax game, and the exhaustive self-check suites.
//!
//! Exit codes: 0 success, 1 property or bound failure, 2 bad input,
//! 3 refinement exhaustion. Reports are deterministic functions of the
//! input bytes, the seed, and the command; timing goes to stderr.

mod instance;
mod report;
mod selfcheck;
mod svg;

use clap::{Parser, Subcommand, ValueEnum};
use instance::InstanceFile;
use num_traits::{Signed, Zero};
use overlap_core::geom::{AffineInstance, DistributionMode};
use overlap_core::rational::{format_rational, parse_rational, ratio, Rational};
use overlap_core::{dual, game, overlap};
use report::Report;
use std::process::ExitCode;
use std::time::Instant;

#[derive(Parser)]
#[command(
    name = "overlap",
    about = "Exact overlap certificates for straight-edge drawings of the complete 2-skeleton"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum PMode {
    Uniform,
    Random,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a random generic instance file.
    Gen {
        /// Number of points (at least 3).
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Vertex distribution mode.
        #[arg(long, value_enum, default_value_t = PMode::Uniform)]
        p: PMode,
        /// Output path (stdout when omitted).
        #[arg(long)]
        out: Option<std::path::PathBuf>,
    },
    /// Certify the maximum-depth overlap point of an instance.
    Overlap {
        file: std::path::PathBuf,
        /// Optional flat SVG dump of the instance and the certified point.
        #[arg(long)]
        svg: Option<std::path::PathBuf>,
        #[arg(long)]
        out: Option<std::path::PathBuf>,
    },
    /// Run the dual-triangulation and folding pipeline.
    Folding {
        file: std::path::PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Starting mesh scale for refinement (rational, e.g. 1/4).
        #[arg(long, default_value = "1/4")]
        mesh_start: String,
        /// Optional path for the triangulation text export.
        #[arg(long)]
        mesh_out: Option<std::path::PathBuf>,
        #[arg(long)]
        out: Option<std::path::PathBuf>,
    },
    /// Solve the point-vertex zero-sum game exactly.
    Game {
        file: std::path::PathBuf,
        #[arg(long)]
        out: Option<std::path::PathBuf>,
    },
    /// Run the exhaustive chain-calculus and expansion suites.
    Selfcheck {
        /// Largest skeleton size for the exhaustive parts (at most 6).
        #[arg(long, default_value_t = 5)]
        max_n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<std::path::PathBuf>,
    },
}

fn main() -> ExitCode {
    if let Ok(threads) = std::env::var("OVERLAP_THREADS") {
        if let Ok(threads) = threads.parse::<usize>() {
            let _ = rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build_global();
        }
    }
    let cli = Cli::parse();
    let started = Instant::now();
    let code = match cli.command {
        Command::Gen { n, seed, p, out } => cmd_gen(n, seed, p, out),
        Command::Overlap { file, svg, out } => cmd_overlap(&file, svg, out),
        Command::Folding {
            file,
            seed,
            mesh_start,
            mesh_out,
            out,
        } => cmd_folding(&file, seed, &mesh_start, mesh_out, out),
        Command::Game { file, out } => cmd_game(&file, out),
        Command::Selfcheck { max_n, seed, out } => cmd_selfcheck(max_n, seed, out),
    };
    eprintln!("elapsed: {:.3}s", started.elapsed().as_secs_f64());
    code
}

fn emit(report: &Report, out: Option<std::path::PathBuf>) -> ExitCode {
    let text = report.render();
    match out {
        None => {
            print!("{text}");
            ExitCode::SUCCESS
        }
        Some(path) => match std::fs::write(&path, text) {
            Ok(()) => ExitCode::SUCCESS,
            Err(e) => {
                eprintln!("cannot write {}: {e}", path.display());
                ExitCode::from(2)
            }
        },
    }
}

fn input_error(msg: impl std::fmt::Display) -> ExitCode {
    eprintln!("error: {msg}");
    ExitCode::from(2)
}

fn load_instance(path: &std::path::Path) -> Result<(InstanceFile, AffineInstance), String> {
    let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    let file = InstanceFile::parse(&text)?;
    let inst = file.to_instance()?;
    Ok((file, inst))
}

fn cmd_gen(n: usize, seed: u64, p: PMode, out: Option<std::path::PathBuf>) -> ExitCode {
    if n < 3 {
        return input_error("need at least 3 points");
    }
    let mode = match p {
        PMode::Uniform => DistributionMode::Uniform,
        PMode::Random => DistributionMode::RandomRational,
    };
    let inst = overlap_core::geom::random_instance(n, seed, mode);
    let file = InstanceFile {
        points: inst.points().to_vec(),
        weights: match p {
            PMode::Uniform => None,
            PMode::Random => Some(inst.distribution().weights().to_vec()),
        },
        seed: Some(seed),
    };
    let text = file.write();
    match out {
        None => {
            print!("{text}");
            ExitCode::SUCCESS
        }
        Some(path) => match std::fs::write(&path, text) {
            Ok(()) => ExitCode::SUCCESS,
            Err(e) => input_error(format!("cannot write {}: {e}", path.display())),
        },
    }
}

fn cmd_overlap(
    path: &std::path::Path,
    svg_out: Option<std::path::PathBuf>,
    out: Option<std::path::PathBuf>,
) -> ExitCode {
    let (_, inst) = match load_instance(path) {
        Ok(v) => v,
        Err(e) => return input_error(e),
    };
    let n = inst.n();
    let cert = match std::panic::catch_unwind(|| overlap::find_overlap_point(&inst)) {
        Ok(cert) => cert,
        Err(panic) => {
            let msg = panic
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| panic.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "internal failure".into());
            eprintln!("overlap certification failed: {msg}");
            return ExitCode::from(1);
        }
    };

    let mut report = Report::new("overlap");
    report.push("n", n);
    report.push("candidates", overlap::candidate_points(&inst).len());
    report.push("point_x", format_rational(&cert.point.x));
    report.push("point_y", format_rational(&cert.point.y));
    report.push("count", cert.count);
    let total = Rational::from_integer(overlap_core::rational::binomial(n, 3));
    let fraction = Rational::from_integer(cert.count.into()) / &total;
    report.push_rational("fraction", &fraction);
    report.push_rational("weighted_depth", &cert.weighted);
    let weighted_bound = overlap::weighted_overlap_bound(n);
    report.push_rational("weighted_bound", &weighted_bound);
    let weighted_pass = cert.weighted >= weighted_bound;
    report.push_bool("weighted_bound_pass", weighted_pass);
    let mut pass = weighted_pass;
    if inst.distribution().is_uniform() {
        let count_bound = overlap::uniform_count_bound(n);
        report.push_rational("uniform_count_bound", &count_bound);
        let count_pass = Rational::from_integer(cert.count.into()) >= count_bound;
        report.push_bool("uniform_count_bound_pass", count_pass);
        pass &= count_pass;
    }
    if let Some(svg_path) = svg_out {
        if let Err(e) = std::fs::write(&svg_path, svg::render(&inst, &cert.point)) {
            return input_error(format!("cannot write {}: {e}", svg_path.display()));
        }
    }
    let code = emit(&report, out);
    if pass {
        code
    } else {
        ExitCode::from(1)
    }
}

fn cmd_folding(
    path: &std::path::Path,
    seed: u64,
    mesh_start: &str,
    mesh_out: Option<std::path::PathBuf>,
    out: Option<std::path::PathBuf>,
) -> ExitCode {
    let (_, inst) = match load_instance(path) {
        Ok(v) => v,
        Err(e) => return input_error(e),
    };
    let start_mesh = match parse_rational(mesh_start) {
        Ok(m) if m.is_positive() => m,
        _ => return input_error("mesh-start must be a positive rational"),
    };
    let scaled = dual::scale_into_half_ball(&inst);
    let (xstar, cert) = match dual::refine_from(&scaled, seed, start_mesh.clone()) {
        Ok(v) => v,
        Err(e) => {
            eprintln!("refinement exhausted: {e}");
            return ExitCode::from(3);
        }
    };
    let rounds = {
        // the final mesh is start / 2^rounds
        let mut rounds = 0usize;
        let mut m = start_mesh;
        while &m > xstar.mesh() {
            m /= ratio(2, 1);
            rounds += 1;
        }
        rounds
    };
    let mut report = Report::new("folding");
    report.push("n", inst.n());
    report.push("seed", seed);
    report.push("rounds", rounds);
    report.push_rational("mesh", xstar.mesh());
    report.push("dual_vertices", xstar.vertex_count());
    report.push("dual_edges", xstar.edge_count());
    report.push("dual_triangles", xstar.triangle_count());
    report.push_bool("well_behaved", cert.valid());

    let imap = dual::intersection_map(&scaled, &xstar);
    let duality = dual::check_duality(&scaled, &xstar, &imap);
    report.push_bool("duality_edges", duality.edge_failures.is_empty());
    report.push_bool("duality_triangles", duality.triangle_failures.is_empty());
    let fundamental = dual::fundamental_class_check(&scaled, &imap);
    report.push_bool("fundamental_class_all_ones", fundamental);
    if !duality.ok() || !fundamental {
        let _ = emit(&report, out);
        return ExitCode::from(1);
    }

    let attempt = match dual::construct_folding_attempt(&scaled, &xstar, &imap, scaled.distribution())
    {
        Ok(a) => a,
        Err(e) => {
            eprintln!("folding construction failed: {e}");
            let _ = emit(&report, out);
            return ExitCode::from(1);
        }
    };
    report.push("defects", attempt.defects.len());
    report.push_bool("defects_odd", attempt.defects.len() % 2 == 1);
    let h1_outside_zero = (0..xstar.edge_count())
        .filter(|&e| !xstar.edge_meets_half_ball(e))
        .all(|e| attempt.h1[e].is_zero());
    report.push_bool("h1_zero_outside_half_ball", h1_outside_zero);
    let max_h0 = attempt
        .weights
        .stage1
        .iter()
        .map(|(_, _, h)| h)
        .max()
        .cloned()
        .unwrap_or_else(|| ratio(0, 1));
    let max_a = attempt
        .weights
        .stage2
        .iter()
        .map(|(_, _, a, _)| a)
        .max()
        .cloned()
        .unwrap_or_else(|| ratio(0, 1));
    report.push_rational("max_stage1_weight", &max_h0);
    report.push_rational("max_stage2_weight", &max_a);
    report.push("hypothesis_edges", attempt.weights.hypothesis_edges);
    report.push("hypothesis_strict", attempt.weights.hypothesis_strict);

    if let Some(mesh_path) = mesh_out {
        let mut buffer = Vec::new();
        if xstar.write_text(&mut buffer).is_err()
            || std::fs::write(&mesh_path, buffer).is_err()
        {
            return input_error(format!("cannot write {}", mesh_path.display()));
        }
    }
    let ok = attempt.defects.len() % 2 == 1 && h1_outside_zero;
    let code = emit(&report, out);
    if ok {
        code
    } else {
        ExitCode::from(1)
    }
}

fn cmd_game(path: &std::path::Path, out: Option<std::path::PathBuf>) -> ExitCode {
    let (_, inst) = match load_instance(path) {
        Ok(v) => v,
        Err(e) => return input_error(e),
    };
    let matrix = game::build_game(&inst);
    let solution = game::solve_game(&matrix);
    let mut report = Report::new("game");
    report.push("n", inst.n());
    report.push("rows", matrix.rows.len());
    report.push_rational("value", &solution.value);
    let bound = overlap::weighted_overlap_bound(inst.n());
    report.push_rational("bound", &bound);
    report.push_bool("bound_pass", solution.value >= bound);
    for (row, mass) in matrix.rows.iter().zip(&solution.mu) {
        if !mass.is_zero() {
            report.push(
                &format!(
                    "mu {} {}",
                    format_rational(&row.point.x),
                    format_rational(&row.point.y)
                ),
                format_rational(mass),
            );
        }
    }
    for (v, mass) in solution.p_star.iter().enumerate() {
        report.push(&format!("p_star {v}"), format_rational(mass));
    }
    match game::verify_duality_gap(&inst, &matrix, &solution) {
        Ok(audit) => {
            report.push("duality_gap", "0/1");
            report.push_rational("mu_guarantee", &audit.mu_guarantee);
            report.push_rational("p_star_cap", &audit.p_star_cap);
            let pass = solution.value >= bound;
            let code = emit(&report, out);
            if pass {
                code
            } else {
                ExitCode::from(1)
            }
        }
        Err(gap) => {
            eprintln!("{gap}");
            let _ = emit(&report, out);
            ExitCode::from(1)
        }
    }
}

fn cmd_selfcheck(max_n: usize, seed: u64, out: Option<std::path::PathBuf>) -> ExitCode {
    if max_n > 6 {
        return input_error("exhaustive suites need max-n <= 6");
    }
    if max_n < 3 {
        return input_error("max-n must be at least 3");
    }
    let outcomes = selfcheck::run_all(max_n, seed);
    let mut report = Report::new("selfcheck");
    report.push("max_n", max_n);
    report.push("seed", seed);
    let mut first_failure: Option<String> = None;
    for outcome in &outcomes {
        report.push(
            &format!("suite {}", outcome.name),
            match &outcome.failure {
                None => format!("pass ({} cases)", outcome.cases),
                Some(f) => format!("FAIL: {f}"),
            },
        );
        if outcome.failure.is_some() && first_failure.is_none() {
            first_failure = Some(outcome.name.to_string());
        }
    }
    let code = emit(&report, out);
    match first_failure {
        None => code,
        Some(name) => {
            eprintln!("selfcheck failed at property: {name}");
            ExitCode::from(1)
        }
    }
}
