//! Command-line driver: exact group arithmetic, cone predicates, curve
//! construction and verification, and the rigidity experiment suite.
//!
//! Every subcommand prints a JSON document (or CSV where it makes sense)
//! to stdout or `--out`; the exit status is 0 exactly when all requested
//! checks pass. Malformed input produces a JSON diagnostic on stderr and a
//! nonzero exit status.

use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context as _};
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use carnot::curve::CurveTower;
use carnot::group::{Group, GroupPoint};
use carnot::scalar::{fmt_frac, int, parse_frac, to_f64, Scalar};
use carnot::{
    assess_intrinsic_lipschitz, box_norm, calibrate, distance, engel_experiment, in_euclidean_cone,
    in_metric_cone, in_semigroup_closure, intersection_certificate, monte_carlo_intersections,
    pansu_ladder, reachability_experiment, transport_experiment, ConeDecision, ConeSpec,
    MetricParams, MonteCarloConfig,
};

#[derive(Parser)]
#[command(
    name = "carnot",
    version,
    about = "exact computations in the rank-2 step-3 Carnot groups"
)]
struct Cli {
    /// Ambient group: f23 | engel
    #[arg(long, global = true, default_value = "f23")]
    group: String,
    /// Second-layer norm weight (fraction)
    #[arg(long, global = true, default_value = "1/4")]
    eps2: String,
    /// Third-layer norm weight (fraction)
    #[arg(long, global = true, default_value = "1/4")]
    eps3: String,
    /// Seed for all randomized subcommands
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Write the report here instead of stdout
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Cmd {
    /// Group product x * y
    Mul {
        #[arg(long)]
        x: String,
        #[arg(long)]
        y: String,
    },
    /// Group inverse
    Inv {
        #[arg(long)]
        x: String,
    },
    /// Dilation by a rational factor
    Dilate {
        #[arg(long)]
        lambda: String,
        #[arg(long)]
        x: String,
    },
    /// Smooth-box quasi-norm
    Norm {
        #[arg(long)]
        x: String,
    },
    /// Left-invariant distance d(x, y)
    Dist {
        #[arg(long)]
        x: String,
        #[arg(long)]
        y: String,
    },
    /// Cone membership predicates over JSON point input
    ConeTest {
        #[arg(long, value_enum, default_value_t = Predicate::Semigroup)]
        predicate: Predicate,
        /// Cone axis as `e1,e2` (exact unit vector)
        #[arg(long, default_value = "0,1")]
        axis: String,
        /// Cone opening (fraction in (0,1))
        #[arg(long, default_value = "1/2")]
        sigma: String,
        /// Inline JSON array of points (arrays of fraction strings)
        #[arg(long)]
        points: Option<String>,
        /// File with the same JSON layout
        #[arg(long, value_name = "FILE", conflicts_with = "points")]
        r#in: Option<PathBuf>,
    },
    /// Build or verify the plateau curve over the interval tower
    Curve {
        #[command(subcommand)]
        cmd: CurveCmd,
    },
    /// Seeded cone-directed flows checked against the closure polynomial
    Reach {
        #[arg(long, default_value = "1/2")]
        sigma: String,
        #[arg(long, default_value_t = 20)]
        segments: usize,
        #[arg(long, default_value_t = 200)]
        trials: u64,
    },
    /// Exhaustive intersection-exclusion certificate
    Intersect {
        #[arg(long, default_value_t = 8, value_parser = clap::value_parser!(u32).range(2..=12))]
        depth: u32,
        /// Also run the Monte Carlo companion at this many trials
        #[arg(long, default_value_t = 0)]
        mc_trials: u64,
    },
    /// Transport the curve to another horizontal direction
    Transport {
        /// Exact unit direction as `e1,e2`, e.g. `3/5,4/5`
        #[arg(long)]
        direction: String,
        #[arg(long, default_value_t = 6, value_parser = clap::value_parser!(u32).range(2..=12))]
        depth: u32,
    },
    /// The full Engel-group battery
    Engel {
        #[arg(long, default_value_t = 8, value_parser = clap::value_parser!(u32).range(2..=12))]
        depth: u32,
    },
    /// Triangle-inequality calibration of the norm parameters
    Calibrate {
        #[arg(long, default_value_t = 10_000)]
        trials: u64,
    },
    /// Difference-quotient decay ladder
    Pansu {
        #[arg(long, default_value_t = 8, value_parser = clap::value_parser!(u32).range(1..=14))]
        depth: u32,
        #[arg(long, default_value_t = 10, value_parser = clap::value_parser!(u32).range(1..=60))]
        rungs: u32,
    },
    /// Intrinsic cone condition over curve samples at a given opening
    Lipschitz {
        #[arg(long, default_value_t = 8, value_parser = clap::value_parser!(u32).range(1..=10))]
        depth: u32,
        /// Opening to test (fraction)
        #[arg(long, default_value = "1/7")]
        sigma: String,
    },
}

#[derive(Subcommand)]
enum CurveCmd {
    Build {
        #[arg(long, default_value_t = 8, value_parser = clap::value_parser!(u32).range(1..=14))]
        depth: u32,
    },
    Verify {
        #[arg(long, default_value_t = 8, value_parser = clap::value_parser!(u32).range(2..=12))]
        depth: u32,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Predicate {
    Euclidean,
    Metric,
    Semigroup,
}

fn parse_point(group: Group, s: &str) -> anyhow::Result<GroupPoint> {
    let coords: Vec<Scalar> = s
        .split(',')
        .map(|c| parse_frac(c).map_err(|e| anyhow!("{e}")))
        .collect::<anyhow::Result<_>>()?;
    Ok(group.point(coords)?)
}

fn parse_pair(s: &str) -> anyhow::Result<(Scalar, Scalar)> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != 2 {
        bail!("expected two comma-separated fractions, got {s:?}");
    }
    Ok((parse_frac(parts[0])?, parse_frac(parts[1])?))
}

fn point_json(p: &GroupPoint) -> Value {
    Value::Array(
        p.coords()
            .iter()
            .map(|c| Value::String(fmt_frac(c)))
            .collect(),
    )
}

struct Output {
    out: Option<PathBuf>,
}

impl Output {
    fn emit(&self, text: &str) -> anyhow::Result<()> {
        match &self.out {
            Some(path) => {
                let mut f = fs::File::create(path)
                    .with_context(|| format!("cannot create {}", path.display()))?;
                writeln!(f, "{text}")?;
            }
            None => println!("{text}"),
        }
        Ok(())
    }

    fn emit_json(&self, v: &Value) -> anyhow::Result<()> {
        self.emit(&serde_json::to_string_pretty(v)?)
    }
}

fn run(cli: Cli) -> anyhow::Result<bool> {
    let group = Group::parse(&cli.group)?;
    let params = MetricParams::with_eps(parse_frac(&cli.eps2)?, parse_frac(&cli.eps3)?)?;
    let output = Output {
        out: cli.out.clone(),
    };

    let emit_point = |p: &GroupPoint| -> anyhow::Result<()> {
        match cli.format {
            Format::Csv => output.emit(&p.fmt_coords()),
            Format::Json => output.emit_json(&json!({ "coords": point_json(p) })),
        }
    };

    match &cli.cmd {
        Cmd::Mul { x, y } => {
            let x = parse_point(group, x)?;
            let y = parse_point(group, y)?;
            emit_point(&x.mul(&y)?)?;
            Ok(true)
        }
        Cmd::Inv { x } => {
            emit_point(&parse_point(group, x)?.inv())?;
            Ok(true)
        }
        Cmd::Dilate { lambda, x } => {
            let lam = parse_frac(lambda)?;
            emit_point(&parse_point(group, x)?.dilate(&lam)?)?;
            Ok(true)
        }
        Cmd::Norm { x } => {
            let n = box_norm(&parse_point(group, x)?, &params);
            match cli.format {
                Format::Csv => output.emit(&format!("{}", n.approx()))?,
                Format::Json => output.emit_json(&json!({
                    "pow6": fmt_frac(n.pow6()),
                    "approx": n.approx(),
                    "exact": n.exact().as_ref().map(fmt_frac),
                    "term": format!("{:?}", n.term()),
                }))?,
            }
            Ok(true)
        }
        Cmd::Dist { x, y } => {
            let x = parse_point(group, x)?;
            let y = parse_point(group, y)?;
            let d = distance(&x, &y, &params)?;
            match cli.format {
                Format::Csv => output.emit(&format!("{}", d.approx()))?,
                Format::Json => output.emit_json(&json!({
                    "pow6": fmt_frac(d.pow6()),
                    "approx": d.approx(),
                    "exact": d.exact().as_ref().map(fmt_frac),
                }))?,
            }
            Ok(true)
        }
        Cmd::ConeTest {
            predicate,
            axis,
            sigma,
            points,
            r#in,
        } => {
            let (e1, e2) = parse_pair(axis)?;
            let sigma = parse_frac(sigma)?;
            let cone = ConeSpec::new(group, e1, e2, sigma)?;
            let raw = match (points, r#in) {
                (Some(s), None) => s.clone(),
                (None, Some(path)) => fs::read_to_string(path)
                    .with_context(|| format!("cannot read {}", path.display()))?,
                _ => bail!("provide exactly one of --points or --in"),
            };
            let parsed: Vec<Vec<String>> = serde_json::from_str(&raw)
                .context("points must be a JSON array of arrays of fraction strings")?;
            let mut results = Vec::new();
            for coords in &parsed {
                let coords: Vec<Scalar> = coords
                    .iter()
                    .map(|c| parse_frac(c).map_err(|e| anyhow!("{e}")))
                    .collect::<anyhow::Result<_>>()?;
                let verdict = match predicate {
                    Predicate::Euclidean => {
                        if coords.len() != 2 {
                            bail!("euclidean predicate expects horizontal 2-vectors");
                        }
                        let v = group.horizontal(coords[0].clone(), coords[1].clone());
                        json!(in_euclidean_cone(&v, &cone)?)
                    }
                    Predicate::Metric => {
                        let p = group.point(coords)?;
                        match in_metric_cone(&p, &cone, &params)? {
                            ConeDecision::Inside => json!(true),
                            ConeDecision::Outside => json!(false),
                            ConeDecision::Undecided => json!("undecided"),
                        }
                    }
                    Predicate::Semigroup => {
                        let p = group.point(coords)?;
                        json!(in_semigroup_closure(&p))
                    }
                };
                results.push(verdict);
            }
            output.emit_json(&json!({ "results": results }))?;
            Ok(true)
        }
        Cmd::Curve {
            cmd: CurveCmd::Build { depth },
        } => {
            let tower = CurveTower::build(*depth);
            match cli.format {
                Format::Csv => {
                    // point dump: level, t, coordinates of the curve point
                    let mut lines = Vec::new();
                    for k in 1..=*depth {
                        let units = tower.units_at(k)?;
                        for (t, j) in tower.endpoint_samples(k)? {
                            let pt = carnot::plateau_point(group, &params, &t, &units[j]);
                            lines.push(format!("{k},{},{}", fmt_frac(&t), pt.fmt_coords()));
                        }
                    }
                    output.emit(&lines.join("\n"))?;
                }
                Format::Json => {
                    let mut levels = Vec::new();
                    for k in 1..=*depth {
                        let level = tower.level(k)?;
                        let units = tower.units_at(k)?;
                        levels.push(json!({
                            "k": k,
                            "intervals": level.intervals.iter()
                                .map(|iv| vec![fmt_frac(&iv.lo), fmt_frac(&iv.hi)])
                                .collect::<Vec<_>>(),
                            "omega": units.iter()
                                .map(|u| fmt_frac(&(u * params.eps3_inv_cubed())))
                                .collect::<Vec<_>>(),
                            "measure": fmt_frac(&level.measure()),
                        }));
                    }
                    output.emit_json(&json!({
                        "depth": depth,
                        "eps3": fmt_frac(params.eps3()),
                        "levels": levels,
                    }))?;
                }
            }
            Ok(true)
        }
        Cmd::Curve {
            cmd: CurveCmd::Verify { depth },
        } => {
            let tower = CurveTower::build(*depth);
            let mut pass = true;
            let mut levels = Vec::new();
            for k in 2..=*depth {
                let v = carnot::verify_iterate(&tower, k, group, &params)?;
                let gap = carnot::monotone_gap_margin(&tower, k, *depth)?;
                pass &= v.pass && gap >= int(0);
                levels.push(json!({
                    "level": k,
                    "pass": v.pass,
                    "endpoint_pairs": v.endpoint_pairs,
                    "isometry_pairs_ok": v.isometry_pairs_ok,
                    "refinement_margin": to_f64(&v.refinement_margin),
                    "ratio_margin": to_f64(&v.ratio_margin),
                    "decrease_margin": to_f64(&v.decrease_margin),
                    "limit_gap_margin": to_f64(&gap),
                    "failures": v.failures,
                }));
            }
            output.emit_json(&json!({
                "depth": depth,
                "group": group.to_string(),
                "pass": pass,
                "levels": levels,
            }))?;
            Ok(pass)
        }
        Cmd::Reach {
            sigma,
            segments,
            trials,
        } => {
            let report =
                reachability_experiment(group, &parse_frac(sigma)?, *segments, *trials, cli.seed)?;
            let pass = report.pass;
            output.emit_json(&serde_json::to_value(&report)?)?;
            Ok(pass)
        }
        Cmd::Intersect { depth, mc_trials } => {
            let tower = CurveTower::build(*depth);
            let report = intersection_certificate(&tower, *depth, group, &params)?;
            let mut pass = report.pass;
            let mut docs = vec![serde_json::to_value(&report)?];
            if *mc_trials > 0 {
                let cone = ConeSpec::axis_x2(group, parse_frac("1/2")?)?;
                let cfg = MonteCarloConfig {
                    trials: *mc_trials,
                    seed: cli.seed,
                    ..Default::default()
                };
                let mc = monte_carlo_intersections(&tower, *depth, group, &params, &cone, &cfg)?;
                pass &= mc.pass;
                docs.push(serde_json::to_value(&mc)?);
            }
            output.emit_json(&Value::Array(docs))?;
            Ok(pass)
        }
        Cmd::Transport { direction, depth } => {
            let (e1, e2) = parse_pair(direction)?;
            let tower = CurveTower::build(*depth);
            let report = transport_experiment(&tower, *depth, group, &params, &e1, &e2, cli.seed)?;
            let pass = report.pass;
            output.emit_json(&serde_json::to_value(&report)?)?;
            Ok(pass)
        }
        Cmd::Engel { depth } => {
            let tower = CurveTower::build(*depth);
            let report = engel_experiment(&tower, *depth, &params, cli.seed)?;
            let pass = report.pass;
            output.emit_json(&serde_json::to_value(&report)?)?;
            Ok(pass)
        }
        Cmd::Calibrate { trials } => {
            let report = calibrate(group, &params, *trials, cli.seed)?;
            let pass = report.violations == 0;
            output.emit_json(&serde_json::to_value(&report)?)?;
            Ok(pass)
        }
        Cmd::Pansu { depth, rungs } => {
            let tower = CurveTower::build(*depth);
            let ladder = pansu_ladder(&tower, *depth, group, &params, *rungs)?;
            let pass = ladder.monotone && ladder.horizontal_exact && ladder.vertical_zero;
            output.emit_json(&serde_json::to_value(&ladder)?)?;
            Ok(pass)
        }
        Cmd::Lipschitz { depth, sigma } => {
            let sigma = parse_frac(sigma)?;
            let tower = CurveTower::build(*depth);
            let units = tower.units_at(*depth)?;
            let samples: Vec<(Scalar, GroupPoint)> = tower
                .endpoint_samples(*depth)?
                .into_iter()
                .map(|(t, j)| {
                    let pt = carnot::plateau_point(group, &params, &t, &units[j]);
                    (t, pt)
                })
                .collect();
            let axis = group.horizontal(parse_frac("0")?, parse_frac("1")?);
            let a = assess_intrinsic_lipschitz(&samples, &axis, &params)?;
            let pass = a.passes_at(&sigma) == Some(true);
            output.emit_json(&json!({
                "depth": depth,
                "samples": samples.len(),
                "pairs": a.pairs,
                "sigma": fmt_frac(&sigma),
                "passes": a.passes_at(&sigma),
                "min_sigma_approx": a.min_sigma_approx(),
                "exact": a.exact,
            }))?;
            Ok(pass)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("{}", json!({ "error": format!("{e:#}") }));
            ExitCode::from(2)
        }
    }
}
