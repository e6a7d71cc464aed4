use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use bellbox::boxfile::{box_to_json, parse_box};
use bellbox::correlations::{sample_level3_workers, steered_moments, LOW_ACCEPTANCE};
use bellbox::geometry::{scan_lh_region, scan_local_region, scan_local_slice, FeasibilityRegion};
use bellbox::quantum::{
    bell_probs_quantum, box_from_state, projector_identity_check, random_state, BellBasis,
};
use bellbox::{
    chsh_value, lp_max_chsh, membership, validate_joint_box, ChshSpec, JointBox, MeasurementFamily,
    MembershipLevel, Party, Setting, Sign, DEFAULT_TOL,
};
use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::json;

/// No-signaling boxes with a joint Bell measurement: validation, state-space
/// scans, CHSH optimization and quantum cross-checks.
#[derive(Debug, Parser)]
#[command(name = "bellbox", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Check a box file against a membership level (exit 1 if it fails).
    Validate(ValidateArgs),
    /// Scan the local state space of the noisy Bell measurement.
    ScanBall(ScanBallArgs),
    /// Scan allowed cuboid half-widths (h, l) for the non-maximally entangled family.
    ScanLh(ScanLhArgs),
    /// Maximize CHSH exactly (levels 1, 2) or by sampling (level 3).
    Chsh(ChshArgs),
    /// Compare the box model against Born-rule statistics on random states.
    Oracle(OracleArgs),
}

#[derive(Debug, Args)]
struct FamilyArgs {
    /// Noise parameter of the noisy Bell measurement, in [0, 1).
    #[arg(long, conflicts_with = "alpha")]
    lambda: Option<f64>,
    /// Angle of the non-maximally entangled basis, radians in [0, pi/4].
    #[arg(long)]
    alpha: Option<f64>,
}

impl FamilyArgs {
    fn family(&self) -> Result<MeasurementFamily> {
        Ok(match (self.lambda, self.alpha) {
            (Some(l), _) => MeasurementFamily::noisy(l)?,
            (_, Some(a)) => MeasurementFamily::nonmax(a)?,
            _ => MeasurementFamily::IdealBell,
        })
    }
}

#[derive(Debug, Args)]
struct ValidateArgs {
    /// Box file in JSON format.
    path: PathBuf,
    #[arg(long, default_value_t = 3, value_parser = clap::value_parser!(u8).range(1..=3))]
    level: u8,
    #[command(flatten)]
    family: FamilyArgs,
    #[arg(long, default_value_t = DEFAULT_TOL)]
    tol: f64,
    /// Print the full report as JSON.
    #[arg(long)]
    json: bool,
}

#[derive(Debug, Args)]
struct ScanBallArgs {
    #[arg(long, default_value_t = 0.0)]
    lambda: f64,
    #[arg(long, default_value_t = 41)]
    grid: usize,
    /// Restrict to a plane, e.g. `z=0.5` (only p_z slices are supported).
    #[arg(long)]
    slice: Option<String>,
    #[arg(long, default_value_t = DEFAULT_TOL)]
    tol: f64,
    /// Output CSV path; stdout if omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct ScanLhArgs {
    #[arg(
        long,
        conflicts_with = "alpha_sixteenths",
        required_unless_present = "alpha_sixteenths"
    )]
    alpha: Option<f64>,
    /// alpha = k pi / 16.
    #[arg(long)]
    alpha_sixteenths: Option<u32>,
    #[arg(long, default_value_t = 101)]
    grid: usize,
    #[arg(long, default_value_t = DEFAULT_TOL)]
    tol: f64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct ChshArgs {
    #[arg(long, value_parser = clap::value_parser!(u8).range(1..=3))]
    level: u8,
    #[arg(long, value_parser = parse_setting)]
    a1: Setting,
    #[arg(long, value_parser = parse_setting)]
    a2: Setting,
    #[arg(long, value_parser = parse_setting)]
    b1: Setting,
    #[arg(long, value_parser = parse_setting)]
    b2: Setting,
    /// Solve the linear program (levels 1 and 2 only).
    #[arg(long, conflicts_with_all = ["trials", "seed", "workers"])]
    exact: bool,
    /// Number of level-3 samples.
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    workers: Option<usize>,
    /// Write the optimal (or best sampled) box here.
    #[arg(long)]
    witness: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct OracleArgs {
    #[arg(long, default_value_t = 1000, value_parser = clap::value_parser!(u64).range(1..))]
    samples: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 1e-12)]
    tol: f64,
    #[arg(long)]
    json: bool,
}

fn parse_setting(s: &str) -> std::result::Result<Setting, String> {
    let mut chars = s.chars();
    match (chars.next().and_then(Setting::from_char), chars.next()) {
        (Some(w), None) => Ok(w),
        _ => Err(format!("expected X, Y or Z, got {s:?}")),
    }
}

fn write_output(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

#[derive(Serialize)]
struct SteeredEntry {
    party: Party,
    setting: Setting,
    outcome: Sign,
    moments: Option<[f64; 3]>,
    norm: Option<f64>,
}

fn validate(args: &ValidateArgs) -> Result<bool> {
    let text = fs::read_to_string(&args.path)
        .with_context(|| format!("reading {}", args.path.display()))?;
    let b = parse_box(&text).with_context(|| format!("parsing {}", args.path.display()))?;
    let family = args.family.family()?;
    let level = MembershipLevel::from_number(args.level)?;
    let report = membership(&b, level, &family, args.tol)?;

    if args.json {
        let blocks = b.blocks();
        let min_entry = blocks
            .iter()
            .flatten()
            .copied()
            .fold(f64::INFINITY, f64::min);
        let norm_dev = blocks
            .iter()
            .map(|blk| (blk.iter().sum::<f64>() - 1.0).abs())
            .fold(0.0, f64::max);
        let signaling = validate_joint_box(&b, 0.0)
            .violations
            .iter()
            .filter(|v| {
                matches!(
                    v.constraint,
                    bellbox::Constraint::NonSignalingA { .. }
                        | bellbox::Constraint::NonSignalingB { .. }
                )
            })
            .map(|v| v.magnitude)
            .fold(0.0, f64::max);
        let mut steered = Vec::new();
        for party in [Party::A, Party::B] {
            for setting in Setting::ALL {
                for outcome in Sign::BOTH {
                    let m = steered_moments(&b, party, setting, outcome);
                    steered.push(SteeredEntry {
                        party,
                        setting,
                        outcome,
                        moments: m.map(|m| m.components()),
                        norm: m.map(|m| m.norm_sq().sqrt()),
                    });
                }
            }
        }
        let out = json!({
            "level": level.number(),
            "family": format!("{family:?}"),
            "passed": report.passed,
            "bell_probabilities": report.bell_probabilities.0,
            "min_entry": min_entry,
            "max_normalization_deviation": norm_dev,
            "max_signaling_deviation": signaling,
            "local_moments": {
                "A": b.local_moments_a().components(),
                "B": b.local_moments_b().components(),
            },
            "steered": steered,
            "violations": report.violations,
        });
        println!("{}", serde_json::to_string_pretty(&out)?);
    } else {
        println!(
            "level {}: {}",
            level.number(),
            if report.passed { "pass" } else { "fail" }
        );
        let p = report.bell_probabilities.0;
        println!(
            "bell probabilities: p1={:.6} p2={:.6} p3={:.6} p4={:.6}",
            p[0], p[1], p[2], p[3]
        );
        for v in &report.violations {
            println!("  violated: {} (by {:.3e})", v.constraint, v.magnitude);
        }
    }
    Ok(report.passed)
}

fn scan_ball(args: &ScanBallArgs) -> Result<()> {
    let region = match &args.slice {
        None => scan_local_region(args.lambda, args.grid, args.tol)?,
        Some(s) => {
            let value = s
                .strip_prefix("z=")
                .context("slice must look like z=<p_z>")?
                .parse::<f64>()
                .context("slice value is not a number")?;
            scan_local_slice(args.lambda, args.grid, value, args.tol)?
        }
    };
    write_region(args.out.as_deref(), &region)
}

fn scan_lh(args: &ScanLhArgs) -> Result<()> {
    let alpha = match (args.alpha, args.alpha_sixteenths) {
        (Some(a), _) => a,
        (None, Some(k)) => k as f64 * std::f64::consts::PI / 16.0,
        (None, None) => bail!("one of --alpha or --alpha-sixteenths is required"),
    };
    let region = scan_lh_region(alpha, args.grid, args.tol)?;
    write_region(args.out.as_deref(), &region)
}

fn write_region(out: Option<&Path>, region: &FeasibilityRegion) -> Result<()> {
    write_output(out, &region.to_csv())?;
    if out.is_some() {
        eprintln!(
            "{} of {} grid points feasible",
            region.feasible_count(),
            region.len()
        );
    }
    Ok(())
}

fn chsh(args: &ChshArgs) -> Result<()> {
    let spec = ChshSpec::new(args.a1, args.a2, args.b1, args.b2)?;
    let level = MembershipLevel::from_number(args.level)?;
    let witness: JointBox = if args.exact {
        if level == MembershipLevel::LocallyQuantum {
            bail!("--exact is only available for levels 1 and 2; level 3 needs --trials");
        }
        let out = lp_max_chsh(&spec, level)?;
        println!(
            "exact maximum CHSH {spec} at level {}: {:.12}",
            level.number(),
            out.value
        );
        out.witness.expand()
    } else {
        if level != MembershipLevel::LocallyQuantum {
            bail!("sampling is only available for level 3; use --exact for levels 1 and 2");
        }
        let trials = args.trials.context("level 3 needs --trials")?;
        if trials == 0 {
            bail!("--trials must be at least 1");
        }
        let run = sample_level3_workers(
            MeasurementFamily::IdealBell,
            trials,
            args.seed.unwrap_or(0),
            args.workers.unwrap_or(1),
        )?;
        if run.low_acceptance() {
            eprintln!(
                "warning: acceptance rate {:.2e} below {LOW_ACCEPTANCE:e}",
                run.acceptance_rate()
            );
        }
        let best = run
            .boxes
            .iter()
            .max_by(|a, b| chsh_value(a, &spec).total_cmp(&chsh_value(b, &spec)))
            .copied()
            .context("sampler produced no boxes")?;
        let value = chsh_value(&best, &spec);
        println!("max sampled CHSH {spec} at level 3 over {trials} samples: {value:.12}");
        best
    };
    if let Some(path) = &args.witness {
        fs::write(path, box_to_json(&witness, true)?)
            .with_context(|| format!("writing {}", path.display()))?;
    }
    Ok(())
}

fn oracle(args: &OracleArgs) -> Result<bool> {
    let identities = projector_identity_check();
    let basis = BellBasis::standard();
    let mut max_residual: f64 = 0.0;
    let mut signaling_failures = 0u64;
    let mut level3_failures = 0u64;
    for i in 0..args.samples {
        let rank = 1 + (i % 4) as usize;
        let rho = random_state(args.seed.wrapping_add(i), rank)?;
        let b = box_from_state(&rho);
        let residual = bellbox::bell_probs(&b).max_abs_diff(&bell_probs_quantum(&rho, &basis));
        max_residual = max_residual.max(residual);
        if !validate_joint_box(&b, args.tol).is_valid() {
            signaling_failures += 1;
        }
        if !membership(
            &b,
            MembershipLevel::LocallyQuantum,
            &MeasurementFamily::IdealBell,
            args.tol,
        )?
        .passed
        {
            level3_failures += 1;
        }
    }
    let passed = identities.max() < args.tol
        && max_residual < args.tol
        && signaling_failures == 0
        && level3_failures == 0;
    if args.json {
        let out = json!({
            "passed": passed,
            "samples": args.samples,
            "seed": args.seed,
            "tol": args.tol,
            "projector_identities": identities,
            "max_bell_residual": max_residual,
            "signaling_failures": signaling_failures,
            "level3_failures": level3_failures,
        });
        println!("{}", serde_json::to_string_pretty(&out)?);
    } else {
        println!(
            "projector identities: X {:.2e}, Y {:.2e}, Z {:.2e}",
            identities.x, identities.y, identities.z
        );
        println!(
            "bell probabilities, box vs Born rule: max residual {max_residual:.2e} over {} states",
            args.samples
        );
        println!("boxes failing no-signaling validation: {signaling_failures}");
        println!("boxes failing level 3: {level3_failures}");
        println!("{}", if passed { "pass" } else { "fail" });
    }
    Ok(passed)
}

fn run(cli: Cli) -> Result<bool> {
    match &cli.command {
        Command::Validate(a) => validate(a),
        Command::ScanBall(a) => scan_ball(a).map(|_| true),
        Command::ScanLh(a) => scan_lh(a).map(|_| true),
        Command::Chsh(a) => chsh(a).map(|_| true),
        Command::Oracle(a) => oracle(a),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
