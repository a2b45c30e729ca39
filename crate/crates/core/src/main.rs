use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use branchpack::branch_check::{verify_on_lattice, Verdict};
use branchpack::complex::{build_subcomplex, snap_branch_points, BranchAssignment};
use branchpack::pipeline::{
    convergence_report, run_meshes, save_radii, save_report, save_svg, write_report_csv, MeshOutcome, Output, ProblemSpec,
    RenderOptions, SpecError,
};
use clap::{Args, Parser, Subcommand};
use serde::Serialize;

#[derive(Parser)]
#[command(name = "branchpack", version, about = "Branched circle packings with prescribed boundary modulus")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve every mesh and write the outputs listed in the problem file.
    Run(Common),
    /// Solve every mesh and write report.csv (also printed to stdout).
    Report(Common),
    /// Solve every mesh and write packing_<n>.svg.
    Render {
        #[command(flatten)]
        common: Common,
        /// Draw the regular source packing next to the target.
        #[arg(long)]
        pair: bool,
        /// Leave out the carrier edges.
        #[arg(long)]
        no_edges: bool,
    },
    /// Check the snapped branch set on every mesh; one JSON line per mesh.
    CheckBranch {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long, value_delimiter = ',')]
        n: Option<Vec<u32>>,
    },
}

#[derive(Args)]
struct Common {
    /// Problem file (JSON).
    #[arg(long)]
    spec: PathBuf,
    /// Output directory, created if missing.
    #[arg(long, default_value = ".")]
    out: PathBuf,
    /// Comma-separated mesh list replacing the one in the problem file.
    #[arg(long, value_delimiter = ',')]
    n: Option<Vec<u32>>,
    /// Radius of the probe disk around 0.
    #[arg(long)]
    probe_radius: Option<f64>,
}

enum Failure {
    Spec(String),
    Meshes,
}

fn load(path: &Path, n: Option<Vec<u32>>, probe_radius: Option<f64>) -> Result<ProblemSpec, Failure> {
    let mut spec = ProblemSpec::load(path).map_err(|e| Failure::Spec(e.to_string()))?;
    if let Some(n) = n {
        spec.meshes = n;
    }
    if probe_radius.is_some() {
        spec.probe_radius = probe_radius;
    }
    spec.validate().map_err(|e: SpecError| Failure::Spec(e.to_string()))?;
    Ok(spec)
}

fn solve_all(spec: &ProblemSpec) -> Vec<MeshOutcome> {
    let outcomes = run_meshes(spec, &spec.meshes);
    for o in &outcomes {
        match &o.result {
            Ok(run) => eprintln!("n={}: ok, {} sweeps, {:.3}s", o.n, run.map.target().sweeps, run.elapsed.as_secs_f64()),
            Err(e) => eprintln!("n={}: {} ({e})", o.n, e.label()),
        }
    }
    outcomes
}

fn io_fail(e: std::io::Error) -> Failure {
    Failure::Spec(format!("cannot write output: {e}"))
}

fn verdict(outcomes: &[MeshOutcome]) -> Result<(), Failure> {
    if outcomes.iter().all(|o| o.result.is_ok()) {
        Ok(())
    } else {
        Err(Failure::Meshes)
    }
}

fn run(c: Common, wanted: &[Output], pair: bool, opts: RenderOptions) -> Result<(), Failure> {
    let spec = load(&c.spec, c.n, c.probe_radius)?;
    std::fs::create_dir_all(&c.out).map_err(io_fail)?;
    let outcomes = solve_all(&spec);
    for o in &outcomes {
        let Ok(run) = &o.result else { continue };
        if wanted.contains(&Output::Radii) {
            save_radii(run, &c.out).map_err(io_fail)?;
        }
        if wanted.contains(&Output::Svg) {
            save_svg(run, &c.out, pair, opts).map_err(io_fail)?;
        }
    }
    if wanted.contains(&Output::Report) {
        let rows = convergence_report(&spec, &outcomes, None);
        save_report(&rows, &c.out).map_err(io_fail)?;
        if wanted == [Output::Report] {
            write_report_csv(&rows, std::io::stdout().lock()).map_err(|e| io_fail(e.into()))?;
        }
    }
    verdict(&outcomes)
}

#[derive(Serialize)]
struct BranchLine {
    n: u32,
    status: String,
    verdict: Option<Verdict>,
}

fn check_branch(path: &Path, n: Option<Vec<u32>>) -> Result<(), Failure> {
    let spec = load(path, n, None)?;
    let mut failed = false;
    let mut out = std::io::stdout().lock();
    for &n in &spec.meshes {
        let line = match build_subcomplex(&spec.domain, spec.xi_point(), n) {
            Err(e) => BranchLine { n, status: e.to_string(), verdict: None },
            Ok(c) => {
                let crit = spec.crit_list();
                let br = if crit.is_empty() { Ok(BranchAssignment::empty()) } else { snap_branch_points(&c, &crit) };
                match br {
                    Err(e) => BranchLine { n, status: e.to_string(), verdict: None },
                    Ok(br) => {
                        let v = verify_on_lattice(&c, &br).0;
                        let status = if v.is_ok() { "ok" } else { "not_branch_structure" };
                        BranchLine { n, status: status.into(), verdict: Some(v) }
                    }
                }
            }
        };
        failed |= line.status != "ok";
        let text = serde_json::to_string(&line).expect("plain data serialises");
        writeln!(out, "{text}").map_err(io_fail)?;
    }
    if failed {
        Err(Failure::Meshes)
    } else {
        Ok(())
    }
}

fn main() -> ExitCode {
    // clap would exit with 2 on usage errors, which is reserved for failed meshes
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    let result = match cli.command {
        Command::Run(c) => {
            let wanted = match ProblemSpec::load(&c.spec) {
                Ok(s) => s.outputs,
                Err(e) => {
                    eprintln!("error: {e}");
                    return ExitCode::from(1);
                }
            };
            run(c, &wanted, false, RenderOptions::default())
        }
        Command::Report(c) => run(c, &[Output::Report], false, RenderOptions::default()),
        Command::Render { common, pair, no_edges } => run(common, &[Output::Svg], pair, RenderOptions { edges: !no_edges }),
        Command::CheckBranch { spec, n } => check_branch(&spec, n),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Spec(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Meshes) => ExitCode::from(2),
    }
}
