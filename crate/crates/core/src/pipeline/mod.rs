//! The approximation pipeline: problem files, per-mesh runs, reports and pictures.

mod render;
mod report;
mod run;
mod spec;

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

pub use render::{overlap_audit, render_map_svg, render_packing_svg, render_pair_svg, OverlapError, RenderOptions, OVERLAP_TOL_REL};
pub use report::{
    convergence_report, disk_oracle, log_ratio_laplacian, probe_grid, write_radii_csv, write_report_csv, Probe, ReportRow,
    LAPLACIAN_CLEARANCE, ORACLE_SAMPLES, PROBE_GRID, RATIO_EXCLUSION,
};
pub use run::{run_mesh, run_meshes, run_pipeline, BoundaryDatum, MeshFailure, MeshOutcome, MeshRun};
pub use spec::{CritPoint, LambdaSpec, Output, ProblemSpec, SpecError};

fn create(path: &Path) -> io::Result<BufWriter<File>> {
    Ok(BufWriter::new(File::create(path)?))
}

pub fn save_report(rows: &[ReportRow], dir: &Path) -> io::Result<()> {
    let mut f = create(&dir.join("report.csv"))?;
    write_report_csv(rows, &mut f)?;
    f.flush()
}

pub fn save_radii(run: &MeshRun, dir: &Path) -> io::Result<()> {
    let mut f = create(&dir.join(format!("radii_{}.csv", run.n)))?;
    write_radii_csv(run, &mut f)?;
    f.flush()
}

/// Writes `packing_<n>.svg`, or the side-by-side picture when `pair` is set.
pub fn save_svg(run: &MeshRun, dir: &Path, pair: bool, opts: RenderOptions) -> io::Result<()> {
    let svg = if pair { render_pair_svg(&run.map, opts) } else { render_map_svg(&run.map, opts) };
    let svg = svg.map_err(|e| io::Error::new(io::ErrorKind::InvalidData, e))?;
    std::fs::write(dir.join(format!("packing_{}.svg", run.n)), svg)
}
