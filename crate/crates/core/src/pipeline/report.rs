use std::f64::consts::TAU;
use std::io::Write;

use serde::Serialize;

use super::run::{MeshOutcome, MeshRun};
use super::spec::ProblemSpec;
use crate::cpmap::{locate_in_complex, CpMap};
use crate::oracle::{DiskProblem, OracleError};
use crate::Complex64;

/// Grid resolution of the probe disk.
pub const PROBE_GRID: usize = 41;
/// Samples of `λ` handed to the disk oracle.
pub const ORACLE_SAMPLES: usize = 1024;
/// Probe points closer than this fraction of the probe radius to a critical
/// point are left out of the ratio column.
pub const RATIO_EXCLUSION: f64 = 0.2;
/// Graph distance from branch and boundary vertices required for the Laplacian audit.
pub const LAPLACIAN_CLEARANCE: usize = 3;

/// One row of `report.csv`. Column order is fixed by field order.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ReportRow {
    pub n: u32,
    pub status: String,
    pub vertices: Option<usize>,
    pub interior: Option<usize>,
    /// `sup |f_n − F|` over the probe set (disk oracle only).
    pub sup_f_err: Option<f64>,
    /// `sup |f_n♯ − |F′||` over the probe set away from critical points.
    pub sup_ratio_err: Option<f64>,
    /// `max |f_n♯(v) − λ(z_v)|` over boundary vertices.
    pub boundary_pin_err: Option<f64>,
    /// Largest vertex ratio divided by the largest boundary `λ`.
    pub ratio_max_over_lambda_max: Option<f64>,
    /// `max |turning(v) − 2π(1 + k_v)|` over interior vertices.
    pub winding_err: Option<f64>,
    pub angle_residual: Option<f64>,
    pub tangency_defect: Option<f64>,
    pub sweeps: Option<usize>,
    /// Max discrete Laplacian of `log f_n♯` away from branch points and boundary.
    pub laplacian_log_ratio_max: Option<f64>,
}

impl ReportRow {
    fn failed(n: u32, status: &str) -> Self {
        Self {
            n,
            status: status.to_string(),
            vertices: None,
            interior: None,
            sup_f_err: None,
            sup_ratio_err: None,
            boundary_pin_err: None,
            ratio_max_over_lambda_max: None,
            winding_err: None,
            angle_residual: None,
            tangency_defect: None,
            sweeps: None,
            laplacian_log_ratio_max: None,
        }
    }
}

/// Probe points: a square grid clipped to the closed disk `|z| ≤ radius` and to the carrier.
#[derive(Clone, Debug)]
pub struct Probe {
    pub radius: f64,
    pub points: Vec<Complex64>,
    /// Subset of `points` used for the ratio column.
    pub ratio_points: Vec<Complex64>,
}

pub fn probe_grid(run: &MeshRun, radius: f64, crit: &[(Complex64, u32)]) -> Probe {
    let step = 2.0 * radius / (PROBE_GRID - 1) as f64;
    let mut points = Vec::new();
    for j in 0..PROBE_GRID {
        for i in 0..PROBE_GRID {
            let z = Complex64::new(-radius + step * i as f64, -radius + step * j as f64);
            if z.norm() <= radius * (1.0 + 1e-12) && locate_in_complex(&run.complex, z).is_ok() {
                points.push(z);
            }
        }
    }
    let ratio_points =
        points.iter().copied().filter(|z| crit.iter().all(|&(x, _)| (z - x).norm() >= RATIO_EXCLUSION * radius)).collect();
    Probe { radius, points, ratio_points }
}

/// Oracle for the problem if its domain is the unit disk.
pub fn disk_oracle(spec: &ProblemSpec) -> Option<Result<DiskProblem, OracleError>> {
    if !spec.domain.is_unit_disk() {
        return None;
    }
    let lambda = |t: f64| spec.lambda.at(&spec.domain.closest_boundary_point(Complex64::from_polar(1.0, t)));
    Some(DiskProblem::from_fn(lambda, ORACLE_SAMPLES, spec.crit_list(), spec.xi))
}

/// Discrete Laplacian `(2/(3h²)) Σ (g_u − g_v)`, `h = 2/n`, of `g = log f_n♯`,
/// maximised in absolute value over interior vertices at least
/// [`LAPLACIAN_CLEARANCE`] steps from the boundary and from branch vertices.
pub fn log_ratio_laplacian(run: &MeshRun) -> Option<f64> {
    let c = &run.complex;
    let g: Vec<f64> = run.map.vertex_ratios().iter().map(|r| r.ln()).collect();
    let from_boundary = c.graph_distances(&c.boundary_vertices());
    let branch: Vec<usize> = run.branch.vertices().collect();
    let from_branch = if branch.is_empty() { vec![usize::MAX; c.vertex_count()] } else { c.graph_distances(&branch) };
    let h = 2.0 / f64::from(run.n);
    let scale = 2.0 / (3.0 * h * h);
    (0..c.vertex_count())
        .filter(|&v| from_boundary[v] >= LAPLACIAN_CLEARANCE && from_branch[v] >= LAPLACIAN_CLEARANCE)
        .map(|v| (scale * c.neighbors(v).iter().map(|&u| g[u] - g[v]).sum::<f64>()).abs())
        .reduce(f64::max)
}

fn row_for(run: &MeshRun, spec: &ProblemSpec, oracle: Option<&DiskProblem>, probe_radius: f64) -> ReportRow {
    let map: &CpMap = &run.map;
    let target = map.target();
    let c = &run.complex;
    let crit = spec.crit_list();
    let probe = probe_grid(run, probe_radius, &crit);

    let (sup_f_err, sup_ratio_err) = match oracle {
        Some(o) => {
            let f_err = probe
                .points
                .iter()
                .filter_map(|&z| Some((map.evaluate(z).ok()? - o.eval(z).ok()?).norm()))
                .fold(0.0, f64::max);
            let r_err = probe
                .ratio_points
                .iter()
                .filter_map(|&z| Some((map.ratio(z).ok()? - o.abs_derivative(z)).abs()))
                .fold(0.0, f64::max);
            (Some(f_err), Some(r_err))
        }
        None => (None, None),
    };

    let pin = run.boundary.iter().map(|b| (map.vertex_ratio(b.vertex) - b.lambda).abs()).fold(0.0, f64::max);
    let lambda_max = run.boundary.iter().map(|b| b.lambda).fold(0.0, f64::max);
    let ratio_max = map.vertex_ratios().into_iter().fold(0.0, f64::max);
    let orders = run.branch.order_table(c.vertex_count());
    let winding = c
        .interior_vertices()
        .into_iter()
        .map(|v| (target.fan_turning(v) - TAU * f64::from(1 + orders[v])).abs())
        .fold(0.0, f64::max);

    ReportRow {
        n: run.n,
        status: "ok".into(),
        vertices: Some(c.vertex_count()),
        interior: Some(c.interior_vertices().len()),
        sup_f_err,
        sup_ratio_err,
        boundary_pin_err: Some(pin),
        ratio_max_over_lambda_max: Some(ratio_max / lambda_max),
        winding_err: Some(winding),
        angle_residual: Some(target.residuals.angle_sum),
        tangency_defect: Some(target.residuals.tangency),
        sweeps: Some(target.sweeps),
        laplacian_log_ratio_max: log_ratio_laplacian(run),
    }
}

/// One row per mesh, ordered by `n`. Failed meshes get their status label and empty columns.
pub fn convergence_report(spec: &ProblemSpec, outcomes: &[MeshOutcome], probe_radius: Option<f64>) -> Vec<ReportRow> {
    let oracle = disk_oracle(spec).and_then(Result::ok);
    let radius = probe_radius.unwrap_or_else(|| spec.probe_radius());
    outcomes
        .iter()
        .map(|o| match &o.result {
            Ok(run) => row_for(run, spec, oracle.as_ref(), radius),
            Err(e) => ReportRow::failed(o.n, e.label()),
        })
        .collect()
}

pub fn write_report_csv<W: Write>(rows: &[ReportRow], out: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Serialize)]
struct RadiusRow {
    vertex: usize,
    k: i64,
    l: i64,
    radius: f64,
    center_re: f64,
    center_im: f64,
}

/// `radii_<n>.csv`: vertex id, lattice coordinates, radius and centre of the target packing.
pub fn write_radii_csv<W: Write>(run: &MeshRun, out: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let t = run.map.target();
    for (v, lv) in run.complex.vertices().iter().enumerate() {
        w.serialize(RadiusRow {
            vertex: v,
            k: lv.k,
            l: lv.l,
            radius: t.radii[v],
            center_re: t.centers[v].re,
            center_im: t.centers[v].im,
        })?;
    }
    w.flush()?;
    Ok(())
}
