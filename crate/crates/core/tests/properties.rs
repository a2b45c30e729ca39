use std::f64::consts::TAU;
use std::sync::Arc;

use branchpack::complex::{build_subcomplex, snap_branch_points, BranchAssignment, DomainSpec, TriComplex};
use branchpack::cpmap::{max_principle_audit, CpMap};
use branchpack::pipeline::{
    convergence_report, run_pipeline, write_radii_csv, write_report_csv, CritPoint, LambdaSpec, ProblemSpec,
};
use branchpack::solver::{normalize, PackingSolution, SolverConfig, SweepOrder};
use branchpack::Complex64;
use proptest::prelude::*;

const N: u32 = 8;

fn disk() -> Arc<TriComplex> {
    Arc::new(build_subcomplex(&DomainSpec::unit_disk(), Complex64::new(0.5, 0.0), N).unwrap())
}

/// Positive, smooth-ish boundary table from a few Fourier modes of `log λ`.
fn lambda_table() -> impl Strategy<Value = Vec<f64>> {
    (0.5f64..2.0, prop::collection::vec(-0.3f64..0.3, 4)).prop_map(|(base, m)| {
        (0..32)
            .map(|j| {
                let t = TAU * f64::from(j) / 32.0;
                base * (m[0] * t.cos() + m[1] * t.sin() + m[2] * (2.0 * t).cos() + m[3] * (2.0 * t).sin()).exp()
            })
            .collect()
    })
}

fn crit_point() -> impl Strategy<Value = Option<Complex64>> {
    prop::option::of((0.0f64..0.4, 0.0f64..TAU).prop_map(|(r, t)| Complex64::from_polar(r, t)))
}

fn boundary_radii(complex: &TriComplex, table: &[f64]) -> Vec<f64> {
    let lambda = LambdaSpec::Angle(table.to_vec());
    let d = DomainSpec::unit_disk();
    complex
        .boundary_vertices()
        .into_iter()
        .map(|v| lambda.at(&d.closest_boundary_point(complex.pos(v))) / f64::from(complex.mesh_n()))
        .collect()
}

fn branch(complex: &TriComplex, x: Option<Complex64>) -> BranchAssignment {
    x.map_or_else(BranchAssignment::empty, |x| snap_branch_points(complex, &[(x, 1)]).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn solve_is_homogeneous(table in lambda_table(), x in crit_point(), s in 0.05f64..20.0) {
        let c = disk();
        let br = branch(&c, x);
        let rho = boundary_radii(&c, &table);
        let config = SolverConfig::default();
        let a = PackingSolution::solve(Arc::clone(&c), &rho, br.clone(), &config).unwrap();
        let scaled: Vec<f64> = rho.iter().map(|r| s * r).collect();
        let b = PackingSolution::solve(Arc::clone(&c), &scaled, br, &config).unwrap();
        for v in 0..c.vertex_count() {
            prop_assert!((b.radii[v] - s * a.radii[v]).abs() <= 1e-9 * s * a.radii[v]);
        }
    }

    #[test]
    fn sweep_order_does_not_matter(table in lambda_table(), x in crit_point(), seed in any::<u64>()) {
        let c = disk();
        let br = branch(&c, x);
        let rho = boundary_radii(&c, &table);
        let natural = PackingSolution::solve(Arc::clone(&c), &rho, br.clone(), &SolverConfig::default()).unwrap();
        let config = SolverConfig { sweep_order: SweepOrder::Shuffled { seed }, relaxation: 1.4, ..SolverConfig::default() };
        let shuffled = PackingSolution::solve(Arc::clone(&c), &rho, br, &config).unwrap();
        for v in 0..c.vertex_count() {
            prop_assert!((natural.radii[v] - shuffled.radii[v]).abs() <= 1e-6 * natural.radii[v]);
        }
    }

    #[test]
    fn boundary_pin_and_normalisation(table in lambda_table(), x in crit_point()) {
        let c = disk();
        let br = branch(&c, x);
        let rho = boundary_radii(&c, &table);
        let p = PackingSolution::solve(Arc::clone(&c), &rho, br, &SolverConfig::default()).unwrap();
        let xi = Complex64::new(0.5, 0.0);
        let map = CpMap::new(normalize(&p, Complex64::new(0.0, 0.0), xi).unwrap());
        for (&v, &r) in c.boundary_vertices().iter().zip(&rho) {
            prop_assert!((map.vertex_ratio(v) - r * f64::from(N)).abs() <= 1e-12 * r * f64::from(N));
        }
        prop_assert!(map.evaluate(Complex64::new(0.0, 0.0)).unwrap().norm() <= 1e-10);
        let w = map.evaluate(xi).unwrap();
        prop_assert!(w.im.abs() <= 1e-10 && w.re > 0.0);
        // the ratio never exceeds its largest boundary value
        let top = rho.iter().copied().fold(0.0, f64::max) * f64::from(N);
        prop_assert!(map.vertex_ratios().into_iter().all(|q| q <= top * (1.0 + 1e-9)));
    }

    #[test]
    fn max_principles_hold(a in lambda_table(), b in lambda_table(), x in (0.0f64..0.4, 0.0f64..TAU)) {
        let c = disk();
        let br = snap_branch_points(&c, &[(Complex64::from_polar(x.0, x.1), 1)]).unwrap();
        let config = SolverConfig::default();
        let solve = |t: &[f64], br: &BranchAssignment| {
            CpMap::new(PackingSolution::solve(Arc::clone(&c), &boundary_radii(&c, t), br.clone(), &config).unwrap())
        };
        let (ma, mb, mu) = (solve(&a, &br), solve(&b, &br), solve(&a, &BranchAssignment::empty()));
        prop_assert!(max_principle_audit(&ma, &mb).is_ok());
        prop_assert!(max_principle_audit(&mu, &mb).is_ok());
    }
}

#[test]
fn pipeline_output_is_deterministic() {
    let spec = ProblemSpec {
        domain: DomainSpec::Polygon {
            vertices: vec![Complex64::new(-1.0, -0.8), Complex64::new(1.2, -0.7), Complex64::new(0.9, 1.0), Complex64::new(-0.9, 0.8)],
        },
        lambda: LambdaSpec::Arclength(vec![1.0, 1.3, 0.9, 1.1, 1.2]),
        crit: vec![CritPoint { point: Complex64::new(-0.2, 0.1), order: 1 }],
        xi: 0.4,
        meshes: vec![6, 8, 10],
        solver: SolverConfig::default(),
        outputs: vec![],
        probe_radius: None,
    };
    spec.validate().unwrap();
    let render = || {
        let outcomes = run_pipeline(&spec);
        let mut bytes = Vec::new();
        write_report_csv(&convergence_report(&spec, &outcomes, None), &mut bytes).unwrap();
        for o in &outcomes {
            write_radii_csv(o.result.as_ref().unwrap(), &mut bytes).unwrap();
        }
        bytes
    };
    let first = render();
    assert_eq!(first, render());
    // no oracle off the disk: the error columns stay empty
    let text = String::from_utf8(first).unwrap();
    assert!(text.lines().nth(1).unwrap().starts_with("6,ok,"));
    assert!(text.lines().nth(1).unwrap().contains(",,,"));
}

#[test]
fn order_two_branch_point_approaches_cube() {
    let spec = ProblemSpec {
        domain: DomainSpec::unit_disk(),
        lambda: LambdaSpec::Constant(1.0),
        crit: vec![CritPoint { point: Complex64::new(0.0, 0.0), order: 2 }],
        xi: 0.5,
        meshes: vec![8, 16],
        solver: SolverConfig { relaxation: 1.8, ..SolverConfig::default() },
        outputs: vec![],
        probe_radius: None,
    };
    let outcomes = run_pipeline(&spec);
    for o in &outcomes {
        let run = o.result.as_ref().unwrap();
        // an order-k point is snapped to k simple branch vertices
        assert_eq!(run.branch.entries().len(), 2);
        for b in run.branch.vertices() {
            assert!((run.map.target().fan_turning(b) - 2.0 * TAU).abs() < 1e-8);
        }
    }
    // F(z) = z³/3 and |F′(z)| = |z|²
    let rows = convergence_report(&spec, &outcomes, None);
    let f: Vec<f64> = rows.iter().map(|r| r.sup_f_err.unwrap()).collect();
    let q: Vec<f64> = rows.iter().map(|r| r.sup_ratio_err.unwrap()).collect();
    assert!(f[1] < f[0] && q[1] < q[0], "{f:?} {q:?}");
    assert!(f[1] < 0.03 && q[1] < 0.1);
}
