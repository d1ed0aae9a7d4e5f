use wavekin::consistency::{consistency_study, exact_flux, observed_orders, ReferenceQuadrature};
use wavekin::{CollisionOperator, CrossGainArgument, Grid, SimConfig};

fn residual(cells: usize, reading: CrossGainArgument, quad: &ReferenceQuadrature) -> f64 {
    let cfg = SimConfig::test_case_1();
    let kk = cfg.kernels().unwrap();
    let ic = cfg.ic.clone();
    let grid = Grid::uniform(cfg.omega_min, cfg.omega_max, cells).unwrap();
    let n = ic.project(&grid).unwrap();
    let exact = exact_flux(&|w| ic.density(w), &grid, &kk, quad);
    let discrete = CollisionOperator::new(grid, kk)
        .with_cross_gain(reading)
        .rhs(&n)
        .unwrap();
    exact.iter().zip(&discrete).map(|(a, b)| (a - b).abs()).sum()
}

#[test]
fn residuals_halve_with_the_mesh_width() {
    let cfg = SimConfig::test_case_1();
    let ic = cfg.ic.clone();
    let levels = consistency_study(
        &|w| ic.density(w),
        &|g: &Grid| ic.project(g),
        &cfg.kernels().unwrap(),
        cfg.omega_min,
        cfg.omega_max,
        &[16, 32, 64],
        &ReferenceQuadrature::default(),
    )
    .unwrap();
    let eps: Vec<f64> = levels.iter().map(|l| l.eps_l1).collect();
    let frozen = [9.422_874_690_769_74e-2, 4.720_744_107_043_9e-2, 2.355_051_205_790_06e-2];
    for (e, f) in eps.iter().zip(frozen) {
        assert!((e - f).abs() < 1e-6 * f, "{eps:?}");
    }
    for o in observed_orders(&levels) {
        let o = o.unwrap();
        assert!((0.7..=1.4).contains(&o), "{o}");
    }
    for pair in levels.windows(2) {
        let ratio = pair[0].eps_l1 / pair[1].eps_l1;
        assert!((1.6..=2.6).contains(&ratio));
    }
}

#[test]
fn target_argument_in_cross_gain_is_inconsistent() {
    let quad = ReferenceQuadrature::default();
    let coarse = residual(16, CrossGainArgument::Target, &quad);
    let fine = residual(64, CrossGainArgument::Target, &quad);
    assert!(fine > coarse, "{coarse} -> {fine}");
    assert!(residual(64, CrossGainArgument::Partner, &quad) < 0.5 * fine);
}

#[test]
fn reference_quadrature_is_converged() {
    let coarse = residual(16, CrossGainArgument::Partner, &ReferenceQuadrature::default());
    let fine = residual(16, CrossGainArgument::Partner, &ReferenceQuadrature::new(8, 3, 72));
    assert!((coarse - fine).abs() < 1e-4 * fine, "{coarse} vs {fine}");
}

#[test]
fn zero_strength_has_zero_residual() {
    let mut cfg = SimConfig::test_case_1();
    cfg.params.c1 = 0.0;
    cfg.params.c2 = 0.0;
    let ic = cfg.ic.clone();
    let levels = consistency_study(
        &|w| ic.density(w),
        &|g: &Grid| ic.project(g),
        &cfg.kernels().unwrap(),
        cfg.omega_min,
        cfg.omega_max,
        &[8, 16],
        &ReferenceQuadrature::default(),
    )
    .unwrap();
    assert!(levels.iter().all(|l| l.eps_l1 == 0.0));
    assert_eq!(observed_orders(&levels), vec![None]);
}
