use bhq::basis::{variable_pair, BasisKind};
use bhq::linalg::eigvals_hermitian;
use bhq::models::{
    build_mass, build_operator, classical_mass, contour_field, linspace, mass_potential,
    nariai_mass, thermo, Conventions, Grid2, KernelTreatment, ModelSpec, OperatorKind,
};
use bhq::oracle::{exact_lowest, exact_lowest_with, exact_spectrum};
use bhq::report::{table_csv, table_rows};
use bhq::Error;

#[test]
fn every_operator_is_hermitian() {
    let specs = [
        ModelSpec::btz(2.0),
        ModelSpec::rn(1.0),
        ModelSpec::rnds(2.0, 0.01),
        ModelSpec::string2d(1.0),
    ];
    for basis in [BasisKind::Oscillator, BasisKind::Position] {
        let vars = variable_pair(4, basis).unwrap();
        for s in &specs {
            for kind in [OperatorKind::Mass, OperatorKind::AbsH, OperatorKind::AbsCommutator] {
                let (op, scale) = build_operator(s, &vars, kind, &Conventions::default()).unwrap();
                assert_eq!(op.dim(), 16);
                assert!(op.hermiticity_defect() <= 1e-10, "{} {basis} {kind}", s.label());
                assert!(scale > 0.0);
            }
        }
    }
}

#[test]
fn mass_spectrum_bounded_below_by_zero() {
    for q in [0.5, 1.0, 2.0] {
        for basis in [BasisKind::Oscillator, BasisKind::Position] {
            let r = exact_spectrum(&ModelSpec::rn(q), basis, 4, OperatorKind::Mass).unwrap();
            assert!(r.scaled_eigenvalues[0] >= -1e-10);
        }
    }
}

#[test]
fn pseudo_inverse_mass_has_zero_ground_state() {
    // the kinetic and quadratic parts share a zero mode on the coincident subspace
    let conv = Conventions::pseudo_inverse();
    for spec in [ModelSpec::btz(1.0), ModelSpec::rn(2.0), ModelSpec::string2d(1.0)] {
        for basis in [BasisKind::Oscillator, BasisKind::Position] {
            let m = exact_lowest_with(&spec, basis, 4, OperatorKind::Mass, &conv).unwrap();
            assert!(m.abs() < 1e-9, "{} {basis}: {m}", spec.label());
        }
    }
}

#[test]
fn wall_value_saturates() {
    let spec = ModelSpec::btz(3.0);
    let at = |w: f64| {
        let conv = Conventions {
            mass_kernel: KernelTreatment::Wall(w),
            ..Conventions::default()
        };
        exact_lowest_with(&spec, BasisKind::Position, 4, OperatorKind::Mass, &conv).unwrap()
    };
    let reference = at(100.0);
    for w in [10.0, 1e3, 1e4] {
        assert!((at(w) - reference).abs() < 1e-9);
    }
}

#[test]
fn lowest_mass_grows_with_rotation() {
    let ms: Vec<f64> = (1..=5)
        .map(|j| exact_lowest(&ModelSpec::btz(j as f64), BasisKind::Position, 4, OperatorKind::Mass).unwrap())
        .collect();
    assert!(ms.windows(2).all(|w| w[0] < w[1]), "{ms:?}");
}

#[test]
fn rn_scale_of_four() {
    let vars = variable_pair(4, BasisKind::Position).unwrap();
    let (op, scale) = build_operator(&ModelSpec::rn(2.0), &vars, OperatorKind::Mass, &Conventions::default()).unwrap();
    assert_eq!(scale, 4.0);
    let lowest = eigvals_hermitian(&op).unwrap()[0];
    let unscaled = exact_lowest(&ModelSpec::rn(2.0), BasisKind::Position, 4, OperatorKind::Mass).unwrap();
    assert_eq!(unscaled, lowest / 4.0);
}

#[test]
fn larger_register() {
    let vars = variable_pair(6, BasisKind::Position).unwrap();
    let m = build_mass(&ModelSpec::btz(1.0), &vars).unwrap();
    assert_eq!(m.dim(), 64);
    assert!(matches!(variable_pair(3, BasisKind::Position), Err(Error::Dimension(_)) | Err(Error::Domain(_))));
}

#[test]
fn model_validation() {
    let mut bad = ModelSpec::rn(1.0);
    bad.rotation = Some(1.0);
    assert!(bad.validate().is_err());
    let mut no_lambda = ModelSpec::rnds(1.0, 0.01);
    no_lambda.lambda = None;
    assert!(no_lambda.validate().is_err());
    assert!(ModelSpec::btz(1.0).with_ell(0.0).validate().is_err());
    assert!(ModelSpec::rnds(1.0, -0.1).validate().is_err());
}

#[test]
fn thermo_examples() {
    let t = thermo(&ModelSpec::rn(2.0), 2.5).unwrap();
    assert_eq!((t.r_plus, t.r_minus), (4.0, 1.0));
    assert!((t.entropy - 50.26548).abs() < 1e-5);
    let ext = thermo(&ModelSpec::rn(2.0), 2.0).unwrap();
    assert_eq!(ext.temperature, 0.0);
    assert!(ext.beta.is_infinite());
    let json = serde_json::to_value(ext).unwrap();
    assert!(json["beta"].is_null());
    for spec in [ModelSpec::btz(1.5), ModelSpec::rnds(1.5, 0.01), ModelSpec::string2d(1.5)] {
        assert_eq!(thermo(&spec, spec.extremal_mass()).unwrap().temperature, 0.0);
    }
    assert!(matches!(thermo(&ModelSpec::rn(2.0), 1.5), Err(Error::Extremality(_))));
}

#[test]
fn btz_potential_minimum() {
    let spec = ModelSpec::btz(1.0);
    let grid = linspace(0.05, 3.0, 2000);
    let min = grid
        .iter()
        .map(|&b| mass_potential(&spec, b).unwrap())
        .fold(f64::INFINITY, f64::min);
    assert!((min - 1.0).abs() < 1e-5);
    assert!(mass_potential(&spec, 0.0).is_err());
}

#[test]
fn rn_turning_points() {
    let spec = ModelSpec::rn(2.0);
    assert_eq!(classical_mass(&spec, 0.0, 1.0).unwrap(), 2.5);
    assert_eq!(classical_mass(&spec, 0.0, 4.0).unwrap(), 2.5);
    let grid = Grid2 {
        p_min: -1.0,
        p_max: 1.0,
        p_samples: 3,
        b_min: 1.0,
        b_max: 4.0,
        b_samples: 4,
    };
    let field = contour_field(&spec, 2.5, &grid).unwrap();
    assert_eq!(field.len(), 12);
    let at = |p: f64, b: f64| field.iter().find(|c| c.p_a == p && c.b == b).unwrap().residual;
    assert_eq!(at(0.0, 1.0), 0.0);
    assert_eq!(at(0.0, 4.0), 0.0);
    let bad = Grid2 { b_min: 0.0, ..grid };
    assert!(contour_field(&spec, 2.5, &bad).is_err());
}

#[test]
fn nariai_values() {
    assert!((nariai_mass(2.0, 0.01).unwrap() - 3.535433).abs() < 1e-4);
    // without charge the maximum sits at b = 1/sqrt(lambda), V = 1/(3 sqrt(lambda))
    assert!((nariai_mass(0.0, 0.01).unwrap() - 10.0 / 3.0).abs() < 1e-9);
    assert!(nariai_mass(6.0, 0.01).is_err());
    assert!(nariai_mass(1.0, 0.0).is_err());
}

#[test]
fn report_table_layout() {
    let t3 = table_rows(3).unwrap();
    assert_eq!(t3.len(), 2);
    assert_eq!(t3[0].spec, ModelSpec::rn(1.0));
    assert_eq!(t3[1].spec, ModelSpec::rn(2.0));
    assert!(table_rows(9).is_err());
    let rows = bhq::report::compute_table(7, &Default::default()).unwrap();
    assert_eq!(rows.iter().map(|r| r.paulis).collect::<Vec<_>>(), vec![72, 72]);
    let csv = table_csv(&rows);
    assert_eq!(csv.lines().count(), 3);
    assert!(csv.lines().skip(1).all(|l| l.starts_with("\"|[H,M]|")));
}
