use std::f64::consts::PI;

use proptest::prelude::*;

use largediff::discretization::{
    assemble, average, norm, AveragingProjection, CoefficientField, DiscreteOperator, IntervalMesh,
    NormKind,
};
use largediff::dynamics::{hausdorff, step, AttractorSample, ModalBasis, Reaction};
use largediff::exec::Execution;
use largediff::harness::{sweep, FamilyKind, Quantity, RunConfig, ScaleFamily};
use largediff::spectral::{default_radius, eigensolve, riesz_projection};

fn f1(n: usize, eps: f64) -> DiscreteOperator {
    ScaleFamily::of(FamilyKind::F1).operator(n, eps, 0.1).unwrap()
}

fn sample(points: Vec<Vec<f64>>) -> AttractorSample {
    AttractorSample {
        points,
        v_lo: 0.0,
        v_hi: 0.0,
    }
}

fn vector(n: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-2.0f64..2.0, n)
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn energy_norm_is_a_norm(u in vector(17), v in vector(17), s in -3.0f64..3.0, k in 0i32..8) {
        let op = f1(16, 0.5f64.powi(k + 2));
        let nu = op.energy_norm(&u);
        let su: Vec<f64> = u.iter().map(|x| s * x).collect();
        prop_assert!((op.energy_norm(&su) - s.abs() * nu).abs() <= 1e-10 * nu.max(1.0));
        let w: Vec<f64> = u.iter().zip(&v).map(|(a, b)| a + b).collect();
        prop_assert!(op.energy_norm(&w) <= nu + op.energy_norm(&v) + 1e-10);
        // coercivity: ‖u‖_energy >= sqrt(m0) ‖u‖_L2
        let l2 = norm(&u, &op, NormKind::L2).unwrap();
        prop_assert!(nu >= (0.1f64).sqrt() * l2 * (1.0 - 1e-12));
    }

    #[test]
    fn gram_matrix_is_symmetric_and_matches_elementwise_product(u in vector(17), v in vector(17)) {
        let op = f1(16, 1.0 / 32.0);
        let a = op.gram().bilinear(&u, &v);
        let b = op.gram().bilinear(&v, &u);
        prop_assert!((a - b).abs() <= 1e-12 * a.abs().max(1.0));
        let gu = op.apply_gram(&u);
        let c: f64 = gu.iter().zip(&v).map(|(x, y)| x * y).sum();
        prop_assert!((a - c).abs() <= 1e-9 * a.abs().max(1.0));
    }

    #[test]
    fn averaging_is_a_projection(u in vector(33), c in -5.0f64..5.0) {
        let op = f1(32, 0.25);
        let p = AveragingProjection::new(&op);
        let pu = p.apply(&u).unwrap();
        prop_assert!((average(&pu, &p).unwrap() - pu[0]).abs() <= 1e-13);
        let shifted: Vec<f64> = u.iter().map(|x| x + c).collect();
        prop_assert!((average(&shifted, &p).unwrap() - pu[0] - c).abs() <= 1e-12);
    }

    #[test]
    fn hausdorff_is_a_pseudometric(
        a in prop::collection::vec(vector(9), 1..5),
        b in prop::collection::vec(vector(9), 1..5),
        c in prop::collection::vec(vector(9), 1..5),
    ) {
        let op = f1(8, 0.25);
        let (a, b, c) = (sample(a), sample(b), sample(c));
        let ab = hausdorff(&a, &b, &op).unwrap();
        let ba = hausdorff(&b, &a, &op).unwrap();
        prop_assert!((ab.d_h - ba.d_h).abs() <= 1e-12 * ab.d_h.max(1.0));
        prop_assert!((ab.d_h - ab.dist_ab - ab.dist_ba).abs() <= 1e-14 * ab.d_h.max(1.0));
        let bc = hausdorff(&b, &c, &op).unwrap().d_h;
        let ac = hausdorff(&a, &c, &op).unwrap().d_h;
        prop_assert!(ac <= ab.d_h + bc + 1e-10);
        prop_assert_eq!(hausdorff(&a, &a, &op).unwrap().d_h, 0.0);
    }

    #[test]
    fn exponential_euler_is_exact_for_linear_reaction_on_modes(j in 0usize..9, dt in 1e-3f64..0.5, c in -2.0f64..0.0) {
        let op = f1(8, 0.25);
        let basis = ModalBasis::new(&op).unwrap();
        let phi: Vec<f64> = basis.phi().column(j).iter().copied().collect();
        let next = step(&basis, &Reaction::Linear { slope: c }, &phi, dt).unwrap();
        let lam = basis.value(j);
        let factor = (-lam * dt).exp() + c * (1.0 - (-lam * dt).exp()) / lam;
        for (a, b) in next.iter().zip(&phi) {
            prop_assert!((a - factor * b).abs() <= 1e-10 * b.abs().max(1.0));
        }
    }

    #[test]
    fn riesz_projection_is_idempotent(k in 2i32..9) {
        let op = f1(24, 0.5f64.powi(k));
        let dec = eigensolve(&op, 2).unwrap();
        let q = riesz_projection(&op, 0.5, default_radius(0.5, 0.1, &dec), 32).unwrap();
        prop_assert!(q.idempotency_defect() <= 1e-8);
        prop_assert_eq!(q.enclosed, 1);
    }

    #[test]
    fn delta_column_matches_family_rule(k in 2i32..12) {
        for kind in [FamilyKind::F1, FamilyKind::F2, FamilyKind::Const] {
            let fam = ScaleFamily::of(kind);
            let eps = 0.5f64.powi(k);
            prop_assert!((fam.delta(eps) - fam.tau(eps) - fam.p(eps).powf(-0.5)).abs() <= 1e-14);
        }
    }
}

#[test]
fn cubic_reaction_validates() {
    Reaction::Cubic.validate().unwrap();
    Reaction::Linear { slope: -1.0 }.validate().unwrap();
    assert!(Reaction::Linear { slope: 1.0 }.validate().is_err());
}

#[test]
fn coefficient_field_rejects_small_diffusion() {
    let mesh = IntervalMesh::uniform(0.0, 1.0, 8).unwrap();
    assert!(CoefficientField::constant(&mesh, 0.05, 0.0, 0.5, 0.1).is_err());
    let c = CoefficientField::from_fns(&mesh, |_| 2.0, |x| (PI * x).cos() * 0.1, 0.5, 0.1).unwrap();
    assert!(assemble(&mesh, &c).is_ok());
}

#[test]
fn parallel_and_sequential_sweeps_agree() {
    let cfg = RunConfig {
        n: 48,
        n_grid: 17,
        eps_lo: 1.0 / 64.0,
        ..RunConfig::default()
    };
    for q in [Quantity::Resolvent, Quantity::Manifold] {
        let a = sweep(&cfg, q, Execution::Parallel).unwrap();
        let b = sweep(&cfg, q, Execution::Sequential).unwrap();
        assert_eq!(a, b);
    }
}

#[test]
fn resolvent_errors_decrease_along_the_sweep() {
    let cfg = RunConfig {
        n: 64,
        ..RunConfig::default()
    };
    let s = sweep(&cfg, Quantity::Resolvent, Execution::default()).unwrap();
    assert_eq!(s.rows.len(), 9);
    assert!(s.rows.windows(2).all(|w| w[1].error < w[0].error));
}
