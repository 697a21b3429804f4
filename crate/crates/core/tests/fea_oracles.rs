// Oracles index explicitly to mirror the formulas.
#![allow(clippy::needless_range_loop)]

use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use stressgate_core::fea::{
    assemble_solve, assemble_solve_with, element_stiffness, element_strain, BoundaryConditions, Dim, DisplacementField,
    FeaError, FeaOptions, FeaSystem, LinearSolver, Mesh,
};

const QUAD: [[f64; 2]; 4] = [[-1.0, -1.0], [1.0, -1.0], [1.0, 1.0], [-1.0, 1.0]];
const HEX: [[f64; 3]; 8] = [
    [-1.0, -1.0, -1.0],
    [1.0, -1.0, -1.0],
    [1.0, 1.0, -1.0],
    [-1.0, 1.0, -1.0],
    [-1.0, -1.0, 1.0],
    [1.0, -1.0, 1.0],
    [1.0, 1.0, 1.0],
    [-1.0, 1.0, 1.0],
];

/// Closed-form plane-stress stiffness of a unit bilinear square.
fn closed_form_quad(nu: f64) -> DMatrix<f64> {
    let k = [
        0.5 - nu / 6.0,
        0.125 + nu / 8.0,
        -0.25 - nu / 12.0,
        -0.125 + 3.0 * nu / 8.0,
        -0.25 + nu / 12.0,
        -0.125 - nu / 8.0,
        nu / 6.0,
        0.125 - 3.0 * nu / 8.0,
    ];
    let idx = [
        [0, 1, 2, 3, 4, 5, 6, 7],
        [1, 0, 7, 6, 5, 4, 3, 2],
        [2, 7, 0, 5, 6, 3, 4, 1],
        [3, 6, 5, 0, 7, 2, 1, 4],
        [4, 5, 6, 7, 0, 1, 2, 3],
        [5, 4, 3, 2, 1, 0, 7, 6],
        [6, 3, 4, 1, 2, 7, 0, 5],
        [7, 2, 1, 4, 3, 6, 5, 0],
    ];
    DMatrix::from_fn(8, 8, |i, j| k[idx[i][j]] / (1.0 - nu * nu))
}

/// Hand-written 2x2(x2) Gauss quadrature of B^T D B for unit elements.
fn quadrature_oracle(dim: Dim, nu: f64) -> DMatrix<f64> {
    let g = 1.0 / 3f64.sqrt();
    match dim {
        Dim::Two => {
            let c = 1.0 / (1.0 - nu * nu);
            let d = DMatrix::from_row_slice(3, 3, &[c, c * nu, 0.0, c * nu, c, 0.0, 0.0, 0.0, c * (1.0 - nu) / 2.0]);
            let mut k = DMatrix::zeros(8, 8);
            for &xi in &[-g, g] {
                for &eta in &[-g, g] {
                    let mut b = DMatrix::zeros(3, 8);
                    for (a, n) in QUAD.iter().enumerate() {
                        let dx = n[0] * (1.0 + eta * n[1]) / 4.0 * 2.0;
                        let dy = n[1] * (1.0 + xi * n[0]) / 4.0 * 2.0;
                        b[(0, 2 * a)] = dx;
                        b[(1, 2 * a + 1)] = dy;
                        b[(2, 2 * a)] = dy;
                        b[(2, 2 * a + 1)] = dx;
                    }
                    // Jacobian determinant of the unit square map is 1/4.
                    k += b.transpose() * &d * &b * 0.25;
                }
            }
            k
        }
        Dim::Three => {
            let c = 1.0 / ((1.0 + nu) * (1.0 - 2.0 * nu));
            let mut d = DMatrix::zeros(6, 6);
            for i in 0..3 {
                for j in 0..3 {
                    d[(i, j)] = c * if i == j { 1.0 - nu } else { nu };
                }
                d[(i + 3, i + 3)] = c * (1.0 - 2.0 * nu) / 2.0;
            }
            let mut k = DMatrix::zeros(24, 24);
            for &xi in &[-g, g] {
                for &eta in &[-g, g] {
                    for &zeta in &[-g, g] {
                        let mut b = DMatrix::zeros(6, 24);
                        for (a, n) in HEX.iter().enumerate() {
                            let dx = n[0] * (1.0 + eta * n[1]) * (1.0 + zeta * n[2]) / 8.0 * 2.0;
                            let dy = n[1] * (1.0 + xi * n[0]) * (1.0 + zeta * n[2]) / 8.0 * 2.0;
                            let dz = n[2] * (1.0 + xi * n[0]) * (1.0 + eta * n[1]) / 8.0 * 2.0;
                            let col = 3 * a;
                            b[(0, col)] = dx;
                            b[(1, col + 1)] = dy;
                            b[(2, col + 2)] = dz;
                            b[(3, col)] = dy;
                            b[(3, col + 1)] = dx;
                            b[(4, col + 1)] = dz;
                            b[(4, col + 2)] = dy;
                            b[(5, col)] = dz;
                            b[(5, col + 2)] = dx;
                        }
                        k += b.transpose() * &d * &b * 0.125;
                    }
                }
            }
            k
        }
    }
}

fn as_dmatrix(dim: Dim, nu: f64) -> DMatrix<f64> {
    let ke = element_stiffness::<f64>(dim, nu).unwrap();
    let n = ke.size();
    DMatrix::from_fn(n, n, |i, j| ke.get(i, j))
}

fn max_abs_diff(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    (a - b).abs().max()
}

#[test]
fn quad_stiffness_matches_closed_form_and_quadrature() {
    for nu in [0.0, 0.25, 0.3, 0.45] {
        let k = as_dmatrix(Dim::Two, nu);
        assert!(max_abs_diff(&k, &closed_form_quad(nu)) < 1e-12, "closed form, nu={nu}");
        assert!(max_abs_diff(&k, &quadrature_oracle(Dim::Two, nu)) < 1e-12, "quadrature, nu={nu}");
    }
}

#[test]
fn hex_stiffness_matches_quadrature() {
    for nu in [0.0, 0.3, 0.49] {
        let k = as_dmatrix(Dim::Three, nu);
        assert!(max_abs_diff(&k, &quadrature_oracle(Dim::Three, nu)) < 1e-12, "nu={nu}");
    }
}

#[test]
fn element_stiffness_rank_and_symmetry() {
    for (dim, rank) in [(Dim::Two, 5), (Dim::Three, 18)] {
        let k = as_dmatrix(dim, 0.3);
        assert!(max_abs_diff(&k, &k.transpose()) == 0.0);
        let eig = k.clone().symmetric_eigen().eigenvalues;
        let scale = eig.max();
        let zero = eig.iter().filter(|&&v| v.abs() < 1e-10 * scale).count();
        let negative = eig.iter().filter(|&&v| v < -1e-10 * scale).count();
        assert_eq!(negative, 0);
        assert_eq!(k.nrows() - zero, rank);
    }
}

#[test]
fn poisson_ratio_domain() {
    assert!(matches!(element_stiffness::<f64>(Dim::Two, 0.5), Err(FeaError::InvalidPoissonRatio(_))));
    assert!(matches!(element_stiffness::<f64>(Dim::Three, -0.1), Err(FeaError::InvalidPoissonRatio(_))));
}

/// Compliance from a dense global assembly solved with nalgebra.
fn dense_oracle(mesh: &Mesh, fixed: &[usize], loads: &[(usize, f64)], rho: &[f64], p: f64) -> f64 {
    let ke = quadrature_oracle(mesh.dim(), 0.3);
    let n = mesh.n_dofs();
    let mut k = DMatrix::zeros(n, n);
    for e in 0..mesh.n_elements() {
        let dofs = mesh.element_dofs(e);
        let modulus = 1e-9 + rho[e].powf(p) * (1.0 - 1e-9);
        for (a, &i) in dofs.iter().enumerate() {
            for (b, &j) in dofs.iter().enumerate() {
                k[(i, j)] += modulus * ke[(a, b)];
            }
        }
    }
    let free: Vec<usize> = (0..n).filter(|d| !fixed.contains(d)).collect();
    let kr = DMatrix::from_fn(free.len(), free.len(), |i, j| k[(free[i], free[j])]);
    let mut f = DVector::zeros(n);
    for &(d, v) in loads {
        f[d] += v;
    }
    let fr = DVector::from_iterator(free.len(), free.iter().map(|&d| f[d]));
    let u = kr.lu().solve(&fr).expect("oracle system regular");
    fr.dot(&u)
}

fn left_clamped(mesh: &Mesh) -> Vec<usize> {
    let d = mesh.dof_per_node();
    (0..mesh.n_nodes())
        .filter(|&n| mesh.node_position(n)[0] == 0.0)
        .flat_map(|n| (0..d).map(move |k| n * d + k))
        .collect()
}

#[test]
fn compliance_matches_dense_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let meshes = [
        Mesh::new_2d(1, 1).unwrap(),
        Mesh::new_2d(2, 2).unwrap(),
        Mesh::new_2d(3, 2).unwrap(),
        Mesh::new_2d(4, 4).unwrap(),
        Mesh::new_3d(1, 1, 1).unwrap(),
        Mesh::new_3d(2, 2, 2).unwrap(),
    ];
    for mesh in &meshes {
        let fixed = left_clamped(mesh);
        let d = mesh.dof_per_node();
        let tip = mesh.n_nodes() - 1;
        let loads = vec![(tip * d, 0.7), (tip * d + 1, -1.0)];
        for trial in 0..3 {
            let rho: Vec<f64> = if trial == 0 {
                vec![1.0; mesh.n_elements()]
            } else {
                (0..mesh.n_elements()).map(|_| rng.gen_range(0.05..1.0)).collect()
            };
            let bc = BoundaryConditions::new(fixed.clone(), loads.clone());
            let oracle = dense_oracle(mesh, &fixed, &loads, &rho, 3.0);
            for solver in [LinearSolver::Auto, LinearSolver::Pcg, LinearSolver::Dense, LinearSolver::Skyline] {
                let opts = FeaOptions { solver, rel_tol: 1e-13, ..FeaOptions::default() };
                let sol = assemble_solve_with(mesh, &bc, &rho, 3.0, 1.0, 1e-9, opts).unwrap();
                let rel = (sol.compliance - oracle).abs() / oracle;
                assert!(rel < 1e-10, "{mesh:?} {solver:?}: {} vs {oracle} ({rel:e})", sol.compliance);
            }
        }
    }
}

#[test]
fn single_element_axial_load() {
    let mesh = Mesh::new_2d(1, 1).unwrap();
    let fixed = left_clamped(&mesh);
    let loads = vec![(2, 1.0)];
    let bc = BoundaryConditions::new(fixed.clone(), loads.clone());
    let (_, c) = assemble_solve(&mesh, &bc, &[1.0], 3.0, 1.0, 1e-9).unwrap();
    let oracle = dense_oracle(&mesh, &fixed, &loads, &[1.0], 3.0);
    assert!((c - oracle).abs() / oracle < 1e-10);
    assert!(c > 0.0);
}

#[test]
fn uniform_density_scaling() {
    let mesh = Mesh::new_2d(5, 3).unwrap();
    let bc = BoundaryConditions::new(left_clamped(&mesh), vec![(mesh.n_dofs() - 1, -1.0)]);
    for p in [1.0, 3.0, 4.5] {
        let (_, c1) = assemble_solve(&mesh, &bc, &[1.0; 15], p, 1.0, 0.0).unwrap();
        for s in [0.5f64, 0.2] {
            let (_, cs) = assemble_solve(&mesh, &bc, &[s; 15], p, 1.0, 0.0).unwrap();
            let expected = c1 / s.powf(p);
            assert!((cs - expected).abs() / expected < 1e-9, "p={p} s={s}");
        }
    }
}

#[test]
fn zero_load_zero_response() {
    let mesh = Mesh::new_3d(2, 1, 1).unwrap();
    let bc = BoundaryConditions::<f64>::new(left_clamped(&mesh), vec![]);
    let (u, c) = assemble_solve(&mesh, &bc, &[0.5, 0.5], 3.0, 1.0, 1e-9).unwrap();
    assert_eq!(c, 0.0);
    assert!(u.values.iter().all(|&v| v == 0.0));
}

#[test]
fn floating_structure_is_structured_error() {
    let mesh = Mesh::new_2d(2, 1).unwrap();
    let bc = BoundaryConditions::new(vec![0, 1], vec![(10, 1.0)]);
    let err = assemble_solve(&mesh, &bc, &[1.0, 1.0], 3.0, 1.0, 1e-9).unwrap_err();
    assert!(matches!(err, FeaError::Underconstrained { .. }), "{err:?}");
}

#[test]
fn patch_test_linear_field() {
    for mesh in [Mesh::new_2d(3, 2).unwrap(), Mesh::new_3d(2, 2, 1).unwrap()] {
        let d = mesh.dof_per_node();
        let mut u = DisplacementField::zeros(&mesh);
        for n in 0..mesh.n_nodes() {
            u.values[n * d] = mesh.node_position(n)[0];
        }
        for e in 0..mesh.n_elements() {
            let eps = element_strain(&mesh, &u, e).unwrap();
            assert!((eps[0] - 1.0).abs() < 1e-14);
            assert!(eps[1..].iter().all(|v| v.abs() < 1e-14));
        }
    }
}

#[test]
fn centroid_strain_matches_symbolic_b() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mesh = Mesh::new_2d(1, 1).unwrap();
    for _ in 0..20 {
        let values: Vec<f64> = (0..8).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let u = DisplacementField { values: values.clone() };
        let eps = element_strain(&mesh, &u, 0).unwrap();
        let nodes = mesh.element_nodes(0);
        let values: Vec<f64> = nodes.iter().flat_map(|&n| [values[2 * n], values[2 * n + 1]]).collect();
        // Local node order: (0,0), (1,0), (1,1), (0,1). dN/dx at the centroid is ±1/2.
        let sx = [-0.5, 0.5, 0.5, -0.5];
        let sy = [-0.5, -0.5, 0.5, 0.5];
        let exx: f64 = (0..4).map(|a| sx[a] * values[2 * a]).sum();
        let eyy: f64 = (0..4).map(|a| sy[a] * values[2 * a + 1]).sum();
        let gxy: f64 = (0..4).map(|a| sy[a] * values[2 * a] + sx[a] * values[2 * a + 1]).sum();
        for (got, want) in eps.iter().zip([exx, eyy, gxy]) {
            assert!((got - want).abs() < 1e-12, "{eps:?} vs {:?}", [exx, eyy, gxy]);
        }
    }
}

#[test]
fn rigid_motion_has_zero_strain() {
    let mesh = Mesh::new_3d(2, 1, 2).unwrap();
    let mut u = DisplacementField::zeros(&mesh);
    for n in 0..mesh.n_nodes() {
        let p = mesh.node_position(n);
        // Small rotation about z plus a translation.
        u.values[3 * n] = 0.3 - 0.01 * p[1];
        u.values[3 * n + 1] = -0.2 + 0.01 * p[0];
        u.values[3 * n + 2] = 0.7;
    }
    for e in 0..mesh.n_elements() {
        assert!(element_strain(&mesh, &u, e).unwrap().iter().all(|v| v.abs() < 1e-14));
    }
}

#[test]
fn single_precision_tracks_double() {
    let mesh = Mesh::new_2d(6, 3).unwrap();
    let fixed = left_clamped(&mesh);
    let load = (mesh.n_dofs() - 1, -1.0);
    let bc64 = BoundaryConditions::new(fixed.clone(), vec![load]);
    let bc32 = BoundaryConditions::new(fixed, vec![(load.0, -1.0f32)]);
    let (_, c64) = assemble_solve(&mesh, &bc64, &[0.6; 18], 3.0, 1.0, 1e-9).unwrap();
    let (_, c32) = assemble_solve::<f32>(&mesh, &bc32, &[0.6; 18], 3.0, 1.0, 1e-9).unwrap();
    assert!((c32 as f64 - c64).abs() / c64 < 1e-4);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn compliance_positive_and_deterministic(
        nx in 1usize..6, ny in 1usize..5, seed in 0u64..1000, fx in -1.0f64..1.0, fy in 0.1f64..1.0,
    ) {
        let mesh = Mesh::new_2d(nx, ny).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let rho: Vec<f64> = (0..mesh.n_elements()).map(|_| rng.gen_range(1e-3..1.0)).collect();
        let tip = mesh.n_nodes() - 1;
        let bc = BoundaryConditions::new(left_clamped(&mesh), vec![(2 * tip, fx), (2 * tip + 1, -fy)]);
        let (u1, c1) = assemble_solve(&mesh, &bc, &rho, 3.0, 1.0, 1e-9).unwrap();
        let (u2, c2) = assemble_solve(&mesh, &bc, &rho, 3.0, 1.0, 1e-9).unwrap();
        prop_assert!(c1 > 0.0);
        prop_assert_eq!(c1.to_bits(), c2.to_bits());
        for &d in bc.fixed_dofs() {
            prop_assert_eq!(u1.values[d], 0.0);
        }
        prop_assert_eq!(u1, u2);
    }

    #[test]
    fn assembled_matrix_is_symmetric(nx in 1usize..5, ny in 1usize..4, seed in 0u64..1000) {
        let mesh = Mesh::new_2d(nx, ny).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let moduli: Vec<f64> = (0..mesh.n_elements()).map(|_| rng.gen_range(1e-3..1.0)).collect();
        let bc = BoundaryConditions::new(left_clamped(&mesh), vec![(mesh.n_dofs() - 1, 1.0)]);
        let mut sys = FeaSystem::new(&mesh, &bc, FeaOptions::default()).unwrap();
        sys.assemble(&moduli).unwrap();
        let k = sys.matrix();
        for i in 0..k.dim() {
            for j in 0..k.dim() {
                prop_assert_eq!(k.get(i, j), k.get(j, i));
            }
        }
    }
}
