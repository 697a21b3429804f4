//! Bilinear quadrilateral (plane stress) and trilinear hexahedral element
//! kernels for unit-size elements and unit Young's modulus.

use super::mesh::{Dim, HEX_CORNERS, QUAD_CORNERS};
use super::FeaError;
use crate::scalar::Scalar;

/// Dense row-major square matrix used for element-level operators.
#[derive(Debug, Clone, PartialEq)]
pub struct ElementMatrix<T> {
    n: usize,
    data: Vec<T>,
}

impl<T: Scalar> ElementMatrix<T> {
    pub fn zeros(n: usize) -> Self {
        Self { n, data: vec![T::zero(); n * n] }
    }

    pub fn size(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> T {
        self.data[i * self.n + j]
    }

    pub fn as_slice(&self) -> &[T] {
        &self.data
    }

    pub fn mul_vec(&self, x: &[T]) -> Vec<T> {
        self.data.chunks_exact(self.n).map(|row| row.iter().zip(x).map(|(&a, &b)| a * b).sum()).collect()
    }

    /// `xᵀ M x`
    pub fn quadratic_form(&self, x: &[T]) -> T {
        let mut acc = T::zero();
        for (i, row) in self.data.chunks_exact(self.n).enumerate() {
            let mut r = T::zero();
            for (a, b) in row.iter().zip(x) {
                r += *a * *b;
            }
            acc += x[i] * r;
        }
        acc
    }
}

fn check_poisson(nu: f64) -> Result<(), FeaError> {
    if (0.0..0.5).contains(&nu) {
        Ok(())
    } else {
        Err(FeaError::InvalidPoissonRatio(nu))
    }
}

/// Isotropic constitutive matrix for unit modulus, row-major.
///
/// 2D is plane stress on `[εxx, εyy, γxy]`; 3D uses
/// `[εxx, εyy, εzz, γxy, γyz, γzx]` with engineering shear strains.
pub fn constitutive_matrix<T: Scalar>(dim: Dim, nu: f64) -> Result<Vec<T>, FeaError> {
    check_poisson(nu)?;
    let d: Vec<f64> = match dim {
        Dim::Two => {
            let c = 1.0 / (1.0 - nu * nu);
            vec![c, c * nu, 0.0, c * nu, c, 0.0, 0.0, 0.0, c * (1.0 - nu) / 2.0]
        }
        Dim::Three => {
            let lambda = nu / ((1.0 + nu) * (1.0 - 2.0 * nu));
            let mu = 1.0 / (2.0 * (1.0 + nu));
            let mut d = vec![0.0; 36];
            for i in 0..3 {
                for j in 0..3 {
                    d[i * 6 + j] = lambda + if i == j { 2.0 * mu } else { 0.0 };
                }
                d[(i + 3) * 6 + i + 3] = mu;
            }
            d
        }
    };
    Ok(d.into_iter().map(T::lit).collect())
}

/// Strain-displacement matrix (row-major, `n_strain x n_dof`) of a unit
/// element at natural coordinates `xi` (each in `[-1, 1]`).
pub fn strain_displacement<T: Scalar>(dim: Dim, xi: &[f64]) -> Vec<T> {
    let nd = dim.dofs_per_element();
    let ns = dim.strain_components();
    let mut b = vec![0.0f64; ns * nd];
    // For a unit element the Jacobian is I/2, so d/dx = 2 d/dξ.
    match dim {
        Dim::Two => {
            let (s, t) = (xi[0], xi[1]);
            for (a, c) in QUAD_CORNERS.iter().enumerate() {
                let sa = 2.0 * c[0] as f64 - 1.0;
                let ta = 2.0 * c[1] as f64 - 1.0;
                let dx = 2.0 * 0.25 * sa * (1.0 + ta * t);
                let dy = 2.0 * 0.25 * ta * (1.0 + sa * s);
                b[2 * a] = dx;
                b[nd + 2 * a + 1] = dy;
                b[2 * nd + 2 * a] = dy;
                b[2 * nd + 2 * a + 1] = dx;
            }
        }
        Dim::Three => {
            let (s, t, u) = (xi[0], xi[1], xi[2]);
            for (a, c) in HEX_CORNERS.iter().enumerate() {
                let sa = 2.0 * c[0] as f64 - 1.0;
                let ta = 2.0 * c[1] as f64 - 1.0;
                let ua = 2.0 * c[2] as f64 - 1.0;
                let dx = 2.0 * 0.125 * sa * (1.0 + ta * t) * (1.0 + ua * u);
                let dy = 2.0 * 0.125 * ta * (1.0 + sa * s) * (1.0 + ua * u);
                let dz = 2.0 * 0.125 * ua * (1.0 + sa * s) * (1.0 + ta * t);
                let col = 3 * a;
                b[col] = dx;
                b[nd + col + 1] = dy;
                b[2 * nd + col + 2] = dz;
                b[3 * nd + col] = dy;
                b[3 * nd + col + 1] = dx;
                b[4 * nd + col + 1] = dz;
                b[4 * nd + col + 2] = dy;
                b[5 * nd + col] = dz;
                b[5 * nd + col + 2] = dx;
            }
        }
    }
    b.into_iter().map(T::lit).collect()
}

/// Centroid strain-displacement matrix.
pub fn centroid_strain_displacement<T: Scalar>(dim: Dim) -> Vec<T> {
    strain_displacement(dim, &[0.0, 0.0, 0.0])
}

/// Unit-modulus, unit-size element stiffness `K_e^0`, integrated with the
/// 2-point Gauss rule per axis.
pub fn element_stiffness<T: Scalar>(dim: Dim, nu: f64) -> Result<ElementMatrix<T>, FeaError> {
    let d = constitutive_matrix::<f64>(dim, nu)?;
    let nd = dim.dofs_per_element();
    let ns = dim.strain_components();
    let g = 1.0 / 3f64.sqrt();
    let axes = match dim {
        Dim::Two => 2,
        Dim::Three => 3,
    };
    let det_j = 0.5f64.powi(axes);
    let mut k = vec![0.0f64; nd * nd];
    for p in 0..(1usize << axes) {
        let xi: Vec<f64> = (0..axes).map(|a| if (p >> a) & 1 == 0 { -g } else { g }).collect();
        let b = strain_displacement::<f64>(dim, &xi);
        // db = D * B
        let mut db = vec![0.0f64; ns * nd];
        for i in 0..ns {
            for j in 0..nd {
                db[i * nd + j] = (0..ns).map(|m| d[i * ns + m] * b[m * nd + j]).sum();
            }
        }
        for i in 0..nd {
            for j in 0..nd {
                k[i * nd + j] += det_j * (0..ns).map(|m| b[m * nd + i] * db[m * nd + j]).sum::<f64>();
            }
        }
    }
    // Symmetrize against round-off in the accumulation order.
    for i in 0..nd {
        for j in 0..i {
            let avg = 0.5 * (k[i * nd + j] + k[j * nd + i]);
            k[i * nd + j] = avg;
            k[j * nd + i] = avg;
        }
    }
    Ok(ElementMatrix { n: nd, data: k.into_iter().map(T::lit).collect() })
}
