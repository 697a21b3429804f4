use crate::fea::{Dim, Mesh};
use crate::scalar::Scalar;

/// Linear-hat density filter `ρ̃_i = Σ_j w_ij ρ_j / Σ_j w_ij` with
/// `w_ij = max(0, r − dist(i, j))` over element centroids.
#[derive(Debug, Clone)]
pub struct DensityFilter<T> {
    mesh: Mesh,
    radius: f64,
    offsets: Vec<([isize; 3], T)>,
    weight_sums: Vec<T>,
}

impl<T: Scalar> DensityFilter<T> {
    /// Radii below 1 (including non-finite input) act as the identity.
    pub fn new(mesh: &Mesh, radius: f64) -> Self {
        let radius = if radius >= 1.0 { radius } else { 1.0 };
        let reach = (radius.ceil() as isize - 1).max(0);
        let rz = if mesh.dim() == Dim::Three { reach } else { 0 };
        let mut offsets = Vec::new();
        for dz in -rz..=rz {
            for dy in -reach..=reach {
                for dx in -reach..=reach {
                    let dist = ((dx * dx + dy * dy + dz * dz) as f64).sqrt();
                    let w = radius - dist;
                    if w > 0.0 {
                        offsets.push(([dx, dy, dz], T::lit(w)));
                    }
                }
            }
        }
        let mut filter = Self { mesh: mesh.clone(), radius, offsets, weight_sums: Vec::new() };
        filter.weight_sums = (0..mesh.n_elements())
            .map(|e| {
                let mut s = T::zero();
                filter.for_each_neighbor(e, |_, w| s += w);
                s
            })
            .collect();
        filter
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    fn for_each_neighbor(&self, e: usize, mut f: impl FnMut(usize, T)) {
        let c = self.mesh.element_coords(e);
        let n = [self.mesh.nx() as isize, self.mesh.ny() as isize, self.mesh.nz() as isize];
        for &(d, w) in &self.offsets {
            let (x, y, z) = (c[0] as isize + d[0], c[1] as isize + d[1], c[2] as isize + d[2]);
            if x < 0 || y < 0 || z < 0 || x >= n[0] || y >= n[1] || z >= n[2] {
                continue;
            }
            f(self.mesh.element_index(x as usize, y as usize, z as usize), w);
        }
    }

    pub fn apply(&self, x: &[T]) -> Vec<T> {
        (0..x.len())
            .map(|i| {
                let mut s = T::zero();
                self.for_each_neighbor(i, |j, w| s += w * x[j]);
                s / self.weight_sums[i]
            })
            .collect()
    }

    /// Transpose map: `out_j = Σ_i w_ij g_i / Σ_k w_ik`.
    pub fn apply_transpose(&self, g: &[T]) -> Vec<T> {
        let scaled: Vec<T> = g.iter().zip(&self.weight_sums).map(|(&g, &s)| g / s).collect();
        // The weights are symmetric, so the transpose is a plain weighted sum.
        (0..g.len())
            .map(|j| {
                let mut s = T::zero();
                self.for_each_neighbor(j, |i, w| s += w * scaled[i]);
                s
            })
            .collect()
    }
}

/// One-shot filter application.
pub fn density_filter<T: Scalar>(mesh: &Mesh, rho: &[T], r_min: f64) -> Vec<T> {
    DensityFilter::new(mesh, r_min).apply(rho)
}

/// Smoothed Heaviside projection with threshold `eta`.
pub fn heaviside_project<T: Scalar>(x: T, beta: T, eta: T) -> T {
    let den = (beta * eta).tanh() + (beta * (T::one() - eta)).tanh();
    ((beta * eta).tanh() + (beta * (x - eta)).tanh()) / den
}

/// Derivative of [`heaviside_project`] with respect to `x`.
pub fn heaviside_derivative<T: Scalar>(x: T, beta: T, eta: T) -> T {
    let den = (beta * eta).tanh() + (beta * (T::one() - eta)).tanh();
    let t = (beta * (x - eta)).tanh();
    beta * (T::one() - t * t) / den
}
