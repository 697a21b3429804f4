use serde::{Deserialize, Serialize};

use super::FeaError;

/// Spatial dimensionality of a structured grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Dim {
    #[serde(rename = "2d")]
    Two,
    #[serde(rename = "3d")]
    Three,
}

impl Dim {
    pub fn dof_per_node(self) -> usize {
        match self {
            Dim::Two => 2,
            Dim::Three => 3,
        }
    }

    pub fn nodes_per_element(self) -> usize {
        match self {
            Dim::Two => 4,
            Dim::Three => 8,
        }
    }

    pub fn dofs_per_element(self) -> usize {
        self.dof_per_node() * self.nodes_per_element()
    }

    /// Number of independent strain (and stress) components.
    pub fn strain_components(self) -> usize {
        match self {
            Dim::Two => 3,
            Dim::Three => 6,
        }
    }

    /// Rigid-body modes of an unconstrained body.
    pub fn rigid_modes(self) -> usize {
        match self {
            Dim::Two => 3,
            Dim::Three => 6,
        }
    }
}

/// Local node offsets of the bilinear quad, counter-clockwise from the
/// lower-left corner.
pub(crate) const QUAD_CORNERS: [[usize; 2]; 4] = [[0, 0], [1, 0], [1, 1], [0, 1]];

/// Local node offsets of the trilinear hexahedron: the `z = 0` face in quad
/// order followed by the `z = 1` face.
pub(crate) const HEX_CORNERS: [[usize; 3]; 8] =
    [[0, 0, 0], [1, 0, 0], [1, 1, 0], [0, 1, 0], [0, 0, 1], [1, 0, 1], [1, 1, 1], [0, 1, 1]];

/// Regular grid of unit square (2D) or unit cube (3D) elements.
///
/// Elements and nodes are numbered with `x` fastest, then `y`, then `z`.
/// The domain spans `[0, nx] x [0, ny] (x [0, nz])` with `y` pointing up.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct Mesh {
    dim: Dim,
    n: [usize; 3],
}

impl TryFrom<Vec<usize>> for Mesh {
    type Error = FeaError;

    fn try_from(dims: Vec<usize>) -> Result<Self, Self::Error> {
        Mesh::new(&dims)
    }
}

impl From<Mesh> for Vec<usize> {
    fn from(m: Mesh) -> Self {
        m.dims()
    }
}

impl Mesh {
    pub fn new(dims: &[usize]) -> Result<Self, FeaError> {
        if dims.contains(&0) {
            return Err(FeaError::InvalidMesh(format!("element counts must be >= 1, got {dims:?}")));
        }
        match *dims {
            [nx, ny] => Ok(Self { dim: Dim::Two, n: [nx, ny, 1] }),
            [nx, ny, nz] => Ok(Self { dim: Dim::Three, n: [nx, ny, nz] }),
            _ => Err(FeaError::InvalidMesh(format!("expected 2 or 3 element counts, got {}", dims.len()))),
        }
    }

    pub fn new_2d(nx: usize, ny: usize) -> Result<Self, FeaError> {
        Self::new(&[nx, ny])
    }

    pub fn new_3d(nx: usize, ny: usize, nz: usize) -> Result<Self, FeaError> {
        Self::new(&[nx, ny, nz])
    }

    pub fn dim(&self) -> Dim {
        self.dim
    }

    /// Element counts per axis (2 or 3 entries).
    pub fn dims(&self) -> Vec<usize> {
        match self.dim {
            Dim::Two => vec![self.n[0], self.n[1]],
            Dim::Three => self.n.to_vec(),
        }
    }

    pub fn nx(&self) -> usize {
        self.n[0]
    }

    pub fn ny(&self) -> usize {
        self.n[1]
    }

    /// Element count along `z`; 1 for 2D meshes.
    pub fn nz(&self) -> usize {
        self.n[2]
    }

    pub fn n_elements(&self) -> usize {
        self.n[0] * self.n[1] * self.n[2]
    }

    fn node_counts(&self) -> [usize; 3] {
        match self.dim {
            Dim::Two => [self.n[0] + 1, self.n[1] + 1, 1],
            Dim::Three => [self.n[0] + 1, self.n[1] + 1, self.n[2] + 1],
        }
    }

    pub fn n_nodes(&self) -> usize {
        self.node_counts().iter().product()
    }

    pub fn dof_per_node(&self) -> usize {
        self.dim.dof_per_node()
    }

    pub fn n_dofs(&self) -> usize {
        self.n_nodes() * self.dof_per_node()
    }

    /// Physical extent `[Lx, Ly, Lz]`; `Lz = 0` in 2D.
    pub fn extent(&self) -> [f64; 3] {
        let z = match self.dim {
            Dim::Two => 0.0,
            Dim::Three => self.n[2] as f64,
        };
        [self.n[0] as f64, self.n[1] as f64, z]
    }

    /// Length of the domain diagonal.
    pub fn diagonal(&self) -> f64 {
        self.extent().iter().map(|l| l * l).sum::<f64>().sqrt()
    }

    pub fn element_index(&self, ix: usize, iy: usize, iz: usize) -> usize {
        ix + self.n[0] * (iy + self.n[1] * iz)
    }

    pub fn element_coords(&self, e: usize) -> [usize; 3] {
        let ix = e % self.n[0];
        let rest = e / self.n[0];
        [ix, rest % self.n[1], rest / self.n[1]]
    }

    pub fn node_index(&self, ix: usize, iy: usize, iz: usize) -> usize {
        let c = self.node_counts();
        ix + c[0] * (iy + c[1] * iz)
    }

    pub fn node_coords(&self, node: usize) -> [usize; 3] {
        let c = self.node_counts();
        let ix = node % c[0];
        let rest = node / c[0];
        [ix, rest % c[1], rest / c[1]]
    }

    /// Node position in domain coordinates.
    pub fn node_position(&self, node: usize) -> [f64; 3] {
        let [x, y, z] = self.node_coords(node);
        [x as f64, y as f64, z as f64]
    }

    /// Node at integer grid coordinates, if it exists.
    pub fn node_at(&self, ix: usize, iy: usize, iz: usize) -> Option<usize> {
        let c = self.node_counts();
        (ix < c[0] && iy < c[1] && iz < c[2]).then(|| self.node_index(ix, iy, iz))
    }

    /// Global node indices of element `e` in local order.
    pub fn element_nodes(&self, e: usize) -> Vec<usize> {
        let [ix, iy, iz] = self.element_coords(e);
        match self.dim {
            Dim::Two => QUAD_CORNERS.iter().map(|[dx, dy]| self.node_index(ix + dx, iy + dy, 0)).collect(),
            Dim::Three => HEX_CORNERS.iter().map(|[dx, dy, dz]| self.node_index(ix + dx, iy + dy, iz + dz)).collect(),
        }
    }

    /// Global DOF indices of element `e`, node-major.
    pub fn element_dofs(&self, e: usize) -> Vec<usize> {
        let d = self.dof_per_node();
        self.element_nodes(e).into_iter().flat_map(|n| (0..d).map(move |k| n * d + k)).collect()
    }

    pub fn centroid(&self, e: usize) -> [f64; 3] {
        let [ix, iy, iz] = self.element_coords(e);
        let z = match self.dim {
            Dim::Two => 0.0,
            Dim::Three => iz as f64 + 0.5,
        };
        [ix as f64 + 0.5, iy as f64 + 0.5, z]
    }

    /// Grid cell containing `p`, with points on the outer boundary assigned to
    /// the adjacent boundary cell.
    pub fn cell_containing(&self, p: [f64; 3]) -> Option<[usize; 3]> {
        let ext = self.extent();
        let axes = match self.dim {
            Dim::Two => 2,
            Dim::Three => 3,
        };
        let mut cell = [0usize; 3];
        for a in 0..axes {
            if !(p[a] >= 0.0 && p[a] <= ext[a]) {
                return None;
            }
            cell[a] = (p[a].floor() as usize).min(self.n[a] - 1);
        }
        Some(cell)
    }

    /// Whether a point lies inside the closed domain.
    pub fn contains(&self, p: [f64; 3]) -> bool {
        self.cell_containing(p).is_some()
    }

    /// Face neighbours of element `e` (4 in 2D, 6 in 3D).
    pub fn face_neighbors(&self, e: usize) -> Vec<usize> {
        self.neighbors(e, false)
    }

    /// Neighbours sharing a face, edge or corner in 2D (8-neighbourhood) or a
    /// face in 3D (6-neighbourhood): the connectivity used by the evaluator.
    pub fn connectivity_neighbors(&self, e: usize) -> Vec<usize> {
        match self.dim {
            Dim::Two => self.neighbors(e, true),
            Dim::Three => self.neighbors(e, false),
        }
    }

    fn neighbors(&self, e: usize, diagonal: bool) -> Vec<usize> {
        let c = self.element_coords(e);
        let axes: usize = match self.dim {
            Dim::Two => 2,
            Dim::Three => 3,
        };
        let mut out = Vec::with_capacity(8);
        let range = |a: usize| -> std::ops::RangeInclusive<i64> {
            if a < axes {
                -1..=1
            } else {
                0..=0
            }
        };
        for dz in range(2) {
            for dy in range(1) {
                for dx in range(0) {
                    let nonzero = [dx, dy, dz].iter().filter(|&&d| d != 0).count();
                    if nonzero == 0 || (!diagonal && nonzero > 1) {
                        continue;
                    }
                    let q = [c[0] as i64 + dx, c[1] as i64 + dy, c[2] as i64 + dz];
                    if (0..3).all(|a| q[a] >= 0 && (q[a] as usize) < self.n[a]) {
                        out.push(self.element_index(q[0] as usize, q[1] as usize, q[2] as usize));
                    }
                }
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn index_maps_are_bijective() {
        for mesh in [Mesh::new_2d(5, 3).unwrap(), Mesh::new_3d(3, 2, 4).unwrap()] {
            for e in 0..mesh.n_elements() {
                let [x, y, z] = mesh.element_coords(e);
                assert_eq!(mesh.element_index(x, y, z), e);
            }
            for n in 0..mesh.n_nodes() {
                let [x, y, z] = mesh.node_coords(n);
                assert_eq!(mesh.node_index(x, y, z), n);
            }
        }
    }

    #[test]
    fn counts() {
        let m = Mesh::new_2d(60, 30).unwrap();
        assert_eq!(m.n_elements(), 1800);
        assert_eq!(m.n_nodes(), 61 * 31);
        assert_eq!(m.n_dofs(), 2 * 61 * 31);
        let m = Mesh::new_3d(40, 20, 10).unwrap();
        assert_eq!(m.n_elements(), 8000);
        assert_eq!(m.n_dofs(), 3 * 41 * 21 * 11);
    }

    #[test]
    fn rejects_bad_dims() {
        assert!(Mesh::new(&[0, 3]).is_err());
        assert!(Mesh::new(&[3]).is_err());
        assert!(Mesh::new(&[1, 2, 3, 4]).is_err());
    }

    #[test]
    fn element_nodes_are_counter_clockwise() {
        let m = Mesh::new_2d(2, 2).unwrap();
        let nodes = m.element_nodes(m.element_index(1, 0, 0));
        let pos: Vec<_> = nodes.iter().map(|&n| m.node_coords(n)).collect();
        assert_eq!(pos, vec![[1, 0, 0], [2, 0, 0], [2, 1, 0], [1, 1, 0]]);
    }

    #[test]
    fn neighbourhoods() {
        let m = Mesh::new_2d(3, 3).unwrap();
        let center = m.element_index(1, 1, 0);
        assert_eq!(m.face_neighbors(center).len(), 4);
        assert_eq!(m.connectivity_neighbors(center).len(), 8);
        assert_eq!(m.connectivity_neighbors(0).len(), 3);
        let m = Mesh::new_3d(3, 3, 3).unwrap();
        assert_eq!(m.connectivity_neighbors(m.element_index(1, 1, 1)).len(), 6);
    }

    #[test]
    fn boundary_points_map_to_boundary_cells() {
        let m = Mesh::new_2d(4, 2).unwrap();
        assert_eq!(m.cell_containing([4.0, 2.0, 0.0]), Some([3, 1, 0]));
        assert_eq!(m.cell_containing([0.0, 0.0, 0.0]), Some([0, 0, 0]));
        assert_eq!(m.cell_containing([4.1, 0.0, 0.0]), None);
    }
}
