//! P1 finite-element assembly on triangulated domains.
//!
//! Displacements use two degrees of freedom per node (`2·node` for the x
//! component, `2·node + 1` for y). Strain is kept in the scaled-vector
//! form `(ε₁₁, ε₂₂, √2·ε₁₂)`, so the element stiffness is
//! `area · Bᵀ Λ B` with the 3×3 modulus matrix and no extra factors.
//!
//! Element matrices are computed in parallel, then scattered in a fixed
//! order, so the assembled matrix is bitwise reproducible regardless of
//! the number of threads.

use super::data::{ContactData, FemError};
use super::mesh::{BoundaryTag, DomainMesh};
use crate::elasticity::ElasticModulus;
use nalgebra::{DVector, SMatrix};
use rayon::prelude::*;

/// Elastic modulus over the domain: one tensor, or one per triangle.
#[derive(Debug, Clone, PartialEq)]
pub enum ModulusField {
    Uniform(ElasticModulus),
    PerElement(Vec<ElasticModulus>),
}

impl ModulusField {
    pub fn at(&self, element: usize) -> &ElasticModulus {
        match self {
            ModulusField::Uniform(m) => m,
            ModulusField::PerElement(ms) => &ms[element],
        }
    }

    pub fn validate(&self, mesh: &DomainMesh) -> Result<(), FemError> {
        if let ModulusField::PerElement(ms) = self {
            if ms.len() != mesh.triangles().len() {
                return Err(FemError::InvalidData(format!(
                    "modulus field has {} entries but the mesh has {} triangles",
                    ms.len(),
                    mesh.triangles().len()
                )));
            }
        }
        Ok(())
    }

    /// Area-weighted average of the modulus over the triangles touching a
    /// node. Used to attach a local modulus to a boundary node.
    pub fn node_average(&self, mesh: &DomainMesh, node: usize) -> ElasticModulus {
        match self {
            ModulusField::Uniform(m) => *m,
            ModulusField::PerElement(_) => {
                let mut acc = [0.0; 6];
                let mut area = 0.0;
                for (ti, tri) in mesh.triangles().iter().enumerate() {
                    if tri.contains(&node) {
                        let a = mesh.areas()[ti];
                        for (dst, src) in acc.iter_mut().zip(self.at(ti).upper()) {
                            *dst += a * src;
                        }
                        area += a;
                    }
                }
                ElasticModulus::from_upper(acc.map(|v| v / area))
            }
        }
    }
}

/// Sparse symmetric matrix in compressed-row form.
#[derive(Debug, Clone, PartialEq)]
pub struct CsrMatrix {
    n: usize,
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<f64>,
}

impl CsrMatrix {
    /// Builds from (row, col, value) triplets, summing duplicates.
    pub fn from_triplets(n: usize, triplets: &[(usize, usize, f64)]) -> Self {
        let mut sorted = triplets.to_vec();
        sorted.sort_by_key(|&(r, c, _)| (r, c));
        let mut rows = Vec::with_capacity(sorted.len());
        let mut cols = Vec::with_capacity(sorted.len());
        let mut vals: Vec<f64> = Vec::with_capacity(sorted.len());
        for (r, c, v) in sorted {
            assert!(r < n && c < n, "triplet index out of range");
            if rows.last() == Some(&r) && cols.last() == Some(&c) {
                *vals.last_mut().unwrap() += v;
            } else {
                rows.push(r);
                cols.push(c);
                vals.push(v);
            }
        }
        let mut row_ptr = vec![0usize; n + 1];
        for &r in &rows {
            row_ptr[r + 1] += 1;
        }
        for r in 0..n {
            row_ptr[r + 1] += row_ptr[r];
        }
        Self {
            n,
            row_ptr,
            cols,
            vals,
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn nnz(&self) -> usize {
        self.vals.len()
    }

    /// y = A·x.
    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.n);
        let mut y = vec![0.0; self.n];
        for r in 0..self.n {
            let mut acc = 0.0;
            for k in self.row_ptr[r]..self.row_ptr[r + 1] {
                acc += self.vals[k] * x[self.cols[k]];
            }
            y[r] = acc;
        }
        y
    }

    /// xᵀ·A·y.
    pub fn bilinear(&self, x: &[f64], y: &[f64]) -> f64 {
        self.matvec(y).iter().zip(x).map(|(ay, xv)| ay * xv).sum()
    }

    /// Dense copy (small systems and tests).
    pub fn to_dense(&self) -> nalgebra::DMatrix<f64> {
        let mut m = nalgebra::DMatrix::zeros(self.n, self.n);
        for r in 0..self.n {
            for k in self.row_ptr[r]..self.row_ptr[r + 1] {
                m[(r, self.cols[k])] += self.vals[k];
            }
        }
        m
    }
}

/// 6×6 element stiffness of a P1 triangle: `area · Bᵀ Λ B`.
fn element_stiffness(
    nodes: &[[f64; 2]],
    tri: [usize; 3],
    area: f64,
    modulus: &ElasticModulus,
) -> SMatrix<f64, 6, 6> {
    let p = [nodes[tri[0]], nodes[tri[1]], nodes[tri[2]]];
    let inv2a = 1.0 / (2.0 * area);
    let mut b = SMatrix::<f64, 3, 6>::zeros();
    let s = std::f64::consts::FRAC_1_SQRT_2;
    for k in 0..3 {
        let (pn, pp) = (p[(k + 1) % 3], p[(k + 2) % 3]);
        let bk = (pn[1] - pp[1]) * inv2a; // ∂λ_k/∂x
        let ck = (pp[0] - pn[0]) * inv2a; // ∂λ_k/∂y
        b[(0, 2 * k)] = bk;
        b[(1, 2 * k + 1)] = ck;
        b[(2, 2 * k)] = ck * s;
        b[(2, 2 * k + 1)] = bk * s;
    }
    area * b.transpose() * modulus.matrix() * b
}

/// Assembles the full stiffness matrix over all `2·n_nodes` degrees of
/// freedom, no boundary conditions applied. Rigid motions lie in its
/// kernel.
pub fn assemble_full_stiffness(mesh: &DomainMesh, field: &ModulusField) -> CsrMatrix {
    let nodes = mesh.node_coords();
    let element_matrices: Vec<SMatrix<f64, 6, 6>> = mesh
        .triangles()
        .par_iter()
        .enumerate()
        .map(|(ti, &tri)| element_stiffness(nodes, tri, mesh.areas()[ti], field.at(ti)))
        .collect();
    let mut triplets = Vec::with_capacity(36 * element_matrices.len());
    for (ti, ke) in element_matrices.iter().enumerate() {
        let tri = mesh.triangles()[ti];
        let dofs = [
            2 * tri[0],
            2 * tri[0] + 1,
            2 * tri[1],
            2 * tri[1] + 1,
            2 * tri[2],
            2 * tri[2] + 1,
        ];
        for i in 0..6 {
            for j in 0..6 {
                triplets.push((dofs[i], dofs[j], ke[(i, j)]));
            }
        }
    }
    CsrMatrix::from_triplets(2 * mesh.n_nodes(), &triplets)
}

/// Degree-of-freedom bookkeeping after eliminating the clamped nodes.
#[derive(Debug, Clone)]
pub struct DofMap {
    /// For each global dof: `Some(index)` into the free vector, `None` if
    /// clamped.
    pub free_index: Vec<Option<usize>>,
    /// Global dof of each free index.
    pub free_dofs: Vec<usize>,
}

impl DofMap {
    pub fn new(mesh: &DomainMesh) -> Self {
        let mut clamped = vec![false; 2 * mesh.n_nodes()];
        for &n in mesh.dirichlet_nodes() {
            clamped[2 * n] = true;
            clamped[2 * n + 1] = true;
        }
        let mut free_index = vec![None; 2 * mesh.n_nodes()];
        let mut free_dofs = Vec::new();
        for (dof, &c) in clamped.iter().enumerate() {
            if !c {
                free_index[dof] = Some(free_dofs.len());
                free_dofs.push(dof);
            }
        }
        Self {
            free_index,
            free_dofs,
        }
    }

    pub fn n_free(&self) -> usize {
        self.free_dofs.len()
    }
}

/// Assembles the stiffness matrix restricted to the free (unclamped)
/// degrees of freedom. Symmetric positive definite when the clamped
/// boundary has positive measure.
pub fn assemble_stiffness(mesh: &DomainMesh, field: &ModulusField) -> (CsrMatrix, DofMap) {
    let map = DofMap::new(mesh);
    let nodes = mesh.node_coords();
    let element_matrices: Vec<SMatrix<f64, 6, 6>> = mesh
        .triangles()
        .par_iter()
        .enumerate()
        .map(|(ti, &tri)| element_stiffness(nodes, tri, mesh.areas()[ti], field.at(ti)))
        .collect();
    let mut triplets = Vec::with_capacity(36 * element_matrices.len());
    for (ti, ke) in element_matrices.iter().enumerate() {
        let tri = mesh.triangles()[ti];
        let dofs = [
            2 * tri[0],
            2 * tri[0] + 1,
            2 * tri[1],
            2 * tri[1] + 1,
            2 * tri[2],
            2 * tri[2] + 1,
        ];
        for i in 0..6 {
            let Some(fi) = map.free_index[dofs[i]] else {
                continue;
            };
            for j in 0..6 {
                let Some(fj) = map.free_index[dofs[j]] else {
                    continue;
                };
                triplets.push((fi, fj, ke[(i, j)]));
            }
        }
    }
    (CsrMatrix::from_triplets(map.n_free(), &triplets), map)
}

/// Assembles the load vector over ALL degrees of freedom: consistent P1
/// body-force integration plus linear surface tractions on the `T` edges.
pub fn assemble_load(mesh: &DomainMesh, data: &ContactData) -> DVector<f64> {
    let mut b = DVector::zeros(2 * mesh.n_nodes());
    for (ti, tri) in mesh.triangles().iter().enumerate() {
        let a = mesh.areas()[ti];
        let f = [
            data.body_force.at(tri[0]),
            data.body_force.at(tri[1]),
            data.body_force.at(tri[2]),
        ];
        for k in 0..3 {
            // ∫ φ_k (Σ_j f_j φ_j) = (area/12)·(2 f_k + f_{k+1} + f_{k+2})
            for comp in 0..2 {
                b[2 * tri[k] + comp] += a / 12.0
                    * (2.0 * f[k][comp] + f[(k + 1) % 3][comp] + f[(k + 2) % 3][comp]);
            }
        }
    }
    let zero = [0.0, 0.0];
    for e in mesh.boundary_edges() {
        if e.tag != BoundaryTag::T {
            continue;
        }
        let [p, q] = e.nodes;
        let mut tp = *data.surface_load.get(&p).unwrap_or(&zero);
        let mut tq = *data.surface_load.get(&q).unwrap_or(&zero);
        for el in &data.edge_load {
            let (a, b) = if el.nodes == [p, q] {
                (el.traction[0], el.traction[1])
            } else if el.nodes == [q, p] {
                (el.traction[1], el.traction[0])
            } else {
                continue;
            };
            for comp in 0..2 {
                tp[comp] += a[comp];
                tq[comp] += b[comp];
            }
        }
        let pa = mesh.node_coords()[p];
        let pb = mesh.node_coords()[q];
        let len = (pb[0] - pa[0]).hypot(pb[1] - pa[1]);
        for comp in 0..2 {
            // ∫ φ_p (t_p φ_p + t_q φ_q) = (len/6)·(2 t_p + t_q)
            b[2 * p + comp] += len / 6.0 * (2.0 * tp[comp] + tq[comp]);
            b[2 * q + comp] += len / 6.0 * (2.0 * tq[comp] + tp[comp]);
        }
    }
    b
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::elasticity::isotropic_modulus;
    use crate::fem::data::NodeField2;
    use approx::assert_abs_diff_eq;

    fn unit_modulus() -> ModulusField {
        ModulusField::Uniform(isotropic_modulus(1.0, 0.3).unwrap())
    }

    #[test]
    fn csr_from_triplets_sums_duplicates() {
        let m = CsrMatrix::from_triplets(
            3,
            &[(0, 0, 1.0), (2, 1, 2.0), (0, 0, 3.0), (1, 1, 5.0), (2, 1, -2.0)],
        );
        let d = m.to_dense();
        assert_abs_diff_eq!(d[(0, 0)], 4.0);
        assert_abs_diff_eq!(d[(1, 1)], 5.0);
        assert_abs_diff_eq!(d[(2, 1)], 0.0);
        let y = m.matvec(&[1.0, 1.0, 1.0]);
        assert_abs_diff_eq!(y[0], 4.0);
        assert_abs_diff_eq!(y[2], 0.0);
    }

    #[test]
    fn rigid_translations_carry_zero_energy() {
        let mesh = DomainMesh::contact_square(3, 3);
        let k = assemble_full_stiffness(&mesh, &unit_modulus());
        for dir in [[1.0, 0.0], [0.0, 1.0], [0.7, -0.4]] {
            let mut v = vec![0.0; 2 * mesh.n_nodes()];
            for i in 0..mesh.n_nodes() {
                v[2 * i] = dir[0];
                v[2 * i + 1] = dir[1];
            }
            let energy = k.bilinear(&v, &v);
            assert_abs_diff_eq!(energy, 0.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn infinitesimal_rotation_carries_zero_energy() {
        let mesh = DomainMesh::contact_square(3, 2);
        let k = assemble_full_stiffness(&mesh, &unit_modulus());
        let mut v = vec![0.0; 2 * mesh.n_nodes()];
        for (i, p) in mesh.node_coords().iter().enumerate() {
            v[2 * i] = -p[1];
            v[2 * i + 1] = p[0];
        }
        assert_abs_diff_eq!(k.bilinear(&v, &v), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn single_element_energy_matches_hand_value() {
        // Unit right triangle, u = (x, 0): strain (1, 0, 0), energy
        // ½·Λ₁₁·area.
        let nodes = vec![[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]];
        let tris = vec![[0, 1, 2]];
        let edges = vec![
            super::super::mesh::BoundaryEdge {
                nodes: [0, 1],
                tag: BoundaryTag::U,
            },
            super::super::mesh::BoundaryEdge {
                nodes: [1, 2],
                tag: BoundaryTag::T,
            },
            super::super::mesh::BoundaryEdge {
                nodes: [2, 0],
                tag: BoundaryTag::T,
            },
        ];
        let mesh = DomainMesh::new(nodes, tris, edges).unwrap();
        let modulus = isotropic_modulus(2.0, 0.25).unwrap();
        let k = assemble_full_stiffness(&mesh, &ModulusField::Uniform(modulus));
        let mut v = vec![0.0; 6];
        for (i, p) in mesh.node_coords().iter().enumerate() {
            v[2 * i] = p[0];
        }
        let l11 = modulus.upper()[0];
        assert_abs_diff_eq!(k.bilinear(&v, &v), l11 * 0.5, epsilon = 1e-14);

        // Pure shear u = (y, 0): scaled strain (0, 0, y-slope/√2) gives
        // energy Λ₃₃/2·area per unit slope².
        let mut w = vec![0.0; 6];
        for (i, p) in mesh.node_coords().iter().enumerate() {
            w[2 * i] = p[1];
        }
        let l33 = modulus.upper()[5];
        assert_abs_diff_eq!(k.bilinear(&w, &w), l33 * 0.5 * 0.5, epsilon = 1e-14);
    }

    #[test]
    fn eliminated_matrix_is_spd() {
        let mesh = DomainMesh::contact_square(4, 4);
        let (k, map) = assemble_stiffness(&mesh, &unit_modulus());
        assert_eq!(k.dim(), map.n_free());
        assert_eq!(map.n_free(), 2 * mesh.n_nodes() - 2 * 5);
        let dense = k.to_dense();
        assert_abs_diff_eq!((&dense - dense.transpose()).norm(), 0.0, epsilon = 1e-12);
        assert!(dense.cholesky().is_some(), "stiffness must be SPD");
    }

    #[test]
    fn constant_body_force_distributes_by_area() {
        let mesh = DomainMesh::contact_square(2, 2);
        let mut data = ContactData::zero(&mesh);
        data.body_force = NodeField2::Constant([0.0, -3.0]);
        let b = assemble_load(&mesh, &data);
        let total_y: f64 = (0..mesh.n_nodes()).map(|i| b[2 * i + 1]).sum();
        // Total force = ∫ f = area · f = 1 · (−3).
        assert_abs_diff_eq!(total_y, -3.0, epsilon = 1e-13);
        let total_x: f64 = (0..mesh.n_nodes()).map(|i| b[2 * i]).sum();
        assert_abs_diff_eq!(total_x, 0.0, epsilon = 1e-14);
    }

    #[test]
    fn surface_load_integrates_linearly() {
        let mesh = DomainMesh::contact_square(2, 1);
        let mut data = ContactData::zero(&mesh);
        // Right side x = 1 has two T edges of length 0.5… no: ny = 1, one
        // edge of length 1. Pull with traction (1, 0) at both endpoints.
        for e in mesh.boundary_edges() {
            if e.tag == BoundaryTag::T {
                for n in e.nodes {
                    if mesh.node_coords()[n][0] == 1.0 {
                        data.surface_load.insert(n, [1.0, 0.0]);
                    }
                }
            }
        }
        let b = assemble_load(&mesh, &data);
        let total_x: f64 = (0..mesh.n_nodes()).map(|i| b[2 * i]).sum();
        assert_abs_diff_eq!(total_x, 1.0, epsilon = 1e-14);
    }
}
