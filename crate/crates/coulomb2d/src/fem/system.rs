//! Static condensation of the elastic problem onto the contact boundary.
//!
//! After clamping the Dirichlet nodes, the free degrees of freedom are
//! split into interior ones and the contact-node pairs, the latter rotated
//! into their local (tangent, normal) frames. The interior block is
//! factored once; the Schur complement `S = K_cc − K_ci K_ii⁻¹ K_ic` is a
//! small dense SPD matrix acting on the contact traces. All nonsmooth
//! solves then run in this condensed space and interior displacements are
//! recovered exactly by back-substitution.
//!
//! The same factorization provides the dual norm of contact tractions:
//! `‖t‖ = √(pᵀ S⁻¹ p)` with `p` the lumped load `t_c·ŵ_c`, which equals
//! the square root of twice the elastic energy of the body loaded by `t`
//! on the contact boundary alone.

use super::assembly::{assemble_stiffness, CsrMatrix, DofMap, ModulusField};
use super::data::FemError;
use super::mesh::DomainMesh;
use nalgebra::{Cholesky, DMatrix, DVector, Dyn};

/// Factored, condensed elastic system for one mesh and modulus field.
pub struct FemContext<'a> {
    mesh: &'a DomainMesh,
    map: DofMap,
    k_free: CsrMatrix,
    /// Free indices of interior (non-contact) dofs, ascending.
    interior: Vec<usize>,
    /// Free indices of the (x, y) dofs of each contact node.
    contact_xy: Vec<(usize, usize)>,
    chol_ii: Cholesky<f64, Dyn>,
    /// `Y = K_ii⁻¹ K_ic`, interior × 2m, contact block in local frames.
    y: DMatrix<f64>,
    s_cc: DMatrix<f64>,
    chol_s: Cholesky<f64, Dyn>,
}

impl<'a> FemContext<'a> {
    /// Assembles and factors the condensed system.
    pub fn new(mesh: &'a DomainMesh, field: &ModulusField) -> Result<Self, FemError> {
        field.validate(mesh)?;
        let (k_free, map) = assemble_stiffness(mesh, field);
        let n_free = map.n_free();

        let mut is_contact_dof = vec![false; n_free];
        let mut contact_xy = Vec::with_capacity(mesh.n_contact());
        for &node in mesh.contact_nodes() {
            let fx = map.free_index[2 * node].expect("contact node is never clamped");
            let fy = map.free_index[2 * node + 1].expect("contact node is never clamped");
            is_contact_dof[fx] = true;
            is_contact_dof[fy] = true;
            contact_xy.push((fx, fy));
        }
        let interior: Vec<usize> = (0..n_free).filter(|&i| !is_contact_dof[i]).collect();
        let m = contact_xy.len();

        // Dense working copy with contact pairs rotated to (tangent,
        // normal): local = Q·global with Q = [[t_x, t_y], [n_x, n_y]].
        let mut kd = k_free.to_dense();
        for (c, &(fx, fy)) in contact_xy.iter().enumerate() {
            let t = mesh.contact_tangents()[c];
            let n = mesh.contact_normals()[c];
            for j in 0..n_free {
                let (a, b) = (kd[(fx, j)], kd[(fy, j)]);
                kd[(fx, j)] = t[0] * a + t[1] * b;
                kd[(fy, j)] = n[0] * a + n[1] * b;
            }
            for i in 0..n_free {
                let (a, b) = (kd[(i, fx)], kd[(i, fy)]);
                kd[(i, fx)] = t[0] * a + t[1] * b;
                kd[(i, fy)] = n[0] * a + n[1] * b;
            }
        }

        let ni = interior.len();
        let mut k_ii = DMatrix::zeros(ni, ni);
        for (i, &fi) in interior.iter().enumerate() {
            for (j, &fj) in interior.iter().enumerate() {
                k_ii[(i, j)] = kd[(fi, fj)];
            }
        }
        let mut k_ic = DMatrix::zeros(ni, 2 * m);
        for (i, &fi) in interior.iter().enumerate() {
            for (c, &(fx, fy)) in contact_xy.iter().enumerate() {
                k_ic[(i, 2 * c)] = kd[(fi, fx)];
                k_ic[(i, 2 * c + 1)] = kd[(fi, fy)];
            }
        }
        let mut k_cc = DMatrix::zeros(2 * m, 2 * m);
        for (c, &(fx, fy)) in contact_xy.iter().enumerate() {
            for (d, &(gx, gy)) in contact_xy.iter().enumerate() {
                k_cc[(2 * c, 2 * d)] = kd[(fx, gx)];
                k_cc[(2 * c, 2 * d + 1)] = kd[(fx, gy)];
                k_cc[(2 * c + 1, 2 * d)] = kd[(fy, gx)];
                k_cc[(2 * c + 1, 2 * d + 1)] = kd[(fy, gy)];
            }
        }

        let chol_ii = Cholesky::new(k_ii).ok_or_else(|| {
            FemError::InvalidData("interior stiffness block is not positive definite".into())
        })?;
        let y = chol_ii.solve(&k_ic);
        let mut s_cc = k_cc - k_ic.transpose() * &y;
        // Exact symmetry guards the Cholesky against rounding drift.
        s_cc = 0.5 * (&s_cc + s_cc.transpose());
        let chol_s = if m > 0 {
            Cholesky::new(s_cc.clone()).ok_or_else(|| {
                FemError::InvalidData("condensed contact operator is not positive definite".into())
            })?
        } else {
            Cholesky::new(DMatrix::identity(0, 0)).expect("empty factorization")
        };

        Ok(Self {
            mesh,
            map,
            k_free,
            interior,
            contact_xy,
            chol_ii,
            y,
            s_cc,
            chol_s,
        })
    }

    pub fn mesh(&self) -> &DomainMesh {
        self.mesh
    }

    /// Stiffness on the free dofs, global frame.
    pub fn stiffness(&self) -> &CsrMatrix {
        &self.k_free
    }

    pub fn dof_map(&self) -> &DofMap {
        &self.map
    }

    /// Condensed contact operator (local frames, tangent dof `2c`, normal
    /// dof `2c+1`).
    pub fn schur(&self) -> &DMatrix<f64> {
        &self.s_cc
    }

    pub fn n_contact(&self) -> usize {
        self.contact_xy.len()
    }

    /// Restricts a full (all-dof, global-frame) vector to the free dofs.
    pub fn restrict(&self, full: &DVector<f64>) -> DVector<f64> {
        DVector::from_iterator(
            self.map.n_free(),
            self.map.free_dofs.iter().map(|&d| full[d]),
        )
    }

    /// Condenses a full load vector: returns the interior part (local
    /// numbering) and the reduced contact load `r̂ = b_c − Yᵀ b_i`.
    pub fn condense_load(&self, full: &DVector<f64>) -> CondensedLoad {
        let free = self.restrict(full);
        let ni = self.interior.len();
        let m = self.contact_xy.len();
        let b_i = DVector::from_iterator(ni, self.interior.iter().map(|&f| free[f]));
        let mut b_c = DVector::zeros(2 * m);
        for (c, &(fx, fy)) in self.contact_xy.iter().enumerate() {
            let t = self.mesh.contact_tangents()[c];
            let n = self.mesh.contact_normals()[c];
            b_c[2 * c] = t[0] * free[fx] + t[1] * free[fy];
            b_c[2 * c + 1] = n[0] * free[fx] + n[1] * free[fy];
        }
        let ui0 = self.chol_ii.solve(&b_i);
        let r_hat = b_c - self.y.transpose() * &b_i;
        CondensedLoad { b_i, ui0, r_hat }
    }

    /// Recovers the full nodal displacement field from condensed contact
    /// displacements `z` (local frames) and a condensed load.
    pub fn recover(&self, load: &CondensedLoad, z: &DVector<f64>) -> Vec<[f64; 2]> {
        let u_i = &load.ui0 - &self.y * z;
        let mut free = DVector::zeros(self.map.n_free());
        for (i, &fi) in self.interior.iter().enumerate() {
            free[fi] = u_i[i];
        }
        for (c, &(fx, fy)) in self.contact_xy.iter().enumerate() {
            let t = self.mesh.contact_tangents()[c];
            let n = self.mesh.contact_normals()[c];
            // global = Qᵀ local
            free[fx] = t[0] * z[2 * c] + n[0] * z[2 * c + 1];
            free[fy] = t[1] * z[2 * c] + n[1] * z[2 * c + 1];
        }
        let mut u = vec![[0.0; 2]; self.mesh.n_nodes()];
        for (fi, &dof) in self.map.free_dofs.iter().enumerate() {
            u[dof / 2][dof % 2] = free[fi];
        }
        u
    }

    /// Dual norm of a normal-traction density on the contact chain:
    /// `√(pᵀ S⁻¹ p)` with the lumped pairing `p_c = t_c·ŵ_c` applied on
    /// the local normal dofs.
    pub fn dual_norm_normal(&self, t: &[f64]) -> f64 {
        assert_eq!(t.len(), self.n_contact());
        let m = self.n_contact();
        if m == 0 {
            return 0.0;
        }
        let mut p = DVector::zeros(2 * m);
        for c in 0..m {
            p[2 * c + 1] = t[c] * self.mesh.contact_weights()[c];
        }
        let x = self.chol_s.solve(&p);
        p.dot(&x).max(0.0).sqrt()
    }
}

/// A load vector after condensation.
pub struct CondensedLoad {
    /// Interior load (interior numbering).
    pub b_i: DVector<f64>,
    /// `K_ii⁻¹ b_i`, reused during recovery.
    pub ui0: DVector<f64>,
    /// Reduced load on the contact dofs (local frames).
    pub r_hat: DVector<f64>,
}
