use super::dofmap::DofKind;
use crate::linalg::CsrMatrix;

/// Symmetric elimination of fixed dofs and master-slave folding of tied dofs.
///
/// The constrained operator keeps the full dimension: the row and column of
/// every free dof collect the contributions of its slaves (`Tᵀ A T` with the
/// 0/1 prolongation `T`), fixed and slave rows become identity rows.
#[derive(Debug, Clone)]
pub struct Constraints {
    kinds: Vec<DofKind>,
    has_nonzero_fixed: bool,
}

impl Constraints {
    pub fn new(kinds: &[DofKind]) -> Self {
        let has_nonzero_fixed = kinds.iter().any(|k| matches!(k, DofKind::Fixed(v) if *v != 0.0));
        Self { kinds: kinds.to_vec(), has_nonzero_fixed }
    }

    pub fn len(&self) -> usize {
        self.kinds.len()
    }

    pub fn is_empty(&self) -> bool {
        self.kinds.is_empty()
    }

    pub fn kinds(&self) -> &[DofKind] {
        &self.kinds
    }

    /// Dof whose equation absorbs dof `i`, `None` when `i` is fixed.
    #[inline]
    pub fn representative(&self, i: usize) -> Option<usize> {
        match self.kinds[i] {
            DofKind::Free => Some(i),
            DofKind::Slave { master } => Some(master),
            DofKind::Fixed(_) => None,
        }
    }

    pub fn constrain_matrix(&self, a: &CsrMatrix) -> CsrMatrix {
        assert_eq!(a.nrows(), self.len());
        let mut t = Vec::with_capacity(a.nnz() + self.len());
        for i in 0..a.nrows() {
            let Some(ri) = self.representative(i) else { continue };
            for (j, v) in a.row(i) {
                if let Some(rj) = self.representative(j) {
                    t.push((ri, rj, v));
                }
            }
        }
        for (i, k) in self.kinds.iter().enumerate() {
            if !matches!(k, DofKind::Free) {
                t.push((i, i, 1.0));
            }
        }
        CsrMatrix::from_triplets(a.nrows(), a.ncols(), &t)
    }

    /// Right-hand side matching [`Self::constrain_matrix`] for the
    /// unconstrained system `a x = rhs`.
    pub fn constrain_rhs(&self, a: &CsrMatrix, rhs: &[f64]) -> Vec<f64> {
        let n = self.len();
        assert_eq!(rhs.len(), n);
        let mut out = vec![0.0; n];
        for (i, &r) in rhs.iter().enumerate() {
            if let Some(ri) = self.representative(i) {
                out[ri] += r;
            }
        }
        if self.has_nonzero_fixed {
            for i in 0..n {
                let Some(ri) = self.representative(i) else { continue };
                for (j, v) in a.row(i) {
                    if let DofKind::Fixed(g) = self.kinds[j] {
                        out[ri] -= v * g;
                    }
                }
            }
        }
        for (i, k) in self.kinds.iter().enumerate() {
            match k {
                DofKind::Fixed(g) => out[i] = *g,
                DofKind::Slave { .. } => out[i] = 0.0,
                DofKind::Free => {}
            }
        }
        out
    }

    /// Restores slave values from their masters and fixed values.
    pub fn expand(&self, x: &mut [f64]) {
        for (i, k) in self.kinds.iter().enumerate() {
            match k {
                DofKind::Fixed(g) => x[i] = *g,
                DofKind::Slave { master } => x[i] = x[*master],
                DofKind::Free => {}
            }
        }
    }
}
