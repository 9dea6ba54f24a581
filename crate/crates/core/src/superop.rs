//! Sparse superoperators on column-major vectorized density matrices.
//!
//! The convention is vec(A rho B) = (B^T kron A) vec(rho) with column-major
//! vec, fixed project-wide. Generators are assembled from lists of
//! [`KronTerm`]s, each a sandwich `coeff * (a_photon kron a_phonon) rho
//! (b_photon kron b_phonon)` whose four factors live on the single-mode
//! spaces. Keeping the Kronecker factorization explicit lets the same term
//! list drive the full superoperator and the reduced phonon-diagonal map.

use faer::sparse::{SparseColMat, Triplet};
use num_complex::Complex;

use crate::error::{Error, Result};
use crate::operators::{identity, C64, Operator, I};
use crate::params::FockCutoffs;

/// One sandwich term; the action on the state is
/// `coeff * (a_photon kron a_phonon) rho (b_photon kron b_phonon)`.
#[derive(Debug, Clone)]
pub struct KronTerm {
    pub coeff: C64,
    pub a_photon: Operator,
    pub a_phonon: Operator,
    pub b_photon: Operator,
    pub b_phonon: Operator,
}

impl KronTerm {
    pub fn new(
        coeff: C64,
        a_photon: Operator,
        a_phonon: Operator,
        b_photon: Operator,
        b_phonon: Operator,
    ) -> Self {
        Self {
            coeff,
            a_photon,
            a_phonon,
            b_photon,
            b_phonon,
        }
    }

    /// Left multiplication only: `coeff * (p kron q) rho`.
    pub fn left(coeff: C64, p: Operator, q: Operator, cutoffs: FockCutoffs) -> Self {
        Self::new(
            coeff,
            p,
            q,
            identity(cutoffs.photon_dim()),
            identity(cutoffs.phonon_dim()),
        )
    }

    /// Right multiplication only: `coeff * rho (p kron q)`.
    pub fn right(coeff: C64, p: Operator, q: Operator, cutoffs: FockCutoffs) -> Self {
        Self::new(
            coeff,
            identity(cutoffs.photon_dim()),
            identity(cutoffs.phonon_dim()),
            p,
            q,
        )
    }

    /// The full-space operator acting from the left.
    pub fn left_operator(&self) -> Operator {
        self.a_photon.kronecker(&self.a_phonon)
    }

    /// The full-space operator acting from the right.
    pub fn right_operator(&self) -> Operator {
        self.b_photon.kronecker(&self.b_phonon)
    }

    /// Dense application, used as an oracle in tests.
    pub fn apply_dense(&self, rho: &Operator) -> Operator {
        (self.left_operator() * rho * self.right_operator()).map(|z| z * self.coeff)
    }
}

/// -i[H, rho] for a Hamiltonian given as a sum of factorized pieces
/// `coeff * (photon kron phonon)`.
pub fn hamiltonian_terms(pieces: &[(C64, Operator, Operator)], cutoffs: FockCutoffs) -> Vec<KronTerm> {
    let mut out = Vec::with_capacity(2 * pieces.len());
    for (coeff, p, q) in pieces {
        out.push(KronTerm::left(-I * coeff, p.clone(), q.clone(), cutoffs));
        out.push(KronTerm::right(I * coeff, p.clone(), q.clone(), cutoffs));
    }
    out
}

/// Lindblad dissipator `rate * (X rho X^dag - {X^dag X, rho} / 2)` for a
/// factorized jump operator X = x_photon kron x_phonon. The anticommutator
/// piece reuses the literal truncated product X^dag X, so the dissipator
/// annihilates the identity under the adjoint map exactly, at any cutoff.
pub fn dissipator_terms(
    rate: f64,
    x_photon: &Operator,
    x_phonon: &Operator,
    cutoffs: FockCutoffs,
) -> Vec<KronTerm> {
    let r = Complex::new(rate, 0.0);
    let half = Complex::new(-rate / 2.0, 0.0);
    let xpd = x_photon.adjoint();
    let xmd = x_phonon.adjoint();
    let np = &xpd * x_photon;
    let nm = &xmd * x_phonon;
    vec![
        KronTerm::new(r, x_photon.clone(), x_phonon.clone(), xpd, xmd),
        KronTerm::left(half, np.clone(), nm.clone(), cutoffs),
        KronTerm::right(half, np, nm, cutoffs),
    ]
}

fn nonzeros(m: &Operator) -> Vec<(usize, usize, C64)> {
    let mut out = Vec::new();
    for c in 0..m.ncols() {
        for r in 0..m.nrows() {
            let v = m[(r, c)];
            if v.re != 0.0 || v.im != 0.0 {
                out.push((r, c, v));
            }
        }
    }
    out
}

/// Sparse matrix acting on column-major vectorized density matrices.
#[derive(Debug, Clone)]
pub struct Superoperator {
    dim: usize,
    mat: SparseColMat<usize, C64>,
}

impl Superoperator {
    /// Assembles the generator for a term list on the product space given by
    /// `cutoffs`. Triplets are emitted in a fixed deterministic order, so the
    /// result is bit-reproducible for identical inputs.
    pub fn from_terms(cutoffs: FockCutoffs, terms: &[KronTerm]) -> Self {
        let d = cutoffs.dim();
        let md = cutoffs.phonon_dim();
        let mut trips: Vec<Triplet<usize, usize, C64>> = Vec::new();
        for t in terms {
            let ap = nonzeros(&t.a_photon);
            let am = nonzeros(&t.a_phonon);
            let bp = nonzeros(&t.b_photon);
            let bm = nonzeros(&t.b_phonon);
            // vec(A rho B) = (B^T kron A) vec(rho):
            // entry at (row = c' D + r', col = c D + r) is B[c, c'] A[r', r].
            for &(rp, cp, va_p) in &ap {
                for &(rm, cm, va_m) in &am {
                    let rr = rp * md + rm; // r'
                    let rc = cp * md + cm; // r
                    let va = va_p * va_m * t.coeff;
                    for &(rbp, cbp, vb_p) in &bp {
                        for &(rbm, cbm, vb_m) in &bm {
                            let cr = rbp * md + rbm; // c
                            let cc = cbp * md + cbm; // c'
                            trips.push(Triplet::new(cc * d + rr, cr * d + rc, va * vb_p * vb_m));
                        }
                    }
                }
            }
        }
        let mat = SparseColMat::try_new_from_triplets(d * d, d * d, &trips)
            .expect("superoperator triplets are in range");
        Self { dim: d, mat }
    }

    /// Zero superoperator (no dynamics).
    pub fn zero(dim: usize) -> Self {
        let mat = SparseColMat::try_new_from_triplets(dim * dim, dim * dim, &[])
            .expect("empty triplet list");
        Self { dim, mat }
    }

    /// State-space dimension D; the matrix acts on length D^2 vectors.
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn vec_dim(&self) -> usize {
        self.dim * self.dim
    }

    pub fn matrix(&self) -> &SparseColMat<usize, C64> {
        &self.mat
    }

    pub fn nnz(&self) -> usize {
        self.mat.compute_nnz()
    }

    /// y = L x.
    pub fn apply_vec(&self, x: &[C64]) -> Vec<C64> {
        assert_eq!(x.len(), self.vec_dim(), "vector length mismatch");
        let mut y = vec![Complex::new(0.0, 0.0); x.len()];
        for j in 0..self.vec_dim() {
            let xj = x[j];
            if xj.re == 0.0 && xj.im == 0.0 {
                continue;
            }
            for (i, v) in self
                .mat
                .row_idx_of_col(j)
                .zip(self.mat.val_of_col(j))
            {
                y[i] += v * xj;
            }
        }
        y
    }

    /// Applies the generator to a density-matrix-shaped operator.
    pub fn apply(&self, rho: &Operator) -> Operator {
        assert_eq!(rho.nrows(), self.dim);
        let y = self.apply_vec(rho.as_slice());
        Operator::from_column_slice(self.dim, self.dim, &y)
    }

    /// Trace-preservation defect: the largest column sum over diagonal
    /// positions, i.e. max over basis states of |tr(L rho)| contributions.
    /// Zero (to rounding) for every physical generator in this crate.
    pub fn trace_defect(&self) -> f64 {
        let d = self.dim;
        let mut worst = 0.0f64;
        for j in 0..self.vec_dim() {
            let mut s = Complex::new(0.0, 0.0);
            for (i, v) in self
                .mat
                .row_idx_of_col(j)
                .zip(self.mat.val_of_col(j))
            {
                if i % (d + 1) == 0 {
                    s += v;
                }
            }
            worst = worst.max(s.norm());
        }
        worst
    }

    pub fn max_abs(&self) -> f64 {
        let mut worst = 0.0f64;
        for j in 0..self.vec_dim() {
            for v in self.mat.val_of_col(j) {
                worst = worst.max(v.norm());
            }
        }
        worst
    }

    /// Largest elementwise difference between two superoperators.
    pub fn max_abs_diff(&self, other: &Superoperator) -> f64 {
        assert_eq!(self.dim, other.dim, "superoperator dimension mismatch");
        let mut worst = 0.0f64;
        for j in 0..self.vec_dim() {
            let mut a: Vec<(usize, C64)> = self
                .mat
                .row_idx_of_col(j)
                .zip(self.mat.val_of_col(j).iter().copied())
                .collect();
            let mut b: Vec<(usize, C64)> = other
                .mat
                .row_idx_of_col(j)
                .zip(other.mat.val_of_col(j).iter().copied())
                .collect();
            a.sort_unstable_by_key(|(i, _)| *i);
            b.sort_unstable_by_key(|(i, _)| *i);
            let (mut ia, mut ib) = (0usize, 0usize);
            while ia < a.len() || ib < b.len() {
                let d = match (a.get(ia), b.get(ib)) {
                    (Some(&(ra, va)), Some(&(rb, vb))) => {
                        if ra == rb {
                            ia += 1;
                            ib += 1;
                            (va - vb).norm()
                        } else if ra < rb {
                            ia += 1;
                            va.norm()
                        } else {
                            ib += 1;
                            vb.norm()
                        }
                    }
                    (Some(&(_, va)), None) => {
                        ia += 1;
                        va.norm()
                    }
                    (None, Some(&(_, vb))) => {
                        ib += 1;
                        vb.norm()
                    }
                    (None, None) => break,
                };
                worst = worst.max(d);
            }
        }
        worst
    }
}

/// The map rho -> A rho B as a superoperator, for arbitrary (not necessarily
/// factorized) square operators on the same space.
pub fn superop_sandwich(a: &Operator, b: &Operator) -> Result<Superoperator> {
    if a.nrows() != a.ncols() || b.nrows() != b.ncols() || a.nrows() != b.nrows() {
        return Err(Error::DimensionMismatch(format!(
            "sandwich needs square operators of equal dimension, got {}x{} and {}x{}",
            a.nrows(),
            a.ncols(),
            b.nrows(),
            b.ncols()
        )));
    }
    let d = a.nrows();
    let mut trips = Vec::new();
    for (rb, cb, vb) in nonzeros(b) {
        for (ra, ca, va) in nonzeros(a) {
            trips.push(Triplet::new(cb * d + ra, rb * d + ca, vb * va));
        }
    }
    let mat = SparseColMat::try_new_from_triplets(d * d, d * d, &trips)
        .expect("sandwich triplets are in range");
    Ok(Superoperator { dim: d, mat })
}

/// Identity superoperator.
pub fn superop_identity(dim: usize) -> Superoperator {
    let id = identity(dim);
    superop_sandwich(&id, &id).expect("identity sandwich")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operators::{annihilation, creation, max_abs, number, ONE};
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn random_operator(rng: &mut ChaCha8Rng, dim: usize) -> Operator {
        Operator::from_fn(dim, dim, |_, _| {
            Complex::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
        })
    }

    #[test]
    fn identity_sandwich_is_identity_map() {
        let s = superop_identity(4);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let rho = random_operator(&mut rng, 4);
        assert!(max_abs(&(s.apply(&rho) - &rho)) < 1e-15);
    }

    #[test]
    fn single_photon_decays() {
        let a = annihilation(2).unwrap();
        let s = superop_sandwich(&a, &a.adjoint()).unwrap();
        let mut rho = Operator::zeros(2, 2);
        rho[(1, 1)] = ONE;
        let out = s.apply(&rho);
        assert_eq!(out[(0, 0)], ONE);
        assert_eq!(out[(1, 1)], Complex::new(0.0, 0.0));
    }

    #[test]
    fn sandwich_matches_dense_triple_product() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..8 {
            let a = random_operator(&mut rng, 3);
            let b = random_operator(&mut rng, 3);
            let rho = random_operator(&mut rng, 3);
            let s = superop_sandwich(&a, &b).unwrap();
            let direct = &a * &rho * &b;
            assert!(max_abs(&(s.apply(&rho) - direct)) < 1e-14);
        }
    }

    #[test]
    fn sandwich_with_adjoint_preserves_hermiticity() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..8 {
            let a = random_operator(&mut rng, 4);
            let s = superop_sandwich(&a, &a.adjoint()).unwrap();
            let h = random_operator(&mut rng, 4);
            let herm = (&h + h.adjoint()).map(|z| z * Complex::new(0.5, 0.0));
            let out = s.apply(&herm);
            assert!(max_abs(&(&out - out.adjoint())) < 1e-13);
        }
    }

    #[test]
    fn sandwich_dimension_mismatch() {
        let a = identity(3);
        let b = identity(4);
        assert!(superop_sandwich(&a, &b).is_err());
    }

    #[test]
    fn kron_terms_match_dense_application() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let cutoffs = FockCutoffs::new(2, 3);
        let terms = vec![
            KronTerm::new(
                Complex::new(0.3, -0.7),
                random_operator(&mut rng, 3),
                random_operator(&mut rng, 4),
                random_operator(&mut rng, 3),
                random_operator(&mut rng, 4),
            ),
            KronTerm::left(
                Complex::new(-1.0, 0.2),
                random_operator(&mut rng, 3),
                random_operator(&mut rng, 4),
                cutoffs,
            ),
        ];
        let s = Superoperator::from_terms(cutoffs, &terms);
        let rho = random_operator(&mut rng, cutoffs.dim());
        let dense: Operator = terms
            .iter()
            .map(|t| t.apply_dense(&rho))
            .fold(Operator::zeros(cutoffs.dim(), cutoffs.dim()), |acc, x| acc + x);
        assert!(max_abs(&(s.apply(&rho) - dense)) < 1e-13);
    }

    #[test]
    fn dissipator_is_trace_free_and_matches_lindblad_form() {
        let cutoffs = FockCutoffs::new(2, 4);
        let a = annihilation(3).unwrap();
        let terms = dissipator_terms(0.8, &a, &identity(5), cutoffs);
        let s = Superoperator::from_terms(cutoffs, &terms);
        assert!(s.trace_defect() < 1e-15);

        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let rho = random_operator(&mut rng, cutoffs.dim());
        let big_a = crate::operators::embed(&a, crate::operators::Subsystem::Photon, cutoffs).unwrap();
        let ad = big_a.adjoint();
        let n = &ad * &big_a;
        let expected = (&big_a * &rho * &ad
            - (&n * &rho + &rho * &n).map(|z| z * Complex::new(0.5, 0.0)))
        .map(|z| z * Complex::new(0.8, 0.0));
        assert!(max_abs(&(s.apply(&rho) - expected)) < 1e-13);
    }

    #[test]
    fn hamiltonian_terms_give_commutator() {
        let cutoffs = FockCutoffs::new(2, 2);
        let pieces = [(Complex::new(0.7, 0.0), number(3), identity(3))];
        let s = Superoperator::from_terms(cutoffs, &hamiltonian_terms(&pieces, cutoffs));
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let rho = random_operator(&mut rng, cutoffs.dim());
        let h = crate::operators::embed(&number(3), crate::operators::Subsystem::Photon, cutoffs)
            .unwrap()
            .map(|z| z * Complex::new(0.7, 0.0));
        let expected = (&h * &rho - &rho * &h).map(|z| z * (-I));
        assert!(max_abs(&(s.apply(&rho) - expected)) < 1e-13);
        assert!(s.trace_defect() < 1e-15);
    }

    #[test]
    fn creation_word_cross_check() {
        // b rho b^dag moves |1><1| to |0><0| on the phonon side.
        let cutoffs = FockCutoffs::new(0, 1);
        let b = annihilation(2).unwrap();
        let term = KronTerm::new(ONE, identity(1), b.clone(), identity(1), b.adjoint());
        let s = Superoperator::from_terms(cutoffs, &[term]);
        let mut rho = Operator::zeros(2, 2);
        rho[(1, 1)] = ONE;
        let out = s.apply(&rho);
        assert_eq!(out[(0, 0)], ONE);
        let _ = creation(2).unwrap();
    }
}
