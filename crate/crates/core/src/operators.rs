//! Dense operator algebra on the truncated photon-phonon product space.
//!
//! Operators are plain complex matrices. The product-space layout is fixed by
//! [`FockCutoffs::idx`]: photon number is the slow index, phonon number the
//! fast one, so a product operator is `photon_part.kronecker(&phonon_part)`.

use nalgebra::DMatrix;
use num_complex::Complex;

use crate::error::{Error, Result};
use crate::params::FockCutoffs;

pub type C64 = Complex<f64>;
pub type Operator = DMatrix<C64>;

pub const ONE: C64 = Complex::new(1.0, 0.0);
pub const I: C64 = Complex::new(0.0, 1.0);

/// Truncated bosonic annihilation operator: `a[k-1, k] = sqrt(k)`.
pub fn annihilation(dim: usize) -> Result<Operator> {
    if dim == 0 {
        return Err(Error::DimensionMismatch(
            "annihilation operator needs dim >= 1".into(),
        ));
    }
    let mut a = Operator::zeros(dim, dim);
    for k in 1..dim {
        a[(k - 1, k)] = Complex::new((k as f64).sqrt(), 0.0);
    }
    Ok(a)
}

/// Truncated creation operator, the adjoint of [`annihilation`].
pub fn creation(dim: usize) -> Result<Operator> {
    Ok(annihilation(dim)?.adjoint())
}

/// Number operator diag(0, 1, ..., dim-1).
pub fn number(dim: usize) -> Operator {
    Operator::from_fn(dim, dim, |r, c| {
        if r == c {
            Complex::new(r as f64, 0.0)
        } else {
            Complex::new(0.0, 0.0)
        }
    })
}

pub fn identity(dim: usize) -> Operator {
    Operator::identity(dim, dim)
}

/// Phonon operator word b^lowers (b^dag)^raises, materialized on a truncated
/// ladder of the given dimension. The creation part acts first.
pub fn phonon_word(lowers: usize, raises: usize, dim: usize) -> Result<Operator> {
    let b = annihilation(dim)?;
    let bd = creation(dim)?;
    let mut w = identity(dim);
    for _ in 0..raises {
        w = &bd * w;
    }
    for _ in 0..lowers {
        w = &b * w;
    }
    Ok(w)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Subsystem {
    Photon,
    Phonon,
}

/// Kronecker embedding of a single-mode operator into the product space.
pub fn embed(op: &Operator, subsystem: Subsystem, cutoffs: FockCutoffs) -> Result<Operator> {
    let expected = match subsystem {
        Subsystem::Photon => cutoffs.photon_dim(),
        Subsystem::Phonon => cutoffs.phonon_dim(),
    };
    if op.nrows() != expected || op.ncols() != expected {
        return Err(Error::DimensionMismatch(format!(
            "embed: operator is {}x{}, {subsystem:?} subspace has dim {expected}",
            op.nrows(),
            op.ncols()
        )));
    }
    Ok(match subsystem {
        Subsystem::Photon => op.kronecker(&identity(cutoffs.phonon_dim())),
        Subsystem::Phonon => identity(cutoffs.photon_dim()).kronecker(op),
    })
}

/// Exponential of an anti-Hermitian matrix via the Hermitian eigendecomposition
/// of -i times it.
fn exp_anti_hermitian(m: &Operator) -> Operator {
    let herm = m.map(|z| -I * z);
    let eig = herm.clone().symmetric_eigen();
    let dim = m.nrows();
    let mut phases = Operator::zeros(dim, dim);
    for k in 0..dim {
        phases[(k, k)] = (I * Complex::new(eig.eigenvalues[k], 0.0)).exp();
    }
    &eig.eigenvectors * phases * eig.eigenvectors.adjoint()
}

/// The polaron transformation U = exp[chi a^dag a (b - b^dag)], block-diagonal
/// in photon number: block n is the phonon displacement exp[chi n (b - b^dag)],
/// computed by dense exponentiation of the truncated generator.
///
/// Returns the operator together with its unitarity defect
/// max |U^dag U - 1|, which grows toward the phonon truncation edge.
pub fn polaron_unitary(chi: f64, cutoffs: FockCutoffs) -> Result<(Operator, f64)> {
    if !chi.is_finite() {
        return Err(Error::InvalidParams(format!("chi = {chi} is not finite")));
    }
    let pd = cutoffs.phonon_dim();
    let d = cutoffs.dim();
    let b = annihilation(pd)?;
    let gen = &b - b.adjoint();

    let mut u = Operator::zeros(d, d);
    for n in 0..cutoffs.photon_dim() {
        let block = if n == 0 || chi == 0.0 {
            identity(pd)
        } else {
            exp_anti_hermitian(&gen.map(|z| z * Complex::new(chi * n as f64, 0.0)))
        };
        for r in 0..pd {
            for c in 0..pd {
                u[(cutoffs.idx(n, r), cutoffs.idx(n, c))] = block[(r, c)];
            }
        }
    }

    let defect = (u.adjoint() * &u - identity(d))
        .iter()
        .map(|z| z.norm())
        .fold(0.0, f64::max);
    Ok((u, defect))
}

/// Largest absolute entry of `m`.
pub fn max_abs(m: &Operator) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// A density matrix on the truncated product space: Hermitian, unit trace,
/// positive semidefinite up to a truncation floor.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    mat: Operator,
}

impl DensityMatrix {
    pub const TRACE_TOL: f64 = 1e-12;
    pub const HERMITICITY_TOL: f64 = 1e-12;
    pub const EIGENVALUE_FLOOR: f64 = -1e-8;

    /// Validates all invariants, including positivity via a full
    /// eigendecomposition.
    pub fn try_new(mat: Operator) -> Result<Self> {
        let rho = Self::check_trace_and_hermiticity(mat)?;
        let min_eig = rho.min_eigenvalue();
        if min_eig < Self::EIGENVALUE_FLOOR {
            return Err(Error::InvalidState(format!(
                "minimum eigenvalue {min_eig:.3e} below floor {:.1e}",
                Self::EIGENVALUE_FLOOR
            )));
        }
        Ok(rho)
    }

    /// Validates trace and Hermiticity, trusting a minimum eigenvalue the
    /// caller already computed (e.g. from the phonon-block spectra).
    pub(crate) fn try_new_with_spectral_bound(mat: Operator, min_eig: f64) -> Result<Self> {
        if min_eig < Self::EIGENVALUE_FLOOR {
            return Err(Error::InvalidState(format!(
                "minimum eigenvalue {min_eig:.3e} below floor {:.1e}",
                Self::EIGENVALUE_FLOOR
            )));
        }
        Self::check_trace_and_hermiticity(mat)
    }

    fn check_trace_and_hermiticity(mat: Operator) -> Result<Self> {
        if mat.nrows() != mat.ncols() {
            return Err(Error::DimensionMismatch(format!(
                "density matrix must be square, got {}x{}",
                mat.nrows(),
                mat.ncols()
            )));
        }
        let tr = mat.trace();
        if (tr - ONE).norm() > Self::TRACE_TOL {
            return Err(Error::InvalidState(format!(
                "trace {tr} deviates from one beyond {:.1e}",
                Self::TRACE_TOL
            )));
        }
        let herm = max_abs(&(&mat - mat.adjoint()));
        if herm > Self::HERMITICITY_TOL {
            return Err(Error::InvalidState(format!(
                "Hermiticity defect {herm:.3e} beyond {:.1e}",
                Self::HERMITICITY_TOL
            )));
        }
        Ok(Self { mat })
    }

    /// |0><0| on a space of the given dimension.
    pub fn vacuum(dim: usize) -> Self {
        let mut mat = Operator::zeros(dim, dim);
        mat[(0, 0)] = ONE;
        Self { mat }
    }

    /// Diagonal state from non-negative weights (renormalized).
    pub fn from_diagonal(weights: &[f64]) -> Result<Self> {
        let total: f64 = weights.iter().sum();
        if !(total > 0.0) || weights.iter().any(|w| *w < 0.0) {
            return Err(Error::InvalidState(
                "diagonal weights must be non-negative with positive sum".into(),
            ));
        }
        let dim = weights.len();
        let mut mat = Operator::zeros(dim, dim);
        for (k, w) in weights.iter().enumerate() {
            mat[(k, k)] = Complex::new(w / total, 0.0);
        }
        Ok(Self { mat })
    }

    /// Hermitizes and trace-normalizes an approximate solution, then checks
    /// the invariants. Used on every solver success path.
    pub fn from_approximate(mat: Operator, min_eig_hint: Option<f64>) -> Result<Self> {
        let herm = (&mat + mat.adjoint()).map(|z| z * Complex::new(0.5, 0.0));
        let tr = herm.trace();
        if tr.norm() < 1e-300 {
            return Err(Error::InvalidState("state has zero trace".into()));
        }
        let normalized = herm.map(|z| z / tr);
        match min_eig_hint {
            Some(min_eig) => Self::try_new_with_spectral_bound(normalized, min_eig),
            None => Self::try_new(normalized),
        }
    }

    pub fn matrix(&self) -> &Operator {
        &self.mat
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn trace(&self) -> C64 {
        self.mat.trace()
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.mat
            .clone()
            .symmetric_eigen()
            .eigenvalues
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min)
    }

    /// Column-major vectorization.
    pub fn to_vec(&self) -> Vec<C64> {
        self.mat.as_slice().to_vec()
    }

    /// Inverse of [`DensityMatrix::to_vec`], without invariant checks.
    pub(crate) fn matrix_from_vec(dim: usize, v: &[C64]) -> Operator {
        Operator::from_column_slice(dim, dim, v)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    pub(crate) fn random_operator(rng: &mut ChaCha8Rng, dim: usize) -> Operator {
        Operator::from_fn(dim, dim, |_, _| {
            Complex::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
        })
    }

    #[test]
    fn annihilation_matrix_elements() {
        let a = annihilation(3).unwrap();
        assert_eq!(a[(0, 1)], ONE);
        assert_abs_diff_eq!(a[(1, 2)].re, 2.0_f64.sqrt(), epsilon = 1e-15);
        assert_eq!(a[(1, 0)], Complex::new(0.0, 0.0));
        assert_eq!(a[(2, 2)], Complex::new(0.0, 0.0));
    }

    #[test]
    fn annihilation_lowers_single_quantum() {
        let a = annihilation(2).unwrap();
        let ket1 = nalgebra::DVector::from_vec(vec![Complex::new(0.0, 0.0), ONE]);
        let out = a * ket1;
        assert_eq!(out[0], ONE);
        assert_eq!(out[1], Complex::new(0.0, 0.0));
    }

    #[test]
    fn zero_dimension_rejected() {
        assert!(annihilation(0).is_err());
    }

    #[test]
    fn truncated_commutator_defect_confined_to_top() {
        for dim in [2usize, 5, 9] {
            let a = annihilation(dim).unwrap();
            let comm = &a * a.adjoint() - a.adjoint() * &a;
            let mut expected = identity(dim);
            expected[(dim - 1, dim - 1)] -= Complex::new(dim as f64, 0.0);
            assert!(max_abs(&(comm - expected)) < 1e-13);
        }
    }

    #[test]
    fn embed_identity_is_identity() {
        let c = FockCutoffs::new(2, 3);
        let e = embed(&identity(3), Subsystem::Photon, c).unwrap();
        assert_eq!(e, identity(c.dim()));
    }

    #[test]
    fn embedded_photon_annihilation_acts_on_slow_index() {
        let c = FockCutoffs::new(2, 3);
        let a = embed(&annihilation(3).unwrap(), Subsystem::Photon, c).unwrap();
        let mut ket = nalgebra::DVector::zeros(c.dim());
        ket[c.idx(1, 0)] = ONE;
        let out = a * ket;
        assert_eq!(out[c.idx(0, 0)], ONE);
        assert_eq!(out.iter().filter(|z| z.norm() > 0.0).count(), 1);
    }

    #[test]
    fn embedded_phonon_number_is_diagonal() {
        let c = FockCutoffs::new(2, 3);
        let nb = embed(&number(4), Subsystem::Phonon, c).unwrap();
        for n in 0..=2 {
            for m in 0..=3 {
                let i = c.idx(n, m);
                assert_eq!(nb[(i, i)], Complex::new(m as f64, 0.0));
            }
        }
        assert!(nb.iter().filter(|z| z.norm() > 0.0).count() <= c.dim());
    }

    #[test]
    fn embed_respects_products() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let c = FockCutoffs::new(2, 2);
        let x = random_operator(&mut rng, 3);
        let y = random_operator(&mut rng, 3);
        for sub in [Subsystem::Photon, Subsystem::Phonon] {
            let lhs = embed(&(&x * &y), sub, c).unwrap();
            let rhs = embed(&x, sub, c).unwrap() * embed(&y, sub, c).unwrap();
            assert!(max_abs(&(lhs - rhs)) < 1e-13);
        }
    }

    #[test]
    fn embed_dimension_mismatch() {
        let c = FockCutoffs::new(2, 3);
        assert!(embed(&identity(4), Subsystem::Photon, c).is_err());
    }

    #[test]
    fn phonon_word_matches_manual_product() {
        let dim = 6;
        let b = annihilation(dim).unwrap();
        let bd = creation(dim).unwrap();
        let w = phonon_word(1, 2, dim).unwrap();
        assert!(max_abs(&(w - &b * &bd * &bd)) < 1e-14);
    }

    #[test]
    fn polaron_at_zero_coupling_is_identity() {
        let c = FockCutoffs::new(3, 5);
        let (u, defect) = polaron_unitary(0.0, c).unwrap();
        assert_eq!(u, identity(c.dim()));
        assert_eq!(defect, 0.0);
    }

    #[test]
    fn polaron_vacuum_block_is_identity() {
        let c = FockCutoffs::new(2, 8);
        let (u, _) = polaron_unitary(0.3, c).unwrap();
        for r in 0..=8 {
            for cidx in 0..=8 {
                let expect = if r == cidx { ONE } else { Complex::new(0.0, 0.0) };
                assert_eq!(u[(c.idx(0, r), c.idx(0, cidx))], expect);
            }
        }
    }

    #[test]
    fn polaron_block_matches_coherent_amplitudes() {
        // Block n = 2 at chi = 0.1 displaces by alpha = -0.2:
        // <m|exp(0.2 (b - b^dag))|0> = exp(-0.02) (-0.2)^m / sqrt(m!).
        let c = FockCutoffs::new(2, 20);
        let (u, _) = polaron_unitary(0.1, c).unwrap();
        let alpha: f64 = -0.2;
        let mut fact = 1.0;
        for m in 0..=12 {
            if m > 0 {
                fact *= m as f64;
            }
            let expect = (-alpha * alpha / 2.0).exp() * alpha.powi(m as i32) / fact.sqrt();
            let got = u[(c.idx(2, m), c.idx(2, 0))];
            assert_abs_diff_eq!(got.re, expect, epsilon = 1e-10);
            assert_abs_diff_eq!(got.im, 0.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn polaron_unitarity_defect_shrinks_with_cutoff() {
        let chi = 0.15;
        let n_max = 4;
        let mut last = f64::INFINITY;
        for m_max in [6usize, 10, 16, 24] {
            let (_, defect) = polaron_unitary(chi, FockCutoffs::new(n_max, m_max)).unwrap();
            // Monotone until it bottoms out at rounding level.
            assert!(
                defect < last || defect < 1e-12,
                "defect {defect} did not shrink (was {last})"
            );
            last = defect;
        }
        // Sized per the guarantee m_max >= 4 (chi n_max)^2 + 10.
        let bound = (4.0 * (chi * n_max as f64).powi(2) + 10.0).ceil() as usize;
        let (_, defect) = polaron_unitary(chi, FockCutoffs::new(n_max, bound + 4)).unwrap();
        assert!(defect < 1e-8, "defect {defect} at m_max = {}", bound + 4);
    }

    #[test]
    fn density_matrix_invariants_enforced() {
        let mut bad_trace = Operator::zeros(2, 2);
        bad_trace[(0, 0)] = Complex::new(0.7, 0.0);
        bad_trace[(1, 1)] = Complex::new(0.2, 0.0);
        assert!(DensityMatrix::try_new(bad_trace).is_err());

        let mut non_herm = Operator::zeros(2, 2);
        non_herm[(0, 0)] = ONE;
        non_herm[(0, 1)] = Complex::new(1e-3, 0.0);
        assert!(DensityMatrix::try_new(non_herm).is_err());

        let mut negative = Operator::zeros(2, 2);
        negative[(0, 0)] = Complex::new(1.5, 0.0);
        negative[(1, 1)] = Complex::new(-0.5, 0.0);
        assert!(DensityMatrix::try_new(negative).is_err());

        let ok = DensityMatrix::from_diagonal(&[0.5, 0.5]).unwrap();
        assert_eq!(ok.trace(), ONE);
    }

    #[test]
    fn vectorization_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let m = random_operator(&mut rng, 4);
        // M M^dag is Hermitian and positive semidefinite.
        let psd = &m * m.adjoint();
        let rho = DensityMatrix::from_approximate(psd, None).unwrap();
        let v = rho.to_vec();
        let back = DensityMatrix::matrix_from_vec(4, &v);
        assert_eq!(&back, rho.matrix());
    }
}
