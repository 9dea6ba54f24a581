//! Assembly of the three generators: the full untransformed Liouvillian (the
//! oracle), the transformed secular generator at order N, and the reduced map
//! on the phonon-diagonal subspace.

use faer::sparse::{SparseColMat, Triplet};
use num_complex::Complex;

use crate::error::Result;
use crate::operators::{annihilation, creation, identity, number, Operator, C64};
use crate::params::{ExpansionOrder, FockCutoffs, SystemParams, OMEGA};
use crate::secular::{secular_damping_closure, secular_damping_kron_terms, secular_exponent_operator};
use crate::superop::{dissipator_terms, hamiltonian_terms, KronTerm, Superoperator};

fn re(x: f64) -> C64 {
    Complex::new(x, 0.0)
}

/// Term list of the full master equation:
/// H = delta a^dag a + omega b^dag b + eps (a + a^dag) + g a^dag a (b + b^dag),
/// with the cavity decay and the thermal mechanical dissipators.
pub fn full_liouvillian_terms(params: &SystemParams, cutoffs: FockCutoffs) -> Result<Vec<KronTerm>> {
    params.check_hard()?;
    let nd = cutoffs.photon_dim();
    let md = cutoffs.phonon_dim();
    let a = annihilation(nd)?;
    let ad = creation(nd)?;
    let b = annihilation(md)?;
    let bd = creation(md)?;
    let x_b = &b + &bd;

    let h_pieces = [
        (re(params.delta), number(nd), identity(md)),
        (re(OMEGA), identity(nd), number(md)),
        (re(params.epsilon), &a + &ad, identity(md)),
        (re(params.g), number(nd), x_b),
    ];
    let mut terms = hamiltonian_terms(&h_pieces, cutoffs);
    terms.extend(dissipator_terms(params.kappa_a, &a, &identity(md), cutoffs));
    terms.extend(dissipator_terms(
        params.kappa_b * (1.0 + params.nbar),
        &identity(nd),
        &b,
        cutoffs,
    ));
    terms.extend(dissipator_terms(
        params.kappa_b * params.nbar,
        &identity(nd),
        &bd,
        cutoffs,
    ));
    Ok(terms)
}

/// The full untransformed Liouvillian as a sparse superoperator.
pub fn full_liouvillian(params: &SystemParams, cutoffs: FockCutoffs) -> Result<Superoperator> {
    Ok(Superoperator::from_terms(
        cutoffs,
        &full_liouvillian_terms(params, cutoffs)?,
    ))
}

/// Term list of the transformed, secularized generator at order N.
///
/// The Hamiltonian is
///   delta a^dag a + omega b^dag b
///   + eps (a + a^dag) F_N(b^dag b) - omega chi^2 (a^dag a)^2,
/// with F_N the secular exponent series. The cavity dissipator carries the
/// enumerated multiphonon sandwich terms; its anticommutator half uses the
/// matching truncated closure so the whole dissipator stays trace-free. The
/// mechanical dissipators pick up the chi^2 photon-number cross terms for
/// every N >= 1; the transformed mechanical jump operators are linear in chi,
/// so no corrections beyond chi^2 exist.
pub fn transformed_liouvillian_terms(
    params: &SystemParams,
    cutoffs: FockCutoffs,
    order: ExpansionOrder,
) -> Result<Vec<KronTerm>> {
    params.check_hard()?;
    let chi = params.chi();
    let nd = cutoffs.photon_dim();
    let md = cutoffs.phonon_dim();
    let a = annihilation(nd)?;
    let ad = creation(nd)?;
    let n_phot = number(nd);
    let b = annihilation(md)?;
    let bd = creation(md)?;

    let drive_factor = secular_exponent_operator(chi, order, cutoffs.m_max)?;
    let h_pieces = [
        (re(params.delta), n_phot.clone(), identity(md)),
        (re(OMEGA), identity(nd), number(md)),
        (re(params.epsilon), &a + &ad, drive_factor),
        (re(-OMEGA * chi * chi), &n_phot * &n_phot, identity(md)),
    ];
    let mut terms = hamiltonian_terms(&h_pieces, cutoffs);

    // Cavity decay: multiphonon sandwich plus the trace-matched closure.
    let rate = re(params.kappa_a);
    for mut t in secular_damping_kron_terms(chi, order, cutoffs)? {
        t.coeff *= rate;
        terms.push(t);
    }
    let closure = secular_damping_closure(chi, order, cutoffs.m_max)?;
    let half = re(-params.kappa_a / 2.0);
    terms.push(KronTerm::left(half, n_phot.clone(), closure.clone(), cutoffs));
    terms.push(KronTerm::right(half, n_phot.clone(), closure, cutoffs));

    // Mechanical dissipators with their chi^2 cross terms.
    terms.extend(dissipator_terms(
        params.kappa_b * (1.0 + params.nbar),
        &identity(nd),
        &b,
        cutoffs,
    ));
    terms.extend(dissipator_terms(
        params.kappa_b * params.nbar,
        &identity(nd),
        &bd,
        cutoffs,
    ));
    if order.0 >= 1 {
        terms.extend(dissipator_terms(
            params.kappa_b * (1.0 + params.nbar) * chi * chi,
            &n_phot,
            &identity(md),
            cutoffs,
        ));
        terms.extend(dissipator_terms(
            params.kappa_b * params.nbar * chi * chi,
            &n_phot,
            &identity(md),
            cutoffs,
        ));
    }
    Ok(terms)
}

/// The transformed secular generator as a sparse superoperator.
pub fn transformed_liouvillian(
    params: &SystemParams,
    cutoffs: FockCutoffs,
    order: ExpansionOrder,
) -> Result<Superoperator> {
    Ok(Superoperator::from_terms(
        cutoffs,
        &transformed_liouvillian_terms(params, cutoffs, order)?,
    ))
}

/// Linear map on the phonon-diagonal coordinates x[n1, n2, m] = <n1, m|rho|n2, m>.
///
/// The secular generator never couples phonon-diagonal matrix elements to
/// off-diagonal ones, so restricting the same term list to this sector gives
/// the generator the distribution actually evolves under, at a fraction of
/// the full superoperator's size.
#[derive(Debug, Clone)]
pub struct ReducedGenerator {
    cutoffs: FockCutoffs,
    mat: SparseColMat<usize, C64>,
}

impl ReducedGenerator {
    pub fn from_terms(cutoffs: FockCutoffs, terms: &[KronTerm]) -> Self {
        let nd = cutoffs.photon_dim();
        let md = cutoffs.phonon_dim();
        let dim = nd * nd * md;
        let idx = |n1: usize, n2: usize, m: usize| (n1 * nd + n2) * md + m;

        let mut trips: Vec<Triplet<usize, usize, C64>> = Vec::new();
        for t in terms {
            // d x[n1, n2, m] += coeff A[(n1,m),(p,mu)] x[p,q,mu] B[(q,mu),(n2,m)]
            // with A = a_photon kron a_phonon, B = b_photon kron b_phonon.
            for p in 0..nd {
                for n1 in 0..nd {
                    let va_p = t.a_photon[(n1, p)];
                    if va_p.re == 0.0 && va_p.im == 0.0 {
                        continue;
                    }
                    for q in 0..nd {
                        for n2 in 0..nd {
                            let vb_p = t.b_photon[(q, n2)];
                            if vb_p.re == 0.0 && vb_p.im == 0.0 {
                                continue;
                            }
                            let photon = t.coeff * va_p * vb_p;
                            for mu in 0..md {
                                for m in 0..md {
                                    let va_m = t.a_phonon[(m, mu)];
                                    if va_m.re == 0.0 && va_m.im == 0.0 {
                                        continue;
                                    }
                                    let vb_m = t.b_phonon[(mu, m)];
                                    if vb_m.re == 0.0 && vb_m.im == 0.0 {
                                        continue;
                                    }
                                    trips.push(Triplet::new(
                                        idx(n1, n2, m),
                                        idx(p, q, mu),
                                        photon * va_m * vb_m,
                                    ));
                                }
                            }
                        }
                    }
                }
            }
        }
        let mat = SparseColMat::try_new_from_triplets(dim, dim, &trips)
            .expect("reduced generator triplets are in range");
        Self { cutoffs, mat }
    }

    pub fn cutoffs(&self) -> FockCutoffs {
        self.cutoffs
    }

    /// Number of reduced coordinates, (n_max+1)^2 (m_max+1).
    pub fn dim(&self) -> usize {
        let nd = self.cutoffs.photon_dim();
        nd * nd * self.cutoffs.phonon_dim()
    }

    pub fn index(&self, n1: usize, n2: usize, m: usize) -> usize {
        let nd = self.cutoffs.photon_dim();
        (n1 * nd + n2) * self.cutoffs.phonon_dim() + m
    }

    pub fn matrix(&self) -> &SparseColMat<usize, C64> {
        &self.mat
    }

    pub fn apply_vec(&self, x: &[C64]) -> Vec<C64> {
        assert_eq!(x.len(), self.dim());
        let mut y = vec![Complex::new(0.0, 0.0); x.len()];
        for j in 0..self.dim() {
            let xj = x[j];
            if xj.re == 0.0 && xj.im == 0.0 {
                continue;
            }
            for (i, v) in self.mat.row_idx_of_col(j).zip(self.mat.val_of_col(j)) {
                y[i] += v * xj;
            }
        }
        y
    }

    pub fn max_abs(&self) -> f64 {
        let mut worst = 0.0f64;
        for j in 0..self.dim() {
            for v in self.mat.val_of_col(j) {
                worst = worst.max(v.norm());
            }
        }
        worst
    }

    /// Extracts the phonon-diagonal coordinates of a full density matrix.
    pub fn restrict(&self, rho: &Operator) -> Vec<C64> {
        let c = self.cutoffs;
        let mut x = vec![Complex::new(0.0, 0.0); self.dim()];
        for n1 in 0..c.photon_dim() {
            for n2 in 0..c.photon_dim() {
                for m in 0..c.phonon_dim() {
                    x[self.index(n1, n2, m)] = rho[(c.idx(n1, m), c.idx(n2, m))];
                }
            }
        }
        x
    }

    /// Embeds reduced coordinates back into a full (phonon-diagonal) matrix.
    pub fn unrestrict(&self, x: &[C64]) -> Operator {
        let c = self.cutoffs;
        let mut rho = Operator::zeros(c.dim(), c.dim());
        for n1 in 0..c.photon_dim() {
            for n2 in 0..c.photon_dim() {
                for m in 0..c.phonon_dim() {
                    rho[(c.idx(n1, m), c.idx(n2, m))] = x[self.index(n1, n2, m)];
                }
            }
        }
        rho
    }
}

/// Reduced generator for the transformed secular dynamics.
pub fn phonon_diagonal_generator(
    params: &SystemParams,
    cutoffs: FockCutoffs,
    order: ExpansionOrder,
) -> Result<ReducedGenerator> {
    Ok(ReducedGenerator::from_terms(
        cutoffs,
        &transformed_liouvillian_terms(params, cutoffs, order)?,
    ))
}

/// All three generators for one parameter point, for cross-checks.
pub struct GeneratorBundle {
    pub full: Superoperator,
    pub transformed: Superoperator,
    pub reduced: ReducedGenerator,
    pub params: SystemParams,
    pub cutoffs: FockCutoffs,
    pub order: ExpansionOrder,
}

impl GeneratorBundle {
    pub fn build(
        params: &SystemParams,
        cutoffs: FockCutoffs,
        order: ExpansionOrder,
    ) -> Result<Self> {
        let transformed_terms = transformed_liouvillian_terms(params, cutoffs, order)?;
        Ok(Self {
            full: full_liouvillian(params, cutoffs)?,
            transformed: Superoperator::from_terms(cutoffs, &transformed_terms),
            reduced: ReducedGenerator::from_terms(cutoffs, &transformed_terms),
            params: *params,
            cutoffs,
            order,
        })
    }
}
