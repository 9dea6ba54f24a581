//! Secular multiphonon expansion of the transformed master equation.
//!
//! Two series are generated here. The drive exponent series is the
//! time-independent part of exp(+-chi (b - b^dag)) entering the Hamiltonian:
//! identical for both signs, diagonal in phonon number. The damping series
//! enumerates the sandwich terms
//!
//!   b^r1 (b^dag)^(k1-r1)  a rho a^dag  b^r2 (b^dag)^(k2-r2)
//!
//! surviving the selection rule k1 - 2 r1 + k2 - 2 r2 = 0, with k_i matching
//! the parity of n_i and the coefficient fixed by the bosonic operator
//! identity for (b - b^dag)^n. Term lists are cached per order and scaled by
//! powers of chi at assembly time.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use num_complex::Complex;

use crate::error::Result;
use crate::operators::{annihilation, creation, identity, phonon_word, Operator};
use crate::params::{ExpansionOrder, FockCutoffs};
use crate::superop::{KronTerm, Superoperator};

/// One phonon operator word b^lowers (b^dag)^raises; creation acts first.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OperatorWord {
    pub lowers: u32,
    pub raises: u32,
}

impl OperatorWord {
    /// Net phonon-number shift produced by the word (raises - lowers).
    pub fn net_shift(&self) -> i64 {
        self.raises as i64 - self.lowers as i64
    }

    pub fn materialize(&self, dim: usize) -> Result<Operator> {
        phonon_word(self.lowers as usize, self.raises as usize, dim)
    }
}

/// One enumerated damping term. `base_coeff` is the coefficient at chi = 1;
/// the physical coefficient is `base_coeff * chi^order`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TermDescriptor {
    pub n1: u32,
    pub n2: u32,
    pub k1: u32,
    pub k2: u32,
    pub r1: u32,
    pub r2: u32,
    pub base_coeff: f64,
}

impl TermDescriptor {
    /// Total power of chi carried by the term.
    pub fn order(&self) -> u32 {
        self.n1 + self.n2
    }

    pub fn coeff(&self, chi: f64) -> f64 {
        self.base_coeff * chi.powi(self.order() as i32)
    }

    /// Word multiplying the sandwich from the left.
    pub fn left_word(&self) -> OperatorWord {
        OperatorWord {
            lowers: self.r1,
            raises: self.k1 - self.r1,
        }
    }

    /// Word multiplying the sandwich from the right.
    pub fn right_word(&self) -> OperatorWord {
        OperatorWord {
            lowers: self.r2,
            raises: self.k2 - self.r2,
        }
    }
}

fn factorial(n: u32) -> f64 {
    (1..=n as u64).map(|k| k as f64).product()
}

fn binomial(n: u32, k: u32) -> f64 {
    factorial(n) / (factorial(k) * factorial(n - k))
}

/// Weight of the k-word inside (A + B)^n for [A, B] = C central:
/// n! / (k! ((n-k)/2)!) * (-C/2)^((n-k)/2), divided by the n! of the
/// exponential series. Requires k <= n with matching parity.
fn pairing_weight(n: u32, k: u32) -> f64 {
    let p = (n - k) / 2;
    0.5f64.powi(p as i32) / (factorial(k) * factorial(p))
}

fn enumerate_uncached(order: ExpansionOrder) -> Vec<TermDescriptor> {
    let max_power = order.max_chi_power();
    let mut out = Vec::new();
    for n1 in 0..=max_power {
        for n2 in 0..=max_power.saturating_sub(n1) {
            for k1 in (n1 % 2..=n1).step_by(2) {
                for k2 in (n2 % 2..=n2).step_by(2) {
                    for r1 in 0..=k1 {
                        for r2 in 0..=k2 {
                            // Selection rule: net mechanical phase must vanish.
                            if (k1 as i64 - 2 * r1 as i64) + (k2 as i64 - 2 * r2 as i64) != 0 {
                                continue;
                            }
                            let sign = if (n1 + r1 + r2) % 2 == 0 { 1.0 } else { -1.0 };
                            let base_coeff = sign
                                * pairing_weight(n1, k1)
                                * pairing_weight(n2, k2)
                                * binomial(k1, r1)
                                * binomial(k2, r2);
                            out.push(TermDescriptor {
                                n1,
                                n2,
                                k1,
                                k2,
                                r1,
                                r2,
                                base_coeff,
                            });
                        }
                    }
                }
            }
        }
    }
    out
}

/// Complete enumeration of the secular damping terms with total chi power up
/// to 2N, in lexicographic (n1, n2, k1, k2, r1, r2) order. Results are cached
/// per order.
pub fn enumerate_damping_terms(order: ExpansionOrder) -> Arc<Vec<TermDescriptor>> {
    static CACHE: OnceLock<Mutex<HashMap<u32, Arc<Vec<TermDescriptor>>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let mut guard = cache.lock().expect("term cache poisoned");
    guard
        .entry(order.0)
        .or_insert_with(|| Arc::new(enumerate_uncached(order)))
        .clone()
}

/// Secular part of exp(+-chi (b - b^dag)) on the phonon space, truncated at
/// chi^(2N):
///
///   sum_{n<=N} sum_{m<=n} (-1)^m chi^(2n) / ((m!)^2 (n-m)!) b^m b^dag^m / 2^(n-m).
///
/// Diagonal in phonon number and identical for both exponent signs.
pub fn secular_exponent_operator(chi: f64, order: ExpansionOrder, m_max: usize) -> Result<Operator> {
    let dim = m_max + 1;
    let b = annihilation(dim)?;
    let bd = creation(dim)?;
    let mut word = identity(dim); // b^m b^dag^m, built incrementally
    let mut op = Operator::zeros(dim, dim);
    for m in 0..=order.0 {
        if m > 0 {
            word = &b * word * &bd;
        }
        for n in m..=order.0 {
            let c = if (m % 2) == 0 { 1.0 } else { -1.0 }
                * chi.powi(2 * n as i32)
                / (factorial(m) * factorial(m) * factorial(n - m))
                / 2f64.powi((n - m) as i32);
            op += word.map(|z| z * Complex::new(c, 0.0));
        }
    }
    Ok(op)
}

/// The damping sandwich terms as [`KronTerm`]s (photon factors a and a^dag
/// included, overall rate not included).
pub fn secular_damping_kron_terms(
    chi: f64,
    order: ExpansionOrder,
    cutoffs: FockCutoffs,
) -> Result<Vec<KronTerm>> {
    let md = cutoffs.phonon_dim();
    let a = annihilation(cutoffs.photon_dim())?;
    let ad = a.adjoint();
    let descriptors = enumerate_damping_terms(order);
    let mut out = Vec::with_capacity(descriptors.len());
    for t in descriptors.iter() {
        out.push(KronTerm::new(
            Complex::new(t.coeff(chi), 0.0),
            a.clone(),
            t.left_word().materialize(md)?,
            ad.clone(),
            t.right_word().materialize(md)?,
        ));
    }
    Ok(out)
}

/// Phonon-space operator sum_terms coeff * W2 W1. In the untruncated algebra
/// this collapses to the identity order by order; on a truncated ladder it
/// deviates only within 2N levels of the cutoff. Pairing the anticommutator
/// part of the photon dissipator with this operator instead of the bare
/// identity keeps the assembled dissipator exactly trace-free at any cutoff.
pub fn secular_damping_closure(chi: f64, order: ExpansionOrder, m_max: usize) -> Result<Operator> {
    let dim = m_max + 1;
    let mut op = Operator::zeros(dim, dim);
    for t in enumerate_damping_terms(order).iter() {
        let w1 = t.left_word().materialize(dim)?;
        let w2 = t.right_word().materialize(dim)?;
        op += (w2 * w1).map(|z| z * Complex::new(t.coeff(chi), 0.0));
    }
    Ok(op)
}

/// Secular part of exp(chi(b-b^dag)) a rho a^dag exp(-chi(b-b^dag)) to order
/// chi^(2N), as a superoperator.
pub fn secular_damping_superop(
    chi: f64,
    order: ExpansionOrder,
    cutoffs: FockCutoffs,
) -> Result<Superoperator> {
    Ok(Superoperator::from_terms(
        cutoffs,
        &secular_damping_kron_terms(chi, order, cutoffs)?,
    ))
}

/// Literal transcription of the damping sandwich expanded to chi^4, kept term
/// by term as printed; serves as the golden reference for the generated N = 2
/// series.
pub fn chi4_reference_kron_terms(chi: f64, cutoffs: FockCutoffs) -> Result<Vec<KronTerm>> {
    let md = cutoffs.phonon_dim();
    let a = annihilation(cutoffs.photon_dim())?;
    let ad = a.adjoint();
    let b = annihilation(md)?;
    let bd = creation(md)?;
    let id = identity(md);

    let c2 = chi * chi;
    let c4 = c2 * c2;
    let re = |x: f64| Complex::new(x, 0.0);

    let bbd = &b * &bd;
    let b2bd2 = &b * &b * &bd * &bd;
    // chi^2/2 (1 - 2 b b^dag) + chi^4/24 (6 b^2 b^dag^2 - 12 b b^dag + 3)
    let sym = id.map(|z| z * re(c2 / 2.0 + c4 / 8.0))
        + bbd.map(|z| z * re(-c2 - c4 / 2.0))
        + b2bd2.map(|z| z * re(c4 / 4.0));
    let one_minus_2bbd = &id - bbd.map(|z| z * re(2.0));

    let sandwich = |coeff: f64, w1: Operator, w2: Operator| {
        KronTerm::new(re(coeff), a.clone(), w1, ad.clone(), w2)
    };

    Ok(vec![
        // a rho a^dag
        sandwich(1.0, id.clone(), id.clone()),
        // a rho a^dag {sym} + H.c.
        sandwich(1.0, id.clone(), sym.clone()),
        sandwich(1.0, sym.adjoint(), id.clone()),
        // chi^2 (1 + chi^2) (b a rho a^dag b^dag + b^dag a rho a^dag b)
        sandwich(c2 * (1.0 + c2), b.clone(), bd.clone()),
        sandwich(c2 * (1.0 + c2), bd.clone(), b.clone()),
        // -chi^4/2 (b a rho a^dag b b^dag^2 + b^dag a rho a^dag b^2 b^dag + H.c.);
        // the conjugates reverse and dagger the words: (b b^dag^2)^dag = b^2 b^dag.
        sandwich(-c4 / 2.0, b.clone(), &b * &bd * &bd),
        sandwich(-c4 / 2.0, bd.clone(), &b * &b * &bd),
        sandwich(-c4 / 2.0, &b * &b * &bd, bd.clone()),
        sandwich(-c4 / 2.0, &b * &bd * &bd, b.clone()),
        // chi^4/4 (b^2 .. b^dag^2 + (1-2bb^dag) .. (1-2bb^dag) + b^dag^2 .. b^2)
        sandwich(c4 / 4.0, &b * &b, &bd * &bd),
        sandwich(c4 / 4.0, one_minus_2bbd.clone(), one_minus_2bbd.clone()),
        sandwich(c4 / 4.0, &bd * &bd, &b * &b),
    ])
}

/// Superoperator form of [`chi4_reference_kron_terms`].
pub fn chi4_reference_superop(chi: f64, cutoffs: FockCutoffs) -> Result<Superoperator> {
    Ok(Superoperator::from_terms(
        cutoffs,
        &chi4_reference_kron_terms(chi, cutoffs)?,
    ))
}

/// Number of damping terms at each chi power, for reporting.
pub fn term_count_per_order(order: ExpansionOrder) -> Vec<(u32, usize)> {
    let terms = enumerate_damping_terms(order);
    let mut counts: Vec<(u32, usize)> = Vec::new();
    for power in (0..=order.max_chi_power()).step_by(2) {
        let c = terms.iter().filter(|t| t.order() == power).count();
        counts.push((power, c));
    }
    counts
}

/// Convenience: the Hermitian conjugate closure of the Eq.-style dissipator,
/// (kappa/2) [2 S_N(rho) - M rho - rho M] with M = a^dag a kron closure.
/// Exposed for tests; production assembly lives in the liouvillian module.
pub fn secular_photon_dissipator_terms(
    chi: f64,
    order: ExpansionOrder,
    kappa_a: f64,
    cutoffs: FockCutoffs,
) -> Result<Vec<KronTerm>> {
    let mut terms = Vec::new();
    let rate = Complex::new(kappa_a, 0.0);
    for mut t in secular_damping_kron_terms(chi, order, cutoffs)? {
        t.coeff *= rate;
        terms.push(t);
    }
    let n_phot = creation(cutoffs.photon_dim())? * annihilation(cutoffs.photon_dim())?;
    let closure = secular_damping_closure(chi, order, cutoffs.m_max)?;
    let half = Complex::new(-kappa_a / 2.0, 0.0);
    terms.push(KronTerm::left(half, n_phot.clone(), closure.clone(), cutoffs));
    terms.push(KronTerm::right(half, n_phot, closure, cutoffs));
    Ok(terms)
}
