//! The joint photon-phonon distribution and every observable built from it:
//! mean occupations, normalized correlation functions of second and higher
//! order, the fixed-mirror closed forms, and the steady-state photon-phonon
//! consistency relation.

use crate::error::{Error, Result};
use crate::operators::DensityMatrix;
use crate::params::{FockCutoffs, SystemParams};

/// Joint diagonal occupations P[n][m] in the transformed frame, normalized to
/// exactly one.
#[derive(Debug, Clone)]
pub struct Distribution {
    p: Vec<f64>,
    cutoffs: FockCutoffs,
}

/// Entries below -DEFAULT_FLOOR indicate a positivity violation upstream.
pub const DEFAULT_FLOOR: f64 = 1e-10;

impl Distribution {
    /// Extracts the diagonal of a density matrix and renormalizes.
    pub fn from_density(rho: &DensityMatrix, cutoffs: FockCutoffs) -> Result<Self> {
        Self::from_density_with_floor(rho, cutoffs, DEFAULT_FLOOR)
    }

    pub fn from_density_with_floor(
        rho: &DensityMatrix,
        cutoffs: FockCutoffs,
        floor: f64,
    ) -> Result<Self> {
        if rho.dim() != cutoffs.dim() {
            return Err(Error::DimensionMismatch(format!(
                "state dim {} does not match cutoffs {cutoffs}",
                rho.dim()
            )));
        }
        let mut p = vec![0.0f64; cutoffs.dim()];
        for n in 0..=cutoffs.n_max {
            for m in 0..=cutoffs.m_max {
                let i = cutoffs.idx(n, m);
                let v = rho.matrix()[(i, i)].re;
                if v < -floor {
                    return Err(Error::NegativeOccupation {
                        n,
                        m,
                        value: v,
                        floor,
                    });
                }
                p[i] = v;
            }
        }
        let total: f64 = p.iter().sum();
        if !(total > 0.0) {
            return Err(Error::InvalidState(
                "distribution has non-positive total weight".into(),
            ));
        }
        for v in p.iter_mut() {
            *v /= total;
        }
        Ok(Self { p, cutoffs })
    }

    /// Builds a distribution from an explicit table (outer index photon).
    pub fn from_table(table: &[Vec<f64>], cutoffs: FockCutoffs) -> Result<Self> {
        if table.len() != cutoffs.photon_dim()
            || table.iter().any(|row| row.len() != cutoffs.phonon_dim())
        {
            return Err(Error::DimensionMismatch(
                "table shape does not match cutoffs".into(),
            ));
        }
        let mut p = vec![0.0f64; cutoffs.dim()];
        for (n, row) in table.iter().enumerate() {
            for (m, v) in row.iter().enumerate() {
                if *v < -DEFAULT_FLOOR {
                    return Err(Error::NegativeOccupation {
                        n,
                        m,
                        value: *v,
                        floor: DEFAULT_FLOOR,
                    });
                }
                p[cutoffs.idx(n, m)] = *v;
            }
        }
        let total: f64 = p.iter().sum();
        if !(total > 0.0) {
            return Err(Error::InvalidState(
                "distribution has non-positive total weight".into(),
            ));
        }
        for v in p.iter_mut() {
            *v /= total;
        }
        Ok(Self { p, cutoffs })
    }

    pub fn cutoffs(&self) -> FockCutoffs {
        self.cutoffs
    }

    pub fn get(&self, n: usize, m: usize) -> f64 {
        self.p[self.cutoffs.idx(n, m)]
    }

    pub fn total(&self) -> f64 {
        self.p.iter().sum()
    }

    /// Sum of f(n, m) P[n][m] over the table.
    pub fn expect(&self, f: impl Fn(usize, usize) -> f64) -> f64 {
        let mut acc = 0.0;
        for n in 0..=self.cutoffs.n_max {
            for m in 0..=self.cutoffs.m_max {
                acc += f(n, m) * self.p[self.cutoffs.idx(n, m)];
            }
        }
        acc
    }

    /// Per-axis marginal over the photon index.
    pub fn photon_marginal(&self) -> Vec<f64> {
        (0..=self.cutoffs.n_max)
            .map(|n| (0..=self.cutoffs.m_max).map(|m| self.get(n, m)).sum())
            .collect()
    }

    /// L1 distance between two distributions on identical cutoffs.
    pub fn l1_distance(&self, other: &Distribution) -> Result<f64> {
        if self.cutoffs != other.cutoffs {
            return Err(Error::DimensionMismatch(
                "distributions live on different cutoffs".into(),
            ));
        }
        Ok(self
            .p
            .iter()
            .zip(other.p.iter())
            .map(|(a, b)| (a - b).abs())
            .sum())
    }
}

/// Means are undefined markers below this weight.
const MEAN_FLOOR: f64 = 1e-12;

/// All scalar observables of one steady state. Correlation functions are
/// `None` when the corresponding mean vanishes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ObservablesRecord {
    pub mean_photon: f64,
    pub mean_phonon: f64,
    pub g2_a: Option<f64>,
    pub g2_b: Option<f64>,
    pub g3_b: Option<f64>,
    pub g4_b: Option<f64>,
    pub appendix_b_residual: Option<f64>,
}

fn falling(m: usize, k: u32) -> f64 {
    let mut acc = 1.0;
    for j in 0..k as usize {
        if m < j + 1 {
            return 0.0;
        }
        acc *= (m - j) as f64;
    }
    acc
}

fn binom(n: u32, k: u32) -> f64 {
    let mut acc = 1.0;
    for j in 0..k {
        acc = acc * (n - j) as f64 / (j + 1) as f64;
    }
    acc
}

/// Laboratory-frame factorial moment <b^dag^k b^k> evaluated on the
/// phonon-diagonal distribution of the transformed frame.
///
/// With b = b_bar - chi a^dag a and the photon number commuting with the
/// mechanical mode, the binomial expansion collapses on phonon-diagonal
/// states to the balanced terms only:
///
///   <b^dag^k b^k> = sum_i C(k,i)^2 chi^(2(k-i)) < (a^dag a)^(2(k-i)) m_(i) >,
///
/// where m_(i) is the falling factorial. For chi = 0 this is the bare
/// factorial moment; for k = 1 and k = 2 it reproduces the explicit
/// mean-phonon and phonon-correlation formulas.
pub fn phonon_factorial_moment(p: &Distribution, chi: f64, k: u32) -> f64 {
    let mut acc = 0.0;
    for i in 0..=k {
        let weight = binom(k, i).powi(2) * chi.powi(2 * (k - i) as i32);
        if weight == 0.0 {
            continue;
        }
        acc += weight
            * p.expect(|n, m| (n as f64).powi(2 * (k - i) as i32) * falling(m, i));
    }
    acc
}

/// Every observable of the record except the consistency residual, which
/// needs the system rates (see [`appendix_b_residual`]).
pub fn observables_from_distribution(p: &Distribution, chi: f64) -> ObservablesRecord {
    let mean_photon = p.expect(|n, _| n as f64);
    // <b^dag b> = sum (m + chi^2 n^2) P_nm.
    let mean_phonon = p.expect(|n, m| m as f64 + chi * chi * (n as f64) * (n as f64));

    let g2_a = if mean_photon > MEAN_FLOOR {
        Some(p.expect(|n, _| falling(n, 2)) / (mean_photon * mean_photon))
    } else {
        None
    };
    // <b^dag^2 b^2> = sum (m(m-1) + 4 chi^2 m n^2 + chi^4 n^4) P_nm.
    let g2_b = if mean_phonon > MEAN_FLOOR {
        let c2 = chi * chi;
        let num = p.expect(|n, m| {
            let nf = n as f64;
            falling(m, 2) + 4.0 * c2 * m as f64 * nf * nf + c2 * c2 * nf.powi(4)
        });
        Some(num / (mean_phonon * mean_phonon))
    } else {
        None
    };
    let higher = |k: u32| {
        if mean_phonon > MEAN_FLOOR {
            Some(phonon_factorial_moment(p, chi, k) / mean_phonon.powi(k as i32))
        } else {
            None
        }
    };

    ObservablesRecord {
        mean_photon,
        mean_phonon,
        g2_a,
        g2_b,
        g3_b: higher(3),
        g4_b: higher(4),
        appendix_b_residual: None,
    }
}

/// Closed-form cavity observables for a fixed mirror (g = 0):
/// <a^dag a> = eps^2 / (delta^2 + (kappa_a/2)^2) and g2_a = 1
/// (undefined without drive).
pub fn fixed_mirror_reference(params: &SystemParams) -> (f64, Option<f64>) {
    let mean = params.epsilon * params.epsilon
        / (params.delta * params.delta + (params.kappa_a / 2.0) * (params.kappa_a / 2.0));
    let g2 = if params.epsilon > 0.0 { Some(1.0) } else { None };
    (mean, g2)
}

/// Consistency relation of the chi^2 steady state:
/// |<b^dag b> - (nbar + chi^2 (kappa_a/kappa_b) <a^dag a> + chi^2 <a^dag^2 a^2>)|.
pub fn appendix_b_residual(p: &Distribution, params: &SystemParams) -> f64 {
    let chi = params.chi();
    let lhs = p.expect(|n, m| m as f64 + chi * chi * (n as f64) * (n as f64));
    let mean_photon = p.expect(|n, _| n as f64);
    let photon_pair = p.expect(|n, _| falling(n, 2));
    let rhs = params.nbar
        + chi * chi * (params.kappa_a / params.kappa_b) * mean_photon
        + chi * chi * photon_pair;
    (lhs - rhs).abs()
}

/// Fills in the consistency residual next to the plain observables.
pub fn full_record(p: &Distribution, params: &SystemParams) -> ObservablesRecord {
    let mut rec = observables_from_distribution(p, params.chi());
    rec.appendix_b_residual = Some(appendix_b_residual(p, params));
    rec
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn thermal_table(nbar: f64, cutoffs: FockCutoffs) -> Distribution {
        let q = nbar / (1.0 + nbar);
        let table: Vec<Vec<f64>> = (0..=cutoffs.n_max)
            .map(|n| {
                (0..=cutoffs.m_max)
                    .map(|m| if n == 0 { q.powi(m as i32) } else { 0.0 })
                    .collect()
            })
            .collect();
        Distribution::from_table(&table, cutoffs).unwrap()
    }

    #[test]
    fn vacuum_distribution() {
        let cutoffs = FockCutoffs::new(2, 3);
        let rho = DensityMatrix::vacuum(cutoffs.dim());
        let p = Distribution::from_density(&rho, cutoffs).unwrap();
        assert_eq!(p.get(0, 0), 1.0);
        assert_abs_diff_eq!(p.total(), 1.0, epsilon = 1e-15);
        let rec = observables_from_distribution(&p, 0.3);
        assert_eq!(rec.mean_photon, 0.0);
        assert_eq!(rec.mean_phonon, 0.0);
        assert_eq!(rec.g2_a, None);
        assert_eq!(rec.g2_b, None);
        assert_eq!(rec.g3_b, None);
        assert_eq!(rec.g4_b, None);
    }

    #[test]
    fn thermal_distribution_is_geometric() {
        let cutoffs = FockCutoffs::new(0, 40);
        let weights: Vec<f64> = (0..=40).map(|m| 0.5f64.powi(m + 1)).collect();
        let rho = DensityMatrix::from_diagonal(&weights).unwrap();
        let p = Distribution::from_density(&rho, cutoffs).unwrap();
        for m in 0..=10 {
            assert_abs_diff_eq!(p.get(0, m), 0.5f64.powi(m as i32 + 1), epsilon = 1e-12);
        }
    }

    #[test]
    fn diagonal_extraction_matches_diagonal() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let cutoffs = FockCutoffs::new(2, 2);
        let weights: Vec<f64> = (0..cutoffs.dim()).map(|_| rng.random_range(0.0..1.0)).collect();
        let rho = DensityMatrix::from_diagonal(&weights).unwrap();
        let p = Distribution::from_density(&rho, cutoffs).unwrap();
        let total: f64 = weights.iter().sum();
        for n in 0..=2 {
            for m in 0..=2 {
                assert_abs_diff_eq!(
                    p.get(n, m),
                    weights[cutoffs.idx(n, m)] / total,
                    epsilon = 1e-14
                );
            }
        }
    }

    #[test]
    fn thermal_moments_at_zero_coupling() {
        let p = thermal_table(1.0, FockCutoffs::new(0, 120));
        let rec = observables_from_distribution(&p, 0.0);
        assert_abs_diff_eq!(rec.mean_phonon, 1.0, epsilon = 1e-9);
        assert_abs_diff_eq!(rec.g2_b.unwrap(), 2.0, epsilon = 1e-7);
        assert_abs_diff_eq!(rec.g3_b.unwrap(), 6.0, epsilon = 1e-6);
        assert_abs_diff_eq!(rec.g4_b.unwrap(), 24.0, epsilon = 1e-5);
    }

    #[test]
    fn explicit_g2_matches_moment_machinery() {
        // The printed second-order formula equals the general frame-corrected
        // factorial moment on any phonon-diagonal distribution.
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        for _ in 0..10 {
            let cutoffs = FockCutoffs::new(4, 7);
            let table: Vec<Vec<f64>> = (0..=4)
                .map(|_| (0..=7).map(|_| rng.random_range(0.0..1.0)).collect())
                .collect();
            let p = Distribution::from_table(&table, cutoffs).unwrap();
            let chi: f64 = rng.random_range(0.0..0.3);
            let rec = observables_from_distribution(&p, chi);
            let m2 = phonon_factorial_moment(&p, chi, 2);
            let expect = m2 / rec.mean_phonon.powi(2);
            assert_abs_diff_eq!(rec.g2_b.unwrap(), expect, epsilon = 1e-12);
        }
    }

    #[test]
    fn frame_machinery_reduces_to_bare_moments_at_zero_coupling() {
        let p = thermal_table(0.7, FockCutoffs::new(0, 150));
        for k in 1..=4u32 {
            let bare = p.expect(|_, m| falling(m, k));
            assert_abs_diff_eq!(
                phonon_factorial_moment(&p, 0.0, k),
                bare,
                epsilon = 1e-12
            );
        }
    }

    #[test]
    fn fixed_mirror_values() {
        let p = SystemParams::new(0.05, 0.02, 0.0, 2e-3, 2e-5, 0.0).unwrap();
        let (mean, g2) = fixed_mirror_reference(&p);
        // eps^2 / (delta^2 + (kappa_a/2)^2) = 400/2501.
        assert_abs_diff_eq!(mean, 400.0 / 2501.0, epsilon = 1e-15);
        assert_abs_diff_eq!(mean, 0.15994, epsilon = 5e-6);
        assert_eq!(g2, Some(1.0));

        let on_res = SystemParams::new(0.0, 0.02, 0.0, 2e-3, 2e-5, 0.0).unwrap();
        let (mean0, _) = fixed_mirror_reference(&on_res);
        assert_abs_diff_eq!(mean0, 400.0, epsilon = 1e-9);

        let undriven = SystemParams::new(0.05, 0.0, 0.0, 2e-3, 2e-5, 0.0).unwrap();
        let (mean_u, g2_u) = fixed_mirror_reference(&undriven);
        assert_eq!(mean_u, 0.0);
        assert_eq!(g2_u, None);
    }

    #[test]
    fn appendix_residual_without_photons() {
        let params = SystemParams::new(0.05, 0.0, 0.1, 2e-3, 2e-5, 1.0).unwrap();
        let p = thermal_table(1.0, FockCutoffs::new(0, 200));
        // No photons: residual reduces to |<m> - nbar|, which is pure
        // truncation error of the geometric tail.
        assert!(appendix_b_residual(&p, &params) < 1e-8);
    }

    #[test]
    fn negative_occupation_rejected() {
        let cutoffs = FockCutoffs::new(1, 1);
        let table = vec![vec![0.7, 0.4], vec![-1e-6, 0.0]];
        let err = Distribution::from_table(&table, cutoffs).unwrap_err();
        assert!(matches!(err, Error::NegativeOccupation { n: 1, m: 0, .. }));
    }
}
