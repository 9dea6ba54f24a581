//! Stationary states: sparse null-space solve with a trace constraint,
//! adaptive time propagation as an independent cross-check, and automatic
//! cutoff escalation.

use std::collections::HashMap;
use std::sync::{Mutex, OnceLock};
use std::time::{Duration, Instant};

use faer::linalg::solvers::Solve;
use faer::sparse::linalg::solvers::{Lu, SymbolicLu};
use faer::sparse::{SparseColMat, Triplet};
use num_complex::Complex;

use crate::error::{Error, Result};
use crate::liouvillian::{phonon_diagonal_generator, ReducedGenerator};
use crate::observables::{observables_from_distribution, Distribution};
use crate::operators::{C64, DensityMatrix, Operator, ONE};
use crate::params::{ExpansionOrder, FockCutoffs, SystemParams};
use crate::superop::Superoperator;

/// Solver tolerances. The residual bound is relative to the largest generator
/// entry; positivity is enforced through [`DensityMatrix::EIGENVALUE_FLOOR`].
#[derive(Debug, Clone, Copy)]
pub struct SolverOptions {
    pub residual_tol: f64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self { residual_tol: 1e-9 }
    }
}

/// Outcome of a steady-state solve.
#[derive(Debug, Clone)]
pub struct SolveReport {
    pub state: DensityMatrix,
    /// l2 norm of L vec(rho) evaluated with the original generator.
    pub residual: f64,
    pub min_eigenvalue: f64,
    pub cutoffs_used: FockCutoffs,
    pub wall_time: Duration,
}

fn l2_norm(v: &[C64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// FNV-1a over the sparsity structure; collisions are harmless because every
/// solution is validated against the original generator's residual.
fn pattern_fingerprint(mat: &SparseColMat<usize, C64>) -> (usize, usize, u64) {
    let sym = mat.symbolic();
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    let mut eat = |x: usize| {
        for b in x.to_le_bytes() {
            h ^= b as u64;
            h = h.wrapping_mul(0x1000_0000_01b3);
        }
    };
    for &p in sym.col_ptr() {
        eat(p);
    }
    for &r in sym.row_idx() {
        eat(r);
    }
    (mat.nrows(), mat.compute_nnz(), h)
}

fn cached_symbolic(mat: &SparseColMat<usize, C64>) -> Result<SymbolicLu<usize>> {
    static CACHE: OnceLock<Mutex<HashMap<(usize, usize, u64), SymbolicLu<usize>>>> =
        OnceLock::new();
    let key = pattern_fingerprint(mat);
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let mut guard = cache.lock().expect("symbolic cache poisoned");
    if let Some(sym) = guard.get(&key) {
        return Ok(sym.clone());
    }
    let sym = SymbolicLu::try_new(mat.symbolic())
        .map_err(|e| Error::Factorization(format!("symbolic analysis: {e:?}")))?;
    if guard.len() >= 64 {
        guard.clear();
    }
    guard.insert(key, sym.clone());
    Ok(sym)
}

/// Builds the row-replaced system: the generator with `replace_row` swapped
/// for the trace-constraint row, paired with the right-hand side index.
fn replaced_system(
    mat: &SparseColMat<usize, C64>,
    dim: usize,
    trace_positions: &[usize],
    replace_row: usize,
) -> SparseColMat<usize, C64> {
    let mut trips: Vec<Triplet<usize, usize, C64>> = Vec::new();
    for j in 0..dim {
        for (i, v) in mat.row_idx_of_col(j).zip(mat.val_of_col(j)) {
            if i != replace_row {
                trips.push(Triplet::new(i, j, *v));
            }
        }
    }
    for &p in trace_positions {
        trips.push(Triplet::new(replace_row, p, ONE));
    }
    SparseColMat::try_new_from_triplets(dim, dim, &trips).expect("replaced-system triplets")
}

fn solve_replaced(replaced: &SparseColMat<usize, C64>, rhs_row: usize) -> Result<Vec<C64>> {
    let dim = replaced.nrows();
    let sym = cached_symbolic(replaced)?;
    let lu = Lu::try_new_with_symbolic(sym, replaced.as_ref())
        .map_err(|e| Error::Factorization(format!("{e:?}")))?;
    let mut b = faer::Mat::<C64>::zeros(dim, 1);
    b[(rhs_row, 0)] = ONE;
    lu.solve_in_place(b.as_mut());
    let x: Vec<C64> = (0..dim).map(|i| b[(i, 0)]).collect();
    if x.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::Factorization(
            "solution contains non-finite entries".into(),
        ));
    }
    Ok(x)
}

/// Shared row-replacement driver. `apply` must evaluate the original
/// generator, `normalize` must map a raw kernel vector to its invariant-clean
/// form (Hermitized, unit trace) in the same coordinates.
fn kernel_vector(
    mat: &SparseColMat<usize, C64>,
    dim: usize,
    trace_positions: &[usize],
    apply: &dyn Fn(&[C64]) -> Vec<C64>,
    normalize: &dyn Fn(&[C64]) -> Result<Vec<C64>>,
    threshold: f64,
) -> Result<(Vec<C64>, f64)> {
    let n_probes = trace_positions.len().min(3);
    let mut valid: Vec<(Vec<C64>, f64)> = Vec::new();
    let mut best_failed: Option<f64> = None;
    let mut last_err: Option<Error> = None;

    for probe in 0..n_probes {
        let replace_row = trace_positions[probe];
        let replaced = replaced_system(mat, dim, trace_positions, replace_row);
        match solve_replaced(&replaced, replace_row) {
            Ok(x) => match normalize(&x) {
                Ok(clean) => {
                    let residual = l2_norm(&apply(&clean));
                    if residual <= threshold {
                        valid.push((clean, residual));
                    } else {
                        best_failed = Some(best_failed.map_or(residual, |b: f64| b.min(residual)));
                    }
                }
                Err(e) => last_err = Some(e),
            },
            Err(e) => last_err = Some(e),
        }
        // The generic case succeeds on the first probe; further probes exist
        // only to diagnose failures and detect kernel multiplicity.
        if probe == 0 && valid.len() == 1 {
            return Ok(valid.pop().unwrap());
        }
    }

    // Distinct valid solutions imply a degenerate kernel.
    if valid.len() >= 2 {
        let mut distinct = 1usize;
        let first = &valid[0].0;
        for (other, _) in valid.iter().skip(1) {
            let dist = first
                .iter()
                .zip(other.iter())
                .map(|(a, b)| (a - b).norm())
                .fold(0.0, f64::max);
            if dist > 1e-8 {
                distinct += 1;
            }
        }
        if distinct > 1 {
            return Err(Error::NonUniqueSteadyState {
                found: distinct,
                probes: n_probes,
            });
        }
    }
    if let Some((x, r)) = valid.into_iter().next() {
        return Ok((x, r));
    }
    if let Some(residual) = best_failed {
        return Err(Error::ResidualTooLarge {
            residual,
            tol: threshold,
        });
    }
    Err(last_err.unwrap_or_else(|| {
        Error::Factorization("all probe factorizations failed".into())
    }))
}

/// Steady state of a full superoperator via sparse LU with one row replaced
/// by the trace constraint. The result is Hermitized, renormalized, and
/// validated against the generator's residual and the positivity floor.
pub fn steady_state(
    l: &Superoperator,
    cutoffs: FockCutoffs,
    opts: &SolverOptions,
) -> Result<SolveReport> {
    assert_eq!(l.dim(), cutoffs.dim(), "cutoffs do not match generator");
    let start = Instant::now();
    let d = l.dim();
    let trace_positions: Vec<usize> = (0..d).map(|k| k * (d + 1)).collect();
    let threshold = opts.residual_tol * l.max_abs().max(f64::MIN_POSITIVE);

    let normalize = |x: &[C64]| -> Result<Vec<C64>> {
        let raw = DensityMatrix::matrix_from_vec(d, x);
        let herm = (&raw + raw.adjoint()).map(|z| z * Complex::new(0.5, 0.0));
        let tr = herm.trace();
        if tr.norm() < 1e-300 {
            return Err(Error::InvalidState("kernel vector has zero trace".into()));
        }
        Ok(herm.map(|z| z / tr).as_slice().to_vec())
    };
    let apply = |x: &[C64]| l.apply_vec(x);
    let (x, residual) = kernel_vector(
        l.matrix(),
        l.vec_dim(),
        &trace_positions,
        &apply,
        &normalize,
        threshold,
    )?;

    let mat = DensityMatrix::matrix_from_vec(d, &x);
    let min_eigenvalue = mat
        .clone()
        .symmetric_eigen()
        .eigenvalues
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min);
    let state = DensityMatrix::try_new_with_spectral_bound(mat, min_eigenvalue)?;
    Ok(SolveReport {
        state,
        residual,
        min_eigenvalue,
        cutoffs_used: cutoffs,
        wall_time: start.elapsed(),
    })
}

/// Steady state of the reduced phonon-diagonal generator. Positivity is
/// checked block by block over the phonon index, which is exact for
/// phonon-diagonal states and far cheaper than a full eigendecomposition.
pub fn steady_state_reduced(
    red: &ReducedGenerator,
    opts: &SolverOptions,
) -> Result<SolveReport> {
    let start = Instant::now();
    let cutoffs = red.cutoffs();
    let nd = cutoffs.photon_dim();
    let md = cutoffs.phonon_dim();
    let dim = red.dim();
    let mut trace_positions = Vec::with_capacity(nd * md);
    for n in 0..nd {
        for m in 0..md {
            trace_positions.push(red.index(n, n, m));
        }
    }
    let threshold = opts.residual_tol * red.max_abs().max(f64::MIN_POSITIVE);

    let normalize = |x: &[C64]| -> Result<Vec<C64>> {
        let mut clean = vec![Complex::new(0.0, 0.0); dim];
        for m in 0..md {
            for n1 in 0..nd {
                for n2 in 0..nd {
                    let v = x[red.index(n1, n2, m)];
                    let w = x[red.index(n2, n1, m)].conj();
                    clean[red.index(n1, n2, m)] = (v + w) * Complex::new(0.5, 0.0);
                }
            }
        }
        let tr: C64 = trace_positions.iter().map(|&p| clean[p]).sum();
        if tr.norm() < 1e-300 {
            return Err(Error::InvalidState("kernel vector has zero trace".into()));
        }
        for v in clean.iter_mut() {
            *v /= tr;
        }
        Ok(clean)
    };
    let apply = |x: &[C64]| red.apply_vec(x);
    let (x, residual) = kernel_vector(
        red.matrix(),
        dim,
        &trace_positions,
        &apply,
        &normalize,
        threshold,
    )?;

    // Spectrum of a phonon-diagonal state is the union of its photon blocks.
    let mut min_eigenvalue = f64::INFINITY;
    for m in 0..md {
        let block = Operator::from_fn(nd, nd, |n1, n2| x[red.index(n1, n2, m)]);
        let low = block
            .symmetric_eigen()
            .eigenvalues
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min);
        min_eigenvalue = min_eigenvalue.min(low);
    }
    let state = DensityMatrix::try_new_with_spectral_bound(red.unrestrict(&x), min_eigenvalue)?;
    Ok(SolveReport {
        state,
        residual,
        min_eigenvalue,
        cutoffs_used: cutoffs,
        wall_time: start.elapsed(),
    })
}

// Dormand-Prince 5(4) tableau. Stage times are not needed: the generator is
// autonomous.
const DP_A: [[f64; 6]; 7] = [
    [0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
    [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];
const DP_B5: [f64; 7] = [
    35.0 / 384.0,
    0.0,
    500.0 / 1113.0,
    125.0 / 192.0,
    -2187.0 / 6784.0,
    11.0 / 84.0,
    0.0,
];
const DP_B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

/// Budget on |tr rho(t) - 1| over a propagation run.
pub const TRACE_DRIFT_BUDGET: f64 = 1e-9;

/// Adaptive explicit integration of d vec(rho)/dt = L vec(rho) with the
/// Dormand-Prince 5(4) pair, up to `t_final`, with mixed error control at
/// relative tolerance `tol`.
pub fn propagate(
    l: &Superoperator,
    rho0: &DensityMatrix,
    t_final: f64,
    tol: f64,
) -> Result<DensityMatrix> {
    if !(t_final > 0.0) {
        return Err(Error::InvalidParams(format!(
            "t_final = {t_final} must be positive"
        )));
    }
    if !(tol > 0.0 && tol < 1.0) {
        return Err(Error::InvalidParams(format!(
            "tolerance = {tol} must lie in (0, 1)"
        )));
    }
    assert_eq!(rho0.dim(), l.dim(), "state does not match generator");

    let n = l.vec_dim();
    let atol = tol * 1e-3;
    let mut y = rho0.to_vec();
    let mut t = 0.0f64;
    let mut dt = (t_final * 1e-6).clamp(1e-6, 1e-1).min(t_final);
    let mut k: Vec<Vec<C64>> = vec![vec![Complex::new(0.0, 0.0); n]; 7];
    k[0] = l.apply_vec(&y); // FSAL

    while t < t_final {
        dt = dt.min(t_final - t);
        for s in 1..7 {
            let mut ys = y.clone();
            for (j, kj) in k.iter().enumerate().take(s) {
                let a = DP_A[s][j];
                if a != 0.0 {
                    let a = Complex::new(a * dt, 0.0);
                    for (yv, kv) in ys.iter_mut().zip(kj.iter()) {
                        *yv += a * kv;
                    }
                }
            }
            k[s] = l.apply_vec(&ys);
        }

        let mut y5 = y.clone();
        let mut err_sq = 0.0f64;
        for i in 0..n {
            let mut v5 = Complex::new(0.0, 0.0);
            let mut v4 = Complex::new(0.0, 0.0);
            for s in 0..7 {
                v5 += Complex::new(DP_B5[s], 0.0) * k[s][i];
                v4 += Complex::new(DP_B4[s], 0.0) * k[s][i];
            }
            let next = y[i] + Complex::new(dt, 0.0) * v5;
            let e = dt * (v5 - v4).norm();
            let scale = atol + tol * y[i].norm().max(next.norm());
            err_sq += (e / scale) * (e / scale);
            y5[i] = next;
        }
        let err = (err_sq / n as f64).sqrt();

        if err <= 1.0 {
            t += dt;
            y = y5;
            k[0] = k[6].clone(); // FSAL: stage 7 equals the next step's stage 1
        }
        let factor = if err > 0.0 {
            (0.9 * err.powf(-0.2)).clamp(0.2, 5.0)
        } else {
            5.0
        };
        dt *= factor;
        if dt < 1e-14 * t.max(1.0) {
            return Err(Error::StepUnderflow { t, dt });
        }
    }

    let mat = DensityMatrix::matrix_from_vec(l.dim(), &y);
    let drift = (mat.trace() - ONE).norm();
    if drift > TRACE_DRIFT_BUDGET {
        return Err(Error::TraceDrift {
            drift,
            budget: TRACE_DRIFT_BUDGET,
        });
    }
    DensityMatrix::from_approximate(mat, None)
}

/// Default number of escalation rounds in [`converge_cutoffs`].
pub const DEFAULT_MAX_ROUNDS: usize = 8;

/// Repeats reduced steady-state solves with growing cutoffs (n_max += 2,
/// m_max += 4 per round, favoring the phonon side where thermal and
/// multiphonon tails live) until the mean occupations and both second-order
/// correlations each change by less than `obs_tol` relative.
pub fn converge_cutoffs(
    params: &SystemParams,
    order: ExpansionOrder,
    start: FockCutoffs,
    obs_tol: f64,
    opts: &SolverOptions,
    max_rounds: usize,
) -> Result<SolveReport> {
    if !(obs_tol >= 0.0) {
        return Err(Error::InvalidParams(format!(
            "obs_tol = {obs_tol} must be non-negative"
        )));
    }
    let mut cutoffs = start;
    let mut prev: Option<[Option<f64>; 4]> = None;
    let mut drift_trace: Vec<String> = Vec::new();

    for _round in 0..=max_rounds {
        let red = phonon_diagonal_generator(params, cutoffs, order)?;
        let report = steady_state_reduced(&red, opts)?;
        let dist = Distribution::from_density(&report.state, cutoffs)?;
        let rec = observables_from_distribution(&dist, params.chi());
        let obs = [
            Some(rec.mean_photon),
            Some(rec.mean_phonon),
            rec.g2_a,
            rec.g2_b,
        ];
        if let Some(last) = prev {
            let mut worst = 0.0f64;
            let mut comparable = true;
            for (a, b) in last.iter().zip(obs.iter()) {
                match (a, b) {
                    (None, None) => {}
                    (Some(x), Some(y)) => {
                        worst = worst.max((x - y).abs() / y.abs().max(1e-12));
                    }
                    _ => comparable = false,
                }
            }
            drift_trace.push(format!("{cutoffs}: {worst:.3e}"));
            if comparable && worst < obs_tol {
                return Ok(report);
            }
        }
        prev = Some(obs);
        cutoffs = FockCutoffs::new(cutoffs.n_max + 2, cutoffs.m_max + 4);
    }
    Err(Error::CutoffEscalation {
        rounds: max_rounds,
        trace: drift_trace.join(", "),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::liouvillian::{full_liouvillian, transformed_liouvillian};
    use crate::observables::fixed_mirror_reference;
    use approx::assert_abs_diff_eq;

    fn thermal_params(nbar: f64) -> SystemParams {
        SystemParams::new(0.05, 0.0, 0.0, 2e-3, 2e-5, nbar).unwrap()
    }

    #[test]
    fn thermal_phonon_steady_state_is_geometric() {
        let p = thermal_params(1.0);
        let cutoffs = FockCutoffs::new(0, 30);
        let l = full_liouvillian(&p, cutoffs).unwrap();
        let report = steady_state(&l, cutoffs, &SolverOptions::default()).unwrap();
        assert!(report.residual < 1e-10);
        // p_m = (1/2)^(m+1) at nbar = 1.
        for m in 0..=12 {
            let got = report.state.matrix()[(cutoffs.idx(0, m), cutoffs.idx(0, m))].re;
            assert_abs_diff_eq!(got, 0.5f64.powi(m as i32 + 1), epsilon = 1e-9);
        }
        assert!(report.min_eigenvalue > -1e-12);
    }

    #[test]
    fn driven_cavity_matches_closed_form() {
        let p = SystemParams::new(0.05, 0.02, 0.0, 2e-3, 2e-5, 0.0).unwrap();
        let cutoffs = FockCutoffs::new(12, 0);
        let l = full_liouvillian(&p, cutoffs).unwrap();
        let report = steady_state(&l, cutoffs, &SolverOptions::default()).unwrap();
        let (expected, _) = fixed_mirror_reference(&p);
        let mut mean = 0.0;
        for n in 0..=cutoffs.n_max {
            mean += n as f64 * report.state.matrix()[(cutoffs.idx(n, 0), cutoffs.idx(n, 0))].re;
        }
        assert_abs_diff_eq!(mean, expected, epsilon = 1e-8 * expected);
    }

    #[test]
    fn zero_generator_has_no_unique_steady_state() {
        let cutoffs = FockCutoffs::new(1, 1);
        let l = Superoperator::zero(cutoffs.dim());
        let err = steady_state(&l, cutoffs, &SolverOptions::default()).unwrap_err();
        assert!(
            matches!(
                err,
                Error::NonUniqueSteadyState { .. } | Error::Factorization(_)
            ),
            "unexpected error: {err}"
        );
    }

    #[test]
    fn propagation_reaches_thermal_state() {
        let p = thermal_params(1.0);
        let cutoffs = FockCutoffs::new(0, 14);
        let l = full_liouvillian(&p, cutoffs).unwrap();
        let rho0 = DensityMatrix::vacuum(cutoffs.dim());
        let rho = propagate(&l, &rho0, 20.0 / p.kappa_b, 1e-9).unwrap();
        for m in 0..=6 {
            let got = rho.matrix()[(cutoffs.idx(0, m), cutoffs.idx(0, m))].re;
            assert_abs_diff_eq!(got, 0.5f64.powi(m as i32 + 1), epsilon = 1e-6);
        }
    }

    #[test]
    fn propagation_under_zero_generator_is_identity() {
        let cutoffs = FockCutoffs::new(1, 2);
        let l = Superoperator::zero(cutoffs.dim());
        // Weights sum to one exactly in binary, so renormalization is a no-op.
        let rho0 = DensityMatrix::from_diagonal(&[0.5, 0.25, 0.125, 0.125, 0.0, 0.0]).unwrap();
        let rho = propagate(&l, &rho0, 5.0, 1e-9).unwrap();
        assert_eq!(rho.matrix(), rho0.matrix());
    }

    #[test]
    fn propagation_contracts_toward_steady_state() {
        let p = thermal_params(0.5);
        let cutoffs = FockCutoffs::new(0, 10);
        let l = full_liouvillian(&p, cutoffs).unwrap();
        let report = steady_state(&l, cutoffs, &SolverOptions::default()).unwrap();
        let rho0 = DensityMatrix::vacuum(cutoffs.dim());
        let d0 = crate::operators::max_abs(&(rho0.matrix() - report.state.matrix()));
        let t1 = 2.0 / p.kappa_b;
        let r1 = propagate(&l, &rho0, t1, 1e-9).unwrap();
        let d1 = crate::operators::max_abs(&(r1.matrix() - report.state.matrix()));
        let r2 = propagate(&l, &rho0, 2.0 * t1, 1e-9).unwrap();
        let d2 = crate::operators::max_abs(&(r2.matrix() - report.state.matrix()));
        assert!(d1 < d0 && d2 <= d1 + 1e-12, "d0={d0:.3e} d1={d1:.3e} d2={d2:.3e}");
    }

    #[test]
    fn propagate_rejects_bad_arguments() {
        let cutoffs = FockCutoffs::new(0, 2);
        let l = Superoperator::zero(cutoffs.dim());
        let rho0 = DensityMatrix::vacuum(cutoffs.dim());
        assert!(propagate(&l, &rho0, 0.0, 1e-9).is_err());
        assert!(propagate(&l, &rho0, 1.0, 0.0).is_err());
    }

    #[test]
    fn cutoff_escalation_converges_immediately_without_drive() {
        let p = thermal_params(1.0);
        let report = converge_cutoffs(
            &p,
            ExpansionOrder(1),
            FockCutoffs::new(1, 24),
            1e-3,
            &SolverOptions::default(),
            DEFAULT_MAX_ROUNDS,
        )
        .unwrap();
        assert_eq!(report.cutoffs_used, FockCutoffs::new(3, 28));
    }

    #[test]
    fn zero_tolerance_escalation_fails() {
        let p = thermal_params(1.0);
        let err = converge_cutoffs(
            &p,
            ExpansionOrder(1),
            FockCutoffs::new(0, 4),
            0.0,
            &SolverOptions::default(),
            3,
        )
        .unwrap_err();
        assert!(matches!(err, Error::CutoffEscalation { .. }), "{err}");
    }

    #[test]
    fn reduced_and_full_transformed_solves_agree() {
        let p = SystemParams::new(0.03, 0.02, 0.1, 2e-3, 2e-5, 1.0).unwrap();
        let cutoffs = FockCutoffs::new(4, 8);
        let order = ExpansionOrder(1);
        let l = transformed_liouvillian(&p, cutoffs, order).unwrap();
        let full = steady_state(&l, cutoffs, &SolverOptions::default()).unwrap();
        let red = phonon_diagonal_generator(&p, cutoffs, order).unwrap();
        let reduced = steady_state_reduced(&red, &SolverOptions::default()).unwrap();
        let diff = crate::operators::max_abs(&(full.state.matrix() - reduced.state.matrix()));
        assert!(diff < 1e-9, "solutions differ by {diff:.3e}");
    }
}
