//! The cross-check suite behind the CLI `verify` subcommand: golden-series
//! comparison, analytic limits, structural invariants and the frame
//! equivalence between the transformed model and the untransformed oracle.

use crate::error::Result;
use crate::liouvillian::{full_liouvillian, phonon_diagonal_generator, GeneratorBundle};
use crate::observables::{observables_from_distribution, Distribution};
use crate::operators::{max_abs, polaron_unitary};
use crate::params::{ExpansionOrder, FockCutoffs, SystemParams};
use crate::secular::{chi4_reference_superop, secular_damping_superop, term_count_per_order};
use crate::steady::{steady_state, steady_state_reduced, SolverOptions};

/// Outcome of one named check.
#[derive(Debug, Clone)]
pub struct CheckOutcome {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

impl CheckOutcome {
    fn new(name: &'static str, passed: bool, detail: String) -> Self {
        Self {
            name,
            passed,
            detail,
        }
    }
}

fn fig1_params(delta: f64) -> SystemParams {
    SystemParams::new(delta, 0.02, 0.1, 2e-3, 2e-5, 1.0).expect("valid reference parameters")
}

fn check_golden_series() -> Result<CheckOutcome> {
    let cutoffs = FockCutoffs::new(6, 8);
    let mut worst = 0.0f64;
    for chi in [0.05, 0.1, 0.2] {
        let generated = secular_damping_superop(chi, ExpansionOrder(2), cutoffs)?;
        let reference = chi4_reference_superop(chi, cutoffs)?;
        worst = worst.max(generated.max_abs_diff(&reference));
    }
    let counts = term_count_per_order(ExpansionOrder(2))
        .into_iter()
        .map(|(p, c)| format!("chi^{p}: {c}"))
        .collect::<Vec<_>>()
        .join(", ");
    Ok(CheckOutcome::new(
        "golden-series",
        worst <= 1e-12,
        format!("N=2 vs literal chi^4 transcription: max deviation {worst:.3e} (terms {counts})"),
    ))
}

fn check_fixed_mirror() -> Result<CheckOutcome> {
    let mut p = fig1_params(0.05);
    p.g = 0.0;
    let cutoffs = FockCutoffs::new(14, 0);
    let l = full_liouvillian(&p, cutoffs)?;
    let report = steady_state(&l, cutoffs, &SolverOptions::default())?;
    let dist = Distribution::from_density(&report.state, cutoffs)?;
    let rec = observables_from_distribution(&dist, 0.0);
    let expected = crate::observables::fixed_mirror_reference(&p).0;
    let rel = (rec.mean_photon - expected).abs() / expected;
    let g2_err = (rec.g2_a.unwrap_or(f64::NAN) - 1.0).abs();
    Ok(CheckOutcome::new(
        "fixed-mirror-limit",
        rel <= 1e-6 && g2_err <= 1e-6,
        format!("<n> relative error {rel:.3e}, |g2_a - 1| = {g2_err:.3e}"),
    ))
}

fn check_thermal_limit() -> Result<CheckOutcome> {
    let mut p = fig1_params(0.05);
    p.epsilon = 0.0;
    let cutoffs = FockCutoffs::new(1, 60);
    let red = phonon_diagonal_generator(&p, cutoffs, ExpansionOrder(1))?;
    let report = steady_state_reduced(&red, &SolverOptions::default())?;
    let dist = Distribution::from_density(&report.state, cutoffs)?;
    let rec = observables_from_distribution(&dist, p.chi());
    let e_mean = (rec.mean_phonon - p.nbar).abs();
    let e_g2 = (rec.g2_b.unwrap_or(f64::NAN) - 2.0).abs();
    let e_g3 = (rec.g3_b.unwrap_or(f64::NAN) - 6.0).abs();
    let e_g4 = (rec.g4_b.unwrap_or(f64::NAN) - 24.0).abs();
    Ok(CheckOutcome::new(
        "thermal-phonon-limit",
        e_mean <= 1e-8 && e_g2 <= 1e-6 && e_g3 <= 1e-5 && e_g4 <= 1e-4,
        format!(
            "errors: <m> {e_mean:.2e}, g2 {e_g2:.2e}, g3 {e_g3:.2e}, g4 {e_g4:.2e}"
        ),
    ))
}

fn check_trace_preservation() -> Result<CheckOutcome> {
    let p = fig1_params(0.05);
    let cutoffs = FockCutoffs::new(3, 5);
    let mut worst = 0.0f64;
    for n in 0..=3 {
        let bundle = GeneratorBundle::build(&p, cutoffs, ExpansionOrder(n))?;
        worst = worst.max(bundle.full.trace_defect());
        worst = worst.max(bundle.transformed.trace_defect());
    }
    Ok(CheckOutcome::new(
        "trace-preservation",
        worst <= 1e-12,
        format!("max adjoint-on-identity defect over N <= 3: {worst:.3e}"),
    ))
}

fn check_reduced_full_agreement() -> Result<CheckOutcome> {
    let p = fig1_params(0.03);
    let cutoffs = FockCutoffs::new(5, 9);
    let order = ExpansionOrder(1);
    let bundle = GeneratorBundle::build(&p, cutoffs, order)?;
    let full = steady_state(&bundle.transformed, cutoffs, &SolverOptions::default())?;
    let reduced = steady_state_reduced(&bundle.reduced, &SolverOptions::default())?;
    let full_dist = Distribution::from_density(&full.state, cutoffs)?;
    let red_dist = Distribution::from_density(&reduced.state, cutoffs)?;
    let full_rec = observables_from_distribution(&full_dist, p.chi());
    let red_rec = observables_from_distribution(&red_dist, p.chi());
    let diff = (full_rec.mean_photon - red_rec.mean_photon)
        .abs()
        .max((full_rec.mean_phonon - red_rec.mean_phonon).abs())
        .max((full_rec.g2_b.unwrap_or(0.0) - red_rec.g2_b.unwrap_or(0.0)).abs());
    Ok(CheckOutcome::new(
        "reduced-vs-full",
        diff <= 1e-9,
        format!("observable disagreement {diff:.3e}"),
    ))
}

/// L1 distances between the conjugated oracle distribution and the
/// transformed model at N = 1, 2, 3. Shared by `verify` and the acceptance
/// suite.
pub fn frame_equivalence_distances(
    params: &SystemParams,
    cutoffs: FockCutoffs,
) -> Result<Vec<f64>> {
    let l = full_liouvillian(params, cutoffs)?;
    let oracle = steady_state(&l, cutoffs, &SolverOptions::default())?;
    let (u, _defect) = polaron_unitary(params.chi(), cutoffs)?;
    // The transformed-frame representation of a lab-frame state is
    // U^dag rho U, with U built from the bare operators. Its diagonal is
    // bounded below by the oracle's minimum eigenvalue, so the distribution
    // floor applies as usual.
    let conjugated = u.adjoint() * oracle.state.matrix() * &u;
    let table: Vec<Vec<f64>> = (0..=cutoffs.n_max)
        .map(|n| {
            (0..=cutoffs.m_max)
                .map(|m| {
                    let i = cutoffs.idx(n, m);
                    conjugated[(i, i)].re
                })
                .collect()
        })
        .collect();
    let oracle_dist = Distribution::from_table(&table, cutoffs)?;

    let mut distances = Vec::new();
    for n in 1..=3u32 {
        let red = phonon_diagonal_generator(params, cutoffs, ExpansionOrder(n))?;
        let report = steady_state_reduced(&red, &SolverOptions::default())?;
        let dist = Distribution::from_density(&report.state, cutoffs)?;
        distances.push(oracle_dist.l1_distance(&dist)?);
    }
    Ok(distances)
}

fn check_frame_equivalence() -> Result<CheckOutcome> {
    let mut p = fig1_params(0.03);
    p.g = 0.05;
    let cutoffs = FockCutoffs::new(6, 12);
    let d = frame_equivalence_distances(&p, cutoffs)?;
    let monotone = d[0] >= d[1] && d[1] >= d[2];
    let small = d[2] <= 0.05;
    Ok(CheckOutcome::new(
        "frame-equivalence",
        monotone && small,
        format!("L1 distances over N = 1, 2, 3: {:.3e}, {:.3e}, {:.3e}", d[0], d[1], d[2]),
    ))
}

fn check_unitarity() -> Result<CheckOutcome> {
    let cutoffs = FockCutoffs::new(4, 24);
    let (_, defect) = polaron_unitary(0.1, cutoffs)?;
    Ok(CheckOutcome::new(
        "polaron-unitarity",
        defect <= 1e-8,
        format!("unitarity defect {defect:.3e} at {cutoffs}"),
    ))
}

fn check_steady_residuals() -> Result<CheckOutcome> {
    let p = fig1_params(0.09);
    let cutoffs = FockCutoffs::new(5, 10);
    let red = phonon_diagonal_generator(&p, cutoffs, ExpansionOrder(1))?;
    let report = steady_state_reduced(&red, &SolverOptions::default())?;
    let scaled = report.residual / red.max_abs();
    let hermitian_ok = max_abs(
        &(report.state.matrix() - report.state.matrix().adjoint()),
    ) <= 1e-12;
    Ok(CheckOutcome::new(
        "steady-state-residual",
        scaled <= 1e-9 && hermitian_ok && report.min_eigenvalue >= -1e-8,
        format!(
            "scaled residual {scaled:.3e}, min eigenvalue {:.3e}",
            report.min_eigenvalue
        ),
    ))
}

/// Runs every cross-check and returns the outcomes in a fixed order.
pub fn run_all() -> Result<Vec<CheckOutcome>> {
    Ok(vec![
        check_golden_series()?,
        check_fixed_mirror()?,
        check_thermal_limit()?,
        check_trace_preservation()?,
        check_reduced_full_agreement()?,
        check_unitarity()?,
        check_steady_residuals()?,
        check_frame_equivalence()?,
    ])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn verify_suite_passes() {
        for outcome in run_all().unwrap() {
            assert!(outcome.passed, "{}: {}", outcome.name, outcome.detail);
        }
    }
}
