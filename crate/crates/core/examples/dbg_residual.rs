use optomech_core::*;
use optomech_core::steady::SolverOptions;

fn main() {
    // frame-equivalence oracle solve that failed
    let mut p = SystemParams::new(0.03, 0.02, 0.1, 2e-3, 2e-5, 1.0).unwrap();
    p.g = 0.05;
    let cutoffs = FockCutoffs::new(6, 12);
    let l = full_liouvillian(&p, cutoffs).unwrap();
    println!("dim = {}, vec = {}, nnz = {}, max_abs = {:.3e}", l.dim(), l.vec_dim(), l.nnz(), l.max_abs());
    match steady_state(&l, cutoffs, &SolverOptions { residual_tol: 1e-3 }) {
        Ok(r) => {
            println!("residual = {:.3e}  min_eig = {:.3e}", r.residual, r.min_eigenvalue);
            let d = Distribution::from_density(&r.state, cutoffs).unwrap();
            let rec = observables_from_distribution(&d, p.chi());
            println!("mean_photon = {:.6}  mean_phonon = {:.6}", rec.mean_photon, rec.mean_phonon);
        }
        Err(e) => println!("err: {e}"),
    }

    // thermal propagation target as well
    let pt = SystemParams::new(0.05, 0.0, 0.0, 2e-3, 2e-5, 1.0).unwrap();
    let ct = FockCutoffs::new(0, 14);
    let lt = full_liouvillian(&pt, ct).unwrap();
    let rho0 = DensityMatrix::vacuum(ct.dim());
    match optomech_core::propagate(&lt, &rho0, 20.0 / pt.kappa_b, 1e-9) {
        Ok(rho) => {
            for m in 0..4 { println!("p[{m}] = {:.9e} vs {:.9e}", rho.matrix()[(ct.idx(0,m), ct.idx(0,m))].re, 0.5f64.powi(m as i32 +1)); }
        }
        Err(e) => println!("propagate err: {e}"),
    }
}
