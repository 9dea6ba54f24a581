//! Physical parameters, Fock cutoffs and expansion order.
//!
//! Everything is dimensionless: rates and energies are expressed in units of
//! the mechanical frequency, which is fixed to one throughout the crate.

use std::fmt;

use crate::error::{Error, Result};

/// Mechanical frequency in its own units.
pub const OMEGA: f64 = 1.0;

/// All physical rates and couplings of the two-mode model, in units of the
/// mechanical frequency.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SystemParams {
    /// Cavity-laser detuning delta = omega_c - omega_L.
    pub delta: f64,
    /// Coherent drive amplitude, >= 0.
    pub epsilon: f64,
    /// Optomechanical coupling, >= 0.
    pub g: f64,
    /// Cavity decay rate, > 0.
    pub kappa_a: f64,
    /// Mechanical decay rate, > 0.
    pub kappa_b: f64,
    /// Thermal phonon occupation of the mechanical bath, >= 0.
    pub nbar: f64,
}

impl SystemParams {
    pub fn new(
        delta: f64,
        epsilon: f64,
        g: f64,
        kappa_a: f64,
        kappa_b: f64,
        nbar: f64,
    ) -> Result<Self> {
        let p = Self {
            delta,
            epsilon,
            g,
            kappa_a,
            kappa_b,
            nbar,
        };
        p.check_hard()?;
        Ok(p)
    }

    /// Expansion parameter chi = g / omega. Always derived, never stored.
    pub fn chi(&self) -> f64 {
        self.g / OMEGA
    }

    /// Hard validity: finite fields, non-negative amplitudes, positive rates.
    pub fn check_hard(&self) -> Result<()> {
        let fields = [
            ("delta", self.delta),
            ("epsilon", self.epsilon),
            ("g", self.g),
            ("kappa_a", self.kappa_a),
            ("kappa_b", self.kappa_b),
            ("nbar", self.nbar),
        ];
        for (name, v) in fields {
            if !v.is_finite() {
                return Err(Error::InvalidParams(format!("{name} = {v} is not finite")));
            }
        }
        if self.epsilon < 0.0 {
            return Err(Error::InvalidParams(format!(
                "epsilon = {} must be >= 0",
                self.epsilon
            )));
        }
        if self.g < 0.0 {
            return Err(Error::InvalidParams(format!("g = {} must be >= 0", self.g)));
        }
        if self.kappa_a <= 0.0 {
            return Err(Error::InvalidParams(format!(
                "kappa_a = {} must be > 0",
                self.kappa_a
            )));
        }
        if self.kappa_b <= 0.0 {
            return Err(Error::InvalidParams(format!(
                "kappa_b = {} must be > 0",
                self.kappa_b
            )));
        }
        if self.nbar < 0.0 {
            return Err(Error::InvalidParams(format!(
                "nbar = {} must be >= 0",
                self.nbar
            )));
        }
        Ok(())
    }
}

/// Truncation of the photon and phonon Fock ladders.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct FockCutoffs {
    /// Highest retained photon number.
    pub n_max: usize,
    /// Highest retained phonon number.
    pub m_max: usize,
}

impl FockCutoffs {
    pub fn new(n_max: usize, m_max: usize) -> Self {
        Self { n_max, m_max }
    }

    /// Photon subspace dimension.
    pub fn photon_dim(&self) -> usize {
        self.n_max + 1
    }

    /// Phonon subspace dimension.
    pub fn phonon_dim(&self) -> usize {
        self.m_max + 1
    }

    /// Product-space dimension.
    pub fn dim(&self) -> usize {
        self.photon_dim() * self.phonon_dim()
    }

    /// Basis index of |n, m>. Photon number is the slow index; this layout is
    /// fixed project-wide and every module relies on it bit-exactly.
    pub fn idx(&self, n: usize, m: usize) -> usize {
        n * self.phonon_dim() + m
    }

    /// Inverse of [`FockCutoffs::idx`].
    pub fn unidx(&self, i: usize) -> (usize, usize) {
        (i / self.phonon_dim(), i % self.phonon_dim())
    }
}

impl fmt::Display for FockCutoffs {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(n_max={}, m_max={})", self.n_max, self.m_max)
    }
}

/// Maximal phonon-process order N: generated terms carry powers of chi up to
/// chi^(2N). N = 1 keeps single-phonon processes, N = 3 keeps everything up
/// to chi^6.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ExpansionOrder(pub u32);

impl ExpansionOrder {
    /// Highest retained power of chi.
    pub fn max_chi_power(&self) -> u32 {
        2 * self.0
    }
}

impl fmt::Display for ExpansionOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// A soft diagnostic from [`validate_regime`]. These flag parameter choices
/// outside the dispersive regime the secular expansion assumes; they never
/// abort a computation.
#[derive(Debug, Clone, PartialEq)]
pub enum RegimeDiagnostic {
    /// The ordering omega > g > epsilon does not hold.
    CouplingOrdering { g: f64, epsilon: f64 },
    /// The detuning sits within `window` of the k-th mechanical sideband.
    ResonanceProximity { k: u32, distance: f64, window: f64 },
    /// A decay rate is not small against the mechanical frequency.
    FastDecay { name: &'static str, value: f64 },
    /// |delta| is not small against the mechanical frequency.
    LargeDetuning { delta: f64 },
}

impl fmt::Display for RegimeDiagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RegimeDiagnostic::CouplingOrdering { g, epsilon } => write!(
                f,
                "coupling ordering violated: expected 1 > g > epsilon, got g = {g}, epsilon = {epsilon}"
            ),
            RegimeDiagnostic::ResonanceProximity {
                k,
                distance,
                window,
            } => write!(
                f,
                "detuning within {distance:.3e} of the k = {k} mechanical sideband (window {window:.3e})"
            ),
            RegimeDiagnostic::FastDecay { name, value } => {
                write!(f, "{name} = {value} is not small against the mechanical frequency")
            }
            RegimeDiagnostic::LargeDetuning { delta } => {
                write!(f, "|delta| = {} is not small against the mechanical frequency", delta.abs())
            }
        }
    }
}

/// Checks the dispersive-regime assumptions and returns a list of warnings.
///
/// Pure: the same parameters always produce the same diagnostics, in the same
/// order. Hard errors occur only for non-finite or negative-rate inputs.
pub fn validate_regime(params: &SystemParams) -> Result<Vec<RegimeDiagnostic>> {
    params.check_hard()?;
    let mut out = Vec::new();

    // omega > g > epsilon, with omega = 1.
    if !(OMEGA > params.g && params.g > params.epsilon) {
        out.push(RegimeDiagnostic::CouplingOrdering {
            g: params.g,
            epsilon: params.epsilon,
        });
    }

    // Proximity to the mechanical sidebands delta = +-k. The paper gives no
    // quantitative margin; the window below keeps sidebands clear of both the
    // cavity linewidth and the Kerr scale.
    let window = params.kappa_a.max(10.0 * params.g * params.g);
    let k_hi = params.delta.abs().ceil() as u32 + 2;
    for k in 1..=k_hi {
        let distance = (params.delta.abs() - k as f64).abs();
        if distance <= window {
            out.push(RegimeDiagnostic::ResonanceProximity {
                k,
                distance,
                window,
            });
        }
    }

    if params.kappa_a >= 0.1 {
        out.push(RegimeDiagnostic::FastDecay {
            name: "kappa_a",
            value: params.kappa_a,
        });
    }
    if params.kappa_b >= 0.1 {
        out.push(RegimeDiagnostic::FastDecay {
            name: "kappa_b",
            value: params.kappa_b,
        });
    }

    if params.delta.abs() >= 1.0 {
        out.push(RegimeDiagnostic::LargeDetuning {
            delta: params.delta,
        });
    }

    Ok(out)
}
