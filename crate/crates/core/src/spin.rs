//! Angular-momentum algebra in the Fock basis and SU(2) coherent states.
//!
//! Basis convention: index `l = 0..=N` counts the bosons on site 1 and carries
//! magnetic quantum number `m = l - j`, so that `n1 / N = 1/2 + Jz / N`.
//! Every module relies on this convention.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Symmetric spin sector of `N` bosons on two sites.
#[derive(Debug, Clone)]
pub struct SpinSystem {
    particles: usize,
    jz: DVector<f64>,
    jx: DMatrix<f64>,
    /// `sqrt(j(j+1) - m(m+1))` for `m = -j..j-1`: the `J+` matrix element
    /// coupling `l` to `l + 1`.
    ladder: Vec<f64>,
}

impl SpinSystem {
    pub fn new(particles: usize) -> Result<Self> {
        if particles == 0 {
            return Err(Error::invalid("N", "particle number must be at least 1"));
        }
        let dim = particles + 1;
        let j = particles as f64 / 2.0;
        let jz = DVector::from_fn(dim, |l, _| l as f64 - j);
        let ladder: Vec<f64> = (0..particles)
            .map(|l| {
                let m = l as f64 - j;
                (j * (j + 1.0) - m * (m + 1.0)).max(0.0).sqrt()
            })
            .collect();
        let mut jx = DMatrix::zeros(dim, dim);
        for (l, &a) in ladder.iter().enumerate() {
            jx[(l, l + 1)] = 0.5 * a;
            jx[(l + 1, l)] = 0.5 * a;
        }
        Ok(Self { particles, jz, jx, ladder })
    }

    /// Particle number `N`.
    pub fn particles(&self) -> usize {
        self.particles
    }

    /// Spin length `j = N/2`.
    pub fn spin(&self) -> f64 {
        self.particles as f64 / 2.0
    }

    /// Hilbert-space dimension `N + 1 = 2j + 1`.
    pub fn dim(&self) -> usize {
        self.particles + 1
    }

    /// Diagonal of `Jz`: `m_l = l - j`.
    pub fn jz_diag(&self) -> &DVector<f64> {
        &self.jz
    }

    pub fn jx(&self) -> &DMatrix<f64> {
        &self.jx
    }

    pub(crate) fn ladder(&self) -> &[f64] {
        &self.ladder
    }
}

/// Polar and azimuthal angles of a spin coherent state.
///
/// Angles outside `θ ∈ [0, π]`, `φ ∈ [-π, π]` are rejected rather than wrapped.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct CoherentParams {
    theta: f64,
    phi: f64,
}

impl CoherentParams {
    pub fn new(theta: f64, phi: f64) -> Result<Self> {
        if !(0.0..=PI).contains(&theta) {
            return Err(Error::invalid("theta", format!("{theta} is outside [0, π]")));
        }
        if !(-PI..=PI).contains(&phi) {
            return Err(Error::invalid("phi", format!("{phi} is outside [-π, π]")));
        }
        Ok(Self { theta, phi })
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn phi(&self) -> f64 {
        self.phi
    }
}

/// Normalized amplitudes `c_l` in the Fock basis of a [`SpinSystem`].
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    particles: usize,
    amplitudes: DVector<Complex64>,
}

const NORM_TOLERANCE: f64 = 1e-12;

impl StateVector {
    /// Wraps amplitudes, checking the dimension and unit norm.
    pub fn from_amplitudes(sys: &SpinSystem, amplitudes: DVector<Complex64>) -> Result<Self> {
        if amplitudes.len() != sys.dim() {
            return Err(Error::DimensionMismatch { expected: sys.dim(), actual: amplitudes.len() });
        }
        let norm_sqr = amplitudes.norm_squared();
        if (norm_sqr - 1.0).abs() > NORM_TOLERANCE {
            return Err(Error::NotNormalized { norm_sqr });
        }
        Ok(Self { particles: sys.particles(), amplitudes })
    }

    /// Wraps amplitudes after dividing by their norm.
    pub fn normalized(sys: &SpinSystem, mut amplitudes: DVector<Complex64>) -> Result<Self> {
        if amplitudes.len() != sys.dim() {
            return Err(Error::DimensionMismatch { expected: sys.dim(), actual: amplitudes.len() });
        }
        let norm = amplitudes.norm();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::NotNormalized { norm_sqr: norm * norm });
        }
        amplitudes.unscale_mut(norm);
        Ok(Self { particles: sys.particles(), amplitudes })
    }

    /// Fock state `|l⟩`: `l` bosons on site 1.
    pub fn fock(sys: &SpinSystem, l: usize) -> Result<Self> {
        if l > sys.particles() {
            return Err(Error::invalid("l", format!("{l} exceeds N = {}", sys.particles())));
        }
        let mut amplitudes = DVector::zeros(sys.dim());
        amplitudes[l] = Complex64::new(1.0, 0.0);
        Ok(Self { particles: sys.particles(), amplitudes })
    }

    /// Equal-weight superposition of every Fock state.
    pub fn uniform(sys: &SpinSystem) -> Self {
        let c = Complex64::new(1.0 / (sys.dim() as f64).sqrt(), 0.0);
        Self { particles: sys.particles(), amplitudes: DVector::from_element(sys.dim(), c) }
    }

    pub(crate) fn from_raw(particles: usize, amplitudes: DVector<Complex64>) -> Self {
        Self { particles, amplitudes }
    }

    pub fn particles(&self) -> usize {
        self.particles
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &DVector<Complex64> {
        &self.amplitudes
    }

    pub(crate) fn amplitudes_mut(&mut self) -> &mut DVector<Complex64> {
        &mut self.amplitudes
    }

    pub fn into_amplitudes(self) -> DVector<Complex64> {
        self.amplitudes
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.norm()
    }

    /// `|c_l|²` for every basis state.
    pub fn probabilities(&self) -> Vec<f64> {
        self.amplitudes.iter().map(|c| c.norm_sqr()).collect()
    }

    /// Rescaled spin expectations `(⟨Jx⟩, ⟨Jy⟩, ⟨Jz⟩) / j`.
    ///
    /// Computed from `⟨J+⟩ = Σ_l c*_{l+1} c_l a_l`, with `J+ = a1† a2`
    /// raising `l`.
    pub fn spin_expectation(&self, sys: &SpinSystem) -> [f64; 3] {
        let j = sys.spin();
        let c = &self.amplitudes;
        let mut raise = Complex64::new(0.0, 0.0);
        for (l, &a) in sys.ladder().iter().enumerate() {
            raise += c[l + 1].conj() * c[l] * a;
        }
        let jz: f64 = c.iter().zip(sys.jz_diag().iter()).map(|(c, m)| c.norm_sqr() * m).sum();
        [raise.re / j, raise.im / j, jz / j]
    }
}

/// `ln C(n, k)` for every `k = 0..=n`, from cumulative sums of `ln i`.
pub(crate) fn ln_binomials(n: usize) -> Vec<f64> {
    let mut ln_fact = Vec::with_capacity(n + 1);
    let mut acc = 0.0;
    ln_fact.push(0.0);
    for i in 1..=n {
        acc += (i as f64).ln();
        ln_fact.push(acc);
    }
    (0..=n).map(|k| ln_fact[n] - ln_fact[k] - ln_fact[n - k]).collect()
}

/// Coherent state `|θ, φ⟩ = Σ_l sqrt(C(N,l)) cos^l(θ/2) sin^{N-l}(θ/2) e^{i(N-l)φ} |l⟩`.
///
/// `θ = 0` puts every boson on site 1 (`l = N`, `Jz = +j`).
pub fn coherent_state(sys: &SpinSystem, params: CoherentParams) -> StateVector {
    let n = sys.particles();
    let half = params.theta() / 2.0;
    let ln_cos = half.cos().ln();
    let ln_sin = half.sin().ln();
    // k * ln(x) with the 0^0 = 1 convention at the poles.
    let ln_pow = |ln_x: f64, k: usize| if k == 0 { 0.0 } else { k as f64 * ln_x };
    let ln_binom = ln_binomials(n);
    let amplitudes = DVector::from_fn(n + 1, |l, _| {
        let ln_mag = 0.5 * ln_binom[l] + ln_pow(ln_cos, l) + ln_pow(ln_sin, n - l);
        let mag = ln_mag.exp();
        Complex64::from_polar(mag, (n - l) as f64 * params.phi())
    });
    let mut state = StateVector::from_raw(n, amplitudes);
    let norm = state.norm();
    state.amplitudes_mut().unscale_mut(norm);
    state
}
