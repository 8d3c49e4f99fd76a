//! One-kick propagator and stroboscopic evolution.
//!
//! The kick rotation `exp(-i V Jx)` comes from a single real-symmetric
//! eigendecomposition of `Jx` ([`RotationSpectrum`]) that can be reused for
//! every κ. The twist `exp(-i κ/(2j) Jz²)` is a diagonal phase. Both factors
//! are multiplied into one dense matrix, so a kick is one matrix-vector
//! product.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::observables::{self, TimeSeries};
use crate::spin::{coherent_state, CoherentParams, SpinSystem, StateVector};

/// Largest per-kick deviation of the norm from 1 that evolution will absorb by
/// renormalizing. Anything larger is an operator bug and aborts the run.
pub const DRIFT_TOLERANCE: f64 = 1e-8;

/// Which factor of the Floquet operator acts on the state first.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum KickOrder {
    /// `U = exp(-i κ/(2j) Jz²) exp(-i V Jx)`: rotate, then twist. The
    /// stroboscopic expectations of this ordering follow
    /// [`crate::classical::ClassicalState::kick`].
    #[default]
    RotateThenTwist,
    /// `U = exp(-i V Jx) exp(-i κ/(2j) Jz²)`: twist, then rotate. Conjugate
    /// to the default by the kick rotation.
    TwistThenRotate,
}

/// Eigendecomposition `Jx = Q diag(w) Qᵀ`.
#[derive(Debug, Clone)]
pub struct RotationSpectrum {
    eigenvalues: DVector<f64>,
    eigenvectors: DMatrix<f64>,
}

impl RotationSpectrum {
    pub fn new(sys: &SpinSystem) -> Result<Self> {
        let dim = sys.dim();
        let eig =
            SymmetricEigen::try_new(sys.jx().clone(), f64::EPSILON, 0).ok_or(Error::Eigendecomposition { dim })?;
        Ok(Self { eigenvalues: eig.eigenvalues, eigenvectors: eig.eigenvectors })
    }

    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn eigenvalues(&self) -> &DVector<f64> {
        &self.eigenvalues
    }

    /// `exp(-i angle Jx)`.
    pub fn rotation(&self, angle: f64) -> DMatrix<Complex64> {
        let q = &self.eigenvectors;
        let dim = self.dim();
        let phases: Vec<Complex64> = self.eigenvalues.iter().map(|&w| Complex64::from_polar(1.0, -angle * w)).collect();
        let mut out = DMatrix::zeros(dim, dim);
        for c in 0..dim {
            for r in c..dim {
                let mut acc = Complex64::new(0.0, 0.0);
                for (k, p) in phases.iter().enumerate() {
                    acc += p * (q[(r, k)] * q[(c, k)]);
                }
                out[(r, c)] = acc;
                out[(c, r)] = acc;
            }
        }
        out
    }
}

/// Dense one-kick unitary. Immutable once built.
#[derive(Debug, Clone)]
pub struct FloquetOperator {
    matrix: DMatrix<Complex64>,
    re: DMatrix<f64>,
    im: DMatrix<f64>,
    particles: usize,
    kappa: f64,
    kick_strength: f64,
    order: KickOrder,
}

impl FloquetOperator {
    /// Builds the operator with the default factor ordering, diagonalizing
    /// `Jx` from scratch.
    pub fn new(sys: &SpinSystem, kappa: f64, kick_strength: f64) -> Result<Self> {
        let spectrum = RotationSpectrum::new(sys)?;
        Self::with_spectrum(sys, &spectrum, kappa, kick_strength, KickOrder::default())
    }

    pub fn with_spectrum(
        sys: &SpinSystem,
        spectrum: &RotationSpectrum,
        kappa: f64,
        kick_strength: f64,
        order: KickOrder,
    ) -> Result<Self> {
        if !(kappa.is_finite() && kappa >= 0.0) {
            return Err(Error::invalid("kappa", format!("{kappa} must be finite and >= 0")));
        }
        if !kick_strength.is_finite() {
            return Err(Error::invalid("kick_strength", "must be finite"));
        }
        if spectrum.dim() != sys.dim() {
            return Err(Error::DimensionMismatch { expected: sys.dim(), actual: spectrum.dim() });
        }
        let j = sys.spin();
        let twist: Vec<Complex64> =
            sys.jz_diag().iter().map(|&m| Complex64::from_polar(1.0, -kappa / (2.0 * j) * m * m)).collect();
        let mut matrix = spectrum.rotation(kick_strength);
        match order {
            // diag(t) · R scales rows.
            KickOrder::RotateThenTwist => {
                for (r, t) in twist.iter().enumerate() {
                    for c in 0..sys.dim() {
                        matrix[(r, c)] *= t;
                    }
                }
            }
            // R · diag(t) scales columns.
            KickOrder::TwistThenRotate => {
                for (c, t) in twist.iter().enumerate() {
                    for r in 0..sys.dim() {
                        matrix[(r, c)] *= t;
                    }
                }
            }
        }
        let re = matrix.map(|z| z.re);
        let im = matrix.map(|z| z.im);
        Ok(Self { matrix, re, im, particles: sys.particles(), kappa, kick_strength, order })
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn particles(&self) -> usize {
        self.particles
    }

    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    pub fn kick_strength(&self) -> f64 {
        self.kick_strength
    }

    pub fn order(&self) -> KickOrder {
        self.order
    }

    /// One kick, `U |ψ⟩`. No renormalization.
    pub fn apply(&self, state: &StateVector) -> Result<StateVector> {
        self.check_dim(state.dim())?;
        let mut out = DVector::zeros(self.dim());
        out.gemv(Complex64::new(1.0, 0.0), &self.matrix, state.amplitudes(), Complex64::new(0.0, 0.0));
        Ok(StateVector::from_raw(self.particles, out))
    }

    /// Largest element of `|U†U - I|`.
    pub fn unitarity_defect(&self) -> f64 {
        let prod = self.matrix.adjoint() * &self.matrix;
        let mut worst = 0.0f64;
        for r in 0..self.dim() {
            for c in 0..self.dim() {
                let target = if r == c { 1.0 } else { 0.0 };
                worst = worst.max((prod[(r, c)] - target).norm());
            }
        }
        worst
    }

    fn check_dim(&self, actual: usize) -> Result<()> {
        if actual != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), actual });
        }
        Ok(())
    }
}

/// A set of states evolved together under one operator, stored column-wise as
/// separate real and imaginary parts so that a kick is four real
/// matrix-matrix products.
#[derive(Debug, Clone)]
pub struct Ensemble {
    particles: usize,
    re: DMatrix<f64>,
    im: DMatrix<f64>,
    next_re: DMatrix<f64>,
    next_im: DMatrix<f64>,
    kicks: usize,
}

impl Ensemble {
    pub fn new(states: &[StateVector]) -> Result<Self> {
        let first = states.first().ok_or_else(|| Error::invalid("states", "ensemble is empty"))?;
        let dim = first.dim();
        let mut re = DMatrix::zeros(dim, states.len());
        let mut im = DMatrix::zeros(dim, states.len());
        for (k, s) in states.iter().enumerate() {
            if s.dim() != dim {
                return Err(Error::DimensionMismatch { expected: dim, actual: s.dim() });
            }
            for (l, c) in s.amplitudes().iter().enumerate() {
                re[(l, k)] = c.re;
                im[(l, k)] = c.im;
            }
        }
        Ok(Self { particles: first.particles(), next_re: re.clone(), next_im: im.clone(), re, im, kicks: 0 })
    }

    pub fn len(&self) -> usize {
        self.re.ncols()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Kicks applied so far.
    pub fn kicks(&self) -> usize {
        self.kicks
    }

    /// Applies one kick to every member, then renormalizes. A norm deviation
    /// above [`DRIFT_TOLERANCE`] is an error.
    pub fn kick(&mut self, op: &FloquetOperator) -> Result<()> {
        if op.dim() != self.re.nrows() {
            return Err(Error::DimensionMismatch { expected: op.dim(), actual: self.re.nrows() });
        }
        // (A + iB)(P + iQ) = (AP - BQ) + i(AQ + BP)
        self.next_re.gemm(1.0, &op.re, &self.re, 0.0);
        self.next_re.gemm(-1.0, &op.im, &self.im, 1.0);
        self.next_im.gemm(1.0, &op.re, &self.im, 0.0);
        self.next_im.gemm(1.0, &op.im, &self.re, 1.0);
        std::mem::swap(&mut self.re, &mut self.next_re);
        std::mem::swap(&mut self.im, &mut self.next_im);
        self.kicks += 1;

        let mut worst = 0.0f64;
        for k in 0..self.len() {
            let norm = (self.re.column(k).norm_squared() + self.im.column(k).norm_squared()).sqrt();
            let deviation = (norm - 1.0).abs();
            if deviation > DRIFT_TOLERANCE || !norm.is_finite() {
                return Err(Error::NormDrift { kick: self.kicks, member: k, deviation, tolerance: DRIFT_TOLERANCE });
            }
            worst = worst.max(deviation);
            self.re.column_mut(k).unscale_mut(norm);
            self.im.column_mut(k).unscale_mut(norm);
        }
        if worst > 1e-13 {
            log::debug!("kick {}: renormalized, max norm deviation {worst:e}", self.kicks);
        }
        Ok(())
    }

    /// Writes `|c_l|²` of member `k` into `out`.
    pub fn probabilities_into(&self, k: usize, out: &mut Vec<f64>) {
        out.clear();
        out.extend(self.re.column(k).iter().zip(self.im.column(k).iter()).map(|(a, b)| a * a + b * b));
    }

    pub fn state(&self, k: usize) -> StateVector {
        let amps = DVector::from_iterator(
            self.re.nrows(),
            self.re.column(k).iter().zip(self.im.column(k).iter()).map(|(&a, &b)| Complex64::new(a, b)),
        );
        StateVector::from_raw(self.particles, amps)
    }
}

/// Observables sampled after one kick.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KickSample {
    pub kick: usize,
    /// Bipartite fluctuations `F(n)`.
    pub fluctuation: f64,
    /// Participation ratio `η_n`.
    pub participation: f64,
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

/// Per-kick samples of a single evolution; entry 0 is the initial state.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EvolutionRecord {
    pub particles: usize,
    pub kappa: f64,
    pub kick_strength: f64,
    pub initial: CoherentParams,
    pub samples: Vec<KickSample>,
}

impl EvolutionRecord {
    pub fn kicks(&self) -> usize {
        self.samples.len() - 1
    }

    pub fn fluctuation_series(&self) -> TimeSeries {
        TimeSeries::from_values("F", 0, self.samples.iter().map(|s| s.fluctuation).collect())
    }

    pub fn participation_series(&self) -> TimeSeries {
        TimeSeries::from_values("eta", 0, self.samples.iter().map(|s| s.participation).collect())
    }
}

fn sample(sys: &SpinSystem, state: &StateVector, kick: usize, probs: &[f64]) -> Result<KickSample> {
    let [x, y, z] = state.spin_expectation(sys);
    Ok(KickSample {
        kick,
        fluctuation: observables::fluctuation_from_probabilities(probs)?,
        participation: observables::participation_from_probabilities(probs),
        x,
        y,
        z,
    })
}

/// Evolves the coherent state `initial` through `kicks` kicks, sampling every
/// observable before the first kick and after each one.
pub fn evolve_record(
    op: &FloquetOperator,
    sys: &SpinSystem,
    initial: CoherentParams,
    kicks: usize,
) -> Result<EvolutionRecord> {
    if kicks == 0 {
        return Err(Error::invalid("kicks", "must be at least 1"));
    }
    if op.dim() != sys.dim() {
        return Err(Error::DimensionMismatch { expected: sys.dim(), actual: op.dim() });
    }
    let psi0 = coherent_state(sys, initial);
    let mut probs = psi0.probabilities();
    let mut samples = Vec::with_capacity(kicks + 1);
    samples.push(sample(sys, &psi0, 0, &probs)?);
    let mut ensemble = Ensemble::new(std::slice::from_ref(&psi0))?;
    for n in 1..=kicks {
        ensemble.kick(op)?;
        ensemble.probabilities_into(0, &mut probs);
        samples.push(sample(sys, &ensemble.state(0), n, &probs)?);
    }
    Ok(EvolutionRecord {
        particles: sys.particles(),
        kappa: op.kappa(),
        kick_strength: op.kick_strength(),
        initial,
        samples,
    })
}
