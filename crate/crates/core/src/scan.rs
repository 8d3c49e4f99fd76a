//! Phase-space fields of time-averaged observables, the fluctuation power and
//! κ sweeps.
//!
//! Every grid point is an independent evolution under one shared, read-only
//! Floquet operator. Points are processed in fixed-size chunks, each chunk
//! evolved as one [`Ensemble`]; serial and parallel execution use the same
//! chunking and produce identical cells.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::classical;
use crate::error::{Error, Result};
use crate::floquet::{Ensemble, FloquetOperator, KickOrder, RotationSpectrum};
use crate::observables::{self, TimeAverage};
use crate::spin::{coherent_state, CoherentParams, SpinSystem};
use crate::DEFAULT_KICK_STRENGTH;

const CHUNK: usize = 32;

/// Cell-midpoint grid over a `(θ, φ)` rectangle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub n_theta: usize,
    pub n_phi: usize,
    pub theta_range: (f64, f64),
    pub phi_range: (f64, f64),
}

impl GridSpec {
    /// The whole sphere, `θ ∈ (0, π)`, `φ ∈ (-π, π)`.
    pub fn new(n_theta: usize, n_phi: usize) -> Result<Self> {
        Self::with_ranges(n_theta, n_phi, (0.0, PI), (-PI, PI))
    }

    /// A sub-rectangle. A degenerate range (`lo == hi`) pins that angle, which
    /// gives a slice at fixed `θ` or `φ`.
    pub fn with_ranges(n_theta: usize, n_phi: usize, theta_range: (f64, f64), phi_range: (f64, f64)) -> Result<Self> {
        if n_theta == 0 || n_phi == 0 {
            return Err(Error::invalid("grid", format!("{n_theta}x{n_phi} has no cells")));
        }
        let (t0, t1) = theta_range;
        let (p0, p1) = phi_range;
        if !(0.0 <= t0 && t0 <= t1 && t1 <= PI) {
            return Err(Error::invalid("theta_range", format!("({t0}, {t1}) is not an interval inside [0, π]")));
        }
        if !(-PI <= p0 && p0 <= p1 && p1 <= PI) {
            return Err(Error::invalid("phi_range", format!("({p0}, {p1}) is not an interval inside [-π, π]")));
        }
        let grid = Self { n_theta, n_phi, theta_range, phi_range };
        if grid.thetas().iter().any(|&t| t <= 0.0 || t >= PI) {
            return Err(Error::invalid("theta_range", "grid midpoints must avoid the poles"));
        }
        Ok(grid)
    }

    /// Slice at fixed `θ` with `n_phi` points across `(-π, π)`.
    pub fn phi_slice(theta: f64, n_phi: usize) -> Result<Self> {
        Self::with_ranges(1, n_phi, (theta, theta), (-PI, PI))
    }

    pub fn len(&self) -> usize {
        self.n_theta * self.n_phi
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn d_theta(&self) -> f64 {
        (self.theta_range.1 - self.theta_range.0) / self.n_theta as f64
    }

    pub fn d_phi(&self) -> f64 {
        (self.phi_range.1 - self.phi_range.0) / self.n_phi as f64
    }

    pub fn thetas(&self) -> Vec<f64> {
        (0..self.n_theta).map(|i| self.theta_range.0 + (i as f64 + 0.5) * self.d_theta()).collect()
    }

    pub fn phis(&self) -> Vec<f64> {
        (0..self.n_phi).map(|k| self.phi_range.0 + (k as f64 + 0.5) * self.d_phi()).collect()
    }

    /// All points, θ-major: index `i * n_phi + k`.
    pub fn points(&self) -> Vec<CoherentParams> {
        let phis = self.phis();
        self.thetas()
            .into_iter()
            .flat_map(|t| phis.iter().map(move |&p| CoherentParams::new(t, p).expect("grid midpoints are in range")))
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Observable {
    /// Long-time average of the bipartite fluctuations, `F̄`.
    FluctuationMean,
    /// Long-time average of the participation ratio over the dimension,
    /// `η̄ / D`.
    ParticipationMean,
    /// Largest classical Lyapunov exponent.
    Lyapunov,
}

impl Observable {
    pub fn label(&self) -> &'static str {
        match self {
            Observable::FluctuationMean => "fbar",
            Observable::ParticipationMean => "pr",
            Observable::Lyapunov => "lambda",
        }
    }
}

/// Values of one observable on a grid, θ-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanField {
    pub grid: GridSpec,
    pub observable: Observable,
    /// `None` for classical fields.
    pub particles: Option<usize>,
    pub kappa: f64,
    /// Kicks in the time average, or map iterations for Lyapunov fields.
    pub kicks: usize,
    pub values: Vec<f64>,
}

impl ScanField {
    pub fn get(&self, i_theta: usize, i_phi: usize) -> f64 {
        self.values[i_theta * self.grid.n_phi + i_phi]
    }

    /// `(θ, φ, value)` for every cell, θ-major.
    pub fn rows(&self) -> Vec<(f64, f64, f64)> {
        self.grid.points().iter().zip(&self.values).map(|(p, &v)| (p.theta(), p.phi(), v)).collect()
    }

    /// Phase-space average under the Haar measure `sin θ dθ dφ`.
    pub fn phase_space_average(&self, norm: PowerNormalization) -> f64 {
        let weights: Vec<f64> = self.grid.thetas().iter().map(|t| t.sin()).collect();
        let weighted: f64 =
            self.values.chunks(self.grid.n_phi).zip(&weights).map(|(row, w)| w * row.iter().sum::<f64>()).sum();
        match norm {
            PowerNormalization::HaarMean => weighted / (weights.iter().sum::<f64>() * self.grid.n_phi as f64),
            PowerNormalization::CoordinateArea => weighted / self.grid.len() as f64,
            PowerNormalization::Integral => weighted * self.grid.d_theta() * self.grid.d_phi(),
        }
    }
}

/// How the Haar-measure integral of a field is normalized.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PowerNormalization {
    /// `∫ dμ F̄ / ∫ dμ`: a weighted mean, `Σ sin θ F̄ / Σ sin θ`.
    HaarMean,
    /// `∫ dμ F̄` divided by the coordinate area of the `(θ, φ)` rectangle
    /// (`2π²` for the full sphere): `Σ sin θ F̄ / (n_θ n_φ)`.
    #[default]
    CoordinateArea,
    /// The bare Riemann sum of `∫ dμ F̄`.
    Integral,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Execution {
    #[default]
    Serial,
    /// Chunks of grid points on the current rayon pool.
    Parallel,
}

/// Quantum scans at fixed particle number. Holds the `Jx` eigendecomposition
/// so every κ reuses it.
#[derive(Debug, Clone)]
pub struct Scanner {
    sys: SpinSystem,
    spectrum: RotationSpectrum,
    pub kick_strength: f64,
    pub order: KickOrder,
    pub execution: Execution,
    pub average: TimeAverage,
}

impl Scanner {
    pub fn new(particles: usize) -> Result<Self> {
        let sys = SpinSystem::new(particles)?;
        let spectrum = RotationSpectrum::new(&sys)?;
        Ok(Self {
            sys,
            spectrum,
            kick_strength: DEFAULT_KICK_STRENGTH,
            order: KickOrder::default(),
            execution: Execution::default(),
            average: TimeAverage::default(),
        })
    }

    pub fn with_execution(mut self, execution: Execution) -> Self {
        self.execution = execution;
        self
    }

    pub fn system(&self) -> &SpinSystem {
        &self.sys
    }

    pub fn operator(&self, kappa: f64) -> Result<FloquetOperator> {
        FloquetOperator::with_spectrum(&self.sys, &self.spectrum, kappa, self.kick_strength, self.order)
    }

    /// `F̄` and `η̄ / D` on the grid from one set of evolutions.
    pub fn fields(&self, kappa: f64, grid: &GridSpec, kicks: usize) -> Result<(ScanField, ScanField)> {
        if kicks == 0 {
            return Err(Error::invalid("kicks", "must be at least 1"));
        }
        let op = self.operator(kappa)?;
        let points = grid.points();
        let run = |chunk: &[CoherentParams]| self.average_chunk(&op, chunk, kicks);
        let chunks: Vec<Vec<(f64, f64)>> = match self.execution {
            Execution::Serial => points.chunks(CHUNK).map(run).collect::<Result<_>>()?,
            Execution::Parallel => points.par_chunks(CHUNK).map(run).collect::<Result<_>>()?,
        };
        let (fbar, pr): (Vec<f64>, Vec<f64>) = chunks.into_iter().flatten().unzip();
        let field = |observable, values| ScanField {
            grid: *grid,
            observable,
            particles: Some(self.sys.particles()),
            kappa,
            kicks,
            values,
        };
        Ok((field(Observable::FluctuationMean, fbar), field(Observable::ParticipationMean, pr)))
    }

    pub fn fbar_field(&self, kappa: f64, grid: &GridSpec, kicks: usize) -> Result<ScanField> {
        Ok(self.fields(kappa, grid, kicks)?.0)
    }

    pub fn pr_field(&self, kappa: f64, grid: &GridSpec, kicks: usize) -> Result<ScanField> {
        Ok(self.fields(kappa, grid, kicks)?.1)
    }

    /// Haar-weighted phase-space average of `F̄`.
    pub fn fluctuation_power(
        &self,
        kappa: f64,
        grid: &GridSpec,
        kicks: usize,
        norm: PowerNormalization,
    ) -> Result<f64> {
        Ok(self.fbar_field(kappa, grid, kicks)?.phase_space_average(norm))
    }

    /// `(κ, ⟨F̄⟩_P)` for each κ.
    pub fn kappa_sweep(
        &self,
        kappas: &[f64],
        grid: &GridSpec,
        kicks: usize,
        norm: PowerNormalization,
    ) -> Result<Vec<(f64, f64)>> {
        if kappas.is_empty() {
            return Err(Error::invalid("kappa", "empty κ list"));
        }
        kappas.iter().map(|&k| Ok((k, self.fluctuation_power(k, grid, kicks, norm)?))).collect()
    }

    fn average_chunk(&self, op: &FloquetOperator, chunk: &[CoherentParams], kicks: usize) -> Result<Vec<(f64, f64)>> {
        let states: Vec<_> = chunk.iter().map(|&p| coherent_state(&self.sys, p)).collect();
        let dim = self.sys.dim() as f64;
        let mut sums = vec![(0.0, 0.0); chunk.len()];
        let at = |k: usize, e: Error| e.at_grid_point(chunk[k].theta(), chunk[k].phi());
        let accumulate = |sums: &mut [(f64, f64)], k: usize, probs: &[f64]| -> Result<()> {
            let f = observables::fluctuation_from_probabilities(probs).map_err(|e| at(k, e))?;
            sums[k].0 += f;
            sums[k].1 += observables::participation_from_probabilities(probs) / dim;
            Ok(())
        };
        let mut count = kicks;
        if self.average == TimeAverage::IncludeInitial {
            for (k, s) in states.iter().enumerate() {
                accumulate(&mut sums, k, &s.probabilities())?;
            }
            count += 1;
        }
        let mut ensemble = Ensemble::new(&states)?;
        let mut probs = Vec::with_capacity(self.sys.dim());
        for _ in 0..kicks {
            ensemble.kick(op).map_err(|e| match e {
                Error::NormDrift { member, .. } => at(member, e),
                e => e,
            })?;
            for k in 0..chunk.len() {
                ensemble.probabilities_into(k, &mut probs);
                accumulate(&mut sums, k, &probs)?;
            }
        }
        let n = count as f64;
        Ok(sums.into_iter().map(|(f, e)| (f / n, e / n)).collect())
    }
}

/// Per-point Lyapunov exponents of the classical map on a grid.
pub fn lyapunov_field(
    kappa: f64,
    grid: &GridSpec,
    steps: usize,
    transient: usize,
    execution: Execution,
) -> Result<ScanField> {
    let points = grid.points();
    let one = |p: &CoherentParams| {
        classical::lyapunov_exponent(*p, kappa, steps, transient).map_err(|e| e.at_grid_point(p.theta(), p.phi()))
    };
    let values = match execution {
        Execution::Serial => points.iter().map(one).collect::<Result<Vec<_>>>()?,
        Execution::Parallel => points.par_iter().map(one).collect::<Result<Vec<_>>>()?,
    };
    Ok(ScanField { grid: *grid, observable: Observable::Lyapunov, particles: None, kappa, kicks: steps, values })
}

/// `(κ, λ̄)`: Haar-weighted mean of per-trajectory exponents over the grid.
pub fn lyapunov_sweep(
    kappas: &[f64],
    grid: &GridSpec,
    steps: usize,
    transient: usize,
    execution: Execution,
) -> Result<Vec<(f64, f64)>> {
    if kappas.is_empty() {
        return Err(Error::invalid("kappa", "empty κ list"));
    }
    kappas
        .iter()
        .map(|&k| {
            let field = lyapunov_field(k, grid, steps, transient, execution)?;
            Ok((k, field.phase_space_average(PowerNormalization::HaarMean)))
        })
        .collect()
}
