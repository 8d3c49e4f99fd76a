//! Classical kicked-top map on the unit sphere, its tangent map, phase
//! portraits and the largest Lyapunov exponent.

use std::f64::consts::PI;

use nalgebra::{Matrix3, Vector3};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spin::CoherentParams;

/// Rescaled angular momentum `(X, Y, Z) = ⟨J⟩ / j` on the unit sphere.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClassicalState {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl ClassicalState {
    pub fn new(x: f64, y: f64, z: f64) -> Self {
        Self { x, y, z }
    }

    /// `(sin θ cos φ, sin θ sin φ, cos θ)`.
    pub fn from_angles(p: CoherentParams) -> Self {
        let (st, ct) = p.theta().sin_cos();
        let (sp, cp) = p.phi().sin_cos();
        Self { x: st * cp, y: st * sp, z: ct }
    }

    /// Inverse of [`Self::from_angles`]; `φ = 0` at the poles.
    pub fn to_angles(&self) -> CoherentParams {
        let r = self.norm();
        let theta = (self.z / r).clamp(-1.0, 1.0).acos();
        let phi = if self.x == 0.0 && self.y == 0.0 { 0.0 } else { self.y.atan2(self.x) };
        CoherentParams::new(theta, phi).expect("acos and atan2 stay in range")
    }

    pub fn as_vector(&self) -> Vector3<f64> {
        Vector3::new(self.x, self.y, self.z)
    }

    pub fn norm(&self) -> f64 {
        self.as_vector().norm()
    }

    /// One kick: a quarter turn about x followed by a twist about z by `κ Y`.
    ///
    /// ```text
    /// X' = X cos(κY) + Z sin(κY)
    /// Y' = X sin(κY) - Z cos(κY)
    /// Z' = Y
    /// ```
    pub fn kick(&self, kappa: f64) -> Self {
        let (s, c) = (kappa * self.y).sin_cos();
        Self { x: self.x * c + self.z * s, y: self.x * s - self.z * c, z: self.y }
    }

    /// Jacobian of [`Self::kick`] at this point.
    #[rustfmt::skip]
    pub fn jacobian(&self, kappa: f64) -> Matrix3<f64> {
        let (s, c) = (kappa * self.y).sin_cos();
        let (x, z) = (self.x, self.z);
        Matrix3::new(
            c, kappa * (z * c - x * s), s,
            s, kappa * (x * c + z * s), -c,
            0.0, 1.0, 0.0,
        )
    }
}

/// Base point plus a unit tangent vector, with the running sum of log stretch
/// factors.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TangentFrame {
    pub base: ClassicalState,
    pub v: Vector3<f64>,
    pub log_norm_accum: f64,
    pub steps: usize,
}

impl TangentFrame {
    /// Starts with `v` along the local `∂/∂θ` direction, or the x axis at
    /// the poles.
    pub fn new(start: CoherentParams) -> Self {
        let base = ClassicalState::from_angles(start);
        let (st, ct) = start.theta().sin_cos();
        let (sp, cp) = start.phi().sin_cos();
        let mut v = Vector3::new(ct * cp, ct * sp, -st);
        if st.abs() < 1e-12 {
            v = Vector3::new(1.0, 0.0, 0.0);
        }
        Self { base, v: v.normalize(), log_norm_accum: 0.0, steps: 0 }
    }

    /// Advances base and tangent vector one kick and returns `ln ‖J v‖`.
    pub fn step(&mut self, kappa: f64) -> f64 {
        let jac = self.base.jacobian(kappa);
        self.base = self.base.kick(kappa);
        let mut v = jac * self.v;
        // stay in the tangent plane
        let r = self.base.as_vector();
        v -= r * (r.dot(&v) / r.norm_squared());
        let stretch = v.norm();
        self.v = v / stretch;
        let ln = stretch.ln();
        self.log_norm_accum += ln;
        self.steps += 1;
        ln
    }
}

/// Largest Lyapunov exponent of the kick map from `start`: mean log stretch
/// over `steps - transient` kicks, after discarding the first `transient`.
/// Regular orbits may yield small negative values; these are not clamped.
pub fn lyapunov_exponent(start: CoherentParams, kappa: f64, steps: usize, transient: usize) -> Result<f64> {
    if transient >= steps {
        return Err(Error::invalid("steps", format!("steps ({steps}) must exceed transient ({transient})")));
    }
    if !(kappa.is_finite() && kappa >= 0.0) {
        return Err(Error::invalid("kappa", format!("{kappa} must be finite and >= 0")));
    }
    let mut frame = TangentFrame::new(start);
    for _ in 0..transient {
        frame.step(kappa);
    }
    frame.log_norm_accum = 0.0;
    for _ in transient..steps {
        frame.step(kappa);
    }
    Ok(frame.log_norm_accum / (steps - transient) as f64)
}

/// One point of a phase portrait.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PortraitPoint {
    pub trajectory: usize,
    pub kick: usize,
    pub theta: f64,
    pub phi: f64,
}

/// `count` initial conditions drawn uniformly on the sphere from a seeded
/// ChaCha8 stream.
pub fn uniform_sphere_points(count: usize, seed: u64) -> Vec<CoherentParams> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let z: f64 = rng.gen_range(-1.0..=1.0);
            let phi: f64 = rng.gen_range(-PI..PI);
            CoherentParams::new(z.acos(), phi).expect("sampled angles are in range")
        })
        .collect()
}

/// Orbits of `trajectories` seeded initial conditions; `(θ, φ)` is recorded
/// after every kick, so the result has `trajectories × kicks` points.
pub fn phase_portrait(kappa: f64, trajectories: usize, kicks: usize, seed: u64) -> Result<Vec<PortraitPoint>> {
    if !(kappa.is_finite() && kappa >= 0.0) {
        return Err(Error::invalid("kappa", format!("{kappa} must be finite and >= 0")));
    }
    if trajectories == 0 {
        return Err(Error::invalid("trajectories", "must be at least 1"));
    }
    if kicks == 0 {
        return Err(Error::invalid("kicks", "must be at least 1"));
    }
    let mut points = Vec::with_capacity(trajectories * kicks);
    for (trajectory, start) in uniform_sphere_points(trajectories, seed).into_iter().enumerate() {
        let mut c = ClassicalState::from_angles(start);
        for kick in 1..=kicks {
            c = c.kick(kappa);
            let a = c.to_angles();
            points.push(PortraitPoint { trajectory, kick, theta: a.theta(), phi: a.phi() });
        }
    }
    Ok(points)
}
