//! Mean electromagnetic potentials of the dressed electron.
//!
//! Lengths are in units of `1/m`, times likewise, momenta in units of `m`.
//! All functions take the particle as an [`Electron`] so that mass scaling
//! can be checked directly.

mod rest;
mod retarded;
mod uniform;

pub use rest::{
    fit_log_core, log_grid, moment_form_factor, moment_form_factor_derivative, potential_profile,
    potential_rest, potential_rest_small_r, self_energy, spin_vector, vector_potential_moment,
    LogFit, RadialProfile, SelfEnergy,
};
pub use retarded::{
    lienard_wiechert, potential_full_nonrel, potential_retarded, retarded_time, FullBudget,
    FullPotential,
};
pub use uniform::{potential_uniform, UniformSpec};

use crate::{Electron, Error, Result, ThreeVector};

/// Largest speed (in units of c) accepted by the non-relativistic evaluators.
pub const NONREL_SPEED_LIMIT: f64 = 0.3;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TrajectoryKind {
    Rest,
    Uniform,
}

/// Classical mean trajectory `r0(t) = origin + v t`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Trajectory {
    pub kind: TrajectoryKind,
    pub velocity: ThreeVector,
    pub origin: ThreeVector,
}

impl Trajectory {
    pub fn rest(origin: ThreeVector) -> Self {
        Self {
            kind: TrajectoryKind::Rest,
            velocity: ThreeVector::ZERO,
            origin,
        }
    }

    pub fn uniform(origin: ThreeVector, velocity: ThreeVector) -> Result<Self> {
        let speed = velocity.norm();
        if !(speed < 1.0) || !origin.is_finite() {
            return Err(Error::Domain {
                what: "Trajectory::uniform",
                value: speed,
                reason: "speed must be below 1 and the origin finite",
            });
        }
        Ok(Self {
            kind: if speed == 0.0 {
                TrajectoryKind::Rest
            } else {
                TrajectoryKind::Uniform
            },
            velocity,
            origin,
        })
    }

    pub fn position(&self, t: f64) -> ThreeVector {
        self.origin + self.velocity * t
    }

    pub(crate) fn require_nonrelativistic(&self) -> Result<()> {
        let speed = self.velocity.norm();
        if speed < NONREL_SPEED_LIMIT {
            Ok(())
        } else {
            Err(Error::Validity(format!(
                "speed {speed} exceeds the non-relativistic limit {NONREL_SPEED_LIMIT}"
            )))
        }
    }
}

fn check_electron(electron: &Electron) -> Result<()> {
    if electron.mass > 0.0 && electron.mass.is_finite() && electron.charge.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain {
            what: "electron",
            value: electron.mass,
            reason: "mass must be positive and the charge finite",
        })
    }
}
