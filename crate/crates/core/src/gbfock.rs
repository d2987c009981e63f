//! Single scalar-photon mode with the indefinite Gupta-Bleuler metric on a
//! truncated Fock space.
//!
//! The representation is `B|n> = -√n |n-1>`, `B†|n> = √(n+1) |n+1>` and
//! `η = diag((-1)^n)`, so that `[B, B†] = -1` and `B† = η B^H η`.

use std::f64::consts::PI;

use crate::linalg::{euclidean_norm, rk4, CMatrix};
use crate::specfun::{integrate, QuadratureSpec};
use crate::{Complex64, Error, Result};

pub const MIN_DIMENSION: usize = 4;
/// `|Q|² ≤ N / TRUNCATION_GUARD` for coherent states.
pub const TRUNCATION_GUARD: f64 = 4.0;
/// Relative difference allowed between `steps` and `2·steps` integrations.
pub const STEP_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct TruncatedFockSpace {
    pub dim: usize,
    pub omega: f64,
    pub b: CMatrix,
    pub b_dag: CMatrix,
    /// Diagonal of `η`.
    pub eta: Vec<f64>,
    /// `-ω B†B`
    pub h0: CMatrix,
}

pub fn build_space(dim: usize, omega: f64) -> Result<TruncatedFockSpace> {
    if dim < MIN_DIMENSION {
        return Err(Error::Domain {
            what: "build_space",
            value: dim as f64,
            reason: "truncation dimension must be at least 4",
        });
    }
    if !omega.is_finite() {
        return Err(Error::Domain {
            what: "build_space",
            value: omega,
            reason: "frequency must be finite",
        });
    }
    let mut b = CMatrix::zeros(dim);
    let mut b_dag = CMatrix::zeros(dim);
    for n in 1..dim {
        let s = (n as f64).sqrt();
        b[(n - 1, n)] = Complex64::new(-s, 0.0);
        b_dag[(n, n - 1)] = Complex64::new(s, 0.0);
    }
    let eta = (0..dim).map(|n| if n % 2 == 0 { 1.0 } else { -1.0 }).collect();
    let h0 = (&b_dag * &b).scale(Complex64::new(-omega, 0.0));
    Ok(TruncatedFockSpace {
        dim,
        omega,
        b,
        b_dag,
        eta,
        h0,
    })
}

impl TruncatedFockSpace {
    pub fn commutator(&self) -> CMatrix {
        &(&self.b * &self.b_dag) - &(&self.b_dag * &self.b)
    }

    pub fn vacuum(&self) -> FockVector {
        let mut coeffs = vec![Complex64::new(0.0, 0.0); self.dim];
        coeffs[0] = Complex64::new(1.0, 0.0);
        FockVector { coeffs }
    }

    fn check_guard(&self, q: Complex64) -> Result<()> {
        let limit = self.dim as f64 / TRUNCATION_GUARD;
        if q.norm_sqr() <= limit && q.is_finite() {
            Ok(())
        } else {
            Err(Error::Validity(format!(
                "|Q|² = {} exceeds the truncation guard N/{TRUNCATION_GUARD} = {limit}",
                q.norm_sqr()
            )))
        }
    }

    /// `α B† e^{iωt} + α* B e^{-iωt}` applied to `psi`.
    pub fn interaction_apply(&self, alpha: Complex64, t: f64, psi: &[Complex64]) -> Vec<Complex64> {
        let phase = Complex64::from_polar(1.0, self.omega * t);
        let up = self.b_dag.apply(psi);
        let down = self.b.apply(psi);
        up.iter()
            .zip(&down)
            .map(|(u, d)| alpha * phase * u + alpha.conj() * phase.conj() * d)
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FockVector {
    pub coeffs: Vec<Complex64>,
}

impl FockVector {
    /// `<self| η |other>`
    pub fn eta_inner(&self, other: &FockVector) -> Complex64 {
        self.coeffs
            .iter()
            .zip(&other.coeffs)
            .enumerate()
            .map(|(n, (a, b))| a.conj() * b * if n % 2 == 0 { 1.0 } else { -1.0 })
            .sum()
    }

    pub fn eta_norm(&self) -> f64 {
        self.eta_inner(self).re
    }

    /// Ordinary Euclidean norm of the coefficient vector.
    pub fn aux_norm(&self) -> f64 {
        euclidean_norm(&self.coeffs)
    }

    /// `|c_{N-1}|²`, the truncation diagnostic.
    pub fn tail_mass(&self) -> f64 {
        self.coeffs.last().map_or(0.0, |c| c.norm_sqr())
    }

    pub fn aux_distance(&self, other: &FockVector) -> f64 {
        self.coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt()
    }
}

/// `exp(Q B† - Q* B)|vac>` by matrix exponentiation.
pub fn displaced_vacuum(space: &TruncatedFockSpace, q: Complex64) -> Result<FockVector> {
    space.check_guard(q)?;
    if q == Complex64::new(0.0, 0.0) {
        return Ok(space.vacuum());
    }
    let generator = &space.b_dag.scale(q) - &space.b.scale(q.conj());
    let d = generator.expm();
    Ok(FockVector {
        coeffs: (0..space.dim).map(|n| d[(n, 0)]).collect(),
    })
}

/// Series form `e^{|Q|²/2} Σ Q^n/√(n!) |n>`.
pub fn displaced_vacuum_series(space: &TruncatedFockSpace, q: Complex64) -> Result<FockVector> {
    space.check_guard(q)?;
    let mut coeffs = Vec::with_capacity(space.dim);
    let mut c = Complex64::new((0.5 * q.norm_sqr()).exp(), 0.0);
    for n in 0..space.dim {
        if n > 0 {
            c = c * q / (n as f64).sqrt();
        }
        coeffs.push(c);
    }
    Ok(FockVector { coeffs })
}

/// `‖B v + Q v‖ / ‖v‖` in the Euclidean norm.
pub fn eigen_residual(space: &TruncatedFockSpace, v: &FockVector, q: Complex64) -> f64 {
    let bv = space.b.apply(&v.coeffs);
    let r: Vec<Complex64> = bv.iter().zip(&v.coeffs).map(|(a, c)| a + q * c).collect();
    euclidean_norm(&r) / v.aux_norm()
}

#[derive(Debug, Clone, PartialEq)]
pub struct ForcedEvolution {
    /// `Q(t) = -i ∫ α(t') e^{iωt'} dt'`
    pub q: Complex64,
    /// `∫ Im[Q̇* Q] dt'`, the phase that makes the closed form solve the
    /// interaction-picture equation.
    pub phase: f64,
    /// Half of `phase`, the coefficient as typeset in the closed form.
    pub printed_phase: f64,
    pub closed: FockVector,
    pub stepped: FockVector,
    /// `<closed| η |stepped>`
    pub overlap: Complex64,
    /// `‖closed - stepped‖ / ‖closed‖`, Euclidean.
    pub aux_difference: f64,
    /// Euclidean difference between the `steps` and `2·steps` runs.
    pub step_residual: f64,
    pub steps: usize,
}

/// Forced scalar oscillator from the vacuum at `t0`, both in closed form and
/// by direct RK4 integration of the interaction-picture equation.
pub fn evolve_forced<F>(
    space: &TruncatedFockSpace,
    alpha: F,
    t0: f64,
    t: f64,
    steps: usize,
) -> Result<ForcedEvolution>
where
    F: Fn(f64) -> Complex64 + Sync,
{
    if steps == 0 || !t0.is_finite() || !t.is_finite() {
        return Err(Error::InvalidSpec("evolve_forced needs steps > 0 and finite times"));
    }
    let omega = space.omega;
    let spec = QuadratureSpec::default().with_tolerances(1e-15, 1e-13);
    let q_dot = |s: f64| Complex64::new(0.0, -1.0) * alpha(s) * Complex64::from_polar(1.0, omega * s);
    let q_at = |s: f64| -> Result<Complex64> {
        if s == t0 {
            return Ok(Complex64::new(0.0, 0.0));
        }
        Ok(integrate(q_dot, t0, s, &spec)?.require_converged()?.value)
    };
    let q = q_at(t)?;
    let phase = if t == t0 {
        0.0
    } else {
        integrate(
            |s: f64| q_at(s).map_or(f64::NAN, |qs| (q_dot(s).conj() * qs).im),
            t0,
            t,
            &spec,
        )?
        .require_converged()?
        .value
    };
    let closed = displaced_vacuum(space, q)?;
    let closed = FockVector {
        coeffs: closed
            .coeffs
            .iter()
            .map(|c| c * Complex64::from_polar(1.0, phase))
            .collect(),
    };

    let rhs = |s: f64, psi: &[Complex64]| -> Vec<Complex64> {
        space
            .interaction_apply(alpha(s), s, psi)
            .into_iter()
            .map(|x| x * Complex64::new(0.0, -1.0))
            .collect()
    };
    let vac = space.vacuum().coeffs;
    let coarse = rk4(rhs, t0, t, &vac, steps);
    let fine = rk4(rhs, t0, t, &vac, 2 * steps);
    let step_residual = euclidean_norm(
        &coarse.iter().zip(&fine).map(|(a, b)| a - b).collect::<Vec<_>>(),
    ) / euclidean_norm(&fine);
    if step_residual > STEP_TOLERANCE {
        return Err(Error::StepCount {
            steps,
            residual: step_residual,
            tolerance: STEP_TOLERANCE,
        });
    }
    let stepped = FockVector { coeffs: fine };
    let overlap = closed.eta_inner(&stepped);
    let aux_difference = closed.aux_distance(&stepped) / closed.aux_norm();
    Ok(ForcedEvolution {
        q,
        phase,
        printed_phase: 0.5 * phase,
        closed,
        stepped,
        overlap,
        aux_difference,
        step_residual,
        steps: 2 * steps,
    })
}

/// `Σ_{n<N} (-1)^n |Q|^{2n}/n! · e^{|Q|²}`, the η-norm of the truncated
/// series state.
pub fn truncated_eta_norm(dim: usize, q: Complex64) -> f64 {
    let x = q.norm_sqr();
    let mut term = 1.0;
    let mut sum = 0.0;
    for n in 0..dim {
        if n > 0 {
            term *= -x / n as f64;
        }
        sum += term;
    }
    sum * x.exp()
}

/// Frequency of the single mode in cycles, for reporting.
pub fn period(space: &TruncatedFockSpace) -> f64 {
    2.0 * PI / space.omega
}
