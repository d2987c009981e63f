//! Soft-photon emission in a collision and the reaction shift `Δ` that
//! removes its infrared divergence.

use std::f64::consts::PI;

use rayon::prelude::*;

use crate::specfun::{gauss_legendre, integrate, GaussRule, QuadratureSpec};
use crate::spinor::polarization_basis;
use crate::{Error, Result, ThreeVector};

/// Largest `|v1|` accepted by [`delta_shift`].
pub const DELTA_SPEED_LIMIT: f64 = 0.5;
/// Allowed `|v1 - v2| / |v1|`.
pub const SMALL_KICK_RATIO: f64 = 0.2;
pub const DELTA_DAMPING: f64 = 0.5;
pub const DELTA_TOLERANCE: f64 = 1e-10;
pub const DELTA_MAX_ITERATIONS: usize = 200;

/// Velocities before and after a soft collision.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CollisionSpec {
    pub v1: ThreeVector,
    pub v2: ThreeVector,
    pub mass: f64,
    /// Coupling `e²`.
    pub alpha: f64,
}

impl CollisionSpec {
    pub fn new(v1: ThreeVector, v2: ThreeVector, mass: f64, alpha: f64) -> Result<Self> {
        let spec = Self { v1, v2, mass, alpha };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.mass > 0.0) || !self.mass.is_finite() {
            return Err(Error::Domain {
                what: "CollisionSpec",
                value: self.mass,
                reason: "mass must be positive",
            });
        }
        if !(self.alpha >= 0.0) || !self.alpha.is_finite() {
            return Err(Error::Domain {
                what: "CollisionSpec",
                value: self.alpha,
                reason: "coupling must be non-negative",
            });
        }
        for v in [self.v1, self.v2] {
            if !(v.norm() < 1.0) {
                return Err(Error::Domain {
                    what: "CollisionSpec",
                    value: v.norm(),
                    reason: "speeds must be below 1",
                });
            }
        }
        let kick = (self.v1 - self.v2).norm();
        let allowed = SMALL_KICK_RATIO * self.v1.norm();
        if kick > allowed * (1.0 + 1e-12) {
            return Err(Error::Validity(format!(
                "|v1 - v2| = {kick} exceeds {SMALL_KICK_RATIO}·|v1| = {allowed}"
            )));
        }
        Ok(())
    }

    /// `p0 = m v1 / sqrt(1 - v1²)` in units of `m`.
    pub fn p0(&self) -> ThreeVector {
        self.v1 * (1.0 / (1.0 - self.v1.norm_sqr()).sqrt())
    }

    pub fn swapped(&self) -> Self {
        Self {
            v1: self.v2,
            v2: self.v1,
            ..*self
        }
    }
}

/// Spectrum of one mode.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectrumSample {
    pub omega: f64,
    pub direction: ThreeVector,
    /// Transverse index, 1 or 2.
    pub alpha: usize,
    pub n: f64,
}

/// Mean photon numbers `(n1, n2)` of the two transverse modes,
/// `n_α = e² (2π/ω) |e_α·v2/(ω - q·v2 + Δ) - e_α·v1/(ω - q·v1 + Δ)|²`.
pub fn photon_spectrum(
    spec: &CollisionSpec,
    omega: f64,
    direction: ThreeVector,
    delta: f64,
) -> Result<(f64, f64)> {
    if !(omega > 0.0) || !omega.is_finite() {
        return Err(Error::Domain {
            what: "photon_spectrum",
            value: omega,
            reason: "photon energy must be positive",
        });
    }
    if !(delta >= 0.0) || !delta.is_finite() {
        return Err(Error::Domain {
            what: "photon_spectrum",
            value: delta,
            reason: "shift must be non-negative",
        });
    }
    let n = direction.unit().ok_or(Error::Domain {
        what: "photon_spectrum",
        value: 0.0,
        reason: "direction must be non-zero",
    })?;
    let basis = polarization_basis(n * omega)?;
    let a = bracket(spec, omega, n, delta)?;
    let g2 = 2.0 * PI / omega;
    let e1 = basis.vectors[1].spatial();
    let e2 = basis.vectors[2].spatial();
    Ok((
        spec.alpha * g2 * e1.dot(a).powi(2),
        spec.alpha * g2 * e2.dot(a).powi(2),
    ))
}

/// `v2/(ω - q·v2 + Δ) - v1/(ω - q·v1 + Δ)` for unit `n`.
fn bracket(spec: &CollisionSpec, omega: f64, n: ThreeVector, delta: f64) -> Result<ThreeVector> {
    let d1 = omega * (1.0 - n.dot(spec.v1)) + delta;
    let d2 = omega * (1.0 - n.dot(spec.v2)) + delta;
    if d1 == 0.0 || d2 == 0.0 {
        return Err(Error::Domain {
            what: "photon_spectrum",
            value: omega,
            reason: "classical pole ω = q·v",
        });
    }
    Ok(spec.v2 * (1.0 / d2) - spec.v1 * (1.0 / d1))
}

/// Product rule over the sphere: Gauss-Legendre in `cos θ`, trapezoid in `φ`.
#[derive(Debug, Clone, PartialEq)]
pub struct SphereGrid {
    polar: GaussRule,
    n_phi: usize,
}

impl SphereGrid {
    pub fn new(n_polar: usize, n_phi: usize) -> Result<Self> {
        if n_polar < 2 || n_phi < 3 {
            return Err(Error::InvalidSpec("sphere grid too small"));
        }
        Ok(Self {
            polar: gauss_legendre(n_polar),
            n_phi,
        })
    }

    fn integrate(&self, f: impl Fn(ThreeVector) -> f64 + Sync) -> f64 {
        let w_phi = 2.0 * PI / self.n_phi as f64;
        self.polar
            .nodes
            .par_iter()
            .zip(self.polar.weights.par_iter())
            .map(|(&x, &w)| {
                let s = (1.0 - x * x).max(0.0).sqrt();
                (0..self.n_phi)
                    .map(|j| {
                        let (sp, cp) = (w_phi * j as f64).sin_cos();
                        f(ThreeVector::new(s * cp, s * sp, x))
                    })
                    .sum::<f64>()
                    * w
                    * w_phi
            })
            .sum()
    }
}

impl Default for SphereGrid {
    fn default() -> Self {
        Self::new(64, 64).expect("valid grid")
    }
}

/// `Σ_α ∫dΩ n_α(ω, Ω)`, using `Σ_α (e_α·a)² = |a|² - (n·a)²`.
pub fn angular_spectrum(spec: &CollisionSpec, omega: f64, delta: f64, grid: &SphereGrid) -> Result<f64> {
    if !(omega > 0.0) || !(delta >= 0.0) {
        return Err(Error::Domain {
            what: "angular_spectrum",
            value: omega,
            reason: "need ω > 0 and Δ ≥ 0",
        });
    }
    let g2 = 2.0 * PI / omega;
    let total = grid.integrate(|n| match bracket(spec, omega, n, delta) {
        Ok(a) => a.norm_sqr() - n.dot(a).powi(2),
        Err(_) => f64::NAN,
    });
    if !total.is_finite() {
        return Err(Error::NonFiniteSample { abscissa: omega });
    }
    Ok(spec.alpha * g2 * total)
}

/// `N(ω_min, ω_max) = ∫d³q/(2π)³ Σ_α n_α`, integrated over `ln ω`.
pub fn total_photon_number(
    spec: &CollisionSpec,
    delta: f64,
    omega_min: f64,
    omega_max: f64,
    grid: &SphereGrid,
) -> Result<f64> {
    if !(omega_min > 0.0) || !(omega_max > omega_min) || !omega_max.is_finite() {
        return Err(Error::Domain {
            what: "total_photon_number",
            value: omega_min,
            reason: "need 0 < ω_min < ω_max",
        });
    }
    let qspec = QuadratureSpec::default().with_tolerances(1e-300, 1e-10);
    let res = integrate(
        |s: f64| {
            let w = s.exp();
            angular_spectrum(spec, w, delta, grid).map_or(f64::NAN, |a| w * w * w * a)
        },
        omega_min.ln(),
        omega_max.ln(),
        &qspec,
    )?
    .require_converged()?;
    Ok(res.value / (8.0 * PI * PI * PI))
}

/// Power-law fits of `ω³ Σ∫n dΩ` below and above `Δ` and their crossing.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KneeFit {
    pub low_exponent: f64,
    pub high_exponent: f64,
    pub knee: f64,
    /// `knee / Δ`
    pub knee_over_delta: f64,
}

fn loglog_fit(points: &[(f64, f64)]) -> (f64, f64) {
    let n = points.len() as f64;
    let (mx, my) = points
        .iter()
        .fold((0.0, 0.0), |(a, b), &(x, y)| (a + x.ln() / n, b + y.ln() / n));
    let sxy: f64 = points.iter().map(|&(x, y)| (x.ln() - mx) * (y.ln() - my)).sum();
    let sxx: f64 = points.iter().map(|&(x, _)| (x.ln() - mx).powi(2)).sum();
    let slope = sxy / sxx;
    (slope, my - slope * mx)
}

/// Log-log slope of `y(x)` by least squares over the samples.
pub fn loglog_slope(points: &[(f64, f64)]) -> f64 {
    loglog_fit(points).0
}

pub fn knee_fit(spec: &CollisionSpec, delta: f64, grid: &SphereGrid) -> Result<KneeFit> {
    if !(delta > 0.0) {
        return Err(Error::Domain {
            what: "knee_fit",
            value: delta,
            reason: "the knee needs Δ > 0",
        });
    }
    let sample = |lo: f64, hi: f64| -> Result<Vec<(f64, f64)>> {
        (0..9)
            .map(|i| {
                let w = delta * lo * (hi / lo).powf(i as f64 / 8.0);
                angular_spectrum(spec, w, delta, grid).map(|s| (w, w * w * w * s))
            })
            .collect()
    };
    let (low_exponent, low_c) = loglog_fit(&sample(1e-3, 1e-2)?);
    let (high_exponent, high_c) = loglog_fit(&sample(1e2, 1e3)?);
    let knee = ((high_c - low_c) / (low_exponent - high_exponent)).exp();
    Ok(KneeFit {
        low_exponent,
        high_exponent,
        knee,
        knee_over_delta: knee / delta,
    })
}

/// Radial and angular resolution of the `Δ` functional.
#[derive(Debug, Clone, PartialEq)]
pub struct DeltaGrid {
    pub polar: usize,
    pub radial: QuadratureSpec,
    /// Upper end of the `q'` integral; `None` integrates to infinity.
    pub q_max: Option<f64>,
}

impl Default for DeltaGrid {
    fn default() -> Self {
        Self {
            polar: 48,
            radial: QuadratureSpec::default().with_tolerances(1e-300, 1e-12),
            q_max: None,
        }
    }
}

/// One application of the reaction-shift functional, in units of `m`:
/// `F(Δ) = 2e² ∫d³q/(2π)³ (2π/q) (p0² - (q̂·p0)²) / (ε₋ε₊ (q - ε₊ + ε₋ + Δ))`.
pub fn delta_functional(spec: &CollisionSpec, delta: f64, grid: &DeltaGrid) -> Result<f64> {
    let p0 = spec.p0();
    let p = p0.norm();
    if p == 0.0 || spec.alpha == 0.0 {
        return Ok(0.0);
    }
    let rule = gauss_legendre(grid.polar);
    let radial = |q: f64| -> f64 {
        rule.nodes
            .iter()
            .zip(&rule.weights)
            .map(|(&x, &w)| {
                // q' along x relative to p0: q'·p0 = q p x
                let plus = (1.0 + p * p + 0.25 * q * q + p * q * x).sqrt();
                let minus = (1.0 + p * p + 0.25 * q * q - p * q * x).sqrt();
                let nu = 2.0 * p * q * x / (plus + minus);
                w * p * p * (1.0 - x * x) / (plus * minus * (q - nu + delta))
            })
            .sum::<f64>()
            * q
    };
    let upper = grid.q_max.unwrap_or(f64::INFINITY);
    let res = integrate(radial, 0.0, upper, &grid.radial)?.require_converged()?;
    // 2e² · 2π/(2π)³ · 2π (azimuth)
    Ok(spec.alpha / PI * res.value)
}

#[derive(Debug, Clone, PartialEq)]
pub struct DeltaShift {
    /// Converged `Δ`, units of energy.
    pub delta: f64,
    /// Non-relativistic estimate `(4/3) e² m v1²` used as the seed.
    pub seed: f64,
    /// `F(seed)`, the lowest-order value.
    pub first_iterate: f64,
    pub iterations: usize,
    /// `Δ` after each damped step, starting with the seed.
    pub trace: Vec<f64>,
    /// `Δ / (e² m v1²)`
    pub coefficient: f64,
}

/// Solves `Δ = F(Δ)` by damped iteration.
pub fn delta_shift(spec: &CollisionSpec) -> Result<DeltaShift> {
    delta_shift_with(spec, &DeltaGrid::default())
}

pub fn delta_shift_with(spec: &CollisionSpec, grid: &DeltaGrid) -> Result<DeltaShift> {
    spec.validate()?;
    let speed = spec.v1.norm();
    if speed > DELTA_SPEED_LIMIT {
        return Err(Error::Validity(format!(
            "|v1| = {speed} exceeds the validity limit {DELTA_SPEED_LIMIT}"
        )));
    }
    let m = spec.mass;
    let v2 = speed * speed;
    let seed = 4.0 / 3.0 * spec.alpha * v2;
    let coefficient = |d: f64| if v2 * spec.alpha > 0.0 { d / (spec.alpha * v2) } else { 0.0 };
    if seed == 0.0 {
        return Ok(DeltaShift {
            delta: 0.0,
            seed: 0.0,
            first_iterate: 0.0,
            iterations: 0,
            trace: vec![0.0],
            coefficient: 0.0,
        });
    }
    let mut current = seed;
    let mut trace = vec![seed];
    let mut first_iterate = f64::NAN;
    let mut last_change = f64::INFINITY;
    for it in 1..=DELTA_MAX_ITERATIONS {
        let image = delta_functional(spec, current, grid)?;
        if it == 1 {
            first_iterate = image;
        }
        let next = (1.0 - DELTA_DAMPING) * current + DELTA_DAMPING * image;
        last_change = (next - current).abs() / next.abs();
        trace.push(next);
        current = next;
        if last_change < DELTA_TOLERANCE {
            return Ok(DeltaShift {
                delta: m * current,
                seed: m * seed,
                first_iterate: m * first_iterate,
                iterations: it,
                trace: trace.into_iter().map(|d| m * d).collect(),
                coefficient: coefficient(current),
            });
        }
    }
    Err(Error::NonConvergence {
        what: "delta_shift",
        iterations: DELTA_MAX_ITERATIONS,
        last_change,
        history: trace.into_iter().map(|d| m * d).collect(),
    })
}

/// Spectrum samples on a direction list, both transverse modes.
pub fn spectrum_samples(
    spec: &CollisionSpec,
    omegas: &[f64],
    directions: &[ThreeVector],
    delta: f64,
) -> Result<Vec<SpectrumSample>> {
    let mut out = Vec::with_capacity(2 * omegas.len() * directions.len());
    for &omega in omegas {
        for &d in directions {
            let (n1, n2) = photon_spectrum(spec, omega, d, delta)?;
            let direction = d.unit().expect("checked by photon_spectrum");
            out.push(SpectrumSample { omega, direction, alpha: 1, n: n1 });
            out.push(SpectrumSample { omega, direction, alpha: 2, n: n2 });
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(v: f64) -> CollisionSpec {
        CollisionSpec::new(
            ThreeVector::new(v, 0.0, 0.0),
            ThreeVector::new(0.9 * v, 0.05 * v, 0.0),
            1.0,
            crate::FINE_STRUCTURE,
        )
        .unwrap()
    }

    #[test]
    fn validity_guards() {
        let x = ThreeVector::X;
        assert!(CollisionSpec::new(x * 0.1, x * 0.05, 1.0, 0.01).is_err());
        // Exactly at the guard.
        assert!(CollisionSpec::new(x * 0.1, x * 0.08, 1.0, 0.01).is_ok());
        assert!(CollisionSpec::new(x * 0.7, x * 0.7, 1.0, 0.01).is_ok());
        assert!(delta_shift(&CollisionSpec::new(x * 0.7, x * 0.7, 1.0, 0.01).unwrap()).is_err());
        assert!(CollisionSpec::new(x, x, 1.0, 0.01).is_err());
    }

    #[test]
    fn identical_velocities_do_not_radiate() {
        let s = CollisionSpec::new(ThreeVector::X * 0.1, ThreeVector::X * 0.1, 1.0, 0.01).unwrap();
        let (n1, n2) = photon_spectrum(&s, 0.01, ThreeVector::new(0.3, 0.4, 0.5), 1e-5).unwrap();
        assert_eq!((n1, n2), (0.0, 0.0));
    }

    #[test]
    fn rest_particle_has_no_shift() {
        let s = CollisionSpec::new(ThreeVector::ZERO, ThreeVector::ZERO, 1.0, 0.01).unwrap();
        let d = delta_shift(&s).unwrap();
        assert_eq!(d.delta, 0.0);
    }

    #[test]
    fn polarization_sum_matches_transverse_projection() {
        let s = spec(0.1);
        let delta = 1e-5;
        for n in [ThreeVector::new(0.1, 0.7, -0.7), ThreeVector::Z, ThreeVector::X] {
            let (n1, n2) = photon_spectrum(&s, 3e-4, n, delta).unwrap();
            let u = n.unit().unwrap();
            let a = bracket(&s, 3e-4, u, delta).unwrap();
            let expected = s.alpha * 2.0 * PI / 3e-4 * (a.norm_sqr() - u.dot(a).powi(2));
            assert!((n1 + n2 - expected).abs() < 1e-12 * expected);
        }
    }

    #[test]
    fn shift_trace_starts_at_seed() {
        let d = delta_shift(&spec(0.05)).unwrap();
        assert_eq!(d.trace[0], d.seed);
        assert!(d.iterations >= 1 && d.trace.len() == d.iterations + 1);
        assert!(d.delta > 0.0);
    }
}
