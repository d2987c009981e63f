use std::f64::consts::PI;

use rayon::prelude::*;

use crate::specfun::{bessel_k0, integrate, k0_cumulative, QuadratureSpec, EULER_GAMMA};
use crate::{Electron, Error, Result, Spin, ThreeVector};

fn check_radius(what: &'static str, r: f64) -> Result<()> {
    if r > 0.0 && r.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain {
            what,
            value: r,
            reason: "radius must be positive and finite",
        })
    }
}

/// Magnetic-moment form factor `Φ(r) = (2/(πr)) ∫₀^{2mr} K0`.
pub fn moment_form_factor(r: f64, mass: f64) -> Result<f64> {
    check_radius("moment_form_factor", r)?;
    Ok(2.0 / (PI * r) * k0_cumulative(2.0 * mass * r)?)
}

/// `dΦ/dr = (4m/(πr)) K0(2mr) - Φ(r)/r`.
pub fn moment_form_factor_derivative(r: f64, mass: f64) -> Result<f64> {
    let phi = moment_form_factor(r, mass)?;
    let k0 = bessel_k0(2.0 * mass * r)?;
    Ok(4.0 * mass / (PI * r) * k0 - phi / r)
}

/// Rest-frame scalar potential `A0(r) = e Φ(r)`.
pub fn potential_rest(r: f64, electron: &Electron) -> Result<f64> {
    check_radius("potential_rest", r)?;
    Ok(electron.charge * moment_form_factor(r, electron.mass)?)
}

/// Spin vector `s` with `|s| = 1/2` along `z`.
pub fn spin_vector(spin: Spin) -> ThreeVector {
    ThreeVector::Z * spin.projection()
}

/// Vector potential of the magnetic moment, `A = ∇Φ × μ` with
/// `μ = (e/m) s`.
pub fn vector_potential_moment(
    r: ThreeVector,
    spin: ThreeVector,
    electron: &Electron,
) -> Result<ThreeVector> {
    let radius = r.norm();
    check_radius("vector_potential_moment", radius)?;
    if (spin.norm() - 0.5).abs() > 1e-12 {
        return Err(Error::Validity(format!(
            "spin vector must have length 1/2, got {}",
            spin.norm()
        )));
    }
    let mu = spin * (electron.charge / electron.mass);
    let grad = r * (moment_form_factor_derivative(radius, electron.mass)? / radius);
    Ok(grad.cross(mu))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SelfEnergy {
    pub numeric: f64,
    /// `e² m`
    pub analytic: f64,
    pub relative_error: f64,
    pub quadrature_error: f64,
}

/// Electrostatic field energy `(8/π²)(em)² ∫₀^∞ K0²(2mr) dr` of the
/// regularized potential.
pub fn self_energy(electron: &Electron) -> Result<SelfEnergy> {
    let m = electron.mass;
    if !(m > 0.0) || !m.is_finite() {
        return Err(Error::Domain {
            what: "self_energy",
            value: m,
            reason: "mass must be positive and finite",
        });
    }
    // Substitute x = 2mr.
    let integral = integrate(
        |x: f64| bessel_k0(x).map_or(0.0, |k| k * k),
        0.0,
        f64::INFINITY,
        &QuadratureSpec::default().with_tolerances(1e-15, 1e-12),
    )?
    .require_converged()?;
    let e2m2 = (electron.charge * m).powi(2);
    let prefactor = 8.0 / (PI * PI) * e2m2 / (2.0 * m);
    let numeric = prefactor * integral.value;
    let analytic = electron.alpha() * m;
    let relative_error = if analytic == 0.0 {
        numeric.abs()
    } else {
        ((numeric - analytic) / analytic).abs()
    };
    Ok(SelfEnergy {
        numeric,
        analytic,
        relative_error,
        quadrature_error: prefactor * integral.error_estimate,
    })
}

/// Sampled radial curve with the parameters that produced it.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialProfile {
    pub quantity: String,
    pub electron: Electron,
    /// `(r, value)` with `r` strictly ascending.
    pub samples: Vec<(f64, f64)>,
    pub parameters: Vec<(String, f64)>,
}

/// `points` logarithmically spaced radii in `[r_min, r_max]`.
pub fn log_grid(r_min: f64, r_max: f64, points: usize) -> Result<Vec<f64>> {
    check_radius("log_grid", r_min)?;
    check_radius("log_grid", r_max)?;
    if r_max < r_min || (points > 1 && r_max == r_min) {
        return Err(Error::Validity(format!(
            "radial range [{r_min}, {r_max}] must be ascending"
        )));
    }
    Ok(match points {
        0 => Vec::new(),
        1 => vec![r_min],
        n => {
            let (a, b) = (r_min.ln(), r_max.ln());
            (0..n)
                .map(|i| {
                    if i + 1 == n {
                        r_max
                    } else {
                        (a + (b - a) * i as f64 / (n - 1) as f64).exp()
                    }
                })
                .collect()
        }
    })
}

/// Rest-frame potential sampled on a logarithmic grid.
pub fn potential_profile(
    electron: &Electron,
    r_min: f64,
    r_max: f64,
    points: usize,
) -> Result<RadialProfile> {
    let radii = log_grid(r_min, r_max, points)?;
    let samples = radii
        .par_iter()
        .map(|&r| potential_rest(r, electron).map(|a| (r, a)))
        .collect::<Result<Vec<_>>>()?;
    Ok(RadialProfile {
        quantity: "a0".into(),
        electron: *electron,
        samples,
        parameters: vec![
            ("r_min".into(), r_min),
            ("r_max".into(), r_max),
            ("points".into(), points as f64),
        ],
    })
}

/// Least-squares fit `A0 ≈ a + b ln(1/r)` over a logarithmic grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogFit {
    pub a: f64,
    pub b: f64,
    /// Largest `|A0 - fit| / A0` over the grid.
    pub max_relative_residual: f64,
    /// `4em/π`, the coefficient of the small-argument expansion.
    pub series_coefficient: f64,
    /// `em/π`, the coefficient quoted for the `ln(e/mr)` form.
    pub quoted_coefficient: f64,
}

pub fn fit_log_core(electron: &Electron, r_min: f64, r_max: f64, points: usize) -> Result<LogFit> {
    if points < 3 {
        return Err(Error::Validity("log fit needs at least 3 points".into()));
    }
    let radii = log_grid(r_min, r_max, points)?;
    let xs: Vec<f64> = radii.iter().map(|r| -r.ln()).collect();
    let ys = radii
        .iter()
        .map(|&r| potential_rest(r, electron))
        .collect::<Result<Vec<_>>>()?;
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let b = sxy / sxx;
    let a = my - b * mx;
    let max_relative_residual = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| ((a + b * x - y) / y).abs())
        .fold(0.0, f64::max);
    let em = electron.charge * electron.mass;
    Ok(LogFit {
        a,
        b,
        max_relative_residual,
        series_coefficient: 4.0 * em / PI,
        quoted_coefficient: em / PI,
    })
}

/// Small-radius expansion `(4em/π)(ln(1/(mr)) + 1 - γ)` of `A0`.
pub fn potential_rest_small_r(r: f64, electron: &Electron) -> f64 {
    let em = electron.charge * electron.mass;
    4.0 * em / PI * (-(electron.mass * r).ln() + 1.0 - EULER_GAMMA)
}
