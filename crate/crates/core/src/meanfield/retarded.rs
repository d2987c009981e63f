use std::cell::Cell;
use std::f64::consts::PI;

use rayon::prelude::*;

use super::{check_electron, Trajectory};
use crate::specfun::{
    bessel_k0, gauss_legendre, integrate, integrate_oscillatory, k0_cumulative, QuadratureSpec,
};
use crate::{Electron, Error, FourVector, Result, ThreeVector};

fn separation(r: ThreeVector, t: f64, traj: &Trajectory, what: &'static str) -> Result<ThreeVector> {
    let d = r - traj.position(t);
    if d.norm() > 0.0 && d.is_finite() {
        Ok(d)
    } else {
        Err(Error::Domain {
            what,
            value: d.norm(),
            reason: "field point coincides with the particle",
        })
    }
}

/// Retardation `τ*` solving `τ = |d + vτ|` for the present separation `d`.
pub fn retarded_time(d: ThreeVector, v: ThreeVector) -> f64 {
    let dv = d.dot(v);
    let g = 1.0 - v.norm_sqr();
    let disc = (dv * dv + g * d.norm_sqr()).sqrt();
    // Rationalized root avoids cancellation when d·v < 0.
    if dv >= 0.0 {
        (dv + disc) / g
    } else {
        d.norm_sqr() / (disc - dv)
    }
}

/// Classical retarded potential of a uniformly moving point charge.
pub fn lienard_wiechert(
    r: ThreeVector,
    t: f64,
    traj: &Trajectory,
    electron: &Electron,
) -> Result<FourVector<f64>> {
    let d = separation(r, t, traj, "lienard_wiechert")?;
    let v = traj.velocity;
    let a0 = electron.charge / (d.norm_sqr() - v.cross(d).norm_sqr()).sqrt();
    Ok(FourVector::from_parts(a0, v * a0))
}

/// A node landing exactly on the light cone sees the integrable log peak
/// at the smallest positive argument instead of a domain error.
fn k0_or_nan(x: f64) -> f64 {
    bessel_k0(x.max(f64::MIN_POSITIVE)).unwrap_or(f64::NAN)
}

/// Mean potential from the retarded two-K0 kernel,
/// `A^μ = (2/π) e m ∫₀^∞ dτ u^μ/R(τ) [K0(2m|τ-R|) - K0(2m(τ+R))]`
/// with `R(τ) = |r - r0(t-τ)|` and `u = (1, v)`.
pub fn potential_retarded(
    r: ThreeVector,
    t: f64,
    traj: &Trajectory,
    electron: &Electron,
) -> Result<FourVector<f64>> {
    check_electron(electron)?;
    traj.require_nonrelativistic()?;
    let d = separation(r, t, traj, "potential_retarded")?;
    let v = traj.velocity;
    let m = electron.mass;
    let kernel = |tau: f64| {
        let big_r = (d + v * tau).norm();
        (k0_or_nan(2.0 * m * (tau - big_r).abs()) - k0_or_nan(2.0 * m * (tau + big_r))) / big_r
    };
    let star = retarded_time(d, v);
    // Beyond this the kernel is below e^{-80} of its peak.
    let reach = star + 40.0 / (m * (1.0 - v.norm()));
    let spec = QuadratureSpec::default().with_tolerances(1e-300, 1e-11);
    let before = integrate(kernel, 0.0, star, &spec)?.require_converged()?;
    let after = integrate(kernel, star, reach, &spec)?.require_converged()?;
    let a0 = 2.0 / PI * electron.charge * m * (before.value + after.value);
    Ok(FourVector::from_parts(a0, v * a0))
}

/// Work limits for [`potential_full_nonrel`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FullBudget {
    /// Bessel-function evaluations allowed before the outer integral stops.
    pub max_evaluations: u64,
    /// Upper end of the photon-momentum integral, units of `m`.
    pub k_max: f64,
    /// Gauss-Legendre nodes per octave panel in `k`.
    pub nodes_per_panel: usize,
    /// Relative tolerance of the `τ` integral.
    pub tau_rel_tol: f64,
}

impl Default for FullBudget {
    fn default() -> Self {
        Self {
            max_evaluations: 100_000_000,
            k_max: 16.0,
            nodes_per_panel: 3,
            tau_rel_tol: 3e-2,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FullPotential {
    pub value: f64,
    pub error_estimate: f64,
    pub evaluations: u64,
    /// False when the budget ran out before the `k` range was covered.
    pub complete: bool,
}

/// `∫₀^∞ K0(2|s - b|) ds`.
fn half_line_k0(b: f64) -> Result<f64> {
    Ok(if b >= 0.0 {
        0.5 * (k0_cumulative(2.0 * b)? + 0.5 * PI)
    } else {
        0.5 * (0.5 * PI - k0_cumulative(-2.0 * b)?)
    })
}

/// Scalar potential from the full `(t', k, τ)` integral with every
/// photon momentum, in the non-relativistic form whose trajectory is scaled
/// by `m/ε_{k/2}` at momentum `k`.
///
/// The `k → ∞` limit of the inner function is the rest-frame integrand at
/// the coordinate origin; its `k` integral is done in closed form and only
/// the difference is integrated numerically over octave panels up to
/// `k_max`. Coarse tolerances only.
pub fn potential_full_nonrel(
    r: ThreeVector,
    t: f64,
    traj: &Trajectory,
    electron: &Electron,
    budget: &FullBudget,
) -> Result<FullPotential> {
    check_electron(electron)?;
    traj.require_nonrelativistic()?;
    separation(r, t, traj, "potential_full_nonrel")?;
    if !(budget.k_max > 0.25) || budget.nodes_per_panel == 0 || !(budget.tau_rel_tol > 0.0) {
        return Err(Error::InvalidSpec("full potential budget"));
    }
    let m = electron.mass;
    let rs = r * m;
    let r0 = rs.norm();
    if r0 == 0.0 {
        return Err(Error::Domain {
            what: "potential_full_nonrel",
            value: 0.0,
            reason: "field point at the coordinate origin",
        });
    }
    let v = traj.velocity;
    let now = traj.position(t) * m;
    let speed = v.norm();

    let rest_phi = |tau: f64| -> Result<f64> {
        Ok((half_line_k0(tau + r0)? - half_line_k0(tau - r0)?) / r0)
    };

    let inner_spec = QuadratureSpec::default().with_tolerances(1e-14, 1e-7);
    // φ_k(τ) = ∫₀^∞ ds [K0(2|s-τ-R|) - K0(2|s-τ+R|)]/R with R = |d_c + c v s|.
    let moving_phi = |c: f64, tau: f64, count: &Cell<u64>| -> Result<f64> {
        let dc = rs - now * c;
        let cv = v * c;
        let a = 1.0 - cv.norm_sqr();
        let b = tau + dc.dot(cv);
        let cc = tau * tau - dc.norm_sqr();
        let end = (tau + dc.norm() + 30.0) / (1.0 - c * speed);
        let mut cuts = vec![0.0, end];
        let disc = b * b - a * cc;
        if disc >= 0.0 {
            for root in [(b - disc.sqrt()) / a, (b + disc.sqrt()) / a] {
                if root > 0.0 && root < end {
                    cuts.push(root);
                }
            }
        }
        cuts.sort_by(f64::total_cmp);
        let f = |s: f64| {
            count.set(count.get() + 2);
            let big_r = (dc + cv * s).norm();
            let u = s - tau;
            (k0_or_nan(2.0 * (u - big_r).abs()) - k0_or_nan(2.0 * (u + big_r).abs())) / big_r
        };
        let mut total = 0.0;
        for w in cuts.windows(2) {
            if w[1] > w[0] {
                total += integrate(f, w[0], w[1], &inner_spec)?.value;
            }
        }
        Ok(total)
    };

    let tau_spec = QuadratureSpec::new(1e-9, budget.tau_rel_tol, 200)?;
    let k_term = |k: f64| -> Result<(f64, f64, u64)> {
        let c = 1.0 / (1.0 + 0.25 * k * k).sqrt();
        let count = Cell::new(0u64);
        let failure = Cell::new(None);
        let g = |tau: f64| match moving_phi(c, tau, &count).and_then(|p| Ok(p - rest_phi(tau)?)) {
            Ok(x) => (k * tau).cos() * x,
            Err(e) => {
                failure.set(Some(e.to_string()));
                f64::NAN
            }
        };
        let res = integrate_oscillatory(g, 0.0, f64::INFINITY, PI / k, &tau_spec);
        if let Some(msg) = failure.take() {
            return Err(Error::Validity(msg));
        }
        let res = res?;
        Ok((res.value, res.error_estimate, count.get()))
    };

    let rule = gauss_legendre(budget.nodes_per_panel);
    let mut panels = vec![(0.0, 0.25)];
    while panels.last().expect("nonempty").1 < budget.k_max {
        let lo = panels.last().expect("nonempty").1;
        panels.push((lo, (2.0 * lo).min(budget.k_max)));
    }

    let mut sum = 0.0;
    let mut err = 0.0;
    let mut evaluations = 0u64;
    let mut last_panel = 0.0;
    let mut done = 0;
    for &(lo, hi) in &panels {
        if evaluations >= budget.max_evaluations {
            break;
        }
        let nodes: Vec<(f64, f64)> = rule.mapped(lo, hi).collect();
        let terms = nodes
            .par_iter()
            .map(|&(k, w)| k_term(k).map(|(val, e, n)| (w * val, w * e, n)))
            .collect::<Result<Vec<_>>>()?;
        last_panel = terms.iter().map(|x| x.0).sum::<f64>();
        sum += last_panel;
        err += terms.iter().map(|x| x.1).sum::<f64>();
        evaluations += terms.iter().map(|x| x.2).sum::<u64>();
        done += 1;
    }
    let complete = done == panels.len();
    // Truncated k tail, or the unvisited panels, bounded by the last panel.
    err += last_panel.abs() * (1 + panels.len() - done) as f64;

    let prefactor = 4.0 / (PI * PI) * electron.charge * m;
    let static_part = 0.5 * PI * rest_phi(0.0)?;
    Ok(FullPotential {
        value: prefactor * (static_part + sum),
        error_estimate: prefactor.abs() * err,
        evaluations,
        complete,
    })
}
