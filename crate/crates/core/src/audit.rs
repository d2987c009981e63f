//! Machine-readable record of the conventions a computation relied on.

use crate::coherent::CloudGrid;
use crate::infrared::DeltaShift;

pub const UNITS: &str = "units.electron_mass";
pub const COUPLING: &str = "coupling.e_squared";
pub const F_NORMALIZATION: &str = "current.f_normalization";
pub const POLARIZATION_SUM: &str = "cloud.polarization_sum";
pub const SCALAR_SIGN: &str = "cloud.scalar_mode_sign";
pub const UV_CUTOFF: &str = "cloud.uv_cutoff";
pub const LOG_COEFFICIENT: &str = "potential.log_coefficient";
pub const CHARGE_SYMBOL: &str = "potential.charge_symbol";
pub const UNIFORM_DENOMINATOR: &str = "potential.uniform_denominator";
pub const FULL_PREFACTOR: &str = "potential.full_prefactor";
pub const EPSILON_ARGUMENTS: &str = "spectrum.epsilon_arguments";
pub const SPECTRUM_POLARIZATIONS: &str = "spectrum.polarizations";
pub const DELTA_ITERATION: &str = "delta.iteration";
pub const DELTA_TRACE: &str = "delta.trace";
pub const OMEGA_MAX: &str = "spectrum.omega_max";
pub const GB_REPRESENTATION: &str = "gb.representation";
pub const GB_FREE_SPECTRUM: &str = "gb.free_spectrum_sign";
pub const GB_PHASE: &str = "gb.forced_phase";
pub const GB_TRUNCATION: &str = "gb.truncation_guard";

#[derive(Debug, Clone, PartialEq)]
pub struct AuditRecord {
    pub id: &'static str,
    pub value: String,
    /// Which physical statement the choice concerns.
    pub anchor: &'static str,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct AuditLog {
    pub records: Vec<AuditRecord>,
}

impl AuditLog {
    /// Log seeded with the unit and coupling conventions shared by every run.
    pub fn new(mass: f64, e_squared: f64) -> Self {
        let mut log = Self::default();
        log.push(
            UNITS,
            format!("hbar = c = 1; inputs and outputs in units of m, mass = {mass}"),
            "natural units",
        );
        log.push(COUPLING, format!("{e_squared}"), "fine-structure constant");
        log
    }

    pub fn push(&mut self, id: &'static str, value: impl Into<String>, anchor: &'static str) {
        self.records.push(AuditRecord {
            id,
            value: value.into(),
            anchor,
        });
    }

    pub fn contains(&self, id: &str) -> bool {
        self.records.iter().any(|r| r.id == id)
    }

    pub fn potential_conventions(&mut self) {
        self.push(CHARGE_SYMBOL, "single charge parameter e; Z read as e", "rest potential");
        self.push(
            LOG_COEFFICIENT,
            "fit reports b against series 4em/pi and prose em/pi; no pass/fail",
            "logarithmic core",
        );
    }

    pub fn uniform_conventions(&mut self) {
        self.push(
            UNIFORM_DENOMINATOR,
            "omega_q + eps_- - eps_+ > 0 for |v| < 1; no principal value needed",
            "uniformly moving electron",
        );
    }

    pub fn full_potential_conventions(&mut self) {
        self.push(
            FULL_PREFACTOR,
            "4/pi^2 (printed 2/pi^2 halves the rest limit); trajectory scaled by m/eps about origin",
            "three-dimensional retarded integral",
        );
    }

    pub fn cloud_conventions(&mut self, grid: &CloudGrid) {
        self.push(
            F_NORMALIZATION,
            "normalized so f0(q -> 0) = e; printed prefactor gives e/8",
            "stationary-phase current",
        );
        self.push(
            POLARIZATION_SUM,
            "headline totals: transverse modes 1, 2; per-polarization totals reported",
            "cloud observables",
        );
        self.push(
            SCALAR_SIGN,
            "both +1 (all_positive) and -g_aa (metric_weighted) reported",
            "cloud energy",
        );
        self.push(
            UV_CUTOFF,
            format!("q_max = {}; doubling check tolerance 1e-3", grid.q_max),
            "mode sums",
        );
    }

    pub fn spectrum_conventions(&mut self, omega_max: f64) {
        self.push(
            EPSILON_ARGUMENTS,
            "eps_+- = sqrt(m^2 + (p0 +- q/2)^2)",
            "reaction shift",
        );
        self.push(SPECTRUM_POLARIZATIONS, "transverse modes only", "emitted photons");
        self.push(OMEGA_MAX, format!("{omega_max}"), "photon number");
    }

    pub fn delta_trace(&mut self, shift: &DeltaShift) {
        self.push(
            DELTA_ITERATION,
            format!(
                "damped fixed point, damping 0.5, seed {:.6e}, first iterate {:.6e}, {} iterations",
                shift.seed, shift.first_iterate, shift.iterations
            ),
            "reaction shift",
        );
        let trace: Vec<String> = shift.trace.iter().map(|d| format!("{d:.12e}")).collect();
        self.push(DELTA_TRACE, trace.join(" "), "reaction shift");
    }

    pub fn gupta_bleuler_conventions(&mut self) {
        self.push(
            GB_REPRESENTATION,
            "B|n> = -sqrt(n)|n-1>, B+|n> = sqrt(n+1)|n+1>, eta = diag((-1)^n)",
            "indefinite metric",
        );
        self.push(
            GB_FREE_SPECTRUM,
            "H0 = -w B+B has eigenvalues +w n",
            "scalar-photon Hamiltonian",
        );
        self.push(
            GB_PHASE,
            "phase = int Im[Qdot* Q] dt; printed_phase = half of it",
            "forced oscillator",
        );
        self.push(GB_TRUNCATION, "|Q|^2 <= N/4", "coherent states");
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cloud_log_carries_normalization() {
        let mut log = AuditLog::new(1.0, 1.0 / 137.035999);
        log.cloud_conventions(&CloudGrid::default());
        assert!(log.contains(F_NORMALIZATION));
        assert!(log.contains(UV_CUTOFF));
        assert!(!log.contains(DELTA_TRACE));
    }
}
