/// Fine-structure constant used as the default coupling `e^2`.
pub const FINE_STRUCTURE: f64 = 1.0 / 137.035_999;

/// Mass and charge of the dressed particle.
///
/// Gaussian units with `hbar = c = 1`, so `charge^2` is the fine-structure
/// constant for the physical electron.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Electron {
    pub mass: f64,
    pub charge: f64,
}

impl Electron {
    pub fn new(mass: f64, charge: f64) -> Self {
        Self { mass, charge }
    }

    /// Particle of the given mass with `e^2 = alpha`.
    pub fn with_coupling(mass: f64, alpha: f64) -> Self {
        Self {
            mass,
            charge: alpha.sqrt(),
        }
    }

    pub fn alpha(&self) -> f64 {
        self.charge * self.charge
    }
}

impl Default for Electron {
    fn default() -> Self {
        Self::with_coupling(1.0, FINE_STRUCTURE)
    }
}
