//! Dirac bispinors in the standard representation, current matrix elements
//! `ū' γ^μ u` and photon polarization bases.
//!
//! Momenta are in units of the electron mass, so `ε_p = sqrt(1 + p²)`.
//! Spin is quantized along `z`.

use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;

use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ThreeVector {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl ThreeVector {
    pub const ZERO: Self = Self::new(0.0, 0.0, 0.0);
    pub const X: Self = Self::new(1.0, 0.0, 0.0);
    pub const Y: Self = Self::new(0.0, 1.0, 0.0);
    pub const Z: Self = Self::new(0.0, 0.0, 1.0);

    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        Self { x, y, z }
    }

    pub fn from_array(a: [f64; 3]) -> Self {
        Self::new(a[0], a[1], a[2])
    }

    pub fn to_array(self) -> [f64; 3] {
        [self.x, self.y, self.z]
    }

    pub fn dot(self, o: Self) -> f64 {
        self.x * o.x + self.y * o.y + self.z * o.z
    }

    pub fn cross(self, o: Self) -> Self {
        Self::new(
            self.y * o.z - self.z * o.y,
            self.z * o.x - self.x * o.z,
            self.x * o.y - self.y * o.x,
        )
    }

    pub fn norm_sqr(self) -> f64 {
        self.dot(self)
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y).hypot(self.z)
    }

    /// Unit vector along `self`, or `None` for the zero vector.
    pub fn unit(self) -> Option<Self> {
        let n = self.norm();
        (n > 0.0 && n.is_finite()).then(|| self * (1.0 / n))
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }

    /// Rotation by `angle` about the unit `axis` (Rodrigues).
    pub fn rotate(self, axis: Self, angle: f64) -> Self {
        let (s, c) = angle.sin_cos();
        self * c + axis.cross(self) * s + axis * (axis.dot(self) * (1.0 - c))
    }
}

impl Add for ThreeVector {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self::new(self.x + o.x, self.y + o.y, self.z + o.z)
    }
}

impl Sub for ThreeVector {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Self::new(self.x - o.x, self.y - o.y, self.z - o.z)
    }
}

impl Neg for ThreeVector {
    type Output = Self;
    fn neg(self) -> Self {
        Self::new(-self.x, -self.y, -self.z)
    }
}

impl Mul<f64> for ThreeVector {
    type Output = Self;
    fn mul(self, s: f64) -> Self {
        Self::new(self.x * s, self.y * s, self.z * s)
    }
}

/// Contravariant four-vector `(a^0, a^1, a^2, a^3)`, metric `(+,-,-,-)`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct FourVector<T> {
    pub t: T,
    pub space: [T; 3],
}

impl<T> FourVector<T>
where
    T: Copy + Add<Output = T> + Sub<Output = T> + Mul<Output = T>,
{
    pub fn new(t: T, space: [T; 3]) -> Self {
        Self { t, space }
    }

    pub fn component(&self, mu: usize) -> T {
        match mu {
            0 => self.t,
            1..=3 => self.space[mu - 1],
            _ => panic!("four-vector index {mu} out of range"),
        }
    }

    /// `a^0 b^0 - a·b` without conjugation.
    pub fn minkowski_dot(&self, o: &Self) -> T {
        self.t * o.t - self.space[0] * o.space[0] - self.space[1] * o.space[1]
            - self.space[2] * o.space[2]
    }
}

impl FourVector<f64> {
    pub fn from_parts(t: f64, v: ThreeVector) -> Self {
        Self::new(t, v.to_array())
    }

    pub fn spatial(&self) -> ThreeVector {
        ThreeVector::from_array(self.space)
    }

    pub fn to_complex(&self) -> FourVector<Complex64> {
        FourVector::new(
            Complex64::from(self.t),
            self.space.map(Complex64::from),
        )
    }
}

impl FourVector<Complex64> {
    pub fn scale(&self, s: Complex64) -> Self {
        Self::new(self.t * s, self.space.map(|c| c * s))
    }

    /// Real spatial dot product `q·a` with a real three-vector.
    pub fn spatial_dot(&self, q: ThreeVector) -> Complex64 {
        self.space[0] * q.x + self.space[1] * q.y + self.space[2] * q.z
    }
}

/// Metric contraction `e^μ a_μ` of a real polarization vector with a complex
/// four-vector; for real `e` this is `e*·a`.
pub fn contract(e: &FourVector<f64>, a: &FourVector<Complex64>) -> Complex64 {
    a.t * e.t - a.space[0] * e.space[0] - a.space[1] * e.space[1] - a.space[2] * e.space[2]
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Spin {
    Up,
    Down,
}

impl Spin {
    pub fn projection(self) -> f64 {
        match self {
            Spin::Up => 0.5,
            Spin::Down => -0.5,
        }
    }

    pub fn flipped(self) -> Self {
        match self {
            Spin::Up => Spin::Down,
            Spin::Down => Spin::Up,
        }
    }

    /// Eigenstate of `σ_z` with eigenvalue `2λ`.
    pub fn spinor(self) -> PauliSpinor {
        let one = Complex64::new(1.0, 0.0);
        let zero = Complex64::new(0.0, 0.0);
        match self {
            Spin::Up => PauliSpinor([one, zero]),
            Spin::Down => PauliSpinor([zero, one]),
        }
    }

    pub const ALL: [Spin; 2] = [Spin::Up, Spin::Down];
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PauliSpinor(pub [Complex64; 2]);

impl PauliSpinor {
    /// `(a·σ) w`
    pub fn sigma_dot(&self, a: ThreeVector) -> Self {
        let [w0, w1] = self.0;
        let minus = Complex64::new(a.x, -a.y);
        let plus = Complex64::new(a.x, a.y);
        PauliSpinor([w0 * a.z + w1 * minus, w0 * plus - w1 * a.z])
    }

    /// `σ_i w` for `i ∈ {0,1,2}`.
    pub fn sigma(&self, i: usize) -> Self {
        let mut a = [0.0; 3];
        a[i] = 1.0;
        self.sigma_dot(ThreeVector::from_array(a))
    }

    /// `self† other`
    pub fn inner(&self, other: &Self) -> Complex64 {
        self.0[0].conj() * other.0[0] + self.0[1].conj() * other.0[1]
    }

    /// `self† (a·σ) other`
    pub fn sandwich(&self, a: ThreeVector, other: &Self) -> Complex64 {
        self.inner(&other.sigma_dot(a))
    }

    fn scaled(&self, s: f64) -> Self {
        PauliSpinor([self.0[0] * s, self.0[1] * s])
    }
}

/// Energy `sqrt(1 + p²)` in units of the mass.
pub fn energy(p: ThreeVector) -> f64 {
    (1.0 + p.norm_sqr()).sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bispinor {
    /// Upper two then lower two components.
    pub components: [Complex64; 4],
    pub spin: Spin,
    pub momentum: ThreeVector,
    pub energy: f64,
}

impl Bispinor {
    fn from_blocks(upper: PauliSpinor, lower: PauliSpinor, spin: Spin, p: ThreeVector) -> Self {
        Self {
            components: [upper.0[0], upper.0[1], lower.0[0], lower.0[1]],
            spin,
            momentum: p,
            energy: energy(p),
        }
    }

    pub fn upper(&self) -> PauliSpinor {
        PauliSpinor([self.components[0], self.components[1]])
    }

    pub fn lower(&self) -> PauliSpinor {
        PauliSpinor([self.components[2], self.components[3]])
    }

    /// `u† u`
    pub fn norm_sqr(&self) -> f64 {
        self.components.iter().map(|c| c.norm_sqr()).sum()
    }

    /// `ū u = u† γ^0 u`
    pub fn scalar_density(&self) -> f64 {
        self.upper().inner(&self.upper()).re - self.lower().inner(&self.lower()).re
    }
}

/// Positive-energy bispinor `u_{λp}`.
pub fn bispinor_u(spin: Spin, p: ThreeVector) -> Bispinor {
    let e = energy(p);
    let w = spin.spinor();
    let upper = w.scaled(((e + 1.0) / (2.0 * e)).sqrt());
    // sqrt(ε-1) n = p / sqrt(ε+1), stable at small p.
    let lower = w.sigma_dot(p).scaled(1.0 / (2.0 * e * (e + 1.0)).sqrt());
    Bispinor::from_blocks(upper, lower, spin, p)
}

/// Negative-energy bispinor `v_{λp}`: the blocks of `u_{λp}` interchanged,
/// with `w'_λ` the `σ_z` eigenstate of projection `λ`.
pub fn bispinor_v(spin: Spin, p: ThreeVector) -> Bispinor {
    let u = bispinor_u(spin, p);
    Bispinor::from_blocks(u.lower(), u.upper(), spin, p)
}

/// `v_{λp}` assembled directly from the closed form.
pub fn bispinor_v_closed_form(spin: Spin, p: ThreeVector) -> Bispinor {
    let e = energy(p);
    let w = spin.spinor();
    let (upper, lower) = match p.unit() {
        Some(n) => (
            w.sigma_dot(n).scaled(((e - 1.0) / (2.0 * e)).sqrt()),
            w.scaled(((e + 1.0) / (2.0 * e)).sqrt()),
        ),
        None => (w.scaled(0.0), w),
    };
    Bispinor::from_blocks(upper, lower, spin, p)
}

/// `ū' γ^μ u` for all four `μ`, in the Dirac representation.
pub fn current_vector(out: &Bispinor, inc: &Bispinor) -> FourVector<Complex64> {
    let (a1, b1) = (out.upper(), out.lower());
    let (a, b) = (inc.upper(), inc.lower());
    let t = a1.inner(&a) + b1.inner(&b);
    let space = [0, 1, 2].map(|i| a1.inner(&b.sigma(i)) + b1.inner(&a.sigma(i)));
    FourVector::new(t, space)
}

/// `ū_{λ'p'} γ^μ u_{λp}`.
pub fn current_element(
    spin_out: Spin,
    p_out: ThreeVector,
    spin_in: Spin,
    p_in: ThreeVector,
    mu: usize,
) -> Complex64 {
    current_vector(&bispinor_u(spin_out, p_out), &bispinor_u(spin_in, p_in)).component(mu)
}

/// Diagonal metric `g_{αα}`.
pub const METRIC: [f64; 4] = [1.0, -1.0, -1.0, -1.0];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolarizationBasis {
    pub q: ThreeVector,
    /// `e_0` time-like, `e_1`, `e_2` transverse, `e_3` longitudinal.
    pub vectors: [FourVector<f64>; 4],
}

impl PolarizationBasis {
    pub fn direction(&self) -> ThreeVector {
        self.vectors[3].spatial()
    }

    /// Same basis with the transverse pair rotated by `angle` about `q`.
    pub fn rotated(&self, angle: f64) -> Self {
        let n = self.direction();
        let mut out = *self;
        for i in [1, 2] {
            out.vectors[i] = FourVector::from_parts(0.0, self.vectors[i].spatial().rotate(n, angle));
        }
        out
    }

    /// `g_{μν} e^μ_α e^ν_β`
    pub fn gram(&self) -> [[f64; 4]; 4] {
        let mut g = [[0.0; 4]; 4];
        for (a, row) in g.iter_mut().enumerate() {
            for (b, cell) in row.iter_mut().enumerate() {
                *cell = self.vectors[a].minkowski_dot(&self.vectors[b]);
            }
        }
        g
    }

    /// `Σ_α g_{αα} e^μ_α e^ν_α`, which should equal `g^{μν}`.
    pub fn completeness(&self) -> [[f64; 4]; 4] {
        let mut c = [[0.0; 4]; 4];
        for (alpha, e) in self.vectors.iter().enumerate() {
            for (mu, row) in c.iter_mut().enumerate() {
                for (nu, cell) in row.iter_mut().enumerate() {
                    *cell += METRIC[alpha] * e.component(mu) * e.component(nu);
                }
            }
        }
        c
    }
}

/// Polarization vectors for wave vector `q`. The first transverse vector is
/// along `n × z`, or `n × x` when `n` is within `1e-8` of the `z` axis.
pub fn polarization_basis(q: ThreeVector) -> Result<PolarizationBasis> {
    let n = q.unit().ok_or(Error::Domain {
        what: "polarization_basis",
        value: q.norm(),
        reason: "wave vector must be nonzero and finite",
    })?;
    let nz = n.cross(ThreeVector::Z);
    let e1 = if nz.norm() < 1e-8 {
        n.cross(ThreeVector::X)
    } else {
        nz
    };
    let e1 = e1.unit().expect("transverse axis is nonzero");
    let e2 = n.cross(e1);
    Ok(PolarizationBasis {
        q,
        vectors: [
            FourVector::new(1.0, [0.0; 3]),
            FourVector::from_parts(0.0, e1),
            FourVector::from_parts(0.0, e2),
            FourVector::from_parts(0.0, n),
        ],
    })
}
