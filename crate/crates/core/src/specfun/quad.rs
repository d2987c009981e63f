use std::ops::{Add, Mul, Sub};

use num_complex::Complex64;

use crate::{Error, Result};

/// Values a quadrature routine can accumulate.
pub trait QuadValue:
    Copy + Add<Output = Self> + Sub<Output = Self> + Mul<f64, Output = Self> + Send + Sync
{
    fn zero() -> Self;
    /// Norm used for error control.
    fn magnitude(&self) -> f64;
    fn all_finite(&self) -> bool;
}

impl QuadValue for f64 {
    fn zero() -> Self {
        0.0
    }
    fn magnitude(&self) -> f64 {
        self.abs()
    }
    fn all_finite(&self) -> bool {
        self.is_finite()
    }
}

impl QuadValue for Complex64 {
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn magnitude(&self) -> f64 {
        self.norm()
    }
    fn all_finite(&self) -> bool {
        self.re.is_finite() && self.im.is_finite()
    }
}

/// Fixed-length real vector integrated component-wise; error control uses the
/// largest component.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadArray<const N: usize>(pub [f64; N]);

impl<const N: usize> Add for QuadArray<N> {
    type Output = Self;
    fn add(mut self, rhs: Self) -> Self {
        for (a, b) in self.0.iter_mut().zip(rhs.0) {
            *a += b;
        }
        self
    }
}

impl<const N: usize> Sub for QuadArray<N> {
    type Output = Self;
    fn sub(mut self, rhs: Self) -> Self {
        for (a, b) in self.0.iter_mut().zip(rhs.0) {
            *a -= b;
        }
        self
    }
}

impl<const N: usize> Mul<f64> for QuadArray<N> {
    type Output = Self;
    fn mul(mut self, rhs: f64) -> Self {
        for a in self.0.iter_mut() {
            *a *= rhs;
        }
        self
    }
}

impl<const N: usize> QuadValue for QuadArray<N> {
    fn zero() -> Self {
        Self([0.0; N])
    }
    fn magnitude(&self) -> f64 {
        self.0.iter().fold(0.0, |m, v| m.max(v.abs()))
    }
    fn all_finite(&self) -> bool {
        self.0.iter().all(|v| v.is_finite())
    }
}

/// Change of variables applied when the upper limit is infinite.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Mapping {
    /// `x = a + u/(1-u)`; the default for semi-infinite ranges.
    #[default]
    None,
    /// `x = a - ln(1-u)`, suited to exponentially decaying integrands.
    SemiInfiniteExp,
    /// `x = a + tan(pi u / 2)`, suited to algebraic decay.
    SemiInfiniteTan,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureSpec {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_subdivisions: usize,
    pub mapping: Mapping,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self {
            abs_tol: 1e-12,
            rel_tol: 1e-10,
            max_subdivisions: 2000,
            mapping: Mapping::None,
        }
    }
}

impl QuadratureSpec {
    pub fn new(abs_tol: f64, rel_tol: f64, max_subdivisions: usize) -> Result<Self> {
        let spec = Self {
            abs_tol,
            rel_tol,
            max_subdivisions,
            mapping: Mapping::None,
        };
        spec.validate()?;
        Ok(spec)
    }

    /// Loose settings for nested multi-dimensional integrals.
    pub fn coarse() -> Self {
        Self {
            abs_tol: 1e-8,
            rel_tol: 1e-5,
            max_subdivisions: 400,
            mapping: Mapping::None,
        }
    }

    pub fn with_mapping(mut self, mapping: Mapping) -> Self {
        self.mapping = mapping;
        self
    }

    pub fn with_tolerances(mut self, abs_tol: f64, rel_tol: f64) -> Self {
        self.abs_tol = abs_tol;
        self.rel_tol = rel_tol;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.abs_tol > 0.0) {
            return Err(Error::InvalidSpec("abs_tol must be positive"));
        }
        if !(self.rel_tol > 0.0) {
            return Err(Error::InvalidSpec("rel_tol must be positive"));
        }
        if self.max_subdivisions < 1 {
            return Err(Error::InvalidSpec("max_subdivisions must be at least 1"));
        }
        Ok(())
    }

    pub(crate) fn tolerance_for(&self, value: f64) -> f64 {
        self.abs_tol.max(self.rel_tol * value.abs())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureResult<T> {
    pub value: T,
    pub error_estimate: f64,
    pub subdivisions_used: usize,
    pub converged: bool,
}

impl<T: QuadValue> QuadratureResult<T> {
    /// Converts a non-converged result into an error.
    pub fn require_converged(self) -> Result<Self> {
        if self.converged {
            Ok(self)
        } else {
            Err(Error::Quadrature {
                value: self.value.magnitude(),
                error_estimate: self.error_estimate,
            })
        }
    }
}

const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689_003,
    0.973_906_528_517_171_720_077_964_012_084_452,
    0.930_157_491_355_708_226_001_207_180_059_508,
    0.865_063_366_688_984_510_732_096_688_423_493,
    0.780_817_726_586_416_897_063_717_578_345_042,
    0.679_409_568_299_024_406_234_327_365_114_874,
    0.562_757_134_668_604_683_339_000_099_272_694,
    0.433_395_394_129_247_190_799_265_943_165_784,
    0.294_392_862_701_460_198_131_126_603_103_866,
    0.148_874_338_981_631_210_884_826_001_129_720,
    0.0,
];

const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_600_229_578_713,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];

// Gauss weights belong to the odd-indexed Kronrod nodes.
const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];

struct Segment<T> {
    a: f64,
    b: f64,
    value: T,
    error: f64,
    splittable: bool,
}

/// One 21-point Gauss-Kronrod panel on `[a, b]`.
fn kronrod21<T, G>(g: &G, a: f64, b: f64) -> Result<(T, f64)>
where
    T: QuadValue,
    G: Fn(f64) -> Result<T>,
{
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let f_center = g(center)?;
    let mut res_k = f_center * WGK[10];
    let mut res_g = T::zero();
    let mut res_abs = f_center.magnitude() * WGK[10];
    let mut samples = [(T::zero(), T::zero()); 10];
    for j in 0..10 {
        let dx = half * XGK[j];
        let f1 = g(center - dx)?;
        let f2 = g(center + dx)?;
        samples[j] = (f1, f2);
        res_k = res_k + (f1 + f2) * WGK[j];
        res_abs += WGK[j] * (f1.magnitude() + f2.magnitude());
        if j % 2 == 1 {
            res_g = res_g + (f1 + f2) * WG[j / 2];
        }
    }
    let mean = res_k * 0.5;
    let mut res_asc = WGK[10] * (f_center - mean).magnitude();
    for (j, (f1, f2)) in samples.iter().enumerate() {
        res_asc += WGK[j] * ((*f1 - mean).magnitude() + (*f2 - mean).magnitude());
    }
    let scale = half.abs();
    let res_abs = res_abs * scale;
    let res_asc = res_asc * scale;
    let value = res_k * half;
    let mut err = ((res_k - res_g) * half).magnitude();
    if res_asc != 0.0 && err != 0.0 {
        err = res_asc * (200.0 * err / res_asc).powf(1.5).min(1.0);
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        err = err.max(50.0 * f64::EPSILON * res_abs);
    }
    Ok((value, err))
}

/// Adaptive Gauss-Kronrod integration of `f` over `[a, b]`.
///
/// `b` may be `f64::INFINITY`, in which case the range is mapped onto
/// `[0, 1)` according to `spec.mapping`. Running out of subdivisions is not an
/// error: the result comes back with `converged == false`.
pub fn integrate<T, F>(f: F, a: f64, b: f64, spec: &QuadratureSpec) -> Result<QuadratureResult<T>>
where
    T: QuadValue,
    F: Fn(f64) -> T,
{
    spec.validate()?;
    if a.is_nan() || b.is_nan() || a.is_infinite() || b < a {
        return Err(Error::InvalidSpec("integration limits must satisfy a <= b"));
    }
    if a == b {
        return Ok(QuadratureResult {
            value: T::zero(),
            error_estimate: 0.0,
            subdivisions_used: 0,
            converged: true,
        });
    }

    if b.is_finite() {
        let g = |x: f64| {
            let v = f(x);
            if v.all_finite() {
                Ok(v)
            } else {
                Err(Error::NonFiniteSample { abscissa: x })
            }
        };
        adaptive(&g, a, b, spec)
    } else {
        let mapping = spec.mapping;
        let g = |u: f64| {
            if u >= 1.0 {
                return Ok(T::zero());
            }
            let (x, jac) = match mapping {
                Mapping::None => {
                    let s = 1.0 - u;
                    (a + u / s, 1.0 / (s * s))
                }
                Mapping::SemiInfiniteExp => (a - (-u).ln_1p(), 1.0 / (1.0 - u)),
                Mapping::SemiInfiniteTan => {
                    let arg = 0.5 * std::f64::consts::PI * u;
                    let c = arg.cos();
                    (a + arg.tan(), 0.5 * std::f64::consts::PI / (c * c))
                }
            };
            if !x.is_finite() {
                return Ok(T::zero());
            }
            let v = f(x);
            if !v.all_finite() {
                return Err(Error::NonFiniteSample { abscissa: x });
            }
            if v.magnitude() == 0.0 {
                return Ok(T::zero());
            }
            Ok(v * jac)
        };
        adaptive(&g, 0.0, 1.0, spec)
    }
}

fn adaptive<T, G>(g: &G, a: f64, b: f64, spec: &QuadratureSpec) -> Result<QuadratureResult<T>>
where
    T: QuadValue,
    G: Fn(f64) -> Result<T>,
{
    let (value, error) = kronrod21(g, a, b)?;
    let mut segments = vec![Segment {
        a,
        b,
        value,
        error,
        splittable: true,
    }];

    loop {
        let total = segments
            .iter()
            .fold(T::zero(), |acc, s| acc + s.value);
        let total_err: f64 = segments.iter().map(|s| s.error).sum();
        let tol = spec.tolerance_for(total.magnitude());
        if total_err <= tol {
            return Ok(QuadratureResult {
                value: total,
                error_estimate: total_err,
                subdivisions_used: segments.len(),
                converged: true,
            });
        }
        // Worst splittable segment; ties resolve to the lowest index.
        let worst = segments
            .iter()
            .enumerate()
            .filter(|(_, s)| s.splittable)
            .fold(None, |best: Option<(usize, f64)>, (i, s)| match best {
                Some((_, e)) if e >= s.error => best,
                _ => Some((i, s.error)),
            });
        let Some((index, _)) = worst else {
            return Ok(QuadratureResult {
                value: total,
                error_estimate: total_err,
                subdivisions_used: segments.len(),
                converged: false,
            });
        };
        if segments.len() >= spec.max_subdivisions {
            return Ok(QuadratureResult {
                value: total,
                error_estimate: total_err,
                subdivisions_used: segments.len(),
                converged: false,
            });
        }
        let seg = &segments[index];
        let (sa, sb) = (seg.a, seg.b);
        let mid = 0.5 * (sa + sb);
        let width_floor = 64.0 * f64::EPSILON * sa.abs().max(sb.abs()).max(f64::MIN_POSITIVE);
        if mid <= sa || mid >= sb || (sb - sa) <= width_floor {
            segments[index].splittable = false;
            continue;
        }
        let (v1, e1) = kronrod21(g, sa, mid)?;
        let (v2, e2) = kronrod21(g, mid, sb)?;
        segments[index] = Segment {
            a: sa,
            b: mid,
            value: v1,
            error: e1,
            splittable: true,
        };
        segments.insert(
            index + 1,
            Segment {
                a: mid,
                b: sb,
                value: v2,
                error: e2,
                splittable: true,
            },
        );
    }
}
