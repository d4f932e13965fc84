//! Adaptive quadrature, saddle-point expansions, the integrals `k_n(mu)` and the
//! real-parameter Pearcey integral.

use std::collections::BinaryHeap;
use std::f64::consts::PI;

use num_complex::Complex64;
use statrs::function::gamma::gamma;

use crate::error::{Error, Result};

const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.0,
];
const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];
const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

const MAX_SEGMENTS: usize = 20_000;

fn gk15<F: Fn(f64) -> Complex64>(f: &F, a: f64, b: f64) -> (Complex64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kron = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for j in 0..7 {
        let dx = h * XGK[j];
        let s = f(c - dx) + f(c + dx);
        kron += s * WGK[j];
        if j % 2 == 1 {
            gauss += s * WG[j / 2];
        }
    }
    (kron * h, ((kron - gauss) * h).norm())
}

struct Segment {
    lo: f64,
    hi: f64,
    value: Complex64,
    err: f64,
}

impl PartialEq for Segment {
    fn eq(&self, o: &Self) -> bool {
        self.err == o.err
    }
}

impl Eq for Segment {}

impl PartialOrd for Segment {
    fn partial_cmp(&self, o: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(o))
    }
}

impl Ord for Segment {
    fn cmp(&self, o: &Self) -> std::cmp::Ordering {
        self.err.total_cmp(&o.err)
    }
}

/// Globally adaptive Gauss-Kronrod (7/15) integration of a complex integrand
/// over `[a, b]`, split initially into `pieces` equal segments; stops when the
/// error estimate drops below `max(abs_tol, rel_tol |I|)`.
pub fn integrate_complex_tol<F: Fn(f64) -> Complex64>(f: F, a: f64, b: f64, pieces: usize, abs_tol: f64, rel_tol: f64) -> Complex64 {
    let pieces = pieces.max(1);
    let w = (b - a) / pieces as f64;
    let mut heap = BinaryHeap::new();
    for i in 0..pieces {
        let lo = a + w * i as f64;
        let hi = if i + 1 == pieces { b } else { lo + w };
        let (value, err) = gk15(&f, lo, hi);
        heap.push(Segment { lo, hi, value, err });
    }
    loop {
        let total: Complex64 = heap.iter().map(|s| s.value).sum();
        let err: f64 = heap.iter().map(|s| s.err).sum();
        if err <= abs_tol.max(rel_tol * total.norm()) || heap.len() >= MAX_SEGMENTS {
            return total;
        }
        // refine a batch of the worst segments before re-summing
        let batch = (heap.len() / 8).max(1);
        for _ in 0..batch {
            let seg = heap.pop().unwrap();
            let mid = 0.5 * (seg.lo + seg.hi);
            if mid <= seg.lo || mid >= seg.hi {
                heap.push(seg);
                return heap.iter().map(|s| s.value).sum();
            }
            let (v1, e1) = gk15(&f, seg.lo, mid);
            let (v2, e2) = gk15(&f, mid, seg.hi);
            heap.push(Segment { lo: seg.lo, hi: mid, value: v1, err: e1 });
            heap.push(Segment { lo: mid, hi: seg.hi, value: v2, err: e2 });
        }
    }
}

pub fn integrate_complex<F: Fn(f64) -> Complex64>(f: F, a: f64, b: f64, rel_tol: f64) -> Complex64 {
    integrate_complex_tol(f, a, b, 8, 1e-300, rel_tol)
}

pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, rel_tol: f64) -> f64 {
    integrate_complex(|x| Complex64::new(f(x), 0.0), a, b, rel_tol).re
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LaplacePeak {
    pub x0: f64,
    pub second_derivative: f64,
    /// `ln[exp(n f(x0)) sqrt(2 pi / (-n f''(x0)))]`.
    pub ln_value: f64,
}

impl LaplacePeak {
    pub fn value(&self) -> f64 {
        self.ln_value.exp()
    }
}

/// Laplace approximation of `int exp(n f(x)) dx` around the interior maximum of
/// `f` on `(lo, hi)`.
pub fn laplace_peak<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, n: f64) -> Result<LaplacePeak> {
    if !(hi > lo) || !(n > 0.0) {
        return Err(Error::Domain("need lo < hi and n > 0".into()));
    }
    let grid = 256;
    let step = (hi - lo) / grid as f64;
    let best = (0..=grid).max_by(|&i, &j| f(lo + step * i as f64).total_cmp(&f(lo + step * j as f64))).unwrap();
    if best == 0 || best == grid {
        return Err(Error::NoInteriorMaximum);
    }
    let (mut a, mut b) = (lo + step * (best - 1) as f64, lo + step * (best + 1) as f64);
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    for _ in 0..200 {
        if f(c) > f(d) {
            b = d;
        } else {
            a = c;
        }
        c = b - g * (b - a);
        d = a + g * (b - a);
        if (b - a).abs() < 1e-13 * (1.0 + a.abs()) {
            break;
        }
    }
    let x0 = 0.5 * (a + b);
    let h = 1e-4 * (hi - lo).min(1.0);
    let f2 = (f(x0 + h) - 2.0 * f(x0) + f(x0 - h)) / (h * h);
    if !(f2 < -1e-10) {
        return Err(Error::NoInteriorMaximum);
    }
    let ln_value = n * f(x0) + 0.5 * (2.0 * PI / (-n * f2)).ln();
    Ok(LaplacePeak { x0, second_derivative: f2, ln_value })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SaddleVariant {
    /// Expansion in small `A`, `C`, `D` around the Gaussian.
    Expanded,
    /// Exact cubic completion, no quartic term.
    Cubic,
    /// Shift to the stationary point of the full quartic phase.
    Quartic,
}

impl SaddleVariant {
    pub fn from_index(i: u8) -> Result<Self> {
        match i {
            1 => Ok(SaddleVariant::Expanded),
            2 => Ok(SaddleVariant::Cubic),
            3 => Ok(SaddleVariant::Quartic),
            _ => Err(Error::Domain(format!("unknown saddle variant {i}"))),
        }
    }
}

fn i() -> Complex64 {
    Complex64::new(0.0, 1.0)
}

/// Roots of `sum c_j z^j` (ascending coefficients) by Durand-Kerner iteration
/// followed by Newton polishing.
pub fn poly_roots(coeffs: &[Complex64]) -> Vec<Complex64> {
    let mut c: Vec<Complex64> = coeffs.to_vec();
    while c.len() > 1 && c.last().unwrap().norm() == 0.0 {
        c.pop();
    }
    let deg = c.len() - 1;
    if deg == 0 {
        return Vec::new();
    }
    let lead = c[deg];
    let monic: Vec<Complex64> = c.iter().map(|v| v / lead).collect();
    let eval = |z: Complex64| monic.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, &v| acc * z + v);
    let deriv = |z: Complex64| {
        (1..=deg).rev().fold(Complex64::new(0.0, 0.0), |acc, j| acc * z + monic[j] * j as f64)
    };
    let radius = 1.0 + monic[..deg].iter().map(|v| v.norm()).fold(0.0, f64::max);
    let seed = Complex64::from_polar(0.4 * radius, 0.9);
    let mut z: Vec<Complex64> = (0..deg).map(|k| seed * Complex64::from_polar(1.0, 2.0 * PI * k as f64 / deg as f64)).collect();
    for _ in 0..500 {
        let mut delta: f64 = 0.0;
        for k in 0..deg {
            let mut den = Complex64::new(1.0, 0.0);
            for j in 0..deg {
                if j != k {
                    den *= z[k] - z[j];
                }
            }
            let step = eval(z[k]) / den;
            z[k] -= step;
            delta = delta.max(step.norm());
        }
        if delta < 1e-15 * radius {
            break;
        }
    }
    for zk in z.iter_mut() {
        for _ in 0..3 {
            let d = deriv(*zk);
            if d.norm() == 0.0 {
                break;
            }
            *zk -= eval(*zk) / d;
        }
    }
    z
}

/// Root `s` of `0 = iA + 2Bs + 3iCs^2 + 4Ds^3` nearest to `-iA/(2B)`.
pub fn quartic_saddle_root(a: f64, b: Complex64, c: f64, d: Complex64) -> Complex64 {
    let target = -i() * a / (2.0 * b);
    poly_roots(&[i() * a, 2.0 * b, 3.0 * i() * c, 4.0 * d])
        .into_iter()
        .min_by(|x, y| (x - target).norm().total_cmp(&(y - target).norm()))
        .unwrap_or(target)
}

/// Saddle expansions of `int exp[iAx - Bx^2 + iCx^3 - Dx^4] dx`.
pub fn quartic_gauss_saddle(a: f64, b: Complex64, c: f64, d: Complex64, variant: SaddleVariant) -> Result<Complex64> {
    if !(b.re > 0.0) {
        return Err(Error::Divergent(format!("Re B = {} must be positive", b.re)));
    }
    if d.re < 0.0 {
        return Err(Error::Divergent(format!("Re D = {} must be non-negative", d.re)));
    }
    let gauss = (PI / b).sqrt() * (-(a * a) / (4.0 * b)).exp();
    match variant {
        SaddleVariant::Expanded => {
            let (a2, a3, a4) = (a * a, a * a * a, a * a * a * a);
            let e = c * a3 / (8.0 * b.powi(3)) - d * a4 / (16.0 * b.powi(4)) - 9.0 * c * c * a4 / (64.0 * b.powi(5))
                - 3.0 * a * c / (4.0 * b * b)
                + 9.0 * a2 * c * c / (8.0 * b.powi(4))
                + 3.0 * a2 * d / (4.0 * b.powi(3))
                - 3.0 * d / (4.0 * b * b)
                - 15.0 * c * c / (16.0 * b.powi(3));
            Ok(gauss * e.exp())
        }
        SaddleVariant::Cubic => {
            if d.norm() != 0.0 {
                return Err(Error::Domain("the cubic variant has no quartic term".into()));
            }
            if c == 0.0 {
                return Ok(gauss);
            }
            let r = (-2.0 * b + (4.0 * b * b + 12.0 * a * c).sqrt()) / (6.0 * i() * c);
            let bp = -b - i() * a / r;
            Ok((bp * r * r - i() * c * r.powi(3)).exp() * (PI / bp).sqrt() * (-15.0 * c * c / (16.0 * bp.powi(3))).exp())
        }
        SaddleVariant::Quartic => {
            if c == 0.0 && d.norm() == 0.0 {
                return Ok(gauss);
            }
            if a == 0.0 {
                return Err(Error::Domain("the quartic variant needs A != 0".into()));
            }
            let s = quartic_saddle_root(a, b, c, d);
            let bp = (4.0 * d * s.powi(3) + 1.5 * i() * c * s * s - 0.5 * i() * a) / s;
            let cp = c - 4.0 * i() * d * s;
            Ok((bp * s * s - i() * cp * s.powi(3) + d * s.powi(4)).exp()
                * (PI / bp).sqrt()
                * (-15.0 * cp * cp / (16.0 * bp.powi(3)) - 3.0 * d / (4.0 * bp * bp)).exp())
        }
    }
}

/// `int exp[iAx - Bx^2 + iCx^3 - Dx^4] dx` by quadrature along the horizontal line
/// through the stationary point, where the integrand does not oscillate.
pub fn quartic_gauss_direct(a: f64, b: Complex64, c: f64, d: Complex64) -> Result<Complex64> {
    if !(b.re > 0.0) || d.re < 0.0 {
        return Err(Error::Divergent("need Re B > 0 and Re D >= 0".into()));
    }
    let y0 = if c == 0.0 && d.norm() == 0.0 {
        (a / (2.0 * b)).re
    } else {
        -quartic_saddle_root(a, b, c, d).im
    };
    let phase = |z: Complex64| i() * a * z - b * z * z + i() * c * z.powi(3) - d * z.powi(4);
    let width = 12.0 / b.re.sqrt() + 2.0 * y0.abs();
    Ok(integrate_complex_tol(|x| phase(Complex64::new(x, y0)).exp(), -width, width, 16, 1e-300, 1e-13))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KValue {
    pub value: f64,
    /// Magnitude of the first omitted term.
    pub tail_bound: f64,
}

/// `k_n(mu) = (1/2) mu^((2n+1)/4) sum_k (-sqrt mu)^k / k! Gamma((2(n+k)+1)/4)`.
pub fn k_series(n: u32, mu: f64, terms: usize) -> Result<KValue> {
    if mu < 0.0 || terms == 0 {
        return Err(Error::Domain("need mu >= 0 and terms >= 1".into()));
    }
    if mu == 0.0 {
        return Ok(KValue { value: 0.0, tail_bound: 0.0 });
    }
    let sq = mu.sqrt();
    let term = |k: usize| {
        let mut t = gamma((2.0 * (n as f64 + k as f64) + 1.0) / 4.0);
        for j in 1..=k {
            t *= -sq / j as f64;
        }
        t
    };
    let mut sum = 0.0;
    let mut largest: f64 = 0.0;
    for k in 0..terms {
        let t = term(k);
        sum += t;
        largest = largest.max(t.abs());
    }
    let tail = term(terms).abs();
    if largest > 1e8 * sum.abs() || tail > 1e-8 * sum.abs() {
        return Err(Error::UseQuadrature);
    }
    let pre = 0.5 * mu.powf((2.0 * n as f64 + 1.0) / 4.0);
    Ok(KValue { value: pre * sum, tail_bound: pre * tail })
}

/// `int_0^inf x^(n-1/2) exp(-x - x^2/mu) dx`, integrated in `x = s^2`.
pub fn k_quadrature(n: u32, mu: f64) -> Result<f64> {
    if mu < 0.0 {
        return Err(Error::Domain("need mu >= 0".into()));
    }
    if mu == 0.0 {
        return Ok(0.0);
    }
    let upper = (80.0f64).sqrt().min((80.0 * mu).powf(0.25)).max(1.0) * 1.5 + 1.0;
    Ok(2.0 * integrate(|s| s.powi(2 * n as i32) * (-s * s - s.powi(4) / mu).exp(), 0.0, upper, 1e-13))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Region {
    OneContour,
    TwoContour,
    ThreeContour,
    CausticBoundary,
    StokesBoundary,
}

impl Region {
    pub fn label(&self) -> &'static str {
        match self {
            Region::OneContour => "one-contour",
            Region::TwoContour => "two-contour",
            Region::ThreeContour => "three-contour",
            Region::CausticBoundary => "caustic-boundary",
            Region::StokesBoundary => "stokes-boundary",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PearceyPoint {
    pub a: f64,
    pub b: f64,
    pub region: Region,
}

const BOUNDARY_TOL: f64 = 1e-9;

/// Contour count of `int exp[-(x^4 + b x^2 + i a x)] dx` from the sign of
/// `8b^3 - 27a^2`.
pub fn pearcey_region(a: f64, b: f64) -> PearceyPoint {
    let lhs = 8.0 * b.powi(3);
    let rhs = 27.0 * a * a;
    let scale = lhs.abs().max(rhs).max(1.0);
    let region = if (lhs - rhs).abs() <= BOUNDARY_TOL * scale {
        Region::CausticBoundary
    } else if lhs > rhs {
        Region::OneContour
    } else {
        Region::TwoContour
    };
    PearceyPoint { a, b, region }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OscillatoryPoint {
    pub x: f64,
    pub y: f64,
    /// `y^2 + (2x/3)^3`; negative inside the caustic.
    pub caustic: f64,
    /// `(27/2) y^2 - x^3 (5 + sqrt 27)`.
    pub stokes: f64,
    pub region: Region,
}

/// Classification of the oscillatory Pearcey parameters `(x, y)` by the caustic
/// and the Stokes line.
pub fn oscillatory_region(x: f64, y: f64) -> OscillatoryPoint {
    let caustic = y * y + (2.0 * x / 3.0).powi(3);
    let stokes = 13.5 * y * y - x.powi(3) * (5.0 + 27f64.sqrt());
    let scale = (y * y).max(x.abs().powi(3)).max(1.0);
    let region = if caustic.abs() <= BOUNDARY_TOL * scale {
        Region::CausticBoundary
    } else if caustic < 0.0 {
        Region::ThreeContour
    } else if x > 0.0 && stokes.abs() <= BOUNDARY_TOL * scale {
        Region::StokesBoundary
    } else if x > 0.0 && stokes < 0.0 {
        Region::OneContour
    } else {
        Region::TwoContour
    };
    OscillatoryPoint { x, y, caustic, stokes, region }
}

/// Stationary points of `x^4 + b x^2 + i a x`.
pub fn pearcey_saddles(a: f64, b: f64) -> Vec<Complex64> {
    poly_roots(&[i() * a, Complex64::new(2.0 * b, 0.0), Complex64::new(0.0, 0.0), Complex64::new(4.0, 0.0)])
}

pub fn pearcey_saddle_residual(a: f64, b: f64, z: Complex64) -> f64 {
    (4.0 * z.powi(3) + 2.0 * b * z + i() * a).norm()
}

/// Truncated Taylor series `sum c_j t^j`.
#[derive(Debug, Clone, PartialEq)]
struct Jet(Vec<f64>);

impl Jet {
    fn constant(v: f64, order: usize) -> Jet {
        let mut c = vec![0.0; order + 1];
        c[0] = v;
        Jet(c)
    }

    fn variable(v: f64, order: usize) -> Jet {
        let mut j = Jet::constant(v, order);
        if order >= 1 {
            j.0[1] = 1.0;
        }
        j
    }

    fn order(&self) -> usize {
        self.0.len() - 1
    }

    fn add(&self, o: &Jet) -> Jet {
        Jet(self.0.iter().zip(&o.0).map(|(a, b)| a + b).collect())
    }

    fn scale(&self, s: f64) -> Jet {
        Jet(self.0.iter().map(|a| a * s).collect())
    }

    fn mul(&self, o: &Jet) -> Jet {
        let n = self.order();
        let mut c = vec![0.0; n + 1];
        for p in 0..=n {
            for q in 0..=n - p {
                c[p + q] += self.0[p] * o.0[q];
            }
        }
        Jet(c)
    }

    fn exp(&self) -> Jet {
        let n = self.order();
        let mut e = vec![0.0; n + 1];
        e[0] = self.0[0].exp();
        for k in 1..=n {
            e[k] = (1..=k).map(|j| j as f64 * self.0[j] * e[k - j]).sum::<f64>() / k as f64;
        }
        Jet(e)
    }

    fn ln(&self) -> Jet {
        let n = self.order();
        let mut l = vec![0.0; n + 1];
        l[0] = self.0[0].ln();
        for k in 1..=n {
            let s: f64 = (1..k).map(|j| j as f64 * l[j] * self.0[k - j]).sum();
            l[k] = (self.0[k] - s / k as f64) / self.0[0];
        }
        Jet(l)
    }
}

/// Middle saddle `x_2` on the imaginary axis (`lambda = i x_2`) as a jet in `a`,
/// from `-x^3 + (b/2) x + a/4 = 0`.
fn middle_saddle_jet(a: f64, b: f64, order: usize) -> Option<Jet> {
    let arg = 27.0 * a / (6.0 * b).powf(1.5);
    if !(b > 0.0) || arg.abs() > 1.0 {
        return None;
    }
    let x0 = 2.0 * (b / 6.0).sqrt() * (4.0 * PI / 3.0 + arg.acos() / 3.0).cos();
    let g1 = -3.0 * x0 * x0 + b / 2.0;
    if g1 == 0.0 {
        return None;
    }
    let av = Jet::variable(a, order);
    let mut x = Jet::constant(x0, order);
    for _ in 0..=order + 1 {
        let g = x.mul(&x).mul(&x).scale(-1.0).add(&x.scale(b / 2.0)).add(&av.scale(0.25));
        x = x.add(&g.scale(-1.0 / g1));
    }
    Some(x)
}

/// `sqrt(pi/(b - 6 x_2^2)) exp[(b/2) x_2^2 + (3a/4) x_2]` and its Taylor
/// coefficients in `a`.
fn saddle_jet(a: f64, b: f64, order: usize) -> Option<Jet> {
    let x = middle_saddle_jet(a, b, order)?;
    let av = Jet::variable(a, order);
    let x2 = x.mul(&x);
    let curvature = Jet::constant(b, order).add(&x2.scale(-6.0));
    if !(curvature.0[0] > 0.0) {
        return None;
    }
    let expo = x2.scale(b / 2.0).add(&av.mul(&x).scale(0.75));
    let ln_pre = Jet::constant(PI.ln(), order).add(&curvature.ln().scale(-1.0)).scale(0.5);
    Some(ln_pre.add(&expo).exp())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PearceyEval {
    pub direct: Complex64,
    /// `(i d/da)^k` of the middle-saddle approximation; absent when the middle
    /// saddle does not exist.
    pub saddle: Option<Complex64>,
    pub ratio: Option<f64>,
}

pub const PEARCEY_CUTOFF: f64 = 12.0;

/// `int_{-12}^{12} x^k exp[-(x^4 + b x^2 + i a x)] dx`.
pub fn pearcey_direct(a: f64, b: f64, k: u32) -> Complex64 {
    let f = |x: f64| x.powi(k as i32) * (-(x.powi(4) + b * x * x)).exp() * Complex64::from_polar(1.0, -a * x);
    integrate_complex_tol(f, -PEARCEY_CUTOFF, PEARCEY_CUTOFF, 48, 1e-300, 1e-12)
}

pub fn pearcey_saddle(a: f64, b: f64, k: u32) -> Option<Complex64> {
    let jet = saddle_jet(a, b, k as usize)?;
    let kfact: f64 = (1..=k).map(|v| v as f64).product();
    Some(i().powu(k) * kfact * jet.0[k as usize])
}

pub fn pearcey_eval(a: f64, b: f64, k: u32) -> PearceyEval {
    let direct = pearcey_direct(a, b, k);
    let saddle = pearcey_saddle(a, b, k);
    let ratio = saddle.map(|s| (s / direct).re);
    PearceyEval { direct, saddle, ratio }
}
