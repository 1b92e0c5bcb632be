//! Multiprecision quadrature for residuals whose terms cancel far below f64
//! resolution, as happens for operators with large integer coefficients.
//!
//! Sine and cosine integrands with `deg P >= 3` are integrated along two rays
//! from the origin on which `exp(i omega P(z))` decays, so no oscillation has
//! to be resolved. The integrand is entire and decays in the sectors swept
//! between the real axis and each ray, so the value equals the real-line
//! integral. Other integrands use the real line directly. The working
//! precision is raised until the rounding bound is well below tolerance.

use astro_float::{BigFloat, Consts, Radix, RoundingMode};
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exact::{falling_factorial, Polynomial, Rational};
use crate::gaussian::quadrature::gauss_legendre;
use crate::operator::DiffOperator;

use super::testfn::TestFunction;

const RM: RoundingMode = RoundingMode::ToEven;
const PANEL_POINTS: usize = 48;
const START_BITS: usize = 192;
/// Largest change of phase or log-magnitude of the integrand on one panel.
const PANEL_SPAN: f64 = 16.0;
const MAX_PANELS: usize = 20_000;
const MAX_RAY: f64 = 200.0;
/// Bits below the tolerance at which a panel counts as negligible.
const TAIL_BITS: i64 = 80;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Path {
    RealLine,
    Contour,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PreciseResidual {
    pub value: f64,
    /// Rounding bound from the largest intermediate magnitude and the node
    /// count.
    pub error_estimate: f64,
    pub nodes: usize,
    pub precision_bits: usize,
    pub path: Path,
}

fn log2_mag(x: &BigFloat) -> i64 {
    if x.is_zero() {
        return i64::MIN / 4;
    }
    x.exponent().map_or(i64::MIN / 4, i64::from)
}

fn to_f64(x: &BigFloat) -> Result<f64> {
    if x.is_zero() {
        return Ok(0.0);
    }
    x.to_string()
        .parse::<f64>()
        .map_err(|e| Error::Internal(format!("multiprecision value {x} is not finite: {e}")))
}

#[derive(Clone)]
struct Cx {
    re: BigFloat,
    im: BigFloat,
}

impl Cx {
    fn zero(p: usize) -> Cx {
        Cx {
            re: BigFloat::from_f64(0.0, p),
            im: BigFloat::from_f64(0.0, p),
        }
    }

    fn from_c64(z: Complex64, p: usize) -> Cx {
        Cx {
            re: BigFloat::from_f64(z.re, p),
            im: BigFloat::from_f64(z.im, p),
        }
    }

    fn add(&self, o: &Cx, p: usize) -> Cx {
        Cx {
            re: self.re.add(&o.re, p, RM),
            im: self.im.add(&o.im, p, RM),
        }
    }

    fn mul(&self, o: &Cx, p: usize) -> Cx {
        Cx {
            re: self.re.mul(&o.re, p, RM).sub(&self.im.mul(&o.im, p, RM), p, RM),
            im: self.re.mul(&o.im, p, RM).add(&self.im.mul(&o.re, p, RM), p, RM),
        }
    }

    fn scale(&self, s: &BigFloat, p: usize) -> Cx {
        Cx {
            re: self.re.mul(s, p, RM),
            im: self.im.mul(s, p, RM),
        }
    }

    fn log2_mag(&self) -> i64 {
        log2_mag(&self.re).max(log2_mag(&self.im))
    }
}

fn horner(coeffs: &[BigFloat], z: &Cx, p: usize) -> Cx {
    let mut acc = Cx::zero(p);
    for c in coeffs.iter().rev() {
        acc = acc.mul(z, p);
        acc.re = acc.re.add(c, p, RM);
    }
    acc
}

fn horner_c64(coeffs: &[f64], z: Complex64) -> Complex64 {
    coeffs
        .iter()
        .rev()
        .fold(Complex64::new(0.0, 0.0), |acc, &c| acc * z + c)
}

#[derive(Clone, Copy, Debug, PartialEq)]
enum Kind {
    Trig { omega: f64, sine: bool },
    Bump,
    Monomial(usize),
}

impl Kind {
    fn of(f: &TestFunction) -> Kind {
        match *f {
            TestFunction::Sine(omega) => Kind::Trig { omega, sine: true },
            TestFunction::Cosine(omega) => Kind::Trig { omega, sine: false },
            TestFunction::GaussianBump => Kind::Bump,
            TestFunction::Monomial(n) => Kind::Monomial(n as usize),
        }
    }
}

/// Floating-point view of the integrand, for panel widths, ray angles and
/// magnitude bounds.
struct Shape {
    p: Vec<f64>,
    dp: Vec<f64>,
    op: Vec<Vec<f64>>,
    kind: Kind,
}

impl Shape {
    /// Real part of the exponent `-z^2/2 + e(P(z))`.
    fn log_growth(&self, z: Complex64) -> f64 {
        let w = horner_c64(&self.p, z);
        let base = -0.5 * (z * z).re;
        match self.kind {
            Kind::Trig { omega, .. } => base - omega * w.im,
            Kind::Bump => base - 0.5 * (w * w).re,
            Kind::Monomial(_) => base,
        }
    }

    /// `|d/dz|` of the exponent, bounding how fast phase and magnitude move.
    fn rate(&self, z: Complex64) -> f64 {
        let w = horner_c64(&self.p, z);
        let dw = horner_c64(&self.dp, z).norm();
        let e = match self.kind {
            Kind::Trig { omega, .. } => omega.abs(),
            Kind::Bump => w.norm(),
            Kind::Monomial(_) => 0.0,
        };
        z.norm() + e * dw
    }

    /// `ln` of a bound on the sum of absolute values of the terms
    /// multiplying the exponential, at `z`. Computed in logs so it cannot
    /// overflow.
    fn ln_term_bound(&self, z: Complex64) -> f64 {
        let r = horner_c64(&self.p, z).norm();
        let lr = r.ln();
        let ln_poly = |c: &[f64]| -> f64 {
            let top = c
                .iter()
                .enumerate()
                .filter(|(_, a)| **a != 0.0)
                .map(|(k, a)| a.abs().ln() + if k == 0 { 0.0 } else { k as f64 * lr })
                .fold(f64::NEG_INFINITY, f64::max);
            top + (c.len().max(1) as f64).ln()
        };
        let worst = self
            .op
            .iter()
            .enumerate()
            .map(|(m, c)| {
                let factor = match self.kind {
                    Kind::Trig { omega, .. } => m as f64 * omega.abs().ln(),
                    // |He_m(w)| <= (|w| + m)^m
                    Kind::Bump => m as f64 * (r + m as f64).ln(),
                    Kind::Monomial(n) if m > n => f64::NEG_INFINITY,
                    Kind::Monomial(n) => {
                        let ff: f64 = ((n - m + 1)..=n).map(|v| (v as f64).ln()).sum();
                        ff + if n == m { 0.0 } else { (n - m) as f64 * lr }
                    }
                };
                ln_poly(c) + factor
            })
            .fold(f64::NEG_INFINITY, f64::max);
        worst + (self.op.len().max(1) as f64).ln()
    }

    /// `ln` of a bound on `|integrand|` at `z`.
    fn ln_magnitude(&self, z: Complex64) -> f64 {
        self.log_growth(z) + self.ln_term_bound(z) - 0.5 * (2.0 * std::f64::consts::PI).ln()
    }

    /// Ray length beyond which the integrand stays below `e^threshold`.
    fn extent(&self, dir: Complex64, threshold: f64) -> f64 {
        let step = 0.005;
        let mut last = 0.0;
        let mut t = 0.0;
        while t <= MAX_RAY {
            let l = self.ln_magnitude(dir * t);
            if !(l < threshold) {
                last = t;
            }
            t += step;
        }
        last + 0.5
    }
}

/// Ray directions `d` and signs `s`: the integral is
/// `sum s * int_0^inf g(t d) d dt`.
fn rays(shape: &Shape) -> (Vec<(Complex64, f64)>, Path) {
    let n = shape.p.len().saturating_sub(1);
    let real = (
        vec![(Complex64::new(1.0, 0.0), 1.0), (Complex64::new(-1.0, 0.0), -1.0)],
        Path::RealLine,
    );
    let omega = match shape.kind {
        Kind::Trig { omega, .. } if omega != 0.0 && n >= 3 => omega,
        _ => return real,
    };
    let lead = shape.p[n];
    let s = (omega * lead).signum();
    let sector = std::f64::consts::PI / n as f64;
    // Angles with Re(i omega a_n e^{i n angle}) < 0 and |angle| < pi/4.
    let best = |sign: f64, flip: bool| -> Complex64 {
        (1..8)
            .map(|k| sign * k as f64 / 8.0 * sector)
            .filter(|a| a.abs() < std::f64::consts::FRAC_PI_4 - 0.05)
            .map(|a| {
                let d = Complex64::from_polar(1.0, a) * if flip { -1.0 } else { 1.0 };
                let worst = (0..1200)
                    .map(|i| shape.log_growth(d * (i as f64 * 0.01)))
                    .fold(f64::NEG_INFINITY, f64::max);
                (worst, d)
            })
            .min_by(|x, y| x.0.total_cmp(&y.0))
            .map(|(_, d)| d)
            .expect("n >= 3 admits an angle")
    };
    let right = best(s, false);
    let left_sign = if n % 2 == 0 { s } else { -s };
    let left = best(left_sign, true);
    (vec![(right, 1.0), (left, -1.0)], Path::Contour)
}

struct Integrand {
    p_coeffs: Vec<BigFloat>,
    op: Vec<Vec<BigFloat>>,
    kind: Kind,
    trig_factors: Vec<Cx>,
    omega: BigFloat,
    neg_half: BigFloat,
    norm: BigFloat,
    falling: Vec<BigFloat>,
}

struct Ctx {
    p: usize,
    cc: Consts,
}

impl Ctx {
    fn new(p: usize) -> Result<Self> {
        let cc = Consts::new().map_err(|e| Error::Internal(format!("multiprecision constants: {e:?}")))?;
        Ok(Ctx { p, cc })
    }

    fn f(&self, x: f64) -> BigFloat {
        BigFloat::from_f64(x, self.p)
    }

    fn integer(&mut self, s: &str) -> BigFloat {
        BigFloat::parse(s, Radix::Dec, self.p, RM, &mut self.cc)
    }

    fn rational(&mut self, r: &Rational) -> BigFloat {
        let n = self.integer(&r.numer().to_string());
        let d = self.integer(&r.denom().to_string());
        n.div(&d, self.p, RM)
    }

    fn poly(&mut self, q: &Polynomial) -> Vec<BigFloat> {
        q.coeffs().iter().map(|c| self.rational(c)).collect()
    }

    fn exp(&mut self, z: &Cx) -> Cx {
        let p = self.p;
        let m = z.re.exp(p, RM, &mut self.cc);
        if z.im.is_zero() {
            return Cx {
                re: m,
                im: BigFloat::from_f64(0.0, p),
            };
        }
        let c = z.im.cos(p, RM, &mut self.cc);
        let s = z.im.sin(p, RM, &mut self.cc);
        Cx {
            re: m.mul(&c, p, RM),
            im: m.mul(&s, p, RM),
        }
    }

    /// Gauss–Legendre nodes and weights on `[-1, 1]`, polished by Newton
    /// steps at the working precision.
    fn legendre(&mut self, n: usize) -> (Vec<BigFloat>, Vec<BigFloat>) {
        let p = self.p;
        let one = self.f(1.0);
        let (guess, _) = gauss_legendre(n);
        let eval = |x: &BigFloat| -> (BigFloat, BigFloat) {
            let mut prev = BigFloat::from_f64(1.0, p);
            let mut cur = x.clone();
            for k in 1..n {
                let a = BigFloat::from_f64((2 * k + 1) as f64, p);
                let b = BigFloat::from_f64(k as f64, p);
                let next = a.mul(x, p, RM).mul(&cur, p, RM).sub(&b.mul(&prev, p, RM), p, RM).div(
                    &BigFloat::from_f64((k + 1) as f64, p),
                    p,
                    RM,
                );
                prev = cur;
                cur = next;
            }
            // P_n'(x) = n (x P_n - P_{n-1}) / (x^2 - 1)
            let d = BigFloat::from_f64(n as f64, p)
                .mul(&x.mul(&cur, p, RM).sub(&prev, p, RM), p, RM)
                .div(&x.mul(x, p, RM).sub(&BigFloat::from_f64(1.0, p), p, RM), p, RM);
            (cur, d)
        };
        let mut nodes = Vec::with_capacity(n);
        let mut weights = Vec::with_capacity(n);
        for g in guess {
            let mut x = self.f(g);
            for _ in 0..12 {
                let (v, d) = eval(&x);
                let step = v.div(&d, p, RM);
                x = x.sub(&step, p, RM);
                if step.is_zero() || log2_mag(&step) < 4 - p as i64 {
                    break;
                }
            }
            let (_, d) = eval(&x);
            let w =
                BigFloat::from_f64(2.0, p).div(&one.sub(&x.mul(&x, p, RM), p, RM).mul(&d.mul(&d, p, RM), p, RM), p, RM);
            nodes.push(x);
            weights.push(w);
        }
        (nodes, weights)
    }
}

impl Integrand {
    fn new(ctx: &mut Ctx, op: &DiffOperator, p: &Polynomial, kind: Kind) -> Self {
        let bits = ctx.p;
        let omega = match kind {
            Kind::Trig { omega, .. } => omega,
            _ => 0.0,
        };
        let mut trig_factors = Vec::new();
        let mut factor = Cx {
            re: ctx.f(1.0),
            im: ctx.f(0.0),
        };
        let i_omega = Cx {
            re: ctx.f(0.0),
            im: ctx.f(omega),
        };
        for _ in 0..=op.order() {
            trig_factors.push(factor.clone());
            factor = factor.mul(&i_omega, bits);
        }
        let falling = match kind {
            Kind::Monomial(n) => (0..=op.order().min(n))
                .map(|m| ctx.integer(&falling_factorial(n, m).to_string()))
                .collect(),
            _ => vec![],
        };
        let two_pi = ctx.cc.pi(bits, RM).mul(&ctx.f(2.0), bits, RM);
        let norm = ctx.f(1.0).div(&two_pi.sqrt(bits, RM), bits, RM);
        Integrand {
            p_coeffs: ctx.poly(p),
            op: op.coefficients().iter().map(|c| ctx.poly(c)).collect(),
            kind,
            trig_factors,
            omega: ctx.f(omega),
            neg_half: ctx.f(-0.5),
            norm,
            falling,
        }
    }

    /// `phi(z) sum_m p_m(P(z)) f^(m)(P(z))` continued to complex `z`, with
    /// the trigonometric case written through `exp(i omega w)`. Also returns
    /// `log2 |exp(...)|`.
    fn eval(&self, ctx: &mut Ctx, z: &Cx) -> (Cx, i64) {
        let p = ctx.p;
        let w = horner(&self.p_coeffs, z, p);
        let mut expo = z.mul(z, p).scale(&self.neg_half, p);
        let mut s = Cx::zero(p);
        match self.kind {
            Kind::Trig { .. } => {
                let iw = Cx {
                    re: w.im.mul(&self.omega, p, RM).neg(),
                    im: w.re.mul(&self.omega, p, RM),
                };
                expo = expo.add(&iw, p);
                for (c, t) in self.op.iter().zip(&self.trig_factors) {
                    if !c.is_empty() {
                        s = s.add(&horner(c, &w, p).mul(t, p), p);
                    }
                }
            }
            Kind::Bump => {
                expo = expo.add(&w.mul(&w, p).scale(&self.neg_half, p), p);
                let mut prev = Cx::zero(p);
                let mut he = Cx {
                    re: BigFloat::from_f64(1.0, p),
                    im: BigFloat::from_f64(0.0, p),
                };
                for (m, c) in self.op.iter().enumerate() {
                    if !c.is_empty() {
                        let mut term = horner(c, &w, p).mul(&he, p);
                        if m % 2 == 1 {
                            term = term.scale(&BigFloat::from_f64(-1.0, p), p);
                        }
                        s = s.add(&term, p);
                    }
                    let k = BigFloat::from_f64(m as f64, p);
                    let next = Cx {
                        re: w.mul(&he, p).re.sub(&prev.re.mul(&k, p, RM), p, RM),
                        im: w.mul(&he, p).im.sub(&prev.im.mul(&k, p, RM), p, RM),
                    };
                    prev = he;
                    he = next;
                }
            }
            Kind::Monomial(n) => {
                let mut powers = vec![Cx {
                    re: BigFloat::from_f64(1.0, p),
                    im: BigFloat::from_f64(0.0, p),
                }];
                for k in 0..n {
                    let next = powers[k].mul(&w, p);
                    powers.push(next);
                }
                for (m, c) in self.op.iter().enumerate().take(n + 1) {
                    if !c.is_empty() {
                        let term = horner(c, &w, p).mul(&powers[n - m], p).scale(&self.falling[m], p);
                        s = s.add(&term, p);
                    }
                }
            }
        }
        let e = ctx.exp(&expo);
        let mag = e.log2_mag();
        (e.mul(&s, p).scale(&self.norm, p), mag)
    }
}

struct Pass {
    value: Cx,
    /// `log2` of the largest intermediate magnitude summed.
    max_mag: i64,
    nodes: usize,
}

fn run_pass(
    op: &DiffOperator,
    p: &Polynomial,
    shape: &Shape,
    rays: &[(Complex64, f64)],
    bits: usize,
    tol: f64,
) -> Result<Pass> {
    let mut ctx = Ctx::new(bits)?;
    let integrand = Integrand::new(&mut ctx, op, p, shape.kind);
    let (gx, gw) = ctx.legendre(PANEL_POINTS);
    let tol_log2 = tol.log2().floor() as i64;
    let threshold = (tol_log2 - TAIL_BITS) as f64 * std::f64::consts::LN_2;
    let mut total = Cx::zero(bits);
    let mut max_mag = i64::MIN / 4;
    let mut nodes = 0;
    for &(dir, sign) in rays {
        let d = Cx::from_c64(dir * sign, bits);
        let d_plain = Cx::from_c64(dir, bits);
        let extent = shape.extent(dir, threshold);
        let mut t = 0.0f64;
        let mut quiet = 0;
        let mut panels = 0;
        loop {
            let mut width = (PANEL_SPAN / (1.0 + shape.rate(dir * t))).min(0.5);
            width = width.min(PANEL_SPAN / (1.0 + shape.rate(dir * (t + width))));
            // Consecutive panels share the exact f64 endpoint `b`.
            let b = t + width;
            let (lo, hi) = (ctx.f(t), ctx.f(b));
            let half = hi.sub(&lo, bits, RM).mul(&ctx.f(0.5), bits, RM);
            let mid = hi.add(&lo, bits, RM).mul(&ctx.f(0.5), bits, RM);
            let mut panel_mag = i64::MIN / 4;
            for (x, w) in gx.iter().zip(&gw) {
                let tk = mid.add(&half.mul(x, bits, RM), bits, RM);
                let z = d_plain.scale(&tk, bits);
                let (g, exp_mag) = integrand.eval(&mut ctx, &z);
                let weight = d.scale(&half.mul(w, bits, RM), bits);
                let term = g.mul(&weight, bits);
                let z64 = dir * (t + 0.5 * width);
                let bound = exp_mag
                    + (shape.ln_term_bound(z64) / std::f64::consts::LN_2).ceil() as i64
                    + log2_mag(&weight.re).max(log2_mag(&weight.im));
                panel_mag = panel_mag.max(term.log2_mag());
                max_mag = max_mag.max(bound);
                total = total.add(&term, bits);
            }
            nodes += PANEL_POINTS;
            panels += 1;
            t = b;
            if t >= extent && panel_mag < tol_log2 - TAIL_BITS {
                quiet += 1;
                if quiet >= 3 {
                    break;
                }
            } else {
                quiet = 0;
            }
            if panels > MAX_PANELS || t > MAX_RAY {
                return Err(Error::Internal(format!(
                    "multiprecision quadrature did not converge along direction {dir} (t = {t})"
                )));
            }
        }
    }
    Ok(Pass {
        value: total,
        max_mag,
        nodes,
    })
}

/// `E[(A f)(P(Z))]` in multiprecision, accurate to well below `tol`.
pub fn precise_operator_residual(
    op: &DiffOperator,
    p: &Polynomial,
    f: &TestFunction,
    tol: f64,
) -> Result<PreciseResidual> {
    f.check_order(op.order())?;
    if p.degree().is_none_or(|d| d == 0) {
        return Err(Error::DegeneratePushforward);
    }
    let shape = Shape {
        p: p.to_f64_coeffs(),
        dp: p.derivative(1).to_f64_coeffs(),
        op: op.to_f64_coefficients(),
        kind: Kind::of(f),
    };
    let (rays, path) = rays(&shape);
    let tol_log2 = tol.log2().floor() as i64;
    let mut bits = START_BITS;
    for _ in 0..6 {
        let pass = run_pass(op, p, &shape, &rays, bits, tol)?;
        let node_bits = (pass.nodes as f64).log2().ceil() as i64;
        let err_log2 = pass.max_mag + node_bits + 8 - bits as i64;
        if err_log2 <= tol_log2 - 16 {
            let part = match shape.kind {
                Kind::Trig { sine: true, .. } => &pass.value.im,
                _ => &pass.value.re,
            };
            return Ok(PreciseResidual {
                value: to_f64(part)?,
                error_estimate: 2f64.powi(err_log2.clamp(-1000, 1000) as i32),
                nodes: pass.nodes,
                precision_bits: bits,
                path,
            });
        }
        let needed = (pass.max_mag + node_bits + 8 - tol_log2 + 48).max(bits as i64 + 64) as usize;
        bits = needed.div_ceil(64) * 64;
    }
    Err(Error::Internal(
        "multiprecision quadrature precision did not settle".into(),
    ))
}
