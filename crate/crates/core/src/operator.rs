//! Pointwise evaluation of the regional operator in one dimension,
//!
//! ```text
//! (-Delta)^s_Omega u(x) = c_{1,s} p.v. int_Omega (u(x) - u(y)) |x - y|^{-1-2s} dy,
//! ```
//!
//! on an interval `(0, L)` or on the half-line. Three independent routes:
//! a principal-value quadrature ([`eval_pv`]), the closed form for powers
//! ([`eval_power_halfline`]) and the regrouped formula for functions with
//! vanishing endpoint derivatives ([`eval_boundary_formula`]).

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::quadrature::{gauss_legendre, geometric_breaks, Rule};
use crate::special::{regional_power_coeff, FracOrder};

type RealFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;
type DiffFn = Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>;

/// Where the function lives.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Domain {
    Interval { length: f64 },
    HalfLine,
}

/// `u(y) = coeff * y^beta` for every `y >= start`; needed to close half-line integrals.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerTail {
    pub coeff: f64,
    pub beta: f64,
    pub start: f64,
}

/// Regularity class of a sampled function, used only for bookkeeping and checks.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Smoothness {
    /// Smooth up to the boundary.
    Smooth,
    /// Smooth up to the boundary with `u'(0) = u'(L) = 0`.
    NeumannSmooth,
    /// Only Hoelder continuous at the declared breakpoints.
    Rough,
}

/// A function together with its derivative on a one-dimensional domain.
#[derive(Clone)]
pub struct SampledFunction {
    domain: Domain,
    value: RealFn,
    deriv: RealFn,
    diff: Option<DiffFn>,
    breakpoints: Vec<f64>,
    tail: Option<PowerTail>,
    smoothness: Smoothness,
}

impl fmt::Debug for SampledFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SampledFunction")
            .field("domain", &self.domain)
            .field("breakpoints", &self.breakpoints)
            .field("tail", &self.tail)
            .field("smoothness", &self.smoothness)
            .finish_non_exhaustive()
    }
}

impl SampledFunction {
    /// Function on `(0, length)`.
    pub fn on_interval<F, D>(length: f64, value: F, deriv: D) -> Result<Self>
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
        D: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        if !(length > 0.0 && length.is_finite()) {
            return Err(Error::Invalid(format!("interval length must be positive, got {length}")));
        }
        Ok(SampledFunction {
            domain: Domain::Interval { length },
            value: Arc::new(value),
            deriv: Arc::new(deriv),
            diff: None,
            breakpoints: Vec::new(),
            tail: None,
            smoothness: Smoothness::Smooth,
        })
    }

    /// Function on `(0, inf)` that coincides with `tail` beyond `tail.start`.
    pub fn on_half_line<F, D>(value: F, deriv: D, tail: PowerTail) -> Result<Self>
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
        D: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        if !(tail.beta > -1.0) || !(tail.start >= 0.0) {
            return Err(Error::Invalid(format!("inadmissible tail {tail:?}")));
        }
        Ok(SampledFunction {
            domain: Domain::HalfLine,
            value: Arc::new(value),
            deriv: Arc::new(deriv),
            diff: None,
            breakpoints: Vec::new(),
            tail: Some(tail),
            smoothness: Smoothness::Smooth,
        })
    }

    /// `x^beta` on the half-line.
    pub fn power(beta: f64) -> Result<Self> {
        Self::on_half_line(
            move |y: f64| y.powf(beta),
            move |y: f64| if beta == 0.0 { 0.0 } else { beta * y.powf(beta - 1.0) },
            PowerTail { coeff: 1.0, beta, start: 0.0 },
        )
    }

    /// `cos(pi x)` on `(0, 1)`.
    pub fn cos_pi() -> Self {
        use std::f64::consts::PI;
        Self::on_interval(1.0, |x: f64| (PI * x).cos(), |x: f64| -PI * (PI * x).sin())
            .expect("valid interval")
            .with_difference(|x, y| -2.0 * (0.5 * PI * (x + y)).sin() * (0.5 * PI * (x - y)).sin())
            .with_smoothness(Smoothness::NeumannSmooth)
    }

    /// The constant `c` on `(0, length)`.
    pub fn constant(c: f64, length: f64) -> Result<Self> {
        Ok(Self::on_interval(length, move |_| c, |_| 0.0)?.with_smoothness(Smoothness::NeumannSmooth))
    }

    /// Declares interior points where `u` is only Hoelder continuous.
    pub fn with_breakpoints(mut self, mut points: Vec<f64>) -> Self {
        points.sort_by(f64::total_cmp);
        self.breakpoints = points;
        self.smoothness = Smoothness::Rough;
        self
    }

    /// Supplies `u(x) - u(y)` in a form without cancellation for close arguments.
    pub fn with_difference<G>(mut self, diff: G) -> Self
    where
        G: Fn(f64, f64) -> f64 + Send + Sync + 'static,
    {
        self.diff = Some(Arc::new(diff));
        self
    }

    pub fn with_smoothness(mut self, smoothness: Smoothness) -> Self {
        self.smoothness = smoothness;
        self
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }

    pub fn smoothness(&self) -> Smoothness {
        self.smoothness
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    #[inline]
    pub fn value(&self, x: f64) -> f64 {
        (self.value)(x)
    }

    #[inline]
    pub fn deriv(&self, x: f64) -> f64 {
        (self.deriv)(x)
    }

    /// `u(x) - u(y)`.
    #[inline]
    pub fn difference(&self, x: f64, y: f64) -> f64 {
        match &self.diff {
            Some(d) => d(x, y),
            None => self.value(x) - self.value(y),
        }
    }

    /// Right end of the domain (`inf` on the half-line).
    pub fn right_end(&self) -> f64 {
        match self.domain {
            Domain::Interval { length } => length,
            Domain::HalfLine => f64::INFINITY,
        }
    }

    /// Compares the derivative with central differences at `points`; returns the worst mismatch.
    pub fn check_derivative(&self, points: &[f64]) -> Result<f64> {
        let mut worst: f64 = 0.0;
        for &x in points {
            let h = 1e-5 * x.abs().max(1.0);
            let fd = (self.value(x + h) - self.value(x - h)) / (2.0 * h);
            let d = self.deriv(x);
            let err = (fd - d).abs() / (1.0 + d.abs());
            worst = worst.max(err);
            if err > 1e-6 {
                return Err(Error::Invalid(format!(
                    "derivative inconsistent with values at x = {x}: {d} vs difference {fd}"
                )));
            }
        }
        Ok(worst)
    }
}

/// Parameters of the principal-value quadrature.
#[derive(Debug, Clone, PartialEq)]
pub struct PVScheme {
    /// Near-field half-width; `None` picks `min(x, L - x) / 2` capped at `0.1`.
    pub near_radius: Option<f64>,
    /// `2`: symmetric second-order subtraction. `1`: one-sided first order (needs `s < 1/2`).
    pub subtraction_order: u8,
    /// Gauss-Legendre points per panel.
    pub panel_points: usize,
    /// Innermost near-field radius relative to the near-field radius.
    pub inner_ratio: f64,
    /// Half-line truncation radius; `None` means `1e3 max(1, x)`.
    pub tail_radius: Option<f64>,
    /// Accepted estimate of the near-field Taylor remainder, relative to `1 + |value|`.
    pub tolerance: f64,
}

impl Default for PVScheme {
    fn default() -> Self {
        PVScheme {
            near_radius: None,
            subtraction_order: 2,
            panel_points: 20,
            inner_ratio: 1.0 / 1024.0,
            tail_radius: None,
            tolerance: 1e-7,
        }
    }
}

impl PVScheme {
    fn validate(&self, s: f64) -> Result<()> {
        if !matches!(self.subtraction_order, 1 | 2) {
            return Err(Error::Invalid(format!(
                "subtraction order must be 1 or 2, got {}",
                self.subtraction_order
            )));
        }
        if self.subtraction_order == 1 && s >= 0.5 {
            return Err(Error::Invalid("first-order subtraction needs s < 1/2".into()));
        }
        if let Some(h) = self.near_radius {
            if !(h > 0.0) {
                return Err(Error::Invalid(format!("near-field radius must be positive, got {h}")));
            }
        }
        if !(self.inner_ratio > 0.0 && self.inner_ratio < 1.0) || self.panel_points < 2 {
            return Err(Error::Invalid("inner ratio must lie in (0, 1), panel points >= 2".into()));
        }
        Ok(())
    }
}

/// Value of a singular integral together with an error estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PvValue {
    pub value: f64,
    pub error: f64,
}

struct Panels {
    fine: Rule,
    coarse: Rule,
}

impl Panels {
    fn new(n: usize) -> Self {
        Panels { fine: gauss_legendre(n), coarse: gauss_legendre((n * 2 / 3).max(2)) }
    }

    /// Integral over `[a, b]` split at `breaks` (assumed sorted and inside) and
    /// graded geometrically towards each listed point with the given minimal width.
    fn integrate<F: Fn(f64) -> f64>(&self, a: f64, b: f64, toward: &[(f64, f64)], f: F) -> (f64, f64) {
        if b <= a {
            return (0.0, 0.0);
        }
        let mut cuts = vec![a, b];
        cuts.extend(toward.iter().map(|p| p.0).filter(|&p| p > a && p < b));
        cuts.sort_by(f64::total_cmp);
        cuts.dedup();
        let min_at = |p: f64| -> Option<f64> {
            toward.iter().find(|q| (q.0 - p).abs() <= 1e-15 * p.abs().max(1.0)).map(|q| q.1)
        };
        let (mut fine, mut coarse) = (0.0, 0.0);
        for w in cuts.windows(2) {
            let (p, q) = (w[0], w[1]);
            let breaks = panel_breaks(p, q, min_at(p), min_at(q));
            for seg in breaks.windows(2) {
                fine += self.fine.integrate(seg[0], seg[1], &f);
                coarse += self.coarse.integrate(seg[0], seg[1], &f);
            }
        }
        (fine, (fine - coarse).abs())
    }
}

fn panel_breaks(a: f64, b: f64, min_a: Option<f64>, min_b: Option<f64>) -> Vec<f64> {
    match (min_a, min_b) {
        (None, None) => vec![a, b],
        (Some(ma), None) => geometric_breaks(a, b, ma),
        (None, Some(mb)) => {
            let mut v: Vec<f64> = geometric_breaks(-b, -a, mb).into_iter().map(|x| -x).collect();
            v.reverse();
            v
        }
        (Some(ma), Some(mb)) => {
            let m = 0.5 * (a + b);
            let mut v = geometric_breaks(a, m, ma);
            v.pop();
            let mut r: Vec<f64> = geometric_breaks(-b, -m, mb).into_iter().map(|x| -x).collect();
            r.reverse();
            v.extend(r);
            v
        }
    }
}

/// Second derivative from first derivatives: central inside, one-sided at an end.
fn second_derivative(u: &SampledFunction, x: f64, eta: f64, dir: Option<f64>) -> f64 {
    match dir {
        None => (u.deriv(x + eta) - u.deriv(x - eta)) / (2.0 * eta),
        Some(d) => {
            d * (-3.0 * u.deriv(x) + 4.0 * u.deriv(x + d * eta) - u.deriv(x + 2.0 * d * eta)) / (2.0 * eta)
        }
    }
}

/// `int_tau^h g(t) t^{-1-2s} dt` over dyadic panels. Also returns the panel `(tau, 2 tau)`,
/// which the callers compare against their model of the missing inner piece.
fn near_field<G: Fn(f64) -> f64>(panels: &Panels, g: G, h: f64, tau: f64, s: f64) -> (f64, f64) {
    let kern = |t: f64| g(t) * t.powf(-1.0 - 2.0 * s);
    let mut value = 0.0;
    let mut first_panel = 0.0;
    let mut hi = h;
    while hi > tau * (1.0 + 1e-12) {
        let lo = (0.5 * hi).max(tau);
        let p = panels.fine.integrate(lo, hi, kern);
        if lo <= tau * (1.0 + 1e-12) {
            first_panel = p;
        }
        value += p;
        hi = lo;
    }
    (value, first_panel)
}

/// Adds the quadratic Taylor piece `-c tau^{2-2s}/(2-2s)` of `(0, tau)` and
/// estimates the remainder from how well the same model predicts `(tau, 2 tau)`.
fn close_near_field(value: f64, first_panel: f64, c: f64, tau: f64, s: f64) -> (f64, f64) {
    let p2 = 2.0 - 2.0 * s;
    let corr = |r: f64| -c * r.powf(p2) / p2;
    let remainder = (first_panel + corr(tau) - corr(2.0 * tau)).abs();
    (value + corr(tau), remainder)
}

/// Analytic tail `int_R^inf (u(x) - a y^beta) (y - x)^{-1-2s} dy` (finite part when `beta >= 2s`).
fn half_line_tail(ux: f64, x: f64, r: f64, s: f64, tail: &PowerTail) -> Result<f64> {
    let two_s = 2.0 * s;
    let mut out = ux * (r - x).powf(-two_s) / two_s;
    if tail.coeff != 0.0 {
        let q = x / r;
        let mut poch = 1.0; // (1+2s)_m / m!
        let mut qm = 1.0;
        let mut sum = 0.0;
        for m in 0..200 {
            let denom = two_s + m as f64 - tail.beta;
            if denom.abs() < 1e-12 {
                return Err(Error::Pole { beta: tail.beta, distance: denom.abs() });
            }
            let term = poch * qm / denom;
            sum += term;
            if term.abs() < 1e-17 * sum.abs() {
                break;
            }
            poch *= (1.0 + two_s + m as f64) / (m as f64 + 1.0);
            qm *= q;
        }
        out -= tail.coeff * r.powf(tail.beta - two_s) * sum;
    }
    Ok(out)
}

/// Principal-value quadrature of the regional operator at `x`.
///
/// The near field `|y - x| < h` is symmetrized (the linear Taylor term drops
/// out), integrated on dyadic panels down to `tau = inner_ratio * h` and
/// closed with the quadratic Taylor term. The far field uses Gauss panels
/// graded towards `x`, the domain ends and declared breakpoints. On the
/// half-line the part beyond the truncation radius is added analytically.
pub fn eval_pv(u: &SampledFunction, x: f64, s: f64, scheme: &PVScheme) -> Result<PvValue> {
    let order = FracOrder::new(s)?;
    scheme.validate(s)?;
    let l = u.right_end();
    if !(x > 0.0 && x < l) {
        return Err(Error::Domain(format!("x = {x} is not inside the open domain")));
    }
    let panels = Panels::new(scheme.panel_points);
    let ux = u.value(x);
    let two_s = 2.0 * s;

    let at_break = u.breakpoints.iter().any(|&b| (b - x).abs() <= 1e-14 * x.max(1.0));
    let dist_break = u
        .breakpoints
        .iter()
        .map(|&b| (b - x).abs())
        .filter(|&d| d > 1e-14 * x.max(1.0))
        .fold(f64::INFINITY, f64::min);
    let mut h = scheme.near_radius.unwrap_or_else(|| (0.5 * x.min(l - x)).min(0.1));
    h = h.min(0.5 * x).min(0.5 * (l - x)).min(0.5 * dist_break);

    let mut taylor_checked = true;
    let (near, near_err) = if at_break {
        // only Hoelder at x: dyadic panels far down, then the geometric tail of
        // the panel sequence in place of a Taylor model
        taylor_checked = false;
        let g = |t: f64| u.difference(x, x + t) + u.difference(x, x - t);
        let kern = |t: f64| g(t) * t.powf(-1.0 - two_s);
        let (mut value, mut prev, mut last) = (0.0, 0.0, 0.0);
        let mut hi = h;
        for _ in 0..48 {
            let p = panels.fine.integrate(0.5 * hi, hi, kern);
            value += p;
            prev = last;
            last = p;
            hi *= 0.5;
        }
        let r = if prev != 0.0 { last / prev } else { 0.0 };
        let tail = if r > 0.0 && r < 1.0 { last * r / (1.0 - r) } else { 0.0 };
        (value + tail, tail.abs())
    } else {
        let tau = h * scheme.inner_ratio;
        match scheme.subtraction_order {
            2 => {
                let g = |t: f64| u.difference(x, x + t) + u.difference(x, x - t);
                let u2 = second_derivative(u, x, tau, None);
                let (v, first) = near_field(&panels, g, h, tau, s);
                close_near_field(v, first, u2, tau, s)
            }
            _ => {
                // each side separately; their inner pieces of order u' t^{1-2s} cancel
                // and the neglected rest is of the size of the summed first panels
                let gr = |t: f64| u.difference(x, x + t);
                let gl = |t: f64| u.difference(x, x - t);
                let (a, fa) = near_field(&panels, gr, h, tau, s);
                let (b, fb) = near_field(&panels, gl, h, tau, s);
                (a + b, (fa + fb).abs())
            }
        }
    };

    let kernel = |y: f64| u.difference(x, y) * (x - y).abs().powf(-1.0 - two_s);
    let scale = x.max(1.0);
    let end_width = 1e-14 * scale;
    let mut toward: Vec<(f64, f64)> = vec![(0.0, end_width)];
    for &b in &u.breakpoints {
        toward.push((b, 1e-13 * scale));
    }

    // left of x
    let mut left_toward = toward.clone();
    left_toward.push((x - h, h));
    let (fl, el) = panels.integrate(0.0, x - h, &left_toward, kernel);

    // right of x, up to the domain end or the tail radius
    let (right_stop, tail_part) = match u.domain {
        Domain::Interval { length } => {
            toward.push((length, end_width));
            (length, 0.0)
        }
        Domain::HalfLine => {
            let tail = u
                .tail
                .ok_or_else(|| Error::Invalid("half-line function without a declared tail".into()))?;
            let r = scheme.tail_radius.unwrap_or(1e3 * x.max(1.0)).max(tail.start);
            if r <= x + h {
                return Err(Error::Invalid(format!("tail radius {r} inside the near field of x = {x}")));
            }
            (r, half_line_tail(ux, x, r, s, &tail)?)
        }
    };
    let mut right_toward = toward;
    right_toward.push((x + h, h));
    let (fr, er) = panels.integrate(x + h, right_stop, &right_toward, kernel);

    let raw = near + fl + fr + tail_part;
    let value = order.c1s() * raw;
    let error = order.c1s() * (near_err + el + er) + 1e-14 * value.abs();
    if taylor_checked && order.c1s() * near_err > scheme.tolerance * (1.0 + value.abs()) {
        return Err(Error::Accuracy { estimate: order.c1s() * near_err, tolerance: scheme.tolerance });
    }
    Ok(PvValue { value, error })
}

/// `C_reg(beta) x^{beta - 2s}`: the regional half-line operator applied to `x^beta`.
pub fn eval_power_halfline(beta: f64, x: f64, s: f64) -> Result<f64> {
    if !(x > 0.0) {
        return Err(Error::Domain(format!("x must be positive, got {x}")));
    }
    Ok(regional_power_coeff(beta, s)? * x.powf(beta - 2.0 * s))
}

/// Regrouped form valid up to the boundary for `u` with `u'(0) = u'(1) = 0`:
///
/// ```text
/// c_{1,s} [ int_0^1 (u(x) - u(y) - u'(x)(x - y)) |x-y|^{-1-2s} dy
///           + 1/(2s-1) sum_{b in {0,1}} (u'(x) - u'(b)) nu(b) |x - b|^{1-2s} ]
/// ```
/// with `nu(0) = -1`, `nu(1) = 1`.
pub fn eval_boundary_formula(u: &SampledFunction, x: f64, s: f64) -> Result<PvValue> {
    let order = FracOrder::new(s)?;
    if s <= 0.5 {
        return Err(Error::Domain(format!("the boundary formula needs s > 1/2, got {s}")));
    }
    match u.domain {
        Domain::Interval { length } if (length - 1.0).abs() < 1e-15 => {}
        _ => return Err(Error::Domain("the boundary formula is implemented on (0, 1) only".into())),
    }
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::Domain(format!("x = {x} outside [0, 1]")));
    }
    let (d0, d1) = (u.deriv(0.0), u.deriv(1.0));
    if d0.abs() > 1e-10 || d1.abs() > 1e-10 {
        return Err(Error::Invalid(format!(
            "the boundary formula needs u'(0) = u'(1) = 0, got {d0:e} and {d1:e}"
        )));
    }
    let panels = Panels::new(20);
    let two_s = 2.0 * s;
    let dx = u.deriv(x);

    let h = if x == 0.0 || x == 1.0 { 0.1 } else { (0.5 * x.min(1.0 - x)).min(0.1) };
    let tau = h / 1024.0;
    let (near, near_err) = if x == 0.0 || x == 1.0 {
        let dir = if x == 0.0 { 1.0 } else { -1.0 };
        let g = |t: f64| u.difference(x, x + dir * t) + dx * dir * t;
        let u2 = second_derivative(u, x, tau, Some(dir));
        let (v, first) = near_field(&panels, g, h, tau, s);
        // one side only: the quadratic model carries half the symmetric weight
        close_near_field(v, first, 0.5 * u2, tau, s)
    } else {
        let g = |t: f64| u.difference(x, x + t) + u.difference(x, x - t);
        let u2 = second_derivative(u, x, tau, None);
        let (v, first) = near_field(&panels, g, h, tau, s);
        close_near_field(v, first, u2, tau, s)
    };

    let f = |y: f64| (u.difference(x, y) - dx * (x - y)) * (x - y).abs().powf(-1.0 - two_s);
    let (mut far, mut far_err) = (0.0, 0.0);
    if x - h > 0.0 {
        let (v, e) = panels.integrate(0.0, x - h, &[(x - h, h)], f);
        far += v;
        far_err += e;
    }
    if x + h < 1.0 {
        let (v, e) = panels.integrate(x + h, 1.0, &[(x + h, h)], f);
        far += v;
        far_err += e;
    }
    let mut boundary = 0.0;
    for (b, nu, db) in [(0.0, -1.0, d0), (1.0, 1.0, d1)] {
        let dist: f64 = (x - b).abs();
        if dist > 0.0 {
            boundary += (dx - db) * nu * dist.powf(1.0 - two_s) / (two_s - 1.0);
        }
    }
    let value = order.c1s() * (near + far + boundary);
    Ok(PvValue { value, error: order.c1s() * (near_err + far_err) + 1e-14 * value.abs() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exponents::critical_exponents;

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / (1.0 + b.abs())
    }

    #[test]
    fn constants_are_annihilated() {
        let u = SampledFunction::constant(2.5, 1.0).unwrap();
        for s in [0.2, 0.5, 0.8] {
            for x in [0.01, 0.3, 0.77] {
                assert!(eval_pv(&u, x, s, &PVScheme::default()).unwrap().value.abs() < 1e-14);
            }
            if s > 0.5 {
                for x in [0.0, 0.4, 1.0] {
                    assert_eq!(eval_boundary_formula(&u, x, s).unwrap().value, 0.0);
                }
            }
        }
    }

    #[test]
    fn kernel_power_is_annihilated() {
        let s = 0.75;
        let u = SampledFunction::power(2.0 * s - 1.0).unwrap();
        let v = eval_pv(&u, 1.0, s, &PVScheme::default()).unwrap();
        assert!(v.value.abs() < 1e-6, "{v:?}");
    }

    #[test]
    fn power_s_gives_minus_hardy_coefficient() {
        let s = 0.6;
        let u = SampledFunction::power(s).unwrap();
        let v = eval_pv(&u, 1.0, s, &PVScheme::default()).unwrap().value;
        let a_s = FracOrder::new(s).unwrap().a_s();
        assert!(rel(v, -a_s) < 1e-5, "{v} vs {}", -a_s);
    }

    #[test]
    fn power_halfline_values() {
        assert!(eval_power_halfline(0.0, 3.0, 0.4).unwrap().abs() < 1e-14);
        let v = eval_power_halfline(1.0, 2.0, 0.75).unwrap();
        let want = -0.598_413_420_602_149 * 2f64.powf(-0.5);
        assert!((v - want).abs() < 1e-12);
        for s in [0.3, 0.7] {
            let b1 = critical_exponents(s, 1, 1e-13).unwrap().beta1();
            assert!(eval_power_halfline(b1, 1.7, s).unwrap().abs() < 1e-10);
        }
    }

    #[test]
    fn quadrature_matches_closed_form_including_continuation() {
        // beta = 1 > 2s exercises the finite-part tail
        for (beta, s) in [(1.0, 0.3), (0.45, 0.3), (1.0, 0.75), (1.5, 0.6), (2.3, 0.85)] {
            for x in [0.5, 1.0, 3.0] {
                let u = SampledFunction::power(beta).unwrap();
                let v = eval_pv(&u, x, s, &PVScheme::default()).unwrap().value;
                let want = eval_power_halfline(beta, x, s).unwrap();
                assert!(rel(v, want) < 1e-6, "beta={beta} s={s} x={x}: {v} vs {want}");
            }
        }
    }

    #[test]
    fn first_order_subtraction_for_small_s() {
        let s = 0.3;
        let scheme = PVScheme { subtraction_order: 1, ..PVScheme::default() };
        let u = SampledFunction::power(0.8).unwrap();
        let v = eval_pv(&u, 1.0, s, &scheme).unwrap().value;
        assert!(rel(v, eval_power_halfline(0.8, 1.0, s).unwrap()) < 1e-5);
        assert!(eval_pv(&u, 1.0, 0.6, &scheme).is_err());
    }

    #[test]
    fn boundary_formula_matches_pv_inside() {
        let u = SampledFunction::cos_pi();
        for s in [0.6, 0.75] {
            for x in [0.1, 0.5, 0.93] {
                let a = eval_boundary_formula(&u, x, s).unwrap().value;
                let b = eval_pv(&u, x, s, &PVScheme::default()).unwrap().value;
                assert!((a - b).abs() < 1e-6 * (1.0 + b.abs()), "s={s} x={x}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn boundary_formula_rejects_nonzero_flux() {
        let u = SampledFunction::on_interval(1.0, |x| x * x, |x| 2.0 * x).unwrap();
        assert!(matches!(eval_boundary_formula(&u, 0.5, 0.7), Err(Error::Invalid(_))));
        assert!(matches!(
            eval_boundary_formula(&SampledFunction::cos_pi(), 0.5, 0.4),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn rough_function_at_breakpoint() {
        // |x - 0.3|^0.7 with s = 0.2 is integrable at the kink itself
        let u = SampledFunction::on_interval(
            1.0,
            |x: f64| (x - 0.3).abs().powf(0.7),
            |x: f64| 0.7 * (x - 0.3).signum() * (x - 0.3).abs().powf(-0.3),
        )
        .unwrap()
        .with_breakpoints(vec![0.3]);
        let s = 0.2;
        let at = eval_pv(&u, 0.3, s, &PVScheme::default()).unwrap().value;
        // at the kink u(x) = 0 and the integrand is -|y - 0.3|^{-0.7}
        let c1s = FracOrder::new(s).unwrap().c1s();
        let want = -c1s * (0.3f64.powf(0.3) + 0.7f64.powf(0.3)) / 0.3;
        assert!(rel(at, want) < 1e-6, "{at} vs {want}");
        let near = eval_pv(&u, 0.3 + 1e-6, s, &PVScheme::default()).unwrap().value;
        assert!((at - near).abs() < 5.0 * 1e-6f64.powf(0.3), "{at} {near}");
    }

    #[test]
    fn derivative_spot_check() {
        assert!(SampledFunction::cos_pi().check_derivative(&[0.1, 0.5, 0.9]).is_ok());
        let bad = SampledFunction::on_interval(1.0, |x| x * x, |x| x).unwrap();
        assert!(bad.check_derivative(&[0.5]).is_err());
    }
}
