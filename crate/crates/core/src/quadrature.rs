//! Quadrature rules: Gauss-Legendre, Gauss-Jacobi (Golub-Welsch), an adaptive
//! Gauss-Kronrod integrator and geometrically graded composite panels.

use std::collections::BinaryHeap;
use std::f64::consts::PI;

use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{Error, Result};
use crate::special::ln_gamma;

/// A quadrature rule on a reference interval.
#[derive(Debug, Clone)]
pub struct Rule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl Rule {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Maps a rule on `[-1, 1]` to `[0, 1]`.
    pub fn to_unit(&self) -> Rule {
        Rule {
            nodes: self.nodes.iter().map(|x| 0.5 * (x + 1.0)).collect(),
            weights: self.weights.iter().map(|w| 0.5 * w).collect(),
        }
    }

    /// Integrates `f` over `[a, b]`, assuming the rule lives on `[-1, 1]`.
    pub fn integrate<F: FnMut(f64) -> f64>(&self, a: f64, b: f64, mut f: F) -> f64 {
        let c = 0.5 * (a + b);
        let h = 0.5 * (b - a);
        let mut acc = 0.0;
        for (x, w) in self.nodes.iter().zip(&self.weights) {
            acc += w * f(c + h * x);
        }
        acc * h
    }
}

/// `n`-point Gauss-Legendre rule on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> Rule {
    assert!(n >= 1);
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        let mut z = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, z);
            dp = d;
            let dz = p / d;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, z);
        if d != 0.0 {
            dp = d;
        }
        let w = 2.0 / ((1.0 - z * z) * dp * dp);
        nodes[i] = -z;
        nodes[n - 1 - i] = z;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    Rule { nodes, weights }
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// `n`-point Gauss-Jacobi rule on `[-1, 1]` for the weight `(1-x)^alpha (1+x)^beta`.
pub fn gauss_jacobi(n: usize, alpha: f64, beta: f64) -> Result<Rule> {
    if !(alpha > -1.0 && beta > -1.0) {
        return Err(Error::Domain(format!(
            "Gauss-Jacobi needs alpha, beta > -1 (got {alpha}, {beta})"
        )));
    }
    if alpha == 0.0 && beta == 0.0 {
        return Ok(gauss_legendre(n));
    }
    let ab = alpha + beta;
    let mut jac = DMatrix::<f64>::zeros(n, n);
    for k in 0..n {
        let kf = k as f64;
        let t = 2.0 * kf + ab;
        let diag = if k == 0 {
            (beta - alpha) / (ab + 2.0)
        } else {
            (beta * beta - alpha * alpha) / (t * (t + 2.0))
        };
        jac[(k, k)] = diag;
        if k + 1 < n {
            let k1 = kf + 1.0;
            let t1 = 2.0 * k1 + ab;
            let num = 4.0 * k1 * (k1 + alpha) * (k1 + beta) * (k1 + ab);
            let den = t1 * t1 * (t1 + 1.0) * (t1 - 1.0);
            let off = (num / den).sqrt();
            jac[(k, k + 1)] = off;
            jac[(k + 1, k)] = off;
        }
    }
    let mu0 = ((ab + 1.0) * 2f64.ln() + ln_gamma(alpha + 1.0) + ln_gamma(beta + 1.0)
        - ln_gamma(ab + 2.0))
    .exp();
    let eig = SymmetricEigen::new(jac);
    let mut pairs: Vec<(f64, f64)> = (0..n)
        .map(|i| {
            let v0 = eig.eigenvectors[(0, i)];
            (eig.eigenvalues[i], mu0 * v0 * v0)
        })
        .collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    Ok(Rule {
        nodes: pairs.iter().map(|p| p.0).collect(),
        weights: pairs.iter().map(|p| p.1).collect(),
    })
}

/// Rule on `[0, 1]` for the weight `t^p`, `p > -1`.
pub fn gauss_power(n: usize, p: f64) -> Result<Rule> {
    // (1+x)^p on [-1,1] with x = 2t-1 gives 2^p t^p, dx = 2 dt
    let r = gauss_jacobi(n, 0.0, p)?;
    let scale = 2f64.powf(-(p + 1.0));
    Ok(Rule {
        nodes: r.nodes.iter().map(|x| 0.5 * (x + 1.0)).collect(),
        weights: r.weights.iter().map(|w| w * scale).collect(),
    })
}

/// Panel endpoints that subdivide `[a, b]` geometrically (ratio 2) towards `a`
/// until the panel next to `a` is narrower than `min_width`.
pub fn geometric_breaks(a: f64, b: f64, min_width: f64) -> Vec<f64> {
    let mut pts = vec![b];
    let mut w = (b - a) * 0.5;
    while w > min_width && pts.len() < 200 {
        pts.push(a + w);
        w *= 0.5;
    }
    pts.push(a);
    pts.reverse();
    pts
}

/// Composite rule over `[a, b]` refined geometrically towards the requested
/// ends. `min_a`/`min_b` are the smallest panel widths at each end (`None`
/// leaves that end unrefined).
pub fn graded_integral<F: FnMut(f64) -> f64>(
    rule: &Rule,
    a: f64,
    b: f64,
    min_a: Option<f64>,
    min_b: Option<f64>,
    mut f: F,
) -> f64 {
    if b <= a {
        return 0.0;
    }
    let mut breaks: Vec<f64> = Vec::new();
    match (min_a, min_b) {
        (None, None) => {
            breaks.push(a);
            breaks.push(b);
        }
        (Some(ma), None) => breaks = geometric_breaks(a, b, ma),
        (None, Some(mb)) => {
            breaks = geometric_breaks(-b, -a, mb).into_iter().map(|x| -x).collect();
            breaks.reverse();
        }
        (Some(ma), Some(mb)) => {
            let m = 0.5 * (a + b);
            breaks = geometric_breaks(a, m, ma);
            breaks.pop();
            let mut right: Vec<f64> = geometric_breaks(-b, -m, mb).into_iter().map(|x| -x).collect();
            right.reverse();
            breaks.extend(right);
        }
    }
    breaks
        .windows(2)
        .map(|w| rule.integrate(w[0], w[1], &mut f))
        .sum()
}

// Gauss-Kronrod 7-15 abscissae and weights.
const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

fn gk15<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kron = WGK[7] * fc;
    let mut gauss = WG[3] * fc;
    for j in 0..7 {
        let x = h * XGK[j];
        let s = f(c - x) + f(c + x);
        kron += WGK[j] * s;
        if j % 2 == 1 {
            gauss += WG[j / 2] * s;
        }
    }
    let (kron, gauss) = (kron * h, gauss * h);
    (kron, (kron - gauss).abs())
}

#[derive(PartialEq)]
struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl Eq for Segment {}

impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Segment {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.error.total_cmp(&other.error)
    }
}

/// Result of [`adaptive`].
#[derive(Debug, Clone, Copy)]
pub struct Integral {
    pub value: f64,
    pub error: f64,
    pub evaluations: usize,
}

/// Globally adaptive Gauss-Kronrod (7-15) integration of `f` over `[a, b]`.
///
/// Stops when the summed error estimate is below `max(abs_tol, rel_tol |I|)`
/// or after `max_segments` bisections, in which case the best estimate is
/// returned together with its (too large) error.
pub fn adaptive<F: FnMut(f64) -> f64>(
    mut f: F,
    a: f64,
    b: f64,
    abs_tol: f64,
    rel_tol: f64,
    max_segments: usize,
) -> Integral {
    let (v, e) = gk15(&mut f, a, b);
    let mut heap = BinaryHeap::new();
    heap.push(Segment { a, b, value: v, error: e });
    let mut total = v;
    let mut err = e;
    let mut evals = 15;
    while err > abs_tol.max(rel_tol * total.abs()) && heap.len() < max_segments {
        let seg = heap.pop().expect("heap is never empty");
        let m = 0.5 * (seg.a + seg.b);
        if m <= seg.a || m >= seg.b {
            heap.push(seg);
            break;
        }
        let (v1, e1) = gk15(&mut f, seg.a, m);
        let (v2, e2) = gk15(&mut f, m, seg.b);
        evals += 30;
        total += v1 + v2 - seg.value;
        err += e1 + e2 - seg.error;
        heap.push(Segment { a: seg.a, b: m, value: v1, error: e1 });
        heap.push(Segment { a: m, b: seg.b, value: v2, error: e2 });
    }
    // re-sum to shed accumulated cancellation in the running totals
    let (value, error) = heap
        .iter()
        .fold((0.0, 0.0), |(v, e), s| (v + s.value, e + s.error));
    Integral { value, error, evaluations: evals }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn legendre_integrates_polynomials_exactly() {
        let r = gauss_legendre(10);
        let sum: f64 = r.weights.iter().sum();
        assert!((sum - 2.0).abs() < 1e-14);
        let v = r.integrate(0.0, 2.0, |x| x.powi(19));
        assert!((v - 2f64.powi(20) / 20.0).abs() < 1e-9 * 2f64.powi(20) / 20.0);
    }

    #[test]
    fn jacobi_moments() {
        // int_0^1 t^p t^k dt = 1 / (p + k + 1)
        for p in [-0.4, 0.3, 1.5] {
            let r = gauss_power(8, p).unwrap();
            for k in 0..15 {
                let v: f64 = r.nodes.iter().zip(&r.weights).map(|(t, w)| w * t.powi(k)).sum();
                let want = 1.0 / (p + k as f64 + 1.0);
                assert!((v - want).abs() < 1e-13, "p={p} k={k}: {v} vs {want}");
            }
        }
        let both = gauss_jacobi(12, 0.3, -0.6).unwrap();
        // int_{-1}^1 (1-x)^a (1+x)^b dx = 2^{a+b+1} B(a+1, b+1)
        let mass: f64 = both.weights.iter().sum();
        let want = (0.7f64 * 2f64.ln() + ln_gamma(1.3) + ln_gamma(0.4) - ln_gamma(1.7)).exp();
        assert!((mass - want).abs() < 1e-13);
    }

    #[test]
    fn adaptive_handles_endpoint_singularity() {
        let r = adaptive(|x: f64| x.powf(-0.5), 0.0, 1.0, 1e-12, 1e-12, 2000);
        assert!((r.value - 2.0).abs() < 1e-9, "{r:?}");
        let r = adaptive(|x: f64| x.sin(), 0.0, PI, 1e-14, 0.0, 100);
        assert!((r.value - 2.0).abs() < 1e-13);
    }

    #[test]
    fn graded_panels_cover_interval() {
        let rule = gauss_legendre(12);
        let v = graded_integral(&rule, 0.0, 1.0, Some(1e-14), Some(1e-14), |x: f64| x.powf(-0.3));
        assert!((v - 1.0 / 0.7).abs() < 1e-8);
        let v = graded_integral(&rule, 1.0, 3.0, None, None, |x| x * x);
        assert!((v - 26.0 / 3.0).abs() < 1e-12);
        let b = geometric_breaks(0.0, 1.0, 0.1);
        assert_eq!(b.first(), Some(&0.0));
        assert_eq!(b.last(), Some(&1.0));
        assert!(b.windows(2).all(|w| w[0] < w[1]));
    }
}
