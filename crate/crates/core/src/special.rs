//! Gamma-family evaluation, the fractional normalization constants and the
//! closed-form power coefficients of the full-space and regional operators.
//!
//! Every product of Gamma values goes through [`ln_gamma`] with the sign
//! tracked separately, and every `sin(pi x)` goes through [`sin_pi`] so that
//! arguments close to integers keep full relative accuracy.

use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{Error, Result};

/// Largest admissible order; `Gamma(1 - s)` has a pole at `s = 1`.
pub const MAX_ORDER: f64 = 1.0 - 1e-6;

/// Distance to the coefficient pole set inside which evaluation is refused.
pub const POLE_GUARD: f64 = 1e-8;

// Lanczos coefficients for g = 671/128 (15-term series), accurate to a few ulp
// for positive arguments.
const LANCZOS_G: f64 = 5.242_187_5;
const LANCZOS_C0: f64 = 0.999_999_999_999_997_1;
const LANCZOS: [f64; 14] = [
    57.156_235_665_862_92,
    -59.597_960_355_475_49,
    14.136_097_974_741_747,
    -0.491_913_816_097_620_2,
    0.339_946_499_848_118_9e-4,
    0.465_236_289_270_485_7e-4,
    -0.983_744_753_048_795_6e-4,
    0.158_088_703_224_912_5e-3,
    -0.210_264_441_724_104_9e-3,
    0.217_439_618_115_212_6e-3,
    -0.164_318_106_536_763_9e-3,
    0.844_182_239_838_527_4e-4,
    -0.261_908_384_015_814_1e-4,
    0.368_991_826_595_316_2e-5,
];
const SQRT_2PI: f64 = 2.506_628_274_631_000_5;

/// `ln Gamma(x)` for `x > 0`.
pub fn ln_gamma(x: f64) -> f64 {
    debug_assert!(x > 0.0, "ln_gamma called with non-positive argument {x}");
    let mut y = x;
    let tmp = x + LANCZOS_G;
    let tmp = (x + 0.5) * tmp.ln() - tmp;
    let mut ser = LANCZOS_C0;
    for c in LANCZOS {
        y += 1.0;
        ser += c / y;
    }
    tmp + (SQRT_2PI * ser / x).ln()
}

/// `(ln |Gamma(x)|, sign Gamma(x))` for any non-pole real `x`.
///
/// Negative arguments are shifted into `(0, 1]` with the recurrence
/// `Gamma(z) = Gamma(z + m) / (z (z+1) ... (z+m-1))`.
pub fn ln_gamma_signed(x: f64) -> (f64, f64) {
    if x > 0.0 {
        return (ln_gamma(x), 1.0);
    }
    let m = (-x).floor() as usize + 1;
    let mut log_prod = 0.0;
    let mut sign = 1.0;
    for j in 0..m {
        let f = x + j as f64;
        log_prod += f.abs().ln();
        if f < 0.0 {
            sign = -sign;
        }
    }
    (ln_gamma(x + m as f64) - log_prod, sign)
}

/// `Gamma(x)` for any non-pole real `x`; overflows to infinity past ~171.6.
pub fn gamma(x: f64) -> f64 {
    let (l, sign) = ln_gamma_signed(x);
    sign * l.exp()
}

/// `sin(pi x)` with the argument reduced to `[-1/2, 1/2]` first.
pub fn sin_pi(x: f64) -> f64 {
    let n = x.round();
    let f = x - n;
    let v = (PI * f).sin();
    if (n as i64) % 2 == 0 {
        v
    } else {
        -v
    }
}

/// `cos(pi x)` with the same reduction as [`sin_pi`].
pub fn cos_pi(x: f64) -> f64 {
    let n = x.round();
    let f = x - n;
    let v = (PI * f).cos();
    if (n as i64) % 2 == 0 {
        v
    } else {
        -v
    }
}

/// Distance from `x` to the nearest integer.
pub fn dist_to_integer(x: f64) -> f64 {
    (x - x.round()).abs()
}

fn check_order(s: f64) -> Result<()> {
    if s.is_finite() && s > 0.0 && s <= MAX_ORDER {
        Ok(())
    } else {
        Err(Error::InvalidOrder(s))
    }
}

/// `c_{N,s} = s 4^s Gamma(N/2 + s) / (pi^{N/2} Gamma(1 - s))`.
pub fn normalization_constant(n: u32, s: f64) -> Result<f64> {
    check_order(s)?;
    if n == 0 {
        return Err(Error::Domain("dimension N must be at least 1".into()));
    }
    let half_n = f64::from(n) / 2.0;
    let ln = s.ln() + s * 4f64.ln() + ln_gamma(half_n + s) - half_n * PI.ln() - ln_gamma(1.0 - s);
    Ok(ln.exp())
}

/// A fractional order `s` together with the constants that depend only on it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FracOrder {
    s: f64,
    c1s: f64,
    a_s: f64,
    kappabar: f64,
}

impl FracOrder {
    pub fn new(s: f64) -> Result<Self> {
        check_order(s)?;
        let c1s = normalization_constant(1, s)?;
        let a_s = c1s / (2.0 * s);
        // Gamma(1-s) / (2^{2s-1} Gamma(s))
        let kappabar = (ln_gamma(1.0 - s) - (2.0 * s - 1.0) * 2f64.ln() - ln_gamma(s)).exp();
        Ok(FracOrder { s, c1s, a_s, kappabar })
    }

    #[inline]
    pub fn s(&self) -> f64 {
        self.s
    }

    /// One-dimensional normalization constant `c_{1,s}`.
    #[inline]
    pub fn c1s(&self) -> f64 {
        self.c1s
    }

    /// Hardy coefficient `a_s = c_{1,s} / (2s)`.
    #[inline]
    pub fn a_s(&self) -> f64 {
        self.a_s
    }

    /// Flux constant of the extension problem.
    #[inline]
    pub fn kappabar(&self) -> f64 {
        self.kappabar
    }

    /// `c_{N,s}` in dimension `n`.
    pub fn cns(&self, n: u32) -> f64 {
        normalization_constant(n, self.s).expect("order validated at construction")
    }

    /// `c_{1,s}` through `(2s/pi) Gamma(2s) sin(pi s)`, an independent route to [`FracOrder::c1s`].
    pub fn c1s_reflection(&self) -> f64 {
        let s = self.s;
        2.0 * s / PI * gamma(2.0 * s) * sin_pi(s)
    }
}

/// `h1(beta) = B(beta - 2s + 1, 2s) = Gamma(beta-2s+1) Gamma(2s) / Gamma(beta+1)`.
pub fn h1(beta: f64, s: f64) -> Result<f64> {
    check_order(s)?;
    if !(beta > 2.0 * s - 1.0) {
        return Err(Error::Domain(format!(
            "h1 requires beta > 2s - 1 = {}, got {beta}",
            2.0 * s - 1.0
        )));
    }
    Ok((ln_gamma(beta - 2.0 * s + 1.0) + ln_gamma(2.0 * s) - ln_gamma(beta + 1.0)).exp())
}

/// `h2(beta) = pi cot(pi (beta - 2s)) + pi cot(pi s)`, refused within `guard` of its poles.
pub fn h2_with_guard(beta: f64, s: f64, guard: f64) -> Result<f64> {
    check_order(s)?;
    let z = beta - 2.0 * s;
    let d = dist_to_integer(z);
    if d < guard {
        return Err(Error::Pole { beta, distance: d });
    }
    Ok(PI * cos_pi(z) / sin_pi(z) + PI * cos_pi(s) / sin_pi(s))
}

/// [`h2_with_guard`] with the default [`POLE_GUARD`].
pub fn h2(beta: f64, s: f64) -> Result<f64> {
    h2_with_guard(beta, s, POLE_GUARD)
}

/// Coefficient `C_full(beta)` with `(-Delta)^s (x_+)^beta = C_full(beta) (x_+)^{beta-2s}`.
///
/// Evaluated as `-Gamma(beta+1) Gamma(2s-beta) sin(pi(beta-s)) / pi`. This is
/// finite at the removable points `beta = 2s-1-m`, and `Gamma(2s-beta)` for
/// `beta > 2s` goes through the downward recurrence in [`ln_gamma_signed`].
pub fn full_power_coeff(beta: f64, s: f64) -> Result<f64> {
    check_order(s)?;
    if !(beta > -1.0) {
        return Err(Error::Domain(format!("power coefficient requires beta > -1, got {beta}")));
    }
    let z = 2.0 * s - beta;
    if z <= POLE_GUARD {
        let d = dist_to_integer(z);
        if d < POLE_GUARD {
            return Err(Error::Pole { beta, distance: d });
        }
    }
    let (lg_a, sg_a) = ln_gamma_signed(beta + 1.0);
    let (lg_b, sg_b) = ln_gamma_signed(z);
    let sn = sin_pi(beta - s);
    if sn == 0.0 {
        return Ok(0.0);
    }
    Ok(-sg_a * sg_b * (lg_a + lg_b).exp() * sn / PI)
}

/// Coefficient `C_reg(beta) = C_full(beta) - a_s`, so that the regional
/// operator on the half-line maps `x^beta` to `C_reg(beta) x^{beta-2s}`.
pub fn regional_power_coeff(beta: f64, s: f64) -> Result<f64> {
    let order = FracOrder::new(s)?;
    Ok(full_power_coeff(beta, s)? - order.a_s())
}

/// `kappa_s := C_reg(1)`, the coefficient of `x^{1-2s}` in the image of `x`.
///
/// The closed form is `-c_{1,s}/(2s-1)`, which is negative for `s > 1/2`;
/// callers that need the sign should read it from the value.
pub fn kappa_linear(s: f64) -> Result<f64> {
    regional_power_coeff(1.0, s)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs().max(1e-300)
    }

    #[test]
    fn gamma_against_high_precision_values() {
        // frozen from a 40-digit evaluation
        let cases: [(f64, f64); 7] = [
            (0.5, 1.772_453_850_905_516),
            (1e-3, 999.423_772_484_595_5),
            (7.3, 1271.423_633_663_909_3),
            (-0.5, -3.544_907_701_811_032),
            (-2.7, -0.931_082_784_838_963_8),
            (30.0, 8.841_761_993_739_702e30),
            (171.2, 2.028_513_580_515_730e307),
        ];
        for (x, want) in cases {
            // exp() amplifies the absolute error of ln_gamma by |ln Gamma| near overflow
            let tol = 2e-14 * (1.0 + want.abs().ln().abs());
            assert!(rel(gamma(x), want) < tol, "gamma({x}) = {} vs {want}", gamma(x));
        }
    }

    #[test]
    fn sin_pi_is_exact_at_integers() {
        for n in -5..=5 {
            assert_eq!(sin_pi(n as f64), 0.0);
        }
        assert!((sin_pi(0.5) - 1.0).abs() < 1e-16);
        assert!((cos_pi(2.0) - 1.0).abs() < 1e-16);
        assert!(rel(sin_pi(3.0 + 1e-9), -PI * 1e-9) < 1e-6);
    }

    #[test]
    fn normalization_constant_values() {
        assert!(rel(normalization_constant(1, 0.5).unwrap(), 1.0 / PI) < 1e-14);
        assert!(rel(normalization_constant(2, 0.75).unwrap(), 0.171_167_129_690_552_34) < 1e-13);
        assert!(rel(normalization_constant(3, 0.6).unwrap(), 0.116_789_289_179_239_56) < 1e-13);
        let near_one = normalization_constant(1, 0.999_999).unwrap();
        assert!(near_one.is_finite());
        assert!(rel(near_one, 1.999_996_308_864_355_6e-6) < 1e-9);
    }

    #[test]
    fn order_outside_interval_is_rejected() {
        for s in [0.0, -0.1, 1.0, 1.0 - 1e-7, f64::NAN] {
            assert!(matches!(FracOrder::new(s), Err(Error::InvalidOrder(_))), "s = {s}");
        }
        assert!(FracOrder::new(MAX_ORDER).is_ok());
    }

    #[test]
    fn frac_order_invariants() {
        for i in 1..100 {
            let s = i as f64 / 100.0;
            let o = FracOrder::new(s).unwrap();
            assert!(o.c1s() > 0.0 && o.a_s() > 0.0 && o.kappabar() > 0.0);
            assert_eq!(o.a_s(), o.c1s() / (2.0 * s));
            assert!(rel(o.c1s(), o.c1s_reflection()) < 1e-12, "s = {s}");
        }
        let half = FracOrder::new(0.5).unwrap();
        assert!(rel(half.kappabar(), 1.0) < 1e-14);
    }

    #[test]
    fn h1_special_values() {
        for s in [0.1, 0.3, 0.45] {
            assert!(rel(h1(0.0, s).unwrap(), PI / (2.0 * PI * s).sin()) < 1e-13);
        }
        assert!(rel(h1(2.0, 0.5).unwrap(), 0.5) < 1e-14);
        // Beta integral, frozen from 40-digit quadrature
        assert!(rel(h1(3.2, 0.3).unwrap(), 0.713_624_425_091_639_4) < 1e-13);
        assert!(matches!(h1(0.1, 0.6), Err(Error::Domain(_))));
    }

    #[test]
    fn h2_special_values() {
        for s in [0.2, 0.35, 0.6, 0.85] {
            assert!(rel(h2(0.0, s).unwrap(), PI / (2.0 * PI * s).sin()) < 1e-12);
            for k in 0..4 {
                assert!(h2(s + k as f64, s).unwrap().abs() < 1e-12);
            }
            let b = 0.37;
            assert!(rel(h2(b + 1.0, s).unwrap(), h2(b, s).unwrap()) < 1e-12);
        }
        assert!(matches!(h2(1.2 + 1e-10, 0.6), Err(Error::Pole { .. })));
    }

    #[test]
    fn full_power_coeff_values() {
        for s in [0.15, 0.5, 0.7] {
            assert_eq!(full_power_coeff(s, s).unwrap(), 0.0);
        }
        // removable point beta = 2s - 1 evaluates to a_s
        for s in [0.55, 0.75, 0.9] {
            let o = FracOrder::new(s).unwrap();
            assert!(rel(full_power_coeff(2.0 * s - 1.0, s).unwrap(), o.a_s()) < 1e-13);
        }
        let cases = [
            (1.0, 0.75, -0.398_942_280_401_432_7),
            (2.5, 0.3, -3.459_310_814_733_254_4),
            (-0.5, 0.4, 0.156_468_783_077_467_44),
            (3.7, 0.6, -1.434_867_540_025_951_8),
        ];
        for (b, s, want) in cases {
            assert!(rel(full_power_coeff(b, s).unwrap(), want) < 1e-13, "beta={b} s={s}");
        }
    }

    #[test]
    fn coefficient_poles_are_refused() {
        assert!(matches!(full_power_coeff(1.5, 0.75), Err(Error::Pole { .. })));
        assert!(matches!(full_power_coeff(2.5 + 1e-10, 0.75), Err(Error::Pole { .. })));
        assert!(full_power_coeff(1.5 + 1e-6, 0.75).is_ok());
        assert!(matches!(full_power_coeff(-1.0, 0.5), Err(Error::Domain(_))));
    }

    #[test]
    fn regional_coeff_values() {
        for s in [0.1, 0.25, 0.4, 0.5, 0.6, 0.75, 0.9] {
            assert!(regional_power_coeff(0.0, s).unwrap().abs() < 1e-12);
        }
        for s in [0.6, 0.75, 0.9] {
            assert!(regional_power_coeff(2.0 * s - 1.0, s).unwrap().abs() < 1e-12);
        }
        let c = regional_power_coeff(1.0, 0.75).unwrap();
        assert!(rel(c, -0.598_413_420_602_149) < 1e-13);
        let o = FracOrder::new(0.75).unwrap();
        assert!(rel(c, -o.c1s() / 0.5) < 1e-12);
        assert!(kappa_linear(0.75).unwrap() < 0.0);
        assert!(kappa_linear(0.3).unwrap() > 0.0);
    }
}
