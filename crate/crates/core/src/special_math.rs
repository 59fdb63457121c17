//! Scalar special functions and Gauss-Hermite quadrature.
//!
//! Everything here is evaluated in `f64`. Hermite polynomials use the
//! physicists' convention, `H_{l+1}(x) = 2x H_l(x) - 2l H_{l-1}(x)`, the
//! quadrature rules integrate against the weight `e^{-u^2}`.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Arc, Mutex, OnceLock};

use crate::error::{Error, Result};

/// Largest Gauss-Hermite rule the Newton node solver supports. Past roughly
/// 180 nodes the asymptotic initial guesses stop bracketing distinct roots.
pub const MAX_RULE_ORDER: usize = 160;

const NODE_TOLERANCE: f64 = 1e-14;
const MAX_NEWTON_STEPS: usize = 100;

/// Physicists' Hermite polynomial `H_l(x)` by upward recurrence.
pub fn hermite_polynomial(l: u32, x: f64) -> f64 {
    let mut prev = 1.0;
    if l == 0 {
        return prev;
    }
    let mut cur = 2.0 * x;
    for k in 1..l {
        let next = 2.0 * x * cur - 2.0 * f64::from(k) * prev;
        prev = cur;
        cur = next;
    }
    cur
}

/// `H_l(x) / sqrt(2^l l!)`, computed with the rescaled recurrence so that
/// large `l` does not overflow the normalization.
pub fn hermite_normalized(l: u32, x: f64) -> f64 {
    let mut prev = 1.0;
    if l == 0 {
        return prev;
    }
    let mut cur = 2.0_f64.sqrt() * x;
    for k in 1..l {
        let k = f64::from(k);
        let next = (2.0 / (k + 1.0)).sqrt() * x * cur - (k / (k + 1.0)).sqrt() * prev;
        prev = cur;
        cur = next;
    }
    cur
}

/// Generalized Laguerre polynomial `L_p^{alpha}(x)`.
pub fn laguerre_generalized(p: u32, alpha: f64, x: f64) -> f64 {
    let mut prev = 1.0;
    if p == 0 {
        return prev;
    }
    let mut cur = 1.0 + alpha - x;
    for k in 1..p {
        let k = f64::from(k);
        let next = ((2.0 * k + 1.0 + alpha - x) * cur - (k + alpha) * prev) / (k + 1.0);
        prev = cur;
        cur = next;
    }
    cur
}

/// `n!` as a float. Overflows to infinity past `170!`.
pub fn factorial(n: u32) -> f64 {
    (1..=n).fold(1.0, |acc, k| acc * f64::from(k))
}

/// Binomial coefficient `C(n, k)`, zero when `k > n`.
pub fn binomial(n: u32, k: u32) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    (0..k).fold(1.0, |acc, j| acc * f64::from(n - j) / f64::from(j + 1))
}

/// `x! = Gamma(x + 1)` on the half-integer lattice `x in {-1/2, 0, 1/2, 1, ...}`.
///
/// Integer arguments give `n!`; half-integer arguments use
/// `Gamma(n + 1/2) = sqrt(pi) * prod_{k=1}^{n} (k - 1/2)`.
pub fn half_integer_factorial(x: f64) -> Result<f64> {
    let twice = 2.0 * x;
    if !twice.is_finite() || twice.fract() != 0.0 {
        return Err(Error::InvalidArgument(format!(
            "half_integer_factorial needs a multiple of 1/2, got {x}"
        )));
    }
    if twice < -1.0 {
        return Err(Error::InvalidArgument(format!(
            "half_integer_factorial is undefined below -1/2, got {x}"
        )));
    }
    let twice = twice as i64;
    if twice % 2 == 0 {
        Ok(factorial((twice / 2) as u32))
    } else {
        // x = n - 1/2, Gamma(x + 1) = Gamma(n + 1/2)
        let n = (twice + 1) / 2;
        Ok((1..=n).fold(PI.sqrt(), |acc, k| acc * (k as f64 - 0.5)))
    }
}

/// Order and convergence target for Gauss-Hermite integration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureSpec {
    pub rule_order: usize,
    pub abs_tolerance: f64,
}

impl QuadratureSpec {
    pub fn new(rule_order: usize, abs_tolerance: f64) -> Result<Self> {
        if rule_order == 0 {
            return Err(Error::InvalidArgument(
                "rule_order must be at least 1".into(),
            ));
        }
        if abs_tolerance.is_nan() || abs_tolerance < 0.0 {
            return Err(Error::InvalidArgument(format!(
                "abs_tolerance must be nonnegative, got {abs_tolerance}"
            )));
        }
        Ok(Self {
            rule_order,
            abs_tolerance,
        })
    }

    /// Highest polynomial degree the rule integrates exactly.
    pub fn exact_degree(&self) -> usize {
        2 * self.rule_order - 1
    }

    /// Fails unless a polynomial of `degree` is integrated exactly.
    pub fn check_degree(&self, degree: usize, context: impl FnOnce() -> String) -> Result<()> {
        if degree > self.exact_degree() {
            return Err(Error::QuadratureUnderresolved {
                rule_order: self.rule_order,
                degree,
                needed: degree / 2 + 1,
                context: context(),
            });
        }
        Ok(())
    }
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self {
            rule_order: 64,
            abs_tolerance: 1e-12,
        }
    }
}

/// Gauss-Hermite nodes and weights for `∫ f(u) e^{-u^2} du`, nodes ascending.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussHermiteRule {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussHermiteRule {
    /// Computes the rule by Newton iteration on the orthonormal Hermite
    /// recurrence, using the asymptotic initial guesses for the largest roots.
    pub fn new(order: usize) -> Result<Self> {
        if order == 0 {
            return Err(Error::InvalidArgument(
                "rule order must be at least 1".into(),
            ));
        }
        if order > MAX_RULE_ORDER {
            return Err(Error::RuleOrderTooLarge {
                requested: order,
                max: MAX_RULE_ORDER,
            });
        }
        let n = order;
        let nf = n as f64;
        let pim4 = PI.powf(-0.25);
        let half = n.div_ceil(2);
        // Positive roots, largest first.
        let mut roots: Vec<f64> = Vec::with_capacity(half);
        let mut weights: Vec<f64> = Vec::with_capacity(half);
        let mut z = 0.0_f64;
        for i in 0..half {
            z = match i {
                0 => (2.0 * nf + 1.0).sqrt() - 1.85575 * (2.0 * nf + 1.0).powf(-1.0 / 6.0),
                1 => z - 1.14 * nf.powf(0.426) / z,
                2 => 1.86 * z - 0.86 * roots[0],
                3 => 1.91 * z - 0.91 * roots[1],
                _ => 2.0 * z - roots[i - 2],
            };
            let mut converged = false;
            let mut deriv = 0.0;
            for _ in 0..MAX_NEWTON_STEPS {
                let mut p1 = pim4;
                let mut p2 = 0.0;
                for j in 1..=n {
                    let jf = j as f64;
                    let p3 = p2;
                    p2 = p1;
                    p1 = z * (2.0 / jf).sqrt() * p2 - ((jf - 1.0) / jf).sqrt() * p3;
                }
                deriv = (2.0 * nf).sqrt() * p2;
                let step = p1 / deriv;
                z -= step;
                if step.abs() <= NODE_TOLERANCE * z.abs().max(1.0) {
                    converged = true;
                    break;
                }
            }
            if !converged || !z.is_finite() {
                return Err(Error::RuleNotConverged { order });
            }
            roots.push(z);
            weights.push(2.0 / (deriv * deriv));
        }
        if n % 2 == 1 {
            // The middle root is exactly zero.
            if let Some(last) = roots.last_mut() {
                *last = 0.0;
            }
        }

        let mut nodes = Vec::with_capacity(n);
        let mut ws = Vec::with_capacity(n);
        for (&x, &w) in roots.iter().zip(&weights) {
            nodes.push(-x);
            ws.push(w);
        }
        let mirrored = if n % 2 == 1 { half - 1 } else { half };
        for k in (0..mirrored).rev() {
            nodes.push(roots[k]);
            ws.push(weights[k]);
        }
        let weight_sum: f64 = ws.iter().sum();
        let ordered = nodes.windows(2).all(|w| w[0] < w[1]);
        if !ordered || (weight_sum - PI.sqrt()).abs() > 1e-12 {
            return Err(Error::RuleNotConverged { order });
        }
        Ok(Self { nodes, weights: ws })
    }

    /// Process-wide cached rule of the given order.
    pub fn cached(order: usize) -> Result<Arc<Self>> {
        static CACHE: OnceLock<Mutex<HashMap<usize, Arc<GaussHermiteRule>>>> = OnceLock::new();
        let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
        if let Some(rule) = cache.lock().expect("rule cache poisoned").get(&order) {
            return Ok(Arc::clone(rule));
        }
        let rule = Arc::new(Self::new(order)?);
        cache
            .lock()
            .expect("rule cache poisoned")
            .insert(order, Arc::clone(&rule));
        Ok(rule)
    }

    pub fn order(&self) -> usize {
        self.nodes.len()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn pairs(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.nodes.iter().copied().zip(self.weights.iter().copied())
    }

    /// `∫ f(u) e^{-u^2} du`.
    pub fn integrate<F: Fn(f64) -> f64>(&self, f: F) -> f64 {
        self.pairs().map(|(u, w)| w * f(u)).sum()
    }

    /// `∫ g(x) dx` for an integrand that decays like `e^{-x^2/scale^2}`.
    ///
    /// Substitutes `x = scale * u` and divides the Gaussian back out, so the
    /// result is exact when `g(x) e^{x^2/scale^2}` is a low-degree polynomial.
    pub fn integrate_scaled<F: Fn(f64) -> f64>(&self, scale: f64, g: F) -> f64 {
        scale
            * self
                .pairs()
                .map(|(u, w)| w * (u * u).exp() * g(scale * u))
                .sum::<f64>()
    }
}

/// Integrates `f(u) e^{-u^2}` with the requested rule and again with a rule of
/// twice the order; fails when the two disagree by more than the tolerance.
pub fn integrate_converged<F: Fn(f64) -> f64>(spec: &QuadratureSpec, f: F) -> Result<f64> {
    let coarse = GaussHermiteRule::cached(spec.rule_order)?.integrate(&f);
    let fine_order = (2 * spec.rule_order).min(MAX_RULE_ORDER);
    if fine_order == spec.rule_order {
        return Ok(coarse);
    }
    let fine = GaussHermiteRule::cached(fine_order)?.integrate(&f);
    let change = (fine - coarse).abs();
    if change > spec.abs_tolerance {
        return Err(Error::QuadratureNotConverged {
            change,
            tolerance: spec.abs_tolerance,
        });
    }
    Ok(fine)
}

/// The (cached) rule described by `spec`.
pub fn gauss_hermite_rule(spec: &QuadratureSpec) -> Result<Arc<GaussHermiteRule>> {
    GaussHermiteRule::cached(spec.rule_order)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    /// Explicit sum form of `H_l`, kept only as an oracle.
    fn hermite_explicit(l: u32, x: f64) -> f64 {
        (0..=l / 2)
            .map(|k| {
                let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
                sign * factorial(l) / (factorial(l - 2 * k) * factorial(k))
                    * (2.0 * x).powi((l - 2 * k) as i32)
            })
            .sum()
    }

    #[test]
    fn hermite_examples() {
        assert_eq!(hermite_polynomial(0, 3.7), 1.0);
        assert_eq!(hermite_polynomial(1, 2.0), 4.0);
        assert_eq!(hermite_polynomial(2, 1.0), 2.0);
    }

    #[test]
    fn hermite_recurrence_matches_explicit_sum() {
        for l in 0..=15 {
            for &x in &[-3.1, -1.0, -0.2, 0.0, 0.45, 1.7, 2.5] {
                let a = hermite_polynomial(l, x);
                let b = hermite_explicit(l, x);
                assert!(
                    (a - b).abs() <= 1e-10 * b.abs().max(1.0),
                    "l={l} x={x}: {a} vs {b}"
                );
            }
        }
    }

    #[test]
    fn normalized_hermite_matches_scaled_polynomial() {
        for l in 0..30 {
            let x = 1.3;
            let expected = hermite_polynomial(l, x) / (2f64.powi(l as i32) * factorial(l)).sqrt();
            let got = hermite_normalized(l, x);
            assert!((got - expected).abs() <= 1e-12 * expected.abs().max(1.0));
        }
    }

    #[test]
    fn laguerre_low_orders() {
        let x = 0.7;
        assert_eq!(laguerre_generalized(0, 2.0, x), 1.0);
        assert!((laguerre_generalized(1, 2.0, x) - (3.0 - x)).abs() < 1e-15);
        let l2 = (x * x - 2.0 * (2.0 + 2.0) * x + (2.0 + 1.0) * (2.0 + 2.0)) / 2.0;
        assert!((laguerre_generalized(2, 2.0, x) - l2).abs() < 1e-14);
    }

    #[test]
    fn half_integer_factorial_examples() {
        assert!((half_integer_factorial(-0.5).unwrap() - 1.7724539).abs() < 1e-7);
        assert_eq!(half_integer_factorial(0.0).unwrap(), 1.0);
        assert!((half_integer_factorial(1.5).unwrap() - 1.3293404).abs() < 1e-7);
        assert_eq!(half_integer_factorial(5.0).unwrap(), 120.0);
    }

    #[test]
    fn half_integer_factorial_rejects_bad_arguments() {
        assert!(half_integer_factorial(-1.0).is_err());
        assert!(half_integer_factorial(-1.5).is_err());
        assert!(half_integer_factorial(0.25).is_err());
        assert!(half_integer_factorial(f64::NAN).is_err());
    }

    #[test]
    fn lowest_rules() {
        let r1 = GaussHermiteRule::new(1).unwrap();
        assert_eq!(r1.nodes(), &[0.0]);
        assert!((r1.weights()[0] - PI.sqrt()).abs() < 1e-14);

        let r2 = GaussHermiteRule::new(2).unwrap();
        let s = 0.5_f64.sqrt();
        assert!((r2.nodes()[0] + s).abs() < 1e-14);
        assert!((r2.nodes()[1] - s).abs() < 1e-14);
        for w in r2.weights() {
            assert!((w - PI.sqrt() / 2.0).abs() < 1e-14);
        }
    }

    #[test]
    fn rule_properties() {
        for order in [1, 2, 3, 5, 10, 17, 32, 64, 128, MAX_RULE_ORDER] {
            let rule = GaussHermiteRule::new(order).unwrap();
            assert_eq!(rule.order(), order);
            let sum: f64 = rule.weights().iter().sum();
            assert!((sum - PI.sqrt()).abs() < 1e-12, "order {order}: {sum}");
            assert!(rule.weights().iter().all(|&w| w > 0.0));
            for k in 0..order {
                assert_eq!(rule.nodes()[k], -rule.nodes()[order - 1 - k]);
            }
            assert!(rule.nodes().windows(2).all(|w| w[0] < w[1]));
        }
    }

    #[test]
    fn rule_is_exact_for_monomials() {
        // ∫ u^{2q} e^{-u^2} du = Gamma(q + 1/2)
        let rule = GaussHermiteRule::new(12).unwrap();
        for q in 0..12 {
            let got = rule.integrate(|u| u.powi(2 * q));
            let expected = half_integer_factorial(q as f64 - 0.5).unwrap();
            assert!((got - expected).abs() <= 1e-13 * expected, "q={q}");
        }
    }

    #[test]
    fn oversized_rule_is_reported() {
        assert_eq!(
            GaussHermiteRule::new(MAX_RULE_ORDER + 1),
            Err(Error::RuleOrderTooLarge {
                requested: MAX_RULE_ORDER + 1,
                max: MAX_RULE_ORDER
            })
        );
        assert!(QuadratureSpec::new(0, 1e-12).is_err());
    }

    #[test]
    fn hermite_orthogonality_under_quadrature() {
        let spec = QuadratureSpec::new(16, 1e-12).unwrap();
        let rule = gauss_hermite_rule(&spec).unwrap();
        for m in 0..16u32 {
            for n in 0..16u32 {
                if m == n || (m + n) as usize > 2 * spec.rule_order - 2 {
                    continue;
                }
                let v = rule.integrate(|u| hermite_normalized(m, u) * hermite_normalized(n, u));
                assert!(v.abs() < 1e-10, "m={m} n={n}: {v}");
            }
        }
    }

    #[test]
    fn doubling_the_rule_leaves_mode_overlaps_unchanged() {
        let spec = QuadratureSpec::new(24, 1e-12).unwrap();
        let max_mode = (spec.rule_order / 2 - 2) as u32;
        for m in 0..=max_mode {
            for n in 0..=max_mode {
                integrate_converged(&spec, |u| {
                    hermite_normalized(m, u) * hermite_normalized(n, u)
                })
                .unwrap();
            }
        }
    }

    #[test]
    fn unconverged_integrand_is_reported() {
        let spec = QuadratureSpec::new(3, 1e-12).unwrap();
        let err = integrate_converged(&spec, |u| u.powi(10)).unwrap_err();
        assert!(matches!(err, Error::QuadratureNotConverged { .. }));
    }

    proptest! {
        #[test]
        fn hermite_three_term_recurrence(l in 1u32..40, x in -10.0f64..10.0) {
            let lhs = hermite_polynomial(l + 1, x);
            let rhs = 2.0 * x * hermite_polynomial(l, x) - 2.0 * f64::from(l) * hermite_polynomial(l - 1, x);
            let scale = (2.0 * x * hermite_polynomial(l, x)).abs()
                + (2.0 * f64::from(l) * hermite_polynomial(l - 1, x)).abs();
            prop_assert!((lhs - rhs).abs() <= 1e-12 * scale.max(1.0));
        }

        #[test]
        fn half_integer_factorial_recurrence(twice in -1i64..300) {
            let x = twice as f64 / 2.0;
            let lhs = half_integer_factorial(x + 1.0).unwrap();
            let rhs = (x + 1.0) * half_integer_factorial(x).unwrap();
            prop_assert!((lhs - rhs).abs() <= 1e-13 * lhs.abs());
        }
    }
}
