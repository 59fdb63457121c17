//! Thin-crystal SPDC amplitudes in the Hermite-Gaussian basis.
//!
//! In the thin-crystal limit the biphoton amplitude is the pump field
//! evaluated at `sqrt2 * rho`, so the coefficient of
//! `|HG_signal, HG_idler>` is the triple overlap
//! `∫ d²rho HG_pump(sqrt2 rho) HG_signal(rho)* HG_idler(rho)*`.
//! Waists are fixed at `w_o = 1` for signal and idler and `w_p = 1/sqrt(a)`
//! for the pump, with `a = (w_o / w_p)^2`. The integrand separates into an
//! x factor and a y factor, each a polynomial times `e^{-2(1+a)x^2}`.
//!
//! No proportionality constant is reconstructed: cross-checks between the
//! closed form [`analytic_p`] and the quadrature are done on ratios.

use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::special_math::{factorial, half_integer_factorial, GaussHermiteRule, QuadratureSpec};
use crate::transverse_modes::{hg_axis, ModeIndex, WaistRatio};

/// Largest signal/idler order a coefficient table may be filled to.
pub const MAX_TABLE_ORDER: u32 = 30;

/// Default truncation for coefficient tables.
pub const DEFAULT_TABLE_ORDER: u32 = 12;

/// Default tail cutoff for [`mode_match_probability`].
pub const DEFAULT_Q_TAIL: u32 = 60;

/// Fraction of the running sum the last retained tail term may carry.
pub const Q_TAIL_TOLERANCE: f64 = 1e-12;

/// One-dimensional factor of the thin-crystal overlap along a single axis.
///
/// Integrates `hg(pump; w_p)(sqrt2 x) hg(signal; 1)(x) hg(idler; 1)(x)` with
/// the supplied rule, after checking the rule is exact for the integrand.
pub fn axis_overlap(
    pump: u32,
    signal: u32,
    idler: u32,
    a: WaistRatio,
    rule: &GaussHermiteRule,
) -> Result<f64> {
    let spec = QuadratureSpec::new(rule.order(), 0.0)?;
    let degree = (pump + signal + idler) as usize;
    spec.check_degree(degree, || {
        format!("axis overlap (pump {pump}, signal {signal}, idler {idler})")
    })?;
    Ok(axis_overlap_unchecked(pump, signal, idler, a, rule))
}

fn axis_overlap_unchecked(
    pump: u32,
    signal: u32,
    idler: u32,
    a: WaistRatio,
    rule: &GaussHermiteRule,
) -> f64 {
    let pump_waist = a.pump_waist();
    let scale = 1.0 / (2.0 * (1.0 + a.get())).sqrt();
    rule.integrate_scaled(scale, |x| {
        hg_axis(pump, pump_waist, std::f64::consts::SQRT_2 * x)
            * hg_axis(signal, 1.0, x)
            * hg_axis(idler, 1.0, x)
    })
}

/// Thin-crystal coefficient `C_{m_s m_i}^{n_s n_i}` for the given pump mode.
pub fn thin_crystal_coefficient(
    pump: ModeIndex,
    signal: ModeIndex,
    idler: ModeIndex,
    a: WaistRatio,
    spec: &QuadratureSpec,
) -> Result<Complex64> {
    let rule = GaussHermiteRule::cached(spec.rule_order)?;
    check_tuple(spec, pump, signal, idler)?;
    let x = axis_overlap_unchecked(pump.m, signal.m, idler.m, a, &rule);
    let y = axis_overlap_unchecked(pump.n, signal.n, idler.n, a, &rule);
    // HG modes are real at the waist, so conjugation is the identity.
    Ok(Complex64::new(x * y, 0.0))
}

fn check_tuple(
    spec: &QuadratureSpec,
    pump: ModeIndex,
    signal: ModeIndex,
    idler: ModeIndex,
) -> Result<()> {
    let degree = (pump.m + signal.m + idler.m).max(pump.n + signal.n + idler.n) as usize;
    spec.check_degree(degree, || {
        format!("coefficient (pump {pump}, signal {signal}, idler {idler})")
    })
}

/// Closed-form Gaussian-pump overlap factor `P_m^n(a)`.
///
/// Evaluates the double sum over `j <= m/2`, `k <= n/2` term by term; it is
/// exactly zero when `m + n` is odd. Equal to
/// `∫ H_m(u) H_n(u) e^{-(1+a)u^2} du / sqrt(2^m m! 2^n n!)`.
pub fn analytic_p(m: u32, n: u32, a: WaistRatio) -> f64 {
    if (m + n) % 2 == 1 {
        return 0.0;
    }
    // Canonical argument order keeps the result exactly symmetric.
    let (m, n) = (m.min(n), m.max(n));
    let a = a.get();
    // sqrt(1 / (2^m m! 2^n n!)) * m! * n!
    let prefactor = (factorial(m) * factorial(n) / 2f64.powi((m + n) as i32)).sqrt();
    let mut sum = 0.0;
    for j in 0..=m / 2 {
        for k in 0..=n / 2 {
            let q = m + n - 2 * j - 2 * k;
            let sign = if (j + k) % 2 == 0 { 1.0 } else { -1.0 };
            let combinatorial = 2f64.powi(q as i32)
                / (factorial(m - 2 * j) * factorial(n - 2 * k) * factorial(j) * factorial(k));
            let gamma = half_integer_factorial((f64::from(q) - 1.0) / 2.0)
                .expect("q is even and nonnegative");
            sum += sign * combinatorial * gamma * (1.0 + a).powf(-(f64::from(q) + 1.0) / 2.0);
        }
    }
    prefactor * sum
}

/// Probability `Q_m` that the partner photon carries the same index `m`
/// along an axis, for a Gaussian pump, with the sum over partner indices
/// truncated at `n_max`.
pub fn mode_match_probability(m: u32, a: WaistRatio, n_max: u32) -> Result<f64> {
    if n_max < m {
        return Err(Error::InvalidArgument(format!(
            "n_max ({n_max}) must be at least m ({m})"
        )));
    }
    let diagonal = analytic_p(m, m, a).powi(2);
    let mut total = 0.0;
    let mut last = 0.0;
    for n in (m % 2..=n_max).step_by(2) {
        last = analytic_p(m, n, a).powi(2);
        total += last;
    }
    let ratio = last / total;
    if ratio.is_nan() || ratio >= Q_TAIL_TOLERANCE {
        return Err(Error::UnconvergedTail {
            m,
            a: a.get(),
            n_max,
            ratio,
        });
    }
    let q = diagonal / total;
    if !(0.0..=1.0 + 1e-12).contains(&q) {
        return Err(Error::ProbabilityOutOfRange { value: q });
    }
    Ok(q)
}

/// Thin-crystal coefficients for every signal/idler pair with
/// `m + n <= max_order` on each photon.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientTable {
    pub pump: ModeIndex,
    pub waist_ratio: WaistRatio,
    pub max_order: u32,
    pub entries: BTreeMap<(ModeIndex, ModeIndex), Complex64>,
    pub normalized: bool,
}

impl CoefficientTable {
    pub fn get(&self, signal: ModeIndex, idler: ModeIndex) -> Option<Complex64> {
        self.entries.get(&(signal, idler)).copied()
    }

    pub fn total_weight(&self) -> f64 {
        self.entries.values().map(|c| c.norm_sqr()).sum()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// All HG labels with order at most `max_order`, ordered by `(m, n)`.
pub fn modes_up_to(max_order: u32) -> Vec<ModeIndex> {
    (0..=max_order)
        .flat_map(|m| (0..=max_order - m).map(move |n| ModeIndex::new(m, n)))
        .collect()
}

pub fn coefficient_table(
    pump: ModeIndex,
    a: WaistRatio,
    max_order: u32,
    spec: &QuadratureSpec,
    normalize: bool,
) -> Result<CoefficientTable> {
    if max_order > MAX_TABLE_ORDER {
        return Err(Error::InvalidArgument(format!(
            "max_order {max_order} exceeds the table cap of {MAX_TABLE_ORDER}"
        )));
    }
    let rule = GaussHermiteRule::cached(spec.rule_order)?;
    let worst = ModeIndex::new(max_order, max_order);
    check_tuple(spec, pump, worst, worst)?;

    // Per-axis factors, indexed [signal][idler].
    let axis = |p: u32| -> Vec<Vec<f64>> {
        (0..=max_order)
            .map(|s| {
                (0..=max_order)
                    .map(|i| axis_overlap_unchecked(p, s, i, a, &rule))
                    .collect()
            })
            .collect()
    };
    let x = axis(pump.m);
    let y = if pump.n == pump.m {
        x.clone()
    } else {
        axis(pump.n)
    };

    let modes = modes_up_to(max_order);
    let mut entries = BTreeMap::new();
    for &s in &modes {
        for &i in &modes {
            let c = x[s.m as usize][i.m as usize] * y[s.n as usize][i.n as usize];
            entries.insert((s, i), Complex64::new(c, 0.0));
        }
    }
    let mut table = CoefficientTable {
        pump,
        waist_ratio: a,
        max_order,
        entries,
        normalized: false,
    };
    if normalize {
        let norm = table.total_weight().sqrt();
        if norm == 0.0 {
            return Err(Error::InvalidArgument(
                "coefficient table vanishes identically; cannot normalize".into(),
            ));
        }
        for c in table.entries.values_mut() {
            *c /= norm;
        }
        table.normalized = true;
    }
    Ok(table)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConservationLaw {
    /// `|m_s - m_i| = m_p` and `|n_s - n_i| = n_p`.
    QuasiConservation,
    /// `m_s + m_i = m_p` and `n_s + n_i = n_p` modulo 2.
    Parity,
}

impl ConservationLaw {
    pub fn holds(self, pump: ModeIndex, signal: ModeIndex, idler: ModeIndex) -> bool {
        match self {
            Self::QuasiConservation => {
                signal.m.abs_diff(idler.m) == pump.m && signal.n.abs_diff(idler.n) == pump.n
            }
            Self::Parity => {
                (signal.m + idler.m) % 2 == pump.m % 2 && (signal.n + idler.n) % 2 == pump.n % 2
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConservationReport {
    pub law: ConservationLaw,
    /// Share of the total squared amplitude in entries obeying the law.
    pub satisfied_weight: f64,
    /// Largest `|c|` among entries breaking the law.
    pub worst_violation: f64,
    pub satisfied_count: usize,
    pub violating_count: usize,
}

pub fn conservation_report(table: &CoefficientTable, law: ConservationLaw) -> ConservationReport {
    let mut satisfied = 0.0;
    let mut total = 0.0;
    let mut worst_violation: f64 = 0.0;
    let mut satisfied_count = 0;
    let mut violating_count = 0;
    for (&(s, i), c) in &table.entries {
        let w = c.norm_sqr();
        total += w;
        if law.holds(table.pump, s, i) {
            satisfied += w;
            satisfied_count += 1;
        } else {
            worst_violation = worst_violation.max(c.norm());
            violating_count += 1;
        }
    }
    let satisfied_weight = if total > 0.0 {
        (satisfied / total).clamp(0.0, 1.0)
    } else {
        0.0
    };
    ConservationReport {
        law,
        satisfied_weight,
        worst_violation,
        satisfied_count,
        violating_count,
    }
}
