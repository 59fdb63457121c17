//! Two-photon states over discrete transverse-mode labels and the HG/LG
//! change of basis.
//!
//! The change of basis is block diagonal in mode order `N`: the `N + 1`
//! HG modes `(m, N - m)` span the same space as the `N + 1` LG modes with
//! `2p + |l| = N`. With the LG convention of
//! [`lg_field_waist`](crate::transverse_modes::lg_field_waist) the overlaps are
//!
//! ```text
//! <HG_{m,n} | LG_{p,l}> = (-1)^p i^n b((N - l)/2, (N + l)/2, n)
//! b(n', m', k) = sqrt((n' + m' - k)! k! / (2^{n'+m'} n'! m'!)) [t^k] (1 - t)^{n'} (1 + t)^{m'}
//! ```
//!
//! where `n` is the y index of the HG mode and `[t^k]` extracts a
//! polynomial coefficient.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spdc_overlap::{analytic_p, modes_up_to};
use crate::special_math::factorial;
use crate::transverse_modes::{LGIndex, ModeIndex, WaistRatio};

/// Largest mode order the conversion blocks are built for.
pub const MAX_CONVERSION_ORDER: u32 = 40;

/// Amplitudes below this magnitude are dropped after a basis conversion.
pub const PRUNE_THRESHOLD: f64 = 1e-15;

const UNITARITY_TOLERANCE: f64 = 1e-10;
const NORM_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Basis {
    #[serde(rename = "HG")]
    Hg,
    #[serde(rename = "LG")]
    Lg,
}

impl fmt::Display for Basis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Basis::Hg => "HG",
            Basis::Lg => "LG",
        })
    }
}

/// Single-photon mode label in either basis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ModeLabel {
    Hg(ModeIndex),
    Lg(LGIndex),
}

impl ModeLabel {
    pub fn basis(&self) -> Basis {
        match self {
            ModeLabel::Hg(_) => Basis::Hg,
            ModeLabel::Lg(_) => Basis::Lg,
        }
    }

    pub fn order(&self) -> u32 {
        match self {
            ModeLabel::Hg(h) => h.order(),
            ModeLabel::Lg(l) => l.order(),
        }
    }

    /// `[m, n]` for HG, `[p, l]` for LG.
    pub fn as_pair(&self) -> [i64; 2] {
        match *self {
            ModeLabel::Hg(h) => [i64::from(h.m), i64::from(h.n)],
            ModeLabel::Lg(l) => [i64::from(l.p), i64::from(l.l)],
        }
    }

    pub fn from_pair(basis: Basis, pair: [i64; 2]) -> Result<Self> {
        let bad = |what: &str| Error::MalformedState(format!("{what} in label {pair:?}"));
        let index = |v: i64, what: &str| u32::try_from(v).map_err(|_| bad(what));
        match basis {
            Basis::Hg => Ok(ModeLabel::Hg(ModeIndex::new(
                index(pair[0], "negative or oversized m")?,
                index(pair[1], "negative or oversized n")?,
            ))),
            Basis::Lg => Ok(ModeLabel::Lg(LGIndex::new(
                index(pair[0], "negative or oversized p")?,
                i32::try_from(pair[1]).map_err(|_| bad("oversized l"))?,
            ))),
        }
    }
}

impl fmt::Display for ModeLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ModeLabel::Hg(h) => h.fmt(f),
            ModeLabel::Lg(l) => l.fmt(f),
        }
    }
}

/// Pure two-photon state `Σ c(s, i) |s, i>` with sparse amplitudes.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoPhotonState {
    basis: Basis,
    truncation_order: u32,
    amplitudes: BTreeMap<(ModeLabel, ModeLabel), Complex64>,
}

impl TwoPhotonState {
    pub fn new(basis: Basis, truncation_order: u32) -> Self {
        Self {
            basis,
            truncation_order,
            amplitudes: BTreeMap::new(),
        }
    }

    pub fn basis(&self) -> Basis {
        self.basis
    }

    pub fn truncation_order(&self) -> u32 {
        self.truncation_order
    }

    fn check_label(&self, label: ModeLabel) -> Result<()> {
        if label.basis() != self.basis {
            return Err(Error::BasisMismatch {
                label: label.to_string(),
                basis: self.basis.to_string(),
            });
        }
        if label.order() > self.truncation_order {
            return Err(Error::LabelOutOfRange {
                label: label.to_string(),
                truncation_order: self.truncation_order,
            });
        }
        Ok(())
    }

    /// Adds `amplitude` to the `|signal, idler>` component.
    pub fn add(&mut self, signal: ModeLabel, idler: ModeLabel, amplitude: Complex64) -> Result<()> {
        self.check_label(signal)?;
        self.check_label(idler)?;
        *self
            .amplitudes
            .entry((signal, idler))
            .or_insert(Complex64::new(0.0, 0.0)) += amplitude;
        Ok(())
    }

    pub fn amplitude(&self, signal: ModeLabel, idler: ModeLabel) -> Complex64 {
        self.amplitudes
            .get(&(signal, idler))
            .copied()
            .unwrap_or(Complex64::new(0.0, 0.0))
    }

    pub fn entries(&self) -> impl Iterator<Item = (ModeLabel, ModeLabel, Complex64)> + '_ {
        self.amplitudes.iter().map(|(&(s, i), &c)| (s, i, c))
    }

    pub fn len(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.amplitudes.is_empty()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.values().map(|c| c.norm_sqr()).sum()
    }

    pub fn normalize(&mut self) -> Result<()> {
        let norm = self.norm_sqr().sqrt();
        if norm.is_nan() || norm <= 0.0 {
            return Err(Error::NotNormalized { norm_sqr: 0.0 });
        }
        for c in self.amplitudes.values_mut() {
            *c /= norm;
        }
        Ok(())
    }

    fn require_normalized(&self) -> Result<()> {
        let norm_sqr = self.norm_sqr();
        if (norm_sqr - 1.0).abs() > NORM_TOLERANCE {
            return Err(Error::NotNormalized { norm_sqr });
        }
        Ok(())
    }

    /// Keeps only components with identical signal and idler labels. For an
    /// HG state this is the Gaussian-pump quasi-conservation selection.
    pub fn diagonal_part(&self) -> Self {
        Self {
            basis: self.basis,
            truncation_order: self.truncation_order,
            amplitudes: self
                .amplitudes
                .iter()
                .filter(|((s, i), _)| s == i)
                .map(|(&k, &v)| (k, v))
                .collect(),
        }
    }

    /// Same state with signal and idler exchanged.
    pub fn swapped(&self) -> Self {
        Self {
            basis: self.basis,
            truncation_order: self.truncation_order,
            amplitudes: self
                .amplitudes
                .iter()
                .map(|(&(s, i), &c)| ((i, s), c))
                .collect(),
        }
    }

    pub fn to_file(&self) -> StateFile {
        StateFile {
            basis: self.basis,
            truncation_order: self.truncation_order,
            entries: self
                .entries()
                .map(|(s, i, c)| StateEntry {
                    s: s.as_pair(),
                    i: i.as_pair(),
                    re: c.re,
                    im: c.im,
                })
                .collect(),
        }
    }

    pub fn from_file(file: &StateFile) -> Result<Self> {
        let mut state = Self::new(file.basis, file.truncation_order);
        for (k, e) in file.entries.iter().enumerate() {
            let ctx = |field: &str, err: Error| {
                Error::MalformedState(format!("entries[{k}].{field}: {err}"))
            };
            let s = ModeLabel::from_pair(file.basis, e.s).map_err(|err| ctx("s", err))?;
            let i = ModeLabel::from_pair(file.basis, e.i).map_err(|err| ctx("i", err))?;
            if !(e.re.is_finite() && e.im.is_finite()) {
                return Err(Error::MalformedState(format!(
                    "entries[{k}]: amplitude is not finite"
                )));
            }
            state
                .add(s, i, Complex64::new(e.re, e.im))
                .map_err(|err| ctx("s/i", err))?;
        }
        Ok(state)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_file()).expect("state serialization cannot fail")
    }

    /// Parses the JSON state format. Syntax errors carry line and column.
    pub fn from_json(text: &str) -> Result<Self> {
        let file: StateFile =
            serde_json::from_str(text).map_err(|e| Error::MalformedState(e.to_string()))?;
        Self::from_file(&file)
    }
}

/// On-disk form: `{basis, truncation_order, entries: [{s, i, re, im}]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateFile {
    pub basis: Basis,
    pub truncation_order: u32,
    pub entries: Vec<StateEntry>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateEntry {
    pub s: [i64; 2],
    pub i: [i64; 2],
    pub re: f64,
    pub im: f64,
}

/// Diagonal HG-entangled SPDC state `Σ C_m^n |HG_m^n, HG_m^n>` with
/// `C_m^n ∝ P_m^m P_n^n`, truncated to `m + n <= max_order` and normalized.
pub fn build_hg_entangled_state(a: WaistRatio, max_order: u32) -> Result<TwoPhotonState> {
    let mut state = TwoPhotonState::new(Basis::Hg, max_order);
    for mode in modes_up_to(max_order) {
        let c = analytic_p(mode.m, mode.m, a) * analytic_p(mode.n, mode.n, a);
        let label = ModeLabel::Hg(mode);
        state.add(label, label, Complex64::new(c, 0.0))?;
    }
    state.normalize()?;
    Ok(state)
}

/// OAM-anticorrelated state `Σ_l C_l |LG_0^l, LG_0^{-l}>`, normalized.
pub fn lg_spdc_state(
    coefficients: &BTreeMap<i32, Complex64>,
    l_max: u32,
) -> Result<TwoPhotonState> {
    let mut state = TwoPhotonState::new(Basis::Lg, l_max);
    for (&l, &c) in coefficients {
        if l.unsigned_abs() > l_max {
            if c.norm() == 0.0 {
                continue;
            }
            return Err(Error::InvalidArgument(format!(
                "coefficient for l={l} exceeds l_max={l_max}"
            )));
        }
        if c.norm() == 0.0 {
            continue;
        }
        state.add(
            ModeLabel::Lg(LGIndex::new(0, l)),
            ModeLabel::Lg(LGIndex::new(0, -l)),
            c,
        )?;
    }
    state.normalize()?;
    Ok(state)
}

/// Equal weights for every `|l| <= l_max`.
pub fn flat_lg_coefficients(l_max: u32) -> BTreeMap<i32, Complex64> {
    let l_max = l_max as i32;
    (-l_max..=l_max)
        .map(|l| (l, Complex64::new(1.0, 0.0)))
        .collect()
}

fn binomial_exact(n: u32, k: u32) -> i128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: i128 = 1;
    for j in 0..k {
        acc = acc * i128::from(n - j) / i128::from(j + 1);
    }
    acc
}

/// `b(n', m', k)`: the `k`-th HG weight in the expansion of an LG mode.
///
/// The polynomial coefficient `[t^k] (1 - t)^{n'} (1 + t)^{m'}` is formed
/// exactly in integer arithmetic.
pub fn b_coefficient(n_prime: u32, m_prime: u32, k: u32) -> Result<f64> {
    let total = n_prime + m_prime;
    if k > total {
        return Err(Error::InvalidArgument(format!(
            "b({n_prime}, {m_prime}, {k}): index must lie in [0, {total}]"
        )));
    }
    if total > 2 * MAX_CONVERSION_ORDER {
        return Err(Error::InvalidArgument(format!(
            "b({n_prime}, {m_prime}, {k}): order above {}",
            2 * MAX_CONVERSION_ORDER
        )));
    }
    let lo = k.saturating_sub(m_prime);
    let hi = k.min(n_prime);
    let coefficient: i128 = (lo..=hi)
        .map(|j| {
            let sign = if j % 2 == 0 { 1 } else { -1 };
            sign * binomial_exact(n_prime, j) * binomial_exact(m_prime, k - j)
        })
        .sum();
    let prefactor = (factorial(total - k) * factorial(k)
        / (2f64.powi(total as i32) * factorial(n_prime) * factorial(m_prime)))
    .sqrt();
    Ok(prefactor * coefficient as f64)
}

fn i_pow(n: u32) -> Complex64 {
    match n % 4 {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(0.0, 1.0),
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, -1.0),
    }
}

/// `<HG_m^n | LG_p^l>` from the closed form; exactly zero across orders.
pub fn hg_lg_overlap(hg: ModeIndex, lg: LGIndex) -> Complex64 {
    let order = hg.order();
    if lg.order() != order {
        return Complex64::new(0.0, 0.0);
    }
    let n_prime = ((order as i64 - i64::from(lg.l)) / 2) as u32;
    let m_prime = ((order as i64 + i64::from(lg.l)) / 2) as u32;
    let b = b_coefficient(n_prime, m_prime, hg.n).expect("indices within one order block");
    let radial_sign = if lg.p.is_multiple_of(2) { 1.0 } else { -1.0 };
    i_pow(hg.n) * (radial_sign * b)
}

/// HG labels `(m, N - m)` for `m = 0..=N`.
pub fn hg_block_labels(order: u32) -> Vec<ModeIndex> {
    (0..=order).map(|m| ModeIndex::new(m, order - m)).collect()
}

/// LG labels with `2p + |l| = N`, from `l = N` down to `l = -N`.
pub fn lg_block_labels(order: u32) -> Vec<LGIndex> {
    (0..=order)
        .map(|c| {
            let l = order as i32 - 2 * c as i32;
            LGIndex::new((order - l.unsigned_abs()) / 2, l)
        })
        .collect()
}

/// Overlap matrix `M[r][c] = <HG_r | LG_c>` of one order block.
#[derive(Debug, Clone, PartialEq)]
pub struct ConversionBlock {
    pub order: u32,
    pub hg: Vec<ModeIndex>,
    pub lg: Vec<LGIndex>,
    pub matrix: DMatrix<Complex64>,
}

impl ConversionBlock {
    /// `max |M^† M - I|`.
    pub fn unitarity_deviation(&self) -> f64 {
        let n = self.matrix.nrows();
        let product = self.matrix.adjoint() * &self.matrix;
        let identity = DMatrix::<Complex64>::identity(n, n);
        (product - identity)
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }

    fn hg_row(&self, mode: ModeIndex) -> usize {
        mode.m as usize
    }

    fn lg_column(&self, mode: LGIndex) -> usize {
        ((self.order as i32 - mode.l) / 2) as usize
    }
}

pub fn conversion_block(order: u32) -> Result<ConversionBlock> {
    if order > MAX_CONVERSION_ORDER {
        return Err(Error::TruncationOverflow {
            order,
            max: MAX_CONVERSION_ORDER,
        });
    }
    let hg = hg_block_labels(order);
    let lg = lg_block_labels(order);
    let dim = hg.len();
    let matrix = DMatrix::from_fn(dim, dim, |r, c| hg_lg_overlap(hg[r], lg[c]));
    let block = ConversionBlock {
        order,
        hg,
        lg,
        matrix,
    };
    let deviation = block.unitarity_deviation();
    if deviation.is_nan() || deviation >= UNITARITY_TOLERANCE {
        return Err(Error::NonUnitaryBlock { order, deviation });
    }
    Ok(block)
}

/// Re-expresses a normalized state in `target` by applying the order blocks
/// to each photon.
pub fn convert_state(state: &TwoPhotonState, target: Basis) -> Result<TwoPhotonState> {
    state.require_normalized()?;
    if state.basis == target {
        return Ok(state.clone());
    }
    let blocks = (0..=state.truncation_order)
        .map(conversion_block)
        .collect::<Result<Vec<_>>>()?;

    // Expansion of one label in the target basis.
    let expand = |label: ModeLabel| -> Vec<(ModeLabel, Complex64)> {
        let block = &blocks[label.order() as usize];
        match label {
            ModeLabel::Lg(lg) => {
                let c = block.lg_column(lg);
                block
                    .hg
                    .iter()
                    .enumerate()
                    .map(|(r, &h)| (ModeLabel::Hg(h), block.matrix[(r, c)]))
                    .collect()
            }
            ModeLabel::Hg(hg) => {
                let r = block.hg_row(hg);
                block
                    .lg
                    .iter()
                    .enumerate()
                    .map(|(c, &l)| (ModeLabel::Lg(l), block.matrix[(r, c)].conj()))
                    .collect()
            }
        }
    };

    let mut out: BTreeMap<(ModeLabel, ModeLabel), Complex64> = BTreeMap::new();
    for (s, i, amp) in state.entries() {
        let es = expand(s);
        let ei = expand(i);
        for &(ts, cs) in &es {
            for &(ti, ci) in &ei {
                *out.entry((ts, ti)).or_insert(Complex64::new(0.0, 0.0)) += amp * cs * ci;
            }
        }
    }
    out.retain(|_, c| c.norm() >= PRUNE_THRESHOLD);
    Ok(TwoPhotonState {
        basis: target,
        truncation_order: state.truncation_order,
        amplitudes: out,
    })
}

/// Entanglement entropy in bits from the singular values of the amplitude
/// matrix (rows: signal labels, columns: idler labels).
pub fn schmidt_entropy(state: &TwoPhotonState) -> f64 {
    if state.is_empty() {
        return 0.0;
    }
    let rows: BTreeSet<ModeLabel> = state.amplitudes.keys().map(|(s, _)| *s).collect();
    let cols: BTreeSet<ModeLabel> = state.amplitudes.keys().map(|(_, i)| *i).collect();
    let rows: Vec<_> = rows.into_iter().collect();
    let cols: Vec<_> = cols.into_iter().collect();
    let matrix = DMatrix::from_fn(rows.len(), cols.len(), |r, c| {
        state.amplitude(rows[r], cols[c])
    });
    let singular = matrix.svd(false, false).singular_values;
    let total: f64 = singular.iter().map(|s| s * s).sum();
    let entropy: f64 = singular
        .iter()
        .map(|s| s * s / total)
        .filter(|&p| p > 0.0)
        .map(|p| -p * p.log2())
        .sum();
    entropy.max(0.0)
}
