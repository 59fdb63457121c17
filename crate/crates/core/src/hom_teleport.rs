//! Parity-qubit Hong-Ou-Mandel interference and parity-encoded teleportation.
//!
//! A transverse-parity qubit is the even (0) / odd (1) parity of an HG mode
//! index along one axis. Biphoton amplitudes are indexed `[signal][idler]`.
//!
//! Beam-splitter convention: the coincidence amplitude for transmission
//! amplitude `t` and reflection amplitude `r` is
//!
//! ```text
//! Psi_c = t^2 Psi - r^2 E(Psi)
//! ```
//!
//! where `E` exchanges the photons, multiplies by the polarization exchange
//! sign, and (when the parity axis is the mirror axis) applies the
//! reflection flip `(-1)^{p1 + p2}`. The minus sign is the `i * i` phase of
//! the two reflections.

use std::f64::consts::FRAC_1_SQRT_2;
use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const NORM_TOLERANCE: f64 = 1e-12;

/// Amplitude pair `(c0, c1)` of a parity qubit `c0|0> + c1|1>`.
pub type Qubit = [Complex64; 2];

type PairAmplitudes = [[Complex64; 2]; 2];

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Axis {
    X,
    Y,
}

impl fmt::Display for Axis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Axis::X => "x",
            Axis::Y => "y",
        })
    }
}

/// Exchange symmetry of the polarization part `Pi(sigma_1, sigma_2)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PolarizationSymmetry {
    Symmetric,
    Antisymmetric,
}

impl PolarizationSymmetry {
    pub fn exchange_sign(self) -> f64 {
        match self {
            Self::Symmetric => 1.0,
            Self::Antisymmetric => -1.0,
        }
    }
}

/// Bell states on parity qubits, `|p1, p2>` ordering.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum BellState {
    /// `(|0,0> + |1,1>)/sqrt2`
    #[serde(rename = "Phi+")]
    PhiPlus,
    /// `(|0,0> - |1,1>)/sqrt2`
    #[serde(rename = "Phi-")]
    PhiMinus,
    /// `(|1,0> + |0,1>)/sqrt2`
    #[serde(rename = "Psi+")]
    PsiPlus,
    /// `(|1,0> - |0,1>)/sqrt2`
    #[serde(rename = "Psi-")]
    PsiMinus,
}

impl BellState {
    pub const ALL: [BellState; 4] = [Self::PhiPlus, Self::PhiMinus, Self::PsiPlus, Self::PsiMinus];

    pub fn amplitudes(self) -> PairAmplitudes {
        let h = Complex64::new(FRAC_1_SQRT_2, 0.0);
        let mut a = [[ZERO; 2]; 2];
        match self {
            Self::PhiPlus => {
                a[0][0] = h;
                a[1][1] = h;
            }
            Self::PhiMinus => {
                a[0][0] = h;
                a[1][1] = -h;
            }
            Self::PsiPlus => {
                a[1][0] = h;
                a[0][1] = h;
            }
            Self::PsiMinus => {
                a[1][0] = h;
                a[0][1] = -h;
            }
        }
        a
    }

    pub fn name(self) -> &'static str {
        match self {
            Self::PhiPlus => "Phi+",
            Self::PhiMinus => "Phi-",
            Self::PsiPlus => "Psi+",
            Self::PsiMinus => "Psi-",
        }
    }
}

impl fmt::Display for BellState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

fn pair_norm_sqr(a: &PairAmplitudes) -> f64 {
    a.iter().flatten().map(|c| c.norm_sqr()).sum()
}

/// Two photons carrying parity qubits along `axis`, with a polarization part
/// of the given exchange symmetry.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParityBiphoton {
    pub axis: Axis,
    pub amplitudes: PairAmplitudes,
    pub polarization_symmetry: PolarizationSymmetry,
}

impl ParityBiphoton {
    pub fn new(
        axis: Axis,
        amplitudes: PairAmplitudes,
        polarization_symmetry: PolarizationSymmetry,
    ) -> Result<Self> {
        let norm_sqr = pair_norm_sqr(&amplitudes);
        if (norm_sqr - 1.0).abs() > NORM_TOLERANCE {
            return Err(Error::NotNormalized { norm_sqr });
        }
        Ok(Self {
            axis,
            amplitudes,
            polarization_symmetry,
        })
    }

    pub fn bell(bell: BellState, axis: Axis, polarization_symmetry: PolarizationSymmetry) -> Self {
        Self {
            axis,
            amplitudes: bell.amplitudes(),
            polarization_symmetry,
        }
    }

    pub fn norm_sqr(&self) -> f64 {
        pair_norm_sqr(&self.amplitudes)
    }

    /// Largest componentwise difference of the parity amplitudes.
    pub fn max_difference(&self, other: &Self) -> f64 {
        self.amplitudes
            .iter()
            .flatten()
            .zip(other.amplitudes.iter().flatten())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

/// Particle exchange, polarization exchange sign and mirror flip.
pub fn exchange_and_mirror(state: &ParityBiphoton, mirror_axis: Axis) -> ParityBiphoton {
    let pol = state.polarization_symmetry.exchange_sign();
    let mirrored = state.axis == mirror_axis;
    let mut out = [[ZERO; 2]; 2];
    for (p1, row) in out.iter_mut().enumerate() {
        for (p2, slot) in row.iter_mut().enumerate() {
            let flip = if mirrored && (p1 + p2) % 2 == 1 {
                -1.0
            } else {
                1.0
            };
            *slot = state.amplitudes[p2][p1] * (pol * flip);
        }
    }
    ParityBiphoton {
        amplitudes: out,
        ..*state
    }
}

/// Probability that the two photons leave by different output ports.
pub fn coincidence_probability(
    state: &ParityBiphoton,
    t: f64,
    r: f64,
    mirror_axis: Axis,
) -> Result<f64> {
    if !(0.0..=1.0).contains(&t) || !(0.0..=1.0).contains(&r) {
        return Err(Error::InvalidArgument(format!(
            "beam-splitter amplitudes must lie in [0, 1], got t={t}, r={r}"
        )));
    }
    if (t * t + r * r - 1.0).abs() > NORM_TOLERANCE {
        return Err(Error::InvalidArgument(format!(
            "lossless splitter needs t^2 + r^2 = 1, got {}",
            t * t + r * r
        )));
    }
    let exchanged = exchange_and_mirror(state, mirror_axis);
    let probability = state
        .amplitudes
        .iter()
        .flatten()
        .zip(exchanged.amplitudes.iter().flatten())
        .map(|(a, e)| (a * (t * t) - e * (r * r)).norm_sqr())
        .sum();
    Ok(probability)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TruthTableRow {
    pub axis: Axis,
    pub bell_state: BellState,
    pub pol_symmetry: PolarizationSymmetry,
    pub coincidence_prob: f64,
}

/// Balanced-splitter coincidences for every Bell state, polarization symmetry
/// and parity axis (16 rows, axis-major order).
pub fn hom_truth_table(mirror_axis: Axis) -> Vec<TruthTableRow> {
    let t = FRAC_1_SQRT_2;
    let mut rows = Vec::with_capacity(16);
    for axis in [Axis::X, Axis::Y] {
        for pol in [
            PolarizationSymmetry::Symmetric,
            PolarizationSymmetry::Antisymmetric,
        ] {
            for bell in BellState::ALL {
                let state = ParityBiphoton::bell(bell, axis, pol);
                let coincidence_prob = coincidence_probability(&state, t, t, mirror_axis)
                    .expect("balanced splitter is valid");
                rows.push(TruthTableRow {
                    axis,
                    bell_state: bell,
                    pol_symmetry: pol,
                    coincidence_prob,
                });
            }
        }
    }
    rows
}

/// Three parity qubits, amplitudes indexed `[p1][p2][p3]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThreePhotonParityState {
    pub amplitudes: [[[Complex64; 2]; 2]; 2],
}

impl ThreePhotonParityState {
    /// `|q>_1 ⊗ |pair>_23`.
    pub fn product(qubit: Qubit, pair: PairAmplitudes) -> Self {
        let mut amplitudes = [[[ZERO; 2]; 2]; 2];
        for (p1, plane) in amplitudes.iter_mut().enumerate() {
            for (p2, row) in plane.iter_mut().enumerate() {
                for (p3, slot) in row.iter_mut().enumerate() {
                    *slot = qubit[p1] * pair[p2][p3];
                }
            }
        }
        Self { amplitudes }
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes
            .iter()
            .flatten()
            .flatten()
            .map(|c| c.norm_sqr())
            .sum()
    }

    /// Unnormalized particle-3 state after projecting particles 1 and 2 onto `bell`.
    pub fn project_12(&self, bell: BellState) -> Qubit {
        let b = bell.amplitudes();
        let mut out = [ZERO; 2];
        for (p3, slot) in out.iter_mut().enumerate() {
            for (b_row, a_row) in b.iter().zip(&self.amplitudes) {
                for (bc, a) in b_row.iter().zip(a_row) {
                    *slot += bc.conj() * a[p3];
                }
            }
        }
        out
    }
}

/// One Bell-measurement outcome on particles 1 and 2.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BellBranch {
    pub bell_state: BellState,
    /// Norm of the projected component (`1/2` for the ideal resource).
    pub amplitude: f64,
    pub probability: f64,
    /// Normalized conditional state of particle 3.
    pub particle3: Qubit,
}

fn check_qubit(alpha: Complex64, beta: Complex64) -> Result<()> {
    let norm_sqr = alpha.norm_sqr() + beta.norm_sqr();
    if (norm_sqr - 1.0).abs() > NORM_TOLERANCE {
        return Err(Error::NotNormalized { norm_sqr });
    }
    Ok(())
}

/// Resource pair of particles 2 and 3, `(|1,0> + |0,1>)/sqrt2`.
pub fn resource_pair() -> PairAmplitudes {
    BellState::PsiPlus.amplitudes()
}

/// Expands `(alpha|0> + beta|1>)_1 ⊗ |Psi+>_23` over the Bell states of
/// particles 1 and 2, in the order Phi+, Phi-, Psi+, Psi-.
pub fn bell_decompose(alpha: Complex64, beta: Complex64) -> Result<[BellBranch; 4]> {
    check_qubit(alpha, beta)?;
    let total = ThreePhotonParityState::product([alpha, beta], resource_pair());
    Ok(BellState::ALL.map(|bell| {
        let raw = total.project_12(bell);
        let probability = raw[0].norm_sqr() + raw[1].norm_sqr();
        let amplitude = probability.sqrt();
        let particle3 = if amplitude > 0.0 {
            [raw[0] / amplitude, raw[1] / amplitude]
        } else {
            [ZERO; 2]
        };
        BellBranch {
            bell_state: bell,
            amplitude,
            probability,
            particle3,
        }
    }))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TeleportResult {
    /// Phi+, Phi-, Psi+, Psi-.
    pub branch_probs: [f64; 4],
    pub selected_branch: BellState,
    pub output_qubit: Qubit,
    pub fidelity: f64,
    pub success_prob: f64,
}

/// Teleports `alpha|0> + beta|1>` by post-selecting HOM coincidences on
/// particles 1 and 2 (y-parity qubits, y mirror axis).
///
/// Only a symmetric polarization part heralds a single Bell state; with an
/// antisymmetric one three Bell states give coincidences and the output is
/// not determined, which is reported as an error.
pub fn teleport(
    alpha: Complex64,
    beta: Complex64,
    polarization: PolarizationSymmetry,
) -> Result<TeleportResult> {
    let branches = bell_decompose(alpha, beta)?;
    let heralded: Vec<BellState> = BellState::ALL
        .into_iter()
        .filter(|&bell| {
            let state = ParityBiphoton::bell(bell, Axis::Y, polarization);
            coincidence_probability(&state, FRAC_1_SQRT_2, FRAC_1_SQRT_2, Axis::Y)
                .expect("balanced splitter is valid")
                > 0.5
        })
        .collect();
    let selected = match heralded.as_slice() {
        [single] => *single,
        _ => {
            return Err(Error::InvalidArgument(format!(
            "{polarization:?} polarization heralds {} Bell states; teleportation needs exactly one",
            heralded.len()
        )))
        }
    };
    let branch = branches
        .iter()
        .find(|b| b.bell_state == selected)
        .expect("all Bell states are decomposed");
    let output = branch.particle3;
    let overlap = alpha.conj() * output[0] + beta.conj() * output[1];
    Ok(TeleportResult {
        branch_probs: branches.map(|b| b.probability),
        selected_branch: selected,
        output_qubit: output,
        fidelity: overlap.norm_sqr().min(1.0),
        success_prob: branch.probability,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use PolarizationSymmetry::{Antisymmetric, Symmetric};

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn balanced(state: &ParityBiphoton, mirror: Axis) -> f64 {
        coincidence_probability(state, FRAC_1_SQRT_2, FRAC_1_SQRT_2, mirror).unwrap()
    }

    fn negated(s: &ParityBiphoton) -> ParityBiphoton {
        let mut out = *s;
        for c in out.amplitudes.iter_mut().flatten() {
            *c = -*c;
        }
        out
    }

    #[test]
    fn exchange_examples() {
        let psi = ParityBiphoton::bell(BellState::PsiPlus, Axis::Y, Symmetric);
        let e = exchange_and_mirror(&psi, Axis::Y);
        assert!(e.max_difference(&negated(&psi)) < 1e-15);

        let phi = ParityBiphoton::bell(BellState::PhiPlus, Axis::Y, Symmetric);
        assert!(exchange_and_mirror(&phi, Axis::Y).max_difference(&phi) < 1e-15);

        let psi_x = ParityBiphoton::bell(BellState::PsiPlus, Axis::X, Antisymmetric);
        assert!(exchange_and_mirror(&psi_x, Axis::Y).max_difference(&negated(&psi_x)) < 1e-15);
    }

    #[test]
    fn coincidence_examples() {
        let anti = ParityBiphoton::bell(BellState::PsiPlus, Axis::Y, Antisymmetric);
        assert!(balanced(&anti, Axis::Y).abs() < 1e-12);
        let sym = ParityBiphoton::bell(BellState::PsiPlus, Axis::Y, Symmetric);
        assert!((balanced(&sym, Axis::Y) - 1.0).abs() < 1e-12);
        for bell in [BellState::PsiMinus, BellState::PhiPlus, BellState::PhiMinus] {
            let s = ParityBiphoton::bell(bell, Axis::Y, Symmetric);
            assert!(balanced(&s, Axis::Y).abs() < 1e-12, "{bell}");
        }
        let contrary = ParityBiphoton::bell(BellState::PsiPlus, Axis::X, Symmetric);
        assert!(balanced(&contrary, Axis::Y).abs() < 1e-12);
        let contrary = ParityBiphoton::bell(BellState::PsiPlus, Axis::X, Antisymmetric);
        assert!((balanced(&contrary, Axis::Y) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn splitter_validation() {
        let s = ParityBiphoton::bell(BellState::PsiPlus, Axis::Y, Symmetric);
        assert!(coincidence_probability(&s, 0.6, 0.6, Axis::Y).is_err());
        assert!(coincidence_probability(&s, -0.6, 0.8, Axis::Y).is_err());
        assert!(coincidence_probability(&s, 1.0, 0.0, Axis::Y).unwrap() > 0.999);
        assert!(ParityBiphoton::new(Axis::X, [[c(1.0), c(1.0)], [ZERO, ZERO]], Symmetric).is_err());
    }

    #[test]
    fn truth_table_layout() {
        let table = hom_truth_table(Axis::Y);
        assert_eq!(table.len(), 16);
        for row in &table {
            assert!(
                row.coincidence_prob.abs() < 1e-12 || (row.coincidence_prob - 1.0).abs() < 1e-12
            );
        }
        // Every Bell state is an exchange eigenstate, so flipping the
        // polarization symmetry flips its coincidence outcome.
        for axis in [Axis::X, Axis::Y] {
            for bell in BellState::ALL {
                let p = |pol| {
                    table
                        .iter()
                        .find(|r| r.axis == axis && r.bell_state == bell && r.pol_symmetry == pol)
                        .unwrap()
                        .coincidence_prob
                };
                assert!((p(Symmetric) + p(Antisymmetric) - 1.0).abs() < 1e-12);
            }
            let sym_hits: Vec<_> = table
                .iter()
                .filter(|r| {
                    r.axis == axis && r.pol_symmetry == Symmetric && r.coincidence_prob > 0.5
                })
                .map(|r| r.bell_state)
                .collect();
            assert_eq!(sym_hits.len(), 1);
        }
    }

    #[test]
    fn decomposition_examples() {
        let branches = bell_decompose(c(1.0), ZERO).unwrap();
        let by = |b: BellState| branches.iter().find(|x| x.bell_state == b).unwrap();
        assert!((by(BellState::PhiPlus).particle3[1] - c(1.0)).norm() < 1e-15);
        assert!((by(BellState::PsiPlus).particle3[0] - c(1.0)).norm() < 1e-15);
        for b in &branches {
            assert!((b.amplitude - 0.5).abs() < 1e-15);
        }

        let h = FRAC_1_SQRT_2;
        let branches = bell_decompose(c(h), c(h)).unwrap();
        let psi = branches
            .iter()
            .find(|x| x.bell_state == BellState::PsiPlus)
            .unwrap();
        assert!((psi.particle3[0] - c(h)).norm() < 1e-15);
        assert!((psi.particle3[1] - c(h)).norm() < 1e-15);

        assert!(bell_decompose(c(1.0), c(1.0)).is_err());
    }

    #[test]
    fn decomposition_matches_printed_branches() {
        let alpha = Complex64::new(0.3, 0.4);
        let beta = Complex64::new(-0.5, FRAC_1_SQRT_2);
        let norm = (alpha.norm_sqr() + beta.norm_sqr()).sqrt();
        let (alpha, beta) = (alpha / norm, beta / norm);
        let total = ThreePhotonParityState::product([alpha, beta], resource_pair());
        assert!((total.norm_sqr() - 1.0).abs() < 1e-14);
        // Conditional states up to the common 1/2: Phi± -> alpha|1> ± beta|0>,
        // Psi± -> beta|1> ± alpha|0>.
        let expected = [[beta, alpha], [-beta, alpha], [alpha, beta], [-alpha, beta]];
        for (bell, want) in BellState::ALL.into_iter().zip(expected) {
            let raw = total.project_12(bell);
            assert!((raw[0] * 2.0 - want[0]).norm() < 1e-14, "{bell}");
            assert!((raw[1] * 2.0 - want[1]).norm() < 1e-14, "{bell}");
        }
    }

    #[test]
    fn teleport_examples() {
        let result = teleport(c(1.0), ZERO, Symmetric).unwrap();
        assert_eq!(result.selected_branch, BellState::PsiPlus);
        assert!((result.output_qubit[0] - c(1.0)).norm() < 1e-15);
        assert!((result.fidelity - 1.0).abs() < 1e-12);
        assert!((result.success_prob - 0.25).abs() < 1e-12);
        assert!(teleport(c(1.0), ZERO, Antisymmetric).is_err());
        assert!(teleport(c(0.6), c(0.6), Symmetric).is_err());
    }

    fn arb_qubit() -> impl Strategy<Value = (Complex64, Complex64)> {
        (-1.0f64..1.0, -1.0f64..1.0, -1.0f64..1.0, -1.0f64..1.0)
            .prop_filter("nonzero", |(a, b, c, d)| {
                a * a + b * b + c * c + d * d > 1e-6
            })
            .prop_map(|(a, b, c, d)| {
                let n = (a * a + b * b + c * c + d * d).sqrt();
                (Complex64::new(a / n, b / n), Complex64::new(c / n, d / n))
            })
    }

    fn arb_biphoton() -> impl Strategy<Value = ParityBiphoton> {
        (
            proptest::array::uniform8(-1.0f64..1.0),
            any::<bool>(),
            any::<bool>(),
        )
            .prop_filter("nonzero", |(v, _, _)| {
                v.iter().map(|x| x * x).sum::<f64>() > 1e-6
            })
            .prop_map(|(v, ax, pol)| {
                let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
                let z = |k: usize| Complex64::new(v[2 * k] / n, v[2 * k + 1] / n);
                ParityBiphoton {
                    axis: if ax { Axis::X } else { Axis::Y },
                    amplitudes: [[z(0), z(1)], [z(2), z(3)]],
                    polarization_symmetry: if pol { Symmetric } else { Antisymmetric },
                }
            })
    }

    proptest! {
        #[test]
        fn exchange_is_an_involution(state in arb_biphoton(), mirror in any::<bool>()) {
            let mirror = if mirror { Axis::X } else { Axis::Y };
            let twice = exchange_and_mirror(&exchange_and_mirror(&state, mirror), mirror);
            prop_assert!(twice.max_difference(&state) < 1e-14);
        }

        #[test]
        fn coincidence_is_a_probability(state in arb_biphoton(), theta in 0.0f64..std::f64::consts::FRAC_PI_2) {
            let p = coincidence_probability(&state, theta.cos(), theta.sin(), Axis::Y).unwrap();
            prop_assert!((-1e-12..=1.0 + 1e-12).contains(&p));
            let e = exchange_and_mirror(&state, Axis::Y);
            let balanced_p = balanced(&state, Axis::Y);
            prop_assert_eq!(balanced_p < 1e-12, e.max_difference(&state) < 1e-6);
        }

        #[test]
        fn teleportation_is_perfect((alpha, beta) in arb_qubit()) {
            let r = teleport(alpha, beta, Symmetric).unwrap();
            prop_assert!((r.fidelity - 1.0).abs() < 1e-12);
            prop_assert!((r.success_prob - 0.25).abs() < 1e-12);
            for p in r.branch_probs {
                prop_assert!((p - 0.25).abs() < 1e-12);
            }
            prop_assert!((r.branch_probs.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        }
    }
}
