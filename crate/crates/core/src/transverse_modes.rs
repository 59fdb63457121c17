//! Normalized Hermite-Gaussian and Laguerre-Gaussian transverse mode fields.
//!
//! Fields are normalized so that `∫∫ |u(x, y)|^2 dx dy = 1`. All lengths share
//! one unit; tests use a unit waist.

use std::f64::consts::PI;
use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::special_math::{factorial, hermite_normalized, laguerre_generalized, GaussHermiteRule};

/// Hermite-Gaussian mode label: `m` counts nodes along x, `n` along y.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct ModeIndex {
    pub m: u32,
    pub n: u32,
}

impl ModeIndex {
    pub const fn new(m: u32, n: u32) -> Self {
        Self { m, n }
    }

    pub const fn order(&self) -> u32 {
        self.m + self.n
    }
}

impl fmt::Display for ModeIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "HG({},{})", self.m, self.n)
    }
}

/// Laguerre-Gaussian mode label: radial index `p`, azimuthal (OAM) index `l`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct LGIndex {
    pub p: u32,
    pub l: i32,
}

impl LGIndex {
    pub const fn new(p: u32, l: i32) -> Self {
        Self { p, l }
    }

    pub const fn order(&self) -> u32 {
        2 * self.p + self.l.unsigned_abs()
    }
}

impl fmt::Display for LGIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "LG(p={},l={})", self.p, self.l)
    }
}

/// Waist and wavenumber of a Gaussian beam.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BeamGeometry {
    waist: f64,
    wavenumber: f64,
}

impl BeamGeometry {
    pub fn new(waist: f64, wavenumber: f64) -> Result<Self> {
        if !(waist > 0.0 && waist.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "waist must be positive, got {waist}"
            )));
        }
        if !(wavenumber > 0.0 && wavenumber.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "wavenumber must be positive, got {wavenumber}"
            )));
        }
        Ok(Self { waist, wavenumber })
    }

    pub fn waist(&self) -> f64 {
        self.waist
    }

    pub fn wavenumber(&self) -> f64 {
        self.wavenumber
    }

    /// `z_R = k w_0^2 / 2`.
    pub fn rayleigh_range(&self) -> f64 {
        0.5 * self.wavenumber * self.waist * self.waist
    }
}

/// Signal/idler waist over pump waist, squared.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize)]
pub struct WaistRatio(f64);

impl WaistRatio {
    pub fn new(a: f64) -> Result<Self> {
        if !(a > 0.0 && a.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "waist ratio must be positive and finite, got {a}"
            )));
        }
        Ok(Self(a))
    }

    pub fn from_waists(down_converted_waist: f64, pump_waist: f64) -> Result<Self> {
        Self::new((down_converted_waist / pump_waist).powi(2))
    }

    pub fn get(self) -> f64 {
        self.0
    }

    /// Pump waist in units where the signal/idler waist is 1.
    pub fn pump_waist(self) -> f64 {
        1.0 / self.0.sqrt()
    }
}

/// Spot size, wavefront curvature radius and Gouy phase at one plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BeamParameters {
    pub spot_size: f64,
    /// Infinite at the waist (flat wavefront).
    pub curvature_radius: f64,
    pub gouy_phase: f64,
}

pub fn beam_parameters(geom: &BeamGeometry, z: f64) -> BeamParameters {
    let zr = geom.rayleigh_range();
    let spot_size = geom.waist * (1.0 + (z / zr).powi(2)).sqrt();
    let curvature_radius = if z == 0.0 {
        f64::INFINITY
    } else {
        z * (1.0 + (zr / z).powi(2))
    };
    BeamParameters {
        spot_size,
        curvature_radius,
        gouy_phase: (z / zr).atan(),
    }
}

/// One-dimensional factor of an HG mode at its waist:
/// `(2/pi)^{1/4} w^{-1/2} H_m(sqrt2 x / w) / sqrt(2^m m!) e^{-x^2/w^2}`.
///
/// `HG_m^n(x, y) = hg_axis(m, w, x) * hg_axis(n, w, y)`.
pub fn hg_axis(m: u32, waist: f64, x: f64) -> f64 {
    let s = x / waist;
    (2.0 / PI).powf(0.25) / waist.sqrt()
        * hermite_normalized(m, std::f64::consts::SQRT_2 * s)
        * (-s * s).exp()
}

/// Full paraxial HG field at `(x, y, z)`, including curvature, plane-wave
/// and Gouy phases.
pub fn hg_field(mode: ModeIndex, geom: &BeamGeometry, x: f64, y: f64, z: f64) -> Complex64 {
    let params = beam_parameters(geom, z);
    let w = params.spot_size;
    let r2 = x * x + y * y;
    let amplitude = (2.0 / PI).sqrt() / w
        * hermite_normalized(mode.m, std::f64::consts::SQRT_2 * x / w)
        * hermite_normalized(mode.n, std::f64::consts::SQRT_2 * y / w)
        * (-r2 / (w * w)).exp();
    let curvature = if params.curvature_radius.is_infinite() {
        0.0
    } else {
        geom.wavenumber * r2 / (2.0 * params.curvature_radius)
    };
    let phase = -curvature - geom.wavenumber * z + f64::from(mode.order() + 1) * params.gouy_phase;
    Complex64::from_polar(amplitude, phase)
}

/// HG field in its waist plane (real valued).
pub fn hg_field_waist(mode: ModeIndex, waist: f64, x: f64, y: f64) -> Complex64 {
    Complex64::new(hg_axis(mode.m, waist, x) * hg_axis(mode.n, waist, y), 0.0)
}

/// Normalized LG field in its waist plane, with `e^{i l phi}` azimuthal phase
/// and no additional global phase.
pub fn lg_field_waist(index: LGIndex, waist: f64, x: f64, y: f64) -> Complex64 {
    let abs_l = index.l.unsigned_abs();
    let r2 = (x * x + y * y) / (waist * waist);
    let norm = (2.0 / PI).sqrt() * (factorial(index.p) / factorial(index.p + abs_l)).sqrt() / waist;
    let radial = (2.0 * r2).sqrt().powi(abs_l as i32)
        * laguerre_generalized(index.p, f64::from(abs_l), 2.0 * r2)
        * (-r2).exp();
    let phi = y.atan2(x);
    Complex64::from_polar(1.0, f64::from(index.l) * phi) * (norm * radial)
}

/// `∫∫ f(x, y) dx dy` for a field product decaying like `e^{-2 r^2 / w^2}`.
pub fn integrate_plane<F>(rule: &GaussHermiteRule, waist: f64, f: F) -> Complex64
where
    F: Fn(f64, f64) -> Complex64,
{
    let scale = waist / std::f64::consts::SQRT_2;
    let mut total = Complex64::new(0.0, 0.0);
    for (u, wu) in rule.pairs() {
        let gu = wu * (u * u).exp();
        for (v, wv) in rule.pairs() {
            let gv = wv * (v * v).exp();
            total += f(scale * u, scale * v) * (gu * gv);
        }
    }
    total * (scale * scale)
}

/// `<a|b> = ∫∫ a* b` for two waist-plane fields sharing `waist`.
pub fn plane_overlap<A, B>(rule: &GaussHermiteRule, waist: f64, a: A, b: B) -> Complex64
where
    A: Fn(f64, f64) -> Complex64,
    B: Fn(f64, f64) -> Complex64,
{
    integrate_plane(rule, waist, |x, y| a(x, y).conj() * b(x, y))
}
