//! Cylindrical dipole array geometry.
//!
//! Rings of `N` vertically polarized dipoles with radius `R`, stacked along
//! the z-axis at spacing `d` and centred on the xy-plane.

use std::f64::consts::PI;
use std::ops::{Add, Mul, Sub};

use thiserror::Error;

pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

#[derive(Debug, Clone, PartialEq, Error)]
#[error("invalid `{field}`: {constraint}")]
pub struct ConfigError {
    pub field: &'static str,
    pub constraint: String,
}

impl ConfigError {
    pub fn new(field: &'static str, constraint: impl Into<String>) -> Self {
        Self {
            field,
            constraint: constraint.into(),
        }
    }
}

/// A length given either in meters or in wavelengths.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Length {
    Meters(f64),
    Wavelengths(f64),
}

impl Length {
    pub fn meters(self, wavelength: f64) -> f64 {
        match self {
            Length::Meters(v) => v,
            Length::Wavelengths(v) => v * wavelength,
        }
    }

    fn raw(self) -> f64 {
        match self {
            Length::Meters(v) | Length::Wavelengths(v) => v,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ElementsPerRing {
    Auto,
    Fixed(usize),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ArrayConfig {
    pub wavelength_m: Option<f64>,
    pub frequency_hz: Option<f64>,
    pub radius: Length,
    /// Spacing between rings and between neighbouring elements on a ring.
    pub ring_spacing: Length,
    pub num_rings: usize,
    pub elements_per_ring: ElementsPerRing,
    pub e0: f64,
}

impl ArrayConfig {
    /// λ = 0.05 m, R = 20λ, d = λ/2, N resolved automatically (251).
    pub fn reference(num_rings: usize) -> Self {
        Self {
            wavelength_m: Some(0.05),
            frequency_hz: None,
            radius: Length::Wavelengths(20.0),
            ring_spacing: Length::Wavelengths(0.5),
            num_rings,
            elements_per_ring: ElementsPerRing::Auto,
            e0: 1.0,
        }
    }

    /// Checks every field and returns the resolved geometry.
    pub fn resolve(&self) -> Result<ResolvedArray, ConfigError> {
        let wavelength = wavelength_of(self)?;
        for (field, len) in [("radius", self.radius), ("ring_spacing", self.ring_spacing)] {
            if !len.raw().is_finite() || len.raw() <= 0.0 {
                return Err(ConfigError::new(field, "must be finite and > 0"));
            }
        }
        let radius = self.radius.meters(wavelength);
        let spacing = self.ring_spacing.meters(wavelength);
        if self.num_rings < 1 {
            return Err(ConfigError::new("num_rings", "must be >= 1"));
        }
        let elements_per_ring = match self.elements_per_ring {
            ElementsPerRing::Auto => resolve_elements_per_ring(radius, spacing),
            ElementsPerRing::Fixed(n) if n >= 3 => n,
            ElementsPerRing::Fixed(_) => {
                return Err(ConfigError::new("elements_per_ring", "must be >= 3"))
            }
        };
        if !self.e0.is_finite() || self.e0 <= 0.0 {
            return Err(ConfigError::new("e0_v_per_m", "must be finite and > 0"));
        }
        Ok(ResolvedArray {
            wavelength,
            radius,
            ring_spacing: spacing,
            num_rings: self.num_rings,
            elements_per_ring,
            e0: self.e0,
        })
    }
}

/// Fully numeric array parameters after unit resolution.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResolvedArray {
    pub wavelength: f64,
    pub radius: f64,
    pub ring_spacing: f64,
    pub num_rings: usize,
    pub elements_per_ring: usize,
    pub e0: f64,
}

/// Wavelength from either the explicit value or `c / f`.
pub fn wavelength_of(config: &ArrayConfig) -> Result<f64, ConfigError> {
    let lambda = match (config.wavelength_m, config.frequency_hz) {
        (Some(_), Some(_)) => {
            return Err(ConfigError::new(
                "wavelength_m",
                "wavelength_m and frequency_hz are mutually exclusive",
            ))
        }
        (None, None) => {
            return Err(ConfigError::new(
                "wavelength_m",
                "wavelength_m or frequency_hz is required",
            ))
        }
        (Some(w), None) => {
            if !w.is_finite() || w <= 0.0 {
                return Err(ConfigError::new("wavelength_m", "must be finite and > 0"));
            }
            w
        }
        (None, Some(f)) => {
            if !f.is_finite() || f <= 0.0 {
                return Err(ConfigError::new("frequency_hz", "must be finite and > 0"));
            }
            SPEED_OF_LIGHT / f
        }
    };
    Ok(lambda)
}

/// Number of elements that fit on a ring at the given arc spacing, at least 3.
pub fn resolve_elements_per_ring(radius: f64, spacing: f64) -> usize {
    let n = (2.0 * PI * radius / spacing).round();
    if n.is_finite() && n > 3.0 {
        n as usize
    } else {
        3
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Vec3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Vec3 {
    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        Self { x, y, z }
    }

    pub fn norm(self) -> f64 {
        (self.x * self.x + self.y * self.y + self.z * self.z).sqrt()
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }

    /// Component along an axis.
    pub fn along(axis: Axis, value: f64) -> Self {
        match axis {
            Axis::X => Self::new(value, 0.0, 0.0),
            Axis::Y => Self::new(0.0, value, 0.0),
            Axis::Z => Self::new(0.0, 0.0, value),
        }
    }

    pub fn get(self, axis: Axis) -> f64 {
        match axis {
            Axis::X => self.x,
            Axis::Y => self.y,
            Axis::Z => self.z,
        }
    }
}

impl Add for Vec3 {
    type Output = Vec3;
    fn add(self, o: Vec3) -> Vec3 {
        Vec3::new(self.x + o.x, self.y + o.y, self.z + o.z)
    }
}

impl Sub for Vec3 {
    type Output = Vec3;
    fn sub(self, o: Vec3) -> Vec3 {
        Vec3::new(self.x - o.x, self.y - o.y, self.z - o.z)
    }
}

impl Mul<f64> for Vec3 {
    type Output = Vec3;
    fn mul(self, s: f64) -> Vec3 {
        Vec3::new(self.x * s, self.y * s, self.z * s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Axis {
    X,
    Y,
    Z,
}

impl Axis {
    pub fn name(self) -> &'static str {
        match self {
            Axis::X => "x",
            Axis::Y => "y",
            Axis::Z => "z",
        }
    }
}

/// Realized element positions, ring-major: index = ring · N + n.
#[derive(Debug, Clone, PartialEq)]
pub struct ElementSet {
    positions: Vec<Vec3>,
    params: ResolvedArray,
    wavenumber: f64,
}

impl ElementSet {
    pub fn positions(&self) -> &[Vec3] {
        &self.positions
    }

    pub fn params(&self) -> &ResolvedArray {
        &self.params
    }

    pub fn wavenumber(&self) -> f64 {
        self.wavenumber
    }

    pub fn wavelength(&self) -> f64 {
        self.params.wavelength
    }

    pub fn radius(&self) -> f64 {
        self.params.radius
    }

    pub fn ring_spacing(&self) -> f64 {
        self.params.ring_spacing
    }

    pub fn num_rings(&self) -> usize {
        self.params.num_rings
    }

    pub fn elements_per_ring(&self) -> usize {
        self.params.elements_per_ring
    }

    pub fn e0(&self) -> f64 {
        self.params.e0
    }

    /// Dipole axis; every element is z-polarized.
    pub fn polarization(&self) -> Vec3 {
        Vec3::new(0.0, 0.0, 1.0)
    }

    /// Axial span between the outermost rings, `(M − 1)·d`.
    pub fn length(&self) -> f64 {
        (self.params.num_rings - 1) as f64 * self.params.ring_spacing
    }

    /// Element density `N / (2π d)` that maps discrete sums onto the
    /// continuous (θ, l) integrals.
    pub fn continuum_scale(&self) -> f64 {
        self.params.elements_per_ring as f64 / (2.0 * PI * self.params.ring_spacing)
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }
}

/// Ring planes at `(m − (M−1)/2)·d`; element angles `2πn/N`, n = 1..N.
pub fn build_array(config: &ArrayConfig) -> Result<ElementSet, ConfigError> {
    let params = config.resolve()?;
    Ok(build_resolved(params))
}

pub fn build_resolved(params: ResolvedArray) -> ElementSet {
    let n = params.elements_per_ring;
    let m = params.num_rings;
    let center = (m as f64 - 1.0) / 2.0;
    let ring: Vec<(f64, f64)> = (1..=n)
        .map(|i| {
            let theta = 2.0 * PI * i as f64 / n as f64;
            (params.radius * theta.cos(), params.radius * theta.sin())
        })
        .collect();
    let mut positions = Vec::with_capacity(n * m);
    for r in 0..m {
        let z = (r as f64 - center) * params.ring_spacing;
        positions.extend(ring.iter().map(|&(x, y)| Vec3::new(x, y, z)));
    }
    ElementSet {
        positions,
        wavenumber: 2.0 * PI / params.wavelength,
        params,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const LAMBDA: f64 = 0.05;

    #[test]
    fn elements_per_ring_resolution() {
        assert_eq!(resolve_elements_per_ring(20.0 * LAMBDA, LAMBDA / 2.0), 251);
        assert_eq!(resolve_elements_per_ring(0.5 / (2.0 * PI), 0.5), 3);
        assert_eq!(resolve_elements_per_ring(1.0, 0.5), 13);
    }

    #[test]
    fn ring_planes_are_symmetric() {
        let mut cfg = ArrayConfig::reference(3);
        cfg.elements_per_ring = ElementsPerRing::Fixed(4);
        let arr = build_array(&cfg).unwrap();
        let mut zs: Vec<f64> = arr.positions().iter().map(|p| p.z).collect();
        zs.dedup();
        assert_eq!(zs, vec![-0.5 * LAMBDA, 0.0, 0.5 * LAMBDA]);
    }

    #[test]
    fn single_ring_has_zero_length() {
        let arr = build_array(&ArrayConfig::reference(1)).unwrap();
        assert_eq!(arr.length(), 0.0);
        assert!(arr.positions().iter().all(|p| p.z == 0.0));
    }

    #[test]
    fn reference_geometry() {
        let arr = build_array(&ArrayConfig::reference(401)).unwrap();
        assert_eq!(arr.elements_per_ring(), 251);
        assert_eq!(arr.len(), 251 * 401);
        assert!((arr.continuum_scale() - 251.0 / (2.0 * PI * 0.025)).abs() < 1e-9);
        assert!((arr.continuum_scale() - 1597.96).abs() < 0.05);
        assert_eq!(arr.length(), 400.0 * 0.025);
        assert_eq!(arr.polarization(), Vec3::new(0.0, 0.0, 1.0));
    }

    #[test]
    fn wavelength_sources() {
        let mut cfg = ArrayConfig::reference(1);
        assert_eq!(wavelength_of(&cfg).unwrap(), 0.05);
        cfg.wavelength_m = None;
        cfg.frequency_hz = Some(SPEED_OF_LIGHT);
        assert_eq!(wavelength_of(&cfg).unwrap(), 1.0);
        cfg.frequency_hz = Some(6e9);
        assert!((wavelength_of(&cfg).unwrap() - 0.049_965).abs() < 1e-6);
        cfg.wavelength_m = Some(0.05);
        assert_eq!(wavelength_of(&cfg).unwrap_err().field, "wavelength_m");
        cfg.wavelength_m = None;
        cfg.frequency_hz = None;
        assert!(wavelength_of(&cfg).is_err());
    }

    #[test]
    fn validation_names_the_field() {
        let mut cfg = ArrayConfig::reference(0);
        assert_eq!(build_array(&cfg).unwrap_err().field, "num_rings");
        cfg.num_rings = 2;
        cfg.radius = Length::Meters(-1.0);
        assert_eq!(build_array(&cfg).unwrap_err().field, "radius");
        cfg.radius = Length::Meters(1.0);
        cfg.elements_per_ring = ElementsPerRing::Fixed(2);
        assert_eq!(build_array(&cfg).unwrap_err().field, "elements_per_ring");
        cfg.elements_per_ring = ElementsPerRing::Auto;
        cfg.ring_spacing = Length::Wavelengths(0.0);
        assert_eq!(build_array(&cfg).unwrap_err().field, "ring_spacing");
        cfg.ring_spacing = Length::Wavelengths(0.5);
        cfg.e0 = f64::NAN;
        assert_eq!(build_array(&cfg).unwrap_err().field, "e0_v_per_m");
    }

    proptest! {
        #[test]
        fn geometry_invariants(
            radius_l in 0.5f64..30.0,
            spacing_l in 0.2f64..1.5,
            rings in 1usize..40,
        ) {
            let cfg = ArrayConfig {
                radius: Length::Wavelengths(radius_l),
                ring_spacing: Length::Wavelengths(spacing_l),
                ..ArrayConfig::reference(rings)
            };
            let arr = build_array(&cfg).unwrap();
            let r = arr.radius();
            let (n, m) = (arr.elements_per_ring(), arr.num_rings());
            prop_assert_eq!(arr.len(), n * m);
            prop_assert_eq!(arr.length(), (m - 1) as f64 * arr.ring_spacing());
            let mut sum = Vec3::default();
            for p in arr.positions() {
                prop_assert!(((p.x * p.x + p.y * p.y).sqrt() - r).abs() < 1e-9 * r);
                sum = sum + *p;
            }
            prop_assert!(sum.norm() < 1e-9 * r * (n * m) as f64);
            let mut zs: Vec<f64> = arr.positions().iter().map(|p| p.z).collect();
            let mut neg: Vec<f64> = zs.iter().map(|z| -z).collect();
            zs.sort_by(f64::total_cmp);
            neg.sort_by(f64::total_cmp);
            for (a, b) in zs.iter().zip(&neg) {
                prop_assert_eq!(a + 0.0, b + 0.0);
            }
            prop_assert_eq!(build_array(&cfg).unwrap(), arr);
        }
    }
}
