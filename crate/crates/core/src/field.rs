//! Discrete conjugate-phase field sums.
//!
//! Each element contributes
//!
//! ```text
//! Ex ∝ (z_n − z)(x − x_n) Q,   Ey ∝ (z_n − z)(y − y_n) Q,   Ez ∝ P Q
//! Q  = E₀ e^{−jkr} / r³,       P  = (x − x_n)² + (y − y_n)²
//! ```
//!
//! and is accumulated in ring-major element order. Parallelism is only ever
//! applied across observation (or focal) points, so every output is
//! bit-identical regardless of the worker count.

use num_complex::Complex64;
use rayon::prelude::*;
use thiserror::Error;

use crate::array::{Axis, ElementSet, Vec3};

/// Observation points closer than this to an element are rejected.
pub const MIN_ELEMENT_DISTANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FieldError {
    #[error("point {point:?} lies within {distance:e} m of element {index}")]
    OnElement {
        point: Vec3,
        index: usize,
        distance: f64,
    },
    #[error("expected {expected} weights, got {got}")]
    WeightCount { expected: usize, got: usize },
    #[error("invalid range: {0}")]
    InvalidRange(String),
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Component {
    X,
    Y,
    Z,
}

impl Component {
    pub fn name(self) -> &'static str {
        match self {
            Component::X => "x",
            Component::Y => "y",
            Component::Z => "z",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct EFieldSample {
    pub ex: Complex64,
    pub ey: Complex64,
    pub ez: Complex64,
}

impl EFieldSample {
    pub fn get(&self, c: Component) -> Complex64 {
        match c {
            Component::X => self.ex,
            Component::Y => self.ey,
            Component::Z => self.ez,
        }
    }
}

/// Per-component field magnitudes at a focus.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct GainTriple {
    pub gx: f64,
    pub gy: f64,
    pub gz: f64,
}

impl GainTriple {
    pub fn get(&self, c: Component) -> f64 {
        match c {
            Component::X => self.gx,
            Component::Y => self.gy,
            Component::Z => self.gz,
        }
    }

    pub fn scaled(self, s: f64) -> Self {
        Self {
            gx: self.gx * s,
            gy: self.gy * s,
            gz: self.gz * s,
        }
    }
}

/// Output units for gains.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Normalization {
    /// Sums in V/m (E₀-scaled).
    Raw,
    /// Divided by `C·E₀`, landing on the continuum constants (8, 4π).
    Continuum,
}

impl Normalization {
    pub fn factor(self, elements: &ElementSet) -> f64 {
        match self {
            Normalization::Raw => 1.0,
            Normalization::Continuum => 1.0 / (elements.continuum_scale() * elements.e0()),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Normalization::Raw => "raw",
            Normalization::Continuum => "continuum",
        }
    }
}

/// Unit-modulus excitation coefficients, one per element.
#[derive(Debug, Clone, PartialEq)]
pub struct Weights(Vec<Complex64>);

impl Weights {
    /// Normalizes every coefficient to unit modulus; zeros become 1.
    pub fn from_phasors(values: Vec<Complex64>) -> Self {
        Self(
            values
                .into_iter()
                .map(|w| {
                    let n = w.norm();
                    if n > 0.0 && n.is_finite() {
                        w / n
                    } else {
                        Complex64::new(1.0, 0.0)
                    }
                })
                .collect(),
        )
    }

    pub fn uniform(len: usize) -> Self {
        Self(vec![Complex64::new(1.0, 0.0); len])
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// Offsets of an observation point from one element.
#[derive(Clone, Copy)]
struct Geometry {
    dx: f64,
    dy: f64,
    /// `z_n − z`
    dz: f64,
    p: f64,
    r: f64,
}

#[inline]
fn geometry(element: Vec3, point: Vec3, index: usize) -> Result<Geometry, FieldError> {
    let dx = point.x - element.x;
    let dy = point.y - element.y;
    let dz = element.z - point.z;
    let p = dx * dx + dy * dy;
    let r = (p + dz * dz).sqrt();
    if r.is_nan() || r <= MIN_ELEMENT_DISTANCE {
        return Err(FieldError::OnElement {
            point,
            index,
            distance: r,
        });
    }
    Ok(Geometry { dx, dy, dz, p, r })
}

impl Geometry {
    fn amplitude(&self, c: Component) -> f64 {
        match c {
            Component::X => self.dz * self.dx,
            Component::Y => self.dz * self.dy,
            Component::Z => self.p,
        }
    }
}

/// `w_n = exp(+jk|focus − r_n|)`: every element's propagation phase is
/// cancelled at the focus.
pub fn conjugate_weights(elements: &ElementSet, focus: Vec3) -> Result<Weights, FieldError> {
    let k = elements.wavenumber();
    let w = elements
        .positions()
        .iter()
        .enumerate()
        .map(|(i, &e)| geometry(e, focus, i).map(|g| Complex64::from_polar(1.0, k * g.r)))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(Weights(w))
}

/// Conjugate of the full per-element contribution of one component,
/// including the sign of its geometric factor. This maximizes that
/// component's magnitude at the focus; for Ez it coincides with
/// [`conjugate_weights`] since `P ≥ 0`.
pub fn component_weights(
    elements: &ElementSet,
    focus: Vec3,
    component: Component,
) -> Result<Weights, FieldError> {
    let k = elements.wavenumber();
    let w = elements
        .positions()
        .iter()
        .enumerate()
        .map(|(i, &e)| {
            geometry(e, focus, i).map(|g| {
                let sign = if g.amplitude(component) < 0.0 {
                    -1.0
                } else {
                    1.0
                };
                Complex64::from_polar(sign, k * g.r)
            })
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(Weights(w))
}

/// Weighted field at one observation point.
pub fn field_at(
    elements: &ElementSet,
    weights: &Weights,
    point: Vec3,
) -> Result<EFieldSample, FieldError> {
    if weights.len() != elements.len() {
        return Err(FieldError::WeightCount {
            expected: elements.len(),
            got: weights.len(),
        });
    }
    let k = elements.wavenumber();
    let e0 = elements.e0();
    let mut out = EFieldSample::default();
    for (i, (&e, &w)) in elements
        .positions()
        .iter()
        .zip(weights.as_slice())
        .enumerate()
    {
        let g = geometry(e, point, i)?;
        let (s, c) = (k * g.r).sin_cos();
        let q = e0 / (g.r * g.r * g.r);
        let wq = w * Complex64::new(q * c, -q * s);
        out.ex += wq * (g.dz * g.dx);
        out.ey += wq * (g.dz * g.dy);
        out.ez += wq * g.p;
    }
    Ok(out)
}

/// Magnitude of a single component; skips the other two sums.
pub fn component_magnitude(
    elements: &ElementSet,
    weights: &Weights,
    point: Vec3,
    component: Component,
) -> Result<f64, FieldError> {
    if weights.len() != elements.len() {
        return Err(FieldError::WeightCount {
            expected: elements.len(),
            got: weights.len(),
        });
    }
    let k = elements.wavenumber();
    let e0 = elements.e0();
    let mut acc = Complex64::default();
    for (i, (&e, &w)) in elements
        .positions()
        .iter()
        .zip(weights.as_slice())
        .enumerate()
    {
        let g = geometry(e, point, i)?;
        let (s, c) = (k * g.r).sin_cos();
        let a = e0 * g.amplitude(component) / (g.r * g.r * g.r);
        acc += w * Complex64::new(a * c, -a * s);
    }
    Ok(acc.norm())
}

/// Focused magnitudes `(|Ex|, |Ey|, |Ez|)` at the focus, each under its own
/// conjugate weighting: `Σ |a_n| E₀ / r_n³` with `a_n` the signed geometric
/// factor of the component.
pub fn focal_gain(elements: &ElementSet, focus: Vec3) -> Result<GainTriple, FieldError> {
    let mut g = GainTriple::default();
    for (i, &e) in elements.positions().iter().enumerate() {
        let geo = geometry(e, focus, i)?;
        let inv = 1.0 / (geo.r * geo.r * geo.r);
        g.gx += (geo.dz * geo.dx).abs() * inv;
        g.gy += (geo.dz * geo.dy).abs() * inv;
        g.gz += geo.p * inv;
    }
    Ok(g.scaled(elements.e0()))
}

/// Evenly spaced focal positions along a coordinate axis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepLine {
    pub axis: Axis,
    pub start: f64,
    pub stop: f64,
    pub count: usize,
}

impl SweepLine {
    pub fn new(axis: Axis, start: f64, stop: f64, count: usize) -> Result<Self, FieldError> {
        let line = Self {
            axis,
            start,
            stop,
            count,
        };
        line.validate()?;
        Ok(line)
    }

    fn validate(&self) -> Result<(), FieldError> {
        if self.count < 2 {
            return Err(FieldError::InvalidRange(format!(
                "count must be >= 2, got {}",
                self.count
            )));
        }
        if !self.start.is_finite() || !self.stop.is_finite() || self.start >= self.stop {
            return Err(FieldError::InvalidRange(format!(
                "need finite start < stop, got {}..{}",
                self.start, self.stop
            )));
        }
        Ok(())
    }

    pub fn offsets(&self) -> Vec<f64> {
        linspace(self.start, self.stop, self.count)
    }
}

pub fn linspace(start: f64, stop: f64, count: usize) -> Vec<f64> {
    if count == 1 {
        return vec![start];
    }
    let step = (stop - start) / (count - 1) as f64;
    (0..count)
        .map(|i| {
            if i + 1 == count {
                stop
            } else {
                start + step * i as f64
            }
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct GainSweep {
    pub axis: Axis,
    pub offsets: Vec<f64>,
    pub gains: Vec<GainTriple>,
}

impl GainSweep {
    pub fn component(&self, c: Component) -> Vec<f64> {
        self.gains.iter().map(|g| g.get(c)).collect()
    }
}

/// Focal gain with the focus stepped along `line`; output ordered by offset.
pub fn sweep_gain(elements: &ElementSet, line: &SweepLine) -> Result<GainSweep, FieldError> {
    line.validate()?;
    let offsets = line.offsets();
    let gains = offsets
        .par_iter()
        .map(|&o| focal_gain(elements, Vec3::along(line.axis, o)))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(GainSweep {
        axis: line.axis,
        offsets,
        gains,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Plane {
    /// u = x, v = y
    Xy,
    /// u = x, v = z
    Xz,
    /// u = y, v = z
    Yz,
}

impl Plane {
    pub fn point(self, u: f64, v: f64, normal_offset: f64) -> Vec3 {
        match self {
            Plane::Xy => Vec3::new(u, v, normal_offset),
            Plane::Xz => Vec3::new(u, normal_offset, v),
            Plane::Yz => Vec3::new(normal_offset, u, v),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Plane::Xy => "xy",
            Plane::Xz => "xz",
            Plane::Yz => "yz",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridAxis {
    pub min: f64,
    pub max: f64,
    pub count: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MapGrid {
    pub plane: Plane,
    /// Coordinate along the plane normal.
    pub offset: f64,
    pub u: GridAxis,
    pub v: GridAxis,
}

impl MapGrid {
    fn validate(&self) -> Result<(), FieldError> {
        if !self.offset.is_finite() {
            return Err(FieldError::InvalidGrid(
                "plane offset must be finite".into(),
            ));
        }
        for (name, a) in [("u", self.u), ("v", self.v)] {
            if a.count == 0 {
                return Err(FieldError::InvalidGrid(format!(
                    "{name} count must be >= 1"
                )));
            }
            if !a.min.is_finite() || !a.max.is_finite() || a.max < a.min {
                return Err(FieldError::InvalidGrid(format!(
                    "{name} extent must be finite with min <= max"
                )));
            }
            if a.count == 1 && a.min != a.max {
                return Err(FieldError::InvalidGrid(format!(
                    "{name} has a single sample but a non-zero extent"
                )));
            }
        }
        Ok(())
    }

    pub fn u_values(&self) -> Vec<f64> {
        linspace(self.u.min, self.u.max, self.u.count)
    }

    pub fn v_values(&self) -> Vec<f64> {
        linspace(self.v.min, self.v.max, self.v.count)
    }
}

/// Row-major samples: `samples[row * u.count + col]`, rows along v.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldMap {
    pub grid: MapGrid,
    pub samples: Vec<EFieldSample>,
}

impl FieldMap {
    pub fn at(&self, row: usize, col: usize) -> &EFieldSample {
        &self.samples[row * self.grid.u.count + col]
    }
}

pub fn field_map(
    elements: &ElementSet,
    weights: &Weights,
    grid: &MapGrid,
) -> Result<FieldMap, FieldError> {
    grid.validate()?;
    let us = grid.u_values();
    let vs = grid.v_values();
    let points: Vec<Vec3> = vs
        .iter()
        .flat_map(|&v| us.iter().map(move |&u| grid.plane.point(u, v, grid.offset)))
        .collect();
    let samples = points
        .par_iter()
        .map(|&p| field_at(elements, weights, p))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(FieldMap {
        grid: *grid,
        samples,
    })
}
