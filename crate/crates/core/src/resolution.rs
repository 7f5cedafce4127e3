//! Focusing-resolution metrics: peak location, 3-dB full width and
//! sidelobe structure of 1-D profiles.
//!
//! The 3-dB level is taken on field amplitude, i.e. crossings at
//! `peak / √2`. The main lobe extends to the first local minimum on each
//! side of the peak; sidelobes are local maxima beyond it.

use std::f64::consts::FRAC_1_SQRT_2;

use rayon::prelude::*;
use thiserror::Error;

use crate::analytic::{beam_profile, AnalyticError, CylinderSpec, Direction, ProfileFormula};
use crate::array::{ElementSet, Vec3};
use crate::field::{component_magnitude, component_weights, linspace, Component, FieldError};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ResolutionError {
    #[error("invalid profile: {0}")]
    InvalidProfile(String),
    #[error("profile is flat; no peak")]
    Flat,
    #[error("no 3-dB crossing on the {0} side of the peak within the sampled domain")]
    NoCrossing(Side),
    #[error("{0} profiles are not supported for resolution reports")]
    UnsupportedSource(Source),
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Analytic(#[from] AnalyticError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

impl std::fmt::Display for Side {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Side::Left => "left",
            Side::Right => "right",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Source {
    Numeric,
    Analytic,
    Quadrature,
}

impl Source {
    pub fn name(self) -> &'static str {
        match self {
            Source::Numeric => "numeric",
            Source::Analytic => "analytic",
            Source::Quadrature => "quadrature",
        }
    }
}

impl std::fmt::Display for Source {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProfileMeta {
    pub component: Component,
    pub direction: Direction,
    pub source: Source,
    pub wavelength: f64,
}

/// Sampled gain curve. Offsets in meters, strictly increasing.
#[derive(Debug, Clone, PartialEq)]
pub struct Profile1D {
    offsets: Vec<f64>,
    values: Vec<f64>,
    meta: ProfileMeta,
}

impl Profile1D {
    pub fn new(
        offsets: Vec<f64>,
        values: Vec<f64>,
        meta: ProfileMeta,
    ) -> Result<Self, ResolutionError> {
        if offsets.len() != values.len() {
            return Err(ResolutionError::InvalidProfile(format!(
                "{} offsets but {} values",
                offsets.len(),
                values.len()
            )));
        }
        if offsets.len() < 3 {
            return Err(ResolutionError::InvalidProfile(
                "need at least 3 samples".into(),
            ));
        }
        if offsets.iter().any(|o| !o.is_finite()) || offsets.windows(2).any(|w| w[1] <= w[0]) {
            return Err(ResolutionError::InvalidProfile(
                "offsets must be finite and strictly increasing".into(),
            ));
        }
        if values.iter().any(|v| !v.is_finite() || *v < 0.0) {
            return Err(ResolutionError::InvalidProfile(
                "values must be finite and nonnegative".into(),
            ));
        }
        if !(meta.wavelength.is_finite() && meta.wavelength > 0.0) {
            return Err(ResolutionError::InvalidProfile(
                "wavelength must be > 0".into(),
            ));
        }
        Ok(Self {
            offsets,
            values,
            meta,
        })
    }

    pub fn offsets(&self) -> &[f64] {
        &self.offsets
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn meta(&self) -> &ProfileMeta {
        &self.meta
    }

    /// Same samples with every value multiplied by `c > 0`.
    pub fn scaled(&self, c: f64) -> Result<Self, ResolutionError> {
        Self::new(
            self.offsets.clone(),
            self.values.iter().map(|v| v * c).collect(),
            self.meta,
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Peak {
    pub offset: f64,
    pub value: f64,
    /// The maximum sits on the first or last sample.
    pub boundary: bool,
    index: usize,
}

impl Peak {
    pub fn index(&self) -> usize {
        self.index
    }
}

/// Vertex of the parabola through three points, clamped to their span.
fn parabolic_vertex(x: [f64; 3], y: [f64; 3]) -> Option<(f64, f64)> {
    let d01 = (y[1] - y[0]) / (x[1] - x[0]);
    let d12 = (y[2] - y[1]) / (x[2] - x[1]);
    let a = (d12 - d01) / (x[2] - x[0]);
    if a.is_nan() || a >= 0.0 {
        return None;
    }
    // y = y1 + b (t − x1) + a (t − x1)²
    let b = d01 + a * (x[1] - x[0]);
    let xv = (x[1] - b / (2.0 * a)).clamp(x[0], x[2]);
    let t = xv - x[1];
    Some((xv, y[1] + b * t + a * t * t))
}

/// Global maximum, refined by 3-point parabolic interpolation.
pub fn find_peak(profile: &Profile1D) -> Result<Peak, ResolutionError> {
    let v = &profile.values;
    let o = &profile.offsets;
    let (mut idx, mut best) = (0, v[0]);
    for (i, &x) in v.iter().enumerate() {
        if x > best {
            best = x;
            idx = i;
        }
    }
    if v.iter().all(|&x| x == v[0]) {
        return Err(ResolutionError::Flat);
    }
    if idx == 0 || idx + 1 == v.len() {
        return Ok(Peak {
            offset: o[idx],
            value: best,
            boundary: true,
            index: idx,
        });
    }
    let (offset, value) = parabolic_vertex(
        [o[idx - 1], o[idx], o[idx + 1]],
        [v[idx - 1], v[idx], v[idx + 1]],
    )
    .filter(|&(_, y)| y >= best)
    .unwrap_or((o[idx], best));
    Ok(Peak {
        offset,
        value,
        boundary: false,
        index: idx,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HalfPowerWidth {
    pub left: f64,
    pub right: f64,
    pub width: f64,
    /// Width doubled from the right-side crossing of a profile whose peak
    /// sits on its first sample (one-sided symmetric curve).
    pub mirrored: bool,
}

fn crossing_index(values: &[f64], from: usize, threshold: f64, side: Side) -> Option<usize> {
    match side {
        Side::Right => (from + 1..values.len()).find(|&j| values[j] < threshold),
        Side::Left => (0..from).rev().find(|&j| values[j] < threshold),
    }
}

fn lerp_crossing(x0: f64, y0: f64, x1: f64, y1: f64, level: f64) -> f64 {
    if y1 == y0 {
        return 0.5 * (x0 + x1);
    }
    x0 + (level - y0) * (x1 - x0) / (y1 - y0)
}

/// 3-dB full width of a sampled profile; crossings by linear interpolation
/// between the bracketing samples.
pub fn half_power_width(profile: &Profile1D) -> Result<HalfPowerWidth, ResolutionError> {
    let peak = find_peak(profile)?;
    let level = peak.value * FRAC_1_SQRT_2;
    let (o, v) = (&profile.offsets, &profile.values);
    let right = crossing_index(v, peak.index, level, Side::Right)
        .map(|j| lerp_crossing(o[j - 1], v[j - 1], o[j], v[j], level));
    if peak.boundary && peak.index == 0 {
        let right = right.ok_or(ResolutionError::NoCrossing(Side::Right))?;
        let half = right - peak.offset;
        return Ok(HalfPowerWidth {
            left: peak.offset - half,
            right,
            width: 2.0 * half,
            mirrored: true,
        });
    }
    let right = right.ok_or(ResolutionError::NoCrossing(Side::Right))?;
    let left = crossing_index(v, peak.index, level, Side::Left)
        .map(|j| lerp_crossing(o[j + 1], v[j + 1], o[j], v[j], level))
        .ok_or(ResolutionError::NoCrossing(Side::Left))?;
    Ok(HalfPowerWidth {
        left,
        right,
        width: right - left,
        mirrored: false,
    })
}

/// 3-dB full width of a continuous profile `f` peaked at `peak_offset`:
/// outward scan in `step` increments up to `max_extent`, then bisection to
/// `tol`.
pub fn half_power_width_fn<E>(
    mut f: impl FnMut(f64) -> Result<f64, E>,
    peak_offset: f64,
    step: f64,
    max_extent: f64,
    tol: f64,
) -> Result<HalfPowerWidth, E>
where
    E: From<ResolutionError>,
{
    let level = f(peak_offset)? * FRAC_1_SQRT_2;
    let mut crossing = |dir: f64, side: Side| -> Result<f64, E> {
        let mut inside = peak_offset;
        let mut t = step;
        let mut outside = loop {
            if t > max_extent + 0.5 * step {
                return Err(ResolutionError::NoCrossing(side).into());
            }
            let x = peak_offset + dir * t;
            if f(x)? < level {
                break x;
            }
            inside = x;
            t += step;
        };
        while (outside - inside).abs() > tol {
            let mid = 0.5 * (inside + outside);
            if f(mid)? < level {
                outside = mid;
            } else {
                inside = mid;
            }
        }
        Ok(0.5 * (inside + outside))
    };
    let right = crossing(1.0, Side::Right)?;
    let left = crossing(-1.0, Side::Left)?;
    Ok(HalfPowerWidth {
        left,
        right,
        width: right - left,
        mirrored: false,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sidelobe {
    pub offset: f64,
    /// `20 log10(value / peak)`, always negative.
    pub level_db: f64,
}

/// Local maxima outside the main lobe, highest first.
pub fn sidelobes(profile: &Profile1D) -> Vec<Sidelobe> {
    let Ok(peak) = find_peak(profile) else {
        return Vec::new();
    };
    let (o, v) = (&profile.offsets, &profile.values);
    let n = v.len();
    let mut right_min = peak.index;
    while right_min + 1 < n && v[right_min + 1] <= v[right_min] {
        right_min += 1;
    }
    let mut left_min = peak.index;
    while left_min > 0 && v[left_min - 1] <= v[left_min] {
        left_min -= 1;
    }
    let mut lobes: Vec<Sidelobe> = (1..n - 1)
        .filter(|&i| i < left_min || i > right_min)
        .filter(|&i| v[i] > v[i - 1] && v[i] >= v[i + 1])
        .filter_map(|i| {
            let (x, y) = parabolic_vertex([o[i - 1], o[i], o[i + 1]], [v[i - 1], v[i], v[i + 1]])
                .unwrap_or((o[i], v[i]));
            let y = y.max(v[i]);
            (y < peak.value && y > 0.0).then(|| Sidelobe {
                offset: x,
                level_db: 20.0 * (y / peak.value).log10(),
            })
        })
        .collect();
    lobes.sort_by(|a, b| {
        b.level_db
            .total_cmp(&a.level_db)
            .then(a.offset.total_cmp(&b.offset))
    });
    lobes
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResolutionReport {
    pub component: Component,
    pub direction: Direction,
    pub source: Source,
    pub wavelength: f64,
    pub peak_offset: f64,
    pub peak_value: f64,
    pub boundary_peak: bool,
    /// Meters.
    pub full_width_3db: f64,
    pub full_width_3db_lambda: f64,
    pub sidelobes: Vec<Sidelobe>,
}

/// Sampling used when building profiles for a report.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReportOptions {
    /// Half extent of the sampled window, in wavelengths.
    pub extent_lambda: f64,
    pub step_lambda: f64,
    /// Bisection tolerance for the 3-dB crossings, in wavelengths.
    pub tol_lambda: f64,
}

impl Default for ReportOptions {
    fn default() -> Self {
        Self {
            extent_lambda: 3.0,
            step_lambda: 0.005,
            tol_lambda: 1e-6,
        }
    }
}

/// A profile evaluator around an on-axis focus at the origin, in continuum
/// units.
pub struct ProfileEvaluator<'a> {
    inner: Evaluator<'a>,
    meta: ProfileMeta,
}

enum Evaluator<'a> {
    Analytic {
        formula: ProfileFormula,
        spec: CylinderSpec,
    },
    Numeric {
        elements: &'a ElementSet,
        weights: crate::field::Weights,
        scale: f64,
    },
}

impl<'a> ProfileEvaluator<'a> {
    pub fn new(
        component: Component,
        direction: Direction,
        source: Source,
        elements: &'a ElementSet,
    ) -> Result<Self, ResolutionError> {
        // also rejects pairs without a closed form, for every source
        let formula = ProfileFormula::new(component, direction, true)?;
        let meta = ProfileMeta {
            component,
            direction,
            source,
            wavelength: elements.wavelength(),
        };
        let inner = match source {
            Source::Analytic => Evaluator::Analytic {
                formula,
                spec: CylinderSpec::of(elements),
            },
            Source::Numeric => Evaluator::Numeric {
                elements,
                weights: component_weights(elements, Vec3::default(), component)?,
                scale: 1.0 / (elements.continuum_scale() * elements.e0()),
            },
            Source::Quadrature => return Err(ResolutionError::UnsupportedSource(source)),
        };
        Ok(Self { inner, meta })
    }

    pub fn meta(&self) -> &ProfileMeta {
        &self.meta
    }

    pub fn value(&self, delta: f64) -> Result<f64, ResolutionError> {
        match &self.inner {
            Evaluator::Analytic { formula, spec } => Ok(beam_profile(*formula, delta, spec)?),
            Evaluator::Numeric {
                elements,
                weights,
                scale,
            } => {
                let p = Vec3::along(self.meta.direction.axis(), delta);
                Ok(component_magnitude(elements, weights, p, self.meta.component)? * scale)
            }
        }
    }

    /// Samples on a uniform grid; parallel across offsets.
    pub fn sample(
        &self,
        start: f64,
        stop: f64,
        count: usize,
    ) -> Result<Profile1D, ResolutionError> {
        let offsets = linspace(start, stop, count);
        let values = offsets
            .par_iter()
            .map(|&d| self.value(d))
            .collect::<Result<Vec<_>, _>>()?;
        Profile1D::new(offsets, values, self.meta)
    }
}

/// Builds the requested profile around a focus at the origin and extracts
/// peak, 3-dB width and sidelobes.
pub fn resolution_report(
    component: Component,
    direction: Direction,
    source: Source,
    elements: &ElementSet,
    options: &ReportOptions,
) -> Result<ResolutionReport, ResolutionError> {
    let eval = ProfileEvaluator::new(component, direction, source, elements)?;
    let lambda = elements.wavelength();
    let half = options.extent_lambda * lambda;
    let count = (2.0 * options.extent_lambda / options.step_lambda).round() as usize + 1;
    let profile = eval.sample(-half, half, count)?;
    let peak = find_peak(&profile)?;
    let width = half_power_width_fn(
        |d| eval.value(d),
        peak.offset,
        options.step_lambda * lambda,
        half,
        options.tol_lambda * lambda,
    )?;
    Ok(ResolutionReport {
        component,
        direction,
        source,
        wavelength: lambda,
        peak_offset: peak.offset,
        peak_value: peak.value,
        boundary_peak: peak.boundary,
        full_width_3db: width.width,
        full_width_3db_lambda: width.width / lambda,
        sidelobes: sidelobes(&profile),
    })
}
