//! Output builders shared by the command-line tool and the validation
//! suite. Every builder returns the complete file text, so equal inputs
//! always give byte-identical output.

use thiserror::Error;

use crate::analytic::{
    axial_gain, beam_profile, transverse_gain, AnalyticError, CylinderSpec, Direction,
    ProfileFormula,
};
use crate::array::{Axis, ConfigError, ElementSet, Vec3};
use crate::field::{
    component_weights, field_map, sweep_gain, Component, FieldError, MapGrid, Normalization,
    SweepLine,
};
use crate::io::{array_metadata, format_g9, gain_metadata, render_csv, report_to_json, IoError};
use crate::resolution::{
    resolution_report, ProfileEvaluator, ReportOptions, ResolutionError, Source,
};
use crate::specfun::SpecFunError;

#[derive(Debug, Error)]
pub enum RunError {
    #[error("invalid config field `{}`: {}", .0.field, .0.constraint)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Io(#[from] IoError),
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Analytic(#[from] AnalyticError),
    #[error(transparent)]
    Resolution(#[from] ResolutionError),
    #[error(transparent)]
    SpecFun(#[from] SpecFunError),
}

impl RunError {
    /// True for errors in the request itself (bad config, range or
    /// unsupported combination), as opposed to numeric failures.
    pub fn is_usage(&self) -> bool {
        match self {
            RunError::Config(_) => true,
            RunError::Io(e) => !matches!(e, IoError::Io(_)),
            RunError::Field(e) => !matches!(e, FieldError::OnElement { .. }),
            RunError::Analytic(e) => analytic_is_usage(e),
            RunError::SpecFun(_) => false,
            RunError::Resolution(e) => match e {
                ResolutionError::UnsupportedSource(_) => true,
                ResolutionError::Analytic(a) => analytic_is_usage(a),
                ResolutionError::Field(f) => !matches!(f, FieldError::OnElement { .. }),
                _ => false,
            },
        }
    }
}

fn analytic_is_usage(e: &AnalyticError) -> bool {
    matches!(
        e,
        AnalyticError::InvalidSpec(_) | AnalyticError::Unsupported(_)
    )
}

/// Closed-form `(gx, gz)` in continuum units along a sweep axis: the axial
/// curves for z and the transverse curves for x and y.
pub fn analytic_gains(
    axis: Axis,
    offset: f64,
    spec: &CylinderSpec,
) -> Result<(f64, f64), AnalyticError> {
    Ok(match axis {
        Axis::Z => (
            axial_gain(Component::X, offset, spec),
            axial_gain(Component::Z, offset, spec),
        ),
        _ => (
            transverse_gain(Component::X, axis, offset, spec)?,
            transverse_gain(Component::Z, axis, offset, spec)?,
        ),
    })
}

/// Focal gain sweep with columns `offset_lambda,gx,gy,gz` and optionally
/// `gx_analytic,gz_analytic`.
pub fn gain_sweep_csv(
    elements: &ElementSet,
    line: &SweepLine,
    normalization: Normalization,
    component: Option<Component>,
    analytic: bool,
) -> Result<String, RunError> {
    let sweep = sweep_gain(elements, line)?;
    let lambda = elements.wavelength();
    let factor = normalization.factor(elements);
    let offsets: Vec<f64> = sweep.offsets.iter().map(|o| o / lambda).collect();
    let gx: Vec<f64> = sweep.gains.iter().map(|g| g.gx * factor).collect();
    let gy: Vec<f64> = sweep.gains.iter().map(|g| g.gy * factor).collect();
    let gz: Vec<f64> = sweep.gains.iter().map(|g| g.gz * factor).collect();
    let meta = gain_metadata(
        component.map_or("all", Component::name),
        line.axis.name(),
        normalization,
        elements,
    );
    if !analytic {
        return Ok(render_csv(
            &meta,
            &["offset_lambda", "gx", "gy", "gz"],
            &[&offsets, &gx, &gy, &gz],
        )?);
    }
    let spec = CylinderSpec::of(elements);
    // analytic curves are in continuum units; map them onto the chosen scale
    let to_output = elements.continuum_scale() * elements.e0() * factor;
    let mut ax = Vec::with_capacity(offsets.len());
    let mut az = Vec::with_capacity(offsets.len());
    for &o in &sweep.offsets {
        let (x, z) = analytic_gains(line.axis, o, &spec)?;
        ax.push(x * to_output);
        az.push(z * to_output);
    }
    Ok(render_csv(
        &meta,
        &[
            "offset_lambda",
            "gx",
            "gy",
            "gz",
            "gx_analytic",
            "gz_analytic",
        ],
        &[&offsets, &gx, &gy, &gz, &ax, &az],
    )?)
}

/// Beam profile around an on-axis focus at the origin, continuum units,
/// columns `offset_lambda,value`. Offsets in meters.
pub fn beam_profile_csv(
    elements: &ElementSet,
    component: Component,
    direction: Direction,
    source: Source,
    calibrated: bool,
    offsets: &[f64],
) -> Result<String, RunError> {
    let values = match source {
        Source::Analytic => {
            let formula = ProfileFormula::new(component, direction, calibrated)?;
            let spec = CylinderSpec::of(elements);
            offsets
                .iter()
                .map(|&d| beam_profile(formula, d, &spec))
                .collect::<Result<Vec<_>, _>>()?
        }
        _ => {
            let eval = ProfileEvaluator::new(component, direction, source, elements)?;
            let (Some(&first), Some(&last)) = (offsets.first(), offsets.last()) else {
                return Err(FieldError::InvalidRange("no offsets".into()).into());
            };
            if offsets.len() < 2 {
                return Err(FieldError::InvalidRange("count must be >= 2".into()).into());
            }
            eval.sample(first, last, offsets.len())?.values().to_vec()
        }
    };
    let lambda = elements.wavelength();
    let mut meta = vec![
        ("component".to_string(), component.name().to_string()),
        ("direction".into(), direction.name().into()),
        ("source".into(), source.name().into()),
        ("calibrated".into(), calibrated.to_string()),
        (
            "normalization".into(),
            Normalization::Continuum.name().into(),
        ),
    ];
    meta.extend(array_metadata(elements));
    let lam: Vec<f64> = offsets.iter().map(|o| o / lambda).collect();
    Ok(render_csv(
        &meta,
        &["offset_lambda", "value"],
        &[&lam, &values],
    )?)
}

/// Field magnitudes on a plane, focused at `focus` with the weighting
/// that maximizes `weighting` there. Columns
/// `u_lambda,v_lambda,abs_ex,abs_ey,abs_ez`, rows ordered along v then u.
pub fn field_map_csv(
    elements: &ElementSet,
    focus: Vec3,
    weighting: Component,
    grid: &MapGrid,
    normalization: Normalization,
) -> Result<String, RunError> {
    let weights = component_weights(elements, focus, weighting)?;
    let map = field_map(elements, &weights, grid)?;
    let lambda = elements.wavelength();
    let factor = normalization.factor(elements);
    let (us, vs) = (grid.u_values(), grid.v_values());
    let n = map.samples.len();
    let mut cols: [Vec<f64>; 5] = std::array::from_fn(|_| Vec::with_capacity(n));
    for (row, &v) in vs.iter().enumerate() {
        for (col, &u) in us.iter().enumerate() {
            let s = map.at(row, col);
            cols[0].push(u / lambda);
            cols[1].push(v / lambda);
            cols[2].push(s.ex.norm() * factor);
            cols[3].push(s.ey.norm() * factor);
            cols[4].push(s.ez.norm() * factor);
        }
    }
    let mut meta = vec![
        ("plane".to_string(), grid.plane.name().to_string()),
        (
            "plane_offset_lambda".into(),
            format_g9(grid.offset / lambda),
        ),
        (
            "focus_lambda".into(),
            format!(
                "{}:{}:{}",
                format_g9(focus.x / lambda),
                format_g9(focus.y / lambda),
                format_g9(focus.z / lambda)
            ),
        ),
        ("weighting".into(), weighting.name().into()),
        ("normalization".into(), normalization.name().into()),
    ];
    meta.extend(array_metadata(elements));
    Ok(render_csv(
        &meta,
        &["u_lambda", "v_lambda", "abs_ex", "abs_ey", "abs_ez"],
        &[&cols[0], &cols[1], &cols[2], &cols[3], &cols[4]],
    )?)
}

/// Resolution report as pretty JSON.
pub fn resolution_json(
    elements: &ElementSet,
    component: Component,
    direction: Direction,
    source: Source,
    options: &ReportOptions,
) -> Result<String, RunError> {
    let report = resolution_report(component, direction, source, elements, options)?;
    Ok(report_to_json(&report))
}
