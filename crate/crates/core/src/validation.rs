//! Acceptance checks for the focusing model.
//!
//! Each check returns an [`Outcome`] with a one-line, deterministic detail
//! string. Tolerances are fixed constants below; nothing is tuned at run
//! time.

use std::f64::consts::{FRAC_PI_2, PI};
use std::time::{Duration, Instant};

use crate::analytic::{axial_gain, quadrature_gain, transverse_gain, CylinderSpec, Direction};
use crate::array::{build_array, ArrayConfig, Axis, ElementSet, Vec3};
use crate::field::{
    focal_gain, linspace, sweep_gain, Component, GridAxis, MapGrid, Normalization, Plane, SweepLine,
};
use crate::report::{beam_profile_csv, field_map_csv, gain_sweep_csv, resolution_json, RunError};
use crate::resolution::{resolution_report, ReportOptions, Source};
use crate::specfun::{ellip_e, ellip_k, sinc, sine_integral, struve_h};

/// Rings of the reference array (L = 200λ).
pub const REFERENCE_RINGS: usize = 401;
/// Rings of the short array (L = 20λ).
pub const SHORT_RINGS: usize = 41;
/// Focal points in the axial sweep.
pub const AXIAL_SWEEP_POINTS: usize = 201;
/// Fraction of the half length covered by the interior axial range.
pub const INTERIOR_FRACTION: f64 = 0.8;

pub const AXIAL_REL_TOL: f64 = 0.02;
pub const RATIO_REL_TOL: f64 = 0.02;
pub const AXIAL_SWEEP_BUDGET: Duration = Duration::from_secs(60);
pub const PLATEAU_EX_V_PER_M: f64 = 12_500.0;
pub const PLATEAU_EZ_V_PER_M: f64 = 20_000.0;
pub const PLATEAU_REL_TOL: f64 = 0.05;
/// Half-extent of the flat region, as a fraction of R.
pub const BATHTUB_EXTENT: f64 = 0.9;
pub const BATHTUB_FLATNESS: f64 = 0.06;
pub const EDGE_RATIO: f64 = 0.5;
pub const EDGE_ABS_TOL: f64 = 0.02;
pub const ORACLE_FOCI: usize = 20;
pub const EXACT_FORM_REL_TOL: f64 = 1e-6;
pub const APPROX_FORM_REL_TOL: f64 = 0.05;
/// Array length, in radii, at which the long-array transverse Ex form is
/// compared with the oracle.
pub const LONG_ARRAY_RADII: f64 = 1000.0;
pub const DISCRETE_WIDTH_TOL_LAMBDA: f64 = 0.03;
pub const LEGENDRE_TOL: f64 = 1e-10;
pub const STRUVE_IDENTITY_TOL: f64 = 1e-9;
/// One unit in the last printed decimal of the reference point values.
pub const POINT_VALUE_TOL: f64 = 1e-7;
pub const ORIGIN_REL_TOL: f64 = 1e-6;
/// Relative gap tolerated for the "exact" equality of the two Ez forms at
/// the origin: a few rounding steps.
pub const ORIGIN_EXACT_REL_TOL: f64 = 4.0 * f64::EPSILON;
pub const DETERMINISM_THREADS: [usize; 3] = [1, 4, 8];

/// Target resolutions: (component, direction, width in λ, tolerance in λ).
pub const TARGET_WIDTHS: [(Component, Direction, f64, f64); 5] = [
    (Component::Z, Direction::Depth, 0.44, 0.02),
    (Component::Z, Direction::WidthX, 0.44, 0.02),
    (Component::X, Direction::Depth, 0.31, 0.02),
    (Component::X, Direction::WidthX, 0.54, 0.03),
    (Component::X, Direction::WidthY, 0.84, 0.05),
];

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub id: u8,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

impl Outcome {
    pub fn line(&self) -> String {
        format!(
            "{} {:>2} {}: {}",
            if self.passed { "PASS" } else { "FAIL" },
            self.id,
            self.name,
            self.detail
        )
    }
}

type Check = fn() -> Result<(bool, String), RunError>;

/// Id, name and check of every criterion, in order.
pub const CRITERIA: [(u8, &str, Check); 10] = [
    (1, "axial constants", axial_constants),
    (2, "polarization ratio", polarization_ratio),
    (3, "absolute plateaus", absolute_plateaus),
    (4, "bathtub flatness", bathtub_flatness),
    (5, "edge halving", edge_halving),
    (6, "closed forms vs oracle", closed_forms_vs_oracle),
    (7, "resolutions", resolutions),
    (8, "special functions", special_functions),
    (9, "origin cross-consistency", origin_consistency),
    (10, "determinism", determinism),
];

/// Runs one criterion; errors count as failures.
pub fn run(id: u8) -> Option<Outcome> {
    let &(id, name, check) = CRITERIA.iter().find(|c| c.0 == id)?;
    let (passed, detail) = match check() {
        Ok(r) => r,
        Err(e) => (false, format!("error: {e}")),
    };
    Some(Outcome {
        id,
        name,
        passed,
        detail,
    })
}

pub fn run_all() -> Vec<Outcome> {
    CRITERIA.iter().filter_map(|c| run(c.0)).collect()
}

fn reference(rings: usize) -> Result<ElementSet, RunError> {
    Ok(build_array(&ArrayConfig::reference(rings))?)
}

fn rel(a: f64, b: f64) -> f64 {
    ((a - b) / b).abs()
}

fn range(v: &[f64]) -> (f64, f64) {
    v.iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &x| {
            (lo.min(x), hi.max(x))
        })
}

struct AxialSweep {
    gx: Vec<f64>,
    gy: Vec<f64>,
    gz: Vec<f64>,
    elapsed: Duration,
}

/// Continuum-normalized focal gains over the interior axial range.
fn interior_axial_sweep() -> Result<AxialSweep, RunError> {
    let arr = reference(REFERENCE_RINGS)?;
    let half = INTERIOR_FRACTION * 0.5 * arr.length();
    let start = Instant::now();
    let line = SweepLine::new(Axis::Z, -half, half, AXIAL_SWEEP_POINTS)?;
    let sweep = sweep_gain(&arr, &line)?;
    let elapsed = start.elapsed();
    let f = Normalization::Continuum.factor(&arr);
    Ok(AxialSweep {
        gx: sweep.gains.iter().map(|g| g.gx * f).collect(),
        gy: sweep.gains.iter().map(|g| g.gy * f).collect(),
        gz: sweep.gains.iter().map(|g| g.gz * f).collect(),
        elapsed,
    })
}

fn axial_constants() -> Result<(bool, String), RunError> {
    let s = interior_axial_sweep()?;
    let within = |v: &[f64], target: f64| v.iter().all(|&g| rel(g, target) <= AXIAL_REL_TOL);
    let (x, y, z) = (range(&s.gx), range(&s.gy), range(&s.gz));
    let fast = s.elapsed < AXIAL_SWEEP_BUDGET;
    let passed = within(&s.gx, 8.0) && within(&s.gy, 8.0) && within(&s.gz, 4.0 * PI) && fast;
    Ok((
        passed,
        format!(
            "gx in [{:.4}, {:.4}], gy in [{:.4}, {:.4}] (want 8 ± 2%); gz in [{:.4}, {:.4}] (want {:.4} ± 2%); {}-point sweep {} the 60 s budget",
            x.0, x.1, y.0, y.1, z.0, z.1, 4.0 * PI, AXIAL_SWEEP_POINTS,
            if fast { "within" } else { "over" }
        ),
    ))
}

fn polarization_ratio() -> Result<(bool, String), RunError> {
    let s = interior_axial_sweep()?;
    let ratios: Vec<f64> = s.gz.iter().zip(&s.gx).map(|(z, x)| z / x).collect();
    let (lo, hi) = range(&ratios);
    let passed = ratios.iter().all(|&r| rel(r, FRAC_PI_2) <= RATIO_REL_TOL);
    Ok((
        passed,
        format!("gz/gx in [{lo:.4}, {hi:.4}] (want {FRAC_PI_2:.4} ± 2%)"),
    ))
}

fn absolute_plateaus() -> Result<(bool, String), RunError> {
    let long = focal_gain(&reference(REFERENCE_RINGS)?, Vec3::default())?;
    let short = focal_gain(&reference(SHORT_RINGS)?, Vec3::default())?;
    let ok = |g: f64, target: f64| rel(g, target) <= PLATEAU_REL_TOL;
    let (ex, ez, ez_short) = (
        ok(long.gx, PLATEAU_EX_V_PER_M),
        ok(long.gz, PLATEAU_EZ_V_PER_M),
        ok(short.gz, PLATEAU_EZ_V_PER_M),
    );
    let mark = |b: bool| if b { "ok" } else { "off" };
    Ok((
        ex && ez && ez_short,
        format!(
            "L=200λ: |Ex| {:.0} V/m (want 12500 ± 5%, {}), |Ez| {:.0} V/m (want 20000 ± 5%, {}); L=20λ: |Ez| {:.0} V/m ({})",
            long.gx, mark(ex), long.gz, mark(ez), short.gz, mark(ez_short)
        ),
    ))
}

fn bathtub_flatness() -> Result<(bool, String), RunError> {
    let arr = reference(REFERENCE_RINGS)?;
    let r = arr.radius();
    let f = Normalization::Continuum.factor(&arr);
    let inner = SweepLine::new(Axis::X, -BATHTUB_EXTENT * r, BATHTUB_EXTENT * r, 181)?;
    let inside: Vec<f64> = sweep_gain(&arr, &inner)?
        .component(Component::X)
        .iter()
        .map(|g| g * f)
        .collect();
    let (lo, hi) = range(&inside);
    let mean = inside.iter().sum::<f64>() / inside.len() as f64;
    let flatness = (hi - lo) / mean;
    // outside the shell, clear of the element ring at x = R
    let outer = SweepLine::new(Axis::X, 1.02 * r, 4.0 * r, 150)?;
    let outside: Vec<f64> = sweep_gain(&arr, &outer)?
        .component(Component::X)
        .iter()
        .map(|g| g * f)
        .collect();
    let xs = outer.offsets();
    let bump = (1..outside.len() - 1)
        .filter(|&i| outside[i] > outside[i - 1] && outside[i] >= outside[i + 1])
        .max_by(|&a, &b| outside[a].total_cmp(&outside[b]));
    let (bump_ok, bump_text) = match bump {
        Some(i) => (
            outside[i] > hi,
            format!(
                "outside maximum {:.4} at x = {:.3}R (interior max {:.4})",
                outside[i],
                xs[i] / r,
                hi
            ),
        ),
        None => (false, "no local maximum outside the cylinder".to_string()),
    };
    Ok((
        flatness < BATHTUB_FLATNESS && bump_ok,
        format!(
            "gx over |x| <= 0.9R in [{lo:.4}, {hi:.4}], (max-min)/mean = {:.2}% (want < 6%); {bump_text}",
            100.0 * flatness
        ),
    ))
}

fn edge_halving() -> Result<(bool, String), RunError> {
    let arr = reference(REFERENCE_RINGS)?;
    let spec = CylinderSpec::of(&arr);
    let h = 0.5 * arr.length();
    let center_a = axial_gain(Component::Z, 0.0, &spec);
    let center_n = focal_gain(&arr, Vec3::default())?.gz;
    let mut ratios = Vec::new();
    for z in [-h, h] {
        ratios.push(axial_gain(Component::Z, z, &spec) / center_a);
        ratios.push(focal_gain(&arr, Vec3::new(0.0, 0.0, z))?.gz / center_n);
    }
    let passed = ratios
        .iter()
        .all(|r| (r - EDGE_RATIO).abs() <= EDGE_ABS_TOL);
    Ok((
        passed,
        format!(
            "gz(±L/2)/gz(0): analytic {:.4}/{:.4}, numeric {:.4}/{:.4} (want 0.5 ± 0.02)",
            ratios[0], ratios[2], ratios[1], ratios[3]
        ),
    ))
}

fn closed_forms_vs_oracle() -> Result<(bool, String), RunError> {
    let arr = reference(REFERENCE_RINGS)?;
    let spec = CylinderSpec::of(&arr);
    let (r, l) = (spec.radius(), spec.length());
    let long = spec.with_length(LONG_ARRAY_RADII * r)?;
    let axial = linspace(-0.6 * l, 0.6 * l, ORACLE_FOCI);
    let radial = linspace(0.05 * r, 2.5 * r, ORACLE_FOCI);
    let worst =
        |f: &dyn Fn(f64) -> Result<(f64, f64), RunError>, pts: &[f64]| -> Result<f64, RunError> {
            pts.iter().try_fold(0.0_f64, |acc, &p| {
                let (q, a) = f(p)?;
                Ok(acc.max(rel(q, a)))
            })
        };
    let ex_axial = worst(
        &|z| {
            Ok((
                quadrature_gain(Component::X, Vec3::new(0.0, 0.0, z), &spec)?,
                axial_gain(Component::X, z, &spec),
            ))
        },
        &axial,
    )?;
    let ez_axial = worst(
        &|z| {
            Ok((
                quadrature_gain(Component::Z, Vec3::new(0.0, 0.0, z), &spec)?,
                axial_gain(Component::Z, z, &spec),
            ))
        },
        &axial,
    )?;
    let ez_x = worst(
        &|x| {
            Ok((
                quadrature_gain(Component::Z, Vec3::new(x, 0.0, 0.0), &spec)?,
                transverse_gain(Component::Z, Axis::X, x, &spec)?,
            ))
        },
        &radial,
    )?;
    let ex_x = worst(
        &|x| {
            Ok((
                quadrature_gain(Component::X, Vec3::new(x, 0.0, 0.0), &long)?,
                transverse_gain(Component::X, Axis::X, x, &long)?,
            ))
        },
        &radial,
    )?;
    let ex_y = worst(
        &|y| {
            Ok((
                quadrature_gain(Component::X, Vec3::new(0.0, y, 0.0), &spec)?,
                transverse_gain(Component::X, Axis::Y, y, &spec)?,
            ))
        },
        &radial,
    )?;
    let passed = ex_axial <= EXACT_FORM_REL_TOL
        && ez_axial <= EXACT_FORM_REL_TOL
        && ez_x <= EXACT_FORM_REL_TOL
        && ex_x <= APPROX_FORM_REL_TOL
        && ex_y <= APPROX_FORM_REL_TOL;
    Ok((
        passed,
        format!(
            "max rel. error over {ORACLE_FOCI} foci: Ex axial {ex_axial:.1e}, Ez axial {ez_axial:.1e}, Ez along x {ez_x:.1e} (want <= 1e-6); Ex along x (L = 1000R) {ex_x:.1e}, Ex along y {ex_y:.1e} (want <= 5e-2)"
        ),
    ))
}

fn resolutions() -> Result<(bool, String), RunError> {
    let arr = reference(REFERENCE_RINGS)?;
    let opts = ReportOptions::default();
    let mut passed = true;
    let mut parts = Vec::new();
    for (c, d, want, tol) in TARGET_WIDTHS {
        let a = resolution_report(c, d, Source::Analytic, &arr, &opts)?.full_width_3db_lambda;
        let n = resolution_report(c, d, Source::Numeric, &arr, &opts)?.full_width_3db_lambda;
        let ok_a = (a - want).abs() <= tol;
        let ok_n = (n - a).abs() <= DISCRETE_WIDTH_TOL_LAMBDA;
        passed &= ok_a && ok_n;
        parts.push(format!(
            "E{} {} analytic {a:.4}λ (want {want}±{tol}{}), discrete {n:.4}λ ({})",
            c.name(),
            d.name(),
            if ok_a { "" } else { ", off" },
            if ok_n { "ok" } else { "off" }
        ));
    }
    Ok((passed, parts.join("; ")))
}

// Reference values are compared as printed, not as library constants.
#[allow(clippy::approx_constant)]
fn special_functions() -> Result<(bool, String), RunError> {
    let mut failures = Vec::new();
    let mut total = 0;
    let mut check = |name: &str, ok: bool| {
        total += 1;
        if !ok {
            failures.push(name.to_string());
        }
    };
    let mut legendre = 0.0_f64;
    for i in 1..=9 {
        let m = i as f64 / 10.0;
        let (k, kp) = (ellip_k(m)?, ellip_k(1.0 - m)?);
        let (e, ep) = (ellip_e(m)?, ellip_e(1.0 - m)?);
        legendre = legendre.max((e * kp + ep * k - k * kp - FRAC_PI_2).abs());
    }
    check("Legendre relation", legendre <= LEGENDRE_TOL);
    let mut struve = 0.0_f64;
    for x in linspace(0.0, 20.0, 2001) {
        struve = struve.max((struve_h(-1, x)? + struve_h(1, x)? - 2.0 / PI).abs());
    }
    check("Struve identity", struve <= STRUVE_IDENTITY_TOL);
    let si_limit = (sine_integral(1000.0)? - FRAC_PI_2).abs();
    check("Si(1000)", si_limit <= 0.002);
    check("Si(1e6)", (sine_integral(1e6)? - FRAC_PI_2).abs() <= 1e-5);
    // the printed values carry 7 decimals, some truncated rather than rounded
    let last_place = POINT_VALUE_TOL;
    let points: [(&str, f64, f64); 11] = [
        ("K(0)", ellip_k(0.0)?, 1.5707963),
        ("K(0.5)", ellip_k(0.5)?, 1.8540747),
        // the printed 1.0094510 disagrees with its own derivation rule
        ("K(-4)", ellip_k(-4.0)?, ellip_k(0.8)? / 5f64.sqrt()),
        ("E(0)", ellip_e(0.0)?, 1.5707963),
        ("E(1)", ellip_e(1.0)?, 1.0),
        ("E(0.5)", ellip_e(0.5)?, 1.3506439),
        ("H0(0)", struve_h(0, 0.0)?, 0.0),
        ("H-1(0)", struve_h(-1, 0.0)?, 0.6366198),
        ("H0(1)", struve_h(0, 1.0)?, 0.5686566),
        ("Si(pi)", sine_integral(PI)?, 1.8519370),
        ("sinc(0)", sinc(0.0), 1.0),
    ];
    for (name, got, want) in points {
        check(name, (got - want).abs() <= last_place);
    }
    check("Si(0)", sine_integral(0.0)? == 0.0);
    check("sinc(pi)", sinc(PI).abs() <= 1e-15);
    check(
        "sinc(1.3915576)",
        (sinc(1.3915576) - 0.7071068).abs() <= 1e-6,
    );
    let detail = format!(
        "Legendre {legendre:.1e} (want <= 1e-10), H-1 + H1 - 2/pi {struve:.1e} on [0, 20] (want <= 1e-9), |Si(1000) - pi/2| {si_limit:.1e}; {} of {total} checks passed{}",
        total - failures.len(),
        if failures.is_empty() { String::new() } else { format!(" (failed: {})", failures.join(", ")) }
    );
    Ok((failures.is_empty(), detail))
}

fn origin_consistency() -> Result<(bool, String), RunError> {
    let arr = reference(REFERENCE_RINGS)?;
    let spec = CylinderSpec::of(&arr);
    let ex_axial = axial_gain(Component::X, 0.0, &spec);
    let ex_y = transverse_gain(Component::X, Axis::Y, 0.0, &spec)?;
    let ex_quad = quadrature_gain(Component::X, Vec3::default(), &spec)?;
    let ez_axial = axial_gain(Component::Z, 0.0, &spec);
    let ez_x = transverse_gain(Component::Z, Axis::X, 0.0, &spec)?;
    let e1 = rel(ex_y, ex_axial);
    let e2 = rel(ex_quad, ex_axial);
    let e3 = rel(ez_x, ez_axial);
    Ok((
        e1 <= ORIGIN_REL_TOL && e2 <= ORIGIN_REL_TOL && e3 <= ORIGIN_EXACT_REL_TOL,
        format!(
            "Ex at origin: axial {ex_axial:.10}, y-limit {ex_y:.10} ({e1:.1e}), oracle {ex_quad:.10} ({e2:.1e}); Ez: axial {ez_axial:.12} vs x-form {ez_x:.12} ({e3:.1e})"
        ),
    ))
}

/// Every output kind plus the cheap criteria, rendered to text.
fn determinism_workload() -> Result<Vec<String>, RunError> {
    let arr = reference(101)?;
    let (l, r) = (arr.wavelength(), arr.radius());
    let mut out = Vec::new();
    let axial = SweepLine::new(Axis::Z, -30.0 * l, 30.0 * l, 101)?;
    out.push(gain_sweep_csv(
        &arr,
        &axial,
        Normalization::Continuum,
        None,
        true,
    )?);
    let radial = SweepLine::new(Axis::X, -1.5 * r, 1.5 * r, 64)?;
    out.push(gain_sweep_csv(
        &arr,
        &radial,
        Normalization::Raw,
        Some(Component::X),
        true,
    )?);
    let offs = linspace(-l, l, 41);
    out.push(beam_profile_csv(
        &arr,
        Component::X,
        Direction::WidthY,
        Source::Numeric,
        true,
        &offs,
    )?);
    let grid = MapGrid {
        plane: Plane::Xz,
        offset: 0.0,
        u: GridAxis {
            min: -2.0 * l,
            max: 2.0 * l,
            count: 21,
        },
        v: GridAxis {
            min: -2.0 * l,
            max: 2.0 * l,
            count: 21,
        },
    };
    out.push(field_map_csv(
        &arr,
        Vec3::default(),
        Component::Z,
        &grid,
        Normalization::Continuum,
    )?);
    let opts = ReportOptions {
        extent_lambda: 1.5,
        step_lambda: 0.01,
        tol_lambda: 1e-6,
    };
    out.push(resolution_json(
        &arr,
        Component::X,
        Direction::Depth,
        Source::Numeric,
        &opts,
    )?);
    for id in [5, 9] {
        out.push(run(id).expect("known criterion").line());
    }
    Ok(out)
}

fn determinism() -> Result<(bool, String), RunError> {
    let mut runs = Vec::new();
    for threads in DETERMINISM_THREADS {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .expect("thread pool");
        for _ in 0..2 {
            runs.push(pool.install(determinism_workload)?);
        }
    }
    let bytes: usize = runs[0].iter().map(String::len).sum();
    let identical = runs.iter().all(|r| r == &runs[0]);
    Ok((
        identical,
        format!(
            "{} outputs ({bytes} bytes) from {} runs on 1, 4 and 8 threads are {}",
            runs[0].len(),
            runs.len(),
            if identical {
                "byte-identical"
            } else {
                "NOT identical"
            }
        ),
    ))
}
