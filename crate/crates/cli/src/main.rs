//! `cylfocus`: focal gain sweeps, beam profiles, field maps, resolution
//! reports and the validation suite for cylindrical dipole arrays.
//!
//! Exit codes: 0 success, 1 validation failures, 2 configuration or usage
//! error, 3 numeric failure.

use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use cylfocus::analytic::Direction;
use cylfocus::array::{build_array, ArrayConfig, Axis, ElementSet, Vec3};
use cylfocus::field::{linspace, Component, GridAxis, MapGrid, Normalization, Plane, SweepLine};
use cylfocus::io::parse_config;
use cylfocus::report::{
    beam_profile_csv, field_map_csv, gain_sweep_csv, resolution_json, RunError,
};
use cylfocus::resolution::{ReportOptions, Source};
use cylfocus::validation;
use thiserror::Error;

#[derive(Debug, Error)]
enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Run(#[from] RunError),
    #[error("cannot write {path}: {source}")]
    Output {
        path: PathBuf,
        source: std::io::Error,
    },
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) | CliError::Output { .. } => 2,
            CliError::Run(e) if e.is_usage() => 2,
            CliError::Run(_) => 3,
        }
    }
}

#[derive(Parser)]
#[command(
    name = "cylfocus",
    version,
    about = "Near-field focusing of cylindrical dipole arrays"
)]
struct Cli {
    /// Flat JSON array configuration; defaults to λ = 0.05 m, R = 20λ,
    /// d = λ/2 and 401 rings.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Worker threads (results do not depend on this).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Output file; standard output when absent.
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Focal gains for foci along the array axis.
    AxialGain(SweepArgs),
    /// Focal gains for foci displaced from the axis in the z = 0 plane.
    TransverseGain {
        #[arg(long, value_enum, default_value = "x")]
        axis: TransverseAxis,
        #[command(flatten)]
        sweep: SweepArgs,
    },
    /// Beam profile around a focus at the origin.
    BeamProfile {
        #[command(flatten)]
        profile: ProfileArgs,
        /// Offsets in λ as start:stop:count.
        #[arg(long, allow_hyphen_values = true)]
        range: Range,
        /// Double the nonzero-offset branches of the Ex formulas so they
        /// are continuous at the peak.
        #[arg(long)]
        calibrated: bool,
    },
    /// Field magnitudes on a plane.
    FieldMap {
        #[arg(long, value_enum, default_value = "xz")]
        plane: PlaneArg,
        /// First in-plane coordinate in λ as min:max:count.
        #[arg(long, allow_hyphen_values = true)]
        u: Range,
        /// Second in-plane coordinate in λ as min:max:count.
        #[arg(long, allow_hyphen_values = true)]
        v: Range,
        /// Plane position along its normal, in λ.
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        plane_offset: f64,
        /// Focus in λ as x:y:z.
        #[arg(long, default_value = "0:0:0", allow_hyphen_values = true)]
        focus: Point,
        /// Component whose focal magnitude the weights maximize.
        #[arg(long, value_enum, default_value = "z")]
        weighting: ComponentArg,
        #[arg(long, value_enum, default_value = "raw")]
        normalization: NormalizationArg,
    },
    /// Peak, 3-dB width and sidelobes of a beam profile.
    Resolution {
        #[command(flatten)]
        profile: ProfileArgs,
        /// Half-width of the sampled window, in λ.
        #[arg(long, default_value_t = 3.0)]
        extent: f64,
        /// Sampling step, in λ.
        #[arg(long, default_value_t = 0.005)]
        step: f64,
    },
    /// Run the acceptance checks and print one PASS/FAIL line each.
    Validate {
        /// Comma-separated criterion ids; all when absent.
        #[arg(long, value_delimiter = ',')]
        criteria: Vec<u8>,
    },
}

#[derive(Args)]
struct SweepArgs {
    /// Component of interest, recorded in the metadata; all three gains
    /// are always written.
    #[arg(long, value_enum)]
    component: Option<ComponentArg>,
    /// Focal offsets in λ as start:stop:count.
    #[arg(long, allow_hyphen_values = true)]
    range: Range,
    #[arg(long, value_enum, default_value = "raw")]
    normalization: NormalizationArg,
    /// Add closed-form gx and gz columns.
    #[arg(long)]
    analytic: bool,
}

#[derive(Args)]
struct ProfileArgs {
    #[arg(long, value_enum)]
    component: ComponentArg,
    #[arg(long, value_enum)]
    direction: DirectionArg,
    #[arg(long, value_enum, default_value = "analytic")]
    source: SourceArg,
}

#[derive(Clone, Copy, ValueEnum)]
enum ComponentArg {
    X,
    Y,
    Z,
}

impl From<ComponentArg> for Component {
    fn from(c: ComponentArg) -> Self {
        match c {
            ComponentArg::X => Component::X,
            ComponentArg::Y => Component::Y,
            ComponentArg::Z => Component::Z,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum TransverseAxis {
    X,
    Y,
}

#[derive(Clone, Copy, ValueEnum)]
enum DirectionArg {
    Depth,
    #[value(name = "width_x", alias = "width-x")]
    WidthX,
    #[value(name = "width_y", alias = "width-y")]
    WidthY,
}

impl From<DirectionArg> for Direction {
    fn from(d: DirectionArg) -> Self {
        match d {
            DirectionArg::Depth => Direction::Depth,
            DirectionArg::WidthX => Direction::WidthX,
            DirectionArg::WidthY => Direction::WidthY,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum SourceArg {
    Numeric,
    Analytic,
    Quadrature,
}

impl From<SourceArg> for Source {
    fn from(s: SourceArg) -> Self {
        match s {
            SourceArg::Numeric => Source::Numeric,
            SourceArg::Analytic => Source::Analytic,
            SourceArg::Quadrature => Source::Quadrature,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum NormalizationArg {
    Raw,
    Continuum,
}

impl From<NormalizationArg> for Normalization {
    fn from(n: NormalizationArg) -> Self {
        match n {
            NormalizationArg::Raw => Normalization::Raw,
            NormalizationArg::Continuum => Normalization::Continuum,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum PlaneArg {
    Xy,
    Xz,
    Yz,
}

impl From<PlaneArg> for Plane {
    fn from(p: PlaneArg) -> Self {
        match p {
            PlaneArg::Xy => Plane::Xy,
            PlaneArg::Xz => Plane::Xz,
            PlaneArg::Yz => Plane::Yz,
        }
    }
}

/// `start:stop:count`, in wavelengths.
#[derive(Clone, Copy, Debug)]
struct Range {
    start: f64,
    stop: f64,
    count: usize,
}

impl FromStr for Range {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parts: Vec<&str> = s.split(':').collect();
        let [a, b, n] = parts[..] else {
            return Err(format!("expected start:stop:count, got `{s}`"));
        };
        let num = |t: &str| {
            t.trim()
                .parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| format!("`{t}` is not a finite number"))
        };
        let count = n
            .trim()
            .parse::<usize>()
            .map_err(|_| format!("`{n}` is not a sample count"))?;
        Ok(Range {
            start: num(a)?,
            stop: num(b)?,
            count,
        })
    }
}

/// `x:y:z`, in wavelengths.
#[derive(Clone, Copy, Debug)]
struct Point([f64; 3]);

impl FromStr for Point {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let v: Vec<f64> = s
            .split(':')
            .map(|t| {
                t.trim()
                    .parse::<f64>()
                    .map_err(|_| format!("`{t}` is not a number"))
            })
            .collect::<Result<_, _>>()?;
        match v[..] {
            [x, y, z] if v.iter().all(|c| c.is_finite()) => Ok(Point([x, y, z])),
            _ => Err(format!("expected x:y:z, got `{s}`")),
        }
    }
}

fn load_array(path: Option<&PathBuf>) -> Result<ElementSet, CliError> {
    let config = match path {
        None => ArrayConfig::reference(validation::REFERENCE_RINGS),
        Some(p) => {
            let text = fs::read_to_string(p)
                .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", p.display())))?;
            parse_config(&text).map_err(RunError::from)?
        }
    };
    Ok(build_array(&config).map_err(RunError::from)?)
}

fn sweep_line(axis: Axis, range: Range, lambda: f64) -> Result<SweepLine, CliError> {
    Ok(
        SweepLine::new(axis, range.start * lambda, range.stop * lambda, range.count)
            .map_err(RunError::from)?,
    )
}

fn grid_axis(range: Range, lambda: f64) -> GridAxis {
    GridAxis {
        min: range.start * lambda,
        max: range.stop * lambda,
        count: range.count,
    }
}

/// Runs a subcommand and returns its text output and whether it succeeded.
fn execute(cli: &Cli) -> Result<(String, bool), CliError> {
    if let Command::Validate { criteria } = &cli.command {
        let ids: Vec<u8> = if criteria.is_empty() {
            validation::CRITERIA.iter().map(|c| c.0).collect()
        } else {
            criteria.clone()
        };
        let mut text = String::new();
        let mut all = true;
        for id in ids {
            let outcome = validation::run(id)
                .ok_or_else(|| CliError::Usage(format!("unknown criterion {id}")))?;
            all &= outcome.passed;
            text.push_str(&outcome.line());
            text.push('\n');
        }
        return Ok((text, all));
    }
    let arr = load_array(cli.config.as_ref())?;
    let lambda = arr.wavelength();
    let text = match &cli.command {
        Command::AxialGain(s) => gain_sweep_csv(
            &arr,
            &sweep_line(Axis::Z, s.range, lambda)?,
            s.normalization.into(),
            s.component.map(Into::into),
            s.analytic,
        )?,
        Command::TransverseGain { axis, sweep: s } => {
            let axis = match axis {
                TransverseAxis::X => Axis::X,
                TransverseAxis::Y => Axis::Y,
            };
            gain_sweep_csv(
                &arr,
                &sweep_line(axis, s.range, lambda)?,
                s.normalization.into(),
                s.component.map(Into::into),
                s.analytic,
            )?
        }
        Command::BeamProfile {
            profile,
            range,
            calibrated,
        } => {
            // same validation as the gain sweeps
            let line = sweep_line(profile_axis(profile), *range, lambda)?;
            beam_profile_csv(
                &arr,
                profile.component.into(),
                profile.direction.into(),
                profile.source.into(),
                *calibrated,
                &linspace(line.start, line.stop, line.count),
            )?
        }
        Command::FieldMap {
            plane,
            u,
            v,
            plane_offset,
            focus,
            weighting,
            normalization,
        } => {
            let [x, y, z] = focus.0;
            let grid = MapGrid {
                plane: (*plane).into(),
                offset: plane_offset * lambda,
                u: grid_axis(*u, lambda),
                v: grid_axis(*v, lambda),
            };
            field_map_csv(
                &arr,
                Vec3::new(x, y, z) * lambda,
                (*weighting).into(),
                &grid,
                (*normalization).into(),
            )?
        }
        Command::Resolution {
            profile,
            extent,
            step,
        } => {
            if !(extent.is_finite() && step.is_finite() && *step > 0.0 && extent > step) {
                return Err(CliError::Usage("need 0 < step < extent".into()));
            }
            let options = ReportOptions {
                extent_lambda: *extent,
                step_lambda: *step,
                ..ReportOptions::default()
            };
            resolution_json(
                &arr,
                profile.component.into(),
                profile.direction.into(),
                profile.source.into(),
                &options,
            )?
        }
        Command::Validate { .. } => unreachable!("handled above"),
    };
    Ok((text, true))
}

fn profile_axis(profile: &ProfileArgs) -> Axis {
    Direction::from(profile.direction).axis()
}

fn emit(cli: &Cli, text: &str) -> Result<(), CliError> {
    match &cli.output {
        Some(path) => fs::write(path, text).map_err(|source| CliError::Output {
            path: path.clone(),
            source,
        }),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())
                .and_then(|_| out.flush())
                .map_err(|source| CliError::Output {
                    path: "<stdout>".into(),
                    source,
                })
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if n == 0 {
            eprintln!("error: --threads must be >= 1");
            return ExitCode::from(2);
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
        {
            eprintln!("error: cannot start thread pool: {e}");
            return ExitCode::from(2);
        }
    }
    let result = execute(&cli).and_then(|(text, ok)| emit(&cli, &text).map(|_| ok));
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
