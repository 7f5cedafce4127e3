//! Configuration parsing and deterministic text output (CSV and JSON).
//!
//! The configuration is a flat JSON object:
//!
//! | key | meaning |
//! |---|---|
//! | `wavelength_m` or `frequency_hz` | exactly one is required |
//! | `radius_lambda` or `radius_m` | exactly one is required |
//! | `ring_spacing_lambda` or `ring_spacing_m` | default 0.5 λ |
//! | `num_rings` | positive integer |
//! | `elements_per_ring` | integer ≥ 3 or `"auto"` (default) |
//! | `e0_v_per_m` | default 1.0 |
//!
//! Unknown keys are rejected.

use serde_json::{json, Map, Value};
use thiserror::Error;

use crate::array::{ArrayConfig, ConfigError, ElementSet, ElementsPerRing, Length};
use crate::field::Normalization;
use crate::resolution::ResolutionReport;

#[derive(Debug, Error)]
pub enum IoError {
    #[error("config parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("unknown config key `{0}`")]
    UnknownKey(String),
    #[error("invalid config field `{}`: {}", .0.field, .0.constraint)]
    Config(#[from] ConfigError),
    #[error("inconsistent columns: {0}")]
    Columns(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

const KEYS: [&str; 9] = [
    "wavelength_m",
    "frequency_hz",
    "radius_lambda",
    "radius_m",
    "ring_spacing_lambda",
    "ring_spacing_m",
    "num_rings",
    "elements_per_ring",
    "e0_v_per_m",
];

fn number(obj: &Map<String, Value>, key: &'static str) -> Result<Option<f64>, ConfigError> {
    match obj.get(key) {
        None => Ok(None),
        Some(v) => v
            .as_f64()
            .filter(|x| x.is_finite())
            .map(Some)
            .ok_or_else(|| ConfigError::new(key, "must be a number")),
    }
}

fn length(
    obj: &Map<String, Value>,
    lambda_key: &'static str,
    meters_key: &'static str,
) -> Result<Option<Length>, ConfigError> {
    match (number(obj, lambda_key)?, number(obj, meters_key)?) {
        (Some(_), Some(_)) => Err(ConfigError::new(
            lambda_key,
            format!("{lambda_key} and {meters_key} are mutually exclusive"),
        )),
        (Some(v), None) => Ok(Some(Length::Wavelengths(v))),
        (None, Some(v)) => Ok(Some(Length::Meters(v))),
        (None, None) => Ok(None),
    }
}

/// Parses and validates a configuration, applying defaults.
pub fn parse_config(text: &str) -> Result<ArrayConfig, IoError> {
    let value: Value = serde_json::from_str(text).map_err(|e| IoError::Parse {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    let Value::Object(obj) = value else {
        return Err(ConfigError::new("config", "must be a JSON object").into());
    };
    if let Some(key) = obj.keys().find(|k| !KEYS.contains(&k.as_str())) {
        return Err(IoError::UnknownKey(key.clone()));
    }
    let radius = length(&obj, "radius_lambda", "radius_m")?.ok_or_else(|| {
        ConfigError::new("radius_lambda", "radius_lambda or radius_m is required")
    })?;
    let ring_spacing =
        length(&obj, "ring_spacing_lambda", "ring_spacing_m")?.unwrap_or(Length::Wavelengths(0.5));
    let num_rings = match obj.get("num_rings") {
        None => return Err(ConfigError::new("num_rings", "is required").into()),
        Some(v) => v
            .as_u64()
            .and_then(|n| usize::try_from(n).ok())
            .ok_or_else(|| ConfigError::new("num_rings", "must be a positive integer"))?,
    };
    let elements_per_ring = match obj.get("elements_per_ring") {
        None => ElementsPerRing::Auto,
        Some(Value::String(s)) if s == "auto" => ElementsPerRing::Auto,
        Some(v) => ElementsPerRing::Fixed(
            v.as_u64()
                .and_then(|n| usize::try_from(n).ok())
                .ok_or_else(|| {
                    ConfigError::new("elements_per_ring", "must be an integer or \"auto\"")
                })?,
        ),
    };
    let config = ArrayConfig {
        wavelength_m: number(&obj, "wavelength_m")?,
        frequency_hz: number(&obj, "frequency_hz")?,
        radius,
        ring_spacing,
        num_rings,
        elements_per_ring,
        e0: number(&obj, "e0_v_per_m")?.unwrap_or(1.0),
    };
    config.resolve()?;
    Ok(config)
}

/// Serializes a configuration so that `parse_config` reproduces it exactly.
pub fn config_to_json(config: &ArrayConfig) -> String {
    let mut obj = Map::new();
    if let Some(w) = config.wavelength_m {
        obj.insert("wavelength_m".into(), json!(w));
    }
    if let Some(f) = config.frequency_hz {
        obj.insert("frequency_hz".into(), json!(f));
    }
    let mut put_length = |len: Length, lambda_key: &str, meters_key: &str| match len {
        Length::Wavelengths(v) => obj.insert(lambda_key.into(), json!(v)),
        Length::Meters(v) => obj.insert(meters_key.into(), json!(v)),
    };
    put_length(config.radius, "radius_lambda", "radius_m");
    put_length(config.ring_spacing, "ring_spacing_lambda", "ring_spacing_m");
    obj.insert("num_rings".into(), json!(config.num_rings));
    obj.insert(
        "elements_per_ring".into(),
        match config.elements_per_ring {
            ElementsPerRing::Auto => json!("auto"),
            ElementsPerRing::Fixed(n) => json!(n),
        },
    );
    obj.insert("e0_v_per_m".into(), json!(config.e0));
    let mut text = serde_json::to_string_pretty(&Value::Object(obj)).expect("plain JSON values");
    text.push('\n');
    text
}

/// C-style `%.9g`: 9 significant digits, trailing zeros removed, exponent
/// form below 1e−4 and from 1e9 upward.
pub fn format_g9(x: f64) -> String {
    const PRECISION: i32 = 9;
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return if x.is_nan() {
            "nan".into()
        } else if x > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        };
    }
    let sci = format!("{:.*e}", (PRECISION - 1) as usize, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-4..PRECISION).contains(&exp) {
        let mantissa = trim_fraction(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{mantissa}e{sign}{:02}", exp.abs())
    } else {
        let decimals = (PRECISION - 1 - exp).max(0) as usize;
        trim_fraction(&format!("{x:.decimals$}")).to_string()
    }
}

fn trim_fraction(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// Renders a CSV: one `# key=value ...` metadata line, the header, then one
/// row per sample with every number in `%.9g` form.
pub fn render_csv(
    meta: &[(String, String)],
    header: &[&str],
    columns: &[&[f64]],
) -> Result<String, IoError> {
    if header.len() != columns.len() {
        return Err(IoError::Columns(format!(
            "{} header names for {} columns",
            header.len(),
            columns.len()
        )));
    }
    let rows = columns.first().map_or(0, |c| c.len());
    if columns.iter().any(|c| c.len() != rows) {
        return Err(IoError::Columns("columns differ in length".into()));
    }
    let mut out = String::from("#");
    for (k, v) in meta {
        out.push(' ');
        out.push_str(k);
        out.push('=');
        out.push_str(v);
    }
    out.push('\n');
    out.push_str(&header.join(","));
    out.push('\n');
    for i in 0..rows {
        for (j, col) in columns.iter().enumerate() {
            if j > 0 {
                out.push(',');
            }
            out.push_str(&format_g9(col[i]));
        }
        out.push('\n');
    }
    Ok(out)
}

/// Array metadata shared by every CSV: λ, R, L in meters, N, M and the
/// continuum scale C.
pub fn array_metadata(elements: &ElementSet) -> Vec<(String, String)> {
    vec![
        ("wavelength_m".into(), format_g9(elements.wavelength())),
        ("R".into(), format_g9(elements.radius())),
        ("L".into(), format_g9(elements.length())),
        ("N".into(), elements.elements_per_ring().to_string()),
        ("M".into(), elements.num_rings().to_string()),
        ("C".into(), format_g9(elements.continuum_scale())),
    ]
}

/// Metadata for gain sweeps, in the fixed order component, axis,
/// normalization, then the array block.
pub fn gain_metadata(
    component: &str,
    axis: &str,
    normalization: Normalization,
    elements: &ElementSet,
) -> Vec<(String, String)> {
    let mut meta = vec![
        ("component".into(), component.to_string()),
        ("axis".into(), axis.to_string()),
        ("normalization".into(), normalization.name().to_string()),
    ];
    meta.extend(array_metadata(elements));
    meta
}

/// Pretty JSON of a resolution report with widths in meters and λ.
pub fn report_to_json(report: &ResolutionReport) -> String {
    let lambda = report.wavelength;
    let lobes: Vec<Value> = report
        .sidelobes
        .iter()
        .map(|s| {
            json!({
                "offset_lambda": s.offset / lambda,
                "level_db": s.level_db,
            })
        })
        .collect();
    let value = json!({
        "component": report.component.name(),
        "direction": report.direction.name(),
        "source": report.source.name(),
        "wavelength_m": lambda,
        "peak_offset_lambda": report.peak_offset / lambda,
        "peak_value": report.peak_value,
        "boundary_peak": report.boundary_peak,
        "full_width_3db_m": report.full_width_3db,
        "full_width_3db_lambda": report.full_width_3db_lambda,
        "sidelobes": lobes,
    });
    let mut text = serde_json::to_string_pretty(&value).expect("plain JSON values");
    text.push('\n');
    text
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::array::build_array;
    use proptest::prelude::*;

    #[test]
    fn reference_config_parses() {
        let c =
            parse_config(r#"{"wavelength_m":0.05,"radius_lambda":20,"num_rings":401}"#).unwrap();
        assert_eq!(c, ArrayConfig::reference(401));
        let r = c.resolve().unwrap();
        assert_eq!(r.elements_per_ring, 251);
    }

    #[test]
    fn config_errors_name_the_field() {
        let err = parse_config("{}").unwrap_err();
        assert!(
            matches!(&err, IoError::Config(e) if e.field == "radius_lambda"),
            "{err}"
        );
        let err = parse_config(r#"{"radius_lambda":20,"num_rings":3}"#).unwrap_err();
        assert!(
            err.to_string().contains("wavelength_m or frequency_hz"),
            "{err}"
        );
        let err = parse_config(
            r#"{"wavelength_m":0.05,"frequency_hz":6e9,"radius_lambda":20,"num_rings":3}"#,
        )
        .unwrap_err();
        assert!(err.to_string().contains("mutually exclusive"), "{err}");
        let err = parse_config(r#"{"wavelength_m":0.05,"radius_lambda":20,"num_rings":2.5}"#)
            .unwrap_err();
        assert!(matches!(&err, IoError::Config(e) if e.field == "num_rings"));
        let err = parse_config(
            r#"{"wavelength_m":0.05,"radius_lambda":20,"num_rings":3,"elements_per_ring":"many"}"#,
        )
        .unwrap_err();
        assert!(matches!(&err, IoError::Config(e) if e.field == "elements_per_ring"));
        let err =
            parse_config(r#"{"wavelength_m":0.05,"radius_lambda":20,"radius_m":1,"num_rings":3}"#)
                .unwrap_err();
        assert!(err.to_string().contains("mutually exclusive"));
        let err =
            parse_config(r#"{"wavelength_m":-1,"radius_lambda":20,"num_rings":3}"#).unwrap_err();
        assert!(matches!(&err, IoError::Config(e) if e.field == "wavelength_m"));
        assert!(matches!(
            parse_config("[1]").unwrap_err(),
            IoError::Config(_)
        ));
    }

    #[test]
    fn unknown_keys_and_syntax_errors() {
        let err =
            parse_config(r#"{"wavelength_m":0.05,"radius_lambda":20,"num_rings":3,"rings":4}"#)
                .unwrap_err();
        assert!(matches!(&err, IoError::UnknownKey(k) if k == "rings"));
        let err =
            parse_config("{\n  \"wavelength_m\": 0.05,\n  \"radius_lambda\" 20\n}").unwrap_err();
        match err {
            IoError::Parse { line, column, .. } => assert_eq!((line, column), (3, 19)),
            e => panic!("{e}"),
        }
    }

    #[test]
    fn g9_matches_c_printf() {
        let cases = [
            (0.0, "0"),
            (1.0, "1"),
            (-2.5, "-2.5"),
            (12.566370614359172, "12.5663706"),
            (20079.999999464304, "20080"),
            (1e-5, "1e-05"),
            (1.234567891e-5, "1.23456789e-05"),
            (0.0001, "0.0001"),
            (123456789.0, "123456789"),
            (1234567890.0, "1.23456789e+09"),
            (0.1 + 0.2, "0.3"),
            (-0.0, "0"),
            (99999999.95, "100000000"),
            (999999999.5, "1e+09"),
        ];
        for (x, s) in cases {
            assert_eq!(format_g9(x), s, "{x}");
        }
    }

    #[test]
    fn csv_layout() {
        let arr = build_array(&ArrayConfig::reference(3)).unwrap();
        let meta = gain_metadata("z", "z", Normalization::Continuum, &arr);
        let text = render_csv(&meta, &["offset_lambda", "gz"], &[&[0.5], &[12.5]]).unwrap();
        let lines: Vec<&str> = text.split('\n').collect();
        assert_eq!(lines.len(), 4);
        assert_eq!(lines[3], "");
        assert_eq!(
            lines[0],
            "# component=z axis=z normalization=continuum wavelength_m=0.05 R=1 L=0.05 N=251 M=3 C=1597.91563"
        );
        assert_eq!(lines[1], "offset_lambda,gz");
        assert_eq!(lines[2], "0.5,12.5");
        assert!(render_csv(&meta, &["a"], &[&[1.0], &[2.0]]).is_err());
        assert!(render_csv(&meta, &["a", "b"], &[&[1.0], &[2.0, 3.0]]).is_err());
    }

    fn arb_config() -> impl Strategy<Value = ArrayConfig> {
        let len = |lo: f64, hi: f64| {
            prop_oneof![
                (lo..hi).prop_map(Length::Wavelengths),
                (lo..hi).prop_map(Length::Meters)
            ]
        };
        (
            any::<bool>(),
            1e-3f64..1.0,
            len(1.0, 50.0),
            len(0.1, 2.0),
            1usize..2000,
            prop_oneof![
                Just(ElementsPerRing::Auto),
                (3usize..500).prop_map(ElementsPerRing::Fixed)
            ],
            1e-3f64..1e3,
        )
            .prop_map(|(by_freq, w, radius, ring_spacing, num_rings, epr, e0)| {
                ArrayConfig {
                    wavelength_m: (!by_freq).then_some(w),
                    frequency_hz: by_freq.then_some(crate::array::SPEED_OF_LIGHT / w),
                    radius,
                    ring_spacing,
                    num_rings,
                    elements_per_ring: epr,
                    e0,
                }
            })
    }

    proptest! {
        #[test]
        fn config_round_trip(c in arb_config()) {
            let text = config_to_json(&c);
            prop_assert_eq!(parse_config(&text).unwrap(), c);
        }

        #[test]
        fn g9_round_trips_to_nine_digits(x in -1e12f64..1e12) {
            let s = format_g9(x);
            let back: f64 = s.parse().unwrap();
            prop_assert!((back - x).abs() <= 5e-9 * x.abs());
        }
    }
}
