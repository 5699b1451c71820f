//! The run configuration file.
//!
//! Line-oriented `key = value`; `#` starts a comment; blank lines are
//! ignored; keys live in one flat namespace and each may appear once.
//! Every key is optional. Defaults:
//!
//! | key              | default            | meaning                                         |
//! |------------------|--------------------|-------------------------------------------------|
//! | `mode`           | `flow2d`           | minimize, flow2d, check, ellipticity, bubble-probe |
//! | `ndim`           | `2`                | grid dimension (2 or 3)                         |
//! | `cells`          | `64`               | cells per axis                                  |
//! | `length`         | `6.283185307179586`| domain edge length                              |
//! | `boundary`       | `periodic`         | periodic or dirichlet (all axes)                |
//! | `k1` .. `k12`    | 1 (k1-k6), 0 (k7-k12) | Frank constants                              |
//! | `nu`             | `1.0`              | viscosity                                       |
//! | `dt`             | `0.001`            | time step                                       |
//! | `horizon`        | `0.5`              | final time                                      |
//! | `retract`        | `true`             | retract directors after each step               |
//! | `seed`           | `0`                | seed of randomised recipes                      |
//! | `recipe`         | `constant`         | initial / boundary data recipe                  |
//! | `amplitude`      | `1.0`              | recipe amplitude                                |
//! | `wavenumber`     | `1.0`              | recipe wavenumber                               |
//! | `width`          | `0.25`             | recipe length scale                             |
//! | `out_dir`        | `out`              | output directory                                |
//! | `snapshot_every` | `100`              | steps between snapshots (0: final only)         |
//! | `eps0_sq`        | `0.05`             | scaled-energy flag threshold                    |
//! | `c0`             | `25.132741228718345` (8 pi) | concentration threshold (placeholder)  |
//! | `scan_radii`     | empty              | comma list; empty means `2h, 4h` (up to L/2)    |
//! | `tau`            | `auto`             | minimizer step; auto is `h^2 / (12 max k)`      |
//! | `max_iter`       | `10000`            | minimizer iteration cap                         |
//! | `tol`            | `1e-6`             | minimizer projected-gradient tolerance          |
//! | `probe_widths`   | `0.4, 0.2, 0.1`    | bubble-probe core widths                        |

use std::fmt::Write as _;

use super::recipes::Recipe;
use crate::energy::FrankConstants;
use crate::error::{Error, Result};
use crate::grid::{Boundary, GridSpec};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    Minimize,
    Flow2d,
    Check,
    Ellipticity,
    BubbleProbe,
}

impl Mode {
    pub const ALL: [Mode; 5] = [
        Mode::Minimize,
        Mode::Flow2d,
        Mode::Check,
        Mode::Ellipticity,
        Mode::BubbleProbe,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Mode::Minimize => "minimize",
            Mode::Flow2d => "flow2d",
            Mode::Check => "check",
            Mode::Ellipticity => "ellipticity",
            Mode::BubbleProbe => "bubble-probe",
        }
    }

    pub fn parse(s: &str) -> Option<Mode> {
        Mode::ALL.into_iter().find(|m| m.as_str() == s)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub mode: Mode,
    pub ndim: usize,
    pub cells: usize,
    pub length: f64,
    pub boundary: Boundary,
    pub k: FrankConstants,
    pub nu: f64,
    pub dt: f64,
    pub horizon: f64,
    pub retract: bool,
    pub seed: u64,
    pub recipe: Recipe,
    pub amplitude: f64,
    pub wavenumber: f64,
    pub width: f64,
    pub out_dir: String,
    pub snapshot_every: usize,
    pub eps0_sq: f64,
    pub c0: f64,
    pub scan_radii: Vec<f64>,
    pub tau: Option<f64>,
    pub max_iter: usize,
    pub tol: f64,
    pub probe_widths: Vec<f64>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            mode: Mode::Flow2d,
            ndim: 2,
            cells: 64,
            length: 2.0 * std::f64::consts::PI,
            boundary: Boundary::Periodic,
            k: FrankConstants::one_constant(),
            nu: 1.0,
            dt: 1e-3,
            horizon: 0.5,
            retract: true,
            seed: 0,
            recipe: Recipe::Constant,
            amplitude: 1.0,
            wavenumber: 1.0,
            width: 0.25,
            out_dir: "out".into(),
            snapshot_every: 100,
            eps0_sq: 0.05,
            c0: 8.0 * std::f64::consts::PI,
            scan_radii: Vec::new(),
            tau: None,
            max_iter: 10_000,
            tol: 1e-6,
            probe_widths: vec![0.4, 0.2, 0.1],
        }
    }
}

fn invalid(field: &str, msg: impl Into<String>) -> Error {
    Error::Validation {
        field: field.into(),
        msg: msg.into(),
    }
}

impl RunConfig {
    pub fn grid(&self) -> Result<GridSpec> {
        GridSpec::uniform(self.ndim, self.cells, self.length, self.boundary)
    }

    /// Scan radii with the empty list expanded to `2h, 4h`.
    pub fn radii(&self) -> Vec<f64> {
        if self.scan_radii.is_empty() {
            let h = self.length / self.cells as f64;
            [2.0 * h, 4.0 * h]
                .into_iter()
                .filter(|&r| r <= 0.5 * self.length)
                .collect()
        } else {
            self.scan_radii.clone()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(2..=3).contains(&self.ndim) {
            return Err(invalid("ndim", format!("{} must be 2 or 3", self.ndim)));
        }
        if self.cells < 4 {
            return Err(invalid("cells", format!("{} must be >= 4", self.cells)));
        }
        let positive = [
            ("length", self.length),
            ("nu", self.nu),
            ("dt", self.dt),
            ("eps0_sq", self.eps0_sq),
            ("c0", self.c0),
            ("tol", self.tol),
            ("width", self.width),
        ];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(invalid(name, format!("{v} must be > 0")));
            }
        }
        if !(self.horizon >= 0.0 && self.horizon.is_finite()) {
            return Err(invalid("horizon", format!("{} must be >= 0", self.horizon)));
        }
        for (name, v) in [("amplitude", self.amplitude), ("wavenumber", self.wavenumber)] {
            if !v.is_finite() {
                return Err(invalid(name, format!("{v} must be finite")));
            }
        }
        if let Some(t) = self.tau {
            if !(t > 0.0 && t.is_finite()) {
                return Err(invalid("tau", format!("{t} must be > 0")));
            }
        }
        let h = self.length / self.cells as f64;
        for &r in &self.scan_radii {
            if !(r >= 2.0 * h * (1.0 - 1e-12) && r <= 0.5 * self.length) {
                return Err(invalid(
                    "scan_radii",
                    format!("{r} outside [2h, length/2] with h = {h}"),
                ));
            }
        }
        for &w in &self.probe_widths {
            if !(w > 0.0 && w.is_finite()) {
                return Err(invalid("probe_widths", format!("{w} must be > 0")));
            }
        }
        if self.out_dir.is_empty() || self.out_dir.contains(['#', '\n', '\r']) || self.out_dir.trim() != self.out_dir {
            return Err(invalid(
                "out_dir",
                format!("{:?} is not a representable path", self.out_dir),
            ));
        }
        match self.mode {
            Mode::Minimize if self.ndim != 3 || self.boundary != Boundary::Dirichlet => {
                Err(invalid("mode", "minimize needs ndim = 3 and boundary = dirichlet"))
            }
            Mode::Flow2d | Mode::BubbleProbe if self.ndim != 2 => {
                Err(invalid("mode", format!("{} needs ndim = 2", self.mode.as_str())))
            }
            _ => Ok(()),
        }
    }

    /// Canonical text: every key, in the documented order, no comments.
    pub fn to_text(&self) -> String {
        let list = |v: &[f64]| v.iter().map(|x| format!("{x:?}")).collect::<Vec<_>>().join(", ");
        let mut s = String::new();
        let mut put = |k: &str, v: String| {
            let _ = writeln!(s, "{k} = {v}");
        };
        put("mode", self.mode.as_str().into());
        put("ndim", self.ndim.to_string());
        put("cells", self.cells.to_string());
        put("length", format!("{:?}", self.length));
        put("boundary", self.boundary.as_str().into());
        for i in 1..=12 {
            put(&format!("k{i}"), format!("{:?}", self.k.k(i)));
        }
        put("nu", format!("{:?}", self.nu));
        put("dt", format!("{:?}", self.dt));
        put("horizon", format!("{:?}", self.horizon));
        put("retract", self.retract.to_string());
        put("seed", self.seed.to_string());
        put("recipe", self.recipe.as_str().into());
        put("amplitude", format!("{:?}", self.amplitude));
        put("wavenumber", format!("{:?}", self.wavenumber));
        put("width", format!("{:?}", self.width));
        put("out_dir", self.out_dir.clone());
        put("snapshot_every", self.snapshot_every.to_string());
        put("eps0_sq", format!("{:?}", self.eps0_sq));
        put("c0", format!("{:?}", self.c0));
        put("scan_radii", list(&self.scan_radii));
        put("tau", self.tau.map_or("auto".into(), |t| format!("{t:?}")));
        put("max_iter", self.max_iter.to_string());
        put("tol", format!("{:?}", self.tol));
        put("probe_widths", list(&self.probe_widths));
        s
    }
}

fn parse_err(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse { line, msg: msg.into() }
}

fn num<T: std::str::FromStr>(line: usize, key: &str, v: &str) -> Result<T> {
    v.parse()
        .map_err(|_| parse_err(line, format!("{key}: cannot parse {v:?}")))
}

fn list(line: usize, key: &str, v: &str) -> Result<Vec<f64>> {
    if v.is_empty() {
        return Ok(Vec::new());
    }
    v.split(',').map(|x| num(line, key, x.trim())).collect()
}

/// Parse and validate a configuration file.
pub fn parse_config(text: &str) -> Result<RunConfig> {
    let c = parse_config_unvalidated(text)?;
    c.validate()?;
    Ok(c)
}

/// Parse without the cross-field checks of [`RunConfig::validate`], so
/// callers can apply overrides (mode, seed, output directory) first.
pub fn parse_config_unvalidated(text: &str) -> Result<RunConfig> {
    let mut c = RunConfig::default();
    let mut k = *c.k.as_array();
    let mut seen: Vec<String> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let (key, value) = content
            .split_once('=')
            .ok_or_else(|| parse_err(line, format!("expected `key = value`, got {content:?}")))?;
        let (key, v) = (key.trim(), value.trim());
        if seen.iter().any(|s| s == key) {
            return Err(parse_err(line, format!("duplicate key {key}")));
        }
        seen.push(key.to_string());
        match key {
            "mode" => c.mode = Mode::parse(v).ok_or_else(|| parse_err(line, format!("unknown mode {v:?}")))?,
            "ndim" => c.ndim = num(line, key, v)?,
            "cells" => c.cells = num(line, key, v)?,
            "length" => c.length = num(line, key, v)?,
            "boundary" => {
                c.boundary = match v {
                    "periodic" => Boundary::Periodic,
                    "dirichlet" => Boundary::Dirichlet,
                    _ => return Err(parse_err(line, format!("unknown boundary {v:?}"))),
                }
            }
            "nu" => c.nu = num(line, key, v)?,
            "dt" => c.dt = num(line, key, v)?,
            "horizon" => c.horizon = num(line, key, v)?,
            "retract" => c.retract = num(line, key, v)?,
            "seed" => c.seed = num(line, key, v)?,
            "recipe" => c.recipe = Recipe::parse(v)?,
            "amplitude" => c.amplitude = num(line, key, v)?,
            "wavenumber" => c.wavenumber = num(line, key, v)?,
            "width" => c.width = num(line, key, v)?,
            "out_dir" => c.out_dir = v.to_string(),
            "snapshot_every" => c.snapshot_every = num(line, key, v)?,
            "eps0_sq" => c.eps0_sq = num(line, key, v)?,
            "c0" => c.c0 = num(line, key, v)?,
            "scan_radii" => c.scan_radii = list(line, key, v)?,
            "tau" => c.tau = if v == "auto" { None } else { Some(num(line, key, v)?) },
            "max_iter" => c.max_iter = num(line, key, v)?,
            "tol" => c.tol = num(line, key, v)?,
            "probe_widths" => c.probe_widths = list(line, key, v)?,
            _ => match key.strip_prefix('k').and_then(|d| d.parse::<usize>().ok()) {
                Some(j) if (1..=12).contains(&j) && key == format!("k{j}") => k[j - 1] = num(line, key, v)?,
                _ => return Err(parse_err(line, format!("unknown key {key:?}"))),
            },
        }
    }
    c.k = FrankConstants::new(k)?;
    Ok(c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn minimal_file_takes_defaults() {
        let c = parse_config("mode = flow2d\nnu = 1.0\n").unwrap();
        assert_eq!(c, RunConfig::default());
    }

    #[test]
    fn comments_and_blank_lines_are_ignored() {
        let c = parse_config("# header\n\n  dt = 5e-4   # smaller step\nrecipe = taylor-green\n").unwrap();
        assert_eq!(c.dt, 5e-4);
        assert_eq!(c.recipe, Recipe::TaylorGreen);
    }

    #[test]
    fn negative_frank_constant_names_the_field() {
        match parse_config("k1 = -1") {
            Err(Error::Validation { field, .. }) => assert_eq!(field, "k1"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn unknown_key_reports_its_line() {
        match parse_config("nu = 1\n\nviscosity = 2\n") {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("{other:?}"),
        }
        assert!(matches!(parse_config("k13 = 1"), Err(Error::Parse { line: 1, .. })));
        assert!(matches!(parse_config("k01 = 1"), Err(Error::Parse { line: 1, .. })));
    }

    #[test]
    fn syntax_errors() {
        assert!(matches!(parse_config("nu 1"), Err(Error::Parse { line: 1, .. })));
        assert!(matches!(parse_config("nu = fast"), Err(Error::Parse { line: 1, .. })));
        assert!(matches!(
            parse_config("nu = 1\nnu = 2"),
            Err(Error::Parse { line: 2, .. })
        ));
        assert!(matches!(parse_config("recipe = spiral"), Err(Error::UnknownRecipe(_))));
    }

    #[test]
    fn semantic_errors_name_fields() {
        let field = |text: &str| match parse_config(text) {
            Err(Error::Validation { field, .. }) => field,
            other => panic!("{other:?}"),
        };
        assert_eq!(field("nu = 0"), "nu");
        assert_eq!(field("dt = -1e-3"), "dt");
        assert_eq!(field("cells = 2"), "cells");
        assert_eq!(field("mode = minimize"), "mode");
        assert_eq!(field("scan_radii = 0.01"), "scan_radii");
        assert_eq!(field("k9 = -0.5"), "k9");
    }

    #[test]
    fn canonical_text_is_a_fixed_point() {
        let text = RunConfig::default().to_text();
        assert_eq!(parse_config(&text).unwrap().to_text(), text);
    }

    fn arb_config() -> impl Strategy<Value = RunConfig> {
        (
            (
                prop::sample::select(vec![Mode::Flow2d, Mode::Check, Mode::Ellipticity, Mode::BubbleProbe]),
                4usize..200,
                0.1f64..100.0,
            ),
            (
                prop::array::uniform6(1e-3f64..10.0),
                prop::array::uniform6(0.0f64..10.0),
            ),
            (1e-3f64..10.0, 1e-6f64..1e-1, 0.0f64..10.0, any::<bool>(), any::<u64>()),
            (
                prop::sample::select(Recipe::ALL.to_vec()),
                -5.0f64..5.0,
                -5.0f64..5.0,
                1e-3f64..2.0,
            ),
            ("[a-z][a-z0-9_/]{0,12}", 0usize..1000, 1e-4f64..1.0, 1.0f64..100.0),
            (
                prop::collection::vec(0.0f64..1.0, 0..3),
                prop::option::of(1e-6f64..1.0),
                0usize..100_000,
                1e-12f64..1e-2,
            ),
            prop::collection::vec(1e-3f64..1.0, 0..4),
        )
            .prop_map(|(grid, (ka, kb), flow, recipe, out, scan, probe)| {
                let mut k = [0.0; 12];
                k[..6].copy_from_slice(&ka);
                k[6..].copy_from_slice(&kb);
                let h = grid.2 / grid.1 as f64;
                RunConfig {
                    mode: grid.0,
                    ndim: 2,
                    cells: grid.1,
                    length: grid.2,
                    boundary: Boundary::Periodic,
                    k: FrankConstants::new(k).unwrap(),
                    nu: flow.0,
                    dt: flow.1,
                    horizon: flow.2,
                    retract: flow.3,
                    seed: flow.4,
                    recipe: recipe.0,
                    amplitude: recipe.1,
                    wavenumber: recipe.2,
                    width: recipe.3,
                    out_dir: out.0,
                    snapshot_every: out.1,
                    eps0_sq: out.2,
                    c0: out.3,
                    scan_radii: scan
                        .0
                        .iter()
                        .map(|f| 2.0 * h + f * (0.5 * grid.2 - 2.0 * h).max(0.0))
                        .collect(),
                    tau: scan.1,
                    max_iter: scan.2,
                    tol: scan.3,
                    probe_widths: probe,
                }
            })
    }

    proptest! {
        #[test]
        fn write_parse_round_trip(c in arb_config()) {
            prop_assume!(c.validate().is_ok());
            let text = c.to_text();
            let back = parse_config(&text).unwrap();
            prop_assert_eq!(&back, &c);
            prop_assert_eq!(back.to_text(), text);
        }
    }
}
