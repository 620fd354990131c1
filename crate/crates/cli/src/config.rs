//! Run configuration: defaults, overridden by an optional key=value file,
//! overridden by command-line flags.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use sfflab::ensembles::{Beta, EntryKind, EntryLaw, InverseCdf, ParamLaw};
use sfflab::montecarlo::{MonoDesign, Parallelism};
use sfflab::spectral::TimeGrid;

use crate::error::CliError;

/// Subcommand being run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    SampleWigner,
    SampleMono,
    Strip,
    Predict,
    Verify,
    Figures,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::SampleWigner => "sample-wigner",
            Command::SampleMono => "sample-mono",
            Command::Strip => "strip",
            Command::Predict => "predict",
            Command::Verify => "verify",
            Command::Figures => "figures",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Spacing {
    Log,
    Linear,
}

/// Which sampling schemes a strip study runs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StripSelection {
    Wigner,
    Mono,
    Both,
}

/// Settings that may come from the config file or from flags; `None` means
/// not given at that level.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Overrides {
    pub n: Option<usize>,
    pub beta: Option<u32>,
    pub law: Option<String>,
    pub seed: Option<String>,
    pub t_min: Option<f64>,
    pub t_max: Option<f64>,
    pub points: Option<usize>,
    pub spacing: Option<String>,
    pub samples: Option<usize>,
    pub n_pairs: Option<usize>,
    pub n_params: Option<usize>,
    pub counts: Option<String>,
    pub param_law: Option<String>,
    pub design: Option<String>,
    pub strip_mode: Option<String>,
    pub quick: Option<bool>,
    pub out: Option<PathBuf>,
    pub workers: Option<usize>,
}

/// Fully resolved and validated configuration of one run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: Command,
    pub n: usize,
    pub beta: Beta,
    pub law: EntryKind,
    pub seed: u64,
    pub t_min: f64,
    pub t_max: f64,
    pub points: usize,
    pub spacing: Spacing,
    pub samples: usize,
    pub n_pairs: usize,
    pub n_params: usize,
    pub counts: Vec<usize>,
    /// Parameter law as written by the user, kept for the canonical form.
    pub param_law_spec: String,
    pub param_law: ParamLaw,
    pub design: MonoDesign,
    pub strip_mode: StripSelection,
    pub quick: bool,
    pub out: PathBuf,
    pub workers: usize,
}

pub const DEFAULT_SEED: u64 = 0x5ff1_ab00_2024;
pub const DEFAULT_POINTS: usize = 120;

const KEYS: [&str; 18] = [
    "n",
    "beta",
    "law",
    "seed",
    "t_min",
    "t_max",
    "points",
    "spacing",
    "samples",
    "n_pairs",
    "n_params",
    "counts",
    "param_law",
    "design",
    "strip_mode",
    "quick",
    "out",
    "workers",
];

/// Parse `key=value` pairs separated by newlines or whitespace; `#` starts a
/// comment. Keys may use `-` or `_`.
pub fn parse_config_text(text: &str) -> Result<Overrides, CliError> {
    let mut map = BTreeMap::new();
    for line in text.lines() {
        let line = line.split('#').next().unwrap_or("");
        for pair in line.split_whitespace() {
            let (k, v) = pair
                .split_once('=')
                .ok_or_else(|| CliError::Config(format!("config entry '{pair}' is not of the form key=value")))?;
            let key = k.trim().replace('-', "_");
            if !KEYS.contains(&key.as_str()) {
                return Err(CliError::Config(format!("unknown config key '{key}'")));
            }
            if map.insert(key.clone(), v.trim().to_string()).is_some() {
                return Err(CliError::Config(format!("config key '{key}' given twice")));
            }
        }
    }
    fn get<T: FromStr>(map: &BTreeMap<String, String>, key: &str) -> Result<Option<T>, CliError> {
        map.get(key)
            .map(|v| v.parse::<T>().map_err(|_| CliError::Config(format!("invalid value '{v}' for {key}"))))
            .transpose()
    }
    Ok(Overrides {
        n: get(&map, "n")?,
        beta: get(&map, "beta")?,
        law: get(&map, "law")?,
        seed: get(&map, "seed")?,
        t_min: get(&map, "t_min")?,
        t_max: get(&map, "t_max")?,
        points: get(&map, "points")?,
        spacing: get(&map, "spacing")?,
        samples: get(&map, "samples")?,
        n_pairs: get(&map, "n_pairs")?,
        n_params: get(&map, "n_params")?,
        counts: get(&map, "counts")?,
        param_law: get(&map, "param_law")?,
        design: get(&map, "design")?,
        strip_mode: get(&map, "strip_mode")?,
        quick: get(&map, "quick")?,
        out: get(&map, "out")?,
        workers: get(&map, "workers")?,
    })
}

pub fn read_config_file(path: &Path) -> Result<Overrides, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("cannot read config file {}: {e}", path.display())))?;
    parse_config_text(&text)
}

impl Overrides {
    /// `self` with every field given in `top` replaced.
    pub fn overridden_by(self, top: Overrides) -> Overrides {
        Overrides {
            n: top.n.or(self.n),
            beta: top.beta.or(self.beta),
            law: top.law.or(self.law),
            seed: top.seed.or(self.seed),
            t_min: top.t_min.or(self.t_min),
            t_max: top.t_max.or(self.t_max),
            points: top.points.or(self.points),
            spacing: top.spacing.or(self.spacing),
            samples: top.samples.or(self.samples),
            n_pairs: top.n_pairs.or(self.n_pairs),
            n_params: top.n_params.or(self.n_params),
            counts: top.counts.or(self.counts),
            param_law: top.param_law.or(self.param_law),
            design: top.design.or(self.design),
            strip_mode: top.strip_mode.or(self.strip_mode),
            quick: top.quick.or(self.quick),
            out: top.out.or(self.out),
            workers: top.workers.or(self.workers),
        }
    }
}

fn bad(field: &str, msg: impl fmt::Display) -> CliError {
    CliError::Config(format!("{field}: {msg}"))
}

pub fn parse_seed(s: &str) -> Result<u64, CliError> {
    let r = match s.strip_prefix("0x").or_else(|| s.strip_prefix("0X")) {
        Some(hex) => u64::from_str_radix(&hex.replace('_', ""), 16),
        None => s.replace('_', "").parse(),
    };
    r.map_err(|_| bad("seed", format!("'{s}' is not a decimal or 0x-prefixed hex integer")))
}

/// Parse a parameter law:
/// `circle`, `sphere:<k>`, `circle-point:<angle>`, `table` (needs a file),
/// `table:<file of angles>`, `plane`, `plane-point:<x>,<y>`.
pub fn parse_param_law(s: &str) -> Result<ParamLaw, CliError> {
    let (head, arg) = match s.split_once(':') {
        Some((h, a)) => (h, Some(a)),
        None => (s, None),
    };
    let num = |v: &str| v.trim().parse::<f64>().map_err(|_| bad("param_law", format!("invalid number '{v}'")));
    let law = match (head, arg) {
        ("circle", None) => ParamLaw::uniform_circle(),
        ("sphere", Some(k)) => {
            ParamLaw::UniformSphere { k: k.parse().map_err(|_| bad("param_law", format!("invalid dimension '{k}'")))? }
        }
        ("circle-point", Some(a)) => ParamLaw::circle_point(num(a)?),
        ("table", None) => ParamLaw::DensityTable { table: None },
        ("table", Some(path)) => {
            let text =
                std::fs::read_to_string(path).map_err(|e| bad("param_law", format!("cannot read {path}: {e}")))?;
            let mut angles = text.split_whitespace().map(num).collect::<Result<Vec<f64>, _>>()?;
            angles.sort_by(f64::total_cmp);
            let table = InverseCdf::from_quantiles(angles).map_err(|e| bad("param_law", e))?;
            ParamLaw::DensityTable { table: Some(table) }
        }
        ("plane", None) => ParamLaw::default_plane(),
        ("plane-point", Some(xy)) => {
            let (x, y) = xy.split_once(',').ok_or_else(|| bad("param_law", "plane-point needs x,y"))?;
            ParamLaw::plane_point([num(x)?, num(y)?])
        }
        _ => return Err(bad("param_law", format!("unknown parameter law '{s}'"))),
    };
    Ok(law)
}

fn parse_counts(s: &str) -> Result<Vec<usize>, CliError> {
    let counts = s
        .split(',')
        .map(|c| c.trim().parse::<usize>().map_err(|_| bad("counts", format!("invalid count '{c}'"))))
        .collect::<Result<Vec<_>, _>>()?;
    if counts.is_empty() || counts.contains(&0) {
        return Err(bad("counts", "all counts must be at least 1"));
    }
    Ok(counts)
}

impl RunConfig {
    /// Apply defaults to `o` and validate.
    pub fn resolve(command: Command, o: Overrides) -> Result<Self, CliError> {
        let n = o.n.unwrap_or(100);
        if n < 2 {
            return Err(bad("n", format!("matrix dimension must be at least 2, got {n}")));
        }
        let beta = Beta::from_int(o.beta.unwrap_or(2)).map_err(|e| bad("beta", e))?;
        let law = EntryKind::parse(o.law.as_deref().unwrap_or("gaussian")).map_err(|e| bad("law", e))?;
        let seed = match &o.seed {
            Some(s) => parse_seed(s)?,
            None => DEFAULT_SEED,
        };
        let t_min = o.t_min.unwrap_or(1.0);
        let t_max = o.t_max.unwrap_or(PI * n as f64);
        if !(t_min > 0.0) || !t_min.is_finite() {
            return Err(bad("t_min", format!("must be positive, got {t_min}")));
        }
        if !(t_max > t_min) || !t_max.is_finite() {
            return Err(bad("t_max", format!("must exceed t_min = {t_min}, got {t_max}")));
        }
        let points = o.points.unwrap_or(DEFAULT_POINTS);
        if points < 2 {
            return Err(bad("points", format!("must be at least 2, got {points}")));
        }
        let spacing = match o.spacing.as_deref().unwrap_or("log") {
            "log" => Spacing::Log,
            "linear" => Spacing::Linear,
            other => return Err(bad("spacing", format!("expected log or linear, got '{other}'"))),
        };
        let samples = o.samples.unwrap_or(1000);
        if samples < 2 {
            return Err(bad("samples", format!("must be at least 2, got {samples}")));
        }
        let n_pairs = o.n_pairs.unwrap_or(500);
        if n_pairs < 2 {
            return Err(bad("n_pairs", format!("must be at least 2, got {n_pairs}")));
        }
        let n_params = o.n_params.unwrap_or(500);
        if n_params < 1 {
            return Err(bad("n_params", "must be at least 1"));
        }
        let counts = parse_counts(o.counts.as_deref().unwrap_or("2,10,500"))?;
        let param_law_spec = o.param_law.unwrap_or_else(|| "circle".to_string());
        let param_law = parse_param_law(&param_law_spec)?;
        let design = match o.design.as_deref().unwrap_or("nested") {
            "nested" => MonoDesign::Nested,
            "coupled" => MonoDesign::Coupled,
            other => return Err(bad("design", format!("expected nested or coupled, got '{other}'"))),
        };
        if design == MonoDesign::Nested && n_params < 2 && matches!(command, Command::SampleMono | Command::Figures) {
            return Err(bad("n_params", "the nested design needs at least 2 parameter draws"));
        }
        let strip_mode = match o.strip_mode.as_deref().unwrap_or("both") {
            "wigner" => StripSelection::Wigner,
            "mono" => StripSelection::Mono,
            "both" => StripSelection::Both,
            other => return Err(bad("strip_mode", format!("expected wigner, mono or both, got '{other}'"))),
        };
        Ok(Self {
            command,
            n,
            beta,
            law,
            seed,
            t_min,
            t_max,
            points,
            spacing,
            samples,
            n_pairs,
            n_params,
            counts,
            param_law_spec,
            param_law,
            design,
            strip_mode,
            quick: o.quick.unwrap_or(false),
            out: o.out.unwrap_or_else(|| PathBuf::from(".")),
            workers: o.workers.unwrap_or(0),
        })
    }

    pub fn entry_law(&self) -> EntryLaw {
        EntryLaw::new(self.law, self.beta)
    }

    pub fn grid(&self) -> sfflab::Result<TimeGrid> {
        match self.spacing {
            Spacing::Log => TimeGrid::log(self.t_min, self.t_max, self.points),
            Spacing::Linear => TimeGrid::linear(self.t_min, self.t_max, self.points),
        }
    }

    /// Worker count 1 runs sequentially; 0 uses one worker per core.
    pub fn parallelism(&self) -> Parallelism {
        Parallelism::from_workers(self.workers)
    }

    /// Single-line `key=value` form of everything that determines the
    /// output values. The worker count and output directory are left out
    /// because they do not change any value. The line parses back as a
    /// config file.
    pub fn canonical(&self) -> String {
        let beta = match self.beta {
            Beta::Real => 1,
            Beta::Complex => 2,
        };
        let spacing = match self.spacing {
            Spacing::Log => "log",
            Spacing::Linear => "linear",
        };
        let design = match self.design {
            MonoDesign::Nested => "nested",
            MonoDesign::Coupled => "coupled",
        };
        let strip = match self.strip_mode {
            StripSelection::Wigner => "wigner",
            StripSelection::Mono => "mono",
            StripSelection::Both => "both",
        };
        let counts: Vec<String> = self.counts.iter().map(|c| c.to_string()).collect();
        format!(
            "command={} n={} beta={beta} law={} seed={:#x} t_min={:?} t_max={:?} points={} spacing={spacing} \
             samples={} n_pairs={} n_params={} counts={} param_law={} design={design} strip_mode={strip} quick={}",
            self.command.name(),
            self.n,
            self.law.name(),
            self.seed,
            self.t_min,
            self.t_max,
            self.points,
            self.samples,
            self.n_pairs,
            self.n_params,
            counts.join(","),
            self.param_law_spec,
            self.quick,
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults() {
        let c = RunConfig::resolve(Command::Predict, Overrides::default()).unwrap();
        assert_eq!(c.n, 100);
        assert_eq!(c.points, 120);
        assert_eq!(c.spacing, Spacing::Log);
        assert_eq!(c.t_max, PI * 100.0);
        assert_eq!(c.counts, vec![2, 10, 500]);
        assert_eq!(c.seed, DEFAULT_SEED);
    }

    #[test]
    fn flags_override_file() {
        let file = parse_config_text("n=50\nseed=0x10 # comment\npoints=7 t-min=0.5").unwrap();
        let flags = Overrides { n: Some(20), ..Overrides::default() };
        let c = RunConfig::resolve(Command::SampleWigner, file.overridden_by(flags)).unwrap();
        assert_eq!((c.n, c.seed, c.points, c.t_min), (20, 16, 7, 0.5));
    }

    #[test]
    fn canonical_form_round_trips() {
        let o = Overrides {
            n: Some(64),
            beta: Some(1),
            law: Some("rademacher".into()),
            t_max: Some(123.456),
            counts: Some("3,4".into()),
            param_law: Some("sphere:3".into()),
            ..Overrides::default()
        };
        let c = RunConfig::resolve(Command::Strip, o).unwrap();
        let line = c.canonical();
        let rest = line.split_once(' ').unwrap().1;
        let again = RunConfig::resolve(Command::Strip, parse_config_text(rest).unwrap()).unwrap();
        assert_eq!(again.canonical(), line);
    }

    #[test]
    fn invalid_fields_are_named() {
        let cases = [
            ("n=1", "n:"),
            ("t_min=0", "t_min"),
            ("t_min=5 t_max=2", "t_max"),
            ("points=1", "points"),
            ("counts=2,0", "counts"),
            ("beta=3", "beta"),
            ("spacing=cubic", "spacing"),
            ("param_law=torus", "param_law"),
            ("seed=xyz", "seed"),
        ];
        for (text, field) in cases {
            let err = RunConfig::resolve(Command::Predict, parse_config_text(text).unwrap()).unwrap_err();
            assert!(err.to_string().contains(field), "{text}: {err}");
        }
        assert!(parse_config_text("bogus=1").is_err());
        assert!(parse_config_text("n").is_err());
        assert!(parse_config_text("n=1 n=2").is_err());
    }

    #[test]
    fn parameter_laws() {
        assert_eq!(parse_param_law("circle").unwrap(), ParamLaw::uniform_circle());
        assert_eq!(parse_param_law("sphere:4").unwrap(), ParamLaw::UniformSphere { k: 4 });
        assert!(parse_param_law("plane").unwrap().k() == 2);
        assert!(parse_param_law("plane-point:1,0").unwrap().is_degenerate());
        assert!(parse_param_law("circle-point:0.5").unwrap().is_degenerate());
        assert_eq!(parse_param_law("table").unwrap(), ParamLaw::DensityTable { table: None });
        assert!(parse_param_law("table:/nonexistent/file").is_err());
        assert!(parse_param_law("plane-point:1").is_err());
        assert_eq!(parse_seed("0xff").unwrap(), 255);
        assert_eq!(parse_seed("1_000").unwrap(), 1000);
    }
}
