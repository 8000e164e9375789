//! Experiment configuration: a TOML file validated field by field, with
//! every problem reported together and tagged with its line.
//!
//! ```toml
//! name = "equal_segments"
//! horizon = 4096
//! arms = 30
//! seeds = { count = 5, base = 0 }
//! window = 50
//! regret = "exact"
//!
//! [environment]
//! kind = "piecewise"
//! change_points = [1024, 2048, 3072]
//! boost = 0.5
//!
//! [[algorithms]]
//! kind = "stabl"
//!
//! [[algorithms]]
//! kind = "exp3"
//! ```

use std::collections::BTreeSet;
use std::ops::Range;
use std::path::{Path, PathBuf};

use serde::Serialize;
use toml::de::{DeTable, DeValue};
use toml::Spanned;

use crate::environments::validate_change_points;
use crate::error::{Error, Result};
use crate::evaluation::DEFAULT_WORK_BUDGET;
use crate::stabl::IntervalSchedule;

/// Learner kinds the runner knows.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum AlgorithmKind {
    Stabl,
    StablNaive,
    StablSingleScale,
    Exp3,
    BcoThreeQuery,
    BcoTwoQuery,
}

impl AlgorithmKind {
    pub const ALL: [AlgorithmKind; 6] = [
        AlgorithmKind::Stabl,
        AlgorithmKind::StablNaive,
        AlgorithmKind::StablSingleScale,
        AlgorithmKind::Exp3,
        AlgorithmKind::BcoThreeQuery,
        AlgorithmKind::BcoTwoQuery,
    ];

    pub fn name(self) -> &'static str {
        match self {
            AlgorithmKind::Stabl => "stabl",
            AlgorithmKind::StablNaive => "stabl_naive",
            AlgorithmKind::StablSingleScale => "stabl_single_scale",
            AlgorithmKind::Exp3 => "exp3",
            AlgorithmKind::BcoThreeQuery => "bco_three_query",
            AlgorithmKind::BcoTwoQuery => "bco_two_query",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|k| k.name() == s)
    }

    pub fn is_convex(self) -> bool {
        matches!(self, AlgorithmKind::BcoThreeQuery | AlgorithmKind::BcoTwoQuery)
    }
}

/// How strongly adaptive regret is reported.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RegretMode {
    Exact,
    Geometric,
    Off,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AlgorithmSpec {
    pub kind: AlgorithmKind,
    /// Directory name and report label; defaults to the kind's name.
    pub label: String,
    /// Explicit interval scales overriding the default schedule.
    pub scales: Option<Vec<usize>>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum EnvironmentSpec {
    /// Expert-advice rewards with a boosted arm per segment, regenerated
    /// for every seed.
    Piecewise { change_points: Vec<usize>, boost: f64 },
    /// A fixed loss matrix read from CSV (`t,arm_0,...`).
    LossCsv { path: PathBuf },
    /// `|x - c_j|^2` on a ball, center `c_j` switching at change points.
    Quadratic {
        centers: Vec<Vec<f64>>,
        change_points: Vec<usize>,
        radius: f64,
        inner_radius: f64,
        lipschitz: f64,
        loss_bound: f64,
        noise: f64,
        grid_per_axis: usize,
    },
}

/// A validated experiment.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentConfig {
    pub name: String,
    pub horizon: usize,
    /// Arm count for bandit environments.
    pub arms: Option<usize>,
    /// Dimension for convex environments.
    pub dim: Option<usize>,
    pub seeds: Vec<u64>,
    pub window: usize,
    pub output_dir: Option<PathBuf>,
    pub regret: RegretMode,
    /// Cap on `T * n` for exact regret.
    pub regret_budget: u128,
    pub environment: EnvironmentSpec,
    pub algorithms: Vec<AlgorithmSpec>,
}

impl ExperimentConfig {
    pub fn is_convex(&self) -> bool {
        matches!(self.environment, EnvironmentSpec::Quadratic { .. })
    }
}

/// Reads and validates a config file.
pub fn validate_config(path: impl AsRef<Path>) -> Result<ExperimentConfig> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut cfg = parse_config(&text)?;
    if let EnvironmentSpec::LossCsv { path: p } = &mut cfg.environment {
        if p.is_relative() {
            if let Some(dir) = path.parent() {
                *p = dir.join(&*p);
            }
        }
    }
    Ok(cfg)
}

/// Validates config text; relative paths are kept as written.
pub fn parse_config(text: &str) -> Result<ExperimentConfig> {
    let (doc, syntax) = DeTable::parse_recoverable(text);
    let mut r = Reader {
        text,
        errors: Vec::new(),
    };
    for e in &syntax {
        let line = e.span().map_or(0, |s| r.line(s.start));
        r.errors.push(format!("line {line}: syntax: {}", e.message().trim()));
    }
    if !syntax.is_empty() {
        return Err(Error::Config(r.errors));
    }
    let root = doc.get_ref();
    let whole = doc.span();
    r.unknown_keys(
        root,
        "",
        &[
            "name", "horizon", "arms", "dim", "seeds", "window", "output_dir", "regret",
            "regret_budget", "environment", "algorithms",
        ],
    );

    let name = r.string(root, "name", &whole, None);
    if let Some(n) = &name {
        if n.is_empty() || n.contains(['/', '\\']) || n == "." || n == ".." {
            r.err_at(root, "name", "must be a non-empty name without path separators");
        }
    }
    let horizon = r.uint(root, "horizon", &whole, None).and_then(|t| {
        if t < 2 {
            r.err_at(root, "horizon", "must be >= 2");
            None
        } else {
            Some(t as usize)
        }
    });
    let arms = r.opt_uint(root, "arms").and_then(|n| {
        if n < 1 {
            r.err_at(root, "arms", "must be >= 1");
            None
        } else {
            Some(n as usize)
        }
    });
    let dim = r.opt_uint(root, "dim").and_then(|d| {
        if d < 1 {
            r.err_at(root, "dim", "must be >= 1");
            None
        } else {
            Some(d as usize)
        }
    });
    let seeds = r.seeds(root, &whole);
    let window = r.uint(root, "window", &whole, Some(50)).and_then(|w| {
        if w < 1 {
            r.err_at(root, "window", "must be >= 1");
            None
        } else {
            Some(w as usize)
        }
    });
    let output_dir = r.opt_string(root, "output_dir").map(PathBuf::from);
    let regret = match r.string(root, "regret", &whole, Some("geometric")).as_deref() {
        Some("exact") => Some(RegretMode::Exact),
        Some("geometric") => Some(RegretMode::Geometric),
        Some("off") => Some(RegretMode::Off),
        Some(other) => {
            r.err_at(root, "regret", &format!("unknown mode `{other}`, expected exact, geometric or off"));
            None
        }
        None => None,
    };
    let regret_budget = match r.opt_uint(root, "regret_budget") {
        Some(b) if b >= 1 => Some(b as u128),
        Some(_) => {
            r.err_at(root, "regret_budget", "must be >= 1");
            None
        }
        None => Some(DEFAULT_WORK_BUDGET),
    };
    let environment = r.environment(root, &whole, horizon, dim);
    let algorithms = r.algorithms(root, &whole, horizon);

    if let (Some(env), Some(algos)) = (&environment, &algorithms) {
        let convex = matches!(env, EnvironmentSpec::Quadratic { .. });
        for a in algos {
            if a.kind.is_convex() != convex {
                r.errors.push(format!(
                    "line {}: algorithms: `{}` cannot run on a {} environment",
                    r.key_line(root, "algorithms"),
                    a.kind.name(),
                    if convex { "convex" } else { "bandit" }
                ));
            }
        }
        match env {
            EnvironmentSpec::Quadratic { .. } if dim.is_none() && r.find(root, "dim").is_none() => {
                r.errors.push("line 1: missing field `dim` (required for convex environments)".into());
            }
            EnvironmentSpec::Piecewise { .. } if arms.is_none() && r.find(root, "arms").is_none() => {
                r.errors.push("line 1: missing field `arms` (required for piecewise environments)".into());
            }
            _ => {}
        }
    }

    if !r.errors.is_empty() {
        return Err(Error::Config(r.errors));
    }
    let environment = environment.expect("checked");
    Ok(ExperimentConfig {
        name: name.expect("checked"),
        horizon: horizon.expect("checked"),
        arms,
        dim,
        seeds: seeds.expect("checked"),
        window: window.expect("checked"),
        output_dir,
        regret: regret.expect("checked"),
        regret_budget: regret_budget.expect("checked"),
        environment,
        algorithms: algorithms.expect("checked"),
    })
}

type Table<'i> = DeTable<'i>;

struct Reader<'t> {
    text: &'t str,
    errors: Vec<String>,
}

impl<'t> Reader<'t> {
    fn line(&self, offset: usize) -> usize {
        self.text[..offset.min(self.text.len())].matches('\n').count() + 1
    }

    fn find<'a, 'i>(&self, table: &'a Table<'i>, key: &str) -> Option<(&'a Spanned<DeValue<'i>>, Range<usize>)> {
        table
            .iter()
            .find(|(k, _)| k.get_ref().as_ref() == key)
            .map(|(k, v)| (v, k.span()))
    }

    fn key_line(&self, table: &Table, key: &str) -> usize {
        self.find(table, key).map_or(1, |(_, s)| self.line(s.start))
    }

    fn err_at(&mut self, table: &Table, key: &str, msg: &str) {
        let line = self.key_line(table, key);
        self.errors.push(format!("line {line}: field `{key}`: {msg}"));
    }

    fn err_value(&mut self, span: &Range<usize>, key: &str, msg: &str) {
        let line = self.line(span.start);
        self.errors.push(format!("line {line}: field `{key}`: {msg}"));
    }

    fn missing(&mut self, within: &Range<usize>, key: &str) {
        let line = self.line(within.start);
        self.errors.push(format!("line {line}: missing field `{key}`"));
    }

    fn unknown_keys(&mut self, table: &Table, prefix: &str, known: &[&str]) {
        for (k, _) in table.iter() {
            if !known.contains(&k.get_ref().as_ref()) {
                let line = self.line(k.span().start);
                self.errors.push(format!("line {line}: unknown field `{prefix}{}`", k.get_ref()));
            }
        }
    }

    fn as_uint(v: &DeValue) -> Option<u64> {
        let i = v.as_integer()?;
        let digits = i.as_str().replace('_', "");
        let digits = digits.trim_start_matches('+');
        let body = digits.trim_start_matches("0x").trim_start_matches("0o").trim_start_matches("0b");
        u64::from_str_radix(body, i.radix()).ok()
    }

    fn as_float(v: &DeValue) -> Option<f64> {
        match v {
            DeValue::Float(f) => f.as_str().replace('_', "").parse().ok(),
            DeValue::Integer(_) => {
                let i = v.as_integer()?;
                if i.radix() != 10 {
                    return None;
                }
                i.as_str().replace('_', "").parse::<i64>().ok().map(|x| x as f64)
            }
            _ => None,
        }
    }

    fn uint(&mut self, table: &Table, key: &str, within: &Range<usize>, default: Option<u64>) -> Option<u64> {
        match self.find(table, key) {
            None => {
                if default.is_none() {
                    self.missing(within, key);
                }
                default
            }
            Some((v, _)) => {
                let parsed = Self::as_uint(v.get_ref());
                if parsed.is_none() {
                    self.err_value(&v.span(), key, "expected a non-negative integer");
                }
                parsed
            }
        }
    }

    fn opt_uint(&mut self, table: &Table, key: &str) -> Option<u64> {
        self.find(table, key)?;
        self.uint(table, key, &(0..0), None)
    }

    fn float(&mut self, table: &Table, key: &str, within: &Range<usize>, default: Option<f64>) -> Option<f64> {
        match self.find(table, key) {
            None => {
                if default.is_none() {
                    self.missing(within, key);
                }
                default
            }
            Some((v, _)) => {
                let parsed = Self::as_float(v.get_ref()).filter(|x| x.is_finite());
                if parsed.is_none() {
                    self.err_value(&v.span(), key, "expected a finite number");
                }
                parsed
            }
        }
    }

    fn string(&mut self, table: &Table, key: &str, within: &Range<usize>, default: Option<&str>) -> Option<String> {
        match self.find(table, key) {
            None => {
                if default.is_none() {
                    self.missing(within, key);
                }
                default.map(str::to_owned)
            }
            Some((v, _)) => match v.get_ref().as_str() {
                Some(s) => Some(s.to_owned()),
                None => {
                    self.err_value(&v.span(), key, "expected a string");
                    None
                }
            },
        }
    }

    fn opt_string(&mut self, table: &Table, key: &str) -> Option<String> {
        self.find(table, key)?;
        self.string(table, key, &(0..0), None)
    }

    fn uint_list(&mut self, table: &Table, key: &str) -> Option<Vec<u64>> {
        let (v, _) = self.find(table, key)?;
        let Some(items) = v.get_ref().as_array() else {
            self.err_value(&v.span(), key, "expected an array of non-negative integers");
            return None;
        };
        let parsed: Option<Vec<u64>> = items.iter().map(|x| Self::as_uint(x.get_ref())).collect();
        if parsed.is_none() {
            self.err_value(&v.span(), key, "expected an array of non-negative integers");
        }
        parsed
    }

    fn seeds(&mut self, root: &Table, whole: &Range<usize>) -> Option<Vec<u64>> {
        let Some((v, _)) = self.find(root, "seeds") else {
            self.missing(whole, "seeds");
            return None;
        };
        let span = v.span();
        let seeds = match v.get_ref() {
            DeValue::Array(_) => self.uint_list(root, "seeds")?,
            DeValue::Table(t) => {
                self.unknown_keys(t, "seeds.", &["count", "base"]);
                let count = self.uint(t, "count", &span, None);
                let base = self.uint(t, "base", &span, Some(0));
                let (count, base) = (count?, base?);
                if base.checked_add(count).is_none() {
                    self.err_value(&span, "seeds", "seed range overflows");
                    return None;
                }
                (base..base + count).collect()
            }
            _ => {
                self.err_value(&span, "seeds", "expected an array or { count, base }");
                return None;
            }
        };
        if seeds.is_empty() {
            self.err_value(&span, "seeds", "must not be empty");
            return None;
        }
        if seeds.iter().collect::<BTreeSet<_>>().len() != seeds.len() {
            self.err_value(&span, "seeds", "contains duplicates");
            return None;
        }
        Some(seeds)
    }

    fn environment(
        &mut self,
        root: &Table,
        whole: &Range<usize>,
        horizon: Option<usize>,
        dim: Option<usize>,
    ) -> Option<EnvironmentSpec> {
        let Some((v, _)) = self.find(root, "environment") else {
            self.missing(whole, "environment");
            return None;
        };
        let span = v.span();
        let Some(t) = v.get_ref().as_table() else {
            self.err_value(&span, "environment", "expected a table");
            return None;
        };
        let kind = self.string(t, "kind", &span, None)?;
        let change_points = |r: &mut Self| -> Option<Vec<usize>> {
            let cps: Vec<usize> = r.uint_list(t, "change_points").unwrap_or_default().into_iter().map(|c| c as usize).collect();
            if let Some(h) = horizon {
                if let Err(e) = validate_change_points(&cps, h) {
                    r.err_at(t, "change_points", &e.to_string());
                    return None;
                }
            }
            Some(cps)
        };
        match kind.as_str() {
            "piecewise" => {
                self.unknown_keys(t, "environment.", &["kind", "change_points", "boost"]);
                let cps = change_points(self);
                let boost = self.float(t, "boost", &span, Some(0.5));
                if let Some(b) = boost {
                    if !(0.0..=0.5).contains(&b) {
                        self.err_at(t, "boost", "must lie in [0, 0.5] so rewards stay in [0, 1]");
                        return None;
                    }
                }
                Some(EnvironmentSpec::Piecewise {
                    change_points: cps?,
                    boost: boost?,
                })
            }
            "loss_csv" => {
                self.unknown_keys(t, "environment.", &["kind", "path"]);
                let path = self.string(t, "path", &span, None)?;
                Some(EnvironmentSpec::LossCsv { path: path.into() })
            }
            "quadratic" => {
                self.unknown_keys(
                    t,
                    "environment.",
                    &[
                        "kind", "centers", "change_points", "radius", "inner_radius", "lipschitz",
                        "loss_bound", "noise", "grid_per_axis",
                    ],
                );
                let cps = change_points(self);
                let radius = self.float(t, "radius", &span, Some(1.0));
                let inner = self.float(t, "inner_radius", &span, radius);
                let noise = self.float(t, "noise", &span, Some(0.0));
                let grid = self.uint(t, "grid_per_axis", &span, Some(11));
                let centers = self.centers(t, &span, dim);
                let (radius, inner, noise, grid, centers) = (radius?, inner?, noise?, grid?, centers?);
                let mut ok = true;
                if !(inner > 0.0 && inner <= radius) {
                    self.err_at(t, "inner_radius", "need 0 < inner_radius <= radius");
                    ok = false;
                }
                if noise < 0.0 {
                    self.err_at(t, "noise", "must be >= 0");
                    ok = false;
                }
                if grid < 2 {
                    self.err_at(t, "grid_per_axis", "must be >= 2");
                    ok = false;
                }
                if let Some(c) = centers.iter().find(|c| c.iter().map(|v| v * v).sum::<f64>().sqrt() > radius) {
                    self.err_at(t, "centers", &format!("center {c:?} lies outside the radius-{radius} ball"));
                    ok = false;
                }
                // |x - c|^2 on the ball: gradient norm and value are bounded by
                // the largest distance between a point and a center
                let reach = radius
                    + centers
                        .iter()
                        .map(|c| c.iter().map(|v| v * v).sum::<f64>().sqrt())
                        .fold(0.0, f64::max);
                let lipschitz = self.float(t, "lipschitz", &span, Some(2.0 * reach))?;
                let loss_bound = self.float(t, "loss_bound", &span, Some(reach * reach + noise))?;
                if !(lipschitz > 0.0) || !(loss_bound > 0.0) {
                    self.err_at(t, "lipschitz", "lipschitz and loss_bound must be positive");
                    ok = false;
                }
                ok.then_some(EnvironmentSpec::Quadratic {
                    centers,
                    change_points: cps?,
                    radius,
                    inner_radius: inner,
                    lipschitz,
                    loss_bound,
                    noise,
                    grid_per_axis: grid as usize,
                })
            }
            other => {
                self.err_at(t, "kind", &format!("unknown environment kind `{other}`, expected piecewise, loss_csv or quadratic"));
                None
            }
        }
    }

    fn centers(&mut self, t: &Table, span: &Range<usize>, dim: Option<usize>) -> Option<Vec<Vec<f64>>> {
        let Some((v, _)) = self.find(t, "centers") else {
            self.missing(span, "centers");
            return None;
        };
        let rows: Option<Vec<Vec<f64>>> = v.get_ref().as_array().and_then(|a| {
            a.iter()
                .map(|row| {
                    row.get_ref()
                        .as_array()
                        .and_then(|r| r.iter().map(|x| Self::as_float(x.get_ref())).collect())
                })
                .collect()
        });
        let Some(rows) = rows.filter(|r| !r.is_empty()) else {
            self.err_value(&v.span(), "centers", "expected a non-empty array of number arrays");
            return None;
        };
        let d = dim.unwrap_or(rows[0].len());
        if rows.iter().any(|r| r.len() != d || r.iter().any(|x| !x.is_finite())) {
            self.err_value(&v.span(), "centers", &format!("every center needs {d} finite coordinates"));
            return None;
        }
        Some(rows)
    }

    fn algorithms(&mut self, root: &Table, whole: &Range<usize>, horizon: Option<usize>) -> Option<Vec<AlgorithmSpec>> {
        let Some((v, _)) = self.find(root, "algorithms") else {
            self.missing(whole, "algorithms");
            return None;
        };
        let Some(items) = v.get_ref().as_array().filter(|a| !a.is_empty()) else {
            self.err_value(&v.span(), "algorithms", "expected a non-empty array of tables");
            return None;
        };
        let mut out = Vec::new();
        let mut ok = true;
        for item in items.iter() {
            let span = item.span();
            let Some(t) = item.get_ref().as_table() else {
                self.err_value(&span, "algorithms", "entries must be tables");
                ok = false;
                continue;
            };
            self.unknown_keys(t, "algorithms.", &["kind", "label", "scales"]);
            let Some(kind_name) = self.string(t, "kind", &span, None) else {
                ok = false;
                continue;
            };
            let Some(kind) = AlgorithmKind::parse(&kind_name) else {
                let known: Vec<_> = AlgorithmKind::ALL.iter().map(|k| k.name()).collect();
                self.err_at(t, "kind", &format!("unknown algorithm kind `{kind_name}`, expected one of {}", known.join(", ")));
                ok = false;
                continue;
            };
            let label = self.string(t, "label", &span, Some(kind.name())).unwrap_or_default();
            if label.is_empty() || label.contains(['/', '\\']) || label == "." || label == ".." {
                self.err_at(t, "label", "must be a non-empty name without path separators");
                ok = false;
            }
            let scales: Option<Vec<usize>> = self
                .uint_list(t, "scales")
                .map(|s| s.into_iter().map(|x| x as usize).collect());
            if let (Some(s), Some(h)) = (&scales, horizon) {
                if kind == AlgorithmKind::Exp3 {
                    self.err_at(t, "scales", "exp3 has no interval scales");
                    ok = false;
                } else if let Err(e) = IntervalSchedule::explicit(h, s.clone()) {
                    self.err_at(t, "scales", &e.to_string());
                    ok = false;
                } else if kind == AlgorithmKind::StablSingleScale && s.len() != 1 {
                    self.err_at(t, "scales", "stabl_single_scale takes exactly one scale");
                    ok = false;
                }
            }
            if out.iter().any(|a: &AlgorithmSpec| a.label == label) {
                self.err_at(t, "label", &format!("duplicate label `{label}`"));
                ok = false;
            }
            out.push(AlgorithmSpec { kind, label, scales });
        }
        ok.then_some(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const BASIC: &str = r#"
name = "demo"
horizon = 64
arms = 3
seeds = [1, 2]
window = 4
regret = "exact"

[environment]
kind = "piecewise"
change_points = [16, 40]

[[algorithms]]
kind = "stabl"

[[algorithms]]
kind = "exp3"
label = "baseline"
"#;

    fn errors(text: &str) -> Vec<String> {
        match parse_config(text) {
            Err(Error::Config(e)) => e,
            other => panic!("expected config errors, got {other:?}"),
        }
    }

    #[test]
    fn parses_basic() {
        let c = parse_config(BASIC).unwrap();
        assert_eq!(c.name, "demo");
        assert_eq!(c.horizon, 64);
        assert_eq!(c.arms, Some(3));
        assert_eq!(c.seeds, vec![1, 2]);
        assert_eq!(c.regret, RegretMode::Exact);
        assert_eq!(c.regret_budget, DEFAULT_WORK_BUDGET);
        assert_eq!(c.environment, EnvironmentSpec::Piecewise { change_points: vec![16, 40], boost: 0.5 });
        assert_eq!(c.algorithms[0].label, "stabl");
        assert_eq!(c.algorithms[1].label, "baseline");
    }

    #[test]
    fn seed_ranges() {
        let c = parse_config(&BASIC.replace("seeds = [1, 2]", "seeds = { count = 3, base = 10 }")).unwrap();
        assert_eq!(c.seeds, vec![10, 11, 12]);
        let e = errors(&BASIC.replace("seeds = [1, 2]", "seeds = []"));
        assert!(e[0].contains("`seeds`"), "{e:?}");
    }

    #[test]
    fn missing_horizon_is_named() {
        let e = errors(&BASIC.replace("horizon = 64\n", ""));
        assert_eq!(e.len(), 1);
        assert!(e[0].contains("missing field `horizon`"), "{e:?}");
    }

    #[test]
    fn change_point_past_horizon() {
        let e = errors(&BASIC.replace("[16, 40]", "[16, 64]"));
        assert!(e.iter().any(|m| m.starts_with("line 11:") && m.contains("change_points")), "{e:?}");
    }

    #[test]
    fn collects_every_error() {
        let bad = BASIC
            .replace("horizon = 64\n", "")
            .replace("kind = \"exp3\"", "kind = \"ucb\"")
            .replace("window = 4", "window = 0\ncolour = 1")
            .replace("regret = \"exact\"", "regret = \"sometimes\"");
        let e = errors(&bad);
        assert!(e.len() >= 5, "{e:?}");
        for needle in ["horizon", "ucb", "window", "colour", "sometimes"] {
            assert!(e.iter().any(|m| m.contains(needle)), "{needle} not in {e:?}");
        }
        assert!(e.iter().all(|m| m.starts_with("line ")));
    }

    #[test]
    fn syntax_errors_have_lines() {
        let e = errors("name = \"x\"\nhorizon = = 3\n");
        assert!(e[0].starts_with("line 2:"), "{e:?}");
    }

    #[test]
    fn kind_environment_mismatch() {
        let e = errors(&BASIC.replace("kind = \"exp3\"", "kind = \"bco_two_query\""));
        assert!(e.iter().any(|m| m.contains("bco_two_query")), "{e:?}");
    }

    #[test]
    fn scale_overrides() {
        let c = parse_config(&BASIC.replace("kind = \"stabl\"", "kind = \"stabl_single_scale\"\nscales = [16]")).unwrap();
        assert_eq!(c.algorithms[0].scales, Some(vec![16]));
        let e = errors(&BASIC.replace("kind = \"stabl\"", "kind = \"stabl\"\nscales = [16, 8]"));
        assert!(e.iter().any(|m| m.contains("scales")), "{e:?}");
        let e = errors(&BASIC.replace("kind = \"stabl\"", "kind = \"stabl_single_scale\"\nscales = [8, 16]"));
        assert!(e.iter().any(|m| m.contains("exactly one")), "{e:?}");
    }

    #[test]
    fn quadratic_defaults() {
        let text = r#"
name = "q"
horizon = 128
dim = 2
seeds = [0]
[environment]
kind = "quadratic"
centers = [[0.5, 0.0], [-0.3, 0.4]]
change_points = [64]
[[algorithms]]
kind = "bco_three_query"
"#;
        let c = parse_config(text).unwrap();
        match c.environment {
            EnvironmentSpec::Quadratic { radius, inner_radius, lipschitz, loss_bound, .. } => {
                assert_eq!((radius, inner_radius), (1.0, 1.0));
                assert_eq!(lipschitz, 3.0);
                assert_eq!(loss_bound, 2.25);
            }
            other => panic!("{other:?}"),
        }
        assert_eq!(c.regret, RegretMode::Geometric);
        let e = errors(&text.replace("[-0.3, 0.4]", "[-0.5]"));
        assert!(e.iter().any(|m| m.contains("centers")), "{e:?}");
        let e = errors(&text.replace("dim = 2\n", ""));
        assert!(e.iter().any(|m| m.contains("`dim`")), "{e:?}");
    }
}
