//! Run configuration: flags, an optional `key = value` file and two
//! environment overrides. Precedence: flag, environment, file, default.

use std::collections::BTreeMap;
use std::path::PathBuf;

use brickcurl::analysis::Quantity;
use brickcurl::study::Scheme;
use clap::Parser;

/// Largest mesh size accepted without `--extended`.
pub const DESK_MAX_N: usize = 24;

pub const ENV_THREADS: &str = "BRICKCURL_THREADS";
pub const ENV_OUT: &str = "BRICKCURL_OUT";

#[derive(Parser, Debug, Default)]
#[command(name = "brickcurl", version, about = "Convergence studies for the nonconforming quad-curl brick element")]
pub struct Cli {
    /// Plain-text `key = value` file using the long flag names as keys.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// original, modified or both.
    #[arg(long)]
    pub scheme: Option<String>,
    /// Comma-separated mesh sizes [default: 6,12,18,24].
    #[arg(long)]
    pub n: Option<String>,
    /// errors, superclose, superconv or all (comma lists allowed).
    #[arg(long)]
    pub task: Option<String>,
    /// Relative residual target of the saddle solver [default: 1e-10].
    #[arg(long)]
    pub tol: Option<f64>,
    /// Gauss points per axis [default: 6].
    #[arg(long)]
    pub quad_order: Option<usize>,
    /// Iteration cap of the saddle solver [default: 20000].
    #[arg(long)]
    pub max_iterations: Option<usize>,
    /// Output directory [default: results].
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// csv, markdown or both.
    #[arg(long)]
    pub format: Option<String>,
    /// Allow n above 24.
    #[arg(long)]
    pub extended: bool,
    /// Run the invariant battery instead of a study.
    #[arg(long)]
    pub selftest: bool,
    #[arg(long)]
    pub threads: Option<usize>,
    /// Perturb the V_K spanning set (self-test fault injection).
    #[arg(long, hide = true)]
    pub inject_fault: Option<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OutputFormat {
    Csv,
    Markdown,
    Both,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub schemes: Vec<Scheme>,
    pub ns: Vec<usize>,
    pub quantities: Vec<Quantity>,
    pub tol: f64,
    pub quad_order: usize,
    pub max_iterations: usize,
    pub out: PathBuf,
    pub format: OutputFormat,
    pub extended: bool,
    pub selftest: bool,
    pub threads: Option<usize>,
    pub fault: Option<f64>,
}

fn parse_schemes(s: &str) -> Result<Vec<Scheme>, String> {
    match s.trim().to_ascii_lowercase().as_str() {
        "both" => Ok(vec![Scheme::Original, Scheme::Modified]),
        other => Ok(vec![other.parse()?]),
    }
}

fn parse_ns(s: &str) -> Result<Vec<usize>, String> {
    let ns = s
        .split(',')
        .map(|t| {
            t.trim()
                .parse::<usize>()
                .map_err(|_| format!("invalid mesh size `{}`", t.trim()))
        })
        .collect::<Result<Vec<_>, _>>()?;
    if ns.is_empty() || ns.contains(&0) {
        return Err("mesh sizes must be positive".into());
    }
    Ok(ns)
}

fn parse_tasks(s: &str) -> Result<Vec<Quantity>, String> {
    let mut out = Vec::new();
    for t in s.split(',') {
        let add: &[Quantity] = match t.trim().to_ascii_lowercase().as_str() {
            "errors" => &[Quantity::Error],
            "superclose" => &[Quantity::Superclose],
            "superconv" => &[Quantity::Superconvergent],
            "all" => &[Quantity::Error, Quantity::Superclose, Quantity::Superconvergent],
            other => return Err(format!("unknown task `{other}`")),
        };
        for q in add {
            if !out.contains(q) {
                out.push(*q);
            }
        }
    }
    Ok(out)
}

fn parse_format(s: &str) -> Result<OutputFormat, String> {
    match s.trim().to_ascii_lowercase().as_str() {
        "csv" => Ok(OutputFormat::Csv),
        "markdown" | "md" => Ok(OutputFormat::Markdown),
        "both" => Ok(OutputFormat::Both),
        other => Err(format!("unknown format `{other}`")),
    }
}

fn parse_bool(s: &str) -> Result<bool, String> {
    match s.trim().to_ascii_lowercase().as_str() {
        "true" | "yes" | "1" => Ok(true),
        "false" | "no" | "0" => Ok(false),
        other => Err(format!("invalid boolean `{other}`")),
    }
}

fn parse_num<T: std::str::FromStr>(key: &str, s: &str) -> Result<T, String> {
    s.trim().parse().map_err(|_| format!("invalid value `{}` for {key}", s.trim()))
}

const KEYS: [&str; 10] = [
    "scheme",
    "n",
    "task",
    "tol",
    "quad-order",
    "max-iterations",
    "out",
    "format",
    "extended",
    "threads",
];

/// Parses `key = value` lines; `#` starts a comment.
pub fn parse_config_file(text: &str) -> Result<BTreeMap<String, String>, String> {
    let mut map = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| format!("line {}: expected `key = value`", i + 1))?;
        let key = k.trim().replace('_', "-");
        if !KEYS.contains(&key.as_str()) {
            return Err(format!("line {}: unknown key `{}`", i + 1, k.trim()));
        }
        map.insert(key, v.trim().to_string());
    }
    Ok(map)
}

impl RunConfig {
    pub fn resolve(cli: Cli, env: impl Fn(&str) -> Option<String>) -> Result<Self, String> {
        let file = match &cli.config {
            Some(path) => {
                let text = std::fs::read_to_string(path).map_err(|e| format!("cannot read {}: {e}", path.display()))?;
                parse_config_file(&text)?
            }
            None => BTreeMap::new(),
        };
        let get = |k: &str| file.get(k).map(String::as_str);

        let schemes = match cli.scheme.as_deref().or(get("scheme")) {
            Some(s) => parse_schemes(s)?,
            None => vec![Scheme::Modified],
        };
        let ns = match cli.n.as_deref().or(get("n")) {
            Some(s) => parse_ns(s)?,
            None => vec![6, 12, 18, 24],
        };
        let quantities = match cli.task.as_deref().or(get("task")) {
            Some(s) => parse_tasks(s)?,
            None => vec![Quantity::Error],
        };
        let tol = match (cli.tol, get("tol")) {
            (Some(t), _) => t,
            (None, Some(s)) => parse_num("tol", s)?,
            _ => 1e-10,
        };
        let quad_order = match (cli.quad_order, get("quad-order")) {
            (Some(q), _) => q,
            (None, Some(s)) => parse_num("quad-order", s)?,
            _ => 6,
        };
        let max_iterations = match (cli.max_iterations, get("max-iterations")) {
            (Some(m), _) => m,
            (None, Some(s)) => parse_num("max-iterations", s)?,
            _ => 20_000,
        };
        let out = match (cli.out, env(ENV_OUT), get("out")) {
            (Some(p), _, _) => p,
            (None, Some(p), _) => PathBuf::from(p),
            (None, None, Some(p)) => PathBuf::from(p),
            _ => PathBuf::from("results"),
        };
        let format = match cli.format.as_deref().or(get("format")) {
            Some(s) => parse_format(s)?,
            None => OutputFormat::Both,
        };
        let extended = cli.extended || get("extended").map(parse_bool).transpose()?.unwrap_or(false);
        let threads = match (cli.threads, env(ENV_THREADS), get("threads")) {
            (Some(t), _, _) => Some(t),
            (None, Some(s), _) => Some(parse_num(ENV_THREADS, &s)?),
            (None, None, Some(s)) => Some(parse_num("threads", s)?),
            _ => None,
        };

        if !(tol > 0.0 && tol.is_finite()) {
            return Err(format!("tol must be positive, got {tol}"));
        }
        if quad_order == 0 {
            return Err("quad-order must be at least 1".into());
        }
        if threads == Some(0) {
            return Err("threads must be at least 1".into());
        }
        if !cli.selftest {
            if let Some(&n) = ns.iter().find(|&&n| n > DESK_MAX_N) {
                if !extended {
                    return Err(format!("n = {n} exceeds {DESK_MAX_N}; pass --extended to allow it"));
                }
            }
            if quantities.contains(&Quantity::Superconvergent) {
                if let Some(&n) = ns.iter().find(|&&n| !n.is_multiple_of(3)) {
                    return Err(format!("superconv needs every n divisible by 3, got {n}"));
                }
            }
        }
        Ok(RunConfig {
            schemes,
            ns,
            quantities,
            tol,
            quad_order,
            max_iterations,
            out,
            format,
            extended,
            selftest: cli.selftest,
            threads,
            fault: cli.inject_fault,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn no_env(_: &str) -> Option<String> {
        None
    }

    #[test]
    fn defaults() {
        let c = RunConfig::resolve(Cli::default(), no_env).unwrap();
        assert_eq!(c.ns, vec![6, 12, 18, 24]);
        assert_eq!(c.tol, 1e-10);
        assert_eq!(c.quad_order, 6);
        assert_eq!(c.format, OutputFormat::Both);
    }

    #[test]
    fn both_schemes_and_all_tasks() {
        let cli = Cli {
            scheme: Some("both".into()),
            task: Some("all".into()),
            ..Cli::default()
        };
        let c = RunConfig::resolve(cli, no_env).unwrap();
        assert_eq!(c.schemes.len(), 2);
        assert_eq!(c.quantities.len(), 3);
    }

    #[test]
    fn large_n_needs_extended() {
        let cli = Cli {
            n: Some("36".into()),
            ..Cli::default()
        };
        assert!(RunConfig::resolve(cli, no_env).is_err());
        let cli = Cli {
            n: Some("36".into()),
            extended: true,
            ..Cli::default()
        };
        assert!(RunConfig::resolve(cli, no_env).is_ok());
    }

    #[test]
    fn superconv_rejects_n4() {
        let cli = Cli {
            n: Some("4".into()),
            task: Some("superconv".into()),
            ..Cli::default()
        };
        assert!(RunConfig::resolve(cli, no_env).unwrap_err().contains("divisible"));
    }

    #[test]
    fn env_overrides_file_but_not_flags() {
        let env = |k: &str| match k {
            ENV_THREADS => Some("3".to_string()),
            ENV_OUT => Some("/tmp/env-out".to_string()),
            _ => None,
        };
        let c = RunConfig::resolve(Cli::default(), env).unwrap();
        assert_eq!(c.threads, Some(3));
        assert_eq!(c.out, PathBuf::from("/tmp/env-out"));
        let cli = Cli {
            threads: Some(1),
            ..Cli::default()
        };
        assert_eq!(RunConfig::resolve(cli, env).unwrap().threads, Some(1));
    }

    #[test]
    fn config_file_syntax() {
        let map = parse_config_file("# study\nscheme = original\nquad_order = 4 # per axis\n\nn=6,12\n").unwrap();
        assert_eq!(map["scheme"], "original");
        assert_eq!(map["quad-order"], "4");
        assert_eq!(map["n"], "6,12");
        assert!(parse_config_file("bogus = 1").is_err());
        assert!(parse_config_file("scheme original").is_err());
    }

    #[test]
    fn bad_values_are_rejected() {
        for (n, task) in [("0", "errors"), ("6,x", "errors"), ("6", "nonsense")] {
            let cli = Cli {
                n: Some(n.into()),
                task: Some(task.into()),
                ..Cli::default()
            };
            assert!(RunConfig::resolve(cli, no_env).is_err(), "{n} {task}");
        }
    }
}
