//! Run configuration: where the cache lives, how results are printed, and
//! the default parameter box a sweep falls back to when flags are omitted.

use std::path::PathBuf;

use serde::Deserialize;

use crate::Failure;

/// Output format for every subcommand.
#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

/// Optional TOML file loaded with `--config`. Every field may be omitted;
/// missing fields keep their built-in defaults.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    cache_dir: Option<PathBuf>,
    output_format: Option<String>,
    lambda: Option<u32>,
    m_max: Option<u64>,
    p: Option<Vec<u64>>,
    t: Option<Vec<u32>>,
    threads: Option<usize>,
}

/// The resolved configuration a subcommand runs under. Precedence per
/// field: command-line flag, then `STRANGE_LAB_CACHE` (cache dir only),
/// then the `--config` file, then the built-in default.
#[derive(Debug, Clone)]
pub struct CliConfig {
    pub cache_dir: PathBuf,
    pub output_format: Format,
    /// Prime power exponent used by `verify` when `--lambda` is absent.
    pub lambda: u32,
    /// Multiplier bound used by `verify` when `--m-max` is absent.
    pub m_max: u64,
    /// Primes swept by `verify` when `--p` is absent.
    pub p_list: Vec<u64>,
    /// Torus levels swept by `verify` when `--t` is absent.
    pub t_list: Vec<u32>,
    /// Worker count hint. Accepted for forward compatibility; the
    /// computation currently runs on a single thread.
    pub threads: usize,
}

impl Default for CliConfig {
    fn default() -> CliConfig {
        CliConfig {
            cache_dir: std::env::temp_dir().join("strange-lab-cache"),
            output_format: Format::Json,
            lambda: 1,
            m_max: 1,
            p_list: vec![5, 7, 11, 13, 17, 19, 23],
            t_list: vec![2],
            threads: 1,
        }
    }
}

impl CliConfig {
    /// Builds the effective configuration from the optional config file and
    /// the global command-line flags.
    pub fn resolve(
        config_path: Option<&PathBuf>,
        cache_dir_flag: Option<&PathBuf>,
        format_flag: Option<Format>,
        threads_flag: Option<usize>,
    ) -> Result<CliConfig, Failure> {
        let mut cfg = CliConfig::default();
        if let Some(path) = config_path {
            let text = std::fs::read_to_string(path).map_err(|e| {
                Failure::Usage(format!("cannot read config {}: {e}", path.display()))
            })?;
            let file: FileConfig = toml::from_str(&text)
                .map_err(|e| Failure::Usage(format!("malformed config {}: {e}", path.display())))?;
            if let Some(dir) = file.cache_dir {
                cfg.cache_dir = dir;
            }
            if let Some(fmt) = file.output_format {
                cfg.output_format = match fmt.as_str() {
                    "json" => Format::Json,
                    "csv" => Format::Csv,
                    other => {
                        return Err(Failure::Usage(format!(
                            "output_format must be \"json\" or \"csv\", not {other:?}"
                        )))
                    }
                };
            }
            if let Some(v) = file.lambda {
                cfg.lambda = v;
            }
            if let Some(v) = file.m_max {
                cfg.m_max = v;
            }
            if let Some(v) = file.p {
                cfg.p_list = v;
            }
            if let Some(v) = file.t {
                cfg.t_list = v;
            }
            if let Some(v) = file.threads {
                cfg.threads = v;
            }
        }
        if let Ok(dir) = std::env::var("STRANGE_LAB_CACHE") {
            if !dir.is_empty() {
                cfg.cache_dir = PathBuf::from(dir);
            }
        }
        if let Some(dir) = cache_dir_flag {
            cfg.cache_dir = dir.clone();
        }
        if let Some(fmt) = format_flag {
            cfg.output_format = fmt;
        }
        if let Some(n) = threads_flag {
            cfg.threads = n;
        }
        if cfg.threads == 0 {
            return Err(Failure::Usage("--threads must be at least 1".into()));
        }
        if cfg.lambda == 0 || cfg.m_max == 0 {
            return Err(Failure::Usage("lambda and m_max must be positive".into()));
        }
        if cfg.p_list.is_empty() || cfg.t_list.is_empty() {
            return Err(Failure::Usage("parameter box lists must be nonempty".into()));
        }
        Ok(cfg)
    }
}
