//! Run configuration: defaults, a flat `key = value` file, then flags.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use sha2::{Digest, Sha256};
use svhe_core::report::KPolicy;
use svhe_core::{DriveConfig, MachineParams, SequenceKind, SimConfig};

use crate::error::CliError;

/// Keys accepted in config files; flags use the same names with `-`.
pub const KEYS: [&str; 18] = [
    "out",
    "vdc",
    "fbase",
    "poles",
    "seq",
    "m",
    "k",
    "dt",
    "settle_cycles",
    "measure_cycles",
    "alpha1",
    "alpha2",
    "rs",
    "rr",
    "lo",
    "sigma_s",
    "sigma_r",
    "p_rated",
];

pub const OUT_DIR_ENV: &str = "SVHE_OUT_DIR";

/// Raw settings before type conversion, keyed by canonical name.
#[derive(Debug, Default, Clone)]
pub struct Settings(BTreeMap<String, String>);

impl Settings {
    /// Parses `key = value` lines; `#` starts a comment.
    pub fn parse(text: &str, origin: &Path) -> Result<Self, CliError> {
        let mut map = BTreeMap::new();
        for (no, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(CliError::Usage(format!(
                    "{}:{}: expected `key = value`",
                    origin.display(),
                    no + 1
                )));
            };
            let key = canonical_key(key.trim())
                .map_err(|e| CliError::Usage(format!("{}:{}: {e}", origin.display(), no + 1)))?;
            map.insert(key, value.trim().to_string());
        }
        Ok(Self(map))
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text =
            std::fs::read_to_string(path).map_err(|e| CliError::Io(path.to_path_buf(), e))?;
        Self::parse(&text, path)
    }

    /// Sets `key` if `value` is present; later calls win.
    pub fn set(&mut self, key: &str, value: Option<&String>) {
        if let Some(v) = value {
            self.0.insert(key.to_string(), v.clone());
        }
    }

    fn get(&self, key: &str) -> Option<&str> {
        self.0.get(key).map(String::as_str)
    }

    fn number<T: std::str::FromStr>(&self, key: &str) -> Result<Option<T>, CliError> {
        self.get(key)
            .map(|v| {
                v.parse::<T>()
                    .map_err(|_| CliError::Usage(format!("{key}: cannot parse '{v}'")))
            })
            .transpose()
    }
}

fn canonical_key(key: &str) -> Result<String, String> {
    let k = key.replace('-', "_");
    if KEYS.contains(&k.as_str()) {
        Ok(k)
    } else {
        Err(format!("unknown key '{key}'"))
    }
}

fn parse_m_list(text: &str) -> Result<Vec<f64>, CliError> {
    let items: Vec<&str> = text
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .collect();
    if items.is_empty() {
        return Err(CliError::Usage("m: empty list".into()));
    }
    items
        .iter()
        .map(|s| {
            let m: f64 = s
                .parse()
                .map_err(|_| CliError::Usage(format!("m: cannot parse '{s}'")))?;
            if m > 0.0 && m <= 1.0 {
                Ok(m)
            } else {
                Err(CliError::Usage(format!("m = {m} outside (0, 1]")))
            }
        })
        .collect()
}

/// Fully resolved settings for one command.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub seq: SequenceKind,
    /// `None` when no list was given; commands pick their own default.
    pub ms: Option<Vec<f64>>,
    pub k: KPolicy,
    pub machine: MachineParams,
    pub drive: DriveConfig,
    pub sim: SimConfig,
    pub alpha1: f64,
    pub alpha2: f64,
    pub out_dir: PathBuf,
}

impl RunConfig {
    /// `env_out` is the fallback output directory from the environment.
    pub fn resolve(s: &Settings, env_out: Option<String>) -> Result<Self, CliError> {
        let seq = match s.get("seq") {
            Some(v) => v.parse().map_err(CliError::Usage)?,
            None => SequenceKind::Svhe,
        };
        let ms = s.get("m").map(parse_m_list).transpose()?;
        let k = match s.get("k") {
            Some(v) => v.parse().map_err(CliError::Usage)?,
            None => KPolicy::Half,
        };

        let d = MachineParams::default();
        let machine = MachineParams {
            p_rated: s.number("p_rated")?.unwrap_or(d.p_rated),
            pole_count: s.number("poles")?.unwrap_or(d.pole_count),
            r_s: s.number("rs")?.unwrap_or(d.r_s),
            r_r: s.number("rr")?.unwrap_or(d.r_r),
            l_o: s.number("lo")?.unwrap_or(d.l_o),
            sigma_s: s.number("sigma_s")?.unwrap_or(d.sigma_s),
            sigma_r: s.number("sigma_r")?.unwrap_or(d.sigma_r),
        };
        machine.validate()?;

        let dd = DriveConfig::default();
        let drive = DriveConfig::new(
            s.number("vdc")?.unwrap_or(dd.v_dc),
            s.number("fbase")?.unwrap_or(dd.f_base),
        )?;

        let ds = SimConfig::default();
        let sim = SimConfig {
            dt: s.number("dt")?.unwrap_or(ds.dt),
            n_settle_cycles: s.number("settle_cycles")?.unwrap_or(ds.n_settle_cycles),
            n_measure_cycles: s.number("measure_cycles")?.unwrap_or(ds.n_measure_cycles),
            ..ds
        };
        sim.validate()?;

        let out_dir = s
            .get("out")
            .map(str::to_string)
            .or(env_out)
            .unwrap_or_else(|| ".".to_string());

        Ok(Self {
            seq,
            ms,
            k,
            machine,
            drive,
            sim,
            alpha1: s.number("alpha1")?.unwrap_or(15.0),
            alpha2: s.number("alpha2")?.unwrap_or(10.0),
            out_dir: PathBuf::from(out_dir),
        })
    }

    /// Stable text form of everything that affects a command's output.
    /// The output directory is left out so relocated runs hash alike.
    pub fn canonical(&self, command: &str) -> String {
        let mut s = String::new();
        let ms = self.ms.as_ref().map_or_else(
            || "default".to_string(),
            |v| {
                v.iter()
                    .map(|m| format!("{m:?}"))
                    .collect::<Vec<_>>()
                    .join(",")
            },
        );
        let m = &self.machine;
        let _ = writeln!(s, "command={command}");
        let _ = writeln!(s, "seq={}", self.seq);
        let _ = writeln!(s, "m={ms}");
        let _ = writeln!(s, "k={}", self.k);
        let _ = writeln!(s, "vdc={:?}", self.drive.v_dc);
        let _ = writeln!(s, "fbase={:?}", self.drive.f_base);
        let _ = writeln!(
            s,
            "machine={:?},{},{:?},{:?},{:?},{:?},{:?}",
            m.p_rated, m.pole_count, m.r_s, m.r_r, m.l_o, m.sigma_s, m.sigma_r
        );
        let _ = writeln!(
            s,
            "sim={:?},{},{},{}",
            self.sim.dt, self.sim.min_substeps, self.sim.n_settle_cycles, self.sim.n_measure_cycles
        );
        let _ = writeln!(s, "alpha={:?},{:?}", self.alpha1, self.alpha2);
        s
    }

    /// First 16 hex digits of the SHA-256 of [`Self::canonical`].
    pub fn hash(&self, command: &str) -> String {
        let digest = Sha256::digest(self.canonical(command).as_bytes());
        digest.iter().take(8).map(|b| format!("{b:02x}")).collect()
    }
}
