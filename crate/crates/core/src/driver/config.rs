//! Flat `key = value` problem configuration.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::bddc::ScalingKind;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scenario {
    Homogeneous,
    Checkerboard,
    Channels,
    Sinusoidal,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PbMode {
    Geometric,
    Material,
    Relaxed,
}

/// Which coefficients vary in the sinusoidal scenario.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Heterogeneous {
    Alpha,
    Beta,
    Both,
}

macro_rules! keyword_enum {
    ($t:ty, $what:literal, $($v:path => $s:literal),+) => {
        impl fmt::Display for $t {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(match self { $($v => $s),+ })
            }
        }

        impl FromStr for $t {
            type Err = Error;

            fn from_str(s: &str) -> Result<Self> {
                match s {
                    $($s => Ok($v),)+
                    _ => Err(Error::Config(format!("unknown {} `{s}`", $what))),
                }
            }
        }
    };
}

keyword_enum!(Scenario, "scenario",
    Scenario::Homogeneous => "homogeneous",
    Scenario::Checkerboard => "checkerboard",
    Scenario::Channels => "channels",
    Scenario::Sinusoidal => "sinusoidal");
keyword_enum!(PbMode, "pb mode",
    PbMode::Geometric => "geometric",
    PbMode::Material => "material",
    PbMode::Relaxed => "relaxed");
keyword_enum!(Heterogeneous, "coefficient selection",
    Heterogeneous::Alpha => "alpha",
    Heterogeneous::Beta => "beta",
    Heterogeneous::Both => "both");

#[derive(Debug, Clone, PartialEq)]
pub struct ProblemConfig {
    pub scenario: Scenario,
    /// Cells per axis; ignored when `h_ratio > 0`.
    pub cells: [usize; 3],
    pub lengths: [f64; 3],
    pub partition: [usize; 3],
    /// Cells per subdomain and axis (`H/h`); 0 means use `cells`.
    pub h_ratio: usize,
    pub order: usize,
    pub load: [f64; 3],
    pub alpha: f64,
    pub beta: f64,
    pub alpha_white: f64,
    pub beta_white: f64,
    pub alpha_black: f64,
    pub beta_black: f64,
    /// Sets the varying material to `(10^i, 10^-i)` when present.
    pub contrast_exp: Option<f64>,
    pub gamma: f64,
    pub c_max: f64,
    pub which: Heterogeneous,
    pub scaling: ScalingKind,
    pub perturbed: bool,
    pub pb_mode: PbMode,
    pub r_alpha: f64,
    pub r_beta: f64,
    pub split_connected: bool,
    pub tol: f64,
    pub maxit: usize,
    pub threads: usize,
    pub report: Option<String>,
    pub csv: Option<String>,
}

impl Default for ProblemConfig {
    fn default() -> Self {
        Self {
            scenario: Scenario::Homogeneous,
            cells: [8, 8, 8],
            lengths: [1.0, 1.0, 1.0],
            partition: [2, 2, 2],
            h_ratio: 4,
            order: 1,
            load: [1.0, 1.0, 1.0],
            alpha: 1.0,
            beta: 1.0,
            alpha_white: 1.0,
            beta_white: 1.0,
            alpha_black: 1.0,
            beta_black: 1.0,
            contrast_exp: None,
            gamma: 0.5,
            c_max: 6.0,
            which: Heterogeneous::Both,
            scaling: ScalingKind::Cardinality,
            perturbed: false,
            pb_mode: PbMode::Geometric,
            r_alpha: f64::INFINITY,
            r_beta: f64::INFINITY,
            split_connected: false,
            tol: 1e-6,
            maxit: 1000,
            threads: 0,
            report: None,
            csv: None,
        }
    }
}

fn parse<T: FromStr>(key: &str, value: &str) -> Result<T> {
    value.parse().map_err(|_| Error::Config(format!("bad value `{value}` for `{key}`")))
}

fn parse_bool(key: &str, value: &str) -> Result<bool> {
    match value {
        "true" | "1" | "yes" | "on" => Ok(true),
        "false" | "0" | "no" | "off" => Ok(false),
        _ => Err(Error::Config(format!("bad value `{value}` for `{key}`"))),
    }
}

impl ProblemConfig {
    pub const KEYS: &'static [&'static str] = &[
        "scenario",
        "mesh.nx",
        "mesh.ny",
        "mesh.nz",
        "mesh.lx",
        "mesh.ly",
        "mesh.lz",
        "mesh.h_ratio",
        "partition.nx",
        "partition.ny",
        "partition.nz",
        "fe.order",
        "load.x",
        "load.y",
        "load.z",
        "scenario.alpha",
        "scenario.beta",
        "scenario.alpha_white",
        "scenario.beta_white",
        "scenario.alpha_black",
        "scenario.beta_black",
        "scenario.contrast_exp",
        "scenario.gamma",
        "scenario.c_max",
        "scenario.which",
        "scaling.kind",
        "bddc.perturbed",
        "pb.mode",
        "pb.r_alpha",
        "pb.r_beta",
        "pb.split_connected",
        "solver.tol",
        "solver.maxit",
        "run.threads",
        "output.report",
        "output.csv",
    ];

    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let v = value.trim();
        match key {
            "scenario" => self.scenario = v.parse()?,
            "mesh.nx" => self.cells[0] = parse(key, v)?,
            "mesh.ny" => self.cells[1] = parse(key, v)?,
            "mesh.nz" => self.cells[2] = parse(key, v)?,
            "mesh.lx" => self.lengths[0] = parse(key, v)?,
            "mesh.ly" => self.lengths[1] = parse(key, v)?,
            "mesh.lz" => self.lengths[2] = parse(key, v)?,
            "mesh.h_ratio" => self.h_ratio = parse(key, v)?,
            "partition.nx" => self.partition[0] = parse(key, v)?,
            "partition.ny" => self.partition[1] = parse(key, v)?,
            "partition.nz" => self.partition[2] = parse(key, v)?,
            "fe.order" => self.order = parse(key, v)?,
            "load.x" => self.load[0] = parse(key, v)?,
            "load.y" => self.load[1] = parse(key, v)?,
            "load.z" => self.load[2] = parse(key, v)?,
            "scenario.alpha" => self.alpha = parse(key, v)?,
            "scenario.beta" => self.beta = parse(key, v)?,
            "scenario.alpha_white" => self.alpha_white = parse(key, v)?,
            "scenario.beta_white" => self.beta_white = parse(key, v)?,
            "scenario.alpha_black" => self.alpha_black = parse(key, v)?,
            "scenario.beta_black" => self.beta_black = parse(key, v)?,
            "scenario.contrast_exp" => self.contrast_exp = if v == "none" { None } else { Some(parse(key, v)?) },
            "scenario.gamma" => self.gamma = parse(key, v)?,
            "scenario.c_max" => self.c_max = parse(key, v)?,
            "scenario.which" => self.which = v.parse()?,
            "scaling.kind" => self.scaling = v.parse()?,
            "bddc.perturbed" => self.perturbed = parse_bool(key, v)?,
            "pb.mode" => self.pb_mode = v.parse()?,
            "pb.r_alpha" => self.r_alpha = parse(key, v)?,
            "pb.r_beta" => self.r_beta = parse(key, v)?,
            "pb.split_connected" => self.split_connected = parse_bool(key, v)?,
            "solver.tol" => self.tol = parse(key, v)?,
            "solver.maxit" => self.maxit = parse(key, v)?,
            "run.threads" => self.threads = parse(key, v)?,
            "output.report" => self.report = if v.is_empty() { None } else { Some(v.to_string()) },
            "output.csv" => self.csv = if v.is_empty() { None } else { Some(v.to_string()) },
            _ => return Err(Error::Config(format!("unknown key `{key}`"))),
        }
        Ok(())
    }

    pub fn get(&self, key: &str) -> Option<String> {
        let opt = |o: &Option<String>| o.clone().unwrap_or_default();
        Some(match key {
            "scenario" => self.scenario.to_string(),
            "mesh.nx" => self.cells[0].to_string(),
            "mesh.ny" => self.cells[1].to_string(),
            "mesh.nz" => self.cells[2].to_string(),
            "mesh.lx" => self.lengths[0].to_string(),
            "mesh.ly" => self.lengths[1].to_string(),
            "mesh.lz" => self.lengths[2].to_string(),
            "mesh.h_ratio" => self.h_ratio.to_string(),
            "partition.nx" => self.partition[0].to_string(),
            "partition.ny" => self.partition[1].to_string(),
            "partition.nz" => self.partition[2].to_string(),
            "fe.order" => self.order.to_string(),
            "load.x" => self.load[0].to_string(),
            "load.y" => self.load[1].to_string(),
            "load.z" => self.load[2].to_string(),
            "scenario.alpha" => self.alpha.to_string(),
            "scenario.beta" => self.beta.to_string(),
            "scenario.alpha_white" => self.alpha_white.to_string(),
            "scenario.beta_white" => self.beta_white.to_string(),
            "scenario.alpha_black" => self.alpha_black.to_string(),
            "scenario.beta_black" => self.beta_black.to_string(),
            "scenario.contrast_exp" => self.contrast_exp.map_or("none".into(), |v| v.to_string()),
            "scenario.gamma" => self.gamma.to_string(),
            "scenario.c_max" => self.c_max.to_string(),
            "scenario.which" => self.which.to_string(),
            "scaling.kind" => self.scaling.to_string(),
            "bddc.perturbed" => self.perturbed.to_string(),
            "pb.mode" => self.pb_mode.to_string(),
            "pb.r_alpha" => self.r_alpha.to_string(),
            "pb.r_beta" => self.r_beta.to_string(),
            "pb.split_connected" => self.split_connected.to_string(),
            "solver.tol" => self.tol.to_string(),
            "solver.maxit" => self.maxit.to_string(),
            "run.threads" => self.threads.to_string(),
            "output.report" => opt(&self.report),
            "output.csv" => opt(&self.csv),
            _ => return None,
        })
    }

    /// Parses `key = value` lines; `#` starts a comment.
    pub fn parse_str(text: &str) -> Result<Self> {
        let mut cfg = Self::default();
        for (n, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("line {}: expected key = value", n + 1)))?;
            cfg.set(k.trim(), v).map_err(|e| e.context(format!("line {}", n + 1)))?;
        }
        Ok(cfg)
    }

    pub fn from_file(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::from(e).context(path.display().to_string()))?;
        Self::parse_str(&text)
    }

    /// Applies `key=value` overrides, with or without leading dashes.
    pub fn apply_overrides<S: AsRef<str>>(&mut self, overrides: &[S]) -> Result<()> {
        for o in overrides {
            let o = o.as_ref().trim_start_matches('-');
            let (k, v) = o.split_once('=').ok_or_else(|| Error::Config(format!("override `{o}` is not key=value")))?;
            self.set(k.trim(), v)?;
        }
        Ok(())
    }

    pub fn to_map(&self) -> BTreeMap<String, String> {
        Self::KEYS.iter().map(|&k| (k.to_string(), self.get(k).expect("known key"))).collect()
    }

    pub fn to_text(&self) -> String {
        Self::KEYS.iter().map(|&k| format!("{k} = {}\n", self.get(k).expect("known key"))).collect()
    }

    pub fn mesh_cells(&self) -> [usize; 3] {
        if self.h_ratio > 0 {
            [0, 1, 2].map(|d| self.partition[d] * self.h_ratio)
        } else {
            self.cells
        }
    }

    pub fn n_subdomains(&self) -> usize {
        self.partition.iter().product()
    }

    /// Coefficient contrast reported in sweeps.
    pub fn contrast(&self) -> f64 {
        match self.scenario {
            Scenario::Homogeneous => 1.0,
            Scenario::Checkerboard => {
                let (a, b) = self.black();
                a / b
            }
            Scenario::Channels => {
                let (a, b) = self.white();
                a / b
            }
            Scenario::Sinusoidal => 10f64.powf(self.c_max),
        }
    }

    /// Checkerboard black material.
    pub fn black(&self) -> (f64, f64) {
        match (self.scenario, self.contrast_exp) {
            (Scenario::Checkerboard, Some(i)) => (10f64.powf(i), 10f64.powf(-i)),
            _ => (self.alpha_black, self.beta_black),
        }
    }

    /// Checkerboard white material, or the channel material.
    pub fn white(&self) -> (f64, f64) {
        match (self.scenario, self.contrast_exp) {
            (Scenario::Channels, Some(i)) => (10f64.powf(i), 10f64.powf(-i)),
            _ => (self.alpha_white, self.beta_white),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Config(m));
        if self.order != 1 {
            return bad(format!("only lowest-order elements are supported, got fe.order = {}", self.order));
        }
        let cells = self.mesh_cells();
        for d in 0..3 {
            if self.partition[d] == 0 || cells[d] == 0 || !cells[d].is_multiple_of(self.partition[d]) {
                return bad(format!("{} cells along axis {d} cannot be split into {} subdomains", cells[d], self.partition[d]));
            }
            if !(self.lengths[d] > 0.0) {
                return bad(format!("mesh length along axis {d} must be positive"));
            }
        }
        if !(self.tol > 0.0 && self.tol < 1.0) {
            return bad(format!("solver.tol must lie in (0, 1), got {}", self.tol));
        }
        for (name, v) in [("pb.r_alpha", self.r_alpha), ("pb.r_beta", self.r_beta)] {
            if !(v > 1.0) {
                return bad(format!("{name} must be > 1, got {v}"));
            }
        }
        for (name, v) in [
            ("scenario.alpha", self.alpha),
            ("scenario.alpha_white", self.white().0),
            ("scenario.alpha_black", self.black().0),
        ] {
            if !(v >= 0.0 && v.is_finite()) {
                return bad(format!("{name} must be finite and >= 0, got {v}"));
            }
        }
        for (name, v) in [
            ("scenario.beta", self.beta),
            ("scenario.beta_white", self.white().1),
            ("scenario.beta_black", self.black().1),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return bad(format!("{name} must be finite and > 0, got {v}"));
            }
        }
        if self.scenario == Scenario::Channels {
            if !(self.gamma > 0.0 && self.gamma <= 1.0) {
                return bad(format!("scenario.gamma must lie in (0, 1], got {}", self.gamma));
            }
            for d in 0..3 {
                let w = self.gamma * (cells[d] / self.partition[d]) as f64;
                if (w - w.round()).abs() > 1e-9 || w.round() < 1.0 {
                    return bad(format!("channel width γH = {w} cells along axis {d} is not a whole number of cells"));
                }
            }
        }
        if self.scenario == Scenario::Sinusoidal && !(self.c_max >= 0.0) {
            return bad(format!("scenario.c_max must be >= 0, got {}", self.c_max));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn text_round_trip() {
        let mut c = ProblemConfig::default();
        c.scenario = Scenario::Channels;
        c.gamma = 0.25;
        c.r_alpha = 1e3;
        c.tol = 1.0 / 3.0;
        c.contrast_exp = Some(-2.0);
        c.report = Some("out.json".into());
        let back = ProblemConfig::parse_str(&c.to_text()).unwrap();
        assert_eq!(back, c);
        let inf = ProblemConfig::parse_str("pb.r_beta = inf").unwrap();
        assert_eq!(inf.r_beta, f64::INFINITY);
    }

    #[test]
    fn comments_and_overrides() {
        let mut c = ProblemConfig::parse_str("# run\nscenario = checkerboard # trailing\n\nmesh.h_ratio=8\n").unwrap();
        assert_eq!(c.scenario, Scenario::Checkerboard);
        c.apply_overrides(&["--partition.nx=3", "bddc.perturbed=true"]).unwrap();
        assert_eq!(c.partition, [3, 2, 2]);
        assert!(c.perturbed);
        assert_eq!(c.mesh_cells(), [24, 16, 16]);
    }

    #[test]
    fn errors() {
        assert!(ProblemConfig::parse_str("mesh.nx").is_err());
        assert!(ProblemConfig::parse_str("mesh.bogus = 1").is_err());
        assert!(ProblemConfig::parse_str("mesh.nx = -1").is_err());
        assert!(ProblemConfig::parse_str("scaling.kind = deluxe").is_err());
        let mut c = ProblemConfig::default();
        c.scenario = Scenario::Channels;
        c.gamma = 0.3;
        assert!(c.validate().is_err());
        c.gamma = 0.25;
        assert!(c.validate().is_ok());
        c.order = 2;
        assert!(c.validate().is_err());
    }

    #[test]
    fn every_key_is_settable() {
        let c = ProblemConfig::default();
        let mut d = ProblemConfig::default();
        for k in ProblemConfig::KEYS {
            d.set(k, &c.get(k).unwrap()).unwrap();
        }
        assert_eq!(c, d);
    }

    #[test]
    fn contrast_exponent() {
        let mut c = ProblemConfig::default();
        c.scenario = Scenario::Checkerboard;
        c.contrast_exp = Some(3.0);
        assert_eq!(c.black(), (1e3, 1e-3));
        assert!((c.contrast() - 1e6).abs() < 1e-6);
        c.scenario = Scenario::Channels;
        assert_eq!(c.white(), (1e3, 1e-3));
    }
}
