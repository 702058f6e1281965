//! Flat `key = value` experiment configuration.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::assembly::{Params, PenaltyVariant};
use crate::error::{Error, Result};
use crate::mesh::Rect;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExperimentKind {
    Convergence,
    Sliver,
    Condition,
}

impl ExperimentKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ExperimentKind::Convergence => "convergence",
            ExperimentKind::Sliver => "sliver",
            ExperimentKind::Condition => "condition",
        }
    }
}

/// Physical domain.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GeometrySpec {
    Circle { center: [f64; 2], radius: f64 },
    Box { min: [f64; 2], max: [f64; 2] },
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub kind: ExperimentKind,
    pub geometry: GeometrySpec,
    /// Background box; for the sliver study it is dilated around the domain.
    pub mesh_box: Rect<f64>,
    /// Cells per direction of each refinement level.
    pub levels: Vec<usize>,
    pub epsilons: Vec<f64>,
    pub gamma_sigmas: Vec<f64>,
    pub params: Params<f64>,
    pub output: Option<PathBuf>,
}

const KEYS: &[&str] = &[
    "experiment.kind",
    "geometry.kind",
    "geometry.center",
    "geometry.radius",
    "geometry.min",
    "geometry.max",
    "mesh.box_min",
    "mesh.box_max",
    "mesh.levels",
    "sweep.epsilons",
    "sweep.gamma_sigmas",
    "params.eta",
    "params.gamma_u",
    "params.gamma_p",
    "params.gamma_sigma",
    "params.gamma_b",
    "params.penalty",
    "params.volume_degree",
    "params.boundary_degree",
    "params.error_degree",
    "output.path",
];

fn config_err(line: usize, message: impl Into<String>) -> Error {
    Error::Config {
        line,
        message: message.into(),
    }
}

/// Parsed lines: value and line number per key.
#[derive(Debug, Default)]
struct RawConfig {
    entries: BTreeMap<String, (String, usize)>,
}

impl RawConfig {
    fn parse(text: &str) -> Result<Self> {
        let mut entries = BTreeMap::new();
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                config_err(line_no, format!("expected key = value, got {line:?}"))
            })?;
            let key = key.trim();
            let value = value.trim();
            if !KEYS.contains(&key) {
                return Err(config_err(line_no, format!("unknown key {key:?}")));
            }
            if value.is_empty() {
                return Err(config_err(line_no, format!("empty value for {key}")));
            }
            if entries
                .insert(key.to_string(), (value.to_string(), line_no))
                .is_some()
            {
                return Err(config_err(line_no, format!("duplicate key {key}")));
            }
        }
        Ok(Self { entries })
    }

    fn get(&self, key: &str) -> Option<&(String, usize)> {
        self.entries.get(key)
    }

    fn scalar<V: FromStr>(&self, key: &str, default: V) -> Result<V> {
        match self.get(key) {
            None => Ok(default),
            Some((v, line)) => v
                .parse()
                .map_err(|_| config_err(*line, format!("cannot parse {key} = {v:?}"))),
        }
    }

    fn list<V: FromStr>(&self, key: &str) -> Result<Option<Vec<V>>> {
        match self.get(key) {
            None => Ok(None),
            Some((v, line)) => v
                .split(',')
                .map(|s| {
                    s.trim().parse().map_err(|_| {
                        config_err(*line, format!("cannot parse entry {s:?} of {key}"))
                    })
                })
                .collect::<Result<Vec<V>>>()
                .map(Some),
        }
    }

    fn point(&self, key: &str, default: [f64; 2]) -> Result<[f64; 2]> {
        match self.list::<f64>(key)? {
            None => Ok(default),
            Some(v) if v.len() == 2 => Ok([v[0], v[1]]),
            Some(_) => Err(config_err(
                self.line(key),
                format!("{key} needs two comma separated numbers"),
            )),
        }
    }

    fn line(&self, key: &str) -> usize {
        self.get(key).map_or(0, |e| e.1)
    }
}

impl ExperimentConfig {
    /// Defaults of the given study.
    pub fn preset(kind: ExperimentKind) -> Self {
        match kind {
            ExperimentKind::Convergence => Self {
                kind,
                geometry: GeometrySpec::Circle {
                    center: [0.0, 0.0],
                    radius: 1.0,
                },
                mesh_box: Rect::centered_square(1.5),
                levels: vec![8, 16, 32, 64],
                epsilons: Vec::new(),
                gamma_sigmas: vec![0.1],
                params: Params::default(),
                output: None,
            },
            ExperimentKind::Sliver => Self {
                kind,
                geometry: GeometrySpec::Box {
                    min: [-1.0, -1.0],
                    max: [1.0, 1.0],
                },
                mesh_box: Rect::centered_square(1.0),
                levels: vec![16],
                epsilons: vec![0.5, 0.1, 0.02, 0.004],
                gamma_sigmas: vec![0.0, 0.1],
                params: Params::sliver(),
                output: None,
            },
            ExperimentKind::Condition => Self {
                kind,
                geometry: GeometrySpec::Box {
                    min: [-1.0, -1.0],
                    max: [1.0, 1.0],
                },
                mesh_box: Rect::centered_square(1.0),
                levels: vec![10],
                epsilons: vec![0.5, 0.1, 0.02, 0.004, 0.0008],
                gamma_sigmas: vec![0.0, 0.001, 0.1, 1.0],
                params: Params::sliver(),
                output: None,
            },
        }
    }

    pub fn parse(text: &str) -> Result<Self> {
        let raw = RawConfig::parse(text)?;
        let kind = match raw.get("experiment.kind") {
            None => return Err(config_err(0, "missing experiment.kind")),
            Some((v, line)) => match v.as_str() {
                "convergence" => ExperimentKind::Convergence,
                "sliver" => ExperimentKind::Sliver,
                "condition" => ExperimentKind::Condition,
                other => {
                    return Err(config_err(
                        *line,
                        format!("unknown experiment kind {other:?}"),
                    ))
                }
            },
        };
        let mut cfg = Self::preset(kind);

        if let Some((g, line)) = raw.get("geometry.kind") {
            cfg.geometry = match g.as_str() {
                "circle" => GeometrySpec::Circle {
                    center: [0.0, 0.0],
                    radius: 1.0,
                },
                "box" => GeometrySpec::Box {
                    min: [-1.0, -1.0],
                    max: [1.0, 1.0],
                },
                other => {
                    return Err(config_err(
                        *line,
                        format!("unknown geometry kind {other:?}"),
                    ))
                }
            };
        }
        cfg.geometry = match cfg.geometry {
            GeometrySpec::Circle { center, radius } => {
                for k in ["geometry.min", "geometry.max"] {
                    if raw.get(k).is_some() {
                        return Err(config_err(
                            raw.line(k),
                            format!("{k} does not apply to a circle"),
                        ));
                    }
                }
                GeometrySpec::Circle {
                    center: raw.point("geometry.center", center)?,
                    radius: raw.scalar("geometry.radius", radius)?,
                }
            }
            GeometrySpec::Box { min, max } => {
                for k in ["geometry.center", "geometry.radius"] {
                    if raw.get(k).is_some() {
                        return Err(config_err(
                            raw.line(k),
                            format!("{k} does not apply to a box"),
                        ));
                    }
                }
                GeometrySpec::Box {
                    min: raw.point("geometry.min", min)?,
                    max: raw.point("geometry.max", max)?,
                }
            }
        };
        cfg.mesh_box = Rect::new(
            raw.point("mesh.box_min", cfg.mesh_box.min)?,
            raw.point("mesh.box_max", cfg.mesh_box.max)?,
        );
        if let Some(l) = raw.list("mesh.levels")? {
            cfg.levels = l;
        }
        if let Some(e) = raw.list("sweep.epsilons")? {
            cfg.epsilons = e;
        }
        if let Some(g) = raw.list("sweep.gamma_sigmas")? {
            cfg.gamma_sigmas = g;
        }
        let p = &mut cfg.params;
        p.eta = raw.scalar("params.eta", p.eta)?;
        p.gamma_u = raw.scalar("params.gamma_u", p.gamma_u)?;
        p.gamma_p = raw.scalar("params.gamma_p", p.gamma_p)?;
        p.gamma_b = raw.scalar("params.gamma_b", p.gamma_b)?;
        p.volume_degree = raw.scalar("params.volume_degree", p.volume_degree)?;
        p.boundary_degree = raw.scalar("params.boundary_degree", p.boundary_degree)?;
        p.error_degree = raw.scalar("params.error_degree", p.error_degree)?;
        if let Some((v, line)) = raw.get("params.penalty") {
            p.penalty = match v.as_str() {
                "face" => PenaltyVariant::Face,
                "element" => PenaltyVariant::Element,
                other => {
                    return Err(config_err(
                        *line,
                        format!("unknown penalty variant {other:?}"),
                    ))
                }
            };
        }
        if kind == ExperimentKind::Convergence {
            if raw.get("sweep.gamma_sigmas").is_some() {
                return Err(config_err(
                    raw.line("sweep.gamma_sigmas"),
                    "the convergence study takes params.gamma_sigma",
                ));
            }
            p.gamma_sigma = raw.scalar("params.gamma_sigma", p.gamma_sigma)?;
            cfg.gamma_sigmas = vec![p.gamma_sigma];
        } else if raw.get("params.gamma_sigma").is_some() {
            return Err(config_err(
                raw.line("params.gamma_sigma"),
                "sweeps take sweep.gamma_sigmas instead of params.gamma_sigma",
            ));
        }
        cfg.output = raw.get("output.path").map(|(v, _)| PathBuf::from(v));
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| config_err(0, format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(config_err(0, msg));
        if let Err(e) = self.params.validate() {
            return bad(e.to_string());
        }
        match self.geometry {
            GeometrySpec::Circle { radius, center } => {
                if !(radius > 0.0) || !radius.is_finite() || !center.iter().all(|c| c.is_finite()) {
                    return bad(format!("invalid circle center {center:?} radius {radius}"));
                }
            }
            GeometrySpec::Box { min, max } => {
                if Rect::new(min, max).is_degenerate() {
                    return bad(format!("degenerate box {min:?} - {max:?}"));
                }
            }
        }
        if self.mesh_box.is_degenerate() {
            return bad("degenerate mesh box".into());
        }
        if self.levels.is_empty() || self.levels.contains(&0) {
            return bad(format!(
                "mesh levels must be positive, got {:?}",
                self.levels
            ));
        }
        if self.gamma_sigmas.is_empty()
            || self
                .gamma_sigmas
                .iter()
                .any(|g| !(*g >= 0.0) || !g.is_finite())
        {
            return bad(format!(
                "gamma_sigma values must be non-negative, got {:?}",
                self.gamma_sigmas
            ));
        }
        match self.kind {
            ExperimentKind::Convergence => {
                if self.levels.len() < 3 {
                    return bad(format!(
                        "the convergence study needs at least 3 levels, got {}",
                        self.levels.len()
                    ));
                }
                if self.levels.windows(2).any(|w| w[1] <= w[0]) {
                    return bad(format!("levels must increase, got {:?}", self.levels));
                }
            }
            ExperimentKind::Sliver | ExperimentKind::Condition => {
                if !matches!(self.geometry, GeometrySpec::Box { .. }) {
                    return bad(format!(
                        "the {} study needs a box domain",
                        self.kind.as_str()
                    ));
                }
                if self.epsilons.is_empty()
                    || self.epsilons.iter().any(|e| !(*e > 0.0 && *e <= 1.0))
                {
                    return bad(format!(
                        "epsilon values must lie in (0, 1], got {:?}",
                        self.epsilons
                    ));
                }
                if self.kind == ExperimentKind::Condition && self.levels.len() != 1 {
                    return bad("the condition study uses a single mesh level".into());
                }
            }
        }
        Ok(())
    }

    /// Canonical text form; parsing it gives back an equal configuration.
    pub fn serialize(&self) -> String {
        let mut m: BTreeMap<&str, String> = BTreeMap::new();
        let pt = |p: [f64; 2]| format!("{:?},{:?}", p[0], p[1]);
        let list = |v: &[f64]| {
            v.iter()
                .map(|x| format!("{x:?}"))
                .collect::<Vec<_>>()
                .join(",")
        };
        m.insert("experiment.kind", self.kind.as_str().into());
        match self.geometry {
            GeometrySpec::Circle { center, radius } => {
                m.insert("geometry.kind", "circle".into());
                m.insert("geometry.center", pt(center));
                m.insert("geometry.radius", format!("{radius:?}"));
            }
            GeometrySpec::Box { min, max } => {
                m.insert("geometry.kind", "box".into());
                m.insert("geometry.min", pt(min));
                m.insert("geometry.max", pt(max));
            }
        }
        m.insert("mesh.box_min", pt(self.mesh_box.min));
        m.insert("mesh.box_max", pt(self.mesh_box.max));
        m.insert(
            "mesh.levels",
            self.levels
                .iter()
                .map(|l| l.to_string())
                .collect::<Vec<_>>()
                .join(","),
        );
        if self.kind == ExperimentKind::Convergence {
            m.insert(
                "params.gamma_sigma",
                format!("{:?}", self.params.gamma_sigma),
            );
        } else {
            m.insert("sweep.epsilons", list(&self.epsilons));
            m.insert("sweep.gamma_sigmas", list(&self.gamma_sigmas));
        }
        let p = &self.params;
        m.insert("params.eta", format!("{:?}", p.eta));
        m.insert("params.gamma_u", format!("{:?}", p.gamma_u));
        m.insert("params.gamma_p", format!("{:?}", p.gamma_p));
        m.insert("params.gamma_b", format!("{:?}", p.gamma_b));
        m.insert("params.penalty", p.penalty.to_string());
        m.insert("params.volume_degree", p.volume_degree.to_string());
        m.insert("params.boundary_degree", p.boundary_degree.to_string());
        m.insert("params.error_degree", p.error_degree.to_string());
        if let Some(o) = &self.output {
            m.insert("output.path", o.display().to_string());
        }
        let mut out = String::new();
        for (k, v) in m {
            let _ = writeln!(out, "{k} = {v}");
        }
        out
    }
}
