//! Benchmark scenarios: TOML configuration, model construction, runs and
//! their outputs.
//!
//! A scenario file describes one clamped shell: reference geometry, material,
//! mesh, edge loads, an optional hard-magnetic actuation and solver settings.
//! All quantities are SI. Every load is applied on the tip edge (`xi1 = L`)
//! and the root edge (`xi1 = 0`) is clamped. See `docs/scenario.md` for the
//! schema.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::constitutive::{lame_to_young, Material};
use crate::error::{Result, ShellError};
use crate::fem::{
    total_potential, write_mesh_dump, Edge, ElementOptions, LoadFrame, ShearTreatment, ShellMesh,
    ShellModel, ShellState,
};
use crate::kinematics::{
    build_cylindrical_arch, build_flat_plate, CylindricalArch, FlatPlate, ParamPoint,
    ReferenceSurface,
};
use crate::liegroup::{log_so3, Pose, Twist, Vec3, Wrench};
use crate::magnetics::{MagneticEnvironment, MU0};
use crate::solver::{solve, SolveReport, SolverSettings};

/// Bundled scenarios as `(benchmark name, file source)`.
pub const BUNDLED: &[(&str, &str)] = &[
    ("end_shear", include_str!("../scenarios/end_shear.cfg")),
    ("rollup_2pi", include_str!("../scenarios/rollup.cfg")),
    ("rollup_4pi", include_str!("../scenarios/rollup_4pi.cfg")),
    ("rollup_6pi", include_str!("../scenarios/rollup_6pi.cfg")),
    (
        "drilling_2pi",
        include_str!("../scenarios/drilling_2pi.cfg"),
    ),
    (
        "drilling_4pi",
        include_str!("../scenarios/drilling_4pi.cfg"),
    ),
    ("torsion_pi", include_str!("../scenarios/torsion_pi.cfg")),
    ("torsion_2pi", include_str!("../scenarios/torsion_2pi.cfg")),
    ("torsion_3pi", include_str!("../scenarios/torsion_3pi.cfg")),
    (
        "arch_tangent",
        include_str!("../scenarios/arch_tangent.cfg"),
    ),
    (
        "arch_transverse",
        include_str!("../scenarios/arch_transverse.cfg"),
    ),
    ("arch_rollup", include_str!("../scenarios/arch_rollup.cfg")),
    (
        "magnetic_cantilever_41",
        include_str!("../scenarios/magnetic_cantilever_41.cfg"),
    ),
    (
        "magnetic_cantilever_20_5",
        include_str!("../scenarios/magnetic_cantilever_20_5.cfg"),
    ),
    (
        "magnetic_cantilever_17_5",
        include_str!("../scenarios/magnetic_cantilever_17_5.cfg"),
    ),
    (
        "magnetic_cantilever_10",
        include_str!("../scenarios/magnetic_cantilever_10.cfg"),
    ),
    (
        "magnetic_plate_a",
        include_str!("../scenarios/magnetic_plate_a.cfg"),
    ),
    (
        "magnetic_plate_b",
        include_str!("../scenarios/magnetic_plate_b.cfg"),
    ),
    (
        "antiparallel",
        include_str!("../scenarios/antiparallel.cfg"),
    ),
];

pub fn benchmark_names() -> impl Iterator<Item = &'static str> {
    BUNDLED.iter().map(|(n, _)| *n)
}

pub fn bundled_source(name: &str) -> Result<&'static str> {
    BUNDLED
        .iter()
        .find(|(n, _)| *n == name)
        .map(|(_, s)| *s)
        .ok_or_else(|| ShellError::UnknownBenchmark(name.to_string()))
}

pub fn load_benchmark(name: &str) -> Result<ScenarioConfig> {
    parse_scenario_str(bundled_source(name)?)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GeometryKind {
    Flat,
    Arch,
}

#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeometryConfig {
    pub kind: GeometryKind,
    /// Flat plates: length along `xi1`.
    pub length: Option<f64>,
    pub width: f64,
    /// Arches: radius and swept angle (radians).
    pub radius: Option<f64>,
    pub angle: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MaterialConfig {
    pub youngs_modulus: Option<f64>,
    pub poisson_ratio: Option<f64>,
    /// Lamé pair, converted to `(E, nu)`.
    pub shear_modulus: Option<f64>,
    pub lame_lambda: Option<f64>,
    pub thickness: f64,
}

#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeshConfig {
    pub nx: usize,
    pub ny: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LoadKind {
    /// Moment about `-d2`: positive values curl the strip towards `+d3`.
    EndMoment,
    /// Force along `+E3` (dead) or `+d3` (follower).
    EndShear,
    /// Moment about `d1`.
    Torsion,
    /// Moment about `d3`.
    Drilling,
    /// Force along `d1`.
    Tangential,
    /// Force along `d3`.
    Transverse,
    /// `components` (force; moment) scaled by `magnitude`.
    EdgeWrench,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FrameKind {
    Dead,
    Follower,
}

#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LoadConfig {
    pub kind: LoadKind,
    /// Resultant over the tip edge at full load.
    pub magnitude: f64,
    /// Defaults to `follower` except for `end_shear`.
    pub frame: Option<FrameKind>,
    pub components: Option<[f64; 6]>,
}

#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MagneticConfig {
    /// Remanent flux density in the reference director basis `(d1, d2, d3)`, T.
    pub remanent: [f64; 3],
    /// Applied flux density at full load in the spatial frame, T.
    pub applied: [f64; 3],
    pub mu0: Option<f64>,
}

#[derive(Clone, Debug, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverConfig {
    pub load_steps: Option<usize>,
    pub tol_residual: Option<f64>,
    pub tol_relative: Option<f64>,
    pub max_iters: Option<usize>,
    pub damping: Option<f64>,
    pub max_halvings: Option<usize>,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ShearConfig {
    #[default]
    Centroid,
    Gauss,
}

#[derive(Clone, Debug, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ElementConfig {
    #[serde(default)]
    pub shear: ShearConfig,
    #[serde(default)]
    pub reduced_inplane: bool,
}

#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    /// Write a deformed mesh dump after every load step.
    #[serde(default = "default_true")]
    pub mesh_dumps: bool,
}

fn default_true() -> bool {
    true
}

impl Default for OutputConfig {
    fn default() -> Self {
        OutputConfig { mesh_dumps: true }
    }
}

#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub name: String,
    #[serde(default)]
    pub description: String,
    pub geometry: GeometryConfig,
    pub material: MaterialConfig,
    pub mesh: MeshConfig,
    #[serde(default, rename = "load")]
    pub loads: Vec<LoadConfig>,
    pub magnetic: Option<MagneticConfig>,
    #[serde(default)]
    pub solver: SolverConfig,
    #[serde(default)]
    pub element: ElementConfig,
    #[serde(default)]
    pub output: OutputConfig,
}

fn line_at(source: &str, offset: usize) -> usize {
    source[..offset.min(source.len())].matches('\n').count() + 1
}

/// Line of `key` inside `[section]` (or of the section header when the key
/// is absent).
fn line_of(source: &str, key: &str) -> Option<usize> {
    let (section, field) = match key.rsplit_once('.') {
        Some((s, f)) => (Some(s), f),
        None => (None, key),
    };
    let mut in_section = section.is_none();
    let mut header = None;
    for (i, raw) in source.lines().enumerate() {
        let line = raw.trim();
        if line.starts_with('[') {
            let name = line.trim_matches(|c| c == '[' || c == ']').trim();
            in_section = section.is_some_and(|s| s.split('[').next() == Some(name));
            if in_section && header.is_none() {
                header = Some(i + 1);
            }
            continue;
        }
        if in_section {
            if let Some((k, _)) = line.split_once('=') {
                if k.trim() == field {
                    return Some(i + 1);
                }
            }
        }
    }
    header
}

/// Parses and validates a scenario file.
pub fn parse_scenario(path: &Path) -> Result<ScenarioConfig> {
    let source = fs::read_to_string(path)?;
    parse_scenario_str(&source)
}

pub fn parse_scenario_str(source: &str) -> Result<ScenarioConfig> {
    let cfg: ScenarioConfig = toml::from_str(source).map_err(|e| {
        let message = e.message().to_string();
        let key = message
            .split('`')
            .nth(1)
            .filter(|_| message.contains('`'))
            .unwrap_or("")
            .to_string();
        ShellError::Config {
            key,
            line: e.span().map(|s| line_at(source, s.start)),
            message,
        }
    })?;
    cfg.validate().map_err(|e| match e {
        ShellError::Config {
            key,
            line: None,
            message,
        } => ShellError::Config {
            line: line_of(source, &key),
            key,
            message,
        },
        other => other,
    })?;
    Ok(cfg)
}

fn positive(key: &str, value: Option<f64>) -> Result<f64> {
    match value {
        None => Err(ShellError::config(key, "missing required value")),
        Some(v) if v > 0.0 && v.is_finite() => Ok(v),
        Some(v) => Err(ShellError::config(
            key,
            format!("must be positive, got {v}"),
        )),
    }
}

impl ScenarioConfig {
    pub fn validate(&self) -> Result<()> {
        if self.name.trim().is_empty() {
            return Err(ShellError::config("name", "must not be empty"));
        }
        self.surface()?;
        self.material()?;
        if self.mesh.nx == 0 {
            return Err(ShellError::config("mesh.nx", "must be at least 1"));
        }
        if self.mesh.ny == 0 {
            return Err(ShellError::config("mesh.ny", "must be at least 1"));
        }
        for load in &self.loads {
            if !load.magnitude.is_finite() {
                return Err(ShellError::config("load.magnitude", "must be finite"));
            }
            match (load.kind, load.components) {
                (LoadKind::EdgeWrench, None) => {
                    return Err(ShellError::config(
                        "load.components",
                        "edge_wrench needs six components",
                    ))
                }
                (LoadKind::EdgeWrench, Some(_)) | (_, None) => {}
                (_, Some(_)) => {
                    return Err(ShellError::config(
                        "load.components",
                        "only edge_wrench loads take components",
                    ))
                }
            }
        }
        if let Some(m) = &self.magnetic {
            if m.remanent.iter().chain(&m.applied).any(|v| !v.is_finite()) {
                return Err(ShellError::config("magnetic.remanent", "must be finite"));
            }
            if let Some(mu0) = m.mu0 {
                positive("magnetic.mu0", Some(mu0))?;
            }
        }
        if self.loads.is_empty() && self.magnetic.is_none() {
            return Err(ShellError::config(
                "load",
                "scenario has neither loads nor a magnetic field",
            ));
        }
        self.settings().validate()
    }

    pub fn surface(&self) -> Result<Surface> {
        let g = &self.geometry;
        let width = positive("geometry.width", Some(g.width))?;
        match g.kind {
            GeometryKind::Flat => {
                if g.radius.is_some() || g.angle.is_some() {
                    return Err(ShellError::config(
                        "geometry.radius",
                        "flat geometry takes only length and width",
                    ));
                }
                let length = positive("geometry.length", g.length)?;
                Ok(Surface::Flat(build_flat_plate(length, width)?))
            }
            GeometryKind::Arch => {
                if g.length.is_some() {
                    return Err(ShellError::config(
                        "geometry.length",
                        "arch length follows from radius and angle",
                    ));
                }
                let radius = positive("geometry.radius", g.radius)?;
                let angle = positive("geometry.angle", g.angle)?;
                build_cylindrical_arch(radius, angle, width)
                    .map(Surface::Arch)
                    .map_err(|e| ShellError::config("geometry.angle", e.to_string()))
            }
        }
    }

    pub fn material(&self) -> Result<Material> {
        let m = &self.material;
        let h = positive("material.thickness", Some(m.thickness))?;
        let young = m.youngs_modulus.is_some() || m.poisson_ratio.is_some();
        let lame = m.shear_modulus.is_some() || m.lame_lambda.is_some();
        if young && lame {
            return Err(ShellError::config(
                "material.shear_modulus",
                "give either youngs_modulus/poisson_ratio or shear_modulus/lame_lambda",
            ));
        }
        let (e, nu) = if lame {
            let mu = positive("material.shear_modulus", m.shear_modulus)?;
            let lambda = m.lame_lambda.ok_or_else(|| {
                ShellError::config("material.lame_lambda", "missing required value")
            })?;
            lame_to_young(mu, lambda)
        } else {
            let e = positive("material.youngs_modulus", m.youngs_modulus)?;
            let nu = m.poisson_ratio.ok_or_else(|| {
                ShellError::config("material.poisson_ratio", "missing required value")
            })?;
            (e, nu)
        };
        Material::new(e, nu, h)
            .map_err(|err| ShellError::config("material.poisson_ratio", err.to_string()))
    }

    pub fn settings(&self) -> SolverSettings {
        let d = SolverSettings::default();
        let s = &self.solver;
        SolverSettings {
            tol_residual: s.tol_residual.unwrap_or(d.tol_residual),
            tol_relative: s.tol_relative.unwrap_or(d.tol_relative),
            max_iters: s.max_iters.unwrap_or(d.max_iters),
            load_steps: s.load_steps.unwrap_or(d.load_steps),
            damping: s.damping.unwrap_or(d.damping),
            max_halvings: s.max_halvings.unwrap_or(d.max_halvings),
            verbose: false,
        }
    }

    pub fn element_options(&self) -> ElementOptions {
        ElementOptions {
            shear: match self.element.shear {
                ShearConfig::Centroid => ShearTreatment::CentroidTwist,
                ShearConfig::Gauss => ShearTreatment::GaussPoint,
            },
            reduced_inplane: self.element.reduced_inplane,
        }
    }

    /// Magnitude reported in the CSV at full load: the first mechanical load,
    /// or the applied flux density for purely magnetic scenarios.
    pub fn reference_magnitude(&self) -> f64 {
        match (self.loads.first(), &self.magnetic) {
            (Some(l), _) => l.magnitude,
            (None, Some(m)) => Vec3::from(m.applied).norm(),
            (None, None) => 0.0,
        }
    }

    pub fn build(&self) -> Result<Scenario> {
        let surface = self.surface()?;
        let material = self.material()?;
        let (lx, ly) = surface.chart();
        let mut mesh = ShellMesh::structured(&surface, lx, ly, self.mesh.nx, self.mesh.ny)?;
        mesh.clamp_edge(Edge::Root);
        for load in &self.loads {
            let (wrench, default_frame) = load_wrench(load);
            let frame = match load.frame.unwrap_or(default_frame) {
                FrameKind::Dead => LoadFrame::Dead,
                FrameKind::Follower => LoadFrame::Follower,
            };
            mesh.add_edge_load(Edge::Tip, wrench, frame);
        }
        let (env, remanent_local) = match &self.magnetic {
            Some(m) => {
                let mut env = MagneticEnvironment::new(Vec3::from(m.applied));
                env.mu0 = m.mu0.unwrap_or(MU0);
                // Couples act per unit reference area: the volume remanence is
                // integrated through the thickness.
                (Some(env), Vec3::from(m.remanent) * material.h)
            }
            None => (None, Vec3::zeros()),
        };
        let centroids: Vec<Pose> = (0..mesh.elements.len())
            .map(|e| {
                let c = mesh.element_corners(e);
                let p = ParamPoint::new(
                    c.iter().map(|p| p.xi1).sum::<f64>() / 4.0,
                    c.iter().map(|p| p.xi2).sum::<f64>() / 4.0,
                );
                surface.pose_at(p)
            })
            .collect();
        let (model, state) =
            ShellModel::new(mesh, &surface, material, self.element_options(), env, |e| {
                centroids[e].rotation.rotate(&remanent_local)
            })?;
        Ok(Scenario {
            config: self.clone(),
            surface,
            model,
            state,
        })
    }
}

fn load_wrench(load: &LoadConfig) -> (Wrench, FrameKind) {
    let m = load.magnitude;
    let z = Vec3::zeros();
    match load.kind {
        LoadKind::EndMoment => (Wrench::new(z, Vec3::new(0.0, -m, 0.0)), FrameKind::Follower),
        LoadKind::EndShear => (Wrench::new(Vec3::new(0.0, 0.0, m), z), FrameKind::Dead),
        LoadKind::Torsion => (Wrench::new(z, Vec3::new(m, 0.0, 0.0)), FrameKind::Follower),
        LoadKind::Drilling => (Wrench::new(z, Vec3::new(0.0, 0.0, m)), FrameKind::Follower),
        LoadKind::Tangential => (Wrench::new(Vec3::new(m, 0.0, 0.0), z), FrameKind::Follower),
        LoadKind::Transverse => (Wrench::new(Vec3::new(0.0, 0.0, m), z), FrameKind::Follower),
        LoadKind::EdgeWrench => {
            let c = load.components.unwrap_or([0.0; 6]);
            (
                Wrench::new(
                    Vec3::new(c[0], c[1], c[2]) * m,
                    Vec3::new(c[3], c[4], c[5]) * m,
                ),
                FrameKind::Follower,
            )
        }
    }
}

/// Reference surface of a scenario.
#[derive(Clone, Copy, Debug)]
pub enum Surface {
    Flat(FlatPlate),
    Arch(CylindricalArch),
}

impl Surface {
    /// Chart extent `(lx, ly)`.
    pub fn chart(&self) -> (f64, f64) {
        match self {
            Surface::Flat(p) => (p.lx, p.ly),
            Surface::Arch(a) => (a.arc_length(), a.width),
        }
    }
}

impl ReferenceSurface for Surface {
    fn pose_at(&self, p: ParamPoint) -> Pose {
        match self {
            Surface::Flat(s) => s.pose_at(p),
            Surface::Arch(s) => s.pose_at(p),
        }
    }

    fn twists_at(&self, p: ParamPoint) -> [Twist; 2] {
        match self {
            Surface::Flat(s) => s.twists_at(p),
            Surface::Arch(s) => s.twists_at(p),
        }
    }
}

/// A built scenario ready to run.
#[derive(Clone, Debug)]
pub struct Scenario {
    pub config: ScenarioConfig,
    pub surface: Surface,
    pub model: ShellModel,
    pub state: ShellState,
}

/// Command-line overrides of the solver settings.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Overrides {
    pub load_steps: Option<usize>,
    pub tol_relative: Option<f64>,
    pub max_iters: Option<usize>,
}

impl Overrides {
    pub fn apply(&self, s: &mut SolverSettings) {
        if let Some(n) = self.load_steps {
            s.load_steps = n;
        }
        if let Some(t) = self.tol_relative {
            s.tol_relative = t;
        }
        if let Some(n) = self.max_iters {
            s.max_iters = n;
        }
    }
}

/// One CSV row.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CsvRow {
    pub step: usize,
    pub load_factor: f64,
    pub load_magnitude: f64,
    /// Mean displacement of the tip-edge nodes.
    pub tip_displacement: Vec3,
    /// Rotation accumulated along the `xi2 = 0` line, in local components.
    pub tip_rotation: Vec3,
    pub iterations: usize,
    pub residual: f64,
}

pub const CSV_HEADER: &str =
    "step,load_factor,load_magnitude,tip_ux,tip_uy,tip_uz,tip_rot_1,tip_rot_2,tip_rot_3,tip_angle,iterations,residual";

impl CsvRow {
    pub fn to_csv(&self) -> String {
        let u = self.tip_displacement;
        let r = self.tip_rotation;
        format!(
            "{},{:.12e},{:.12e},{:.12e},{:.12e},{:.12e},{:.12e},{:.12e},{:.12e},{:.12e},{},{:.6e}",
            self.step,
            self.load_factor,
            self.load_magnitude,
            u.x,
            u.y,
            u.z,
            r.x,
            r.y,
            r.z,
            r.norm(),
            self.iterations,
            self.residual
        )
    }
}

impl Scenario {
    /// Tip-edge nodes ordered along the width.
    pub fn tip_nodes(&self) -> Vec<usize> {
        self.model.mesh.edge_nodes(Edge::Tip)
    }

    /// Nodes of the `xi2 = 0` line from root to tip.
    pub fn centerline(&self) -> Vec<usize> {
        self.model.mesh.edge_nodes(Edge::Bottom)
    }

    pub fn tip_displacement(&self, state: &ShellState) -> Vec3 {
        let tip = self.tip_nodes();
        tip.iter()
            .map(|&n| state.nodes[n].translation - self.model.mesh.nodes[n].pose0.translation)
            .sum::<Vec3>()
            / tip.len() as f64
    }

    /// Sum of the relative rotations between neighbouring nodes along the
    /// centerline, minus the reference ones. For planar deformations its
    /// norm is the total rotation of the tip section, beyond `2 pi`.
    pub fn accumulated_rotation(&self, state: &ShellState) -> Result<Vec3> {
        let line = self.centerline();
        let nodes = &self.model.mesh.nodes;
        let mut total = Vec3::zeros();
        for w in line.windows(2) {
            let rel = state.nodes[w[0]].rotation.transpose() * state.nodes[w[1]].rotation;
            let rel0 = nodes[w[0]].pose0.rotation.transpose() * nodes[w[1]].pose0.rotation;
            total += log_so3(&rel)? - log_so3(&rel0)?;
        }
        Ok(total)
    }

    fn row(
        &self,
        state: &ShellState,
        step: usize,
        load_factor: f64,
        iterations: usize,
        residual: f64,
    ) -> Result<CsvRow> {
        Ok(CsvRow {
            step,
            load_factor,
            load_magnitude: load_factor * self.config.reference_magnitude(),
            tip_displacement: self.tip_displacement(state),
            tip_rotation: self.accumulated_rotation(state)?,
            iterations,
            residual,
        })
    }

    /// Solves the scenario, updating `self.state`. With `out` set, writes
    /// `<name>.csv`, `<name>_report.txt` and (if enabled) per-step mesh
    /// dumps `<name>_step_NNN.mesh`; outputs are written even when the solve
    /// fails.
    pub fn run(
        &mut self,
        overrides: &Overrides,
        out: Option<&Path>,
        verbose: bool,
    ) -> Result<RunOutputs> {
        let mut settings = self.config.settings();
        overrides.apply(&mut settings);
        settings.verbose = verbose;
        let name = self.config.name.clone();
        if let Some(dir) = out {
            fs::create_dir_all(dir)?;
        }
        let mut rows = vec![self.row(&self.state, 0, 0.0, 0, 0.0)?];
        let mut dumps = Vec::new();
        let mut io_error = None;
        if let Some(dir) = out.filter(|_| self.config.output.mesh_dumps) {
            match self.dump(dir, 0, &self.state) {
                Ok(p) => dumps.push(p),
                Err(e) => io_error = Some(e),
            }
        }
        let mut state = self.state.clone();
        let this = &*self;
        let result = solve(&this.model, &mut state, &settings, |info, st| {
            let r = info.report;
            let residual = r.residuals.last().copied().unwrap_or(0.0);
            match this.row(st, r.step, r.load_factor, r.iterations, residual) {
                Ok(row) => rows.push(row),
                Err(e) => io_error = io_error.take().or(Some(e)),
            }
            if let Some(dir) = out.filter(|_| this.config.output.mesh_dumps) {
                match this.dump(dir, r.step, st) {
                    Ok(p) => dumps.push(p),
                    Err(e) => io_error = io_error.take().or(Some(e)),
                }
            }
        });
        self.state = state;
        let (report, failure) = match result {
            Ok(report) => (report, None),
            Err(e) => (SolveReport::default(), Some(e)),
        };
        let outputs = RunOutputs {
            rows,
            report,
            csv: out.map(|d| d.join(format!("{name}.csv"))),
            report_file: out.map(|d| d.join(format!("{name}_report.txt"))),
            mesh_dumps: dumps,
        };
        if let Some(dir) = out {
            self.write_outputs(dir, &outputs, failure.as_ref())?;
        }
        if let Some(e) = failure {
            return Err(e);
        }
        if let Some(e) = io_error {
            return Err(e);
        }
        Ok(outputs)
    }

    fn dump(&self, dir: &Path, step: usize, state: &ShellState) -> Result<PathBuf> {
        let path = dir.join(format!("{}_step_{step:03}.mesh", self.config.name));
        let mut f = std::io::BufWriter::new(fs::File::create(&path)?);
        write_mesh_dump(&mut f, &self.model.mesh, &state.nodes)?;
        f.flush()?;
        Ok(path)
    }

    fn write_outputs(
        &self,
        dir: &Path,
        outputs: &RunOutputs,
        failure: Option<&ShellError>,
    ) -> Result<()> {
        let name = &self.config.name;
        let mut csv = String::from(CSV_HEADER);
        csv.push('\n');
        for row in &outputs.rows {
            csv.push_str(&row.to_csv());
            csv.push('\n');
        }
        fs::write(dir.join(format!("{name}.csv")), csv)?;
        let mut rep = String::new();
        rep.push_str(&format!("scenario {name}\n"));
        if !self.config.description.is_empty() {
            rep.push_str(&format!("description {}\n", self.config.description));
        }
        rep.push_str(&format!(
            "nodes {} elements {} dofs {}\n",
            self.model.mesh.num_nodes(),
            self.model.mesh.elements.len(),
            self.model.num_dofs()
        ));
        match failure {
            None => {
                let r = &outputs.report;
                rep.push_str(&format!(
                    "converged true\nload_steps {}\ntotal_iterations {}\nwall_time_s {:.3}\n",
                    r.steps.len(),
                    r.total_iterations(),
                    r.wall_time.as_secs_f64()
                ));
                for s in &r.steps {
                    rep.push_str(&format!(
                        "step {} load_factor {:.6} iterations {} substeps {} residual {:.6e}\n",
                        s.step,
                        s.load_factor,
                        s.iterations,
                        s.substeps,
                        s.residuals.last().copied().unwrap_or(0.0)
                    ));
                }
                rep.push_str("# step iter residual\n");
                for line in &r.log {
                    rep.push_str(line);
                    rep.push('\n');
                }
            }
            Some(e) => {
                rep.push_str(&format!("converged false\nerror {e}\n"));
                if let ShellError::NonConvergence { history, .. } = e {
                    rep.push_str("# residual history of the failed increment\n");
                    for (i, r) in history.iter().enumerate() {
                        rep.push_str(&format!("{} {:.6e}\n", i + 1, r));
                    }
                }
            }
        }
        if let Some(last) = outputs.rows.last() {
            let u = last.tip_displacement;
            rep.push_str(&format!(
                "final tip displacement {:.9e} {:.9e} {:.9e} angle {:.9e}\n",
                u.x,
                u.y,
                u.z,
                last.tip_rotation.norm()
            ));
        }
        fs::write(dir.join(format!("{name}_report.txt")), rep)?;
        Ok(())
    }

    /// Total potential of `state` at full load.
    pub fn energy(&self, state: &ShellState) -> f64 {
        total_potential(&self.model, state, 1.0).total()
    }
}

/// Everything a run produces.
#[derive(Clone, Debug)]
pub struct RunOutputs {
    /// Load-deflection rows, starting with the unloaded state.
    pub rows: Vec<CsvRow>,
    pub report: SolveReport,
    pub csv: Option<PathBuf>,
    pub report_file: Option<PathBuf>,
    pub mesh_dumps: Vec<PathBuf>,
}
