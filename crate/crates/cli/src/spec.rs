//! Spec files: TOML documents describing a system and the analyses to run.

use std::fmt;
use std::path::Path;
use std::sync::Arc;

use reldyn::grid::{outer_approximate_map, GridSpace, OuterApprox, Sampler, Space};
use reldyn::hybrid::{associated_relation, HybridSystem};
use reldyn::semiflow::SemiflowApprox;
use reldyn::{systems, CellSet, Eps, Relation};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{CliError, CliResult};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Kind {
    Relation,
    SampledMap,
    Semiflow,
    Hybrid,
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Kind::Relation => "relation",
            Kind::SampledMap => "sampled_map",
            Kind::Semiflow => "semiflow",
            Kind::Hybrid => "hybrid",
        })
    }
}

/// Analyses in dependency order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Analysis {
    Chain,
    Morse,
    Lyapunov,
    Conley,
    Robust,
    Perturb,
    Semiflow,
    Hybrid,
    Paths,
}

impl Analysis {
    pub fn name(self) -> &'static str {
        match self {
            Analysis::Chain => "chain",
            Analysis::Morse => "morse",
            Analysis::Lyapunov => "lyapunov",
            Analysis::Conley => "conley",
            Analysis::Robust => "robust",
            Analysis::Perturb => "perturb",
            Analysis::Semiflow => "semiflow",
            Analysis::Hybrid => "hybrid",
            Analysis::Paths => "paths",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSection {
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    pub divisions: Vec<usize>,
}

/// An explicit relation. The same table appears in reports.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RelationSection {
    pub cells: usize,
    pub edges: Vec<[usize; 2]>,
}

impl RelationSection {
    pub fn from_relation(f: &Relation) -> Self {
        RelationSection { cells: f.cell_count(), edges: f.edges().map(|(x, y)| [x, y]).collect() }
    }

    pub fn to_relation(&self, space: Arc<Space>) -> reldyn::Result<Relation> {
        Relation::from_edges(space, self.edges.iter().map(|e| (e[0], e[1])))
    }
}

fn default_subdivisions() -> usize {
    2
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MapSection {
    pub sampler: String,
    #[serde(default)]
    pub bloat: f64,
    #[serde(default = "default_subdivisions")]
    pub subdivisions: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SemiflowSection {
    pub steps_per_unit: usize,
    pub sampler: Option<String>,
    pub edges: Option<Vec<[usize; 2]>>,
    #[serde(default)]
    pub bloat: f64,
    #[serde(default = "default_subdivisions")]
    pub subdivisions: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HybridSection {
    pub steps_per_unit: usize,
    pub sampler: Option<String>,
    pub step_edges: Option<Vec<[usize; 2]>>,
    pub flow_set: RegionSpec,
    pub jump_edges: Vec<[usize; 2]>,
    #[serde(default)]
    pub bloat: f64,
    #[serde(default = "default_subdivisions")]
    pub subdivisions: usize,
}

/// A set of cells. Exactly one selector is given.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RegionSpec {
    pub all: Option<bool>,
    pub cells: Option<Vec<usize>>,
    /// Cells inside `[-h, h]^d`.
    pub central: Option<f64>,
    /// Cells inside the box `[lower, upper]`.
    pub lower: Option<Vec<f64>>,
    pub upper: Option<Vec<f64>>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PerturbMode {
    Repeller,
    Saddle,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PerturbSection {
    pub mode: PerturbMode,
    pub eps: f64,
}

fn default_samples() -> usize {
    50
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RobustSection {
    pub ladder: Vec<f64>,
    #[serde(default = "default_samples")]
    pub samples: usize,
}

fn default_path_length() -> f64 {
    3.0
}

fn default_path_cap() -> usize {
    500
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PathsSection {
    #[serde(default = "default_path_length")]
    pub length: f64,
    #[serde(default = "default_path_cap")]
    pub cap: usize,
}

impl Default for PathsSection {
    fn default() -> Self {
        PathsSection { length: default_path_length(), cap: default_path_cap() }
    }
}

fn default_ladder() -> Vec<f64> {
    vec![0.0]
}

fn default_run() -> Vec<Analysis> {
    vec![Analysis::Chain]
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnalysisSection {
    /// Strictly decreasing; `0` is the strict (identity) tolerance.
    #[serde(default = "default_ladder")]
    pub eps: Vec<f64>,
    #[serde(default = "default_run")]
    pub run: Vec<Analysis>,
    pub region: Option<RegionSpec>,
    pub perturb: Option<PerturbSection>,
    pub robust: Option<RobustSection>,
    #[serde(default)]
    pub paths: PathsSection,
}

impl Default for AnalysisSection {
    fn default() -> Self {
        AnalysisSection {
            eps: default_ladder(),
            run: default_run(),
            region: None,
            perturb: None,
            robust: None,
            paths: PathsSection::default(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemSpec {
    pub schema: u32,
    pub kind: Kind,
    pub name: String,
    pub grid: Option<GridSection>,
    pub relation: Option<RelationSection>,
    pub map: Option<MapSection>,
    pub semiflow: Option<SemiflowSection>,
    pub hybrid: Option<HybridSection>,
    #[serde(default)]
    pub analysis: AnalysisSection,
}

/// A loaded spec with the hash of its source text.
#[derive(Clone, Debug)]
pub struct LoadedSpec {
    pub spec: SystemSpec,
    pub hash: String,
}

pub fn load_spec(path: &Path) -> CliResult<LoadedSpec> {
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Read { path: path.into(), source })?;
    parse_spec(&text)
}

pub fn parse_spec(text: &str) -> CliResult<LoadedSpec> {
    let value: toml::Value = toml::from_str(text).map_err(|e| {
        let (line, column) = e.span().map_or((0, 0), |s| line_column(text, s.start));
        CliError::Parse { line, column, message: e.message().to_string() }
    })?;
    let spec: SystemSpec = serde_path_to_error::deserialize(value).map_err(|e| {
        let field = e.path().to_string();
        CliError::schema(field, e.into_inner().to_string().trim())
    })?;
    validate(&spec)?;
    let hash = Sha256::digest(text.as_bytes()).iter().map(|b| format!("{b:02x}")).collect();
    Ok(LoadedSpec { spec, hash })
}

fn line_column(text: &str, offset: usize) -> (usize, usize) {
    let before = &text[..offset.min(text.len())];
    let line = before.matches('\n').count() + 1;
    let column = before.rsplit('\n').next().map_or(0, |l| l.chars().count()) + 1;
    (line, column)
}

pub fn validate_ladder(field: &str, ladder: &[f64]) -> CliResult<()> {
    if ladder.is_empty() {
        return Err(CliError::schema(field, "ladder is empty"));
    }
    for (i, &e) in ladder.iter().enumerate() {
        if !e.is_finite() || e < 0.0 {
            return Err(CliError::schema(format!("{field}[{i}]"), format!("eps must be finite and nonnegative, got {e}")));
        }
        if i > 0 && e >= ladder[i - 1] {
            return Err(CliError::schema(format!("{field}[{i}]"), "eps ladder must be strictly decreasing"));
        }
    }
    Ok(())
}

fn validate(spec: &SystemSpec) -> CliResult<()> {
    if spec.schema != SCHEMA_VERSION {
        return Err(CliError::schema("schema", format!("unsupported schema version {}", spec.schema)));
    }
    validate_ladder("analysis.eps", &spec.analysis.eps)?;
    if let Some(r) = &spec.analysis.robust {
        validate_ladder("analysis.robust.ladder", &r.ladder)?;
    }
    if let Some(p) = &spec.analysis.perturb {
        if !(p.eps > 0.0) {
            return Err(CliError::schema("analysis.perturb.eps", "must be positive"));
        }
    }
    if !(spec.analysis.paths.length >= 1.0) {
        return Err(CliError::schema("analysis.paths.length", "must be at least 1"));
    }
    let (section, present) = match spec.kind {
        Kind::Relation => ("relation", spec.relation.is_some()),
        Kind::SampledMap => ("map", spec.map.is_some()),
        Kind::Semiflow => ("semiflow", spec.semiflow.is_some()),
        Kind::Hybrid => ("hybrid", spec.hybrid.is_some()),
    };
    if !present {
        return Err(CliError::schema(section, format!("a {} spec needs a [{section}] table", spec.kind)));
    }
    if spec.kind != Kind::Relation && spec.grid.is_none() && spec.relation.is_none() {
        return Err(CliError::schema("grid", "missing grid"));
    }
    if let Some(s) = &spec.semiflow {
        check_payload("semiflow", s.steps_per_unit, s.sampler.is_some(), s.edges.is_some())?;
    }
    if let Some(h) = &spec.hybrid {
        check_payload("hybrid", h.steps_per_unit, h.sampler.is_some(), h.step_edges.is_some())?;
    }
    check_analyses(spec.kind, &spec.analysis.run)?;
    Ok(())
}

fn check_payload(section: &str, k: usize, sampler: bool, edges: bool) -> CliResult<()> {
    if k == 0 {
        return Err(CliError::schema(format!("{section}.steps_per_unit"), "must be positive"));
    }
    if sampler == edges {
        return Err(CliError::schema(section, "give exactly one of a sampler or an edge list"));
    }
    Ok(())
}

/// Rejects analyses that make no sense for the kind of system.
pub fn check_analyses(kind: Kind, run: &[Analysis]) -> CliResult<()> {
    for &a in run {
        let needs = match a {
            Analysis::Semiflow if !matches!(kind, Kind::Semiflow | Kind::Hybrid) => Some("semiflow or hybrid"),
            Analysis::Hybrid if kind != Kind::Hybrid => Some("hybrid"),
            _ => None,
        };
        if let Some(needs) = needs {
            return Err(CliError::Unsupported { analysis: a.name().into(), kind: kind.to_string(), needs: needs.into() });
        }
    }
    Ok(())
}

/// Point maps available to sampled specs, by id and dimension.
pub fn sampler(id: &str, steps_per_unit: usize) -> CliResult<(Box<dyn Sampler>, usize)> {
    Ok(match id {
        "double" => (Box::new(systems::doubling), 1),
        "saddle" => (Box::new(systems::saddle), 2),
        "saddle_onto" => (Box::new(systems::saddle_onto), 2),
        "saddle_flow" => (Box::new(systems::saddle_euler(1.0 / steps_per_unit as f64)), 2),
        _ => return Err(CliError::UnknownSampler(id.into())),
    })
}

/// The system built from a spec.
pub struct System {
    pub space: Arc<Space>,
    /// The relation analyzed by the map-level analyses: `F`, the time-`Δ`
    /// step of a semiflow, or the associated relation of a hybrid system.
    pub base: Relation,
    pub semiflow: Option<SemiflowApprox>,
    pub hybrid: Option<HybridSystem>,
}

fn build_space(spec: &SystemSpec) -> CliResult<Arc<Space>> {
    match &spec.grid {
        Some(g) => {
            let grid = GridSpace::new(g.lower.clone(), g.upper.clone(), g.divisions.clone())
                .map_err(|e| CliError::schema("grid", e.to_string()))?;
            let space = Space::grid(grid);
            if let Some(r) = &spec.relation {
                if r.cells != space.cell_count() {
                    return Err(CliError::schema(
                        "relation.cells",
                        format!("grid has {} cells, relation declares {}", space.cell_count(), r.cells),
                    ));
                }
            }
            Ok(space)
        }
        None => match &spec.relation {
            Some(r) => Ok(Space::discrete(r.cells)),
            None => Err(CliError::schema("grid", "missing grid")),
        },
    }
}

fn edges_relation(space: &Arc<Space>, field: &str, edges: &[[usize; 2]]) -> CliResult<Relation> {
    let n = space.cell_count();
    if let Some(i) = edges.iter().position(|e| e[0] >= n || e[1] >= n) {
        return Err(CliError::schema(format!("{field}[{i}]"), format!("cell out of range for {n} cells")));
    }
    Ok(Relation::from_edges(space.clone(), edges.iter().map(|e| (e[0], e[1])))?)
}

fn sampled(space: &Arc<Space>, field: &str, id: &str, k: usize, bloat: f64, subdivisions: usize) -> CliResult<Relation> {
    let (map, dim) = sampler(id, k)?;
    let grid = space.as_grid().ok_or_else(|| CliError::schema("grid", "sampled systems need a grid"))?;
    if grid.dim() != dim {
        return Err(CliError::schema(field, format!("sampler `{id}` is {dim}-dimensional, the grid is {}-dimensional", grid.dim())));
    }
    Ok(outer_approximate_map(space, map.as_ref(), OuterApprox { bloat, subdivisions })?)
}

pub fn resolve_region(space: &Space, field: &str, r: &RegionSpec) -> CliResult<CellSet> {
    let n = space.cell_count();
    let chosen = [r.all.is_some(), r.cells.is_some(), r.central.is_some(), r.lower.is_some() || r.upper.is_some()];
    if chosen.iter().filter(|&&b| b).count() != 1 {
        return Err(CliError::schema(field, "give exactly one of all, cells, central, or lower/upper"));
    }
    if let Some(all) = r.all {
        return Ok(if all { CellSet::full(n) } else { CellSet::empty(n) });
    }
    if let Some(cells) = &r.cells {
        if let Some(i) = cells.iter().position(|&c| c >= n) {
            return Err(CliError::schema(format!("{field}.cells[{i}]"), format!("cell out of range for {n} cells")));
        }
        return Ok(CellSet::from_cells(n, cells.iter().copied()));
    }
    let grid = space.as_grid().ok_or_else(|| CliError::schema(field, "geometric regions need a grid"))?;
    let (lower, upper) = match r.central {
        Some(h) => (vec![-h; grid.dim()], vec![h; grid.dim()]),
        None => match (&r.lower, &r.upper) {
            (Some(l), Some(u)) => (l.clone(), u.clone()),
            _ => return Err(CliError::schema(field, "lower and upper go together")),
        },
    };
    if lower.len() != grid.dim() || upper.len() != grid.dim() {
        return Err(CliError::schema(field, "region dimension does not match the grid"));
    }
    Ok(CellSet::from_cells(
        n,
        (0..n).filter(|&c| {
            let (lo, hi) = grid.cell_box(c);
            (0..grid.dim()).all(|a| lo[a] >= lower[a] - 1e-12 && hi[a] <= upper[a] + 1e-12)
        }),
    ))
}

pub fn build_system(spec: &SystemSpec) -> CliResult<System> {
    let space = build_space(spec)?;
    let mut semiflow = None;
    let mut hybrid = None;
    let base = match spec.kind {
        Kind::Relation => {
            let r = spec.relation.as_ref().expect("validated");
            edges_relation(&space, "relation.edges", &r.edges)?
        }
        Kind::SampledMap => {
            let m = spec.map.as_ref().expect("validated");
            sampled(&space, "map.sampler", &m.sampler, 1, m.bloat, m.subdivisions)?
        }
        Kind::Semiflow => {
            let s = spec.semiflow.as_ref().expect("validated");
            let step = match (&s.sampler, &s.edges) {
                (Some(id), _) => sampled(&space, "semiflow.sampler", id, s.steps_per_unit, s.bloat, s.subdivisions)?,
                (None, Some(edges)) => edges_relation(&space, "semiflow.edges", edges)?,
                (None, None) => unreachable!("validated"),
            };
            let sf = SemiflowApprox::new(step.clone(), s.steps_per_unit)?;
            semiflow = Some(sf);
            step
        }
        Kind::Hybrid => {
            let h = spec.hybrid.as_ref().expect("validated");
            let step = match (&h.sampler, &h.step_edges) {
                (Some(id), _) => sampled(&space, "hybrid.sampler", id, h.steps_per_unit, h.bloat, h.subdivisions)?,
                (None, Some(edges)) => edges_relation(&space, "hybrid.step_edges", edges)?,
                (None, None) => unreachable!("validated"),
            };
            let sf = SemiflowApprox::new(step, h.steps_per_unit)?;
            let flow_set = resolve_region(&space, "hybrid.flow_set", &h.flow_set)?;
            let jump = edges_relation(&space, "hybrid.jump_edges", &h.jump_edges)?;
            let hs = HybridSystem::new(sf.clone(), flow_set, jump)?;
            let h_rel = associated_relation(&hs);
            semiflow = Some(sf);
            hybrid = Some(hs);
            h_rel
        }
    };
    Ok(System { space, base, semiflow, hybrid })
}

/// Ladder values as tolerances; zero is the strict identity.
pub fn eps_of(v: f64) -> Eps {
    if v == 0.0 {
        Eps::strict()
    } else {
        Eps::new(v).expect("validated ladder")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const L3: &str = r#"
schema = 1
kind = "relation"
name = "l3"

[relation]
cells = 3
edges = [[0, 1], [1, 2]]
"#;

    #[test]
    fn minimal_relation_loads() {
        let loaded = parse_spec(L3).unwrap();
        assert_eq!(loaded.spec.kind, Kind::Relation);
        let sys = build_system(&loaded.spec).unwrap();
        assert_eq!(sys.base.edges().collect::<Vec<_>>(), vec![(0, 1), (1, 2)]);
        assert_eq!(loaded.spec.analysis.eps, vec![0.0]);
        assert_eq!(loaded.hash.len(), 64);
    }

    #[test]
    fn parse_error_has_position() {
        let err = parse_spec("schema = 1\nkind = \n").unwrap_err();
        match err {
            CliError::Parse { line, .. } => assert_eq!(line, 2),
            e => panic!("unexpected {e}"),
        }
    }

    #[test]
    fn schema_error_has_field_path() {
        let text = L3.replace("[[0, 1], [1, 2]]", "[[0, 1], [1, \"x\"]]");
        match parse_spec(&text).unwrap_err() {
            CliError::Schema { field, .. } => assert!(field.starts_with("relation.edges"), "{field}"),
            e => panic!("unexpected {e}"),
        }
    }

    #[test]
    fn ladder_must_decrease() {
        let text = format!("{L3}\n[analysis]\neps = [0.5, 0.5]\n");
        match parse_spec(&text).unwrap_err() {
            CliError::Schema { field, .. } => assert_eq!(field, "analysis.eps[1]"),
            e => panic!("unexpected {e}"),
        }
    }

    #[test]
    fn edge_out_of_range() {
        let text = L3.replace("[1, 2]]", "[1, 3]]");
        let loaded = parse_spec(&text).unwrap();
        assert!(matches!(build_system(&loaded.spec), Err(CliError::Schema { .. })));
    }

    #[test]
    fn unknown_sampler() {
        let text = "schema = 1\nkind = \"sampled_map\"\nname = \"x\"\n[grid]\nlower = [-1.0]\nupper = [1.0]\ndivisions = [8]\n[map]\nsampler = \"nope\"\n";
        let loaded = parse_spec(text).unwrap();
        assert!(matches!(build_system(&loaded.spec), Err(CliError::UnknownSampler(s)) if s == "nope"));
    }

    #[test]
    fn hybrid_on_relation_is_rejected() {
        let text = format!("{L3}\n[analysis]\nrun = [\"chain\", \"hybrid\"]\n");
        assert!(matches!(parse_spec(&text), Err(CliError::Unsupported { .. })));
    }

    #[test]
    fn regions() {
        let space = Space::grid(GridSpace::new(vec![-1.0, -1.0], vec![1.0, 1.0], vec![4, 4]).unwrap());
        let central = RegionSpec { central: Some(0.5), ..Default::default() };
        assert_eq!(resolve_region(&space, "r", &central).unwrap().len(), 4);
        let boxed = RegionSpec { lower: Some(vec![-1.0, -1.0]), upper: Some(vec![0.0, 1.0]), ..Default::default() };
        assert_eq!(resolve_region(&space, "r", &boxed).unwrap().len(), 8);
        let both = RegionSpec { all: Some(true), cells: Some(vec![0]), ..Default::default() };
        assert!(resolve_region(&space, "r", &both).is_err());
    }
}
