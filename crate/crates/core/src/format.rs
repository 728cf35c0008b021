//! Versioned JSON documents: instances, certificates, traces, flows,
//! multicuts and gap reports. Every document carries `format_version` and
//! a `kind` naming its type. Rationals are always `"n/d"` strings.
//!
//! One instance layout serves all problem kinds. Edges are
//! `[id, u, v, cost, tag]` with ids `0, 1, ...` in order and tag one of
//! `supply`, `demand`, `plain`:
//!
//! * proper requirement: `plain` (or `supply`) edges plus `demands`;
//! * augmentation: `supply` edges are the links, `demand` edges form `Y`
//!   and must come after every link so link ids match graph edge ids;
//! * explicit table: `plain` edges plus `requirement_table`, the sets with
//!   value 1;
//! * planar multiflow: `supply` and `demand` edges in any order plus
//!   `rotation`, the cyclic edge order around each vertex.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::error::{GraphError, RequirementError};
use crate::flow::FlowPath;
use crate::graph::{EdgeId, Multigraph, Vertex, VertexSet};
use crate::planar::{EdgeKind, EmbeddingError, SeymourEdge, SeymourInstance};
use crate::rational::Rational;
use crate::requirements::{Flavor, RequirementOracle};

pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum FormatError {
    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("unsupported format_version {0}")]
    Version(u32),
    #[error("expected a {expected} document, found {found}")]
    Kind { expected: &'static str, found: String },
    #[error("invalid instance: {0}")]
    Invalid(String),
    #[error("invalid embedding: {0}")]
    Embedding(#[from] EmbeddingError),
}

impl From<GraphError> for FormatError {
    fn from(e: GraphError) -> Self {
        FormatError::Invalid(e.to_string())
    }
}

impl From<RequirementError> for FormatError {
    fn from(e: RequirementError) -> Self {
        FormatError::Invalid(e.to_string())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Tag {
    Supply,
    Demand,
    Plain,
}

pub type EdgeRecord = (usize, Vertex, Vertex, i64, Tag);

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct InstanceFile {
    pub format_version: u32,
    pub kind: String,
    /// `proper`, `augmentation`, `table` or `planar`; inferred from the
    /// other fields when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub problem: Option<String>,
    pub vertex_count: usize,
    pub edges: Vec<EdgeRecord>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub demands: Option<Vec<(Vertex, Vertex)>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rotation: Option<Vec<Vec<usize>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub requirement_table: Option<Vec<VertexSet>>,
}

fn check_header(version: u32, kind: &str, expected: &'static str) -> Result<(), FormatError> {
    if version != FORMAT_VERSION {
        return Err(FormatError::Version(version));
    }
    if kind != expected {
        return Err(FormatError::Kind { expected, found: kind.to_string() });
    }
    Ok(())
}

/// Reads just the `kind` field of a document.
pub fn document_kind(text: &str) -> Result<String, FormatError> {
    #[derive(Deserialize)]
    struct Header {
        kind: String,
    }
    Ok(serde_json::from_str::<Header>(text)?.kind)
}

impl InstanceFile {
    fn blank(vertex_count: usize) -> Self {
        InstanceFile {
            format_version: FORMAT_VERSION,
            kind: "instance".into(),
            problem: None,
            vertex_count,
            edges: Vec::new(),
            demands: None,
            rotation: None,
            requirement_table: None,
        }
    }

    pub fn parse(text: &str) -> Result<Self, FormatError> {
        let file: InstanceFile = serde_json::from_str(text)?;
        check_header(file.format_version, &file.kind, "instance")?;
        for (i, e) in file.edges.iter().enumerate() {
            if e.0 != i {
                return Err(FormatError::Invalid(format!("edge at position {i} has id {}", e.0)));
            }
        }
        Ok(file)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("instances serialize")
    }

    /// Serializes a cover problem in the layout matching its flavor.
    pub fn from_cover(g: &Multigraph, f: &RequirementOracle) -> Result<Self, FormatError> {
        let mut file = InstanceFile::blank(g.vertex_count());
        file.problem = Some(f.flavor_name().to_string());
        let tag = match f.flavor() {
            Flavor::AugmentationFromForest(_) => Tag::Supply,
            _ => Tag::Plain,
        };
        file.edges = g.edges().iter().enumerate().map(|(i, e)| (i, e.u, e.v, e.cost, tag)).collect();
        match f.flavor() {
            Flavor::ProperFromDemands(d) => file.demands = Some(d.clone()),
            Flavor::AugmentationFromForest(y) => {
                let m = file.edges.len();
                file.edges.extend(y.iter().enumerate().map(|(i, &(u, v))| (m + i, u, v, 0, Tag::Demand)));
            }
            Flavor::ExplicitTable(t) => {
                let ground = f.ground_set();
                let ones: Vec<VertexSet> = t.iter().filter(|(_, &v)| v).map(|(&s, _)| s).collect();
                let listed = t.len() as u128;
                if listed != 1u128 << f.ground_size() || !t.keys().all(|s| s.is_subset(ground)) {
                    return Err(FormatError::Invalid("only complete tables can be written".into()));
                }
                file.requirement_table = Some(ones);
            }
        }
        Ok(file)
    }

    /// Reads the file as a cover problem.
    pub fn to_cover(&self) -> Result<(Multigraph, RequirementOracle), FormatError> {
        let n = self.vertex_count;
        let mut g = Multigraph::new(n)?;
        let mut y = Vec::new();
        for &(id, u, v, cost, tag) in &self.edges {
            match tag {
                Tag::Demand => y.push((u, v)),
                _ if !y.is_empty() => {
                    return Err(FormatError::Invalid(format!("link {id} listed after a demand edge")));
                }
                _ => {
                    g.add_edge(u, v, cost)?;
                }
            }
        }
        let problem = match self.problem.as_deref() {
            Some(p) => p,
            None if !y.is_empty() => "augmentation",
            None if self.requirement_table.is_some() => "table",
            None => "proper",
        };
        let stray = |what: &str| FormatError::Invalid(format!("{what} given for a {problem} instance"));
        let f = match problem {
            "augmentation" => {
                if self.demands.is_some() || self.requirement_table.is_some() {
                    return Err(stray("demands or requirement_table"));
                }
                RequirementOracle::augmentation(n, y)?
            }
            "table" => {
                if !y.is_empty() || self.demands.is_some() {
                    return Err(stray("demand edges or demands"));
                }
                let ones = self.requirement_table.as_ref().ok_or_else(|| stray("no requirement_table"))?;
                RequirementOracle::table_from_ones(n, ones)?
            }
            "proper" => {
                if !y.is_empty() || self.requirement_table.is_some() {
                    return Err(stray("demand edges or requirement_table"));
                }
                RequirementOracle::proper_from_demands(n, self.demands.clone().unwrap_or_default())?
            }
            other => return Err(FormatError::Invalid(format!("{other} is not a cover problem"))),
        };
        Ok((g, f))
    }

    pub fn from_seymour(inst: &SeymourInstance) -> Self {
        let mut file = InstanceFile::blank(inst.vertex_count);
        file.problem = Some("planar".into());
        file.edges = inst
            .edges
            .iter()
            .enumerate()
            .map(|(i, e)| {
                let tag = match e.kind {
                    EdgeKind::Supply => Tag::Supply,
                    EdgeKind::Demand => Tag::Demand,
                };
                (i, e.u, e.v, e.capacity, tag)
            })
            .collect();
        file.rotation = Some(inst.rotation.iter().map(|r| r.iter().map(|e| e.0).collect()).collect());
        file
    }

    /// Reads the file as a planar multiflow instance; the embedding is
    /// checked in full (rotation consistency and Euler's formula).
    pub fn to_seymour(&self) -> Result<SeymourInstance, FormatError> {
        let rotation = self
            .rotation
            .as_ref()
            .ok_or_else(|| FormatError::Invalid("planar instances need a rotation".into()))?;
        let edges = self
            .edges
            .iter()
            .map(|&(id, u, v, capacity, tag)| match tag {
                Tag::Supply => Ok(SeymourEdge { u, v, kind: EdgeKind::Supply, capacity }),
                Tag::Demand => Ok(SeymourEdge { u, v, kind: EdgeKind::Demand, capacity }),
                Tag::Plain => Err(FormatError::Invalid(format!("edge {id} must be supply or demand"))),
            })
            .collect::<Result<Vec<_>, _>>()?;
        let rotation = rotation.iter().map(|r| r.iter().map(|&e| EdgeId(e)).collect()).collect();
        let inst = SeymourInstance::new(self.vertex_count, edges, rotation)?;
        inst.faces()?;
        Ok(inst)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FlowFile {
    pub format_version: u32,
    pub kind: String,
    pub paths: Vec<FlowPath>,
    pub total: Rational,
}

impl FlowFile {
    pub fn new(paths: Vec<FlowPath>) -> Self {
        let total = paths.iter().map(|p| p.value).sum();
        FlowFile { format_version: FORMAT_VERSION, kind: "flow".into(), paths, total }
    }

    pub fn parse(text: &str) -> Result<Self, FormatError> {
        let file: FlowFile = serde_json::from_str(text)?;
        check_header(file.format_version, &file.kind, "flow")?;
        Ok(file)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MulticutFile {
    pub format_version: u32,
    pub kind: String,
    pub edges: Vec<EdgeId>,
    pub capacity: i64,
}

impl MulticutFile {
    pub fn new(edges: Vec<EdgeId>, capacity: i64) -> Self {
        MulticutFile { format_version: FORMAT_VERSION, kind: "multicut".into(), edges, capacity }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GapReportFile {
    pub format_version: u32,
    pub kind: String,
    pub multicut_value: i64,
    pub flow_value: Rational,
    pub dual_sum: Rational,
    pub ratio: Option<Rational>,
    pub non_simple_boundaries: usize,
    pub dropped_supply: Vec<EdgeId>,
    pub removed_demands: Vec<EdgeId>,
    pub notes: Vec<String>,
}

impl GapReportFile {
    pub fn from_report(r: &crate::flow::GapReport) -> Self {
        GapReportFile {
            format_version: FORMAT_VERSION,
            kind: "gap-report".into(),
            multicut_value: r.multicut_value,
            flow_value: r.flow_value,
            dual_sum: r.dual_sum,
            ratio: r.ratio,
            non_simple_boundaries: r.non_simple_boundaries,
            dropped_supply: r.correspondence.dropped_supply.clone(),
            removed_demands: r.correspondence.removed_demands.clone(),
            notes: r.correspondence.notes.clone(),
        }
    }
}

/// One recorded half-unit cost reduction.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReductionEntry {
    pub time: Rational,
    pub set: VertexSet,
    pub edge: EdgeId,
}
