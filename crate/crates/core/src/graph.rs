//! Undirected occupation-skill bipartite graph.
//!
//! Nodes are ordered by external identifier: occupations by ascending SOC
//! code, then skills by ascending skill id. Global node index `i < |O|` is an
//! occupation, `|O| + j` is skill `j`.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use ndarray::{concatenate, Array2, Axis};
use serde::{Deserialize, Serialize};

use crate::corpus::{LinkRecord, OccupationRecord, SkillRecord};
use crate::error::{Error, Result};

pub const GRAPH_FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum NodeKind {
    Occupation,
    Skill,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct NodeRef {
    pub kind: NodeKind,
    pub index: usize,
}

impl NodeRef {
    pub fn occupation(index: usize) -> NodeRef {
        NodeRef {
            kind: NodeKind::Occupation,
            index,
        }
    }

    pub fn skill(index: usize) -> NodeRef {
        NodeRef {
            kind: NodeKind::Skill,
            index,
        }
    }
}

impl fmt::Display for NodeRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            NodeKind::Occupation => write!(f, "o{}", self.index),
            NodeKind::Skill => write!(f, "s{}", self.index),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BipartiteGraph {
    occupations: Vec<String>,
    skills: Vec<String>,
    /// Sorted `(occupation, skill)` pairs.
    edges: Vec<(usize, usize)>,
    occ_adj: Vec<Vec<usize>>,
    skill_adj: Vec<Vec<usize>>,
    occ_features: Array2<f64>,
    skill_features: Array2<f64>,
}

/// Options for [`build_graph`].
#[derive(Debug, Clone, Copy, Default)]
pub struct BuildOptions {
    /// Drop nodes without edges instead of failing.
    pub drop_isolated: bool,
}

/// Builds the graph from parsed records. `occ_features` rows follow the order
/// of `occupations`, `skill_features` rows the order of `skills`.
pub fn build_graph(
    occupations: &[OccupationRecord],
    skills: &[SkillRecord],
    links: &[LinkRecord],
    occ_features: &Array2<f64>,
    skill_features: &Array2<f64>,
    options: BuildOptions,
) -> Result<BipartiteGraph> {
    if occ_features.nrows() != occupations.len() {
        return Err(Error::ShapeMismatch(format!(
            "{} occupation feature rows for {} occupations",
            occ_features.nrows(),
            occupations.len()
        )));
    }
    if skill_features.nrows() != skills.len() {
        return Err(Error::ShapeMismatch(format!(
            "{} skill feature rows for {} skills",
            skill_features.nrows(),
            skills.len()
        )));
    }
    if occ_features.ncols() != skill_features.ncols() {
        return Err(Error::DimensionMismatch {
            expected: occ_features.ncols(),
            found: skill_features.ncols(),
        });
    }

    let mut occ_order: Vec<usize> = (0..occupations.len()).collect();
    occ_order.sort_by(|&a, &b| occupations[a].soc_code.cmp(&occupations[b].soc_code));
    let mut skill_order: Vec<usize> = (0..skills.len()).collect();
    skill_order.sort_by(|&a, &b| skills[a].skill_id.cmp(&skills[b].skill_id));

    let occ_index: HashMap<&str, usize> = occ_order
        .iter()
        .enumerate()
        .map(|(pos, &i)| (occupations[i].soc_code.as_str(), pos))
        .collect();
    let skill_index: HashMap<&str, usize> = skill_order
        .iter()
        .enumerate()
        .map(|(pos, &i)| (skills[i].skill_id.as_str(), pos))
        .collect();

    let mut edges = Vec::with_capacity(links.len());
    for link in links {
        let o = *occ_index
            .get(link.soc_code.as_str())
            .ok_or_else(|| Error::UnresolvedReference(format!("soc code {}", link.soc_code)))?;
        let s = *skill_index
            .get(link.skill_id.as_str())
            .ok_or_else(|| Error::UnresolvedReference(format!("skill id {}", link.skill_id)))?;
        edges.push((o, s));
    }
    edges.sort_unstable();
    edges.dedup();

    let mut occ_degree = vec![0usize; occupations.len()];
    let mut skill_degree = vec![0usize; skills.len()];
    for &(o, s) in &edges {
        occ_degree[o] += 1;
        skill_degree[s] += 1;
    }
    let isolated: Vec<String> = occ_order
        .iter()
        .enumerate()
        .filter(|&(pos, _)| occ_degree[pos] == 0)
        .map(|(_, &i)| occupations[i].soc_code.clone())
        .chain(
            skill_order
                .iter()
                .enumerate()
                .filter(|&(pos, _)| skill_degree[pos] == 0)
                .map(|(_, &i)| skills[i].skill_id.clone()),
        )
        .collect();

    let keep_occ: Vec<usize> = (0..occ_order.len())
        .filter(|&p| occ_degree[p] > 0 || !options.drop_isolated)
        .collect();
    let keep_skill: Vec<usize> = (0..skill_order.len())
        .filter(|&p| skill_degree[p] > 0 || !options.drop_isolated)
        .collect();
    if !isolated.is_empty() && !options.drop_isolated {
        return Err(Error::IsolatedNode(isolated));
    }

    // Renumber after dropping.
    let mut occ_new = vec![usize::MAX; occ_order.len()];
    for (new, &old) in keep_occ.iter().enumerate() {
        occ_new[old] = new;
    }
    let mut skill_new = vec![usize::MAX; skill_order.len()];
    for (new, &old) in keep_skill.iter().enumerate() {
        skill_new[old] = new;
    }
    let edges: Vec<(usize, usize)> = edges
        .into_iter()
        .map(|(o, s)| (occ_new[o], skill_new[s]))
        .collect();

    let occ_ids = keep_occ
        .iter()
        .map(|&p| occupations[occ_order[p]].soc_code.clone())
        .collect();
    let skill_ids = keep_skill
        .iter()
        .map(|&p| skills[skill_order[p]].skill_id.clone())
        .collect();
    let occ_rows: Vec<usize> = keep_occ.iter().map(|&p| occ_order[p]).collect();
    let skill_rows: Vec<usize> = keep_skill.iter().map(|&p| skill_order[p]).collect();
    BipartiteGraph::from_parts(
        occ_ids,
        skill_ids,
        edges,
        occ_features.select(Axis(0), &occ_rows),
        skill_features.select(Axis(0), &skill_rows),
    )
}

impl BipartiteGraph {
    /// Assembles a graph from already-ordered parts without the isolated-node
    /// check; [`BipartiteGraph::validate`] reports structural problems.
    pub fn from_parts(
        occupations: Vec<String>,
        skills: Vec<String>,
        mut edges: Vec<(usize, usize)>,
        occ_features: Array2<f64>,
        skill_features: Array2<f64>,
    ) -> Result<BipartiteGraph> {
        if occ_features.nrows() != occupations.len() || skill_features.nrows() != skills.len() {
            return Err(Error::ShapeMismatch("feature rows do not match node counts".into()));
        }
        if occ_features.ncols() != skill_features.ncols() {
            return Err(Error::DimensionMismatch {
                expected: occ_features.ncols(),
                found: skill_features.ncols(),
            });
        }
        edges.sort_unstable();
        edges.dedup();
        let mut occ_adj = vec![Vec::new(); occupations.len()];
        let mut skill_adj = vec![Vec::new(); skills.len()];
        for &(o, s) in &edges {
            if o >= occupations.len() {
                return Err(Error::InvalidNode(NodeRef::occupation(o).to_string()));
            }
            if s >= skills.len() {
                return Err(Error::InvalidNode(NodeRef::skill(s).to_string()));
            }
            occ_adj[o].push(s);
            skill_adj[s].push(o);
        }
        // Edges are sorted by (o, s) so occupation lists are already sorted.
        for list in &mut skill_adj {
            list.sort_unstable();
        }
        Ok(BipartiteGraph {
            occupations,
            skills,
            edges,
            occ_adj,
            skill_adj,
            occ_features,
            skill_features,
        })
    }

    pub fn num_occupations(&self) -> usize {
        self.occupations.len()
    }

    pub fn num_skills(&self) -> usize {
        self.skills.len()
    }

    pub fn num_nodes(&self) -> usize {
        self.occupations.len() + self.skills.len()
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn occupation_ids(&self) -> &[String] {
        &self.occupations
    }

    pub fn skill_ids(&self) -> &[String] {
        &self.skills
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn feature_dim(&self) -> usize {
        self.occ_features.ncols()
    }

    pub fn occupation_features(&self) -> &Array2<f64> {
        &self.occ_features
    }

    pub fn skill_features(&self) -> &Array2<f64> {
        &self.skill_features
    }

    /// Node feature matrix, occupations first.
    pub fn features(&self) -> Array2<f64> {
        concatenate(Axis(0), &[self.occ_features.view(), self.skill_features.view()])
            .expect("feature dimensions checked at construction")
    }

    pub fn occupation_index(&self, soc_code: &str) -> Option<usize> {
        self.occupations.binary_search_by(|s| s.as_str().cmp(soc_code)).ok()
    }

    /// Skill indices adjacent to an occupation.
    pub fn occupation_skills(&self, occ: usize) -> &[usize] {
        &self.occ_adj[occ]
    }

    /// Occupation indices adjacent to a skill.
    pub fn skill_occupations(&self, skill: usize) -> &[usize] {
        &self.skill_adj[skill]
    }

    pub fn global_index(&self, node: NodeRef) -> usize {
        match node.kind {
            NodeKind::Occupation => node.index,
            NodeKind::Skill => self.occupations.len() + node.index,
        }
    }

    pub fn node_at(&self, global: usize) -> NodeRef {
        if global < self.occupations.len() {
            NodeRef::occupation(global)
        } else {
            NodeRef::skill(global - self.occupations.len())
        }
    }

    fn check(&self, node: NodeRef) -> Result<()> {
        let bound = match node.kind {
            NodeKind::Occupation => self.occupations.len(),
            NodeKind::Skill => self.skills.len(),
        };
        if node.index < bound {
            Ok(())
        } else {
            Err(Error::InvalidNode(node.to_string()))
        }
    }

    pub fn degree(&self, node: NodeRef) -> Result<usize> {
        self.check(node)?;
        Ok(match node.kind {
            NodeKind::Occupation => self.occ_adj[node.index].len(),
            NodeKind::Skill => self.skill_adj[node.index].len(),
        })
    }

    /// Sorted neighbors; always of the opposite kind.
    pub fn neighbors(&self, node: NodeRef) -> Result<Vec<NodeRef>> {
        self.check(node)?;
        Ok(match node.kind {
            NodeKind::Occupation => self.occ_adj[node.index]
                .iter()
                .map(|&s| NodeRef::skill(s))
                .collect(),
            NodeKind::Skill => self.skill_adj[node.index]
                .iter()
                .map(|&o| NodeRef::occupation(o))
                .collect(),
        })
    }

    /// Adjacency in global indices, compressed row form: neighbors of node
    /// `v` are `targets[offsets[v]..offsets[v + 1]]`.
    pub fn csr(&self) -> Csr {
        let n_occ = self.occupations.len();
        let mut offsets = Vec::with_capacity(self.num_nodes() + 1);
        let mut targets = Vec::with_capacity(2 * self.edges.len());
        offsets.push(0);
        for list in &self.occ_adj {
            targets.extend(list.iter().map(|&s| n_occ + s));
            offsets.push(targets.len());
        }
        for list in &self.skill_adj {
            targets.extend(list.iter().copied());
            offsets.push(targets.len());
        }
        Csr { offsets, targets }
    }

    pub fn validate(&self) -> StructureReport {
        let mut occupation_degrees = BTreeMap::new();
        let mut skill_degrees = BTreeMap::new();
        let mut degree_histogram = BTreeMap::new();
        let mut isolated = Vec::new();
        for (i, list) in self.occ_adj.iter().enumerate() {
            *occupation_degrees.entry(list.len()).or_insert(0) += 1;
            *degree_histogram.entry(list.len()).or_insert(0) += 1;
            if list.is_empty() {
                isolated.push(NodeRef::occupation(i));
            }
        }
        for (i, list) in self.skill_adj.iter().enumerate() {
            *skill_degrees.entry(list.len()).or_insert(0) += 1;
            *degree_histogram.entry(list.len()).or_insert(0) += 1;
            if list.is_empty() {
                isolated.push(NodeRef::skill(i));
            }
        }
        let occ_sum: usize = self.occ_adj.iter().map(Vec::len).sum();
        let skill_sum: usize = self.skill_adj.iter().map(Vec::len).sum();
        // Every stored edge joins an occupation index to a skill index, so the
        // check reduces to adjacency symmetry and the absence of duplicates.
        let symmetric = self.edges.iter().all(|&(o, s)| {
            self.skill_adj[s].binary_search(&o).is_ok() && self.occ_adj[o].binary_search(&s).is_ok()
        });
        let no_duplicates = self.edges.windows(2).all(|w| w[0] != w[1]);
        StructureReport {
            occupations: self.occupations.len(),
            skills: self.skills.len(),
            edges: self.edges.len(),
            occupation_degrees,
            skill_degrees,
            degree_histogram,
            bipartite: symmetric && no_duplicates && occ_sum == skill_sum,
            degree_sums_match: occ_sum == self.edges.len() && skill_sum == self.edges.len(),
            isolated,
        }
    }

    pub fn to_file(&self) -> GraphFile {
        GraphFile {
            version: GRAPH_FORMAT_VERSION,
            occupations: self.occupations.clone(),
            skills: self.skills.clone(),
            edges: self.edges.iter().map(|&(o, s)| [o, s]).collect(),
            feature_dim: self.feature_dim(),
        }
    }

    /// Rebuilds a graph from its serialized structure and feature matrices.
    pub fn from_file(
        file: &GraphFile,
        occ_features: Array2<f64>,
        skill_features: Array2<f64>,
    ) -> Result<BipartiteGraph> {
        if file.version != GRAPH_FORMAT_VERSION {
            return Err(Error::Config(format!(
                "unsupported graph format version {}",
                file.version
            )));
        }
        if occ_features.ncols() != file.feature_dim {
            return Err(Error::DimensionMismatch {
                expected: file.feature_dim,
                found: occ_features.ncols(),
            });
        }
        BipartiteGraph::from_parts(
            file.occupations.clone(),
            file.skills.clone(),
            file.edges.iter().map(|e| (e[0], e[1])).collect(),
            occ_features,
            skill_features,
        )
    }

    /// Same structure with replaced node features.
    pub fn with_features(&self, occ_features: Array2<f64>, skill_features: Array2<f64>) -> Result<BipartiteGraph> {
        BipartiteGraph::from_parts(
            self.occupations.clone(),
            self.skills.clone(),
            self.edges.clone(),
            occ_features,
            skill_features,
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Csr {
    pub offsets: Vec<usize>,
    pub targets: Vec<usize>,
}

impl Csr {
    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.targets[self.offsets[v]..self.offsets[v + 1]]
    }

    pub fn num_nodes(&self) -> usize {
        self.offsets.len() - 1
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct StructureReport {
    pub occupations: usize,
    pub skills: usize,
    pub edges: usize,
    pub occupation_degrees: BTreeMap<usize, usize>,
    pub skill_degrees: BTreeMap<usize, usize>,
    /// Degree histogram over all nodes.
    pub degree_histogram: BTreeMap<usize, usize>,
    pub bipartite: bool,
    pub degree_sums_match: bool,
    pub isolated: Vec<NodeRef>,
}

/// On-disk graph structure; feature matrices live in the embedding bundle.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphFile {
    pub version: u32,
    pub occupations: Vec<String>,
    pub skills: Vec<String>,
    pub edges: Vec<[usize; 2]>,
    pub feature_dim: usize,
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::Array2;

    fn occ(code: &str) -> OccupationRecord {
        OccupationRecord {
            soc_code: code.into(),
            title: code.into(),
            task_statements: vec!["task".into()],
        }
    }

    fn skill(id: &str) -> SkillRecord {
        SkillRecord {
            skill_id: id.into(),
            name: id.into(),
        }
    }

    fn link(o: &str, s: &str) -> LinkRecord {
        LinkRecord {
            soc_code: o.into(),
            skill_id: s.into(),
        }
    }

    pub(crate) fn toy() -> BipartiteGraph {
        let occs = vec![occ("o1"), occ("o2"), occ("o3")];
        let skills = vec![skill("s1"), skill("s2")];
        let links = vec![link("o1", "s1"), link("o1", "s2"), link("o2", "s1"), link("o3", "s2")];
        build_graph(
            &occs,
            &skills,
            &links,
            &Array2::zeros((3, 2)),
            &Array2::zeros((2, 2)),
            BuildOptions::default(),
        )
        .unwrap()
    }

    #[test]
    fn minimal_graph() {
        let g = build_graph(
            &[occ("o")],
            &[skill("s")],
            &[link("o", "s")],
            &Array2::zeros((1, 3)),
            &Array2::zeros((1, 3)),
            BuildOptions::default(),
        )
        .unwrap();
        assert_eq!(g.num_edges(), 1);
        assert_eq!(g.degree(NodeRef::occupation(0)).unwrap(), 1);
        assert_eq!(g.degree(NodeRef::skill(0)).unwrap(), 1);
        let report = g.validate();
        assert_eq!(report.degree_histogram, BTreeMap::from([(1, 2)]));
        assert!(report.bipartite);
        assert_eq!(g.neighbors(NodeRef::occupation(0)).unwrap(), vec![NodeRef::skill(0)]);
    }

    #[test]
    fn toy_degrees_and_neighbors() {
        let g = toy();
        assert_eq!(g.degree(NodeRef::skill(0)).unwrap(), 2);
        assert_eq!(g.degree(NodeRef::skill(1)).unwrap(), 2);
        assert_eq!(g.degree(NodeRef::occupation(0)).unwrap(), 2);
        assert_eq!(
            g.neighbors(NodeRef::occupation(0)).unwrap(),
            vec![NodeRef::skill(0), NodeRef::skill(1)]
        );
        assert!(matches!(
            g.neighbors(NodeRef::skill(7)),
            Err(Error::InvalidNode(_))
        ));
    }

    #[test]
    fn nodes_sorted_by_identifier() {
        let occs = vec![occ("b"), occ("a")];
        let skills = vec![skill("z"), skill("y")];
        let links = vec![link("b", "z"), link("a", "y"), link("a", "z")];
        let feats = ndarray::array![[1.0], [2.0]];
        let g = build_graph(&occs, &skills, &links, &feats, &feats, BuildOptions::default()).unwrap();
        assert_eq!(g.occupation_ids(), &["a".to_string(), "b".to_string()]);
        assert_eq!(g.skill_ids(), &["y".to_string(), "z".to_string()]);
        assert_eq!(g.edges(), &[(0, 0), (0, 1), (1, 1)]);
        // Feature rows follow the reordering.
        assert_eq!(g.occupation_features()[[0, 0]], 2.0);
        assert_eq!(g.skill_features()[[0, 0]], 2.0);
    }

    #[test]
    fn isolated_nodes_error_or_drop() {
        let occs = vec![occ("o1"), occ("o2")];
        let skills = vec![skill("s1")];
        let links = vec![link("o1", "s1")];
        let f = Array2::zeros((2, 1));
        let s = Array2::zeros((1, 1));
        assert!(matches!(
            build_graph(&occs, &skills, &links, &f, &s, BuildOptions::default()),
            Err(Error::IsolatedNode(ids)) if ids == vec!["o2".to_string()]
        ));
        let g = build_graph(&occs, &skills, &links, &f, &s, BuildOptions { drop_isolated: true }).unwrap();
        assert_eq!(g.num_occupations(), 1);
    }

    #[test]
    fn validate_reports_forced_isolation() {
        let g = BipartiteGraph::from_parts(
            vec!["o1".into(), "o2".into()],
            vec!["s1".into()],
            vec![(0, 0)],
            Array2::zeros((2, 1)),
            Array2::zeros((1, 1)),
        )
        .unwrap();
        let report = g.validate();
        assert_eq!(report.isolated, vec![NodeRef::occupation(1)]);
    }

    #[test]
    fn errors_on_unresolved_and_dimension() {
        let err = build_graph(
            &[occ("o")],
            &[skill("s")],
            &[link("o", "x")],
            &Array2::zeros((1, 2)),
            &Array2::zeros((1, 2)),
            BuildOptions::default(),
        );
        assert!(matches!(err, Err(Error::UnresolvedReference(_))));
        let err = build_graph(
            &[occ("o")],
            &[skill("s")],
            &[link("o", "s")],
            &Array2::zeros((1, 2)),
            &Array2::zeros((1, 3)),
            BuildOptions::default(),
        );
        assert!(matches!(err, Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn file_round_trip() {
        let g = toy();
        let json = serde_json::to_string(&g.to_file()).unwrap();
        let file: GraphFile = serde_json::from_str(&json).unwrap();
        let back = BipartiteGraph::from_file(&file, g.occupation_features().clone(), g.skill_features().clone()).unwrap();
        assert_eq!(back, g);
    }
}
