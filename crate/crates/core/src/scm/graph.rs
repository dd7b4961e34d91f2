use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::{Deserialize, Serialize};

use super::{Distribution, Mechanism, Operand, ScmError};
use crate::ops::OperatorId;

/// Names that cannot be used for nodes (they are keys in `trace.json`).
pub const RESERVED_NAMES: [&str; 3] = ["seed", "scene_id", "eps"];

/// Which image a node's corruption is applied to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RenderFrom {
    /// The render of the single parent node.
    Parent,
    /// The uncorrupted scene.
    Clean,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorruptionNode {
    pub name: String,
    pub operator: OperatorId,
    /// Exogenous noise terms, drawn in declaration order before any parameter.
    pub eps: Vec<(String, Distribution)>,
    /// Structural equations, evaluated in declaration order.
    pub params: Vec<(String, Mechanism)>,
    pub render_from: RenderFrom,
}

impl CorruptionNode {
    pub fn new(name: impl Into<String>, operator: OperatorId) -> Self {
        CorruptionNode {
            name: name.into(),
            operator,
            eps: Vec::new(),
            params: Vec::new(),
            render_from: RenderFrom::Clean,
        }
    }

    pub fn with_eps(mut self, name: impl Into<String>, d: Distribution) -> Self {
        self.eps.push((name.into(), d));
        self
    }

    pub fn with_param(mut self, name: impl Into<String>, m: Mechanism) -> Self {
        self.params.push((name.into(), m));
        self
    }

    pub fn with_render_from(mut self, r: RenderFrom) -> Self {
        self.render_from = r;
        self
    }

    pub fn mechanism(&self, param: &str) -> Option<&Mechanism> {
        self.params.iter().find(|(n, _)| n == param).map(|(_, m)| m)
    }

    pub fn eps_map(&self) -> BTreeMap<String, Distribution> {
        self.eps.iter().cloned().collect()
    }
}

/// Graph-wide sampling options.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct GraphOptions {
    /// Shift half-normal draws by the parameter's identity value.
    pub half_normal_offset: bool,
}

/// A validated corruption DAG.
///
/// Equality is structural: node declaration order and edge order do not matter.
#[derive(Debug, Clone, Serialize)]
pub struct CausalGraph {
    nodes: Vec<CorruptionNode>,
    edges: Vec<(String, String)>,
    options: GraphOptions,
    #[serde(skip)]
    order: Vec<usize>,
}

impl CausalGraph {
    pub fn new(nodes: Vec<CorruptionNode>, edges: Vec<(String, String)>) -> Result<Self, ScmError> {
        Self::with_options(nodes, edges, GraphOptions::default())
    }

    pub fn with_options(
        nodes: Vec<CorruptionNode>,
        edges: Vec<(String, String)>,
        options: GraphOptions,
    ) -> Result<Self, ScmError> {
        let mut seen = BTreeSet::new();
        for n in &nodes {
            if RESERVED_NAMES.contains(&n.name.as_str()) {
                return Err(ScmError::ReservedName(n.name.clone()));
            }
            if !seen.insert(n.name.as_str()) {
                return Err(ScmError::DuplicateNode(n.name.clone()));
            }
        }
        let names: Vec<&str> = nodes.iter().map(|n| n.name.as_str()).collect();
        let order = order_indices(&names, &edges)?;
        let graph = CausalGraph {
            nodes,
            edges,
            options,
            order,
        };
        for n in &graph.nodes {
            graph.check_node(n)?;
        }
        Ok(graph)
    }

    fn check_node(&self, node: &CorruptionNode) -> Result<(), ScmError> {
        let required: Vec<&str> = node.operator.params().iter().map(|s| s.name).collect();
        let declared: Vec<&str> = node.params.iter().map(|(p, _)| p.as_str()).collect();
        let missing: Vec<String> = required
            .iter()
            .filter(|r| !declared.contains(r))
            .map(|s| s.to_string())
            .collect();
        let mut extra: Vec<String> = declared
            .iter()
            .filter(|d| !required.contains(d))
            .map(|s| s.to_string())
            .collect();
        let mut uniq = BTreeSet::new();
        for d in &declared {
            if !uniq.insert(*d) {
                extra.push(format!("{d} (repeated)"));
            }
        }
        if !missing.is_empty() || !extra.is_empty() {
            return Err(ScmError::ArityError {
                node: node.name.clone(),
                missing,
                extra,
            });
        }

        let parents = self.parents(&node.name);
        if node.render_from == RenderFrom::Parent && parents.len() != 1 {
            return Err(ScmError::InvalidRenderFrom {
                node: node.name.clone(),
                parents: parents.len(),
            });
        }

        let mut eps_names = BTreeSet::new();
        for (name, d) in &node.eps {
            if !eps_names.insert(name.as_str()) {
                return Err(ScmError::DuplicateNode(format!(
                    "{}.eps({name})",
                    node.name
                )));
            }
            d.validate()?;
        }
        for (_, m) in &node.params {
            m.validate_dists()?;
            for op in m.operands() {
                let ok = match &op {
                    Operand::Eps(e) => eps_names.contains(e.as_str()),
                    Operand::Param { node: p, param } => {
                        parents.contains(&p.as_str())
                            && self
                                .node(p)
                                .is_some_and(|pn| pn.operator.param(param).is_some())
                    }
                };
                if !ok {
                    let reference = match op {
                        Operand::Eps(e) => format!("eps({e})"),
                        Operand::Param { node, param } => format!("{node}.{param}"),
                    };
                    return Err(ScmError::UnknownReference {
                        node: node.name.clone(),
                        reference,
                    });
                }
            }
        }
        Ok(())
    }

    pub fn nodes(&self) -> &[CorruptionNode] {
        &self.nodes
    }

    pub fn edges(&self) -> &[(String, String)] {
        &self.edges
    }

    pub fn options(&self) -> GraphOptions {
        self.options
    }

    pub fn node(&self, name: &str) -> Option<&CorruptionNode> {
        self.nodes.iter().find(|n| n.name == name)
    }

    /// Parents in edge declaration order.
    pub fn parents(&self, name: &str) -> Vec<&str> {
        self.edges
            .iter()
            .filter(|(_, c)| c == name)
            .map(|(p, _)| p.as_str())
            .collect()
    }

    pub fn children(&self, name: &str) -> Vec<&str> {
        self.edges
            .iter()
            .filter(|(p, _)| p == name)
            .map(|(_, c)| c.as_str())
            .collect()
    }

    /// Nodes in sampling order.
    pub fn ordered_nodes(&self) -> impl Iterator<Item = &CorruptionNode> {
        self.order.iter().map(move |&i| &self.nodes[i])
    }

    pub fn topological_order(&self) -> Vec<String> {
        self.ordered_nodes().map(|n| n.name.clone()).collect()
    }

    /// Transitive descendants of `name`, excluding itself.
    pub fn descendants(&self, name: &str) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        let mut stack = vec![name.to_string()];
        while let Some(n) = stack.pop() {
            for c in self.children(&n) {
                if out.insert(c.to_string()) {
                    stack.push(c.to_string());
                }
            }
        }
        out
    }

    /// The node whose image this node's corruption is applied to, `None` for the clean scene.
    pub fn render_input(&self, name: &str) -> Option<&str> {
        let node = self.node(name)?;
        match node.render_from {
            RenderFrom::Clean => None,
            RenderFrom::Parent => self.parents(name).into_iter().next(),
        }
    }

    fn sorted_edges(&self) -> Vec<(&str, &str)> {
        let mut e: Vec<_> = self
            .edges
            .iter()
            .map(|(a, b)| (a.as_str(), b.as_str()))
            .collect();
        e.sort_unstable();
        e
    }

    pub(crate) fn replace_mechanism(
        &mut self,
        node: &str,
        param: &str,
        m: Mechanism,
    ) -> Result<(), ScmError> {
        let n = self
            .nodes
            .iter_mut()
            .find(|n| n.name == node)
            .ok_or_else(|| ScmError::UnknownNode(node.to_string()))?;
        let slot = n
            .params
            .iter_mut()
            .find(|(p, _)| p == param)
            .ok_or_else(|| ScmError::UnknownParam {
                node: node.to_string(),
                param: param.to_string(),
            })?;
        slot.1 = m;
        Ok(())
    }
}

impl PartialEq for CausalGraph {
    fn eq(&self, other: &Self) -> bool {
        self.options == other.options
            && self.nodes.len() == other.nodes.len()
            && self.nodes.iter().all(|n| other.node(&n.name) == Some(n))
            && self.sorted_edges() == other.sorted_edges()
    }
}

/// Sort nodes so every parent precedes its children.
///
/// Ties are broken by declaration order, so the result is deterministic.
pub fn topological_order(
    nodes: &[CorruptionNode],
    edges: &[(String, String)],
) -> Result<Vec<String>, ScmError> {
    let names: Vec<&str> = nodes.iter().map(|n| n.name.as_str()).collect();
    Ok(order_indices(&names, edges)?
        .into_iter()
        .map(|i| names[i].to_string())
        .collect())
}

fn order_indices(names: &[&str], edges: &[(String, String)]) -> Result<Vec<usize>, ScmError> {
    let index: HashMap<&str, usize> = names.iter().enumerate().map(|(i, n)| (*n, i)).collect();
    let mut parents: Vec<Vec<usize>> = vec![Vec::new(); names.len()];
    for (p, c) in edges {
        let pi = *index
            .get(p.as_str())
            .ok_or_else(|| ScmError::UnknownNode(p.clone()))?;
        let ci = *index
            .get(c.as_str())
            .ok_or_else(|| ScmError::UnknownNode(c.clone()))?;
        parents[ci].push(pi);
    }
    let mut placed = vec![false; names.len()];
    let mut order = Vec::with_capacity(names.len());
    while order.len() < names.len() {
        let next = (0..names.len()).find(|&i| !placed[i] && parents[i].iter().all(|&p| placed[p]));
        match next {
            Some(i) => {
                placed[i] = true;
                order.push(i);
            }
            None => {
                let cycle = find_cycle(&parents, &placed);
                return Err(ScmError::CyclicGraph {
                    cycle: cycle.into_iter().map(|i| names[i].to_string()).collect(),
                });
            }
        }
    }
    Ok(order)
}

/// Walk parent links among unplaced nodes until a node repeats.
fn find_cycle(parents: &[Vec<usize>], placed: &[bool]) -> Vec<usize> {
    let Some(start) = (0..parents.len()).find(|&i| !placed[i]) else {
        return Vec::new();
    };
    let mut path = vec![start];
    let mut cur = start;
    loop {
        // an unplaced node always has at least one unplaced parent
        let next = parents[cur]
            .iter()
            .copied()
            .find(|&p| !placed[p])
            .unwrap_or(cur);
        if let Some(pos) = path.iter().position(|&n| n == next) {
            let mut cycle: Vec<usize> = path[pos..].to_vec();
            // path follows parent links; report in edge direction
            cycle.reverse();
            cycle.push(cycle[0]);
            return cycle;
        }
        path.push(next);
        cur = next;
    }
}
