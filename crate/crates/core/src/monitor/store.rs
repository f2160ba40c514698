use std::collections::BTreeMap;

use crate::kripke::ApSet;

/// Node handle in a [`PrefixTree`]; the root is the empty prefix.
pub type NodeId = usize;

#[derive(Debug, Clone)]
struct Node {
    parent: Option<NodeId>,
    depth: usize,
    event: ApSet,
    children: BTreeMap<ApSet, NodeId>,
}

/// Trace storage in which traces with a common prefix share its nodes.
#[derive(Debug, Clone)]
pub struct PrefixTree {
    nodes: Vec<Node>,
}

impl Default for PrefixTree {
    fn default() -> Self {
        PrefixTree {
            nodes: vec![Node {
                parent: None,
                depth: 0,
                event: ApSet::new(),
                children: BTreeMap::new(),
            }],
        }
    }
}

impl PrefixTree {
    pub const ROOT: NodeId = 0;

    pub fn new() -> Self {
        Self::default()
    }

    /// Total number of nodes, the root included.
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.len() == 1
    }

    /// The node for `node` extended by `event`, created if needed.
    pub fn extend(&mut self, node: NodeId, event: &ApSet) -> NodeId {
        if let Some(&c) = self.nodes[node].children.get(event) {
            return c;
        }
        let id = self.nodes.len();
        self.nodes.push(Node {
            parent: Some(node),
            depth: self.nodes[node].depth + 1,
            event: event.clone(),
            children: BTreeMap::new(),
        });
        self.nodes[node].children.insert(event.clone(), id);
        id
    }

    pub fn insert(&mut self, events: &[ApSet]) -> NodeId {
        events.iter().fold(Self::ROOT, |n, e| self.extend(n, e))
    }

    /// Length of the prefix ending at `node`.
    pub fn depth(&self, node: NodeId) -> usize {
        self.nodes[node].depth
    }

    /// Nodes from the first event down to `node`.
    pub fn path(&self, node: NodeId) -> Vec<NodeId> {
        let mut path = Vec::with_capacity(self.depth(node));
        let mut n = node;
        while let Some(p) = self.nodes[n].parent {
            path.push(n);
            n = p;
        }
        path.reverse();
        path
    }

    pub fn event(&self, node: NodeId) -> &ApSet {
        &self.nodes[node].event
    }

    /// The event sequence ending at `node`.
    pub fn events(&self, node: NodeId) -> Vec<ApSet> {
        self.path(node).into_iter().map(|n| self.nodes[n].event.clone()).collect()
    }
}
