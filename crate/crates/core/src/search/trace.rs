use super::{SearchConfig, Strategy};
use crate::kernel::{Fingerprint, Tactic};
use serde::{Deserialize, Serialize};
use std::time::Duration;

/// How the prover reacted to one attempted tactic.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum OutcomeClass {
    /// Rejected by the kernel.
    Error,
    /// Accepted, but the resulting state was already seen.
    Stagnation,
    /// Accepted and produced a fresh state.
    Progress,
    /// Closed the last goal.
    Success,
}

impl OutcomeClass {
    pub const ALL: [OutcomeClass; 4] = [
        OutcomeClass::Error,
        OutcomeClass::Stagnation,
        OutcomeClass::Progress,
        OutcomeClass::Success,
    ];
}

impl std::fmt::Display for OutcomeClass {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        std::fmt::Debug::fmt(self, f)
    }
}

/// One attempted tactic. Children are the attempts made on the state this
/// tactic produced, so only `Progress` nodes have children.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceNode {
    pub tactic: Tactic,
    pub outcome: OutcomeClass,
    pub depth: usize,
    pub order_index: usize,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub children: Vec<TraceNode>,
}

/// Every attempt of one search, as a forest rooted at the initial state.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchTree {
    pub theorem_id: String,
    pub strategy: Strategy,
    pub config: SearchConfig,
    pub root_fingerprint: Fingerprint,
    pub tactic_count: usize,
    pub roots: Vec<TraceNode>,
    /// Not serialized: traces must be byte-identical across runs.
    #[serde(skip)]
    pub wall_time: Duration,
}

impl SearchTree {
    /// Visit every node in attempt order together with its parent.
    pub fn walk<'a>(&'a self, mut visit: impl FnMut(Option<&'a TraceNode>, &'a TraceNode)) {
        fn go<'a>(
            parent: Option<&'a TraceNode>,
            nodes: &'a [TraceNode],
            visit: &mut impl FnMut(Option<&'a TraceNode>, &'a TraceNode),
        ) {
            for n in nodes {
                visit(parent, n);
                go(Some(n), &n.children, visit);
            }
        }
        go(None, &self.roots, &mut visit);
    }

    pub fn node_count(&self) -> usize {
        let mut n = 0;
        self.walk(|_, _| n += 1);
        n
    }
}

/// Flat record used while searching; turned into a tree at the end.
#[derive(Debug)]
pub(crate) struct Recorder {
    nodes: Vec<(Option<usize>, TraceNode)>,
}

impl Recorder {
    pub(crate) fn new() -> Self {
        Recorder { nodes: Vec::new() }
    }

    pub(crate) fn record(
        &mut self,
        parent: Option<usize>,
        tactic: Tactic,
        outcome: OutcomeClass,
        depth: usize,
    ) -> usize {
        let order_index = self.nodes.len();
        self.nodes.push((
            parent,
            TraceNode {
                tactic,
                outcome,
                depth,
                order_index,
                children: Vec::new(),
            },
        ));
        order_index
    }

    pub(crate) fn len(&self) -> usize {
        self.nodes.len()
    }

    pub(crate) fn into_roots(self) -> Vec<TraceNode> {
        // parents always precede children, so fold from the back
        let mut slots: Vec<Option<(Option<usize>, TraceNode)>> =
            self.nodes.into_iter().map(Some).collect();
        let mut roots = Vec::new();
        for i in (0..slots.len()).rev() {
            let (parent, mut node) = slots[i].take().expect("each node taken once");
            node.children.reverse();
            match parent {
                Some(p) => slots[p]
                    .as_mut()
                    .expect("parent precedes child")
                    .1
                    .children
                    .push(node),
                None => roots.push(node),
            }
        }
        roots.reverse();
        roots
    }
}
