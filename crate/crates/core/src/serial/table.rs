//! OPEN/CLOSED bookkeeping shared by every best-first engine.
//!
//! OPEN is a binary heap keyed by (priority, −g, insertion sequence) with lazy
//! deletion: a node whose g improves gets a fresh heap entry and the old one
//! is skipped when it surfaces. CLOSED is the same node map with the `open`
//! flag cleared.

use std::cmp::Ordering;
use std::collections::hash_map::Entry as MapEntry;
use std::collections::{BinaryHeap, HashMap};
use std::hash::Hash;

use super::Weight;
use crate::problem::{Cost, COST_EPS};

#[derive(Clone, Debug)]
pub(crate) struct NodeRecord<S, Pa> {
    pub state: S,
    pub g: Cost,
    pub h: Cost,
    pub parent: Option<Pa>,
    pub open: bool,
    seq: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum Relax {
    Inserted,
    /// A better path to a node still on OPEN.
    Improved,
    /// A better path to a CLOSED node, which moved back to OPEN.
    Reopened,
    Duplicate,
}

#[derive(Debug)]
struct HeapEntry {
    key: Cost,
    g: Cost,
    seq: u64,
    node: usize,
}

impl PartialEq for HeapEntry {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for HeapEntry {}

impl PartialOrd for HeapEntry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for HeapEntry {
    // BinaryHeap is a max-heap: the "greatest" entry is the smallest key,
    // then the largest g, then the oldest sequence number.
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .key
            .total_cmp(&self.key)
            .then_with(|| self.g.total_cmp(&other.g))
            .then_with(|| other.seq.cmp(&self.seq))
    }
}

pub(crate) struct NodeTable<S, Pa> {
    index: HashMap<S, usize>,
    nodes: Vec<NodeRecord<S, Pa>>,
    heap: BinaryHeap<HeapEntry>,
    next_seq: u64,
    weight: Weight,
    open_len: usize,
}

impl<S: Clone + Eq + Hash, Pa> NodeTable<S, Pa> {
    pub fn new(weight: Weight) -> Self {
        NodeTable {
            index: HashMap::new(),
            nodes: Vec::new(),
            heap: BinaryHeap::new(),
            next_seq: 0,
            weight,
            open_len: 0,
        }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn open_len(&self) -> usize {
        self.open_len
    }

    pub fn node(&self, i: usize) -> &NodeRecord<S, Pa> {
        &self.nodes[i]
    }

    pub fn get(&self, s: &S) -> Option<&NodeRecord<S, Pa>> {
        self.index.get(s).map(|&i| &self.nodes[i])
    }

    fn push(&mut self, i: usize) {
        let n = &mut self.nodes[i];
        n.seq = self.next_seq;
        self.next_seq += 1;
        self.heap.push(HeapEntry { key: self.weight.priority(n.g, n.h), g: n.g, seq: n.seq, node: i });
    }

    /// Offers a path of cost `g` to `state`. A node already known is only
    /// updated when `g` beats its stored g by more than [`COST_EPS`]; equal
    /// costs count as duplicates.
    pub fn relax(&mut self, state: S, g: Cost, parent: Option<Pa>, h: impl FnOnce(&S) -> Cost) -> Relax {
        match self.index.entry(state) {
            MapEntry::Occupied(e) => {
                let i = *e.get();
                let n = &mut self.nodes[i];
                if g < n.g - COST_EPS {
                    let reopened = !n.open;
                    n.g = g;
                    n.parent = parent;
                    if reopened {
                        n.open = true;
                        self.open_len += 1;
                    }
                    self.push(i);
                    if reopened {
                        Relax::Reopened
                    } else {
                        Relax::Improved
                    }
                } else {
                    Relax::Duplicate
                }
            }
            MapEntry::Vacant(e) => {
                let i = self.nodes.len();
                let state = e.key().clone();
                let h = h(&state);
                e.insert(i);
                self.nodes.push(NodeRecord { state, g, h, parent, open: true, seq: 0 });
                self.open_len += 1;
                self.push(i);
                Relax::Inserted
            }
        }
    }

    fn discard_stale(&mut self) {
        while let Some(top) = self.heap.peek() {
            let n = &self.nodes[top.node];
            if n.open && n.seq == top.seq {
                break;
            }
            self.heap.pop();
        }
    }

    /// Priority key and f = g + h of the best OPEN node.
    pub fn peek(&mut self) -> Option<(Cost, Cost)> {
        self.discard_stale();
        self.heap.peek().map(|e| {
            let n = &self.nodes[e.node];
            (e.key, n.g + n.h)
        })
    }

    /// Moves the best OPEN node to CLOSED and returns its index.
    pub fn pop(&mut self) -> Option<usize> {
        self.discard_stale();
        let e = self.heap.pop()?;
        self.nodes[e.node].open = false;
        self.open_len -= 1;
        Some(e.node)
    }

    /// Smallest f among OPEN nodes, by a full scan (used by invariant checks).
    pub fn min_open_f(&self) -> Option<Cost> {
        self.nodes
            .iter()
            .filter(|n| n.open)
            .map(|n| n.g + n.h)
            .min_by(|a, b| a.total_cmp(b))
    }
}

impl<S: Clone + Eq + Hash> NodeTable<S, usize> {
    /// States from the root to node `i` following parent indices.
    pub fn path_to(&self, mut i: usize) -> Vec<S> {
        let mut path = vec![self.nodes[i].state.clone()];
        while let Some(p) = self.nodes[i].parent {
            path.push(self.nodes[p].state.clone());
            i = p;
        }
        path.reverse();
        path
    }
}
