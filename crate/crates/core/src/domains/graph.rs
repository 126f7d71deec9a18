//! Explicit weighted digraphs.
//!
//! Text format, one directive per line (`#` starts a comment):
//!
//! ```text
//! start a
//! goal d
//! a b 1
//! b d 1
//! h a 2
//! node z
//! ```
//!
//! `u v cost` adds a directed edge; `h u value` sets a heuristic value
//! (default 0); `node u` declares a node without edges.

use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::DomainError;
use crate::problem::{Cost, SearchProblem};

#[derive(Clone, Debug, Default)]
pub struct ExplicitGraph {
    names: Vec<String>,
    ids: HashMap<String, u32>,
    adj: Vec<Vec<(u32, Cost)>>,
    h: Vec<Cost>,
    goal: Vec<bool>,
    start: Option<u32>,
}

impl ExplicitGraph {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn node(&mut self, name: &str) -> u32 {
        if let Some(&id) = self.ids.get(name) {
            return id;
        }
        let id = self.names.len() as u32;
        self.names.push(name.to_string());
        self.ids.insert(name.to_string(), id);
        self.adj.push(Vec::new());
        self.h.push(0.0);
        self.goal.push(false);
        id
    }

    pub fn add_edge(&mut self, from: &str, to: &str, cost: Cost) -> Result<(), DomainError> {
        if !cost.is_finite() || cost < 0.0 {
            return Err(DomainError::Invalid(format!("edge {from}->{to} has invalid cost {cost}")));
        }
        let (u, v) = (self.node(from), self.node(to));
        self.adj[u as usize].push((v, cost));
        Ok(())
    }

    pub fn set_start(&mut self, name: &str) {
        let id = self.node(name);
        self.start = Some(id);
    }

    pub fn add_goal(&mut self, name: &str) {
        let id = self.node(name);
        self.goal[id as usize] = true;
    }

    pub fn set_h(&mut self, name: &str, value: Cost) -> Result<(), DomainError> {
        if value.is_nan() || value < 0.0 {
            return Err(DomainError::Invalid(format!("negative heuristic for {name}")));
        }
        let id = self.node(name);
        self.h[id as usize] = value;
        Ok(())
    }

    pub fn id(&self, name: &str) -> Option<u32> {
        self.ids.get(name).copied()
    }

    pub fn name(&self, id: u32) -> &str {
        &self.names[id as usize]
    }

    pub fn node_count(&self) -> usize {
        self.names.len()
    }

    pub fn edges(&self, id: u32) -> &[(u32, Cost)] {
        &self.adj[id as usize]
    }

    pub fn parse(text: &str) -> Result<ExplicitGraph, DomainError> {
        let mut g = ExplicitGraph::new();
        for (idx, raw) in text.lines().enumerate() {
            let lineno = idx + 1;
            let line = raw.split('#').next().unwrap().trim();
            if line.is_empty() {
                continue;
            }
            let toks: Vec<&str> = line.split_whitespace().collect();
            let number = |s: &str| -> Result<Cost, DomainError> {
                s.parse::<Cost>()
                    .map_err(|_| DomainError::parse(lineno, format!("not a number: `{s}`")))
            };
            match toks.as_slice() {
                ["start", u] => g.set_start(u),
                ["goal", v] => g.add_goal(v),
                ["node", u] => {
                    g.node(u);
                }
                ["h", u, value] => {
                    let value = number(value)?;
                    g.set_h(u, value).map_err(|e| DomainError::parse(lineno, e.to_string()))?;
                }
                [u, v, cost] => {
                    let cost = number(cost)?;
                    g.add_edge(u, v, cost).map_err(|e| DomainError::parse(lineno, e.to_string()))?;
                }
                _ => return Err(DomainError::parse(lineno, format!("unrecognised line `{line}`"))),
            }
        }
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<(), DomainError> {
        if self.start.is_none() {
            return Err(DomainError::Invalid("graph has no start node".into()));
        }
        if !self.goal.iter().any(|&g| g) {
            return Err(DomainError::Invalid("graph has no goal node".into()));
        }
        Ok(())
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        if let Some(start) = self.start {
            s.push_str(&format!("start {}\n", self.names[start as usize]));
        }
        for (i, _) in self.goal.iter().enumerate().filter(|(_, &g)| g) {
            s.push_str(&format!("goal {}\n", self.names[i]));
        }
        for (u, edges) in self.adj.iter().enumerate() {
            if edges.is_empty() {
                s.push_str(&format!("node {}\n", self.names[u]));
            }
            for &(v, c) in edges {
                s.push_str(&format!("{} {} {}\n", self.names[u], self.names[v as usize], c));
            }
        }
        for (u, &h) in self.h.iter().enumerate() {
            if h != 0.0 {
                s.push_str(&format!("h {} {}\n", self.names[u], h));
            }
        }
        s
    }

    /// Random digraph on nodes `n0 … n{nodes−1}` with `edges` extra edges of
    /// integer cost 1–9, start `n0` and goal `n{nodes−1}`. Heuristic values
    /// are zero. The goal need not be reachable.
    pub fn random(nodes: usize, edges: usize, seed: u64) -> Result<Self, DomainError> {
        if nodes < 2 {
            return Err(DomainError::Invalid("a random graph needs at least two nodes".into()));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut g = ExplicitGraph::new();
        for i in 0..nodes {
            g.node(&format!("n{i}"));
        }
        g.set_start("n0");
        g.add_goal(&format!("n{}", nodes - 1));
        for _ in 0..edges {
            let u = rng.gen_range(0..nodes);
            let v = rng.gen_range(0..nodes);
            if u != v {
                let cost = rng.gen_range(1..=9) as Cost;
                g.add_edge(&format!("n{u}"), &format!("n{v}"), cost)?;
            }
        }
        Ok(g)
    }

    /// The four-node graph on which a decentralized search can expand `d`
    /// through the costlier branch before the cheap one arrives.
    pub fn missorder() -> Self {
        ExplicitGraph::parse("start a\ngoal d\na b 1\na c 1\nb d 1\nc d 3\n").expect("valid graph")
    }
}

impl SearchProblem for ExplicitGraph {
    type State = u32;

    fn initial(&self) -> u32 {
        self.start.expect("validated graph has a start")
    }

    fn is_goal(&self, s: &u32) -> bool {
        self.goal[*s as usize]
    }

    fn expand(&self, s: &u32, out: &mut Vec<(u32, Cost)>) {
        out.extend_from_slice(&self.adj[*s as usize]);
    }

    fn heuristic(&self, s: &u32) -> Cost {
        self.h[*s as usize]
    }

    fn feature_count(&self) -> usize {
        self.names.len()
    }

    fn features(&self, s: &u32, out: &mut Vec<u32>) {
        out.push(*s);
    }

    fn canonical_bytes(&self, s: &u32) -> Vec<u8> {
        s.to_le_bytes().to_vec()
    }
}
