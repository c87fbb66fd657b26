//! The reachable-state DAG of a game, built once and shared by the exact
//! distribution DPs and the uniform sampler.

use std::collections::HashMap;

use num_bigint::BigUint;
use num_traits::{One, Zero};

use crate::engine::{GameState, Move};
use crate::error::{Error, Result};

/// Reachable boards of the game on `n`, with their outgoing moves in
/// canonical order and a children-first ordering of the nodes.
#[derive(Debug, Clone)]
pub struct StateGraph {
    n: u64,
    states: Vec<GameState>,
    children: Vec<Vec<(Move, u32)>>,
    post_order: Vec<u32>,
    index: HashMap<Vec<u64>, u32>,
}

impl StateGraph {
    /// Explores every board reachable from the initial state of `n`.
    pub fn build(n: u64, state_budget: usize) -> Result<Self> {
        Self::build_with(n, state_budget, |_| true)
    }

    /// Same as [`StateGraph::build`] but only follows moves accepted by `keep`.
    pub fn build_with(n: u64, state_budget: usize, keep: impl Fn(Move) -> bool) -> Result<Self> {
        let root = GameState::initial(n)?;
        let mut g = StateGraph {
            n,
            states: Vec::new(),
            children: Vec::new(),
            post_order: Vec::new(),
            index: HashMap::new(),
        };
        g.insert(root, state_budget)?;
        // iterative DFS: (node, next child to visit)
        let mut stack: Vec<(u32, usize)> = vec![(0, 0)];
        let mut expanded = vec![false];
        while let Some(&(id, next)) = stack.last() {
            if !expanded[id as usize] {
                expanded[id as usize] = true;
                let s = g.states[id as usize].clone();
                let mut kids = Vec::new();
                for m in s.legal_moves() {
                    if !keep(m) {
                        continue;
                    }
                    let mut c = s.clone();
                    c.apply_unchecked(m);
                    let cid = match g.index.get(c.heights()) {
                        Some(&cid) => cid,
                        None => {
                            let cid = g.insert(c, state_budget)?;
                            expanded.push(false);
                            cid
                        }
                    };
                    kids.push((m, cid));
                }
                g.children[id as usize] = kids;
            }
            let kids = &g.children[id as usize];
            if next < kids.len() {
                let cid = kids[next].1;
                if let Some(top) = stack.last_mut() {
                    top.1 += 1;
                }
                if !expanded[cid as usize] {
                    stack.push((cid, 0));
                }
            } else {
                g.post_order.push(id);
                stack.pop();
            }
        }
        Ok(g)
    }

    fn insert(&mut self, s: GameState, budget: usize) -> Result<u32> {
        if self.states.len() >= budget {
            return Err(Error::StateBudgetExceeded { limit: budget });
        }
        let id = self.states.len() as u32;
        self.index.insert(s.heights().to_vec(), id);
        self.states.push(s);
        self.children.push(Vec::new());
        Ok(id)
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn root(&self) -> u32 {
        0
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn state(&self, id: u32) -> &GameState {
        &self.states[id as usize]
    }

    pub fn id_of(&self, heights: &[u64]) -> Option<u32> {
        self.index.get(heights).copied()
    }

    pub fn children(&self, id: u32) -> &[(Move, u32)] {
        &self.children[id as usize]
    }

    /// Node ids with every node after all of its children.
    pub fn post_order(&self) -> &[u32] {
        &self.post_order
    }

    /// Whether the node is a complete-game end (no legal moves at all, not
    /// merely no followed moves).
    pub fn is_terminal(&self, id: u32) -> bool {
        self.states[id as usize].is_terminal()
    }

    /// Number of complete games from each node, indexed by node id.
    pub fn game_counts(&self) -> Vec<BigUint> {
        let mut counts = vec![BigUint::zero(); self.len()];
        for &id in &self.post_order {
            let kids = &self.children[id as usize];
            counts[id as usize] = if kids.is_empty() {
                if self.is_terminal(id) {
                    BigUint::one()
                } else {
                    BigUint::zero()
                }
            } else {
                kids.iter().map(|&(_, c)| &counts[c as usize]).sum()
            };
        }
        counts
    }

    pub fn max_out_degree(&self) -> usize {
        self.children.iter().map(Vec::len).max().unwrap_or(0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_graphs() {
        let g = StateGraph::build(5, 100).unwrap();
        assert_eq!(g.len(), 6);
        assert_eq!(g.game_counts()[0], BigUint::from(3u32));
        let g = StateGraph::build(1, 100).unwrap();
        assert_eq!(g.len(), 1);
        assert_eq!(g.game_counts()[0], BigUint::one());
    }

    #[test]
    fn post_order_children_first() {
        let g = StateGraph::build(12, 1000).unwrap();
        let mut pos = vec![0; g.len()];
        for (i, &id) in g.post_order().iter().enumerate() {
            pos[id as usize] = i;
        }
        for id in 0..g.len() as u32 {
            for &(_, c) in g.children(id) {
                assert!(pos[c as usize] < pos[id as usize]);
            }
        }
        assert_eq!(g.len(), 33);
        assert_eq!(g.game_counts()[0], BigUint::from(13184u32));
    }

    #[test]
    fn budget_enforced() {
        assert_eq!(
            StateGraph::build(12, 10).unwrap_err(),
            Error::StateBudgetExceeded { limit: 10 }
        );
    }
}
