//! Bounded implementation enumeration and the thorough-distance oracle.
//!
//! An implementation resolves all optional behavior: must equals may and
//! every label is a point. [`implementations_up_to`] enumerates the
//! depth-bounded, grid-valued fragment of a system's implementation set:
//! at each unfolding node every required transition is realized with one
//! grid point, any subset of the allowed transitions is added, and the
//! unfolding stops at the depth bound. The result under-approximates the
//! implementation semantics and is intended for oracle use on small
//! systems only; a node budget guards against explosion.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::distance::{refinement_distance, GridSettings};
use crate::error::{Error, Result};
use crate::label::{implementations, TimedLabel};
use crate::lattice::GridConfig;
use crate::smts::{Smts, StateId};
use crate::value::Value;

/// Tree-shaped unfolding of a system to the given depth: node `(state,
/// remaining)` keeps all transitions while `remaining > 0` and none at the
/// leaves. Both relations are preserved.
pub fn unroll(s: &Smts, depth: usize) -> Smts {
    let mut out = Smts::with_names(
        vec![format!("{}@{}", s.name(s.initial()), depth)],
        StateId(0),
    );
    let mut stack: Vec<(StateId, usize, StateId)> = vec![(s.initial(), depth, StateId(0))];
    while let Some((state, rem, node)) = stack.pop() {
        if rem == 0 {
            continue;
        }
        for &(l, t) in s.may(state) {
            let child = out.add_state(format!("{}@{}", s.name(t), rem - 1));
            out.add_may(node, l, child);
            stack.push((t, rem - 1, child));
        }
        for &(l, t) in s.must(state) {
            // Must targets get their own nodes; the covering may is added
            // alongside to keep the unfolding consistent.
            let child = out.add_state(format!("{}@{}", s.name(t), rem - 1));
            out.add_must(node, l, child);
            out.add_may(node, l, child);
            stack.push((t, rem - 1, child));
        }
    }
    out
}

enum Tree {
    Leaf,
    Node(Vec<(TimedLabel, Tree)>),
}

/// All depth-bounded grid implementations of `s`, within a total node
/// budget.
pub fn implementations_up_to(
    s: &Smts,
    depth: usize,
    grid: &GridConfig,
    budget: usize,
) -> Result<Vec<Smts>> {
    let trees = enum_trees(s, s.initial(), depth, grid, &mut Counter(budget))?;
    Ok(trees.iter().map(tree_to_smts).collect())
}

struct Counter(usize);

impl Counter {
    fn spend(&mut self, n: usize) -> Result<()> {
        if self.0 < n {
            return Err(Error::Budget(
                "implementation enumeration exceeded its node budget".into(),
            ));
        }
        self.0 -= n;
        Ok(())
    }
}

fn enum_trees(
    s: &Smts,
    state: StateId,
    depth: usize,
    grid: &GridConfig,
    budget: &mut Counter,
) -> Result<Vec<Tree>> {
    if depth == 0 {
        budget.spend(1)?;
        return Ok(vec![Tree::Leaf]);
    }
    // Options per transition: for a must, one realization is mandatory;
    // for a may, None (omit) is allowed too.
    let mut option_sets: Vec<Vec<Option<(TimedLabel, Tree)>>> = Vec::new();
    for (edges, optional) in [(s.must(state), false), (s.may(state), true)] {
        for &(l, t) in edges {
            let mut opts: Vec<Option<(TimedLabel, Tree)>> = Vec::new();
            if optional {
                opts.push(None);
            }
            for point in implementations(&l, grid)? {
                for sub in enum_trees(s, t, depth - 1, grid, budget)? {
                    budget.spend(1)?;
                    opts.push(Some((point, sub)));
                }
            }
            option_sets.push(opts);
        }
    }
    // Cross product over the per-transition options.
    let mut acc: Vec<Vec<(TimedLabel, Tree)>> = vec![Vec::new()];
    for opts in option_sets {
        let mut next = Vec::new();
        for partial in &acc {
            for opt in &opts {
                budget.spend(1)?;
                let mut extended: Vec<(TimedLabel, Tree)> =
                    partial.iter().map(|(l, t)| (*l, clone_tree(t))).collect();
                if let Some((l, t)) = opt {
                    extended.push((*l, clone_tree(t)));
                }
                next.push(extended);
            }
        }
        acc = next;
    }
    Ok(acc.into_iter().map(Tree::Node).collect())
}

fn clone_tree(t: &Tree) -> Tree {
    match t {
        Tree::Leaf => Tree::Leaf,
        Tree::Node(children) => {
            Tree::Node(children.iter().map(|(l, c)| (*l, clone_tree(c))).collect())
        }
    }
}

fn tree_to_smts(tree: &Tree) -> Smts {
    let mut out = Smts::with_names(vec!["i0".into()], StateId(0));
    let mut stack: Vec<(&Tree, StateId)> = vec![(tree, StateId(0))];
    while let Some((t, node)) = stack.pop() {
        if let Tree::Node(children) = t {
            for (l, sub) in children {
                let child = out.add_state(format!("i{}", out.n_states()));
                out.add_must_with_may(node, *l, child);
                stack.push((sub, child));
            }
        }
    }
    debug_assert!(out.is_consistent());
    out
}

/// Brute-force thorough-distance approximation: the sup over enumerated
/// implementations of `s` of the inf over enumerated implementations of
/// `t` of their refinement distance, both sides truncated at the same
/// depth. A lower bound of the thorough distance, and never above the
/// refinement distance at matched truncation.
pub fn thorough_distance_oracle(
    s: &Smts,
    t: &Smts,
    depth: usize,
    grid: &GridConfig,
    settings: &GridSettings,
    budget: usize,
) -> Result<Value> {
    let left = implementations_up_to(s, depth, grid, budget)?;
    let right = implementations_up_to(t, depth, grid, budget)?;
    let mut sup = Value::zero();
    for i in &left {
        let mut inf = Value::Infinity;
        for j in &right {
            let d = refinement_distance(i, j, settings)?.value;
            if d < inf {
                inf = d;
            }
            if inf == Value::zero() {
                break;
            }
        }
        if inf > sup {
            sup = inf;
        }
    }
    Ok(sup)
}
