use rand::seq::IndexedRandom;
use rand::Rng;

use super::tree::{GpTree, Node};

/// Crossover point pairs tried before giving up and returning the first parent.
pub const CROSSOVER_RETRIES: usize = 10;

/// Grow-method parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TreeGen {
    /// Probability that an expansion above the depth limit stops at a leaf.
    pub leaf_probability: f64,
    /// Ephemeral constants enabled.
    pub constants: bool,
    /// Probability that a leaf is a constant rather than `x` (when enabled).
    pub constant_probability: f64,
    /// Constants are drawn uniformly from `[-range, range]`.
    pub constant_range: f64,
}

impl Default for TreeGen {
    fn default() -> Self {
        Self {
            leaf_probability: 0.3,
            constants: true,
            constant_probability: 0.25,
            constant_range: 10.0,
        }
    }
}

impl TreeGen {
    pub fn without_constants() -> Self {
        Self {
            constants: false,
            ..Self::default()
        }
    }

    fn leaf<R: Rng + ?Sized>(&self, rng: &mut R) -> Node {
        if self.constants && rng.random_bool(self.constant_probability) {
            Node::Const(rng.random_range(-self.constant_range..=self.constant_range))
        } else {
            Node::X
        }
    }

    fn grow<R: Rng + ?Sized>(&self, depth_left: usize, out: &mut Vec<Node>, rng: &mut R) {
        if depth_left <= 1 || rng.random_bool(self.leaf_probability) {
            out.push(self.leaf(rng));
            return;
        }
        let op = *Node::OPERATORS.choose(rng).expect("non-empty");
        out.push(op);
        for _ in 0..op.arity() {
            self.grow(depth_left - 1, out, rng);
        }
    }
}

/// A grow-method tree of depth at most `max_depth`.
pub fn random_tree<R: Rng + ?Sized>(max_depth: usize, gen: &TreeGen, rng: &mut R) -> GpTree {
    assert!(max_depth >= 1, "max_depth must be at least 1");
    let mut nodes = Vec::new();
    gen.grow(max_depth, &mut nodes, rng);
    GpTree::from_prefix_unchecked(nodes)
}

/// Grafts the subtree of `b` at `j` onto a copy of `a` at `i`, or `None` if
/// the result would be deeper than `max_depth`.
pub fn crossover_at(a: &GpTree, i: usize, b: &GpTree, j: usize, max_depth: usize) -> Option<GpTree> {
    let graft = &b.nodes()[j..b.subtree_end(j)];
    let child = a.replace_subtree(i, graft);
    (child.depth() <= max_depth).then_some(child)
}

/// Subtree crossover with caller-chosen points; `pick` returns a node index in
/// `a` and one in `b`. Gives up after [`CROSSOVER_RETRIES`] infeasible pairs
/// and returns a copy of `a`.
pub fn subtree_crossover_with<F>(a: &GpTree, b: &GpTree, max_depth: usize, mut pick: F) -> GpTree
where
    F: FnMut(usize, usize) -> (usize, usize),
{
    for _ in 0..CROSSOVER_RETRIES {
        let (i, j) = pick(a.len(), b.len());
        if let Some(child) = crossover_at(a, i, b, j, max_depth) {
            return child;
        }
    }
    a.clone()
}

/// Replaces a uniformly chosen subtree of a copy of `a` with a uniformly
/// chosen subtree of `b`, keeping the depth within `max_depth`.
pub fn subtree_crossover<R: Rng + ?Sized>(
    a: &GpTree,
    b: &GpTree,
    max_depth: usize,
    rng: &mut R,
) -> GpTree {
    subtree_crossover_with(a, b, max_depth, |na, nb| {
        (rng.random_range(0..na), rng.random_range(0..nb))
    })
}

/// Changes one uniformly chosen node: an operator becomes a different operator
/// of the same arity, a leaf becomes a freshly grown subtree that fits in the
/// remaining depth.
pub fn mutate_tree<R: Rng + ?Sized>(
    t: &GpTree,
    max_depth: usize,
    gen: &TreeGen,
    rng: &mut R,
) -> GpTree {
    let i = rng.random_range(0..t.len());
    mutate_node(t, i, max_depth, gen, rng)
}

pub fn mutate_node<R: Rng + ?Sized>(
    t: &GpTree,
    i: usize,
    max_depth: usize,
    gen: &TreeGen,
    rng: &mut R,
) -> GpTree {
    let node = t.nodes()[i];
    match node.arity() {
        0 => {
            let level = t.levels()[i];
            let allowance = (max_depth + 1).saturating_sub(level).max(1);
            let fresh = random_tree(allowance, gen, rng);
            t.replace_subtree(i, fresh.nodes())
        }
        arity => {
            let family: &[Node] = if arity == 1 { &Node::UNARY } else { &Node::BINARY };
            let others: Vec<Node> = family.iter().copied().filter(|&n| n != node).collect();
            let mut out = t.clone();
            out.set_node(i, *others.choose(rng).expect("family has alternatives"));
            out
        }
    }
}
