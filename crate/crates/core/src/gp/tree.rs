use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::objective::sanitize;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Node {
    Add,
    Sub,
    Mul,
    Sin,
    Exp,
    X,
    /// Ephemeral constant.
    Const(f64),
}

impl Node {
    pub const BINARY: [Node; 3] = [Node::Add, Node::Sub, Node::Mul];
    pub const UNARY: [Node; 2] = [Node::Sin, Node::Exp];
    pub const OPERATORS: [Node; 5] = [Node::Add, Node::Sub, Node::Mul, Node::Sin, Node::Exp];

    #[inline]
    pub fn arity(&self) -> usize {
        match self {
            Node::Add | Node::Sub | Node::Mul => 2,
            Node::Sin | Node::Exp => 1,
            Node::X | Node::Const(_) => 0,
        }
    }

    pub fn is_leaf(&self) -> bool {
        self.arity() == 0
    }

    fn name(&self) -> &'static str {
        match self {
            Node::Add => "add",
            Node::Sub => "sub",
            Node::Mul => "mul",
            Node::Sin => "sin",
            Node::Exp => "exp",
            Node::X => "x",
            Node::Const(_) => "c",
        }
    }
}

/// An expression tree over `{add, sub, mul, sin, exp}` with terminals `x`
/// and optional constants, stored in prefix order.
///
/// Depth counts levels, so a lone terminal has depth 1.
#[derive(Debug, Clone, PartialEq)]
pub struct GpTree {
    nodes: Vec<Node>,
}

impl GpTree {
    /// Builds a tree from prefix-ordered nodes, checking arities.
    pub fn from_prefix(nodes: Vec<Node>) -> Result<Self> {
        let mut open: usize = 1;
        for (i, n) in nodes.iter().enumerate() {
            if open == 0 {
                return Err(Error::param(format!("trailing nodes after position {i}")));
            }
            open = open - 1 + n.arity();
            if let Node::Const(c) = n {
                if !c.is_finite() {
                    return Err(Error::param("constants must be finite"));
                }
            }
        }
        if open != 0 || nodes.is_empty() {
            return Err(Error::param("operator is missing operands"));
        }
        Ok(Self { nodes })
    }

    pub(crate) fn from_prefix_unchecked(nodes: Vec<Node>) -> Self {
        debug_assert!(Self::from_prefix(nodes.clone()).is_ok());
        Self { nodes }
    }

    pub fn x() -> Self {
        Self { nodes: vec![Node::X] }
    }

    pub fn constant(c: f64) -> Self {
        Self {
            nodes: vec![Node::Const(c)],
        }
    }

    pub fn unary(op: Node, a: GpTree) -> Self {
        assert_eq!(op.arity(), 1);
        let mut nodes = Vec::with_capacity(1 + a.len());
        nodes.push(op);
        nodes.extend(a.nodes);
        Self { nodes }
    }

    pub fn binary(op: Node, a: GpTree, b: GpTree) -> Self {
        assert_eq!(op.arity(), 2);
        let mut nodes = Vec::with_capacity(1 + a.len() + b.len());
        nodes.push(op);
        nodes.extend(a.nodes);
        nodes.extend(b.nodes);
        Self { nodes }
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    #[allow(clippy::len_without_is_empty)]
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    /// One past the last node of the subtree rooted at `i`.
    pub fn subtree_end(&self, i: usize) -> usize {
        let mut open = 1;
        let mut j = i;
        while open > 0 {
            open = open - 1 + self.nodes[j].arity();
            j += 1;
        }
        j
    }

    pub fn subtree(&self, i: usize) -> GpTree {
        GpTree {
            nodes: self.nodes[i..self.subtree_end(i)].to_vec(),
        }
    }

    /// Copy of `self` with the subtree at `i` replaced by `graft`.
    pub fn replace_subtree(&self, i: usize, graft: &[Node]) -> GpTree {
        let end = self.subtree_end(i);
        let mut nodes = Vec::with_capacity(self.len() - (end - i) + graft.len());
        nodes.extend_from_slice(&self.nodes[..i]);
        nodes.extend_from_slice(graft);
        nodes.extend_from_slice(&self.nodes[end..]);
        GpTree { nodes }
    }

    pub(crate) fn set_node(&mut self, i: usize, node: Node) {
        assert_eq!(self.nodes[i].arity(), node.arity());
        self.nodes[i] = node;
    }

    pub fn depth(&self) -> usize {
        self.levels().into_iter().max().unwrap_or(0)
    }

    /// Level of every node (root is level 1), in prefix order.
    pub fn levels(&self) -> Vec<usize> {
        let mut levels = Vec::with_capacity(self.len());
        // Stack of (level, remaining children) for open operators.
        let mut stack: Vec<(usize, usize)> = Vec::new();
        for n in &self.nodes {
            let level = stack.last().map_or(1, |&(l, _)| l + 1);
            levels.push(level);
            if let Some(top) = stack.last_mut() {
                top.1 -= 1;
            }
            if n.arity() > 0 {
                stack.push((level, n.arity()));
            }
            while matches!(stack.last(), Some(&(_, 0))) {
                stack.pop();
            }
        }
        levels
    }

    /// Height of every subtree (a leaf has height 1), in prefix order.
    pub fn heights(&self) -> Vec<usize> {
        let mut heights = vec![0; self.len()];
        let mut stack: Vec<usize> = Vec::new();
        for (i, n) in self.nodes.iter().enumerate().rev() {
            let h = match n.arity() {
                0 => 1,
                1 => stack.pop().expect("valid tree") + 1,
                _ => {
                    let a = stack.pop().expect("valid tree");
                    let b = stack.pop().expect("valid tree");
                    a.max(b) + 1
                }
            };
            heights[i] = h;
            stack.push(h);
        }
        heights
    }

    /// Evaluates the expression at `x`. Non-finite results become the penalty
    /// value.
    pub fn eval(&self, x: f64) -> f64 {
        sanitize(self.eval_raw(x))
    }

    /// Plain IEEE evaluation without the penalty mapping.
    pub fn eval_raw(&self, x: f64) -> f64 {
        self.eval_at(0, x).0
    }

    fn eval_at(&self, i: usize, x: f64) -> (f64, usize) {
        match self.nodes[i] {
            Node::X => (x, i + 1),
            Node::Const(c) => (c, i + 1),
            Node::Sin => {
                let (a, j) = self.eval_at(i + 1, x);
                (a.sin(), j)
            }
            Node::Exp => {
                let (a, j) = self.eval_at(i + 1, x);
                (a.exp(), j)
            }
            op => {
                let (a, j) = self.eval_at(i + 1, x);
                let (b, k) = self.eval_at(j, x);
                let v = match op {
                    Node::Add => a + b,
                    Node::Sub => a - b,
                    _ => a * b,
                };
                (v, k)
            }
        }
    }

    pub fn uses_constants(&self) -> bool {
        self.nodes.iter().any(|n| matches!(n, Node::Const(_)))
    }

    fn write_at(&self, i: usize, out: &mut String) -> usize {
        use std::fmt::Write;
        let n = self.nodes[i];
        match n {
            Node::X => {
                out.push('x');
                i + 1
            }
            Node::Const(c) => {
                // `Display` for f64 is the shortest round-tripping form.
                write!(out, "c{c}").expect("write to string");
                i + 1
            }
            op => {
                out.push('(');
                out.push_str(op.name());
                let mut j = i + 1;
                for _ in 0..op.arity() {
                    out.push(' ');
                    j = self.write_at(j, out);
                }
                out.push(')');
                j
            }
        }
    }
}

impl fmt::Display for GpTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut s = String::with_capacity(self.len() * 6);
        self.write_at(0, &mut s);
        f.write_str(&s)
    }
}

struct Parser<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> Parser<'a> {
    fn err<T>(&self, message: impl Into<String>) -> Result<T> {
        Err(Error::Parse {
            offset: self.pos,
            message: message.into(),
        })
    }

    fn skip_ws(&mut self) {
        let rest = &self.src[self.pos..];
        self.pos += rest.len() - rest.trim_start().len();
    }

    /// Next atom: a maximal run of characters that are not whitespace or parens.
    fn atom(&mut self) -> &'a str {
        let rest = &self.src[self.pos..];
        let end = rest
            .find(|c: char| c.is_whitespace() || c == '(' || c == ')')
            .unwrap_or(rest.len());
        self.pos += end;
        &rest[..end]
    }

    fn expr(&mut self, out: &mut Vec<Node>) -> Result<()> {
        self.skip_ws();
        match self.src[self.pos..].chars().next() {
            None => self.err("unexpected end of input"),
            Some(')') => self.err("unexpected `)`"),
            Some('(') => {
                self.pos += 1;
                self.skip_ws();
                let start = self.pos;
                let op = match self.atom() {
                    "add" => Node::Add,
                    "sub" => Node::Sub,
                    "mul" => Node::Mul,
                    "sin" => Node::Sin,
                    "exp" => Node::Exp,
                    other => {
                        self.pos = start;
                        return self.err(format!("unknown operator `{other}`"));
                    }
                };
                out.push(op);
                for _ in 0..op.arity() {
                    self.expr(out)?;
                }
                self.skip_ws();
                if self.src[self.pos..].starts_with(')') {
                    self.pos += 1;
                    Ok(())
                } else {
                    self.err(format!("expected `)` closing `{}`", op.name()))
                }
            }
            Some(_) => {
                let start = self.pos;
                let atom = self.atom();
                if atom == "x" {
                    out.push(Node::X);
                    return Ok(());
                }
                let value = atom
                    .strip_prefix('c')
                    .and_then(|v| f64::from_str(v).ok())
                    .filter(|v| v.is_finite());
                match value {
                    Some(v) => {
                        out.push(Node::Const(v));
                        Ok(())
                    }
                    None => {
                        self.pos = start;
                        self.err(format!("expected `x` or `c<decimal>`, found `{atom}`"))
                    }
                }
            }
        }
    }
}

impl FromStr for GpTree {
    type Err = Error;

    /// Parses the parenthesized prefix form produced by `Display`.
    fn from_str(s: &str) -> Result<Self> {
        let mut p = Parser { src: s, pos: 0 };
        let mut nodes = Vec::new();
        p.expr(&mut nodes)?;
        p.skip_ws();
        if p.pos != s.len() {
            return p.err("trailing input after expression");
        }
        Ok(GpTree::from_prefix_unchecked(nodes))
    }
}
