use std::fmt::{self, Write};

use super::{check_bound, GenError, Generator, GeneratorSpec};
use crate::choice_source::{ChoiceError, ChoiceKind, ChoicePoint, ChoiceSource};

/// Random binary trees with node values in `0..=10`.
///
/// Node values are value choices; the two "generate child?" decisions are
/// structural. Nodes at `max_depth` are always leaves.
#[derive(Debug, Clone)]
pub struct TreeGenerator {
    max_depth: u32,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BinaryTree {
    pub value: i64,
    pub left: Option<Box<BinaryTree>>,
    pub right: Option<Box<BinaryTree>>,
}

impl BinaryTree {
    pub fn leaf(value: i64) -> Self {
        Self {
            value,
            left: None,
            right: None,
        }
    }

    fn is_leaf(&self) -> bool {
        self.left.is_none() && self.right.is_none()
    }

    fn write_node(&self, out: &mut impl Write) -> fmt::Result {
        write!(out, "({}", self.value)?;
        if !self.is_leaf() {
            for child in [&self.left, &self.right] {
                out.write_char(' ')?;
                match child {
                    Some(c) => c.write_node(out)?,
                    None => out.write_char('-')?,
                }
            }
        }
        out.write_char(')')
    }
}

/// Parenthesized preorder. A lone root prints as its bare value; a missing
/// child beside a present sibling prints as `-`.
impl fmt::Display for BinaryTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_leaf() {
            write!(f, "{}", self.value)
        } else {
            self.write_node(f)
        }
    }
}

impl TreeGenerator {
    pub const VALUE_MAX: i64 = 10;

    pub fn new(max_depth: u32) -> Result<Self, GenError> {
        Ok(Self {
            max_depth: check_bound("max_depth", max_depth)?,
        })
    }

    pub fn build(&self, source: &mut ChoiceSource) -> Result<BinaryTree, ChoiceError> {
        self.node(source, 0)
    }

    fn node(&self, source: &mut ChoiceSource, depth: u32) -> Result<BinaryTree, ChoiceError> {
        let mut tree = BinaryTree::leaf(source.choose_int(ChoiceKind::Value, 0, Self::VALUE_MAX)?);
        if depth >= self.max_depth {
            return Ok(tree);
        }
        if source.choose_bool(ChoiceKind::Structural)? {
            tree.left = Some(Box::new(self.node(source, depth + 1)?));
        }
        if source.choose_bool(ChoiceKind::Structural)? {
            tree.right = Some(Box::new(self.node(source, depth + 1)?));
        }
        Ok(tree)
    }
}

impl Generator for TreeGenerator {
    fn spec(&self) -> GeneratorSpec {
        GeneratorSpec {
            name: "tree",
            max_depth: self.max_depth,
            choice_points: vec![
                ChoicePoint::new("tree.node_value", Self::VALUE_MAX as u64 + 1, ChoiceKind::Value),
                ChoicePoint::new("tree.has_left", 2, ChoiceKind::Structural),
                ChoicePoint::new("tree.has_right", 2, ChoiceKind::Structural),
            ],
        }
    }

    fn emit(&self, source: &mut ChoiceSource) -> Result<Vec<u8>, ChoiceError> {
        Ok(self.build(source)?.to_string().into_bytes())
    }
}
