//! Binary-search-tree checker over the tree generator's serialization.

use super::{hit, Fault, Sut, Verdict};
use crate::generators::BinaryTree;

const DEPTH_CAP: u32 = 7;
const SEARCH_KEYS: [i64; 3] = [0, 5, 10];

/// Valid iff the tree is a strict BST. Valid trees then go through a
/// semantic stage (size, height, balance, searches) that is fully probed.
#[derive(Debug, Clone, Copy, Default)]
pub struct BstChecker;

impl Sut for BstChecker {
    fn name(&self) -> &str {
        "bst_checker"
    }

    fn execute(&self, input: &[u8]) -> Result<Verdict, Fault> {
        let Some(tree) = parse_tree(input) else {
            hit(2);
            return Ok(Verdict::Invalid);
        };
        hit(1);
        if tree.left.is_none() && tree.right.is_none() {
            hit(3);
        } else {
            hit(4);
        }
        walk_shape(&tree, 0);
        if !is_bst(&tree, None, None, 0) {
            return Ok(Verdict::Invalid);
        }
        let size = count(&tree);
        hit(100 + size_bucket(size));
        let height = height(&tree);
        hit(110 + height.min(DEPTH_CAP));
        balance(&tree, 0);
        for key in SEARCH_KEYS {
            if search(&tree, key) {
                hit(160);
            } else {
                hit(161);
            }
        }
        if leftmost(&tree) == 0 {
            hit(170);
        }
        if rightmost(&tree) == 10 {
            hit(171);
        }
        Ok(Verdict::Valid)
    }
}

fn dcap(depth: u32) -> u32 {
    depth.min(DEPTH_CAP)
}

fn walk_shape(node: &BinaryTree, depth: u32) {
    let shape = (node.left.is_some() as u32) * 2 + node.right.is_some() as u32;
    hit(10 + 4 * dcap(depth) + shape);
    for child in [&node.left, &node.right].into_iter().flatten() {
        walk_shape(child, depth + 1);
    }
}

fn is_bst(node: &BinaryTree, lo: Option<i64>, hi: Option<i64>, depth: u32) -> bool {
    let d = dcap(depth);
    if let Some(lo) = lo {
        if node.value > lo {
            hit(50 + 2 * d);
        } else {
            hit(51 + 2 * d);
            hit(95);
            return false;
        }
    } else {
        hit(90);
    }
    if let Some(hi) = hi {
        if node.value < hi {
            hit(70 + 2 * d);
        } else {
            hit(71 + 2 * d);
            hit(96);
            return false;
        }
    } else {
        hit(91);
    }
    let left_ok = node
        .left
        .as_ref()
        .is_none_or(|l| is_bst(l, lo, Some(node.value), depth + 1));
    left_ok
        && node
            .right
            .as_ref()
            .is_none_or(|r| is_bst(r, Some(node.value), hi, depth + 1))
}

fn size_bucket(size: usize) -> u32 {
    match size {
        0..=1 => 0,
        2..=3 => 1,
        4..=7 => 2,
        8..=15 => 3,
        _ => 4,
    }
}

fn count(node: &BinaryTree) -> usize {
    1 + [&node.left, &node.right]
        .into_iter()
        .flatten()
        .map(|c| count(c))
        .sum::<usize>()
}

fn height(node: &BinaryTree) -> u32 {
    [&node.left, &node.right]
        .into_iter()
        .flatten()
        .map(|c| 1 + height(c))
        .max()
        .unwrap_or(0)
}

/// AVL balance check at every node; returns the subtree height.
fn balance(node: &BinaryTree, depth: u32) -> i64 {
    let hl = node.left.as_ref().map_or(0, |l| balance(l, depth + 1));
    let hr = node.right.as_ref().map_or(0, |r| balance(r, depth + 1));
    if (hl - hr).abs() <= 1 {
        hit(120 + 2 * dcap(depth));
    } else {
        hit(121 + 2 * dcap(depth));
    }
    1 + hl.max(hr)
}

fn search(root: &BinaryTree, key: i64) -> bool {
    let mut node = Some(root);
    let mut depth = 0;
    while let Some(n) = node {
        if key == n.value {
            return true;
        }
        let go_left = key < n.value;
        hit(140 + 2 * dcap(depth) + go_left as u32);
        node = if go_left { n.left.as_deref() } else { n.right.as_deref() };
        depth += 1;
    }
    false
}

fn leftmost(node: &BinaryTree) -> i64 {
    node.left.as_deref().map_or(node.value, leftmost)
}

fn rightmost(node: &BinaryTree) -> i64 {
    node.right.as_deref().map_or(node.value, rightmost)
}

/// Parses `7` or `(v L R)` / `(v)` with `-` for a missing child.
pub fn parse_tree(input: &[u8]) -> Option<BinaryTree> {
    let text = std::str::from_utf8(input).ok()?;
    if !text.starts_with('(') {
        return Some(BinaryTree::leaf(parse_int(text)?));
    }
    let mut p = Parser { s: text.as_bytes(), pos: 0 };
    let tree = p.node()?;
    (p.pos == p.s.len()).then_some(tree)
}

fn parse_int(s: &str) -> Option<i64> {
    if s.is_empty() || s.len() > 18 || !s.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    s.parse().ok()
}

struct Parser<'a> {
    s: &'a [u8],
    pos: usize,
}

impl Parser<'_> {
    fn eat(&mut self, c: u8) -> Option<()> {
        (self.s.get(self.pos) == Some(&c)).then(|| self.pos += 1)
    }

    fn node(&mut self) -> Option<BinaryTree> {
        self.eat(b'(')?;
        let start = self.pos;
        while self.s.get(self.pos).is_some_and(u8::is_ascii_digit) {
            self.pos += 1;
        }
        let value = parse_int(std::str::from_utf8(&self.s[start..self.pos]).ok()?)?;
        let mut tree = BinaryTree::leaf(value);
        if self.eat(b')').is_some() {
            return Some(tree);
        }
        self.eat(b' ')?;
        tree.left = self.child()?;
        self.eat(b' ')?;
        tree.right = self.child()?;
        if tree.left.is_none() && tree.right.is_none() {
            return None;
        }
        self.eat(b')')?;
        Some(tree)
    }

    fn child(&mut self) -> Option<Option<Box<BinaryTree>>> {
        if self.eat(b'-').is_some() {
            Some(None)
        } else {
            Some(Some(Box::new(self.node()?)))
        }
    }
}
