//! Well-formedness and schema validator for the XML-like generator output.
//!
//! Schema:
//! - the root element is `a`, `b` or `c`;
//! - `h` and `i` are leaf elements;
//! - `b` may not be a direct child of `b`;
//! - `id` values are unique and every `ref` names an existing `id`;
//! - `lang` may only appear on the root;
//! - text inside `d` is a non-negative decimal number (or empty).

use std::collections::HashSet;

use super::{hit, Fault, Sut, Verdict};
use crate::generators::xml::{ATTR_NAMES, TAGS, TEXTS};

#[derive(Debug, Clone, Copy, Default)]
pub struct XmlValidator;

#[derive(Debug)]
struct Element {
    tag: String,
    attrs: Vec<(String, String)>,
    text: String,
    children: Vec<Element>,
}

impl Sut for XmlValidator {
    fn name(&self) -> &str {
        "xml_validator"
    }

    fn execute(&self, input: &[u8]) -> Result<Verdict, Fault> {
        let root = match parse_document(input) {
            Ok(root) => root,
            Err(ParseError::Mismatch) => {
                hit(3);
                return Ok(Verdict::Invalid);
            }
            Err(ParseError::Syntax) => {
                hit(2);
                return Ok(Verdict::Invalid);
            }
        };
        hit(1);

        let mut check = Checker::default();
        if ["a", "b", "c"].contains(&root.tag.as_str()) {
            hit(50);
        } else {
            hit(51);
            check.violations += 1;
        }
        check.visit(&root, None, 0);
        check.resolve_refs();
        if check.violations > 0 {
            return Ok(Verdict::Invalid);
        }
        semantic_stage(&root, &check);
        Ok(Verdict::Valid)
    }
}

#[derive(Default)]
struct Checker {
    violations: u32,
    ids: HashSet<String>,
    refs: Vec<String>,
    elements: u32,
    max_depth: u32,
    tags_seen: HashSet<String>,
}

impl Checker {
    fn visit(&mut self, el: &Element, parent: Option<&str>, depth: u32) {
        let d = depth.min(3);
        self.elements += 1;
        self.max_depth = self.max_depth.max(depth);
        self.tags_seen.insert(el.tag.clone());
        let Some(tag_idx) = TAGS.iter().position(|t| *t == el.tag) else {
            hit(5);
            self.violations += 1;
            return;
        };
        let tag_idx = tag_idx as u32;
        hit(10 + tag_idx * 4 + d);

        if el.tag == "h" || el.tag == "i" {
            if el.children.is_empty() {
                hit(53);
            } else {
                hit(52);
                self.violations += 1;
            }
        }
        if el.tag == "b" {
            if parent == Some("b") {
                hit(54);
                self.violations += 1;
            } else {
                hit(55);
            }
        }

        for (name, value) in &el.attrs {
            match ATTR_NAMES.iter().position(|n| n == name) {
                Some(i) => hit(70 + i as u32 * 4 + d),
                None => {
                    hit(6);
                    self.violations += 1;
                }
            }
            match name.as_str() {
                "id" => {
                    if self.ids.insert(value.clone()) {
                        hit(56);
                    } else {
                        hit(57);
                        self.violations += 1;
                    }
                }
                "ref" => self.refs.push(value.clone()),
                "lang" => {
                    if depth == 0 {
                        hit(60);
                    } else {
                        hit(61);
                        self.violations += 1;
                    }
                }
                "class" => hit(171),
                _ => {}
            }
        }

        hit(90 + tag_idx * 4 + (el.children.len() as u32).min(3));
        if el.children.is_empty() {
            match TEXTS.iter().position(|t| *t == el.text) {
                Some(i) => hit(130 + i as u32),
                None => hit(136),
            }
            if el.tag == "d" {
                if el.text.is_empty() {
                    hit(64);
                } else if el.text.bytes().all(|b| b.is_ascii_digit()) {
                    hit(62);
                } else {
                    hit(63);
                    self.violations += 1;
                }
            }
        }
        for child in &el.children {
            self.visit(child, Some(&el.tag), depth + 1);
        }
    }

    fn resolve_refs(&mut self) {
        for r in &self.refs {
            if self.ids.contains(r) {
                hit(58);
            } else {
                hit(59);
                self.violations += 1;
            }
        }
    }
}

fn semantic_stage(root: &Element, check: &Checker) {
    let bucket = match check.elements {
        1 => 0,
        2..=3 => 1,
        4..=7 => 2,
        8..=15 => 3,
        _ => 4,
    };
    hit(140 + bucket);
    hit(150 + check.max_depth.min(4));
    hit(160 + check.tags_seen.len().min(10) as u32);
    // document order of ids vs the refs pointing at them
    let mut order = Vec::new();
    preorder_attrs(root, &mut order);
    for (pos, (name, value)) in order.iter().enumerate() {
        if name == "ref" {
            let target = order.iter().position(|(n, v)| n == "id" && v == value);
            match target {
                Some(t) if t < pos => hit(175),
                Some(_) => hit(176),
                None => {}
            }
        }
    }
}

fn preorder_attrs(el: &Element, out: &mut Vec<(String, String)>) {
    out.extend(el.attrs.iter().cloned());
    for c in &el.children {
        preorder_attrs(c, out);
    }
}

#[derive(Debug, PartialEq, Eq)]
enum ParseError {
    Syntax,
    Mismatch,
}

fn parse_document(input: &[u8]) -> Result<Element, ParseError> {
    let mut p = XmlParser { s: input, pos: 0 };
    let root = p.element()?;
    if p.pos != input.len() {
        return Err(ParseError::Syntax);
    }
    Ok(root)
}

struct XmlParser<'a> {
    s: &'a [u8],
    pos: usize,
}

impl XmlParser<'_> {
    fn peek(&self) -> Option<u8> {
        self.s.get(self.pos).copied()
    }

    fn expect(&mut self, c: u8) -> Result<(), ParseError> {
        if self.peek() == Some(c) {
            self.pos += 1;
            Ok(())
        } else {
            Err(ParseError::Syntax)
        }
    }

    fn name(&mut self) -> Result<String, ParseError> {
        let start = self.pos;
        while self.peek().is_some_and(|c| c.is_ascii_alphanumeric()) {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(ParseError::Syntax);
        }
        Ok(String::from_utf8_lossy(&self.s[start..self.pos]).into_owned())
    }

    fn element(&mut self) -> Result<Element, ParseError> {
        self.expect(b'<')?;
        let tag = self.name()?;
        let mut attrs = Vec::new();
        while self.peek() == Some(b' ') {
            self.pos += 1;
            let name = self.name()?;
            self.expect(b'=')?;
            self.expect(b'"')?;
            let start = self.pos;
            while self.peek().is_some_and(|c| c != b'"' && c != b'<') {
                self.pos += 1;
            }
            let value = String::from_utf8_lossy(&self.s[start..self.pos]).into_owned();
            self.expect(b'"')?;
            attrs.push((name, value));
        }
        self.expect(b'>')?;
        let mut children = Vec::new();
        let mut text = String::new();
        if self.s[self.pos..].starts_with(b"<") && !self.s[self.pos..].starts_with(b"</") {
            while self.s[self.pos..].starts_with(b"<") && !self.s[self.pos..].starts_with(b"</") {
                children.push(self.element()?);
            }
        } else {
            let start = self.pos;
            while self.peek().is_some_and(|c| c != b'<') {
                self.pos += 1;
            }
            text = String::from_utf8_lossy(&self.s[start..self.pos]).into_owned();
        }
        self.expect(b'<')?;
        self.expect(b'/')?;
        let close = self.name()?;
        self.expect(b'>')?;
        if close != tag {
            return Err(ParseError::Mismatch);
        }
        Ok(Element {
            tag,
            attrs,
            text,
            children,
        })
    }
}
