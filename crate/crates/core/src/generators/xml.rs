use std::fmt::Write;

use super::{check_bound, GenError, Generator, GeneratorSpec};
use crate::choice_source::{ChoiceError, ChoiceKind, ChoicePoint, ChoiceSource};

pub const TAGS: [&str; 10] = ["a", "b", "c", "d", "e", "f", "g", "h", "i", "j"];
pub const ATTR_NAMES: [&str; 4] = ["id", "ref", "lang", "class"];
pub const TEXTS: [&str; 6] = ["", "x", "42", "hello", "-1", "data"];
pub const ATTR_VALUE_MAX: i64 = 15;

/// Small XML-like documents.
///
/// Whether an element carries an attribute and how many children it has are
/// structural; tag names, attribute names and values, and text are values.
#[derive(Debug, Clone)]
pub struct XmlGenerator {
    max_depth: u32,
    max_children: u32,
}

impl XmlGenerator {
    pub fn new(max_depth: u32, max_children: u32) -> Result<Self, GenError> {
        Ok(Self {
            max_depth: check_bound("max_depth", max_depth)?,
            max_children: check_bound("max_children", max_children)?,
        })
    }

    fn element(&self, source: &mut ChoiceSource, depth: u32, out: &mut String) -> Result<(), ChoiceError> {
        let tag = *source.choose_from(ChoiceKind::Value, &TAGS)?;
        out.push('<');
        out.push_str(tag);
        if source.choose_bool(ChoiceKind::Structural)? {
            let name = source.choose_from(ChoiceKind::Value, &ATTR_NAMES)?;
            let value = source.choose_int(ChoiceKind::Value, 0, ATTR_VALUE_MAX)?;
            write!(out, " {name}=\"{value}\"").unwrap();
        }
        out.push('>');
        let children = if depth + 1 < self.max_depth {
            source.choose_int(ChoiceKind::Structural, 0, self.max_children as i64)?
        } else {
            0
        };
        if children == 0 {
            out.push_str(source.choose_from(ChoiceKind::Value, &TEXTS)?);
        }
        for _ in 0..children {
            self.element(source, depth + 1, out)?;
        }
        write!(out, "</{tag}>").unwrap();
        Ok(())
    }
}

impl Generator for XmlGenerator {
    fn spec(&self) -> GeneratorSpec {
        GeneratorSpec {
            name: "xml",
            max_depth: self.max_depth,
            choice_points: vec![
                ChoicePoint::new("xml.tag", TAGS.len() as u64, ChoiceKind::Value),
                ChoicePoint::new("xml.has_attribute", 2, ChoiceKind::Structural),
                ChoicePoint::new("xml.attribute_name", ATTR_NAMES.len() as u64, ChoiceKind::Value),
                ChoicePoint::new("xml.attribute_value", ATTR_VALUE_MAX as u64 + 1, ChoiceKind::Value),
                ChoicePoint::new("xml.child_count", self.max_children as u64 + 1, ChoiceKind::Structural),
                ChoicePoint::new("xml.text", TEXTS.len() as u64, ChoiceKind::Value),
            ],
        }
    }

    fn emit(&self, source: &mut ChoiceSource) -> Result<Vec<u8>, ChoiceError> {
        let mut out = String::new();
        self.element(source, 0, &mut out)?;
        Ok(out.into_bytes())
    }
}
