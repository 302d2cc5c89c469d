//! Input generators whose random choices are annotated structural or value.

pub mod expr;
pub mod tree;
pub mod xml;

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::choice_source::{ChoiceError, ChoicePoint, ChoiceSource, SplitParameterSequence, StructuralSignature};

pub use expr::ExprGenerator;
pub use tree::{BinaryTree, TreeGenerator};
pub use xml::XmlGenerator;

pub const DEFAULT_TREE_DEPTH: u32 = 5;
pub const DEFAULT_XML_DEPTH: u32 = 4;
pub const DEFAULT_XML_CHILDREN: u32 = 3;
pub const DEFAULT_EXPR_DEPTH: u32 = 6;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GenError {
    #[error(transparent)]
    Choice(#[from] ChoiceError),
    #[error("{name} must be at least 1, got {value}")]
    InvalidBound { name: &'static str, value: u32 },
}

pub(crate) fn check_bound(name: &'static str, value: u32) -> Result<u32, GenError> {
    if value == 0 {
        Err(GenError::InvalidBound { name, value })
    } else {
        Ok(value)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GeneratorSpec {
    pub name: &'static str,
    pub max_depth: u32,
    pub choice_points: Vec<ChoicePoint>,
}

/// A generator draws every random decision from a [`ChoiceSource`] and
/// renders its output canonically, so input identity equals byte identity.
pub trait Generator {
    fn spec(&self) -> GeneratorSpec;

    fn emit(&self, source: &mut ChoiceSource) -> Result<Vec<u8>, ChoiceError>;
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GeneratedInput {
    pub concrete: Vec<u8>,
    pub signature: StructuralSignature,
    /// Exactly the octets the run consumed; strict replay of this reproduces
    /// `concrete`.
    pub source_snapshot: SplitParameterSequence,
}

impl GeneratedInput {
    pub fn text(&self) -> std::borrow::Cow<'_, str> {
        String::from_utf8_lossy(&self.concrete)
    }
}

/// Runs `generator` from the start of `source`'s streams.
pub fn generate<G: Generator + ?Sized>(generator: &G, source: &mut ChoiceSource) -> Result<GeneratedInput, ChoiceError> {
    source.reset();
    let concrete = generator.emit(source)?;
    Ok(GeneratedInput {
        concrete,
        signature: source.structural_signature(),
        source_snapshot: source.params().consumed_prefix(),
    })
}

/// Strict replay of a recorded parameter pair.
pub fn regenerate<G: Generator + ?Sized>(
    generator: &G,
    params: &SplitParameterSequence,
) -> Result<GeneratedInput, ChoiceError> {
    generate(generator, &mut ChoiceSource::strict(params.clone()))
}

pub fn generate_tree(source: &mut ChoiceSource, max_depth: u32) -> Result<GeneratedInput, GenError> {
    Ok(generate(&TreeGenerator::new(max_depth)?, source)?)
}

pub fn generate_xml(source: &mut ChoiceSource, max_depth: u32, max_children: u32) -> Result<GeneratedInput, GenError> {
    Ok(generate(&XmlGenerator::new(max_depth, max_children)?, source)?)
}

pub fn generate_expr(source: &mut ChoiceSource, max_depth: u32) -> Result<GeneratedInput, GenError> {
    Ok(generate(&ExprGenerator::new(max_depth)?, source)?)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GeneratorKind {
    Tree,
    Xml,
    Expr,
}

impl GeneratorKind {
    pub const ALL: [GeneratorKind; 3] = [GeneratorKind::Tree, GeneratorKind::Xml, GeneratorKind::Expr];

    pub fn name(self) -> &'static str {
        match self {
            GeneratorKind::Tree => "tree",
            GeneratorKind::Xml => "xml",
            GeneratorKind::Expr => "expr",
        }
    }

    pub fn default_depth(self) -> u32 {
        match self {
            GeneratorKind::Tree => DEFAULT_TREE_DEPTH,
            GeneratorKind::Xml => DEFAULT_XML_DEPTH,
            GeneratorKind::Expr => DEFAULT_EXPR_DEPTH,
        }
    }

    /// Builds the generator with default bounds, or `max_depth` if given.
    pub fn build(self, max_depth: Option<u32>) -> Result<BundledGenerator, GenError> {
        let depth = max_depth.unwrap_or(self.default_depth());
        Ok(match self {
            GeneratorKind::Tree => BundledGenerator::Tree(TreeGenerator::new(depth)?),
            GeneratorKind::Xml => BundledGenerator::Xml(XmlGenerator::new(depth, DEFAULT_XML_CHILDREN)?),
            GeneratorKind::Expr => BundledGenerator::Expr(ExprGenerator::new(depth)?),
        })
    }
}

impl fmt::Display for GeneratorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for GeneratorKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        GeneratorKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| format!("unknown generator `{s}` (expected tree, xml or expr)"))
    }
}

#[derive(Debug, Clone)]
pub enum BundledGenerator {
    Tree(TreeGenerator),
    Xml(XmlGenerator),
    Expr(ExprGenerator),
}

impl BundledGenerator {
    pub fn kind(&self) -> GeneratorKind {
        match self {
            BundledGenerator::Tree(_) => GeneratorKind::Tree,
            BundledGenerator::Xml(_) => GeneratorKind::Xml,
            BundledGenerator::Expr(_) => GeneratorKind::Expr,
        }
    }
}

impl Generator for BundledGenerator {
    fn spec(&self) -> GeneratorSpec {
        match self {
            BundledGenerator::Tree(g) => g.spec(),
            BundledGenerator::Xml(g) => g.spec(),
            BundledGenerator::Expr(g) => g.spec(),
        }
    }

    fn emit(&self, source: &mut ChoiceSource) -> Result<Vec<u8>, ChoiceError> {
        match self {
            BundledGenerator::Tree(g) => g.emit(source),
            BundledGenerator::Xml(g) => g.emit(source),
            BundledGenerator::Expr(g) => g.emit(source),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kinds_parse() {
        for k in GeneratorKind::ALL {
            assert_eq!(k.name().parse::<GeneratorKind>().unwrap(), k);
            assert_eq!(k.build(None).unwrap().kind(), k);
        }
        assert!("json".parse::<GeneratorKind>().is_err());
    }

    #[test]
    fn zero_depth_rejected() {
        let mut src = ChoiceSource::recording(SplitParameterSequence::default(), 0);
        assert_eq!(
            generate_tree(&mut src, 0),
            Err(GenError::InvalidBound {
                name: "max_depth",
                value: 0
            })
        );
        assert!(generate_xml(&mut src, 2, 0).is_err());
        assert!(generate_expr(&mut src, 0).is_err());
    }

    #[test]
    fn snapshot_replays_for_every_generator() {
        for kind in GeneratorKind::ALL {
            let generator = kind.build(None).unwrap();
            for seed in 0..200 {
                let mut src = ChoiceSource::recording(SplitParameterSequence::default(), seed);
                let first = generate(&generator, &mut src).unwrap();
                let again = regenerate(&generator, &first.source_snapshot).unwrap();
                assert_eq!(first, again, "{kind} seed {seed}");
            }
        }
    }

    #[test]
    fn choice_points_declared() {
        for kind in GeneratorKind::ALL {
            let spec = kind.build(None).unwrap().spec();
            assert!(spec.max_depth >= 1);
            assert!(!spec.choice_points.is_empty());
            assert!(spec.choice_points.iter().all(|p| p.domain_size >= 1));
            let mut locs: Vec<_> = spec.choice_points.iter().map(|p| p.location).collect();
            locs.sort();
            locs.dedup();
            assert_eq!(locs.len(), spec.choice_points.len(), "{kind}: duplicate location");
        }
    }
}
