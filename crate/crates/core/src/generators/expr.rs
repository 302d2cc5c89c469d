use std::fmt::Write;

use super::{check_bound, GenError, Generator, GeneratorSpec};
use crate::choice_source::{ChoiceError, ChoiceKind, ChoicePoint, ChoiceSource};

pub const OPERATORS: [char; 5] = ['+', '-', '*', '/', '%'];
pub const LITERAL_MAX: i64 = 99;

/// Integer expressions with `let` bindings.
///
/// The node type is decided by one-octet structural booleans (compound or
/// leaf, then let or binary, or variable or literal), so every structural
/// octet read carries exactly one decision bit. Literal values, variable
/// indices and operators are value choices. Variables are only offered when
/// a binding is in scope, which is itself a structural fact.
///
/// Rendering: `7`, `v0`, `(a+b)`, `(let v0=a in b)`.
#[derive(Debug, Clone)]
pub struct ExprGenerator {
    max_depth: u32,
}

impl ExprGenerator {
    pub fn new(max_depth: u32) -> Result<Self, GenError> {
        Ok(Self {
            max_depth: check_bound("max_depth", max_depth)?,
        })
    }

    fn node(&self, source: &mut ChoiceSource, depth: u32, scope: u32, out: &mut String) -> Result<(), ChoiceError> {
        let compound = depth + 1 < self.max_depth && source.choose_bool(ChoiceKind::Structural)?;
        if compound {
            if source.choose_bool(ChoiceKind::Structural)? {
                write!(out, "(let v{scope}=").unwrap();
                self.node(source, depth + 1, scope, out)?;
                out.push_str(" in ");
                self.node(source, depth + 1, scope + 1, out)?;
                out.push(')');
            } else {
                let op = *source.choose_from(ChoiceKind::Value, &OPERATORS)?;
                out.push('(');
                self.node(source, depth + 1, scope, out)?;
                out.push(op);
                self.node(source, depth + 1, scope, out)?;
                out.push(')');
            }
        } else if scope > 0 && source.choose_bool(ChoiceKind::Structural)? {
            let idx = source.choose_int(ChoiceKind::Value, 0, scope as i64 - 1)?;
            write!(out, "v{idx}").unwrap();
        } else {
            let lit = source.choose_int(ChoiceKind::Value, 0, LITERAL_MAX)?;
            write!(out, "{lit}").unwrap();
        }
        Ok(())
    }
}

impl Generator for ExprGenerator {
    fn spec(&self) -> GeneratorSpec {
        GeneratorSpec {
            name: "expr",
            max_depth: self.max_depth,
            choice_points: vec![
                ChoicePoint::new("expr.is_compound", 2, ChoiceKind::Structural),
                ChoicePoint::new("expr.is_let", 2, ChoiceKind::Structural),
                ChoicePoint::new("expr.is_variable", 2, ChoiceKind::Structural),
                ChoicePoint::new("expr.operator", OPERATORS.len() as u64, ChoiceKind::Value),
                ChoicePoint::new("expr.variable_index", self.max_depth as u64, ChoiceKind::Value),
                ChoicePoint::new("expr.literal", LITERAL_MAX as u64 + 1, ChoiceKind::Value),
            ],
        }
    }

    fn emit(&self, source: &mut ChoiceSource) -> Result<Vec<u8>, ChoiceError> {
        let mut out = String::new();
        self.node(source, 0, 0, &mut out)?;
        Ok(out.into_bytes())
    }
}
