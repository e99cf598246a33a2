use std::collections::HashMap;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::grammar::{parse_str, Expr, Statement};

/// Macros shipped with the library, one `#NAME = expr` per line.
pub const BUILTIN_MACROS: &str = include_str!("../../macros/builtin.dice");

/// Upper-case name to stored, unevaluated expression. Bodies are re-rolled on
/// every access. Cloning is cheap: bodies are shared.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct MacroTable {
    entries: HashMap<String, Arc<Expr>>,
}

impl MacroTable {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_builtins() -> Self {
        let mut table = Self::new();
        table
            .load_str(BUILTIN_MACROS)
            .expect("builtin macro file is valid");
        table
    }

    /// Stores `body` under `name`; returns true if it replaced an entry.
    pub fn define(&mut self, name: impl Into<String>, body: Expr) -> bool {
        self.entries.insert(name.into(), Arc::new(body)).is_some()
    }

    pub fn get(&self, name: &str) -> Option<Arc<Expr>> {
        self.entries.get(name).cloned()
    }

    pub fn contains(&self, name: &str) -> bool {
        self.entries.contains_key(name)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.entries.keys().map(String::as_str)
    }

    /// Loads a macro file: one `#NAME = expr` definition per line, blank
    /// lines ignored. Returns the number of definitions read.
    pub fn load_str(&mut self, text: &str) -> Result<usize> {
        let mut loaded = 0;
        for (i, line) in text.lines().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let line_err = |message: String| Error::MacroFile {
                line: i + 1,
                message,
            };
            let parsed = parse_str(line).map_err(|e| line_err(e.to_string()))?;
            match <[Statement; 1]>::try_from(parsed.statements) {
                Ok([Statement::MacroDefinition { name, body }]) => {
                    self.define(name, body);
                    loaded += 1;
                }
                _ => return Err(line_err("expected a single '#NAME = expr' definition".into())),
            }
        }
        Ok(loaded)
    }
}
