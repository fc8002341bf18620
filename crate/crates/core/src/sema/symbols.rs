use std::collections::HashMap;
use std::fmt;

use crate::frontend::ast::Span;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ConstValue {
    Int(i64),
    Float(f64),
}

impl ConstValue {
    pub fn as_f64(self) -> f64 {
        match self {
            ConstValue::Int(v) => v as f64,
            ConstValue::Float(v) => v,
        }
    }

    pub fn as_int(self) -> Option<i64> {
        match self {
            ConstValue::Int(v) => Some(v),
            ConstValue::Float(_) => None,
        }
    }
}

impl fmt::Display for ConstValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ConstValue::Int(v) => write!(f, "{v}"),
            ConstValue::Float(v) => write!(f, "{v:?}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SymbolKind {
    CompileTimeConst,
    RuntimeInput,
    QubitRegister,
    ClassicalRegister,
    GateDefinition,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SymbolEntry {
    pub name: String,
    pub kind: SymbolKind,
    /// Element count (register width, input array length; 1 for scalars and gates).
    pub size: usize,
    pub const_value: Option<ConstValue>,
    pub decl_span: Span,
    /// First qubit id, first parameter slot, or classical register index,
    /// depending on `kind`. Zero for consts and gates.
    pub offset: usize,
    /// Declared with a `[N]` designator or as an `array`; such names must be
    /// indexed when used as a single element.
    pub indexed: bool,
}

/// Lexically scoped name table. Scope 0 is the program's global scope; loop
/// bodies push a scope holding the loop variable.
#[derive(Debug, Clone, Default)]
pub struct SymbolTable {
    entries: Vec<SymbolEntry>,
    scopes: Vec<HashMap<String, usize>>,
}

impl SymbolTable {
    pub fn new() -> Self {
        Self { entries: Vec::new(), scopes: vec![HashMap::new()] }
    }

    /// Adds `entry` to the innermost scope. On a clash within that scope,
    /// returns the existing entry.
    pub fn insert(&mut self, entry: SymbolEntry) -> Result<(), &SymbolEntry> {
        let scope = self.scopes.last_mut().expect("global scope always present");
        if let Some(&idx) = scope.get(&entry.name) {
            return Err(&self.entries[idx]);
        }
        scope.insert(entry.name.clone(), self.entries.len());
        self.entries.push(entry);
        Ok(())
    }

    pub fn lookup(&self, name: &str) -> Option<&SymbolEntry> {
        self.scopes.iter().rev().find_map(|s| s.get(name)).map(|&i| &self.entries[i])
    }

    pub fn push_scope(&mut self) {
        self.scopes.push(HashMap::new());
    }

    /// Overwrites the value of a constant in the innermost scope (loop variables).
    pub fn update_const(&mut self, name: &str, value: ConstValue) {
        let scope = self.scopes.last().expect("global scope always present");
        let idx = *scope.get(name).expect("constant declared in innermost scope");
        self.entries[idx].const_value = Some(value);
    }

    /// Drops the innermost scope. Its entries stay in [`Self::entries`] as a
    /// record of what was declared; they are no longer resolvable.
    pub fn pop_scope(&mut self) {
        assert!(self.scopes.len() > 1, "cannot pop the global scope");
        self.scopes.pop();
    }

    /// Global declarations in declaration order.
    pub fn globals(&self) -> impl Iterator<Item = &SymbolEntry> {
        let mut idx: Vec<usize> = self.scopes[0].values().copied().collect();
        idx.sort_unstable();
        idx.into_iter().map(|i| &self.entries[i])
    }

    pub fn entries(&self) -> &[SymbolEntry] {
        &self.entries
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn entry(name: &str, kind: SymbolKind) -> SymbolEntry {
        SymbolEntry {
            name: name.into(),
            kind,
            size: 1,
            const_value: None,
            decl_span: Span::default(),
            offset: 0,
            indexed: false,
        }
    }

    #[test]
    fn shadowing_and_scopes() {
        let mut t = SymbolTable::new();
        t.insert(entry("a", SymbolKind::QubitRegister)).unwrap();
        assert!(t.insert(entry("a", SymbolKind::ClassicalRegister)).is_err());
        t.push_scope();
        t.insert(entry("a", SymbolKind::CompileTimeConst)).unwrap();
        assert_eq!(t.lookup("a").unwrap().kind, SymbolKind::CompileTimeConst);
        t.pop_scope();
        assert_eq!(t.lookup("a").unwrap().kind, SymbolKind::QubitRegister);
        assert!(t.lookup("b").is_none());
        assert_eq!(t.globals().count(), 1);
        assert_eq!(t.entries().len(), 2);
    }
}
