use std::fmt;
use std::sync::Arc;

use super::order::{BlockKind, MonomialOrder};
use super::PolyError;

/// Shared handle to a variable set. Polynomials over the same ring hold clones of it.
pub type Ring = Arc<VarSet>;

/// Ordered list of distinct variable names, optionally split into an
/// eliminated block (first) and a kept block (second).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct VarSet {
    names: Vec<String>,
    eliminated: Option<usize>,
}

fn valid_name(name: &str) -> bool {
    let mut chars = name.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

impl VarSet {
    pub fn new<I, S>(names: I) -> Result<Ring, PolyError>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let names: Vec<String> = names.into_iter().map(Into::into).collect();
        Self::validate(&names)?;
        Ok(Arc::new(VarSet { names, eliminated: None }))
    }

    /// Ring whose first `eliminated.len()` variables form the block to be eliminated.
    pub fn with_blocks<I, J, S, T>(eliminated: I, kept: J) -> Result<Ring, PolyError>
    where
        I: IntoIterator<Item = S>,
        J: IntoIterator<Item = T>,
        S: Into<String>,
        T: Into<String>,
    {
        let mut names: Vec<String> = eliminated.into_iter().map(Into::into).collect();
        let split = names.len();
        names.extend(kept.into_iter().map(Into::into));
        Self::validate(&names)?;
        if split == 0 || split == names.len() {
            return Err(PolyError::InvalidVarSet("both elimination blocks must be nonempty".into()));
        }
        Ok(Arc::new(VarSet { names, eliminated: Some(split) }))
    }

    fn validate(names: &[String]) -> Result<(), PolyError> {
        if names.is_empty() {
            return Err(PolyError::InvalidVarSet("no variables".into()));
        }
        for (i, n) in names.iter().enumerate() {
            if !valid_name(n) {
                return Err(PolyError::InvalidVarSet(format!("invalid variable name {n:?}")));
            }
            if names[..i].contains(n) {
                return Err(PolyError::InvalidVarSet(format!("duplicate variable {n:?}")));
            }
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn name(&self, i: usize) -> &str {
        &self.names[i]
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    /// Size of the eliminated block, when the ring was built with blocks.
    pub fn eliminated_block(&self) -> Option<usize> {
        self.eliminated
    }

    /// Block order eliminating the first block, degrevlex inside each block.
    pub fn elimination_order(&self) -> Option<MonomialOrder> {
        self.eliminated.map(|split| MonomialOrder::Block {
            split,
            first: BlockKind::DegRevLex,
            second: BlockKind::DegRevLex,
        })
    }

    /// Same variable names, ignoring block structure.
    pub fn same_vars(&self, other: &VarSet) -> bool {
        self.names == other.names
    }
}

impl fmt::Display for VarSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "QQ[{}]", self.names.join(","))
    }
}

/// Checks that two rings carry the same variables.
pub fn check_same(a: &VarSet, b: &VarSet) -> Result<(), PolyError> {
    if std::ptr::eq(a, b) || a.same_vars(b) {
        Ok(())
    } else {
        Err(PolyError::RingMismatch { left: a.to_string(), right: b.to_string() })
    }
}
