use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

/// Words the expression grammar claims for itself.
pub(crate) const RESERVED: &[&str] = &["pi", "e", "sin", "cos", "exp", "log", "sqrt", "abs", "diff"];

/// Ordered list of coordinate names.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Chart {
    names: Vec<String>,
}

impl Chart {
    pub fn new<S: AsRef<str>>(names: &[S]) -> Result<Arc<Chart>> {
        if names.is_empty() {
            return Err(Error::Chart("a chart needs at least one coordinate".into()));
        }
        if names.len() > 64 {
            return Err(Error::Chart("at most 64 coordinates are supported".into()));
        }
        let mut out: Vec<String> = Vec::with_capacity(names.len());
        for n in names {
            let n = n.as_ref();
            let mut chars = n.chars();
            let head_ok = chars.next().is_some_and(|c| c.is_ascii_alphabetic());
            if !head_ok || !chars.all(|c| c.is_ascii_alphanumeric() || c == '_') {
                return Err(Error::Chart(format!("bad coordinate name `{n}`")));
            }
            if RESERVED.contains(&n) {
                return Err(Error::Chart(format!("`{n}` is reserved by the grammar")));
            }
            if out.iter().any(|m| m == n) {
                return Err(Error::Chart(format!("duplicate coordinate `{n}`")));
            }
            out.push(n.to_string());
        }
        Ok(Arc::new(Chart { names: out }))
    }

    pub fn dim(&self) -> usize {
        self.names.len()
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
}

impl fmt::Display for Chart {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({})", self.names.join(","))
    }
}

/// True when both handles describe the same coordinates.
pub fn same_chart(a: &Arc<Chart>, b: &Arc<Chart>) -> bool {
    Arc::ptr_eq(a, b) || a.names == b.names
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_names() {
        assert!(Chart::new(&["x1", "x1"]).is_err());
        assert!(Chart::new(&["1x"]).is_err());
        assert!(Chart::new(&["pi"]).is_err());
        assert!(Chart::new::<&str>(&[]).is_err());
        let c = Chart::new(&["x1", "xi_1"]).unwrap();
        assert_eq!(c.index_of("xi_1"), Some(1));
    }
}
