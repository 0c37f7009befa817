use std::collections::HashMap;
use std::sync::{Arc, RwLock};

use super::form::FormExpression;
use super::transpile::{apply_layout, slice_per_cell, transpile, Mode, TranspiledEinsum};
use crate::error::Result;
use crate::tensor::LayoutSpec;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
struct Key {
    form: FormExpression,
    mode: Mode,
    diff_var: Option<String>,
    layout: LayoutSpec,
    sliced: bool,
}

/// Memoizes transpilation results. Safe to share between threads.
#[derive(Debug, Default)]
pub struct TranspileCache {
    entries: RwLock<HashMap<Key, Arc<TranspiledEinsum>>>,
}

impl TranspileCache {
    pub fn new() -> Self {
        Self::default()
    }

    /// Transpiles, applies `layout` and optionally slices, reusing an earlier
    /// result for the same inputs.
    pub fn get(
        &self,
        form: &FormExpression,
        mode: Mode,
        diff_var: Option<&str>,
        layout: &LayoutSpec,
        sliced: bool,
    ) -> Result<Arc<TranspiledEinsum>> {
        let key = Key {
            form: form.clone(),
            mode,
            diff_var: diff_var.map(str::to_string),
            layout: layout.clone(),
            sliced,
        };
        if let Some(hit) = self.entries.read().expect("cache lock").get(&key) {
            return Ok(Arc::clone(hit));
        }
        let mut t = apply_layout(&transpile(form, mode, diff_var)?, layout)?;
        if sliced {
            t = slice_per_cell(&t);
        }
        let t = Arc::new(t);
        let mut map = self.entries.write().expect("cache lock");
        Ok(Arc::clone(map.entry(key).or_insert(t)))
    }

    pub fn len(&self) -> usize {
        self.entries.read().expect("cache lock").len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::transpiler::form::{parse_form, FormArg};

    #[test]
    fn hits_return_same_program() {
        let f = parse_form("0.i,0.i", &[FormArg::test("v", 1), FormArg::trial("u", 1)]).unwrap();
        let cache = TranspileCache::new();
        let l = LayoutSpec::default_global();
        let a = cache.get(&f, Mode::Matrix, Some("u"), &l, false).unwrap();
        let b = cache.get(&f, Mode::Matrix, Some("u"), &l, false).unwrap();
        assert!(Arc::ptr_eq(&a, &b));
        cache.get(&f, Mode::Matrix, Some("u"), &l, true).unwrap();
        assert_eq!(cache.len(), 2);
    }
}
