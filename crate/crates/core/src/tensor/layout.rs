use std::fmt;

use super::DenseTensor;
use crate::error::{Error, Result};

/// Axis-role letters: cells, quadrature points, variable component,
/// gradient component, local DOF, and `0` for all material axes.
pub const LAYOUT_LETTERS: &str = "cqgvd0";

/// One role letter per logical axis. `0` stands for a block of one or more
/// material axes kept in their original relative order.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct LayoutSpec {
    letters: Vec<char>,
}

impl LayoutSpec {
    pub fn new(letters: &str) -> Result<Self> {
        let mut seen = Vec::new();
        for ch in letters.chars() {
            if !LAYOUT_LETTERS.contains(ch) {
                return Err(Error::Layout(format!("unknown layout letter {ch:?} in {letters:?}")));
            }
            if seen.contains(&ch) {
                return Err(Error::Layout(format!("repeated layout letter {ch:?} in {letters:?}")));
            }
            seen.push(ch);
        }
        Ok(LayoutSpec { letters: seen })
    }

    /// The default operand order: `cqgvd0`.
    pub fn default_global() -> Self {
        LayoutSpec::new(LAYOUT_LETTERS).expect("valid")
    }

    pub fn letters(&self) -> &[char] {
        &self.letters
    }

    pub fn as_string(&self) -> String {
        self.letters.iter().collect()
    }

    pub fn contains(&self, ch: char) -> bool {
        self.letters.contains(&ch)
    }

    /// Axis labels after expanding `0` to fill `ndim` axes. Material axes are
    /// labelled `'0'`, `'1'`, ... in their original order.
    pub fn expand(&self, ndim: usize) -> Result<Vec<char>> {
        let has_material = self.contains('0');
        let fixed = self.letters.len() - usize::from(has_material);
        let n_material = if has_material {
            if ndim <= fixed {
                return Err(Error::Layout(format!(
                    "layout {self} leaves no axis for material block on {ndim} axes"
                )));
            }
            ndim - fixed
        } else {
            if ndim != fixed {
                return Err(Error::Layout(format!("layout {self} does not describe {ndim} axes")));
            }
            0
        };
        if n_material > 10 {
            return Err(Error::Layout(format!("too many material axes ({n_material})")));
        }
        let mut out = Vec::with_capacity(ndim);
        for &ch in &self.letters {
            if ch == '0' {
                out.extend((0..n_material).map(|k| char::from(b'0' + k as u8)));
            } else {
                out.push(ch);
            }
        }
        Ok(out)
    }

    /// Axis permutation taking a tensor in layout `self` to layout `to`:
    /// axis `k` of the result is axis `perm[k]` of the source.
    pub fn permutation_to(&self, to: &LayoutSpec, ndim: usize) -> Result<Vec<usize>> {
        let from_axes = self.expand(ndim)?;
        let to_axes = to.expand(ndim)?;
        let mut perm = Vec::with_capacity(ndim);
        for ch in &to_axes {
            match from_axes.iter().position(|c| c == ch) {
                Some(p) => perm.push(p),
                None => {
                    return Err(Error::Layout(format!("{to} is not a permutation of {self}")));
                }
            }
        }
        if from_axes.len() != to_axes.len() {
            return Err(Error::Layout(format!("{to} is not a permutation of {self}")));
        }
        Ok(perm)
    }

    /// The order of this operand's role letters induced by a global layout
    /// string. Fails if `global` lacks one of the letters.
    pub fn ordered_by(&self, global: &LayoutSpec) -> Result<LayoutSpec> {
        if let Some(missing) = self.letters.iter().find(|ch| !global.contains(**ch)) {
            return Err(Error::Layout(format!(
                "layout {global} is missing letter {missing:?} needed by operand layout {self}"
            )));
        }
        Ok(LayoutSpec {
            letters: global.letters.iter().copied().filter(|ch| self.contains(*ch)).collect(),
        })
    }
}

impl fmt::Display for LayoutSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.as_string())
    }
}

impl std::str::FromStr for LayoutSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        LayoutSpec::new(s)
    }
}

/// Returns a row-major contiguous copy of `t` whose axes follow `to`.
pub fn permute_to_layout(t: &DenseTensor, from: &LayoutSpec, to: &LayoutSpec) -> Result<DenseTensor> {
    let perm = from.permutation_to(to, t.ndim())?;
    if perm.iter().enumerate().all(|(k, &p)| k == p) {
        return Ok(t.to_contiguous());
    }
    Ok(t.permuted(&perm)?.to_contiguous())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::sync::Arc;

    fn ls(s: &str) -> LayoutSpec {
        LayoutSpec::new(s).unwrap()
    }

    #[test]
    fn transpose_cq_to_qc() {
        let t = DenseTensor::from_fn(&[1024, 8], |i| (i[0] * 8 + i[1]) as f64);
        let p = permute_to_layout(&t, &ls("cq"), &ls("qc")).unwrap();
        assert_eq!(p.shape(), &[8, 1024]);
        assert_eq!(p.get(&[3, 17]).unwrap(), t.get(&[17, 3]).unwrap());
    }

    #[test]
    fn bfg_to_cdgq() {
        let shape = [16, 27, 3, 27];
        let t = DenseTensor::from_fn(&shape, |i| (((i[0] * 27 + i[1]) * 3 + i[2]) * 27 + i[3]) as f64);
        let p = permute_to_layout(&t, &ls("cqgd"), &ls("cdgq")).unwrap();
        assert_eq!(p.shape(), &[16, 27, 3, 27]);
        assert!(p.is_contiguous());
        // p[c, d, g, q] == t[c, q, g, d]
        assert_eq!(p.get(&[5, 2, 1, 20]).unwrap(), t.get(&[5, 20, 1, 2]).unwrap());
    }

    #[test]
    fn identity_permutation_keeps_data() {
        let t = DenseTensor::from_fn(&[3, 4], |i| (i[0] * 10 + i[1]) as f64);
        let p = permute_to_layout(&t, &ls("cq"), &ls("cq")).unwrap();
        assert!(Arc::ptr_eq(p.buffer(), t.buffer()));
    }

    #[test]
    fn material_block_expands() {
        let t = DenseTensor::from_fn(&[2, 3, 4, 5], |i| (i[0] * 1000 + i[1] * 100 + i[2] * 10 + i[3]) as f64);
        let p = permute_to_layout(&t, &ls("cq0"), &ls("0qc")).unwrap();
        assert_eq!(p.shape(), &[4, 5, 3, 2]);
        assert_eq!(p.get(&[1, 2, 0, 1]).unwrap(), t.get(&[1, 0, 1, 2]).unwrap());
    }

    #[test]
    fn non_permutation_rejected() {
        let t = DenseTensor::zeros(&[2, 3]);
        assert!(matches!(
            permute_to_layout(&t, &ls("cq"), &ls("cd")),
            Err(Error::Layout(_))
        ));
        assert!(LayoutSpec::new("cqx").is_err());
        assert!(LayoutSpec::new("cqc").is_err());
    }

    #[test]
    fn ordered_by_global() {
        let g = ls("cdgq");
        assert_eq!(ls("cqgd").ordered_by(&g).unwrap(), ls("cdgq"));
        assert_eq!(ls("qd").ordered_by(&g).unwrap(), ls("dq"));
        assert!(ls("cvd").ordered_by(&g).is_err());
        let full = ls("0dcqvg");
        assert_eq!(ls("cq0").ordered_by(&full).unwrap(), ls("0cq"));
    }
}
