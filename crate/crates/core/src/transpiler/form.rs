use std::collections::HashMap;
use std::fmt;

use crate::error::{Error, Result};

/// Lowercase letters available to term factors after canonical renaming.
pub(crate) const TERM_LETTERS: &str = "ijklmnopab";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ArgKind {
    Test,
    Trial,
    Material,
}

impl ArgKind {
    pub fn name(self) -> &'static str {
        match self {
            ArgKind::Test => "test",
            ArgKind::Trial => "trial",
            ArgKind::Material => "material",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FormArg {
    pub name: String,
    pub kind: ArgKind,
    /// 1 for scalar fields; unused for materials.
    pub components: usize,
}

impl FormArg {
    pub fn test(name: &str, components: usize) -> Self {
        FormArg {
            name: name.to_string(),
            kind: ArgKind::Test,
            components,
        }
    }

    pub fn trial(name: &str, components: usize) -> Self {
        FormArg {
            name: name.to_string(),
            kind: ArgKind::Trial,
            components,
        }
    }

    pub fn material(name: &str) -> Self {
        FormArg {
            name: name.to_string(),
            kind: ArgKind::Material,
            components: 1,
        }
    }

    pub fn is_vector(&self) -> bool {
        self.kind != ArgKind::Material && self.components > 1
    }
}

/// One comma-separated factor of a term, bound to its argument.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Factor {
    /// `0`: scalar value.
    Value,
    /// `0.i`: scalar gradient.
    Gradient { grad: char },
    /// `i`: vector component.
    Component { comp: char },
    /// `i.j`: vector gradient.
    VectorGradient { comp: char, grad: char },
    /// `i:j`: symmetric gradient in full storage.
    SymGradient { comp: char, grad: char },
    /// `s(i:j)->I`: symmetric gradient in vector storage.
    SymStorage { comp: char, grad: char, storage: char },
    /// Material subscripts, empty for a scalar material.
    Material { letters: Vec<char> },
}

impl Factor {
    pub fn gradient_letter(&self) -> Option<char> {
        match *self {
            Factor::Gradient { grad }
            | Factor::VectorGradient { grad, .. }
            | Factor::SymGradient { grad, .. }
            | Factor::SymStorage { grad, .. } => Some(grad),
            _ => None,
        }
    }

    pub fn component_letter(&self) -> Option<char> {
        match *self {
            Factor::Component { comp }
            | Factor::VectorGradient { comp, .. }
            | Factor::SymGradient { comp, .. }
            | Factor::SymStorage { comp, .. } => Some(comp),
            _ => None,
        }
    }
}

impl fmt::Display for Factor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Factor::Value => write!(f, "0"),
            Factor::Gradient { grad } => write!(f, "0.{grad}"),
            Factor::Component { comp } => write!(f, "{comp}"),
            Factor::VectorGradient { comp, grad } => write!(f, "{comp}.{grad}"),
            Factor::SymGradient { comp, grad } => write!(f, "{comp}:{grad}"),
            Factor::SymStorage { comp, grad, storage } => write!(f, "s({comp}:{grad})->{storage}"),
            Factor::Material { letters } if letters.is_empty() => write!(f, "0"),
            Factor::Material { letters } => write!(f, "{}", letters.iter().collect::<String>()),
        }
    }
}

/// A parsed weak-form term with its arguments.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FormExpression {
    term: String,
    factors: Vec<Factor>,
    args: Vec<FormArg>,
}

impl FormExpression {
    /// The term as written by the caller.
    pub fn term(&self) -> &str {
        &self.term
    }

    /// Factors after canonical letter renaming.
    pub fn factors(&self) -> &[Factor] {
        &self.factors
    }

    pub fn args(&self) -> &[FormArg] {
        &self.args
    }

    /// Canonical term string rebuilt from the renamed factors.
    pub fn canonical_term(&self) -> String {
        let parts: Vec<String> = self.factors.iter().map(|f| f.to_string()).collect();
        parts.join(",")
    }

    pub fn test_arg(&self) -> Option<usize> {
        self.args.iter().position(|a| a.kind == ArgKind::Test)
    }
}

#[derive(Debug, Clone, PartialEq)]
enum RawFactor {
    Zero,
    ZeroGrad(char),
    Letters(Vec<char>),
    Grad(char, char),
    Sym(char, char),
    Storage(char, char, char),
}

/// Parses a term such as `"i,i.j,j"` against its arguments.
///
/// Lowercase letters are renamed in order of first appearance over
/// `ijklmnopab`, with the scalar marker `0` taking a slot of its own, so
/// `"0.i,0.i"` becomes `"0.j,0.j"`. Uppercase letters are kept.
pub fn parse_form(term: &str, args: &[FormArg]) -> Result<FormExpression> {
    let compact: String = term.chars().filter(|c| !c.is_whitespace()).collect();
    if compact.is_empty() {
        return Err(Error::parse(term, "empty term"));
    }
    let raw: Vec<RawFactor> = compact
        .split(',')
        .map(|s| parse_factor(term, s))
        .collect::<Result<_>>()?;
    if raw.len() != args.len() {
        return Err(Error::Arity {
            expected: raw.len(),
            got: args.len(),
        });
    }
    for (k, a) in args.iter().enumerate() {
        if a.name.is_empty() {
            return Err(Error::Argument(format!("argument {k} has an empty name")));
        }
        if a.kind != ArgKind::Material && a.components == 0 {
            return Err(Error::Argument(format!("variable `{}` has zero components", a.name)));
        }
    }

    let rename = canonical_names(term, &compact)?;
    let r = |c: char| -> char {
        if c.is_ascii_lowercase() {
            rename[&c]
        } else {
            c
        }
    };

    let mut factors = Vec::with_capacity(raw.len());
    for (rf, arg) in raw.into_iter().zip(args) {
        let factor = match (arg.kind, rf) {
            (ArgKind::Material, RawFactor::Zero) => Factor::Material { letters: vec![] },
            (ArgKind::Material, RawFactor::Letters(ls)) => Factor::Material {
                letters: ls.into_iter().map(r).collect(),
            },
            (ArgKind::Material, other) => {
                return Err(Error::parse(
                    term,
                    format!("material `{}` takes plain subscripts, got {other:?}", arg.name),
                ))
            }
            (_, RawFactor::Zero) => Factor::Value,
            (_, RawFactor::ZeroGrad(g)) => Factor::Gradient { grad: r(g) },
            (_, RawFactor::Letters(ls)) if ls.len() == 1 => Factor::Component { comp: r(ls[0]) },
            (_, RawFactor::Letters(ls)) => {
                return Err(Error::parse(
                    term,
                    format!(
                        "variable `{}` cannot take material subscripts `{}`",
                        arg.name,
                        ls.iter().collect::<String>()
                    ),
                ))
            }
            (_, RawFactor::Grad(c, g)) => Factor::VectorGradient { comp: r(c), grad: r(g) },
            (_, RawFactor::Sym(c, g)) => Factor::SymGradient { comp: r(c), grad: r(g) },
            (_, RawFactor::Storage(c, g, s)) => Factor::SymStorage {
                comp: r(c),
                grad: r(g),
                storage: s,
            },
        };
        if arg.kind != ArgKind::Material {
            let vector_factor = factor.component_letter().is_some();
            if vector_factor != arg.is_vector() {
                return Err(Error::Argument(format!(
                    "factor `{factor}` does not fit {} variable `{}`",
                    if arg.is_vector() { "vector" } else { "scalar" },
                    arg.name
                )));
            }
        }
        factors.push(factor);
    }

    Ok(FormExpression {
        term: term.to_string(),
        factors,
        args: args.to_vec(),
    })
}

fn parse_factor(term: &str, s: &str) -> Result<RawFactor> {
    let chars: Vec<char> = s.chars().collect();
    let lower = |c: char| c.is_ascii_lowercase();
    match chars.as_slice() {
        [] => Err(Error::parse(term, "empty factor")),
        ['0'] => Ok(RawFactor::Zero),
        ['0', '.', g] if lower(*g) => Ok(RawFactor::ZeroGrad(*g)),
        [c, '.', g] if lower(*c) && lower(*g) => Ok(RawFactor::Grad(*c, *g)),
        [c, ':', g] if lower(*c) && lower(*g) => Ok(RawFactor::Sym(*c, *g)),
        ['s', '(', c, ':', g, ')', '-', '>', st] if lower(*c) && lower(*g) && st.is_ascii_uppercase() => {
            Ok(RawFactor::Storage(*c, *g, *st))
        }
        ls if ls.iter().all(|c| c.is_ascii_alphabetic()) => Ok(RawFactor::Letters(ls.to_vec())),
        _ => Err(Error::parse(term, format!("unknown factor syntax `{s}`"))),
    }
}

fn canonical_names(term: &str, compact: &str) -> Result<HashMap<char, char>> {
    let mut map: HashMap<char, char> = HashMap::new();
    let mut pool = TERM_LETTERS.chars();
    let mut zero_seen = false;
    let mut skip_storage_prefix = false;
    for (k, c) in compact.char_indices() {
        // `s(` introduces storage syntax, not a letter
        if c == 's' && compact[k + 1..].starts_with('(') {
            skip_storage_prefix = true;
        }
        if skip_storage_prefix {
            skip_storage_prefix = false;
            continue;
        }
        let key = if c == '0' {
            if zero_seen {
                continue;
            }
            zero_seen = true;
            '0'
        } else if c.is_ascii_lowercase() {
            if map.contains_key(&c) {
                continue;
            }
            c
        } else {
            continue;
        };
        let fresh = pool
            .next()
            .ok_or_else(|| Error::parse(term, "too many distinct index letters"))?;
        map.insert(key, fresh);
    }
    Ok(map)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn laplacian_gradients_renamed() {
        let f = parse_form("0.i,0.i", &[FormArg::test("v", 1), FormArg::trial("u", 1)]).unwrap();
        assert_eq!(
            f.factors(),
            &[Factor::Gradient { grad: 'j' }, Factor::Gradient { grad: 'j' }]
        );
        assert_eq!(f.canonical_term(), "0.j,0.j");
    }

    #[test]
    fn elasticity_factors() {
        let args = [FormArg::material("D"), FormArg::test("v", 3), FormArg::trial("u", 3)];
        let f = parse_form("IK,s(i:j)->I,s(k:l)->K", &args).unwrap();
        assert_eq!(
            f.factors()[0],
            Factor::Material {
                letters: vec!['I', 'K']
            }
        );
        assert_eq!(
            f.factors()[2],
            Factor::SymStorage {
                comp: 'k',
                grad: 'l',
                storage: 'K'
            }
        );
    }

    #[test]
    fn divergence_single_arg() {
        let f = parse_form("i.i", &[FormArg::test("v", 3)]).unwrap();
        assert_eq!(f.factors(), &[Factor::VectorGradient { comp: 'i', grad: 'i' }]);
    }

    #[test]
    fn arity_and_syntax_errors() {
        let args = [FormArg::test("v", 3), FormArg::trial("u", 3)];
        assert!(matches!(
            parse_form("i", &args),
            Err(Error::Arity { expected: 1, got: 2 })
        ));
        assert!(matches!(parse_form("i,i..j", &args), Err(Error::Parse { .. })));
        assert!(matches!(parse_form("", &args), Err(Error::Parse { .. })));
        assert!(matches!(parse_form("0,i", &args), Err(Error::Argument(_))));
    }
}
