use std::fmt::Write;

use super::transpile::ExprPart;
use crate::einsum::ContractionPath;

/// Formats a shape like a Python tuple: `(1024, 27)`, `(8,)`, `()`.
pub fn tuple_string(shape: &[usize]) -> String {
    match shape {
        [] => "()".into(),
        [n] => format!("({n},)"),
        _ => {
            let items: Vec<String> = shape.iter().map(|n| n.to_string()).collect();
            format!("({})", items.join(", "))
        }
    }
}

/// Text listing of one bound expression part: index sizes, output shape,
/// operand table and contraction path.
///
/// ```text
/// {'c': 1024, 'q': 27, 'j': 3, 'd': 27, 'e': 27}
/// cde (1024, 27, 27) =
///   v.det     cq      (1024, 27)
///   v.bfg     cqjd    (1024, 27, 3, 27)
///   u.bfg     cqje    (1024, 27, 3, 27)
/// path: [(0, 1), (0, 1)]
/// ```
pub fn render_dump(part: &ExprPart, shapes: &[Vec<usize>], path: &ContractionPath) -> String {
    let mut sizes: Vec<(char, usize)> = Vec::new();
    for (op, shape) in part.operands.iter().zip(shapes) {
        for (c, &n) in op.subscripts.chars().zip(shape) {
            if !sizes.iter().any(|(x, _)| *x == c) {
                sizes.push((c, n));
            }
        }
    }
    let dict: Vec<String> = sizes.iter().map(|(c, n)| format!("'{c}': {n}")).collect();
    let out_shape: Vec<usize> = part
        .output
        .chars()
        .map(|c| sizes.iter().find(|(x, _)| *x == c).map_or(1, |(_, n)| *n))
        .collect();

    let mut s = String::new();
    let _ = writeln!(s, "{{{}}}", dict.join(", "));
    let _ = writeln!(s, "{} {} =", part.output, tuple_string(&out_shape));
    for (op, shape) in part.operands.iter().zip(shapes) {
        let _ = writeln!(s, "  {:10}{:8}{}", op.name(), op.subscripts, tuple_string(shape));
    }
    let _ = writeln!(s, "path: {path}");
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tuples() {
        assert_eq!(tuple_string(&[]), "()");
        assert_eq!(tuple_string(&[8]), "(8,)");
        assert_eq!(tuple_string(&[3, 3, 6]), "(3, 3, 6)");
    }
}
