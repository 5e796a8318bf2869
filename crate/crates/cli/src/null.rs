//! The null-hypothesis mini-grammar: `theta<=0.5`, `theta==0.5`,
//! `0.2<=theta<=0.4`, strict variants with `<` / `>`, and unions joined by `|`.

use implaus::sets::{Assertion, Interval, Side};

#[derive(Clone, Copy, Debug, PartialEq)]
enum Op {
    Le,
    Lt,
    Ge,
    Gt,
    Eq,
}

fn split_op(s: &str) -> Option<(Op, &str)> {
    for (tok, op) in [("<=", Op::Le), (">=", Op::Ge), ("==", Op::Eq), ("<", Op::Lt), (">", Op::Gt), ("=", Op::Eq)] {
        if let Some(rest) = s.strip_prefix(tok) {
            return Some((op, rest));
        }
    }
    None
}

fn split_op_back(s: &str) -> Option<(&str, Op)> {
    for (tok, op) in [("<=", Op::Le), ("<", Op::Lt)] {
        if let Some(rest) = s.strip_suffix(tok) {
            return Some((rest, op));
        }
    }
    None
}

fn number(s: &str, whole: &str) -> Result<f64, String> {
    s.parse::<f64>()
        .ok()
        .filter(|v| !v.is_nan())
        .ok_or_else(|| format!("cannot read {s:?} as a number in null {whole:?}"))
}

fn piece(spec: &str, space: Interval) -> Result<Assertion, String> {
    let s: String = spec.chars().filter(|c| !c.is_whitespace()).collect();
    let s = s.replace('θ', "theta");
    let Some(at) = s.find("theta") else {
        return Err(format!("null {spec:?} does not mention theta"));
    };
    let (left, right) = (&s[..at], &s[at + "theta".len()..]);
    let bad = || format!("cannot parse null {spec:?}; expected theta<=a, theta>=a, theta==a or a<=theta<=b");
    if left.is_empty() {
        let (op, rest) = split_op(right).ok_or_else(bad)?;
        let v = number(rest, spec)?;
        return Ok(match op {
            Op::Eq => Assertion::point(v, space),
            Op::Le | Op::Lt => Assertion::half_line(v, Side::Below, op == Op::Le, space),
            Op::Ge | Op::Gt => Assertion::half_line(v, Side::Above, op == Op::Ge, space),
        });
    }
    let (lo, lo_op) = split_op_back(left).ok_or_else(bad)?;
    let (hi_op, hi) = split_op(right).ok_or_else(bad)?;
    if !matches!(hi_op, Op::Le | Op::Lt) {
        return Err(bad());
    }
    let (a, b) = (number(lo, spec)?, number(hi, spec)?);
    if a > b {
        return Err(format!("null {spec:?} has lower bound above upper bound"));
    }
    Ok(Assertion::interval(Interval::new(a, b, lo_op == Op::Le, hi_op == Op::Le), space))
}

/// Parses `spec` into an assertion within `space`; an empty result is an error.
pub fn parse_null(spec: &str, space: Interval) -> Result<Assertion, String> {
    let pieces = spec
        .split('|')
        .map(|p| piece(p, space))
        .collect::<Result<Vec<_>, _>>()?;
    let a = if pieces.len() == 1 {
        pieces.into_iter().next().unwrap()
    } else {
        Assertion::union_of(&pieces, space)
    };
    if a.is_empty() {
        return Err(format!("null {spec:?} is empty within the parameter space {space}"));
    }
    Ok(a)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grammar_forms() {
        let space = Interval::real_line();
        let a = parse_null("theta<=0.5", space).unwrap();
        assert!(a.contains(0.5) && a.contains(-3.0) && !a.contains(0.51));
        let a = parse_null(" theta < 0.5 ", space).unwrap();
        assert!(!a.contains(0.5) && a.contains(0.49));
        let a = parse_null("theta==0.5", space).unwrap();
        assert!(a.is_point() && a.contains(0.5));
        let a = parse_null("0.2<=theta<=0.4", space).unwrap();
        assert!(a.contains(0.2) && a.contains(0.4) && !a.contains(0.41));
        let a = parse_null("0.2<theta<=0.4", space).unwrap();
        assert!(!a.contains(0.2) && a.contains(0.4));
        let a = parse_null("-0.82<=theta<=0.52", space).unwrap();
        assert!(a.contains(-0.82));
        let a = parse_null("theta>=1", space).unwrap();
        assert!(a.contains(1.0) && !a.contains(0.99));
        let a = parse_null("theta<=-1 | theta>=1", space).unwrap();
        assert!(a.contains(-2.0) && a.contains(2.0) && !a.contains(0.0));
    }

    #[test]
    fn grammar_errors() {
        let unit = Interval::open(0.0, 1.0);
        for bad in ["", "x<=1", "theta<=abc", "theta", "0.4<=theta<=0.2", "0.2>=theta", "theta==2", "theta<=0"] {
            assert!(parse_null(bad, unit).is_err(), "{bad:?}");
        }
    }
}
