//! Plain-text structure constants.
//!
//! ```text
//! # comment
//! dim 7
//! c 3 1 2 = 1
//! c 7 4 5 = -1/2
//! ```
//!
//! `c k i j = v` sets c^k_ij = v with 1-based indices, so [e_i, e_j] has
//! e_k-component v. The `dim` line is optional (default 7) and must come
//! first. The mirrored entry c^k_ji = −v is implied; if it is also given it
//! must agree. Entries with i = j must be zero and repeated entries must
//! agree. The result is checked for the Jacobi identity.

use std::collections::BTreeMap;
use std::fmt::Write;

use super::LieAlgebra;
use crate::error::{Error, Result};
use num_traits::Zero;

use crate::scalar::{Rational, Scalar};

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

pub fn parse_structure_constants(text: &str) -> Result<LieAlgebra<Rational>> {
    let mut dim = 7usize;
    let mut seen_constant = false;
    let mut entries: BTreeMap<(usize, usize, usize), (Rational, usize)> = BTreeMap::new();
    for (n, raw) in text.lines().enumerate() {
        let line_no = n + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let mut words = line.split_whitespace();
        match words.next() {
            Some("dim") => {
                if seen_constant {
                    return Err(parse_err(line_no, "`dim` must precede all constants"));
                }
                let value = words
                    .next()
                    .ok_or_else(|| parse_err(line_no, "missing dimension"))?;
                dim = value
                    .parse()
                    .ok()
                    .filter(|d| (1..=crate::exterior::MAX_DIM).contains(d))
                    .ok_or_else(|| parse_err(line_no, format!("invalid dimension `{value}`")))?;
                if words.next().is_some() {
                    return Err(parse_err(line_no, "trailing input after dimension"));
                }
            }
            Some("c") => {
                seen_constant = true;
                let (lhs, rhs) = line[1..]
                    .split_once('=')
                    .ok_or_else(|| parse_err(line_no, "expected `c k i j = value`"))?;
                let idx: Vec<&str> = lhs.split_whitespace().collect();
                if idx.len() != 3 {
                    return Err(parse_err(line_no, "expected three indices k i j"));
                }
                let mut ijk = [0usize; 3];
                for (slot, s) in ijk.iter_mut().zip(&idx) {
                    let v: usize = s
                        .parse()
                        .map_err(|_| parse_err(line_no, format!("invalid index `{s}`")))?;
                    if v == 0 || v > dim {
                        return Err(parse_err(line_no, format!("index {v} outside 1..={dim}")));
                    }
                    *slot = v - 1;
                }
                let rhs = rhs.trim();
                let value: Rational = rhs
                    .parse()
                    .map_err(|_| parse_err(line_no, format!("invalid rational `{rhs}`")))?;
                let [k, i, j] = ijk;
                if i == j {
                    if !value.is_zero() {
                        return Err(parse_err(
                            line_no,
                            format!("c {} {} {} must be zero", k + 1, i + 1, j + 1),
                        ));
                    }
                    continue;
                }
                if let Some((prev, at)) = entries.get(&(k, i, j)) {
                    if *prev != value {
                        return Err(parse_err(
                            line_no,
                            format!("conflicts with line {at} (value {prev})"),
                        ));
                    }
                }
                if let Some((mirror, at)) = entries.get(&(k, j, i)) {
                    if *mirror != -value.clone() {
                        return Err(parse_err(
                            line_no,
                            format!(
                                "not antisymmetric: line {at} sets c {} {} {} = {mirror}",
                                k + 1,
                                j + 1,
                                i + 1
                            ),
                        ));
                    }
                }
                entries.insert((k, i, j), (value, line_no));
            }
            Some(other) => return Err(parse_err(line_no, format!("unknown directive `{other}`"))),
            None => {}
        }
    }
    let brackets: Vec<(usize, usize, usize, Rational)> = entries
        .into_iter()
        .map(|((k, i, j), (v, _))| (k, i, j, v))
        .collect();
    LieAlgebra::from_brackets(dim, &brackets)
}

/// Writes nonzero c^k_ij with i < j, after `#`-prefixed header lines.
pub fn write_structure_constants<S: Scalar>(alg: &LieAlgebra<S>, header: &[String]) -> String {
    let mut out = String::new();
    for h in header {
        let _ = writeln!(out, "# {h}");
    }
    let n = alg.dim();
    let _ = writeln!(out, "dim {n}");
    for k in 0..n {
        for i in 0..n {
            for j in i + 1..n {
                let c = alg.c(k, i, j);
                if !c.is_zero() {
                    let _ = writeln!(out, "c {} {} {} = {}", k + 1, i + 1, j + 1, c);
                }
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        let text = "# heisenberg\nc 3 1 2 = 1\nc 3 2 1 = -1   # mirrored\nc 7 4 5 = -1/2\n";
        let alg = parse_structure_constants(text).unwrap();
        assert_eq!(alg.c(2, 0, 1), &Rational::from_i64(1));
        assert_eq!(alg.c(6, 4, 3), &Rational::from_ratio(1, 2));
        let written = write_structure_constants(&alg, &["test".into()]);
        assert_eq!(written, "# test\ndim 7\nc 3 1 2 = 1\nc 7 4 5 = -1/2\n");
        assert_eq!(parse_structure_constants(&written).unwrap(), alg);
    }

    #[test]
    fn errors_carry_line_numbers() {
        let cases = [
            ("c 3 1 2 = 1\nc 3 2 1 = 1\n", 2),
            ("c 3 1 1 = 2\n", 1),
            ("\nc 3 1 2 = 1\nc 3 1 2 = 2\n", 3),
            ("c 9 1 2 = 1\n", 1),
            ("c 3 1 2 = x\n", 1),
            ("c 3 1 2 1\n", 1),
            ("c 3 1 2 = 1\ndim 5\n", 2),
            ("frobnicate\n", 1),
        ];
        for (text, line) in cases {
            match parse_structure_constants(text) {
                Err(Error::Parse { line: l, .. }) => assert_eq!(l, line, "{text}"),
                other => panic!("{text}: {other:?}"),
            }
        }
    }

    #[test]
    fn jacobi_failure_names_triple() {
        let text = "dim 3\nc 3 1 2 = 1\nc 1 1 3 = 1\nc 2 2 3 = 1\n";
        assert_eq!(
            parse_structure_constants(text),
            Err(Error::Jacobi { i: 1, j: 2, k: 3 })
        );
    }
}
