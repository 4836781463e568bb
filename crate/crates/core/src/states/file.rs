//! Text format for states (`QSTATE 1`) and witnesses (`QWIT 1`).
//!
//! ```text
//! QSTATE 1
//! dims: 2 2
//! re im re im ...   # one line per matrix row, 2·D numbers
//! ```
//!
//! `#` starts a comment. Rows use the big-endian tensor basis. Numbers are
//! written with 17 significant digits so a save/load cycle is exact.

use std::fs;
use std::io::{self, Write};
use std::path::Path;

use num_complex::Complex64;

use super::DensityMatrix;
use crate::error::{Error, Result};
use crate::linalg::CMatrix;

const STATE_MAGIC: &str = "QSTATE";
const WITNESS_MAGIC: &str = "QWIT";
const VERSION: &str = "1";

/// How [`load_state`] treats files that violate the state invariants.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct LoadOptions {
    /// Project onto the state space instead of rejecting.
    pub repair: bool,
}

struct Token<'a> {
    text: &'a str,
    line: usize,
    column: usize,
}

/// Non-empty lines with comments removed, as token lists.
fn tokenize(src: &str) -> Vec<(usize, Vec<Token<'_>>)> {
    let mut out = Vec::new();
    for (i, raw) in src.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("");
        let mut tokens = Vec::new();
        let mut start = None;
        for (pos, ch) in line.char_indices().chain(std::iter::once((line.len(), ' '))) {
            if ch.is_whitespace() {
                if let Some(s) = start.take() {
                    tokens.push(Token {
                        text: &line[s..pos],
                        line: i + 1,
                        column: line[..s].chars().count() + 1,
                    });
                }
            } else if start.is_none() {
                start = Some(pos);
            }
        }
        if !tokens.is_empty() {
            out.push((i + 1, tokens));
        }
    }
    out
}

fn parse_err(line: usize, column: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        column,
        message: message.into(),
    }
}

fn parse_matrix(src: &str, magic: &str) -> Result<(Vec<usize>, CMatrix)> {
    let lines = tokenize(src);
    let mut it = lines.into_iter();

    let (line, header) = it.next().ok_or_else(|| parse_err(1, 1, "empty file"))?;
    if header[0].text != magic {
        return Err(parse_err(line, header[0].column, format!("expected `{magic}`, found `{}`", header[0].text)));
    }
    match header.get(1) {
        Some(t) if t.text == VERSION && header.len() == 2 => {}
        Some(t) => return Err(parse_err(line, t.column, format!("unsupported version `{}`", t.text))),
        None => return Err(parse_err(line, header[0].column + magic.len(), "missing version")),
    }

    let (line, dims_tokens) = it.next().ok_or_else(|| parse_err(line + 1, 1, "missing `dims:` line"))?;
    if dims_tokens[0].text != "dims:" {
        return Err(parse_err(line, dims_tokens[0].column, "expected `dims:`"));
    }
    if dims_tokens.len() < 2 {
        return Err(parse_err(line, dims_tokens[0].column + 5, "no dimensions given"));
    }
    let dims = dims_tokens[1..]
        .iter()
        .map(|t| match t.text.parse::<usize>() {
            Ok(d) if d > 0 => Ok(d),
            _ => Err(parse_err(t.line, t.column, format!("invalid dimension `{}`", t.text))),
        })
        .collect::<Result<Vec<_>>>()?;
    let d = dims
        .iter()
        .try_fold(1usize, |acc, &x| acc.checked_mul(x))
        .ok_or_else(|| Error::Dimension(format!("dims {dims:?} overflow")))?;

    let mut data = Vec::with_capacity(d * d);
    let mut rows = 0;
    for (line, tokens) in it {
        if rows == d {
            return Err(Error::Dimension(format!(
                "dims {dims:?} need {d} rows; extra row at line {line}"
            )));
        }
        if tokens.len() != 2 * d {
            return Err(Error::Dimension(format!(
                "dims {dims:?} need {} numbers per row ({d}x{d} complex matrix); line {line} has {}",
                2 * d,
                tokens.len()
            )));
        }
        for pair in tokens.chunks(2) {
            let num = |t: &Token<'_>| {
                t.text
                    .parse::<f64>()
                    .ok()
                    .filter(|v| v.is_finite())
                    .ok_or_else(|| parse_err(t.line, t.column, format!("invalid number `{}`", t.text)))
            };
            data.push(Complex64::new(num(&pair[0])?, num(&pair[1])?));
        }
        rows += 1;
    }
    if rows != d {
        return Err(Error::Dimension(format!("dims {dims:?} need {d} rows, file has {rows}")));
    }
    Ok((dims, CMatrix::from_vec(d, d, data)?))
}

/// Parses a `QSTATE 1` document.
pub fn parse_state(src: &str, opts: LoadOptions) -> Result<DensityMatrix> {
    let (dims, m) = parse_matrix(src, STATE_MAGIC)?;
    if opts.repair {
        DensityMatrix::repaired(dims, m)
    } else {
        DensityMatrix::new(dims, m)
    }
}

/// Parses a `QWIT 1` document. Only Hermiticity is checked.
pub fn parse_witness(src: &str) -> Result<(Vec<usize>, CMatrix)> {
    let (dims, m) = parse_matrix(src, WITNESS_MAGIC)?;
    let dev = m.hermitian_deviation();
    if dev > super::STATE_TOL * m.max_abs().max(f64::MIN_POSITIVE) {
        return Err(Error::Invariant {
            invariant: "hermitian",
            amount: dev,
        });
    }
    Ok((dims, m))
}

pub fn load_state(path: impl AsRef<Path>, opts: LoadOptions) -> Result<DensityMatrix> {
    parse_state(&fs::read_to_string(path)?, opts)
}

pub fn load_witness(path: impl AsRef<Path>) -> Result<(Vec<usize>, CMatrix)> {
    parse_witness(&fs::read_to_string(path)?)
}

fn write_matrix(out: &mut impl Write, magic: &str, dims: &[usize], m: &CMatrix) -> io::Result<()> {
    writeln!(out, "{magic} {VERSION}")?;
    let dims_txt: Vec<String> = dims.iter().map(ToString::to_string).collect();
    writeln!(out, "dims: {}", dims_txt.join(" "))?;
    for r in 0..m.rows() {
        let row: Vec<String> = (0..m.cols())
            .flat_map(|c| {
                let z = m[(r, c)];
                [format!("{:.16e}", z.re), format!("{:.16e}", z.im)]
            })
            .collect();
        writeln!(out, "{}", row.join(" "))?;
    }
    Ok(())
}

pub fn write_state(rho: &DensityMatrix, out: &mut impl Write) -> io::Result<()> {
    write_matrix(out, STATE_MAGIC, rho.dims(), rho.matrix())
}

pub fn write_witness(dims: &[usize], w: &CMatrix, out: &mut impl Write) -> io::Result<()> {
    write_matrix(out, WITNESS_MAGIC, dims, w)
}

pub fn save_state(rho: &DensityMatrix, path: impl AsRef<Path>) -> Result<()> {
    let mut buf = Vec::new();
    write_state(rho, &mut buf)?;
    fs::write(path, buf)?;
    Ok(())
}

pub fn save_witness(dims: &[usize], w: &CMatrix, path: impl AsRef<Path>) -> Result<()> {
    let mut buf = Vec::new();
    write_witness(dims, w, &mut buf)?;
    fs::write(path, buf)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::states::{make_family, random_density, Family, FamilyParams};
    use proptest::prelude::*;

    fn render(rho: &DensityMatrix) -> String {
        let mut buf = Vec::new();
        write_state(rho, &mut buf).unwrap();
        String::from_utf8(buf).unwrap()
    }

    #[test]
    fn bell_round_trip_and_layout() {
        let bell = make_family(Family::Bell, &FamilyParams::default()).unwrap();
        let text = render(&bell);
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("QSTATE 1"));
        assert_eq!(lines.next(), Some("dims: 2 2"));
        assert_eq!(lines.count(), 4);
        let back = parse_state(&text, LoadOptions::default()).unwrap();
        assert_eq!(back.matrix(), bell.matrix());
        assert_eq!(render(&back), text);
    }

    #[test]
    fn comments_and_blank_lines_are_ignored() {
        let src = "# a comment\nQSTATE 1   # magic\n\ndims: 1\n1 0 # the only entry\n";
        let rho = parse_state(src, LoadOptions::default()).unwrap();
        assert_eq!(rho.dims(), &[1]);
    }

    #[test]
    fn trace_violation_is_named() {
        let src = "QSTATE 1\ndims: 2\n0.45 0 0 0\n0 0 0.45 0\n";
        let err = parse_state(src, LoadOptions::default()).unwrap_err();
        assert!(matches!(err, Error::Invariant { invariant: "trace", .. }));
        assert!(err.to_string().contains("trace"));
        let fixed = parse_state(src, LoadOptions { repair: true }).unwrap();
        assert!((fixed.matrix().trace().re - 1.0).abs() < 1e-12);
    }

    #[test]
    fn dimension_mismatch_is_reported() {
        let m = crate::linalg::CMatrix::identity(8).scale_real(0.125);
        let mut buf = Vec::new();
        write_matrix(&mut buf, STATE_MAGIC, &[2, 3], &m).unwrap();
        let err = parse_state(std::str::from_utf8(&buf).unwrap(), LoadOptions::default()).unwrap_err();
        assert!(matches!(err, Error::Dimension(_)), "{err}");
    }

    #[test]
    fn parse_errors_carry_positions() {
        let err = parse_state("QSTATE 1\ndims: 1\n1 zero\n", LoadOptions::default()).unwrap_err();
        match err {
            Error::Parse { line, column, .. } => assert_eq!((line, column), (3, 3)),
            other => panic!("unexpected {other}"),
        }
        let err = parse_state("QSTAT 1\n", LoadOptions::default()).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 1, column: 1, .. }));
        let err = parse_state("QSTATE 2\n", LoadOptions::default()).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 1, column: 8, .. }));
        let err = parse_state("QSTATE 1\ndims: 0\n", LoadOptions::default()).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, column: 7, .. }));
        assert!(parse_state("", LoadOptions::default()).is_err());
        assert!(parse_state("QSTATE 1\ndims: 1\n", LoadOptions::default()).is_err());
    }

    #[test]
    fn witness_files_skip_state_checks() {
        let w = crate::linalg::CMatrix::from_real_diag(&[1.0, -3.0]);
        let mut buf = Vec::new();
        write_witness(&[2], &w, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("QWIT 1\n"));
        let (dims, back) = parse_witness(&text).unwrap();
        assert_eq!(dims, vec![2]);
        assert_eq!(back, w);
        assert!(parse_state(&text, LoadOptions::default()).is_err());
    }

    proptest! {
        #[test]
        fn random_states_round_trip_exactly(seed in any::<u64>(), a in 1usize..4, b in 1usize..4) {
            let rho = random_density(&[a, b], seed).unwrap();
            let back = parse_state(&render(&rho), LoadOptions::default()).unwrap();
            prop_assert_eq!(back.matrix().as_slice(), rho.matrix().as_slice());
        }
    }
}
