//! Text formats for flag lists, coefficient tables and matrices.
//!
//! Two dialects exist. The *legacy* dialect uses the jbc/si/sp/qjb/yz file family:
//! 1-based indices and integer numerators over a denominator implied by the
//! flag sizes. The *native* dialect starts with a `# flagcert` header carrying
//! `index-base 0` and writes exact fractions.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use thiserror::Error;

use crate::algebra::{AveragedTable, AveragingMap, ProductTable};
use crate::certify::{fraction, parse_fraction, Certificate};
use crate::enumerate::{enumerate_flags, FlagBasis};
use crate::error::GraphError;
use crate::graph::{Flag, Graph, TypeGraph};
use crate::matrix::Matrix;
use crate::Rational;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, clap::ValueEnum)]
pub enum Format {
    #[default]
    Native,
    Legacy,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FormatError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("line {line}: {source}")]
    Graph { line: usize, source: GraphError },
    #[error("a value is not a multiple of 1/{denominator}")]
    NotIntegral { denominator: u64 },
}

fn parse_err(line: usize, message: impl Into<String>) -> FormatError {
    FormatError::Parse {
        line,
        message: message.into(),
    }
}

/// Content lines with their 1-based line numbers, skipping blanks.
fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty())
}

fn field<T: FromStr>(line: usize, token: &str) -> Result<T, FormatError> {
    token
        .parse()
        .map_err(|_| parse_err(line, format!("unexpected token {token:?}")))
}

// ---------------------------------------------------------------------------
// file names

pub fn legacy_flag_file(s: usize, size: usize, type_index: usize) -> String {
    if s == 0 {
        format!("jbc0{size}")
    } else {
        format!("jbc{s}{size}_{}", type_index + 1)
    }
}

pub fn legacy_product_file(s: usize, l1: usize, type_index: usize) -> String {
    format!("si{s}{l1}_{}", type_index + 1)
}

pub fn legacy_averaged_file(s: usize, l1: usize, type_index: usize) -> String {
    format!("sp{s}{l1}_{}", type_index + 1)
}

pub fn legacy_q_file(s: usize, l2: usize, type_index: usize) -> String {
    format!("qjb{s}{l2}_{}", type_index + 1)
}

pub fn legacy_objective_file(t: usize, l2: usize) -> String {
    format!("l{t}{l2}")
}

pub fn legacy_matrix_file(type_index: usize) -> String {
    format!("yz{}", type_index + 1)
}

pub const LEGACY_MATRIX_DENOMINATOR_FILE: &str = "yzn";

pub fn native_flag_file(s: usize, size: usize, type_index: usize) -> String {
    format!("flags_s{s}_l{size}_type{type_index}.txt")
}

pub fn native_product_file(s: usize, l1: usize, type_index: usize) -> String {
    format!("products_s{s}_l{l1}_type{type_index}.txt")
}

pub fn native_averaged_file(s: usize, l1: usize, type_index: usize) -> String {
    format!("averaged_s{s}_l{l1}_type{type_index}.txt")
}

pub fn native_q_file(s: usize, l2: usize, type_index: usize) -> String {
    format!("q_s{s}_l{l2}_type{type_index}.txt")
}

pub fn native_objective_file(t: usize, l2: usize) -> String {
    format!("objective_t{t}_l{l2}.txt")
}

// ---------------------------------------------------------------------------
// flag lists

/// Legacy flag list: the number of flags, then one line per flag holding the
/// upper-triangular adjacency rows. Roots are the leading vertices.
pub fn write_flag_list_legacy(basis: &FlagBasis) -> String {
    let mut out = format!("{}\n", basis.len());
    for f in basis.flags() {
        out.push_str(&f.graph().upper_triangle());
        out.push('\n');
    }
    out
}

/// Reads a legacy flag list whose flags are rooted at their first `s` vertices.
/// Whitespace inside an adjacency line is ignored.
pub fn read_flag_list_legacy(text: &str, s: usize) -> Result<Vec<Flag>, FormatError> {
    let mut lines = content_lines(text);
    let (ln, first) = lines.next().ok_or_else(|| parse_err(1, "empty flag list"))?;
    let count: usize = field(ln, first)?;
    let flags = lines
        .map(|(ln, line)| {
            let bits: String = line.chars().filter(|c| !c.is_whitespace()).collect();
            let g = Graph::from_upper_triangle(&bits).map_err(|source| FormatError::Graph { line: ln, source })?;
            Flag::rooted_prefix(g, s).map_err(|source| FormatError::Graph { line: ln, source })
        })
        .collect::<Result<Vec<_>, _>>()?;
    if flags.len() != count {
        return Err(parse_err(ln, format!("header announces {count} flags, found {}", flags.len())));
    }
    Ok(flags)
}

pub fn write_flag_list_native(basis: &FlagBasis) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "# flagcert flags v1");
    let _ = writeln!(out, "index-base 0");
    let _ = writeln!(out, "type {}", type_edges(basis.flag_type()));
    let _ = writeln!(out, "size {}", basis.size());
    let _ = writeln!(out, "count {}", basis.len());
    for (i, f) in basis.flags().iter().enumerate() {
        let _ = writeln!(out, "{i} {}", f.graph().upper_triangle());
    }
    out
}

/// Reads a native flag list, returning its type and flags.
pub fn read_flag_list_native(text: &str) -> Result<(TypeGraph, Vec<Flag>), FormatError> {
    let mut lines = content_lines(text);
    let mut expect = |key: &str| -> Result<(usize, String), FormatError> {
        let (ln, line) = lines.next().ok_or_else(|| parse_err(0, format!("missing `{key}`")))?;
        match line.strip_prefix(key) {
            Some(rest) => Ok((ln, rest.trim().to_string())),
            None => Err(parse_err(ln, format!("expected `{key}`"))),
        }
    };
    expect("# flagcert flags v1")?;
    let (ln, base) = expect("index-base")?;
    if base != "0" {
        return Err(parse_err(ln, "native files are 0-based"));
    }
    let (ln, ty_text) = expect("type")?;
    let (_, size) = expect("size")?;
    let (ln_count, count) = expect("count")?;
    let count: usize = field(ln_count, &count)?;
    let size: usize = field(ln_count, &size)?;
    let (s, edges) = parse_type_edges(ln, &ty_text)?;
    let ty = TypeGraph::from_edges(s, &edges).map_err(|source| FormatError::Graph { line: ln, source })?;
    let mut flags = Vec::with_capacity(count);
    for (ln, line) in lines {
        let mut tokens = line.split_whitespace();
        let idx = tokens.next().unwrap_or_default();
        let bits = tokens.next().unwrap_or_default();
        if tokens.next().is_some() {
            return Err(parse_err(ln, "expected `<index> <bits>`"));
        }
        if field::<usize>(ln, idx)? != flags.len() {
            return Err(parse_err(ln, "indices must be consecutive from 0"));
        }
        let g = Graph::from_upper_triangle_on(size, bits).map_err(|source| FormatError::Graph { line: ln, source })?;
        flags.push(Flag::with_leading_roots(g, ty).map_err(|source| FormatError::Graph { line: ln, source })?);
    }
    if flags.len() != count {
        return Err(parse_err(ln_count, format!("header announces {count} flags, found {}", flags.len())));
    }
    Ok((ty, flags))
}

/// `s=<order> <u>-<v> ...`
fn type_edges(ty: &TypeGraph) -> String {
    let mut out = format!("s={}", ty.order());
    for (u, v) in ty.graph().edges() {
        let _ = write!(out, " {u}-{v}");
    }
    out
}

fn parse_type_edges(line: usize, text: &str) -> Result<(usize, Vec<(usize, usize)>), FormatError> {
    let mut tokens = text.split_whitespace();
    let s = tokens
        .next()
        .and_then(|t| t.strip_prefix("s="))
        .ok_or_else(|| parse_err(line, "expected `s=<order>`"))?;
    let s = field(line, s)?;
    let edges = tokens
        .map(|e| {
            let (u, v) = e.split_once('-').ok_or_else(|| parse_err(line, format!("bad edge {e:?}")))?;
            Ok((field(line, u)?, field(line, v)?))
        })
        .collect::<Result<_, FormatError>>()?;
    Ok((s, edges))
}

// ---------------------------------------------------------------------------
// coefficient tables

fn integral(value: &Rational, denominator: u64) -> Result<BigInt, FormatError> {
    let scaled = value * Rational::from_integer(BigInt::from(denominator));
    if scaled.is_integer() {
        Ok(scaled.to_integer())
    } else {
        Err(FormatError::NotIntegral { denominator })
    }
}

/// Legacy product file: lines `a b c d`, meaning the `a`-th large flag has
/// coefficient `d / C(l2 - s, l1 - s)` in the product of small flags `b`, `c`.
pub fn write_products_legacy(table: &ProductTable) -> String {
    let mut out = String::new();
    for j in 0..table.large_basis().len() {
        for &(a, b, num) in table.row(j) {
            let _ = writeln!(out, "{} {} {} {num}", j + 1, a + 1, b + 1);
        }
    }
    out
}

pub fn write_products_native(table: &ProductTable) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "# flagcert products v1");
    let _ = writeln!(out, "index-base 0");
    let _ = writeln!(out, "type {}", type_edges(table.flag_type()));
    let _ = writeln!(
        out,
        "sizes {} {}",
        table.small_basis().size(),
        table.large_basis().size()
    );
    for (j, a, b, v) in table.entries() {
        let _ = writeln!(out, "{j} {a} {b} {}", fraction(&v));
    }
    out
}

/// Legacy averaged-product file: lines `a b c d` where `d / (C(l2-s, l1-s) *
/// l2!/(l2-s)!)` is the coefficient of 0-flag `a` in `[[F_b F_c]]_σ`.
pub fn write_averaged_legacy(table: &AveragedTable) -> String {
    let mut out = String::new();
    for k in 0..table.zero_basis().len() {
        for &(a, b, num) in table.row(k) {
            let _ = writeln!(out, "{} {} {} {num}", k + 1, a + 1, b + 1);
        }
    }
    out
}

pub fn write_averaged_native(table: &AveragedTable) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "# flagcert averaged-products v1");
    let _ = writeln!(out, "index-base 0");
    for (k, a, b, v) in table.entries() {
        let _ = writeln!(out, "{k} {a} {b} {}", fraction(&v));
    }
    out
}

/// Legacy q file: lines `a b c` with σ-flag `a`, its underlying 0-flag `b` and
/// `q = c / (l2!/(l2-s)!)`.
pub fn write_q_legacy(avg: &AveragingMap) -> String {
    let mut out = String::new();
    for j in 0..avg.flag_basis().len() {
        let (k, num) = avg.row(j);
        let _ = writeln!(out, "{} {} {num}", j + 1, k + 1);
    }
    out
}

pub fn write_q_native(avg: &AveragingMap) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "# flagcert averaging v1");
    let _ = writeln!(out, "index-base 0");
    for j in 0..avg.flag_basis().len() {
        let _ = writeln!(out, "{j} {} {}", avg.zero_index(j), fraction(&avg.q(j)));
    }
    out
}

/// Legacy objective file: one numerator per 0-flag over `C(l2, t)`.
pub fn write_objective_legacy(objective: &[Rational], denominator: u64) -> Result<String, FormatError> {
    let mut out = String::new();
    for w in objective {
        let _ = writeln!(out, "{}", integral(w, denominator)?);
    }
    Ok(out)
}

pub fn write_objective_native(objective: &[Rational]) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "# flagcert objective v1");
    let _ = writeln!(out, "index-base 0");
    for (k, w) in objective.iter().enumerate() {
        let _ = writeln!(out, "{k} {}", fraction(w));
    }
    out
}

pub fn read_objective_legacy(text: &str, denominator: u64) -> Result<Vec<Rational>, FormatError> {
    let den = BigInt::from(denominator);
    content_lines(text)
        .map(|(ln, line)| Ok(Rational::new(field(ln, line)?, den.clone())))
        .collect()
}

/// 0-based `(a, b, c, d)` from a legacy quadruple file.
pub fn read_quadruples(text: &str) -> Result<Vec<(usize, usize, usize, BigInt)>, FormatError> {
    content_lines(text)
        .map(|(ln, line)| {
            let t: Vec<&str> = line.split_whitespace().collect();
            if t.len() != 4 {
                return Err(parse_err(ln, "expected four columns"));
            }
            Ok((
                one_based(ln, t[0])?,
                one_based(ln, t[1])?,
                one_based(ln, t[2])?,
                field(ln, t[3])?,
            ))
        })
        .collect()
}

/// 0-based `(a, b, c)` from a legacy q file.
pub fn read_triples(text: &str) -> Result<Vec<(usize, usize, BigInt)>, FormatError> {
    content_lines(text)
        .map(|(ln, line)| {
            let t: Vec<&str> = line.split_whitespace().collect();
            if t.len() != 3 {
                return Err(parse_err(ln, "expected three columns"));
            }
            Ok((one_based(ln, t[0])?, one_based(ln, t[1])?, field(ln, t[2])?))
        })
        .collect()
}

fn one_based(line: usize, token: &str) -> Result<usize, FormatError> {
    match field::<usize>(line, token)? {
        0 => Err(parse_err(line, "indices are 1-based")),
        i => Ok(i - 1),
    }
}

/// What the first column of an averaged-product file indexes. Files in the wild use
/// either reading, so both are supported.
#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum AveragedColumn {
    /// 0-flags of size `l2`, as this toolkit writes them.
    ZeroFlag,
    /// σ-flags of size `l2`; rows are summed into their underlying 0-flag.
    SigmaFlag,
}

/// Coefficients `(k, a, b) -> numerator` of 0-flag `k` in `[[F_a F_b]]_σ`.
/// `avg` is needed to map σ-flags to 0-flags under [`AveragedColumn::SigmaFlag`].
pub fn averaged_coefficients(
    quads: &[(usize, usize, usize, BigInt)],
    column: AveragedColumn,
    avg: Option<&AveragingMap>,
) -> Result<BTreeMap<(usize, usize, usize), BigInt>, FormatError> {
    let mut out: BTreeMap<(usize, usize, usize), BigInt> = BTreeMap::new();
    for (a, b, c, d) in quads {
        let k = match column {
            AveragedColumn::ZeroFlag => *a,
            AveragedColumn::SigmaFlag => {
                let avg = avg.ok_or_else(|| parse_err(0, "σ-flag indexing needs the averaging map"))?;
                if *a >= avg.flag_basis().len() {
                    return Err(parse_err(0, format!("σ-flag index {} out of range", a + 1)));
                }
                avg.zero_index(*a)
            }
        };
        *out.entry((k, *b, *c)).or_default() += d;
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// matrices

/// Comma-separated integer numerators, one row per line.
pub fn read_matrix_csv(text: &str, denominator: &BigInt) -> Result<Matrix<Rational>, FormatError> {
    let rows = content_lines(text)
        .map(|(ln, line)| {
            line.split(',')
                .map(|cell| Ok(Rational::new(field(ln, cell.trim())?, denominator.clone())))
                .collect::<Result<Vec<_>, FormatError>>()
        })
        .collect::<Result<Vec<_>, _>>()?;
    Matrix::from_rows(rows).ok_or_else(|| parse_err(0, "matrix is not square"))
}

/// Writes `m` as numerators over the least common denominator of its entries,
/// returning the CSV text and that denominator.
pub fn write_matrix_csv(m: &Matrix<Rational>) -> (String, BigInt) {
    let den = m
        .rows()
        .flatten()
        .fold(BigInt::from(1), |acc, x| acc.lcm(x.denom()));
    let mut out = String::new();
    for row in m.rows() {
        let cells: Vec<String> = row
            .iter()
            .map(|x| (x * Rational::from_integer(den.clone())).to_integer().to_string())
            .collect();
        let _ = writeln!(out, "{}", cells.join(","));
    }
    (out, den)
}

pub fn read_denominator(text: &str) -> Result<BigInt, FormatError> {
    let mut lines = content_lines(text);
    let (ln, line) = lines.next().ok_or_else(|| parse_err(1, "missing denominator"))?;
    let d: BigInt = field(ln, line)?;
    if d <= BigInt::from(0) {
        return Err(parse_err(ln, "denominator must be positive"));
    }
    Ok(d)
}

/// A rational given either as `n/d` or as an integer.
pub fn parse_rational(text: &str) -> Result<Rational, String> {
    if text.contains('/') {
        parse_fraction(text)
    } else {
        text.parse::<BigInt>()
            .map(Rational::from_integer)
            .map_err(|_| format!("expected a rational, found {text:?}"))
    }
}

// ---------------------------------------------------------------------------
// legacy certificate data

#[derive(Debug, Error)]
pub enum LegacyDataError {
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("{path}: {source}")]
    Format { path: String, source: FormatError },
    #[error("{path}: {message}")]
    Mismatch { path: String, message: String },
    #[error(transparent)]
    Algebra(#[from] crate::error::AlgebraError),
}

/// Reads `jbc{s}{l1}_{i}`, `yz{i}` and `yzn` from `dir` for `i = 1, 2, …` and
/// reorders each matrix from the file's flag order into the canonical basis
/// order. The returned certificate claims `bound`.
pub fn load_legacy_certificate(
    dir: &std::path::Path,
    t: usize,
    s: usize,
    l1: usize,
    bound: Rational,
) -> Result<Certificate, LegacyDataError> {
    let read = |name: &str| {
        let path = dir.join(name);
        std::fs::read_to_string(&path).map_err(|source| LegacyDataError::Io {
            path: path.display().to_string(),
            source,
        })
    };
    let with_path = |name: &str| {
        let path = dir.join(name).display().to_string();
        move |source| LegacyDataError::Format { path, source }
    };
    let den_text = read(LEGACY_MATRIX_DENOMINATOR_FILE)?;
    let den = read_denominator(&den_text).map_err(with_path(LEGACY_MATRIX_DENOMINATOR_FILE))?;

    let mut types = Vec::new();
    let mut matrices = Vec::new();
    for i in 0.. {
        let flag_name = legacy_flag_file(s, l1, i);
        if !dir.join(&flag_name).exists() {
            break;
        }
        let flags = read_flag_list_legacy(&read(&flag_name)?, s).map_err(with_path(&flag_name))?;
        let mismatch = |message: String| LegacyDataError::Mismatch {
            path: dir.join(&flag_name).display().to_string(),
            message,
        };
        let ty = *flags
            .first()
            .ok_or_else(|| mismatch("flag list is empty".into()))?
            .flag_type();
        let basis = enumerate_flags(&ty, l1)?;
        if flags.len() != basis.len() {
            return Err(mismatch(format!(
                "{} flags listed, the type has {} flags of size {l1}",
                flags.len(),
                basis.len()
            )));
        }
        let mut position = vec![usize::MAX; flags.len()];
        let mut seen = vec![false; flags.len()];
        for (p, f) in flags.iter().enumerate() {
            if *f.flag_type() != ty || f.order() != l1 {
                return Err(mismatch(format!("flag {} does not match the first flag's type or size", p + 1)));
            }
            let idx = basis.index_of(f).expect("same type and size");
            if std::mem::replace(&mut seen[idx], true) {
                return Err(mismatch(format!("flag {} repeats an earlier flag", p + 1)));
            }
            position[p] = idx;
        }

        let matrix_name = legacy_matrix_file(i);
        let m = read_matrix_csv(&read(&matrix_name)?, &den).map_err(with_path(&matrix_name))?;
        if m.dim() != flags.len() {
            return Err(LegacyDataError::Mismatch {
                path: dir.join(&matrix_name).display().to_string(),
                message: format!("matrix is {0}x{0}, expected {1}x{1}", m.dim(), flags.len()),
            });
        }
        let mut inverse = vec![0; position.len()];
        for (p, &c) in position.iter().enumerate() {
            inverse[c] = p;
        }
        matrices.push(Matrix::from_fn(m.dim(), |a, b| m[(inverse[a], inverse[b])].clone()));
        types.push(ty);
        if s == 0 {
            break;
        }
    }
    if types.is_empty() {
        return Err(LegacyDataError::Mismatch {
            path: dir.join(legacy_flag_file(s, l1, 0)).display().to_string(),
            message: "no flag lists found".into(),
        });
    }
    Ok(Certificate {
        t,
        s,
        l1,
        types,
        matrices,
        bound,
    })
}

/// Writes `cert` as legacy-style files into `dir`.
pub fn write_legacy_certificate(dir: &std::path::Path, cert: &Certificate) -> Result<(), LegacyDataError> {
    let write = |name: String, text: String| {
        let path = dir.join(&name);
        std::fs::write(&path, text).map_err(|source| LegacyDataError::Io {
            path: path.display().to_string(),
            source,
        })
    };
    let den = cert
        .matrices
        .iter()
        .flat_map(|m| m.rows().flatten().map(|x| x.denom().clone()).collect::<Vec<_>>())
        .fold(BigInt::from(1), |acc, d| acc.lcm(&d));
    let scale = Rational::from_integer(den.clone());
    for (i, (ty, m)) in cert.types.iter().zip(&cert.matrices).enumerate() {
        let basis = enumerate_flags(ty, cert.l1)?;
        write(legacy_flag_file(cert.s, cert.l1, i), write_flag_list_legacy(&basis))?;
        let mut csv = String::new();
        for row in m.rows() {
            let cells: Vec<String> = row.iter().map(|x| (x * &scale).to_integer().to_string()).collect();
            let _ = writeln!(csv, "{}", cells.join(","));
        }
        write(legacy_matrix_file(i), csv)?;
    }
    write(LEGACY_MATRIX_DENOMINATOR_FILE.to_string(), format!("{den}\n"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::sync::Arc;

    #[test]
    fn legacy_flag_list_round_trip() {
        let basis = enumerate_flags(&TypeGraph::empty_type(), 3).unwrap();
        let text = write_flag_list_legacy(&basis);
        assert_eq!(text, "4\n000\n100\n110\n111\n");
        let flags = read_flag_list_legacy(&text, 0).unwrap();
        assert_eq!(flags, basis.flags());
        assert!(read_flag_list_legacy("5\n000\n", 0).is_err());
        assert!(read_flag_list_legacy("1\n0 1 0\n", 1).is_ok());
    }

    #[test]
    fn native_flag_list_round_trip() {
        let ty = TypeGraph::from_edges(2, &[(0, 1)]).unwrap();
        let basis = enumerate_flags(&ty, 4).unwrap();
        let text = write_flag_list_native(&basis);
        let (read_ty, flags) = read_flag_list_native(&text).unwrap();
        assert_eq!(read_ty, ty);
        assert_eq!(flags, basis.flags());
        assert!(read_flag_list_native(&text.replace("index-base 0", "index-base 1")).is_err());
    }

    #[test]
    fn quadruples_and_averaged_readings_agree() {
        let point = TypeGraph::from_edges(1, &[]).unwrap();
        let table = ProductTable::new(&point, 3).unwrap();
        let zero = Arc::new(enumerate_flags(&TypeGraph::empty_type(), 5).unwrap());
        let avg = AveragingMap::from_bases(table.large_basis().clone(), zero).unwrap();
        let averaged = AveragedTable::new(&table, &avg).unwrap();

        let quads = read_quadruples(&write_averaged_legacy(&averaged)).unwrap();
        let by_zero = averaged_coefficients(&quads, AveragedColumn::ZeroFlag, None).unwrap();
        for (k, a, b, v) in averaged.entries() {
            let num = &by_zero[&(k, a, b)];
            assert_eq!(Rational::new(num.clone(), BigInt::from(averaged.denominator())), v);
        }

        // the same data listed per σ-flag: q(F_j) p(F_a, F_b; F_j)
        let mut per_sigma = String::new();
        for j in 0..table.large_basis().len() {
            let (_, q) = avg.row(j);
            for &(a, b, p) in table.row(j) {
                let _ = writeln!(per_sigma, "{} {} {} {}", j + 1, a + 1, b + 1, u64::from(q) * u64::from(p));
            }
        }
        let quads = read_quadruples(&per_sigma).unwrap();
        let by_sigma = averaged_coefficients(&quads, AveragedColumn::SigmaFlag, Some(&avg)).unwrap();
        assert_eq!(by_sigma, by_zero);
        assert!(averaged_coefficients(&quads, AveragedColumn::SigmaFlag, None).is_err());
    }

    #[test]
    fn products_file_round_trip() {
        let point = TypeGraph::from_edges(1, &[]).unwrap();
        let table = ProductTable::new(&point, 2).unwrap();
        let quads = read_quadruples(&write_products_legacy(&table)).unwrap();
        for (j, a, b, d) in quads {
            assert_eq!(
                table.entry(j, a, b),
                Rational::new(d, BigInt::from(table.denominator()))
            );
        }
        assert!(read_quadruples("0 1 1 1\n").is_err());
        assert!(read_quadruples("1 1 1\n").is_err());
    }

    #[test]
    fn q_file_round_trip() {
        let avg = AveragingMap::new(&TypeGraph::from_edges(1, &[]).unwrap(), 3).unwrap();
        let triples = read_triples(&write_q_legacy(&avg)).unwrap();
        assert_eq!(triples.len(), avg.flag_basis().len());
        for (j, k, c) in triples {
            assert_eq!(avg.zero_index(j), k);
            assert_eq!(avg.q(j), Rational::new(c, BigInt::from(avg.denominator())));
        }
    }

    #[test]
    fn objective_round_trip() {
        let w = vec![Rational::new(1.into(), 35.into()), Rational::new(2.into(), 7.into())];
        let text = write_objective_legacy(&w, 35).unwrap();
        assert_eq!(text, "1\n10\n");
        assert_eq!(read_objective_legacy(&text, 35).unwrap(), w);
        assert!(write_objective_legacy(&w, 5).is_err());
    }

    #[test]
    fn matrix_csv_round_trip() {
        let m = Matrix::from_rows(vec![
            vec![Rational::new(3.into(), 4.into()), Rational::new((-1).into(), 6.into())],
            vec![Rational::new((-1).into(), 6.into()), Rational::new(1.into(), 1.into())],
        ])
        .unwrap();
        let (text, den) = write_matrix_csv(&m);
        assert_eq!(den, BigInt::from(12));
        assert_eq!(text, "9,-2\n-2,12\n");
        assert_eq!(read_matrix_csv(&text, &den).unwrap(), m);
        assert!(read_matrix_csv("1,2\n3\n", &den).is_err());
        assert_eq!(read_denominator("11289600\n").unwrap(), BigInt::from(11289600));
        assert!(read_denominator("0").is_err());
    }

    #[test]
    fn rationals() {
        assert_eq!(parse_rational("3").unwrap(), Rational::from_integer(3.into()));
        assert_eq!(parse_rational("2/4").unwrap(), Rational::new(1.into(), 2.into()));
        assert!(parse_rational("x").is_err());
    }
}
