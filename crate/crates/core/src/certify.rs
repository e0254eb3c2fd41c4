//! Exact certificates: rounding solver output, proving positive
//! semidefiniteness by pivoted LDLᵀ, computing the best bound and verifying a
//! certificate from scratch.

#![allow(clippy::result_large_err)]

use std::fmt::Write as _;

use log::{debug, info};
use num_bigint::BigInt;
use num_traits::{FromPrimitive, One, Signed, Zero};
use thiserror::Error;

use crate::enumerate::{enumerate_flags, FlagBasis};
use crate::error::AlgebraError;
use crate::graph::{Graph, TypeGraph};
use crate::matrix::Matrix;
use crate::sdp::{SdpError, SdpProblem, Sizes, SolverSolution, Tables};
use crate::Rational;

/// Exact factorisation `M[p[i]][p[j]] = sum_u L[i][u] D[u] L[j][u]` with `L`
/// unit lower triangular in pivot order and every `D[u] >= 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct PsdWitness {
    pub permutation: Vec<usize>,
    pub diagonal: Vec<Rational>,
    pub lower: Matrix<Rational>,
}

impl PsdWitness {
    /// Multiplies the factors back together.
    pub fn reconstruct(&self) -> Matrix<Rational> {
        let n = self.permutation.len();
        let mut m = Matrix::zeros(n);
        for i in 0..n {
            for j in 0..n {
                let mut sum = Rational::zero();
                for u in 0..=i.min(j) {
                    if !self.diagonal[u].is_zero() {
                        sum += &self.lower[(i, u)] * &self.diagonal[u] * &self.lower[(j, u)];
                    }
                }
                m[(self.permutation[i], self.permutation[j])] = sum;
            }
        }
        m
    }

    pub fn rank(&self) -> usize {
        self.diagonal.iter().filter(|d| !d.is_zero()).count()
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PsdFailure {
    #[error("matrix is not symmetric at ({row}, {col})")]
    Asymmetric { row: usize, col: usize },
    #[error("matrix is not positive semidefinite: z^T M z = {value} for z = {}", fmt_vec(.witness))]
    Indefinite { witness: Vec<Rational>, value: Rational },
}

fn fmt_vec(v: &[Rational]) -> String {
    let parts: Vec<String> = v.iter().map(ToString::to_string).collect();
    format!("({})", parts.join(", "))
}

/// `z^T M z`, exactly.
pub fn quadratic_value(m: &Matrix<Rational>, z: &[Rational]) -> Rational {
    let mut total = Rational::zero();
    for i in 0..m.dim() {
        if z[i].is_zero() {
            continue;
        }
        let mut row = Rational::zero();
        for j in 0..m.dim() {
            if !z[j].is_zero() {
                row += &m[(i, j)] * &z[j];
            }
        }
        total += &z[i] * row;
    }
    total
}

/// Proves `m` positive semidefinite with an exact symmetric-pivoted LDLᵀ, or
/// returns a rational vector `z` with `z^T m z < 0`.
///
/// The pivot is the largest remaining diagonal entry. Once every remaining
/// diagonal entry is zero, the remaining Schur complement must vanish.
pub fn psd_certify(m: &Matrix<Rational>) -> Result<PsdWitness, PsdFailure> {
    if let Some((row, col)) = m.asymmetry() {
        return Err(PsdFailure::Asymmetric { row, col });
    }
    let n = m.dim();
    let mut schur = m.clone();
    let mut remaining: Vec<usize> = (0..n).collect();
    let mut pivots: Vec<usize> = Vec::with_capacity(n);
    let mut diagonal: Vec<Rational> = Vec::with_capacity(n);
    // columns of L indexed by original vertex, one per pivot
    let mut columns: Vec<Vec<Rational>> = Vec::with_capacity(n);

    while !remaining.is_empty() {
        if let Some(&r) = remaining.iter().find(|&&r| schur[(r, r)].is_negative()) {
            let mut y = vec![Rational::zero(); n];
            y[r] = Rational::one();
            return Err(indefinite(m, &pivots, &columns, y));
        }
        let &p = remaining
            .iter()
            .max_by(|&&a, &&b| schur[(a, a)].cmp(&schur[(b, b)]).then(b.cmp(&a)))
            .expect("nonempty");
        let d = schur[(p, p)].clone();
        if d.is_zero() {
            for (i, &a) in remaining.iter().enumerate() {
                for &b in &remaining[i + 1..] {
                    let x = &schur[(a, b)];
                    if !x.is_zero() {
                        // y = e_a - sign(x) e_b gives y^T S y = -2|x|
                        let mut y = vec![Rational::zero(); n];
                        y[a] = Rational::one();
                        y[b] = if x.is_positive() { -Rational::one() } else { Rational::one() };
                        return Err(indefinite(m, &pivots, &columns, y));
                    }
                }
            }
            for &r in &remaining {
                pivots.push(r);
                diagonal.push(Rational::zero());
                columns.push(vec![Rational::zero(); n]);
            }
            break;
        }
        remaining.retain(|&r| r != p);
        let mut col = vec![Rational::zero(); n];
        for &r in &remaining {
            col[r] = &schur[(r, p)] / &d;
        }
        for &a in &remaining {
            if col[a].is_zero() {
                continue;
            }
            let factor = &col[a] * &d;
            for &b in &remaining {
                if !col[b].is_zero() {
                    let delta = &factor * &col[b];
                    schur[(a, b)] -= delta;
                }
            }
        }
        pivots.push(p);
        diagonal.push(d);
        columns.push(col);
    }

    let lower = Matrix::from_fn(n, |i, u| match i.cmp(&u) {
        std::cmp::Ordering::Equal => Rational::one(),
        std::cmp::Ordering::Greater => columns[u][pivots[i]].clone(),
        std::cmp::Ordering::Less => Rational::zero(),
    });
    Ok(PsdWitness {
        permutation: pivots,
        diagonal,
        lower,
    })
}

/// Lifts a vector `y` on the not-yet-eliminated coordinates to `z` with
/// `z^T M z = y^T S y`, where `S` is the current Schur complement: `z` solves
/// `L^T z = (0, y)`.
fn indefinite(m: &Matrix<Rational>, pivots: &[usize], columns: &[Vec<Rational>], y: Vec<Rational>) -> PsdFailure {
    let mut z = y;
    for u in (0..pivots.len()).rev() {
        let mut acc = Rational::zero();
        for (v, l) in columns[u].iter().enumerate() {
            if !l.is_zero() && !z[v].is_zero() {
                acc += l * &z[v];
            }
        }
        z[pivots[u]] = -acc;
    }
    let value = quadratic_value(m, &z);
    debug_assert!(value.is_negative());
    PsdFailure::Indefinite { witness: z, value }
}

/// Rounds every entry to the nearest multiple of `1 / denominator`.
pub fn round_matrices(solution: &SolverSolution, denominator: u64) -> Vec<Matrix<Rational>> {
    assert!(denominator >= 1, "denominator must be positive");
    let den = BigInt::from(denominator);
    let scale = denominator as f64;
    solution
        .matrices
        .iter()
        .map(|m| {
            let rounded = m.map(|&x| {
                let num = BigInt::from_f64((x * scale).round()).unwrap_or_default();
                Rational::new(num, den.clone())
            });
            Matrix::from_fn(rounded.dim(), |i, j| {
                (&rounded[(i, j)] + &rounded[(j, i)]) / Rational::from_integer(2.into())
            })
        })
        .collect()
}

/// The largest `c` with `sum_i v_i + c e <= w`, and the first 0-flag where it
/// is attained.
#[derive(Debug, Clone, PartialEq)]
pub struct Bound {
    pub value: Rational,
    pub tight: usize,
}

pub fn best_bound(tables: &Tables, matrices: &[Matrix<Rational>]) -> Result<Bound, AlgebraError> {
    min_slack(tables.slacks(matrices)?)
}

fn min_slack(slacks: Vec<Rational>) -> Result<Bound, AlgebraError> {
    let (tight, value) = slacks
        .into_iter()
        .enumerate()
        .reduce(|best, cur| if cur.1 < best.1 { cur } else { best })
        .ok_or(AlgebraError::NoFlags)?;
    Ok(Bound { value, tight })
}

/// Types, exact PSD matrices and the claimed bound.
#[derive(Debug, Clone, PartialEq)]
pub struct Certificate {
    pub t: usize,
    pub s: usize,
    pub l1: usize,
    pub types: Vec<TypeGraph>,
    pub matrices: Vec<Matrix<Rational>>,
    pub bound: Rational,
}

pub const CERTIFICATE_HEADER: &str = "flagcert v1";

impl Certificate {
    pub fn l2(&self) -> usize {
        2 * self.l1 - self.s
    }

    /// The `l1`-vertex flag bases indexing the matrices.
    pub fn bases(&self) -> Result<Vec<FlagBasis>, AlgebraError> {
        self.types.iter().map(|ty| enumerate_flags(ty, self.l1)).collect()
    }

    /// Line-oriented text encoding.
    ///
    /// ```text
    /// flagcert v1
    /// index-base 0
    /// t <t>
    /// s <s>
    /// l1 <l1>
    /// types <count>
    /// type <i> <edge count> <u>-<v> ...
    /// matrix <i> <dim>
    /// <row-major entries as numerator/denominator, one row per line>
    /// bound <numerator>/<denominator>
    /// ```
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{CERTIFICATE_HEADER}");
        let _ = writeln!(out, "index-base 0");
        let _ = writeln!(out, "t {}", self.t);
        let _ = writeln!(out, "s {}", self.s);
        let _ = writeln!(out, "l1 {}", self.l1);
        let _ = writeln!(out, "types {}", self.types.len());
        for (i, ty) in self.types.iter().enumerate() {
            let edges: Vec<String> = ty.graph().edges().map(|(u, v)| format!(" {u}-{v}")).collect();
            let _ = writeln!(out, "type {i} {}{}", edges.len(), edges.concat());
        }
        for (i, m) in self.matrices.iter().enumerate() {
            let _ = writeln!(out, "matrix {i} {}", m.dim());
            for row in m.rows() {
                let cells: Vec<String> = row.iter().map(fraction).collect();
                let _ = writeln!(out, "{}", cells.join(" "));
            }
        }
        let _ = writeln!(out, "bound {}", fraction(&self.bound));
        out
    }

    /// Parses [`Certificate::to_text`] output. Only the canonical encoding is
    /// accepted, so parsing and writing back reproduces the input exactly.
    pub fn parse(text: &str) -> Result<Self, VerifyError> {
        let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));
        let mut next = |what: &str| {
            lines.next().ok_or_else(|| VerifyError::Malformed {
                line: 0,
                message: format!("unexpected end of file, expected {what}"),
            })
        };
        let (_, header) = next("header")?;
        if header != CERTIFICATE_HEADER {
            return Err(VerifyError::UnsupportedVersion(header.to_string()));
        }
        let (ln, line) = next("index base")?;
        expect_keyword(ln, line, "index-base")?;
        if line != "index-base 0" {
            return Err(malformed(ln, "only index-base 0 is supported"));
        }
        let t = keyed_number(next("t")?, "t")?;
        let s = keyed_number(next("s")?, "s")?;
        let l1 = keyed_number(next("l1")?, "l1")?;
        let count = keyed_number(next("types")?, "types")?;
        let mut types = Vec::with_capacity(count);
        for i in 0..count {
            let (ln, line) = next("type")?;
            let tokens: Vec<&str> = line.split(' ').collect();
            if tokens.len() < 3 || tokens[0] != "type" || tokens[1] != i.to_string() {
                return Err(malformed(ln, format!("expected `type {i} ...`")));
            }
            let edge_count: usize = number(ln, tokens[2])?;
            if tokens.len() != 3 + edge_count {
                return Err(malformed(ln, "edge count does not match the edge list"));
            }
            let edges = tokens[3..]
                .iter()
                .map(|e| {
                    let (u, v) = e.split_once('-').ok_or_else(|| malformed(ln, format!("bad edge {e:?}")))?;
                    Ok((number(ln, u)?, number(ln, v)?))
                })
                .collect::<Result<Vec<(usize, usize)>, VerifyError>>()?;
            let graph = Graph::from_edges(s, &edges).map_err(|e| malformed(ln, e.to_string()))?;
            types.push(TypeGraph::new(graph));
        }
        let mut matrices = Vec::with_capacity(count);
        for i in 0..count {
            let (ln, line) = next("matrix")?;
            let tokens: Vec<&str> = line.split(' ').collect();
            if tokens.len() != 3 || tokens[0] != "matrix" || tokens[1] != i.to_string() {
                return Err(malformed(ln, format!("expected `matrix {i} <dim>`")));
            }
            let dim: usize = number(ln, tokens[2])?;
            let mut rows = Vec::with_capacity(dim);
            for _ in 0..dim {
                let (ln, line) = next("matrix row")?;
                let row = line
                    .split(' ')
                    .map(|c| parse_fraction(c).map_err(|m| malformed(ln, m)))
                    .collect::<Result<Vec<_>, _>>()?;
                if row.len() != dim {
                    return Err(malformed(ln, format!("expected {dim} entries")));
                }
                rows.push(row);
            }
            matrices.push(Matrix::from_rows(rows).expect("square by construction"));
        }
        let (ln, line) = next("bound")?;
        let bound = match line.strip_prefix("bound ") {
            Some(b) => parse_fraction(b).map_err(|m| malformed(ln, m))?,
            None => return Err(malformed(ln, "expected `bound <numerator>/<denominator>`")),
        };
        if let Some((ln, _)) = lines.next() {
            return Err(malformed(ln, "trailing content after the bound"));
        }
        let cert = Certificate {
            t,
            s,
            l1,
            types,
            matrices,
            bound,
        };
        if cert.to_text() != text {
            return Err(malformed(0, "non-canonical encoding (check spacing and lowest-terms fractions)"));
        }
        Ok(cert)
    }
}

/// `numerator/denominator`, always with an explicit denominator.
pub fn fraction(x: &Rational) -> String {
    format!("{}/{}", x.numer(), x.denom())
}

pub fn parse_fraction(token: &str) -> Result<Rational, String> {
    let (n, d) = token
        .split_once('/')
        .ok_or_else(|| format!("expected numerator/denominator, found {token:?}"))?;
    let n: BigInt = n.parse().map_err(|_| format!("bad numerator in {token:?}"))?;
    let d: BigInt = d.parse().map_err(|_| format!("bad denominator in {token:?}"))?;
    if !d.is_positive() {
        return Err(format!("denominator must be positive in {token:?}"));
    }
    Ok(Rational::new(n, d))
}

fn malformed(line: usize, message: impl Into<String>) -> VerifyError {
    VerifyError::Malformed {
        line,
        message: message.into(),
    }
}

fn number(line: usize, token: &str) -> Result<usize, VerifyError> {
    token
        .parse()
        .map_err(|_| malformed(line, format!("expected a number, found {token:?}")))
}

fn expect_keyword(line: usize, text: &str, key: &str) -> Result<(), VerifyError> {
    match text.split(' ').next() {
        Some(k) if k == key => Ok(()),
        _ => Err(malformed(line, format!("expected `{key} ...`"))),
    }
}

fn keyed_number((line, text): (usize, &str), key: &str) -> Result<usize, VerifyError> {
    expect_keyword(line, text, key)?;
    match text.split(' ').collect::<Vec<_>>().as_slice() {
        [_, value] => number(line, value),
        _ => Err(malformed(line, format!("expected `{key} <number>`"))),
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum VerifyError {
    #[error("unsupported certificate format {0:?}, expected {CERTIFICATE_HEADER:?}")]
    UnsupportedVersion(String),
    #[error("malformed certificate at line {line}: {message}")]
    Malformed { line: usize, message: String },
    #[error(transparent)]
    Sizes(#[from] SdpError),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error("{types} types but {matrices} matrices")]
    MatrixCount { types: usize, matrices: usize },
    #[error("matrix {index} is {found}x{found} but its type has {expected} flags")]
    Dimension { index: usize, expected: usize, found: usize },
    #[error("matrix {index}: {failure}")]
    NotPsd { index: usize, failure: PsdFailure },
    #[error(
        "constraint {constraint} (graph {graph}) is violated: slack minus claimed bound is {residual}; \
         the matrices only support a bound of {recomputed}"
    )]
    ConstraintViolated {
        constraint: usize,
        graph: String,
        residual: Rational,
        recomputed: Rational,
    },
}

/// Re-derives every flag basis and density table, proves each matrix PSD and
/// recomputes the bound. Accepts iff the recomputed bound is at least the
/// claimed one, and returns the recomputed bound.
pub fn verify(cert: &Certificate) -> Result<Rational, VerifyError> {
    let sizes = Sizes::new(cert.t, cert.s, cert.l1)?;
    if cert.types.len() != cert.matrices.len() {
        return Err(VerifyError::MatrixCount {
            types: cert.types.len(),
            matrices: cert.matrices.len(),
        });
    }
    let tables = Tables::build(sizes, &cert.types)?;
    for (index, (block, m)) in tables.blocks.iter().zip(&cert.matrices).enumerate() {
        let expected = block.small_basis().len();
        if m.dim() != expected {
            return Err(VerifyError::Dimension {
                index,
                expected,
                found: m.dim(),
            });
        }
        psd_certify(m).map_err(|failure| VerifyError::NotPsd { index, failure })?;
    }
    let slacks = tables.slacks(&cert.matrices)?;
    if let Some(k) = slacks.iter().position(|s| *s < cert.bound) {
        let recomputed = min_slack(slacks.clone())?.value;
        return Err(VerifyError::ConstraintViolated {
            constraint: k,
            graph: tables.zero_basis.forms()[k].to_bitstring(),
            residual: &slacks[k] - &cert.bound,
            recomputed,
        });
    }
    Ok(min_slack(slacks)?.value)
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CertifyError {
    #[error("solution has {found} blocks but the problem has {expected}")]
    BlockCount { expected: usize, found: usize },
    #[error("matrix {index} could not be made positive semidefinite by diagonal regularisation")]
    Unrepairable { index: usize },
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}

#[derive(Debug, Clone, PartialEq)]
pub struct CertifyOutcome {
    pub certificate: Certificate,
    /// Diagonal shift `eps` added to each matrix (zero when none was needed).
    pub regularisation: Vec<Rational>,
    /// 0-flag index where the bound is attained.
    pub tight: usize,
}

/// Largest multiplier tried for the `k / denominator` diagonal shift.
const MAX_SHIFT_MULTIPLIER: u64 = 1 << 40;

/// Rounds the solver matrices, repairs any that fail the exact PSD test by
/// adding `(k / denominator) I` for `k = 1, 2, 4, …`, and sets the bound to
/// the exact minimum slack.
pub fn certify_solution(
    problem: &SdpProblem,
    solution: &SolverSolution,
    denominator: u64,
) -> Result<CertifyOutcome, CertifyError> {
    if solution.matrices.len() != problem.block_dims.len() {
        return Err(CertifyError::BlockCount {
            expected: problem.block_dims.len(),
            found: solution.matrices.len(),
        });
    }
    let rounded = round_matrices(solution, denominator);
    let mut matrices = Vec::with_capacity(rounded.len());
    let mut regularisation = Vec::with_capacity(rounded.len());
    for (index, m) in rounded.into_iter().enumerate() {
        if psd_certify(&m).is_ok() {
            matrices.push(m);
            regularisation.push(Rational::zero());
            continue;
        }
        let mut k = 1u64;
        loop {
            if k > MAX_SHIFT_MULTIPLIER {
                return Err(CertifyError::Unrepairable { index });
            }
            let eps = Rational::new(BigInt::from(k), BigInt::from(denominator));
            let mut shifted = m.clone();
            for i in 0..shifted.dim() {
                shifted[(i, i)] += &eps;
            }
            if psd_certify(&shifted).is_ok() {
                debug!("matrix {index}: regularised with {eps}");
                matrices.push(shifted);
                regularisation.push(eps);
                break;
            }
            k *= 2;
        }
    }
    let bound = min_slack(problem.slacks(&matrices))?;
    info!("certified bound {} (solver reported {})", bound.value, solution.c_float);
    Ok(CertifyOutcome {
        certificate: Certificate {
            t: problem.sizes.t,
            s: problem.sizes.s,
            l1: problem.sizes.l1,
            types: problem.types.clone(),
            matrices,
            bound: bound.value,
        },
        regularisation,
        tight: bound.tight,
    })
}
