//! The semidefinite program behind a certificate, its sparse SDPA export and
//! the import of a solver's solution.
//!
//! The program is posed in SDPA's dual form `max F0•Y s.t. Fk•Y = ck, Y ⪰ 0`.
//! `Y` is block diagonal: one PSD block `M_i` per type, then a diagonal block
//! holding one slack per 0-flag followed by the bound `c`. Constraint `k`
//! reads `sum_i <A_ik, M_i> + slack_k + c = w_k`. Restricting `c` to be
//! nonnegative loses nothing because `M = 0` already achieves `min_k w_k >= 0`.

use std::fmt::Write as _;
use std::sync::Arc;

use num_traits::{ToPrimitive, Zero};
use thiserror::Error;

use crate::algebra::{objective_vector, AveragedTable, AveragingMap, ProductTable};
use crate::canon::CanonicalForm;
use crate::enumerate::{enumerate_flags, enumerate_types, FlagBasis, MAX_FLAG_SIZE};
use crate::error::AlgebraError;
use crate::graph::TypeGraph;
use crate::matrix::Matrix;
use crate::Rational;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SdpError {
    #[error("invalid sizes: {0}")]
    InvalidSizes(String),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error("solution line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("solution block {block}: entry ({row}, {col}) outside a {dim}x{dim} block")]
    EntryOutOfRange { block: usize, row: usize, col: usize, dim: usize },
    #[error("solution refers to block {block} but the problem has {blocks} blocks")]
    UnknownBlock { block: usize, blocks: usize },
    #[error("solution carries no objective value and no bound entry")]
    MissingObjective,
}

/// Validated sizes of a run: clique size `t`, type order `s` and small flag
/// size `l1`; the large flag size is `l2 = 2*l1 - s`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Sizes {
    pub t: usize,
    pub s: usize,
    pub l1: usize,
}

impl Sizes {
    pub fn new(t: usize, s: usize, l1: usize) -> Result<Self, SdpError> {
        if s == 0 {
            return Err(SdpError::InvalidSizes("type order s must be at least 1".into()));
        }
        if l1 <= s {
            return Err(SdpError::InvalidSizes(format!("l1 = {l1} must exceed s = {s}")));
        }
        let l2 = 2 * l1 - s;
        if l2 < t {
            return Err(SdpError::InvalidSizes(format!("l2 = 2*l1 - s = {l2} is smaller than t = {t}")));
        }
        if l2 > MAX_FLAG_SIZE {
            return Err(SdpError::InvalidSizes(format!(
                "l2 = {l2} exceeds the enumeration cap of {MAX_FLAG_SIZE}"
            )));
        }
        if t < 2 {
            return Err(SdpError::InvalidSizes("t must be at least 2".into()));
        }
        Ok(Sizes { t, s, l1 })
    }

    pub fn l2(&self) -> usize {
        2 * self.l1 - self.s
    }
}

/// Exact density data for a run: the 0-flag basis of size `l2`, the objective
/// vector and one averaged product table per type.
#[derive(Debug, Clone)]
pub struct Tables {
    pub zero_basis: Arc<FlagBasis>,
    pub objective: Vec<Rational>,
    pub blocks: Vec<AveragedTable>,
}

impl Tables {
    pub fn build(sizes: Sizes, types: &[TypeGraph]) -> Result<Self, SdpError> {
        let l2 = sizes.l2();
        let zero_basis = Arc::new(enumerate_flags(&TypeGraph::empty_type(), l2)?);
        let objective = objective_vector(sizes.t, &zero_basis)?.into_coeffs();
        let blocks = types
            .iter()
            .map(|ty| {
                if ty.order() != sizes.s {
                    return Err(SdpError::InvalidSizes(format!(
                        "type {ty:?} has order {} instead of {}",
                        ty.order(),
                        sizes.s
                    )));
                }
                let small = Arc::new(enumerate_flags(ty, sizes.l1)?);
                let large = Arc::new(enumerate_flags(ty, l2)?);
                let table = ProductTable::from_bases(small, large.clone());
                let avg = AveragingMap::from_bases(large, zero_basis.clone())?;
                Ok(AveragedTable::new(&table, &avg)?)
            })
            .collect::<Result<Vec<_>, SdpError>>()?;
        Ok(Tables {
            zero_basis,
            objective,
            blocks,
        })
    }

    /// `w_k - sum_i <A_ik, M_i>` for every 0-flag `k`.
    pub fn slacks(&self, matrices: &[Matrix<Rational>]) -> Result<Vec<Rational>, AlgebraError> {
        let mut slack = self.objective.clone();
        for (block, m) in self.blocks.iter().zip(matrices) {
            for (s, v) in slack.iter_mut().zip(block.apply(m)?) {
                *s -= v;
            }
        }
        Ok(slack)
    }
}

/// One inequality `sum_i <A_ik, M_i> + c <= w_k`, with each `A_ik` stored as
/// its upper triangle `(a, b, A_ab)`, `a <= b`.
#[derive(Debug, Clone, PartialEq)]
pub struct Constraint {
    pub graph: CanonicalForm,
    pub rhs: Rational,
    pub blocks: Vec<Vec<(usize, usize, Rational)>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SdpProblem {
    pub sizes: Sizes,
    pub types: Vec<TypeGraph>,
    pub block_dims: Vec<usize>,
    pub constraints: Vec<Constraint>,
}

/// Assembles the program for all types of order `s`.
pub fn build_problem(t: usize, s: usize, l1: usize) -> Result<SdpProblem, SdpError> {
    let sizes = Sizes::new(t, s, l1)?;
    let types = enumerate_types(s)?;
    let tables = Tables::build(sizes, &types)?;
    Ok(problem_from_tables(sizes, types, &tables))
}

pub fn problem_from_tables(sizes: Sizes, types: Vec<TypeGraph>, tables: &Tables) -> SdpProblem {
    let keep: Vec<usize> = (0..types.len()).filter(|&i| !tables.blocks[i].small_basis().is_empty()).collect();
    let constraints = (0..tables.zero_basis.len())
        .map(|k| Constraint {
            graph: tables.zero_basis.forms()[k],
            rhs: tables.objective[k].clone(),
            blocks: keep
                .iter()
                .map(|&i| {
                    let table = &tables.blocks[i];
                    table
                        .row(k)
                        .iter()
                        .filter(|&&(a, b, _)| a <= b)
                        .map(|&(a, b, _)| (a as usize, b as usize, table.entry(k, a as usize, b as usize)))
                        .collect()
                })
                .collect(),
        })
        .collect();
    SdpProblem {
        sizes,
        block_dims: keep.iter().map(|&i| tables.blocks[i].small_basis().len()).collect(),
        types: keep.iter().map(|&i| types[i]).collect(),
        constraints,
    }
}

impl SdpProblem {
    /// `w_k - sum_i <A_ik, M_i>` for every constraint.
    pub fn slacks(&self, matrices: &[Matrix<Rational>]) -> Vec<Rational> {
        self.constraints
            .iter()
            .map(|con| {
                let mut slack = con.rhs.clone();
                for (entries, m) in con.blocks.iter().zip(matrices) {
                    for (a, b, v) in entries {
                        let x = &m[(*a, *b)];
                        if x.is_zero() {
                            continue;
                        }
                        if a == b {
                            slack -= v * x;
                        } else {
                            slack -= v * x * Rational::from_integer(2.into());
                        }
                    }
                }
                slack
            })
            .collect()
    }
}

fn float(x: &Rational) -> f64 {
    x.to_f64().expect("finite rational")
}

/// Sparse SDPA text. Entries are `matrix block row col value` with 1-based
/// indices and `row <= col`; values are shortest round-trip decimals.
pub fn export_solver_format(p: &SdpProblem) -> String {
    let m = p.constraints.len();
    let mut out = String::new();
    let _ = writeln!(out, "{m}");
    let mut sizes: Vec<String> = p.block_dims.iter().map(|d| d.to_string()).collect();
    let blocks = if m == 0 {
        p.block_dims.len()
    } else {
        sizes.push(format!("-{}", m + 1));
        p.block_dims.len() + 1
    };
    let _ = writeln!(out, "{blocks}");
    let _ = writeln!(out, "{}", sizes.join(" "));
    let rhs: Vec<String> = p.constraints.iter().map(|c| float(&c.rhs).to_string()).collect();
    let _ = writeln!(out, "{}", rhs.join(" "));
    if m == 0 {
        return out;
    }
    let slack = p.block_dims.len() + 1;
    let _ = writeln!(out, "0 {slack} {} {} 1", m + 1, m + 1);
    for (k, con) in p.constraints.iter().enumerate() {
        for (i, entries) in con.blocks.iter().enumerate() {
            for (a, b, v) in entries {
                let _ = writeln!(out, "{} {} {} {} {}", k + 1, i + 1, a + 1, b + 1, float(v));
            }
        }
        let _ = writeln!(out, "{} {slack} {} {} 1", k + 1, k + 1, k + 1);
        let _ = writeln!(out, "{} {slack} {} {} 1", k + 1, m + 1, m + 1);
    }
    out
}

/// Floating-point matrices and bound reported by a solver.
#[derive(Debug, Clone, PartialEq)]
pub struct SolverSolution {
    pub matrices: Vec<Matrix<f64>>,
    pub c_float: f64,
}

/// Reads a solver's solution for `p`.
///
/// Grammar, one item per line; blank lines and lines starting with `#` or `*`
/// are ignored:
///
/// ```text
/// objective <value>
/// <block> <row> <col> <value>
/// ```
///
/// Blocks and indices are 1-based and follow the exported block structure.
/// An entry `(row, col)` also fills `(col, row)` unless that entry is given
/// explicitly; the result is then symmetrised as `(A + A^T) / 2`. Without an
/// objective line the bound is read from the last diagonal entry of the
/// slack block.
pub fn import_solution(p: &SdpProblem, text: &str) -> Result<SolverSolution, SdpError> {
    let psd_blocks = p.block_dims.len();
    let slack_dim = p.constraints.len() + 1;
    let mut raw: Vec<Matrix<Option<f64>>> = p.block_dims.iter().map(|&d| Matrix::from_fn(d, |_, _| None)).collect();
    let mut objective = None;
    let mut c_entry = None;
    for (idx, line) in text.lines().enumerate() {
        let lineno = idx + 1;
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') || line.starts_with('*') {
            continue;
        }
        let parse_err = |message: String| SdpError::Parse { line: lineno, message };
        let tokens: Vec<&str> = line.split_whitespace().collect();
        match tokens.as_slice() {
            ["objective", value] => {
                objective = Some(parse_float(value).map_err(parse_err)?);
            }
            [block, row, col, value] => {
                let block = parse_index(block).map_err(parse_err)?;
                let row = parse_index(row).map_err(parse_err)?;
                let col = parse_index(col).map_err(parse_err)?;
                let value = parse_float(value).map_err(parse_err)?;
                if block <= psd_blocks {
                    let dim = p.block_dims[block - 1];
                    if row > dim || col > dim {
                        return Err(SdpError::EntryOutOfRange { block, row, col, dim });
                    }
                    raw[block - 1][(row - 1, col - 1)] = Some(value);
                } else if block == psd_blocks + 1 && !p.constraints.is_empty() {
                    if row > slack_dim || col > slack_dim {
                        return Err(SdpError::EntryOutOfRange {
                            block,
                            row,
                            col,
                            dim: slack_dim,
                        });
                    }
                    if row == slack_dim && col == slack_dim {
                        c_entry = Some(value);
                    }
                } else {
                    return Err(SdpError::UnknownBlock {
                        block,
                        blocks: psd_blocks + usize::from(!p.constraints.is_empty()),
                    });
                }
            }
            _ => return Err(parse_err(format!("unrecognised line {line:?}"))),
        }
    }
    let matrices = raw
        .iter()
        .map(|a| {
            let full = Matrix::from_fn(a.dim(), |i, j| a[(i, j)].or(a[(j, i)]).unwrap_or(0.0));
            Matrix::from_fn(a.dim(), |i, j| (full[(i, j)] + full[(j, i)]) / 2.0)
        })
        .collect();
    let c_float = objective.or(c_entry).ok_or(SdpError::MissingObjective)?;
    Ok(SolverSolution { matrices, c_float })
}

fn parse_index(token: &str) -> Result<usize, String> {
    match token.parse::<usize>() {
        Ok(0) | Err(_) => Err(format!("expected a positive index, found {token:?}")),
        Ok(i) => Ok(i),
    }
}

fn parse_float(token: &str) -> Result<f64, String> {
    token
        .parse::<f64>()
        .ok()
        .filter(|x| x.is_finite())
        .ok_or_else(|| format!("expected a finite number, found {token:?}"))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64, d: i64) -> Rational {
        Rational::new(n.into(), d.into())
    }

    #[test]
    fn goodman_problem_shape() {
        let p = build_problem(3, 1, 2).unwrap();
        assert_eq!(p.types.len(), 1);
        assert_eq!(p.block_dims, vec![2]);
        assert_eq!(p.constraints.len(), 4);
        let rhs: Vec<_> = p.constraints.iter().map(|c| c.rhs.clone()).collect();
        assert_eq!(rhs, vec![r(1, 1), r(0, 1), r(0, 1), r(1, 1)]);
    }

    #[test]
    fn reduced_c4_problem_shape() {
        let p = build_problem(4, 1, 3).unwrap();
        assert_eq!(p.block_dims, vec![6]);
        assert_eq!(p.constraints.len(), 34);
    }

    #[test]
    fn invalid_sizes() {
        assert!(matches!(build_problem(3, 0, 2), Err(SdpError::InvalidSizes(_))));
        assert!(matches!(build_problem(3, 2, 2), Err(SdpError::InvalidSizes(_))));
        assert!(matches!(build_problem(5, 1, 2), Err(SdpError::InvalidSizes(_))));
        assert!(matches!(build_problem(4, 1, 6), Err(SdpError::InvalidSizes(_))));
    }

    #[test]
    fn goodman_export() {
        let p = build_problem(3, 1, 2).unwrap();
        let text = export_solver_format(&p);
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(&lines[..5], &["4", "2", "2 -5", "1 0 0 1", "0 2 5 5 1"]);
        // every constraint carries its own slack and the bound variable
        for k in 1..=4 {
            assert!(lines.contains(&format!("{k} 2 {k} {k} 1").as_str()));
            assert!(lines.contains(&format!("{k} 2 5 5 1").as_str()));
        }
        assert_eq!(text, export_solver_format(&p));
    }

    #[test]
    fn empty_problem_exports_header_only() {
        let p = SdpProblem {
            sizes: Sizes { t: 3, s: 1, l1: 2 },
            types: vec![],
            block_dims: vec![],
            constraints: vec![],
        };
        assert_eq!(export_solver_format(&p), "0\n0\n\n\n");
    }

    #[test]
    fn import_symmetrises() {
        let p = build_problem(3, 1, 2).unwrap();
        let sol = import_solution(&p, "objective 0.25\n1 1 1 1\n1 2 2 1\n").unwrap();
        assert_eq!(sol.matrices[0], Matrix::from_rows(vec![vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap());
        assert_eq!(sol.c_float, 0.25);

        let sol = import_solution(&p, "1 1 2 3\n1 2 1 1\n2 5 5 0.5\n").unwrap();
        assert_eq!(sol.matrices[0][(0, 1)], 2.0);
        assert_eq!(sol.matrices[0][(1, 0)], 2.0);
        assert_eq!(sol.c_float, 0.5);

        let sol = import_solution(&p, "objective 0\n1 1 2 -0.75\n").unwrap();
        assert_eq!(sol.matrices[0][(1, 0)], -0.75);
    }

    #[test]
    fn import_errors() {
        let p = build_problem(3, 1, 2).unwrap();
        assert!(matches!(import_solution(&p, "1 1 1 1\n"), Err(SdpError::MissingObjective)));
        assert!(matches!(
            import_solution(&p, "objective 1\n1 3 1 1\n"),
            Err(SdpError::EntryOutOfRange { .. })
        ));
        assert!(matches!(
            import_solution(&p, "objective 1\n3 1 1 1\n"),
            Err(SdpError::UnknownBlock { .. })
        ));
        assert!(matches!(
            import_solution(&p, "objective x\n"),
            Err(SdpError::Parse { line: 1, .. })
        ));
        assert!(matches!(import_solution(&p, "1 0 1 1\n"), Err(SdpError::Parse { .. })));
        assert!(matches!(import_solution(&p, "hello\n"), Err(SdpError::Parse { .. })));
    }

    #[test]
    fn constraint_slacks_match_tables() {
        let sizes = Sizes::new(4, 1, 3).unwrap();
        let types = enumerate_types(1).unwrap();
        let tables = Tables::build(sizes, &types).unwrap();
        let p = problem_from_tables(sizes, types, &tables);
        let m = Matrix::from_fn(6, |i, j| r((i * j) as i64 + 1, (i + j + 1) as i64));
        assert_eq!(p.slacks(std::slice::from_ref(&m)), tables.slacks(&[m]).unwrap());
    }
}
