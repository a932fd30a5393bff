//! Index-free formula descriptors built from partial trace, partial
//! transpose, identity padding, tensor product, matrix product and trace.
//!
//! Grammar (subsystem indices are one-based):
//!
//! ```text
//! formula := term ('*' term)*
//! term    := 'Tr(' mat ')' ['^' int]
//! mat     := kron ('*' kron)*
//! kron    := power ('(x)' power)*
//! power   := atom ['^' int]
//! atom    := 'rho' | 'pi' | 'I[' set ']' | 'tr[' set '](' mat ')'
//!          | 'T[' set '](' mat ')' | '(' mat ')'
//! set     := int (',' int)*
//! ```
//!
//! `rho`/`pi` is the operator the formula is evaluated on (`pi` marks a
//! pure-state writing, evaluated on `|ψ⟩⟨ψ|`). Every sub-expression lives on
//! a set of original subsystems: `tr[A]` removes `A`, `I[A] (x) X` adds `A`,
//! and `*` needs both sides on the same set. Example:
//! `Tr((I[1] (x) tr[1](rho)) * rho^2)`.

use std::fmt;

use crate::contract::Kind;
use crate::error::{Error, Result};
use crate::states::{kron_interleaved, DensityMatrix, Dims, PureState, SubsystemSet, C64};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum MatExpr {
    State,
    /// Zero-based subsystem labels.
    Identity(Vec<usize>),
    PartialTrace(Vec<usize>, Box<MatExpr>),
    PartialTranspose(Vec<usize>, Box<MatExpr>),
    Kron(Vec<MatExpr>),
    Product(Vec<MatExpr>),
    Power(Box<MatExpr>, u32),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Formula {
    pub kind: Kind,
    /// `∏ Tr(X)^p`.
    pub terms: Vec<(MatExpr, u32)>,
}

impl MatExpr {
    pub fn ptrace(set: Vec<usize>, inner: MatExpr) -> MatExpr {
        if set.is_empty() {
            inner
        } else {
            MatExpr::PartialTrace(set, Box::new(inner))
        }
    }

    pub fn ptranspose(set: Vec<usize>, inner: MatExpr) -> MatExpr {
        if set.is_empty() {
            inner
        } else {
            MatExpr::PartialTranspose(set, Box::new(inner))
        }
    }

    /// `I[set] (x) inner`, or `inner` alone for an empty set.
    pub fn pad(set: Vec<usize>, inner: MatExpr) -> MatExpr {
        if set.is_empty() {
            inner
        } else {
            MatExpr::Kron(vec![MatExpr::Identity(set), inner])
        }
    }
}

/// An evaluated sub-expression: an operator on the listed original subsystems.
struct Placed {
    labels: Vec<usize>,
    op: DensityMatrix,
}

fn positions(within: &[usize], set: &[usize]) -> Result<Vec<usize>> {
    set.iter()
        .map(|j| {
            within.iter().position(|x| x == j).ok_or_else(|| {
                Error::DimensionMismatch(format!(
                    "subsystem {} is not present in this operand",
                    j + 1
                ))
            })
        })
        .collect()
}

fn eval_mat(expr: &MatExpr, state: &DensityMatrix, full: &Dims) -> Result<Placed> {
    match expr {
        MatExpr::State => Ok(Placed {
            labels: (0..full.k()).collect(),
            op: state.clone(),
        }),
        MatExpr::Identity(set) => {
            let s = SubsystemSet::new(set.clone(), full.k())?;
            Ok(Placed {
                labels: s.as_slice().to_vec(),
                op: DensityMatrix::identity(full.restrict(&s)),
            })
        }
        MatExpr::PartialTrace(set, inner) => {
            let x = eval_mat(inner, state, full)?;
            let pos = positions(&x.labels, set)?;
            let op =
                x.op.partial_trace(&SubsystemSet::new(pos, x.labels.len())?)?;
            Ok(Placed {
                labels: x.labels.into_iter().filter(|j| !set.contains(j)).collect(),
                op,
            })
        }
        MatExpr::PartialTranspose(set, inner) => {
            let x = eval_mat(inner, state, full)?;
            let pos = positions(&x.labels, set)?;
            let op =
                x.op.partial_transpose(&SubsystemSet::new(pos, x.labels.len())?)?;
            Ok(Placed {
                labels: x.labels,
                op,
            })
        }
        MatExpr::Kron(parts) => {
            let mut acc: Option<Placed> = None;
            for part in parts {
                let y = eval_mat(part, state, full)?;
                acc = Some(match acc {
                    None => y,
                    Some(x) => kron_placed(x, y, full)?,
                });
            }
            acc.ok_or_else(|| Error::Parse("empty tensor product".into()))
        }
        MatExpr::Product(parts) => {
            let mut acc: Option<Placed> = None;
            for part in parts {
                let y = eval_mat(part, state, full)?;
                acc = Some(match acc {
                    None => y,
                    Some(x) => {
                        if x.labels != y.labels {
                            return Err(Error::DimensionMismatch(format!(
                                "product of operators on {:?} and {:?}",
                                one_based(&x.labels),
                                one_based(&y.labels)
                            )));
                        }
                        Placed {
                            op: x.op.matmul(&y.op)?,
                            labels: x.labels,
                        }
                    }
                });
            }
            acc.ok_or_else(|| Error::Parse("empty product".into()))
        }
        MatExpr::Power(inner, p) => {
            let x = eval_mat(inner, state, full)?;
            Ok(Placed {
                op: x.op.pow(*p),
                labels: x.labels,
            })
        }
    }
}

fn kron_placed(x: Placed, y: Placed, full: &Dims) -> Result<Placed> {
    if x.labels.iter().any(|j| y.labels.contains(j)) {
        return Err(Error::DimensionMismatch(format!(
            "tensor product of overlapping subsystem sets {:?} and {:?}",
            one_based(&x.labels),
            one_based(&y.labels)
        )));
    }
    let mut labels: Vec<usize> = x.labels.iter().chain(&y.labels).copied().collect();
    labels.sort_unstable();
    let joint = Dims::unchecked(labels.iter().map(|&j| full.as_slice()[j]).collect());
    let xpos = positions(&labels, &x.labels)?;
    let op = kron_interleaved(
        &x.op,
        &y.op,
        &SubsystemSet::new(xpos, labels.len())?,
        &joint,
    )?;
    Ok(Placed { labels, op })
}

fn one_based(v: &[usize]) -> Vec<usize> {
    v.iter().map(|j| j + 1).collect()
}

impl Formula {
    /// Evaluates on an operator over the full space.
    pub fn eval(&self, state: &DensityMatrix) -> Result<C64> {
        let mut value = C64::new(1.0, 0.0);
        for (expr, p) in &self.terms {
            let x = eval_mat(expr, state, state.dims())?;
            value *= x.op.trace().powu(*p);
        }
        Ok(value)
    }

    pub fn eval_pure(&self, psi: &PureState) -> Result<C64> {
        self.eval(&psi.projector())
    }

    pub fn parse(text: &str) -> Result<Formula> {
        let mut p = Parser {
            s: text.as_bytes(),
            i: 0,
            kind: None,
        };
        let mut terms = Vec::new();
        loop {
            p.ws();
            p.expect("Tr(")?;
            let mat = p.mat()?;
            p.expect(")")?;
            let pow = p.opt_power()?;
            terms.push((mat, pow));
            p.ws();
            if p.eat("*") {
                continue;
            }
            break;
        }
        p.ws();
        if p.i != p.s.len() {
            return Err(p.err("trailing input"));
        }
        Ok(Formula {
            kind: p.kind.unwrap_or(Kind::Mixed),
            terms,
        })
    }
}

struct Parser<'a> {
    s: &'a [u8],
    i: usize,
    kind: Option<Kind>,
}

impl Parser<'_> {
    fn err(&self, what: &str) -> Error {
        Error::Parse(format!(
            "formula: {what} at offset {} in '{}'",
            self.i,
            String::from_utf8_lossy(self.s)
        ))
    }

    fn ws(&mut self) {
        while self.i < self.s.len() && self.s[self.i].is_ascii_whitespace() {
            self.i += 1;
        }
    }

    fn eat(&mut self, tok: &str) -> bool {
        self.ws();
        if self.s[self.i..].starts_with(tok.as_bytes()) {
            self.i += tok.len();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, tok: &str) -> Result<()> {
        if self.eat(tok) {
            Ok(())
        } else {
            Err(self.err(&format!("expected '{tok}'")))
        }
    }

    fn int(&mut self) -> Result<usize> {
        self.ws();
        let start = self.i;
        while self.i < self.s.len() && self.s[self.i].is_ascii_digit() {
            self.i += 1;
        }
        std::str::from_utf8(&self.s[start..self.i])
            .unwrap()
            .parse()
            .map_err(|_| self.err("expected an integer"))
    }

    fn opt_power(&mut self) -> Result<u32> {
        if self.eat("^") {
            Ok(self.int()? as u32)
        } else {
            Ok(1)
        }
    }

    fn set(&mut self) -> Result<Vec<usize>> {
        let mut out = Vec::new();
        loop {
            let j = self.int()?;
            if j == 0 {
                return Err(self.err("subsystem indices are one-based"));
            }
            out.push(j - 1);
            if !self.eat(",") {
                break;
            }
        }
        self.expect("]")?;
        out.sort_unstable();
        out.dedup();
        Ok(out)
    }

    fn mat(&mut self) -> Result<MatExpr> {
        let mut parts = vec![self.kron()?];
        while self.eat("*") {
            parts.push(self.kron()?);
        }
        Ok(if parts.len() == 1 {
            parts.pop().unwrap()
        } else {
            MatExpr::Product(parts)
        })
    }

    fn kron(&mut self) -> Result<MatExpr> {
        let mut parts = vec![self.power()?];
        while self.eat("(x)") {
            parts.push(self.power()?);
        }
        Ok(if parts.len() == 1 {
            parts.pop().unwrap()
        } else {
            MatExpr::Kron(parts)
        })
    }

    fn power(&mut self) -> Result<MatExpr> {
        let atom = self.atom()?;
        let p = self.opt_power()?;
        Ok(if p == 1 {
            atom
        } else {
            MatExpr::Power(Box::new(atom), p)
        })
    }

    fn atom(&mut self) -> Result<MatExpr> {
        self.ws();
        if self.eat("rho") {
            self.kind.get_or_insert(Kind::Mixed);
            Ok(MatExpr::State)
        } else if self.eat("pi") {
            self.kind.get_or_insert(Kind::Pure);
            Ok(MatExpr::State)
        } else if self.eat("I[") {
            Ok(MatExpr::Identity(self.set()?))
        } else if self.eat("tr[") {
            let set = self.set()?;
            self.expect("(")?;
            let inner = self.mat()?;
            self.expect(")")?;
            Ok(MatExpr::PartialTrace(set, Box::new(inner)))
        } else if self.eat("T[") {
            let set = self.set()?;
            self.expect("(")?;
            let inner = self.mat()?;
            self.expect(")")?;
            Ok(MatExpr::PartialTranspose(set, Box::new(inner)))
        } else if self.eat("(") {
            let inner = self.mat()?;
            self.expect(")")?;
            Ok(inner)
        } else {
            Err(self.err("expected an operand"))
        }
    }
}

fn write_set(f: &mut fmt::Formatter<'_>, set: &[usize]) -> fmt::Result {
    let parts: Vec<String> = set.iter().map(|j| (j + 1).to_string()).collect();
    f.write_str(&parts.join(","))
}

struct Show<'a>(&'a MatExpr, Kind);

impl fmt::Display for Show<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let kind = self.1;
        let wrap = |f: &mut fmt::Formatter<'_>, e: &MatExpr, paren: bool| {
            if paren {
                write!(f, "({})", Show(e, kind))
            } else {
                write!(f, "{}", Show(e, kind))
            }
        };
        match self.0 {
            MatExpr::State => f.write_str(if kind == Kind::Pure { "pi" } else { "rho" }),
            MatExpr::Identity(set) => {
                f.write_str("I[")?;
                write_set(f, set)?;
                f.write_str("]")
            }
            MatExpr::PartialTrace(set, inner) => {
                f.write_str("tr[")?;
                write_set(f, set)?;
                write!(f, "]({})", Show(inner, kind))
            }
            MatExpr::PartialTranspose(set, inner) => {
                f.write_str("T[")?;
                write_set(f, set)?;
                write!(f, "]({})", Show(inner, kind))
            }
            MatExpr::Kron(parts) => {
                for (i, p) in parts.iter().enumerate() {
                    if i > 0 {
                        f.write_str(" (x) ")?;
                    }
                    wrap(f, p, matches!(p, MatExpr::Product(_) | MatExpr::Kron(_)))?;
                }
                Ok(())
            }
            MatExpr::Product(parts) => {
                for (i, p) in parts.iter().enumerate() {
                    if i > 0 {
                        f.write_str(" * ")?;
                    }
                    wrap(f, p, matches!(p, MatExpr::Product(_) | MatExpr::Kron(_)))?;
                }
                Ok(())
            }
            MatExpr::Power(inner, p) => {
                wrap(
                    f,
                    inner,
                    matches!(
                        **inner,
                        MatExpr::Product(_) | MatExpr::Kron(_) | MatExpr::Power(..)
                    ),
                )?;
                write!(f, "^{p}")
            }
        }
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, (expr, p)) in self.terms.iter().enumerate() {
            if i > 0 {
                f.write_str(" * ")?;
            }
            write!(f, "Tr({})", Show(expr, self.kind))?;
            if *p != 1 {
                write!(f, "^{p}")?;
            }
        }
        Ok(())
    }
}
