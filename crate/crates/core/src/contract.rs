//! Direct evaluation of `f_σ` from the index-contraction definition.
//!
//! Pure:  `Σ ∏_l ψ[i₁ˡ…i_kˡ] · conj ψ[i₁^{σ₁(l)}…i_{k-1}^{σ_{k-1}(l)}, i_kˡ]`
//! Mixed: `Σ ∏_l ρ[i₁ˡ…i_kˡ ; i₁^{σ₁(l)}…i_k^{σ_k(l)}]`
//!
//! Two engines are provided. [`Strategy::IndexLoop`] walks every index
//! assignment and multiplies the `m` factors; it is the reference.
//! [`Strategy::Sequential`] folds one factor at a time into a dense tensor
//! over the indices that are still open, summing an index as soon as no
//! later factor needs it, so `ρ^{⊗m}` is never formed.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::perm::{enumerate_orbits, OrbitLabel, PermTuple};
use crate::states::{DensityMatrix, PureState, SubsystemSet, C64};

/// Upper bound on `(∏n_j)^m`, the number of index assignments.
pub const MAX_CONTRACTION_TERMS: u128 = 1 << 27;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Kind {
    Pure,
    Mixed,
}

impl Kind {
    /// Label arity for `k` subsystems.
    pub fn arity(self, k: usize) -> usize {
        match self {
            Kind::Pure => k.saturating_sub(1),
            Kind::Mixed => k,
        }
    }
}

impl std::str::FromStr for Kind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "pure" => Ok(Kind::Pure),
            "mixed" => Ok(Kind::Mixed),
            other => Err(Error::Parse(format!("unknown kind '{other}'"))),
        }
    }
}

impl std::fmt::Display for Kind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Kind::Pure => "pure",
            Kind::Mixed => "mixed",
        })
    }
}

/// One invariant polynomial `f_{[σ]≈}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct InvariantSpec {
    pub label: OrbitLabel,
    pub kind: Kind,
}

impl InvariantSpec {
    pub fn new(label: OrbitLabel, kind: Kind) -> Self {
        InvariantSpec { label, kind }
    }

    pub fn m(&self) -> usize {
        self.label.m()
    }

    pub fn r(&self) -> usize {
        self.label.r()
    }

    /// Number of subsystems the invariant acts on.
    pub fn k(&self) -> usize {
        match self.kind {
            Kind::Pure => self.r() + 1,
            Kind::Mixed => self.r(),
        }
    }

    /// Every label of grade `m` for `k` subsystems.
    pub fn all(m: usize, k: usize, kind: Kind) -> Result<Vec<InvariantSpec>> {
        Ok(enumerate_orbits(m, kind.arity(k))?
            .into_iter()
            .map(|label| InvariantSpec { label, kind })
            .collect())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Strategy {
    IndexLoop,
    #[default]
    Sequential,
}

struct Factor<'a> {
    data: &'a [C64],
    vars: Vec<usize>,
}

fn guard(total_dim: usize, m: usize) -> Result<()> {
    if m == 0 {
        return Err(Error::DimensionMismatch("grade must be at least 1".into()));
    }
    let terms = (total_dim as u128)
        .checked_pow(m as u32)
        .unwrap_or(u128::MAX);
    if terms > MAX_CONTRACTION_TERMS {
        return Err(Error::ResourceLimit {
            what: "index contraction",
            size: terms,
            limit: MAX_CONTRACTION_TERMS,
        });
    }
    Ok(())
}

fn row_major_strides(dims: &[usize]) -> Vec<usize> {
    let mut s = vec![1; dims.len()];
    for i in (0..dims.len().saturating_sub(1)).rev() {
        s[i] = s[i + 1] * dims[i + 1];
    }
    s
}

fn index_loop(var_dims: &[usize], factors: &[Factor]) -> C64 {
    let strides: Vec<Vec<(usize, usize)>> = factors
        .iter()
        .map(|f| {
            let dims: Vec<usize> = f.vars.iter().map(|&v| var_dims[v]).collect();
            f.vars
                .iter()
                .copied()
                .zip(row_major_strides(&dims))
                .collect()
        })
        .collect();
    let mut digits = vec![0usize; var_dims.len()];
    let mut total = C64::new(0.0, 0.0);
    loop {
        let mut term = C64::new(1.0, 0.0);
        for (f, st) in factors.iter().zip(&strides) {
            let idx: usize = st.iter().map(|&(v, s)| digits[v] * s).sum();
            term *= f.data[idx];
        }
        total += term;
        let mut d = var_dims.len();
        loop {
            if d == 0 {
                return total;
            }
            d -= 1;
            digits[d] += 1;
            if digits[d] < var_dims[d] {
                break;
            }
            digits[d] = 0;
        }
    }
}

fn sequential(var_dims: &[usize], factors: &[Factor]) -> C64 {
    let mut last_use = vec![0usize; var_dims.len()];
    for (fi, f) in factors.iter().enumerate() {
        for &v in &f.vars {
            last_use[v] = fi;
        }
    }
    let mut open: Vec<usize> = Vec::new();
    let mut cur = vec![C64::new(1.0, 0.0)];

    for (fi, f) in factors.iter().enumerate() {
        let mut union = open.clone();
        for &v in &f.vars {
            if !union.contains(&v) {
                union.push(v);
            }
        }
        let out_vars: Vec<usize> = union
            .iter()
            .copied()
            .filter(|&v| last_use[v] > fi)
            .collect();

        let stride_in = |vars: &[usize], v: usize| -> usize {
            let dims: Vec<usize> = vars.iter().map(|&x| var_dims[x]).collect();
            let st = row_major_strides(&dims);
            vars.iter()
                .zip(st)
                .filter(|(&x, _)| x == v)
                .map(|(_, s)| s)
                .sum()
        };
        let udims: Vec<usize> = union.iter().map(|&v| var_dims[v]).collect();
        let cs: Vec<usize> = union.iter().map(|&v| stride_in(&open, v)).collect();
        let fs: Vec<usize> = union.iter().map(|&v| stride_in(&f.vars, v)).collect();
        let os: Vec<usize> = union.iter().map(|&v| stride_in(&out_vars, v)).collect();

        let out_len: usize = out_vars.iter().map(|&v| var_dims[v]).product();
        let mut out = vec![C64::new(0.0, 0.0); out_len];
        let mut digits = vec![0usize; union.len()];
        let (mut ic, mut ifa, mut io) = (0usize, 0usize, 0usize);
        'odometer: loop {
            out[io] += cur[ic] * f.data[ifa];
            let mut d = union.len();
            loop {
                if d == 0 {
                    break 'odometer;
                }
                d -= 1;
                digits[d] += 1;
                ic += cs[d];
                ifa += fs[d];
                io += os[d];
                if digits[d] < udims[d] {
                    break;
                }
                ic -= cs[d] * udims[d];
                ifa -= fs[d] * udims[d];
                io -= os[d] * udims[d];
                digits[d] = 0;
            }
        }
        open = out_vars;
        cur = out;
    }
    cur[0]
}

fn run(strategy: Strategy, var_dims: &[usize], factors: &[Factor]) -> C64 {
    match strategy {
        Strategy::IndexLoop => index_loop(var_dims, factors),
        Strategy::Sequential => sequential(var_dims, factors),
    }
}

pub fn eval_pure(sigma: &PermTuple, psi: &PureState) -> Result<C64> {
    eval_pure_with(Strategy::default(), sigma, psi)
}

pub fn eval_mixed(sigma: &PermTuple, rho: &DensityMatrix) -> Result<C64> {
    eval_mixed_with(Strategy::default(), sigma, rho)
}

pub fn eval_pure_with(strategy: Strategy, sigma: &PermTuple, psi: &PureState) -> Result<C64> {
    let dims = psi.dims().as_slice();
    let k = dims.len();
    if k == 0 || sigma.r() != k - 1 {
        return Err(Error::ArityMismatch {
            expected: k.saturating_sub(1),
            got: sigma.r(),
        });
    }
    let m = sigma.m();
    guard(psi.dims().total(), m)?;

    // Variable (j, l) is i_jˡ.
    let var = |j: usize, l: usize| j * m + l;
    let var_dims: Vec<usize> = (0..k * m).map(|v| dims[v / m]).collect();
    let conj: Vec<C64> = psi.amplitudes().iter().map(|a| a.conj()).collect();
    let mut factors = Vec::with_capacity(2 * m);
    for l in 0..m {
        factors.push(Factor {
            data: psi.amplitudes(),
            vars: (0..k).map(|j| var(j, l)).collect(),
        });
        let mut vars: Vec<usize> = (0..k - 1).map(|j| var(j, sigma.get(j).apply(l))).collect();
        vars.push(var(k - 1, l));
        factors.push(Factor { data: &conj, vars });
    }
    Ok(run(strategy, &var_dims, &factors))
}

pub fn eval_mixed_with(strategy: Strategy, sigma: &PermTuple, rho: &DensityMatrix) -> Result<C64> {
    let dims = rho.dims().as_slice();
    let k = dims.len();
    if sigma.r() != k {
        return Err(Error::ArityMismatch {
            expected: k,
            got: sigma.r(),
        });
    }
    let m = sigma.m();
    guard(rho.dims().total(), m)?;

    let var = |j: usize, l: usize| j * m + l;
    let var_dims: Vec<usize> = (0..k * m).map(|v| dims[v / m]).collect();
    // nalgebra is column-major; the transpose's storage is ρ row-major.
    let row_major = rho.matrix().transpose();
    let data = row_major.as_slice();
    let factors: Vec<Factor> = (0..m)
        .map(|l| {
            let rows = (0..k).map(|j| var(j, l));
            let cols = (0..k).map(|j| var(j, sigma.get(j).apply(l)));
            Factor {
                data,
                vars: rows.chain(cols).collect(),
            }
        })
        .collect();
    Ok(run(strategy, &var_dims, &factors))
}

/// Pure value through the reduced state `Tr_k |ψ⟩⟨ψ|`.
pub fn eval_pure_via_mixed(sigma: &PermTuple, psi: &PureState) -> Result<C64> {
    let k = psi.dims().k();
    if k == 0 || sigma.r() != k - 1 {
        return Err(Error::ArityMismatch {
            expected: k.saturating_sub(1),
            got: sigma.r(),
        });
    }
    let reduced = psi
        .projector()
        .partial_trace(&SubsystemSet::new(vec![k - 1], k)?)?;
    eval_mixed(sigma, &reduced)
}

/// The three routes of the pure/mixed correspondence:
/// `[f_σ(ψ), f_{(σ,e)}(|ψ⟩⟨ψ|), f_σ(Tr_k |ψ⟩⟨ψ|)]`.
pub fn purmix_triple(sigma: &PermTuple, psi: &PureState) -> Result<[C64; 3]> {
    let direct = eval_pure(sigma, psi)?;
    let on_projector = eval_mixed(&sigma.with_identity_appended(), &psi.projector())?;
    let on_reduced = eval_pure_via_mixed(sigma, psi)?;
    Ok([direct, on_projector, on_reduced])
}

/// `|Im z| / |z|`, zero for `z = 0`.
pub fn imaginary_residue(z: C64) -> f64 {
    if z.norm() == 0.0 {
        0.0
    } else {
        z.im.abs() / z.norm()
    }
}

/// `|a - b| / max(|a|, |b|)`, zero when both vanish.
pub fn relative_error(a: C64, b: C64) -> f64 {
    let scale = a.norm().max(b.norm());
    if scale == 0.0 {
        0.0
    } else {
        (a - b).norm() / scale
    }
}
