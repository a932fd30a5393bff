//! Dense pure states and density matrices on a product space.
//!
//! Layout: a flat index over dims `(n₁,…,n_k)` is row-major with `i₁`
//! slowest. A density matrix is a square `∏n_j × ∏n_j` matrix whose row and
//! column indices both use that layout. Subsystem indices in this API are
//! zero-based.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};

pub mod io;

pub type C64 = Complex64;
pub type CMatrix = DMatrix<C64>;

/// Default bound on the total dimension `∏n_j`.
pub const DEFAULT_MAX_TOTAL_DIM: usize = 4096;

/// Documented PRNG for every sampler in the crate.
pub type StateRng = ChaCha8Rng;

pub fn rng_from_seed(seed: u64) -> StateRng {
    ChaCha8Rng::seed_from_u64(seed)
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Dims(Vec<usize>);

impl Dims {
    pub fn new(dims: Vec<usize>) -> Result<Self> {
        Self::with_limit(dims, DEFAULT_MAX_TOTAL_DIM)
    }

    pub fn with_limit(dims: Vec<usize>, limit: usize) -> Result<Self> {
        if dims.contains(&0) {
            return Err(Error::DimensionMismatch(format!(
                "local dimensions must be positive, got {dims:?}"
            )));
        }
        let total = dims
            .iter()
            .try_fold(1u128, |acc, &n| acc.checked_mul(n as u128))
            .unwrap_or(u128::MAX);
        if total > limit as u128 {
            return Err(Error::ResourceLimit {
                what: "total state dimension",
                size: total,
                limit: limit as u128,
            });
        }
        Ok(Dims(dims))
    }

    /// Skips the size guard; used for dims derived from already-admitted ones.
    pub(crate) fn unchecked(dims: Vec<usize>) -> Self {
        Dims(dims)
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    pub fn k(&self) -> usize {
        self.0.len()
    }

    pub fn total(&self) -> usize {
        self.0.iter().product()
    }

    pub fn strides(&self) -> Vec<usize> {
        let mut strides = vec![1; self.k()];
        for j in (0..self.k().saturating_sub(1)).rev() {
            strides[j] = strides[j + 1] * self.0[j + 1];
        }
        strides
    }

    pub fn restrict(&self, set: &SubsystemSet) -> Dims {
        Dims(set.iter().map(|j| self.0[j]).collect())
    }

    /// `self` followed by one more factor.
    pub fn extended(&self, n: usize) -> Dims {
        let mut d = self.0.clone();
        d.push(n);
        Dims(d)
    }
}

/// A sorted set of zero-based subsystem indices.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct SubsystemSet(Vec<usize>);

impl SubsystemSet {
    pub fn empty() -> Self {
        SubsystemSet(Vec::new())
    }

    pub fn new(mut indices: Vec<usize>, k: usize) -> Result<Self> {
        if let Some(&bad) = indices.iter().find(|&&j| j >= k) {
            return Err(Error::SubsystemOutOfRange { index: bad, k });
        }
        indices.sort_unstable();
        indices.dedup();
        Ok(SubsystemSet(indices))
    }

    pub fn all(k: usize) -> Self {
        SubsystemSet((0..k).collect())
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().copied()
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, j: usize) -> bool {
        self.0.binary_search(&j).is_ok()
    }

    pub fn complement(&self, k: usize) -> SubsystemSet {
        SubsystemSet((0..k).filter(|j| !self.contains(*j)).collect())
    }

    pub fn union(&self, other: &SubsystemSet) -> SubsystemSet {
        let mut v: Vec<usize> = self.0.iter().chain(other.0.iter()).copied().collect();
        v.sort_unstable();
        v.dedup();
        SubsystemSet(v)
    }

    fn check(&self, k: usize) -> Result<()> {
        match self.0.last() {
            Some(&j) if j >= k => Err(Error::SubsystemOutOfRange { index: j, k }),
            _ => Ok(()),
        }
    }
}

/// For every flat index over `dims`, the flat index of its digits on the
/// subsystems in `keep` (row-major over `keep` in order).
fn sub_index_map(dims: &Dims, keep: &[usize]) -> Vec<usize> {
    let full_strides = dims.strides();
    let mut sub_strides = vec![0usize; dims.k()];
    let mut acc = 1;
    for &j in keep.iter().rev() {
        sub_strides[j] = acc;
        acc *= dims.0[j];
    }
    (0..dims.total())
        .map(|flat| {
            (0..dims.k())
                .map(|j| (flat / full_strides[j]) % dims.0[j] * sub_strides[j])
                .sum()
        })
        .collect()
}

/// Flat indices grouped by their digits on `set`.
fn buckets(dims: &Dims, set: &SubsystemSet) -> Vec<Vec<usize>> {
    let map = sub_index_map(dims, set.as_slice());
    let count = dims.restrict(set).total();
    let mut out = vec![Vec::new(); count];
    for (flat, &b) in map.iter().enumerate() {
        out[b].push(flat);
    }
    out
}

#[derive(Clone, Debug, PartialEq)]
pub struct PureState {
    dims: Dims,
    amps: Vec<C64>,
}

impl PureState {
    pub fn new(dims: Dims, amps: Vec<C64>) -> Result<Self> {
        if amps.len() != dims.total() {
            return Err(Error::DimensionMismatch(format!(
                "{} amplitudes for dims {:?}",
                amps.len(),
                dims.as_slice()
            )));
        }
        Ok(PureState { dims, amps })
    }

    pub fn from_real(dims: Dims, amps: &[f64]) -> Result<Self> {
        Self::new(dims, amps.iter().map(|&x| C64::new(x, 0.0)).collect())
    }

    pub fn dims(&self) -> &Dims {
        &self.dims
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn scaled(&self, c: C64) -> PureState {
        PureState {
            dims: self.dims.clone(),
            amps: self.amps.iter().map(|a| a * c).collect(),
        }
    }

    pub fn normalized(&self) -> PureState {
        let n = self.norm_sqr().sqrt();
        self.scaled(C64::new(1.0 / n, 0.0))
    }

    pub fn random<R: Rng + ?Sized>(dims: &Dims, rng: &mut R) -> PureState {
        PureState {
            dims: dims.clone(),
            amps: (0..dims.total()).map(|_| complex_gaussian(rng)).collect(),
        }
    }

    /// `|ψ⟩⟨ψ|`.
    pub fn projector(&self) -> DensityMatrix {
        let n = self.amps.len();
        let mat = CMatrix::from_fn(n, n, |i, j| self.amps[i] * self.amps[j].conj());
        DensityMatrix {
            dims: self.dims.clone(),
            mat,
        }
    }

    pub fn apply_local_unitaries(&self, us: &[CMatrix]) -> Result<PureState> {
        check_unitary_shapes(&self.dims, us)?;
        let mut amps = self.amps.clone();
        for (j, u) in us.iter().enumerate() {
            apply_on_factor(&mut amps, &self.dims, j, u);
        }
        Ok(PureState {
            dims: self.dims.clone(),
            amps,
        })
    }
}

pub fn projector(psi: &PureState) -> DensityMatrix {
    psi.projector()
}

#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    dims: Dims,
    mat: CMatrix,
}

impl DensityMatrix {
    /// Accepts any square matrix of the right order; Hermiticity is checked
    /// separately with [`DensityMatrix::hermitian_deviation`].
    pub fn new(dims: Dims, mat: CMatrix) -> Result<Self> {
        let n = dims.total();
        if mat.nrows() != n || mat.ncols() != n {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} matrix for dims {:?}",
                mat.nrows(),
                mat.ncols(),
                dims.as_slice()
            )));
        }
        Ok(DensityMatrix { dims, mat })
    }

    pub fn identity(dims: Dims) -> Self {
        let n = dims.total();
        DensityMatrix {
            dims,
            mat: CMatrix::identity(n, n),
        }
    }

    pub fn scalar(value: C64) -> Self {
        DensityMatrix {
            dims: Dims(Vec::new()),
            mat: CMatrix::from_element(1, 1, value),
        }
    }

    pub fn dims(&self) -> &Dims {
        &self.dims
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.mat
    }

    pub fn into_matrix(self) -> CMatrix {
        self.mat
    }

    pub fn trace(&self) -> C64 {
        self.mat.trace()
    }

    pub fn max_abs(&self) -> f64 {
        self.mat.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// `max |ρ - ρ†|` over entries.
    pub fn hermitian_deviation(&self) -> f64 {
        let n = self.mat.nrows();
        let mut dev: f64 = 0.0;
        for i in 0..n {
            for j in i..n {
                dev = dev.max((self.mat[(i, j)] - self.mat[(j, i)].conj()).norm());
            }
        }
        dev
    }

    pub fn scaled(&self, c: C64) -> DensityMatrix {
        DensityMatrix {
            dims: self.dims.clone(),
            mat: &self.mat * c,
        }
    }

    pub fn add(&self, other: &DensityMatrix) -> Result<DensityMatrix> {
        self.same_dims(other)?;
        Ok(DensityMatrix {
            dims: self.dims.clone(),
            mat: &self.mat + &other.mat,
        })
    }

    pub fn matmul(&self, other: &DensityMatrix) -> Result<DensityMatrix> {
        self.same_dims(other)?;
        Ok(DensityMatrix {
            dims: self.dims.clone(),
            mat: &self.mat * &other.mat,
        })
    }

    pub fn pow(&self, exp: u32) -> DensityMatrix {
        let n = self.mat.nrows();
        let mut acc = CMatrix::identity(n, n);
        for _ in 0..exp {
            acc = &acc * &self.mat;
        }
        DensityMatrix {
            dims: self.dims.clone(),
            mat: acc,
        }
    }

    fn same_dims(&self, other: &DensityMatrix) -> Result<()> {
        if self.dims != other.dims {
            return Err(Error::DimensionMismatch(format!(
                "{:?} vs {:?}",
                self.dims.as_slice(),
                other.dims.as_slice()
            )));
        }
        Ok(())
    }

    /// `A·A†` with a Gaussian `A` of shape `∏n_j × rank`.
    pub fn random<R: Rng + ?Sized>(dims: &Dims, rank: usize, rng: &mut R) -> DensityMatrix {
        let n = dims.total();
        let a = CMatrix::from_fn(n, rank, |_, _| complex_gaussian(rng));
        DensityMatrix {
            dims: dims.clone(),
            mat: &a * a.adjoint(),
        }
    }

    /// `(A + A†)/2` with Gaussian `A`; Hermitian but not positive.
    pub fn random_hermitian<R: Rng + ?Sized>(dims: &Dims, rng: &mut R) -> DensityMatrix {
        let n = dims.total();
        let a = CMatrix::from_fn(n, n, |_, _| complex_gaussian(rng));
        DensityMatrix {
            dims: dims.clone(),
            mat: (&a + a.adjoint()) * C64::new(0.5, 0.0),
        }
    }

    pub fn partial_trace(&self, traced: &SubsystemSet) -> Result<DensityMatrix> {
        traced.check(self.dims.k())?;
        let kept = traced.complement(self.dims.k());
        let keep_map = sub_index_map(&self.dims, kept.as_slice());
        let out_dims = self.dims.restrict(&kept);
        let n = out_dims.total();
        let mut out = CMatrix::zeros(n, n);
        for bucket in buckets(&self.dims, traced) {
            for &i in &bucket {
                for &j in &bucket {
                    out[(keep_map[i], keep_map[j])] += self.mat[(i, j)];
                }
            }
        }
        Ok(DensityMatrix {
            dims: out_dims,
            mat: out,
        })
    }

    pub fn partial_transpose(&self, set: &SubsystemSet) -> Result<DensityMatrix> {
        set.check(self.dims.k())?;
        let strides = self.dims.strides();
        let part: Vec<usize> = (0..self.dims.total())
            .map(|flat| {
                set.iter()
                    .map(|j| (flat / strides[j]) % self.dims.0[j] * strides[j])
                    .sum()
            })
            .collect();
        let n = self.mat.nrows();
        let mut out = CMatrix::zeros(n, n);
        for i in 0..n {
            let ri = i - part[i];
            for j in 0..n {
                let rj = j - part[j];
                out[(ri + part[j], rj + part[i])] = self.mat[(i, j)];
            }
        }
        Ok(DensityMatrix {
            dims: self.dims.clone(),
            mat: out,
        })
    }

    /// `𝕀` on `id_set` tensored with `self` on the remaining subsystems of
    /// `full_dims`, factors kept in subsystem order.
    pub fn tensor_with_identity(
        &self,
        id_set: &SubsystemSet,
        full_dims: &Dims,
    ) -> Result<DensityMatrix> {
        id_set.check(full_dims.k())?;
        let rest = id_set.complement(full_dims.k());
        if full_dims.restrict(&rest) != self.dims {
            return Err(Error::DimensionMismatch(format!(
                "operator dims {:?} do not fit {:?} with identity on {:?}",
                self.dims.as_slice(),
                full_dims.as_slice(),
                id_set.as_slice()
            )));
        }
        let identity = DensityMatrix::identity(full_dims.restrict(id_set));
        kron_interleaved(&identity, self, id_set, full_dims)
    }

    pub fn conjugate_by_local_unitaries(&self, us: &[CMatrix]) -> Result<DensityMatrix> {
        check_unitary_shapes(&self.dims, us)?;
        let apply_all = |m: &CMatrix| {
            let mut out = m.clone();
            for mut col in out.column_iter_mut() {
                let mut v: Vec<C64> = col.iter().copied().collect();
                for (j, u) in us.iter().enumerate() {
                    apply_on_factor(&mut v, &self.dims, j, u);
                }
                col.copy_from_slice(&v);
            }
            out
        };
        // U ρ U† = (U (U ρ)†)†
        let left = apply_all(&self.mat);
        let both = apply_all(&left.adjoint()).adjoint();
        Ok(DensityMatrix {
            dims: self.dims.clone(),
            mat: both,
        })
    }

    /// A pure state on `(n₁,…,n_k, rank ρ)` whose reduction to the first `k`
    /// factors is `self`: `φ = Σ √λ_i |v_i⟩|i⟩`.
    pub fn purify(&self) -> Result<PureState> {
        let scale = self.mat.norm().max(f64::MIN_POSITIVE);
        let herm = self.hermitian_deviation();
        if herm > 1e-10 * scale {
            return Err(Error::NotHermitian(herm));
        }
        let sym = (&self.mat + self.mat.adjoint()) * C64::new(0.5, 0.0);
        let eig = sym.symmetric_eigen();
        let min = eig
            .eigenvalues
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min);
        if min < -1e-9 * scale {
            return Err(Error::NotPsd(min));
        }
        let max = eig.eigenvalues.iter().copied().fold(0.0, f64::max);
        let kept: Vec<usize> = (0..eig.eigenvalues.len())
            .filter(|&i| eig.eigenvalues[i] > 1e-13 * max)
            .collect();
        let rank = kept.len().max(1);
        let n = self.mat.nrows();
        let mut amps = vec![C64::new(0.0, 0.0); n * rank];
        for (slot, &i) in kept.iter().enumerate() {
            let w = eig.eigenvalues[i].sqrt();
            for row in 0..n {
                amps[row * rank + slot] = eig.eigenvectors[(row, i)] * w;
            }
        }
        Ok(PureState {
            dims: self.dims.extended(rank),
            amps,
        })
    }
}

/// `a` placed on subsystems `a_positions` of `full_dims`, `b` on the rest.
pub fn kron_interleaved(
    a: &DensityMatrix,
    b: &DensityMatrix,
    a_positions: &SubsystemSet,
    full_dims: &Dims,
) -> Result<DensityMatrix> {
    a_positions.check(full_dims.k())?;
    let b_positions = a_positions.complement(full_dims.k());
    if full_dims.restrict(a_positions) != a.dims || full_dims.restrict(&b_positions) != b.dims {
        return Err(Error::DimensionMismatch(format!(
            "factors {:?} and {:?} do not fit {:?}",
            a.dims.as_slice(),
            b.dims.as_slice(),
            full_dims.as_slice()
        )));
    }
    let amap = sub_index_map(full_dims, a_positions.as_slice());
    let bmap = sub_index_map(full_dims, b_positions.as_slice());
    let n = full_dims.total();
    let mat = CMatrix::from_fn(n, n, |i, j| {
        a.mat[(amap[i], amap[j])] * b.mat[(bmap[i], bmap[j])]
    });
    Ok(DensityMatrix {
        dims: full_dims.clone(),
        mat,
    })
}

fn check_unitary_shapes(dims: &Dims, us: &[CMatrix]) -> Result<()> {
    if us.len() != dims.k() {
        return Err(Error::DimensionMismatch(format!(
            "{} unitaries for {} subsystems",
            us.len(),
            dims.k()
        )));
    }
    for (j, u) in us.iter().enumerate() {
        if u.nrows() != dims.0[j] || u.ncols() != dims.0[j] {
            return Err(Error::DimensionMismatch(format!(
                "unitary {j} is {}x{}, subsystem has dimension {}",
                u.nrows(),
                u.ncols(),
                dims.0[j]
            )));
        }
    }
    Ok(())
}

/// In-place `(𝕀 ⊗ U ⊗ 𝕀) v` with `U` on factor `j`.
fn apply_on_factor(v: &mut [C64], dims: &Dims, j: usize, u: &CMatrix) {
    let n = dims.0[j];
    let right: usize = dims.0[j + 1..].iter().product();
    let left: usize = dims.0[..j].iter().product();
    let mut buf = vec![C64::new(0.0, 0.0); n];
    for a in 0..left {
        for b in 0..right {
            let base = a * n * right + b;
            for (x, slot) in buf.iter_mut().enumerate() {
                *slot = (0..n).map(|y| u[(x, y)] * v[base + y * right]).sum();
            }
            for (x, val) in buf.iter().enumerate() {
                v[base + x * right] = *val;
            }
        }
    }
}

/// Standard complex normal: real and imaginary parts `N(0, 1/2)`.
pub fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    let re: f64 = StandardNormal.sample(rng);
    let im: f64 = StandardNormal.sample(rng);
    C64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

/// Haar unitary via QR of a Ginibre matrix with the phases of `diag(R)`
/// moved into `Q`.
pub fn haar_unitary<R: Rng + ?Sized>(n: usize, rng: &mut R) -> CMatrix {
    let z = CMatrix::from_fn(n, n, |_, _| complex_gaussian(rng));
    let qr = z.qr();
    let (mut q, r) = (qr.q(), qr.r());
    for i in 0..n {
        let d = r[(i, i)];
        let phase = if d.norm() > 0.0 {
            d / d.norm()
        } else {
            C64::new(1.0, 0.0)
        };
        for row in 0..n {
            q[(row, i)] *= phase;
        }
    }
    q
}

pub fn random_pure(dims: &Dims, seed: u64) -> PureState {
    PureState::random(dims, &mut rng_from_seed(seed))
}

pub fn random_density(dims: &Dims, seed: u64, rank: usize) -> Result<DensityMatrix> {
    if rank == 0 {
        return Err(Error::DimensionMismatch("rank must be at least 1".into()));
    }
    Ok(DensityMatrix::random(dims, rank, &mut rng_from_seed(seed)))
}

pub fn random_local_unitaries(dims: &Dims, seed: u64) -> Vec<CMatrix> {
    let mut rng = rng_from_seed(seed);
    local_unitaries_from(dims, &mut rng)
}

pub fn local_unitaries_from<R: Rng + ?Sized>(dims: &Dims, rng: &mut R) -> Vec<CMatrix> {
    dims.as_slice()
        .iter()
        .map(|&n| haar_unitary(n, rng))
        .collect()
}

/// GHZ-type vector `(1,0,…,0,1)` (unnormalized) on `k` subsystems of dimension `n`:
/// `Σ_i |i,i,…,i⟩`.
pub fn ghz(k: usize, n: usize) -> Result<PureState> {
    let dims = Dims::new(vec![n; k])?;
    let strides = dims.strides();
    let mut amps = vec![C64::new(0.0, 0.0); dims.total()];
    for i in 0..n {
        amps[strides.iter().map(|s| s * i).sum::<usize>()] = C64::new(1.0, 0.0);
    }
    PureState::new(dims, amps)
}
