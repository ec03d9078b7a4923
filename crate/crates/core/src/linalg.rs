//! Dense complex Hermitian linear algebra.
//!
//! Storage and general factorizations (QR, SVD) come from `nalgebra`; the
//! Hermitian eigensolver is a cyclic complex Jacobi iteration.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};

pub type C64 = Complex64;
pub type CMatrix = DMatrix<C64>;
pub type CVector = DVector<C64>;
pub type RMatrix = DMatrix<f64>;

/// Relative Hermiticity tolerance accepted at construction.
pub const HERM_TOL: f64 = 1e-10;
/// Sweep cap for the Jacobi eigensolver.
pub const MAX_SWEEPS: usize = 100;

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub fn frob(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Largest singular value.
pub fn op_norm(m: &CMatrix) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    m.clone().singular_values().iter().cloned().fold(0.0, f64::max)
}

pub fn is_finite(m: &CMatrix) -> bool {
    m.iter().all(|z| z.re.is_finite() && z.im.is_finite())
}

/// A complex Hermitian matrix, stored in symmetrized form.
#[derive(Clone, Debug, PartialEq)]
pub struct HermMatrix(CMatrix);

impl HermMatrix {
    /// Validates finiteness and Hermiticity, then stores `(M + M*)/2`.
    pub fn new(m: CMatrix) -> Result<Self> {
        if m.nrows() != m.ncols() {
            return Err(Error::InvalidInput(format!(
                "matrix is {}x{}, not square",
                m.nrows(),
                m.ncols()
            )));
        }
        if !is_finite(&m) {
            return Err(Error::InvalidInput("non-finite matrix entry".into()));
        }
        let skew = frob(&(&m - m.adjoint()));
        if skew > HERM_TOL * frob(&m).max(1.0) {
            return Err(Error::InvalidInput(format!(
                "matrix is not Hermitian (||M - M*||_F = {skew:.3e})"
            )));
        }
        Ok(Self::symmetrize(m))
    }

    /// Symmetrizes without checking; for matrices Hermitian by construction.
    pub fn symmetrize(m: CMatrix) -> Self {
        debug_assert_eq!(m.nrows(), m.ncols());
        let h = (&m + m.adjoint()) * c(0.5, 0.0);
        HermMatrix(h)
    }

    pub fn identity(n: usize) -> Self {
        HermMatrix(CMatrix::identity(n, n))
    }

    pub fn zeros(n: usize) -> Self {
        HermMatrix(CMatrix::zeros(n, n))
    }

    pub fn from_real_diag(d: &[f64]) -> Self {
        let v: Vec<C64> = d.iter().map(|&x| c(x, 0.0)).collect();
        HermMatrix(CMatrix::from_diagonal(&CVector::from_vec(v)))
    }

    /// Builds from a real symmetric matrix given row by row.
    pub fn from_real_rows(rows: &[&[f64]]) -> Result<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::InvalidInput("rows have inconsistent length".into()));
        }
        Self::new(CMatrix::from_fn(n, n, |i, j| c(rows[i][j], 0.0)))
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.0
    }

    pub fn into_matrix(self) -> CMatrix {
        self.0
    }

    pub fn frob(&self) -> f64 {
        frob(&self.0)
    }

    pub fn scale(&self, t: f64) -> Self {
        HermMatrix(&self.0 * c(t, 0.0))
    }

    pub fn add(&self, other: &Self) -> Self {
        HermMatrix(&self.0 + &other.0)
    }

    pub fn sub(&self, other: &Self) -> Self {
        HermMatrix(&self.0 - &other.0)
    }

    /// `V* M V` for any conformable `V`.
    pub fn congruence(&self, v: &CMatrix) -> Self {
        Self::symmetrize(v.adjoint() * &self.0 * v)
    }

    pub fn trace(&self) -> f64 {
        self.0.diagonal().iter().map(|z| z.re).sum()
    }

    pub fn min_eig(&self) -> Result<f64> {
        Ok(eigh(self)?.values.first().copied().unwrap_or(0.0))
    }

    pub fn max_eig(&self) -> Result<f64> {
        Ok(eigh(self)?.values.last().copied().unwrap_or(0.0))
    }

    /// Applies a real function to the spectrum.
    pub fn map_spectrum(&self, f: impl Fn(f64) -> f64) -> Result<Self> {
        let e = eigh(self)?;
        let d: Vec<C64> = e.values.iter().map(|&x| c(f(x), 0.0)).collect();
        let m = &e.vectors * CMatrix::from_diagonal(&CVector::from_vec(d)) * e.vectors.adjoint();
        Ok(Self::symmetrize(m))
    }

    /// Square root of the positive part.
    pub fn sqrt_psd(&self) -> Result<Self> {
        self.map_spectrum(|x| x.max(0.0).sqrt())
    }
}

#[derive(Clone, Debug)]
pub struct EigDecomp {
    /// Ascending.
    pub values: Vec<f64>,
    /// Columns are eigenvectors.
    pub vectors: CMatrix,
}

/// Hermitian eigendecomposition by cyclic Jacobi rotations.
pub fn eigh(m: &HermMatrix) -> Result<EigDecomp> {
    let n = m.dim();
    let mut a = m.matrix().clone();
    let mut v = CMatrix::identity(n, n);
    let scale = frob(&a);
    if n == 0 || scale == 0.0 {
        return Ok(EigDecomp { values: vec![0.0; n], vectors: v });
    }
    let target = f64::EPSILON * scale;
    let mut converged = false;
    for _ in 0..MAX_SWEEPS {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[(i, j)].norm_sqr())
            .sum::<f64>()
            .sqrt();
        if off <= target {
            converged = true;
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[(p, q)];
                let r = apq.norm();
                if r <= 1e-3 * target / (n as f64) {
                    continue;
                }
                let phase = apq / r;
                let tau = (a[(q, q)].re - a[(p, p)].re) / (2.0 * r);
                let t = if tau >= 0.0 {
                    1.0 / (tau + (1.0 + tau * tau).sqrt())
                } else {
                    -1.0 / (-tau + (1.0 + tau * tau).sqrt())
                };
                let cs = 1.0 / (1.0 + t * t).sqrt();
                let sn = t * cs;
                let e_m = phase.conj();
                // Columns: A <- A G, V <- V G.
                for i in 0..n {
                    let ap = a[(i, p)];
                    let aq = a[(i, q)];
                    a[(i, p)] = ap * cs - aq * e_m * sn;
                    a[(i, q)] = ap * sn + aq * e_m * cs;
                    let vp = v[(i, p)];
                    let vq = v[(i, q)];
                    v[(i, p)] = vp * cs - vq * e_m * sn;
                    v[(i, q)] = vp * sn + vq * e_m * cs;
                }
                // Rows: A <- G* A.
                for j in 0..n {
                    let ap = a[(p, j)];
                    let aq = a[(q, j)];
                    a[(p, j)] = ap * cs - aq * phase * sn;
                    a[(q, j)] = ap * sn + aq * phase * cs;
                }
                a[(p, q)] = C64::new(0.0, 0.0);
                a[(q, p)] = C64::new(0.0, 0.0);
                a[(p, p)].im = 0.0;
                a[(q, q)].im = 0.0;
            }
        }
    }
    if !converged {
        return Err(Error::NoConvergence { sweeps: MAX_SWEEPS });
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(i, i)].re.total_cmp(&a[(j, j)].re));
    let values = order.iter().map(|&i| a[(i, i)].re).collect();
    let vectors = CMatrix::from_fn(n, n, |i, k| v[(i, order[k])]);
    Ok(EigDecomp { values, vectors })
}

fn zero_cutoff(values: &[f64], tol: f64) -> f64 {
    let big = values.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    tol * big.max(1.0)
}

/// Orthonormal basis (as columns) of the numerical kernel.
pub fn null_space(m: &HermMatrix, tol: f64) -> Result<CMatrix> {
    let e = eigh(m)?;
    let cut = zero_cutoff(&e.values, tol);
    let idx: Vec<usize> = (0..e.values.len()).filter(|&i| e.values[i].abs() <= cut).collect();
    Ok(select_columns(&e.vectors, &idx))
}

pub fn pinv(m: &HermMatrix, tol: f64) -> Result<HermMatrix> {
    let e = eigh(m)?;
    let cut = zero_cutoff(&e.values, tol);
    let d: Vec<C64> = e
        .values
        .iter()
        .map(|&x| if x.abs() <= cut { c(0.0, 0.0) } else { c(1.0 / x, 0.0) })
        .collect();
    let p = &e.vectors * CMatrix::from_diagonal(&CVector::from_vec(d)) * e.vectors.adjoint();
    Ok(HermMatrix::symmetrize(p))
}

pub fn select_columns(m: &CMatrix, idx: &[usize]) -> CMatrix {
    CMatrix::from_fn(m.nrows(), idx.len(), |i, k| m[(i, idx[k])])
}

pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    let (ra, ca) = a.shape();
    let (rb, cb) = b.shape();
    CMatrix::from_fn(ra * rb, ca * cb, |i, j| a[(i / rb, j / cb)] * b[(i % rb, j % cb)])
}

/// Permutation `P` with `P (A⊗X) P* = X⊗A` for `A` of size `d`, `X` of size `n`.
pub fn canonical_shuffle(d: usize, n: usize) -> CMatrix {
    let mut p = CMatrix::zeros(d * n, d * n);
    for a in 0..d {
        for i in 0..n {
            p[(i * d + a, a * n + i)] = c(1.0, 0.0);
        }
    }
    p
}

/// Right singular vectors of `m` whose singular value is at most
/// `rel_tol * max(1, sigma_max)`, ordered by increasing singular value.
pub fn svd_null_space(m: &CMatrix, rel_tol: f64) -> CMatrix {
    let (basis, _) = svd_null_space_with_values(m, rel_tol);
    basis
}

/// Like [`svd_null_space`] but also returns every singular value of the
/// (row-padded) matrix paired with its right singular vector index order.
pub fn svd_null_space_with_values(m: &CMatrix, rel_tol: f64) -> (CMatrix, Vec<f64>) {
    let cols = m.ncols();
    if cols == 0 {
        return (CMatrix::zeros(0, 0), vec![]);
    }
    let rows = m.nrows().max(cols);
    let mut padded = CMatrix::zeros(rows, cols);
    padded.view_mut((0, 0), m.shape()).copy_from(m);
    let svd = padded.svd(false, true);
    let vt = svd.v_t.expect("requested v_t");
    let sv: Vec<f64> = svd.singular_values.iter().cloned().collect();
    let big = sv.iter().cloned().fold(0.0, f64::max);
    let cut = rel_tol * big.max(1.0);
    let mut idx: Vec<usize> = (0..sv.len()).filter(|&i| sv[i] <= cut).collect();
    idx.sort_by(|&i, &j| sv[i].total_cmp(&sv[j]));
    let basis = CMatrix::from_fn(cols, idx.len(), |r, k| vt[(idx[k], r)].conj());
    (basis, sv)
}

/// Real counterpart of [`svd_null_space`].
pub fn svd_null_space_real(m: &RMatrix, rel_tol: f64) -> RMatrix {
    let cols = m.ncols();
    if cols == 0 {
        return RMatrix::zeros(0, 0);
    }
    let rows = m.nrows().max(cols);
    let mut padded = RMatrix::zeros(rows, cols);
    padded.view_mut((0, 0), m.shape()).copy_from(m);
    let svd = padded.svd(false, true);
    let vt = svd.v_t.expect("requested v_t");
    let sv = &svd.singular_values;
    let big = sv.iter().cloned().fold(0.0, f64::max);
    let cut = rel_tol * big.max(1.0);
    let mut idx: Vec<usize> = (0..sv.len()).filter(|&i| sv[i] <= cut).collect();
    idx.sort_by(|&i, &j| sv[i].total_cmp(&sv[j]));
    RMatrix::from_fn(cols, idx.len(), |r, k| vt[(idx[k], r)])
}

/// Minimum-norm least-squares solution of `m x = b` with singular values
/// below `rel_tol * sigma_max` discarded.
pub fn lstsq_real(m: &RMatrix, b: &DVector<f64>, rel_tol: f64) -> DVector<f64> {
    let cols = m.ncols();
    if cols == 0 || m.nrows() == 0 {
        return DVector::zeros(cols);
    }
    let svd = m.clone().svd(true, true);
    let u = svd.u.as_ref().expect("requested u");
    let vt = svd.v_t.as_ref().expect("requested v_t");
    let sv = &svd.singular_values;
    let big = sv.iter().cloned().fold(0.0, f64::max);
    let mut x = DVector::zeros(cols);
    for k in 0..sv.len() {
        if sv[k] > rel_tol * big && sv[k] > 0.0 {
            let coef = u.column(k).dot(b) / sv[k];
            x += vt.row(k).transpose() * coef;
        }
    }
    x
}

/// Orthonormal basis of the real Hermitian matrices of size `n`, ordered as
/// diagonal units, then (E_ab + E_ba)/√2, then i(E_ab − E_ba)/√2 for a < b.
pub fn herm_basis(n: usize) -> Vec<HermMatrix> {
    let mut out = Vec::with_capacity(n * n);
    for a in 0..n {
        let mut m = CMatrix::zeros(n, n);
        m[(a, a)] = c(1.0, 0.0);
        out.push(HermMatrix(m));
    }
    let r = std::f64::consts::FRAC_1_SQRT_2;
    for a in 0..n {
        for b in (a + 1)..n {
            let mut m = CMatrix::zeros(n, n);
            m[(a, b)] = c(r, 0.0);
            m[(b, a)] = c(r, 0.0);
            out.push(HermMatrix(m));
        }
    }
    for a in 0..n {
        for b in (a + 1)..n {
            let mut m = CMatrix::zeros(n, n);
            m[(a, b)] = c(0.0, r);
            m[(b, a)] = c(0.0, -r);
            out.push(HermMatrix(m));
        }
    }
    out
}

/// Coordinates of `m` in [`herm_basis`].
pub fn herm_coords(m: &HermMatrix) -> Vec<f64> {
    let n = m.dim();
    let a = m.matrix();
    let s = std::f64::consts::SQRT_2;
    let mut out = Vec::with_capacity(n * n);
    for i in 0..n {
        out.push(a[(i, i)].re);
    }
    for i in 0..n {
        for j in (i + 1)..n {
            out.push(s * a[(i, j)].re);
        }
    }
    for i in 0..n {
        for j in (i + 1)..n {
            out.push(s * a[(i, j)].im);
        }
    }
    out
}

pub fn herm_from_coords(n: usize, x: &[f64]) -> HermMatrix {
    let r = std::f64::consts::FRAC_1_SQRT_2;
    let mut m = CMatrix::zeros(n, n);
    for i in 0..n {
        m[(i, i)] = c(x[i], 0.0);
    }
    let pairs = n * (n - 1) / 2;
    let mut k = 0;
    for i in 0..n {
        for j in (i + 1)..n {
            let z = c(r * x[n + k], r * x[n + pairs + k]);
            m[(i, j)] = z;
            m[(j, i)] = z.conj();
            k += 1;
        }
    }
    HermMatrix(m)
}

/// Real inner product `Re tr(A* B)`.
pub fn real_inner(a: &CMatrix, b: &CMatrix) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| (x.conj() * y).re).sum()
}

pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Deterministic per-task seed derived from a master seed (splitmix64).
pub fn derive_seed(master: u64, index: u64) -> u64 {
    let mut z = master ^ index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn gaussian<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    rng.sample(StandardNormal)
}

pub fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    c(gaussian(rng), gaussian(rng)) * std::f64::consts::FRAC_1_SQRT_2
}

pub fn gaussian_cmatrix<R: Rng + ?Sized>(rng: &mut R, r: usize, k: usize) -> CMatrix {
    CMatrix::from_fn(r, k, |_, _| complex_gaussian(rng))
}

/// Haar-distributed unitary (QR of a Ginibre matrix with phase correction).
pub fn random_unitary_with<R: Rng + ?Sized>(rng: &mut R, n: usize) -> CMatrix {
    if n == 0 {
        return CMatrix::zeros(0, 0);
    }
    let g = gaussian_cmatrix(rng, n, n);
    let qr = g.qr();
    let mut q = qr.q();
    let r = qr.r();
    for k in 0..n {
        let d = r[(k, k)];
        let ph = if d.norm() > 0.0 { d / d.norm() } else { c(1.0, 0.0) };
        for i in 0..n {
            q[(i, k)] *= ph;
        }
    }
    q
}

pub fn random_herm_with<R: Rng + ?Sized>(rng: &mut R, n: usize) -> HermMatrix {
    HermMatrix::symmetrize(gaussian_cmatrix(rng, n, n))
}

/// Random real symmetric matrix.
pub fn random_real_sym_with<R: Rng + ?Sized>(rng: &mut R, n: usize) -> HermMatrix {
    let m = CMatrix::from_fn(n, n, |_, _| c(gaussian(rng), 0.0));
    HermMatrix::symmetrize(m)
}

pub fn random_isometry_with<R: Rng + ?Sized>(rng: &mut R, m: usize, n: usize) -> CMatrix {
    assert!(m >= n, "isometry needs m >= n");
    let u = random_unitary_with(rng, m);
    u.columns(0, n).into_owned()
}

pub fn random_unit_vector_with<R: Rng + ?Sized>(rng: &mut R, n: usize) -> CVector {
    let v = CVector::from_fn(n, |_, _| complex_gaussian(rng));
    let nv = v.norm();
    v / c(nv, 0.0)
}

pub fn random_unitary(n: usize, seed: u64) -> CMatrix {
    random_unitary_with(&mut rng_from_seed(seed), n)
}

pub fn random_herm(n: usize, seed: u64) -> HermMatrix {
    random_herm_with(&mut rng_from_seed(seed), n)
}

pub fn random_isometry(m: usize, n: usize, seed: u64) -> CMatrix {
    random_isometry_with(&mut rng_from_seed(seed), m, n)
}

pub fn is_unitary(u: &CMatrix, tol: f64) -> bool {
    u.is_square() && frob(&(u.adjoint() * u - CMatrix::identity(u.ncols(), u.ncols()))) <= tol
}
