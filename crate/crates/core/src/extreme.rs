//! Euclidean extreme points, Arveson boundary points, absolute extreme points
//! and a sound matrix-extreme sandwich for free spectrahedra.
//!
//! Both extremality tests reduce to linear systems on the kernel of
//! `L_A(X)`. A point is Euclidean extreme iff no nonzero Hermitian tuple `Y`
//! has `Λ_A(Y)k = 0` for every kernel vector `k`. It is an Arveson boundary
//! point iff no nonzero column tuple `α` has `k*·Σ A_j⊗α_j = 0` for every
//! kernel vector `k`. Non-extreme verdicts carry a witness that is checked by
//! plain membership.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{
    self, c, herm_basis, kron, svd_null_space, svd_null_space_real, CMatrix, CVector, HermMatrix, RMatrix,
};
use crate::pencil::{
    column_dilation, eval_monic, membership, ColumnTuple, HermTuple, MembershipReport,
    MembershipStatus, MonicPencil,
};
use crate::structure::commutant;

/// Relative singular-value cutoff for the kernel systems, as a multiple of tol.
const NULL_FACTOR: f64 = 100.0;
/// Witness steps must keep `λ_min(L_A) ≥ −WITNESS_SLACK`.
const WITNESS_SLACK: f64 = 1e-9;
const BISECTION_STEPS: usize = 40;

#[derive(Clone, Debug)]
pub struct EuclideanVerdict {
    pub extreme: bool,
    /// Unit Frobenius-norm direction with `X ± t·Y` in the spectrahedron.
    pub witness: Option<HermTuple>,
    pub step: Option<f64>,
}

#[derive(Clone, Debug)]
pub struct ArvesonWitness {
    pub alpha: ColumnTuple,
    pub beta: Vec<f64>,
    pub t: f64,
}

impl ArvesonWitness {
    /// The dilation `[[X, tα], [tα*, β]]`.
    pub fn dilation(&self, x: &HermTuple) -> Result<HermTuple> {
        column_dilation(x, &self.alpha.scale(self.t), &self.beta)
    }
}

#[derive(Clone, Debug)]
pub struct ArvesonVerdict {
    pub boundary: bool,
    pub witness: Option<ArvesonWitness>,
}

#[derive(Clone, Debug)]
pub struct IrreducibilityVerdict {
    pub irreducible: bool,
    pub commutant_dim: usize,
    pub reducing_projection: Option<HermMatrix>,
}

#[derive(Clone, Debug)]
pub struct AbsoluteVerdict {
    pub absolute: bool,
    pub irreducible: IrreducibilityVerdict,
    pub arveson: ArvesonVerdict,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Tri {
    Yes,
    No,
    Unknown,
}

#[derive(Clone, Debug)]
pub struct MatrixExtremeStatus {
    pub value: Tri,
    pub reason: String,
}

fn require_member(a: &MonicPencil, x: &HermTuple, tol: f64) -> Result<MembershipReport> {
    let rep = membership(a, x, tol)?;
    if rep.status == MembershipStatus::Outside {
        return Err(Error::Outside { min_eig: rep.min_eig });
    }
    Ok(rep)
}

/// Largest `t ∈ (0, 1]` (by bisection) with `ok(t)`; 0 when none is found.
fn bisect_step(ok: impl Fn(f64) -> Result<bool>) -> Result<f64> {
    if ok(1.0)? {
        return Ok(1.0);
    }
    let (mut lo, mut hi) = (0.0, 1.0);
    for _ in 0..BISECTION_STEPS {
        let mid = 0.5 * (lo + hi);
        if ok(mid)? {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(lo)
}

fn stays_inside(a: &MonicPencil, x: &HermTuple) -> Result<bool> {
    Ok(eval_monic(a, x)?.min_eig()? >= -WITNESS_SLACK)
}

fn euclidean_step(a: &MonicPencil, x: &HermTuple, y: &HermTuple) -> Result<f64> {
    bisect_step(|t| {
        let up = x.add(&y.scale(t))?;
        let down = x.sub(&y.scale(t))?;
        Ok(stays_inside(a, &up)? && stays_inside(a, &down)?)
    })
}

fn arveson_step(a: &MonicPencil, x: &HermTuple, alpha: &ColumnTuple, beta: &[f64]) -> Result<f64> {
    bisect_step(|t| stays_inside(a, &column_dilation(x, &alpha.scale(t), beta)?))
}

/// Linear system whose real null space is `{Y : Λ_A(Y)K = 0}`, in the
/// coordinates of `herm_basis(n)` per tuple entry.
fn euclidean_system(a: &MonicPencil, n: usize, kernel: &CMatrix) -> RMatrix {
    let basis = herm_basis(n);
    let k = kernel.ncols();
    let rows = 2 * kernel.nrows() * k;
    let cols = a.g() * basis.len();
    let mut m = RMatrix::zeros(rows, cols);
    for (j, aj) in a.coeffs().mats().iter().enumerate() {
        for (l, b) in basis.iter().enumerate() {
            let img = kron(aj.matrix(), b.matrix()) * kernel;
            let col = j * basis.len() + l;
            for (i, z) in img.iter().enumerate() {
                m[(2 * i, col)] = z.re;
                m[(2 * i + 1, col)] = z.im;
            }
        }
    }
    m
}

fn tuple_from_coords(g: usize, n: usize, v: &[f64]) -> HermTuple {
    let nb = n * n;
    HermTuple::new((0..g).map(|j| linalg::herm_from_coords(n, &v[j * nb..(j + 1) * nb])).collect())
        .expect("g >= 1")
}

/// Unit direction along the first Hermitian coordinate of the first entry.
fn canonical_direction(g: usize, n: usize) -> HermTuple {
    let mut v = vec![0.0; g * n * n];
    v[0] = 1.0;
    tuple_from_coords(g, n, &v)
}

pub fn is_euclidean_extreme(a: &MonicPencil, x: &HermTuple, tol: f64) -> Result<EuclideanVerdict> {
    let rep = require_member(a, x, tol)?;
    let (g, n) = (x.g(), x.n());
    let y = match rep.kernel {
        None => canonical_direction(g, n),
        Some(kernel) if kernel.ncols() == 0 => canonical_direction(g, n),
        Some(kernel) => {
            let m = euclidean_system(a, n, &kernel);
            let null = svd_null_space_real(&m, NULL_FACTOR * tol);
            if null.ncols() == 0 {
                return Ok(EuclideanVerdict { extreme: true, witness: None, step: None });
            }
            let v: Vec<f64> = null.column(0).iter().cloned().collect();
            let y = tuple_from_coords(g, n, &v);
            let norm = y.frob();
            y.scale(1.0 / norm)
        }
    };
    let t = euclidean_step(a, x, &y)?;
    Ok(EuclideanVerdict { extreme: false, witness: Some(y), step: Some(t) })
}

/// Matrix whose complex null space is `{α : K*·Σ A_j⊗α_j = 0}` with α
/// flattened entry by entry.
fn arveson_system(a: &MonicPencil, n: usize, kernel: &CMatrix) -> CMatrix {
    let g = a.g();
    let d = a.d();
    let k = kernel.ncols();
    let mut m = CMatrix::zeros(k * d, g * n);
    let kh = kernel.adjoint();
    for (j, aj) in a.coeffs().mats().iter().enumerate() {
        for i in 0..n {
            let mut e = CMatrix::zeros(n, 1);
            e[(i, 0)] = c(1.0, 0.0);
            let img = &kh * kron(aj.matrix(), &e);
            for (r, z) in img.iter().enumerate() {
                m[(r, j * n + i)] = *z;
            }
        }
    }
    m
}

pub fn is_arveson(a: &MonicPencil, x: &HermTuple, tol: f64) -> Result<ArvesonVerdict> {
    let rep = require_member(a, x, tol)?;
    let (g, n) = (x.g(), x.n());
    let alpha = match rep.kernel {
        Some(kernel) if kernel.ncols() > 0 => {
            let m = arveson_system(a, n, &kernel);
            let null = svd_null_space(&m, NULL_FACTOR * tol);
            if null.ncols() == 0 {
                return Ok(ArvesonVerdict { boundary: true, witness: None });
            }
            let v: CVector = null.column(0).into_owned();
            ColumnTuple::unflatten(g, n, &v)
        }
        _ => {
            let mut cols = vec![CVector::zeros(n); g];
            cols[0][0] = c(1.0, 0.0);
            ColumnTuple::new(cols)?
        }
    };
    let beta = vec![0.0; g];
    let t = arveson_step(a, x, &alpha, &beta)?;
    Ok(ArvesonVerdict { boundary: false, witness: Some(ArvesonWitness { alpha, beta, t }) })
}

pub fn is_irreducible(x: &HermTuple, tol: f64) -> Result<IrreducibilityVerdict> {
    let n = x.n();
    let basis = commutant(x, tol);
    let dim = basis.len();
    if dim <= 1 {
        return Ok(IrreducibilityVerdict { irreducible: true, commutant_dim: dim.max(1), reducing_projection: None });
    }
    // A Hermitian commutant element with nontrivial spectrum; its spectral
    // projections reduce X.
    let mut best: Option<HermMatrix> = None;
    let mut best_gap = 0.0;
    let mut rng = linalg::rng_from_seed(0x5eed);
    for _ in 0..4 {
        let mut h = CMatrix::zeros(n, n);
        for b in &basis {
            let w = linalg::gaussian(&mut rng);
            h += (b + b.adjoint()) * c(0.5 * w, 0.0);
        }
        let h = HermMatrix::symmetrize(h);
        let e = linalg::eigh(&h)?;
        let spread = e.values[n - 1] - e.values[0];
        if spread <= 0.0 {
            continue;
        }
        let (cut, gap) = (1..n)
            .map(|i| (i, e.values[i] - e.values[i - 1]))
            .fold((0, 0.0), |acc, cur| if cur.1 > acc.1 { cur } else { acc });
        if gap / spread > best_gap {
            best_gap = gap / spread;
            let v = e.vectors.columns(0, cut).into_owned();
            best = Some(HermMatrix::symmetrize(&v * v.adjoint()));
        }
    }
    let proj = best.filter(|p| {
        x.mats()
            .iter()
            .all(|m| linalg::frob(&(p.matrix() * m.matrix() - m.matrix() * p.matrix())) <= 1e-7)
    });
    Ok(IrreducibilityVerdict { irreducible: false, commutant_dim: dim, reducing_projection: proj })
}

pub fn is_absolute_extreme(a: &MonicPencil, x: &HermTuple, tol: f64) -> Result<AbsoluteVerdict> {
    let arveson = is_arveson(a, x, tol)?;
    let irreducible = is_irreducible(x, tol)?;
    Ok(AbsoluteVerdict { absolute: arveson.boundary && irreducible.irreducible, irreducible, arveson })
}

fn sandwich(euclidean: bool, arveson: bool, irreducible: bool) -> MatrixExtremeStatus {
    let (value, reason) = if !irreducible {
        (Tri::No, "reducible tuples are never matrix extreme")
    } else if !euclidean {
        (Tri::No, "not a Euclidean extreme point")
    } else if arveson {
        (Tri::Yes, "irreducible Arveson boundary point")
    } else {
        (Tri::Unknown, "irreducible and Euclidean extreme but not Arveson; block test undecided")
    };
    MatrixExtremeStatus { value, reason: reason.into() }
}

pub fn matrix_extreme_status(a: &MonicPencil, x: &HermTuple, tol: f64) -> Result<MatrixExtremeStatus> {
    let e = is_euclidean_extreme(a, x, tol)?;
    let ar = is_arveson(a, x, tol)?;
    let irr = is_irreducible(x, tol)?;
    Ok(sandwich(e.extreme, ar.boundary, irr.irreducible))
}

/// All verdicts for one point.
#[derive(Clone, Debug)]
pub struct Classification {
    pub status: MembershipStatus,
    pub min_eig: f64,
    pub kernel_dim: usize,
    pub euclidean: EuclideanVerdict,
    pub arveson: ArvesonVerdict,
    pub irreducible: IrreducibilityVerdict,
    pub absolute: bool,
    pub matrix_extreme: MatrixExtremeStatus,
}

impl Classification {
    /// Arveson ⇒ Euclidean, absolute ⇔ irreducible ∧ Arveson, and the
    /// sandwich agrees with its inputs.
    pub fn hierarchy_holds(&self) -> bool {
        let e = self.euclidean.extreme;
        let ar = self.arveson.boundary;
        let irr = self.irreducible.irreducible;
        let me = match self.matrix_extreme.value {
            Tri::Yes => irr && ar,
            Tri::No => !irr || !e,
            Tri::Unknown => true,
        };
        (!ar || e) && (self.absolute == (irr && ar)) && me
    }
}

pub fn classify(a: &MonicPencil, x: &HermTuple, tol: f64) -> Result<Classification> {
    let rep = require_member(a, x, tol)?;
    let euclidean = is_euclidean_extreme(a, x, tol)?;
    let arveson = is_arveson(a, x, tol)?;
    let irreducible = is_irreducible(x, tol)?;
    let absolute = arveson.boundary && irreducible.irreducible;
    let matrix_extreme = sandwich(euclidean.extreme, arveson.boundary, irreducible.irreducible);
    Ok(Classification {
        status: rep.status,
        min_eig: rep.min_eig,
        kernel_dim: rep.kernel.map_or(0, |k| k.ncols()),
        euclidean,
        arveson,
        irreducible,
        absolute,
        matrix_extreme,
    })
}
