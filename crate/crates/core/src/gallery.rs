//! Named pencils and constructions: the free cube, interval, spin and wild
//! disks, the TV screen lift, free simplices, plus boundary tests for the
//! free semialgebraic sets `I − X² − Y² ⪰ 0` and `I − X² − Y⁴ ⪰ 0`.

use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{self, c, CMatrix, CVector, HermMatrix};
use crate::pencil::{column_dilation, membership, ColumnTuple, HermTuple, MembershipStatus, MonicPencil};
use crate::structure::naimark_tuple;

#[derive(Clone, Debug)]
pub struct GalleryEntry {
    pub name: String,
    pub pencil: MonicPencil,
    /// Leading variables that are visible; the rest are hidden lift variables.
    pub visible_vars: usize,
    pub notes: String,
}

impl GalleryEntry {
    fn plain(name: &str, pencil: MonicPencil, notes: &str) -> Self {
        let g = pencil.g();
        GalleryEntry { name: name.into(), pencil, visible_vars: g, notes: notes.into() }
    }

    pub fn is_drop(&self) -> bool {
        self.visible_vars < self.pencil.g()
    }
}

fn real(rows: &[&[f64]]) -> HermMatrix {
    HermMatrix::from_real_rows(rows).expect("symmetric literal")
}

/// `‖X_j‖ ≤ 1` for all j, via `A_j = (e_j e_j*) ⊗ diag(1, −1)`.
pub fn cube(g: usize) -> Result<GalleryEntry> {
    if g == 0 {
        return Err(Error::InvalidInput("cube needs g >= 1".into()));
    }
    let diags: Vec<Vec<f64>> = (0..g)
        .map(|j| {
            let mut d = vec![0.0; 2 * g];
            d[2 * j] = 1.0;
            d[2 * j + 1] = -1.0;
            d
        })
        .collect();
    let pencil = MonicPencil::new(HermTuple::diagonal(&diags)?);
    Ok(GalleryEntry::plain(&format!("cube{g}"), pencil, "free cube; Arveson points are tuples of symmetries"))
}

pub fn interval() -> GalleryEntry {
    let pencil = MonicPencil::new(HermTuple::diagonal(&[vec![1.0, -1.0]]).expect("g = 1"));
    GalleryEntry::plain("interval", pencil, "the interval [-1, 1]")
}

/// `L(x) = [[1 + x₁, x₂], [x₂, 1 − x₁]]`.
pub fn spin_disk() -> GalleryEntry {
    let a1 = HermMatrix::from_real_diag(&[-1.0, 1.0]);
    let a2 = real(&[&[0.0, -1.0], &[-1.0, 0.0]]);
    let pencil = MonicPencil::new(HermTuple::new(vec![a1, a2]).expect("g = 2"));
    GalleryEntry::plain("spin_disk", pencil, "Arveson points: commuting pairs with X1^2 + X2^2 = I")
}

/// `L(x) = [[1, x₁, x₂], [x₁, 1, 0], [x₂, 0, 1]]`, i.e. `I − X₁² − X₂² ⪰ 0`.
pub fn wild_disk() -> GalleryEntry {
    let a1 = real(&[&[0.0, -1.0, 0.0], &[-1.0, 0.0, 0.0], &[0.0, 0.0, 0.0]]);
    let a2 = real(&[&[0.0, 0.0, -1.0], &[0.0, 0.0, 0.0], &[-1.0, 0.0, 0.0]]);
    let pencil = MonicPencil::new(HermTuple::new(vec![a1, a2]).expect("g = 2"));
    GalleryEntry::plain("wild_disk", pencil, "X in the set iff I - X1^2 - X2^2 is PSD")
}

/// `N_j = −e_j e_j* + e_{g+1} e_{g+1}*/(g+1)`: `X_j ⪰ −I`, `Σ X_j ⪯ (g+1)I`.
pub fn naimark(g: usize) -> Result<GalleryEntry> {
    if g == 0 {
        return Err(Error::InvalidInput("naimark needs g >= 1".into()));
    }
    let pencil = MonicPencil::new(naimark_tuple(g));
    Ok(GalleryEntry::plain(&format!("naimark{g}"), pencil, "Naimark free simplex"))
}

/// Constants of the TV screen lift: `α = a` and `γ = (1 + a²)^{1/4}`.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct TvLiftParams {
    pub alpha: f64,
    pub gamma: f64,
}

impl TvLiftParams {
    /// Lift variable `w` carrying the hidden matrix `W` with `W ⪰ Y²`,
    /// `I − X² − W² ⪰ 0`: `w = γ²W − α`.
    pub fn w_from_hidden(&self, w_hat: &HermMatrix) -> HermMatrix {
        let n = w_hat.dim();
        w_hat.scale(self.gamma * self.gamma).sub(&HermMatrix::identity(n).scale(self.alpha))
    }

    pub fn hidden_from_w(&self, w: &HermMatrix) -> HermMatrix {
        let n = w.dim();
        w.add(&HermMatrix::identity(n).scale(self.alpha)).scale(1.0 / (self.gamma * self.gamma))
    }
}

/// Monic pencil in `(x, y, w)` whose projection onto `(x, y)` is the TV
/// screen relaxation `{(X, Y) : ∃W, I − X² − W² ⪰ 0, W ⪰ Y²}`.
///
/// The blocks are `[[1, γy], [γy, w + α]]` (rescaled by `diag(1, α^{-1/2})`
/// to be monic) and `[[1, 0, γ²x], [0, 1, w], [γ²x, w, 1 − 2αw]]`.
pub fn tv_lift(a: f64) -> Result<(GalleryEntry, TvLiftParams)> {
    if !(a > 0.0) || !a.is_finite() {
        return Err(Error::InvalidInput(format!("tv_lift needs a > 0, got {a}")));
    }
    let gamma = (1.0 + a * a).powf(0.25);
    let g2 = gamma * gamma;
    let s = gamma / a.sqrt();
    let mut ax = CMatrix::zeros(5, 5);
    let mut ay = CMatrix::zeros(5, 5);
    let mut aw = CMatrix::zeros(5, 5);
    ay[(0, 1)] = c(-s, 0.0);
    ay[(1, 0)] = c(-s, 0.0);
    aw[(1, 1)] = c(-1.0 / a, 0.0);
    ax[(2, 4)] = c(-g2, 0.0);
    ax[(4, 2)] = c(-g2, 0.0);
    aw[(3, 4)] = c(-1.0, 0.0);
    aw[(4, 3)] = c(-1.0, 0.0);
    aw[(4, 4)] = c(2.0 * a, 0.0);
    let coeffs = HermTuple::new(vec![HermMatrix::new(ax)?, HermMatrix::new(ay)?, HermMatrix::new(aw)?])?;
    let entry = GalleryEntry {
        name: "tv_lift".into(),
        pencil: MonicPencil::new(coeffs),
        visible_vars: 2,
        notes: format!("TV screen lift with alpha = {a}; hidden variable w = gamma^2 W - alpha"),
    };
    Ok((entry, TvLiftParams { alpha: a, gamma }))
}

/// Diagonal pencil whose level-1 set is the simplex with the given vertices.
/// Row `a` is the facet opposite vertex `a`, written as `1 − n_a·x ≥ 0`.
pub fn simplex_from_vertices(vertices: &[Vec<f64>]) -> Result<GalleryEntry> {
    let g = vertices.len().saturating_sub(1);
    if g == 0 || vertices.iter().any(|v| v.len() != g) {
        return Err(Error::InvalidInput("need g + 1 vertices in R^g".into()));
    }
    // Barycentric coordinates of the origin.
    let m = nalgebra::DMatrix::from_fn(g + 1, g + 1, |r, k| if r < g { vertices[k][r] } else { 1.0 });
    let mut rhs = nalgebra::DVector::zeros(g + 1);
    rhs[g] = 1.0;
    let lu = m.clone().lu();
    let lam = lu
        .solve(&rhs)
        .filter(|_| m.singular_values().min() > 1e-12 * m.norm().max(1.0))
        .ok_or_else(|| Error::InvalidInput("vertices are affinely dependent".into()))?;
    if lam.iter().any(|l| !(*l > 1e-12)) {
        return Err(Error::InvalidInput("origin is not interior to the simplex".into()));
    }
    let mut rows = Vec::with_capacity(g + 1);
    for a in 0..=g {
        let others: Vec<&Vec<f64>> = vertices.iter().enumerate().filter(|(b, _)| *b != a).map(|(_, v)| v).collect();
        let vm = nalgebra::DMatrix::from_fn(g, g, |r, k| others[r][k]);
        let normal = vm
            .lu()
            .solve(&nalgebra::DVector::from_element(g, 1.0))
            .ok_or_else(|| Error::InvalidInput("degenerate facet".into()))?;
        rows.push(normal);
    }
    let diags: Vec<Vec<f64>> = (0..g).map(|j| rows.iter().map(|n| n[j]).collect()).collect();
    let pencil = MonicPencil::new(HermTuple::diagonal(&diags)?);
    Ok(GalleryEntry::plain("simplex", pencil, "free simplex from vertices"))
}

/// Tuple of symmetries `J_j = U_j diag(±1) U_j*`.
pub fn symmetry_tuple(n: usize, g: usize, seed: u64) -> Result<HermTuple> {
    if n == 0 || g == 0 {
        return Err(Error::InvalidInput("symmetry_tuple needs n, g >= 1".into()));
    }
    let mut rng = linalg::rng_from_seed(seed);
    let mats = (0..g)
        .map(|_| {
            let u = linalg::random_unitary_with(&mut rng, n);
            let signs: Vec<f64> = (0..n).map(|_| if rng.random::<bool>() { 1.0 } else { -1.0 }).collect();
            HermMatrix::from_real_diag(&signs).congruence(&u.adjoint())
        })
        .collect();
    HermTuple::new(mats)
}

/// `(diag(cos θ_i), diag(sin θ_i))`.
pub fn spin_boundary_point(angles: &[f64]) -> Result<HermTuple> {
    if angles.is_empty() {
        return Err(Error::InvalidInput("need at least one angle".into()));
    }
    let cs: Vec<f64> = angles.iter().map(|t| t.cos()).collect();
    let sn: Vec<f64> = angles.iter().map(|t| t.sin()).collect();
    HermTuple::diagonal(&[cs, sn])
}

fn require_pair(x: &HermTuple) -> Result<()> {
    if x.g() != 2 {
        return Err(Error::Dimension(format!("expected a pair, got g = {}", x.g())));
    }
    Ok(())
}

/// `I − X² − Y²`.
pub fn wild_poly(x: &HermTuple) -> Result<HermMatrix> {
    require_pair(x)?;
    let (a, b) = (x.get(0).matrix(), x.get(1).matrix());
    let n = x.n();
    Ok(HermMatrix::symmetrize(CMatrix::identity(n, n) - a * a - b * b))
}

/// `I − X² − Y⁴`.
pub fn tv_poly(x: &HermTuple) -> Result<HermMatrix> {
    require_pair(x)?;
    let (a, b) = (x.get(0).matrix(), x.get(1).matrix());
    let n = x.n();
    let b2 = b * b;
    Ok(HermMatrix::symmetrize(CMatrix::identity(n, n) - a * a - &b2 * &b2))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum PolyKind {
    Wild,
    Tv,
}

impl PolyKind {
    pub fn eval(self, x: &HermTuple) -> Result<HermMatrix> {
        match self {
            PolyKind::Wild => wild_poly(x),
            PolyKind::Tv => tv_poly(x),
        }
    }
}

/// True iff `p(X)` vanishes to within `tol` (and so is PSD to within `tol`).
pub fn vanishing_boundary_test(kind: PolyKind, x: &HermTuple, tol: f64) -> Result<bool> {
    let p = kind.eval(x)?;
    let e = linalg::eigh(&p)?;
    let norm = e.values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    Ok(norm <= tol && e.values[0] >= -tol)
}

/// Kernel split of `p(X) = I − X² − Y²`: orthonormal bases of `𝒦` and `𝒦^⊥`.
fn wild_kernel_split(x: &HermTuple, tol: f64) -> Result<(CMatrix, CMatrix, HermMatrix)> {
    let p = wild_poly(x)?;
    let e = linalg::eigh(&p)?;
    let n = x.n();
    let m = e.values.iter().filter(|v| **v <= tol).count();
    // Eigenvalues ascend, so the kernel is the leading block.
    Ok((e.vectors.columns(0, m).into_owned(), e.vectors.columns(m, n - m).into_owned(), p))
}

/// Rank conditions for the Arveson boundary of the wild disk: the
/// compressions `X₁₂ = Q X P` and `Y₁₂ = Q Y P` (P onto `𝒦^⊥`, Q onto
/// `𝒦 = ker p(X)`) are injective with ranges meeting only in 0.
pub fn wild_arveson_test(x: &HermTuple, tol: f64) -> Result<bool> {
    let rep = membership(&wild_disk().pencil, x, tol)?;
    if rep.status == MembershipStatus::Outside {
        return Err(Error::Outside { min_eig: rep.min_eig });
    }
    let (kb, pb, _) = wild_kernel_split(x, tol)?;
    let r = pb.ncols();
    if r == 0 {
        return Ok(true);
    }
    let m = kb.ncols();
    if m < 2 * r {
        return Ok(false);
    }
    let mut blk = CMatrix::zeros(m, 2 * r);
    blk.view_mut((0, 0), (m, r)).copy_from(&(kb.adjoint() * x.get(0).matrix() * &pb));
    blk.view_mut((0, r), (m, r)).copy_from(&(kb.adjoint() * x.get(1).matrix() * &pb));
    let sv = blk.singular_values();
    Ok(sv.min() > 1e-6 * sv.max().max(1.0))
}

/// Dilates a non-Arveson pair with `dim ker p(X) = n − 1` to a pair of size
/// n + 1 with `I − X̃² − Ỹ² = 0` whose leading n×n block is `(X, Y)`.
///
/// With `u` spanning `𝒦^⊥` and `Γ = (γ₁, γ₂)` a unit null vector of
/// `[QXu, QYu]`, the border is `t·γ_j·u` and the corner `δ_j` where
/// `t² = u*p(X)u`, `‖Δ‖² = 1 − t²` and `⟨Δ, Γ⟩ = −⟨Σ, Γ⟩` for
/// `Σ = (u*Xu, u*Yu)`.
pub fn lift_one(x: &HermTuple, tol: f64) -> Result<HermTuple> {
    if wild_arveson_test(x, tol)? {
        return Err(Error::Precondition("pair is an Arveson boundary point".into()));
    }
    let n = x.n();
    let (kb, pb, p) = wild_kernel_split(x, tol)?;
    if pb.ncols() != 1 {
        return Err(Error::Precondition(format!(
            "need dim ker p(X) = n - 1 = {}, found {}",
            n - 1,
            kb.ncols()
        )));
    }
    let u: CVector = pb.column(0).into_owned();
    let lambda = (u.adjoint() * p.matrix() * &u)[(0, 0)].re;
    let (xm, ym) = (x.get(0).matrix(), x.get(1).matrix());
    let mut pair = CMatrix::zeros(kb.ncols(), 2);
    if kb.ncols() > 0 {
        pair.set_column(0, &(kb.adjoint() * xm * &u));
        pair.set_column(1, &(kb.adjoint() * ym * &u));
    }
    let null = linalg::svd_null_space(&pair, 1e-6);
    if null.ncols() == 0 {
        return Err(Error::Precondition("compressions are not colinear".into()));
    }
    // Rotate the phase so Γ is real.
    let mut gam = [null[(0, 0)], null[(1, 0)]];
    let lead = if gam[0].norm() >= gam[1].norm() { gam[0] } else { gam[1] };
    let phase = lead.conj() / lead.norm();
    for z in gam.iter_mut() {
        *z *= phase;
    }
    if gam.iter().any(|z| z.im.abs() > 1e-8) {
        return Err(Error::Numerical("no real border direction; compressions differ by a complex phase".into()));
    }
    let gr = [gam[0].re, gam[1].re];
    let gperp = [-gr[1], gr[0]];
    let sigma = [(u.adjoint() * xm * &u)[(0, 0)].re, (u.adjoint() * ym * &u)[(0, 0)].re];
    let s_par = sigma[0] * gr[0] + sigma[1] * gr[1];
    let delta_sq = 1.0 - lambda;
    let rest = delta_sq - s_par * s_par;
    if rest < -tol {
        return Err(Error::Numerical(format!(
            "no real corner: |Delta|^2 = {delta_sq} is below the squared projection {} of Sigma",
            s_par * s_par
        )));
    }
    let r = rest.max(0.0).sqrt();
    let delta = [-s_par * gr[0] + r * gperp[0], -s_par * gr[1] + r * gperp[1]];
    let t = lambda.max(0.0).sqrt();
    let alpha = ColumnTuple::new(vec![&u * c(t * gr[0], 0.0), &u * c(t * gr[1], 0.0)])?;
    let lifted = column_dilation(x, &alpha, &delta)?;
    let resid = wild_poly(&lifted)?.frob();
    if resid > tol.max(1e-8) {
        return Err(Error::Numerical(format!("lifted pair misses the vanishing boundary by {resid:e}")));
    }
    Ok(lifted)
}

/// Random real pair of size n with `p(X) = λ·uu*` of rank one, for
/// `λ ∈ (0.05, 0.5)`; `X` has norm below 0.6 and `Y` is a random-sign square
/// root of `I − λuu* − X²`.
pub fn corank_one_pair(n: usize, seed: u64) -> Result<HermTuple> {
    let mut rng = linalg::rng_from_seed(seed);
    let xr = linalg::random_real_sym_with(&mut rng, n);
    let xr = xr.scale(rng.random_range(0.1..0.6) / linalg::op_norm(xr.matrix()).max(1e-12));
    let mut u = CVector::from_fn(n, |_, _| c(linalg::gaussian(&mut rng), 0.0));
    u /= c(u.norm(), 0.0);
    let lambda = rng.random_range(0.05..0.5);
    let target = HermMatrix::symmetrize(
        CMatrix::identity(n, n) - &u * u.adjoint() * c(lambda, 0.0) - xr.matrix() * xr.matrix(),
    );
    let e = linalg::eigh(&target)?;
    let roots: Vec<f64> = e
        .values
        .iter()
        .map(|v| {
            let s = v.max(0.0).sqrt();
            if rng.random::<bool>() { s } else { -s }
        })
        .collect();
    let y = HermMatrix::from_real_diag(&roots).congruence(&e.vectors.adjoint());
    // Real symmetric inputs keep the border real; drop round-off imaginaries.
    let y = HermMatrix::symmetrize(y.matrix().map(|z| c(z.re, 0.0)));
    HermTuple::new(vec![xr, y])
}

/// A smaller corank-one pair plus a unit-circle scalar, rotated by a real
/// orthogonal matrix. For `n ≥ 3` random corank-one pairs are almost always
/// Arveson, so the search needs these degenerate candidates.
fn padded_corank_one_pair(n: usize, seed: u64, tol: f64) -> Result<HermTuple> {
    let mut rng = linalg::rng_from_seed(seed);
    let inner = lift_one_oracle(n - 1, rng.random(), tol)?;
    let th = rng.random_range(-std::f64::consts::PI..std::f64::consts::PI);
    let x = inner.direct_sum(&HermTuple::scalar(&[th.cos(), th.sin()]))?;
    let q = nalgebra::DMatrix::from_fn(n, n, |_, _| linalg::gaussian(&mut rng)).qr().q();
    Ok(x.conjugate(&q.map(|v| c(v, 0.0))))
}

/// Oracle for non-Arveson wild-disk pairs with corank-one `p(X)`: tries
/// random and padded candidates until one has numerical rank one and fails
/// the rank conditions.
pub fn lift_one_oracle(n: usize, seed: u64, tol: f64) -> Result<HermTuple> {
    for k in 0..64 {
        let s = linalg::derive_seed(seed, k);
        let x = if n >= 3 && k % 2 == 1 { padded_corank_one_pair(n, s, tol)? } else { corank_one_pair(n, s)? };
        let (kb, _, _) = wild_kernel_split(&x, 1e-9)?;
        if kb.ncols() + 1 == n && !wild_arveson_test(&x, tol)? {
            return Ok(x);
        }
    }
    Err(Error::Numerical("oracle found no corank-one non-Arveson pair".into()))
}

#[derive(Clone, Debug)]
pub struct ExlassePoint {
    pub x: HermMatrix,
    pub y: HermMatrix,
    pub w: HermMatrix,
    pub mu: f64,
}

impl ExlassePoint {
    pub fn pair(&self) -> HermTuple {
        HermTuple::new(vec![self.x.clone(), self.y.clone()]).expect("g = 2")
    }
}

/// `Y = √μ·diag(1, 0)`, `W = μ[[2, 1], [1, 1]]`, `X = (I − W²)^{1/2}` with
/// `μ = 2/(3 + √5)` so that `‖W‖ = 1`.
pub fn exlasse_point() -> Result<ExlassePoint> {
    let mu = 2.0 / (3.0 + 5f64.sqrt());
    let w = real(&[&[2.0 * mu, mu], &[mu, mu]]);
    let y = HermMatrix::from_real_diag(&[mu.sqrt(), 0.0]);
    let id = HermMatrix::identity(2);
    let xsq = id.sub(&HermMatrix::symmetrize(w.matrix() * w.matrix()));
    let x = xsq.sqrt_psd()?;
    Ok(ExlassePoint { x, y, w, mu })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum TvHatCase {
    JZero,
    XInDp,
    XNotInDp,
}

#[derive(Clone, Debug, Serialize)]
pub struct TvHatClass {
    pub in_hat: bool,
    pub j_rank_one: bool,
    pub case: TvHatCase,
}

/// Classifies `(X, Y, W)` against `I − X² − W² = 0` and `J = W − Y²`
/// rank-one PSD.
pub fn tv_hat_point_class(x: &HermMatrix, y: &HermMatrix, w: &HermMatrix, tol: f64) -> Result<TvHatClass> {
    let pair = HermTuple::new(vec![x.clone(), y.clone()])?;
    let vanish = wild_poly(&HermTuple::new(vec![x.clone(), w.clone()])?)?;
    let vanishes = vanish.frob() <= tol;
    let j = w.sub(&HermMatrix::symmetrize(y.matrix() * y.matrix()));
    let ej = linalg::eigh(&j)?;
    let scale = tol.max(tol * j.frob());
    let psd = ej.values[0] >= -scale;
    let rank = ej.values.iter().filter(|v| v.abs() > scale).count();
    let j_rank_one = psd && rank == 1;
    let case = if rank == 0 {
        TvHatCase::JZero
    } else if tv_poly(&pair)?.min_eig()? >= -tol {
        TvHatCase::XInDp
    } else {
        TvHatCase::XNotInDp
    };
    Ok(TvHatClass { in_hat: vanishes && psd && rank <= 1, j_rank_one, case })
}

/// A dilation `[[X, tα], [tα*, β]]` staying in `{p ⪰ −tol}`.
#[derive(Clone, Debug)]
pub struct PolyDilation {
    pub alpha: ColumnTuple,
    pub beta: Vec<f64>,
    pub t: f64,
}

/// Searches column dilations of `X` inside `{p(Z) ⪰ −tol}` with a border of
/// length at least `sqrt(100·tol)`; near-zero borders are indistinguishable
/// from round-off since violations grow quadratically in t.
pub fn poly_dilation_search(
    kind: PolyKind,
    x: &HermTuple,
    directions: usize,
    seed: u64,
    tol: f64,
) -> Result<Option<PolyDilation>> {
    require_pair(x)?;
    let n = x.n();
    let t_min = (100.0 * tol).sqrt();
    let mut rng = linalg::rng_from_seed(seed);
    let grid = [-1.0, -0.5, 0.0, 0.5, 1.0];
    for _ in 0..directions {
        let v = linalg::random_unit_vector_with(&mut rng, 2 * n);
        let alpha = ColumnTuple::unflatten(2, n, &v);
        for b0 in grid {
            for b1 in grid {
                let beta = [b0, b1];
                let mut t = 1.0;
                while t >= t_min {
                    let z = column_dilation(x, &alpha.scale(t), &beta)?;
                    if kind.eval(&z)?.min_eig()? >= -tol {
                        return Ok(Some(PolyDilation { alpha: alpha.clone(), beta: beta.to_vec(), t }));
                    }
                    t *= 0.7;
                }
            }
        }
    }
    Ok(None)
}
