//! Semidefinite feasibility and its uses: matrix convex hull membership via
//! Choi matrices, spectrahedral inclusion, Arveson tests inside hulls, polar
//! duality sampling and membership in projected spectrahedra.

mod solver;

pub use solver::{solve_affine_psd, FeasibilityProblem, FeasibilityResult, FeasibilityStatus};

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::linalg::{
    self, c, derive_seed, frob, herm_basis, herm_coords, random_isometry_with, rng_from_seed, CMatrix,
    CVector, HermMatrix,
};
use crate::pencil::{
    bounded, eval_hom, eval_monic, Boundedness, ColumnTuple, HermTuple, MonicPencil,
};

/// Iteration cap handed to the solver by the applications below.
pub const MAX_ITER: usize = 5000;
/// Tolerance on certificate residuals.
pub const CERT_TOL: f64 = 1e-6;

/// `φ(M) = Σ_ab M_ab C[a,b]` for the map with Choi matrix `C` (blocks n×n).
pub fn choi_apply(choi: &CMatrix, d: usize, n: usize, m: &CMatrix) -> CMatrix {
    let mut out = CMatrix::zeros(n, n);
    for a in 0..d {
        for b in 0..d {
            let w = m[(a, b)];
            if w.norm() == 0.0 {
                continue;
            }
            out += choi.view((a * n, b * n), (n, n)) * w;
        }
    }
    out
}

/// Choi matrix of a unital completely positive map sending `Ω_j` to `X_j`.
#[derive(Clone, Debug)]
pub struct ChoiCertificate {
    pub choi: HermMatrix,
    pub d: usize,
    pub n: usize,
    pub unital_residual: f64,
    pub match_residual: f64,
    pub min_eig: f64,
}

impl ChoiCertificate {
    fn build(choi: HermMatrix, d: usize, omega: &HermTuple, targets: &[CMatrix]) -> Result<Self> {
        let n = choi.dim() / d;
        let min_eig = choi.min_eig()?;
        let cm = choi.matrix();
        let unital = choi_apply(cm, d, n, &CMatrix::identity(d, d));
        let unital_residual = frob(&(unital - CMatrix::identity(n, n)));
        let match_residual = omega
            .mats()
            .iter()
            .zip(targets)
            .map(|(o, x)| frob(&(choi_apply(cm, d, n, o.matrix()) - x)))
            .fold(0.0, f64::max);
        Ok(ChoiCertificate { choi, d, n, unital_residual, match_residual, min_eig })
    }

    pub fn apply(&self, m: &CMatrix) -> CMatrix {
        choi_apply(self.choi.matrix(), self.d, self.n, m)
    }

    pub fn is_valid(&self) -> bool {
        self.min_eig >= -CERT_TOL && self.unital_residual <= CERT_TOL && self.match_residual <= CERT_TOL
    }
}

/// Feasibility problem over Choi matrices of maps `M_d → M_n`, where the
/// real linear map `f` of the Choi matrix must equal `targets`.
fn choi_problem(
    d: usize,
    n: usize,
    f: impl Fn(&CMatrix) -> Vec<f64>,
    targets: Vec<f64>,
) -> Result<FeasibilityProblem> {
    let basis = herm_basis(d * n);
    let cols: Vec<Vec<f64>> = basis.iter().map(|b| f(b.matrix())).collect();
    let rows = (0..targets.len())
        .map(|i| cols.iter().map(|col| col[i]).collect())
        .collect();
    FeasibilityProblem::new(HermMatrix::zeros(d * n), basis, rows, targets)
}

fn check_arity(a: usize, b: usize) -> Result<()> {
    if a != b {
        return Err(Error::Dimension(format!("tuples have {a} and {b} entries")));
    }
    Ok(())
}

#[derive(Clone, Debug)]
pub enum HullVerdict {
    Member(Box<ChoiCertificate>),
    NonMember(String),
    Unknown(String),
}

impl HullVerdict {
    pub fn label(&self) -> &'static str {
        match self {
            HullVerdict::Member(_) => "Member",
            HullVerdict::NonMember(_) => "NonMember",
            HullVerdict::Unknown(_) => "Unknown",
        }
    }
}

/// Decides whether `X` lies in the matrix convex hull of `Ω` by searching for
/// a unital completely positive map with `Ω_j ↦ X_j`.
pub fn hull_membership(omega: &HermTuple, x: &HermTuple, tol: f64) -> Result<HullVerdict> {
    check_arity(omega.g(), x.g())?;
    let gen_pencil = MonicPencil::new(omega.clone());
    if eval_monic(&gen_pencil, omega)?.min_eig()? >= -tol {
        let m = eval_monic(&gen_pencil, x)?.min_eig()?;
        if m < -tol {
            return Ok(HullVerdict::NonMember(format!(
                "L_Omega(X) has eigenvalue {m:.6e} < 0"
            )));
        }
    }
    let (d, n) = (omega.n(), x.n());
    let targets: Vec<CMatrix> = x.mats().iter().map(|m| m.matrix().clone()).collect();
    let mut t = herm_coords(&HermMatrix::identity(n));
    for xm in x.mats() {
        t.extend(herm_coords(xm));
    }
    let f = |cm: &CMatrix| {
        let mut out = herm_coords(&HermMatrix::symmetrize(choi_apply(cm, d, n, &CMatrix::identity(d, d))));
        for o in omega.mats() {
            out.extend(herm_coords(&HermMatrix::symmetrize(choi_apply(cm, d, n, o.matrix()))));
        }
        out
    };
    let problem = match choi_problem(d, n, f, t) {
        Ok(p) => p,
        Err(e) => return Err(e),
    };
    match solve_affine_psd(&problem, MAX_ITER, tol) {
        Err(Error::InvalidProblem(_)) => Ok(HullVerdict::NonMember(
            "no unital linear map sends the generator to the point".into(),
        )),
        Err(e) => Err(e),
        Ok(res) => match (res.status, res.point) {
            (FeasibilityStatus::Feasible, Some((_, z))) => {
                let cert = ChoiCertificate::build(z, d, omega, &targets)?;
                if cert.is_valid() {
                    Ok(HullVerdict::Member(Box::new(cert)))
                } else {
                    Ok(HullVerdict::Unknown("certificate failed verification".into()))
                }
            }
            _ => Ok(HullVerdict::Unknown(format!(
                "solver found no certificate (residual {:.3e}{})",
                res.residual,
                if res.infeasible { ", none in the search region" } else { "" }
            ))),
        },
    }
}

#[derive(Clone, Debug)]
pub enum InclusionVerdict {
    Included(Box<ChoiCertificate>),
    NotIncluded(HermTuple),
    Unknown(String),
}

impl InclusionVerdict {
    pub fn label(&self) -> &'static str {
        match self {
            InclusionVerdict::Included(_) => "Included",
            InclusionVerdict::NotIncluded(_) => "NotIncluded",
            InclusionVerdict::Unknown(_) => "Unknown",
        }
    }
}

/// Tests `𝒟_B ⊆ 𝒟_A`.
pub fn inclusion(b: &MonicPencil, a: &MonicPencil, level_cap: usize, tol: f64) -> Result<InclusionVerdict> {
    check_arity(b.g(), a.g())?;
    if let Boundedness::UnboundedWitness(y) = bounded(b, 8, 0) {
        return Ok(InclusionVerdict::Unknown(format!(
            "inner spectrahedron is unbounded along {y:?}; unital certificates do not apply"
        )));
    }
    if let HullVerdict::Member(cert) = hull_membership(b.coeffs(), a.coeffs(), tol)? {
        return Ok(InclusionVerdict::Included(cert));
    }
    if let Some(x) = inclusion_witness(b, a, level_cap, tol)? {
        return Ok(InclusionVerdict::NotIncluded(x));
    }
    Ok(InclusionVerdict::Unknown("no certificate and no separating point found".into()))
}

/// Searches boundary points of `𝒟_B` that violate `L_A ⪰ 0`.
fn inclusion_witness(b: &MonicPencil, a: &MonicPencil, level_cap: usize, tol: f64) -> Result<Option<HermTuple>> {
    let g = b.g();
    let mut candidates: Vec<HermTuple> = Vec::new();
    if g <= 4 {
        let total = 3usize.pow(g as u32);
        for code in 1..total {
            let mut k = code;
            let y: Vec<f64> = (0..g)
                .map(|_| {
                    let v = (k % 3) as f64 - 1.0;
                    k /= 3;
                    v
                })
                .collect();
            candidates.push(HermTuple::scalar(&y));
        }
    }
    let mut rng = rng_from_seed(0x1c1);
    for level in 1..=level_cap.max(1) {
        for _ in 0..64 {
            candidates.push(HermTuple::random_with(&mut rng, g, level));
        }
    }
    for y in candidates {
        let top = eval_hom(b, &y)?.max_eig()?;
        if top <= tol {
            continue;
        }
        let x = y.scale(1.0 / top);
        if eval_monic(a, &x)?.min_eig()? < -tol {
            return Ok(Some(x));
        }
    }
    Ok(None)
}

/// A dilation `[[X, α], [α*, β]]` inside the hull with `α ≠ 0`.
#[derive(Clone, Debug)]
pub struct HullDilationWitness {
    pub alpha: ColumnTuple,
    pub beta: Vec<f64>,
    pub dilation: HermTuple,
    pub certificate: ChoiCertificate,
}

#[derive(Clone, Debug)]
pub enum HullArvesonVerdict {
    /// No dilation found along any sampled direction (sampling-based).
    Boundary { directions_tried: usize },
    NotBoundary(Box<HullDilationWitness>),
    Unknown(String),
}

impl HullArvesonVerdict {
    pub fn label(&self) -> &'static str {
        match self {
            HullArvesonVerdict::Boundary { .. } => "Boundary",
            HullArvesonVerdict::NotBoundary(_) => "NotBoundary",
            HullArvesonVerdict::Unknown(_) => "Unknown",
        }
    }
}

/// Normalization steps for `Re⟨c, α⟩`, smallest first. The admissible α
/// form a convex set containing 0, so a step is feasible whenever a larger
/// one is: an infeasible smallest step rules out the whole direction, while
/// larger steps only serve to find a better conditioned witness.
const DELTA_LADDER: [f64; 3] = [0.004, 0.03, 0.25];

/// Searches for a column dilation of `X` inside `mco{Ω}` with nonzero `α`.
///
/// Tries every real and imaginary coordinate direction plus `directions`
/// random ones per round, over two rounds. Conjugating by `I ⊕ e^{iθ}` keeps
/// the hull, so an imaginary coordinate direction is feasible exactly when
/// its real twin is; a refuted twin settles it without another solve.
pub fn arveson_in_hull(
    omega: &HermTuple,
    x: &HermTuple,
    directions: usize,
    tol: f64,
    seed: u64,
) -> Result<HullArvesonVerdict> {
    check_arity(omega.g(), x.g())?;
    match hull_membership(omega, x, tol)? {
        HullVerdict::Member(_) => {}
        HullVerdict::NonMember(why) => {
            return Err(Error::Precondition(format!("point is not in the hull: {why}")))
        }
        HullVerdict::Unknown(why) => {
            return Ok(HullArvesonVerdict::Unknown(format!("hull membership undecided: {why}")))
        }
    }
    let (g, n) = (x.g(), x.n());
    let scale = omega.mats().iter().map(|m| linalg::op_norm(m.matrix())).fold(1.0f64, f64::max);

    // (direction, index of its real twin)
    let mut dirs: Vec<(ColumnTuple, Option<usize>)> = Vec::new();
    for j in 0..g {
        for i in 0..n {
            let re = dirs.len();
            for (k, unit) in [c(1.0, 0.0), c(0.0, 1.0)].into_iter().enumerate() {
                let mut cols = vec![CVector::zeros(n); g];
                cols[j][i] = unit;
                dirs.push((ColumnTuple::new(cols).expect("g >= 1"), (k == 1).then_some(re)));
            }
        }
    }
    for round in 0..2u64 {
        let mut rng = rng_from_seed(derive_seed(seed, round));
        for _ in 0..directions {
            let v = linalg::random_unit_vector_with(&mut rng, g * n);
            dirs.push((ColumnTuple::unflatten(g, n, &v), None));
        }
    }

    let mut refuted = vec![false; dirs.len()];
    for (k, (dir, twin)) in dirs.iter().enumerate() {
        if twin.is_some_and(|t| refuted[t]) {
            refuted[k] = true;
            continue;
        }
        for (step, delta) in DELTA_LADDER.into_iter().enumerate() {
            match dilation_attempt(omega, x, dir, delta * scale, tol)? {
                Attempt::Found(w) => return Ok(HullArvesonVerdict::NotBoundary(w)),
                Attempt::Failed => {
                    refuted[k] = step == 0;
                    break;
                }
                Attempt::Inconclusive => {}
            }
        }
    }
    let undecided = refuted.iter().filter(|r| !**r).count();
    if undecided > 0 {
        return Ok(HullArvesonVerdict::Unknown(format!(
            "{undecided} of {} directions ended without a solver decision",
            dirs.len()
        )));
    }
    Ok(HullArvesonVerdict::Boundary { directions_tried: dirs.len() })
}

enum Attempt {
    Found(Box<HullDilationWitness>),
    Failed,
    Inconclusive,
}

fn dilation_attempt(
    omega: &HermTuple,
    x: &HermTuple,
    dir: &ColumnTuple,
    delta: f64,
    tol: f64,
) -> Result<Attempt> {
    let (g, n, d) = (x.g(), x.n(), omega.n());
    let m = n + 1;
    let mut t = herm_coords(&HermMatrix::identity(m));
    for xm in x.mats() {
        t.extend(herm_coords(xm));
    }
    t.push(delta);
    let f = |cm: &CMatrix| {
        let mut out = herm_coords(&HermMatrix::symmetrize(choi_apply(cm, d, m, &CMatrix::identity(d, d))));
        let mut normal = 0.0;
        for (j, o) in omega.mats().iter().enumerate() {
            let img = choi_apply(cm, d, m, o.matrix());
            let top = img.view((0, 0), (n, n)).into_owned();
            out.extend(herm_coords(&HermMatrix::symmetrize(top)));
            for i in 0..n {
                normal += (dir.cols()[j][i].conj() * img[(i, n)]).re;
            }
        }
        out.push(normal);
        out
    };
    let problem = match choi_problem(d, m, f, t) {
        Ok(p) => p,
        Err(e) => return Err(e),
    };
    let res = match solve_affine_psd(&problem, MAX_ITER, tol) {
        Err(Error::InvalidProblem(_)) => return Ok(Attempt::Failed),
        Err(e) => return Err(e),
        Ok(r) => r,
    };
    match (res.status, res.point) {
        (FeasibilityStatus::Feasible, Some((_, z))) => {
            let cm = z.matrix().clone();
            let mut cols = Vec::with_capacity(g);
            let mut beta = Vec::with_capacity(g);
            let mut dil = Vec::with_capacity(g);
            for o in omega.mats() {
                let img = HermMatrix::symmetrize(choi_apply(&cm, d, m, o.matrix()));
                cols.push(CVector::from_fn(n, |i, _| img.matrix()[(i, n)]));
                beta.push(img.matrix()[(n, n)].re);
                dil.push(img);
            }
            let dilation = HermTuple::new(dil)?;
            let targets: Vec<CMatrix> = dilation.mats().iter().map(|h| h.matrix().clone()).collect();
            let certificate = ChoiCertificate::build(z, d, omega, &targets)?;
            let alpha = ColumnTuple::new(cols)?;
            let top_ok = (0..g).all(|j| {
                frob(&(dilation.get(j).matrix().view((0, 0), (n, n)) - x.get(j).matrix())) <= CERT_TOL
            });
            if certificate.is_valid() && top_ok && alpha.norm() > 0.5 * delta / dir.norm().max(1e-300) {
                Ok(Attempt::Found(Box::new(HullDilationWitness { alpha, beta, dilation, certificate })))
            } else {
                Ok(Attempt::Inconclusive)
            }
        }
        _ if res.infeasible => Ok(Attempt::Failed),
        _ => Ok(Attempt::Inconclusive),
    }
}

#[derive(Clone, Debug, serde::Serialize)]
pub struct DualCounterexample {
    pub sample: usize,
    pub in_spectrahedron: bool,
    pub polar_holds: bool,
    pub min_eig: f64,
}

#[derive(Clone, Debug, serde::Serialize)]
pub struct DualCheckReport {
    pub level: usize,
    pub samples: usize,
    pub battery_size: usize,
    pub inside: usize,
    pub outside: usize,
    pub counterexamples: Vec<DualCounterexample>,
}

/// Hull members `V*(I_m ⊗ Ω)V` used as the test battery, always including Ω.
pub fn hull_battery(omega: &HermTuple, level: usize, seed: u64) -> Vec<HermTuple> {
    let mut out = vec![omega.clone()];
    let mut rng = rng_from_seed(derive_seed(seed, u64::MAX));
    let d = omega.n();
    let mut sizes = vec![1, 2, level.max(1)];
    sizes.dedup();
    for m in 1..=2usize {
        for &k in &sizes {
            for _ in 0..2 {
                let k = k.min(m * d);
                let v = random_isometry_with(&mut rng, m * d, k);
                out.push(omega.ampliate(m).compress(&v));
            }
        }
    }
    out
}

/// Samples `A` at the given level and compares `A ∈ 𝒟_Ω` against
/// `L_A(Y) ⪰ 0` on a battery of hull members `Y`.
pub fn polar_dual_check(
    omega: &HermTuple,
    level: usize,
    samples: usize,
    seed: u64,
    tol: f64,
) -> Result<DualCheckReport> {
    let pencil = MonicPencil::new(omega.clone());
    let self_eig = eval_monic(&pencil, omega)?.min_eig()?;
    if self_eig < -tol {
        return Err(Error::Precondition(format!(
            "generator is not in its own spectrahedron (min eigenvalue {self_eig:.3e})"
        )));
    }
    if level == 0 {
        return Err(Error::InvalidInput("level must be at least 1".into()));
    }
    let battery = hull_battery(omega, level, seed);
    let g = omega.g();
    let outcomes: Vec<Result<(bool, bool, f64)>> = (0..samples)
        .into_par_iter()
        .map(|i| {
            let mut rng = rng_from_seed(derive_seed(seed, i as u64));
            let dir = HermTuple::random_with(&mut rng, g, level);
            let top = eval_hom(&pencil, &dir)?.max_eig()?;
            let r: f64 = {
                use rand::Rng;
                let u: f64 = rng.random();
                if u < 0.5 { 0.9 * u / 0.5 } else { 1.1 + 0.9 * (u - 0.5) / 0.5 }
            };
            let a = if top > 0.0 { dir.scale(r / top) } else { dir.scale(r) };
            let lhs_val = eval_monic(&pencil, &a)?.min_eig()?;
            let lhs = lhs_val >= -tol;
            let ap = MonicPencil::new(a);
            let mut rhs = true;
            for y in &battery {
                if eval_monic(&ap, y)?.min_eig()? < -tol {
                    rhs = false;
                    break;
                }
            }
            Ok((lhs, rhs, lhs_val))
        })
        .collect();
    let mut report = DualCheckReport {
        level,
        samples,
        battery_size: battery.len(),
        inside: 0,
        outside: 0,
        counterexamples: vec![],
    };
    for (i, o) in outcomes.into_iter().enumerate() {
        let (lhs, rhs, val) = o?;
        if lhs {
            report.inside += 1;
        } else {
            report.outside += 1;
        }
        if lhs != rhs {
            report.counterexamples.push(DualCounterexample {
                sample: i,
                in_spectrahedron: lhs,
                polar_holds: rhs,
                min_eig: val,
            });
        }
    }
    Ok(report)
}

#[derive(Clone, Debug)]
pub enum DropVerdict {
    Member { hidden: HermTuple, residual: f64, iterations: usize },
    NoCertificate { residual: f64, iterations: usize },
}

impl DropVerdict {
    pub fn label(&self) -> &'static str {
        match self {
            DropVerdict::Member { .. } => "Member",
            DropVerdict::NoCertificate { .. } => "NoCertificate",
        }
    }
}

/// Membership in the projection of `𝒟_lift` onto its first `visible`
/// variables: searches hidden Hermitian `W` with `L_lift(X, W) ⪰ 0`.
pub fn spectrahedrop_membership(
    lift: &MonicPencil,
    visible: usize,
    point: &HermTuple,
    tol: f64,
) -> Result<DropVerdict> {
    if visible == 0 || visible > lift.g() {
        return Err(Error::Dimension(format!(
            "visible count {visible} out of range for a {}-variable pencil",
            lift.g()
        )));
    }
    check_arity(visible, point.g())?;
    let n = point.n();
    let hidden = lift.g() - visible;
    let mut full = point.mats().to_vec();
    full.extend(std::iter::repeat(HermMatrix::zeros(n)).take(hidden));
    let base = eval_monic(lift, &HermTuple::new(full)?)?;
    if hidden == 0 {
        let m = base.min_eig()?;
        let residual = (-m).max(0.0);
        return Ok(if residual <= tol {
            DropVerdict::Member { hidden: HermTuple::zeros(1, n), residual, iterations: 0 }
        } else {
            DropVerdict::NoCertificate { residual, iterations: 0 }
        });
    }
    let basis = herm_basis(n);
    let mut gens = Vec::with_capacity(hidden * basis.len());
    for k in 0..hidden {
        let ak = lift.coeffs().get(visible + k);
        for bm in &basis {
            gens.push(HermMatrix::symmetrize(-linalg::kron(ak.matrix(), bm.matrix())));
        }
    }
    let problem = FeasibilityProblem::new(base, gens, vec![], vec![])?;
    let res = solve_affine_psd(&problem, MAX_ITER, tol)?;
    match (res.status, res.point) {
        (FeasibilityStatus::Feasible, Some((s, _))) => {
            let nb = basis.len();
            let ws = (0..hidden)
                .map(|k| linalg::herm_from_coords(n, &s[k * nb..(k + 1) * nb]))
                .collect();
            Ok(DropVerdict::Member {
                hidden: HermTuple::new(ws)?,
                residual: res.residual,
                iterations: res.iterations,
            })
        }
        _ => Ok(DropVerdict::NoCertificate { residual: res.residual, iterations: res.iterations }),
    }
}
