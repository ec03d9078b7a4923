//! Monic and homogeneous linear pencils and free spectrahedron membership.

use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::feasibility::{solve_affine_psd, FeasibilityProblem, FeasibilityStatus};
use crate::linalg::{
    self, c, frob, kron, null_space, random_herm_with, rng_from_seed, CMatrix, CVector, HermMatrix,
};

/// Default tolerance for optional tolerance arguments.
pub const DEFAULT_TOL: f64 = 1e-8;

/// A g-tuple of n×n Hermitian matrices.
#[derive(Clone, Debug, PartialEq)]
pub struct HermTuple {
    n: usize,
    mats: Vec<HermMatrix>,
}

impl HermTuple {
    pub fn new(mats: Vec<HermMatrix>) -> Result<Self> {
        let first = mats
            .first()
            .ok_or_else(|| Error::InvalidInput("a tuple needs at least one matrix".into()))?;
        let n = first.dim();
        if mats.iter().any(|m| m.dim() != n) {
            return Err(Error::Dimension("tuple matrices differ in size".into()));
        }
        Ok(HermTuple { n, mats })
    }

    pub fn zeros(g: usize, n: usize) -> Self {
        assert!(g >= 1);
        HermTuple { n, mats: vec![HermMatrix::zeros(n); g] }
    }

    /// Level-1 point.
    pub fn scalar(x: &[f64]) -> Self {
        Self::new(x.iter().map(|&v| HermMatrix::from_real_diag(&[v])).collect())
            .expect("non-empty point")
    }

    /// Tuple of diagonal matrices; `diags[j]` is the diagonal of the j-th entry.
    pub fn diagonal(diags: &[Vec<f64>]) -> Result<Self> {
        Self::new(diags.iter().map(|d| HermMatrix::from_real_diag(d)).collect())
    }

    pub fn random_with<R: Rng + ?Sized>(rng: &mut R, g: usize, n: usize) -> Self {
        HermTuple { n, mats: (0..g).map(|_| random_herm_with(rng, n)).collect() }
    }

    pub fn g(&self) -> usize {
        self.mats.len()
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn mats(&self) -> &[HermMatrix] {
        &self.mats
    }

    pub fn get(&self, j: usize) -> &HermMatrix {
        &self.mats[j]
    }

    pub fn map(&self, f: impl Fn(&HermMatrix) -> HermMatrix) -> Self {
        HermTuple::new(self.mats.iter().map(f).collect()).expect("shape preserved")
    }

    pub fn scale(&self, t: f64) -> Self {
        self.map(|m| m.scale(t))
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_same_shape(other)?;
        Ok(HermTuple {
            n: self.n,
            mats: self.mats.iter().zip(&other.mats).map(|(a, b)| a.add(b)).collect(),
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.scale(-1.0))
    }

    fn check_same_shape(&self, other: &Self) -> Result<()> {
        if self.g() != other.g() || self.n != other.n {
            return Err(Error::Dimension(format!(
                "tuples of shape (g={}, n={}) and (g={}, n={})",
                self.g(),
                self.n,
                other.g(),
                other.n
            )));
        }
        Ok(())
    }

    /// `V* X_j V` for each j.
    pub fn compress(&self, v: &CMatrix) -> Self {
        self.map(|m| m.congruence(v))
    }

    /// `U* X_j U` for each j.
    pub fn conjugate(&self, u: &CMatrix) -> Self {
        self.compress(u)
    }

    pub fn direct_sum(&self, other: &Self) -> Result<Self> {
        if self.g() != other.g() {
            return Err(Error::Dimension("direct sum of tuples with different g".into()));
        }
        let n = self.n + other.n;
        let mats = self
            .mats
            .iter()
            .zip(&other.mats)
            .map(|(a, b)| {
                let mut m = CMatrix::zeros(n, n);
                m.view_mut((0, 0), (self.n, self.n)).copy_from(a.matrix());
                m.view_mut((self.n, self.n), (other.n, other.n)).copy_from(b.matrix());
                HermMatrix::symmetrize(m)
            })
            .collect();
        Ok(HermTuple { n, mats })
    }

    pub fn direct_sum_all(parts: &[HermTuple]) -> Result<Self> {
        let (first, rest) = parts
            .split_first()
            .ok_or_else(|| Error::InvalidInput("empty direct sum".into()))?;
        rest.iter().try_fold(first.clone(), |acc, p| acc.direct_sum(p))
    }

    /// `I_m ⊗ X`.
    pub fn ampliate(&self, m: usize) -> Self {
        let id = CMatrix::identity(m, m);
        self.map(|x| HermMatrix::symmetrize(kron(&id, x.matrix())))
    }

    /// Frobenius norm of the stacked tuple.
    pub fn frob(&self) -> f64 {
        self.mats.iter().map(|m| m.frob().powi(2)).sum::<f64>().sqrt()
    }

    /// Largest Frobenius norm of a commutator `[X_i, X_j]`.
    pub fn max_commutator(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..self.g() {
            for j in (i + 1)..self.g() {
                let a = self.mats[i].matrix();
                let b = self.mats[j].matrix();
                worst = worst.max(frob(&(a * b - b * a)));
            }
        }
        worst
    }

    /// Max entrywise distance.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.mats
            .iter()
            .zip(&other.mats)
            .flat_map(|(a, b)| a.matrix().iter().zip(b.matrix().iter()).map(|(x, y)| (x - y).norm()))
            .fold(0.0, f64::max)
    }

    /// Largest operator-norm distance over the tuple entries.
    pub fn dist(&self, other: &Self) -> f64 {
        self.mats
            .iter()
            .zip(&other.mats)
            .map(|(a, b)| linalg::op_norm(&(a.matrix() - b.matrix())))
            .fold(0.0, f64::max)
    }
}

/// A g-tuple of complex column vectors of length n.
#[derive(Clone, Debug, PartialEq)]
pub struct ColumnTuple {
    n: usize,
    cols: Vec<CVector>,
}

impl ColumnTuple {
    pub fn new(cols: Vec<CVector>) -> Result<Self> {
        let n = cols
            .first()
            .ok_or_else(|| Error::InvalidInput("a column tuple needs g >= 1".into()))?
            .len();
        if cols.iter().any(|v| v.len() != n) {
            return Err(Error::Dimension("columns differ in length".into()));
        }
        Ok(ColumnTuple { n, cols })
    }

    pub fn g(&self) -> usize {
        self.cols.len()
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn cols(&self) -> &[CVector] {
        &self.cols
    }

    pub fn norm(&self) -> f64 {
        self.cols.iter().map(|v| v.norm_squared()).sum::<f64>().sqrt()
    }

    pub fn scale(&self, t: f64) -> Self {
        ColumnTuple { n: self.n, cols: self.cols.iter().map(|v| v * c(t, 0.0)).collect() }
    }

    /// Stacks the columns into one vector of length g·n.
    pub fn flatten(&self) -> CVector {
        CVector::from_iterator(self.g() * self.n, self.cols.iter().flat_map(|v| v.iter().cloned()))
    }

    pub fn unflatten(g: usize, n: usize, v: &CVector) -> Self {
        ColumnTuple {
            n,
            cols: (0..g).map(|j| v.rows(j * n, n).into_owned()).collect(),
        }
    }
}

/// Builds the (n+1)-dilation `[[X, α], [α*, β]]`.
pub fn column_dilation(x: &HermTuple, alpha: &ColumnTuple, beta: &[f64]) -> Result<HermTuple> {
    if alpha.g() != x.g() || beta.len() != x.g() || alpha.n() != x.n() {
        return Err(Error::Dimension("dilation data does not match the tuple".into()));
    }
    let n = x.n();
    let mats = (0..x.g())
        .map(|j| {
            let mut m = CMatrix::zeros(n + 1, n + 1);
            m.view_mut((0, 0), (n, n)).copy_from(x.get(j).matrix());
            for i in 0..n {
                m[(i, n)] = alpha.cols[j][i];
                m[(n, i)] = alpha.cols[j][i].conj();
            }
            m[(n, n)] = c(beta[j], 0.0);
            HermMatrix::symmetrize(m)
        })
        .collect();
    HermTuple::new(mats)
}

/// The monic pencil `L_A(x) = I − Σ A_j x_j`.
#[derive(Clone, Debug, PartialEq)]
pub struct MonicPencil {
    coeffs: HermTuple,
}

impl MonicPencil {
    pub fn new(coeffs: HermTuple) -> Self {
        MonicPencil { coeffs }
    }

    pub fn coeffs(&self) -> &HermTuple {
        &self.coeffs
    }

    pub fn g(&self) -> usize {
        self.coeffs.g()
    }

    /// Size of the coefficient matrices.
    pub fn d(&self) -> usize {
        self.coeffs.n()
    }

    fn check_arity(&self, g: usize) -> Result<()> {
        if g != self.g() {
            return Err(Error::Dimension(format!(
                "pencil has {} variables, point has {}",
                self.g(),
                g
            )));
        }
        Ok(())
    }
}

/// `Λ_A(X) = Σ A_j ⊗ X_j`.
pub fn eval_hom(a: &MonicPencil, x: &HermTuple) -> Result<HermMatrix> {
    a.check_arity(x.g())?;
    let dn = a.d() * x.n();
    let mut m = CMatrix::zeros(dn, dn);
    for (aj, xj) in a.coeffs.mats().iter().zip(x.mats()) {
        m += kron(aj.matrix(), xj.matrix());
    }
    Ok(HermMatrix::symmetrize(m))
}

/// `L_A(X) = I − Σ A_j ⊗ X_j`.
pub fn eval_monic(a: &MonicPencil, x: &HermTuple) -> Result<HermMatrix> {
    let h = eval_hom(a, x)?;
    Ok(HermMatrix::identity(h.dim()).sub(&h))
}

/// `Σ A_j ⊗ α_j`, of shape (d·n)×d.
pub fn eval_hom_col(a: &MonicPencil, alpha: &ColumnTuple) -> Result<CMatrix> {
    a.check_arity(alpha.g())?;
    let mut m = CMatrix::zeros(a.d() * alpha.n(), a.d());
    for (aj, col) in a.coeffs.mats().iter().zip(alpha.cols()) {
        let colm = CMatrix::from_column_slice(col.len(), 1, col.as_slice());
        m += kron(aj.matrix(), &colm);
    }
    Ok(m)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum MembershipStatus {
    Interior,
    Boundary,
    Outside,
}

#[derive(Clone, Debug)]
pub struct MembershipReport {
    pub status: MembershipStatus,
    pub min_eig: f64,
    /// Orthonormal kernel basis of `L_A(X)`, present iff on the boundary.
    pub kernel: Option<CMatrix>,
}

pub fn membership(a: &MonicPencil, x: &HermTuple, tol: f64) -> Result<MembershipReport> {
    if tol <= 0.0 {
        return Err(Error::InvalidInput("tolerance must be positive".into()));
    }
    let l = eval_monic(a, x)?;
    let min_eig = l.min_eig()?;
    let status = if min_eig > tol {
        MembershipStatus::Interior
    } else if min_eig >= -tol {
        MembershipStatus::Boundary
    } else {
        MembershipStatus::Outside
    };
    let kernel = match status {
        MembershipStatus::Boundary => Some(null_space(&l, tol)?),
        _ => None,
    };
    Ok(MembershipReport { status, min_eig, kernel })
}

/// Level-1 boundedness verdict.
#[derive(Clone, Debug, PartialEq)]
pub enum Boundedness {
    Bounded,
    UnboundedWitness(Vec<f64>),
    Inconclusive,
}

impl Boundedness {
    pub fn label(&self) -> &'static str {
        match self {
            Boundedness::Bounded => "bounded (level-1)",
            Boundedness::UnboundedWitness(_) => "unbounded",
            Boundedness::Inconclusive => "inconclusive (level-1)",
        }
    }
}

fn real_hom(a: &MonicPencil, y: &[f64]) -> HermMatrix {
    let mut m = CMatrix::zeros(a.d(), a.d());
    for (aj, &yj) in a.coeffs.mats().iter().zip(y) {
        m += aj.matrix() * c(yj, 0.0);
    }
    HermMatrix::symmetrize(m)
}

fn unit(y: &[f64]) -> Vec<f64> {
    let n = y.iter().map(|v| v * v).sum::<f64>().sqrt();
    y.iter().map(|v| v / n).collect()
}

/// Tests whether the level-1 recession cone `{y : Λ_A(y) ⪯ 0}` is trivial.
///
/// Runs a cone feasibility search for each coordinate functional `±e_i` and
/// `trials` random functionals, plus line searches along `trials` random
/// directions and the coordinate axes. The verdict concerns level 1 only.
pub fn bounded(a: &MonicPencil, trials: usize, seed: u64) -> Boundedness {
    const TOL: f64 = 1e-9;
    let g = a.g();
    let mut rng = rng_from_seed(seed);
    let witness = |y: &[f64]| -> Option<Vec<f64>> {
        if y.iter().all(|v| *v == 0.0) {
            return None;
        }
        let u = unit(y);
        let top = real_hom(a, &u).max_eig().ok()?;
        (top <= TOL).then_some(u)
    };

    // Line searches: an unbounded ray shows up as Λ_A(y) ⪯ 0.
    let mut directions: Vec<Vec<f64>> = Vec::new();
    for i in 0..g {
        for s in [1.0, -1.0] {
            let mut e = vec![0.0; g];
            e[i] = s;
            directions.push(e);
        }
    }
    for _ in 0..trials {
        directions.push((0..g).map(|_| linalg::gaussian(&mut rng)).collect());
    }
    for y in &directions {
        if let Some(u) = witness(y) {
            return Boundedness::UnboundedWitness(u);
        }
    }

    // Cone searches under the normalization c·y = 1.
    let neg: Vec<HermMatrix> = a.coeffs.mats().iter().map(|m| m.scale(-1.0)).collect();
    let mut functionals = directions.clone();
    functionals.truncate(2 * g);
    for _ in 0..trials {
        functionals.push((0..g).map(|_| linalg::gaussian(&mut rng)).collect());
    }
    let mut all_refuted = true;
    for cvec in functionals {
        let problem = FeasibilityProblem::new(
            HermMatrix::zeros(a.d()),
            neg.clone(),
            vec![cvec.clone()],
            vec![1.0],
        );
        let Ok(problem) = problem else {
            all_refuted = false;
            continue;
        };
        match solve_affine_psd(&problem, 2000, TOL) {
            Ok(res) => match res.status {
                FeasibilityStatus::Feasible => {
                    if let Some((s, _)) = &res.point {
                        if let Some(u) = witness(s) {
                            return Boundedness::UnboundedWitness(u);
                        }
                    }
                    all_refuted = false;
                }
                FeasibilityStatus::NoCertificate => {
                    if !res.infeasible {
                        all_refuted = false;
                    }
                }
            },
            Err(_) => all_refuted = false,
        }
    }
    if all_refuted {
        Boundedness::Bounded
    } else {
        Boundedness::Inconclusive
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn interval() -> MonicPencil {
        MonicPencil::new(HermTuple::diagonal(&[vec![1.0, -1.0]]).unwrap())
    }

    fn spin() -> MonicPencil {
        MonicPencil::new(
            HermTuple::new(vec![
                HermMatrix::from_real_diag(&[-1.0, 1.0]),
                HermMatrix::from_real_rows(&[&[0.0, -1.0], &[-1.0, 0.0]]).unwrap(),
            ])
            .unwrap(),
        )
    }

    fn close(a: &HermMatrix, b: &HermMatrix) -> bool {
        frob(&(a.matrix() - b.matrix())) < 1e-14
    }

    #[test]
    fn eval_monic_examples() {
        let x0 = HermTuple::zeros(2, 3);
        let l = eval_monic(&spin(), &x0).unwrap();
        assert!(close(&l, &HermMatrix::identity(6)));

        let l = eval_monic(&interval(), &HermTuple::scalar(&[0.5])).unwrap();
        assert!(close(&l, &HermMatrix::from_real_diag(&[0.5, 1.5])));

        let l = eval_monic(&spin(), &HermTuple::scalar(&[1.0, 0.0])).unwrap();
        assert!(close(&l, &HermMatrix::from_real_diag(&[2.0, 0.0])));

        assert!(eval_monic(&spin(), &HermTuple::scalar(&[1.0])).is_err());
    }

    #[test]
    fn eval_hom_examples() {
        let h = eval_hom(&interval(), &HermTuple::zeros(1, 2)).unwrap();
        assert_eq!(h.frob(), 0.0);
        let h = eval_hom(&interval(), &HermTuple::scalar(&[1.0])).unwrap();
        assert!(close(&h, &HermMatrix::from_real_diag(&[1.0, -1.0])));
        let alpha = ColumnTuple::new(vec![CVector::from_vec(vec![c(1.0, 0.0)])]).unwrap();
        let col = eval_hom_col(&interval(), &alpha).unwrap();
        assert_eq!(col.shape(), (2, 2));
        assert_eq!(col[(0, 0)], c(1.0, 0.0));
        assert_eq!(col[(1, 1)], c(-1.0, 0.0));
        assert_eq!(col[(0, 1)], c(0.0, 0.0));
    }

    #[test]
    fn membership_examples() {
        let r = membership(&interval(), &HermTuple::scalar(&[0.5]), DEFAULT_TOL).unwrap();
        assert_eq!(r.status, MembershipStatus::Interior);
        assert!((r.min_eig - 0.5).abs() < 1e-14);
        assert!(r.kernel.is_none());

        let x = HermTuple::new(vec![HermMatrix::from_real_rows(&[&[0.0, 2.0], &[2.0, 0.0]]).unwrap()])
            .unwrap();
        let r = membership(&interval(), &x, DEFAULT_TOL).unwrap();
        assert_eq!(r.status, MembershipStatus::Outside);
        assert!((r.min_eig + 1.0).abs() < 1e-14);

        let r = membership(&spin(), &HermTuple::scalar(&[1.0, 0.0]), DEFAULT_TOL).unwrap();
        assert_eq!(r.status, MembershipStatus::Boundary);
        assert_eq!(r.kernel.unwrap().ncols(), 1);
    }

    #[test]
    fn bounded_examples() {
        assert_eq!(bounded(&interval(), 4, 0), Boundedness::Bounded);
        let half = MonicPencil::new(HermTuple::scalar(&[1.0]));
        match bounded(&half, 4, 0) {
            Boundedness::UnboundedWitness(y) => assert!((y[0] + 1.0).abs() < 1e-12),
            other => panic!("expected a recession direction, got {other:?}"),
        }
        let naimark = MonicPencil::new(
            HermTuple::diagonal(&[vec![-1.0, 0.0, 1.0 / 3.0], vec![0.0, -1.0, 1.0 / 3.0]]).unwrap(),
        );
        assert_eq!(bounded(&naimark, 4, 1), Boundedness::Bounded);
    }

    #[test]
    fn bounded_detects_hidden_recession() {
        // L = diag(1 - x + y, 1 + x - y) is unbounded along (1, 1) only.
        let a = MonicPencil::new(
            HermTuple::diagonal(&[vec![1.0, -1.0], vec![-1.0, 1.0]]).unwrap(),
        );
        match bounded(&a, 2, 3) {
            Boundedness::UnboundedWitness(y) => {
                assert!((y[0] - y[1]).abs() < 1e-6);
            }
            other => panic!("expected unbounded, got {other:?}"),
        }
    }

    #[test]
    fn dilation_and_direct_sum_shapes() {
        let x = HermTuple::scalar(&[0.5]);
        let alpha = ColumnTuple::new(vec![CVector::from_vec(vec![c(0.5, 0.0)])]).unwrap();
        let z = column_dilation(&x, &alpha, &[0.5]).unwrap();
        assert_eq!(z.n(), 2);
        let e = linalg::eigh(z.get(0)).unwrap();
        assert!(e.values[0].abs() < 1e-14 && (e.values[1] - 1.0).abs() < 1e-14);
        let s = x.direct_sum(&HermTuple::scalar(&[2.0])).unwrap();
        assert!(close(s.get(0), &HermMatrix::from_real_diag(&[0.5, 2.0])));
        let amp = x.ampliate(3);
        assert!(close(amp.get(0), &HermMatrix::from_real_diag(&[0.5; 3])));
    }
}
