//! Affine ∩ PSD feasibility.
//!
//! The affine family is reparametrized over an orthonormal basis of its
//! direction space (real coordinates of Hermitian matrices). A Dykstra
//! alternating-projection phase runs first; if it stalls, a log-barrier
//! phase maximizes the smallest eigenvalue over a large ball, and a face
//! polish step removes the O(1/τ) gap left on degenerate problems.

use nalgebra::DVector;

use crate::error::{Error, Result};
use crate::linalg::{
    c, eigh, herm_coords, herm_from_coords, lstsq_real, select_columns, svd_null_space_real, CMatrix, CVector,
    HermMatrix, RMatrix,
};

/// `base + Σ s_i generators_i` subject to `rows · s = targets`, intersected
/// with the PSD cone.
#[derive(Clone, Debug)]
pub struct FeasibilityProblem {
    dim: usize,
    base: HermMatrix,
    generators: Vec<HermMatrix>,
    rows: Vec<Vec<f64>>,
    targets: Vec<f64>,
}

impl FeasibilityProblem {
    pub fn new(
        base: HermMatrix,
        generators: Vec<HermMatrix>,
        rows: Vec<Vec<f64>>,
        targets: Vec<f64>,
    ) -> Result<Self> {
        let dim = base.dim();
        if generators.iter().any(|g| g.dim() != dim) {
            return Err(Error::InvalidProblem("generator size differs from base".into()));
        }
        if rows.len() != targets.len() || rows.iter().any(|r| r.len() != generators.len()) {
            return Err(Error::InvalidProblem("constraint rows do not match generators".into()));
        }
        if rows.iter().flatten().chain(&targets).any(|v| !v.is_finite()) {
            return Err(Error::InvalidProblem("non-finite constraint data".into()));
        }
        Ok(FeasibilityProblem { dim, base, generators, rows, targets })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn num_vars(&self) -> usize {
        self.generators.len()
    }

    /// `base + Σ s_i generators_i`.
    pub fn evaluate(&self, s: &[f64]) -> HermMatrix {
        let mut m = self.base.matrix().clone();
        for (g, &si) in self.generators.iter().zip(s) {
            m += g.matrix() * c(si, 0.0);
        }
        HermMatrix::symmetrize(m)
    }

    /// Largest violation of the equality constraints.
    pub fn affine_residual(&self, s: &[f64]) -> f64 {
        self.rows
            .iter()
            .zip(&self.targets)
            .map(|(r, t)| (r.iter().zip(s).map(|(a, b)| a * b).sum::<f64>() - t).abs())
            .fold(0.0, f64::max)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FeasibilityStatus {
    Feasible,
    NoCertificate,
}

#[derive(Clone, Debug)]
pub struct FeasibilityResult {
    pub status: FeasibilityStatus,
    /// Parameters `s` and the PSD matrix `Z`.
    pub point: Option<(Vec<f64>, HermMatrix)>,
    pub residual: f64,
    pub iterations: usize,
    /// Set when the barrier phase showed that no point within its search ball
    /// has `λ_min(Z) ≥ −tol`. Numerical evidence, not a certificate.
    pub infeasible: bool,
}

/// Reduced form: `z(w) = z0 + B w` in Hermitian coordinates with `B`
/// orthonormal, and `s(w) = s0 + T w`.
struct Reduced {
    dim: usize,
    z0: DVector<f64>,
    basis: RMatrix,
    gens: Vec<CMatrix>,
    s0: DVector<f64>,
    to_s: RMatrix,
    consistency: f64,
}

impl Reduced {
    fn build(p: &FeasibilityProblem) -> Result<Self> {
        let m = p.generators.len();
        let d2 = p.dim * p.dim;
        let (s0, null) = if p.rows.is_empty() {
            (DVector::zeros(m), RMatrix::identity(m, m))
        } else {
            let e = RMatrix::from_fn(p.rows.len(), m, |i, j| p.rows[i][j]);
            let f = DVector::from_vec(p.targets.clone());
            let s0 = lstsq_real(&e, &f, 1e-12);
            let res = (&e * &s0 - &f).amax();
            let scale = f.amax().max(1.0);
            if res > 1e-9 * scale {
                return Err(Error::InvalidProblem(format!(
                    "equality constraints are inconsistent (residual {res:.3e})"
                )));
            }
            (s0, svd_null_space_real(&e, 1e-11))
        };
        let mut gm = RMatrix::zeros(d2, m);
        for (k, g) in p.generators.iter().enumerate() {
            gm.set_column(k, &DVector::from_vec(herm_coords(g)));
        }
        let consistency = p.affine_residual(s0.as_slice());
        let c0 = DVector::from_vec(herm_coords(&p.base)) + &gm * &s0;
        let full = &gm * &null;
        let q_dim = full.ncols();
        let (basis, to_s) = if q_dim == 0 {
            (RMatrix::zeros(d2, 0), RMatrix::zeros(m, 0))
        } else {
            let svd = full.clone().svd(true, true);
            let u = svd.u.expect("requested u");
            let vt = svd.v_t.expect("requested v_t");
            let sv = &svd.singular_values;
            let big = sv.iter().cloned().fold(0.0, f64::max);
            let keep: Vec<usize> = (0..sv.len()).filter(|&k| sv[k] > 1e-11 * big.max(1e-300)).collect();
            let b = RMatrix::from_fn(d2, keep.len(), |i, k| u[(i, keep[k])]);
            // u_null = V Σ^{-1} w, so s = s0 + N V Σ^{-1} w.
            let vs = RMatrix::from_fn(null.ncols(), keep.len(), |i, k| vt[(keep[k], i)] / sv[keep[k]]);
            (b, &null * vs)
        };
        // Remove the component of c0 inside the direction space.
        let shift = basis.transpose() * &c0;
        let z0 = &c0 - &basis * &shift;
        let s0 = s0 - &to_s * &shift;
        let n = p.dim;
        let gens = (0..basis.ncols())
            .map(|k| {
                herm_from_coords(n, basis.column(k).as_slice()).into_matrix()
            })
            .collect();
        Ok(Reduced { dim: n, z0, basis, gens, s0, to_s, consistency })
    }

    fn q(&self) -> usize {
        self.basis.ncols()
    }

    fn z_of(&self, w: &DVector<f64>) -> HermMatrix {
        let z = &self.z0 + &self.basis * w;
        herm_from_coords(self.dim, z.as_slice())
    }

    fn w_of_coords(&self, z: &DVector<f64>) -> DVector<f64> {
        self.basis.transpose() * (z - &self.z0)
    }

    fn s_of(&self, w: &DVector<f64>) -> Vec<f64> {
        (&self.s0 + &self.to_s * w).as_slice().to_vec()
    }

    fn neg_part(&self, w: &DVector<f64>) -> Result<f64> {
        Ok((-self.z_of(w).min_eig()?).max(0.0))
    }
}

fn psd_clip(n: usize, z: &DVector<f64>) -> Result<DVector<f64>> {
    let h = herm_from_coords(n, z.as_slice());
    let clipped = h.map_spectrum(|x| x.max(0.0))?;
    Ok(DVector::from_vec(herm_coords(&clipped)))
}

pub fn solve_affine_psd(p: &FeasibilityProblem, max_iter: usize, tol: f64) -> Result<FeasibilityResult> {
    if tol <= 0.0 {
        return Err(Error::InvalidProblem("tolerance must be positive".into()));
    }
    let r = Reduced::build(p)?;
    let finish = |w: &DVector<f64>, iterations: usize| -> Result<FeasibilityResult> {
        let s = r.s_of(w);
        let z = p.evaluate(&s);
        let neg = (-z.min_eig()?).max(0.0);
        let residual = neg.max(p.affine_residual(&s)).max(r.consistency);
        let status = if residual <= tol {
            FeasibilityStatus::Feasible
        } else {
            FeasibilityStatus::NoCertificate
        };
        Ok(FeasibilityResult { status, point: Some((s, z)), residual, iterations, infeasible: false })
    };

    if r.q() == 0 {
        // The affine set is a single point, so the verdict is exact.
        let mut res = finish(&DVector::zeros(0), 0)?;
        res.infeasible = res.status == FeasibilityStatus::NoCertificate;
        return Ok(res);
    }

    // Dykstra alternating projections.
    let n = r.dim;
    let proj_affine = |z: &DVector<f64>| -> DVector<f64> {
        let w = r.w_of_coords(z);
        &r.z0 + &r.basis * w
    };
    let mut x = r.z0.clone();
    let mut pa = DVector::zeros(x.len());
    let mut pc = DVector::zeros(x.len());
    let mut y = proj_affine(&x);
    let budget = max_iter.min(400);
    let mut iterations = 0;
    let mut last_check = f64::INFINITY;
    for k in 0..budget {
        iterations = k + 1;
        y = proj_affine(&(&x + &pa));
        pa = &x + &pa - &y;
        let xn = psd_clip(n, &(&y + &pc))?;
        pc = &y + &pc - &xn;
        x = xn;
        if k % 25 == 24 {
            let w = r.w_of_coords(&y);
            let res = r.neg_part(&w)?;
            if res <= tol {
                return finish(&w, iterations);
            }
            if res > 0.5 * last_check {
                break;
            }
            last_check = res;
        }
    }
    let w0 = r.w_of_coords(&y);
    if r.neg_part(&w0)? <= tol {
        return finish(&w0, iterations);
    }

    let barrier = Barrier::new(&r, &w0);
    let out = barrier.run(tol, max_iter)?;
    iterations += out.iterations;
    let mut res = finish(&out.w, iterations)?;
    if res.status == FeasibilityStatus::NoCertificate {
        res.infeasible = out.infeasible;
    }
    Ok(res)
}

struct BarrierOutcome {
    w: DVector<f64>,
    infeasible: bool,
    iterations: usize,
}

struct Barrier<'a> {
    r: &'a Reduced,
    radius2: f64,
    start: DVector<f64>,
}

/// Whitened data at a strictly feasible `(w, t)`.
struct Local {
    phi_logdet: f64,
    /// Hermitian coordinates of `L⁻¹ H_i L⁻*` for each direction `H_i`, then
    /// of `−L⁻¹L⁻*` for the `t` direction, where `S = LL*`.
    v: RMatrix,
}

/// The real matrix of `X ↦ M X M*` on Hermitian coordinates, built from
/// outer products of the columns of `M`.
fn congruence_matrix(m: &CMatrix) -> RMatrix {
    let n = m.nrows();
    let r = std::f64::consts::FRAC_1_SQRT_2;
    let cols: Vec<CVector> = (0..n).map(|i| m.column(i).into_owned()).collect();
    let outer = |a: usize, b: usize| &cols[a] * cols[b].adjoint();
    let mut w = RMatrix::zeros(n * n, n * n);
    let mut put = |k: usize, img: CMatrix| {
        w.set_column(k, &DVector::from_vec(herm_coords(&HermMatrix::symmetrize(img))));
    };
    for i in 0..n {
        put(i, outer(i, i));
    }
    let pairs = n * (n - 1) / 2;
    let mut k = 0;
    for i in 0..n {
        for j in (i + 1)..n {
            let (p, q) = (outer(i, j), outer(j, i));
            put(n + k, (&p + &q) * c(r, 0.0));
            put(n + pairs + k, (p - q) * c(0.0, r));
            k += 1;
        }
    }
    w
}

impl<'a> Barrier<'a> {
    fn new(r: &'a Reduced, w0: &DVector<f64>) -> Self {
        let rad = 10.0 * (1.0 + w0.norm()) + 10.0 * (1.0 + r.z0.norm());
        Barrier { r, radius2: rad * rad, start: w0.clone() }
    }

    /// `Z(w) − tI`, factored; None if not positive definite.
    fn local(&self, w: &DVector<f64>, t: f64, with_k: bool) -> Option<Local> {
        let n = self.r.dim;
        let mut s = self.r.z_of(w).into_matrix();
        for i in 0..n {
            s[(i, i)] -= c(t, 0.0);
        }
        let chol = s.cholesky()?;
        let l = chol.l();
        let mut logdet = 0.0;
        for i in 0..n {
            // Complex Cholesky takes complex square roots, so an indefinite
            // pivot shows up as a diagonal entry that is not positive real.
            let d = l[(i, i)].re;
            if !(d > 0.0) || !d.is_finite() || l[(i, i)].im.abs() > 1e-8 * d {
                return None;
            }
            logdet += 2.0 * d.ln();
        }
        if !with_k {
            return Some(Local { phi_logdet: logdet, v: RMatrix::zeros(0, 0) });
        }
        let linv = l.solve_lower_triangular(&CMatrix::identity(n, n))?;
        let q = self.r.q();
        let mut v = RMatrix::zeros(n * n, q + 1);
        if 2 * q < n * n {
            // Few directions: whiten each one directly.
            let linv_h = linv.adjoint();
            for (i, h) in self.r.gens.iter().enumerate() {
                let k = HermMatrix::symmetrize(&linv * h * &linv_h);
                v.set_column(i, &DVector::from_vec(herm_coords(&k)));
            }
            let kt = HermMatrix::symmetrize(-(&linv * &linv_h));
            v.set_column(q, &DVector::from_vec(herm_coords(&kt)));
        } else {
            let w = congruence_matrix(&linv);
            v.columns_mut(0, q).copy_from(&(&w * &self.r.basis));
            let ident = DVector::from_vec(herm_coords(&HermMatrix::identity(n)));
            v.set_column(q, &(-(&w * ident)));
        }
        Some(Local { phi_logdet: logdet, v })
    }

    fn objective(&self, w: &DVector<f64>, t: f64, tau: f64) -> Option<f64> {
        let q = self.radius2 - w.norm_squared();
        if q <= 0.0 {
            return None;
        }
        let loc = self.local(w, t, false)?;
        Some(-tau * t - loc.phi_logdet - q.ln())
    }

    fn run(&self, tol: f64, max_iter: usize) -> Result<BarrierOutcome> {
        let r = self.r;
        let q = r.q();
        let n = r.dim;
        let nu = n as f64 + 1.0;
        let mut w = self.start.clone();
        if w.norm_squared() >= 0.25 * self.radius2 {
            w.fill(0.0);
        }
        let lam0 = r.z_of(&w).min_eig()?;
        let mut t = lam0 - 1.0;
        let mut tau = 1.0 / (1.0 + lam0.abs());
        let mut iterations = 0usize;
        let mut best_w = w.clone();
        let mut best_neg = r.neg_part(&w)?;
        let newton_cap = 80;
        while iterations < max_iter {
            // Centering by damped Newton.
            for _ in 0..newton_cap {
                iterations += 1;
                let Some(loc) = self.local(&w, t, true) else { break };
                let qb = self.radius2 - w.norm_squared();
                let dimv = q + 1;
                let mut grad = DVector::zeros(dimv);
                // Traces are the sums of the diagonal coordinates.
                let v = &loc.v;
                let trace = |i: usize| -> f64 { (0..n).map(|a| v[(a, i)]).sum() };
                for i in 0..q {
                    grad[i] = -trace(i) + 2.0 * w[i] / qb;
                }
                grad[q] = -tau - trace(q);
                let mut hess = v.transpose() * v;
                for i in 0..q {
                    hess[(i, i)] += 2.0 / qb;
                    for j in 0..q {
                        hess[(i, j)] += 4.0 * w[i] * w[j] / (qb * qb);
                    }
                }
                let step = match hess.clone().cholesky() {
                    Some(ch) => ch.solve(&(-&grad)),
                    None => {
                        let ridge = 1e-12 * hess.diagonal().amax().max(1.0);
                        for i in 0..dimv {
                            hess[(i, i)] += ridge;
                        }
                        match hess.cholesky() {
                            Some(ch) => ch.solve(&(-&grad)),
                            None => break,
                        }
                    }
                };
                let dec = -grad.dot(&step);
                if dec < 1e-10 {
                    break;
                }
                let f0 = self.objective(&w, t, tau).unwrap_or(f64::INFINITY);
                let mut s = 1.0;
                let mut moved = false;
                for _ in 0..60 {
                    let wn = &w + step.rows(0, q) * s;
                    let tn = t + step[q] * s;
                    if let Some(f1) = self.objective(&wn, tn, tau) {
                        if f1 <= f0 - 0.25 * s * dec {
                            w = wn;
                            t = tn;
                            moved = true;
                            break;
                        }
                    }
                    s *= 0.5;
                }
                if !moved {
                    break;
                }
            }
            let neg = r.neg_part(&w)?;
            if neg < best_neg {
                best_neg = neg;
                best_w = w.clone();
            }
            if neg <= tol.min(1e-12) || neg == 0.0 {
                return Ok(BarrierOutcome { w, infeasible: false, iterations });
            }
            if t + nu / tau < -tol {
                return Ok(BarrierOutcome { w: best_w, infeasible: true, iterations });
            }
            if t > -1e-2 {
                if let Some(wp) = polish(r, &w, tol)? {
                    return Ok(BarrierOutcome { w: wp, infeasible: false, iterations });
                }
            }
            if tau > 1e14 {
                break;
            }
            tau *= 10.0;
        }
        Ok(BarrierOutcome { w: best_w, infeasible: false, iterations })
    }
}

/// Projects onto the face spanned by the near-kernel of `Z(w)` by solving
/// `Z(w + Δ) Q = 0` in the least-squares sense, for several kernel cutoffs.
fn polish(r: &Reduced, w: &DVector<f64>, tol: f64) -> Result<Option<DVector<f64>>> {
    let n = r.dim;
    let mut cur = w.clone();
    let mut cur_neg = r.neg_part(&cur)?;
    for _ in 0..6 {
        if cur_neg <= tol {
            return Ok(Some(cur));
        }
        let e = eigh(&r.z_of(&cur))?;
        let scale = e.values.iter().fold(1.0f64, |m, x| m.max(x.abs()));
        let mut best: Option<(f64, DVector<f64>)> = None;
        let mut tried = Vec::new();
        for k in 2..=9 {
            let eta = scale * 10f64.powi(-k);
            let idx: Vec<usize> = (0..n).filter(|&i| e.values[i] < eta).collect();
            if idx.is_empty() || idx.len() == n || tried.contains(&idx.len()) {
                continue;
            }
            tried.push(idx.len());
            let qm = select_columns(&e.vectors, &idx);
            let zq = r.z_of(&cur).matrix() * &qm;
            let rows = 2 * n * idx.len();
            let mut a = RMatrix::zeros(rows, r.q());
            for (col, h) in r.gens.iter().enumerate() {
                let hq = h * &qm;
                for (i, z) in hq.iter().enumerate() {
                    a[(2 * i, col)] = z.re;
                    a[(2 * i + 1, col)] = z.im;
                }
            }
            let mut b = DVector::zeros(rows);
            for (i, z) in zq.iter().enumerate() {
                b[2 * i] = -z.re;
                b[2 * i + 1] = -z.im;
            }
            let delta = lstsq_real(&a, &b, 1e-10);
            let cand = &cur + delta;
            let neg = r.neg_part(&cand)?;
            if best.as_ref().map_or(true, |(bn, _)| neg < *bn) {
                best = Some((neg, cand));
            }
        }
        match best {
            Some((neg, cand)) if neg < cur_neg => {
                cur = cand;
                cur_neg = neg;
            }
            _ => break,
        }
    }
    Ok((cur_neg <= tol).then_some(cur))
}
