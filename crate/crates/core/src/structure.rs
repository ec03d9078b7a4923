//! Commutants, irreducible decompositions, unitary equivalence, minimal
//! defining tuples and free simplices.

use std::cmp::Ordering;

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::extreme::Tri;
use crate::feasibility::{inclusion, InclusionVerdict};
use crate::linalg::{self, c, kron, svd_null_space, CMatrix, HermMatrix};
use crate::pencil::{bounded, eval_hom, membership, Boundedness, HermTuple, MembershipStatus, MonicPencil};

/// Equivalence checks accept `‖U*X_jU − Y_j‖_F ≤ EQUIV_TOL`.
pub const EQUIV_TOL: f64 = 1e-7;
/// Spectral clusters of a commutant element closer than this (relative to
/// its spread) are merged.
const GAP_TOL: f64 = 1e-6;
const RESEEDS: usize = 3;

/// Frobenius-orthonormal basis of `{C : C X_j = X_j C for all j}`.
pub fn commutant(x: &HermTuple, tol: f64) -> Vec<CMatrix> {
    intertwiners(x, x, tol)
}

/// Basis of `{C : X_j C = C Y_j for all j}`.
fn intertwiners(x: &HermTuple, y: &HermTuple, tol: f64) -> Vec<CMatrix> {
    let n = x.n();
    let id = CMatrix::identity(n, n);
    let mut m = CMatrix::zeros(x.g() * n * n, n * n);
    for (j, (xj, yj)) in x.mats().iter().zip(y.mats()).enumerate() {
        // vec(X C − C Y) = (I ⊗ X − Yᵀ ⊗ I) vec(C), column-major vec.
        let block = kron(&id, xj.matrix()) - kron(&yj.matrix().transpose(), &id);
        m.view_mut((j * n * n, 0), (n * n, n * n)).copy_from(&block);
    }
    let null = svd_null_space(&m, tol);
    (0..null.ncols())
        .map(|k| CMatrix::from_fn(n, n, |r, col| null[(col * n + r, k)]))
        .collect()
}

fn random_hermitian_element(basis: &[CMatrix], n: usize, seed: u64) -> HermMatrix {
    let mut rng = linalg::rng_from_seed(seed);
    let mut h = CMatrix::zeros(n, n);
    for b in basis {
        h += (b + b.adjoint()) * c(0.5 * linalg::gaussian(&mut rng), 0.0);
    }
    HermMatrix::symmetrize(h)
}

/// Splits along the spectral clusters of a random Hermitian commutant
/// element; returns isometries onto the clusters, or `None` when the element
/// is scalar to within `GAP_TOL`.
fn spectral_split(basis: &[CMatrix], n: usize, seed: u64) -> Result<Option<Vec<CMatrix>>> {
    let h = random_hermitian_element(basis, n, seed);
    let e = linalg::eigh(&h)?;
    let spread = e.values[n - 1] - e.values[0];
    let scale = basis.len() as f64;
    if spread <= GAP_TOL * scale {
        return Ok(None);
    }
    let mut cuts = vec![0];
    for i in 1..n {
        if e.values[i] - e.values[i - 1] > GAP_TOL * spread {
            cuts.push(i);
        }
    }
    cuts.push(n);
    if cuts.len() <= 2 {
        return Ok(None);
    }
    Ok(Some(cuts.windows(2).map(|w| e.vectors.columns(w[0], w[1] - w[0]).into_owned()).collect()))
}

/// Irreducible pieces `(block, V)` with `V* X V = block`.
fn split_irreducible(x: &HermTuple, tol: f64, seed: u64) -> Result<Vec<(HermTuple, CMatrix)>> {
    let n = x.n();
    let basis = commutant(x, tol);
    if basis.len() <= 1 {
        return Ok(vec![(x.clone(), CMatrix::identity(n, n))]);
    }
    let mut parts = None;
    for attempt in 0..=RESEEDS {
        if let Some(p) = spectral_split(&basis, n, linalg::derive_seed(seed, attempt as u64))? {
            parts = Some(p);
            break;
        }
    }
    let parts = parts.ok_or_else(|| {
        Error::Numerical(format!("commutant of dimension {} gave no spectral gap after {RESEEDS} reseeds", basis.len()))
    })?;
    let mut out = Vec::new();
    for (k, v) in parts.iter().enumerate() {
        let sub = x.compress(v);
        for (block, w) in split_irreducible(&sub, tol, linalg::derive_seed(seed, 100 + k as u64))? {
            out.push((block, v * w));
        }
    }
    Ok(out)
}

#[derive(Clone, Debug)]
pub struct Decomposition {
    pub blocks: Vec<HermTuple>,
    pub multiplicities: Vec<usize>,
    /// `U* X_j U = ⊕ blocks (with multiplicity)`.
    pub unitary: CMatrix,
}

impl Decomposition {
    pub fn assembled(&self) -> Result<HermTuple> {
        let parts: Vec<HermTuple> = self
            .blocks
            .iter()
            .zip(&self.multiplicities)
            .flat_map(|(b, &m)| std::iter::repeat_n(b.clone(), m))
            .collect();
        HermTuple::direct_sum_all(&parts)
    }

    /// `‖U (⊕ blocks) U* − X‖` as the largest entrywise difference.
    pub fn reassembly_error(&self, x: &HermTuple) -> Result<f64> {
        let back = self.assembled()?.conjugate(&self.unitary.adjoint());
        Ok(back.max_abs_diff(x))
    }

    pub fn block_count(&self) -> usize {
        self.blocks.len()
    }
}

fn traces(x: &HermTuple) -> Vec<f64> {
    x.mats().iter().map(|m| m.trace()).collect()
}

/// Larger blocks first, then lexicographic by trace vector.
fn block_order(a: &HermTuple, b: &HermTuple) -> Ordering {
    b.n().cmp(&a.n()).then_with(|| {
        traces(a)
            .iter()
            .zip(traces(b).iter())
            .map(|(p, q)| p.total_cmp(q))
            .find(|o| *o != Ordering::Equal)
            .unwrap_or(Ordering::Equal)
    })
}

pub fn decompose_irreducibles(x: &HermTuple, tol: f64, seed: u64) -> Result<Decomposition> {
    let pieces = split_irreducible(x, tol, seed)?;
    // Group pieces into equivalence classes, rotating each member onto the
    // class representative.
    let mut classes: Vec<(HermTuple, Vec<CMatrix>)> = Vec::new();
    for (block, v) in pieces {
        let hit = classes
            .iter()
            .enumerate()
            .filter(|(_, (rep, _))| rep.n() == block.n())
            .find_map(|(i, (rep, _))| unitarily_equivalent(rep, &block, tol).map(|w| (i, w)));
        match hit {
            // w* rep w = block, so (v w*)* X (v w*) = rep.
            Some((i, w)) => classes[i].1.push(&v * w.adjoint()),
            None => classes.push((block, vec![v])),
        }
    }
    classes.sort_by(|a, b| block_order(&a.0, &b.0));
    let n = x.n();
    let mut unitary = CMatrix::zeros(n, n);
    let mut col = 0;
    for (_, vs) in &classes {
        for v in vs {
            unitary.view_mut((0, col), v.shape()).copy_from(v);
            col += v.ncols();
        }
    }
    Ok(Decomposition {
        multiplicities: classes.iter().map(|(_, vs)| vs.len()).collect(),
        blocks: classes.into_iter().map(|(b, _)| b).collect(),
        unitary,
    })
}

/// A unitary `U` with `U* X_j U = Y_j` for all j, if one exists.
///
/// A generic intertwiner `C` (with `X_j C = C Y_j`) is invertible exactly when
/// the tuples are equivalent, and then its polar factor is a unitary
/// intertwiner. The candidate is always checked directly.
pub fn unitarily_equivalent(x: &HermTuple, y: &HermTuple, tol: f64) -> Option<CMatrix> {
    if x.n() != y.n() || x.g() != y.g() {
        return None;
    }
    let basis = intertwiners(x, y, tol);
    if basis.is_empty() {
        return None;
    }
    let n = x.n();
    let mut rng = linalg::rng_from_seed(0x0e9);
    for _ in 0..2 {
        let mut cm = CMatrix::zeros(n, n);
        for b in &basis {
            cm += b * linalg::complex_gaussian(&mut rng);
        }
        let svd = cm.svd(true, true);
        let (Some(w), Some(vt)) = (svd.u, svd.v_t) else { continue };
        let u = w * vt;
        let ok = x
            .mats()
            .iter()
            .zip(y.mats())
            .all(|(xj, yj)| xj.congruence(&u).sub(yj).frob() <= EQUIV_TOL);
        if ok {
            return Some(u);
        }
    }
    None
}

#[derive(Clone, Debug, Serialize)]
pub struct MinimalReport {
    pub boundedness: String,
    pub original_size: usize,
    pub minimal_size: usize,
    pub duplicates_removed: usize,
    pub redundant_removed: usize,
    /// Some redundancy test was undecided; the summand was kept.
    pub undecided: bool,
    pub samples: usize,
    pub sample_disagreements: usize,
}

fn pencil_of(blocks: &[&HermTuple]) -> Result<MonicPencil> {
    let owned: Vec<HermTuple> = blocks.iter().map(|b| (*b).clone()).collect();
    Ok(MonicPencil::new(HermTuple::direct_sum_all(&owned)?))
}

/// Compares level-1 and level-2 membership on points scaled near the
/// boundary of `𝒟_A`; returns (samples, disagreements).
fn sample_agreement(a: &MonicPencil, b: &MonicPencil, count: usize, seed: u64, tol: f64) -> Result<(usize, usize)> {
    let mut rng = linalg::rng_from_seed(seed);
    let mut bad = 0;
    for i in 0..count {
        let level = 1 + i % 2;
        let y = HermTuple::random_with(&mut rng, a.g(), level);
        let top = eval_hom(a, &y)?.max_eig()?.max(eval_hom(b, &y)?.max_eig()?);
        let r = 0.5 + rand::Rng::random::<f64>(&mut rng);
        let x = if top > 0.0 { y.scale(r / top) } else { y.scale(r) };
        let ina = membership(a, &x, tol)?.status != MembershipStatus::Outside;
        let inb = membership(b, &x, tol)?.status != MembershipStatus::Outside;
        if ina != inb {
            bad += 1;
        }
    }
    Ok((count, bad))
}

/// Removes duplicate irreducible summands and then summands whose deletion
/// leaves `𝒟_A` unchanged.
pub fn minimal_defining(a: &MonicPencil, tol: f64, seed: u64) -> Result<(MonicPencil, MinimalReport)> {
    let boundedness = bounded(a, 8, seed);
    let dec = decompose_irreducibles(a.coeffs(), tol, seed)?;
    let duplicates_removed = dec.multiplicities.iter().map(|m| m - 1).sum();
    let mut blocks = dec.blocks.clone();
    blocks.sort_by(block_order);
    let mut keep = vec![true; blocks.len()];
    let mut undecided = false;
    for i in 0..blocks.len() {
        let rest: Vec<&HermTuple> = (0..blocks.len()).filter(|&k| k != i && keep[k]).map(|k| &blocks[k]).collect();
        if rest.is_empty() {
            continue;
        }
        let rest = pencil_of(&rest)?;
        match inclusion(&rest, &MonicPencil::new(blocks[i].clone()), 2, tol) {
            Ok(InclusionVerdict::Included(_)) => keep[i] = false,
            Ok(InclusionVerdict::NotIncluded(_)) => {}
            Ok(InclusionVerdict::Unknown(_)) => undecided = true,
            Err(e) if e.is_numerical() => undecided = true,
            Err(e) => return Err(e),
        }
    }
    let kept: Vec<&HermTuple> = blocks.iter().zip(&keep).filter(|(_, k)| **k).map(|(b, _)| b).collect();
    let redundant_removed = dec.blocks.len() - kept.len();
    let minimal = pencil_of(&kept)?;
    let (samples, sample_disagreements) = sample_agreement(a, &minimal, 64, linalg::derive_seed(seed, 7), tol)?;
    let report = MinimalReport {
        boundedness: boundedness.label().into(),
        original_size: a.d(),
        minimal_size: minimal.d(),
        duplicates_removed,
        redundant_removed,
        undecided,
        samples,
        sample_disagreements,
    };
    Ok((minimal, report))
}

#[derive(Clone, Debug)]
pub struct SimplexVerdict {
    pub value: Tri,
    pub minimal: MonicPencil,
    pub report: MinimalReport,
    /// Row a holds `(A_1[a,a], …, A_g[a,a])` of the diagonal minimal tuple.
    pub diagonal: Option<Vec<Vec<f64>>>,
}

pub fn is_free_simplex(a: &MonicPencil, tol: f64, seed: u64) -> Result<SimplexVerdict> {
    let (minimal, report) = minimal_defining(a, tol, seed)?;
    let g = a.g();
    let commuting = minimal.coeffs().max_commutator() <= tol.max(1e-9);
    let shape_ok = commuting && minimal.d() == g + 1;
    let value = if !shape_ok {
        Tri::No
    } else {
        match bounded(a, 8, seed) {
            Boundedness::Bounded => Tri::Yes,
            Boundedness::UnboundedWitness(_) => Tri::No,
            Boundedness::Inconclusive => Tri::Unknown,
        }
    };
    // Minimal summands of a commuting tuple are 1×1, so the minimal tuple is
    // already diagonal.
    let diagonal = (value == Tri::Yes).then(|| diagonal_rows(&minimal));
    Ok(SimplexVerdict { value, minimal, report, diagonal })
}

fn diagonal_rows(a: &MonicPencil) -> Vec<Vec<f64>> {
    (0..a.d()).map(|r| a.coeffs().mats().iter().map(|m| m.matrix()[(r, r)].re).collect()).collect()
}

/// `x ↦ linear·x + offset`, acting on tuples as `Y_i = Σ_k linear[i][k] X_k + offset_i I`.
#[derive(Clone, Debug, Serialize)]
pub struct AffineMap {
    pub linear: Vec<Vec<f64>>,
    pub offset: Vec<f64>,
    pub condition: f64,
}

impl AffineMap {
    fn matrix(&self) -> DMatrix<f64> {
        let g = self.offset.len();
        DMatrix::from_fn(g, g, |i, k| self.linear[i][k])
    }

    pub fn apply(&self, x: &HermTuple) -> HermTuple {
        let n = x.n();
        let mats = (0..self.offset.len())
            .map(|i| {
                let mut m = HermMatrix::identity(n).scale(self.offset[i]);
                for (k, xk) in x.mats().iter().enumerate() {
                    m = m.add(&xk.scale(self.linear[i][k]));
                }
                m
            })
            .collect();
        HermTuple::new(mats).expect("g >= 1")
    }

    pub fn inverse(&self) -> Result<AffineMap> {
        let inv = self
            .matrix()
            .try_inverse()
            .ok_or_else(|| Error::Numerical("affine map is singular".into()))?;
        let off = -(&inv * DVector::from_column_slice(&self.offset));
        let g = self.offset.len();
        Ok(AffineMap {
            linear: (0..g).map(|i| (0..g).map(|k| inv[(i, k)]).collect()).collect(),
            offset: off.iter().cloned().collect(),
            condition: self.condition,
        })
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct NormalFormReport {
    pub map: AffineMap,
    /// Index of the row sent to the `(1/(g+1))·𝟏` facet.
    pub pivot_row: usize,
    pub samples: usize,
    pub mismatches: usize,
}

impl NormalFormReport {
    pub fn verified(&self) -> bool {
        self.mismatches == 0
    }
}

/// Affine map carrying `𝒟_A` onto the Naimark spectrahedron, for a free
/// simplex `A`.
///
/// Each Naimark facet `1 + y_j ≥ 0` and `1 − Σy/(g+1) ≥ 0` is matched to a
/// positive multiple of a facet `1 − r_a·x ≥ 0` of `A`, so the pencils agree
/// up to a positive diagonal congruence at every level.
pub fn naimark_normal_form(a: &MonicPencil, tol: f64, seed: u64) -> Result<NormalFormReport> {
    let verdict = is_free_simplex(a, tol, seed)?;
    let rows = verdict
        .diagonal
        .ok_or_else(|| Error::Precondition("pencil is not a free simplex".into()))?;
    let g = a.g();
    let mut best: Option<(f64, usize)> = None;
    for r0 in 0..=g {
        let s = facet_matrix(&rows, r0);
        let sv = s.singular_values();
        let smin = sv.iter().cloned().fold(f64::INFINITY, f64::min);
        if best.is_none_or(|(b, _)| smin > b) {
            best = Some((smin, r0));
        }
    }
    let (smin, r0) = best.expect("g + 1 >= 2 rows");
    if smin <= 1e-12 {
        return Err(Error::Numerical("every facet submatrix is singular".into()));
    }
    let s = facet_matrix(&rows, r0);
    let sinv_t = s
        .transpose()
        .try_inverse()
        .ok_or_else(|| Error::Numerical("facet matrix is singular".into()))?;
    let gp1 = (g + 1) as f64;
    let w = -gp1 * (&sinv_t * DVector::from_column_slice(&rows[r0]));
    let kappa0 = (2.0 * g as f64 + 1.0) / (gp1 + w.sum());
    let kappa = &w * kappa0;
    if !(kappa0 > 0.0) || kappa.iter().any(|k| !(*k > 0.0)) {
        return Err(Error::Numerical("facet multipliers are not positive".into()));
    }
    let lin = -DMatrix::from_diagonal(&kappa) * &s;
    let sv = lin.singular_values();
    let condition = sv.max() / sv.min();
    let map = AffineMap {
        linear: (0..g).map(|i| (0..g).map(|k| lin[(i, k)]).collect()).collect(),
        offset: kappa.iter().map(|k| k - 1.0).collect(),
        condition,
    };
    let (samples, mismatches) = verify_normal_form(a, &map, 50, seed, tol)?;
    Ok(NormalFormReport { map, pivot_row: r0, samples, mismatches })
}

/// Rows of the diagonal tuple other than `r0`, stacked as a g×g matrix.
fn facet_matrix(rows: &[Vec<f64>], r0: usize) -> DMatrix<f64> {
    let g = rows[0].len();
    let picked: Vec<&Vec<f64>> = rows.iter().enumerate().filter(|(a, _)| *a != r0).map(|(_, r)| r).collect();
    DMatrix::from_fn(g, g, |i, k| picked[i][k])
}

/// Membership of X in `𝒟_A` versus T(X) in the Naimark spectrahedron and
/// back, at levels 1 and 2. Points whose margins are within `100·tol` on
/// either side are not counted against the map.
fn verify_normal_form(a: &MonicPencil, map: &AffineMap, count: usize, seed: u64, tol: f64) -> Result<(usize, usize)> {
    let g = a.g();
    let nai = MonicPencil::new(naimark_tuple(g));
    let inv = map.inverse()?;
    let mut rng = linalg::rng_from_seed(seed);
    let slack = 100.0 * tol;
    let mut mismatches = 0;
    let mut checked = 0;
    for i in 0..count {
        let level = 1 + i % 2;
        for (src, dst, t) in [(a, &nai, map), (&nai, a, &inv)] {
            let y = HermTuple::random_with(&mut rng, g, level);
            let top = eval_hom(src, &y)?.max_eig()?;
            let r = 0.5 + rand::Rng::random::<f64>(&mut rng);
            let x = if top > 0.0 { y.scale(r / top) } else { y.scale(r) };
            let m1 = membership(src, &x, tol)?.min_eig;
            let m2 = membership(dst, &t.apply(&x), tol)?.min_eig;
            checked += 1;
            if (m1 < -slack && m2 > slack) || (m1 > slack && m2 < -slack) {
                mismatches += 1;
            }
        }
    }
    Ok((checked, mismatches))
}

/// `N_j = −e_j e_j* + e_{g+1} e_{g+1}*/(g+1)`.
pub fn naimark_tuple(g: usize) -> HermTuple {
    let diags: Vec<Vec<f64>> = (0..g)
        .map(|j| {
            let mut d = vec![0.0; g + 1];
            d[j] = -1.0;
            d[g] = 1.0 / (g as f64 + 1.0);
            d
        })
        .collect();
    HermTuple::diagonal(&diags).expect("g >= 1")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pencil::DEFAULT_TOL as TOL;

    fn herm(rows: &[&[f64]]) -> HermMatrix {
        HermMatrix::from_real_rows(rows).unwrap()
    }

    fn sz_sx() -> HermTuple {
        HermTuple::new(vec![HermMatrix::from_real_diag(&[1.0, -1.0]), herm(&[&[0.0, 1.0], &[1.0, 0.0]])]).unwrap()
    }

    fn interval(r: f64) -> MonicPencil {
        MonicPencil::new(HermTuple::diagonal(&[vec![1.0 / r, -1.0 / r]]).unwrap())
    }

    #[test]
    fn commutant_examples() {
        assert_eq!(commutant(&sz_sx(), TOL).len(), 1);
        assert_eq!(commutant(&HermTuple::new(vec![HermMatrix::identity(2)]).unwrap(), TOL).len(), 4);
        let basis = commutant(&HermTuple::diagonal(&[vec![1.0, 2.0]]).unwrap(), TOL);
        assert_eq!(basis.len(), 2);
        for b in &basis {
            assert!(b[(0, 1)].norm() < 1e-12 && b[(1, 0)].norm() < 1e-12);
            assert!((linalg::frob(b) - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn decompose_examples() {
        let d = decompose_irreducibles(&sz_sx(), TOL, 0).unwrap();
        assert_eq!((d.blocks.len(), d.multiplicities.clone()), (1, vec![1]));
        assert!(d.reassembly_error(&sz_sx()).unwrap() < 1e-7);

        let x2 = sz_sx().direct_sum(&sz_sx()).unwrap();
        let d = decompose_irreducibles(&x2, TOL, 3).unwrap();
        assert_eq!(d.multiplicities, vec![2]);
        assert!(linalg::is_unitary(&d.unitary, 1e-9));
        assert!(d.reassembly_error(&x2).unwrap() < 1e-7);

        let b = HermTuple::new(vec![herm(&[&[0.0, 2.0], &[2.0, 1.0]]), HermMatrix::from_real_diag(&[3.0, -1.0])]).unwrap();
        let u = linalg::random_unitary(4, 11);
        let x = sz_sx().direct_sum(&b).unwrap().conjugate(&u);
        let d = decompose_irreducibles(&x, TOL, 5).unwrap();
        assert_eq!(d.multiplicities, vec![1, 1]);
        assert!(d.reassembly_error(&x).unwrap() < 1e-7);
        let found_a = d.blocks.iter().any(|blk| unitarily_equivalent(blk, &sz_sx(), TOL).is_some());
        let found_b = d.blocks.iter().any(|blk| unitarily_equivalent(blk, &b, TOL).is_some());
        assert!(found_a && found_b);
    }

    #[test]
    fn equivalence_examples() {
        let u = linalg::random_unitary(2, 4);
        let y = sz_sx().conjugate(&u);
        let w = unitarily_equivalent(&sz_sx(), &y, TOL).unwrap();
        assert!(linalg::is_unitary(&w, 1e-9));

        let z = HermTuple::new(vec![HermMatrix::from_real_diag(&[1.0, -1.0])]).unwrap();
        let xx = HermTuple::new(vec![herm(&[&[0.0, 1.0], &[1.0, 0.0]])]).unwrap();
        assert!(unitarily_equivalent(&z, &xx, TOL).is_some());

        // Bordered [[D, a], [a*, e]] never matches D ⊕ f.
        let e = HermTuple::new(vec![herm(&[&[1.0, 0.0, 0.3], &[0.0, 2.0, 0.1], &[0.3, 0.1, 1.5]])]).unwrap();
        for f in [1.0, 2.0, 1.5, 0.0] {
            let y = HermTuple::diagonal(&[vec![1.0, 2.0, f]]).unwrap();
            assert!(unitarily_equivalent(&e, &y, TOL).is_none(), "f = {f}");
        }
        assert!(unitarily_equivalent(&sz_sx(), &HermTuple::scalar(&[1.0, 0.0]), TOL).is_none());
    }

    #[test]
    fn minimal_examples() {
        let a = MonicPencil::new(sz_sx().direct_sum(&sz_sx()).unwrap());
        let (m, rep) = minimal_defining(&a, TOL, 0).unwrap();
        assert_eq!(m.d(), 2);
        assert_eq!(rep.duplicates_removed, 1);

        let both = MonicPencil::new(interval(1.0).coeffs().direct_sum(interval(2.0).coeffs()).unwrap());
        let (m, rep) = minimal_defining(&both, TOL, 0).unwrap();
        assert_eq!(rep.sample_disagreements, 0);
        assert!(unitarily_equivalent(m.coeffs(), interval(1.0).coeffs(), TOL).is_some());

        let nai = MonicPencil::new(naimark_tuple(2));
        let (m, rep) = minimal_defining(&nai, TOL, 0).unwrap();
        assert_eq!(m.d(), 3);
        assert_eq!(rep.sample_disagreements, 0);
        let (m2, _) = minimal_defining(&m, TOL, 0).unwrap();
        assert!(unitarily_equivalent(m.coeffs(), m2.coeffs(), TOL).is_some());
    }

    #[test]
    fn simplex_detection() {
        let nai = MonicPencil::new(naimark_tuple(2));
        assert_eq!(is_free_simplex(&nai, TOL, 0).unwrap().value, Tri::Yes);
        let cube = MonicPencil::new(
            HermTuple::diagonal(&[vec![1.0, -1.0, 0.0, 0.0], vec![0.0, 0.0, 1.0, -1.0]]).unwrap(),
        );
        assert_eq!(is_free_simplex(&cube, TOL, 0).unwrap().value, Tri::No);
        let spin =
            MonicPencil::new(HermTuple::new(vec![HermMatrix::from_real_diag(&[-1.0, 1.0]), herm(&[&[0.0, -1.0], &[-1.0, 0.0]])]).unwrap());
        assert_eq!(is_free_simplex(&spin, TOL, 0).unwrap().value, Tri::No);
    }

    #[test]
    fn normal_form_examples() {
        let nai = MonicPencil::new(naimark_tuple(2));
        let nf = naimark_normal_form(&nai, TOL, 0).unwrap();
        assert!(nf.verified());
        for i in 0..2 {
            assert!(nf.map.offset[i].abs() < 1e-12);
            for k in 0..2 {
                let want = if i == k { 1.0 } else { 0.0 };
                assert!((nf.map.linear[i][k] - want).abs() < 1e-12);
            }
        }

        let half = MonicPencil::new(naimark_tuple(2).map(|m| m.scale(0.5)));
        let nf = naimark_normal_form(&half, TOL, 1).unwrap();
        assert!(nf.verified());
        assert!(nf.map.linear[0][1].abs() < 1e-12 && nf.map.linear[1][0].abs() < 1e-12);
    }
}
