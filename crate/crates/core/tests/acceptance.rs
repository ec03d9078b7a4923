//! Acceptance suite. Runs every criterion, prints one PASS/FAIL line each and
//! exits nonzero when any criterion fails.

use std::f64::consts::PI;
use std::time::Instant;

use rand::Rng;
use rayon::prelude::*;

use freespec::extreme::{classify, is_arveson, is_euclidean_extreme, Tri};
use freespec::feasibility::{solve_affine_psd, FeasibilityProblem, FeasibilityStatus};
use freespec::feasibility::{
    arveson_in_hull, hull_membership, polar_dual_check, spectrahedrop_membership, DropVerdict,
    HullArvesonVerdict, HullVerdict,
};
use freespec::gallery::{
    self, exlasse_point, lift_one, lift_one_oracle, spin_boundary_point, symmetry_tuple, tv_poly, wild_arveson_test,
    wild_poly,
};
use freespec::linalg::{self, c, kron, CMatrix, HermMatrix};
use freespec::pencil::{bounded, column_dilation, eval_hom, membership, Boundedness, ColumnTuple, HermTuple, MembershipStatus, MonicPencil};
use freespec::structure::{decompose_irreducibles, is_free_simplex, naimark_normal_form, unitarily_equivalent};

const TOL: f64 = 1e-8;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

/// Scales `y` onto the boundary of `𝒟_A`, if the ray leaves the set.
fn to_boundary(a: &MonicPencil, y: &HermTuple) -> Option<HermTuple> {
    let top = eval_hom(a, y).ok()?.max_eig().ok()?;
    (top > 1e-9).then(|| y.scale(1.0 / top))
}

fn not_outside(a: &MonicPencil, x: &HermTuple, tol: f64) -> bool {
    membership(a, x, tol).map(|r| r.status != MembershipStatus::Outside).unwrap_or(false)
}

fn euclidean_witness_ok(a: &MonicPencil, x: &HermTuple) -> bool {
    let Ok(v) = is_euclidean_extreme(a, x, TOL) else { return false };
    match (v.extreme, &v.witness, v.step) {
        (false, Some(y), Some(t)) => {
            t > 0.0
                && (y.frob() - 1.0).abs() < 1e-9
                && not_outside(a, &x.add(&y.scale(t)).unwrap(), 1e-7)
                && not_outside(a, &x.sub(&y.scale(t)).unwrap(), 1e-7)
        }
        _ => false,
    }
}

fn criterion_1() -> Outcome {
    let mut sym_ok = 0;
    let mut mem_ok = 0;
    let mut rng = linalg::rng_from_seed(101);
    for i in 0..50u64 {
        let g = 2 + (i % 2) as usize;
        let n = 1 + (i % 4) as usize;
        let cube = gallery::cube(g).unwrap().pencil;
        let j = symmetry_tuple(n, g, 1000 + i).unwrap();
        let ar = is_arveson(&cube, &j, TOL).map(|v| v.boundary).unwrap_or(false);
        let eu = is_euclidean_extreme(&cube, &j, TOL).map(|v| v.extreme).unwrap_or(false);
        if ar && eu {
            sym_ok += 1;
        }
        // Symmetries except for one contraction with norm below 1 − 1e−3.
        let mut mats = symmetry_tuple(n, g, 5000 + i).unwrap().mats().to_vec();
        let k = rng.random_range(0..g);
        let h = linalg::random_herm_with(&mut rng, n);
        let r = rng.random_range(0.0..0.999);
        mats[k] = h.scale(r / linalg::op_norm(h.matrix()));
        let x = HermTuple::new(mats).unwrap();
        let top = x.get(k).matrix() * x.get(k).matrix();
        let below = HermMatrix::symmetrize(top).max_eig().unwrap() <= 1.0 - 1e-3;
        if below && euclidean_witness_ok(&cube, &x) {
            mem_ok += 1;
        }
    }
    outcome(sym_ok == 50 && mem_ok == 50, format!("symmetries {sym_ok}/50 Arveson+Euclidean, contractions {mem_ok}/50 refuted with witness"))
}

fn spin_characterization(x: &HermTuple) -> bool {
    x.max_commutator() <= 1e-7 && wild_poly(x).unwrap().frob() <= 1e-7
}

fn criterion_2() -> Outcome {
    let spin = gallery::spin_disk().pencil;
    let mut rng = linalg::rng_from_seed(202);
    let mut arv_ok = 0;
    let mut mismatches = 0;
    for i in 0..50 {
        let n = 1 + i % 4;
        let angles: Vec<f64> = (0..n).map(|_| rng.random_range(-PI..PI)).collect();
        let x = spin_boundary_point(&angles).unwrap();
        let x = if i % 2 == 0 { x } else { x.conjugate(&linalg::random_unitary_with(&mut rng, n)) };
        let v = is_arveson(&spin, &x, TOL).unwrap().boundary;
        arv_ok += usize::from(v);
        mismatches += usize::from(v != spin_characterization(&x));
    }
    let mut not_ok = 0;
    for i in 0..20 {
        let y = if i == 0 {
            HermTuple::new(vec![
                HermMatrix::from_real_diag(&[0.5, -0.5]),
                HermMatrix::from_real_rows(&[&[0.0, 0.5], &[0.5, 0.0]]).unwrap(),
            ])
            .unwrap()
        } else {
            HermTuple::random_with(&mut rng, 2, 2 + i % 2)
        };
        let x = to_boundary(&spin, &y).unwrap();
        let v = is_arveson(&spin, &x, TOL).unwrap();
        let witness_ok = v.witness.as_ref().is_some_and(|w| w.t > 0.0 && not_outside(&spin, &w.dilation(&x).unwrap(), 1e-7));
        if x.max_commutator() > 1e-3 && !v.boundary && witness_ok {
            not_ok += 1;
        }
        mismatches += usize::from(v.boundary != spin_characterization(&x));
    }
    outcome(
        arv_ok == 50 && not_ok == 20 && mismatches == 0,
        format!("commuting {arv_ok}/50 Arveson, noncommuting {not_ok}/20 refuted with dilations, characterization mismatches {mismatches}"),
    )
}

/// Decides the Arveson property from its definition: is there a column
/// dilation `[[X, α], [α*, β]]` in `𝒟_A` with `α ≠ 0`? Each real coordinate
/// functional of α is pinned to a small positive value in turn; since the
/// admissible (α, β) form a convex set containing 0 and invariant under
/// `α ↦ e^{iθ}α`, some pin is feasible exactly when a nonzero α exists.
/// Returns `None` when the solver leaves a direction undecided.
fn dilation_oracle(a: &MonicPencil, x: &HermTuple) -> Option<bool> {
    let (g, n) = (x.g(), x.n());
    let m = n + 1;
    let embed = |e: CMatrix| -> Vec<HermMatrix> {
        a.coeffs().mats().iter().map(|aj| HermMatrix::symmetrize(-kron(aj.matrix(), &e))).collect()
    };
    let mut gens: Vec<HermMatrix> = Vec::new();
    // Parameter order: for each j, Re α_j then Im α_j entries, then β.
    let mut layout = Vec::new();
    for j in 0..g {
        for part in 0..2 {
            for i in 0..n {
                let mut e = CMatrix::zeros(m, m);
                let z = if part == 0 { c(1.0, 0.0) } else { c(0.0, 1.0) };
                e[(i, n)] = z;
                e[(n, i)] = z.conj();
                gens.push(embed(e)[j].clone());
                layout.push((j, part, i));
            }
        }
    }
    for j in 0..g {
        let mut e = CMatrix::zeros(m, m);
        e[(n, n)] = c(1.0, 0.0);
        gens.push(embed(e)[j].clone());
    }
    let zero = ColumnTuple::new(vec![linalg::CVector::zeros(n); g]).unwrap();
    let base = freespec::pencil::eval_monic(a, &column_dilation(x, &zero, &vec![0.0; g]).unwrap()).unwrap();
    let nvars = gens.len();
    let mut undecided = false;
    for p in 0..2 * g * n {
        let mut row = vec![0.0; nvars];
        row[p] = 1.0;
        let prob = FeasibilityProblem::new(base.clone(), gens.clone(), vec![row], vec![0.01]).unwrap();
        let res = solve_affine_psd(&prob, 5000, 1e-9).ok()?;
        match (res.status, &res.point) {
            (FeasibilityStatus::Feasible, Some((s, _))) => {
                let mut cols = vec![linalg::CVector::zeros(n); g];
                for (k, &(j, part, i)) in layout.iter().enumerate() {
                    cols[j][i] += if part == 0 { c(s[k], 0.0) } else { c(0.0, s[k]) };
                }
                let beta: Vec<f64> = s[2 * g * n..].to_vec();
                let alpha = ColumnTuple::new(cols).unwrap();
                let z = column_dilation(x, &alpha, &beta).unwrap();
                if alpha.norm() > 1e-3 && not_outside(a, &z, 1e-6) {
                    return Some(false);
                }
                undecided = true;
            }
            _ if res.infeasible => {}
            _ => undecided = true,
        }
    }
    (!undecided).then_some(true)
}

fn random_bounded_pencil(seed: u64) -> MonicPencil {
    let mut rng = linalg::rng_from_seed(seed);
    loop {
        let g = rng.random_range(1..=3);
        let d = rng.random_range(2..=4);
        let a = MonicPencil::new(HermTuple::new((0..g).map(|_| linalg::random_herm_with(&mut rng, d)).collect()).unwrap());
        if matches!(bounded(&a, 4, seed), Boundedness::Bounded) {
            return a;
        }
    }
}

fn criterion_3_point(a: &MonicPencil, seed: u64, kind: u64) -> HermTuple {
    let mut rng = linalg::rng_from_seed(seed);
    let g = a.g();
    loop {
        let x = match kind {
            0 => {
                let n = rng.random_range(1..=4);
                to_boundary(a, &HermTuple::random_with(&mut rng, g, n))
            }
            1 => {
                let n1 = rng.random_range(1..=2);
                let n2 = rng.random_range(1..=2);
                let p = to_boundary(a, &HermTuple::random_with(&mut rng, g, n1));
                let q = to_boundary(a, &HermTuple::random_with(&mut rng, g, n2));
                p.zip(q).map(|(p, q)| {
                    let s = p.direct_sum(&q).unwrap();
                    s.conjugate(&linalg::random_unitary_with(&mut rng, s.n()))
                })
            }
            2 => {
                let n = rng.random_range(1..=3);
                to_boundary(a, &HermTuple::random_with(&mut rng, g, n)).map(|x| x.scale(rng.random_range(0.3..0.9)))
            }
            _ => to_boundary(a, &HermTuple::random_with(&mut rng, g, 1)),
        };
        if let Some(x) = x {
            return x;
        }
    }
}

fn criterion_3() -> Outcome {
    let results: Vec<(bool, Option<bool>)> = (0..200u64)
        .into_par_iter()
        .map(|i| {
            let a = random_bounded_pencil(3000 + i / 4);
            let x = criterion_3_point(&a, 7000 + i, i % 4);
            let kernel = is_arveson(&a, &x, TOL).map(|v| v.boundary).unwrap_or(false);
            (kernel, dilation_oracle(&a, &x))
        })
        .collect();
    let disagreements = results.iter().filter(|(k, o)| Some(*k) != *o).count();
    let arveson = results.iter().filter(|(k, _)| *k).count();
    outcome(disagreements == 0, format!("200 points ({arveson} Arveson), disagreements with dilation oracle: {disagreements}"))
}

fn criterion_4() -> Outcome {
    let mut rng = linalg::rng_from_seed(404);
    let mut failures = 0;
    let mut checks = 0;
    for _ in 0..100 {
        let n = rng.random_range(1..=3);
        let dvals: Vec<f64> = (0..n).map(|_| rng.random_range(-2.0..2.0)).collect();
        let a = loop {
            let v = linalg::CVector::from_fn(n, |_, _| linalg::complex_gaussian(&mut rng));
            if v.norm() > 1e-3 {
                break v;
            }
        };
        let e = rng.random_range(-2.0..2.0);
        let mut m = CMatrix::zeros(n + 1, n + 1);
        for i in 0..n {
            m[(i, i)] = c(dvals[i], 0.0);
            m[(i, n)] = a[i];
            m[(n, i)] = a[i].conj();
        }
        m[(n, n)] = c(e, 0.0);
        let bordered = HermTuple::new(vec![HermMatrix::new(m).unwrap()]).unwrap();
        let mut fs = dvals.clone();
        fs.push(e);
        while fs.len() < 20 {
            fs.push(rng.random_range(-4.0..4.0));
        }
        for f in fs {
            let mut dd = dvals.clone();
            dd.push(f);
            let split = HermTuple::diagonal(&[dd]).unwrap();
            checks += 1;
            failures += usize::from(unitarily_equivalent(&bordered, &split, TOL).is_some());
        }
    }
    outcome(failures == 0, format!("{checks} comparisons, false equivalences {failures}"))
}

fn criterion_5() -> Outcome {
    let mut notes = Vec::new();
    let mut pass = true;
    for g in [2usize, 3] {
        let nai = gallery::naimark(g).unwrap().pencil;
        let om = nai.coeffs().clone();
        // (a) compressions of ampliations.
        let members = (0..50u64)
            .into_par_iter()
            .filter(|&i| {
                let mut rng = linalg::rng_from_seed(500 + i + 100 * g as u64);
                let mm = rng.random_range(1..=3);
                let k = rng.random_range(1..=3usize.min(mm * (g + 1)));
                let v = linalg::random_isometry_with(&mut rng, mm * (g + 1), k);
                let x = om.ampliate(mm).compress(&v);
                matches!(hull_membership(&om, &x, TOL), Ok(HullVerdict::Member(c)) if c.match_residual <= 1e-6 && c.unital_residual <= 1e-6)
            })
            .count();
        // (b) direct sums of level-1 vertices.
        let verts: Vec<HermTuple> =
            (0..=g).map(|r| HermTuple::scalar(&om.mats().iter().map(|m| m.matrix()[(r, r)].re).collect::<Vec<_>>())).collect();
        let sums = vec![
            verts[0].clone(),
            verts[g].clone(),
            verts[0].direct_sum(&verts[1]).unwrap(),
            verts[1].direct_sum(&verts[g]).unwrap(),
            HermTuple::direct_sum_all(&verts).unwrap(),
        ];
        let boundary = sums
            .par_iter()
            .filter(|x| matches!(arveson_in_hull(&om, x, 4, TOL, 55), Ok(HullArvesonVerdict::Boundary { .. })))
            .count();
        // (c) polar duality at levels 1 and 2.
        let mut counter = 0;
        for level in 1..=2 {
            match polar_dual_check(&om, level, 100, 77 + level as u64, TOL) {
                Ok(r) => counter += r.counterexamples.len(),
                Err(_) => counter += 100,
            }
        }
        // (d) detection and normal form.
        let simplex = is_free_simplex(&nai, TOL, 9).map(|v| v.value == Tri::Yes).unwrap_or(false);
        let nf = naimark_normal_form(&nai, TOL, 9).map(|r| r.verified() && r.samples >= 50).unwrap_or(false);
        let ok = members == 50 && boundary == sums.len() && counter == 0 && simplex && nf;
        pass &= ok;
        notes.push(format!(
            "g={g}: members {members}/50, boundary sums {boundary}/{}, dual counterexamples {counter}, simplex {simplex}, normal form {nf}",
            sums.len()
        ));
    }
    outcome(pass, notes.join("; "))
}

fn criterion_6() -> Outcome {
    let e = exlasse_point().unwrap();
    let (tv, prm) = gallery::tv_lift(1.0).unwrap();
    let (drop_ok, w_err) = match spectrahedrop_membership(&tv.pencil, 2, &e.pair(), TOL) {
        Ok(DropVerdict::Member { hidden, residual, .. }) => {
            (residual <= 1e-6, prm.hidden_from_w(hidden.get(0)).sub(&e.w).frob())
        }
        _ => (false, f64::INFINITY),
    };
    let min = tv_poly(&e.pair()).unwrap().min_eig().unwrap();
    let want = e.mu * e.mu * (3.0 - 10f64.sqrt());
    let eig_ok = (min - want).abs() <= 1e-9 && min < 0.0;
    let j = e.w.sub(&HermMatrix::symmetrize(e.y.matrix() * e.y.matrix()));
    let je = linalg::eigh(&j).unwrap();
    let j_ok = je.values[0].abs() <= 1e-9 && je.values[1] > 1e-3;
    let w_norm = linalg::op_norm(e.w.matrix());
    let norm_ok = (w_norm - 1.0).abs() <= 1e-12;
    outcome(
        drop_ok && eig_ok && j_ok && norm_ok,
        format!(
            "drop member {drop_ok} (hidden W error {w_err:.1e}), min eig {min:.12} vs {want:.12}, J rank-one PSD {j_ok}, |W| - 1 = {:.1e}",
            w_norm - 1.0
        ),
    )
}

fn wild_samples(count: usize, seed: u64) -> Vec<HermTuple> {
    let wild = gallery::wild_disk().pencil;
    let mut rng = linalg::rng_from_seed(seed);
    let mut out = Vec::new();
    for i in 0..count {
        let x = match i % 5 {
            0 => {
                let n = rng.random_range(1..=4);
                to_boundary(&wild, &HermTuple::random_with(&mut rng, 2, n)).unwrap()
            }
            1 => gallery::corank_one_pair(rng.random_range(2..=4), rng.random()).unwrap(),
            2 => {
                let n = rng.random_range(1..=4);
                let angles: Vec<f64> = (0..n).map(|_| rng.random_range(-PI..PI)).collect();
                spin_boundary_point(&angles).unwrap().conjugate(&linalg::random_unitary_with(&mut rng, n))
            }
            3 => {
                let n = rng.random_range(1..=3);
                let z = lift_one(&lift_one_oracle(2, rng.random(), TOL).unwrap(), TOL).unwrap();
                let p = to_boundary(&wild, &HermTuple::random_with(&mut rng, 2, n.min(1))).unwrap();
                z.direct_sum(&p).unwrap()
            }
            _ => {
                let n = rng.random_range(1..=3);
                to_boundary(&wild, &HermTuple::random_with(&mut rng, 2, n)).unwrap().scale(0.7)
            }
        };
        out.push(x);
    }
    out
}

fn criterion_7() -> Outcome {
    let wild = gallery::wild_disk().pencil;
    let samples = wild_samples(100, 707);
    let disagree = samples
        .par_iter()
        .filter(|x| {
            let rank = wild_arveson_test(x, TOL);
            let kern = is_arveson(&wild, x, TOL).map(|v| v.boundary);
            !matches!((rank, kern), (Ok(r), Ok(k)) if r == k)
        })
        .count();
    let arv = samples.iter().filter(|x| wild_arveson_test(x, TOL).unwrap_or(false)).count();

    let mut lifted = 0;
    for i in 0..20u64 {
        let n = 2 + (i % 2) as usize;
        let Ok(x) = lift_one_oracle(n, 900 + i, TOL) else { continue };
        if let Ok(z) = lift_one(&x, TOL) {
            let resid = wild_poly(&z).unwrap().frob();
            let back = z.compress(&CMatrix::identity(n + 1, n)).max_abs_diff(&x);
            if resid <= 1e-8 && back == 0.0 {
                lifted += 1;
            }
        }
    }

    let mut rng = linalg::rng_from_seed(777);
    let mut spot = 0;
    let mut bad = 0;
    for i in 0..60 {
        let y = HermTuple::random_with(&mut rng, 2, 3);
        let x = to_boundary(&wild, &y).unwrap();
        let x = if i % 3 == 0 { x.scale(0.8) } else { x };
        let dim = wild_poly(&x).unwrap().map_spectrum(|v| v).unwrap();
        let kdim = linalg::eigh(&dim).unwrap().values.iter().filter(|v| **v <= TOL).count();
        if kdim <= 1 {
            spot += 1;
            let arv = is_arveson(&wild, &x, TOL).map(|v| v.boundary).unwrap_or(true) || wild_arveson_test(&x, TOL).unwrap_or(true);
            bad += usize::from(arv);
        }
    }
    outcome(
        disagree == 0 && lifted == 20 && bad == 0 && spot > 0,
        format!("rank test vs kernel test disagreements {disagree}/100 ({arv} Arveson), lift-one {lifted}/20, size-3 low-kernel Arveson {bad}/{spot}"),
    )
}

fn criterion_8() -> Outcome {
    let results: Vec<(bool, f64)> = (0..50u64)
        .into_par_iter()
        .map(|i| {
            let mut rng = linalg::rng_from_seed(800 + i);
            let kinds = rng.random_range(1..=3);
            let mut blocks: Vec<(HermTuple, usize)> = Vec::new();
            let mut total = 0;
            for _ in 0..kinds {
                let size = rng.random_range(1..=3);
                let mult = rng.random_range(1..=2);
                if total + size * mult > 8 {
                    continue;
                }
                total += size * mult;
                blocks.push((HermTuple::random_with(&mut rng, 2, size), mult));
            }
            let parts: Vec<HermTuple> =
                blocks.iter().flat_map(|(b, m)| std::iter::repeat_n(b.clone(), *m)).collect();
            let u = linalg::random_unitary_with(&mut rng, total);
            let x = HermTuple::direct_sum_all(&parts).unwrap().conjugate(&u);
            let Ok(dec) = decompose_irreducibles(&x, TOL, i) else { return (false, f64::INFINITY) };
            let err = dec.reassembly_error(&x).unwrap_or(f64::INFINITY);
            let mut matched = vec![false; blocks.len()];
            let mut ok = dec.blocks.len() == blocks.len();
            for (b, m) in dec.blocks.iter().zip(&dec.multiplicities) {
                let hit = blocks
                    .iter()
                    .enumerate()
                    .position(|(k, (orig, om))| !matched[k] && om == m && unitarily_equivalent(b, orig, TOL).is_some());
                match hit {
                    Some(k) => matched[k] = true,
                    None => ok = false,
                }
            }
            (ok && err <= 1e-7, err)
        })
        .collect();
    let good = results.iter().filter(|r| r.0).count();
    let worst = results.iter().map(|r| r.1).fold(0.0, f64::max);
    outcome(good == 50, format!("{good}/50 decompositions exact, worst reassembly error {worst:.1e}"))
}

fn criterion_9() -> Outcome {
    let mut pencils: Vec<MonicPencil> = vec![
        gallery::cube(2).unwrap().pencil,
        gallery::cube(3).unwrap().pencil,
        gallery::interval().pencil,
        gallery::spin_disk().pencil,
        gallery::wild_disk().pencil,
        gallery::naimark(2).unwrap().pencil,
        gallery::naimark(3).unwrap().pencil,
        gallery::tv_lift(1.0).unwrap().0.pencil,
    ];
    pencils.push(gallery::simplex_from_vertices(&[vec![-1.0, -0.5], vec![2.0, -1.0], vec![0.3, 1.5]]).unwrap().pencil);
    let results: Vec<(bool, bool)> = (0..500u64)
        .into_par_iter()
        .map(|i| {
            let a = &pencils[(i as usize) % pencils.len()];
            let mut rng = linalg::rng_from_seed(9000 + i);
            let g = a.g();
            let x = match i % 3 {
                0 => to_boundary(a, &HermTuple::random_with(&mut rng, g, 1)),
                1 => {
                    let n = rng.random_range(2..=3);
                    to_boundary(a, &HermTuple::random_with(&mut rng, g, n))
                }
                _ => {
                    let p = to_boundary(a, &HermTuple::random_with(&mut rng, g, 1));
                    let n = rng.random_range(1..=2);
                    let q = to_boundary(a, &HermTuple::random_with(&mut rng, g, n));
                    p.zip(q).map(|(p, q)| p.direct_sum(&q).unwrap())
                }
            };
            let Some(x) = x else { return (true, false) };
            match classify(a, &x, TOL) {
                Ok(cl) => (cl.hierarchy_holds(), true),
                Err(_) => (false, true),
            }
        })
        .collect();
    let tested = results.iter().filter(|r| r.1).count();
    let violations = results.iter().filter(|r| !r.0).count();
    outcome(violations == 0 && tested >= 450, format!("{tested} boundary points classified, hierarchy violations {violations}"))
}

fn criterion_10() -> Outcome {
    let square = gallery::cube(2).unwrap().pencil;
    let mut extreme = Vec::new();
    for k in 0..64 {
        // Perimeter of [−1, 1]² at spacing 1/8, starting at a corner.
        let s = k as f64 / 8.0;
        let (side, r) = ((s / 2.0).floor() as usize, s % 2.0);
        let p = match side {
            0 => [-1.0 + r, -1.0],
            1 => [1.0, -1.0 + r],
            2 => [1.0 - r, 1.0],
            _ => [-1.0, 1.0 - r],
        };
        if is_euclidean_extreme(&square, &HermTuple::scalar(&p), TOL).unwrap().extreme {
            extreme.push(p);
        }
    }
    let corners = extreme.len() == 4 && extreme.iter().all(|p| p[0].abs() == 1.0 && p[1].abs() == 1.0);
    let spin = gallery::spin_disk().pencil;
    let circle = (0..64)
        .filter(|k| {
            let th = 2.0 * PI * *k as f64 / 64.0;
            let x = HermTuple::scalar(&[th.cos(), th.sin()]);
            is_euclidean_extreme(&spin, &x, TOL).unwrap().extreme && is_arveson(&spin, &x, TOL).unwrap().boundary
        })
        .count();
    outcome(corners && circle == 64, format!("square: {} extreme grid points (corners only: {corners}), circle: {circle}/64", extreme.len()))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("cube boundary", criterion_1),
        ("spin disk", criterion_2),
        ("kernel test vs dilation oracle", criterion_3),
        ("interlacing", criterion_4),
        ("free simplex", criterion_5),
        ("TV screen", criterion_6),
        ("wild disk", criterion_7),
        ("decomposition round-trip", criterion_8),
        ("hierarchy sandwich", criterion_9),
        ("level-1 extreme points", criterion_10),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let out = run();
        let tag = if out.pass { "PASS" } else { "FAIL" };
        println!("criterion {:>2} [{tag}] {name}: {} ({:.1}s)", i + 1, out.detail, start.elapsed().as_secs_f64());
        failed += usize::from(!out.pass);
    }
    println!("acceptance: {}/{} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
