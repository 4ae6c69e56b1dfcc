//! Acceptance criteria. Each criterion prints one `PASS`/`FAIL` line; the
//! process exits nonzero if any criterion fails.

use std::collections::HashMap;
use std::time::Instant;

use qcweyl_core::cohomology::{self, CochainSpace};
use qcweyl_core::frame::AdaptedFrame;
use qcweyl_core::graded::GradedAlgebra;
use qcweyl_core::heisenberg;
use qcweyl_core::linalg::{self, Mat};
use qcweyl_core::report;
use qcweyl_core::weyl::{self, QCPointData, WeylEngine};
use qcweyl_core::{Exact, Scalar};

type Outcome = Result<String, String>;
type Criterion<'a> = (&'static str, Box<dyn Fn() -> Outcome + 'a>);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn e(x: i64) -> Exact {
    Exact::from_i64(x)
}

// ---------------------------------------------------------------- criterion 1

/// Dimension of the Casimir eigenspace `(S^2_0)_[3]`, from the frame matrices.
fn s2_three_dim(n: usize) -> usize {
    let f = AdaptedFrame::<Exact>::new(n).unwrap();
    let d = 4 * n;
    let mut basis = Vec::new();
    for i in 0..d {
        for j in i..d {
            let mut m = Mat::zeros(d, d);
            m[(i, j)] = e(1);
            m[(j, i)] = e(1);
            basis.push(m);
        }
    }
    // columns: (C - 3) A and the trace, over symmetric A
    let rows = d * d + 1;
    let cols: Vec<Vec<Exact>> = basis
        .iter()
        .map(|a| {
            let mut c = a.scale(&e(-3));
            for s in 0..3 {
                let is = &f.matrices()[s];
                c = c.sub(&is.matmul(a).matmul(is));
            }
            let mut v = c.as_slice().to_vec();
            v.push(a.trace());
            v
        })
        .collect();
    let m = Mat::from_fn(rows, cols.len(), |r, c| cols[c][r].clone());
    linalg::nullspace(&m, 0.0).len()
}

fn criterion_box_eigenvalues() -> Outcome {
    let mut found = Vec::new();
    for n in [1usize, 2] {
        let space = CochainSpace::<Exact>::new(n).unwrap();
        let got = cohomology::box_scalars_on_symmetric_forms(&space, 11, 0.0).map_err(|e| e.to_string())?;
        let ni = n as i64;
        let want = [4 * (ni + 2), 4 * (ni + 4), 8 * (ni + 2)];
        for (k, (g, w)) in got.iter().zip(want).enumerate() {
            match g {
                Some(x) => ensure(*x == e(w), || format!("n={n} module {k}: {x} != {w}"))?,
                // the statement is vacuous on a zero module
                None => ensure(k == 1 && s2_three_dim(n) == 0, || format!("n={n} module {k} empty"))?,
            }
        }
        found.push(format!("n={n}: {}", got.iter().map(|x| x.as_ref().map_or("-".into(), |x| x.to_string())).collect::<Vec<_>>().join(",")));
    }
    ensure(s2_three_dim(2) > 0, || "(S2_0)[3] empty at n=2".into())?;
    Ok(format!("{} ((S2_0)[3] is zero at n=1)", found.join("; ")))
}

// ---------------------------------------------------------------- criterion 2

/// `C^q_l(g_-, g)` basis: sorted argument tuples in `g_-` and a value index.
struct Block {
    cells: Vec<(Vec<usize>, usize)>,
    pos: HashMap<(Vec<usize>, usize), usize>,
}

fn tuples(m: usize, q: usize) -> Vec<Vec<usize>> {
    if q == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for t in tuples(m, q - 1) {
        let start = t.last().map_or(0, |&x| x + 1);
        for x in start..m {
            let mut u = t.clone();
            u.push(x);
            out.push(u);
        }
    }
    out
}

fn block(alg: &GradedAlgebra<Exact>, q: usize, l: i32) -> Block {
    let m = alg.dim_minus();
    let mut cells = Vec::new();
    for t in tuples(m, q) {
        let shift: i32 = t.iter().map(|&x| alg.degree(x)).sum();
        for a in 0..alg.dim() {
            if alg.degree(a) - shift == l {
                cells.push((t.clone(), a));
            }
        }
    }
    let pos = cells.iter().cloned().enumerate().map(|(i, c)| (c, i)).collect();
    Block { cells, pos }
}

/// Sorts distinct arguments, returning the permutation sign, or `None` on a repeat.
fn sorted(mut v: Vec<usize>) -> Option<(Vec<usize>, i64)> {
    let mut sign = 1;
    for i in 0..v.len() {
        for j in 0..v.len() - 1 - i {
            if v[j] == v[j + 1] {
                return None;
            }
            if v[j] > v[j + 1] {
                v.swap(j, j + 1);
                sign = -sign;
            }
        }
    }
    Some((v, sign))
}

/// Matrix of the Chevalley–Eilenberg differential `C^q_l -> C^{q+1}_l`.
fn differential(alg: &GradedAlgebra<Exact>, src: &Block, dst: &Block) -> Mat<Exact> {
    let mut m: Mat<Exact> = Mat::zeros(dst.cells.len(), src.cells.len());
    for (row, (t, b)) in dst.cells.iter().enumerate() {
        let q = t.len() - 1;
        for k in 0..=q {
            let rest: Vec<usize> = t.iter().enumerate().filter(|(j, _)| *j != k).map(|(_, &x)| x).collect();
            let sign = if k % 2 == 0 { 1 } else { -1 };
            for (col, (s, a)) in src.cells.iter().enumerate() {
                if *s != rest {
                    continue;
                }
                for (c, x) in alg.structure_constants(t[k], *a) {
                    if c == b {
                        m[(row, col)] = m[(row, col)].clone() + x.clone() * e(sign);
                    }
                }
            }
        }
        for k in 0..=q {
            for l in k + 1..=q {
                let sign = if (k + l) % 2 == 0 { 1 } else { -1 };
                for (c, x) in alg.structure_constants(t[k], t[l]) {
                    let mut args = vec![*c];
                    args.extend(t.iter().enumerate().filter(|(j, _)| *j != k && *j != l).map(|(_, &y)| y));
                    if let Some((args, s)) = sorted(args) {
                        if let Some(&col) = src.pos.get(&(args, *b)) {
                            m[(row, col)] = m[(row, col)].clone() + x.clone() * e(sign * s);
                        }
                    }
                }
            }
        }
    }
    m
}

/// `dim H^2_l` from `∂` alone.
fn h2_dim(alg: &GradedAlgebra<Exact>, l: i32) -> usize {
    let (c1, c2, c3) = (block(alg, 1, l), block(alg, 2, l), block(alg, 3, l));
    let rank = |a: &Block, b: &Block| if a.cells.is_empty() || b.cells.is_empty() { 0 } else { linalg::rank(&differential(alg, a, b), 0.0) };
    c2.cells.len() - rank(&c2, &c3) - rank(&c1, &c2)
}

fn criterion_harmonic_profile() -> Outcome {
    let mut lines = Vec::new();
    for n in [1usize, 2] {
        let space = CochainSpace::<Exact>::new(n).unwrap();
        let alg = space.algebra();
        let h12 = space.harmonic_space(1, 2, 0.0).map_err(|e| e.to_string())?;
        ensure(h12.is_empty(), || format!("n={n}: H1_2 has dimension {}", h12.len()))?;
        let profile = cohomology::harmonic_profile(&space, 2, 0.0).map_err(|e| e.to_string())?;
        let mut positive = Vec::new();
        for (l, h) in &profile {
            let oracle = h2_dim(alg, *l);
            ensure(h.len() == oracle, || format!("n={n} l={l}: ker box {} != H2 {oracle}", h.len()))?;
            if *l > 0 && !h.is_empty() {
                positive.push((*l, h.len(), h.iter().all(|c| cohomology::in_lambda2_g1_g0(&space, c))));
            }
            if !h.is_empty() {
                lines.push(format!("n={n} l={l}: {}", h.len()));
            }
        }
        let top = positive.iter().find(|p| p.0 == 2).ok_or_else(|| format!("n={n}: no homogeneity-2 component"))?;
        ensure(top.2, || format!("n={n}: homogeneity-2 part leaves Λ²g₋₁*⊗g₀"))?;
        match n {
            1 => ensure(positive.iter().map(|p| p.0).collect::<Vec<_>>() == [1, 2], || format!("n=1 positive {positive:?}"))?,
            _ => ensure(positive.len() == 1, || format!("n=2 positive {positive:?}"))?,
        }
        if n == 2 {
            // Λ²g₋₁*⊗g₋₂ modulo ∂ of degree-preserving g₋ endomorphisms (derivations = g₀)
            let d = 4 * n;
            let hand = d * (d - 1) / 2 * 3 - (d * d + 9 - (4 + n * (2 * n + 1)));
            let l0 = profile.iter().find(|p| p.0 == 0).map_or(0, |p| p.1.len());
            ensure(l0 == hand, || format!("n=2 l=0: {l0} != {hand}"))?;
        }
    }
    Ok(format!("H1_2 = 0; positive homogeneity as expected; box kernel = ∂-cohomology [{}]", lines.join(", ")))
}

// ---------------------------------------------------------------- criterion 3

fn criterion_commutators() -> Outcome {
    let (c1, w1) = report::commutator_sweep::<Exact>(1, 5, true, 0).map_err(|e| e.to_string())?;
    ensure(c1 == 21 * 21, || format!("n=1 swept {c1} pairs"))?;
    ensure(w1 == 0.0, || format!("n=1 mismatch {w1}"))?;
    let (c2, w2) = report::commutator_sweep::<Exact>(2, 6, false, 10_000).map_err(|e| e.to_string())?;
    ensure(c2 >= 10_000 && w2 == 0.0, || format!("n=2 mismatch {w2} over {c2}"))?;
    Ok(format!("{c1} basis pairs at n=1, {c2} random pairs at n=2, exact"))
}

// ------------------------------------------------------------ criteria 4 to 6

const DATA_SETS: u64 = 50;

fn datasets(n: usize) -> Vec<QCPointData<Exact>> {
    (0..DATA_SETS).map(|s| weyl::generate_consistent_data(n, 1000 + s).unwrap()).collect()
}

fn max_vmap(a: &[Mat<Exact>; 3]) -> f64 {
    a.iter().map(Mat::max_abs).fold(0.0, f64::max)
}

fn criterion_alpha(sets: &[(usize, Vec<QCPointData<Exact>>)]) -> Outcome {
    for (n, list) in sets {
        let engine = WeylEngine::<Exact>::new(*n).unwrap();
        for (k, data) in list.iter().enumerate() {
            let sol = engine.solve_alpha_numeric(data, 0.0).map_err(|e| e.to_string())?;
            let closed = weyl::alpha_qc(data);
            ensure(sol.alpha == closed && sol.residual == 0.0, || format!("n={n} set {k}: solved alpha differs"))?;
            let on_v = engine.codiff_k2_on_v(data, &closed).map_err(|e| e.to_string())?;
            ensure(max_vmap(&on_v) == 0.0, || format!("n={n} set {k}: codiff K on V = {}", max_vmap(&on_v)))?;
        }
    }
    Ok(format!("{DATA_SETS} data sets each for n=1,2; residual 0"))
}

fn criterion_rho(sets: &[(usize, Vec<QCPointData<Exact>>)]) -> Outcome {
    for (n, list) in sets {
        let engine = WeylEngine::<Exact>::new(*n).unwrap();
        let c = Exact::new(1.into(), (32 * n * (n + 2)).into());
        for (k, data) in list.iter().enumerate() {
            let rho = engine.rho_tensor(data, 0.0).map_err(|e| e.to_string())?;
            let d = 4 * n;
            let formula = data.t0.scale(&Exact::new(1.into(), 2.into())).add(&data.u).add(&Mat::identity(d).scale(&(data.scal.clone() * c.clone())));
            ensure(rho.l_closed == formula, || format!("n={n} set {k}: closed form"))?;
            ensure(rho.l_box == formula, || format!("n={n} set {k}: box route off by {}", rho.l_box.sub(&formula).max_abs()))?;
        }
    }
    Ok(format!("½T0 + U + scal/(32n(n+2)) g equals the box-inverse route on {} sets", 2 * DATA_SETS))
}

/// `L(w, I_r z) - L(I_r w, z) + L(I_s w, I_t z) - L(I_t w, I_s z)
///  = T0(w, I_r z) - T0(I_r w, z)` on all basis pairs.
fn l_identity_holds(data: &QCPointData<Exact>) -> bool {
    let l = weyl::l_tensor(data);
    let i = data.frame.matrices();
    (0..3).all(|r| {
        let (s, t) = ((r + 1) % 3, (r + 2) % 3);
        let lhs = l.matmul(&i[r]).sub(&i[r].transpose().matmul(&l)).add(&i[s].transpose().matmul(&l).matmul(&i[t])).sub(&i[t].transpose().matmul(&l).matmul(&i[s]));
        let rhs = data.t0.matmul(&i[r]).sub(&i[r].transpose().matmul(&data.t0));
        lhs == rhs
    })
}

fn criterion_wqc2(sets: &[(usize, Vec<QCPointData<Exact>>)]) -> Outcome {
    let mut nonzero = 0;
    for (n, list) in sets {
        let engine = WeylEngine::<Exact>::new(*n).unwrap();
        for (k, data) in list.iter().enumerate() {
            let w = engine.wqc2(data, 0.0).map_err(|e| e.to_string())?;
            ensure(w.route_a == w.route_b, || format!("n={n} set {k}: routes differ by {}", w.route_a.sub(&w.route_b).max_abs()))?;
            ensure(w.route_a.pair_antisymmetry_defect() == 0.0 && w.route_b.pair_antisymmetry_defect() == 0.0, || format!("n={n} set {k}: not antisymmetric"))?;
            ensure(l_identity_holds(data), || format!("n={n} set {k}: L identity"))?;
            if !w.route_a.is_zero() {
                nonzero += 1;
            }
        }
    }
    ensure(nonzero > 0, || "all Wqc2 vanish".into())?;
    Ok(format!("routes agree, antisymmetric, L identity exact; {nonzero} nonzero tensors"))
}

// ---------------------------------------------------------------- criterion 7

fn criterion_flat_model() -> Outcome {
    let t = Instant::now();
    for n in [1usize, 2] {
        let r = heisenberg::flatness_pipeline::<Exact>(n, 0.0).map_err(|e| e.to_string())?;
        ensure(r.passed && r.max_entry == 0.0, || format!("n={n}: {:?}", r.stages.iter().filter(|s| !s.passed).map(|s| s.name).collect::<Vec<_>>()))?;
        ensure(r.stages.iter().any(|s| s.name == "biquard conditions"), || "biquard stage missing".into())?;
    }
    let r = heisenberg::flatness_pipeline::<f64>(3, 1e-12).map_err(|e| e.to_string())?;
    ensure(r.passed && r.max_entry < 1e-12, || format!("n=3 float: max entry {:e}", r.max_entry))?;
    let secs = t.elapsed().as_secs_f64();
    ensure(secs < 120.0, || format!("took {secs:.1}s"))?;
    Ok(format!("Wqc2 = 0 exactly for n=1,2; n=3 float max {:e}", r.max_entry))
}

// ---------------------------------------------------------------- criterion 8

fn criterion_structure() -> Outcome {
    let space = CochainSpace::<Exact>::new(1).unwrap();
    let alg = space.algebra();
    ensure(alg.grading_defect() == 0.0, || "grading".into())?;
    ensure(alg.jacobi_defect(alg.all_triples()) == 0.0, || "jacobi".into())?;
    for q in 0..3 {
        let d0 = space.differential_matrix(q).unwrap();
        let d1 = space.differential_matrix(q + 1).unwrap();
        for j in 0..space.dim(q) {
            let v = vec![(j, e(1))];
            ensure(d1.mul_sparse(&d0.mul_sparse(&v)).is_empty(), || format!("∂∂ ≠ 0 on C^{q}"))?;
        }
    }
    for q in 2..=4 {
        let c0 = space.codifferential_matrix(q).unwrap();
        let c1 = space.codifferential_matrix(q - 1).unwrap();
        for j in 0..space.dim(q) {
            let v = vec![(j, e(1))];
            ensure(c1.mul_sparse(&c0.mul_sparse(&v)).is_empty(), || format!("∂*∂* ≠ 0 on C^{q}"))?;
        }
    }
    let mut blocks = 0;
    for q in 0..=3 {
        for l in space.homogeneity_range(q) {
            if !space.block(q, l).is_empty() {
                space.box_block_matrix(q, l).map_err(|e| e.to_string())?;
                blocks += 1;
            }
        }
    }
    Ok(format!("∂² = 0 (q≤2), ∂*² = 0 (q≤4), grading, Jacobi, box preserves {blocks} homogeneity blocks (q≤3)"))
}

fn main() {
    let t = Instant::now();
    let sets: Vec<(usize, Vec<QCPointData<Exact>>)> = [1, 2].into_iter().map(|n| (n, datasets(n))).collect();
    let criteria: Vec<Criterion> = vec![
        ("1 box eigenvalues", Box::new(criterion_box_eigenvalues)),
        ("2 H1_2 and H2 profile", Box::new(criterion_harmonic_profile)),
        ("3 commutator table", Box::new(criterion_commutators)),
        ("4 Weyl correction", Box::new(|| criterion_alpha(&sets))),
        ("5 Rho tensor routes", Box::new(|| criterion_rho(&sets))),
        ("6 Wqc2 routes and symmetries", Box::new(|| criterion_wqc2(&sets))),
        ("7 flat model", Box::new(criterion_flat_model)),
        ("8 structural invariants", Box::new(criterion_structure)),
    ];
    let mut failed = Vec::new();
    for (name, run) in &criteria {
        let s = Instant::now();
        let res = run();
        let secs = s.elapsed().as_secs_f64();
        match res {
            Ok(detail) => println!("PASS criterion {name} ({secs:.1}s): {detail}"),
            Err(detail) => {
                println!("FAIL criterion {name} ({secs:.1}s): {detail}");
                failed.push(*name);
            }
        }
    }
    println!("total {:.1}s", t.elapsed().as_secs_f64());
    if !failed.is_empty() {
        eprintln!("failed: {failed:?}");
        std::process::exit(1);
    }
}
