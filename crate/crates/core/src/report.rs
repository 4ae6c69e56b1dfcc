//! Verification suites and their JSON reports.
//!
//! A report is deterministic for a fixed configuration: it carries no
//! timings, and JSON objects serialize with sorted keys. Every check names
//! the result it reproduces through a short descriptive `ref` tag.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Map, Value};

use crate::cohomology::{self, CochainSpace};
use crate::error::{Error, Result};
use crate::frame::{self, AdaptedFrame, GradedTensor};
use crate::graded::{self, GradedAlgebra};
use crate::heisenberg;
use crate::io::{mat_to_json, point_data_to_json};
use crate::linalg::Mat;
use crate::scalar::Scalar;
use crate::weyl::{self, QCPointData, Tensor4, WeylEngine};

pub const SCHEMA: u64 = 1;

#[derive(Clone, Debug, PartialEq)]
pub struct Check {
    pub name: String,
    pub reference: &'static str,
    pub passed: bool,
    pub detail: Value,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Report {
    pub command: &'static str,
    pub n: usize,
    pub mode: &'static str,
    pub seed: Option<u64>,
    pub checks: Vec<Check>,
    pub outputs: Map<String, Value>,
}

impl Report {
    pub fn new<S: Scalar>(command: &'static str, n: usize, seed: Option<u64>) -> Self {
        let mode = if S::is_exact() { "exact" } else { "float" };
        Self { command, n, mode, seed, checks: Vec::new(), outputs: Map::new() }
    }

    pub fn check(&mut self, name: impl Into<String>, reference: &'static str, passed: bool, detail: Value) {
        self.checks.push(Check { name: name.into(), reference, passed, detail });
    }

    /// A residual check: passes when `residual <= gate`.
    pub fn residual(&mut self, name: impl Into<String>, reference: &'static str, residual: f64, gate: f64) {
        self.check(name, reference, residual <= gate, json!({ "residual": residual }));
    }

    pub fn output(&mut self, key: &str, v: Value) {
        self.outputs.insert(key.to_string(), v);
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn to_json(&self) -> Value {
        let checks: Vec<Value> = self
            .checks
            .iter()
            .map(|c| json!({ "name": c.name, "ref": c.reference, "passed": c.passed, "detail": c.detail }))
            .collect();
        json!({
            "schema": SCHEMA,
            "command": self.command,
            "n": self.n,
            "mode": self.mode,
            "seed": self.seed,
            "passed": self.passed(),
            "checks": checks,
            "outputs": Value::Object(self.outputs.clone()),
        })
    }

    /// `PASS name` / `FAIL name` lines.
    pub fn summary_lines(&self) -> Vec<String> {
        self.checks.iter().map(|c| format!("{} {} [{}]", if c.passed { "PASS" } else { "FAIL" }, c.name, c.reference)).collect()
    }
}

fn gate<S: Scalar>(tol: f64) -> f64 {
    if S::is_exact() {
        0.0
    } else {
        tol
    }
}

fn opt_json<S: Scalar>(x: &Option<S>) -> Value {
    x.as_ref().map_or(Value::Null, S::to_json)
}

/// Dimensions, grading additivity, Jacobi identity, the `B`-duality of the
/// codifferential bases and the Killing constant.
pub fn algebra_report<S: Scalar>(n: usize, seed: u64, tol: f64) -> Result<Report> {
    let alg = GradedAlgebra::<S>::new(n)?;
    let mut rep = Report::new::<S>("algebra", n, Some(seed));
    let dim = alg.dim();
    let expected = (n + 2) * (2 * n + 5);
    rep.check("dimension", "sp(n+1,1) dimension", dim == expected, json!({ "dim": dim, "expected": expected }));
    let comps = graded::component_dimensions(n);
    let want = [3, 4 * n, 4 + n * (2 * n + 1), 4 * n, 3];
    rep.check("component dimensions", "grading of sp(n+1,1)", comps == want, json!({ "dims": comps }));
    rep.residual("grading additivity", "grading of sp(n+1,1)", alg.grading_defect(), gate::<S>(tol));
    let jac = if dim <= 60 {
        alg.jacobi_defect(alg.all_triples())
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let triples: Vec<_> = (0..2000).map(|_| (rng.gen_range(0..dim), rng.gen_range(0..dim), rng.gen_range(0..dim))).collect();
        alg.jacobi_defect(triples)
    };
    rep.residual("jacobi identity", "Lie algebra axioms", jac, gate::<S>(tol));
    rep.check("dual bases", "codifferential dual basis", alg.is_identity_pairing(), Value::Null);
    let kappa = alg.killing_ratio();
    let kappa_ok = (kappa.clone() - S::from_i64(8 * (n as i64 + 3))).near_zero(gate::<S>(tol));
    rep.check("killing constant", "Killing form versus trace form", kappa_ok, json!({ "ratio": kappa.to_json() }));
    rep.output("dim", json!(dim));
    Ok(rep)
}

/// `□` scalars on symmetric forms, `H^1_2 = 0` and the `H^2` profile.
pub fn cohomology_report<S: Scalar>(n: usize, seed: u64, tol: f64) -> Result<Report> {
    if !(1..=2).contains(&n) {
        return Err(Error::Config(format!("cohomology runs for n = 1, 2, not {n}")));
    }
    let space = CochainSpace::<S>::new(n)?;
    let mut rep = Report::new::<S>("cohomology", n, Some(seed));
    let scalars = cohomology::box_scalars_on_symmetric_forms(&space, seed, gate::<S>(tol).max(1e-12))?;
    let ni = n as i64;
    let want = [4 * (ni + 2), 4 * (ni + 4), 8 * (ni + 2)];
    for ((name, got), w) in ["(S2_0)[-1]", "(S2_0)[3]", "R g"].iter().zip(&scalars).zip(want) {
        // (S^2_0)_[3] is the zero module for n = 1
        let ok = match got {
            Some(x) => (x.clone() - S::from_i64(w)).near_zero(gate::<S>(tol)),
            None => n == 1 && *name == "(S2_0)[3]",
        };
        rep.check(format!("box on {name}"), "box eigenvalues on symmetric forms", ok, json!({ "scalar": opt_json(got), "expected": w }));
    }
    let h12 = space.harmonic_space(1, 2, tol)?.len();
    rep.check("H1_2 vanishes", "H1 in homogeneity two", h12 == 0, json!({ "dim": h12 }));
    let mut profile = Map::new();
    let mut positive = Vec::new();
    for (l, h) in cohomology::harmonic_profile(&space, 2, tol)? {
        if h.is_empty() {
            continue;
        }
        let inside = h.iter().all(|c| cohomology::in_lambda2_g1_g0(&space, c));
        profile.insert(l.to_string(), json!({ "dim": h.len(), "in_lambda2_g1_g0": inside }));
        if l > 0 {
            positive.push((l, h.len(), inside));
        }
    }
    let ok = match n {
        1 => positive.len() == 2 && positive[0].0 == 1 && positive[1].0 == 2 && positive[1].2,
        _ => positive.len() == 1 && positive[0].0 == 2 && positive[0].2,
    };
    rep.check("H2 positive-homogeneity profile", "H2 concentration", ok, json!({ "positive": positive.iter().map(|p| p.0).collect::<Vec<_>>() }));
    rep.output("box_scalars", Value::Array(scalars.iter().map(opt_json).collect()));
    rep.output("h2_profile", Value::Object(profile));
    Ok(rep)
}

/// A random element of a random graded component with small integer entries.
pub fn random_tensor<S: Scalar, R: Rng>(frame: &AdaptedFrame<S>, rng: &mut R) -> Result<GradedTensor<S>> {
    let n = frame.n();
    let d = frame.dim();
    let deg: i32 = rng.gen_range(-2..=2);
    let mut ints = |len: usize| -> Vec<S> { (0..len).map(|_| S::from_i64(rng.gen_range(-3..=3))).collect() };
    Ok(match deg {
        -2 => GradedTensor::V(ints(3)),
        -1 => GradedTensor::D(ints(d)),
        1 => GradedTensor::DStar(ints(d)),
        2 => GradedTensor::VStar(ints(3)),
        _ => {
            let o = graded::degree_offsets(n);
            let coords: Vec<(usize, S)> = (o[2]..o[3]).zip(ints(o[3] - o[2])).collect();
            frame::tensor_from_coords(frame, 0, &coords)?
        }
    })
}

/// Largest mismatch between the algebraic bracket table and the matrix
/// bracket: all basis pairs when `exhaustive`, plus `random_pairs` random pairs.
pub fn commutator_sweep<S: Scalar>(n: usize, seed: u64, exhaustive: bool, random_pairs: usize) -> Result<(usize, f64)> {
    let frame = AdaptedFrame::<S>::new(n)?;
    let mut checked = 0;
    let mut worst: f64 = 0.0;
    if exhaustive {
        let basis = frame::basis_tensors(&frame)?;
        for a in &basis {
            for b in &basis {
                worst = worst.max(frame::bracket_mismatch(&frame, a, b)?);
                checked += 1;
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..random_pairs {
        let a = random_tensor(&frame, &mut rng)?;
        let b = random_tensor(&frame, &mut rng)?;
        worst = worst.max(frame::bracket_mismatch(&frame, &a, &b)?);
        checked += 1;
    }
    Ok((checked, worst))
}

pub fn commutators_report<S: Scalar>(n: usize, seed: u64, random_pairs: usize, tol: f64) -> Result<Report> {
    let mut rep = Report::new::<S>("commutators", n, Some(seed));
    let exhaustive = n == 1;
    let (checked, worst) = commutator_sweep::<S>(n, seed, exhaustive, random_pairs)?;
    rep.check(
        "bracket table matches matrix bracket",
        "algebraic bracket table",
        worst <= gate::<S>(tol),
        json!({ "pairs": checked, "exhaustive_basis": exhaustive, "residual": worst }),
    );
    Ok(rep)
}

fn vmap_json<S: Scalar>(m: &weyl::VMap<S>) -> Value {
    Value::Array(m.iter().map(mat_to_json).collect())
}

pub fn tensor4_json<S: Scalar>(t: &Tensor4<S>) -> Value {
    let d = t.dim();
    Value::Array(
        (0..d)
            .map(|u| {
                Value::Array(
                    (0..d)
                        .map(|v| {
                            Value::Array(
                                (0..d)
                                    .map(|w| Value::Array((0..d).map(|z| t.get(u, v, w, z).to_json()).collect()))
                                    .collect(),
                            )
                        })
                        .collect(),
                )
            })
            .collect(),
    )
}

/// The Weyl pipeline on validated point data.
pub fn weyl_report<S: Scalar>(data: &QCPointData<S>, seed: Option<u64>, tol: f64) -> Result<Report> {
    data.validate(tol)?;
    let n = data.n;
    let g = gate::<S>(tol);
    let mut rep = Report::new::<S>("weyl", n, seed);
    let engine = WeylEngine::<S>::new(n)?;
    let alpha = weyl::alpha_qc(data);
    rep.residual("tau identity", "tau_s in terms of T0 and scal", data.imv3_residual()?, g);
    let on_v = engine.codiff_k2_on_v(data, &alpha)?;
    rep.residual("codiff K on V vanishes for alpha_qc", "qc Weyl correction", on_v.iter().map(Mat::max_abs).fold(0.0, f64::max), g);
    let closed_v = weyl::codiff_k2_on_v(data, &alpha)?;
    let gap = on_v.iter().zip(&closed_v).map(|(a, b)| a.sub(b).max_abs()).fold(0.0, f64::max);
    rep.residual("codiff K on V closed form", "codiff K on V with corr(alpha)", gap, g);
    let sol = engine.solve_alpha_numeric(data, tol)?;
    let gap = sol.alpha.iter().zip(&alpha).map(|(a, b)| a.sub(b).max_abs()).fold(0.0, f64::max);
    rep.check(
        "solved alpha equals closed form",
        "qc Weyl correction",
        gap <= g && sol.residual <= g,
        json!({ "residual": sol.residual, "gap": gap, "c_determined": sol.c.is_some() }),
    );
    let cd = engine.codiff_kqc2_on_d(data)?;
    rep.residual("codiff Kqc on D = Ric + 2T0 + 6U", "codiff of Kqc(2)", cd.cochain_route.sub(&cd.ricci_form).max_abs(), g);
    rep.residual("Ric + 2T0 + 6U = torsion form", "codiff of Kqc(2)", cd.ricci_form.sub(&cd.torsion_form).max_abs(), g);
    let rho = engine.rho_tensor(data, tol)?;
    rep.residual("L closed form = box inverse route", "homogeneity-two Rho tensor", rho.l_closed.sub(&rho.l_box).max_abs(), g);
    let w = engine.wqc2(data, tol)?;
    rep.residual("Wqc2 route A = route B", "Wqc2 curvature tensor", w.route_a.sub(&w.route_b).max_abs(), g);
    rep.residual("Wqc2 pair antisymmetry", "Wqc2 curvature tensor", w.route_a.pair_antisymmetry_defect(), g);
    rep.residual("Weyl curvature has no V components", "Weyl curvature from total curvature", w.vertical_defect, g);
    rep.residual("Weyl curvature is normal", "Weyl curvature from total curvature", w.normality_defect, g);
    rep.residual("L identity", "L identity", weyl::l_identity_defect(data), g);
    rep.output("alpha_qc", vmap_json(&alpha));
    rep.output("L", mat_to_json(&rho.l_closed));
    rep.output("codiff_Kqc2", mat_to_json(&cd.cochain_route));
    rep.output("Wqc2_route_a", tensor4_json(&w.route_a));
    rep.output("Wqc2_route_b", tensor4_json(&w.route_b));
    Ok(rep)
}

pub fn heisenberg_report<S: Scalar>(n: usize, tol: f64) -> Result<Report> {
    let flat = heisenberg::flatness_pipeline::<S>(n, tol)?;
    let mut rep = Report::new::<S>("heisenberg", n, None);
    for st in &flat.stages {
        rep.check(st.name, "flat model", st.passed, json!({ "residual": st.residual }));
    }
    rep.output("max_wqc2_entry", json!(flat.max_entry));
    let data = heisenberg::LeftInvariantQCData::<S>::heisenberg(n)?;
    let conn = heisenberg::solve_biquard(&data, tol)?;
    let ct = heisenberg::curvature_and_torsion(&data, &conn)?;
    rep.output("point_data", point_data_to_json(&ct.point));
    Ok(rep)
}

/// A quick pass over every suite at `n = 1`.
pub fn selftest<S: Scalar>(seed: u64, tol: f64) -> Result<Report> {
    let mut rep = Report::new::<S>("selftest", 1, Some(seed));
    let data: QCPointData<S> = weyl::generate_consistent_data(1, seed)?;
    let parts = [
        algebra_report::<S>(1, seed, tol)?,
        cohomology_report::<S>(1, seed, tol)?,
        commutators_report::<S>(1, seed, 200, tol)?,
        weyl_report(&data, Some(seed), tol)?,
        heisenberg_report::<S>(1, tol)?,
    ];
    for p in parts {
        for c in p.checks {
            rep.checks.push(Check { name: format!("{}: {}", p.command, c.name), ..c });
        }
    }
    Ok(rep)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Exact;

    #[test]
    fn suites_pass_at_n1() {
        let rep = selftest::<Exact>(42, 0.0).unwrap();
        assert!(rep.passed(), "{:#?}", rep.checks.iter().filter(|c| !c.passed).collect::<Vec<_>>());
        assert_eq!(rep.to_json()["schema"], json!(1));
    }

    #[test]
    fn reports_are_deterministic() {
        let a = commutators_report::<Exact>(1, 3, 50, 0.0).unwrap().to_json();
        let b = commutators_report::<Exact>(1, 3, 50, 0.0).unwrap().to_json();
        assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
    }

    #[test]
    fn corrupted_data_names_the_invariant() {
        let mut data: QCPointData<Exact> = weyl::generate_consistent_data(1, 1).unwrap();
        data.t0[(0, 1)] = data.t0[(0, 1)].clone() + Exact::from_i64(1);
        match weyl_report(&data, None, 0.0) {
            Err(Error::Invariant { name, .. }) => assert_eq!(name, "T0 symmetric"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn float_selftest() {
        let rep = selftest::<f64>(7, 1e-9).unwrap();
        assert!(rep.passed(), "{:#?}", rep.checks.iter().filter(|c| !c.passed).collect::<Vec<_>>());
    }
}
