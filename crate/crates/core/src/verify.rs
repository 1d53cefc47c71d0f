//! The invariant suite behind `pu verify`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::config::{EPS_ALGEBRA, MIN_INTERACTING_SAMPLES, VERSION};
use crate::dynamics::{mode_decompose, mode_energy};
use crate::embedding::{reconcile_family, Branch, Family, FreeParams};
use crate::linalg::rel_diff;
use crate::model::{
    blend_j, free_vector_field, h1, h2, interacting_vector_field, interaction_sign, j1, j2, Chart, JetState, Potential,
    PuParams, INTERACTION_SIGN,
};
use crate::symmetry::{
    apply_symmetry, commutant_basis, generated_charge, invariant_tensor_space, reference_generators, sample_points,
};

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub value: f64,
    pub tolerance: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

impl Check {
    fn below(name: &'static str, value: f64, tolerance: f64) -> Self {
        Self {
            name,
            passed: value < tolerance,
            value,
            tolerance,
            detail: None,
        }
    }

    fn equals(name: &'static str, value: usize, expected: usize) -> Self {
        Self {
            name,
            passed: value == expected,
            value: value as f64,
            tolerance: expected as f64,
            detail: None,
        }
    }

    fn with_detail(mut self, detail: String) -> Self {
        self.detail = Some(detail);
        self
    }
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct VerifyConfig {
    pub omega1: f64,
    pub omega2: f64,
    /// Coupling for the interacting subset; `0` selects `0.1`.
    pub lambda: f64,
    pub seed: u64,
}

#[derive(Debug, Clone, Serialize)]
pub struct InteractingSummary {
    pub lambda: f64,
    pub samples: usize,
    pub dimension: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct VerifyReport {
    pub version: &'static str,
    pub config: VerifyConfig,
    pub checks: Vec<Check>,
    pub interacting: Option<InteractingSummary>,
    pub reference_rows_discrepant: usize,
    pub all_passed: bool,
    pub first_failure: Option<&'static str>,
}

pub fn run_suite(config: VerifyConfig) -> VerifyReport {
    let mut checks = Vec::new();
    let mut interacting = None;
    let mut discrepant = 0;
    match PuParams::new(config.omega1, config.omega2) {
        Err(e) => checks.push(Check {
            name: "degenerate-frequencies",
            passed: false,
            value: 0.0,
            tolerance: 0.0,
            detail: Some(e.to_string()),
        }),
        Ok(p) => {
            structure_checks(&p, &mut checks);
            symmetry_checks(&p, &mut checks);
            interacting = Some(tensor_checks(&p, config, &mut checks));
            discrepant = embedding_checks(&p, config.seed, &mut checks);
            mode_checks(&p, config.seed, &mut checks);
        }
    }
    let first_failure = checks.iter().find(|c| !c.passed).map(|c| c.name);
    VerifyReport {
        version: VERSION,
        config,
        all_passed: first_failure.is_none(),
        first_failure,
        checks,
        interacting,
        reference_rows_discrepant: discrepant,
    }
}

fn structure_checks(p: &PuParams, checks: &mut Vec<Check>) {
    let a = free_vector_field(p).linear;
    let (s1, s2) = (h1(p).hessian(), h2(p).hessian());
    let (t1, t2) = (j1(p, Chart::Jet), j2(p));
    checks.push(Check::below(
        "hamilton-j1",
        rel_diff(&(t1.matrix() * s1), &a),
        EPS_ALGEBRA,
    ));
    checks.push(Check::below(
        "hamilton-j2",
        rel_diff(&(t2.matrix() * s2), &a),
        EPS_ALGEBRA,
    ));
    let compat = s1 * t1.matrix() * s2 - s2 * t1.matrix() * s1;
    checks.push(Check::below(
        "bihamiltonian-compatibility",
        compat.norm() / (s1.norm() * s2.norm()),
        EPS_ALGEBRA,
    ));
    let (ostro, jet) = (j1(p, Chart::Ostrogradsky), t1.matrix());
    checks.push(Check::below(
        "ostrogradsky-chart-transport",
        rel_diff(ostro.in_chart(p, Chart::Jet).matrix(), jet),
        EPS_ALGEBRA,
    ));
    checks.push(Check::below(
        "interaction-sign",
        (interaction_sign(p) - INTERACTION_SIGN).abs(),
        EPS_ALGEBRA,
    ));
    match blend_j(p, -1.0, 2.0) {
        Ok(b) => checks.push(Check::below("blend-closed-form", b.closed_form_residual, 1e-10)),
        Err(e) => checks.push(Check::below("blend-closed-form", f64::INFINITY, 1e-10).with_detail(e.to_string())),
    }
}

fn symmetry_checks(p: &PuParams, checks: &mut Vec<Check>) {
    let basis = commutant_basis(&free_vector_field(p).linear);
    checks.push(Check::equals("commutant-dimension", basis.dimension, 4));
    checks.push(Check::below("commutant-abelian", basis.max_commutator(), EPS_ALGEBRA));
    let gens = reference_generators(p);
    let proj = gens
        .generators
        .iter()
        .map(|g| basis.projection_residual(&g.xi))
        .fold(0.0, f64::max);
    checks.push(Check::below("generators-in-commutant", proj, EPS_ALGEBRA));
    checks.push(Check::below("generators-abelian", gens.max_commutator(), EPS_ALGEBRA));

    let f = h1(p);
    let scale = f.coeffs().norm();
    let act = |k: usize| apply_symmetry(&gens.generators[k], &f);
    checks.push(Check::below(
        "x1-annihilates-h1",
        act(0).coeffs().norm() / scale,
        EPS_ALGEBRA,
    ));
    checks.push(Check::below(
        "x2-scales-h1",
        (act(1).coeffs() - f.coeffs()).norm() / scale,
        EPS_ALGEBRA,
    ));
    checks.push(Check::below(
        "x4-annihilates-h1",
        act(3).coeffs().norm() / scale,
        EPS_ALGEBRA,
    ));
    let charge = generated_charge(p, &gens.generators[2], &f);
    let beta = p.beta();
    let err = ((charge.proportionality + beta) / beta)
        .abs()
        .max(charge.relative_residual);
    checks.push(Check::below("x3-maps-h1-to-h2", err, 1e-10).with_detail(format!("c = {}", charge.proportionality)));
}

fn tensor_checks(p: &PuParams, config: VerifyConfig, checks: &mut Vec<Check>) -> InteractingSummary {
    let (t1, t2) = (j1(p, Chart::Jet), j2(p));
    match invariant_tensor_space(&free_vector_field(p), &[]) {
        Ok(space) => {
            checks.push(Check::equals("free-invariant-tensors", space.dimension, 2));
            let r = space.projection_residual(&t1).max(space.projection_residual(&t2));
            checks.push(Check::below("free-tensors-contain-j1-j2", r, 1e-10));
        }
        Err(e) => checks.push(Check::equals("free-invariant-tensors", 0, 2).with_detail(e.to_string())),
    }

    let lambda = if config.lambda == 0.0 { 0.1 } else { config.lambda };
    let samples = sample_points(MIN_INTERACTING_SAMPLES + 2, config.seed);
    let field = interacting_vector_field(p, Potential::quartic(lambda));
    let dimension = match invariant_tensor_space(&field, &samples) {
        Ok(space) => {
            checks.push(Check::equals("interacting-invariant-tensors", space.dimension, 1));
            checks.push(Check::below(
                "interacting-tensor-is-j1",
                space.projection_residual(&t1),
                1e-10,
            ));
            let r2 = space.projection_residual(&t2);
            checks.push(Check {
                name: "interacting-excludes-j2",
                passed: r2 > 1e-3,
                value: r2,
                tolerance: 1e-3,
                detail: None,
            });
            space.dimension
        }
        Err(e) => {
            checks.push(Check::equals("interacting-invariant-tensors", 0, 1).with_detail(e.to_string()));
            0
        }
    };
    InteractingSummary {
        lambda,
        samples: samples.len(),
        dimension,
    }
}

fn embedding_checks(p: &PuParams, seed: u64, checks: &mut Vec<Check>) -> usize {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xe3b);
    let mut worst: f64 = 0.0;
    let mut failures = Vec::new();
    let mut discrepant = 0;
    for family in [Family::Ta1, Family::Ta2, Family::Tb1, Family::Tb2] {
        for branch in [Branch::Plus, Branch::Minus] {
            let ax = rng.random_range(0.5..2.0);
            let g = rng.random_range(0.1..0.5);
            let free = match family {
                Family::Ta1 | Family::Ta2 => FreeParams::coupled(ax, -rng.random_range(0.5..2.0), g),
                Family::Tb1 => FreeParams::with_b_x(ax, rng.random_range(-2.0..2.0), g),
                Family::Tb2 => FreeParams::with_b_y(ax, rng.random_range(0.5..2.0), g),
            };
            let rec = reconcile_family(family, branch, free, p);
            discrepant += usize::from(rec.reference_discrepant);
            match rec.solved_verification {
                Some(v) if v.contract_satisfied => worst = worst.max(v.max_relative_residual),
                Some(_) => failures.push(format!("{family:?}{branch:?}: contract violated")),
                None => failures.push(format!(
                    "{family:?}{branch:?}: {}",
                    rec.solved_error.unwrap_or_default()
                )),
            }
        }
    }
    let check = Check::below(
        "embedding-contracts",
        if failures.is_empty() { worst } else { f64::INFINITY },
        EPS_ALGEBRA,
    );
    checks.push(if failures.is_empty() {
        check
    } else {
        check.with_detail(failures.join("; "))
    });
    discrepant
}

fn mode_checks(p: &PuParams, seed: u64, checks: &mut Vec<Check>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x30de);
    let mut worst: f64 = 0.0;
    for _ in 0..16 {
        let z = JetState::new(
            rng.random_range(-1.0..1.0),
            rng.random_range(-1.0..1.0),
            rng.random_range(-1.0..1.0),
            rng.random_range(-1.0..1.0),
        );
        let e = mode_energy(p, &mode_decompose(p, &z));
        let scale = (e.e1.abs() + e.e2.abs()).max(1.0);
        worst = worst.max((e.total - h1(p).eval_jet(&z)).abs() / scale);
    }
    checks.push(Check::below("mode-energy-identity", worst, 1e-10));
}
