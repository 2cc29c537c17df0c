//! Acceptance criteria 1–10, recomputed from the core primitives.
//!
//! Runs without the libtest harness so that the criteria print in order, one
//! `criterion N: PASS|FAIL` line each. Exits non-zero if any criterion fails.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::Instant;

use hilmod_core::algebra::operator_norm_alg;
use hilmod_core::compactness::{
    choose_state_unitaries, compactness_probe, counterexample_experiment, greedy_net, separate_from_ball,
    witness_construction,
};
use hilmod_core::module::{coord_project, inner_product, module_norm, right_mul, unit_basis_vector};
use hilmod_core::operators::{adjoint_op, apply, operator_norm, tail_norm, theta};
use hilmod_core::sampling::{
    admissible_weights, gaussian_vector, positive_element, random_state, trial_rng, unit_ball_vector, SampleRng,
};
use hilmod_core::states::geometric_weights;
use hilmod_core::topology::{normalize_admissible, p_tau, p_tau1};
use hilmod_core::{
    AdmissibleWeights, AlgebraDescriptor, Error, ModuleOperator, ModuleVector, NormalState, SeminormSpec, C64,
};
use rand::Rng;

const SEED: u64 = 42;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn rng_for(criterion: u64, index: u64) -> SampleRng {
    trial_rng(SEED, (criterion << 32) | index)
}

fn descriptor(rng: &mut SampleRng, commutative_allowed: bool) -> AlgebraDescriptor {
    let n = rng.random_range(1..=4);
    let commutative = commutative_allowed && rng.random_bool(0.5);
    AlgebraDescriptor::new(n, commutative).unwrap()
}

fn phi_re(phi: &NormalState, x: &ModuleVector, y: &ModuleVector) -> f64 {
    phi.eval(&inner_product(x, y).unwrap()).unwrap().re
}

fn ensure(ok: bool, what: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(what())
    }
}

/// Largest `lhs - rhs` over the draws.
struct Excess(f64);

impl Excess {
    fn new() -> Self {
        Excess(f64::NEG_INFINITY)
    }

    fn push(&mut self, lhs: f64, rhs: f64) {
        self.0 = self.0.max(lhs - rhs);
    }
}

fn chain() -> Outcome {
    let mut cs = Excess::new();
    let mut tau1 = Excess::new();
    let mut tau2 = Excess::new();
    let mut norm = Excess::new();
    for i in 0..10_000 {
        let rng = &mut rng_for(1, i);
        let d = descriptor(rng, true);
        let len = rng.random_range(1..=16);
        let phi = random_state(d, rng);
        let eta = admissible_weights(&phi, len, rng).unwrap();
        let x = gaussian_vector(d, len, rng);
        let y = gaussian_vector(d, len, rng);
        let xx = phi_re(&phi, &x, &x);
        let yy = phi_re(&phi, &y, &y);
        let yx = phi.eval(&inner_product(&y, &x).unwrap()).unwrap().norm();
        cs.push(yx * yx, xx * yy);
        let zeta = AdmissibleWeights::new(phi.clone(), normalize_admissible(&phi, &y.entries()).unwrap()).unwrap();
        tau1.push(p_tau1(&phi, &y, &x).unwrap(), yy.sqrt() * p_tau(&zeta, &x).unwrap());
        tau2.push(p_tau(&eta, &x).unwrap().powi(2), xx);
        norm.push(xx, module_norm(&x).unwrap().powi(2));
    }
    for (name, e) in [
        ("Cauchy-Schwarz", &cs),
        ("tau1 <= tau", &tau1),
        ("tau <= tau2", &tau2),
        ("tau2 <= norm", &norm),
    ] {
        ensure(e.0 <= 1e-9, || format!("{name} exceeded by {:e}", e.0))?;
    }
    Ok(format!(
        "10000 instances, worst excess CS {:.1e}, tau1 {:.1e}, tau {:.1e}, tau2 {:.1e}",
        cs.0, tau1.0, tau2.0, norm.0
    ))
}

fn basis_discreteness() -> Outcome {
    let d = AlgebraDescriptor::full(3);
    let len = 16;
    let basis: Vec<_> = (0..len).map(|j| unit_basis_vector(d, len, j).unwrap()).collect();
    let states = [
        NormalState::uniform(d),
        NormalState::basis(d, 2).unwrap(),
        random_state(d, &mut rng_for(2, 0)),
    ];
    let mut worst: f64 = 0.0;
    for phi in &states {
        let p = SeminormSpec::tau_ones(phi.clone(), len).unwrap();
        for i in 0..len {
            for j in 0..len {
                if i != j {
                    worst = worst.max((p.distance(&basis[i], &basis[j]).unwrap() - 2f64.sqrt()).abs());
                }
            }
        }
    }
    ensure(worst <= 1e-12, || format!("|p(e_i - e_j) - √2| reached {worst:e}"))?;
    let net = greedy_net(&basis, &SeminormSpec::tau_ones(states[0].clone(), len).unwrap(), 0.5).unwrap();
    ensure(net.size() == 16, || format!("greedy net has {} centers", net.size()))?;
    Ok(format!(
        "max |p(e_i - e_j) - √2| = {worst:.1e} over 3 states, net size 16"
    ))
}

fn theta_adjointness() -> Outcome {
    let mut residual: f64 = 0.0;
    let mut norm_excess = Excess::new();
    for i in 0..1000 {
        let rng = &mut rng_for(3, i);
        let d = descriptor(rng, true);
        let len = rng.random_range(1..=16);
        let [x, y, z, w] = std::array::from_fn(|_| unit_ball_vector(d, len, rng));
        let t = theta(&y, &z).unwrap();
        let s = theta(&z, &y).unwrap();
        let lhs = inner_product(&w, &apply(&t, &x).unwrap()).unwrap();
        let rhs = inner_product(&apply(&s, &w).unwrap(), &x).unwrap();
        residual = residual.max(lhs.sub(&rhs).unwrap().norm(1e-14).unwrap());
        // Θ_{z,y} is also the adjoint of Θ_{y,z} as a block matrix.
        residual = residual.max(adjoint_op(&t).max_abs_diff(&s).unwrap());
        norm_excess.push(
            operator_norm(&t, 1e-12).unwrap(),
            module_norm(&y).unwrap() * module_norm(&z).unwrap(),
        );
    }
    ensure(residual <= 1e-10, || format!("adjointness residual {residual:e}"))?;
    ensure(norm_excess.0 <= 1e-9, || {
        format!("‖Θ‖ exceeds ‖y‖‖z‖ by {:e}", norm_excess.0)
    })?;
    Ok(format!(
        "1000 draws, residual {residual:.1e}, norm excess {:.1e}",
        norm_excess.0
    ))
}

fn choose_state() -> Outcome {
    let mut margin = f64::INFINITY;
    for i in 0..100 {
        let rng = &mut rng_for(4, i);
        let d = descriptor(rng, false);
        let a = positive_element(d, rng);
        let norm = operator_norm_alg(&a, 1e-12).unwrap();
        let delta = 0.9 * norm;
        let chosen = choose_state_unitaries(std::slice::from_ref(&a), delta).map_err(|e| e.to_string())?;
        let u = &chosen.unitaries[0];
        let value = chosen
            .state
            .eval(&u.adjoint().mul(&a).unwrap().mul(u).unwrap())
            .unwrap()
            .re;
        ensure(value >= norm - 1e-10 && norm - 1e-10 > delta, || {
            format!("draw {i}: φ(u*au) = {value}, ‖a‖ = {norm}")
        })?;
        margin = margin.min(value - norm);
    }
    let diag = AlgebraDescriptor::diagonal(3);
    let refused = choose_state_unitaries(&[positive_element(diag, &mut rng_for(4, 100))], 0.1);
    ensure(matches!(refused, Err(Error::UnsupportedAlgebra(_))), || {
        format!("diagonal algebra gave {refused:?}")
    })?;
    Ok(format!("100 draws, min φ(u*au) - ‖a‖ = {margin:.1e}, diagonal refused"))
}

fn counterexample() -> Outcome {
    let weights = geometric_weights(16, 0.5).unwrap();
    let r = counterexample_experiment(&weights, 12, 200, SEED).map_err(|e| e.to_string())?;
    ensure(r.norm_profile.len() == 13, || {
        format!("{} profile entries", r.norm_profile.len())
    })?;
    for k in 0..=12 {
        ensure((r.norm_profile[k] - 1.0).abs() <= 1e-9, || {
            format!("norm_profile[{k}] = {}", r.norm_profile[k])
        })?;
        ensure(r.sampled_sup[k].powi(2) <= r.tail_bounds[k] + 1e-9, || {
            format!(
                "sampled_sup[{k}]² = {} > tail {}",
                r.sampled_sup[k].powi(2),
                r.tail_bounds[k]
            )
        })?;
    }
    let mut ratio_dev: f64 = 0.0;
    for k in 0..12 {
        ratio_dev = ratio_dev.max((r.tail_bounds[k + 1] / r.tail_bounds[k] - 0.5).abs());
    }
    ensure(ratio_dev <= 1e-12, || format!("tail ratio deviates by {ratio_dev:e}"))?;
    Ok(format!(
        "profile ≡ 1, sampled sup² <= tail, ratio deviation {ratio_dev:.1e}"
    ))
}

fn witness() -> Outcome {
    let d = AlgebraDescriptor::full(2);
    let len = 32;
    let t = ModuleOperator::identity(d, len);
    let r = witness_construction(&t, 3, 24, 1e-10).map_err(|e| e.to_string())?;
    let mut delta = f64::INFINITY;
    for k in 1..=24 {
        delta = delta.min(tail_norm(&t, k, 1e-12).unwrap());
    }
    ensure((delta - 1.0).abs() <= 1e-10 && (r.delta - delta).abs() <= 1e-10, || {
        format!("δ = {delta}, reported {}", r.delta)
    })?;
    let d2 = delta * delta;
    let mut cut = 0;
    for (n, s) in r.steps.iter().enumerate() {
        let step = n + 1;
        let w = s.y.sub(&coord_project(cut, &s.y).unwrap()).unwrap();
        let rest = module_norm(&w.sub(&coord_project(s.k, &w).unwrap()).unwrap()).unwrap();
        ensure(rest < d2 / 8.0, || format!("step {step}: tail {rest}"))?;
        let (yn, zn) = (module_norm(&s.y).unwrap(), module_norm(&s.z).unwrap());
        ensure(zn <= yn + 1e-10 && yn <= 1.0 + 1e-10, || {
            format!("step {step}: ‖z‖ = {zn}, ‖y‖ = {yn}")
        })?;
        ensure(zn > 3.0 * delta / 8.0, || format!("step {step}: ‖z‖ = {zn}"))?;
        let residual = inner_product(&s.z, &s.y)
            .unwrap()
            .sub(&inner_product(&s.z, &s.z).unwrap())
            .unwrap()
            .max_abs();
        ensure(residual <= 1e-10, || {
            format!("step {step}: ⟨z, y⟩ - ⟨z, z⟩ residual {residual:e}")
        })?;
        let u = &s.unitary;
        let gram = inner_product(&s.z, &s.z).unwrap();
        let chosen = r
            .state
            .eval(&u.adjoint().mul(&gram).unwrap().mul(u).unwrap())
            .unwrap()
            .re;
        ensure(chosen > 9.0 * d2 / 64.0, || {
            format!("step {step}: φ(u*⟨z,z⟩u) = {chosen}")
        })?;
        cut = s.k;
    }
    for m in 0..r.steps.len() {
        for n in 0..m {
            let value = inner_product(&r.steps[m].z, &r.steps[n].y)
                .unwrap()
                .norm(1e-14)
                .unwrap();
            ensure(value <= d2 / 8.0, || {
                format!("cross term ‖⟨z_{}, y_{}⟩‖ = {value}", m + 1, n + 1)
            })?;
        }
    }
    // p(x) = (Σ_n |φ(⟨z_n u_n, x⟩)|²)^{1/2}
    let family: Vec<_> = r.steps.iter().map(|s| right_mul(&s.z, &s.unitary).unwrap()).collect();
    let points: Vec<_> = r.steps.iter().map(|s| right_mul(&s.y, &s.unitary).unwrap()).collect();
    let mut min_pair = f64::INFINITY;
    for a in 0..points.len() {
        for b in 0..a {
            let diff = points[a].sub(&points[b]).unwrap();
            let p = family
                .iter()
                .map(|f| r.state.eval(&inner_product(f, &diff).unwrap()).unwrap().norm_sqr())
                .sum::<f64>()
                .sqrt();
            min_pair = min_pair.min(p);
        }
    }
    ensure(points.len() == 3 && min_pair > 0.015625, || {
        format!("min pairwise distance {min_pair}")
    })?;
    Ok(format!(
        "δ = {delta}, cuts {:?}, min pairwise p = {min_pair:.6}",
        r.steps.iter().map(|s| s.k).collect::<Vec<_>>()
    ))
}

fn separation() -> Outcome {
    let z = unit_basis_vector(AlgebraDescriptor::full(2), 4, 0)
        .unwrap()
        .scale(C64::new(2.0, 0.0));
    let r = separate_from_ball(&z, 10_000, SEED).map_err(|e| e.to_string())?;
    let in_g = r.samples - r.outside_g;
    ensure(r.samples == 10_000 && r.outside_g == 0, || {
        format!("{} of {} samples outside G", r.outside_g, r.samples)
    })?;
    ensure(r.violations == 0 && r.min_norm > 1.0, || {
        format!("{} samples with ‖x‖ <= 1, min norm {}", r.violations, r.min_norm)
    })?;
    ensure(r.max_cs_residual <= 1e-9, || {
        format!("Cauchy-Schwarz residual {:e}", r.max_cs_residual)
    })?;
    Ok(format!(
        "{in_g} samples in G, min ‖x‖ = {:.4}, Cauchy-Schwarz residual {:.1e}",
        r.min_norm, r.max_cs_residual
    ))
}

fn probe_contrast() -> Outcome {
    let d = AlgebraDescriptor::full(2);
    let len = 64;
    let rng = &mut rng_for(8, 0);
    let unit = |rng: &mut SampleRng| {
        let g = gaussian_vector(d, len, rng);
        let n = module_norm(&g).unwrap();
        g.scale(C64::new(1.0 / n, 0.0))
    };
    let (y, z) = (unit(rng), unit(rng));
    let t = theta(&y, &z).unwrap();
    let p = SeminormSpec::tau_ones(NormalState::uniform(d), len).unwrap();
    let rows = compactness_probe(&t, &p, 0.25, &[500, 2000], SEED).map_err(|e| e.to_string())?;
    let (small, large) = (rows[0].net_size, rows[1].net_size);
    ensure(small == large, || {
        format!("Θ net sizes {small} (500) vs {large} (2000)")
    })?;
    let family: Vec<_> = (0..32).map(|j| unit_basis_vector(d, len, j).unwrap()).collect();
    let identity = ModuleOperator::identity(d, len);
    let images: Vec<_> = family.iter().map(|x| apply(&identity, x).unwrap()).collect();
    let net = greedy_net(&images, &p, 0.25).unwrap();
    ensure(net.size() == 32, || {
        format!("identity on e_1..e_32 gave {} centers", net.size())
    })?;
    Ok(format!(
        "Θ net size {small} at 500 and 2000 samples, identity family 32"
    ))
}

fn truncation_density() -> Outcome {
    let mut increase = f64::NEG_INFINITY;
    let mut last: f64 = 0.0;
    for i in 0..20 {
        let rng = &mut rng_for(9, i);
        let d = descriptor(rng, true);
        let len = 64;
        let eta = admissible_weights(&random_state(d, rng), len, rng).unwrap();
        let x = gaussian_vector(d, len, rng);
        let mut previous = f64::INFINITY;
        for k in 0..=len {
            let value = p_tau(&eta, &x.sub(&coord_project(k, &x).unwrap()).unwrap()).unwrap();
            increase = increase.max(value - previous);
            previous = value;
        }
        last = last.max(previous);
    }
    ensure(increase <= 1e-12, || format!("p(x - P_k x) increased by {increase:e}"))?;
    ensure(last == 0.0, || format!("p(x - P_64 x) = {last:e}"))?;
    Ok(format!("20 draws, largest step {increase:.1e}, value at k = 64 is 0"))
}

fn reproducibility() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let mut reports = Vec::new();
    for run in 0..2 {
        let path = dir.path().join(format!("run{run}.json"));
        let code = hilmod_cli::run([
            "hilmod",
            "verify",
            "--suite",
            "all",
            "--seed",
            "42",
            "--no-timestamp",
            "--out",
            path.to_str().unwrap(),
        ]);
        ensure(code == 0, || format!("run {run} exited with {code}"))?;
        reports.push(std::fs::read(&path).map_err(|e| e.to_string())?);
    }
    ensure(reports[0] == reports[1], || "reports differ".into())?;
    Ok(format!("two runs, {} identical bytes", reports[0].len()))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("seminorm chain", chain),
        ("basis discreteness", basis_discreteness),
        ("Θ adjointness", theta_adjointness),
        ("state and unitary choice", choose_state),
        ("commutative counterexample", counterexample),
        ("witness construction", witness),
        ("separation from the unit ball", separation),
        ("compactness probe contrast", probe_contrast),
        ("truncation density", truncation_density),
        ("reproducibility", reproducibility),
    ];
    let start = Instant::now();
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let t0 = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|panic| {
            let msg = panic
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| panic.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        let secs = t0.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {}: PASS {name}: {detail} ({secs:.2}s)", i + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {}: FAIL {name}: {detail} ({secs:.2}s)", i + 1);
            }
        }
    }
    let total = start.elapsed().as_secs_f64();
    println!("{} of 10 criteria passed in {total:.2}s", 10 - failed);
    if failed == 0 && total < 60.0 {
        ExitCode::SUCCESS
    } else {
        if total >= 60.0 {
            println!("acceptance run exceeded 60s");
        }
        ExitCode::FAILURE
    }
}
