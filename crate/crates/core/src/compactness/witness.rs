//! Witness sequence for an operator that is not a norm limit of finite-rank
//! operators over `M_n(C)`.
//!
//! Given `T` with `δ = min_{1≤k≤K} ‖(I - P_k) T‖ > 0` (after scaling to
//! `‖T‖ = 1`), the construction produces unit vectors `x_n`, images
//! `y_n = T x_n`, blocks `z_n = Q_n (I - Q_{n-1}) y_n` cut at projections
//! `Q_n = P_{k_n}`, a vector state `φ` and unitaries `u_n`, such that the
//! points `y_n u_n` of `T(ball)` are pairwise more than `δ²/64` apart in
//! `p(x) = (Σ_n |φ(⟨z_n u_n, x⟩)|²)^{1/2}`, a seminorm dominated by an
//! admissible `τ` seminorm `p_{φ,ω}`.
//!
//! `ω` is built slot by slot inside each block: for a slot `j` covered by
//! `z_n`, `ω_j = ζ_j u_n / φ(u_n* ζ_j* ζ_j u_n)^{1/2}` (zero when the
//! denominator vanishes), and zero on slots past the last block.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::algebra::{AlgebraElement, C64, MAX_ITERATIONS};
use crate::check::Check;
use crate::compactness::choose_state::choose_state_unitaries;
use crate::error::{Error, Result};
use crate::module::{coord_project, inner_product, module_norm, rank_one_from_unit, right_mul, ModuleVector};
use crate::operators::{apply, operator_norm, tail_norm, ModuleOperator, OperatorTag};
use crate::states::NormalState;
use crate::topology::{euclidean_norm, is_admissible, weighted_seminorm, NULL_WEIGHT_THRESHOLD};

/// Relative width of the top singular cluster searched for the best `x_n`.
const DEGENERACY_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Serialize)]
pub struct WitnessStep {
    /// `k_n`, the number of slots kept by `Q_n`.
    pub k: usize,
    pub x: ModuleVector,
    pub y: ModuleVector,
    pub z: ModuleVector,
    /// Serves as both the left and the right unitary of the step.
    pub unitary: AlgebraElement,
    pub checks: Vec<Check>,
}

#[derive(Debug, Clone, Serialize)]
pub struct WitnessReport {
    /// `‖T‖` before scaling to norm one.
    pub operator_norm: f64,
    pub delta: f64,
    pub horizon: usize,
    pub truncation: usize,
    pub tolerance: f64,
    pub steps: Vec<WitnessStep>,
    pub state: NormalState,
    /// `ω`, one weight per slot.
    pub omega: Vec<AlgebraElement>,
    pub omega_admissible: bool,
    /// `‖⟨z_m, y_n⟩‖` for `m > n` as `(m, n, value)`, one-based steps.
    pub cross_terms: Vec<(usize, usize, f64)>,
    /// `δ/8 - ‖⟨z_m, y_n⟩‖`, the margin against the stated `δ/8` bound.
    pub cross_margins_stated: Vec<f64>,
    /// `p(y_a u_a - y_b u_b)`; symmetric with zero diagonal.
    pub pairwise: Vec<Vec<f64>>,
    /// `p_{φ,ω}(y_a u_a - y_b u_b)`.
    pub pairwise_dominating: Vec<Vec<f64>>,
    pub checks: Vec<Check>,
}

impl WitnessReport {
    pub fn all_checks(&self) -> impl Iterator<Item = &Check> {
        self.steps
            .iter()
            .flat_map(|s| s.checks.iter())
            .chain(self.checks.iter())
    }

    pub fn passed(&self) -> bool {
        self.all_checks().all(|c| c.passed)
    }
}

/// `‖(I - P_k) w‖` for the first `k > from` with value below `bound`.
fn first_small_tail(w: &ModuleVector, from: usize, bound: f64) -> Result<Option<(usize, f64)>> {
    for k in from + 1..=w.len() {
        let tail = module_norm(&w.sub(&coord_project(k, w)?)?)?;
        if tail < bound {
            return Ok(Some((k, tail)));
        }
    }
    Ok(None)
}

/// Rows of the flattened operator from slot `k` on, i.e. `(I - P_k) T`
/// without its zero rows.
fn tail_rows(t: &ModuleOperator, k: usize) -> DMatrix<C64> {
    let n = t.descriptor().dim;
    t.flat().rows(k * n, (t.len() - k) * n).into_owned()
}

struct Candidate {
    x: ModuleVector,
    k: usize,
}

/// Top right singular vectors of `(I - Q_{n-1}) T`, embedded as module
/// vectors. Within a degenerate top cluster the one whose image has the
/// shortest support (smallest `k_n`) wins; ties keep solver order.
fn choose_x(t: &ModuleOperator, k_prev: usize, delta: f64, step: usize) -> Result<(Candidate, f64)> {
    let desc = t.descriptor();
    if k_prev >= t.len() {
        return Err(Error::HorizonTooSmall {
            step,
            message: format!("all {} slots were used by earlier steps", t.len()),
        });
    }
    let rows = tail_rows(t, k_prev);
    let svd = rows
        .clone()
        .try_svd(false, true, f64::EPSILON, MAX_ITERATIONS)
        .ok_or_else(|| Error::Numeric {
            context: format!("SVD of (I - Q_{}) T", step - 1),
            residual: f64::NAN,
        })?;
    let v_t = svd.v_t.as_ref().expect("requested right singular vectors");
    let sigma = svd.singular_values.max();
    if sigma <= delta / 2.0 {
        return Err(Error::HorizonTooSmall {
            step,
            message: format!(
                "‖(I - Q_{}) T‖ = {sigma:e} does not exceed δ/2 = {:e}",
                step - 1,
                delta / 2.0
            ),
        });
    }
    let mut best: Option<Candidate> = None;
    for (i, &s) in svd.singular_values.iter().enumerate() {
        if s < sigma * (1.0 - DEGENERACY_TOL) {
            continue;
        }
        let v: DVector<C64> = v_t.row(i).adjoint();
        let v = &v / C64::new(v.norm(), 0.0);
        let x = rank_one_from_unit(desc, &v)?;
        let w = coord_tail(&apply(t, &x)?, k_prev)?;
        let Some((k, _)) = first_small_tail(&w, k_prev, delta * delta / 8.0)? else {
            continue;
        };
        if best.as_ref().is_none_or(|b| k < b.k) {
            best = Some(Candidate { x, k });
        }
    }
    let best = best.ok_or_else(|| Error::HorizonTooSmall {
        step,
        message: "no cut k_n <= N leaves a tail below δ²/8".into(),
    })?;
    Ok((best, sigma))
}

/// `(I - P_k) w`.
fn coord_tail(w: &ModuleVector, k: usize) -> Result<ModuleVector> {
    w.sub(&coord_project(k, w)?)
}

/// Runs the witness construction for `steps` steps with deficiency measured
/// over `1 ≤ k ≤ horizon`.
pub fn witness_construction(t: &ModuleOperator, steps: usize, horizon: usize, tol: f64) -> Result<WitnessReport> {
    let desc = t.descriptor();
    let big_n = t.len();
    if desc.commutative {
        return Err(Error::UnsupportedAlgebra(
            "the witness construction needs the full matrix algebra".into(),
        ));
    }
    if horizon == 0 || horizon >= big_n {
        return Err(Error::Precondition(format!("horizon {horizon} must lie in 1..{big_n}")));
    }
    if steps == 0 {
        return Err(Error::Precondition("at least one step is required".into()));
    }

    let t_norm = operator_norm(t, tol)?;
    if t_norm <= tol {
        return Err(Error::CompactAtHorizon { horizon, delta: 0.0 });
    }
    let t = ModuleOperator::from_flat(desc, t.flat() / C64::new(t_norm, 0.0), OperatorTag::Generic)?;
    let mut delta = f64::INFINITY;
    for k in 1..=horizon {
        delta = delta.min(tail_norm(&t, k, tol)?);
    }
    if delta <= tol {
        return Err(Error::CompactAtHorizon { horizon, delta });
    }
    let delta_sq = delta * delta;

    let mut k_prev = 0;
    let mut records = Vec::with_capacity(steps);
    let mut cuts = vec![0usize];
    for step in 1..=steps {
        let (candidate, _) = choose_x(&t, k_prev, delta, step)?;
        let x = candidate.x;
        let k = candidate.k;
        let y = apply(&t, &x)?;
        let w = coord_tail(&y, k_prev)?;
        let z = coord_project(k, &w)?;

        let x_norm = x.norm()?;
        let y_norm = y.norm()?;
        let z_norm = z.norm()?;
        let w_norm = w.norm()?;
        let rest = coord_tail(&w, k)?.norm()?;
        let identity_residual = inner_product(&z, &y)?.sub(&inner_product(&z, &z)?)?.max_abs();

        let checks = vec![
            Check::at_most(format!("step {step}: |‖x_n‖ - 1|"), (x_norm - 1.0).abs(), 0.0, tol),
            Check::greater(format!("step {step}: ‖(I - Q_(n-1)) T x_n‖ > δ/2"), w_norm, delta / 2.0),
            Check::less(
                format!("step {step}: tail ‖(I - Q_n)(I - Q_(n-1)) y_n‖ < δ²/8"),
                rest,
                delta_sq / 8.0,
            ),
            Check::at_most(format!("step {step}: ‖z_n‖ <= ‖y_n‖"), z_norm, y_norm, tol),
            Check::at_most(format!("step {step}: ‖y_n‖ <= 1"), y_norm, 1.0, tol),
            Check::greater(format!("step {step}: ‖z_n‖ > 3δ/8"), z_norm, 3.0 * delta / 8.0),
            Check::at_most(
                format!("step {step}: ⟨z_n, y_n⟩ = ⟨z_n, z_n⟩"),
                identity_residual,
                0.0,
                tol,
            ),
        ];
        records.push((k, x, y, z, checks));
        cuts.push(k);
        k_prev = k;
    }

    let mut checks = Vec::new();
    let mut cross_terms = Vec::new();
    let mut cross_margins_stated = Vec::new();
    for m in 0..steps {
        for n in 0..m {
            let value = inner_product(&records[m].3, &records[n].2)?.norm(tol)?;
            checks.push(Check::at_most(
                format!("cross term ‖⟨z_{}, y_{}⟩‖ <= δ²/8", m + 1, n + 1),
                value,
                delta_sq / 8.0,
                tol,
            ));
            cross_terms.push((m + 1, n + 1, value));
            cross_margins_stated.push(delta / 8.0 - value);
        }
    }

    let grams = records
        .iter()
        .map(|r| inner_product(&r.3, &r.3))
        .collect::<Result<Vec<_>>>()?;
    let chosen = choose_state_unitaries(&grams, (3.0 * delta / 8.0).powi(2))?;
    let state = chosen.state;
    for (n, value) in chosen.values.iter().enumerate() {
        checks.push(Check::greater(
            format!("chosen state: φ(u_{0}* ⟨z_{0}, z_{0}⟩ u_{0}) > 9δ²/64", n + 1),
            *value,
            9.0 * delta_sq / 64.0,
        ));
    }

    // Kernels of x ↦ φ(⟨z_n u_n, x⟩).
    let kernels: Vec<DMatrix<C64>> = records
        .iter()
        .zip(&chosen.unitaries)
        .map(|(r, u)| Ok(right_mul(&r.3, u)?.stacked() * state.density()))
        .map(|k: Result<DMatrix<C64>>| k.map(|k| k.map(|v| v.conj())))
        .collect::<Result<Vec<_>>>()?;
    let witness_seminorm = |v: &ModuleVector| -> f64 {
        let values: Vec<C64> = kernels
            .iter()
            .map(|k| k.iter().zip(v.stacked().iter()).map(|(a, b)| a * b).sum())
            .collect();
        euclidean_norm(&values)
    };

    let omega = dominating_weights(&records, &chosen.unitaries, &cuts, &state, big_n)?;
    let omega_admissible = is_admissible(&state, &omega);
    checks.push(Check::at_most(
        "ω admissible: |max φ(ω*ω) - 1|",
        if omega_admissible { 0.0 } else { 1.0 },
        0.0,
        0.0,
    ));

    let points = records
        .iter()
        .zip(&chosen.unitaries)
        .map(|(r, u)| right_mul(&r.2, u))
        .collect::<Result<Vec<_>>>()?;
    for (n, (r, u)) in records.iter().zip(&chosen.unitaries).enumerate() {
        let norm = right_mul(&r.1, u)?.norm()?;
        checks.push(Check::at_most(
            format!("|‖x_{} u_{}‖ - 1|", n + 1, n + 1),
            (norm - 1.0).abs(),
            0.0,
            tol,
        ));
    }

    let mut pairwise = vec![vec![0.0; steps]; steps];
    let mut pairwise_dominating = vec![vec![0.0; steps]; steps];
    for a in 0..steps {
        for b in 0..a {
            let diff = points[a].sub(&points[b])?;
            let d = witness_seminorm(&diff);
            let dominating = weighted_seminorm(&state, &omega, &diff)?;
            pairwise[a][b] = d;
            pairwise[b][a] = d;
            pairwise_dominating[a][b] = dominating;
            pairwise_dominating[b][a] = dominating;
            checks.push(Check::greater(
                format!("p(y_{0} u_{0} - y_{1} u_{1}) > δ²/64", a + 1, b + 1),
                d,
                delta_sq / 64.0,
            ));
            checks.push(Check::at_most(
                format!("p(y_{0} u_{0} - y_{1} u_{1}) <= p_φ,ω(…)", a + 1, b + 1),
                d,
                dominating,
                tol,
            ));
        }
    }

    let unitaries = chosen.unitaries;
    let steps_out = records
        .into_iter()
        .zip(unitaries)
        .map(|((k, x, y, z, mut step_checks), unitary)| {
            step_checks.shrink_to_fit();
            WitnessStep {
                k,
                x,
                y,
                z,
                unitary,
                checks: step_checks,
            }
        })
        .collect();

    Ok(WitnessReport {
        operator_norm: t_norm,
        delta,
        horizon,
        truncation: big_n,
        tolerance: tol,
        steps: steps_out,
        state,
        omega,
        omega_admissible,
        cross_terms,
        cross_margins_stated,
        pairwise,
        pairwise_dominating,
        checks,
    })
}

type StepRecord = (usize, ModuleVector, ModuleVector, ModuleVector, Vec<Check>);

fn dominating_weights(
    records: &[StepRecord],
    unitaries: &[AlgebraElement],
    cuts: &[usize],
    state: &NormalState,
    big_n: usize,
) -> Result<Vec<AlgebraElement>> {
    let desc = state.descriptor();
    let mut omega = vec![AlgebraElement::zero(desc); big_n];
    for (n, (record, u)) in records.iter().zip(unitaries).enumerate() {
        let z = &record.3;
        for (slot, weight) in omega.iter_mut().enumerate().take(cuts[n + 1]).skip(cuts[n]) {
            let zeta_u = z.entry(slot)?.mul(u)?;
            let mass = state.eval(&zeta_u.adjoint().mul(&zeta_u)?)?.re;
            if mass > NULL_WEIGHT_THRESHOLD {
                *weight = zeta_u.scale(C64::new(1.0 / mass.sqrt(), 0.0));
            }
        }
    }
    Ok(omega)
}
