use hilmod_core::compactness::{
    compactness_probe, counterexample_experiment, greedy_net, separate_from_ball, witness_construction, NetResult,
    ProbeRow,
};
use hilmod_core::json::SeminormJson;
use hilmod_core::operators::apply;
use hilmod_core::{Check, ModuleVector};
use serde::Serialize;

use crate::config::{ExperimentConfig, Format, Kind};
use crate::error::CliError;
use crate::report::{emit, real, Envelope, Table};
use crate::scenario::{build_operator, build_point, build_points, resolve_weights};
use crate::suites::{self, Suite, VerifyReport};

/// What a command produced: whether every check passed, and the rendered
/// report.
pub struct Outcome {
    pub passed: bool,
    pub text: String,
}

pub fn verify(suite: Suite, seed: u64, tol: f64, format: Format, timestamp: bool) -> Result<Outcome, CliError> {
    let report = suites::run(suite, seed, tol)?;
    let passed = report.passed();
    let text = match format {
        Format::Json => Envelope::<(), _>::new(
            format!("verify --suite {}", suite.name()),
            passed,
            None,
            &report,
            timestamp,
        )
        .to_json()?,
        Format::Csv => verify_table(&report).to_csv()?,
    };
    Ok(Outcome { passed, text })
}

fn check_header() -> Table {
    Table::new([
        "suite",
        "name",
        "value",
        "relation",
        "bound",
        "margin",
        "passed",
        "instances",
    ])
}

fn check_row(suite: &str, c: &Check, instances: usize) -> Vec<String> {
    let relation = serde_json::to_value(c.relation)
        .ok()
        .and_then(|v| v.as_str().map(str::to_string))
        .unwrap_or_default();
    vec![
        suite.to_string(),
        c.name.clone(),
        real(c.value),
        relation,
        real(c.bound),
        real(c.margin),
        c.passed.to_string(),
        instances.to_string(),
    ]
}

fn verify_table(report: &VerifyReport) -> Table {
    let mut t = check_header();
    for (suite, c) in report.checks() {
        t.push(check_row(suite, &c.check, c.instances));
    }
    t
}

#[derive(Debug, Serialize)]
pub struct ProbeReport {
    pub operator: String,
    pub epsilon: f64,
    pub seminorm: SeminormJson,
    pub rows: Vec<ProbeRow>,
    /// Whether the two largest sample sizes gave the same net size.
    pub saturated: Option<bool>,
}

#[derive(Debug, Serialize)]
pub struct NetReport {
    pub operator: String,
    pub points: usize,
    pub seminorm: SeminormJson,
    pub net: NetResult,
    /// `max_i p(point_i - center_(assign(i)))`.
    pub max_cover_distance: f64,
    /// `min_(a≠b) p(c_a - c_b)`; absent with fewer than two centers.
    pub min_center_separation: Option<f64>,
    pub checks: Vec<Check>,
}

pub fn experiment(config: &ExperimentConfig, timestamp: bool) -> Result<Outcome, CliError> {
    let desc = config.algebra;
    let len = config.truncation;
    let command = format!("experiment {}", config.kind.name());
    macro_rules! json {
        ($passed:expr, $report:expr) => {
            Envelope::new(command.clone(), $passed, Some(config), $report, timestamp).to_json()?
        };
    }
    let csv = config.output.format == Format::Csv;
    let (passed, text) = match config.kind {
        Kind::Counterexample => {
            let weights = resolve_weights(&config.weights, len)?;
            let report = counterexample_experiment(&weights, config.k_max, config.samples[0], config.seed)?;
            let passed = report.passed();
            let text = if csv {
                let mut t = Table::new(["k", "norm", "tail", "sampled_sup"]);
                for k in 0..report.norm_profile.len() {
                    t.push(vec![
                        k.to_string(),
                        real(report.norm_profile[k]),
                        real(report.tail_bounds[k]),
                        real(report.sampled_sup[k]),
                    ]);
                }
                t.to_csv()?
            } else {
                json!(passed, &report)
            };
            (passed, text)
        }
        Kind::Witness => {
            let t = build_operator(&config.operator, desc, len, config.seed)?;
            let report = witness_construction(&t, config.steps, config.horizon, config.tolerance)?;
            let passed = report.passed();
            let text = if csv {
                let m = report.pairwise.len();
                let mut t = Table::new(std::iter::once("step".to_string()).chain((1..=m).map(|i| i.to_string())));
                for (i, row) in report.pairwise.iter().enumerate() {
                    t.push(
                        std::iter::once((i + 1).to_string())
                            .chain(row.iter().map(|&v| real(v)))
                            .collect(),
                    );
                }
                t.to_csv()?
            } else {
                json!(passed, &report)
            };
            (passed, text)
        }
        Kind::Probe => {
            let t = build_operator(&config.operator, desc, len, config.seed)?;
            let p = config.seminorm.resolve(desc, len)?;
            let rows = compactness_probe(&t, &p, config.epsilon, &config.samples, config.seed)?;
            let saturated = match rows.as_slice() {
                [.., a, b] => Some(a.net_size == b.net_size),
                _ => None,
            };
            let text = if csv {
                let mut table = Table::new(["samples", "net_size"]);
                for r in &rows {
                    table.push(vec![r.samples.to_string(), r.net_size.to_string()]);
                }
                table.to_csv()?
            } else {
                let report = ProbeReport {
                    operator: config.operator.clone(),
                    epsilon: config.epsilon,
                    seminorm: SeminormJson::from_spec(&p),
                    rows,
                    saturated,
                };
                json!(true, &report)
            };
            (true, text)
        }
        Kind::Separation => {
            let z = build_point(&config.point, desc, len, config.seed)?;
            let report = separate_from_ball(&z, config.samples[0], config.seed)?;
            let passed = report.passed();
            let text = if csv {
                let mut t = check_header();
                for c in &report.checks {
                    t.push(check_row("separation", c, report.samples));
                }
                t.to_csv()?
            } else {
                json!(passed, &report)
            };
            (passed, text)
        }
        Kind::Net => {
            let report = net(config)?;
            let passed = report.checks.iter().all(|c| c.passed);
            let text = if csv {
                let mut t = Table::new(["point", "center"]);
                for (i, &a) in report.net.assignments.iter().enumerate() {
                    t.push(vec![i.to_string(), report.net.center_indices[a].to_string()]);
                }
                t.to_csv()?
            } else {
                json!(passed, &report)
            };
            (passed, text)
        }
    };
    Ok(Outcome { passed, text })
}

fn net(config: &ExperimentConfig) -> Result<NetReport, CliError> {
    let desc = config.algebra;
    let len = config.truncation;
    let t = build_operator(&config.operator, desc, len, config.seed)?;
    let points = build_points(&config.points, desc, len, config.seed)?
        .iter()
        .map(|x| apply(&t, x))
        .collect::<Result<Vec<ModuleVector>, _>>()?;
    let p = config.seminorm.resolve(desc, len)?;
    let net = greedy_net(&points, &p, config.epsilon)?;
    let mut cover: f64 = 0.0;
    for (i, &a) in net.assignments.iter().enumerate() {
        cover = cover.max(p.distance(&points[i], &net.centers[a])?);
    }
    let mut separation: Option<f64> = None;
    for a in 0..net.size() {
        for b in 0..a {
            let d = p.distance(&net.centers[a], &net.centers[b])?;
            separation = Some(separation.map_or(d, |s| s.min(d)));
        }
    }
    let mut checks = vec![Check::at_most("p(x_i - center) <= ε", cover, config.epsilon, 0.0)];
    if let Some(s) = separation {
        checks.push(Check::greater("p(c_a - c_b) > ε", s, config.epsilon));
    }
    Ok(NetReport {
        operator: config.operator.clone(),
        points: points.len(),
        seminorm: SeminormJson::from_spec(&p),
        net,
        max_cover_distance: cover,
        min_center_separation: separation,
        checks,
    })
}

pub fn write(outcome: &Outcome, path: Option<&std::path::Path>) -> Result<(), CliError> {
    emit(&outcome.text, path)
}
