use std::fs;
use std::path::Path;

use luce_core::axioms::{self, Axiom, AxiomReport, Witness};
use luce_core::decompose::decompose;
use luce_core::estimate::{fit, ChoiceDataset, FitOptions};
use luce_core::prob::DEFAULT_EPSILON;
use luce_core::rum::{empirical_rule, gumbel_luce_sampler, independent_rum_sampler, lex_sampler};
use luce_core::synthesize::{
    general_luce_rule, general_luce_rule_from_utility, lambda_smoothed_rule, limit_check,
    luce_rule, smoothing_error_bound,
};
use luce_core::{
    ChoiceFamily, Completeness, Error, LuceWeights, NoiseLevel, RandomChoiceRule, Universe,
    UtilitySpec, WeakOrder,
};
use serde_json::{json, Map, Value};

use crate::document::{witness_json, Document};
use crate::error::{CliError, EXIT_FAILURE, EXIT_OK};
use crate::{Cli, Command, ModeArg, ModelArg, ModelInputs};

/// Witnesses listed per axiom in a check report.
const REPORTED_WITNESSES: usize = 10;

/// Everything a general Luce rule satisfies; positivity and full support
/// hold only for Luce rules and must be requested.
pub const DEFAULT_AXIOMS: [Axiom; 7] = [
    Axiom::ChoiceAxiom,
    Axiom::OddsIndependence,
    Axiom::ProductRule,
    Axiom::SetChoiceAxiom,
    Axiom::SetIntersectionRule,
    Axiom::Warp,
    Axiom::RenyiConditioning,
];

type Output = Result<(Document, i32), CliError>;

pub fn execute(cli: &Cli) -> Output {
    match &cli.command {
        Command::Check { rule, axioms } => check(cli, rule, axioms),
        Command::Decompose { rule } => decompose_cmd(cli, rule),
        Command::Synthesize {
            model,
            correspondence,
            lambda,
        } => synthesize(cli, model, correspondence.as_deref(), *lambda),
        Command::Simulate { model, kind, draws } => simulate(cli, model, *kind, *draws),
        Command::Fit {
            dataset,
            pseudo_count,
        } => fit_cmd(dataset, *pseudo_count),
        Command::Limit { model, schedule } => limit(model, schedule),
    }
}

pub fn read_document(path: &Path) -> Result<Document, CliError> {
    let text = fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })?;
    Document::parse(&text)
}

fn wrong_kind(path: &Path, expected: &str, doc: &Document) -> CliError {
    CliError::format(format!(
        "{} holds a {:?} document, expected {expected}",
        path.display(),
        doc.kind()
    ))
}

macro_rules! load {
    ($path:expr, $variant:ident, $name:literal) => {{
        let path: &Path = $path;
        match read_document(path)? {
            Document::$variant(x) => x,
            other => return Err(wrong_kind(path, $name, &other)),
        }
    }};
}

fn load_rule(cli: &Cli, path: &Path) -> Result<RandomChoiceRule, CliError> {
    let rule = load!(path, Rule, "a rule");
    apply_mode(cli.mode, rule)
}

fn apply_mode(mode: Option<ModeArg>, rule: RandomChoiceRule) -> Result<RandomChoiceRule, CliError> {
    match (mode, rule.mode().is_exact()) {
        (Some(ModeArg::Float), true) => Ok(rule.to_float(DEFAULT_EPSILON)),
        (Some(ModeArg::Exact), false) => Err(CliError::usage(
            "--mode exact needs an exact rule; float probabilities cannot be made exact",
        )),
        _ => Ok(rule),
    }
}

/// `all`, `pairs`, or a path to a JSON array of label arrays.
pub fn parse_family(spec: Option<&str>, universe: &Universe) -> Result<ChoiceFamily, CliError> {
    match spec.unwrap_or("all") {
        "all" => Ok(ChoiceFamily::all_subsets(universe.len())?),
        "pairs" => Ok(ChoiceFamily::pairs(universe.len())?),
        path => {
            let text = fs::read_to_string(path).map_err(|source| CliError::Io {
                path: path.to_string(),
                source,
            })?;
            let lists: Vec<Vec<String>> =
                serde_json::from_str(&text).map_err(|e| CliError::format(e.to_string()))?;
            family_from_lists(universe, &lists)
        }
    }
}

/// A family from explicit label lists.
pub fn family_from_lists<S: AsRef<str>>(
    universe: &Universe,
    lists: &[Vec<S>],
) -> Result<ChoiceFamily, CliError> {
    let sets = lists
        .iter()
        .map(|labels| universe.choice_set(labels))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(ChoiceFamily::from_sets(universe.len(), sets)?)
}

fn report(command: &str, status: &str, fields: Map<String, Value>) -> Document {
    let mut body = Map::new();
    body.insert("command".into(), command.into());
    body.insert("status".into(), status.into());
    body.extend(fields);
    Document::Report(Value::Object(body))
}

fn axiom_json(report: &AxiomReport, universe: &Universe) -> Value {
    json!({
        "axiom": report.axiom.name(),
        "verdict": if report.holds() { "holds" } else { "fails" },
        "violations": report.violations,
        "pairs_checked": report.pairs_checked,
        "completeness": match report.completeness {
            Completeness::AllSubsets => "all-subsets",
            Completeness::Partial => "partial",
        },
        "witnesses": report
            .witnesses
            .iter()
            .take(REPORTED_WITNESSES)
            .map(|w| witness_json(w, universe))
            .collect::<Vec<_>>(),
    })
}

fn check(cli: &Cli, path: &Path, names: &[String]) -> Output {
    let rule = load_rule(cli, path)?;
    check_report(&rule, &select_axioms(names)?)
}

/// Axioms named on the command line; empty means [`DEFAULT_AXIOMS`].
pub fn select_axioms<S: AsRef<str>>(names: &[S]) -> Result<Vec<Axiom>, CliError> {
    Ok(if names.is_empty() {
        DEFAULT_AXIOMS.to_vec()
    } else if names.len() == 1 && names[0].as_ref() == "all" {
        Axiom::ALL.to_vec()
    } else {
        names
            .iter()
            .map(|n| {
                let n = n.as_ref();
                Axiom::from_name(n.trim()).ok_or_else(|| {
                    let known: Vec<&str> = Axiom::ALL.iter().map(|a| a.name()).collect();
                    CliError::usage(format!("unknown axiom {n:?}; known: {}", known.join(", ")))
                })
            })
            .collect::<Result<Vec<_>, _>>()?
    })
}

pub fn check_report(rule: &RandomChoiceRule, selected: &[Axiom]) -> Output {
    let reports = selected
        .iter()
        .map(|&a| axioms::check(rule, a))
        .collect::<Result<Vec<_>, _>>()?;
    let holds = reports.iter().all(AxiomReport::holds);
    let mut fields = Map::new();
    fields.insert("mode".into(), mode_name(rule).into());
    fields.insert(
        "axioms".into(),
        reports
            .iter()
            .map(|r| axiom_json(r, rule.universe()))
            .collect(),
    );
    let (status, code) = if holds {
        ("holds", EXIT_OK)
    } else {
        ("fails", EXIT_FAILURE)
    };
    Ok((report("check", status, fields), code))
}

fn mode_name(rule: &RandomChoiceRule) -> &'static str {
    if rule.mode().is_exact() {
        "exact"
    } else {
        "float"
    }
}

/// Errors meaning the input lacks the structure an operation needs
/// (semantic failures, exit 1) rather than being malformed (exit 2).
fn blocking(err: &Error) -> Option<(&'static str, Option<&Witness>)> {
    match err {
        Error::ChoiceAxiomFails(w) => Some(("choice-axiom-fails", Some(w))),
        Error::NotRational(w) => Some(("not-rational", w.as_deref())),
        Error::WarpViolation(w) => Some(("not-rational", Some(w))),
        Error::MissingPairs(_) => Some(("missing-pairs", None)),
        Error::DegenerateOdds(..) => Some(("degenerate-odds", None)),
        Error::ReconstructionMismatch => Some(("reconstruction-mismatch", None)),
        _ => None,
    }
}

fn failure_report(command: &str, err: Error, universe: &Universe) -> Output {
    let Some((kind, witness)) = blocking(&err) else {
        return Err(err.into());
    };
    let mut fields = Map::new();
    fields.insert("error".into(), kind.into());
    fields.insert("message".into(), err.to_string().into());
    if let Some(w) = witness {
        fields.insert("witness".into(), witness_json(w, universe));
    }
    if let Error::MissingPairs(pair) = &err {
        let labels: Vec<&str> = pair.iter().map(|&a| universe.label(a)).collect();
        fields.insert("missing_pair".into(), labels.into());
    }
    Ok((report(command, "fails", fields), EXIT_FAILURE))
}

fn decompose_cmd(cli: &Cli, path: &Path) -> Output {
    let rule = load_rule(cli, path)?;
    match decompose(&rule) {
        Ok(d) => Ok((Document::Decomposition(d), EXIT_OK)),
        Err(e) => failure_report("decompose", e, rule.universe()),
    }
}

fn load_weights(inputs: &ModelInputs) -> Result<LuceWeights, CliError> {
    Ok(load!(&inputs.weights, Weights, "weights"))
}

fn load_utility(
    inputs: &ModelInputs,
    universe: &Universe,
) -> Result<Option<UtilitySpec>, CliError> {
    let Some(path) = &inputs.utility else {
        return Ok(None);
    };
    let u = load!(path, Utility, "a utility");
    if u.universe() != universe {
        return Err(CliError::format(
            "utility and weights are over different universes",
        ));
    }
    Ok(Some(u))
}

fn synthesize(
    cli: &Cli,
    inputs: &ModelInputs,
    correspondence: Option<&Path>,
    lambda: Option<f64>,
) -> Output {
    let weights = load_weights(inputs)?;
    let universe = weights.universe().clone();
    let built = if let Some(path) = correspondence {
        let gamma = load!(path, Correspondence, "a correspondence");
        if gamma.universe() != &universe {
            return Err(CliError::format(
                "correspondence and weights are over different universes",
            ));
        }
        general_luce_rule(&gamma, &weights)
    } else {
        let family = parse_family(inputs.family.as_deref(), &universe)?;
        match (load_utility(inputs, &universe)?, lambda) {
            (Some(u), Some(l)) => lambda_smoothed_rule(&u, &weights, NoiseLevel::new(l)?, &family),
            (Some(u), None) => general_luce_rule_from_utility(&u, &weights, &family),
            (None, _) => luce_rule(&weights, &family),
        }
    };
    match built {
        Ok(rule) => Ok((Document::Rule(apply_mode(cli.mode, rule)?), EXIT_OK)),
        Err(e) => failure_report("synthesize", e, &universe),
    }
}

/// The weak order of `u`: higher utility is better.
pub fn order_from_utility(u: &UtilitySpec) -> Result<WeakOrder, CliError> {
    let mut distinct: Vec<f64> = u.values().to_vec();
    distinct.sort_by(|a, b| b.total_cmp(a));
    distinct.dedup();
    let levels: Vec<i64> = u
        .values()
        .iter()
        .map(|x| distinct.iter().position(|d| d == x).expect("present") as i64)
        .collect();
    Ok(WeakOrder::from_ranks(u.universe().clone(), &levels)?)
}

fn simulate(cli: &Cli, inputs: &ModelInputs, kind: ModelArg, draws: u64) -> Output {
    if cli.mode == Some(ModeArg::Exact) {
        return Err(CliError::usage(
            "simulation produces counts; --mode exact does not apply",
        ));
    }
    let weights = load_weights(inputs)?;
    let universe = weights.universe().clone();
    let family = parse_family(inputs.family.as_deref(), &universe)?;
    let utility = load_utility(inputs, &universe)?;
    let data = simulate_dataset(&weights, utility.as_ref(), kind, cli.seed, &family, draws)?;
    Ok((Document::Dataset(data), EXIT_OK))
}

/// Top-choice counts of `draws` samples per set; `lex` and `rum` need `u`.
pub fn simulate_dataset(
    weights: &LuceWeights,
    utility: Option<&UtilitySpec>,
    kind: ModelArg,
    seed: u64,
    family: &ChoiceFamily,
    draws: u64,
) -> Result<ChoiceDataset, CliError> {
    let needs_utility = || CliError::usage("this model needs a utility");
    let sampler = match kind {
        ModelArg::Gumbel => gumbel_luce_sampler(weights, seed),
        ModelArg::Lex => {
            let first = order_from_utility(utility.ok_or_else(needs_utility)?)?;
            lex_sampler(&first, &gumbel_luce_sampler(weights, seed))?
        }
        ModelArg::Rum => {
            independent_rum_sampler(utility.ok_or_else(needs_utility)?, weights, seed)?
        }
    };
    let empirical = empirical_rule(&sampler, family, draws)?;
    Ok(ChoiceDataset::from_empirical(&empirical))
}

fn fit_cmd(path: &Path, pseudo_count: f64) -> Output {
    if !(pseudo_count >= 0.0 && pseudo_count.is_finite()) {
        return Err(CliError::usage(
            "--pseudo-count must be finite and nonnegative",
        ));
    }
    let data = load!(path, Dataset, "a dataset");
    fit_report(&data, pseudo_count)
}

pub fn fit_report(data: &ChoiceDataset, pseudo_count: f64) -> Output {
    let universe = data.universe().clone();
    let options = FitOptions {
        pseudo_count,
        ..FitOptions::default()
    };
    let result = fit(data, &options)?;
    let gamma: Vec<Value> = result
        .gamma_hat
        .family()
        .sets()
        .iter()
        .zip(result.gamma_hat.values())
        .map(|(set, value)| {
            json!({"set": universe.set_labels(**set), "value": universe.set_labels(**value)})
        })
        .collect();
    let mut fields = Map::new();
    fields.insert("universe".into(), universe.labels().to_vec().into());
    fields.insert("gamma_hat".into(), gamma.into());
    fields.insert(
        "alpha_hat".into(),
        match &result.alpha_hat {
            Some(alpha) => universe
                .labels()
                .iter()
                .cloned()
                .zip(alpha.iter().map(|&x| Value::from(x)))
                .collect::<Map<_, _>>()
                .into(),
            None => Value::Null,
        },
    );
    fields.insert("log_likelihood".into(), result.log_likelihood.into());
    fields.insert("converged".into(), result.converged.into());
    fields.insert("diverged".into(), result.diverged.into());
    fields.insert("iterations".into(), result.iterations.into());
    fields.insert("trace".into(), result.trace.clone().into());
    fields.insert("pseudo_count".into(), pseudo_count.into());
    fields.insert("warp".into(), axiom_json(&result.warp_report, &universe));
    let (status, code) = if result.alpha_hat.is_some() {
        ("ok", EXIT_OK)
    } else {
        ("blocked", EXIT_FAILURE)
    };
    Ok((report("fit", status, fields), code))
}

fn limit(inputs: &ModelInputs, schedule: &[f64]) -> Output {
    let weights = load_weights(inputs)?;
    let universe = weights.universe().clone();
    let u =
        load_utility(inputs, &universe)?.ok_or_else(|| CliError::usage("limit needs --utility"))?;
    let family = parse_family(inputs.family.as_deref(), &universe)?;
    limit_report(&u, &weights, schedule, &family)
}

pub fn limit_report(
    u: &UtilitySpec,
    weights: &LuceWeights,
    schedule: &[f64],
    family: &ChoiceFamily,
) -> Output {
    let result = match limit_check(u, weights, schedule, family) {
        Err(Error::InvalidSchedule) => {
            return Err(CliError::usage(Error::InvalidSchedule.to_string()))
        }
        other => other?,
    };
    let bounds = schedule
        .iter()
        .map(|&l| Ok(smoothing_error_bound(u, weights, NoiseLevel::new(l)?)))
        .collect::<Result<Vec<f64>, Error>>()?;
    let mut fields = Map::new();
    fields.insert("lambdas".into(), result.lambdas.clone().into());
    fields.insert("distances".into(), result.distances.clone().into());
    fields.insert("bounds".into(), bounds.into());
    fields.insert(
        "strictly_decreasing".into(),
        result.strictly_decreasing.into(),
    );
    fields.insert("non_increasing".into(), result.non_increasing.into());
    let (status, code) = if result.non_increasing {
        ("ok", EXIT_OK)
    } else {
        ("fails", EXIT_FAILURE)
    };
    Ok((report("limit", status, fields), code))
}
