//! Python module `luce`.
//!
//! Wraps rules, weights, utilities, correspondences, datasets and
//! decompositions as Python classes. Every class converts to and from the
//! same JSON documents the command-line tool reads and writes.

use std::collections::BTreeMap;

use luce_cli::commands::{
    check_report, family_from_lists, fit_report, limit_report, select_axioms, simulate_dataset,
};
use luce_cli::{Document, ModelArg};
use luce_core::axioms::{self, check_warp, Axiom};
use luce_core::decompose::{decompose, LuceDecomposition};
use luce_core::estimate::ChoiceDataset;
use luce_core::prob::{format_rational, parse_rational, DEFAULT_EPSILON};
use luce_core::synthesize::{self as synth, NoiseLevel};
use luce_core::{
    ChoiceCorrespondence, ChoiceFamily, LuceWeights, Prob, RandomChoiceRule, Universe, UtilitySpec,
};
use pyo3::create_exception;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use serde_json::Value;

create_exception!(
    luce,
    LuceError,
    PyValueError,
    "Invalid input or a blocked operation."
);

fn err(e: impl std::fmt::Display) -> PyErr {
    LuceError::new_err(e.to_string())
}

fn json_to_py<'py>(py: Python<'py>, value: &Value) -> PyResult<Bound<'py, PyAny>> {
    py.import("json")?
        .call_method1("loads", (value.to_string(),))
}

/// A family given as `"all"`, `"pairs"` or a list of label lists.
#[derive(FromPyObject)]
enum FamilyArg {
    Named(String),
    Sets(Vec<Vec<String>>),
}

impl FamilyArg {
    fn resolve(&self, universe: &Universe) -> PyResult<ChoiceFamily> {
        match self {
            FamilyArg::Named(name) if name == "all" => {
                ChoiceFamily::all_subsets(universe.len()).map_err(err)
            }
            FamilyArg::Named(name) if name == "pairs" => {
                ChoiceFamily::pairs(universe.len()).map_err(err)
            }
            FamilyArg::Named(name) => Err(err(format!(
                "family must be \"all\", \"pairs\" or a list of sets, got {name:?}"
            ))),
            FamilyArg::Sets(lists) => family_from_lists(universe, lists).map_err(err),
        }
    }
}

fn family_or_all(family: Option<FamilyArg>, universe: &Universe) -> PyResult<ChoiceFamily> {
    family
        .unwrap_or_else(|| FamilyArg::Named("all".into()))
        .resolve(universe)
}

/// Values keyed by label, in universe order.
fn keyed<T: Clone>(map: &BTreeMap<String, T>) -> PyResult<(Universe, Vec<T>)> {
    let universe = Universe::new(map.keys().cloned()).map_err(err)?;
    let values = universe.labels().iter().map(|l| map[l].clone()).collect();
    Ok((universe, values))
}

fn labelled<T>(universe: &Universe, values: impl IntoIterator<Item = T>) -> BTreeMap<String, T> {
    universe.labels().iter().cloned().zip(values).collect()
}

fn parse_doc(text: &str) -> PyResult<Document> {
    Document::parse(text).map_err(err)
}

fn wrong_kind(expected: &str, doc: &Document) -> PyErr {
    err(format!(
        "expected a {expected} document, got {:?}",
        doc.kind()
    ))
}

#[pyclass(module = "luce", frozen)]
struct Rule {
    inner: RandomChoiceRule,
}

#[pymethods]
impl Rule {
    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        match parse_doc(text)? {
            Document::Rule(inner) => Ok(Self { inner }),
            other => Err(wrong_kind("rule", &other)),
        }
    }

    fn to_json(&self) -> String {
        Document::Rule(self.inner.clone()).to_json()
    }

    #[getter]
    fn universe(&self) -> Vec<String> {
        self.inner.universe().labels().to_vec()
    }

    #[getter]
    fn is_exact(&self) -> bool {
        self.inner.mode().is_exact()
    }

    fn sets(&self) -> Vec<Vec<String>> {
        let u = self.inner.universe();
        self.inner
            .family()
            .sets()
            .iter()
            .map(|s| u.set_labels(**s))
            .collect()
    }

    /// `p(alternative, choice_set)` as a float.
    fn probability(&self, alternative: &str, choice_set: Vec<String>) -> PyResult<f64> {
        Ok(self.entry(alternative, &choice_set)?.to_f64())
    }

    /// `p(alternative, choice_set)` as `"n/d"`, or `None` for float rules.
    fn exact_probability(
        &self,
        alternative: &str,
        choice_set: Vec<String>,
    ) -> PyResult<Option<String>> {
        Ok(self
            .entry(alternative, &choice_set)?
            .as_exact()
            .map(format_rational))
    }

    /// Verdicts by axiom name. `axioms` defaults to every axiom a general
    /// Luce rule satisfies; pass `["all"]` for all of them.
    #[pyo3(signature = (axioms = None))]
    fn check(&self, axioms: Option<Vec<String>>) -> PyResult<BTreeMap<String, bool>> {
        let selected = select_axioms(&axioms.unwrap_or_default()).map_err(err)?;
        selected
            .into_iter()
            .map(|a| {
                let report = axioms::check(&self.inner, a).map_err(err)?;
                Ok((a.name().to_string(), report.holds()))
            })
            .collect()
    }

    /// The check report as a dict, with witnesses.
    #[pyo3(signature = (axioms = None))]
    fn report<'py>(
        &self,
        py: Python<'py>,
        axioms: Option<Vec<String>>,
    ) -> PyResult<Bound<'py, PyAny>> {
        let selected = select_axioms(&axioms.unwrap_or_default()).map_err(err)?;
        let (doc, _) = check_report(&self.inner, &selected).map_err(err)?;
        json_to_py(py, &doc.to_value()["payload"])
    }

    /// Human-readable violations of one axiom (at most 100).
    fn witnesses(&self, axiom: &str) -> PyResult<Vec<String>> {
        let axiom =
            Axiom::from_name(axiom).ok_or_else(|| err(format!("unknown axiom {axiom:?}")))?;
        let report = axioms::check(&self.inner, axiom).map_err(err)?;
        Ok(report
            .witnesses
            .iter()
            .map(|w| w.describe(self.inner.universe()))
            .collect())
    }

    fn support(&self) -> Correspondence {
        Correspondence {
            inner: self.inner.support_correspondence(),
        }
    }

    /// Raises `LuceError` when the rule fails the choice axiom.
    fn decompose(&self) -> PyResult<Decomposition> {
        decompose(&self.inner)
            .map(|inner| Decomposition { inner })
            .map_err(|e| match &e {
                luce_core::Error::ChoiceAxiomFails(w) | luce_core::Error::WarpViolation(w) => {
                    err(format!("{e}: {}", w.describe(self.inner.universe())))
                }
                luce_core::Error::NotRational(Some(w)) => {
                    err(format!("{e}: {}", w.describe(self.inner.universe())))
                }
                _ => err(e),
            })
    }

    #[pyo3(signature = (epsilon = DEFAULT_EPSILON))]
    fn to_float(&self, epsilon: f64) -> Self {
        Self {
            inner: self.inner.to_float(epsilon),
        }
    }

    /// Largest absolute difference between matching probabilities.
    fn sup_distance(&self, other: PyRef<'_, Rule>) -> PyResult<f64> {
        self.inner.sup_distance(&other.inner).map_err(err)
    }

    fn __eq__(&self, other: PyRef<'_, Rule>) -> bool {
        self.inner == other.inner
    }

    fn __repr__(&self) -> String {
        format!(
            "Rule(universe={:?}, sets={}, exact={})",
            self.inner.universe().labels(),
            self.inner.family().len(),
            self.is_exact()
        )
    }
}

impl Rule {
    fn entry(&self, alternative: &str, choice_set: &[String]) -> PyResult<&Prob> {
        let u = self.inner.universe();
        let a = u.index_of(alternative).map_err(err)?;
        let set = u.choice_set(choice_set).map_err(err)?;
        self.inner.prob(a, *set).map_err(err)
    }
}

#[pyclass(module = "luce", frozen)]
struct Weights {
    inner: LuceWeights,
}

#[pymethods]
impl Weights {
    /// Positive rational weights such as `{"a": "1", "b": "1/2"}`.
    #[staticmethod]
    fn exact(v: BTreeMap<String, String>) -> PyResult<Self> {
        let (universe, texts) = keyed(&v)?;
        let values = texts
            .iter()
            .map(|t| parse_rational(t))
            .collect::<Result<Vec<_>, _>>()
            .map_err(err)?;
        Ok(Self {
            inner: LuceWeights::exact(universe, values).map_err(err)?,
        })
    }

    /// Log-weights `α`.
    #[staticmethod]
    fn from_alpha(alpha: BTreeMap<String, f64>) -> PyResult<Self> {
        let (universe, values) = keyed(&alpha)?;
        Ok(Self {
            inner: LuceWeights::from_alpha(universe, values).map_err(err)?,
        })
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        match parse_doc(text)? {
            Document::Weights(inner) => Ok(Self { inner }),
            other => Err(wrong_kind("weights", &other)),
        }
    }

    fn to_json(&self) -> String {
        Document::Weights(self.inner.clone()).to_json()
    }

    fn alpha(&self) -> BTreeMap<String, f64> {
        labelled(self.inner.universe(), self.inner.alpha())
    }

    #[getter]
    fn is_exact(&self) -> bool {
        self.inner.is_exact()
    }
}

#[pyclass(module = "luce", frozen)]
struct Utility {
    inner: UtilitySpec,
}

#[pymethods]
impl Utility {
    #[new]
    fn new(u: BTreeMap<String, f64>) -> PyResult<Self> {
        let (universe, values) = keyed(&u)?;
        Ok(Self {
            inner: UtilitySpec::new(universe, values).map_err(err)?,
        })
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        match parse_doc(text)? {
            Document::Utility(inner) => Ok(Self { inner }),
            other => Err(wrong_kind("utility", &other)),
        }
    }

    fn to_json(&self) -> String {
        Document::Utility(self.inner.clone()).to_json()
    }

    /// `argmax_A u` on every set of the family.
    #[pyo3(signature = (family = None))]
    fn correspondence(&self, family: Option<FamilyArg>) -> PyResult<Correspondence> {
        let family = family_or_all(family, self.inner.universe())?;
        Ok(Correspondence {
            inner: self.inner.correspondence(&family).map_err(err)?,
        })
    }
}

#[pyclass(module = "luce", frozen)]
struct Correspondence {
    inner: ChoiceCorrespondence,
}

#[pymethods]
impl Correspondence {
    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        match parse_doc(text)? {
            Document::Correspondence(inner) => Ok(Self { inner }),
            other => Err(wrong_kind("correspondence", &other)),
        }
    }

    fn to_json(&self) -> String {
        Document::Correspondence(self.inner.clone()).to_json()
    }

    fn value(&self, choice_set: Vec<String>) -> PyResult<Vec<String>> {
        let u = self.inner.universe();
        let set = u.choice_set(&choice_set).map_err(err)?;
        Ok(u.set_labels(*self.inner.get(*set).map_err(err)?))
    }

    fn satisfies_warp(&self) -> bool {
        check_warp(&self.inner).holds()
    }

    fn __eq__(&self, other: PyRef<'_, Correspondence>) -> bool {
        self.inner == other.inner
    }
}

#[pyclass(module = "luce", frozen)]
struct Dataset {
    inner: ChoiceDataset,
}

#[pymethods]
impl Dataset {
    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        match parse_doc(text)? {
            Document::Dataset(inner) => Ok(Self { inner }),
            other => Err(wrong_kind("dataset", &other)),
        }
    }

    fn to_json(&self) -> String {
        Document::Dataset(self.inner.clone()).to_json()
    }

    /// Counts per member of `choice_set`.
    fn counts(&self, choice_set: Vec<String>) -> PyResult<BTreeMap<String, u64>> {
        let u = self.inner.universe();
        let set = u.choice_set(&choice_set).map_err(err)?;
        set.iter()
            .map(|a| {
                Ok((
                    u.label(a).to_string(),
                    self.inner.count(a, *set).map_err(err)?,
                ))
            })
            .collect()
    }
}

#[pyclass(module = "luce", frozen)]
struct Decomposition {
    inner: LuceDecomposition,
}

#[pymethods]
impl Decomposition {
    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        match parse_doc(text)? {
            Document::Decomposition(inner) => Ok(Self { inner }),
            other => Err(wrong_kind("decomposition", &other)),
        }
    }

    fn to_json(&self) -> String {
        Document::Decomposition(self.inner.clone()).to_json()
    }

    #[getter]
    fn gamma(&self) -> Correspondence {
        Correspondence {
            inner: self.inner.gamma.clone(),
        }
    }

    /// Indifference classes, best first.
    #[getter]
    fn classes(&self) -> Vec<Vec<String>> {
        let u = self.inner.gamma.universe();
        self.inner
            .classes
            .iter()
            .map(|c| u.set_labels(c.members))
            .collect()
    }

    /// Weights relative to each class representative, as `"n/d"` text when
    /// exact and decimal text otherwise.
    #[getter]
    fn v(&self) -> BTreeMap<String, String> {
        labelled(
            self.inner.gamma.universe(),
            self.inner.v.iter().map(|p| p.to_string()),
        )
    }

    #[getter]
    fn alpha(&self) -> BTreeMap<String, f64> {
        labelled(
            self.inner.gamma.universe(),
            self.inner.alpha.iter().copied(),
        )
    }

    fn weights(&self) -> PyResult<Weights> {
        Ok(Weights {
            inner: self.inner.weights().map_err(err)?,
        })
    }
}

/// Luce rule with full support on every set of the family.
#[pyfunction]
#[pyo3(signature = (weights, family = None))]
fn luce_rule(weights: PyRef<'_, Weights>, family: Option<FamilyArg>) -> PyResult<Rule> {
    let family = family_or_all(family, weights.inner.universe())?;
    Ok(Rule {
        inner: synth::luce_rule(&weights.inner, &family).map_err(err)?,
    })
}

/// General Luce rule on a WARP correspondence.
#[pyfunction]
fn general_luce_rule(
    correspondence: PyRef<'_, Correspondence>,
    weights: PyRef<'_, Weights>,
) -> PyResult<Rule> {
    Ok(Rule {
        inner: synth::general_luce_rule(&correspondence.inner, &weights.inner).map_err(err)?,
    })
}

/// General Luce rule on `argmax u`, or the logit with noise `lam` when given.
#[pyfunction]
#[pyo3(signature = (utility, weights, family = None, lam = None))]
fn rule_from_utility(
    utility: PyRef<'_, Utility>,
    weights: PyRef<'_, Weights>,
    family: Option<FamilyArg>,
    lam: Option<f64>,
) -> PyResult<Rule> {
    let family = family_or_all(family, utility.inner.universe())?;
    let inner = match lam {
        Some(l) => {
            let noise = NoiseLevel::new(l).map_err(err)?;
            synth::lambda_smoothed_rule(&utility.inner, &weights.inner, noise, &family)
        }
        None => synth::general_luce_rule_from_utility(&utility.inner, &weights.inner, &family),
    }
    .map_err(err)?;
    Ok(Rule { inner })
}

/// Top-choice counts from a random preference model: `"gumbel"`, `"lex"`
/// (utility order, Gumbel ties) or `"rum"` (bounded shocks around utility).
#[pyfunction]
#[pyo3(signature = (weights, draws, seed = 0, family = None, model = "gumbel", utility = None))]
fn simulate(
    weights: PyRef<'_, Weights>,
    draws: u64,
    seed: u64,
    family: Option<FamilyArg>,
    model: &str,
    utility: Option<PyRef<'_, Utility>>,
) -> PyResult<Dataset> {
    let kind = match model {
        "gumbel" => ModelArg::Gumbel,
        "lex" => ModelArg::Lex,
        "rum" => ModelArg::Rum,
        other => return Err(err(format!("unknown model {other:?}"))),
    };
    let family = family_or_all(family, weights.inner.universe())?;
    let u = utility.as_ref().map(|u| &u.inner);
    Ok(Dataset {
        inner: simulate_dataset(&weights.inner, u, kind, seed, &family, draws).map_err(err)?,
    })
}

/// Maximum-likelihood support and log-weights; the fit report as a dict.
#[pyfunction]
#[pyo3(signature = (dataset, pseudo_count = 0.0))]
fn fit<'py>(
    py: Python<'py>,
    dataset: PyRef<'_, Dataset>,
    pseudo_count: f64,
) -> PyResult<Bound<'py, PyAny>> {
    if !(pseudo_count >= 0.0 && pseudo_count.is_finite()) {
        return Err(err("pseudo_count must be finite and nonnegative"));
    }
    let (doc, _) = fit_report(&dataset.inner, pseudo_count).map_err(err)?;
    json_to_py(py, &doc.to_value()["payload"])
}

/// Distances of smoothed rules to their zero-noise limit along `schedule`.
#[pyfunction]
#[pyo3(signature = (utility, weights, schedule, family = None))]
fn limit<'py>(
    py: Python<'py>,
    utility: PyRef<'_, Utility>,
    weights: PyRef<'_, Weights>,
    schedule: Vec<f64>,
    family: Option<FamilyArg>,
) -> PyResult<Bound<'py, PyAny>> {
    let family = family_or_all(family, utility.inner.universe())?;
    let (doc, _) = limit_report(&utility.inner, &weights.inner, &schedule, &family).map_err(err)?;
    json_to_py(py, &doc.to_value()["payload"])
}

#[pymodule]
#[pyo3(name = "luce")]
fn luce_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("LuceError", m.py().get_type::<LuceError>())?;
    m.add("FORMAT_VERSION", luce_cli::FORMAT_VERSION)?;
    m.add_class::<Rule>()?;
    m.add_class::<Weights>()?;
    m.add_class::<Utility>()?;
    m.add_class::<Correspondence>()?;
    m.add_class::<Dataset>()?;
    m.add_class::<Decomposition>()?;
    m.add_function(wrap_pyfunction!(luce_rule, m)?)?;
    m.add_function(wrap_pyfunction!(general_luce_rule, m)?)?;
    m.add_function(wrap_pyfunction!(rule_from_utility, m)?)?;
    m.add_function(wrap_pyfunction!(simulate, m)?)?;
    m.add_function(wrap_pyfunction!(fit, m)?)?;
    m.add_function(wrap_pyfunction!(limit, m)?)?;
    Ok(())
}
