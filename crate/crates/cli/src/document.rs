//! Versioned JSON documents.
//!
//! Every file is an envelope `{"kind", "version", "payload"}`. Exact
//! probabilities and weights are `"num/den"` strings; floats are JSON numbers
//! written in shortest round-trip form.

use std::collections::BTreeMap;

use luce_core::axioms::Witness;
use luce_core::decompose::{IndifferenceClass, LuceDecomposition};
use luce_core::estimate::ChoiceDataset;
use luce_core::prob::{format_rational, parse_rational, DEFAULT_EPSILON};
use luce_core::synthesize::WeightValues;
use luce_core::{
    AltSet, ChoiceCorrespondence, ChoiceFamily, ChoiceSet, LuceWeights, Mode, Prob, Quantity,
    RandomChoiceRule, Universe, UtilitySpec, WeakOrder,
};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::CliError;

pub const FORMAT_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Kind {
    Rule,
    Correspondence,
    Weights,
    Utility,
    Dataset,
    Report,
    Decomposition,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Document {
    Rule(RandomChoiceRule),
    Correspondence(ChoiceCorrespondence),
    Weights(LuceWeights),
    Utility(UtilitySpec),
    Dataset(ChoiceDataset),
    Decomposition(LuceDecomposition),
    /// Command output; kept as free-form JSON.
    Report(Value),
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct Envelope {
    kind: Kind,
    version: u32,
    payload: Value,
}

/// A probability or weight: `"num/den"` text when exact, a number otherwise.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
enum Number {
    Text(String),
    Float(f64),
}

impl Number {
    fn from_prob(p: &Prob) -> Self {
        match p {
            Prob::Exact(r) => Number::Text(format_rational(r)),
            Prob::Float(x) => Number::Float(*x),
        }
    }

    fn to_prob(&self, exact: bool) -> Result<Prob, CliError> {
        match (self, exact) {
            (Number::Text(s), true) => Ok(Prob::Exact(parse_rational(s)?)),
            (Number::Float(x), false) => Ok(Prob::Float(*x)),
            (Number::Text(s), false) => Err(CliError::format(format!(
                "expected a number in a float document, found {s:?}"
            ))),
            (Number::Float(x), true) => Err(CliError::format(format!(
                "expected \"num/den\" text in an exact document, found {x}"
            ))),
        }
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RulePayload {
    mode: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    epsilon: Option<f64>,
    universe: Vec<String>,
    sets: Vec<RuleEntry>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RuleEntry {
    set: Vec<String>,
    probabilities: BTreeMap<String, Number>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CorrespondencePayload {
    universe: Vec<String>,
    sets: Vec<CorrespondenceEntry>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CorrespondenceEntry {
    set: Vec<String>,
    value: Vec<String>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct WeightsPayload {
    universe: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    v: Option<BTreeMap<String, String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    alpha: Option<BTreeMap<String, f64>>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct UtilityPayload {
    universe: Vec<String>,
    u: BTreeMap<String, f64>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct DatasetPayload {
    universe: Vec<String>,
    observations: Vec<Observation>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct Observation {
    set: Vec<String>,
    counts: BTreeMap<String, u64>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct DecompositionPayload {
    universe: Vec<String>,
    gamma: Vec<CorrespondenceEntry>,
    classes: Vec<ClassEntry>,
    v: BTreeMap<String, Number>,
    alpha: BTreeMap<String, f64>,
    reconstruction_verified: bool,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ClassEntry {
    members: Vec<String>,
    representative: String,
}

fn universe_from(labels: &[String]) -> Result<Universe, CliError> {
    let universe = Universe::new(labels.iter().cloned())?;
    if universe.labels() != labels {
        return Err(CliError::format(
            "universe labels must be listed in sorted order",
        ));
    }
    Ok(universe)
}

fn set_from(universe: &Universe, labels: &[String]) -> Result<ChoiceSet, CliError> {
    Ok(universe.choice_set(labels)?)
}

/// Values keyed by label, checked to be exactly the members of `set`.
fn aligned<'a, T>(
    universe: &Universe,
    set: AltSet,
    map: &'a BTreeMap<String, T>,
) -> Result<Vec<&'a T>, CliError> {
    for key in map.keys() {
        let idx = universe.index_of(key)?;
        if !set.contains(idx) {
            return Err(CliError::format(format!(
                "{key:?} is not a member of {}",
                universe.format_set(set)
            )));
        }
    }
    set.iter()
        .map(|a| {
            map.get(universe.label(a)).ok_or_else(|| {
                CliError::format(format!(
                    "missing value for {:?} in {}",
                    universe.label(a),
                    universe.format_set(set)
                ))
            })
        })
        .collect()
}

fn per_label<T>(universe: &Universe, values: impl IntoIterator<Item = T>) -> BTreeMap<String, T> {
    universe.labels().iter().cloned().zip(values).collect()
}

fn total<'a, T>(universe: &Universe, map: &'a BTreeMap<String, T>) -> Result<Vec<&'a T>, CliError> {
    aligned(universe, AltSet::full(universe.len()), map)
}

impl Document {
    pub fn kind(&self) -> Kind {
        match self {
            Document::Rule(_) => Kind::Rule,
            Document::Correspondence(_) => Kind::Correspondence,
            Document::Weights(_) => Kind::Weights,
            Document::Utility(_) => Kind::Utility,
            Document::Dataset(_) => Kind::Dataset,
            Document::Decomposition(_) => Kind::Decomposition,
            Document::Report(_) => Kind::Report,
        }
    }

    pub fn parse(text: &str) -> Result<Document, CliError> {
        let raw: Value = serde_json::from_str(text).map_err(|e| CliError::format(e.to_string()))?;
        let version = raw.get("version").and_then(Value::as_u64);
        if raw.get("version").is_some() && version != Some(FORMAT_VERSION as u64) {
            return Err(CliError::format(format!(
                "unsupported document version {}",
                raw["version"]
            )));
        }
        let envelope: Envelope =
            serde_json::from_value(raw).map_err(|e| CliError::format(e.to_string()))?;
        let payload = envelope.payload;
        let decode = |e: serde_json::Error| CliError::format(e.to_string());
        Ok(match envelope.kind {
            Kind::Rule => {
                Document::Rule(rule_from(serde_json::from_value(payload).map_err(decode)?)?)
            }
            Kind::Correspondence => Document::Correspondence(correspondence_from(
                serde_json::from_value(payload).map_err(decode)?,
            )?),
            Kind::Weights => Document::Weights(weights_from(
                serde_json::from_value(payload).map_err(decode)?,
            )?),
            Kind::Utility => Document::Utility(utility_from(
                serde_json::from_value(payload).map_err(decode)?,
            )?),
            Kind::Dataset => Document::Dataset(dataset_from(
                serde_json::from_value(payload).map_err(decode)?,
            )?),
            Kind::Decomposition => Document::Decomposition(decomposition_from(
                serde_json::from_value(payload).map_err(decode)?,
            )?),
            Kind::Report => Document::Report(payload),
        })
    }

    pub fn to_value(&self) -> Value {
        let payload = match self {
            Document::Rule(rule) => serde_json::to_value(rule_payload(rule)),
            Document::Correspondence(c) => serde_json::to_value(correspondence_payload(c)),
            Document::Weights(w) => serde_json::to_value(weights_payload(w)),
            Document::Utility(u) => serde_json::to_value(UtilityPayload {
                universe: u.universe().labels().to_vec(),
                u: per_label(u.universe(), u.values().iter().copied()),
            }),
            Document::Dataset(d) => serde_json::to_value(dataset_payload(d)),
            Document::Decomposition(d) => serde_json::to_value(decomposition_payload(d)),
            Document::Report(v) => Ok(v.clone()),
        }
        .expect("payloads serialize");
        serde_json::to_value(Envelope {
            kind: self.kind(),
            version: FORMAT_VERSION,
            payload,
        })
        .expect("envelope serializes")
    }

    /// Pretty JSON with a trailing newline; deterministic for equal values.
    pub fn to_json(&self) -> String {
        let mut text = serde_json::to_string_pretty(&self.to_value()).expect("serializable");
        text.push('\n');
        text
    }
}

fn rule_payload(rule: &RandomChoiceRule) -> RulePayload {
    let u = rule.universe();
    let (mode, epsilon) = match rule.mode() {
        Mode::Exact => ("exact", None),
        Mode::Float { epsilon } => ("float", Some(epsilon)),
    };
    RulePayload {
        mode: mode.into(),
        epsilon,
        universe: u.labels().to_vec(),
        sets: rule
            .family()
            .sets()
            .iter()
            .enumerate()
            .map(|(i, set)| RuleEntry {
                set: u.set_labels(**set),
                probabilities: set
                    .iter()
                    .zip(rule.distribution(i))
                    .map(|(a, p)| (u.label(a).to_string(), Number::from_prob(p)))
                    .collect(),
            })
            .collect(),
    }
}

fn rule_from(payload: RulePayload) -> Result<RandomChoiceRule, CliError> {
    let universe = universe_from(&payload.universe)?;
    let mode = match (payload.mode.as_str(), payload.epsilon) {
        ("exact", None) => Mode::Exact,
        ("exact", Some(_)) => return Err(CliError::format("epsilon is only valid in float mode")),
        ("float", eps) => {
            let epsilon = eps.unwrap_or(DEFAULT_EPSILON);
            if !(epsilon >= 0.0 && epsilon.is_finite()) {
                return Err(CliError::format(format!("invalid epsilon {epsilon}")));
            }
            Mode::Float { epsilon }
        }
        (other, _) => return Err(CliError::format(format!("unknown mode {other:?}"))),
    };
    let entries = payload
        .sets
        .iter()
        .map(|entry| {
            let set = set_from(&universe, &entry.set)?;
            let probs = aligned(&universe, *set, &entry.probabilities)?
                .into_iter()
                .map(|n| n.to_prob(mode.is_exact()))
                .collect::<Result<Vec<Prob>, CliError>>()?;
            Ok((set, probs))
        })
        .collect::<Result<Vec<_>, CliError>>()?;
    Ok(RandomChoiceRule::from_entries(universe, mode, entries)?)
}

fn correspondence_entries(c: &ChoiceCorrespondence) -> Vec<CorrespondenceEntry> {
    let u = c.universe();
    c.family()
        .sets()
        .iter()
        .zip(c.values())
        .map(|(set, value)| CorrespondenceEntry {
            set: u.set_labels(**set),
            value: u.set_labels(**value),
        })
        .collect()
}

fn correspondence_payload(c: &ChoiceCorrespondence) -> CorrespondencePayload {
    CorrespondencePayload {
        universe: c.universe().labels().to_vec(),
        sets: correspondence_entries(c),
    }
}

fn correspondence_on(
    universe: &Universe,
    entries: &[CorrespondenceEntry],
) -> Result<ChoiceCorrespondence, CliError> {
    let mut pairs = entries
        .iter()
        .map(|e| Ok((set_from(universe, &e.set)?, set_from(universe, &e.value)?)))
        .collect::<Result<Vec<_>, CliError>>()?;
    pairs.sort_by_key(|a| a.0);
    let family = ChoiceFamily::from_sets(universe.len(), pairs.iter().map(|p| p.0))?;
    let values = pairs.into_iter().map(|p| p.1).collect();
    Ok(ChoiceCorrespondence::new(universe.clone(), family, values)?)
}

fn correspondence_from(payload: CorrespondencePayload) -> Result<ChoiceCorrespondence, CliError> {
    let universe = universe_from(&payload.universe)?;
    correspondence_on(&universe, &payload.sets)
}

fn weights_payload(w: &LuceWeights) -> WeightsPayload {
    let u = w.universe();
    let (v, alpha) = match w.values() {
        WeightValues::Exact(v) => (Some(per_label(u, v.iter().map(format_rational))), None),
        WeightValues::Log(a) => (None, Some(per_label(u, a.iter().copied()))),
    };
    WeightsPayload {
        universe: u.labels().to_vec(),
        v,
        alpha,
    }
}

fn weights_from(payload: WeightsPayload) -> Result<LuceWeights, CliError> {
    let universe = universe_from(&payload.universe)?;
    match (payload.v, payload.alpha) {
        (Some(v), None) => {
            let values = total(&universe, &v)?
                .into_iter()
                .map(|s| parse_rational(s))
                .collect::<Result<Vec<_>, _>>()?;
            Ok(LuceWeights::exact(universe, values)?)
        }
        (None, Some(alpha)) => {
            let values = total(&universe, &alpha)?.into_iter().copied().collect();
            Ok(LuceWeights::from_alpha(universe, values)?)
        }
        _ => Err(CliError::format(
            "weights need exactly one of \"v\" or \"alpha\"",
        )),
    }
}

fn utility_from(payload: UtilityPayload) -> Result<UtilitySpec, CliError> {
    let universe = universe_from(&payload.universe)?;
    let values = total(&universe, &payload.u)?.into_iter().copied().collect();
    Ok(UtilitySpec::new(universe, values)?)
}

fn dataset_payload(d: &ChoiceDataset) -> DatasetPayload {
    let u = d.universe();
    DatasetPayload {
        universe: u.labels().to_vec(),
        observations: d
            .family()
            .sets()
            .iter()
            .zip(d.counts())
            .map(|(set, counts)| Observation {
                set: u.set_labels(**set),
                counts: set
                    .iter()
                    .zip(counts)
                    .map(|(a, &c)| (u.label(a).to_string(), c))
                    .collect(),
            })
            .collect(),
    }
}

fn dataset_from(payload: DatasetPayload) -> Result<ChoiceDataset, CliError> {
    let universe = universe_from(&payload.universe)?;
    let entries = payload
        .observations
        .iter()
        .map(|obs| {
            let set = set_from(&universe, &obs.set)?;
            // Members without an entry were never chosen.
            let zero = 0u64;
            let mut counts = Vec::with_capacity(set.len());
            for key in obs.counts.keys() {
                if !set.contains(universe.index_of(key)?) {
                    return Err(CliError::format(format!("{key:?} is not in {:?}", obs.set)));
                }
            }
            for a in set.iter() {
                counts.push(*obs.counts.get(universe.label(a)).unwrap_or(&zero));
            }
            Ok((set, counts))
        })
        .collect::<Result<Vec<_>, CliError>>()?;
    Ok(ChoiceDataset::new(universe, entries)?)
}

fn decomposition_payload(d: &LuceDecomposition) -> DecompositionPayload {
    let u = d.gamma.universe();
    DecompositionPayload {
        universe: u.labels().to_vec(),
        gamma: correspondence_entries(&d.gamma),
        classes: d
            .classes
            .iter()
            .map(|c| ClassEntry {
                members: u.set_labels(c.members),
                representative: u.label(c.representative).to_string(),
            })
            .collect(),
        v: per_label(u, d.v.iter().map(Number::from_prob)),
        alpha: per_label(u, d.alpha.iter().copied()),
        reconstruction_verified: true,
    }
}

fn decomposition_from(payload: DecompositionPayload) -> Result<LuceDecomposition, CliError> {
    let universe = universe_from(&payload.universe)?;
    if !payload.reconstruction_verified {
        return Err(CliError::format("decomposition is not marked as verified"));
    }
    let gamma = correspondence_on(&universe, &payload.gamma)?;
    let classes = payload
        .classes
        .iter()
        .map(|c| {
            let members = *set_from(&universe, &c.members)?;
            let representative = universe.index_of(&c.representative)?;
            if !members.contains(representative) {
                return Err(CliError::format("representative outside its class"));
            }
            Ok(IndifferenceClass {
                members,
                representative,
            })
        })
        .collect::<Result<Vec<_>, CliError>>()?;
    let class_sets: Vec<AltSet> = classes.iter().map(|c| c.members).collect();
    let order = WeakOrder::from_classes(universe.clone(), &class_sets)?;
    let exact = matches!(payload.v.values().next(), Some(Number::Text(_)));
    let v = total(&universe, &payload.v)?
        .into_iter()
        .map(|n| n.to_prob(exact))
        .collect::<Result<Vec<_>, _>>()?;
    let alpha = total(&universe, &payload.alpha)?
        .into_iter()
        .copied()
        .collect();
    Ok(LuceDecomposition {
        gamma,
        order,
        classes,
        v,
        alpha,
    })
}

fn quantity_json(q: &Quantity, universe: &Universe) -> Value {
    match q {
        Quantity::Prob(p) => serde_json::to_value(Number::from_prob(p)).expect("number"),
        Quantity::Ratio(r) => Value::String(r.to_string()),
        Quantity::Set(s) => Value::from(universe.set_labels(*s)),
    }
}

/// A witness as report JSON.
pub fn witness_json(w: &Witness, universe: &Universe) -> Value {
    let mut obj = serde_json::Map::new();
    obj.insert("axiom".into(), Value::from(w.axiom.name()));
    obj.insert("outer".into(), Value::from(universe.set_labels(w.outer)));
    if let Some(b) = w.inner {
        obj.insert("inner".into(), Value::from(universe.set_labels(b)));
    }
    if let Some(e) = w.event {
        obj.insert("event".into(), Value::from(universe.set_labels(e)));
    }
    obj.insert(
        "alternatives".into(),
        Value::from(
            w.alternatives
                .iter()
                .map(|&a| universe.label(a).to_string())
                .collect::<Vec<_>>(),
        ),
    );
    obj.insert("lhs".into(), quantity_json(&w.lhs, universe));
    obj.insert("rhs".into(), quantity_json(&w.rhs, universe));
    obj.insert("description".into(), Value::from(w.describe(universe)));
    Value::Object(obj)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rule_json() -> &'static str {
        r#"{"kind":"rule","version":1,"payload":{"mode":"exact","universe":["a","b"],
            "sets":[{"set":["a","b"],"probabilities":{"a":"2/3","b":"1/3"}},
                    {"set":["a"],"probabilities":{"a":"1"}}]}}"#
    }

    #[test]
    fn parses_and_round_trips_a_rule() {
        let doc = Document::parse(rule_json()).unwrap();
        let Document::Rule(rule) = &doc else { panic!() };
        assert_eq!(
            rule.prob(0, AltSet::pair(0, 1)).unwrap(),
            &Prob::ratio(2, 3)
        );
        assert_eq!(Document::parse(&doc.to_json()).unwrap(), doc);
    }

    #[test]
    fn rejects_unknown_versions_and_kinds() {
        let bumped = rule_json().replace("\"version\":1", "\"version\":2");
        assert!(Document::parse(&bumped)
            .unwrap_err()
            .to_string()
            .contains("version"));
        let odd = rule_json().replace("\"kind\":\"rule\"", "\"kind\":\"ruleset\"");
        assert!(Document::parse(&odd).is_err());
        let truncated = &rule_json()[..40];
        assert!(Document::parse(truncated).is_err());
    }

    #[test]
    fn exactness_of_numbers_is_enforced() {
        let float_in_exact = rule_json().replace("\"2/3\"", "0.5");
        assert!(Document::parse(&float_in_exact).is_err());
        let missing = rule_json().replace(",\"b\":\"1/3\"", "");
        assert!(Document::parse(&missing).is_err());
    }

    #[test]
    fn floats_round_trip_bit_for_bit() {
        let u = Universe::alphabetic(3).unwrap();
        let alpha = vec![0.1 + 0.2, -1.0 / 3.0, 1e-300];
        let doc = Document::Weights(LuceWeights::from_alpha(u, alpha.clone()).unwrap());
        let Document::Weights(back) = Document::parse(&doc.to_json()).unwrap() else {
            panic!()
        };
        let bits: Vec<u64> = back.alpha().iter().map(|x| x.to_bits()).collect();
        assert_eq!(bits, alpha.iter().map(|x| x.to_bits()).collect::<Vec<_>>());
    }

    #[test]
    fn dataset_missing_counts_are_zero() {
        let text = r#"{"kind":"dataset","version":1,"payload":{"universe":["a","b"],
            "observations":[{"set":["a","b"],"counts":{"a":3}}]}}"#;
        let Document::Dataset(d) = Document::parse(text).unwrap() else {
            panic!()
        };
        assert_eq!(d.counts(), &[vec![3, 0]]);
    }
}
