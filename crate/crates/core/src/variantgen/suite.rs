use super::config::{ConfigError, GeneratorConfig, Namer};
use super::error::MechanismError;
use super::mechanism::MechanismId;
use super::ssc::{
    reorder_action_body, reorder_actions, reorder_predicates, ActionKey, BodyPart, Direction,
    PredicateKey,
};
use super::{mrc, tdc};
use crate::par::{self, Execution};
use crate::pddl::{Domain, Problem};

/// A domain with its problem files.
#[derive(Debug, Clone, PartialEq)]
pub struct Variant {
    pub domain: Domain,
    pub problems: Vec<Problem>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SuiteEntry {
    pub mechanism: MechanismId,
    /// `Err` marks an explicit skip with its reason.
    pub result: Result<Variant, MechanismError>,
    /// Applied, but structurally unable to show its intended effect.
    pub degenerate: bool,
}

impl SuiteEntry {
    pub fn is_skipped(&self) -> bool {
        self.result.is_err()
    }
}

/// The original task plus one entry per mechanism, in catalogue order.
#[derive(Debug, Clone, PartialEq)]
pub struct VariantSuite {
    pub original: Variant,
    /// Instance id per problem, parallel to `original.problems`.
    pub instances: Vec<String>,
    /// The resolved prefix every introduced identifier starts with.
    pub dummy_prefix: String,
    pub redundancy_ratio: f64,
    pub entries: Vec<SuiteEntry>,
}

impl VariantSuite {
    /// Original plus mechanism entries.
    pub fn len(&self) -> usize {
        1 + self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn skipped(&self) -> impl Iterator<Item = &SuiteEntry> {
        self.entries.iter().filter(|e| e.is_skipped())
    }

    pub fn entry(&self, m: MechanismId) -> Option<&SuiteEntry> {
        self.entries.iter().find(|e| e.mechanism == m)
    }

    /// The variant for `m`, panicking on skipped entries. Test convenience.
    pub fn variant(&self, m: MechanismId) -> &Variant {
        match self.entry(m).map(|e| &e.result) {
            Some(Ok(v)) => v,
            Some(Err(e)) => panic!("{m} skipped: {e}"),
            None => panic!("{m} missing from suite"),
        }
    }

    /// Replaces the instance ids (e.g. with problem file stems).
    pub fn with_instance_ids(mut self, ids: Vec<String>) -> Self {
        assert_eq!(ids.len(), self.original.problems.len());
        self.instances = ids;
        self
    }
}

/// Whether a mechanism's problem files differ from (or are rewritten
/// alongside) the originals.
pub fn writes_problems(m: MechanismId) -> bool {
    matches!(
        m,
        MechanismId::MrcRob | MechanismId::MrcRpa | MechanismId::TdcRpd
    )
}

fn domain_only(d: Domain, problems: &[Problem]) -> (Variant, bool) {
    (
        Variant {
            domain: d,
            problems: problems.to_vec(),
        },
        false,
    )
}

/// Applies one mechanism to the original task.
pub fn apply_mechanism(
    m: MechanismId,
    d: &Domain,
    problems: &[Problem],
    cfg: &GeneratorConfig,
) -> Result<(Variant, bool), MechanismError> {
    use Direction::{Ascending as Asc, Descending as Desc};
    use MechanismId::*;

    let preds = |k, dir| Ok(domain_only(reorder_predicates(d, k, dir), problems));
    let acts = |k, dir| reorder_actions(d, k, dir).map(|v| domain_only(v, problems));
    let body = |part, dir| Ok(domain_only(reorder_action_body(d, part, dir), problems));

    match m {
        SscPdu1 => preds(PredicateKey::UsageFrequency, Desc),
        SscPdu2 => preds(PredicateKey::UsageFrequency, Asc),
        SscPda1 => preds(PredicateKey::Alphabetical, Asc),
        SscPda2 => preds(PredicateKey::Alphabetical, Desc),
        SscOef1 => acts(ActionKey::EffectCount, Desc),
        SscOef2 => acts(ActionKey::EffectCount, Asc),
        SscOne1 => acts(ActionKey::NegativeEffectCount, Desc),
        SscOne2 => acts(ActionKey::NegativeEffectCount, Asc),
        SscOpr1 => acts(ActionKey::PreconditionCount, Desc),
        SscOpr2 => acts(ActionKey::PreconditionCount, Asc),
        SscOpa1 => acts(ActionKey::ParameterCount, Desc),
        SscOpa2 => acts(ActionKey::ParameterCount, Asc),
        SscOra1 => acts(ActionKey::EffectPreconditionRatio, Desc),
        SscOra2 => acts(ActionKey::EffectPreconditionRatio, Asc),
        SscOan1 => acts(ActionKey::Name, Asc),
        SscOan2 => acts(ActionKey::Name, Desc),
        SscPra1 => body(BodyPart::Preconditions, Asc),
        SscPra2 => body(BodyPart::Preconditions, Desc),
        SscEfa1 => body(BodyPart::Effects, Asc),
        SscEfa2 => body(BodyPart::Effects, Desc),
        MrcRob => Ok((
            Variant {
                domain: d.clone(),
                problems: problems
                    .iter()
                    .map(|p| mrc::add_dummy_objects(p, cfg))
                    .collect(),
            },
            false,
        )),
        MrcRpd => Ok(domain_only(mrc::add_dummy_predicates(d, cfg), problems)),
        MrcRpa => {
            let (domain, problems) = mrc::inflate_predicate_arity(d, problems, cfg);
            Ok((Variant { domain, problems }, false))
        }
        MrcRop => mrc::add_inapplicable_duplicate(d, cfg).map(|v| domain_only(v, problems)),
        MrcRoa => Ok(domain_only(
            mrc::add_dummy_action_parameters(d, cfg),
            problems,
        )),
        MrcRpr => Ok(domain_only(
            mrc::add_disjunctive_dummy_precondition(d, cfg),
            problems,
        )),
        MrcRef => Ok(domain_only(mrc::add_dummy_effect(d, cfg), problems)),
        TdcDef => tdc::make_def_variant(d, problems, cfg).map(|v| domain_only(v, problems)),
        TdcRpd => tdc::make_rpd_deadend_variant(d, problems, cfg).map(|v| {
            (
                Variant {
                    domain: v.domain,
                    problems: v.problems,
                },
                v.degenerate,
            )
        }),
        TdcApd => tdc::make_apd_variant(d, problems, cfg).map(|v| domain_only(v, problems)),
        TdcCop => tdc::make_cop_variant(d, problems, cfg).map(|v| domain_only(v, problems)),
    }
}

fn instance_ids(problems: &[Problem]) -> Vec<String> {
    let mut ids: Vec<String> = Vec::with_capacity(problems.len());
    for p in problems {
        let mut id = p.name.clone();
        let mut n = 2;
        while ids.contains(&id) {
            id = format!("{}-{n}", p.name);
            n += 1;
        }
        ids.push(id);
    }
    ids
}

/// Applies every mechanism independently to the original task.
///
/// Inapplicable mechanisms appear as skipped entries; nothing is omitted.
pub fn generate_suite(
    d: &Domain,
    problems: &[Problem],
    cfg: &GeneratorConfig,
    exec: Execution,
) -> Result<VariantSuite, ConfigError> {
    cfg.validate()?;
    let namer = Namer::for_inputs(
        &cfg.dummy_prefix,
        d,
        problems.iter().chain(cfg.reference_problem.as_ref()),
    );
    let resolved = GeneratorConfig {
        dummy_prefix: namer.prefix().to_string(),
        ..cfg.clone()
    };

    let entries = par::map(MechanismId::ALL, exec, |&m| {
        match apply_mechanism(m, d, problems, &resolved) {
            Ok((variant, degenerate)) => SuiteEntry {
                mechanism: m,
                result: Ok(variant),
                degenerate,
            },
            Err(e) => SuiteEntry {
                mechanism: m,
                result: Err(e),
                degenerate: false,
            },
        }
    });

    Ok(VariantSuite {
        original: Variant {
            domain: d.clone(),
            problems: problems.to_vec(),
        },
        instances: instance_ids(problems),
        dummy_prefix: resolved.dummy_prefix,
        redundancy_ratio: resolved.redundancy_ratio,
        entries,
    })
}
