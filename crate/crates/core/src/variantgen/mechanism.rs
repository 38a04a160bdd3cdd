use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Category {
    /// Syntactic structure choices: reorderings only.
    #[serde(rename = "SSC")]
    Ssc,
    /// Modelling redundancy choices: inert additions.
    #[serde(rename = "MRC")]
    Mrc,
    /// Task design choices: solvability-affecting edits.
    #[serde(rename = "TDC")]
    Tdc,
}

impl Category {
    pub const ALL: [Category; 3] = [Category::Ssc, Category::Mrc, Category::Tdc];

    pub fn as_str(self) -> &'static str {
        match self {
            Category::Ssc => "SSC",
            Category::Mrc => "MRC",
            Category::Tdc => "TDC",
        }
    }
}

impl fmt::Display for Category {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

macro_rules! mechanisms {
    ($( $variant:ident => ($cat:ident, $code:literal, $desc:literal) ),+ $(,)?) => {
        /// One configuration mechanism. Declaration order is catalogue order.
        #[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
        pub enum MechanismId {
            $( $variant, )+
        }

        impl MechanismId {
            pub const ALL: &'static [MechanismId] = &[ $( MechanismId::$variant, )+ ];

            pub fn category(self) -> Category {
                match self {
                    $( MechanismId::$variant => Category::$cat, )+
                }
            }

            /// Code without the category prefix, e.g. `PDU1`.
            pub fn code(self) -> &'static str {
                match self {
                    $( MechanismId::$variant => $code, )+
                }
            }

            pub fn description(self) -> &'static str {
                match self {
                    $( MechanismId::$variant => $desc, )+
                }
            }
        }
    };
}

mechanisms! {
    SscPdu1 => (Ssc, "PDU1", "predicate declarations by occurrence count in action bodies, descending"),
    SscPdu2 => (Ssc, "PDU2", "predicate declarations by occurrence count in action bodies, ascending"),
    SscPda1 => (Ssc, "PDA1", "predicate declarations by name, A-Z"),
    SscPda2 => (Ssc, "PDA2", "predicate declarations by name, Z-A"),
    SscOef1 => (Ssc, "OEF1", "actions by effect literal count, descending"),
    SscOef2 => (Ssc, "OEF2", "actions by effect literal count, ascending"),
    SscOne1 => (Ssc, "ONE1", "actions by negative effect count, descending"),
    SscOne2 => (Ssc, "ONE2", "actions by negative effect count, ascending"),
    SscOpr1 => (Ssc, "OPR1", "actions by precondition literal count, descending"),
    SscOpr2 => (Ssc, "OPR2", "actions by precondition literal count, ascending"),
    SscOpa1 => (Ssc, "OPA1", "actions by parameter count, descending"),
    SscOpa2 => (Ssc, "OPA2", "actions by parameter count, ascending"),
    SscOra1 => (Ssc, "ORA1", "actions by effects/preconditions ratio, descending"),
    SscOra2 => (Ssc, "ORA2", "actions by effects/preconditions ratio, ascending"),
    SscOan1 => (Ssc, "OAN1", "actions by name, A-Z"),
    SscOan2 => (Ssc, "OAN2", "actions by name, Z-A"),
    SscPra1 => (Ssc, "PRA1", "precondition literals within each action, A-Z"),
    SscPra2 => (Ssc, "PRA2", "precondition literals within each action, Z-A"),
    SscEfa1 => (Ssc, "EFA1", "effect literals within each action, A-Z"),
    SscEfa2 => (Ssc, "EFA2", "effect literals within each action, Z-A"),
    MrcRob => (Mrc, "ROB", "fresh unused objects appended to every problem (ratio of object count, rounded up)"),
    MrcRpd => (Mrc, "RPD", "fresh zero-arity predicates declared but never used (ratio of predicate count, rounded up)"),
    MrcRpa => (Mrc, "RPA", "every predicate gains a trailing dummy argument bound to one shared dummy object"),
    MrcRop => (Mrc, "ROP", "copy of the first action made inapplicable by (q) and (not (q))"),
    MrcRoa => (Mrc, "ROA", "every action gains an unused trailing parameter"),
    MrcRpr => (Mrc, "RPR", "every precondition P becomes (or P (q)) with (q) never true"),
    MrcRef => (Mrc, "REF", "every action adds (q) or deletes (q), alternating by declaration index"),
    TdcDef => (Tdc, "DEF", "copy of the first goal-achieving action without its first goal effect"),
    TdcRpd => (Tdc, "RPD", "first action sets (dead); every other action requires (not (dead))"),
    TdcApd => (Tdc, "APD", "two goal-effect-free copies of the first goal-achieving action toggling two marker predicates"),
    TdcCop => (Tdc, "COP", "sequential composition of two adjacent actions with goal-predicate add effects removed"),
}

impl MechanismId {
    /// External identifier, e.g. `SSC-PDU1` or `TDC-RPD`.
    pub fn id(self) -> String {
        format!("{}-{}", self.category(), self.code())
    }

    pub fn in_category(category: Category) -> impl Iterator<Item = MechanismId> {
        Self::ALL
            .iter()
            .copied()
            .filter(move |m| m.category() == category)
    }
}

impl fmt::Display for MechanismId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}-{}", self.category(), self.code())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unknown mechanism `{0}`")]
pub struct UnknownMechanism(pub String);

impl FromStr for MechanismId {
    type Err = UnknownMechanism;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let upper = s.trim().to_ascii_uppercase();
        MechanismId::ALL
            .iter()
            .copied()
            .find(|m| m.id() == upper)
            .ok_or_else(|| UnknownMechanism(s.to_string()))
    }
}

impl Serialize for MechanismId {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.id())
    }
}

impl<'de> Deserialize<'de> for MechanismId {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn category_counts() {
        let count = |c| MechanismId::in_category(c).count();
        assert_eq!(count(Category::Ssc), 20);
        assert_eq!(count(Category::Mrc), 7);
        assert_eq!(count(Category::Tdc), 4);
        assert_eq!(MechanismId::ALL.len(), 31);
    }

    #[test]
    fn ids_are_unique_and_parse_back() {
        let ids: std::collections::HashSet<String> =
            MechanismId::ALL.iter().map(|m| m.id()).collect();
        assert_eq!(ids.len(), 31);
        for m in MechanismId::ALL {
            assert_eq!(m.id().parse::<MechanismId>().unwrap(), *m);
        }
        assert_eq!(
            "TDC-RPD".parse::<MechanismId>().unwrap(),
            MechanismId::TdcRpd
        );
        assert_eq!(
            "mrc-rpd".parse::<MechanismId>().unwrap(),
            MechanismId::MrcRpd
        );
        assert!("SSC-XYZ1".parse::<MechanismId>().is_err());
    }

    #[test]
    fn catalogue_order_follows_categories() {
        let cats: Vec<Category> = MechanismId::ALL.iter().map(|m| m.category()).collect();
        let mut sorted = cats.clone();
        sorted.sort();
        assert_eq!(cats, sorted);
        assert_eq!(MechanismId::ALL[0].id(), "SSC-PDU1");
        assert_eq!(MechanismId::ALL[1].id(), "SSC-PDU2");
        assert_eq!(MechanismId::ALL[30].id(), "TDC-COP");
    }
}
