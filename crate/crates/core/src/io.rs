//! TOML instance files. The schema is described in `docs/instance_schema.md`.

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::adversary::AdversaryInstance;
use crate::error::{Error, Result};
use crate::model::{Builtin, InputString, PartialFunction, PromiseKind, PromiseSet, Symbol, TypeVector, Valuation};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum PromiseSpec {
    SingleType {
        #[serde(rename = "type")]
        multiplicities: Vec<u32>,
    },
    SymmetricUnion {
        types: Vec<Vec<u32>>,
    },
    /// Every string in `[M]^n`.
    Total,
    Explicit {
        inputs: Vec<Vec<Symbol>>,
    },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TableEntry {
    pub input: Vec<Symbol>,
    pub value: u8,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum ValuesSpec {
    Table {
        entries: Vec<TableEntry>,
    },
    Builtin {
        name: String,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        cut: Option<usize>,
    },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct InstanceFile {
    pub n: usize,
    pub m: usize,
    pub promise: PromiseSpec,
    pub values: ValuesSpec,
}

fn builtin_from(name: &str, cut: Option<usize>) -> Result<Builtin> {
    Ok(match name {
        "perm-inversion" => Builtin::PermInversion,
        "or" => Builtin::Or,
        "zero-only" => Builtin::ZeroOnly,
        "threshold" => Builtin::Threshold {
            cut: cut.ok_or_else(|| Error::Parse("threshold needs `cut`".into()))?,
        },
        other => return Err(Error::Parse(format!("unknown builtin `{other}`"))),
    })
}

fn builtin_name(b: &Builtin) -> (&'static str, Option<usize>) {
    match b {
        Builtin::PermInversion => ("perm-inversion", None),
        Builtin::Or => ("or", None),
        Builtin::ZeroOnly => ("zero-only", None),
        Builtin::Threshold { cut } => ("threshold", Some(*cut)),
    }
}

impl InstanceFile {
    pub fn parse(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    pub fn promise(&self) -> Result<PromiseSet> {
        let (n, m) = (self.n, self.m);
        let fit = |v: &Vec<u32>| -> Result<TypeVector> {
            let t = TypeVector(v.clone());
            if t.alphabet_size() != m || t.total() != n {
                return Err(Error::DimensionMismatch(format!("type {t} does not fit n={n}, M={m}")));
            }
            Ok(t)
        };
        match &self.promise {
            PromiseSpec::SingleType { multiplicities } => PromiseSet::single_type(fit(multiplicities)?),
            PromiseSpec::SymmetricUnion { types } => {
                let ts = types.iter().map(fit).collect::<Result<BTreeSet<_>>>()?;
                PromiseSet::symmetric_union(n, m, ts)
            }
            PromiseSpec::Total => PromiseSet::total(n, m),
            PromiseSpec::Explicit { inputs } => {
                PromiseSet::explicit(n, m, inputs.iter().map(|x| InputString(x.clone())))
            }
        }
    }

    pub fn to_function(&self) -> Result<PartialFunction> {
        let promise = self.promise()?;
        match &self.values {
            ValuesSpec::Builtin { name, cut } => PartialFunction::builtin(promise, builtin_from(name, *cut)?),
            ValuesSpec::Table { entries } => {
                let mut table = BTreeMap::new();
                for e in entries {
                    let v = match e.value {
                        0 => false,
                        1 => true,
                        other => return Err(Error::Parse(format!("value {other} is not a bit"))),
                    };
                    if table.insert(InputString(e.input.clone()), v).is_some() {
                        return Err(Error::Parse(format!("input {:?} listed twice", e.input)));
                    }
                }
                PartialFunction::from_table(promise, table)
            }
        }
    }

    pub fn from_function(f: &PartialFunction) -> Self {
        let promise = match f.promise().kind() {
            PromiseKind::SingleType(t) => PromiseSpec::SingleType { multiplicities: t.0.clone() },
            PromiseKind::SymmetricUnion(ts) => {
                PromiseSpec::SymmetricUnion { types: ts.iter().map(|t| t.0.clone()).collect() }
            }
            PromiseKind::Explicit { inputs, .. } => {
                PromiseSpec::Explicit { inputs: inputs.iter().map(|x| x.0.clone()).collect() }
            }
        };
        let values = match f.valuation() {
            Valuation::Builtin(b) => {
                let (name, cut) = builtin_name(b);
                ValuesSpec::Builtin { name: name.into(), cut }
            }
            Valuation::Table(t) => ValuesSpec::Table {
                entries: t.iter().map(|(x, &v)| TableEntry { input: x.0.clone(), value: u8::from(v) }).collect(),
            },
        };
        InstanceFile { n: f.n(), m: f.m(), promise, values }
    }
}

pub fn load_function(path: &Path) -> Result<PartialFunction> {
    InstanceFile::load(path)?.to_function()
}

pub fn load_adversary(path: &Path) -> Result<AdversaryInstance> {
    toml::from_str(&std::fs::read_to_string(path)?).map_err(|e| Error::Parse(e.to_string()))
}

pub fn adversary_to_toml(instance: &AdversaryInstance) -> Result<String> {
    toml::to_string(instance).map_err(|e| Error::Parse(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;

    const PERM: &str = r#"
n = 4
m = 4

[promise]
kind = "single-type"
type = [1, 1, 1, 1]

[values]
kind = "builtin"
name = "perm-inversion"
"#;

    const TABLE: &str = r#"
n = 2
m = 2

[promise]
kind = "explicit"
inputs = [[0, 0], [1, 1]]

[values]
kind = "table"
entries = [{ input = [0, 0], value = 0 }, { input = [1, 1], value = 1 }]
"#;

    #[test]
    fn parses_and_round_trips() {
        for text in [PERM, TABLE] {
            let a = InstanceFile::parse(text).unwrap();
            let b = InstanceFile::parse(&a.to_toml().unwrap()).unwrap();
            assert_eq!(a, b);
            let f = a.to_function().unwrap();
            assert_eq!(InstanceFile::from_function(&f), a);
        }
        let f = InstanceFile::parse(PERM).unwrap().to_function().unwrap();
        assert_eq!(f.eval(&InputString(vec![0, 1, 2, 3])), Some(false));
    }

    #[test]
    fn rejects_bad_files() {
        assert!(InstanceFile::parse("n = 2").is_err());
        let bad = TABLE.replace("value = 1", "value = 2");
        assert!(InstanceFile::parse(&bad).unwrap().to_function().is_err());
        let short = TABLE.replace(", { input = [1, 1], value = 1 }", "");
        assert!(InstanceFile::parse(&short).unwrap().to_function().is_err());
        let wrong = PERM.replace("[1, 1, 1, 1]", "[2, 1, 1]");
        assert!(InstanceFile::parse(&wrong).unwrap().to_function().is_err());
    }

    #[test]
    fn adversary_round_trip() {
        let inst = AdversaryInstance::complete(vec![InputString(vec![0, 1])], vec![InputString(vec![1, 0])]);
        let text = adversary_to_toml(&inst).unwrap();
        let back: AdversaryInstance = toml::from_str(&text).unwrap();
        assert_eq!(back, inst);
    }
}
