//! On-disk JSON formats for capacities and functions.

use std::fmt;
use std::fs;
use std::path::Path;

use capkit_core::rational::format_rational;
use capkit_core::{parse_rational, Capacity, Error, GroundSet, MeasurableFunction, Rational, Subset};
use serde::de::{MapAccess, Visitor};
use serde::ser::SerializeMap;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// A capacity table, either keyed by subset or dense in binary-counting order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CapacityFile {
    pub ground_set: Vec<String>,
    pub values: Values,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Values {
    Map(KeyedValues),
    Dense(Vec<String>),
}

/// Subset key → rational string, kept in file order so duplicates are visible.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct KeyedValues(pub Vec<(String, String)>);

impl Serialize for KeyedValues {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut map = serializer.serialize_map(Some(self.0.len()))?;
        for (k, v) in &self.0 {
            map.serialize_entry(k, v)?;
        }
        map.end()
    }
}

impl<'de> Deserialize<'de> for KeyedValues {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        struct Entries;
        impl<'de> Visitor<'de> for Entries {
            type Value = KeyedValues;
            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("a map from subset keys to rational strings")
            }
            fn visit_map<A: MapAccess<'de>>(self, mut access: A) -> Result<KeyedValues, A::Error> {
                let mut entries = Vec::new();
                while let Some(entry) = access.next_entry::<String, String>()? {
                    entries.push(entry);
                }
                Ok(KeyedValues(entries))
            }
        }
        deserializer.deserialize_map(Entries)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Layout {
    #[default]
    Map,
    Dense,
}

impl CapacityFile {
    pub fn from_capacity(c: &Capacity, layout: Layout) -> Self {
        let g = c.ground();
        let values = match layout {
            Layout::Map => {
                Values::Map(KeyedValues(g.subsets().map(|a| (g.subset_key(a), format_rational(&c[a]))).collect()))
            }
            Layout::Dense => Values::Dense(c.values().iter().map(format_rational).collect()),
        };
        CapacityFile { ground_set: g.atom_names().to_vec(), values }
    }

    /// The ground set and the raw table, before any capacity axiom is checked.
    pub fn table(&self) -> Result<(GroundSet, Vec<Rational>), Error> {
        let ground = GroundSet::new(self.ground_set.iter().cloned())?;
        let size = ground.subset_count();
        let values = match &self.values {
            Values::Dense(v) => {
                if v.len() != size {
                    return Err(Error::InvalidInput(format!(
                        "dense table has {} entries, {} atoms need {size}",
                        v.len(),
                        ground.len()
                    )));
                }
                v.iter().map(|s| parse_rational(s)).collect::<Result<Vec<_>, _>>()?
            }
            Values::Map(KeyedValues(entries)) => {
                let mut slots: Vec<Option<Rational>> = vec![None; size];
                for (key, text) in entries {
                    let a = ground.parse_subset(key)?;
                    if slots[a.index()].is_some() {
                        return Err(Error::InvalidInput(format!(
                            "subset {} appears twice (key {key:?})",
                            ground.display_subset(a)
                        )));
                    }
                    slots[a.index()] = Some(parse_rational(text)?);
                }
                if let Some(missing) = slots.iter().position(Option::is_none) {
                    return Err(Error::InvalidInput(format!(
                        "no value for subset {}; the map must list all {size} subsets",
                        ground.display_subset(Subset(missing as u32))
                    )));
                }
                slots.into_iter().map(Option::unwrap).collect()
            }
        };
        Ok((ground, values))
    }

    pub fn to_capacity(&self) -> Result<Capacity, Error> {
        let (ground, values) = self.table()?;
        Ok(Capacity::new(ground, values)?)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FunctionFile {
    pub ground_set: Vec<String>,
    pub values: Vec<String>,
}

impl FunctionFile {
    pub fn from_function(x: &MeasurableFunction) -> Self {
        FunctionFile {
            ground_set: x.ground().atom_names().to_vec(),
            values: x.values().iter().map(format_rational).collect(),
        }
    }

    pub fn to_function(&self, ground: &GroundSet) -> Result<MeasurableFunction, Error> {
        if self.ground_set != ground.atom_names() {
            return Err(Error::InvalidInput(format!(
                "function ground set {:?} does not match capacity ground set {:?}",
                self.ground_set,
                ground.atom_names()
            )));
        }
        let values = self.values.iter().map(|s| parse_rational(s)).collect::<Result<Vec<_>, _>>()?;
        MeasurableFunction::new(ground.clone(), values)
    }
}

/// Raw bytes plus the parsed document, so callers can hash what they read.
pub struct Loaded<T> {
    pub bytes: Vec<u8>,
    pub doc: T,
}

pub fn load<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<Loaded<T>, Error> {
    let bytes = fs::read(path).map_err(|e| Error::InvalidInput(format!("cannot read {}: {e}", path.display())))?;
    let doc = serde_json::from_slice(&bytes).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
    Ok(Loaded { bytes, doc })
}

pub fn write_json<T: Serialize>(path: &Path, doc: &T) -> Result<(), Error> {
    let mut text = serde_json::to_string_pretty(doc).expect("file formats always serialize");
    text.push('\n');
    fs::write(path, text).map_err(|e| Error::InvalidInput(format!("cannot write {}: {e}", path.display())))
}
