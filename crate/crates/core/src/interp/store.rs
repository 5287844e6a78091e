use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

/// Contents of one named cell.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Value {
    Scalar(i64),
    Array(Vec<i64>),
}

impl Value {
    pub fn as_scalar(&self) -> Option<i64> {
        match self {
            Value::Scalar(v) => Some(*v),
            Value::Array(_) => None,
        }
    }

    pub fn as_array(&self) -> Option<&[i64]> {
        match self {
            Value::Scalar(_) => None,
            Value::Array(a) => Some(a),
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Scalar(v) => write!(f, "{v}"),
            Value::Array(a) => {
                f.write_str("[")?;
                for (i, v) in a.iter().enumerate() {
                    if i > 0 {
                        f.write_str(",")?;
                    }
                    write!(f, "{v}")?;
                }
                f.write_str("]")
            }
        }
    }
}

/// Named top-level cells handed to, and returned from, a run.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Store(BTreeMap<String, Value>);

impl Store {
    pub fn new() -> Self {
        Store::default()
    }

    pub fn with_scalar(mut self, name: &str, v: i64) -> Self {
        self.set(name, Value::Scalar(v));
        self
    }

    pub fn with_array(mut self, name: &str, v: Vec<i64>) -> Self {
        self.set(name, Value::Array(v));
        self
    }

    pub fn set(&mut self, name: &str, v: Value) {
        self.0.insert(name.to_string(), v);
    }

    pub fn get(&self, name: &str) -> Option<&Value> {
        self.0.get(name)
    }

    pub fn scalar(&self, name: &str) -> Option<i64> {
        self.get(name).and_then(Value::as_scalar)
    }

    pub fn array(&self, name: &str) -> Option<&[i64]> {
        self.get(name).and_then(Value::as_array)
    }

    pub fn contains(&self, name: &str) -> bool {
        self.0.contains_key(name)
    }

    pub fn remove(&mut self, name: &str) -> Option<Value> {
        self.0.remove(name)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &Value)> {
        self.0.iter().map(|(k, v)| (k.as_str(), v))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl FromIterator<(String, Value)> for Store {
    fn from_iter<T: IntoIterator<Item = (String, Value)>>(iter: T) -> Self {
        Store(iter.into_iter().collect())
    }
}

impl fmt::Display for Store {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (name, v) in &self.0 {
            writeln!(f, "{name} = {v}")?;
        }
        Ok(())
    }
}
