//! GMT feature-set files: one set per line, `name<TAB>description<TAB>member...`.

use std::collections::{BTreeMap, HashSet};
use std::fs::File;
use std::io::{BufRead, BufReader, Read};
use std::path::Path;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FeatureSet {
    pub name: String,
    pub description: String,
    /// Members in file order, duplicates removed.
    pub members: Vec<String>,
    pub duplicates_removed: usize,
}

/// Named feature sets in file order.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct FeatureSetCollection {
    sets: Vec<FeatureSet>,
    by_name: BTreeMap<String, usize>,
}

impl FeatureSetCollection {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, set: FeatureSet) -> Result<()> {
        if set.members.is_empty() {
            return Err(Error::Validation(format!(
                "feature set {:?} is empty",
                set.name
            )));
        }
        if self.by_name.contains_key(&set.name) {
            return Err(Error::Validation(format!(
                "duplicate feature set name {:?}",
                set.name
            )));
        }
        self.by_name.insert(set.name.clone(), self.sets.len());
        self.sets.push(set);
        Ok(())
    }

    pub fn get(&self, name: &str) -> Option<&FeatureSet> {
        self.by_name.get(name).map(|&i| &self.sets[i])
    }

    pub fn len(&self) -> usize {
        self.sets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sets.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &FeatureSet> {
        self.sets.iter()
    }

    /// Set names in lexicographic order.
    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.by_name.keys().map(String::as_str)
    }
}

pub fn parse_gmt_from(reader: impl Read, source_name: &str) -> Result<FeatureSetCollection> {
    let mut out = FeatureSetCollection::new();
    for (i, line) in BufReader::new(reader).lines().enumerate() {
        let line_no = i + 1;
        let line = line.map_err(|e| Error::Parse {
            source_name: source_name.into(),
            line: line_no,
            message: e.to_string(),
        })?;
        let line = line.trim_end_matches('\r');
        if line.trim().is_empty() {
            continue;
        }
        let mut fields = line.split('\t');
        let name = fields.next().unwrap_or_default().trim().to_string();
        let parse_err = |message: String| Error::Parse {
            source_name: source_name.into(),
            line: line_no,
            message,
        };
        if name.is_empty() {
            return Err(parse_err("missing set name".into()));
        }
        let description = fields.next().unwrap_or_default().to_string();
        let mut seen = HashSet::new();
        let mut members = Vec::new();
        let mut duplicates_removed = 0;
        for m in fields.map(str::trim).filter(|m| !m.is_empty()) {
            if seen.insert(m) {
                members.push(m.to_string());
            } else {
                duplicates_removed += 1;
            }
        }
        if members.is_empty() {
            return Err(parse_err(format!("feature set {name:?} has no members")));
        }
        if duplicates_removed > 0 {
            log::warn!("{source_name}, line {line_no}: removed {duplicates_removed} duplicate members from {name:?}");
        }
        out.push(FeatureSet {
            name,
            description,
            members,
            duplicates_removed,
        })
        .map_err(|e| parse_err(e.to_string()))?;
    }
    Ok(out)
}

pub fn parse_gmt(path: &Path) -> Result<FeatureSetCollection> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    parse_gmt_from(file, &path.display().to_string())
}
