use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::exact::{format_rational, parse_rational, Q};
use crate::measure::{read_measure, write_measure, ProblemInstance, VeroneseMeasure};

#[derive(Debug, Default, Serialize, Deserialize)]
struct Index {
    entries: BTreeMap<String, Entry>,
}

#[derive(Debug, Serialize, Deserialize)]
struct Entry {
    file: String,
    s: String,
}

/// Best-known measure per instance, stored as measure files plus `index.json`.
#[derive(Debug, Clone)]
pub struct ResultsCache {
    dir: PathBuf,
}

impl ResultsCache {
    pub fn open(dir: &Path) -> Result<Self> {
        std::fs::create_dir_all(dir)?;
        Ok(Self { dir: dir.to_path_buf() })
    }

    fn index_path(&self) -> PathBuf {
        self.dir.join("index.json")
    }

    fn load_index(&self) -> Result<Index> {
        match std::fs::read_to_string(self.index_path()) {
            Ok(text) => Ok(serde_json::from_str(&text)?),
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => Ok(Index::default()),
            Err(e) => Err(e.into()),
        }
    }

    pub fn lookup(&self, instance: &ProblemInstance) -> Result<Option<(VeroneseMeasure, Q)>> {
        let index = self.load_index()?;
        let Some(entry) = index.entries.get(&instance.key()) else {
            return Ok(None);
        };
        let mu = read_measure(&self.dir.join(&entry.file))?;
        Ok(Some((mu, parse_rational(&entry.s)?)))
    }

    /// Stores the measure when it beats the cached one. Returns whether it did.
    pub fn store(&self, mu: &VeroneseMeasure, s: &Q) -> Result<bool> {
        let mut index = self.load_index()?;
        let key = mu.instance().key();
        if let Some(entry) = index.entries.get(&key) {
            if parse_rational(&entry.s)? <= *s {
                return Ok(false);
            }
        }
        let file = format!("best_{}.json", key.replace(',', "-"));
        write_measure(&self.dir.join(&file), mu)?;
        index.entries.insert(
            key,
            Entry {
                file,
                s: format_rational(s),
            },
        );
        std::fs::write(self.index_path(), serde_json::to_string_pretty(&index)? + "\n")?;
        Ok(true)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{q, qi};

    #[test]
    fn stores_only_improvements() {
        let dir = tempfile::tempdir().unwrap();
        let cache = ResultsCache::open(dir.path()).unwrap();
        let inst = ProblemInstance::new(vec![2, 1]).unwrap();
        assert!(cache.lookup(&inst).unwrap().is_none());
        let worse = VeroneseMeasure::from_pairs(&[2, 1], &[(&[1, 1], qi(1))]).unwrap();
        let better = VeroneseMeasure::from_pairs(&[2, 1], &[(&[1, 1], q(2, 3)), (&[0, 2], q(1, 3))]).unwrap();
        assert!(cache.store(&worse, &qi(3)).unwrap());
        assert!(cache.store(&better, &q(3, 2)).unwrap());
        assert!(!cache.store(&worse, &qi(3)).unwrap());
        let (mu, s) = cache.lookup(&inst).unwrap().unwrap();
        assert_eq!(mu, better);
        assert_eq!(s, q(3, 2));
    }
}
