//! Snapshot caching: every rendered page state seen during interaction is
//! stored once, keyed by content digest, alongside a manifest describing
//! how each state was reached.

use std::collections::HashMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SnapshotMeta {
    pub snapshot_id: String,
    pub source_url: Option<String>,
    pub parent_snapshot: Option<String>,
    pub action_taken: Option<String>,
}

enum Backing {
    Dir(PathBuf),
    Memory(HashMap<String, String>),
}

/// A set of cached page snapshots, deduplicated by content digest.
pub struct SnapshotStore {
    backing: Backing,
    entries: Vec<SnapshotMeta>,
    by_digest: HashMap<String, String>,
}

pub fn content_digest(html: &str) -> String {
    let mut hasher = Sha256::new();
    hasher.update(html.as_bytes());
    format!("{:x}", hasher.finalize())
}

pub fn atomic_write(path: &Path, bytes: &[u8]) -> Result<()> {
    let tmp = path.with_extension(format!(
        "{}.tmp-{}",
        path.extension().and_then(|e| e.to_str()).unwrap_or(""),
        std::process::id()
    ));
    std::fs::write(&tmp, bytes)?;
    std::fs::rename(&tmp, path)?;
    Ok(())
}

impl SnapshotStore {
    pub fn create(dir: &Path) -> Result<SnapshotStore> {
        std::fs::create_dir_all(dir)?;
        Ok(SnapshotStore {
            backing: Backing::Dir(dir.to_path_buf()),
            entries: Vec::new(),
            by_digest: HashMap::new(),
        })
    }

    /// Ephemeral store for pipelines that never need the files on disk.
    pub fn in_memory() -> SnapshotStore {
        SnapshotStore {
            backing: Backing::Memory(HashMap::new()),
            entries: Vec::new(),
            by_digest: HashMap::new(),
        }
    }

    pub fn open(dir: &Path) -> Result<SnapshotStore> {
        let manifest = dir.join("manifest.json");
        let raw = std::fs::read_to_string(&manifest)
            .map_err(|e| Error::Fixture(format!("{}: {e}", manifest.display())))?;
        let entries: Vec<SnapshotMeta> = serde_json::from_str(&raw)?;
        let mut store = SnapshotStore {
            backing: Backing::Dir(dir.to_path_buf()),
            entries,
            by_digest: HashMap::new(),
        };
        for meta in store.entries.clone() {
            let html = store.read_html(&meta.snapshot_id)?;
            store.by_digest.insert(content_digest(&html), meta.snapshot_id);
        }
        Ok(store)
    }

    /// Cache a page state. Returns the snapshot id and whether it was new;
    /// identical content is stored once.
    pub fn write(
        &mut self,
        html: &str,
        source_url: Option<String>,
        parent_snapshot: Option<String>,
        action_taken: Option<String>,
    ) -> Result<(String, bool)> {
        let digest = content_digest(html);
        if let Some(existing) = self.by_digest.get(&digest) {
            return Ok((existing.clone(), false));
        }
        let id = format!("snap-{:03}", self.entries.len());
        match &mut self.backing {
            Backing::Dir(dir) => {
                atomic_write(&dir.join(format!("{id}.html")), html.as_bytes())?;
            }
            Backing::Memory(map) => {
                map.insert(id.clone(), html.to_string());
            }
        }
        self.entries.push(SnapshotMeta {
            snapshot_id: id.clone(),
            source_url,
            parent_snapshot,
            action_taken,
        });
        self.by_digest.insert(digest, id.clone());
        if let Backing::Dir(_) = self.backing {
            self.persist_manifest()?;
        }
        Ok((id, true))
    }

    pub fn persist_manifest(&self) -> Result<()> {
        if let Backing::Dir(dir) = &self.backing {
            let json = serde_json::to_string_pretty(&self.entries)?;
            atomic_write(&dir.join("manifest.json"), json.as_bytes())?;
        }
        Ok(())
    }

    pub fn read_html(&self, snapshot_id: &str) -> Result<String> {
        match &self.backing {
            Backing::Dir(dir) => Ok(std::fs::read_to_string(dir.join(format!("{snapshot_id}.html")))?),
            Backing::Memory(map) => map
                .get(snapshot_id)
                .cloned()
                .ok_or_else(|| Error::Fixture(format!("unknown snapshot {snapshot_id}"))),
        }
    }

    pub fn entries(&self) -> &[SnapshotMeta] {
        &self.entries
    }

    pub fn ids(&self) -> Vec<String> {
        self.entries.iter().map(|m| m.snapshot_id.clone()).collect()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}
