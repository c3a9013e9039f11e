//! Staged output: every artifact is written under a hidden temp directory
//! inside the output directory, then moved into place only after the whole
//! command has succeeded. A failing run leaves prior outputs untouched.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};

pub struct Stage {
    temp: tempfile::TempDir,
    root: PathBuf,
}

impl Stage {
    pub fn new(output_dir: &Path) -> Result<Stage> {
        fs::create_dir_all(output_dir)
            .with_context(|| format!("cannot create {}", output_dir.display()))?;
        let temp = tempfile::Builder::new()
            .prefix(".stage-")
            .tempdir_in(output_dir)
            .with_context(|| format!("cannot stage under {}", output_dir.display()))?;
        Ok(Stage { temp, root: output_dir.to_path_buf() })
    }

    /// Absolute path of a staged artifact, for commands that read back what
    /// they just wrote before committing.
    pub fn staged_path(&self, rel: impl AsRef<Path>) -> PathBuf {
        self.temp.path().join(rel.as_ref())
    }

    /// Writes one artifact under the staging area, creating parents.
    pub fn write(&self, rel: impl AsRef<Path>, contents: impl AsRef<[u8]>) -> Result<()> {
        let path = self.temp.path().join(rel.as_ref());
        if let Some(parent) = path.parent() {
            fs::create_dir_all(parent)
                .with_context(|| format!("cannot create {}", parent.display()))?;
        }
        fs::write(&path, contents).with_context(|| format!("cannot write {}", path.display()))
    }

    /// Moves every staged top-level entry into the output directory,
    /// replacing anything already there. Returns the final paths in name
    /// order. The temp directory lives on the same filesystem, so each move
    /// is a rename.
    pub fn commit(self) -> Result<Vec<PathBuf>> {
        let mut moved = Vec::new();
        let entries =
            fs::read_dir(self.temp.path()).context("cannot list staged artifacts")?;
        let mut staged: Vec<_> = entries.collect::<std::io::Result<_>>()?;
        staged.sort_by_key(|e| e.file_name());
        for entry in staged {
            let target = self.root.join(entry.file_name());
            if target.is_dir() {
                fs::remove_dir_all(&target)
                    .with_context(|| format!("cannot replace {}", target.display()))?;
            } else if target.exists() {
                fs::remove_file(&target)
                    .with_context(|| format!("cannot replace {}", target.display()))?;
            }
            fs::rename(entry.path(), &target)
                .with_context(|| format!("cannot move output into {}", target.display()))?;
            moved.push(target);
        }
        Ok(moved)
    }
}
