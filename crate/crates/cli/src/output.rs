use std::fs;
use std::io::{self, Write};
use std::path::Path;

use anyhow::{Context, Result};
use tempfile::NamedTempFile;

/// Writes to `path` through a temporary file in the same directory, renamed
/// into place once complete. `None` writes to stdout.
pub fn emit<F>(path: Option<&Path>, body: F) -> Result<()>
where
    F: FnOnce(&mut dyn Write) -> Result<()>,
{
    match path {
        None => {
            let stdout = io::stdout();
            let mut lock = stdout.lock();
            body(&mut lock)?;
            lock.flush()?;
            Ok(())
        }
        Some(path) => {
            let dir = parent_dir(path);
            let mut tmp = NamedTempFile::new_in(dir).with_context(|| format!("creating temporary file in {}", dir.display()))?;
            body(tmp.as_file_mut())?;
            tmp.as_file_mut().flush()?;
            tmp.persist(path).with_context(|| format!("writing {}", path.display()))?;
            Ok(())
        }
    }
}

pub fn emit_str(path: Option<&Path>, text: &str) -> Result<()> {
    emit(path, |w| {
        w.write_all(text.as_bytes())?;
        if !text.ends_with('\n') {
            w.write_all(b"\n")?;
        }
        Ok(())
    })
}

fn parent_dir(path: &Path) -> &Path {
    match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    }
}

/// Input files must exist and output directories must be writable targets
/// before any work starts.
pub fn check_paths(inputs: &[&Path], outputs: &[&Path]) -> Result<()> {
    for p in inputs {
        if !p.exists() {
            return Err(hodgefir::Error::InvalidArgument(format!("input {} does not exist", p.display())).into());
        }
    }
    for p in outputs {
        let dir = parent_dir(p);
        if !dir.is_dir() {
            return Err(hodgefir::Error::InvalidArgument(format!("output directory {} does not exist", dir.display())).into());
        }
    }
    Ok(())
}

pub fn ensure_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))
}
