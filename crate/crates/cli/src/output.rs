use std::io::Write;
use std::path::{Path, PathBuf};

use tempfile::NamedTempFile;

use crate::Failure;

fn parent_of(path: &Path) -> PathBuf {
    match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p.to_path_buf(),
        _ => PathBuf::from("."),
    }
}

/// Fails early if `path` cannot be created.
pub fn check_writable(path: &Path) -> Result<(), Failure> {
    let dir = parent_of(path);
    if !dir.is_dir() {
        return Err(Failure::Data(format!("{}: directory does not exist", dir.display())));
    }
    if path.is_dir() {
        return Err(Failure::Data(format!("{}: is a directory", path.display())));
    }
    Ok(())
}

/// Writes through a temporary file in the same directory and renames it into
/// place, so a failed command never leaves partial output.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), Failure> {
    let io = |e: std::io::Error| Failure::Data(format!("{}: {e}", path.display()));
    let mut tmp = NamedTempFile::new_in(parent_of(path)).map_err(io)?;
    tmp.write_all(bytes).map_err(io)?;
    tmp.as_file().sync_all().map_err(io)?;
    tmp.persist(path).map_err(|e| io(e.error))?;
    Ok(())
}
