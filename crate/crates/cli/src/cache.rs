//! On-disk cache of Tracy–Widom tables.

use std::fs::{self, File};
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use greatroot::painleve::{read_table, table_file_name, write_table, TableParams, TracyWidomTable};

use crate::error::{CliError, CliResult};

/// Environment variable overriding the cache directory.
pub const CACHE_ENV: &str = "GREATROOT_CACHE_DIR";

/// Explicit directory, else `$XDG_CACHE_HOME/greatroot`, `$HOME/.cache/greatroot`,
/// or the system temp directory.
pub fn cache_dir(explicit: Option<&Path>) -> PathBuf {
    if let Some(p) = explicit {
        return p.to_path_buf();
    }
    let nonempty = |k: &str| std::env::var_os(k).filter(|v| !v.is_empty()).map(PathBuf::from);
    if let Some(x) = nonempty("XDG_CACHE_HOME") {
        return x.join("greatroot");
    }
    if let Some(h) = nonempty("HOME") {
        return h.join(".cache").join("greatroot");
    }
    std::env::temp_dir().join("greatroot")
}

/// Loads the table for `params`, building and storing it on a miss.
/// A corrupt cache file is rebuilt with a warning.
pub fn load_or_build(dir: &Path, params: TableParams) -> CliResult<TracyWidomTable> {
    let path = dir.join(table_file_name(&params));
    if path.exists() {
        let file = File::open(&path).map_err(|e| CliError::io(&path, e))?;
        match read_table(BufReader::new(file)) {
            Ok(t) if t.params() == params => return Ok(t),
            Ok(_) => log::warn!("{}: parameters do not match; rebuilding", path.display()),
            Err(e) => log::warn!("{}: {e}; rebuilding", path.display()),
        }
    }
    log::info!("building Tracy-Widom table {params:?}");
    let table = TracyWidomTable::build(params)?;
    store(&table, &path)?;
    Ok(table)
}

/// Writes atomically: temp file in the same directory, then rename.
pub fn store(table: &TracyWidomTable, path: &Path) -> CliResult<()> {
    let dir = path.parent().unwrap_or(Path::new("."));
    fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    let tmp = path.with_extension(format!("tmp.{}", std::process::id()));
    let file = File::create(&tmp).map_err(|e| CliError::io(&tmp, e))?;
    let mut w = BufWriter::new(file);
    write_table(table, &mut w)?;
    w.flush().map_err(|e| CliError::io(&tmp, e))?;
    drop(w);
    fs::rename(&tmp, path).map_err(|e| CliError::io(path, e))?;
    Ok(())
}
