//! Output sinks. Files are written to a temporary sibling and renamed into place.

use std::io::Write;
use std::path::Path;

use serde::Serialize;

use crate::CliResult;

pub fn write_atomic(path: &Path, bytes: &[u8]) -> CliResult<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    std::fs::create_dir_all(dir)?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(())
}

/// To `out` if given, else stdout.
pub fn emit(out: Option<&Path>, bytes: &[u8]) -> CliResult<()> {
    match out {
        Some(p) => write_atomic(p, bytes),
        None => {
            let mut so = std::io::stdout().lock();
            so.write_all(bytes)?;
            so.flush()?;
            Ok(())
        }
    }
}

pub fn json_bytes<T: Serialize>(v: &T) -> CliResult<Vec<u8>> {
    let mut s = serde_json::to_vec_pretty(v).map_err(|e| crate::CliError::Io(e.to_string()))?;
    s.push(b'\n');
    Ok(s)
}

pub fn csv_bytes<R, I>(header: &[&str], rows: I) -> CliResult<Vec<u8>>
where
    R: IntoIterator,
    R::Item: AsRef<[u8]>,
    I: IntoIterator<Item = R>,
{
    let mut w = csv::Writer::from_writer(vec![]);
    let err = |e: csv::Error| crate::CliError::Io(e.to_string());
    w.write_record(header).map_err(err)?;
    for r in rows {
        w.write_record(r).map_err(err)?;
    }
    w.into_inner().map_err(|e| crate::CliError::Io(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn atomic_write_replaces_and_leaves_no_temporaries() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("sub").join("x.txt");
        write_atomic(&p, b"one").unwrap();
        write_atomic(&p, b"two").unwrap();
        assert_eq!(std::fs::read(&p).unwrap(), b"two");
        assert_eq!(std::fs::read_dir(p.parent().unwrap()).unwrap().count(), 1);
    }

    #[test]
    fn csv_quotes_json_fields() {
        let b = csv_bytes(&["a", "b"], [[r#"{"h":[1,1]}"#, "2"]]).unwrap();
        assert_eq!(String::from_utf8(b).unwrap(), "a,b\n\"{\"\"h\"\":[1,1]}\",2\n");
    }
}
