use std::io::{self, Write};
use std::path::Path;

use serde::Serialize;

/// Writes `bytes` to stdout when `out` is `None` or `-`, otherwise to a temp
/// file in the target directory that is then renamed over `out`.
pub fn emit(out: Option<&str>, bytes: &[u8]) -> io::Result<()> {
    match out {
        None | Some("-") => {
            let mut stdout = io::stdout().lock();
            stdout.write_all(bytes)?;
            stdout.flush()
        }
        Some(path) => write_atomic(Path::new(path), bytes),
    }
}

pub fn write_atomic(path: &Path, bytes: &[u8]) -> io::Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(())
}

pub fn json_bytes<T: Serialize>(value: &T) -> Vec<u8> {
    let mut v = serde_json::to_vec_pretty(value).expect("reports serialize");
    v.push(b'\n');
    v
}

/// Appends one CSV row of floats with 17 significant digits.
pub fn push_row(buf: &mut String, values: &[f64]) {
    use std::fmt::Write as _;
    for (i, v) in values.iter().enumerate() {
        if i > 0 {
            buf.push(',');
        }
        write!(buf, "{v:.16e}").expect("writing to a String");
    }
    buf.push('\n');
}
