//! On-disk coefficient files `u_<j>.coeff`.
//!
//! ```text
//! order <j> modes <M> parity <none|even-real|odd-imag>
//! k1 k2 k3 re1 im1 re2 im2 re3 im3      (parity none)
//! k1 k2 k3 x1 x2 x3                     (parity tagged: the nonzero part)
//! ```
//! Lines are in canonical wavevector order and rationals in lowest terms, so
//! equal fields always serialize to identical bytes.

use std::fmt;
use std::fs::{self, File, OpenOptions};
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use crate::exact::{format_rational, parse_canonical_rational};
use crate::field::{make_field, parse_component, zero_vec3, ComplexVec3, FieldError, FourierField, WaveVector};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Parity {
    None,
    EvenReal,
    OddImag,
}

impl Parity {
    /// Tag expected at order `j` for a datum that is (or is not) real.
    pub fn for_order(j: usize, real_datum: bool) -> Parity {
        match (real_datum, j % 2) {
            (false, _) => Parity::None,
            (true, 0) => Parity::EvenReal,
            (true, _) => Parity::OddImag,
        }
    }

    pub fn holds(&self, field: &FourierField) -> bool {
        match self {
            Parity::None => true,
            Parity::EvenReal => field.is_real(),
            Parity::OddImag => field.is_imaginary(),
        }
    }
}

impl fmt::Display for Parity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Parity::None => "none",
            Parity::EvenReal => "even-real",
            Parity::OddImag => "odd-imag",
        })
    }
}

#[derive(Debug, thiserror::Error)]
pub enum CheckpointError {
    #[error("corrupt checkpoint {path}: {reason}")]
    Corrupt { path: PathBuf, reason: String },
    #[error("checkpoint directory {0} is locked by another run")]
    Locked(PathBuf),
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
}

impl CheckpointError {
    fn io(path: &Path, source: io::Error) -> Self {
        CheckpointError::Io {
            path: path.to_owned(),
            source,
        }
    }
}

/// Parsed checkpoint contents.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Checkpoint {
    pub order: usize,
    pub parity: Parity,
    pub field: FourierField,
}

pub fn checkpoint_path(dir: &Path, order: usize) -> PathBuf {
    dir.join(format!("u_{order}.coeff"))
}

pub fn format_checkpoint(order: usize, parity: Parity, field: &FourierField) -> String {
    let mut out = format!("order {order} modes {} parity {parity}\n", field.len());
    for (k, c) in field.iter() {
        out.push_str(&k.to_string());
        let parts: Vec<&num_rational::BigRational> = match parity {
            Parity::None => (0..3).flat_map(|i| [&c.re[i], &c.im[i]]).collect(),
            Parity::EvenReal => c.re.iter().collect(),
            Parity::OddImag => c.im.iter().collect(),
        };
        for x in parts {
            out.push(' ');
            out.push_str(&format_rational(x));
        }
        out.push('\n');
    }
    out
}

/// Parses and fully validates checkpoint text. Errors are plain messages;
/// callers attach the file path.
pub fn parse_checkpoint(text: &str) -> Result<Checkpoint, String> {
    let mut lines = text.split('\n');
    let header = lines.next().ok_or("empty file")?;
    let tokens: Vec<&str> = header.split(' ').collect();
    let (order, modes, parity) = match tokens.as_slice() {
        ["order", j, "modes", m, "parity", p] => {
            let order = parse_count(j).ok_or("invalid order")?;
            let modes = parse_count(m).ok_or("invalid mode count")?;
            let parity = match *p {
                "none" => Parity::None,
                "even-real" => Parity::EvenReal,
                "odd-imag" => Parity::OddImag,
                _ => return Err("unknown parity tag".into()),
            };
            (order, modes, parity)
        }
        _ => return Err("malformed header".into()),
    };
    let width = if parity == Parity::None { 9 } else { 6 };
    let mut entries = Vec::new();
    let mut previous: Option<WaveVector> = None;
    for (idx, line) in lines.enumerate() {
        if line.is_empty() {
            if idx == modes {
                continue;
            }
            return Err(format!("unexpected blank line {}", idx + 2));
        }
        if idx >= modes {
            return Err("more lines than the declared mode count".into());
        }
        let tokens: Vec<&str> = line.split(' ').collect();
        if tokens.len() != width {
            return Err(format!("line {}: expected {width} fields", idx + 2));
        }
        let mut k = [0i64; 3];
        for i in 0..3 {
            k[i] = parse_component(tokens[i]).ok_or_else(|| format!("line {}: bad wavevector", idx + 2))?;
        }
        let k = WaveVector(k);
        if previous.is_some_and(|p| p >= k) {
            return Err(format!("line {}: modes out of canonical order", idx + 2));
        }
        previous = Some(k);
        let mut values = Vec::with_capacity(width - 3);
        for tok in &tokens[3..] {
            values.push(parse_canonical_rational(tok).map_err(|e| format!("line {}: {e}", idx + 2))?);
        }
        let c = match parity {
            Parity::None => ComplexVec3::new(
                [values[0].clone(), values[2].clone(), values[4].clone()],
                [values[1].clone(), values[3].clone(), values[5].clone()],
            ),
            Parity::EvenReal => ComplexVec3::new([values[0].clone(), values[1].clone(), values[2].clone()], zero_vec3()),
            Parity::OddImag => ComplexVec3::new(zero_vec3(), [values[0].clone(), values[1].clone(), values[2].clone()]),
        };
        if c.is_zero() {
            return Err(format!("line {}: zero coefficient stored", idx + 2));
        }
        entries.push((k, c));
    }
    if entries.len() != modes {
        return Err(format!("declared {modes} modes, found {}", entries.len()));
    }
    if !text.ends_with('\n') {
        return Err("missing final newline".into());
    }
    let field = make_field(entries).map_err(|e: FieldError| e.to_string())?;
    Ok(Checkpoint { order, parity, field })
}

fn parse_count(s: &str) -> Option<usize> {
    if s.is_empty() || s.len() > 9 || !s.bytes().all(|b| b.is_ascii_digit()) || (s.len() > 1 && s.starts_with('0')) {
        return None;
    }
    s.parse().ok()
}

/// Writes `u_<order>.coeff` atomically (temporary file, then rename).
pub fn write_checkpoint(dir: &Path, order: usize, parity: Parity, field: &FourierField) -> Result<PathBuf, CheckpointError> {
    let path = checkpoint_path(dir, order);
    let tmp = dir.join(format!(".u_{order}.coeff.tmp"));
    let text = format_checkpoint(order, parity, field);
    let mut file = File::create(&tmp).map_err(|e| CheckpointError::io(&tmp, e))?;
    file.write_all(text.as_bytes()).map_err(|e| CheckpointError::io(&tmp, e))?;
    file.sync_all().map_err(|e| CheckpointError::io(&tmp, e))?;
    fs::rename(&tmp, &path).map_err(|e| CheckpointError::io(&path, e))?;
    Ok(path)
}

/// Reads and validates one checkpoint; the header order must match.
pub fn read_checkpoint(dir: &Path, order: usize) -> Result<Checkpoint, CheckpointError> {
    let path = checkpoint_path(dir, order);
    let text = fs::read_to_string(&path).map_err(|e| CheckpointError::io(&path, e))?;
    let corrupt = |reason: String| CheckpointError::Corrupt {
        path: path.clone(),
        reason,
    };
    let cp = parse_checkpoint(&text).map_err(corrupt)?;
    if cp.order != order {
        return Err(corrupt(format!("header says order {}, file name says {order}", cp.order)));
    }
    Ok(cp)
}

/// Exclusive lock on a checkpoint directory, released on drop.
#[derive(Debug)]
pub struct CheckpointLock {
    path: PathBuf,
}

impl CheckpointLock {
    pub fn acquire(dir: &Path) -> Result<Self, CheckpointError> {
        fs::create_dir_all(dir).map_err(|e| CheckpointError::io(dir, e))?;
        let path = dir.join(".lock");
        match OpenOptions::new().write(true).create_new(true).open(&path) {
            Ok(mut f) => {
                let _ = writeln!(f, "{}", std::process::id());
                Ok(CheckpointLock { path })
            }
            Err(e) if e.kind() == io::ErrorKind::AlreadyExists => Err(CheckpointError::Locked(dir.to_owned())),
            Err(e) => Err(CheckpointError::io(&path, e)),
        }
    }
}

impl Drop for CheckpointLock {
    fn drop(&mut self) {
        let _ = fs::remove_file(&self.path);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::euler::bnw_datum;

    #[test]
    fn round_trip_and_rejections() {
        let u0 = bnw_datum();
        let text = format_checkpoint(0, Parity::EvenReal, &u0);
        assert!(text.starts_with("order 0 modes 6 parity even-real\n"));
        let cp = parse_checkpoint(&text).unwrap();
        assert_eq!(cp.field, u0);

        let full = format_checkpoint(0, Parity::None, &u0);
        assert_eq!(parse_checkpoint(&full).unwrap().field, u0);

        assert!(parse_checkpoint(&text.replace("modes 6", "modes 5")).is_err());
        assert!(parse_checkpoint(&text.replace("parity even-real", "parity odd")).is_err());
        assert!(parse_checkpoint(text.trim_end()).is_err());
        // swap two lines: out of canonical order
        let mut lines: Vec<&str> = text.lines().collect();
        lines.swap(1, 2);
        assert!(parse_checkpoint(&(lines.join("\n") + "\n")).is_err());
        // non-reduced rational
        assert!(parse_checkpoint(&text.replacen(" 1 ", " 2/2 ", 1)).is_err());
    }

    #[test]
    fn lock_is_exclusive() {
        let dir = tempfile::tempdir().unwrap();
        let lock = CheckpointLock::acquire(dir.path()).unwrap();
        assert!(matches!(CheckpointLock::acquire(dir.path()), Err(CheckpointError::Locked(_))));
        drop(lock);
        assert!(CheckpointLock::acquire(dir.path()).is_ok());
    }
}
