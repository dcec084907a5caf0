use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use sha2::{Digest, Sha256};

/// `x` with 10 significant digits, `%.10g` style: trailing zeros dropped,
/// exponent form outside `1e-5 ≤ |x| < 1e10`.
pub fn fmt_sig(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    let sci = format!("{x:.9e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-5..10).contains(&exp) {
        return format!("{}e{}{:02}", trim(mantissa), if exp < 0 { '-' } else { '+' }, exp.abs());
    }
    let decimals = (9 - exp).max(0) as usize;
    trim(&format!("{x:.decimals$}")).to_string()
}

fn trim(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// Signed short label for an assortativity target: `-0.3`, `0`, `+0.3`.
pub fn fmt_signed(x: f64) -> String {
    if x > 0.0 {
        format!("+{}", fmt_sig(x))
    } else {
        fmt_sig(x)
    }
}

/// In-memory CSV; rows are written in insertion order.
#[derive(Debug, Clone)]
pub struct Csv {
    text: String,
}

impl Csv {
    pub fn new<S: AsRef<str>>(header: &[S]) -> Self {
        let mut csv = Csv { text: String::new() };
        csv.row(header.iter().map(|h| h.as_ref().to_string()));
        csv
    }

    pub fn row<I: IntoIterator<Item = String>>(&mut self, cells: I) {
        let mut first = true;
        for c in cells {
            if !first {
                self.text.push(',');
            }
            first = false;
            self.text.push_str(&c);
        }
        self.text.push('\n');
    }

    pub fn as_str(&self) -> &str {
        &self.text
    }
}

/// A written output with its checksum.
#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize)]
pub struct OutputFile {
    pub path: PathBuf,
    pub sha256: String,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Collects files under one output directory.
#[derive(Debug)]
pub struct OutputDir {
    root: PathBuf,
    files: Vec<OutputFile>,
}

impl OutputDir {
    pub fn create(root: &Path) -> std::io::Result<Self> {
        std::fs::create_dir_all(root)?;
        Ok(OutputDir {
            root: root.to_path_buf(),
            files: Vec::new(),
        })
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    pub fn write(&mut self, name: &str, contents: &str) -> std::io::Result<()> {
        std::fs::write(self.root.join(name), contents)?;
        self.files.push(OutputFile {
            path: PathBuf::from(name),
            sha256: sha256_hex(contents.as_bytes()),
        });
        Ok(())
    }

    pub fn write_csv(&mut self, name: &str, csv: &Csv) -> std::io::Result<()> {
        self.write(name, csv.as_str())
    }

    pub fn into_files(self) -> Vec<OutputFile> {
        self.files
    }
}

/// Renders `step,k,x_k` long-form rows for one state.
pub fn push_state_rows(csv: &mut Csv, prefix: &[String], degrees: &[usize], x: &[f64]) {
    for (&k, &v) in degrees.iter().zip(x) {
        let mut cells = prefix.to_vec();
        cells.push(k.to_string());
        cells.push(fmt_sig(v));
        csv.row(cells);
    }
}

pub fn join_sig(values: &[f64]) -> String {
    let mut s = String::new();
    for (i, v) in values.iter().enumerate() {
        if i > 0 {
            s.push(',');
        }
        let _ = write!(s, "{}", fmt_sig(*v));
    }
    s
}
