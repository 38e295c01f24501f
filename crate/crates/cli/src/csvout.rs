//! CSV output with shortest round-trip float formatting (what `{}` gives for
//! f64), so goldens are byte-stable across runs and platforms.

use std::fmt::Write as _;
use std::fs;
use std::io;
use std::path::Path;

pub struct Csv {
    buf: String,
    columns: usize,
}

impl Csv {
    pub fn new(header: &[&str]) -> Csv {
        let mut buf = String::new();
        buf.push_str(&header.join(","));
        buf.push('\n');
        Csv {
            buf,
            columns: header.len(),
        }
    }

    pub fn row(&mut self, values: &[f64]) {
        assert_eq!(values.len(), self.columns, "row width mismatch");
        for (i, v) in values.iter().enumerate() {
            if i > 0 {
                self.buf.push(',');
            }
            let _ = write!(self.buf, "{v}");
        }
        self.buf.push('\n');
    }

    /// Row with a leading string cell (e.g. a component label).
    pub fn row_labeled(&mut self, label: &str, values: &[f64]) {
        assert_eq!(values.len() + 1, self.columns, "row width mismatch");
        self.buf.push_str(label);
        for v in values {
            self.buf.push(',');
            let _ = write!(self.buf, "{v}");
        }
        self.buf.push('\n');
    }

    pub fn write_to(&self, path: &Path) -> io::Result<()> {
        if let Some(parent) = path.parent() {
            if !parent.as_os_str().is_empty() {
                fs::create_dir_all(parent)?;
            }
        }
        fs::write(path, self.buf.as_bytes())
    }
}
