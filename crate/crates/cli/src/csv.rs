//! Minimal CSV emission: a `# config:` line, a header, rows, then comment
//! lines for summaries and fits.

use std::fmt::Write;
use std::path::Path;

use crate::error::{CliError, CliResult};

pub struct CsvWriter {
    buf: String,
}

impl CsvWriter {
    pub fn new(config_json: &str, header: &[&str]) -> Self {
        let mut buf = String::new();
        writeln!(buf, "# config: {config_json}").expect("string write");
        writeln!(buf, "{}", header.join(",")).expect("string write");
        Self { buf }
    }

    pub fn row(&mut self, fields: &[String]) {
        writeln!(self.buf, "{}", fields.join(",")).expect("string write");
    }

    pub fn comment(&mut self, fields: &[String]) {
        writeln!(self.buf, "# {}", fields.join(",")).expect("string write");
    }

    pub fn finish(self) -> String {
        self.buf
    }
}

/// Shortest round-trip decimal form.
pub fn num(x: f64) -> String {
    format!("{x}")
}

pub fn write_file(path: &Path, contents: &str) -> CliResult<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    }
    std::fs::write(path, contents).map_err(|e| CliError::io(path, e))
}

/// Data rows of a CSV produced by [`CsvWriter`]: skips comments and the
/// header.
pub fn data_rows(csv: &str) -> Vec<Vec<String>> {
    csv.lines()
        .filter(|l| !l.starts_with('#'))
        .skip(1)
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

/// Values of the comment lines tagged `tag`. The first such line names the
/// columns and is skipped; the tag itself is dropped from each row.
pub fn tagged_comments(csv: &str, tag: &str) -> Vec<Vec<String>> {
    csv.lines()
        .filter_map(|l| l.strip_prefix("# "))
        .map(|l| l.split(',').map(str::to_string).collect::<Vec<_>>())
        .filter(|f| f.first().map(String::as_str) == Some(tag))
        .skip(1)
        .map(|f| f[1..].to_vec())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn layout() {
        let mut w = CsvWriter::new("{}", &["a", "b"]);
        w.row(&["1".into(), num(0.5)]);
        w.comment(&["fit,slope".into()]);
        w.comment(&["fit".into(), num(2.0)]);
        let s = w.finish();
        assert_eq!(s, "# config: {}\na,b\n1,0.5\n# fit,slope\n# fit,2\n");
        assert_eq!(
            data_rows(&s),
            vec![vec!["1".to_string(), "0.5".to_string()]]
        );
        assert_eq!(tagged_comments(&s, "fit"), vec![vec!["2".to_string()]]);
    }
}
