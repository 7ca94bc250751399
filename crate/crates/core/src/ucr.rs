//! Reading and writing UCR-style delimited files: one series per row, the
//! class label first, values after it.
//!
//! Variable-length rows are padded at the end with `NaN` or empty fields.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::series::{Dataset, Label, TimeSeries};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Delimiter {
    Tab,
    Comma,
    Whitespace,
}

impl Delimiter {
    fn detect(line: &str) -> Self {
        if line.contains('\t') {
            Delimiter::Tab
        } else if line.contains(',') {
            Delimiter::Comma
        } else {
            Delimiter::Whitespace
        }
    }

    fn split<'a>(self, line: &'a str) -> Box<dyn Iterator<Item = &'a str> + 'a> {
        match self {
            Delimiter::Tab => Box::new(line.split('\t').map(str::trim)),
            Delimiter::Comma => Box::new(line.split(',').map(str::trim)),
            Delimiter::Whitespace => Box::new(line.split_whitespace()),
        }
    }
}

/// `1.0` and `1` name the same class.
fn normalize_label(raw: &str) -> String {
    match raw.parse::<f64>() {
        Ok(v) if v.is_finite() && v.fract() == 0.0 && v.abs() < 1e15 => format!("{}", v as i64),
        _ => raw.to_string(),
    }
}

/// Drops leading and trailing gaps and fills interior ones linearly from the
/// nearest finite neighbours.
pub fn fill_missing(raw: &[f64]) -> Vec<f64> {
    let Some(first) = raw.iter().position(|v| !v.is_nan()) else {
        return Vec::new();
    };
    let last = raw.iter().rposition(|v| !v.is_nan()).unwrap_or(first);
    let mut out = raw[first..=last].to_vec();
    let mut i = 0;
    while i < out.len() {
        if out[i].is_nan() {
            let lo = i - 1;
            let hi = (i..out.len()).find(|&j| !out[j].is_nan()).expect("trimmed to a finite end");
            let (a, b) = (out[lo], out[hi]);
            let span = (hi - lo) as f64;
            for (j, v) in out.iter_mut().enumerate().take(hi).skip(i) {
                let t = (j - lo) as f64 / span;
                *v = a + t * (b - a);
            }
            i = hi;
        }
        i += 1;
    }
    out
}

fn parse_line(line: &str, delim: Delimiter, path: &Path, lineno: usize) -> Result<TimeSeries> {
    let err = |message: String| Error::Parse {
        path: path.to_path_buf(),
        line: lineno,
        message,
    };
    let mut fields = delim.split(line);
    let label = fields
        .next()
        .filter(|l| !l.is_empty())
        .ok_or_else(|| err("missing class label".into()))?;
    let mut raw = Vec::new();
    for (col, f) in fields.enumerate() {
        let v = if f.is_empty() || f.eq_ignore_ascii_case("nan") || f == "?" {
            f64::NAN
        } else {
            match f.parse::<f64>() {
                Ok(v) if v.is_finite() => v,
                _ => return Err(err(format!("value {} is not a finite number: `{f}`", col + 1))),
            }
        };
        raw.push(v);
    }
    let values = fill_missing(&raw);
    if values.is_empty() {
        return Err(err("row has no values".into()));
    }
    TimeSeries::new(values, Label(normalize_label(label))).map_err(|e| err(e.to_string()))
}

/// Parses UCR-formatted text. `path` is used only for error messages.
pub fn parse_ucr(text: &str, path: &Path) -> Result<Vec<TimeSeries>> {
    let mut delim = None;
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim_end_matches('\r');
        if line.trim().is_empty() {
            continue;
        }
        let d = *delim.get_or_insert_with(|| Delimiter::detect(line));
        out.push(parse_line(line, d, path, i + 1)?);
    }
    if out.is_empty() {
        return Err(Error::EmptyFile { path: path.to_path_buf() });
    }
    Ok(out)
}

pub fn read_ucr_file(path: &Path) -> Result<Vec<TimeSeries>> {
    let text = fs::read_to_string(path)?;
    parse_ucr(&text, path)
}

pub fn load_ucr_dataset(name: impl Into<String>, train_path: &Path, test_path: &Path) -> Result<Dataset> {
    Dataset::new(name, read_ucr_file(train_path)?, read_ucr_file(test_path)?)
}

/// Writes tab-separated rows, padding shorter series with `NaN`.
pub fn write_ucr<W: Write>(mut out: W, series: &[TimeSeries]) -> Result<()> {
    let width = series.iter().map(TimeSeries::len).max().unwrap_or(0);
    for s in series {
        let mut line = s.label().as_str().to_string();
        for v in s.values() {
            line.push('\t');
            line.push_str(&v.to_string());
        }
        for _ in s.len()..width {
            line.push_str("\tNaN");
        }
        line.push('\n');
        out.write_all(line.as_bytes())?;
    }
    out.flush()?;
    Ok(())
}

/// Writes `<dir>/<name>/<name>_TRAIN.tsv` and `_TEST.tsv`.
pub fn write_dataset(dir: &Path, d: &Dataset) -> Result<(PathBuf, PathBuf)> {
    let sub = dir.join(&d.name);
    fs::create_dir_all(&sub)?;
    let train = sub.join(format!("{}_TRAIN.tsv", d.name));
    let test = sub.join(format!("{}_TEST.tsv", d.name));
    write_ucr(std::io::BufWriter::new(fs::File::create(&train)?), &d.train)?;
    write_ucr(std::io::BufWriter::new(fs::File::create(&test)?), &d.test)?;
    Ok((train, test))
}

/// A dataset found on disk.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct DatasetFiles {
    pub name: String,
    pub train: PathBuf,
    pub test: PathBuf,
}

fn collect_train_files(dir: &Path, depth: usize, out: &mut Vec<PathBuf>) -> Result<()> {
    for entry in fs::read_dir(dir)? {
        let path = entry?.path();
        if path.is_dir() {
            if depth > 0 {
                collect_train_files(&path, depth - 1, out)?;
            }
        } else if path
            .file_stem()
            .and_then(|s| s.to_str())
            .is_some_and(|s| s.ends_with("_TRAIN"))
        {
            out.push(path);
        }
    }
    Ok(())
}

/// Finds `<name>_TRAIN.*` files with a matching `<name>_TEST.*` sibling in
/// `dir` or one level below it, sorted by name.
pub fn discover_datasets(dir: &Path) -> Result<Vec<DatasetFiles>> {
    let mut trains = Vec::new();
    collect_train_files(dir, 1, &mut trains)?;
    let mut found: Vec<DatasetFiles> = trains
        .into_iter()
        .filter_map(|train| {
            let stem = train.file_stem()?.to_str()?;
            let name = stem.strip_suffix("_TRAIN")?.to_string();
            let mut test_name = format!("{name}_TEST");
            if let Some(ext) = train.extension().and_then(|e| e.to_str()) {
                test_name = format!("{test_name}.{ext}");
            }
            let test = train.with_file_name(test_name);
            test.is_file().then_some(DatasetFiles { name, train, test })
        })
        .collect();
    found.sort();
    found.dedup_by(|a, b| a.name == b.name);
    if found.is_empty() {
        return Err(Error::InvalidInput(format!(
            "no <name>_TRAIN / <name>_TEST file pairs under {}",
            dir.display()
        )));
    }
    Ok(found)
}

impl DatasetFiles {
    pub fn load(&self) -> Result<Dataset> {
        load_ucr_dataset(self.name.clone(), &self.train, &self.test)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn parse(text: &str) -> Result<Vec<TimeSeries>> {
        parse_ucr(text, Path::new("mem.csv"))
    }

    #[test]
    fn row_examples() {
        let s = parse("2,1.0,2.0,3.0\n").unwrap();
        assert_eq!(s[0].label().as_str(), "2");
        assert_eq!(s[0].values(), &[1.0, 2.0, 3.0]);
        assert_eq!(parse("1,0.0,NaN,2.0").unwrap()[0].values(), &[0.0, 1.0, 2.0]);
        assert_eq!(parse("1,5.0,NaN,NaN").unwrap()[0].values(), &[5.0]);
        assert_eq!(parse("1,5.0,,").unwrap()[0].values(), &[5.0]);
        assert_eq!(parse("1,NaN,4.0,NaN,NaN,7.0").unwrap()[0].values(), &[4.0, 5.0, 6.0, 7.0]);
    }

    #[test]
    fn delimiters_and_labels() {
        let s = parse("1.0\t1\t2\n-1\t3\t4\n").unwrap();
        assert_eq!(s[0].label().as_str(), "1");
        assert_eq!(s[1].values(), &[3.0, 4.0]);
        let s = parse("  cat  1.5  2.5\n").unwrap();
        assert_eq!(s[0].label().as_str(), "cat");
        assert_eq!(s[0].values(), &[1.5, 2.5]);
    }

    #[test]
    fn errors_carry_location() {
        match parse("1,1,2\n\n2,1,x\n") {
            Err(Error::Parse { line, message, .. }) => {
                assert_eq!(line, 3);
                assert!(message.contains("`x`"));
            }
            other => panic!("{other:?}"),
        }
        assert!(matches!(parse("1,NaN,NaN"), Err(Error::Parse { line: 1, .. })));
        assert!(matches!(parse("1"), Err(Error::Parse { line: 1, .. })));
        assert!(matches!(parse("\n\n"), Err(Error::EmptyFile { .. })));
        assert!(matches!(parse("1,inf"), Err(Error::Parse { .. })));
    }

    #[test]
    fn discovers_written_datasets() {
        let dir = tempfile::tempdir().unwrap();
        let d = Dataset::new(
            "Toy",
            vec![TimeSeries::new(vec![1.0, 2.0], "a").unwrap()],
            vec![TimeSeries::new(vec![3.0], "b").unwrap()],
        )
        .unwrap();
        write_dataset(dir.path(), &d).unwrap();
        let found = discover_datasets(dir.path()).unwrap();
        assert_eq!(found.len(), 1);
        assert_eq!(found[0].name, "Toy");
        assert_eq!(found[0].load().unwrap(), d);
    }

    proptest! {
        #[test]
        fn write_then_read_round_trips(
            rows in prop::collection::vec(
                (0u8..4, prop::collection::vec(-1e6f64..1e6, 1..20)),
                1..10,
            )
        ) {
            let series: Vec<TimeSeries> = rows
                .into_iter()
                .map(|(l, v)| TimeSeries::new(v, l.to_string()).unwrap())
                .collect();
            let mut buf = Vec::new();
            write_ucr(&mut buf, &series).unwrap();
            let back = parse(std::str::from_utf8(&buf).unwrap()).unwrap();
            prop_assert_eq!(back, series);
        }
    }
}
