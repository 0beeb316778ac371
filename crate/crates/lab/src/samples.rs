//! Labelled-sample files.
//!
//! ```text
//! # d=2,m=3,n=4
//! x1,x2,y
//! 0.25,0.5,1
//! ...
//! ```
//!
//! The comment line carries the shape (the class count cannot be recovered
//! from the rows); labels are 1-based.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use ovaplug::ova::LabeledSample;

use crate::error::{LabError, LabResult};

pub fn write_sample<W: Write>(out: W, sample: &LabeledSample) -> std::io::Result<()> {
    let mut out = BufWriter::new(out);
    writeln!(out, "# d={},m={},n={}", sample.dim(), sample.classes(), sample.len())?;
    let mut w = csv::Writer::from_writer(out);
    let mut header: Vec<String> = (1..=sample.dim()).map(|i| format!("x{i}")).collect();
    header.push("y".into());
    w.write_record(&header)?;
    for (i, &y) in sample.labels().iter().enumerate() {
        let mut row: Vec<String> = sample.observation(i).iter().map(f64::to_string).collect();
        row.push(y.to_string());
        w.write_record(&row)?;
    }
    w.flush()
}

pub fn save_sample(path: &Path, sample: &LabeledSample) -> LabResult<()> {
    let file = File::create(path).map_err(|e| LabError::io(path, e))?;
    write_sample(file, sample).map_err(|e| LabError::io(path, e))
}

fn parse_shape(line: &str) -> Option<(usize, usize, usize)> {
    let body = line.trim().strip_prefix('#')?.trim();
    let (mut d, mut m, mut n) = (None, None, None);
    for part in body.split(',') {
        let (key, value) = part.split_once('=')?;
        let value: usize = value.trim().parse().ok()?;
        match key.trim() {
            "d" => d = Some(value),
            "m" => m = Some(value),
            "n" => n = Some(value),
            _ => return None,
        }
    }
    Some((d?, m?, n?))
}

pub fn read_sample<R: Read>(input: R, path: &Path) -> LabResult<LabeledSample> {
    let bad = |reason: String| LabError::Format {
        path: path.to_path_buf(),
        reason,
    };
    let mut input = BufReader::new(input);
    let mut first = String::new();
    input.read_line(&mut first).map_err(|e| LabError::io(path, e))?;
    let (d, m, n) = parse_shape(&first).ok_or_else(|| bad("missing `# d=..,m=..,n=..` line".into()))?;

    let mut reader = csv::Reader::from_reader(input);
    let header = reader.headers().map_err(|e| bad(e.to_string()))?;
    if header.len() != d + 1 {
        return Err(bad(format!("expected {} columns, header has {}", d + 1, header.len())));
    }
    let mut observations = Vec::with_capacity(n * d);
    let mut labels = Vec::with_capacity(n);
    for (line, record) in reader.records().enumerate() {
        let record = record.map_err(|e| bad(e.to_string()))?;
        for field in record.iter().take(d) {
            let v: f64 = field
                .trim()
                .parse()
                .map_err(|_| bad(format!("row {}: bad coordinate {field:?}", line + 1)))?;
            observations.push(v);
        }
        let y = record[d].trim();
        labels.push(
            y.parse()
                .map_err(|_| bad(format!("row {}: bad label {y:?}", line + 1)))?,
        );
    }
    if labels.len() != n {
        return Err(bad(format!("header promises {n} rows, found {}", labels.len())));
    }
    LabeledSample::new(d, m, observations, labels).map_err(|e| bad(e.to_string()))
}

pub fn load_sample(path: &Path) -> LabResult<LabeledSample> {
    let file = File::open(path).map_err(|e| LabError::io(path, e))?;
    read_sample(file, path)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        let s = LabeledSample::new(2, 3, vec![0.1, 0.2, 0.30000000000000004, 1.0], vec![3, 1]).unwrap();
        let mut buf = Vec::new();
        write_sample(&mut buf, &s).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("# d=2,m=3,n=2\nx1,x2,y\n"));
        assert_eq!(read_sample(&buf[..], Path::new("mem")).unwrap(), s);
    }

    #[test]
    fn rejects_malformed() {
        let p = Path::new("mem");
        assert!(read_sample(&b"x1,y\n0.1,1\n"[..], p).is_err());
        assert!(read_sample(&b"# d=1,m=2,n=2\nx1,y\n0.1,1\n"[..], p).is_err());
        assert!(read_sample(&b"# d=1,m=2,n=1\nx1,y\n0.1,3\n"[..], p).is_err());
        assert!(read_sample(&b"# d=1,m=2,n=1\nx1,y\nabc,1\n"[..], p).is_err());
    }
}
