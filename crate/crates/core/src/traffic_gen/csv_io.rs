use std::collections::HashMap;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use super::{Catalog, RequestEvent, RequestTrace};
use crate::{Error, Result};

/// Original object id of each dense id; dense id `d` (1-based) maps to
/// `originals[d - 1]`.
#[derive(Clone, Debug, PartialEq)]
pub struct IdMapping {
    pub originals: Vec<String>,
}

#[derive(Clone, Debug)]
pub struct LoadedTrace {
    pub trace: RequestTrace,
    pub catalog: Catalog,
    pub mapping: IdMapping,
}

/// Reads `timestamp,object_id[,size]` rows (header optional).
///
/// Object ids are remapped to dense ids: numeric order when every id is an
/// unsigned integer, first-appearance order otherwise. Rows out of time order
/// are sorted with a warning. Objects without a size column get size 1.
pub fn load_trace_csv(path: impl AsRef<Path>) -> Result<LoadedTrace> {
    let path = path.as_ref();
    let parse_err = |line: usize, msg: String| Error::Parse {
        path: path.to_path_buf(),
        line,
        msg,
    };
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_path(path)?;

    let mut rows: Vec<(f64, String, Option<f64>)> = Vec::new();
    for (idx, record) in reader.records().enumerate() {
        let record = record?;
        let line = record.position().map_or(idx + 1, |p| p.line() as usize);
        if record.len() == 1 && record[0].is_empty() {
            continue;
        }
        if !(2..=3).contains(&record.len()) {
            return Err(parse_err(
                line,
                format!("expected `timestamp,object_id[,size]`, got {} fields", record.len()),
            ));
        }
        if rows.is_empty() && idx == 0 && record[0].eq_ignore_ascii_case("timestamp") {
            continue;
        }
        let time: f64 = record[0]
            .parse()
            .ok()
            .filter(|t: &f64| t.is_finite())
            .ok_or_else(|| parse_err(line, format!("bad timestamp `{}`", &record[0])))?;
        if record[1].is_empty() {
            return Err(parse_err(line, "empty object id".into()));
        }
        let size = match record.get(2) {
            Some(s) => Some(
                s.parse::<f64>()
                    .ok()
                    .filter(|s| s.is_finite() && *s > 0.0)
                    .ok_or_else(|| parse_err(line, format!("bad size `{s}`")))?,
            ),
            None => None,
        };
        rows.push((time, record[1].to_string(), size));
    }
    if rows.is_empty() {
        return Err(parse_err(0, "trace contains no requests".into()));
    }
    if rows.windows(2).any(|w| w[1].0 < w[0].0) {
        log::warn!("{}: timestamps not monotone; sorting", path.display());
        rows.sort_by(|a, b| a.0.total_cmp(&b.0));
    }

    let mut first_seen: Vec<&str> = Vec::new();
    let mut seen: HashMap<&str, ()> = HashMap::new();
    for (_, id, _) in &rows {
        if seen.insert(id.as_str(), ()).is_none() {
            first_seen.push(id.as_str());
        }
    }
    let numeric: Option<Vec<u64>> = first_seen.iter().map(|s| s.parse().ok()).collect();
    let originals: Vec<String> = match numeric {
        Some(mut ids) => {
            ids.sort_unstable();
            ids.into_iter().map(|i| i.to_string()).collect()
        }
        None => first_seen.iter().map(|s| s.to_string()).collect(),
    };
    let dense: HashMap<&str, usize> = originals
        .iter()
        .enumerate()
        .map(|(d, s)| (s.as_str(), d))
        .collect();
    // numeric ids may have been written with leading zeros etc.; normalise
    let lookup = |id: &str| -> usize {
        dense
            .get(id)
            .copied()
            .or_else(|| id.parse::<u64>().ok().and_then(|v| dense.get(v.to_string().as_str()).copied()))
            .expect("every id was registered")
    };

    let n = originals.len();
    let mut sizes: Vec<Option<f64>> = vec![None; n];
    let mut events = Vec::with_capacity(rows.len());
    for (time, id, size) in &rows {
        let object = lookup(id);
        if let Some(s) = size {
            match sizes[object] {
                None => sizes[object] = Some(*s),
                Some(prev) if prev != *s => {
                    log::warn!("object {id}: conflicting sizes {prev} and {s}; keeping {prev}")
                }
                _ => {}
            }
        }
        events.push(RequestEvent {
            time: *time,
            object,
        });
    }
    let horizon = events.last().map_or(0.0, |e| e.time);
    let origin = events.first().map_or(0.0, |e| e.time);
    let mut trace = RequestTrace {
        events,
        origin,
        horizon,
        modulation: None,
    };
    trace.canonicalize();
    let catalog = Catalog::new(sizes.into_iter().map(|s| s.unwrap_or(1.0)).collect(), None)?;
    Ok(LoadedTrace {
        trace,
        catalog,
        mapping: IdMapping { originals },
    })
}

/// Writes `timestamp,object_id,size` with dense 1-based ids.
pub fn write_trace_csv(trace: &RequestTrace, catalog: &Catalog, path: impl AsRef<Path>) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    writeln!(w, "timestamp,object_id,size")?;
    for e in &trace.events {
        if e.object >= catalog.n() {
            return Err(Error::arg(format!("event object {} outside catalog", e.object + 1)));
        }
        writeln!(w, "{},{},{}", e.time, e.object + 1, catalog.sizes()[e.object])?;
    }
    w.flush()?;
    Ok(())
}

/// Sidecar `original_id,dense_id`.
pub fn write_id_mapping_csv(mapping: &IdMapping, path: impl AsRef<Path>) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["original_id", "dense_id"])?;
    for (d, orig) in mapping.originals.iter().enumerate() {
        w.write_record([orig.as_str(), &(d + 1).to_string()])?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn write_tmp(contents: &str) -> tempfile::NamedTempFile {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        f.write_all(contents.as_bytes()).unwrap();
        f
    }

    #[test]
    fn string_ids() {
        let f = write_tmp("0.5,a\n1.0,b\n1.5,a\n");
        let l = load_trace_csv(f.path()).unwrap();
        assert_eq!(l.trace.len(), 3);
        assert_eq!(l.catalog.n(), 2);
        assert_eq!(l.mapping.originals, vec!["a", "b"]);
        let objs: Vec<usize> = l.trace.events.iter().map(|e| e.object).collect();
        assert_eq!(objs, vec![0, 1, 0]);
    }

    #[test]
    fn too_many_fields() {
        let f = write_tmp("x,y,z,w\n");
        match load_trace_csv(f.path()) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 1),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn bad_timestamp_reports_line() {
        let f = write_tmp("timestamp,object_id\n1.0,a\nnope,b\n");
        match load_trace_csv(f.path()) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn unsorted_rows_are_sorted() {
        let f = write_tmp("2.0,7\n1.0,3\n3.0,7,4.5\n");
        let l = load_trace_csv(f.path()).unwrap();
        assert!(l.trace.is_strictly_ordered());
        assert_eq!(l.mapping.originals, vec!["3", "7"]);
        assert_eq!(l.catalog.sizes(), &[1.0, 4.5]);
    }
}
