//! OR-Library job-shop instance files.
//!
//! Accepted layout: the first non-comment line holds `n m`, followed by `n`
//! job lines of `m` whitespace-separated `machine duration` pairs. Blank lines
//! and lines starting with `#` are skipped. Machine indices may be 0-based or
//! 1-based: an index equal to `m` marks a 1-based file, otherwise 0-based is
//! assumed.
//!
//! [`load_suite`] also understands the concatenated OR-Library file, where each
//! instance is introduced by a line `instance <name>` and separated by lines
//! of `+` characters, with a free-text description before the header.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::error::ParseError;
use crate::jobshop::{JsspInstance, Operation};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstanceRecord {
    pub name: String,
    pub instance: JsspInstance,
    pub best_known: Option<u64>,
}

#[derive(Debug, Error)]
pub enum LoadError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error("{path}: {source}")]
    Parse {
        path: PathBuf,
        #[source]
        source: ParseError,
    },
    #[error("{path}: expected one instance, found {count}")]
    NotSingle { path: PathBuf, count: usize },
    #[error("{path}: instance `{name}`: {source}")]
    ParseSection {
        path: PathBuf,
        name: String,
        #[source]
        source: ParseError,
    },
}

/// Best-known makespans of LA01..LA21.
const BEST_KNOWN: [(&str, u64); 21] = [
    ("LA01", 666),
    ("LA02", 655),
    ("LA03", 597),
    ("LA04", 590),
    ("LA05", 593),
    ("LA06", 926),
    ("LA07", 890),
    ("LA08", 863),
    ("LA09", 951),
    ("LA10", 958),
    ("LA11", 1222),
    ("LA12", 1039),
    ("LA13", 1150),
    ("LA14", 1292),
    ("LA15", 1207),
    ("LA16", 945),
    ("LA17", 784),
    ("LA18", 848),
    ("LA19", 842),
    ("LA20", 902),
    ("LA21", 1046),
];

pub fn best_known_registry() -> BTreeMap<&'static str, u64> {
    BEST_KNOWN.into_iter().collect()
}

/// Case-insensitive lookup in the best-known registry.
pub fn best_known(name: &str) -> Option<u64> {
    BEST_KNOWN
        .iter()
        .find(|(n, _)| n.eq_ignore_ascii_case(name))
        .map(|&(_, v)| v)
}

struct Token<'a> {
    text: &'a str,
    column: usize,
}

fn tokens(line: &str) -> Vec<Token<'_>> {
    let mut out = Vec::new();
    let mut start = None;
    for (i, c) in line.char_indices() {
        if c.is_ascii_whitespace() {
            if let Some(s) = start.take() {
                out.push(Token {
                    text: &line[s..i],
                    column: s + 1,
                });
            }
        } else if start.is_none() {
            start = Some(i);
        }
    }
    if let Some(s) = start {
        out.push(Token {
            text: &line[s..],
            column: s + 1,
        });
    }
    out
}

fn integer(tok: &Token<'_>, line: usize) -> Result<i64, ParseError> {
    let digits = tok.text.strip_prefix(['-', '+']).unwrap_or(tok.text);
    let invalid = || ParseError::InvalidToken {
        line,
        column: tok.column,
        token: tok.text.to_string(),
    };
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return Err(invalid());
    }
    tok.text.parse().map_err(|_| invalid())
}

fn is_skipped(line: &str) -> bool {
    let t = line.trim_start();
    t.is_empty() || t.starts_with('#')
}

/// Parses a single instance.
pub fn parse_instance(text: &str) -> Result<JsspInstance, ParseError> {
    parse_lines(text.lines().enumerate().map(|(i, l)| (i + 1, l)))
}

fn parse_lines<'a>(
    lines: impl Iterator<Item = (usize, &'a str)>,
) -> Result<JsspInstance, ParseError> {
    let mut lines = lines.filter(|(_, l)| !is_skipped(l));

    let (header_line, header) = lines.next().ok_or(ParseError::Empty)?;
    let toks = tokens(header);
    if toks.len() != 2 {
        return Err(ParseError::MalformedHeader { line: header_line });
    }
    let n = integer(&toks[0], header_line)?;
    let m = integer(&toks[1], header_line)?;
    if n < 1 || m < 1 {
        return Err(ParseError::MalformedHeader { line: header_line });
    }
    let (n, m) = (n as usize, m as usize);

    // (line, column, machine as written, duration)
    let mut raw: Vec<Vec<(usize, usize, i64, u64)>> = Vec::with_capacity(n);
    for (line_no, line) in lines.by_ref().take(n) {
        let toks = tokens(line);
        if toks.len() != 2 * m {
            return Err(ParseError::TokenCount {
                line: line_no,
                machines: m,
                expected: 2 * m,
                found: toks.len(),
            });
        }
        let mut route = Vec::with_capacity(m);
        for pair in toks.chunks(2) {
            let machine = integer(&pair[0], line_no)?;
            let duration = integer(&pair[1], line_no)?;
            if duration < 0 {
                return Err(ParseError::NegativeDuration {
                    line: line_no,
                    column: pair[1].column,
                    duration,
                });
            }
            if machine < 0 || machine > m as i64 {
                return Err(ParseError::MachineOutOfRange {
                    line: line_no,
                    column: pair[0].column,
                    machine,
                });
            }
            route.push((line_no, pair[0].column, machine, duration as u64));
        }
        raw.push(route);
    }
    if raw.len() != n {
        return Err(ParseError::MissingJobs {
            expected: n,
            found: raw.len(),
        });
    }
    if let Some((line, _)) = lines.next() {
        return Err(ParseError::TrailingContent { line });
    }

    let ops = raw.iter().flatten();
    let has_top = ops.clone().any(|&(_, _, mach, _)| mach == m as i64);
    let has_zero = ops.clone().any(|&(_, _, mach, _)| mach == 0);
    if has_top && has_zero {
        // Both ends present: the first `m` encountered is the odd one out.
        let &(line, column, machine, _) = ops
            .clone()
            .find(|&&(_, _, mach, _)| mach == m as i64)
            .expect("has_top");
        return Err(ParseError::MachineOutOfRange {
            line,
            column,
            machine,
        });
    }
    let offset = usize::from(has_top);

    let mut jobs = Vec::with_capacity(n);
    for route in &raw {
        let mut seen = vec![false; m];
        let mut ops = Vec::with_capacity(m);
        for &(line, column, machine, duration) in route {
            let idx = machine as usize - offset;
            if std::mem::replace(&mut seen[idx], true) {
                return Err(ParseError::DuplicateMachine {
                    line,
                    column,
                    machine,
                });
            }
            ops.push(Operation::new(idx, duration));
        }
        jobs.push(ops);
    }
    Ok(JsspInstance::new(jobs).expect("routes checked during parsing"))
}

/// Writes an instance in the accepted format with 0-based machines.
pub fn serialize_instance(inst: &JsspInstance) -> String {
    let mut out = format!("{} {}\n", inst.n_jobs(), inst.n_machines());
    for route in inst.jobs() {
        let line: Vec<String> = route
            .iter()
            .map(|op| format!("{} {}", op.machine, op.duration))
            .collect();
        let _ = writeln!(out, "{}", line.join(" "));
    }
    out
}

fn record(name: String, instance: JsspInstance) -> InstanceRecord {
    let best_known = best_known(&name);
    InstanceRecord {
        name,
        instance,
        best_known,
    }
}

fn section_name(line: &str) -> Option<&str> {
    let mut toks = line.split_ascii_whitespace();
    (toks.next() == Some("instance"))
        .then(|| toks.next())
        .flatten()
}

fn is_separator(line: &str) -> bool {
    let t = line.trim();
    !t.is_empty() && t.bytes().all(|b| b == b'+')
}

fn is_header(line: &str) -> bool {
    let toks: Vec<_> = line.split_ascii_whitespace().collect();
    toks.len() == 2 && toks.iter().all(|t| t.bytes().all(|b| b.is_ascii_digit()))
}

/// Splits a concatenated OR-Library file into named instances.
pub fn parse_multi(text: &str) -> Result<Vec<(String, JsspInstance)>, (String, ParseError)> {
    let lines: Vec<(usize, &str)> = text.lines().enumerate().map(|(i, l)| (i + 1, l)).collect();
    let starts: Vec<usize> = lines
        .iter()
        .enumerate()
        .filter(|(_, (_, l))| section_name(l).is_some())
        .map(|(i, _)| i)
        .collect();
    let mut out = Vec::with_capacity(starts.len());
    for (k, &s) in starts.iter().enumerate() {
        let end = starts.get(k + 1).copied().unwrap_or(lines.len());
        let name = section_name(lines[s].1)
            .unwrap_or_default()
            .to_ascii_uppercase();
        let body = &lines[s + 1..end];
        let header = body
            .iter()
            .position(|(_, l)| is_header(l))
            .ok_or_else(|| (name.clone(), ParseError::Empty))?;
        let inst = parse_lines(
            body[header..]
                .iter()
                .copied()
                .filter(|(_, l)| !is_separator(l)),
        )
        .map_err(|e| (name.clone(), e))?;
        out.push((name, inst));
    }
    Ok(out)
}

fn read(path: &Path) -> Result<String, LoadError> {
    fs::read_to_string(path).map_err(|source| LoadError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn load_file(path: &Path) -> Result<Vec<InstanceRecord>, LoadError> {
    let text = read(path)?;
    if text.lines().any(|l| section_name(l).is_some()) {
        let named = parse_multi(&text).map_err(|(name, source)| LoadError::ParseSection {
            path: path.to_path_buf(),
            name,
            source,
        })?;
        return Ok(named.into_iter().map(|(n, i)| record(n, i)).collect());
    }
    let instance = parse_instance(&text).map_err(|source| LoadError::Parse {
        path: path.to_path_buf(),
        source,
    })?;
    let name = path
        .file_stem()
        .map(|s| s.to_string_lossy().to_ascii_uppercase())
        .unwrap_or_default();
    Ok(vec![record(name, instance)])
}

/// Loads every instance file in a directory (hidden files skipped), or the
/// instances of a single file. Records come back sorted by name.
pub fn load_suite(path: &Path) -> Result<Vec<InstanceRecord>, LoadError> {
    let io_err = |source| LoadError::Io {
        path: path.to_path_buf(),
        source,
    };
    let meta = fs::metadata(path).map_err(io_err)?;
    let mut records = if meta.is_dir() {
        let mut files = Vec::new();
        for entry in fs::read_dir(path).map_err(io_err)? {
            let entry = entry.map_err(io_err)?;
            let p = entry.path();
            let hidden = p
                .file_name()
                .is_some_and(|n| n.to_string_lossy().starts_with('.'));
            if p.is_file() && !hidden {
                files.push(p);
            }
        }
        let mut records = Vec::new();
        for file in files {
            records.extend(load_file(&file)?);
        }
        records
    } else {
        load_file(path)?
    };
    records.sort_by(|a, b| a.name.cmp(&b.name));
    Ok(records)
}

/// Loads a single instance file as a named record.
pub fn load_instance(path: &Path) -> Result<InstanceRecord, LoadError> {
    let mut records = load_file(path)?;
    match records.len() {
        1 => Ok(records.remove(0)),
        count => Err(LoadError::NotSingle {
            path: path.to_path_buf(),
            count,
        }),
    }
}
