//! Scheme file format and classification archives.
//!
//! Canonical format: optional `#` comment lines, then a header line
//! `n rank [label]`, then n rows of n whitespace-separated relation
//! indices. Writing then parsing then writing is byte-identical.
//!
//! Tolerant mode accepts bare integer matrices (no header) as found in
//! published classification dumps: the diagonal color is inferred and
//! renumbered to 0, and gaps in the color range are compacted.

use crate::error::{Error, Result};
use crate::scheme::Scheme;
use serde::{Deserialize, Serialize};
use std::path::Path;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ParseMode {
    Canonical,
    Tolerant,
}

/// What the parser had to do to the input colors.
#[derive(Debug, Clone, Default)]
pub struct ParseInfo {
    pub label: Option<String>,
    /// original color -> new color, when renumbering happened.
    pub renumbering: Option<Vec<(u16, u16)>>,
}

fn parse_error(line: usize, col: usize, msg: impl Into<String>) -> Error {
    Error::ParseError {
        line,
        col,
        msg: msg.into(),
    }
}

/// Parse a scheme file. Lines are 1-indexed in errors.
pub fn parse_scheme(text: &str, mode: ParseMode) -> Result<(Scheme, ParseInfo)> {
    let mut lines: Vec<(usize, &str)> = Vec::new();
    let mut seen_content = false;
    for (i, raw) in text.lines().enumerate() {
        let trimmed = raw.trim();
        if trimmed.is_empty() {
            continue;
        }
        if trimmed.starts_with('#') {
            if seen_content {
                return Err(parse_error(i + 1, 1, "comments are only allowed before the header"));
            }
            continue;
        }
        seen_content = true;
        lines.push((i + 1, trimmed));
    }
    if lines.is_empty() {
        return Err(parse_error(1, 1, "empty input"));
    }
    match mode {
        ParseMode::Canonical => parse_canonical(&lines),
        ParseMode::Tolerant => parse_tolerant(&lines),
    }
}

fn parse_int(line_no: usize, line: &str, token: &str) -> Result<usize> {
    token.parse::<usize>().map_err(|_| {
        let col = line.find(token).map(|c| c + 1).unwrap_or(1);
        parse_error(line_no, col, format!("expected an integer, found '{token}'"))
    })
}

fn parse_canonical(lines: &[(usize, &str)]) -> Result<(Scheme, ParseInfo)> {
    let (header_no, header) = lines[0];
    let mut tokens = header.split_whitespace();
    let n = parse_int(
        header_no,
        header,
        tokens.next().ok_or_else(|| parse_error(header_no, 1, "missing point count"))?,
    )?;
    let rank = parse_int(
        header_no,
        header,
        tokens
            .next()
            .ok_or_else(|| parse_error(header_no, 1, "missing rank"))?,
    )?;
    let rest: Vec<&str> = tokens.collect();
    let label = if rest.is_empty() {
        None
    } else {
        Some(rest.join(" "))
    };

    if lines.len() != n + 1 {
        return Err(parse_error(
            lines.last().map(|&(l, _)| l).unwrap_or(header_no),
            1,
            format!("expected {} rows, found {}", n, lines.len() - 1),
        ));
    }
    let mut color = Vec::with_capacity(n * n);
    for row in 0..n {
        let (line_no, line) = lines[row + 1];
        let mut count = 0;
        for token in line.split_whitespace() {
            let v = parse_int(line_no, line, token)?;
            if v >= rank {
                let col = line.find(token).map(|c| c + 1).unwrap_or(1);
                return Err(parse_error(
                    line_no,
                    col,
                    format!("relation index {v} out of range 0..{rank}"),
                ));
            }
            color.push(v as u16);
            count += 1;
        }
        if count != n {
            return Err(parse_error(
                line_no,
                1,
                format!("row has {count} entries, expected {n}"),
            ));
        }
    }
    let scheme = Scheme::from_flat(n, color)?;
    if scheme.rank() != rank {
        return Err(parse_error(
            header_no,
            1,
            format!("header declares rank {rank} but the matrix has rank {}", scheme.rank()),
        ));
    }
    Ok((
        scheme,
        ParseInfo {
            label,
            renumbering: None,
        },
    ))
}

fn parse_tolerant(lines: &[(usize, &str)]) -> Result<(Scheme, ParseInfo)> {
    let n = lines[0].1.split_whitespace().count();
    if lines.len() != n {
        return Err(parse_error(
            lines[0].0,
            1,
            format!("expected {} rows of {} entries, found {} rows", n, n, lines.len()),
        ));
    }
    let mut raw = Vec::with_capacity(n * n);
    for &(line_no, line) in lines {
        let mut count = 0;
        for token in line.split_whitespace() {
            let v = parse_int(line_no, line, token)?;
            if v > u16::MAX as usize {
                return Err(parse_error(line_no, 1, format!("color {v} too large")));
            }
            raw.push(v as u16);
            count += 1;
        }
        if count != n {
            return Err(parse_error(
                line_no,
                1,
                format!("row has {count} entries, expected {n}"),
            ));
        }
    }

    // infer the diagonal color and compact the color range, moving the
    // diagonal to 0 and keeping the remaining colors in order
    let diag = raw[0];
    for x in 0..n {
        if raw[x * n + x] != diag {
            return Err(parse_error(
                lines[x].0,
                1,
                "diagonal is not a single color",
            ));
        }
    }
    let mut present: Vec<u16> = raw.clone();
    present.sort_unstable();
    present.dedup();
    let mut mapping: Vec<(u16, u16)> = Vec::with_capacity(present.len());
    mapping.push((diag, 0));
    let mut next = 1u16;
    for &c in &present {
        if c != diag {
            mapping.push((c, next));
            next += 1;
        }
    }
    let lut: std::collections::HashMap<u16, u16> = mapping.iter().copied().collect();
    let color: Vec<u16> = raw.iter().map(|c| lut[c]).collect();
    let identity_map = mapping.iter().all(|&(a, b)| a == b);
    let scheme = Scheme::from_flat(n, color)?;
    Ok((
        scheme,
        ParseInfo {
            label: None,
            renumbering: if identity_map { None } else { Some(mapping) },
        },
    ))
}

/// Canonical text form: header then rows, single spaces, trailing newline.
pub fn write_scheme(scheme: &Scheme, label: Option<&str>) -> String {
    let n = scheme.n();
    let mut out = String::new();
    match label {
        Some(l) => out.push_str(&format!("{} {} {}\n", n, scheme.rank(), l)),
        None => out.push_str(&format!("{} {}\n", n, scheme.rank())),
    }
    for x in 0..n {
        let row: Vec<String> = (0..n)
            .map(|y| scheme.color(x as u32, y as u32).to_string())
            .collect();
        out.push_str(&row.join(" "));
        out.push('\n');
    }
    out
}

/// Archive manifest, stored as `manifest.json` beside the data.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Manifest {
    pub schema: u32,
    pub family: String,
    pub count: usize,
    pub description: String,
}

#[derive(Debug)]
pub struct ArchiveEntry {
    pub label: String,
    pub scheme: Scheme,
}

/// A labeled collection of schemes plus any per-entry errors encountered
/// while loading.
#[derive(Debug)]
pub struct Archive {
    pub entries: Vec<ArchiveEntry>,
    pub errors: Vec<(String, Error)>,
    pub manifest: Option<Manifest>,
}

impl Archive {
    pub fn get(&self, label: &str) -> Option<&Scheme> {
        self.entries
            .iter()
            .find(|e| e.label == label)
            .map(|e| &e.scheme)
    }
}

/// Load an archive from a directory (all `*.scheme` files plus an
/// optional `manifest.json`) or from one concatenated file whose entries
/// are separated by blank lines. Entry errors are collected, not fatal.
pub fn load_archive(path: &Path) -> Result<Archive> {
    if path.is_dir() {
        load_archive_dir(path)
    } else {
        load_archive_file(path)
    }
}

fn load_archive_dir(dir: &Path) -> Result<Archive> {
    let mut entries = Vec::new();
    let mut errors = Vec::new();
    let mut files: Vec<std::path::PathBuf> = std::fs::read_dir(dir)?
        .filter_map(|e| e.ok())
        .map(|e| e.path())
        .filter(|p| p.extension().map(|e| e == "scheme").unwrap_or(false))
        .collect();
    files.sort();
    for file in files {
        let name = file.file_name().unwrap_or_default().to_string_lossy().to_string();
        match std::fs::read_to_string(&file) {
            Ok(text) => collect_entries(&text, &name, &mut entries, &mut errors),
            Err(e) => errors.push((name, e.into())),
        }
    }
    let manifest = read_manifest(&dir.join("manifest.json"), &entries, &mut errors);
    check_label_uniqueness(&entries, &mut errors);
    Ok(Archive {
        entries,
        errors,
        manifest,
    })
}

fn load_archive_file(path: &Path) -> Result<Archive> {
    let text = std::fs::read_to_string(path)?;
    let mut entries = Vec::new();
    let mut errors = Vec::new();
    let name = path.file_name().unwrap_or_default().to_string_lossy().to_string();
    collect_entries(&text, &name, &mut entries, &mut errors);
    let manifest_path = path.with_extension("manifest.json");
    let manifest = read_manifest(&manifest_path, &entries, &mut errors);
    check_label_uniqueness(&entries, &mut errors);
    Ok(Archive {
        entries,
        errors,
        manifest,
    })
}

fn collect_entries(
    text: &str,
    source: &str,
    entries: &mut Vec<ArchiveEntry>,
    errors: &mut Vec<(String, Error)>,
) {
    for (i, block) in text.split("\n\n").enumerate() {
        if block.trim().is_empty() {
            continue;
        }
        match parse_scheme(block, ParseMode::Canonical) {
            Ok((scheme, info)) => {
                let label = info.label.unwrap_or_else(|| format!("{source}#{i}"));
                entries.push(ArchiveEntry { label, scheme });
            }
            Err(e) => errors.push((format!("{source}#{i}"), e)),
        }
    }
}

fn read_manifest(
    path: &Path,
    entries: &[ArchiveEntry],
    errors: &mut Vec<(String, Error)>,
) -> Option<Manifest> {
    if !path.exists() {
        return None;
    }
    match std::fs::read_to_string(path)
        .map_err(Error::from)
        .and_then(|t| {
            serde_json::from_str::<Manifest>(&t).map_err(|e| Error::Io(format!("bad manifest: {e}")))
        }) {
        Ok(manifest) => {
            if manifest.count != entries.len() {
                errors.push((
                    "manifest".into(),
                    Error::Io(format!(
                        "manifest declares {} entries but {} were loaded",
                        manifest.count,
                        entries.len()
                    )),
                ));
            }
            Some(manifest)
        }
        Err(e) => {
            errors.push(("manifest".into(), e));
            None
        }
    }
}

fn check_label_uniqueness(entries: &[ArchiveEntry], errors: &mut Vec<(String, Error)>) {
    let mut seen = std::collections::HashSet::new();
    for e in entries {
        if !seen.insert(&e.label) {
            errors.push((e.label.clone(), Error::Io("duplicate label".into())));
        }
    }
}

/// Serialize an archive as one concatenated canonical file.
pub fn write_archive(entries: &[(String, Scheme)]) -> String {
    let mut out = String::new();
    for (i, (label, scheme)) in entries.iter().enumerate() {
        if i > 0 {
            out.push('\n');
        }
        out.push_str(&write_scheme(scheme, Some(label)));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::construct::{thin_scheme, wreath};
    use crate::group::FiniteGroup;

    fn c3() -> Scheme {
        thin_scheme(&FiniteGroup::cyclic(3))
    }

    #[test]
    fn canonical_roundtrip() {
        let s = c3();
        let text = write_scheme(&s, Some("c3"));
        assert_eq!(text, "3 3 c3\n0 1 2\n2 0 1\n1 2 0\n");
        let (parsed, info) = parse_scheme(&text, ParseMode::Canonical).unwrap();
        assert_eq!(parsed, s);
        assert_eq!(info.label.as_deref(), Some("c3"));
        assert_eq!(write_scheme(&parsed, info.label.as_deref()), text);
    }

    #[test]
    fn comments_before_header_only() {
        let text = "# a comment\n3 3\n0 1 2\n2 0 1\n1 2 0\n";
        assert!(parse_scheme(text, ParseMode::Canonical).is_ok());
        let bad = "3 3\n0 1 2\n# not here\n2 0 1\n1 2 0\n";
        assert!(matches!(
            parse_scheme(bad, ParseMode::Canonical),
            Err(Error::ParseError { line: 3, .. })
        ));
    }

    #[test]
    fn truncated_body_is_a_parse_error() {
        let text = "3 3\n0 1 2\n2 0 1\n";
        assert!(matches!(
            parse_scheme(text, ParseMode::Canonical),
            Err(Error::ParseError { .. })
        ));
    }

    #[test]
    fn tolerant_mode_renumbers_the_diagonal() {
        // same C3 scheme but with colors shifted: diagonal is 7
        let text = "7 8 9\n9 7 8\n8 9 7\n";
        let (s, info) = parse_scheme(text, ParseMode::Tolerant).unwrap();
        assert_eq!(s, c3());
        let m = info.renumbering.unwrap();
        assert!(m.contains(&(7, 0)));
        assert!(m.contains(&(8, 1)));
        assert!(m.contains(&(9, 2)));
    }

    #[test]
    fn tolerant_mode_rejects_mixed_diagonal() {
        let text = "0 1 1\n1 2 1\n1 1 0\n";
        assert!(parse_scheme(text, ParseMode::Tolerant).is_err());
    }

    #[test]
    fn bad_tokens_report_position() {
        let text = "3 x\n";
        match parse_scheme(text, ParseMode::Canonical) {
            Err(Error::ParseError { line: 1, col, .. }) => assert_eq!(col, 3),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn archive_roundtrip_and_manifest() {
        let dir = std::env::temp_dir().join(format!("ascheme-io-test-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let entries = vec![
            ("fam.no.1".to_string(), c3()),
            ("fam.no.2".to_string(), wreath(&c3(), &c3())),
        ];
        std::fs::write(dir.join("fam.scheme"), write_archive(&entries)).unwrap();
        let manifest = Manifest {
            schema: 1,
            family: "fam".into(),
            count: 2,
            description: "test".into(),
        };
        std::fs::write(
            dir.join("manifest.json"),
            serde_json::to_string_pretty(&manifest).unwrap(),
        )
        .unwrap();

        let archive = load_archive(&dir).unwrap();
        assert_eq!(archive.entries.len(), 2);
        assert!(archive.errors.is_empty(), "{:?}", archive.errors);
        assert_eq!(archive.manifest.as_ref().unwrap().count, 2);
        assert!(archive.get("fam.no.2").is_some());
        std::fs::remove_dir_all(&dir).unwrap();
    }

    #[test]
    fn archive_collects_entry_errors() {
        let good = write_scheme(&c3(), Some("ok.no.1"));
        let bad = "2 2 broken\n0 1\n0 1\n";
        let text = format!("{good}\n{bad}");
        let dir = std::env::temp_dir().join(format!("ascheme-io-err-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let file = dir.join("mixed.scheme");
        std::fs::write(&file, text).unwrap();
        let archive = load_archive(&file).unwrap();
        assert_eq!(archive.entries.len(), 1);
        assert_eq!(archive.errors.len(), 1);
        std::fs::remove_dir_all(&dir).unwrap();
    }

    #[test]
    fn empty_dir_is_an_empty_archive() {
        let dir = std::env::temp_dir().join(format!("ascheme-io-empty-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let archive = load_archive(&dir).unwrap();
        assert!(archive.entries.is_empty());
        assert!(archive.errors.is_empty());
        std::fs::remove_dir_all(&dir).unwrap();
    }
}
