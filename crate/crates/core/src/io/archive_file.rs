//! Versioned text format for archives, plus CSV heatmaps.

use std::fmt::Write as _;
use std::path::Path;

use crate::archive::{cell_index, Archive, Elite, GridSpec};
use crate::environment::LevelGenotype;
use crate::policies::{PolicySpec, PolicyKind};
use crate::scalar::fmt_sig9;
use crate::{Error, Result, Scalar};

pub const FORMAT_VERSION: u32 = 1;

/// An archive with the roster and search seed needed to interpret it.
#[derive(Debug, Clone, PartialEq)]
pub struct ArchiveFile<T> {
    pub archive: Archive<T>,
    pub roster: Vec<PolicySpec>,
    pub target: PolicySpec,
    pub seed: u64,
}

impl<T: Scalar> ArchiveFile<T> {
    pub fn policy_index(&self, id: &str) -> Result<usize> {
        self.roster
            .iter()
            .position(|p| p.id == id)
            .ok_or_else(|| Error::UnknownPolicy(id.into()))
    }
}

fn policy_line(tag: &str, p: &PolicySpec) -> String {
    format!("{tag} = {} {} {} {}\n", p.id, p.kind.name(), p.skill, p.flaws)
}

/// Header lines, then one record per occupied cell in key order:
/// `policy_id x_bin y_bin regret xp_mean sp_mean eval_seed iteration_found coords...`.
pub fn archive_to_string<T: Scalar>(file: &ArchiveFile<T>) -> String {
    let a = &file.archive;
    let g = a.spec();
    let mut s = String::new();
    let _ = writeln!(s, "format_version = {FORMAT_VERSION}");
    let _ = writeln!(
        s,
        "grid = {} {} {} {} {} {}",
        g.x_bins,
        g.y_bins,
        fmt_sig9(g.x_range.0),
        fmt_sig9(g.x_range.1),
        fmt_sig9(g.y_range.0),
        fmt_sig9(g.y_range.1)
    );
    let _ = writeln!(s, "offset = {}", fmt_sig9(a.offset()));
    let _ = writeln!(s, "seed = {}", file.seed);
    let _ = writeln!(s, "policies = {}", file.roster.len());
    for p in &file.roster {
        s.push_str(&policy_line("policy", p));
    }
    s.push_str(&policy_line("target", &file.target));
    let _ = writeln!(s, "records = {}", a.len());
    for (key, e) in a.iter() {
        let _ = write!(
            s,
            "{} {} {} {} {} {} {} {}",
            file.roster[key.policy_index].id,
            key.x_bin,
            key.y_bin,
            fmt_sig9(e.regret),
            fmt_sig9(e.xp_mean),
            fmt_sig9(e.sp_mean),
            e.eval_seed,
            e.iteration_found
        );
        for c in e.level.coords() {
            s.push(' ');
            s.push_str(&fmt_sig9(*c));
        }
        s.push('\n');
    }
    s
}

struct Lines<'a> {
    inner: std::iter::Enumerate<std::str::Lines<'a>>,
    last: usize,
}

impl<'a> Lines<'a> {
    fn next_line(&mut self) -> Result<(usize, &'a str)> {
        match self.inner.next() {
            Some((i, l)) => {
                self.last = i + 1;
                Ok((i + 1, l))
            }
            None => Err(Error::Malformed {
                line: self.last + 1,
                message: "unexpected end of file".into(),
            }),
        }
    }

    fn header(&mut self, name: &str) -> Result<(usize, &'a str)> {
        let (n, l) = self.next_line()?;
        match l.split_once('=') {
            Some((k, v)) if k.trim() == name => Ok((n, v.trim())),
            _ => Err(Error::Malformed {
                line: n,
                message: format!("expected `{name} = ...`"),
            }),
        }
    }
}

fn field<V: std::str::FromStr>(line: usize, what: &str, s: Option<&str>) -> Result<V> {
    let s = s.ok_or_else(|| Error::Malformed {
        line,
        message: format!("missing {what}"),
    })?;
    s.parse().map_err(|_| Error::Malformed {
        line,
        message: format!("bad {what} `{s}`"),
    })
}

fn parse_policy(line: usize, v: &str) -> Result<PolicySpec> {
    let mut it = v.split_whitespace();
    let id: String = field(line, "policy id", it.next())?;
    let kind: PolicyKind = field(line, "policy kind", it.next())?;
    let skill: f64 = field(line, "skill", it.next())?;
    let flaws = field(line, "flaws", it.next())?;
    if it.next().is_some() {
        return Err(Error::Malformed {
            line,
            message: "trailing fields in policy line".into(),
        });
    }
    Ok(PolicySpec { kind, skill, flaws, id })
}

pub fn parse_archive<T: Scalar>(text: &str) -> Result<ArchiveFile<T>> {
    let mut lines = Lines {
        inner: text.lines().enumerate(),
        last: 0,
    };
    let (n, v) = lines.header("format_version")?;
    let version: u32 = field(n, "format version", Some(v))?;
    if version != FORMAT_VERSION {
        return Err(Error::Version(format!("archive format {version}, expected {FORMAT_VERSION}")));
    }
    let (n, v) = lines.header("grid")?;
    let mut it = v.split_whitespace();
    let x_bins = field(n, "x_bins", it.next())?;
    let y_bins = field(n, "y_bins", it.next())?;
    let x_range = (field(n, "x range", it.next())?, field(n, "x range", it.next())?);
    let y_range = (field(n, "y range", it.next())?, field(n, "y range", it.next())?);
    let (n, v) = lines.header("offset")?;
    let offset: T = field(n, "offset", Some(v))?;
    let (n, v) = lines.header("seed")?;
    let seed = field(n, "seed", Some(v))?;
    let (n, v) = lines.header("policies")?;
    let count: usize = field(n, "policy count", Some(v))?;
    let mut roster = Vec::with_capacity(count);
    for _ in 0..count {
        let (n, v) = lines.header("policy")?;
        roster.push(parse_policy(n, v)?);
    }
    let (n, v) = lines.header("target")?;
    let target = parse_policy(n, v)?;
    let (n, v) = lines.header("records")?;
    let records: usize = field(n, "record count", Some(v))?;

    let spec = GridSpec {
        x_bins,
        y_bins,
        x_range,
        y_range,
        policy_count: count,
    };
    let mut archive = Archive::new(spec, offset).map_err(|e| Error::Malformed {
        line: n,
        message: e.to_string(),
    })?;
    let file = ArchiveFile {
        archive: archive.clone(),
        roster,
        target,
        seed,
    };
    for _ in 0..records {
        let (n, l) = lines.next_line()?;
        let mut it = l.split_whitespace();
        let id: String = field(n, "policy id", it.next())?;
        let policy_index = file.policy_index(&id).map_err(|_| Error::Malformed {
            line: n,
            message: format!("policy `{id}` not in roster"),
        })?;
        let x_bin: usize = field(n, "x_bin", it.next())?;
        let y_bin: usize = field(n, "y_bin", it.next())?;
        let regret = field(n, "regret", it.next())?;
        let xp_mean = field(n, "xp_mean", it.next())?;
        let sp_mean = field(n, "sp_mean", it.next())?;
        let eval_seed = field(n, "eval_seed", it.next())?;
        let iteration_found = field(n, "iteration_found", it.next())?;
        let coords = it
            .map(|c| field(n, "coordinate", Some(c)))
            .collect::<Result<Vec<T>>>()?;
        let level = LevelGenotype::new(coords).map_err(|e| Error::Malformed {
            line: n,
            message: e.to_string(),
        })?;
        let descriptor = level.descriptor();
        let key = cell_index(descriptor, archive.spec(), policy_index)?;
        if (key.x_bin, key.y_bin) != (x_bin, y_bin) {
            return Err(Error::Malformed {
                line: n,
                message: format!("ball lies in cell ({}, {}), record says ({x_bin}, {y_bin})", key.x_bin, key.y_bin),
            });
        }
        let elite = Elite {
            level,
            regret,
            xp_mean,
            sp_mean,
            descriptor,
            policy_index,
            eval_seed,
            iteration_found,
        };
        if archive.get(key).is_some() {
            return Err(Error::Malformed {
                line: n,
                message: "duplicate cell".into(),
            });
        }
        archive.overwrite(elite).map_err(|e| Error::Malformed {
            line: n,
            message: e.to_string(),
        })?;
    }
    if let Ok((n, l)) = lines.next_line() {
        if !l.trim().is_empty() {
            return Err(Error::Malformed {
                line: n,
                message: "more records than declared".into(),
            });
        }
    }
    Ok(ArchiveFile { archive, ..file })
}

pub fn save_archive<T: Scalar>(file: &ArchiveFile<T>, path: &Path) -> Result<()> {
    std::fs::write(path, archive_to_string(file))?;
    Ok(())
}

pub fn load_archive<T: Scalar>(path: &Path) -> Result<ArchiveFile<T>> {
    parse_archive(&std::fs::read_to_string(path)?)
}

/// Regret grid of one policy: `y_bins` rows by `x_bins` columns, row index
/// equal to `y_bin`. Empty cells are empty fields.
pub fn heatmap_csv<T: Scalar>(archive: &Archive<T>, policy_index: usize) -> Result<String> {
    let g = archive.spec();
    if policy_index >= g.policy_count {
        return Err(Error::UnknownPolicy(format!("index {policy_index}")));
    }
    let mut grid = vec![vec![String::new(); g.x_bins]; g.y_bins];
    for (k, e) in archive.iter_policy(policy_index) {
        grid[k.y_bin][k.x_bin] = e.regret.to_string();
    }
    let mut s = String::new();
    for row in grid {
        s.push_str(&row.join(","));
        s.push('\n');
    }
    Ok(s)
}

/// Writes `<dir>/<policy_id>.csv`.
pub fn export_heatmap<T: Scalar>(file: &ArchiveFile<T>, policy_id: &str, dir: &Path) -> Result<std::path::PathBuf> {
    let p = file.policy_index(policy_id)?;
    let path = dir.join(format!("{policy_id}.csv"));
    std::fs::write(&path, heatmap_csv(&file.archive, p)?)?;
    Ok(path)
}
