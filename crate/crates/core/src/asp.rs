//! ASP fact export for runtime tables and schedules, plus the bundled
//! scheduling encodings. Exported runtime facts can be read back.
//!
//! Names become ASP constants by lowercasing, replacing every character
//! outside `[a-z0-9]` with `_` and prefixing `x` unless the result starts
//! with a letter. Collisions and the reserved constants `d` and `not` get a
//! numeric suffix. Timeouts are written with the cutoff as their value.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::fs;
use std::io::{Read, Write};
use std::path::Path;
use std::sync::OnceLock;

use regex::Regex;

use crate::error::{Error, Result};
use crate::matrix::RuntimeMatrix;
use crate::schedule::Schedule;

/// Constants the step 2 encoding or the ASP language claims for itself.
pub const RESERVED: [&str; 2] = ["d", "not"];

pub const STEP1: &str = include_str!("../resources/step1.lp");
pub const STEP2: &str = include_str!("../resources/step2.lp");

/// The schedule encoding (slices and units) and the alignment encoding.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Encodings {
    pub step1: &'static str,
    pub step2: &'static str,
}

pub fn bundled_encodings() -> Encodings {
    Encodings {
        step1: STEP1,
        step2: STEP2,
    }
}

/// Writes `step1.lp` and `step2.lp` into `dir`, creating it if needed.
pub fn write_encodings(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir)?;
    fs::write(dir.join("step1.lp"), STEP1)?;
    fs::write(dir.join("step2.lp"), STEP2)?;
    Ok(())
}

/// The constant a name maps to before collision handling.
pub fn sanitize(name: &str) -> Result<String> {
    if name.is_empty() {
        return Err(Error::InvalidArgument(
            "empty identifier cannot become an ASP constant".into(),
        ));
    }
    let mut out: String = name
        .to_lowercase()
        .chars()
        .map(|c| {
            if c.is_ascii_lowercase() || c.is_ascii_digit() {
                c
            } else {
                '_'
            }
        })
        .collect();
    if !out.starts_with(|c: char| c.is_ascii_lowercase()) {
        out.insert(0, 'x');
    }
    Ok(out)
}

fn assign(names: &[String]) -> Result<Vec<String>> {
    let mut taken: BTreeSet<String> = RESERVED.iter().map(|s| s.to_string()).collect();
    let mut out = Vec::with_capacity(names.len());
    for name in names {
        let base = sanitize(name)?;
        let mut constant = base.clone();
        let mut n = 2;
        while taken.contains(&constant) {
            constant = format!("{base}_{n}");
            n += 1;
        }
        taken.insert(constant.clone());
        out.push(constant);
    }
    Ok(out)
}

/// Original names and their ASP constants, instances and solvers kept apart.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IdentifierMap {
    instances: Vec<(String, String)>,
    solvers: Vec<(String, String)>,
}

impl IdentifierMap {
    pub fn new(instances: &[String], solvers: &[String]) -> Result<Self> {
        let pair = |names: &[String]| -> Result<Vec<(String, String)>> {
            Ok(names.iter().cloned().zip(assign(names)?).collect())
        };
        Ok(Self {
            instances: pair(instances)?,
            solvers: pair(solvers)?,
        })
    }

    pub fn for_matrix(m: &RuntimeMatrix) -> Result<Self> {
        Self::new(m.instances(), m.solvers())
    }

    pub fn instance_constant(&self, i: usize) -> &str {
        &self.instances[i].1
    }

    pub fn solver_constant(&self, s: usize) -> &str {
        &self.solvers[s].1
    }

    fn originals(&self) -> (BTreeMap<&str, &str>, BTreeMap<&str, &str>) {
        fn back(pairs: &[(String, String)]) -> BTreeMap<&str, &str> {
            pairs.iter().map(|(o, c)| (c.as_str(), o.as_str())).collect()
        }
        (back(&self.instances), back(&self.solvers))
    }

    /// `kind,original,constant` rows, instances first.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut writer = csv::Writer::from_writer(out);
        writer.write_record(["kind", "original", "constant"])?;
        for (kind, pairs) in [("instance", &self.instances), ("solver", &self.solvers)] {
            for (original, constant) in pairs {
                writer.write_record([kind, original, constant])?;
            }
        }
        writer.flush()?;
        Ok(())
    }

    pub fn read_csv<R: Read>(source: R) -> Result<Self> {
        let mut reader = csv::Reader::from_reader(source);
        let mut map = Self {
            instances: Vec::new(),
            solvers: Vec::new(),
        };
        for (n, record) in reader.records().enumerate() {
            let record = record?;
            let line = record.position().map_or(n as u64 + 2, |p| p.line());
            let [kind, original, constant] = [0, 1, 2].map(|k| record.get(k).unwrap_or_default().to_string());
            match kind.as_str() {
                "instance" => map.instances.push((original, constant)),
                "solver" => map.solvers.push((original, constant)),
                other => {
                    return Err(Error::Parse {
                        line,
                        message: format!("unknown identifier kind `{other}`"),
                    })
                }
            }
        }
        Ok(map)
    }
}

/// The cutoff and unit count followed by one `time/3` fact per pair,
/// instance-major.
pub fn export_facts(m: &RuntimeMatrix, units: usize, map: &IdentifierMap) -> String {
    let mut out = format!("kappa({}).\nunits({units}).\n", m.cutoff());
    for i in 0..m.num_instances() {
        for s in 0..m.num_solvers() {
            let _ = writeln!(
                out,
                "time({}, {}, {}).",
                map.instance_constant(i),
                map.solver_constant(s),
                m.runtime(i, s)
            );
        }
    }
    out
}

/// One `slice(Unit,Solver,Slice)` fact per scheduled solver, units
/// numbered from 1.
pub fn export_schedule_facts(schedule: &Schedule, map: &IdentifierMap) -> String {
    let mut out = String::new();
    for u in 0..schedule.units() {
        for s in schedule.unit_members(u) {
            let _ = writeln!(
                out,
                "slice({},{},{}).",
                u + 1,
                map.solver_constant(s),
                schedule.slice(s)
            );
        }
    }
    out
}

/// A runtime table read back from exported facts.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParsedFacts {
    pub matrix: RuntimeMatrix,
    pub units: usize,
}

fn fact_regex() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| {
        Regex::new(
            r"(?x)
            (?P<name>kappa|units|time) \s* \( \s*
            (?P<args> [a-z0-9_]+ (?: \s* , \s* [a-z0-9_]+ )* )
            \s* \) \s* \.",
        )
        .expect("valid fact pattern")
    })
}

/// Rebuilds a matrix from exported facts. Constants are mapped back to the
/// original names through `map` when one is given. Values are read in time
/// units; `scale` is recorded on the result.
pub fn parse_facts(text: &str, scale: u64, map: Option<&IdentifierMap>) -> Result<ParsedFacts> {
    let mut kappa = None;
    let mut units = None;
    let mut entries: Vec<(String, String, u64, u64)> = Vec::new();
    for (n, line) in text.lines().enumerate() {
        let line_no = n as u64 + 1;
        let code = line.split('%').next().unwrap_or_default();
        for caps in fact_regex().captures_iter(code) {
            let args: Vec<&str> = caps["args"].split(',').map(str::trim).collect();
            let number = |s: &str| {
                s.parse::<u64>().map_err(|_| Error::Parse {
                    line: line_no,
                    message: format!("expected a number, found `{s}`"),
                })
            };
            match (&caps["name"], args.as_slice()) {
                ("kappa", [k]) => kappa = Some(number(k)?),
                ("units", [u]) => units = Some(number(u)? as usize),
                ("time", [i, s, t]) => entries.push((i.to_string(), s.to_string(), number(t)?, line_no)),
                (name, _) => {
                    return Err(Error::Parse {
                        line: line_no,
                        message: format!("wrong arity for `{name}`"),
                    })
                }
            }
        }
        let leftover = fact_regex().replace_all(code, "");
        if !leftover.trim().is_empty() {
            return Err(Error::Parse {
                line: line_no,
                message: format!("unrecognized text `{}`", leftover.trim()),
            });
        }
    }
    let kappa = kappa.ok_or_else(|| Error::Parse {
        line: 0,
        message: "missing kappa/1 fact".into(),
    })?;
    let units = units.unwrap_or(1);
    let (inst_back, solver_back) = map.map(IdentifierMap::originals).unwrap_or_default();
    let restore = |table: &BTreeMap<&str, &str>, c: &str| table.get(c).map_or_else(|| c.to_string(), |o| o.to_string());

    let mut instances: Vec<String> = Vec::new();
    let mut solvers: Vec<String> = Vec::new();
    let mut inst_ix = BTreeMap::new();
    let mut solver_ix = BTreeMap::new();
    for (i, s, _, _) in &entries {
        let i = restore(&inst_back, i);
        let s = restore(&solver_back, s);
        if !inst_ix.contains_key(&i) {
            inst_ix.insert(i.clone(), instances.len());
            instances.push(i);
        }
        if !solver_ix.contains_key(&s) {
            solver_ix.insert(s.clone(), solvers.len());
            solvers.push(s);
        }
    }
    let mut runtime: Vec<Option<u64>> = vec![None; instances.len() * solvers.len()];
    for (i, s, t, line) in entries {
        let (i, s) = (restore(&inst_back, &i), restore(&solver_back, &s));
        let cell = &mut runtime[inst_ix[&i] * solvers.len() + solver_ix[&s]];
        if cell.is_some() {
            return Err(Error::DuplicatePair {
                line,
                instance: i,
                solver: s,
            });
        }
        *cell = Some(t);
    }
    let mut values = Vec::with_capacity(runtime.len());
    for (k, cell) in runtime.into_iter().enumerate() {
        match cell {
            Some(t) => values.push(t),
            None => {
                return Err(Error::MissingPair {
                    instance: instances[k / solvers.len()].clone(),
                    solver: solvers[k % solvers.len()].clone(),
                })
            }
        }
    }
    let matrix = RuntimeMatrix::new(instances, solvers, values, kappa, scale)?;
    Ok(ParsedFacts { matrix, units })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::example_table;

    #[test]
    fn example_facts() {
        let m = example_table();
        let map = IdentifierMap::for_matrix(&m).unwrap();
        let text = export_facts(&m, 2, &map);
        assert!(text.starts_with("kappa(10).\nunits(2).\ntime(i1, s1, 1).\n"));
        assert!(text.contains("time(i1, s2, 10).\n"));
        assert_eq!(text.lines().count(), 2 + 18);
    }

    #[test]
    fn empty_matrix_facts() {
        let m = RuntimeMatrix::new(vec![], vec![], vec![], 10, 1).unwrap();
        let map = IdentifierMap::for_matrix(&m).unwrap();
        assert_eq!(export_facts(&m, 1, &map), "kappa(10).\nunits(1).\n");
    }

    #[test]
    fn sanitization() {
        assert_eq!(sanitize("CaDiCaL-1.5").unwrap(), "cadical_1_5");
        assert_eq!(sanitize("1st").unwrap(), "x1st");
        assert_eq!(sanitize("_x").unwrap(), "x_x");
        assert!(sanitize("").is_err());
        let names: Vec<String> = ["a-b", "a_b", "A.B", "d", "not"]
            .iter()
            .map(|s| s.to_string())
            .collect();
        assert_eq!(assign(&names).unwrap(), vec!["a_b", "a_b_2", "a_b_3", "d_2", "not_2"]);
    }

    #[test]
    fn mapping_csv_round_trip() {
        let solvers = vec!["CaDiCaL-1.5".to_string(), "d".to_string()];
        let map = IdentifierMap::new(&["inst/1.cnf".to_string()], &solvers).unwrap();
        let mut buf = Vec::new();
        map.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.contains("solver,CaDiCaL-1.5,cadical_1_5"));
        assert!(text.contains("solver,d,d_2"));
        assert_eq!(IdentifierMap::read_csv(buf.as_slice()).unwrap(), map);
    }

    #[test]
    fn schedule_facts() {
        let m = example_table();
        let map = IdentifierMap::for_matrix(&m).unwrap();
        let par = Schedule::from_assignments(&m, 2, &[("s2", 8, 0), ("s1", 1, 1), ("s3", 2, 1)]).unwrap();
        assert_eq!(
            export_schedule_facts(&par, &map),
            "slice(1,s2,8).\nslice(2,s1,1).\nslice(2,s3,2).\n"
        );
        assert_eq!(export_schedule_facts(&Schedule::empty(m.solvers(), 1, 10), &map), "");
        let seq = Schedule::sequential(&m, &[("s1", 1), ("s2", 6), ("s3", 2)]).unwrap();
        assert!(export_schedule_facts(&seq, &map)
            .lines()
            .all(|l| l.starts_with("slice(1,")));
    }

    #[test]
    fn facts_round_trip() {
        let m = example_table();
        let map = IdentifierMap::for_matrix(&m).unwrap();
        let parsed = parse_facts(&export_facts(&m, 2, &map), 1, Some(&map)).unwrap();
        assert_eq!(parsed.units, 2);
        assert_eq!(parsed.matrix, m);
    }

    #[test]
    fn parser_accepts_listing_layout() {
        let text = "kappa(10).\nunits(2).\n\ntime(i1, s1,  1).  time(i1, s2, 11).\n% comment\n";
        let parsed = parse_facts(text, 1, None).unwrap();
        assert_eq!(parsed.matrix.runtime(0, 0), 1);
        assert!(parsed.matrix.is_timeout(0, 1));
        assert!(parse_facts("kappa(10).\nbogus\n", 1, None).is_err());
        assert!(parse_facts("units(1).\n", 1, None).is_err());
    }

    #[test]
    fn encodings_are_bundled() {
        let enc = bundled_encodings();
        assert!(enc.step1.contains("@2"));
        assert!(enc.step1.contains("#maximize"));
        assert!(enc.step2.contains("#sum"));
        assert!(enc.step2.contains("-T,S"));
    }
}
