//! JSON input formats, report rendering and the on-disk memo cache.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};

use crate::braid::BraidWord;
use crate::diagram::{Crossing, LinkDiagram, Sign};
use crate::error::InputError;
use crate::families::{AnyLink, FamilySpec};
use crate::poly::IntPolynomial;
use crate::rational::Rational;
use crate::skein::{key_from_string, key_to_string, Memo};

fn int_field(obj: &Map<String, Value>, name: &str, path: &str) -> Result<i64, InputError> {
    let field = format!("{path}{name}");
    match obj.get(name) {
        None => Err(InputError::field(field, "missing")),
        Some(v) => v.as_i64().ok_or_else(|| InputError::field(field, format!("expected an integer, got {v}"))),
    }
}

fn arc_field(obj: &Map<String, Value>, name: &str, path: &str) -> Result<u32, InputError> {
    let v = int_field(obj, name, path)?;
    u32::try_from(v).map_err(|_| InputError::field(format!("{path}{name}"), format!("arc id {v} out of range")))
}

fn as_object<'a>(v: &'a Value, field: &str) -> Result<&'a Map<String, Value>, InputError> {
    v.as_object().ok_or_else(|| InputError::field(field, "expected an object"))
}

fn int_map(obj: &Map<String, Value>, name: &str) -> Result<BTreeMap<u32, i64>, InputError> {
    let mut out = BTreeMap::new();
    let Some(v) = obj.get(name) else { return Ok(out) };
    for (k, val) in as_object(v, name)? {
        let key: u32 = k.parse().map_err(|_| InputError::field(format!("{name}.{k}"), "key is not an integer"))?;
        let n = val.as_i64().ok_or_else(|| InputError::field(format!("{name}.{k}"), "expected an integer"))?;
        out.insert(key, n);
    }
    Ok(out)
}

fn positive(v: i64, field: &str) -> Result<usize, InputError> {
    usize::try_from(v).ok().filter(|&n| n > 0).ok_or_else(|| InputError::field(field, format!("expected a positive integer, got {v}")))
}

/// Parses `{"components", "crossings", "arc_component", "free_loops"}`.
pub fn diagram_from_value(v: &Value) -> Result<LinkDiagram, InputError> {
    let obj = as_object(v, "diagram")?;
    let components = positive(int_field(obj, "components", "")?, "components")?;
    let list = obj
        .get("crossings")
        .ok_or_else(|| InputError::field("crossings", "missing"))?
        .as_array()
        .ok_or_else(|| InputError::field("crossings", "expected an array"))?;
    let mut crossings = Vec::with_capacity(list.len());
    for (i, c) in list.iter().enumerate() {
        let path = format!("crossings[{i}].");
        let c = as_object(c, &format!("crossings[{i}]"))?;
        let sign = int_field(c, "sign", &path)?;
        let sign = Sign::from_int(sign)
            .ok_or_else(|| InputError::field(format!("{path}sign"), format!("expected 1 or -1, got {sign}")))?;
        crossings.push(Crossing {
            under_in: arc_field(c, "u_in", &path)?,
            under_out: arc_field(c, "u_out", &path)?,
            over_in: arc_field(c, "o_in", &path)?,
            over_out: arc_field(c, "o_out", &path)?,
            sign,
        });
    }
    let mut arc_component = BTreeMap::new();
    for (arc, comp) in int_map(obj, "arc_component")? {
        arc_component.insert(arc, positive(comp, &format!("arc_component.{arc}"))?);
    }
    let mut free_loops = BTreeMap::new();
    for (comp, count) in int_map(obj, "free_loops")? {
        let field = format!("free_loops.{comp}");
        let count = u32::try_from(count).map_err(|_| InputError::field(&field, "expected a non-negative count"))?;
        free_loops.insert(comp as usize, count);
    }
    Ok(LinkDiagram::new(crossings, arc_component, components, free_loops)?)
}

pub fn diagram_to_value(d: &LinkDiagram) -> Value {
    let crossings: Vec<Value> = d
        .crossings()
        .iter()
        .map(|c| {
            json!({
                "sign": c.sign.value(),
                "u_in": c.under_in,
                "u_out": c.under_out,
                "o_in": c.over_in,
                "o_out": c.over_out,
            })
        })
        .collect();
    let arcs: Map<String, Value> = d.arc_component().iter().map(|(a, c)| (a.to_string(), json!(c))).collect();
    let loops: Map<String, Value> = d.free_loops().iter().map(|(c, n)| (c.to_string(), json!(n))).collect();
    json!({
        "components": d.component_count(),
        "crossings": crossings,
        "arc_component": arcs,
        "free_loops": loops,
    })
}

/// Parses `{"strands": n, "word": [...]}`.
pub fn braid_from_value(v: &Value) -> Result<BraidWord, InputError> {
    let obj = as_object(v, "braid")?;
    let strands = positive(int_field(obj, "strands", "")?, "strands")?;
    let word = obj
        .get("word")
        .ok_or_else(|| InputError::field("word", "missing"))?
        .as_array()
        .ok_or_else(|| InputError::field("word", "expected an array"))?;
    let mut letters = Vec::with_capacity(word.len());
    for (i, g) in word.iter().enumerate() {
        let g = g.as_i64().ok_or_else(|| InputError::field(format!("word[{i}]"), "expected an integer"))?;
        if g == 0 || g.unsigned_abs() as usize >= strands {
            return Err(InputError::field(
                format!("word[{i}]"),
                format!("generator {g} is not a valid letter on {strands} strands"),
            ));
        }
        letters.push(g);
    }
    Ok(BraidWord::new(strands, letters)?)
}

/// Parses `{"family": name, "params": [...]}` and checks the arity.
pub fn family_from_value(v: &Value) -> Result<FamilySpec, InputError> {
    let obj = as_object(v, "family spec")?;
    let family = obj
        .get("family")
        .ok_or_else(|| InputError::field("family", "missing"))?
        .as_str()
        .ok_or_else(|| InputError::field("family", "expected a string"))?;
    let params = obj
        .get("params")
        .ok_or_else(|| InputError::field("params", "missing"))?
        .as_array()
        .ok_or_else(|| InputError::field("params", "expected an array"))?;
    let params = params
        .iter()
        .enumerate()
        .map(|(i, p)| p.as_i64().ok_or_else(|| InputError::field(format!("params[{i}]"), "expected an integer")))
        .collect::<Result<Vec<_>, _>>()?;
    family_spec(family, params)
}

pub fn family_spec(family: &str, params: Vec<i64>) -> Result<FamilySpec, InputError> {
    let arity = FamilySpec::arity(family).ok_or_else(|| InputError::field("family", format!("unknown family {family:?}")))?;
    if params.len() != arity {
        return Err(InputError::field(
            "params",
            format!("family {family} takes {arity} parameter(s), got {}", params.len()),
        ));
    }
    Ok(FamilySpec { family: family.to_string(), params })
}

/// Builds the link of a family spec; bad parameter values are reported on `params`.
pub fn build_family(spec: &FamilySpec) -> Result<AnyLink, InputError> {
    spec.build().map_err(|e| InputError::field("params", e.to_string()))
}

/// Accepts a diagram, braid or family spec, told apart by their keys.
pub fn parse_input(text: &str) -> Result<AnyLink, InputError> {
    let v: Value = serde_json::from_str(text)?;
    let obj = as_object(&v, "input")?;
    if obj.contains_key("crossings") {
        Ok(AnyLink::Plain(diagram_from_value(&v)?))
    } else if obj.contains_key("strands") {
        Ok(AnyLink::Slices(braid_from_value(&v)?.to_slices()))
    } else if obj.contains_key("family") {
        build_family(&family_from_value(&v)?)
    } else {
        Err(InputError::field("input", "expected a diagram, braid or family spec"))
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum OutputFormat {
    #[default]
    Table,
    Json,
    Csv,
}

/// A single reported quantity.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Cell {
    Int(i128),
    Rational(Rational),
    Poly(IntPolynomial),
    Triple(i64, i64, i64),
    Text(String),
    Json(Value),
}

impl Cell {
    fn text(&self, csv: bool) -> String {
        match self {
            Cell::Int(v) => v.to_string(),
            Cell::Rational(q) if csv => q.to_fraction_string(),
            Cell::Rational(q) => q.to_string(),
            Cell::Poly(p) => p.to_string(),
            Cell::Triple(a, b, c) => format!("({a},{b},{c})"),
            Cell::Text(s) => s.clone(),
            Cell::Json(v) => v.to_string(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Int(v) => serde_json::to_value(v).expect("integer"),
            Cell::Rational(q) => serde_json::to_value(q).expect("rational"),
            Cell::Poly(p) => serde_json::to_value(p).expect("polynomial"),
            Cell::Triple(a, b, c) => json!([a, b, c]),
            Cell::Text(s) => json!(s),
            Cell::Json(v) => v.clone(),
        }
    }
}

/// One output row: named cells in display order.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Record(pub Vec<(String, Cell)>);

impl Record {
    pub fn push(&mut self, name: &str, cell: Cell) {
        self.0.push((name.to_string(), cell));
    }
}

fn columns(rows: &[Record]) -> Vec<String> {
    let mut cols: Vec<String> = Vec::new();
    for r in rows {
        for (name, _) in &r.0 {
            if !cols.contains(name) {
                cols.push(name.clone());
            }
        }
    }
    cols
}

fn lookup<'a>(r: &'a Record, name: &str) -> Option<&'a Cell> {
    r.0.iter().find(|(n, _)| n == name).map(|(_, c)| c)
}

fn csv_escape(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// Renders rows in the chosen format. JSON output is one object per line.
pub fn render(rows: &[Record], format: OutputFormat) -> String {
    let cols = columns(rows);
    let mut out = String::new();
    match format {
        OutputFormat::Json => {
            for r in rows {
                let obj: Map<String, Value> = r.0.iter().map(|(n, c)| (n.clone(), c.json())).collect();
                out.push_str(&Value::Object(obj).to_string());
                out.push('\n');
            }
        }
        OutputFormat::Csv => {
            out.push_str(&cols.iter().map(|c| csv_escape(c)).collect::<Vec<_>>().join(","));
            out.push('\n');
            for r in rows {
                let line: Vec<String> =
                    cols.iter().map(|c| csv_escape(&lookup(r, c).map(|x| x.text(true)).unwrap_or_default())).collect();
                out.push_str(&line.join(","));
                out.push('\n');
            }
        }
        OutputFormat::Table => {
            let cells: Vec<Vec<String>> = rows
                .iter()
                .map(|r| cols.iter().map(|c| lookup(r, c).map(|x| x.text(false)).unwrap_or_default()).collect())
                .collect();
            let widths: Vec<usize> = cols
                .iter()
                .enumerate()
                .map(|(i, c)| cells.iter().map(|r| r[i].chars().count()).chain([c.chars().count()]).max().unwrap_or(0))
                .collect();
            let line = |items: &[String]| -> String {
                let mut s = String::new();
                for (i, item) in items.iter().enumerate() {
                    if i + 1 == items.len() {
                        s.push_str(item);
                    } else {
                        let _ = write!(s, "{item:<w$}  ", w = widths[i]);
                    }
                }
                s.trim_end().to_string()
            };
            out.push_str(&line(&cols));
            out.push('\n');
            for r in &cells {
                out.push_str(&line(r));
                out.push('\n');
            }
        }
    }
    out
}

#[derive(Serialize, Deserialize)]
struct CacheLine {
    key: String,
    degree: usize,
    coeffs: Vec<i128>,
}

pub const CACHE_FILE: &str = "skein-memo.jsonl";

/// Reads a memo written by [`save_memo`]; a missing file is an empty memo.
pub fn load_memo(path: &Path) -> Result<Memo, InputError> {
    let text = match std::fs::read_to_string(path) {
        Ok(t) => t,
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(Memo::new()),
        Err(source) => return Err(InputError::File { path: path.display().to_string(), source }),
    };
    let mut memo = Memo::new();
    for (n, line) in text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty()) {
        let entry: CacheLine = serde_json::from_str(line)?;
        let key = key_from_string(&entry.key)
            .ok_or_else(|| InputError::field(format!("{}:{}.key", path.display(), n + 1), "malformed key"))?;
        memo.insert(key, (entry.degree, IntPolynomial::from_coeffs(entry.coeffs)));
    }
    Ok(memo)
}

/// Writes the memo as JSON lines sorted by key.
pub fn save_memo(path: &Path, memo: &Memo) -> Result<(), InputError> {
    let mut lines: Vec<String> = memo
        .iter()
        .map(|(k, (degree, p))| {
            let line = CacheLine { key: key_to_string(k), degree: *degree, coeffs: p.coeffs().to_vec() };
            serde_json::to_string(&line).expect("cache line")
        })
        .collect();
    lines.sort();
    let mut text = lines.join("\n");
    text.push('\n');
    std::fs::write(path, text).map_err(|source| InputError::File { path: path.display().to_string(), source })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::hopf2;

    #[test]
    fn diagram_json_roundtrip() {
        let d = hopf2(2);
        let v = diagram_to_value(&d);
        assert_eq!(diagram_from_value(&v).unwrap(), d);
    }

    #[test]
    fn spec_diagram_shape() {
        let text = r#"{"components": 2, "crossings": [], "arc_component": {}, "free_loops": {"1": 1, "2": 1}}"#;
        let d = parse_input(text).unwrap();
        assert_eq!(crate::invariants::Link::component_count(&d), 2);
    }

    #[test]
    fn errors_name_the_field() {
        let bad_sign = r#"{"components":1,"crossings":[{"sign":2,"u_in":1,"u_out":2,"o_in":2,"o_out":1}],"arc_component":{"1":1,"2":1}}"#;
        let e = parse_input(bad_sign).unwrap_err().to_string();
        assert!(e.starts_with("crossings[0].sign"), "{e}");
        let e = parse_input(r#"{"strands":2,"word":[1,3]}"#).unwrap_err().to_string();
        assert!(e.starts_with("word[1]"), "{e}");
        let e = parse_input(r#"{"family":"hopf3","params":[1,2]}"#).unwrap_err().to_string();
        assert!(e.starts_with("params"), "{e}");
        let e = parse_input(r#"{"family":"nope","params":[]}"#).unwrap_err().to_string();
        assert!(e.starts_with("family"), "{e}");
    }

    #[test]
    fn formats() {
        let mut r = Record::default();
        r.push("lk", Cell::Triple(1, 1, 1));
        r.push("m", Cell::Rational(Rational::new(-1, 4)));
        let rows = vec![r];
        assert_eq!(render(&rows, OutputFormat::Table), "lk       m\n(1,1,1)  -1/4\n");
        assert_eq!(render(&rows, OutputFormat::Csv), "lk,m\n\"(1,1,1)\",-1/4\n");
        assert_eq!(render(&rows, OutputFormat::Json), "{\"lk\":[1,1,1],\"m\":{\"num\":-1,\"den\":4}}\n");
    }

    #[test]
    fn memo_file_roundtrip() {
        let dir = std::env::temp_dir().join(format!("m3-io-test-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join(CACHE_FILE);
        let mut memo = Memo::new();
        memo.insert(vec![1, 2, 3], (4, IntPolynomial::from_coeffs(vec![0, 2, 0, 1])));
        save_memo(&path, &memo).unwrap();
        assert_eq!(load_memo(&path).unwrap(), memo);
        std::fs::remove_dir_all(&dir).unwrap();
    }
}
