//! Reports: an ordered list of sections rendered either as a human summary
//! or as TOML (the machine format, same grammar as the input files).

use std::fmt::Write;

pub const SCHEMA_VERSION: &str = "1";

#[derive(Clone, Debug, PartialEq)]
pub enum Value {
    Str(String),
    Int(i64),
    Float(f64),
    Bool(bool),
    Floats(Vec<f64>),
    Ints(Vec<i64>),
    Strs(Vec<String>),
    /// Rows of a matrix, each row interleaved `re, im` when complex.
    Rows(Vec<Vec<f64>>),
}

impl From<&str> for Value {
    fn from(s: &str) -> Self {
        Value::Str(s.to_owned())
    }
}

impl From<String> for Value {
    fn from(s: String) -> Self {
        Value::Str(s)
    }
}

impl From<f64> for Value {
    fn from(x: f64) -> Self {
        Value::Float(x)
    }
}

impl From<bool> for Value {
    fn from(b: bool) -> Self {
        Value::Bool(b)
    }
}

impl From<usize> for Value {
    fn from(n: usize) -> Self {
        Value::Int(n as i64)
    }
}

impl From<Vec<f64>> for Value {
    fn from(v: Vec<f64>) -> Self {
        Value::Floats(v)
    }
}

impl From<Vec<usize>> for Value {
    fn from(v: Vec<usize>) -> Self {
        Value::Ints(v.into_iter().map(|n| n as i64).collect())
    }
}

impl From<Vec<String>> for Value {
    fn from(v: Vec<String>) -> Self {
        Value::Strs(v)
    }
}

#[derive(Clone, Debug, Default)]
pub struct Section {
    pub name: String,
    pub entries: Vec<(String, Value)>,
}

impl Section {
    pub fn new(name: &str) -> Self {
        Self { name: name.to_owned(), entries: Vec::new() }
    }

    pub fn put(&mut self, key: &str, v: impl Into<Value>) -> &mut Self {
        self.entries.push((key.to_owned(), v.into()));
        self
    }

    #[cfg(test)]
    pub fn get(&self, key: &str) -> Option<&Value> {
        self.entries.iter().find(|(k, _)| k == key).map(|(_, v)| v)
    }
}

#[derive(Clone, Debug)]
pub struct Report {
    pub command: String,
    pub sections: Vec<Section>,
}

impl Report {
    pub fn new(command: &str) -> Self {
        Self { command: command.to_owned(), sections: Vec::new() }
    }

    pub fn push(&mut self, s: Section) {
        self.sections.push(s);
    }

    #[cfg(test)]
    pub fn section(&self, name: &str) -> Option<&Section> {
        self.sections.iter().find(|s| s.name == name)
    }

    /// TOML with every float in 17 significant digits.
    pub fn machine(&self) -> String {
        let mut out = String::new();
        writeln!(out, "schema_version = {}", quote(SCHEMA_VERSION)).unwrap();
        writeln!(out, "command = {}", quote(&self.command)).unwrap();
        for s in &self.sections {
            writeln!(out, "\n[{}]", s.name).unwrap();
            for (k, v) in &s.entries {
                writeln!(out, "{k} = {}", toml_value(v)).unwrap();
            }
        }
        out
    }

    pub fn human(&self) -> String {
        let mut out = String::new();
        writeln!(out, "gausscj {} (schema {SCHEMA_VERSION})", self.command).unwrap();
        for s in &self.sections {
            writeln!(out, "\n{}", s.name).unwrap();
            let width = s.entries.iter().map(|(k, _)| k.len()).max().unwrap_or(0);
            for (k, v) in &s.entries {
                match v {
                    Value::Rows(rows) => {
                        writeln!(out, "  {k}:").unwrap();
                        for r in rows {
                            let cells: Vec<String> = r.iter().map(|x| human_float(*x)).collect();
                            writeln!(out, "    [{}]", cells.join(", ")).unwrap();
                        }
                    }
                    _ => writeln!(out, "  {k:<width$}  {}", human_value(v)).unwrap(),
                }
            }
        }
        out
    }
}

pub fn machine_float(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x.is_infinite() {
        if x > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        }
    } else {
        format!("{x:.16e}")
    }
}

fn human_float(x: f64) -> String {
    let a = x.abs();
    if x == 0.0 {
        "0".into()
    } else if (1e-4..1e6).contains(&a) {
        let s = format!("{x:.10}");
        s.trim_end_matches('0').trim_end_matches('.').to_owned()
    } else {
        format!("{x:.6e}")
    }
}

fn quote(s: &str) -> String {
    let mut out = String::from('"');
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            c => out.push(c),
        }
    }
    out.push('"');
    out
}

fn toml_value(v: &Value) -> String {
    let join = |items: Vec<String>| format!("[{}]", items.join(", "));
    match v {
        Value::Str(s) => quote(s),
        Value::Int(n) => n.to_string(),
        Value::Float(x) => machine_float(*x),
        Value::Bool(b) => b.to_string(),
        Value::Floats(xs) => join(xs.iter().map(|x| machine_float(*x)).collect()),
        Value::Ints(ns) => join(ns.iter().map(|n| n.to_string()).collect()),
        Value::Strs(ss) => join(ss.iter().map(|s| quote(s)).collect()),
        Value::Rows(rows) => {
            let inner: Vec<String> = rows.iter().map(|r| join(r.iter().map(|x| machine_float(*x)).collect())).collect();
            format!("[\n  {},\n]", inner.join(",\n  "))
        }
    }
}

fn human_value(v: &Value) -> String {
    let join = |items: Vec<String>| format!("[{}]", items.join(", "));
    match v {
        Value::Str(s) => s.clone(),
        Value::Int(n) => n.to_string(),
        Value::Float(x) => human_float(*x),
        Value::Bool(b) => {
            if *b {
                "yes".into()
            } else {
                "no".into()
            }
        }
        Value::Floats(xs) => join(xs.iter().map(|x| human_float(*x)).collect()),
        Value::Ints(ns) => join(ns.iter().map(|n| n.to_string()).collect()),
        Value::Strs(ss) => ss.join(", "),
        Value::Rows(rows) => format!("{} rows", rows.len()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn machine_is_valid_toml() {
        let mut r = Report::new("test");
        let mut s = Section::new("numbers");
        s.put("x", 2.0 / 9.0)
            .put("n", 3usize)
            .put("ok", true)
            .put("name", "a \"quoted\" name")
            .put("xs", vec![1.0, -0.5, f64::INFINITY])
            .put("rows", Value::Rows(vec![vec![1.0, 0.0], vec![0.0, 1.0]]));
        r.push(s);
        let text = r.machine();
        assert!(text.contains("x = 2.2222222222222221e-1"));
        let parsed: toml::Table = text.parse().unwrap();
        assert_eq!(parsed["schema_version"].as_str(), Some("1"));
        let nums = parsed["numbers"].as_table().unwrap();
        assert_eq!(nums["x"].as_float(), Some(2.0 / 9.0));
        assert_eq!(nums["xs"].as_array().unwrap()[2].as_float(), Some(f64::INFINITY));
        assert_eq!(nums["name"].as_str(), Some("a \"quoted\" name"));
        assert_eq!(nums["rows"].as_array().unwrap().len(), 2);
    }

    #[test]
    fn floats_round_trip_exactly() {
        for x in [0.1, 1.0 / 3.0, 6.02214076e23, -2.5e-300, 5e-324] {
            let s = machine_float(x);
            assert_eq!(s.parse::<f64>().unwrap(), x, "{s}");
        }
    }

    #[test]
    fn human_floats() {
        assert_eq!(human_float(0.25), "0.25");
        assert_eq!(human_float(2.0 / 9.0), "0.2222222222");
        assert_eq!(human_float(1e-9), "1.000000e-9");
        assert_eq!(human_float(0.0), "0");
    }
}
