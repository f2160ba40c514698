use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use super::SpecError;
use crate::formula::is_identifier;

/// Processes with their input and output propositions, one of them the
/// environment.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Architecture {
    processes: Vec<String>,
    env: String,
    inputs: BTreeMap<String, BTreeSet<String>>,
    outputs: BTreeMap<String, BTreeSet<String>>,
}

impl Architecture {
    /// `processes` lists `(name, inputs, outputs)` in declaration order.
    pub fn new(
        processes: Vec<(String, BTreeSet<String>, BTreeSet<String>)>,
        env: &str,
    ) -> Result<Self, SpecError> {
        let invalid = |m: String| Err(SpecError::InvalidArchitecture(m));
        let mut arch = Architecture {
            processes: Vec::new(),
            env: env.to_string(),
            inputs: BTreeMap::new(),
            outputs: BTreeMap::new(),
        };
        for (name, ins, outs) in processes {
            if arch.inputs.contains_key(&name) {
                return invalid(format!("process `{name}` is declared twice"));
            }
            for (other, theirs) in &arch.outputs {
                if let Some(a) = outs.intersection(theirs).next() {
                    return invalid(format!("`{a}` is an output of both `{other}` and `{name}`"));
                }
            }
            arch.processes.push(name.clone());
            arch.inputs.insert(name.clone(), ins);
            arch.outputs.insert(name, outs);
        }
        match arch.inputs.get(env) {
            None => invalid(format!("environment `{env}` is not a declared process")),
            Some(ins) if !ins.is_empty() => invalid(format!("environment `{env}` must not have inputs")),
            Some(_) => Ok(arch),
        }
    }

    pub fn processes(&self) -> &[String] {
        &self.processes
    }

    pub fn env(&self) -> &str {
        &self.env
    }

    pub fn inputs(&self, process: &str) -> &BTreeSet<String> {
        &self.inputs[process]
    }

    pub fn outputs(&self, process: &str) -> &BTreeSet<String> {
        &self.outputs[process]
    }

    /// Every proposition read or written by some process.
    pub fn propositions(&self) -> BTreeSet<String> {
        self.inputs.values().chain(self.outputs.values()).flatten().cloned().collect()
    }
}

impl fmt::Display for Architecture {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let set = |s: &BTreeSet<String>| s.iter().cloned().collect::<Vec<_>>().join(", ");
        for p in &self.processes {
            writeln!(f, "process: {p} inputs{{{}}} outputs{{{}}}", set(&self.inputs[p]), set(&self.outputs[p]))?;
        }
        writeln!(f, "env: {}", self.env)
    }
}

/// Reads the line format
///
/// ```text
/// process: p1 inputs{a} outputs{b}
/// env: env
/// ```
///
/// Propositions inside braces are separated by commas or whitespace. Blank
/// lines and lines starting with `#` are skipped.
pub fn parse_architecture(text: &str) -> Result<Architecture, SpecError> {
    let mut processes = Vec::new();
    let mut env = None;
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        let err = |message: String| SpecError::Syntax { line: i + 1, message };
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if let Some(rest) = line.strip_prefix("env:") {
            let name = rest.trim();
            if !is_identifier(name) {
                return Err(err(format!("`{name}` is not a process name")));
            }
            if env.replace(name.to_string()).is_some() {
                return Err(err("second `env:` line".into()));
            }
        } else if let Some(rest) = line.strip_prefix("process:") {
            let rest = rest.trim();
            let (name, rest) = rest.split_once(char::is_whitespace).unwrap_or((rest, ""));
            if !is_identifier(name) {
                return Err(err(format!("`{name}` is not a process name")));
            }
            let (ins, rest) = braces(rest.trim(), "inputs").map_err(&err)?;
            let (outs, rest) = braces(rest.trim(), "outputs").map_err(&err)?;
            if !rest.trim().is_empty() {
                return Err(err(format!("unexpected `{}`", rest.trim())));
            }
            processes.push((name.to_string(), ins, outs));
        } else {
            return Err(err("expected `process:` or `env:`".into()));
        }
    }
    let env = env.ok_or_else(|| SpecError::InvalidArchitecture("no `env:` line".into()))?;
    Architecture::new(processes, &env)
}

/// Parses `keyword{x, y}` at the start of `s`.
fn braces<'s>(s: &'s str, keyword: &str) -> Result<(BTreeSet<String>, &'s str), String> {
    let body = s
        .strip_prefix(keyword)
        .map(str::trim_start)
        .and_then(|r| r.strip_prefix('{'))
        .ok_or_else(|| format!("expected `{keyword}{{...}}`"))?;
    let (inside, rest) = body.split_once('}').ok_or_else(|| format!("unclosed `{keyword}{{`"))?;
    let mut set = BTreeSet::new();
    for a in inside.split(|c: char| c == ',' || c.is_whitespace()).filter(|a| !a.is_empty()) {
        if !is_identifier(a) {
            return Err(format!("`{a}` is not a proposition name"));
        }
        set.insert(a.to_string());
    }
    Ok((set, rest))
}
