//! Human and JSON rendering of a run. Keys come out sorted in both.

use serde_json::{json, Map, Value};

pub enum Status {
    Ok,
    /// A mathematical "no": counterexample found, nothing within bounds.
    Negative(String),
}

pub struct Report {
    pub result: Value,
    pub status: Status,
}

impl Report {
    pub fn ok(result: Value) -> Self {
        Report {
            result,
            status: Status::Ok,
        }
    }

    pub fn negative(result: Value, reason: impl Into<String>) -> Self {
        Report {
            result,
            status: Status::Negative(reason.into()),
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self.status {
            Status::Ok => 0,
            Status::Negative(_) => 1,
        }
    }
}

fn scalar(v: &Value) -> Option<String> {
    match v {
        Value::Null => Some("-".into()),
        Value::Bool(b) => Some(b.to_string()),
        Value::Number(n) => Some(n.to_string()),
        Value::String(s) => Some(s.clone()),
        Value::Array(a) if a.iter().all(|x| !x.is_object() && !x.is_array()) => Some(format!(
            "[{}]",
            a.iter().filter_map(scalar).collect::<Vec<_>>().join(", ")
        )),
        _ => None,
    }
}

fn flatten(prefix: &str, v: &Value, out: &mut Vec<(String, String)>) {
    if let Some(s) = scalar(v) {
        out.push((prefix.to_string(), s));
        return;
    }
    match v {
        Value::Object(m) => {
            for (k, x) in m {
                let key = if prefix.is_empty() {
                    k.clone()
                } else {
                    format!("{prefix}.{k}")
                };
                flatten(&key, x, out);
            }
        }
        Value::Array(a) => {
            if a.is_empty() {
                out.push((prefix.to_string(), "[]".into()));
            }
            for (i, x) in a.iter().enumerate() {
                flatten(&format!("{prefix}[{i}]"), x, out);
            }
        }
        _ => unreachable!(),
    }
}

fn table(title: &str, v: &Value) -> String {
    let mut rows = Vec::new();
    flatten("", v, &mut rows);
    let w = rows
        .iter()
        .map(|(k, _)| k.chars().count())
        .max()
        .unwrap_or(0);
    let mut s = format!("{title}\n");
    for (k, v) in rows {
        let pad = w - k.chars().count();
        s.push_str(&format!("  {k}{}  {v}\n", " ".repeat(pad)));
    }
    s
}

pub fn envelope(
    command: &str,
    config: &Map<String, Value>,
    body: Value,
    status: &str,
    exit: i32,
) -> Value {
    json!({
        "command": command,
        "config": config,
        "result": body,
        "status": status,
        "exit": exit,
    })
}

pub fn render(v: &Value, as_json: bool) -> String {
    if as_json {
        return serde_json::to_string_pretty(v).expect("json") + "\n";
    }
    let mut s = format!("command  {}\n", v["command"].as_str().unwrap_or(""));
    s.push_str(&table("config", &v["config"]));
    s.push_str(&table("result", &v["result"]));
    s.push_str(&format!(
        "status   {}\n",
        v["status"].as_str().unwrap_or("")
    ));
    s
}
