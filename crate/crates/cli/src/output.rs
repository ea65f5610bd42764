use serde_json::{Map, Value};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Text,
    Structured,
}

pub fn render(report: &Map<String, Value>, format: Format) -> String {
    match format {
        Format::Structured => {
            let mut s = serde_json::to_string_pretty(report).expect("report serializes");
            s.push('\n');
            s
        }
        Format::Text => {
            let mut out = String::new();
            object(&mut out, report, 0);
            out
        }
    }
}

fn is_flat(v: &Value) -> bool {
    match v {
        Value::Array(items) => items.iter().all(|i| !i.is_array() && !i.is_object()),
        Value::Object(_) => false,
        _ => true,
    }
}

fn inline(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Null => "-".into(),
        Value::Array(items) if items.iter().all(is_flat) && items.iter().any(Value::is_array) => items
            .iter()
            .map(|i| format!("[{}]", tuple(i)))
            .collect::<Vec<_>>()
            .join(" "),
        Value::Array(items) => items.iter().map(inline).collect::<Vec<_>>().join(" "),
        other => other.to_string(),
    }
}

fn tuple(v: &Value) -> String {
    match v {
        Value::Array(items) => items.iter().map(inline).collect::<Vec<_>>().join(","),
        other => inline(other),
    }
}

fn inlinable(v: &Value) -> bool {
    match v {
        Value::String(s) => !s.contains('\n'),
        Value::Array(items) => items.iter().all(|i| is_flat(i) && !matches!(i, Value::String(s) if s.contains('\n'))),
        Value::Object(_) => false,
        _ => true,
    }
}

fn object(out: &mut String, map: &Map<String, Value>, indent: usize) {
    let pad = " ".repeat(indent);
    for (k, v) in map {
        if inlinable(v) {
            let text = inline(v);
            if text.is_empty() {
                out.push_str(&format!("{pad}{k}:\n"));
            } else {
                out.push_str(&format!("{pad}{k}: {text}\n"));
            }
            continue;
        }
        out.push_str(&format!("{pad}{k}:\n"));
        block(out, v, indent + 2);
    }
}

fn block(out: &mut String, v: &Value, indent: usize) {
    let pad = " ".repeat(indent);
    match v {
        Value::String(s) => {
            for line in s.lines() {
                out.push_str(&format!("{pad}{line}\n"));
            }
        }
        Value::Object(m) => object(out, m, indent),
        Value::Array(items) => {
            for item in items {
                match item {
                    Value::Object(m) => {
                        let mut sub = String::new();
                        object(&mut sub, m, indent + 2);
                        let mut lines = sub.lines();
                        if let Some(first) = lines.next() {
                            out.push_str(&format!("{pad}- {}\n", &first[indent + 2..]));
                        }
                        for line in lines {
                            out.push_str(line);
                            out.push('\n');
                        }
                    }
                    other if inlinable(other) => out.push_str(&format!("{pad}- {}\n", inline(other))),
                    other => {
                        out.push_str(&format!("{pad}-\n"));
                        block(out, other, indent + 2);
                    }
                }
            }
        }
        other => out.push_str(&format!("{pad}{}\n", inline(other))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn text_layout() {
        let v = json!({
            "members": 7,
            "complete": true,
            "counts": [1, 2, 5],
            "tuples": [[0, 1], [1, 0]],
            "levels": [{"depth": 1, "orbits": 2}],
            "body": "a\nb",
        });
        let text = render(v.as_object().unwrap(), Format::Text);
        assert_eq!(
            text,
            "members: 7\ncomplete: true\ncounts: 1 2 5\ntuples: [0,1] [1,0]\nlevels:\n  - depth: 1\n    orbits: 2\nbody:\n  a\n  b\n"
        );
    }
}
