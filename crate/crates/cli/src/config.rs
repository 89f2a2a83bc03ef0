//! `--config` files: a JSON object whose keys are long flag names. Nested
//! objects are flattened, so a sweep configuration file works as is.
//! Values are spliced in right after the subcommand, ahead of the user's own
//! flags, which therefore take precedence.

use std::path::PathBuf;

use serde_json::Value;

fn push_tokens(key: &str, value: &Value, out: &mut Vec<String>) -> Result<(), String> {
    let flag = format!("--{}", key.replace('_', "-"));
    match value {
        Value::Null | Value::Bool(false) => {}
        Value::Bool(true) => out.push(flag),
        Value::Number(x) => out.push(format!("{flag}={x}")),
        Value::String(s) => out.push(format!("{flag}={s}")),
        Value::Array(items) => {
            let mut parts = Vec::with_capacity(items.len());
            for item in items {
                match item {
                    Value::Number(x) => parts.push(x.to_string()),
                    Value::String(s) => parts.push(s.clone()),
                    _ => return Err(format!("config key {key}: list items must be numbers or strings")),
                }
            }
            if !parts.is_empty() {
                out.push(format!("{flag}={}", parts.join(",")));
            }
        }
        Value::Object(map) => {
            for (k, v) in map {
                push_tokens(k, v, out)?;
            }
        }
    }
    Ok(())
}

/// Flag tokens for a config document.
pub fn config_tokens(text: &str) -> Result<Vec<String>, String> {
    let doc: Value = serde_json::from_str(text).map_err(|e| format!("config: {e}"))?;
    let Value::Object(map) = doc else {
        return Err("config: top level must be an object".into());
    };
    let mut out = Vec::new();
    for (k, v) in &map {
        if k == "config" {
            continue;
        }
        push_tokens(k, v, &mut out)?;
    }
    Ok(out)
}

/// The value of the last `--config` flag in `argv`, if any.
pub fn config_path(argv: &[String]) -> Option<PathBuf> {
    let mut found = None;
    let mut it = argv.iter().skip(1);
    while let Some(a) = it.next() {
        if a == "--" {
            break;
        } else if a == "--config" {
            found = it.next().map(PathBuf::from);
        } else if let Some(v) = a.strip_prefix("--config=") {
            found = Some(PathBuf::from(v));
        }
    }
    found
}

/// Inserts `tokens` after the first occurrence of `subcommand` in `argv`.
pub fn splice(argv: &[String], subcommand: &str, tokens: Vec<String>) -> Vec<String> {
    let at = argv
        .iter()
        .skip(1)
        .position(|a| a == subcommand)
        .map_or(argv.len(), |i| i + 2);
    let mut out = argv[..at].to_vec();
    out.extend(tokens);
    out.extend_from_slice(&argv[at..]);
    out
}
