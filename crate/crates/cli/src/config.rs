//! Parameter files: a JSON object, or `key=value` lines with `#` comments.

/// Returns the `(key, value)` pairs in file order.
pub fn parse_config(text: &str) -> Result<Vec<(String, String)>, String> {
    if text.trim_start().starts_with('{') {
        let value: serde_json::Value =
            serde_json::from_str(text).map_err(|e| format!("invalid JSON config: {e}"))?;
        let object = value.as_object().ok_or("JSON config must be an object")?;
        object
            .iter()
            .map(|(k, v)| {
                let text = match v {
                    serde_json::Value::String(s) => s.clone(),
                    serde_json::Value::Number(n) => n.to_string(),
                    serde_json::Value::Bool(b) => b.to_string(),
                    _ => {
                        return Err(format!(
                            "config key `{k}` must be a string, number or boolean"
                        ))
                    }
                };
                Ok((k.clone(), text))
            })
            .collect()
    } else {
        let mut pairs = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| format!("config line {}: expected key=value", i + 1))?;
            pairs.push((k.trim().to_string(), v.trim().to_string()));
        }
        Ok(pairs)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn key_value_lines() {
        let pairs = parse_config("# comment\nsigma = 0.2\n\nL=2\n").unwrap();
        assert_eq!(
            pairs,
            vec![("sigma".into(), "0.2".into()), ("L".into(), "2".into())]
        );
        assert!(parse_config("sigma 0.2").is_err());
    }

    #[test]
    fn json_object() {
        let pairs =
            parse_config(r#"{"sigma": 0.2, "init": "kind:lens", "inverted": true}"#).unwrap();
        assert_eq!(pairs[0], ("sigma".into(), "0.2".into()));
        assert_eq!(pairs[1], ("init".into(), "kind:lens".into()));
        assert_eq!(pairs[2], ("inverted".into(), "true".into()));
        assert!(parse_config("{\"a\": [1]}").is_err());
        assert!(parse_config("[1]").is_err());
    }
}
