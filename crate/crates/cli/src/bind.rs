use revsearch::Value;

/// Parses `name=42` or `name=[1,-2,3]`.
pub fn parse_binding(s: &str) -> Result<(String, Value), String> {
    let (name, value) = s
        .split_once('=')
        .ok_or_else(|| format!("expected name=value, got `{s}`"))?;
    let name = name.trim();
    if name.is_empty() || !name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_') {
        return Err(format!("bad parameter name `{name}`"));
    }
    let value = value.trim();
    let int = |t: &str| t.trim().parse::<i64>().map_err(|e| format!("`{t}`: {e}"));
    let parsed = match value.strip_prefix('[').and_then(|v| v.strip_suffix(']')) {
        Some(inner) if inner.trim().is_empty() => Value::Array(Vec::new()),
        Some(inner) => Value::Array(inner.split(',').map(int).collect::<Result<_, _>>()?),
        None => Value::Scalar(int(value)?),
    };
    Ok((name.to_string(), parsed))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scalars_and_arrays() {
        assert_eq!(parse_binding("k=3"), Ok(("k".into(), Value::Scalar(3))));
        assert_eq!(parse_binding("u=-1"), Ok(("u".into(), Value::Scalar(-1))));
        assert_eq!(
            parse_binding("r=[7, 3,9,-3]"),
            Ok(("r".into(), Value::Array(vec![7, 3, 9, -3])))
        );
        assert_eq!(parse_binding("r=[]"), Ok(("r".into(), Value::Array(vec![]))));
    }

    #[test]
    fn rejects_malformed() {
        assert!(parse_binding("k").is_err());
        assert!(parse_binding("=3").is_err());
        assert!(parse_binding("k=x").is_err());
        assert!(parse_binding("r=[1,,2]").is_err());
        assert!(parse_binding("k=99999999999999999999").is_err());
    }
}
