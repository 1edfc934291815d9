use std::fmt::Write as _;
use std::path::Path;

use serde::de::DeserializeOwned;
use serde_path_to_error::Segment;

/// Reads and parses a scene. Schema violations name the offending location
/// as a JSON pointer.
pub fn load<T: DeserializeOwned>(path: &Path) -> Result<T, String> {
    let text = std::fs::read_to_string(path).map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    parse(&text)
}

pub fn parse<T: DeserializeOwned>(text: &str) -> Result<T, String> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(|err| {
        let pointer = pointer(err.path());
        let inner = err.into_inner();
        format!("schema violation at `{pointer}`: {inner}")
    })
}

fn pointer(path: &serde_path_to_error::Path) -> String {
    let mut out = String::new();
    for seg in path.iter() {
        match seg {
            Segment::Seq { index } => write!(out, "/{index}").expect("string write"),
            Segment::Map { key } => {
                write!(out, "/{}", key.replace('~', "~0").replace('/', "~1")).expect("string write")
            }
            Segment::Enum { variant } => write!(out, "/{variant}").expect("string write"),
            Segment::Unknown => out.push_str("/?"),
        }
    }
    if out.is_empty() {
        out.push('/');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use iet_core::scene::GroupScene;

    #[test]
    fn pointer_names_the_bad_field() {
        let text = r#"{"version": 1, "basis": {"independent": true},
            "domain": {"components": [{"label": "c", "kind": "loop", "length": "1"}]},
            "generators": []}"#;
        let err = parse::<GroupScene>(text).unwrap_err();
        assert!(err.contains("`/domain/components/0/kind`"), "{err}");
    }

    #[test]
    fn unknown_field_is_reported_at_its_parent() {
        let text = r#"{"version": 1, "basis": {"independent": true, "extra": 3},
            "domain": {"components": []}, "generators": []}"#;
        let err = parse::<GroupScene>(text).unwrap_err();
        assert!(err.contains("`/basis/extra`") || err.contains("`/basis`"), "{err}");
    }
}
