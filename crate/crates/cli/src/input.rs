use std::fs;
use std::path::Path;

use dldef::fixtures;
use dldef::semantics::Interpretation;
use dldef::syntax::{
    parse_concept, parse_document, parse_signature, Concept, Dialect, Ontology, Signature,
};

/// Errors while reading inputs; all map to the input-error exit code.
pub type InputResult<T> = Result<T, String>;

/// An ontology with its declared dialect and the text it came from.
pub struct Loaded {
    pub ontology: Ontology,
    pub declared: Option<Dialect>,
}

fn fixture(name: &str) -> Option<&'static str> {
    Some(match name {
        "o1" => fixtures::O1,
        "o2" => fixtures::O2,
        "spy" => fixtures::SPY,
        "beth" => fixtures::BETH,
        _ => return None,
    })
}

/// Reads an ontology from a file, or `fixture:NAME` for a built-in one.
pub fn ontology(spec: &str) -> InputResult<Loaded> {
    let text = match spec.strip_prefix("fixture:") {
        Some(name) => fixture(name)
            .ok_or_else(|| format!("unknown fixture {name:?} (o1, o2, spy, beth)"))?
            .to_string(),
        None => fs::read_to_string(spec).map_err(|e| format!("cannot read {spec}: {e}"))?,
    };
    let (ontology, declared) = parse_document(&text).map_err(|e| format!("{spec}: {e}"))?;
    Ok(Loaded { ontology, declared })
}

pub fn optional_ontology(spec: Option<&str>) -> InputResult<Loaded> {
    match spec {
        Some(s) => ontology(s),
        None => Ok(Loaded {
            ontology: Ontology::new(),
            declared: None,
        }),
    }
}

pub fn concept(text: &str) -> InputResult<Concept> {
    parse_concept(text).map_err(|e| format!("concept {text:?}: {e}"))
}

pub fn signature(text: &str) -> InputResult<Signature> {
    parse_signature(text).map_err(|e| format!("signature {text:?}: {e}"))
}

/// A model file, or one model inside a witness bundle selected as
/// `bundle.json#model2` (default `model1`, or `model` for sat bundles).
pub fn interpretation(path: &Path) -> InputResult<Interpretation> {
    let spec = path.to_string_lossy();
    let (file, key) = match spec.rsplit_once('#') {
        Some((f, k)) if !k.contains('/') => (f.to_string(), Some(k.to_string())),
        _ => (spec.to_string(), None),
    };
    let text = fs::read_to_string(&file).map_err(|e| format!("cannot read {file}: {e}"))?;
    let mut v: serde_json::Value =
        serde_json::from_str(&text).map_err(|e| format!("{file}: {e}"))?;
    if v.get("domain").is_none() || key.is_some() {
        let k = key.unwrap_or_else(|| {
            if v.get("model").is_some() {
                "model".into()
            } else {
                "model1".into()
            }
        });
        v = v
            .get(&k)
            .cloned()
            .ok_or_else(|| format!("{file}: no model under {k:?}"))?;
    }
    let j = serde_json::from_value(v).map_err(|e| format!("{file}: {e}"))?;
    Interpretation::from_json(&j).map_err(|e| format!("{file}: {e}"))
}

/// The dialect from the flags, else the one declared by the inputs.
pub fn dialect(
    flag: Option<&str>,
    universal: bool,
    declared: &[Option<Dialect>],
) -> InputResult<Dialect> {
    let mut d = match flag {
        Some(s) => s.parse::<Dialect>().map_err(|e| e.to_string())?,
        None => {
            let mut found = declared.iter().flatten();
            let first = *found
                .next()
                .ok_or("no dialect given: pass --dialect or declare one in the ontology")?;
            if found.any(|d| *d != first) {
                return Err("the ontologies declare different dialects".into());
            }
            first
        }
    };
    if universal {
        d = d.with_universal();
    }
    Ok(d)
}
