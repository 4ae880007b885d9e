use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::{Level, TreeError, TreeTruncation};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Json,
    Dot,
}

#[derive(Serialize, Deserialize)]
struct TreeJson {
    depth: usize,
    block: u64,
    levels: Vec<Level>,
    provenance: String,
}

pub fn emit(tr: &TreeTruncation, format: Format) -> String {
    match format {
        Format::Json => {
            let doc = TreeJson { depth: tr.depth(), block: tr.block, levels: tr.levels.clone(), provenance: tr.provenance.clone() };
            serde_json::to_string_pretty(&doc).expect("tree serializes")
        }
        Format::Dot => dot(tr),
    }
}

fn dot(tr: &TreeTruncation) -> String {
    let mut out = String::from("digraph coset_tree {\n  rankdir=TB;\n  node [shape=point];\n");
    let _ = writeln!(out, "  label=\"{}\";", tr.provenance.replace('"', "'"));
    for (k, level) in tr.levels.iter().enumerate() {
        let _ = write!(out, "  {{ rank=same;");
        for v in 0..level.size {
            let _ = write!(out, " \"{k}:{v}\";");
        }
        out.push_str(" }\n");
    }
    for (k, level) in tr.levels.iter().enumerate().skip(1) {
        for (v, p) in level.parents.iter().enumerate() {
            let _ = writeln!(out, "  \"{}:{p}\" -> \"{k}:{v}\";", k - 1);
        }
    }
    out.push_str("}\n");
    out
}

/// Reads back the JSON form. The result carries no chain, so it can be
/// compared and re-emitted but not acted on.
pub fn parse_json(text: &str) -> Result<TreeTruncation, TreeError> {
    let doc: TreeJson = serde_json::from_str(text).map_err(|e| TreeError::Parse(e.to_string()))?;
    if doc.levels.len() != doc.depth + 1 {
        return Err(TreeError::Parse(format!("depth {} with {} levels", doc.depth, doc.levels.len())));
    }
    if doc.levels[0].size != 1 || !doc.levels[0].parents.is_empty() {
        return Err(TreeError::Parse("level 0 must be a single root".into()));
    }
    for (k, pair) in doc.levels.windows(2).enumerate() {
        let (up, down) = (&pair[0], &pair[1]);
        if down.parents.len() != down.size || down.parents.iter().any(|&p| p >= up.size) {
            return Err(TreeError::Parse(format!("level {} has bad parent links", k + 1)));
        }
    }
    Ok(TreeTruncation { block: doc.block, levels: doc.levels, provenance: doc.provenance, source: None })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chains::two_adic_chain;
    use crate::groups::make_integers;
    use crate::trees::{coset_tree, truncate};

    #[test]
    fn json_round_trip_and_dot_shape() {
        let tr = truncate(&coset_tree(&two_adic_chain(&make_integers())), 3, 0).unwrap();
        let back = parse_json(&emit(&tr, Format::Json)).unwrap();
        assert_eq!(back, tr);
        assert_eq!(emit(&back, Format::Json), emit(&tr, Format::Json));
        assert!(matches!(back.act(&crate::groups::Element::int(1)), Err(TreeError::Detached)));
        let dot = emit(&tr, Format::Dot);
        assert!(dot.starts_with("digraph"));
        assert_eq!(dot.matches(" -> ").count(), 2 + 4 + 8);
        assert!(parse_json("{\"depth\":1,\"block\":0,\"levels\":[{\"size\":1,\"parents\":[]}],\"provenance\":\"\"}").is_err());
    }
}
