use std::collections::BTreeSet;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::{checked_modulus, AttainedSet, Branch, Compressed, Form};
use crate::error::{Error, Result};

/// Explicit trees with more nodes than this are refused by [`to_dot`].
pub const MAX_EXPLICIT_NODES: usize = 100_000;

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CompressedJson {
    p: u64,
    lambda: u32,
    e: u32,
    cylinders: Vec<String>,
    zeros: Vec<Branch>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ExplicitJson {
    p: u64,
    lambda: u32,
    residues: Vec<String>,
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum TreeJson {
    Compressed(CompressedJson),
    Explicit(ExplicitJson),
}

fn strings(values: &[u64]) -> Vec<String> {
    values.iter().map(u64::to_string).collect()
}

fn numbers(values: &[String]) -> Result<Vec<u64>> {
    values
        .iter()
        .map(|s| s.parse().map_err(|_| Error::invalid(format!("bad residue {s:?}"))))
        .collect()
}

pub fn to_json(set: &AttainedSet) -> Result<String> {
    let doc = match &set.form {
        Form::Explicit(r) => TreeJson::Explicit(ExplicitJson { p: set.p, lambda: set.lambda, residues: strings(r) }),
        Form::Compressed(c) => TreeJson::Compressed(CompressedJson {
            p: set.p,
            lambda: set.lambda,
            e: c.e,
            cylinders: strings(&c.cylinders),
            zeros: c.zeros.clone(),
        }),
    };
    Ok(serde_json::to_string_pretty(&doc)?)
}

pub fn from_json(text: &str) -> Result<AttainedSet> {
    let set = match serde_json::from_str(text)? {
        TreeJson::Explicit(x) => AttainedSet::explicit(x.p, x.lambda, numbers(&x.residues)?),
        TreeJson::Compressed(x) => {
            for b in &x.zeros {
                if b.path.len() < x.lambda as usize || b.path.iter().any(|&d| d >= x.p) {
                    return Err(Error::invalid(format!("branch for i = {} has a malformed path", b.i)));
                }
            }
            AttainedSet {
                p: x.p,
                lambda: x.lambda,
                form: Form::Compressed(Compressed { e: x.e, cylinders: numbers(&x.cylinders)?, zeros: x.zeros }),
            }
        }
    };
    Ok(set)
}

/// Base-p digits of `r` at `level`, most significant first; digits are
/// dot-separated when p > 10.
fn node_id(p: u64, level: u32, r: u64) -> String {
    if level == 0 {
        return "root".into();
    }
    let mut digits = Vec::with_capacity(level as usize);
    let mut x = r;
    for _ in 0..level {
        digits.push(x % p);
        x /= p;
    }
    let sep = if p > 10 { "." } else { "" };
    digits.iter().rev().map(u64::to_string).collect::<Vec<_>>().join(sep)
}

struct Layout {
    nodes: BTreeSet<(u32, u64)>,
    full: BTreeSet<(u32, u64)>,
}

impl Layout {
    fn add_prefixes(&mut self, p: u64, top: u32, r: u64) {
        let mut m = 1u64;
        for k in 0..=top {
            self.nodes.insert((k, r % m));
            m = m.saturating_mul(p);
        }
    }
}

fn explicit_layout(p: u64, lambda: u32, residues: &[u64]) -> Result<Layout> {
    let mut layout = Layout { nodes: BTreeSet::new(), full: BTreeSet::new() };
    for &r in residues {
        layout.add_prefixes(p, lambda, r);
        if layout.nodes.len() > MAX_EXPLICIT_NODES {
            return Err(Error::Resource(format!(
                "the explicit tree has more than {MAX_EXPLICIT_NODES} nodes; export the compressed form"
            )));
        }
    }
    Ok(layout)
}

fn compressed_layout(p: u64, lambda: u32, c: &Compressed) -> Result<Layout> {
    let mut layout = Layout { nodes: BTreeSet::new(), full: BTreeSet::new() };
    let top = c.e.min(lambda);
    for &r in &c.cylinders {
        layout.add_prefixes(p, top, r);
        if c.e <= lambda {
            layout.full.insert((c.e, r));
        }
    }
    for b in &c.zeros {
        let path = super::value_of(&b.path[..lambda as usize], p);
        layout.add_prefixes(p, lambda, path);
        for s in b.subtrees.iter().filter(|s| s.level < lambda) {
            let low = p.pow(s.level);
            let digit = (b.path[s.level as usize] + s.offset_digit) % p;
            let root = path % low + digit * low;
            layout.nodes.insert((s.level + 1, root));
            layout.full.insert((s.level + 1, root));
        }
    }
    if layout.nodes.len() > MAX_EXPLICIT_NODES {
        return Err(Error::Resource(format!("the tree has more than {MAX_EXPLICIT_NODES} nodes")));
    }
    Ok(layout)
}

/// Graphviz rendering. Edges carry the base-p digit they append; a dotted
/// edge to a point marks a full p-ary subtree that is not drawn.
pub fn to_dot(set: &AttainedSet) -> Result<String> {
    checked_modulus(set.p, set.lambda)?;
    let layout = match &set.form {
        Form::Explicit(r) if r.is_empty() => return Ok("digraph attained {\n}\n".into()),
        Form::Explicit(r) => explicit_layout(set.p, set.lambda, r)?,
        Form::Compressed(c) => compressed_layout(set.p, set.lambda, c)?,
    };
    let p = set.p;
    let mut out = String::from("digraph attained {\n");
    let _ = writeln!(out, "  // p = {p}, lambda = {}", set.lambda);
    out.push_str("  node [shape=circle];\n");
    for &(level, r) in &layout.nodes {
        let id = node_id(p, level, r);
        let _ = writeln!(out, "  \"{id}\";");
    }
    // sorted by (level, parent, digit) so siblings appear in digit order
    let mut edges: Vec<(u32, u64, u64, u64)> = layout
        .nodes
        .iter()
        .filter(|(level, _)| *level > 0)
        .map(|&(level, r)| {
            let low = p.pow(level - 1);
            (level, r % low, r / low, r)
        })
        .collect();
    edges.sort_unstable();
    for (level, parent, digit, child) in edges {
        let _ = writeln!(
            out,
            "  \"{}\" -> \"{}\" [label=\"{digit}\"];",
            node_id(p, level - 1, parent),
            node_id(p, level, child)
        );
    }
    for &(level, r) in &layout.full {
        let id = node_id(p, level, r);
        let _ = writeln!(out, "  \"{id}*\" [shape=point];");
        let _ = writeln!(out, "  \"{id}\" -> \"{id}*\" [style=dotted];");
    }
    out.push_str("}\n");
    Ok(out)
}
