use std::io::BufRead;

use super::SparseGraph;
use crate::error::{domain, Error, Result};

/// Reads a SNAP-style edge list: one `u v` pair of non-negative integer ids
/// per line, `#` comments and blank lines ignored.
///
/// Ids are remapped to `0..n` in ascending order of the external id and the
/// map is kept on the graph. Undirected input may list each edge once or in
/// both directions; with `directed_input` every arc is symmetrized. Either
/// way duplicates collapse and self-loops are dropped (their endpoint still
/// counts as a node).
pub fn parse_edge_list<R: BufRead>(reader: R, directed_input: bool) -> Result<SparseGraph> {
    // both readings produce the same symmetric structure; the flag only
    // documents how the input was meant
    let _ = directed_input;
    let mut arcs: Vec<(u64, u64)> = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let line = line?;
        let lineno = idx + 1;
        let body = line.trim();
        if body.is_empty() || body.starts_with('#') {
            continue;
        }
        let mut tokens = body.split_whitespace();
        let (Some(a), Some(b), None) = (tokens.next(), tokens.next(), tokens.next()) else {
            return Err(Error::Parse {
                line: lineno,
                message: format!("expected two node ids, got {:?}", body),
            });
        };
        let parse = |tok: &str| {
            tok.parse::<u64>().map_err(|_| Error::Parse {
                line: lineno,
                message: format!("{tok:?} is not a non-negative integer node id"),
            })
        };
        arcs.push((parse(a)?, parse(b)?));
    }

    let mut ids: Vec<u64> = arcs.iter().flat_map(|&(u, v)| [u, v]).collect();
    ids.sort_unstable();
    ids.dedup();
    if ids.len() < 2 {
        return domain(format!("edge list defines {} node(s); at least 2 required", ids.len()));
    }
    let index = |id: u64| ids.binary_search(&id).expect("id collected above");
    let edges: Vec<(usize, usize)> = arcs.iter().map(|&(u, v)| (index(u), index(v))).collect();
    drop(arcs);
    SparseGraph::from_edges(ids.len(), edges)?.with_node_ids(ids)
}

pub fn parse_edge_list_str(text: &str, directed_input: bool) -> Result<SparseGraph> {
    parse_edge_list(text.as_bytes(), directed_input)
}
