//! Named example presentations used by tests, benches and the CLI docs.
//!
//! Every builder returns document text, so the same fixtures can be written
//! to disk or parsed in memory.

use serde_json::{json, Value};

use crate::graph::{parse_graph, GraphPresentation};
use crate::kgraph::{parse_kgraph, KGraphPresentation};

fn edge(id: &str, s: &str, r: &str) -> Value {
    json!({"id": id, "source": s, "range": r})
}

fn colored(id: &str, s: &str, r: &str, c: usize) -> Value {
    json!({"id": id, "source": s, "range": r, "color": c})
}

fn square(a: &str, b: &str, c: &str, d: &str) -> Value {
    json!({"first": [a, b], "second": [c, d]})
}

fn graph_doc(vertices: &[String], edges: Vec<Value>, tails: &[String]) -> String {
    json!({"k": 1, "vertices": vertices, "edges": edges, "tails": tails}).to_string()
}

pub fn graph(text: &str) -> GraphPresentation {
    parse_graph(text).expect("corpus graph parses")
}

pub fn kgraph(text: &str) -> KGraphPresentation {
    parse_kgraph(text).expect("corpus k-graph parses")
}

/// Directed cycle `v0 → v1 → … → v{n-1} → v0`.
pub fn cycle(n: usize) -> String {
    let vs: Vec<String> = (0..n).map(|i| format!("v{i}")).collect();
    let es = (0..n)
        .map(|i| edge(&format!("e{i}"), &vs[i], &vs[(i + 1) % n]))
        .collect();
    graph_doc(&vs, es, &[])
}

/// Disjoint cycles with the given lengths.
pub fn cycles(lengths: &[usize]) -> String {
    let mut vs = Vec::new();
    let mut es = Vec::new();
    for (c, &n) in lengths.iter().enumerate() {
        let names: Vec<String> = (0..n).map(|i| format!("c{c}v{i}")).collect();
        for i in 0..n {
            es.push(edge(&format!("c{c}e{i}"), &names[i], &names[(i + 1) % n]));
        }
        vs.extend(names);
    }
    graph_doc(&vs, es, &[])
}

/// One vertex carrying `m` loops, so `m` edges enter it.
pub fn rose(m: usize) -> String {
    let es = (0..m).map(|i| edge(&format!("l{i}"), "v", "v")).collect();
    graph_doc(&["v".to_string()], es, &[])
}

/// Root `r` with `ends` branches; branch `i` is a path of `i + 1` edges
/// ending at a tail-marked vertex.
pub fn broom(ends: usize) -> String {
    let mut vs = vec!["r".to_string()];
    let mut es = Vec::new();
    let mut tails = Vec::new();
    for b in 0..ends {
        let mut prev = "r".to_string();
        for step in 0..=b {
            let v = format!("b{b}s{step}");
            es.push(edge(&format!("b{b}e{step}"), &prev, &v));
            vs.push(v.clone());
            prev = v;
        }
        tails.push(prev);
    }
    graph_doc(&vs, es, &tails)
}

/// Path `u0 → … → u{len}` ending in a tail (one end).
pub fn ray(len: usize) -> String {
    let vs: Vec<String> = (0..=len).map(|i| format!("u{i}")).collect();
    let es = (0..len).map(|i| edge(&format!("f{i}"), &vs[i], &vs[i + 1])).collect();
    graph_doc(&vs, es, &[vs[len].clone()])
}

/// Full binary tree of the given depth with every leaf tail-marked.
pub fn dyadic_tree(depth: usize) -> String {
    let mut vs = vec!["t".to_string()];
    let mut es = Vec::new();
    let mut level = vec!["t".to_string()];
    for _ in 0..depth {
        let mut next = Vec::new();
        for v in &level {
            for side in ["0", "1"] {
                let child = format!("{v}{side}");
                es.push(edge(&format!("{child}~in"), v, &child));
                vs.push(child.clone());
                next.push(child);
            }
        }
        level = next;
    }
    graph_doc(&vs, es, &level)
}

/// Path `p0 → … → p{len}` ending at a sink.
pub fn path_to_sink(len: usize) -> String {
    let vs: Vec<String> = (0..=len).map(|i| format!("p{i}")).collect();
    let es = (0..len).map(|i| edge(&format!("g{i}"), &vs[i], &vs[i + 1])).collect();
    graph_doc(&vs, es, &[])
}

/// A loop at `v` with an exit edge to a sink `w`.
pub fn loop_with_exit() -> String {
    graph_doc(
        &["v".to_string(), "w".to_string()],
        vec![edge("e", "v", "v"), edge("f", "v", "w")],
        &[],
    )
}

/// Disjoint union of a cycle and a broom.
pub fn cycle_and_broom(n: usize, ends: usize) -> String {
    let mut a: Value = serde_json::from_str(&cycle(n)).expect("json");
    let b: Value = serde_json::from_str(&broom(ends)).expect("json");
    for field in ["vertices", "edges", "tails"] {
        let extra = b[field].as_array().cloned().unwrap_or_default();
        a[field].as_array_mut().expect("array").extend(extra);
    }
    a.to_string()
}

/// Graphs with single entry and no sinks, used for orientation checks.
pub fn single_entry_graphs() -> Vec<(String, String)> {
    let mut out = Vec::new();
    for n in 1..=5 {
        out.push((format!("cycle-{n}"), cycle(n)));
    }
    out.push(("cycles-1-2".into(), cycles(&[1, 2])));
    out.push(("cycles-2-3-1".into(), cycles(&[2, 3, 1])));
    out.push(("ray-2".into(), ray(2)));
    for ends in 1..=3 {
        out.push((format!("broom-{ends}"), broom(ends)));
    }
    out.push(("dyadic-2".into(), dyadic_tree(2)));
    out.push(("cycle-and-broom".into(), cycle_and_broom(3, 2)));
    out
}

/// One vertex, one loop per color, all squares commuting.
pub fn torus(k: usize) -> String {
    let names: Vec<String> = (1..=k).map(|c| format!("e{c}")).collect();
    let es: Vec<Value> = names
        .iter()
        .enumerate()
        .map(|(c, n)| colored(n, "v", "v", c + 1))
        .collect();
    let mut sq = Vec::new();
    for a in 0..k {
        for b in a + 1..k {
            sq.push(square(&names[a], &names[b], &names[b], &names[a]));
        }
    }
    json!({"k": k, "vertices": ["v"], "edges": es, "squares": sq}).to_string()
}

/// Two vertices swapped by color 1, each with a color-2 loop.
pub fn two_vertex() -> String {
    json!({"k": 2, "vertices": ["u", "w"],
        "edges": [colored("x", "u", "w", 1), colored("y", "w", "u", 1),
                  colored("fu", "u", "u", 2), colored("fw", "w", "w", 2)],
        "squares": [square("x", "fw", "fu", "x"), square("y", "fu", "fw", "y")]})
    .to_string()
}

/// The square `ef = ab`, completed so every vertex emits both colors.
pub fn ef_ab() -> String {
    json!({"k": 2, "vertices": ["s", "m1", "m2", "t"],
        "edges": [colored("e", "s", "m1", 1), colored("f", "m1", "t", 2),
                  colored("a", "s", "m2", 2), colored("b", "m2", "t", 1),
                  colored("g", "m1", "t", 1), colored("h", "m2", "t", 2),
                  colored("p", "t", "t", 1), colored("q", "t", "t", 2)],
        "squares": [square("e", "f", "a", "b"), square("b", "q", "h", "p"),
                    square("g", "q", "f", "p"), square("p", "q", "q", "p")]})
    .to_string()
}

/// One vertex with two color-1 loops and one color-2 loop: two edges of
/// color 1 enter `v`.
pub fn double_entry_2graph() -> String {
    json!({"k": 2, "vertices": ["v"],
        "edges": [colored("a1", "v", "v", 1), colored("a2", "v", "v", 1),
                  colored("b", "v", "v", 2)],
        "squares": [square("a1", "b", "b", "a1"), square("a2", "b", "b", "a2")]})
    .to_string()
}

/// Two vertices, each with loops of both colors, joined by nothing.
pub fn two_tori() -> String {
    json!({"k": 2, "vertices": ["u", "w"],
        "edges": [colored("p", "u", "u", 1), colored("q", "u", "u", 2),
                  colored("r", "w", "w", 1), colored("s", "w", "w", 2)],
        "squares": [square("p", "q", "q", "p"), square("r", "s", "s", "r")]})
    .to_string()
}

/// Single-exit k-graphs used for orientation checks.
pub fn single_exit_kgraphs() -> Vec<(String, String)> {
    vec![
        ("torus-2".into(), torus(2)),
        ("two-vertex".into(), two_vertex()),
        ("torus-3".into(), torus(3)),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixtures_parse() {
        for (_, text) in single_entry_graphs() {
            assert!(graph(&text).single_entry_check().holds, "{text}");
        }
        assert!(!graph(&rose(2)).single_entry_check().holds);
        graph(&path_to_sink(2));
        graph(&loop_with_exit());
        for (_, text) in single_exit_kgraphs() {
            assert!(kgraph(&text).single_exit());
        }
        assert!(!kgraph(&double_entry_2graph()).single_exit());
        assert!(!kgraph(&ef_ab()).single_exit());
        assert!(kgraph(&two_tori()).single_exit());
        assert_eq!(kgraph(&torus(4)).rank(), 4);
    }
}
