//! Character trie and minimal DAWG, both searched by carrying one
//! Levenshtein DP row per node and pruning once the row minimum exceeds the
//! distance bound.

use std::collections::HashMap;

use super::Candidate;

trait CharGraph {
    fn edges(&self, node: usize) -> &[(char, u32)];
    fn is_terminal(&self, node: usize) -> bool;
}

fn search<G: CharGraph>(graph: &G, query: &[char], max: usize) -> Vec<Candidate> {
    let mut out = Vec::new();
    let first_row: Vec<usize> = (0..=query.len()).collect();
    let mut prefix = String::new();
    descend(graph, 0, &first_row, query, max, &mut prefix, &mut out);
    out
}

fn descend<G: CharGraph>(
    graph: &G,
    node: usize,
    row: &[usize],
    query: &[char],
    max: usize,
    prefix: &mut String,
    out: &mut Vec<Candidate>,
) {
    let n = query.len();
    let mut next = vec![0; n + 1];
    for &(ch, child) in graph.edges(node) {
        next[0] = row[0] + 1;
        let mut best = next[0];
        for j in 1..=n {
            next[j] = (row[j - 1] + usize::from(query[j - 1] != ch))
                .min(row[j] + 1)
                .min(next[j - 1] + 1);
            best = best.min(next[j]);
        }
        if best > max {
            continue;
        }
        prefix.push(ch);
        if graph.is_terminal(child as usize) && next[n] <= max {
            out.push(Candidate {
                word: prefix.clone(),
                edit_distance: next[n],
            });
        }
        descend(graph, child as usize, &next, query, max, prefix, out);
        prefix.pop();
    }
}

#[derive(Debug, Clone, Default)]
struct Node {
    edges: Vec<(char, u32)>,
    terminal: bool,
}

/// Uncompressed prefix tree.
#[derive(Debug, Clone)]
pub struct Trie {
    nodes: Vec<Node>,
}

impl Trie {
    pub fn from_words(words: &[String]) -> Self {
        let mut nodes = vec![Node::default()];
        for word in words {
            let mut cur = 0;
            for ch in word.chars() {
                cur = match nodes[cur].edges.binary_search_by_key(&ch, |e| e.0) {
                    Ok(i) => nodes[cur].edges[i].1 as usize,
                    Err(i) => {
                        let id = nodes.len();
                        nodes.push(Node::default());
                        nodes[cur].edges.insert(i, (ch, id as u32));
                        id
                    }
                };
            }
            nodes[cur].terminal = true;
        }
        Self { nodes }
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn within(&self, query: &[char], max: usize) -> Vec<Candidate> {
        search(self, query, max)
    }
}

impl CharGraph for Trie {
    fn edges(&self, node: usize) -> &[(char, u32)] {
        &self.nodes[node].edges
    }

    fn is_terminal(&self, node: usize) -> bool {
        self.nodes[node].terminal
    }
}

/// Minimal acyclic automaton (shared prefixes and suffixes), built
/// incrementally from sorted input.
#[derive(Debug, Clone)]
pub struct Dawg {
    nodes: Vec<Node>,
    reachable: usize,
}

impl Dawg {
    pub fn from_words(words: &[String]) -> Self {
        let mut sorted: Vec<&str> = words.iter().map(String::as_str).collect();
        sorted.sort_unstable();
        sorted.dedup();

        let mut builder = DawgBuilder {
            nodes: vec![Node::default()],
            register: HashMap::new(),
            unchecked: Vec::new(),
        };
        let mut previous: Vec<char> = Vec::new();
        for word in sorted {
            let chars: Vec<char> = word.chars().collect();
            let common = chars.iter().zip(&previous).take_while(|(a, b)| a == b).count();
            builder.minimize(common);
            let mut cur = builder.unchecked.last().map_or(0, |u| u.2);
            for &ch in &chars[common..] {
                let id = builder.nodes.len() as u32;
                builder.nodes.push(Node::default());
                builder.nodes[cur].edges.push((ch, id));
                builder.unchecked.push((cur, ch, id as usize));
                cur = id as usize;
            }
            builder.nodes[cur].terminal = true;
            previous = chars;
        }
        builder.minimize(0);

        let nodes = builder.nodes;
        let reachable = count_reachable(&nodes);
        Self { nodes, reachable }
    }

    /// Nodes reachable from the root after minimization.
    pub fn node_count(&self) -> usize {
        self.reachable
    }

    pub fn within(&self, query: &[char], max: usize) -> Vec<Candidate> {
        search(self, query, max)
    }
}

impl CharGraph for Dawg {
    fn edges(&self, node: usize) -> &[(char, u32)] {
        &self.nodes[node].edges
    }

    fn is_terminal(&self, node: usize) -> bool {
        self.nodes[node].terminal
    }
}

struct DawgBuilder {
    nodes: Vec<Node>,
    register: HashMap<(bool, Vec<(char, u32)>), u32>,
    // (parent, label, child) along the most recently inserted word
    unchecked: Vec<(usize, char, usize)>,
}

impl DawgBuilder {
    fn minimize(&mut self, down_to: usize) {
        while self.unchecked.len() > down_to {
            let (parent, ch, child) = self.unchecked.pop().expect("non-empty");
            let key = (self.nodes[child].terminal, self.nodes[child].edges.clone());
            match self.register.get(&key) {
                Some(&existing) => {
                    let edge = self.nodes[parent]
                        .edges
                        .iter_mut()
                        .find(|e| e.0 == ch)
                        .expect("edge to unchecked child");
                    edge.1 = existing;
                }
                None => {
                    self.register.insert(key, child as u32);
                }
            }
        }
    }
}

fn count_reachable(nodes: &[Node]) -> usize {
    let mut seen = vec![false; nodes.len()];
    let mut stack = vec![0usize];
    seen[0] = true;
    let mut count = 0;
    while let Some(n) = stack.pop() {
        count += 1;
        for &(_, c) in &nodes[n].edges {
            if !seen[c as usize] {
                seen[c as usize] = true;
                stack.push(c as usize);
            }
        }
    }
    count
}
