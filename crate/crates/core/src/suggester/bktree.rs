use super::Candidate;
use crate::distance::levenshtein;

/// Burkhard-Keller tree under Levenshtein distance.
#[derive(Debug, Clone, Default)]
pub struct BkTree {
    nodes: Vec<BkNode>,
}

#[derive(Debug, Clone)]
struct BkNode {
    word: String,
    chars: Vec<char>,
    children: Vec<(usize, usize)>,
}

impl BkTree {
    pub fn from_words(words: &[String]) -> Self {
        let mut tree = Self::default();
        for w in words {
            tree.insert(w);
        }
        tree
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn insert(&mut self, word: &str) {
        let chars: Vec<char> = word.chars().collect();
        let node = BkNode {
            word: word.to_string(),
            chars,
            children: Vec::new(),
        };
        if self.nodes.is_empty() {
            self.nodes.push(node);
            return;
        }
        let mut cur = 0;
        loop {
            let d = levenshtein(&node.chars, &self.nodes[cur].chars);
            if d == 0 {
                return;
            }
            match self.nodes[cur].children.iter().find(|c| c.0 == d) {
                Some(&(_, next)) => cur = next,
                None => {
                    let id = self.nodes.len();
                    self.nodes[cur].children.push((d, id));
                    self.nodes.push(node);
                    return;
                }
            }
        }
    }

    pub fn within(&self, query: &[char], max: usize) -> Vec<Candidate> {
        let mut out = Vec::new();
        if self.nodes.is_empty() {
            return out;
        }
        let mut stack = vec![0];
        while let Some(n) = stack.pop() {
            let node = &self.nodes[n];
            let d = levenshtein(query, &node.chars);
            if d <= max {
                out.push(Candidate {
                    word: node.word.clone(),
                    edit_distance: d,
                });
            }
            let lo = d.saturating_sub(max);
            let hi = d + max;
            stack.extend(
                node.children
                    .iter()
                    .filter(|(cd, _)| (lo..=hi).contains(cd))
                    .map(|&(_, child)| child),
            );
        }
        out
    }
}
