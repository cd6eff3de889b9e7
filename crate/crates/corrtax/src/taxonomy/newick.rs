//! Minimal Newick reader, enough to read back [`super::export_newick`] output
//! and recover cophenetic heights from branch lengths.

use super::{TaxonomyError, UltrametricMatrix};
use crate::panel::AssetId;

#[derive(Debug, Clone, PartialEq)]
pub struct NewickNode {
    pub name: Option<String>,
    pub length: Option<f64>,
    pub children: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NewickTree {
    pub nodes: Vec<NewickNode>,
    pub root: usize,
}

struct Parser<'a> {
    text: &'a [u8],
    pos: usize,
    nodes: Vec<NewickNode>,
}

impl Parser<'_> {
    fn error(&self, message: impl Into<String>) -> TaxonomyError {
        TaxonomyError::Newick {
            position: self.pos,
            message: message.into(),
        }
    }

    fn skip_blank(&mut self) {
        while self.pos < self.text.len() {
            match self.text[self.pos] {
                b' ' | b'\t' | b'\r' | b'\n' => self.pos += 1,
                b'[' => {
                    while self.pos < self.text.len() && self.text[self.pos] != b']' {
                        self.pos += 1;
                    }
                    self.pos += 1;
                }
                _ => break,
            }
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_blank();
        self.text.get(self.pos).copied()
    }

    fn label(&mut self) -> Result<Option<String>, TaxonomyError> {
        match self.peek() {
            Some(b'\'') => {
                self.pos += 1;
                let mut out = Vec::new();
                loop {
                    match self.text.get(self.pos) {
                        None => return Err(self.error("unterminated quoted label")),
                        Some(b'\'') if self.text.get(self.pos + 1) == Some(&b'\'') => {
                            out.push(b'\'');
                            self.pos += 2;
                        }
                        Some(b'\'') => {
                            self.pos += 1;
                            break;
                        }
                        Some(&c) => {
                            out.push(c);
                            self.pos += 1;
                        }
                    }
                }
                String::from_utf8(out)
                    .map(Some)
                    .map_err(|_| self.error("label is not utf-8"))
            }
            _ => {
                let start = self.pos;
                while let Some(&c) = self.text.get(self.pos) {
                    if b"():,;[]' \t\r\n".contains(&c) {
                        break;
                    }
                    self.pos += 1;
                }
                let raw =
                    std::str::from_utf8(&self.text[start..self.pos]).map_err(|_| self.error("label is not utf-8"))?;
                Ok((!raw.is_empty()).then(|| raw.to_string()))
            }
        }
    }

    fn length(&mut self) -> Result<Option<f64>, TaxonomyError> {
        if self.peek() != Some(b':') {
            return Ok(None);
        }
        self.pos += 1;
        self.skip_blank();
        let start = self.pos;
        while let Some(&c) = self.text.get(self.pos) {
            if !(c.is_ascii_digit() || b"+-.eE".contains(&c)) {
                break;
            }
            self.pos += 1;
        }
        let raw = std::str::from_utf8(&self.text[start..self.pos]).expect("ascii");
        raw.parse()
            .map(Some)
            .map_err(|_| self.error(format!("bad branch length `{raw}`")))
    }

    fn subtree(&mut self) -> Result<usize, TaxonomyError> {
        let mut children = Vec::new();
        if self.peek() == Some(b'(') {
            self.pos += 1;
            loop {
                children.push(self.subtree()?);
                match self.peek() {
                    Some(b',') => self.pos += 1,
                    Some(b')') => {
                        self.pos += 1;
                        break;
                    }
                    _ => return Err(self.error("expected `,` or `)`")),
                }
            }
        }
        let name = self.label()?;
        let length = self.length()?;
        if children.is_empty() && name.is_none() {
            return Err(self.error("leaf without a name"));
        }
        self.nodes.push(NewickNode { name, length, children });
        Ok(self.nodes.len() - 1)
    }
}

pub fn parse_newick(text: &str) -> Result<NewickTree, TaxonomyError> {
    let mut p = Parser {
        text: text.as_bytes(),
        pos: 0,
        nodes: Vec::new(),
    };
    let root = p.subtree()?;
    if p.peek() != Some(b';') {
        return Err(p.error("expected `;`"));
    }
    p.pos += 1;
    if p.peek().is_some() {
        return Err(p.error("trailing text after `;`"));
    }
    Ok(NewickTree { nodes: p.nodes, root })
}

impl NewickTree {
    /// Leaf names in document order.
    pub fn leaf_names(&self) -> Vec<&str> {
        let mut out = Vec::new();
        self.collect_leaves(self.root, &mut out);
        out.into_iter()
            .map(|i| self.nodes[i].name.as_deref().expect("leaves are named"))
            .collect()
    }

    fn collect_leaves(&self, id: usize, out: &mut Vec<usize>) {
        let node = &self.nodes[id];
        if node.children.is_empty() {
            out.push(id);
        }
        for &c in &node.children {
            self.collect_leaves(c, out);
        }
    }

    /// Distance from a node down to its deepest leaf.
    fn height(&self, id: usize) -> f64 {
        self.nodes[id]
            .children
            .iter()
            .map(|&c| self.height(c) + self.nodes[c].length.unwrap_or(0.0))
            .fold(0.0, f64::max)
    }

    /// Cophenetic matrix over `assets`: the height of the lowest common
    /// ancestor of each pair of leaves.
    pub fn cophenetic(&self, assets: &[AssetId]) -> Result<UltrametricMatrix, TaxonomyError> {
        let n = assets.len();
        let mut leaf_slot = vec![None; self.nodes.len()];
        for (id, node) in self.nodes.iter().enumerate() {
            if node.children.is_empty() {
                let name = node.name.as_deref().unwrap_or_default();
                let slot = assets
                    .iter()
                    .position(|a| a.as_str() == name)
                    .ok_or_else(|| TaxonomyError::InvalidDendrogram(format!("unknown leaf `{name}`")))?;
                leaf_slot[id] = Some(slot);
            }
        }
        let mut data = vec![0.0; n * n];
        for id in 0..self.nodes.len() {
            let children = &self.nodes[id].children;
            if children.len() < 2 {
                continue;
            }
            let h = self.height(id);
            let groups: Vec<Vec<usize>> = children
                .iter()
                .map(|&c| {
                    let mut leaves = Vec::new();
                    self.collect_leaves(c, &mut leaves);
                    leaves.into_iter().filter_map(|l| leaf_slot[l]).collect()
                })
                .collect();
            for (g, left) in groups.iter().enumerate() {
                for right in &groups[g + 1..] {
                    for &i in left {
                        for &j in right {
                            data[i * n + j] = h;
                            data[j * n + i] = h;
                        }
                    }
                }
            }
        }
        Ok(UltrametricMatrix::from_data(assets.to_vec(), data))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::panel::asset_ids;

    #[test]
    fn parses_three_leaf_tree() {
        let t = parse_newick("((A:0.5,B:0.5):0.3,C:0.8);").unwrap();
        assert_eq!(t.leaf_names(), vec!["A", "B", "C"]);
        let du = t.cophenetic(&asset_ids(["A", "B", "C"]).unwrap()).unwrap();
        assert_eq!(du.get(0, 1), 0.5);
        assert!((du.get(0, 2) - 0.8).abs() < 1e-15);
        assert!((du.get(1, 2) - 0.8).abs() < 1e-15);
    }

    #[test]
    fn quoted_labels_and_comments() {
        let t = parse_newick("('Guns N'' Roses':1,[note] B:1)root;").unwrap();
        assert_eq!(t.leaf_names(), vec!["Guns N' Roses", "B"]);
        assert_eq!(t.nodes[t.root].name.as_deref(), Some("root"));
    }

    #[test]
    fn rejects_malformed_text() {
        assert!(parse_newick("(A:0.5,B:0.5)").is_err());
        assert!(parse_newick("(A:0.5,B:x);").is_err());
        assert!(parse_newick("(A:0.5,:0.5);").is_err());
        assert!(parse_newick("(A,B); extra").is_err());
        assert!(parse_newick("(A,B;").is_err());
    }
}
