use std::collections::BTreeSet;

use super::EraserImage;

/// Intersection graph of eraser images: an edge joins two erasers whose
/// images share a keyword. Node weight is image size.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EraserGraph {
    pub nodes: Vec<EraserImage>,
    adjacency: Vec<Vec<usize>>,
    edge_count: usize,
}

impl EraserGraph {
    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adjacency[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adjacency[v].len()
    }

    pub fn weight(&self, v: usize) -> usize {
        self.nodes[v].size()
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        self.adjacency[a].binary_search(&b).is_ok()
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.adjacency
            .iter()
            .enumerate()
            .flat_map(|(a, ns)| ns.iter().filter(move |&&b| a < b).map(move |&b| (a, b)))
    }
}

pub fn build_graph(candidates: Vec<EraserImage>) -> EraserGraph {
    let universe = candidates.iter().flat_map(|c| c.image.iter().copied()).max().map_or(0, |m| m + 1);
    let mut by_keyword: Vec<Vec<usize>> = vec![Vec::new(); universe];
    for (v, c) in candidates.iter().enumerate() {
        for &p in &c.image {
            by_keyword[p].push(v);
        }
    }
    let mut adj: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); candidates.len()];
    for holders in &by_keyword {
        for (i, &a) in holders.iter().enumerate() {
            for &b in &holders[i + 1..] {
                adj[a].insert(b);
                adj[b].insert(a);
            }
        }
    }
    let adjacency: Vec<Vec<usize>> = adj.into_iter().map(|s| s.into_iter().collect()).collect();
    let edge_count = adjacency.iter().map(Vec::len).sum::<usize>() / 2;
    EraserGraph { nodes: candidates, adjacency, edge_count }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eraser::Eraser;
    use crate::keyword::Token;

    fn node(word: &str, image: &[usize]) -> EraserImage {
        EraserImage {
            eraser: Eraser::Large([Token::new(word).unwrap()].into_iter().collect()),
            image: image.to_vec(),
        }
    }

    #[test]
    fn disjoint_images_give_no_edges() {
        let g = build_graph(vec![node("a", &[0, 1]), node("b", &[2, 3]), node("c", &[4, 5])]);
        assert_eq!(g.edge_count(), 0);
        assert_eq!(g.node_count(), 3);
    }

    #[test]
    fn shared_keyword_gives_triangle() {
        let g = build_graph(vec![node("a", &[0, 1]), node("b", &[1, 2]), node("c", &[1, 3])]);
        assert_eq!(g.edge_count(), 3);
        assert!(g.has_edge(0, 1) && g.has_edge(1, 2) && g.has_edge(0, 2));
        assert_eq!(g.edges().collect::<Vec<_>>(), vec![(0, 1), (0, 2), (1, 2)]);
    }

    #[test]
    fn edges_match_pairwise_intersection() {
        let nodes = vec![node("a", &[0, 4]), node("b", &[1, 2]), node("c", &[2, 4]), node("d", &[3, 5])];
        let g = build_graph(nodes.clone());
        for a in 0..nodes.len() {
            assert!(!g.has_edge(a, a));
            for b in 0..nodes.len() {
                if a != b {
                    assert_eq!(g.has_edge(a, b), nodes[a].intersects(&nodes[b]));
                }
            }
        }
    }
}
