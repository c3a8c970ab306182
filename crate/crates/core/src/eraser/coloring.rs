use std::cmp::Reverse;
use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::EraserGraph;

/// Vertex order fed to the greedy Welsh-Powell pass.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ColoringOrder {
    /// Heaviest image first; among equal weights, the eraser whose neighbors
    /// carry the least total image weight first; then candidate order.
    #[default]
    WeightedConflict,
    /// Classic ordering: highest degree first, then candidate order.
    DegreeDescending,
}

impl std::str::FromStr for ColoringOrder {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "weighted-conflict" => Ok(ColoringOrder::WeightedConflict),
            "degree-descending" => Ok(ColoringOrder::DegreeDescending),
            other => Err(format!("unknown order {other:?} (expected weighted-conflict or degree-descending)")),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Coloring {
    /// Color of each node.
    pub colors: Vec<usize>,
    /// The order in which nodes were colored.
    pub order: Vec<usize>,
}

impl Coloring {
    pub fn color_count(&self) -> usize {
        self.colors.iter().copied().max().map_or(0, |c| c + 1)
    }

    pub fn is_proper(&self, g: &EraserGraph) -> bool {
        g.edges().all(|(a, b)| self.colors[a] != self.colors[b])
    }
}

/// Greedy sequential coloring: each node, in the chosen order, takes the
/// smallest color unused by its already-colored neighbors.
pub fn welsh_powell(g: &EraserGraph, order: ColoringOrder) -> Coloring {
    let n = g.node_count();
    let mut seq: Vec<usize> = (0..n).collect();
    match order {
        ColoringOrder::WeightedConflict => {
            let conflict: Vec<usize> = (0..n).map(|v| g.neighbors(v).iter().map(|&u| g.weight(u)).sum()).collect();
            seq.sort_by_key(|&v| (Reverse(g.weight(v)), conflict[v], v));
        }
        ColoringOrder::DegreeDescending => seq.sort_by_key(|&v| (Reverse(g.degree(v)), v)),
    }

    const UNCOLORED: usize = usize::MAX;
    let mut colors = vec![UNCOLORED; n];
    let mut used = Vec::new();
    for &v in &seq {
        used.clear();
        used.extend(g.neighbors(v).iter().map(|&u| colors[u]).filter(|&c| c != UNCOLORED));
        used.sort_unstable();
        used.dedup();
        let mut c = 0;
        for &u in &used {
            if u != c {
                break;
            }
            c += 1;
        }
        colors[v] = c;
    }
    Coloring { colors, order: seq }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ColorClass {
    pub color: usize,
    /// Node indices of the class, ascending.
    pub members: Vec<usize>,
    /// Union of the members' images.
    pub covered: BTreeSet<usize>,
    /// Sum of the members' image sizes.
    pub weight: usize,
}

/// The color class with the largest total image weight (ties: lowest color).
pub fn select_color_class(g: &EraserGraph, coloring: &Coloring) -> ColorClass {
    let k = coloring.color_count();
    let mut weights = vec![0usize; k];
    for (v, &c) in coloring.colors.iter().enumerate() {
        weights[c] += g.weight(v);
    }
    let mut best = 0;
    for c in 1..k {
        if weights[c] > weights[best] {
            best = c;
        }
    }
    if k == 0 {
        return ColorClass { color: 0, members: Vec::new(), covered: BTreeSet::new(), weight: 0 };
    }
    let members: Vec<usize> = (0..g.node_count()).filter(|&v| coloring.colors[v] == best).collect();
    let covered = members.iter().flat_map(|&v| g.nodes[v].image.iter().copied()).collect();
    ColorClass { color: best, members, covered, weight: weights[best] }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eraser::{build_graph, Eraser, EraserImage};
    use crate::keyword::Token;

    fn node(word: &str, image: &[usize]) -> EraserImage {
        EraserImage {
            eraser: Eraser::Large([Token::new(word).unwrap()].into_iter().collect()),
            image: image.to_vec(),
        }
    }

    #[test]
    fn edgeless_graph_uses_one_color() {
        let g = build_graph((0..5).map(|i| node("w", &[2 * i, 2 * i + 1])).collect());
        for order in [ColoringOrder::WeightedConflict, ColoringOrder::DegreeDescending] {
            let c = welsh_powell(&g, order);
            assert_eq!(c.colors, vec![0; 5]);
            let class = select_color_class(&g, &c);
            assert_eq!(class.members, vec![0, 1, 2, 3, 4]);
            assert_eq!(class.covered.len(), 10);
        }
    }

    #[test]
    fn triangle_needs_three_colors() {
        let g = build_graph(vec![node("a", &[0, 1]), node("b", &[1, 2]), node("c", &[1, 3])]);
        for order in [ColoringOrder::WeightedConflict, ColoringOrder::DegreeDescending] {
            let c = welsh_powell(&g, order);
            let distinct: BTreeSet<usize> = c.colors.iter().copied().collect();
            assert_eq!(distinct.len(), 3);
            assert!(c.is_proper(&g));
        }
    }

    #[test]
    fn path_with_equal_weights() {
        // a - b - c, all weight 2: greedy in order a, c, b gives a:0, b:1, c:0
        let g = build_graph(vec![node("a", &[0, 1]), node("b", &[1, 2]), node("c", &[2, 3])]);
        let c = welsh_powell(&g, ColoringOrder::WeightedConflict);
        assert_eq!(c.colors, vec![0, 1, 0]);
    }

    #[test]
    fn heaviest_class_wins() {
        let g = build_graph(vec![node("a", &[0, 1, 2]), node("b", &[2, 3])]);
        let c = welsh_powell(&g, ColoringOrder::WeightedConflict);
        let class = select_color_class(&g, &c);
        // brute force: the two singleton classes weigh 3 and 2
        let sums: Vec<usize> = [0usize, 1].iter().map(|&col| {
            (0..2).filter(|&v| c.colors[v] == col).map(|v| g.weight(v)).sum()
        }).collect();
        assert_eq!(class.weight, *sums.iter().max().unwrap());
        assert_eq!(class.members, vec![0]);
        assert_eq!(class.weight, 3);
    }

    #[test]
    fn empty_graph() {
        let g = build_graph(Vec::new());
        let c = welsh_powell(&g, ColoringOrder::default());
        let class = select_color_class(&g, &c);
        assert!(class.members.is_empty());
        assert_eq!(class.weight, 0);
    }
}
