use std::cmp::Reverse;
use std::collections::{BTreeSet, BinaryHeap, HashMap, HashSet};

use super::{word_subsets, Eraser, KeywordIndex};
use crate::keyword::{Keyword, Token};

/// A strict eraser set for `s` relative to the universe `sp`.
///
/// With `s` inside `sp`, expanding the result over `sp` gives back exactly
/// `s`. Large erasers are chosen greedily by how many still-uncovered
/// keywords they erase, must erase at least two of them, and must not erase any
/// keyword of `sp` outside `s`. Ties go to fewer words, then the smaller word
/// list. Leftover keywords get exact erasers in input order.
pub fn reduce(s: &[Keyword], sp: &[Keyword], max_words: usize) -> Vec<Eraser> {
    let mut s_list: Vec<&Keyword> = Vec::new();
    let mut seen = HashSet::new();
    for p in s {
        if seen.insert(p) {
            s_list.push(p);
        }
    }

    let index = KeywordIndex::new(sp);
    let slots: HashMap<&Keyword, usize> = s_list.iter().enumerate().map(|(j, p)| (*p, j)).collect();
    let slot_of: Vec<Option<usize>> = sp.iter().map(|p| slots.get(p).copied()).collect();

    let mut words_seen: BTreeSet<Vec<Token>> = BTreeSet::new();
    for p in &s_list {
        let ws: Vec<Token> = p.word_set().into_iter().collect();
        words_seen.extend(word_subsets(&ws, max_words));
    }

    // candidate -> slots of s_list it erases
    let mut cands: Vec<(Vec<Token>, Vec<usize>)> = Vec::new();
    for ws in words_seen {
        let image = index.image(ws.iter());
        let mut slots = Vec::with_capacity(image.len());
        let mut strict = true;
        for i in image {
            match slot_of[i] {
                Some(j) => slots.push(j),
                None => {
                    strict = false;
                    break;
                }
            }
        }
        if strict && slots.len() >= 2 {
            cands.push((ws, slots));
        }
    }

    let mut covered = vec![false; s_list.len()];
    // (gain, fewer words, smaller word set, candidate)
    type Entry<'a> = (usize, Reverse<usize>, Reverse<&'a Vec<Token>>, usize);
    let mut heap: BinaryHeap<Entry> = cands
        .iter()
        .enumerate()
        .map(|(c, (ws, slots))| (slots.len(), Reverse(ws.len()), Reverse(ws), c))
        .collect();
    let mut picked = Vec::new();
    while let Some((gain, len, ws, c)) = heap.pop() {
        if gain < 2 {
            break;
        }
        let now = cands[c].1.iter().filter(|&&j| !covered[j]).count();
        if now < gain {
            heap.push((now, len, ws, c));
            continue;
        }
        for &j in &cands[c].1 {
            covered[j] = true;
        }
        picked.push(Eraser::Large(cands[c].0.iter().cloned().collect()));
    }

    let exact = s_list.iter().zip(&covered).filter(|(_, c)| !**c).map(|(p, _)| Eraser::Exact((*p).clone()));
    picked.into_iter().chain(exact).collect()
}

/// Keywords of `sp` erased by at least one of `erasers`.
pub fn expand(erasers: &[Eraser], sp: &[Keyword]) -> BTreeSet<Keyword> {
    sp.iter().filter(|p| erasers.iter().any(|e| e.erases(p))).cloned().collect()
}
