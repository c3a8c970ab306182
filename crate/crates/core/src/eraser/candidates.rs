use std::collections::BTreeSet;

use super::{word_subsets, Eraser, EraserImage, KeywordIndex};
use crate::keyword::{Keyword, Token};

/// Candidate large erasers over `sk`.
///
/// Word sets are drawn from subsets (at most `max_words` words) of single
/// keywords; any other word set has an empty image. A word set is dropped when
/// removing one of its words leaves the image unchanged, since the smaller set
/// erases the same keywords. Only images with `2..=max_image` keywords are
/// kept. Output is sorted by image size (descending) then by word set.
pub fn enumerate_candidates(sk: &[Keyword], max_words: usize, max_image: usize) -> Vec<EraserImage> {
    let index = KeywordIndex::new(sk);
    let mut word_sets: BTreeSet<Vec<Token>> = BTreeSet::new();
    for p in sk {
        let words: Vec<Token> = p.word_set().into_iter().collect();
        word_sets.extend(word_subsets(&words, max_words));
    }

    let mut out = Vec::new();
    for words in word_sets {
        let image = index.image(words.iter());
        if image.len() < 2 || image.len() > max_image {
            continue;
        }
        if words.len() >= 2 && is_dominated(&index, &words, image.len()) {
            continue;
        }
        let eraser = Eraser::Large(words.into_iter().collect());
        out.push(EraserImage { eraser, image });
    }
    out.sort_by(|a, b| b.size().cmp(&a.size()).then_with(|| a.eraser.cmp(&b.eraser)));
    out
}

fn is_dominated(index: &KeywordIndex<'_>, words: &[Token], size: usize) -> bool {
    (0..words.len()).any(|skip| {
        let sub = words.iter().enumerate().filter(|(i, _)| *i != skip).map(|(_, w)| w);
        index.image(sub).len() == size
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eraser::erases;
    use crate::keyword::normalize;

    fn sk(list: &[&str]) -> Vec<Keyword> {
        list.iter().map(|s| normalize(s).unwrap()).collect()
    }

    #[test]
    fn lone_keyword_has_no_candidates() {
        assert!(enumerate_candidates(&sk(&["garmin chronometer"]), 3, 3).is_empty());
    }

    #[test]
    fn dominated_word_sets_are_dropped() {
        // {air, max} erases the same keywords as {air}
        let c = enumerate_candidates(&sk(&["nike air max", "air max"]), 3, 5);
        let rendered: Vec<String> = c.iter().map(|e| e.eraser.to_string()).collect();
        assert_eq!(rendered, ["{air} (large)", "{max} (large)"]);
    }

    #[test]
    fn respects_image_bounds() {
        let corpus = sk(&["a x", "a y", "a z", "b x", "b y"]);
        let c = enumerate_candidates(&corpus, 2, 2);
        assert!(c.iter().all(|e| e.size() == 2));
        let c3 = enumerate_candidates(&corpus, 2, 3);
        assert!(c3.iter().any(|e| e.size() == 3));
        for e in &c3 {
            let brute: Vec<usize> = (0..corpus.len()).filter(|&i| erases(&e.eraser, &corpus[i])).collect();
            assert_eq!(brute, e.image);
        }
    }
}
