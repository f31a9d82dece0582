//! Longest descending chain prefixes, by dynamic programming over ordered
//! germ pairs. Diagnostic only: a finite set has no infinite chain, and this
//! is cubic in the number of germs.

use crate::geometry::growth_distances;
use crate::pointprocess::MarkedPointSet;
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ChainType {
    /// `d(x_{n-1}, x_n) ≥ d(x_n, x_{n-1}) ≥ d(x_n, x_{n+1})`.
    Type1,
    /// `d(x_n, x_{n-1}) ≥ max(d(x_n, x_{n+1}), d(x_{n+1}, x_n))`.
    Type2,
}

/// Longest germ sequence obeying the ordering of `kind`, truncated to
/// `max_len`. Germs may repeat; the ordering key must strictly decrease
/// along the chain, which only excludes exact ties. Empty if no pair
/// qualifies.
pub fn find_descending_chain<T: Scalar>(set: &MarkedPointSet<T>, kind: ChainType, max_len: usize) -> Vec<usize> {
    let pts = set.points();
    let n = pts.len();
    if n < 2 || max_len == 0 {
        return Vec::new();
    }
    let parallel = T::default_tolerances().parallel;
    let mut d = vec![T::infinity(); n * n];
    for i in 0..n {
        for j in (i + 1)..n {
            let (_, a, b) = growth_distances(&pts[i], &pts[j], parallel);
            d[i * n + j] = a;
            d[j * n + i] = b;
        }
    }
    let dist = |a: usize, b: usize| d[a * n + b];

    // State (a, b) = consecutive chain entries; its key bounds what may follow.
    let valid = |a: usize, b: usize| -> bool {
        let (ab, ba) = (dist(a, b), dist(b, a));
        ab.is_finite()
            && ba.is_finite()
            && match kind {
                ChainType::Type1 => ab >= ba,
                ChainType::Type2 => true,
            }
    };
    let key = |a: usize, b: usize| match kind {
        ChainType::Type1 => dist(a, b),
        ChainType::Type2 => dist(b, a),
    };
    let step_ok = |a: usize, b: usize, c: usize| -> bool {
        match kind {
            ChainType::Type1 => dist(b, a) >= dist(b, c),
            ChainType::Type2 => dist(b, a) >= dist(b, c).max(dist(c, b)),
        }
    };

    let mut states: Vec<(usize, usize)> = (0..n)
        .flat_map(|a| (0..n).map(move |b| (a, b)))
        .filter(|&(a, b)| a != b && valid(a, b))
        .collect();
    if states.is_empty() {
        return Vec::new();
    }
    states.sort_by(|&(a, b), &(c, e)| key(a, b).partial_cmp(&key(c, e)).unwrap().then((a, b).cmp(&(c, e))));

    // best[a*n+b]: longest chain (in germs) starting with a, b; next: its successor germ.
    let mut best = vec![0usize; n * n];
    let mut next = vec![usize::MAX; n * n];
    for &(a, b) in &states {
        let k = key(a, b);
        let mut len = 2;
        let mut succ = usize::MAX;
        for c in (0..n).filter(|&c| c != b) {
            if !valid(b, c) || !step_ok(a, b, c) || key(b, c) >= k {
                continue;
            }
            let cand = 1 + best[b * n + c];
            if cand > len {
                len = cand;
                succ = c;
            }
        }
        best[a * n + b] = len;
        next[a * n + b] = succ;
    }

    let &(mut a, mut b) = states
        .iter()
        .max_by(|&&(a, b), &&(c, e)| best[a * n + b].cmp(&best[c * n + e]).then((c, e).cmp(&(a, b))))
        .expect("states is nonempty");
    let mut chain = vec![a, b];
    while chain.len() < max_len {
        let c = next[a * n + b];
        if c == usize::MAX {
            break;
        }
        chain.push(c);
        (a, b) = (b, c);
    }
    chain.truncate(max_len);
    chain
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::MarkedPoint;
    use std::f64::consts::FRAC_PI_2;

    #[test]
    fn two_point_type1_chain() {
        let set = MarkedPointSet::user(vec![
            MarkedPoint::new(0.0, 0.0, 0.0).unwrap(),
            MarkedPoint::new(3.0, 4.0, FRAC_PI_2).unwrap(),
        ])
        .unwrap();
        assert_eq!(find_descending_chain(&set, ChainType::Type1, 10), vec![1, 0]);
        assert_eq!(find_descending_chain(&set, ChainType::Type1, 1), vec![1]);
    }

    #[test]
    fn empty_and_singleton_sets() {
        let empty = MarkedPointSet::<f64>::empty();
        assert!(find_descending_chain(&empty, ChainType::Type2, 5).is_empty());
        let one = MarkedPointSet::user(vec![MarkedPoint::new(0.0, 0.0, 0.0).unwrap()]).unwrap();
        assert!(find_descending_chain(&one, ChainType::Type1, 5).is_empty());
    }
}
