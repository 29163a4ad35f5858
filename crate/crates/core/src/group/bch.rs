//! Baker-Campbell-Hausdorff series in Dynkin form, truncated at a fixed degree.
//!
//! Every term is a right-nested bracket `[a1, [a2, ... [a_{n-1}, a_n]]]` over the
//! letters X and Y. Words are normalized so that they end in `XY` (or are a single
//! letter), which makes identical brackets collapse before evaluation.

use std::collections::BTreeMap;

use num_rational::Ratio;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub(crate) enum Letter {
    X,
    Y,
}

#[derive(Clone, Debug)]
pub(crate) struct BchTerm {
    pub word: Vec<Letter>,
    pub coeff: f64,
}

#[derive(Clone, Debug)]
pub(crate) struct BchTable {
    pub terms: Vec<BchTerm>,
}

type Q = Ratio<i128>;

fn factorial(n: usize) -> i128 {
    (1..=n as i128).product::<i128>().max(1)
}

/// Composition of a block sequence `(r1, s1), ..., (rn, sn)` with every pair nonzero.
fn blocks(n: usize, remaining: usize, acc: &mut Vec<(usize, usize)>, out: &mut Vec<Vec<(usize, usize)>>) {
    if acc.len() == n {
        out.push(acc.clone());
        return;
    }
    let left = n - acc.len();
    // every remaining block needs at least one letter
    if remaining < left {
        return;
    }
    for r in 0..=remaining {
        for s in 0..=(remaining - r) {
            if r + s == 0 {
                continue;
            }
            acc.push((r, s));
            blocks(n, remaining - r - s, acc, out);
            acc.pop();
        }
    }
}

impl BchTable {
    pub fn new(degree: usize) -> Self {
        let mut acc: BTreeMap<(usize, Vec<Letter>), Q> = BTreeMap::new();
        for total in 1..=degree {
            for n in 1..=total {
                let mut seqs = Vec::new();
                blocks(n, total, &mut Vec::new(), &mut seqs);
                for seq in seqs {
                    if seq.iter().map(|(r, s)| r + s).sum::<usize>() != total {
                        continue;
                    }
                    let mut denom: i128 = n as i128 * total as i128;
                    let mut word = Vec::with_capacity(total);
                    for &(r, s) in &seq {
                        denom *= factorial(r) * factorial(s);
                        word.extend(std::iter::repeat(Letter::X).take(r));
                        word.extend(std::iter::repeat(Letter::Y).take(s));
                    }
                    let sign: i128 = if n % 2 == 1 { 1 } else { -1 };
                    let mut c = Q::new(sign, denom);
                    let len = word.len();
                    if len >= 2 {
                        let (a, b) = (word[len - 2], word[len - 1]);
                        if a == b {
                            continue;
                        }
                        if a == Letter::Y {
                            word[len - 2] = Letter::X;
                            word[len - 1] = Letter::Y;
                            c = -c;
                        }
                    }
                    *acc.entry((total, word)).or_insert_with(|| Q::from_integer(0)) += c;
                }
            }
        }
        let terms = acc
            .into_iter()
            .filter(|(_, c)| *c.numer() != 0)
            .map(|((_, word), c)| BchTerm {
                word,
                coeff: *c.numer() as f64 / *c.denom() as f64,
            })
            .collect();
        Self { terms }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn coeff(t: &BchTable, w: &str) -> f64 {
        let word: Vec<Letter> = w
            .chars()
            .map(|c| if c == 'X' { Letter::X } else { Letter::Y })
            .collect();
        t.terms.iter().find(|x| x.word == word).map_or(0.0, |x| x.coeff)
    }

    #[test]
    fn low_degree_coefficients() {
        let t = BchTable::new(3);
        assert_eq!(coeff(&t, "X"), 1.0);
        assert_eq!(coeff(&t, "Y"), 1.0);
        assert!((coeff(&t, "XY") - 0.5).abs() < 1e-15);
        assert!((coeff(&t, "XXY") - 1.0 / 12.0).abs() < 1e-15);
        assert!((coeff(&t, "YXY") + 1.0 / 12.0).abs() < 1e-15);
    }
}
