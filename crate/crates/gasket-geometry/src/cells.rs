use serde::{Deserialize, Serialize};

use crate::{Family, GasketSpec, GeometryError, Result};

/// Exact integer vertex coordinates.
///
/// For the gasket families these are barycentric: a vector of length d+1 with
/// nonnegative entries summing to `side^level`. For the Vicsek families they
/// are Cartesian grid coordinates in `{0, ..., side^level}^d`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct BaryVertex {
    pub coords: Vec<i64>,
}

impl BaryVertex {
    pub fn new(coords: Vec<i64>) -> Self {
        BaryVertex { coords }
    }
}

/// A self-similar cell address: one letter per subdivision step.
///
/// Gasket letters are compositions `(a_0, ..., a_d)` of `side - 1`; Vicsek
/// letters are the grid coordinates of a checkerboard cell. The empty word
/// addresses the whole 0-cell.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CellWord {
    pub letters: Vec<Vec<u32>>,
}

impl CellWord {
    pub fn empty() -> Self {
        CellWord { letters: vec![] }
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }
}

/// Number of same-orientation sub-simplices kept per subdivision,
/// `C(d + l - 1, d)`.
///
/// Errors with [`GeometryError::ArithmeticOverflow`] instead of wrapping.
pub fn count_cells(d: u32, l: u32) -> Result<u64> {
    if d < 1 || l < 1 {
        return Err(GeometryError::InvalidSpec(format!(
            "count_cells requires d >= 1 and l >= 1, got ({d}, {l})"
        )));
    }
    // binomial(d + l - 1, d) with exact division at every step
    let n = d as u128 + l as u128 - 1;
    let k = (d as u128).min(l as u128 - 1);
    let mut acc: u128 = 1;
    for i in 1..=k {
        acc = acc
            .checked_mul(n - k + i)
            .ok_or_else(|| GeometryError::ArithmeticOverflow(format!("C({n}, {k})")))?;
        acc /= i;
    }
    u64::try_from(acc).map_err(|_| GeometryError::ArithmeticOverflow(format!("C({n}, {k})")))
}

/// All compositions of `total` into `parts` nonnegative integers, in
/// lexicographic order.
pub(crate) fn compositions(total: u32, parts: usize) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    let mut current = vec![0u32; parts];
    fn rec(total: u32, idx: usize, current: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if idx + 1 == current.len() {
            current[idx] = total;
            out.push(current.clone());
            return;
        }
        for v in 0..=total {
            current[idx] = v;
            rec(total - v, idx + 1, current, out);
        }
    }
    if parts == 0 {
        return out;
    }
    rec(total, 0, &mut current, &mut out);
    out
}

/// Single-subdivision letters for a spec: compositions of `side - 1` for the
/// gasket, parity-checkerboard cell coordinates for the Vicsek families.
pub(crate) fn single_letters(spec: &GasketSpec) -> Vec<Vec<u32>> {
    match spec.family {
        Family::Sg => compositions(spec.side - 1, spec.dimension as usize + 1),
        Family::Vs2d | Family::Vs3d => {
            let d = spec.dimension as usize;
            let l = spec.side;
            let mut out = Vec::new();
            let mut coord = vec![0u32; d];
            loop {
                let parity = coord[0] % 2;
                if coord.iter().all(|&c| c % 2 == parity) {
                    out.push(coord.clone());
                }
                // odometer over {0, ..., l-1}^d, last coordinate fastest
                let mut i = d;
                loop {
                    if i == 0 {
                        return out;
                    }
                    i -= 1;
                    coord[i] += 1;
                    if coord[i] < l {
                        break;
                    }
                    coord[i] = 0;
                }
            }
        }
    }
}

/// Every cell word of length `spec.level`, in lexicographic letter order.
pub fn enumerate_cells(spec: &GasketSpec) -> Result<Vec<CellWord>> {
    spec.validate()?;
    spec.check_guard()?;
    let letters = single_letters(spec);
    let mut words: Vec<CellWord> = vec![CellWord::empty()];
    for _ in 0..spec.level {
        let mut next = Vec::with_capacity(words.len() * letters.len());
        for w in &words {
            for letter in &letters {
                let mut ls = w.letters.clone();
                ls.push(letter.clone());
                next.push(CellWord { letters: ls });
            }
        }
        words = next;
    }
    Ok(words)
}

fn check_letter(letter: &[u32], spec: &GasketSpec) -> Result<()> {
    match spec.family {
        Family::Sg => {
            if letter.len() != spec.dimension as usize + 1
                || letter.iter().map(|&a| a as u64).sum::<u64>() != (spec.side - 1) as u64
            {
                return Err(GeometryError::MalformedWord(format!(
                    "letter {letter:?} is not a composition of {} into {} parts",
                    spec.side - 1,
                    spec.dimension + 1
                )));
            }
        }
        Family::Vs2d | Family::Vs3d => {
            if letter.len() != spec.dimension as usize || letter.iter().any(|&c| c >= spec.side) {
                return Err(GeometryError::MalformedWord(format!(
                    "letter {letter:?} is not a cell of the side-{} grid",
                    spec.side
                )));
            }
            let parity = letter[0] % 2;
            if letter.iter().any(|&c| c % 2 != parity) {
                return Err(GeometryError::MalformedWord(format!(
                    "letter {letter:?} is not on the parity checkerboard"
                )));
            }
        }
    }
    Ok(())
}

/// Corner vertices of the cell addressed by `word`, at the coordinate scale of
/// `spec.level`.
///
/// A word shorter than the level addresses a coarser cell; the empty word
/// yields the boundary vertices of the 0-cell.
pub fn cell_corners(word: &CellWord, spec: &GasketSpec) -> Result<Vec<BaryVertex>> {
    spec.validate()?;
    if word.len() > spec.level as usize {
        return Err(GeometryError::MalformedWord(format!(
            "word length {} exceeds level {}",
            word.len(),
            spec.level
        )));
    }
    for letter in &word.letters {
        check_letter(letter, spec)?;
    }
    let l = spec.side as i64;
    let m = spec.level as i64;
    let j = word.len() as i64;
    // side length of the addressed cell, in integer coordinates
    let cell_scale = l.pow((m - j) as u32);
    match spec.family {
        Family::Sg => {
            let dp1 = spec.dimension as usize + 1;
            let mut base = vec![0i64; dp1];
            for (k, letter) in word.letters.iter().enumerate() {
                let weight = l.pow((m - 1 - k as i64) as u32);
                for (b, &a) in base.iter_mut().zip(letter.iter()) {
                    *b += weight * a as i64;
                }
            }
            Ok((0..dp1)
                .map(|i| {
                    let mut c = base.clone();
                    c[i] += cell_scale;
                    BaryVertex::new(c)
                })
                .collect())
        }
        Family::Vs2d | Family::Vs3d => {
            let d = spec.dimension as usize;
            let mut base = vec![0i64; d];
            for (k, letter) in word.letters.iter().enumerate() {
                let weight = l.pow((m - 1 - k as i64) as u32);
                for (b, &c) in base.iter_mut().zip(letter.iter()) {
                    *b += weight * c as i64;
                }
            }
            Ok((0..1usize << d)
                .map(|bits| {
                    let c = base
                        .iter()
                        .enumerate()
                        .map(|(j, &b)| b + ((bits >> j) & 1) as i64 * cell_scale)
                        .collect();
                    BaryVertex::new(c)
                })
                .collect())
        }
    }
}
