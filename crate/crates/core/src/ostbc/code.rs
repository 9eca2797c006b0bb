use alloc::vec::Vec;

use num_traits::Float;

use crate::numerics::CMatrix;
use crate::{Error, Result, C64};

/// One nonzero entry of an OSTBC matrix: `X[row, col] = sign * q[symbol]`,
/// conjugated when `conj` is set.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CodeEntry {
    pub row: usize,
    pub col: usize,
    pub symbol: usize,
    pub sign: f64,
    pub conj: bool,
}

/// Orthogonal space-time block code with `X(q) X(q)^H = |q|^2 I`.
///
/// Rows index the `b_prime` active antennas and columns the `nc` channel uses.
/// All codes built here have real, sparse dispersion matrices, so they are
/// stored as an entry list.
#[derive(Debug, Clone, PartialEq)]
pub struct OstbcCode {
    b_prime: usize,
    nc: usize,
    ns: usize,
    entries: Vec<CodeEntry>,
}

impl OstbcCode {
    /// Checks the entry list for consistency. Orthogonality is not checked
    /// here, see the tests.
    pub fn from_entries(b_prime: usize, nc: usize, ns: usize, entries: Vec<CodeEntry>) -> Result<Self> {
        if b_prime == 0 || ns == 0 || ns > nc {
            return Err(Error::invalid("need B' >= 1 and 1 <= ns <= nc"));
        }
        if entries
            .iter()
            .any(|e| e.row >= b_prime || e.col >= nc || e.symbol >= ns || !e.sign.is_finite())
        {
            return Err(Error::invalid("code entry out of range"));
        }
        Ok(Self { b_prime, nc, ns, entries })
    }

    pub fn b_prime(&self) -> usize {
        self.b_prime
    }

    pub fn nc(&self) -> usize {
        self.nc
    }

    pub fn ns(&self) -> usize {
        self.ns
    }

    pub fn rate(&self) -> f64 {
        self.ns as f64 / self.nc as f64
    }

    pub fn entries(&self) -> &[CodeEntry] {
        &self.entries
    }

    /// Per-symbol power that makes the average radiated power per channel
    /// use equal `rho`: `E[X X^H] = (nc rho / B') I`.
    pub fn symbol_power(&self, rho: f64) -> f64 {
        rho * self.nc as f64 / (self.ns * self.b_prime) as f64
    }

    /// `A_i`, the matrix multiplying `Re(q_i)`.
    pub fn a_matrix(&self, i: usize) -> CMatrix {
        self.dispersion(i, false)
    }

    /// `B_i`, the matrix multiplying `j Im(q_i)`.
    pub fn b_matrix(&self, i: usize) -> CMatrix {
        self.dispersion(i, true)
    }

    fn dispersion(&self, i: usize, imag: bool) -> CMatrix {
        let mut m = CMatrix::zeros(self.b_prime, self.nc);
        for e in self.entries.iter().filter(|e| e.symbol == i) {
            let s = if imag && e.conj { -e.sign } else { e.sign };
            m[(e.row, e.col)] += C64::new(s, 0.0);
        }
        m
    }
}

fn entry(row: usize, col: usize, symbol: usize, sign: f64, conj: bool) -> CodeEntry {
    CodeEntry { row, col, symbol, sign, conj }
}

/// Alamouti code, `X = [[q1, -q2*], [q2, q1*]]`.
pub fn build_alamouti() -> OstbcCode {
    let entries = alloc::vec![
        entry(0, 0, 0, 1.0, false),
        entry(0, 1, 1, -1.0, true),
        entry(1, 0, 1, 1.0, false),
        entry(1, 1, 0, 1.0, true),
    ];
    OstbcCode::from_entries(2, 2, 2, entries).expect("static code")
}

/// Rate-3/4 code for four antennas.
///
/// ```text
///  q1    0    q2   -q3
///  0     q1   q3*   q2*
/// -q2*  -q3   q1*   0
///  q3*  -q2   0     q1*
/// ```
pub fn build_rate34() -> OstbcCode {
    let entries = alloc::vec![
        entry(0, 0, 0, 1.0, false),
        entry(0, 2, 1, 1.0, false),
        entry(0, 3, 2, -1.0, false),
        entry(1, 1, 0, 1.0, false),
        entry(1, 2, 2, 1.0, true),
        entry(1, 3, 1, 1.0, true),
        entry(2, 0, 1, -1.0, true),
        entry(2, 1, 2, -1.0, false),
        entry(2, 2, 0, 1.0, true),
        entry(3, 0, 2, 1.0, true),
        entry(3, 1, 1, -1.0, false),
        entry(3, 3, 0, 1.0, true),
    ];
    OstbcCode::from_entries(4, 4, 3, entries).expect("static code")
}

/// Hurwitz-Radon number of `2^k`: `8b + 2^c` for `k = 4b + c`.
pub fn hurwitz_radon_number(k: u32) -> usize {
    8 * (k / 4) as usize + (1usize << (k % 4))
}

// 2x2 factors: identity, P = [[0,1],[1,0]], Q = [[1,0],[0,-1]], R = [[0,1],[-1,0]].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Letter {
    I,
    P,
    Q,
    R,
}

const LETTERS: [Letter; 4] = [Letter::I, Letter::P, Letter::Q, Letter::R];

impl Letter {
    /// `(column, sign)` of the single nonzero in row `r` (0 or 1).
    fn row(self, r: usize) -> (usize, f64) {
        match self {
            Letter::I => (r, 1.0),
            Letter::P => (1 - r, 1.0),
            Letter::Q => (r, if r == 0 { 1.0 } else { -1.0 }),
            Letter::R => (1 - r, if r == 0 { 1.0 } else { -1.0 }),
        }
    }
}

fn skew(word: &[Letter]) -> bool {
    word.iter().filter(|&&l| l == Letter::R).count() % 2 == 1
}

fn anticommute(a: &[Letter], b: &[Letter]) -> bool {
    a.iter()
        .zip(b)
        .filter(|(x, y)| **x != Letter::I && **y != Letter::I && x != y)
        .count()
        % 2
        == 1
}

fn word(index: usize, k: u32) -> Vec<Letter> {
    (0..k).map(|j| LETTERS[(index >> (2 * j)) & 3]).collect()
}

fn extend_family(candidates: &[Vec<Letter>], chosen: &mut Vec<usize>, start: usize, need: usize) -> bool {
    if chosen.len() == need {
        return true;
    }
    for i in start..candidates.len() {
        if chosen.iter().all(|&c| anticommute(&candidates[c], &candidates[i])) {
            chosen.push(i);
            if extend_family(candidates, chosen, i + 1, need) {
                return true;
            }
            chosen.pop();
        }
    }
    false
}

/// `count` pairwise anticommuting skew-symmetric signed permutation matrices
/// of size `2^k`, as tensor words.
fn hurwitz_radon_family(k: u32, count: usize) -> Option<Vec<Vec<Letter>>> {
    let candidates: Vec<Vec<Letter>> = (0..1usize << (2 * k))
        .map(|i| word(i, k))
        .filter(|w| skew(w))
        .collect();
    let mut chosen = Vec::new();
    extend_family(&candidates, &mut chosen, 0, count)
        .then(|| chosen.into_iter().map(|i| candidates[i].clone()).collect())
}

/// Row `r` of a tensor word as `(column, sign)`.
fn word_row(w: &[Letter], r: usize) -> (usize, f64) {
    let mut col = 0;
    let mut sign = 1.0;
    for (j, l) in w.iter().enumerate() {
        let (c, s) = l.row((r >> j) & 1);
        col |= c << j;
        sign *= s;
    }
    (col, sign)
}

/// Rate-1/2 complex design for `b_prime` antennas.
///
/// A `p x B'` real orthogonal design `G(x)` with column `j` equal to `A_j x`
/// is built from a Hurwitz-Radon family (`A_0 = I`), with `p` the smallest
/// power of two whose Hurwitz-Radon number reaches `B'`. The complex code is
/// `X = [G(q)^T, G(q)^H] / sqrt(2)`, so `nc = 2p` and `ns = p`.
pub fn build_tarokh_rate_half(b_prime: usize) -> Result<OstbcCode> {
    if b_prime < 2 {
        return Err(Error::invalid("rate-1/2 design needs B' >= 2"));
    }
    let k = (0..)
        .find(|&k| hurwitz_radon_number(k) >= b_prime)
        .expect("Hurwitz-Radon numbers are unbounded");
    if k > 12 {
        return Err(Error::invalid("B' too large for a rate-1/2 design"));
    }
    let p = 1usize << k;
    let family = hurwitz_radon_family(k, b_prime - 1)
        .ok_or_else(|| Error::invalid("no Hurwitz-Radon family found"))?;
    let scale = Float::sqrt(0.5);
    let mut entries = Vec::with_capacity(2 * p * b_prime);
    for j in 0..b_prime {
        for r in 0..p {
            let (c, s) = if j == 0 { (r, 1.0) } else { word_row(&family[j - 1], r) };
            entries.push(entry(j, r, c, s * scale, false));
            entries.push(entry(j, p + r, c, s * scale, true));
        }
    }
    OstbcCode::from_entries(b_prime, 2 * p, p, entries)
}

/// The code used for `b_prime` active antennas in the BS-initiated sweeps:
/// the rate-3/4 design for four antennas, rate 1/2 otherwise.
pub fn code_for(b_prime: usize) -> Result<OstbcCode> {
    match b_prime {
        4 => Ok(build_rate34()),
        _ => build_tarokh_rate_half(b_prime),
    }
}

/// `X = sum_i Re(q_i) A_i + j Im(q_i) B_i`.
pub fn ostbc_encode(q: &[C64], code: &OstbcCode) -> Result<CMatrix> {
    if q.len() != code.ns {
        return Err(Error::invalid(alloc::format!(
            "expected {} symbols, got {}",
            code.ns,
            q.len()
        )));
    }
    let mut x = CMatrix::zeros(code.b_prime, code.nc);
    for e in &code.entries {
        let s = if e.conj { q[e.symbol].conj() } else { q[e.symbol] };
        x[(e.row, e.col)] += s * e.sign;
    }
    Ok(x)
}

/// Matched-filter symbol estimates from one received block `y = h^T X + z`:
/// `r_i = [Re(h_hat^T A_i y^H) - j Im(h_hat^T B_i y^H)] / ||h_hat||`.
///
/// With `h_hat = h` and no noise this gives `r = ||h|| q`.
pub fn ostbc_symbol_estimates(y: &[C64], h_hat: &[C64], code: &OstbcCode) -> Result<Vec<C64>> {
    if y.len() != code.nc || h_hat.len() != code.b_prime {
        return Err(Error::invalid("received block or channel has the wrong length"));
    }
    let mut r = alloc::vec![C64::new(0.0, 0.0); code.ns];
    symbol_estimates_into(y, h_hat, code, &mut r)?;
    Ok(r)
}

pub(crate) fn symbol_estimates_into(y: &[C64], h_hat: &[C64], code: &OstbcCode, out: &mut [C64]) -> Result<()> {
    let nrm = crate::numerics::norm(h_hat);
    if !(nrm > 0.0) {
        return Err(Error::DegenerateChannel("zero effective channel estimate"));
    }
    let mut a = alloc::vec![C64::new(0.0, 0.0); code.ns];
    let mut b = alloc::vec![C64::new(0.0, 0.0); code.ns];
    for e in &code.entries {
        let t = h_hat[e.row] * y[e.col].conj() * e.sign;
        a[e.symbol] += t;
        b[e.symbol] += if e.conj { -t } else { t };
    }
    for ((o, a), b) in out.iter_mut().zip(&a).zip(&b) {
        *o = C64::new(a.re, -b.im) / nrm;
    }
    Ok(())
}
