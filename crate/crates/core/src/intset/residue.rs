use serde::{Deserialize, Serialize};

/// Moduli above this are dropped rather than tracked.
pub const MAX_MODULUS: u64 = 1 << 12;

/// A certified containment `F ⊆ {n : n mod modulus ∈ residues}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResidueEnvelope {
    modulus: u64,
    residues: Vec<u64>,
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

impl ResidueEnvelope {
    /// Returns `None` for a zero modulus.
    pub fn new(modulus: u64, residues: impl IntoIterator<Item = u64>) -> Option<Self> {
        if modulus == 0 {
            return None;
        }
        let mut residues: Vec<u64> = residues.into_iter().map(|r| r % modulus).collect();
        residues.sort_unstable();
        residues.dedup();
        Some(ResidueEnvelope { modulus, residues })
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn residues(&self) -> &[u64] {
        &self.residues
    }

    /// Whether `n` is admitted by the envelope (i.e. not excluded).
    pub fn admits(&self, n: u64) -> bool {
        self.residues.binary_search(&(n % self.modulus)).is_ok()
    }

    /// The envelope places no constraint at all.
    pub fn is_trivial(&self) -> bool {
        self.residues.len() as u64 == self.modulus
    }

    fn lift(&self, modulus: u64) -> Vec<u64> {
        (0..modulus).filter(|&x| self.admits(x)).collect()
    }

    fn common_modulus(&self, other: &Self) -> Option<u64> {
        let l = self.modulus / gcd(self.modulus, other.modulus) * other.modulus;
        (l <= MAX_MODULUS).then_some(l)
    }

    pub fn union(&self, other: &Self) -> Option<Self> {
        let m = self.common_modulus(other)?;
        let mut r = self.lift(m);
        r.extend(other.lift(m));
        Self::new(m, r)
    }

    pub fn intersect(&self, other: &Self) -> Option<Self> {
        let m = self.common_modulus(other)?;
        Self::new(m, (0..m).filter(|&x| self.admits(x) && other.admits(x)))
    }

    /// Envelope of `F + n`.
    pub fn shifted(&self, n: i64) -> Self {
        let m = self.modulus as i64;
        let s = n.rem_euclid(m) as u64;
        Self::new(self.modulus, self.residues.iter().map(|&r| r + s)).expect("nonzero modulus")
    }

    /// Envelope of `F - F`: every difference `a - b` reduces to `r_a - r_b`.
    pub fn differences(&self) -> Self {
        let m = self.modulus;
        let mut out = Vec::with_capacity(self.residues.len() * self.residues.len());
        for &a in &self.residues {
            for &b in &self.residues {
                out.push((a + m - b) % m);
            }
        }
        Self::new(m, out).expect("nonzero modulus")
    }

    /// Is there any `k` with `k·a_i + n_i` admitted for every coordinate?
    ///
    /// Admission is periodic in `k` with period `modulus`, so checking one
    /// full period decides the question for all `k ∈ ℕ`.
    pub fn admits_progression(&self, a: &[u64], n: &[u64]) -> bool {
        (0..self.modulus).any(|k| a.iter().zip(n).all(|(&ai, &ni)| self.admits(k * ai + ni)))
    }
}
