use std::fmt;
use std::str::FromStr;

use rand::Rng;

use super::HashError;

/// (√5 − 1)/2 rounded to the nearest `f64`.
pub const GOLDEN_A: f64 = 0.618_033_988_749_894_9;

/// A multiplier `A ∈ [0, 1)` held as a 64-bit binary fraction. For any `f64`
/// input ≥ 2⁻¹¹ the conversion is exact, so `frac(κ·A)` is evaluated without
/// rounding.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Multiplier(u64);

impl Multiplier {
    pub fn new(a: f64) -> Result<Self, HashError> {
        if !(0.0..1.0).contains(&a) {
            return Err(HashError::Config(format!("multiplier A must lie in [0,1), got {a}")));
        }
        Ok(Multiplier((a * 18_446_744_073_709_551_616.0) as u64))
    }

    pub fn golden() -> Self {
        Multiplier::new(GOLDEN_A).expect("in range")
    }

    /// ⌊p · frac(κ·A)⌋.
    #[inline]
    pub fn owner(self, kappa: u64, p: usize) -> usize {
        let frac = kappa.wrapping_mul(self.0);
        ((frac as u128 * p as u128) >> 64) as usize
    }
}

impl Default for Multiplier {
    fn default() -> Self {
        Multiplier::golden()
    }
}

/// Multiplicative hashing: ⌊p (κ·A − ⌊κ·A⌋)⌋.
pub fn mult_owner(kappa: u64, p: usize, a: f64) -> Result<usize, HashError> {
    Ok(Multiplier::new(a)?.owner(kappa, p.max(1)))
}

/// XOR-folds canonical state bytes into a 64-bit key, eight bytes per word.
pub fn kappa_fold(bytes: &[u8]) -> u64 {
    bytes.chunks(8).fold(0u64, |acc, chunk| {
        let mut word = [0u8; 8];
        word[..chunk.len()].copy_from_slice(chunk);
        acc ^ u64::from_le_bytes(word)
    })
}

/// Hyperplane thickness `d`: a positive integer, or `1/m` for `m ≥ 2`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Thickness {
    Whole(u64),
    Fraction(u64),
}

impl Thickness {
    pub fn as_f64(self) -> f64 {
        match self {
            Thickness::Whole(d) => d as f64,
            Thickness::Fraction(m) => 1.0 / m as f64,
        }
    }

    /// Upper bound on the number of distinct owners among one state's
    /// successors in an n-dimensional lattice: ⌊n/d + max(1, 1/d)⌋.
    pub fn successor_owner_bound(self, n: usize) -> usize {
        match self {
            Thickness::Whole(d) => (n as u64 / d + 1) as usize,
            Thickness::Fraction(m) => (n as u64 * m + m) as usize,
        }
    }
}

impl FromStr for Thickness {
    type Err = HashError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || HashError::BadThickness(s.to_string());
        let s = s.trim();
        if let Some((num, den)) = s.split_once('/') {
            let (num, den): (u64, u64) = (
                num.trim().parse().map_err(|_| bad())?,
                den.trim().parse().map_err(|_| bad())?,
            );
            match (num, den) {
                (1, 1) => Ok(Thickness::Whole(1)),
                (1, m) if m >= 2 => Ok(Thickness::Fraction(m)),
                _ => Err(bad()),
            }
        } else {
            match s.parse::<u64>() {
                Ok(d) if d >= 1 => Ok(Thickness::Whole(d)),
                _ => Err(bad()),
            }
        }
    }
}

impl fmt::Display for Thickness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Thickness::Whole(d) => write!(f, "{d}"),
            Thickness::Fraction(m) => write!(f, "1/{m}"),
        }
    }
}

/// Hyperplane owner: `Plane(x, d) mod p` where `Plane = ⌊Σxᵢ / d⌋` for whole
/// `d`, and `m·Σxᵢ + (Z(x) mod m)` for `d = 1/m` (which requires `m ≤ p`).
pub fn hyperplane_owner(coords: &[u64], d: Thickness, p: usize, zobrist: u64) -> Result<usize, HashError> {
    let p = p.max(1) as u64;
    let sum: u64 = coords.iter().sum();
    let plane = match d {
        Thickness::Whole(d) => sum / d,
        Thickness::Fraction(m) => {
            if m > p {
                return Err(HashError::BadThickness(format!("1/{m} with only {p} workers")));
            }
            m.wrapping_mul(sum).wrapping_add(zobrist % m)
        }
    };
    Ok((plane % p) as usize)
}

/// Uniformly random worker; not a function of the state.
pub fn random_owner<R: Rng + ?Sized>(rng: &mut R, p: usize) -> usize {
    if p <= 1 {
        0
    } else {
        rng.gen_range(0..p)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn multiplicative_examples() {
        assert_eq!(mult_owner(0, 16, GOLDEN_A).unwrap(), 0);
        assert_eq!(mult_owner(1, 16, 0.6180339887498949).unwrap(), 9);
        assert!(mult_owner(1, 4, 1.0).is_err());
    }

    #[test]
    fn multiplicative_agrees_with_float_evaluation() {
        // Oracle: direct f64 evaluation, skipping keys whose scaled fraction
        // sits within 1e-6 of an integer boundary.
        let m = Multiplier::golden();
        for p in [3usize, 7, 16, 64] {
            for kappa in 0u64..20_000 {
                let x = kappa as f64 * GOLDEN_A;
                let scaled = p as f64 * (x - x.floor());
                if (scaled - scaled.round()).abs() < 1e-6 {
                    continue;
                }
                assert_eq!(m.owner(kappa, p), scaled.floor() as usize, "kappa={kappa} p={p}");
            }
        }
    }

    #[test]
    fn multiplicative_range() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let m = Multiplier::golden();
        for _ in 0..100_000 {
            let k: u64 = rng.gen();
            let p = rng.gen_range(1..=64);
            assert!(m.owner(k, p) < p);
        }
    }

    #[test]
    fn kappa_fold_words() {
        assert_eq!(kappa_fold(&[]), 0);
        assert_eq!(kappa_fold(&[1]), 1);
        let mut b = vec![0u8; 16];
        b[0] = 3;
        b[8] = 1;
        assert_eq!(kappa_fold(&b), 2);
    }

    #[test]
    fn thickness_parsing() {
        assert_eq!("2".parse::<Thickness>().unwrap(), Thickness::Whole(2));
        assert_eq!("1/3".parse::<Thickness>().unwrap(), Thickness::Fraction(3));
        assert_eq!("1/1".parse::<Thickness>().unwrap(), Thickness::Whole(1));
        for bad in ["0", "2/3", "1/0", "x", "-1", "0.5"] {
            assert!(bad.parse::<Thickness>().is_err(), "{bad}");
        }
        assert_eq!(Thickness::Fraction(4).to_string(), "1/4");
    }

    #[test]
    fn hyperplane_examples() {
        assert_eq!(hyperplane_owner(&[2, 3], Thickness::Whole(1), 4, 0).unwrap(), 1);
        assert_eq!(hyperplane_owner(&[2, 3], Thickness::Whole(2), 4, 0).unwrap(), 2);
        // d = 1/2: Plane = 2·5 + (Z mod 2).
        assert_eq!(hyperplane_owner(&[2, 3], Thickness::Fraction(2), 4, 7).unwrap(), 3);
        assert!(hyperplane_owner(&[1], Thickness::Fraction(8), 4, 0).is_err());
        assert_eq!(Thickness::Whole(1).successor_owner_bound(2), 3);
        assert_eq!(Thickness::Fraction(3).successor_owner_bound(2), 9);
        assert_eq!(Thickness::Whole(3).successor_owner_bound(4), 2);
    }

    #[test]
    fn random_owner_frequencies() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        assert!((0..100).all(|_| random_owner(&mut rng, 1) == 0));
        let p = 8;
        let mut counts = vec![0usize; p];
        let n = 1_000_000;
        for _ in 0..n {
            counts[random_owner(&mut rng, p)] += 1;
        }
        for c in counts {
            let freq = c as f64 / n as f64;
            assert!((freq * p as f64 - 1.0).abs() <= 0.02, "{freq}");
        }
    }
}
