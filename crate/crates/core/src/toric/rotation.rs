use num_integer::Integer;

use crate::exact::Rat;

use super::Level3;

/// Rotation of `ℝ³ = Im ℍ` by conjugation with a nonzero integer quaternion.
/// Entries are rational, so rotated levels stay exact.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Rotation3 {
    pub quaternion: [i64; 4],
    matrix: [[Rat; 3]; 3],
}

impl Rotation3 {
    pub fn from_quaternion(q: [i64; 4]) -> Self {
        let [a, b, c, d] = q;
        let norm = a * a + b * b + c * c + d * d;
        assert!(norm > 0, "zero quaternion");
        let m = [
            [a * a + b * b - c * c - d * d, 2 * (b * c - a * d), 2 * (b * d + a * c)],
            [2 * (b * c + a * d), a * a - b * b + c * c - d * d, 2 * (c * d - a * b)],
            [2 * (b * d - a * c), 2 * (c * d + a * b), a * a - b * b - c * c + d * d],
        ];
        let matrix = m.map(|row| row.map(|x| Rat::new(x, norm)));
        Rotation3 { quaternion: q, matrix }
    }

    pub fn apply(&self, level: &Level3) -> Level3 {
        let v = level.components();
        let row = |r: &[Rat; 3]| &(&r[0] * v[0]) + &(&(&r[1] * v[1]) + &(&r[2] * v[2]));
        Level3::new(row(&self.matrix[0]), row(&self.matrix[1]), row(&self.matrix[2]))
    }

    pub fn matrix(&self) -> &[[Rat; 3]; 3] {
        &self.matrix
    }
}

/// Number of rotations tried before a slice is declared unfixable.
pub const MAX_ROTATION_ATTEMPTS: usize = 64;

/// The fixed sequence of quaternions tried by the slice repair.
///
/// It opens with `(1,1,0,0)`, `(1,0,1,0)`, `(1,1,1,0)`, `(2,1,0,0)` and then
/// runs through primitive `(a,b,c,d)` with `1 ≤ a ≤ 3`, `0 ≤ b,c,d ≤ 3`, not
/// all of `b,c,d` zero, ordered by norm and then lexicographically, skipping
/// entries already listed.
pub fn rotation_sequence() -> Vec<[i64; 4]> {
    let mut seq: Vec<[i64; 4]> = vec![[1, 1, 0, 0], [1, 0, 1, 0], [1, 1, 1, 0], [2, 1, 0, 0]];
    let mut tail = Vec::new();
    for a in 1..=3i64 {
        for b in 0..=3i64 {
            for c in 0..=3i64 {
                for d in 0..=3i64 {
                    if b == 0 && c == 0 && d == 0 {
                        continue;
                    }
                    if a.gcd(&b).gcd(&c).gcd(&d) != 1 {
                        continue;
                    }
                    tail.push([a, b, c, d]);
                }
            }
        }
    }
    tail.sort_by_key(|q| (q.iter().map(|x| x * x).sum::<i64>(), *q));
    for q in tail {
        if seq.len() == MAX_ROTATION_ATTEMPTS {
            break;
        }
        if !seq.contains(&q) {
            seq.push(q);
        }
    }
    seq
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mat_mul_transpose_is_identity(r: &Rotation3) -> bool {
        let m = r.matrix();
        (0..3).all(|i| {
            (0..3).all(|j| {
                let dot: Rat = (0..3).map(|k| &m[i][k] * &m[j][k]).sum();
                dot == if i == j { Rat::one() } else { Rat::zero() }
            })
        })
    }

    #[test]
    fn sequence_is_orthogonal_and_distinct() {
        let seq = rotation_sequence();
        assert_eq!(seq.len(), MAX_ROTATION_ATTEMPTS);
        assert_eq!(&seq[..4], &[[1, 1, 0, 0], [1, 0, 1, 0], [1, 1, 1, 0], [2, 1, 0, 0]]);
        let rots: Vec<_> = seq.iter().map(|&q| Rotation3::from_quaternion(q)).collect();
        for (i, r) in rots.iter().enumerate() {
            assert!(mat_mul_transpose_is_identity(r), "{:?}", r.quaternion);
            for other in &rots[i + 1..] {
                assert_ne!(r.matrix(), other.matrix());
            }
        }
    }

    #[test]
    fn quarter_turn_about_first_axis() {
        let r = Rotation3::from_quaternion([1, 1, 0, 0]);
        let out = r.apply(&Level3::new(Rat::zero(), Rat::one(), Rat::zero()));
        assert_eq!(out, Level3::new(Rat::zero(), Rat::zero(), Rat::one()));
    }
}
