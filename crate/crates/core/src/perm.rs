use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A permutation of `{0, …, degree-1}`.
///
/// Composition is left to right: `a.then(&b)` applies `a` first, so the
/// group product `a·b` acts on points as `i ↦ b(a(i))`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "RawPerm")]
pub struct Perm {
    images: Vec<u32>,
}

#[derive(Deserialize)]
struct RawPerm {
    images: Vec<u32>,
}

impl TryFrom<RawPerm> for Perm {
    type Error = Error;

    fn try_from(raw: RawPerm) -> Result<Self> {
        Perm::from_images(raw.images)
    }
}

impl Perm {
    pub fn identity(degree: usize) -> Self {
        Perm {
            images: (0..degree as u32).collect(),
        }
    }

    pub fn from_images(images: Vec<u32>) -> Result<Self> {
        let n = images.len();
        let mut seen = vec![false; n];
        for &im in &images {
            let i = im as usize;
            if i >= n {
                return Err(Error::InvalidPermutation(format!(
                    "image point {im} outside 0..{n}"
                )));
            }
            if seen[i] {
                return Err(Error::InvalidPermutation(format!("image point {im} repeated")));
            }
            seen[i] = true;
        }
        Ok(Perm { images })
    }

    /// Builds a permutation from disjoint cycles on `degree` points.
    pub fn from_cycles(degree: usize, cycles: &[Vec<u32>]) -> Result<Self> {
        let mut images: Vec<u32> = (0..degree as u32).collect();
        let mut touched = vec![false; degree];
        for cycle in cycles {
            for (i, &p) in cycle.iter().enumerate() {
                let pi = p as usize;
                if pi >= degree {
                    return Err(Error::InvalidPermutation(format!(
                        "point {p} outside 0..{degree}"
                    )));
                }
                if touched[pi] {
                    return Err(Error::InvalidPermutation(format!("point {p} repeated")));
                }
                touched[pi] = true;
                images[pi] = cycle[(i + 1) % cycle.len()];
            }
        }
        Perm::from_images(images)
    }

    /// Parses cycle notation such as `(0 1)(2 3)`; `()` is the identity.
    pub fn parse_cycles(text: &str, degree: usize) -> Result<Self> {
        let mut cycles = Vec::new();
        let mut rest = text.trim();
        let err = |msg: String| Error::InvalidPermutation(format!("`{}`: {msg}", text.trim()));
        while !rest.is_empty() {
            let body = rest
                .strip_prefix('(')
                .ok_or_else(|| err("expected `(`".into()))?;
            let close = body.find(')').ok_or_else(|| err("unclosed cycle".into()))?;
            let points = body[..close]
                .split(|c: char| c.is_whitespace() || c == ',')
                .filter(|t| !t.is_empty())
                .map(|t| t.parse::<u32>().map_err(|_| err(format!("bad point `{t}`"))))
                .collect::<Result<Vec<_>>>()?;
            if !points.is_empty() {
                cycles.push(points);
            }
            rest = body[close + 1..].trim_start();
        }
        Perm::from_cycles(degree, &cycles).map_err(|e| match e {
            Error::InvalidPermutation(m) => err(m),
            other => other,
        })
    }

    /// An `n`-cycle on the points `offset .. offset+n`, embedded in `degree` points.
    pub fn cycle_on_block(degree: usize, offset: usize, n: usize) -> Result<Self> {
        let cycle: Vec<u32> = (offset..offset + n).map(|p| p as u32).collect();
        if n <= 1 {
            return Ok(Perm::identity(degree));
        }
        Perm::from_cycles(degree, &[cycle])
    }

    pub fn degree(&self) -> usize {
        self.images.len()
    }

    pub fn images(&self) -> &[u32] {
        &self.images
    }

    pub fn apply(&self, point: usize) -> usize {
        self.images[point] as usize
    }

    /// `self` followed by `other`.
    pub fn then(&self, other: &Perm) -> Perm {
        debug_assert_eq!(self.degree(), other.degree());
        Perm {
            images: self.images.iter().map(|&i| other.images[i as usize]).collect(),
        }
    }

    pub fn inverse(&self) -> Perm {
        let mut inv = vec![0u32; self.images.len()];
        for (i, &im) in self.images.iter().enumerate() {
            inv[im as usize] = i as u32;
        }
        Perm { images: inv }
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(i, &im)| i as u32 == im)
    }

    /// Places `self` on the first points and `other` on the following ones.
    pub fn direct_sum(&self, other: &Perm) -> Perm {
        let shift = self.images.len() as u32;
        let mut images = self.images.clone();
        images.extend(other.images.iter().map(|&i| i + shift));
        Perm { images }
    }

    pub fn cycles(&self) -> Vec<Vec<u32>> {
        let mut seen = vec![false; self.images.len()];
        let mut out = Vec::new();
        for start in 0..self.images.len() {
            if seen[start] || self.images[start] as usize == start {
                continue;
            }
            let mut cycle = Vec::new();
            let mut p = start;
            while !seen[p] {
                seen[p] = true;
                cycle.push(p as u32);
                p = self.images[p] as usize;
            }
            out.push(cycle);
        }
        out
    }
}

impl fmt::Display for Perm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cycles = self.cycles();
        if cycles.is_empty() {
            return f.write_str("()");
        }
        for c in cycles {
            f.write_str("(")?;
            for (i, p) in c.iter().enumerate() {
                if i > 0 {
                    f.write_str(" ")?;
                }
                write!(f, "{p}")?;
            }
            f.write_str(")")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cycle_notation_round_trip() {
        let p = Perm::parse_cycles("(0 1)(2 3)", 4).unwrap();
        assert_eq!(p.images(), &[1, 0, 3, 2]);
        assert_eq!(p.to_string(), "(0 1)(2 3)");
        assert_eq!(Perm::parse_cycles("()", 3).unwrap(), Perm::identity(3));
        assert_eq!(Perm::parse_cycles("(2,0,1)", 3).unwrap().to_string(), "(0 1 2)");
    }

    #[test]
    fn non_bijective_input_names_the_point() {
        let e = Perm::parse_cycles("(0 1)(1 2)", 3).unwrap_err();
        assert!(e.to_string().contains("point 1 repeated"), "{e}");
        let e = Perm::from_images(vec![0, 0, 2]).unwrap_err();
        assert!(e.to_string().contains("image point 0 repeated"), "{e}");
        assert!(Perm::parse_cycles("(0 5)", 3).is_err());
    }

    #[test]
    fn composition_is_left_to_right() {
        let a = Perm::parse_cycles("(0 1)", 3).unwrap();
        let b = Perm::parse_cycles("(0 2)", 3).unwrap();
        // 0 -a-> 1 -b-> 1, 1 -a-> 0 -b-> 2, 2 -a-> 2 -b-> 0
        assert_eq!(a.then(&b).images(), &[1, 2, 0]);
        assert!(a.then(&a.inverse()).is_identity());
    }
}
