use crate::error::{Error, Result};

pub const MAX_PARTITION_SET: usize = 8;

/// Blocks of a set partition, ordered by their minima.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Partition {
    pub blocks: Vec<Vec<usize>>,
}

impl Partition {
    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }
}

/// (ρ, π) with ρ a partition of J and π: I → blocks of ρ (0-based block numbers).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct QPartition {
    pub rho: Partition,
    pub pi: Vec<usize>,
}

impl QPartition {
    /// Elements of I sent to block k.
    pub fn pi_block(&self, i_set: &[usize], k: usize) -> Vec<usize> {
        i_set.iter().zip(&self.pi).filter(|(_, &b)| b == k).map(|(&i, _)| i).collect()
    }
}

/// All partitions of J, in lexicographic order of their restricted growth strings.
pub fn partitions(j: &[usize]) -> Result<Vec<Partition>> {
    if j.len() > MAX_PARTITION_SET {
        return Err(Error::Resource(format!("|J| = {} exceeds {}", j.len(), MAX_PARTITION_SET)));
    }
    let mut out = Vec::new();
    let mut rgs = vec![0usize; j.len()];
    fn rec(j: &[usize], k: usize, nblocks: usize, rgs: &mut Vec<usize>, out: &mut Vec<Partition>) {
        if k == j.len() {
            let mut blocks = vec![Vec::new(); nblocks];
            for (x, &b) in j.iter().zip(rgs.iter()) {
                blocks[b].push(*x);
            }
            out.push(Partition { blocks });
            return;
        }
        for b in 0..=nblocks {
            rgs[k] = b;
            rec(j, k + 1, nblocks.max(b + 1), rgs, out);
        }
    }
    if j.is_empty() {
        return Ok(vec![Partition { blocks: Vec::new() }]);
    }
    rec(j, 0, 0, &mut rgs, &mut out);
    Ok(out)
}

/// 𝒬(I, J); for I = ∅ this is 𝒫(J) with empty maps.
pub fn q_partitions(i: &[usize], j: &[usize]) -> Result<Vec<QPartition>> {
    if i.len() > MAX_PARTITION_SET {
        return Err(Error::Resource(format!("|I| = {} exceeds {}", i.len(), MAX_PARTITION_SET)));
    }
    let mut out = Vec::new();
    for rho in partitions(j)? {
        let nb = rho.len();
        if nb == 0 && !i.is_empty() {
            continue;
        }
        let total = nb.pow(i.len() as u32);
        for code in 0..total {
            let mut pi = Vec::with_capacity(i.len());
            let mut c = code;
            for _ in 0..i.len() {
                pi.push(c % nb);
                c /= nb;
            }
            pi.reverse();
            out.push(QPartition { rho: rho.clone(), pi });
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bell_numbers() {
        let bell = [1, 1, 2, 5, 15, 52, 203, 877, 4140];
        for (n, &b) in bell.iter().enumerate() {
            let j: Vec<usize> = (1..=n).collect();
            assert_eq!(partitions(&j).unwrap().len(), b);
        }
        assert!(partitions(&(0..9).collect::<Vec<_>>()).is_err());
    }

    #[test]
    fn blocks_ordered_by_minima() {
        for p in partitions(&[1, 2, 3, 4]).unwrap() {
            let mins: Vec<usize> = p.blocks.iter().map(|b| b[0]).collect();
            assert!(mins.windows(2).all(|w| w[0] < w[1]));
        }
    }

    #[test]
    fn q_counts() {
        assert_eq!(q_partitions(&[1], &[1, 2]).unwrap().len(), 3);
        let q0 = q_partitions(&[], &[1, 2]).unwrap();
        let p: Vec<_> = partitions(&[1, 2]).unwrap();
        assert_eq!(q0.iter().map(|q| q.rho.clone()).collect::<Vec<_>>(), p);
        // Σ_ρ |ρ|^|I| with |I| = 2, |J| = 3: 1 + 3·4 + 9 = 22
        assert_eq!(q_partitions(&[1, 2], &[1, 2, 3]).unwrap().len(), 22);
    }
}
