use std::ops::RangeInclusive;

use crate::error::{Error, Result};

/// How `partition` sizes its chunks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PartitionPolicy {
    /// Sizes differ by at most one; larger chunks come first.
    Balanced,
    /// Every chunk but the last has a round size (`total / chunks` cut down to
    /// its leading digit); the last chunk takes the remainder.
    RoundedWithTail,
}

impl std::str::FromStr for PartitionPolicy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "balanced" => Ok(PartitionPolicy::Balanced),
            "rounded" | "rounded-with-tail" => Ok(PartitionPolicy::RoundedWithTail),
            other => Err(Error::InvalidRange(format!("unknown partition policy {other:?}"))),
        }
    }
}

/// Splits IDs `1..=total` into `chunks` contiguous ranges.
pub fn partition(total: u64, chunks: u64, policy: PartitionPolicy) -> Result<Vec<RangeInclusive<u64>>> {
    if chunks == 0 {
        return Err(Error::InvalidRange("need at least one chunk".into()));
    }
    if chunks > total {
        return Err(Error::InvalidRange(format!("{chunks} chunks for {total} ids")));
    }
    let sizes: Vec<u64> = match policy {
        PartitionPolicy::Balanced => {
            let base = total / chunks;
            let extra = total % chunks;
            (0..chunks).map(|i| base + u64::from(i < extra)).collect()
        }
        PartitionPolicy::RoundedWithTail => {
            let raw = total / chunks;
            let scale = 10u64.pow(raw.ilog10());
            let base = raw / scale * scale;
            let mut v = vec![base; chunks as usize - 1];
            v.push(total - base * (chunks - 1));
            v
        }
    };
    let mut out = Vec::with_capacity(sizes.len());
    let mut next = 1;
    for s in sizes {
        out.push(next..=next + s - 1);
        next += s;
    }
    Ok(out)
}
