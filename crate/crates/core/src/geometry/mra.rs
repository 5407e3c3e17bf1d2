//! Restricted minimum-redundancy array index sets.
//!
//! Each entry places `M` integer ports on `0..=L` so that every lag in
//! `0..=L` occurs at least once as a pairwise difference, with `L` as large
//! as possible for that port count.

const MRA_TABLE: [&[u32]; 9] = [
    &[0, 1, 3],
    &[0, 1, 4, 6],
    &[0, 1, 4, 7, 9],
    &[0, 1, 6, 9, 11, 13],
    &[0, 1, 8, 11, 13, 15, 17],
    &[0, 1, 4, 10, 16, 18, 21, 23],
    &[0, 1, 2, 14, 18, 21, 24, 27, 29],
    &[0, 1, 3, 6, 13, 20, 27, 31, 35, 36],
    &[0, 1, 3, 6, 13, 20, 27, 34, 38, 42, 43],
];

/// Smallest port count with a table entry.
pub const MRA_MIN_PORTS: usize = 3;
/// Largest port count with a table entry.
pub const MRA_MAX_PORTS: usize = 11;

/// Integer MRA indices for `port_count` ports, if tabulated.
///
/// Two ports are trivially `{0, 1}`.
pub fn mra_indices(port_count: usize) -> Option<&'static [u32]> {
    match port_count {
        2 => Some(&[0, 1]),
        MRA_MIN_PORTS..=MRA_MAX_PORTS => Some(MRA_TABLE[port_count - MRA_MIN_PORTS]),
        _ => None,
    }
}

/// True when the pairwise differences of `indices` cover `0..=max(indices)`.
pub fn covers_contiguous_lags(indices: &[u32]) -> bool {
    let Some(&max) = indices.iter().max() else {
        return false;
    };
    let mut seen = vec![false; max as usize + 1];
    for &a in indices {
        for &b in indices {
            seen[a.abs_diff(b) as usize] = true;
        }
    }
    seen.into_iter().all(|s| s)
}
