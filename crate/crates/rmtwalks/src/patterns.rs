//! Link functions and their structural diagnostics.
//!
//! A link function maps matrix positions `(i, j)` (1-based, `1 <= i, j <= n`)
//! to an index set; positions with equal link value share one input random
//! variable. Canonical class ids are dense integers `0..num_classes`,
//! assigned by first occurrence in a row-major scan, so ensembles can keep
//! one walk per class in a flat vector.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum PatternError {
    #[error("matrix index ({i}, {j}) out of range for order {n}")]
    IndexOutOfRange { n: usize, i: usize, j: usize },
    #[error("order must be >= {min}, got {n}")]
    OrderTooSmall { n: usize, min: usize },
}

/// The built-in link functions.
///
/// The first five are symmetric; the circulant and elliptic kinds are not.
/// Only the Wigner link is two-dimensional.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LinkKind {
    /// `L(i,j) = (max(i,j), min(i,j))`
    Wigner,
    /// `L(i,j) = |i-j|`
    SymToeplitz,
    /// `L(i,j) = i+j-2`
    SymHankel,
    /// `L(i,j) = (i+j-2) mod n`
    ReverseCirculant,
    /// `L(i,j) = n/2 - |n/2 - |i-j||`, equivalently `min(|i-j|, n-|i-j|)`
    SymmetricCirculant,
    /// `L(i,j) = (j-i+n) mod n`
    Circulant,
    /// Every ordered pair is its own class; `(i,j)` and `(j,i)` are linked
    /// through pairing metadata so correlated entries can be imposed.
    EllipticIID,
}

impl LinkKind {
    /// Dimension of the link's value set (2 for Wigner, 1 otherwise).
    pub fn dim(self) -> u8 {
        match self {
            LinkKind::Wigner => 2,
            _ => 1,
        }
    }

    pub fn is_symmetric(self) -> bool {
        !matches!(self, LinkKind::Circulant | LinkKind::EllipticIID)
    }

    /// Kinds whose spectra come from the DFT of the first row.
    pub fn is_circulant_family(self) -> bool {
        matches!(
            self,
            LinkKind::ReverseCirculant | LinkKind::SymmetricCirculant | LinkKind::Circulant
        )
    }

    pub const ALL: [LinkKind; 7] = [
        LinkKind::Wigner,
        LinkKind::SymToeplitz,
        LinkKind::SymHankel,
        LinkKind::ReverseCirculant,
        LinkKind::SymmetricCirculant,
        LinkKind::Circulant,
        LinkKind::EllipticIID,
    ];
}

/// Canonical class indexing of one link function at a fixed order.
///
/// Immutable after construction; the index is computed in closed form, no
/// table is materialized.
#[derive(Debug, Clone, Copy)]
pub struct LinkTable {
    kind: LinkKind,
    n: usize,
}

/// Pairing metadata for one elliptic position.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EllipticPair {
    /// Class id of the position itself.
    pub id: usize,
    /// Class id of the mirrored position `(j, i)`.
    pub partner: usize,
    pub diagonal: bool,
}

impl LinkTable {
    pub fn new(kind: LinkKind, n: usize) -> Result<Self, PatternError> {
        if n < 1 {
            return Err(PatternError::OrderTooSmall { n, min: 1 });
        }
        Ok(LinkTable { kind, n })
    }

    #[inline]
    pub fn kind(&self) -> LinkKind {
        self.kind
    }

    #[inline]
    pub fn order(&self) -> usize {
        self.n
    }

    /// Number of distinct link values on the `n x n` grid.
    pub fn num_classes(&self) -> usize {
        let n = self.n;
        match self.kind {
            LinkKind::Wigner => n * (n + 1) / 2,
            LinkKind::SymToeplitz => n,
            LinkKind::SymHankel => 2 * n - 1,
            LinkKind::ReverseCirculant => n,
            LinkKind::SymmetricCirculant => n / 2 + 1,
            LinkKind::Circulant => n,
            LinkKind::EllipticIID => n * n,
        }
    }

    /// Canonical class id of position `(i, j)`, 1-based indices.
    ///
    /// Ids are dense in `0..num_classes` and assigned by first occurrence in
    /// a row-major scan, which for every built-in kind reduces to the closed
    /// forms below.
    #[inline]
    pub fn index(&self, i: usize, j: usize) -> Result<usize, PatternError> {
        if i < 1 || j < 1 || i > self.n || j > self.n {
            return Err(PatternError::IndexOutOfRange { n: self.n, i, j });
        }
        Ok(self.index_unchecked(i, j))
    }

    /// As [`Self::index`] without the range check; callers guarantee
    /// `1 <= i, j <= n`.
    #[inline]
    pub fn index_unchecked(&self, i: usize, j: usize) -> usize {
        let n = self.n;
        match self.kind {
            LinkKind::Wigner => {
                let (hi, lo) = if i >= j { (i, j) } else { (j, i) };
                // First occurrence of (hi, lo) is at row lo: rows 1..lo each
                // introduced n - row + 1 fresh classes.
                let k = lo - 1;
                k * n - (k * k - k) / 2 + (hi - lo)
            }
            LinkKind::SymToeplitz => i.abs_diff(j),
            LinkKind::SymHankel => i + j - 2,
            LinkKind::ReverseCirculant => (i + j - 2) % n,
            LinkKind::SymmetricCirculant => {
                let d = i.abs_diff(j);
                d.min(n - d)
            }
            LinkKind::Circulant => (j + n - i) % n,
            LinkKind::EllipticIID => (i - 1) * n + (j - 1),
        }
    }

    /// Pairing metadata for the elliptic kind.
    pub fn elliptic_pair(&self, i: usize, j: usize) -> Result<EllipticPair, PatternError> {
        let id = self.index(i, j)?;
        let partner = self.index(j, i)?;
        Ok(EllipticPair {
            id,
            partner,
            diagonal: i == j,
        })
    }
}

/// The Property B constant at order `n`: the largest number of times any
/// single link value occurs within one row, computed exhaustively.
pub fn delta_l(kind: LinkKind, n: usize) -> Result<usize, PatternError> {
    if n < 2 {
        return Err(PatternError::OrderTooSmall { n, min: 2 });
    }
    let table = LinkTable::new(kind, n)?;
    let mut best = 0;
    let mut counts = vec![0usize; table.num_classes()];
    for i in 1..=n {
        counts.fill(0);
        for j in 1..=n {
            counts[table.index_unchecked(i, j)] += 1;
        }
        best = best.max(*counts.iter().max().unwrap());
    }
    Ok(best)
}

/// Size of the matched set `M_{i,j} = #{k : L(k,i) = L(k,j)}` for `i != j`.
pub fn matched_set_size(kind: LinkKind, n: usize, i: usize, j: usize) -> Result<usize, PatternError> {
    let table = LinkTable::new(kind, n)?;
    if i == j {
        return Err(PatternError::IndexOutOfRange { n, i, j });
    }
    table.index(i, j)?;
    Ok((1..=n)
        .filter(|&k| table.index_unchecked(k, i) == table.index_unchecked(k, j))
        .count())
}

/// `beta_n = max_r #{(i,j) : L(i,j) = r}`, the size of the largest class.
pub fn beta_n(kind: LinkKind, n: usize) -> Result<usize, PatternError> {
    let table = LinkTable::new(kind, n)?;
    let mut counts = vec![0usize; table.num_classes()];
    for i in 1..=n {
        for j in 1..=n {
            counts[table.index_unchecked(i, j)] += 1;
        }
    }
    Ok(*counts.iter().max().unwrap())
}

/// Position multiplicity of every class: entry `c` holds
/// `#{(i,j) : index(i,j) = c}`.
pub fn class_multiplicities(table: &LinkTable) -> Vec<usize> {
    let n = table.order();
    let mut counts = vec![0usize; table.num_classes()];
    for i in 1..=n {
        for j in 1..=n {
            counts[table.index_unchecked(i, j)] += 1;
        }
    }
    counts
}
