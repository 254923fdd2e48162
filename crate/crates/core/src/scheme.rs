//! Joint laws for the starting positions of `k` walkers.

use crate::chain::TransitionKernel;
use crate::error::{Error, Result};

/// Tolerance on probability-vector normalisation and coupling marginals.
pub const MEASURE_TOL: f64 = 1e-12;

/// Largest admissible coupling table, in entries.
pub const MAX_COUPLING_ENTRIES: u128 = 1_000_000;

/// Checks that `nu` is a probability vector on `n` vertices.
pub fn validate_measure(nu: &[f64], n: usize) -> Result<()> {
    if nu.len() != n {
        return Err(Error::InvalidMeasure(format!(
            "length {} does not match {n} vertices",
            nu.len()
        )));
    }
    if let Some(x) = nu.iter().position(|&w| !w.is_finite() || w < 0.0) {
        return Err(Error::InvalidMeasure(format!("weight {} at vertex {x}", nu[x])));
    }
    let total: f64 = nu.iter().sum();
    if (total - 1.0).abs() > MEASURE_TOL {
        return Err(Error::InvalidMeasure(format!("total mass {total}")));
    }
    Ok(())
}

/// Scales nonnegative weights to a probability vector.
pub fn normalize(weights: &[f64]) -> Result<Vec<f64>> {
    if weights.iter().any(|&w| !w.is_finite() || w < 0.0) {
        return Err(Error::InvalidMeasure("weights must be nonnegative and finite".into()));
    }
    let total: f64 = weights.iter().sum();
    if total.is_nan() || total <= 0.0 {
        return Err(Error::InvalidMeasure("weights sum to zero".into()));
    }
    Ok(weights.iter().map(|w| w / total).collect())
}

pub fn uniform(n: usize) -> Vec<f64> {
    vec![1.0 / n as f64; n]
}

pub fn point_mass(n: usize, x: usize) -> Vec<f64> {
    let mut nu = vec![0.0; n];
    nu[x] = 1.0;
    nu
}

/// Explicit joint law `μ` on `V^k` with declared marginals.
///
/// Entry `(x_1, …, x_k)` lives at index `x_1 + x_2 n + … + x_k n^(k−1)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Coupling {
    n: usize,
    k: usize,
    table: Vec<f64>,
    marginals: Vec<Vec<f64>>,
}

impl Coupling {
    pub fn new(n: usize, k: usize, table: Vec<f64>, marginals: Vec<Vec<f64>>) -> Result<Self> {
        let entries = table_entries(n, k)?;
        if table.len() != entries {
            return Err(Error::InvalidScheme(format!(
                "coupling table has {} entries, expected {entries}",
                table.len()
            )));
        }
        validate_measure(&table, entries)?;
        if marginals.len() != k {
            return Err(Error::InvalidScheme(format!(
                "{} marginals declared for {k} walkers",
                marginals.len()
            )));
        }
        let coupling = Coupling {
            n,
            k,
            table,
            marginals,
        };
        let actual = coupling.table_marginals();
        for (i, (declared, actual)) in coupling.marginals.iter().zip(&actual).enumerate() {
            validate_measure(declared, n)?;
            if let Some(x) = (0..n).find(|&x| (declared[x] - actual[x]).abs() > MEASURE_TOL) {
                return Err(Error::InvalidScheme(format!(
                    "marginal {i} at vertex {x}: declared {}, table gives {}",
                    declared[x], actual[x]
                )));
            }
        }
        Ok(coupling)
    }

    /// Coupling whose declared marginals are read off the table.
    pub fn from_table(n: usize, k: usize, table: Vec<f64>) -> Result<Self> {
        table_entries(n, k)?;
        let probe = Coupling {
            n,
            k,
            table,
            marginals: Vec::new(),
        };
        if probe.table.len() != probe.entries() {
            return Err(Error::InvalidScheme("coupling table has the wrong length".into()));
        }
        let marginals = probe.table_marginals();
        Self::new(n, k, probe.table, marginals)
    }

    /// Independent coupling `ν_1 ⊗ … ⊗ ν_k`.
    pub fn product(measures: &[Vec<f64>]) -> Result<Self> {
        let k = measures.len();
        let n = measures.first().map_or(0, Vec::len);
        let entries = table_entries(n, k)?;
        let mut table = vec![0.0; entries];
        let mut idx = vec![0; k];
        for (cell, slot) in table.iter_mut().enumerate() {
            decode_index(cell, n, &mut idx);
            *slot = idx.iter().zip(measures).map(|(&x, nu)| nu[x]).product();
        }
        Self::new(n, k, table, measures.to_vec())
    }

    /// All walkers at one point drawn from `nu`.
    pub fn diagonal(nu: &[f64], k: usize) -> Result<Self> {
        let n = nu.len();
        let entries = table_entries(n, k)?;
        let mut table = vec![0.0; entries];
        let stride: usize = (0..k).map(|i| n.pow(i as u32)).sum();
        for (x, &w) in nu.iter().enumerate() {
            table[x * stride] = w;
        }
        Self::new(n, k, table, vec![nu.to_vec(); k])
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn walkers(&self) -> usize {
        self.k
    }

    pub fn entries(&self) -> usize {
        self.table.len()
    }

    pub fn table(&self) -> &[f64] {
        &self.table
    }

    pub fn marginals(&self) -> &[Vec<f64>] {
        &self.marginals
    }

    /// Writes the coordinates of table cell `index` into `out`.
    pub fn decode(&self, index: usize, out: &mut [usize]) {
        decode_index(index, self.n, out);
    }

    pub fn encode(&self, coords: &[usize]) -> usize {
        coords.iter().rev().fold(0, |acc, &x| acc * self.n + x)
    }

    fn table_marginals(&self) -> Vec<Vec<f64>> {
        let mut marginals = vec![vec![0.0; self.n]; self.k];
        let mut idx = vec![0; self.k];
        for (cell, &w) in self.table.iter().enumerate() {
            decode_index(cell, self.n, &mut idx);
            for (marginal, &x) in marginals.iter_mut().zip(&idx) {
                marginal[x] += w;
            }
        }
        marginals
    }
}

fn table_entries(n: usize, k: usize) -> Result<usize> {
    if n == 0 || k == 0 {
        return Err(Error::InvalidScheme("coupling needs n >= 1 and k >= 1".into()));
    }
    let entries = (n as u128).checked_pow(k as u32).unwrap_or(u128::MAX);
    if entries > MAX_COUPLING_ENTRIES {
        return Err(Error::TableTooLarge {
            entries,
            limit: MAX_COUPLING_ENTRIES,
        });
    }
    Ok(entries as usize)
}

pub(crate) fn decode_index(mut index: usize, n: usize, out: &mut [usize]) {
    for slot in out.iter_mut() {
        *slot = index % n;
        index /= n;
    }
}

/// Joint law of the `k` starting positions.
#[derive(Debug, Clone, PartialEq)]
pub enum StartScheme {
    /// Walker `i` starts independently from `ν_i`.
    IidProduct(Vec<Vec<f64>>),
    /// One vertex drawn from `ν`, shared by every walker.
    SharedPoint(Vec<f64>),
    /// Walker `i` starts at vertex `x_i`.
    FixedPoints(Vec<usize>),
    Coupling(Coupling),
}

impl StartScheme {
    /// `k` independent copies of `nu`.
    pub fn iid(nu: Vec<f64>, k: usize) -> Self {
        StartScheme::IidProduct(vec![nu; k])
    }

    pub fn iid_stationary(kernel: &TransitionKernel, k: usize) -> Self {
        Self::iid(kernel.pi().to_vec(), k)
    }

    pub fn name(&self) -> &'static str {
        match self {
            StartScheme::IidProduct(_) => "iid",
            StartScheme::SharedPoint(_) => "shared",
            StartScheme::FixedPoints(_) => "fixed",
            StartScheme::Coupling(_) => "coupling",
        }
    }

    /// Number of walkers the scheme fixes, if any.
    pub fn walkers(&self) -> Option<usize> {
        match self {
            StartScheme::IidProduct(m) => Some(m.len()),
            StartScheme::SharedPoint(_) => None,
            StartScheme::FixedPoints(p) => Some(p.len()),
            StartScheme::Coupling(c) => Some(c.walkers()),
        }
    }

    /// Checks the scheme against `n` vertices and `k` walkers.
    pub fn validate(&self, n: usize, k: usize) -> Result<()> {
        if k == 0 {
            return Err(Error::InvalidScheme("at least one walker is required".into()));
        }
        if let Some(w) = self.walkers() {
            if w != k {
                return Err(Error::InvalidScheme(format!(
                    "{} scheme describes {w} walkers, lifespans give {k}",
                    self.name()
                )));
            }
        }
        match self {
            StartScheme::IidProduct(measures) => {
                measures.iter().try_for_each(|nu| validate_measure(nu, n))
            }
            StartScheme::SharedPoint(nu) => validate_measure(nu, n),
            StartScheme::FixedPoints(points) => match points.iter().find(|&&x| x >= n) {
                Some(&vertex) => Err(Error::BadVertex { vertex, n }),
                None => Ok(()),
            },
            StartScheme::Coupling(c) if c.vertex_count() != n => Err(Error::InvalidScheme(
                format!("coupling over {} vertices, graph has {n}", c.vertex_count()),
            )),
            StartScheme::Coupling(_) => Ok(()),
        }
    }

    /// Law of walker `i`'s starting vertex.
    pub fn marginal(&self, i: usize, n: usize) -> Vec<f64> {
        match self {
            StartScheme::IidProduct(measures) => measures[i].clone(),
            StartScheme::SharedPoint(nu) => nu.clone(),
            StartScheme::FixedPoints(points) => point_mass(n, points[i]),
            StartScheme::Coupling(c) => c.marginals()[i].clone(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn measure_validation() {
        assert!(validate_measure(&[0.25, 0.75], 2).is_ok());
        assert!(validate_measure(&[0.25, 0.7], 2).is_err());
        assert!(validate_measure(&[-0.25, 1.25], 2).is_err());
        assert!(validate_measure(&[1.0], 2).is_err());
        assert_eq!(normalize(&[1.0, 3.0]).unwrap(), vec![0.25, 0.75]);
        assert!(normalize(&[0.0, 0.0]).is_err());
    }

    #[test]
    fn product_coupling_marginals() {
        let a = vec![0.2, 0.8];
        let b = vec![0.5, 0.5];
        let c = Coupling::product(&[a.clone(), b.clone()]).unwrap();
        assert_eq!(c.entries(), 4);
        // index = x1 + 2 x2
        assert!((c.table()[c.encode(&[1, 0])] - 0.4).abs() < 1e-15);
        assert_eq!(c.marginals(), &[a, b]);
        let mut coords = [0; 2];
        c.decode(3, &mut coords);
        assert_eq!(coords, [1, 1]);
    }

    #[test]
    fn diagonal_coupling() {
        let c = Coupling::diagonal(&[0.5, 0.5], 3).unwrap();
        assert_eq!(c.table()[0], 0.5);
        assert_eq!(c.table()[7], 0.5);
        assert_eq!(c.table().iter().filter(|&&w| w > 0.0).count(), 2);
    }

    #[test]
    fn coupling_rejects_wrong_marginals_and_large_tables() {
        let table = vec![0.5, 0.0, 0.0, 0.5];
        let err = Coupling::new(2, 2, table.clone(), vec![vec![0.5, 0.5], vec![0.9, 0.1]]);
        assert!(matches!(err, Err(Error::InvalidScheme(_))));
        assert!(Coupling::from_table(2, 2, table).is_ok());
        assert!(matches!(
            Coupling::diagonal(&uniform(101), 3),
            Err(Error::TableTooLarge { .. })
        ));
        assert!(Coupling::diagonal(&uniform(100), 3).is_ok());
    }

    #[test]
    fn scheme_validation() {
        let s = StartScheme::iid(uniform(3), 2);
        assert!(s.validate(3, 2).is_ok());
        assert!(s.validate(3, 3).is_err());
        assert!(s.validate(4, 2).is_err());
        assert!(StartScheme::SharedPoint(uniform(3)).validate(3, 5).is_ok());
        assert!(matches!(
            StartScheme::FixedPoints(vec![0, 3]).validate(3, 2),
            Err(Error::BadVertex { vertex: 3, n: 3 })
        ));
        assert_eq!(StartScheme::FixedPoints(vec![2]).marginal(0, 3), vec![0.0, 0.0, 1.0]);
    }
}
