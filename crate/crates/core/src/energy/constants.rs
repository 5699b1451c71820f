use crate::error::{Error, Result};

/// Frank constants `k1..k12`.
///
/// `k1..k3` weight splay/twist/bend of `n`, `k4..k6` the same for `m`, and
/// `k7..k12` the coupling terms. The first six must be strictly positive so
/// that the coercivity constants `alpha1`, `alpha2` are positive.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FrankConstants {
    k: [f64; 12],
}

impl FrankConstants {
    pub fn new(k: [f64; 12]) -> Result<Self> {
        for (i, &v) in k.iter().enumerate() {
            let ok = if i < 6 { v > 0.0 } else { v >= 0.0 };
            if !(ok && v.is_finite()) {
                let bound = if i < 6 { "> 0" } else { ">= 0" };
                return Err(Error::Validation {
                    field: format!("k{}", i + 1),
                    msg: format!("{v} must be finite and {bound}"),
                });
            }
        }
        Ok(FrankConstants { k })
    }

    /// `k1 = .. = k6 = 1`, `k7 = .. = k12 = 0`.
    pub fn one_constant() -> Self {
        let mut k = [0.0; 12];
        k[..6].fill(1.0);
        FrankConstants { k }
    }

    /// One-based accessor: `k(1)` is `k1`.
    #[inline]
    pub fn k(&self, i: usize) -> f64 {
        self.k[i - 1]
    }

    pub fn as_array(&self) -> &[f64; 12] {
        &self.k
    }

    pub fn alpha1(&self) -> f64 {
        self.k[0].min(self.k[1]).min(self.k[2])
    }

    pub fn alpha2(&self) -> f64 {
        self.k[3].min(self.k[4]).min(self.k[5])
    }

    pub fn alpha3(&self) -> f64 {
        self.alpha1().min(self.alpha2())
    }

    pub fn max_k(&self) -> f64 {
        self.k.iter().cloned().fold(0.0, f64::max)
    }

    pub fn scaled(&self, c: f64) -> Result<Self> {
        FrankConstants::new(self.k.map(|v| v * c))
    }
}
