//! Gaunt coefficients and the spectrum of a product of two functions.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Arc, Mutex, OnceLock};

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::harmonics::{num_coeffs, sh_index, sh_mode, SphericalSpectrum, C64};
use crate::par::{map_indexed, Execution};
use crate::wigner::{wigner3j_exact, SignedSqrt};

fn check_mode(n: i64, m: i64) -> Result<()> {
    if n < 0 || m.abs() > n {
        Err(Error::Domain(format!("invalid harmonic mode (n={n}, m={m})")))
    } else {
        Ok(())
    }
}

/// Largest `L`, `M` whose tables are kept in the process-wide cache.
pub const CACHE_MAX_ORDER: usize = 8;

/// Gaunt coefficient `∫ Y_{n1m1} Y_{n2m2} Y*_{n3m3} dΩ`.
///
/// Evaluated as `(-1)^{m3} sqrt((2n1+1)(2n2+1)(2n3+1)/4π) (n1 n2 n3; 0 0 0)(n1 n2 n3; m1 m2 -m3)`
/// with the product of the two 3j symbols formed exactly before the single
/// floating-point square root.
pub fn gaunt(n1: i64, m1: i64, n2: i64, m2: i64, n3: i64, m3: i64) -> Result<f64> {
    Ok(gaunt_exact(n1, m1, n2, m2, n3, m3)?.to_f64() / (4.0 * PI).sqrt())
}

/// Gaunt coefficient times `sqrt(4π)`, kept exact.
fn gaunt_exact(n1: i64, m1: i64, n2: i64, m2: i64, n3: i64, m3: i64) -> Result<SignedSqrt> {
    check_mode(n1, m1)?;
    check_mode(n2, m2)?;
    check_mode(n3, m3)?;
    if m1 + m2 != m3 || n3 < (n1 - n2).abs() || n3 > n1 + n2 || (n1 + n2 + n3) % 2 == 1 {
        return Ok(SignedSqrt::zero());
    }
    let zero_m = wigner3j_exact(n1, n2, n3, 0, 0, 0)?;
    let with_m = wigner3j_exact(n1, n2, n3, m1, m2, -m3)?;
    let mut out = zero_m.mul(&with_m);
    out.square *= num_bigint::BigInt::from((2 * n1 + 1) * (2 * n2 + 1) * (2 * n3 + 1));
    if m3.rem_euclid(2) == 1 {
        out.negative = !out.negative;
    }
    Ok(out)
}

/// One nonzero coupling coefficient between storage indices.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GauntEntry {
    /// Index into the first (order-L) spectrum.
    pub first: usize,
    /// Index into the second (order-M) spectrum.
    pub second: usize,
    /// Index into the order-(L+M) product spectrum.
    pub product: usize,
    pub value: f64,
}

/// All nonzero Gaunt coefficients coupling order-`L` and order-`M` spectra
/// into their order-`L+M` product, sorted by `(product, first, second)`.
#[derive(Debug, Clone)]
pub struct GauntTable {
    max_order_first: usize,
    max_order_second: usize,
    entries: Vec<GauntEntry>,
}

impl GauntTable {
    pub fn build(max_order_first: usize, max_order_second: usize) -> Result<Self> {
        Self::build_with(max_order_first, max_order_second, Execution::default())
    }

    pub fn build_with(l: usize, m: usize, exec: Execution) -> Result<Self> {
        let rows = map_indexed(exec, num_coeffs(l), |q1| -> Result<Vec<GauntEntry>> {
            let (n1, m1) = sh_mode(q1);
            let mut row = Vec::new();
            for q2 in 0..num_coeffs(m) {
                let (n2, m2) = sh_mode(q2);
                let m3 = m1 + m2;
                let lo = (n1 as i64 - n2 as i64).unsigned_abs() as usize;
                for n3 in (lo..=n1 + n2).step_by(2) {
                    if m3.unsigned_abs() as usize > n3 {
                        continue;
                    }
                    let g = gaunt_exact(n1 as i64, m1, n2 as i64, m2, n3 as i64, m3)?;
                    if !g.is_zero() {
                        row.push(GauntEntry {
                            first: q1,
                            second: q2,
                            product: sh_index(n3, m3),
                            value: g.to_f64() / (4.0 * PI).sqrt(),
                        });
                    }
                }
            }
            Ok(row)
        });
        let mut entries = Vec::new();
        for row in rows {
            entries.extend(row?);
        }
        entries.sort_by_key(|e| (e.product, e.first, e.second));
        Ok(GauntTable {
            max_order_first: l,
            max_order_second: m,
            entries,
        })
    }

    /// Process-wide cached table for `(L, M)`, built on first use. Tables
    /// beyond [`CACHE_MAX_ORDER`] are built fresh on every call.
    pub fn shared(l: usize, m: usize) -> Result<Arc<GauntTable>> {
        if l > CACHE_MAX_ORDER || m > CACHE_MAX_ORDER {
            return Ok(Arc::new(GauntTable::build(l, m)?));
        }
        static CACHE: OnceLock<Mutex<HashMap<(usize, usize), Arc<GauntTable>>>> = OnceLock::new();
        let cache = CACHE.get_or_init(Default::default);
        if let Some(t) = cache.lock().unwrap().get(&(l, m)) {
            return Ok(t.clone());
        }
        // built outside the lock so concurrent users of other tables never wait
        let table = Arc::new(GauntTable::build(l, m)?);
        Ok(cache.lock().unwrap().entry((l, m)).or_insert(table).clone())
    }

    pub fn max_order_first(&self) -> usize {
        self.max_order_first
    }

    pub fn max_order_second(&self) -> usize {
        self.max_order_second
    }

    pub fn product_order(&self) -> usize {
        self.max_order_first + self.max_order_second
    }

    pub fn entries(&self) -> &[GauntEntry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    fn product_range(&self, product: usize) -> &[GauntEntry] {
        let lo = self.entries.partition_point(|e| e.product < product);
        let hi = self.entries.partition_point(|e| e.product <= product);
        &self.entries[lo..hi]
    }

    /// Stored coefficient for the index triple, zero if absent.
    pub fn get(&self, first: usize, second: usize, product: usize) -> f64 {
        let range = self.product_range(product);
        range
            .binary_search_by_key(&(first, second), |e| (e.first, e.second))
            .map(|i| range[i].value)
            .unwrap_or(0.0)
    }

    /// Dense coupling matrix `G_q` for product index `product` (zero based).
    pub fn matrix(&self, product: usize) -> Result<DMatrix<f64>> {
        if product >= num_coeffs(self.product_order()) {
            return Err(Error::OutOfRange(format!(
                "product index {product} beyond order {}",
                self.product_order()
            )));
        }
        let mut g = DMatrix::zeros(num_coeffs(self.max_order_first), num_coeffs(self.max_order_second));
        for e in self.product_range(product) {
            g[(e.first, e.second)] = e.value;
        }
        Ok(g)
    }
}

/// Coupling matrix `G_q` between order-`l` and order-`m` spectra, `product`
/// being the zero-based product index (`< (l+m+1)²`).
pub fn gaunt_matrix(product: usize, l: usize, m: usize) -> Result<DMatrix<f64>> {
    if product >= num_coeffs(l + m) {
        return Err(Error::OutOfRange(format!("product index {product} beyond order {}", l + m)));
    }
    GauntTable::shared(l, m)?.matrix(product)
}

/// Spectrum of the pointwise product `f(Ω) g(Ω)`: `c_q = fᵀ G_q g`.
///
/// No conjugation is applied; pass `g.conjugate()` for `f g*`.
pub fn product_spectrum(f: &SphericalSpectrum, g: &SphericalSpectrum) -> Result<SphericalSpectrum> {
    let table = GauntTable::shared(f.order(), g.order())?;
    Ok(product_with_table(&table, f, g))
}

/// Product spectrum using a caller-held table; the spectra must match the
/// table orders.
pub fn product_with_table(table: &GauntTable, f: &SphericalSpectrum, g: &SphericalSpectrum) -> SphericalSpectrum {
    assert_eq!(f.order(), table.max_order_first, "first spectrum order");
    assert_eq!(g.order(), table.max_order_second, "second spectrum order");
    let mut c = vec![C64::new(0.0, 0.0); num_coeffs(table.product_order())];
    let (fc, gc) = (f.coeffs(), g.coeffs());
    for e in &table.entries {
        c[e.product] += fc[e.first] * gc[e.second] * e.value;
    }
    SphericalSpectrum::new(table.product_order(), c).expect("product length")
}
