use gasket_geometry::{Family, GasketSpec};
use serde::Serialize;

use crate::cache::{rho_cached, RhoCache};
use crate::{rho_lower_bound, vicsek_fixed_point, vs3d_rho_liminf, NetError, Result};

/// Full exponent record for one instance, with rho drawn through the cache
/// (resistance route for the gasket, fixed point for the Vicsek families).
pub fn exponents(family: Family, d: u32, l: u32, cache: &mut RhoCache) -> Result<ExponentTable> {
    let spec = GasketSpec::new(family, d, l, 1)?;
    let n_cells = spec.cells_per_level()?;
    let (rho, lower) = match family {
        Family::Sg => {
            let rho = rho_cached(cache, family, d, l)?;
            (rho, rho_lower_bound(d, l)?.finite_sum)
        }
        Family::Vs2d => (rho_cached(cache, family, d, l)?, f64::NAN),
        Family::Vs3d => {
            // the bound needs the fixed-point resistances, so solve the fixed
            // point here; the cache validates its rho against any prior value
            let fp = vicsek_fixed_point(family, l, 1e-12, 500)?;
            let rho = rho_cached(cache, family, d, l)?;
            let (a, b) = (1.0 / fp.params[0], 1.0 / fp.params[1]);
            (rho, vs3d_rho_liminf(a.max(1.0), b.max(1.0))?)
        }
    };
    ExponentTable::from_rho(family, d, l, n_cells, rho, lower)
}

/// Per-(family, d, l) record of the cell count, renormalization factor and the
/// derived scaling exponents.
#[derive(Debug, Clone, Serialize)]
pub struct ExponentTable {
    pub family: Family,
    pub d: u32,
    pub l: u32,
    pub n_cells: u64,
    pub rho: f64,
    /// Shorting lower bound where one applies; NaN otherwise (reported, never
    /// asserted against rho at finite l).
    pub rho_lower: f64,
    /// Mass-scaling (fractal) dimension log N / log l.
    pub d_f: f64,
    /// Walk dimension log(rho N) / log l.
    pub d_w: f64,
    /// Spectral dimension via the Einstein relation 2 d_f / d_w.
    pub d_s: f64,
    /// Time rescaling l^2 / (2 rho N) = l^(2 - d_w) / 2.
    pub tau: f64,
}

impl ExponentTable {
    pub fn from_rho(
        family: Family,
        d: u32,
        l: u32,
        n_cells: u64,
        rho: f64,
        rho_lower: f64,
    ) -> Result<Self> {
        if !(rho > 1.0) {
            return Err(NetError::InvalidInput(format!(
                "rho must exceed 1, got {rho}"
            )));
        }
        let lf = l as f64;
        let nf = n_cells as f64;
        let d_f = nf.ln() / lf.ln();
        let d_w = (rho * nf).ln() / lf.ln();
        let d_s = 2.0 * d_f / d_w;
        let tau = lf * lf / (2.0 * rho * nf);
        let table = ExponentTable {
            family,
            d,
            l,
            n_cells,
            rho,
            rho_lower,
            d_f,
            d_w,
            d_s,
            tau,
        };
        let alt = 0.5 * lf.powf(2.0 - d_w);
        let rel = (table.tau - alt).abs() / alt;
        if rel > 1e-12 {
            return Err(NetError::NumericalFailure(format!(
                "tau identity violated: {} vs {} (relative {rel:.3e})",
                table.tau, alt
            )));
        }
        if table.d_w <= 2.0 {
            return Err(NetError::NumericalFailure(format!(
                "walk dimension {} <= 2 for {family} d={d} l={l}",
                table.d_w
            )));
        }
        Ok(table)
    }

    /// Shape diagnostic of the walk dimension: for d = 2 the combination
    /// `(d_w - 2 - loglog l / log l) * log l`, for d >= 3 `(d_w - d) * log l`.
    pub fn dw_diagnostic(&self) -> f64 {
        let ll = (self.l as f64).ln();
        if self.d == 2 {
            (self.d_w - 2.0 - ll.ln() / ll) * ll
        } else {
            (self.d_w - self.d as f64) * ll
        }
    }

    pub const CSV_HEADER: &'static str = "d,l,family,N,rho,rho_lower,d_f,d_w,d_s,tau";

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{},{}",
            self.d,
            self.l,
            self.family,
            self.n_cells,
            fmt15(self.rho),
            fmt15(self.rho_lower),
            fmt15(self.d_f),
            fmt15(self.d_w),
            fmt15(self.d_s),
            fmt15(self.tau),
        )
    }
}

/// 15 significant digits, the CSV contract for real columns.
pub(crate) fn fmt15(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else {
        format!("{x:.14e}")
    }
}

/// The crossover time profile: fractal scaling `r^{d_w}` below the cell scale
/// 1/l, Euclidean scaling `2 tau r^2` above it. Continuous and strictly
/// increasing, with an explicit inverse.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct ScaleFunction {
    pub l: u32,
    pub d_w: f64,
    pub tau: f64,
}

impl ScaleFunction {
    pub fn new(l: u32, d_w: f64) -> Self {
        let tau = 0.5 * (l as f64).powf(2.0 - d_w);
        ScaleFunction { l, d_w, tau }
    }

    pub fn from_table(t: &ExponentTable) -> Self {
        ScaleFunction {
            l: t.l,
            d_w: t.d_w,
            tau: t.tau,
        }
    }

    pub fn value(&self, r: f64) -> Result<f64> {
        if !(r > 0.0 && r <= 1.0) {
            return Err(NetError::InvalidInput(format!(
                "scale function argument r = {r} outside (0, 1]"
            )));
        }
        let crossover = 1.0 / self.l as f64;
        Ok(if r <= crossover {
            r.powf(self.d_w)
        } else {
            2.0 * self.tau * r * r
        })
    }

    pub fn inverse(&self, t: f64) -> Result<f64> {
        let top = self.value(1.0)?;
        if !(t > 0.0 && t <= top) {
            return Err(NetError::InvalidInput(format!(
                "scale function inverse argument t = {t} outside (0, {top}]"
            )));
        }
        let crossover = (self.l as f64).powf(-self.d_w);
        Ok(if t <= crossover {
            t.powf(1.0 / self.d_w)
        } else {
            (t / (2.0 * self.tau)).sqrt()
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn table_22() -> ExponentTable {
        ExponentTable::from_rho(Family::Sg, 2, 2, 3, 5.0 / 3.0, f64::NAN).unwrap()
    }

    #[test]
    fn exponents_for_the_smallest_gasket() {
        let t = table_22();
        assert!((t.d_w - 5f64.ln() / 2f64.ln()).abs() < 1e-12);
        assert!((t.d_w - 2.321928).abs() < 1e-6);
        assert!((t.tau - 0.4).abs() < 1e-14);
        assert!((t.d_f - 3f64.ln() / 2f64.ln()).abs() < 1e-12);
        assert!((t.d_f - 1.584963).abs() < 1e-6);
        assert!((t.d_s - 2.0 * t.d_f / t.d_w).abs() < 1e-14);
    }

    #[test]
    fn scale_function_is_continuous_at_the_crossover() {
        let t = table_22();
        let psi = ScaleFunction::from_table(&t);
        let below = psi.value(0.5).unwrap(); // r = 1/l exactly
        assert!((below - 2f64.powf(-t.d_w)).abs() < 1e-15);
        assert!((below - 2.0 * t.tau * 0.25).abs() < 1e-15);
        // tau golden: psi(1) = 2 * 0.4
        assert!((psi.value(1.0).unwrap() - 0.8).abs() < 1e-14);
    }

    #[test]
    fn scale_function_inverts() {
        let psi = ScaleFunction::new(4, 2.2);
        for r in [0.3 / 4.0, 1.0 / 4.0, 3.0 / 4.0, 0.999] {
            let t = psi.value(r).unwrap();
            let back = psi.inverse(t).unwrap();
            assert!((back - r).abs() < 1e-12 * r, "r={r}");
        }
        assert!(psi.value(0.0).is_err());
        assert!(psi.value(1.5).is_err());
        assert!(psi.inverse(psi.value(1.0).unwrap() * 1.01).is_err());
    }

    #[test]
    fn csv_row_shape() {
        let t = table_22();
        let row = t.csv_row();
        assert_eq!(
            row.split(',').count(),
            ExponentTable::CSV_HEADER.split(',').count()
        );
        assert!(row.starts_with("2,2,sg,3,"));
    }
}
