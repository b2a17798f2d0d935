//! The evaluation interface shared by target functions, ridge atoms and networks.

use crate::error::{Error, Result};

/// A real function on ℝ^d with closed-form partial derivatives up to `max_order`.
pub trait SmoothFunction: Sync {
    fn dim(&self) -> usize;

    fn max_order(&self) -> usize;

    /// ∂^α g(x).
    fn partial(&self, alpha: &[u32], x: &[f64]) -> Result<f64>;

    fn value(&self, x: &[f64]) -> Result<f64> {
        let zero = vec![0u32; self.dim()];
        self.partial(&zero, x)
    }

    /// ∂^α g at every point of `points` (row-major, `dim` coordinates per point).
    fn partial_on(&self, alpha: &[u32], points: &[f64], out: &mut [f64]) -> Result<()> {
        let d = self.dim();
        for (x, o) in points.chunks_exact(d).zip(out.iter_mut()) {
            *o = self.partial(alpha, x)?;
        }
        Ok(())
    }
}

pub(crate) fn check_order(alpha: &[u32], max: usize) -> Result<usize> {
    let order = crate::numerics::order(alpha);
    if order > max {
        Err(Error::UnsupportedOrder { order, max })
    } else {
        Ok(order)
    }
}

/// The pointwise difference g − h of two functions on the same space.
pub struct Difference<'a, G: ?Sized, H: ?Sized> {
    pub lhs: &'a G,
    pub rhs: &'a H,
}

impl<'a, G: SmoothFunction + ?Sized, H: SmoothFunction + ?Sized> Difference<'a, G, H> {
    pub fn new(lhs: &'a G, rhs: &'a H) -> Result<Self> {
        crate::error::check_dim(lhs.dim(), rhs.dim())?;
        Ok(Difference { lhs, rhs })
    }
}

impl<G: SmoothFunction + ?Sized, H: SmoothFunction + ?Sized> SmoothFunction for Difference<'_, G, H> {
    fn dim(&self) -> usize {
        self.lhs.dim()
    }

    fn max_order(&self) -> usize {
        self.lhs.max_order().min(self.rhs.max_order())
    }

    fn partial(&self, alpha: &[u32], x: &[f64]) -> Result<f64> {
        Ok(self.lhs.partial(alpha, x)? - self.rhs.partial(alpha, x)?)
    }

    fn partial_on(&self, alpha: &[u32], points: &[f64], out: &mut [f64]) -> Result<()> {
        self.lhs.partial_on(alpha, points, out)?;
        let mut tmp = vec![0.0; out.len()];
        self.rhs.partial_on(alpha, points, &mut tmp)?;
        for (o, t) in out.iter_mut().zip(tmp) {
            *o -= t;
        }
        Ok(())
    }
}
