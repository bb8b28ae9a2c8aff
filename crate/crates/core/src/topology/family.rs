use crate::model::{bloch_nssh1, bloch_nssh2, BlochVector, CouplingSet};
use crate::scalar::{unit_phase, Real};

/// A closed family k ↦ d(k) over the Brillouin zone.
pub trait BlochFamily<T: Real>: Sync {
    fn bloch(&self, k: T) -> BlochVector<T>;

    /// ∂_k d(k). The default is a five-point central difference.
    fn derivative(&self, k: T) -> BlochVector<T> {
        let h = T::lit(1e-3);
        let f = |x: T| self.bloch(k + x);
        let (p1, m1, p2, m2) = (f(h), f(-h), f(h + h), f(-h - h));
        let comb = |a: T, b: T, c: T, d: T| (T::lit(8.0) * (a - b) - (c - d)) / (T::lit(12.0) * h);
        BlochVector::new(
            [comb(p1.dr[0], m1.dr[0], p2.dr[0], m2.dr[0]), comb(p1.dr[1], m1.dr[1], p2.dr[1], m2.dr[1])],
            [comb(p1.di[0], m1.di[0], p2.di[0], m2.di[0]), comb(p1.di[1], m1.di[1], p2.di[1], m2.di[1])],
        )
    }
}

/// Bloch vectors of the two-EP chain.
#[derive(Clone, Copy, Debug)]
pub struct Nssh2Family<T: Real>(pub CouplingSet<T>);

/// Bloch vectors of the single-EP chain.
#[derive(Clone, Copy, Debug)]
pub struct Nssh1Family<T: Real>(pub CouplingSet<T>);

impl<T: Real> BlochFamily<T> for Nssh2Family<T> {
    fn bloch(&self, k: T) -> BlochVector<T> {
        bloch_nssh2(k, &self.0)
    }

    fn derivative(&self, k: T) -> BlochVector<T> {
        let (s, d) = (self.0.hopping_mean(), self.0.pairing());
        let e = unit_phase(k);
        BlochVector::new([-s * e.im, s * e.re], [d * e.re, d * e.im])
    }
}

impl<T: Real> BlochFamily<T> for Nssh1Family<T> {
    fn bloch(&self, k: T) -> BlochVector<T> {
        bloch_nssh1(k, &self.0)
    }

    fn derivative(&self, k: T) -> BlochVector<T> {
        let (s, d) = (self.0.hopping_mean(), self.0.pairing());
        let e = unit_phase(k);
        BlochVector::new([-s * e.im, s * e.re], [-d * e.im, d * e.re])
    }
}
