use crate::genotype::BitGenotype;

/// Value substituted for non-finite evaluations so that minimization always
/// discards them.
pub const PENALTY: f64 = 1e300;

/// Maps NaN and infinities to [`PENALTY`].
#[inline]
pub fn sanitize(v: f64) -> f64 {
    if v.is_finite() {
        v
    } else {
        PENALTY
    }
}

/// A pure objective over bit strings of a fixed length, to be minimized.
pub trait ObjectiveFunction: Sync {
    /// Genotype length the function is defined on.
    fn bit_len(&self) -> u32;

    /// Must be deterministic and finite.
    fn evaluate(&self, g: BitGenotype) -> f64;
}

impl<T: ObjectiveFunction + ?Sized> ObjectiveFunction for &T {
    fn bit_len(&self) -> u32 {
        (**self).bit_len()
    }

    fn evaluate(&self, g: BitGenotype) -> f64 {
        (**self).evaluate(g)
    }
}

/// Adapts a closure to [`ObjectiveFunction`]; the result is sanitized.
pub struct FnObjective<F> {
    bit_len: u32,
    f: F,
}

impl<F> FnObjective<F>
where
    F: Fn(BitGenotype) -> f64 + Sync,
{
    pub fn new(bit_len: u32, f: F) -> Self {
        Self { bit_len, f }
    }
}

impl<F> ObjectiveFunction for FnObjective<F>
where
    F: Fn(BitGenotype) -> f64 + Sync,
{
    fn bit_len(&self) -> u32 {
        self.bit_len
    }

    #[inline]
    fn evaluate(&self, g: BitGenotype) -> f64 {
        sanitize((self.f)(g))
    }
}
