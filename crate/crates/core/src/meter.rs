//! Elementary-operation counting for complexity tests.

/// Receives operation counts from instrumented routines.
pub trait Meter {
    fn tick(&mut self, ops: u64);
}

/// Discards counts.
impl Meter for () {
    #[inline(always)]
    fn tick(&mut self, _ops: u64) {}
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct OpCount(pub u64);

impl Meter for OpCount {
    #[inline(always)]
    fn tick(&mut self, ops: u64) {
        self.0 += ops;
    }
}
