/// `w^e` with fast paths for the exponents that dominate simulation time.
///
/// Every power of a window or state value in this crate goes through this
/// function, so the batched simulation loops stay bit-identical to the
/// readable single-step code paths.
#[inline(always)]
pub(crate) fn powx(w: f64, e: f64) -> f64 {
    if e == 0.0 {
        1.0
    } else if e == 1.0 {
        w
    } else if e == 0.5 {
        w.sqrt()
    } else if e == -0.5 {
        w.sqrt().recip()
    } else if e == -1.0 {
        w.recip()
    } else if e == 2.0 {
        w * w
    } else {
        w.powf(e)
    }
}
