/// Replay gas limit: `max(glh, ceil(gur * glh / guh))`.
///
/// With `guh == 0` the ratio is undefined and `glh` is returned; use
/// [`compute_glr_checked`] to observe that case.
pub fn compute_glr(glh: u64, guh: u64, gur: u64) -> u64 {
    compute_glr_checked(glh, guh, gur).0
}

/// Like [`compute_glr`], also reporting whether `guh` was zero.
pub fn compute_glr_checked(glh: u64, guh: u64, gur: u64) -> (u64, Option<ZeroGasUsed>) {
    if guh == 0 {
        return (glh, Some(ZeroGasUsed));
    }
    let scaled = (gur as u128 * glh as u128).div_ceil(guh as u128);
    (glh.max(u64::try_from(scaled).unwrap_or(u64::MAX)), None)
}

/// Warning: the historic gas used was zero, so the limit fell back to glh.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ZeroGasUsed;

impl std::fmt::Display for ZeroGasUsed {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str("historic gas used is zero; replay limit falls back to the historic limit")
    }
}
