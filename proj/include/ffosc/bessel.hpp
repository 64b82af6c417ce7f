#pragma once

namespace ffosc {

/// exp(-|x|) * I0(x). Power series for |x| <= 15, Hankel asymptotic series above;
/// relative accuracy better than 1e-12 everywhere.
[[nodiscard]] double bessel_i0_scaled(double x) noexcept;

/// log I0(x), finite for arguments where I0 itself overflows.
[[nodiscard]] double log_bessel_i0(double x) noexcept;

}  // namespace ffosc
