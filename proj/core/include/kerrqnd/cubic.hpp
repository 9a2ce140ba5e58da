#pragma once

#include <array>
#include <cstddef>

namespace kerrqnd {

/// Real roots of a cubic, ascending. Coincident roots are reported once.
struct RealRoots {
    std::array<double, 3> values{};
    std::size_t count = 0;

    [[nodiscard]] const double* begin() const noexcept { return values.data(); }
    [[nodiscard]] const double* end() const noexcept { return values.data() + count; }
};

/// Real roots of x^3 + a x^2 + b x + c = 0 via the depressed cubic: the
/// trigonometric form when three real roots exist, Cardano otherwise. A
/// near-zero discriminant also yields the (double) root of the degenerate pair;
/// callers are expected to polish and filter by residual.
[[nodiscard]] RealRoots solve_monic_cubic(double a, double b, double c) noexcept;

}  // namespace kerrqnd
