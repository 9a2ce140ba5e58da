#include "kerrqnd/cubic.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace kerrqnd {

RealRoots solve_monic_cubic(double a, double b, double c) noexcept {
    RealRoots out;
    const double shift = a / 3.0;
    const double q = (a * a - 3.0 * b) / 9.0;
    const double r = (a * (2.0 * a * a - 9.0 * b) + 27.0 * c) / 54.0;
    const double r2 = r * r;
    const double q3 = q * q * q;

    if (r2 < q3) {
        const double sq = std::sqrt(q);
        const double t = std::acos(std::clamp(r / (sq * sq * sq), -1.0, 1.0));
        constexpr double two_pi = 2.0 * std::numbers::pi;
        out.values = {-2.0 * sq * std::cos(t / 3.0) - shift,
                      -2.0 * sq * std::cos((t + two_pi) / 3.0) - shift,
                      -2.0 * sq * std::cos((t - two_pi) / 3.0) - shift};
        out.count = 3;
    } else {
        const double big = -std::copysign(std::cbrt(std::abs(r) + std::sqrt(r2 - q3)), r);
        const double small = (big == 0.0) ? 0.0 : q / big;
        out.values[0] = big + small - shift;
        out.count = 1;
        // Discriminant zero up to rounding: keep the coalescing pair as well.
        if (r2 - q3 <= 1e-12 * std::max(r2, std::abs(q3))) {
            out.values[1] = -0.5 * (big + small) - shift;
            out.count = 2;
        }
    }
    std::sort(out.values.begin(), out.values.begin() + static_cast<long>(out.count));
    return out;
}

}  // namespace kerrqnd
