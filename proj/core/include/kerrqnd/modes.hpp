#pragma once

#include <string>
#include <vector>

namespace kerrqnd {

inline constexpr double kHbar = 1.054571817e-34;  // J s

/// Superconducting line with L(x, I) = L0(x) + dL(x) (I / I_c)^2, in SI units.
/// Profiles are tabulated and linearly interpolated.
class LineProfile {
public:
    /// Constant C, L0 and dL along a line of the given length.
    static LineProfile uniform(double length, double capacitance, double inductance, double delta_inductance,
                               double critical_current);

    /// Columns sampled at strictly increasing x starting at 0; the last x is the length.
    static LineProfile from_table(std::vector<double> x, std::vector<double> capacitance,
                                  std::vector<double> inductance, std::vector<double> delta_inductance,
                                  double critical_current);

    [[nodiscard]] double length() const noexcept { return x_.back(); }
    [[nodiscard]] double critical_current() const noexcept { return critical_current_; }

    [[nodiscard]] double capacitance(double x) const noexcept { return interp(c_, x); }
    [[nodiscard]] double inductance(double x) const noexcept { return interp(l0_, x); }
    [[nodiscard]] double delta_inductance(double x) const noexcept { return interp(dl_, x); }

private:
    LineProfile() = default;
    void validate() const;
    [[nodiscard]] double interp(const std::vector<double>& y, double x) const noexcept;

    std::vector<double> x_, c_, l0_, dl_;
    double critical_current_ = 0.0;
};

/// Reads whitespace-separated `x C L0 dL` rows; `#` starts a comment.
[[nodiscard]] LineProfile load_profile_table(const std::string& path, double critical_current);

/// Lowest eigenmodes of (d/dx)((1/C) du/dx) = -omega^2 L0 u, u(0) = u(l) = 0,
/// normalized to int L0 u_n u_m dx = delta_nm.
struct ModeSet {
    std::vector<double> omegas;                    ///< rad/s, ascending
    std::vector<double> grid;                      ///< n_grid + 1 points on [0, l]
    std::vector<std::vector<double>> shapes;       ///< u_n(x_j)
    std::vector<std::vector<double>> derivatives;  ///< du_n/dx at x_j

    [[nodiscard]] int size() const noexcept { return static_cast<int>(omegas.size()); }
};

/// n_grid is the number of uniform intervals; requires n_grid >= 16 n_modes.
[[nodiscard]] ModeSet solve_modes(const LineProfile& profile, int n_modes, int n_grid);

/// lambda_{n'n''} in rad/s. Mode numbers are 1-based (n = 1 is the fundamental).
[[nodiscard]] double coupling_constant(const ModeSet& modes, const LineProfile& profile, int n_prime,
                                       int n_double_prime);

/// K_n in rad/s, 1-based mode number.
[[nodiscard]] double kerr_constant(const ModeSet& modes, const LineProfile& profile, int n);

}  // namespace kerrqnd
