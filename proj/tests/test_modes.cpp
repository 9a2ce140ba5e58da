#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <string>

#include "kerrqnd/errors.hpp"
#include "kerrqnd/modes.hpp"
#include "support/oracles.hpp"

using namespace kerrqnd;

namespace {

constexpr double kLength = 0.01;
constexpr double kC = 1.6e-10;
constexpr double kL0 = 4.2e-7;
constexpr double kDL = 1e-8;
constexpr double kIc = 1e-3;

LineProfile uniform_line(double dl = kDL, double ic = kIc) {
    return LineProfile::uniform(kLength, kC, kL0, dl, ic);
}

double analytic_omega(int n) {
    return n * std::numbers::pi / (kLength * std::sqrt(kL0 * kC));
}

/// Smooth mirror-symmetric profile about l/2, tabulated finely.
LineProfile symmetric_profile(int rows = 4001) {
    std::vector<double> x, c, l0, dl;
    for (int j = 0; j < rows; ++j) {
        const double s = kLength * j / (rows - 1);
        const double bump = std::sin(std::numbers::pi * s / kLength);
        x.push_back(s);
        c.push_back(kC * (1.0 + 0.4 * bump * bump));
        l0.push_back(kL0 * (1.0 - 0.2 * bump));
        dl.push_back(kDL * (1.0 + bump));
    }
    return LineProfile::from_table(x, c, l0, dl, kIc);
}

double trapezoid(const std::vector<double>& x, const std::vector<double>& y) {
    double s = 0.0;
    for (std::size_t j = 0; j + 1 < x.size(); ++j) {
        s += 0.5 * (x[j + 1] - x[j]) * (y[j] + y[j + 1]);
    }
    return s;
}

}  // namespace

TEST_SUITE("modes") {
    TEST_CASE("uniform line: frequencies and shapes match the analytic solution") {
        const LineProfile prof = uniform_line();
        const ModeSet m = solve_modes(prof, 5, 2000);
        REQUIRE(m.size() == 5);
        REQUIRE(m.grid.size() == 2001);
        CHECK(m.grid.front() == 0.0);
        CHECK(m.grid.back() == doctest::Approx(kLength));
        const double amp = std::sqrt(2.0 / (kL0 * kLength));
        for (int n = 1; n <= 5; ++n) {
            const auto i = static_cast<std::size_t>(n - 1);
            CHECK(oracle::relative(m.omegas[i], analytic_omega(n)) < 1e-3);
            CHECK(m.shapes[i].front() == 0.0);
            CHECK(m.shapes[i].back() == 0.0);
            double worst = 0.0;
            double worst_d = 0.0;
            const double k = n * std::numbers::pi / kLength;
            for (std::size_t j = 0; j < m.grid.size(); ++j) {
                worst = std::max(worst, std::abs(m.shapes[i][j] - amp * std::sin(k * m.grid[j])));
                worst_d = std::max(worst_d, std::abs(m.derivatives[i][j] - amp * k * std::cos(k * m.grid[j])));
            }
            CHECK(worst < 1e-3 * amp);
            CHECK(worst_d < 1e-3 * amp * k);
        }
        for (int i = 1; i < m.size(); ++i) {
            CHECK(m.omegas[static_cast<std::size_t>(i)] > m.omegas[static_cast<std::size_t>(i - 1)]);
        }
    }

    TEST_CASE("second-order convergence of omega_1") {
        const LineProfile prof = uniform_line();
        const double exact = analytic_omega(1);
        const double e1 = std::abs(solve_modes(prof, 1, 250).omegas[0] - exact);
        const double e2 = std::abs(solve_modes(prof, 1, 500).omegas[0] - exact);
        CHECK(e1 / e2 == doctest::Approx(4.0).epsilon(0.05));
    }

    TEST_CASE("refinement invariance once converged") {
        // Second-order discretization error falls below 1e-8 for the lowest modes
        // by n_grid = 20000; beyond ~1e5 the eps * n_grid^2 rounding floor takes over.
        const LineProfile prof = uniform_line();
        const ModeSet a = solve_modes(prof, 2, 20000);
        const ModeSet b = solve_modes(prof, 2, 40000);
        for (std::size_t i = 0; i < 2; ++i) {
            CHECK(oracle::relative(a.omegas[i], b.omegas[i]) < 1e-8);
        }
        CHECK(oracle::relative(coupling_constant(a, prof, 1, 2), coupling_constant(b, prof, 1, 2)) < 1e-8);
        CHECK(oracle::relative(kerr_constant(a, prof, 2), kerr_constant(b, prof, 2)) < 1e-8);
    }

    TEST_CASE("orthonormality under the L0 weight for a smooth nonuniform profile") {
        const LineProfile prof = symmetric_profile();
        const ModeSet m = solve_modes(prof, 5, 2000);
        std::vector<double> l0(m.grid.size());
        for (std::size_t j = 0; j < m.grid.size(); ++j) {
            l0[j] = prof.inductance(m.grid[j]);
        }
        double defect = 0.0;
        for (std::size_t a = 0; a < 5; ++a) {
            for (std::size_t b = 0; b < 5; ++b) {
                std::vector<double> y(m.grid.size());
                for (std::size_t j = 0; j < y.size(); ++j) {
                    y[j] = l0[j] * m.shapes[a][j] * m.shapes[b][j];
                }
                defect = std::max(defect, std::abs(trapezoid(m.grid, y) - (a == b ? 1.0 : 0.0)));
            }
        }
        CHECK(defect < 1e-6);
    }

    TEST_CASE("mirror-symmetric profile: alternating parity, positive start") {
        const LineProfile prof = symmetric_profile();
        const ModeSet m = solve_modes(prof, 5, 2000);
        const std::size_t last = m.grid.size() - 1;
        for (int n = 1; n <= 5; ++n) {
            const auto& u = m.shapes[static_cast<std::size_t>(n - 1)];
            CHECK(u[1] > 0.0);
            const double parity = (n % 2 == 1) ? 1.0 : -1.0;
            double worst = 0.0, scale = 0.0;
            for (std::size_t j = 0; j <= last; ++j) {
                worst = std::max(worst, std::abs(u[last - j] - parity * u[j]));
                scale = std::max(scale, std::abs(u[j]));
            }
            CHECK(worst < 1e-8 * scale);
        }
    }

    TEST_CASE("uniform line: Kerr and coupling closed forms") {
        const LineProfile prof = uniform_line();
        const ModeSet m = solve_modes(prof, 5, 2000);
        const double scale = kHbar * kDL / (kIc * kIc * kL0 * kL0 * kLength);
        for (int n = 1; n <= 5; ++n) {
            const double wn = m.omegas[static_cast<std::size_t>(n - 1)];
            const double kn = kerr_constant(m, prof, n);
            CHECK(oracle::relative(kn, -0.75 * scale * wn * wn) < 5e-3);
            for (int k = 1; k <= 5; ++k) {
                if (k == n) {
                    continue;
                }
                const double wk = m.omegas[static_cast<std::size_t>(k - 1)];
                const double lam = coupling_constant(m, prof, n, k);
                CHECK(oracle::relative(lam, -3.0 * scale * wn * wk) < 5e-3);
                CHECK(oracle::relative(lam / kn, 4.0 * wk / wn) < 1e-2);
                CHECK(lam == coupling_constant(m, prof, k, n));
                CHECK(lam <= 0.0);
            }
        }
    }

    TEST_CASE("zero dL gives zero couplings; linear in dL and 1/Ic^2") {
        const ModeSet m0 = solve_modes(uniform_line(0.0), 3, 2000);
        CHECK(kerr_constant(m0, uniform_line(0.0), 2) == 0.0);
        CHECK(coupling_constant(m0, uniform_line(0.0), 1, 3) == 0.0);

        const LineProfile base = uniform_line();
        const ModeSet m = solve_modes(base, 3, 2000);
        const double k_base = kerr_constant(m, base, 2);
        const double l_base = coupling_constant(m, base, 1, 3);
        const LineProfile scaled_dl = uniform_line(3.0 * kDL);
        CHECK(oracle::relative(kerr_constant(m, scaled_dl, 2), 3.0 * k_base) < 1e-14);
        CHECK(oracle::relative(coupling_constant(m, scaled_dl, 1, 3), 3.0 * l_base) < 1e-14);
        const LineProfile scaled_ic = uniform_line(kDL, 2.0 * kIc);
        CHECK(oracle::relative(kerr_constant(m, scaled_ic, 2), 0.25 * k_base) < 1e-14);
        CHECK(oracle::relative(coupling_constant(m, scaled_ic, 1, 3), 0.25 * l_base) < 1e-14);
    }

    TEST_CASE("range and argument errors") {
        const LineProfile prof = uniform_line();
        const ModeSet m = solve_modes(prof, 3, 2000);
        CHECK_THROWS_AS((void)coupling_constant(m, prof, 2, 2), ParameterError);
        CHECK_THROWS_AS((void)coupling_constant(m, prof, 0, 2), ParameterError);
        CHECK_THROWS_AS((void)kerr_constant(m, prof, 4), ParameterError);
        CHECK_THROWS_AS((void)solve_modes(prof, 0, 2000), ParameterError);
        CHECK_THROWS_AS((void)solve_modes(prof, 5, 79), ParameterError);
    }

    TEST_CASE("invalid profiles are rejected") {
        CHECK_THROWS_AS((void)LineProfile::uniform(kLength, -kC, kL0, kDL, kIc), ParameterError);
        CHECK_THROWS_AS((void)LineProfile::uniform(kLength, kC, 0.0, kDL, kIc), ParameterError);
        CHECK_THROWS_AS((void)LineProfile::uniform(kLength, kC, kL0, -kDL, kIc), ParameterError);
        CHECK_THROWS_AS((void)LineProfile::uniform(kLength, kC, kL0, kDL, 0.0), ParameterError);
        CHECK_THROWS_AS((void)LineProfile::uniform(0.0, kC, kL0, kDL, kIc), ParameterError);
        CHECK_THROWS_AS((void)LineProfile::from_table({0.0, 0.5, 0.4}, {1, 1, 1}, {1, 1, 1}, {0, 0, 0}, 1.0),
                        ParameterError);
        CHECK_THROWS_AS((void)LineProfile::from_table({0.1, 0.5}, {1, 1}, {1, 1}, {0, 0}, 1.0), ParameterError);
        CHECK_THROWS_AS((void)LineProfile::from_table({0.0, 0.5}, {1, 0}, {1, 1}, {0, 0}, 1.0), ParameterError);
    }

    TEST_CASE("profile table round trip") {
        const std::string path = std::string(KERRQND_BINARY_DIR) + "/profile_roundtrip.txt";
        {
            std::ofstream f(path);
            f << "# x C L0 dL\n";
            f << "0 " << kC << ' ' << kL0 << ' ' << kDL << "\n";
            f << "\n";
            f << kLength << ' ' << kC << ' ' << kL0 << ' ' << kDL << "  # end\n";
        }
        const LineProfile table = load_profile_table(path, kIc);
        CHECK(table.length() == doctest::Approx(kLength));
        CHECK(table.capacitance(0.5 * kLength) == doctest::Approx(kC));
        const ModeSet a = solve_modes(table, 2, 2000);
        const ModeSet b = solve_modes(uniform_line(), 2, 2000);
        CHECK(oracle::relative(a.omegas[1], b.omegas[1]) < 1e-12);
        CHECK_THROWS_AS((void)load_profile_table(path + ".missing", kIc), ParameterError);
        {
            std::ofstream f(path);
            f << "0 1 2\n";
        }
        CHECK_THROWS_AS((void)load_profile_table(path, kIc), ParameterError);
        std::remove(path.c_str());
    }
}
