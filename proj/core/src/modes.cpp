#include "kerrqnd/modes.hpp"

#include <lapacke.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "kerrqnd/errors.hpp"

namespace kerrqnd {

namespace {

std::size_t checked_mode(const ModeSet& modes, int n) {
    if (n < 1 || n > modes.size()) {
        throw ParameterError("mode number " + std::to_string(n) + " outside 1.." + std::to_string(modes.size()));
    }
    return static_cast<std::size_t>(n - 1);
}

double trapezoid(const std::vector<double>& x, const std::vector<double>& f) {
    double s = 0.0;
    for (std::size_t j = 1; j < x.size(); ++j) {
        s += 0.5 * (x[j] - x[j - 1]) * (f[j] + f[j - 1]);
    }
    return s;
}

}  // namespace

LineProfile LineProfile::uniform(double length, double capacitance, double inductance, double delta_inductance,
                                 double critical_current) {
    return from_table({0.0, length}, {capacitance, capacitance}, {inductance, inductance},
                      {delta_inductance, delta_inductance}, critical_current);
}

LineProfile LineProfile::from_table(std::vector<double> x, std::vector<double> capacitance,
                                    std::vector<double> inductance, std::vector<double> delta_inductance,
                                    double critical_current) {
    LineProfile p;
    p.x_ = std::move(x);
    p.c_ = std::move(capacitance);
    p.l0_ = std::move(inductance);
    p.dl_ = std::move(delta_inductance);
    p.critical_current_ = critical_current;
    p.validate();
    return p;
}

void LineProfile::validate() const {
    const std::size_t n = x_.size();
    if (n < 2 || c_.size() != n || l0_.size() != n || dl_.size() != n) {
        throw ParameterError("line profile needs at least 2 rows with matching columns");
    }
    if (x_.front() != 0.0) {
        throw ParameterError("line profile must start at x = 0");
    }
    for (std::size_t j = 0; j < n; ++j) {
        if (j > 0 && !(x_[j] > x_[j - 1])) {
            throw ParameterError("line profile x must be strictly increasing");
        }
        if (!(c_[j] > 0.0) || !std::isfinite(c_[j])) {
            throw ParameterError("capacitance must be positive at x = " + std::to_string(x_[j]));
        }
        if (!(l0_[j] > 0.0) || !std::isfinite(l0_[j])) {
            throw ParameterError("inductance L0 must be positive at x = " + std::to_string(x_[j]));
        }
        if (!(dl_[j] >= 0.0) || !std::isfinite(dl_[j])) {
            throw ParameterError("dL must be >= 0 at x = " + std::to_string(x_[j]));
        }
    }
    if (!(critical_current_ > 0.0) || !std::isfinite(critical_current_)) {
        throw ParameterError("critical current must be positive");
    }
}

double LineProfile::interp(const std::vector<double>& y, double x) const noexcept {
    if (x <= x_.front()) {
        return y.front();
    }
    if (x >= x_.back()) {
        return y.back();
    }
    const auto it = std::upper_bound(x_.begin(), x_.end(), x);
    const std::size_t j = static_cast<std::size_t>(it - x_.begin());
    const double t = (x - x_[j - 1]) / (x_[j] - x_[j - 1]);
    return y[j - 1] + t * (y[j] - y[j - 1]);
}

LineProfile load_profile_table(const std::string& path, double critical_current) {
    std::ifstream in(path);
    if (!in) {
        throw ParameterError("cannot open profile table " + path);
    }
    std::vector<double> x, c, l0, dl;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos) {
            line.erase(hash);
        }
        std::istringstream row(line);
        double v[4];
        if (!(row >> v[0])) {
            continue;
        }
        if (!(row >> v[1] >> v[2] >> v[3])) {
            throw ParameterError(path + ":" + std::to_string(lineno) + ": expected 4 columns (x C L0 dL)");
        }
        x.push_back(v[0]);
        c.push_back(v[1]);
        l0.push_back(v[2]);
        dl.push_back(v[3]);
    }
    return LineProfile::from_table(std::move(x), std::move(c), std::move(l0), std::move(dl), critical_current);
}

ModeSet solve_modes(const LineProfile& profile, int n_modes, int n_grid) {
    if (n_modes < 1) {
        throw ParameterError("n_modes must be >= 1");
    }
    if (n_grid < 16 * n_modes) {
        throw ParameterError("n_grid must be >= 16 n_modes");
    }
    const double l = profile.length();
    const double h = l / n_grid;
    const auto n_int = static_cast<std::size_t>(n_grid - 1);

    ModeSet out;
    out.grid.resize(static_cast<std::size_t>(n_grid) + 1);
    for (int j = 0; j <= n_grid; ++j) {
        out.grid[static_cast<std::size_t>(j)] = (j == n_grid) ? l : h * j;
    }

    // Stiffness coefficient 1/C at the interval midpoints, mass L0 at nodes.
    std::vector<double> k(static_cast<std::size_t>(n_grid));
    for (std::size_t m = 0; m < k.size(); ++m) {
        k[m] = 1.0 / profile.capacitance((static_cast<double>(m) + 0.5) * h);
    }
    std::vector<double> root_mass(n_int);
    for (std::size_t i = 0; i < n_int; ++i) {
        root_mass[i] = std::sqrt(profile.inductance(out.grid[i + 1]));
    }
    const double h2 = h * h;
    std::vector<double> d(n_int), e(n_int > 1 ? n_int - 1 : 1, 0.0);
    for (std::size_t i = 0; i < n_int; ++i) {
        d[i] = (k[i] + k[i + 1]) / h2 / (root_mass[i] * root_mass[i]);
        if (i + 1 < n_int) {
            e[i] = -k[i + 1] / h2 / (root_mass[i] * root_mass[i + 1]);
        }
    }

    const auto n = static_cast<lapack_int>(n_int);
    const auto m_req = static_cast<lapack_int>(n_modes);
    if (m_req > n) {
        throw ParameterError("more modes requested than interior grid points");
    }
    lapack_int m_found = 0;
    std::vector<double> eig(n_int);
    std::vector<double> z(n_int * static_cast<std::size_t>(n_modes));
    std::vector<lapack_int> isuppz(2 * static_cast<std::size_t>(n_modes));
    const lapack_int info = LAPACKE_dstevr(LAPACK_COL_MAJOR, 'V', 'I', n, d.data(), e.data(), 0.0, 0.0, 1, m_req,
                                           LAPACKE_dlamch('S'), &m_found, eig.data(), z.data(), n, isuppz.data());
    if (info != 0 || m_found != m_req) {
        throw NumericError("tridiagonal eigensolver failed (info = " + std::to_string(info) + ", found " +
                           std::to_string(m_found) + " of " + std::to_string(m_req) + " modes, n = " +
                           std::to_string(n) + ")");
    }

    const std::size_t np = out.grid.size();
    for (std::size_t mode = 0; mode < static_cast<std::size_t>(n_modes); ++mode) {
        if (!(eig[mode] > 0.0)) {
            throw NumericError("nonpositive eigenvalue " + std::to_string(eig[mode]) + " for mode " +
                               std::to_string(mode + 1));
        }
        out.omegas.push_back(std::sqrt(eig[mode]));

        const double* y = z.data() + mode * n_int;
        std::vector<double> u(np, 0.0);
        for (std::size_t i = 0; i < n_int; ++i) {
            u[i + 1] = y[i] / root_mass[i];
        }
        std::vector<double> weight(np);
        for (std::size_t j = 0; j < np; ++j) {
            weight[j] = profile.inductance(out.grid[j]) * u[j] * u[j];
        }
        double scale = 1.0 / std::sqrt(trapezoid(out.grid, weight));
        const auto first = std::find_if(u.begin() + 1, u.end(), [](double v) { return v != 0.0; });
        if (first != u.end() && *first < 0.0) {
            scale = -scale;
        }
        for (double& v : u) {
            v *= scale;
        }

        std::vector<double> du(np);
        du[0] = (-3.0 * u[0] + 4.0 * u[1] - u[2]) / (2.0 * h);
        du[np - 1] = (3.0 * u[np - 1] - 4.0 * u[np - 2] + u[np - 3]) / (2.0 * h);
        for (std::size_t j = 1; j + 1 < np; ++j) {
            du[j] = (u[j + 1] - u[j - 1]) / (2.0 * h);
        }
        out.shapes.push_back(std::move(u));
        out.derivatives.push_back(std::move(du));
    }
    return out;
}

double coupling_constant(const ModeSet& modes, const LineProfile& profile, int n_prime, int n_double_prime) {
    if (n_prime == n_double_prime) {
        throw ParameterError("coupling_constant needs two distinct modes; use kerr_constant for n' = n''");
    }
    const std::size_t a = checked_mode(modes, n_prime);
    const std::size_t b = checked_mode(modes, n_double_prime);
    const auto& ua = modes.shapes[a];
    const auto& ub = modes.shapes[b];
    std::vector<double> f(modes.grid.size());
    for (std::size_t j = 0; j < f.size(); ++j) {
        f[j] = profile.delta_inductance(modes.grid[j]) * ((ua[j] * ua[j]) * (ub[j] * ub[j]));
    }
    const double ic = profile.critical_current();
    return -3.0 / (ic * ic) * kHbar * (modes.omegas[a] * modes.omegas[b]) * trapezoid(modes.grid, f);
}

double kerr_constant(const ModeSet& modes, const LineProfile& profile, int n) {
    const std::size_t a = checked_mode(modes, n);
    const auto& u = modes.shapes[a];
    std::vector<double> f(modes.grid.size());
    for (std::size_t j = 0; j < f.size(); ++j) {
        const double u2 = u[j] * u[j];
        f[j] = profile.delta_inductance(modes.grid[j]) * (u2 * u2);
    }
    const double ic = profile.critical_current();
    const double w = modes.omegas[a];
    return -kHbar * w * w / (2.0 * ic * ic) * trapezoid(modes.grid, f);
}

}  // namespace kerrqnd
