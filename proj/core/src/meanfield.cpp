#include "kerrqnd/meanfield.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "kerrqnd/cubic.hpp"
#include "kerrqnd/errors.hpp"
#include "kerrqnd/fluctuations.hpp"

namespace kerrqnd {

namespace {

constexpr double kResidualTolerance = 1e-10;
constexpr double kCoincidentRoot = 1e-9;

/// Coefficients of f(E) = c3 E^3 + c2 E^2 + c1 E + c0, E = B^2.
struct AmplitudeCubic {
    double c3, c2, c1, c0;

    AmplitudeCubic(const DetectorParams& p, double detuning, double b1_in)
        : c3(p.nonlinear_norm2()),
          c2(2.0 * (detuning * p.kerr + p.gamma() * p.gamma3)),
          c1(detuning * detuning + p.gamma() * p.gamma()),
          c0(-2.0 * p.gamma1 * b1_in * b1_in) {}

    [[nodiscard]] double value(double e) const noexcept { return ((c3 * e + c2) * e + c1) * e + c0; }
    [[nodiscard]] double derivative(double e) const noexcept { return (3.0 * c3 * e + 2.0 * c2) * e + c1; }
    [[nodiscard]] double scale(double e) const noexcept {
        return std::abs(c3 * e * e * e) + std::abs(c2 * e * e) + std::abs(c1 * e) + std::abs(c0);
    }
    [[nodiscard]] double relative_residual(double e) const noexcept {
        const double s = scale(e);
        return s == 0.0 ? 0.0 : std::abs(value(e)) / s;
    }
};

double wrap_phase(double phi) noexcept {
    phi = std::remainder(phi, 2.0 * std::numbers::pi);
    return phi <= -std::numbers::pi ? phi + 2.0 * std::numbers::pi : phi;
}

double polish(const AmplitudeCubic& f, double e) noexcept {
    for (int it = 0; it < 3; ++it) {
        const double d = f.derivative(e);
        if (d == 0.0) {
            break;
        }
        const double next = e - f.value(e) / d;
        if (!(std::abs(f.value(next)) < std::abs(f.value(e))) || next < 0.0) {
            break;
        }
        e = next;
    }
    return e;
}

std::vector<double> amplitude_roots(const DetectorParams& p, const DriveParams& drive) {
    const double detuning = drive.detuning(p);
    const double b = drive.b1_in;
    if (b == 0.0) {
        return {0.0};
    }
    if (p.is_linear()) {
        return {2.0 * p.gamma1 * b * b / (detuning * detuning + p.gamma() * p.gamma())};
    }

    const AmplitudeCubic f(p, detuning, b);
    // Every real root lies in (0, E_max]. Solve for y = E_max / E, whose monic
    // form stays well scaled even when K^2 + gamma3^2 is tiny.
    const double e_max = max_photon_number(p, b);
    const double k3 = f.c3 * e_max * e_max * e_max;
    const double k2 = f.c2 * e_max * e_max;
    const double k1 = f.c1 * e_max;
    const double k0 = f.c0;
    const RealRoots ys = solve_monic_cubic(k1 / k0, k2 / k0, k3 / k0);

    std::vector<double> roots;
    for (double y : ys) {
        if (!(y > 0.0)) {
            continue;
        }
        const double e = polish(f, e_max / y);
        if (e > 0.0 && f.relative_residual(e) < kResidualTolerance) {
            roots.push_back(e);
        }
    }
    std::sort(roots.begin(), roots.end());
    auto same = [](double a, double c) { return std::abs(a - c) <= kCoincidentRoot * std::max(a, c); };
    roots.erase(std::unique(roots.begin(), roots.end(), same), roots.end());

    if (roots.empty()) {
        throw NumericError("amplitude cubic: no root passed the residual check (omega_p = " +
                           std::to_string(drive.omega_p) + ")");
    }
    return roots;
}

double sign_of(double x) noexcept { return x < 0.0 ? -1.0 : 1.0; }

}  // namespace

double MeanFieldBranch::B() const noexcept { return std::sqrt(B2); }

double cubic_residual(const DetectorParams& params, const DriveParams& drive, double B2) {
    return AmplitudeCubic(params, drive.detuning(params), drive.b1_in).relative_residual(B2);
}

double max_photon_number(const DetectorParams& params, double b1_in) {
    const double g = params.gamma();
    const double target = 2.0 * params.gamma1 * b1_in * b1_in;
    double e = target / (g * g);
    if (params.gamma3 == 0.0 || e == 0.0) {
        return e;
    }
    // h(E) = E (g + g3 E)^2 - target is convex and increasing; Newton from
    // above converges monotonically.
    const double g3 = params.gamma3;
    for (int it = 0; it < 200; ++it) {
        const double s = g + g3 * e;
        const double h = e * s * s - target;
        const double dh = s * s + 2.0 * g3 * e * s;
        const double next = e - h / dh;
        if (!(next < e)) {
            break;
        }
        e = next;
    }
    return e;
}

MeanFieldBranch branch_at(const DetectorParams& params, const DriveParams& drive, double B2) {
    const double detuning = drive.detuning(params);
    const double k = params.kerr;
    const double g = params.gamma();
    const double g3 = params.gamma3;

    MeanFieldBranch br;
    br.B2 = B2;
    // mfs: [(gamma + g3 E) + i(detuning + K E)] B = -i sqrt(2 gamma1) b e^{i theta},
    // theta = phi1 + phi_B - psi1, so theta = arg(i z).
    const double theta = std::atan2(g + g3 * B2, -(detuning + k * B2));
    br.phase_B = wrap_phase(theta - params.phi1 + drive.psi1);

    const double numerator = 2.0 * (detuning + k * B2) * B2;
    const double p1 = detuning + 2.0 * k * B2;
    const double p2 = g + 2.0 * g3 * B2;
    const double pos = p1 * p1 + p2 * p2;
    const double denominator = pos - params.nonlinear_norm2() * B2 * B2;
    if (std::abs(denominator) <= 4.0 * std::numeric_limits<double>::epsilon() * pos) {
        br.slope_infinite = true;
        br.slope = std::copysign(std::numeric_limits<double>::infinity(), numerator);
    } else {
        br.slope = numerator / denominator;
    }

    const FluctuationSpec spec = compute_wv(params, drive, br);
    br.lambda0 = spec.lambda0;
    br.lambda1 = spec.lambda1;
    br.stable = spec.eigen_product() > 0.0;
    return br;
}

std::vector<MeanFieldBranch> solve_response(const DetectorParams& params, const DriveParams& drive) {
    params.validate();
    drive.validate();
    std::vector<MeanFieldBranch> out;
    for (double e : amplitude_roots(params, drive)) {
        out.push_back(branch_at(params, drive, e));
    }
    return out;
}

bool has_bistability(const DetectorParams& params) noexcept {
    return std::abs(params.kerr) > std::sqrt(3.0) * params.gamma3;
}

OnsetPoint onset_of_bistability(const DetectorParams& params) {
    params.validate();
    if (!has_bistability(params)) {
        throw NoBistabilityError("no onset of bistability: |K| <= sqrt(3) gamma3");
    }
    const double s3 = std::sqrt(3.0);
    const double g = params.gamma();
    const double g3 = params.gamma3;
    const double k = params.kerr;
    const double ak = std::abs(k);
    const double norm2 = params.nonlinear_norm2();
    const double gap = ak - s3 * g3;

    OnsetPoint op;
    op.B2_c = 2.0 * g / (s3 * gap);
    const double detuning_c = -g * sign_of(k) * (4.0 * g3 * ak + s3 * norm2) / (k * k - 3.0 * g3 * g3);
    op.omega_pc = params.omega0 - detuning_c;
    op.b1c_in = std::sqrt(4.0 / (3.0 * s3) * g * g * g * norm2 / (params.gamma1 * gap * gap * gap));
    return op;
}

std::vector<FoldPoint> fold_points(const DetectorParams& params, double b1_in) {
    params.validate();
    if (!has_bistability(params) || b1_in <= 0.0) {
        return {};
    }
    const OnsetPoint onset = onset_of_bistability(params);
    if (b1_in <= onset.b1c_in * (1.0 + 1e-9)) {
        return {};
    }

    const double k = params.kerr;
    const double g = params.gamma();
    const double g3 = params.gamma3;
    const double drive2 = params.gamma1 * b1_in * b1_in;  // gamma1 b^2
    const double norm2 = params.nonlinear_norm2();
    const double e_max = max_photon_number(params, b1_in);
    // Folds sit on the half of the curve where sign(detuning + K E) = -sign(K).
    const double s_fold = -sign_of(k);

    // Eliminating the detuning between the cubic and lambda0 lambda1 = 0 gives
    // P(E) = 0, negative exactly on the unstable segment.
    auto P = [&](double e) {
        const double lhs = drive2 + g * g3 * e * e + g3 * g3 * e * e * e;
        const double s = g + g3 * e;
        return lhs * lhs - k * k * e * e * e * (2.0 * drive2 - e * s * s);
    };
    auto detuning_on_curve = [&](double e) {
        const double s = g + g3 * e;
        const double gsq = 2.0 * drive2 / e - s * s;
        return -k * e + s_fold * std::sqrt(std::max(gsq, 0.0));
    };
    auto eigen_product = [&](double e) {
        const double d = detuning_on_curve(e);
        const double p1 = d + 2.0 * k * e;
        const double p2 = g + 2.0 * g3 * e;
        return p1 * p1 + p2 * p2 - norm2 * e * e;
    };

    constexpr int n_scan = 4000;
    const double log_lo = std::log(e_max * 1e-10);
    const double log_hi = std::log(e_max);
    std::vector<double> es(n_scan), ps(n_scan);
    for (int i = 0; i < n_scan; ++i) {
        es[i] = (i == n_scan - 1) ? e_max : std::exp(log_lo + (log_hi - log_lo) * i / (n_scan - 1));
        ps[i] = P(es[i]);
    }

    std::vector<std::pair<double, double>> brackets;
    for (int i = 0; i + 1 < n_scan; ++i) {
        if ((ps[i] < 0.0) != (ps[i + 1] < 0.0)) {
            brackets.emplace_back(es[i], es[i + 1]);
        }
    }
    if (brackets.empty()) {
        // Narrow unstable segment just above critical drive: refine the minimum.
        const auto it = std::min_element(ps.begin(), ps.end());
        const auto i = static_cast<int>(it - ps.begin());
        double a = std::log(es[std::max(i - 1, 0)]);
        double c = std::log(es[std::min(i + 1, n_scan - 1)]);
        const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
        for (int it2 = 0; it2 < 200 && c - a > 1e-15; ++it2) {
            const double x1 = c - invphi * (c - a);
            const double x2 = a + invphi * (c - a);
            if (P(std::exp(x1)) < P(std::exp(x2))) {
                c = x2;
            } else {
                a = x1;
            }
        }
        const double e_min = std::exp(0.5 * (a + c));
        if (P(e_min) < 0.0) {
            brackets.emplace_back(es[std::max(i - 1, 0)], e_min);
            brackets.emplace_back(e_min, es[std::min(i + 1, n_scan - 1)]);
        }
    }

    std::vector<FoldPoint> folds;
    for (auto [lo, hi] : brackets) {
        // Bisection on the sign change of lambda0 lambda1 along the folding branch;
        // P decides when the branch product is degenerate at an end point.
        const bool use_product = (eigen_product(lo) < 0.0) != (eigen_product(hi) < 0.0);
        auto f = [&](double e) { return use_product ? eigen_product(e) : P(e); };
        const bool lo_negative = f(lo) < 0.0;
        for (int it = 0; it < 200; ++it) {
            const double mid = 0.5 * (lo + hi);
            if (mid <= lo || mid >= hi) {
                break;
            }
            if ((f(mid) < 0.0) == lo_negative) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        const double e = 0.5 * (lo + hi);
        folds.push_back({params.omega0 - detuning_on_curve(e), e});
    }
    std::sort(folds.begin(), folds.end(),
              [](const FoldPoint& a, const FoldPoint& b) { return a.omega_p < b.omega_p; });
    return folds;
}

}  // namespace kerrqnd
