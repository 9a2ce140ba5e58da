#include "kerrqnd/fluctuations.hpp"

#include <cmath>
#include <string>

#include "kerrqnd/errors.hpp"
#include "linear_response.hpp"

namespace kerrqnd {

namespace {

constexpr complex kI{0.0, 1.0};

complex sinhc(complex z) noexcept {
    if (std::abs(z) < 1e-3) {
        const complex z2 = z * z;
        return 1.0 + z2 / 6.0 + z2 * z2 / 120.0;
    }
    return std::sinh(z) / z;
}

/// (lambda0 + lambda1, lambda0 lambda1) straight from (B^2, detuning); never
/// touches the phases.
struct EigenInvariants {
    double sum;
    double product;
};

EigenInvariants eigen_invariants(const DetectorParams& p, double detuning, double B2) noexcept {
    const double p1 = detuning + 2.0 * p.kerr * B2;
    const double p2 = p.gamma() + 2.0 * p.gamma3 * B2;
    return {2.0 * p2, p1 * p1 + p2 * p2 - p.nonlinear_norm2() * B2 * B2};
}

}  // namespace

std::pair<complex, complex> relaxation_eigenvalues(complex w, complex v) noexcept {
    const double re = w.real();
    const double det = std::norm(w) - std::norm(v);
    const double disc = std::norm(v) - w.imag() * w.imag();
    if (disc >= 0.0) {
        const double big = re + std::sqrt(disc);
        const double small = big == 0.0 ? re - std::sqrt(disc) : det / big;
        return small <= big ? std::pair{complex(small), complex(big)} : std::pair{complex(big), complex(small)};
    }
    const double im = std::sqrt(-disc);
    return {complex(re, -im), complex(re, im)};
}

FluctuationSpec compute_wv(const DetectorParams& params, const DriveParams& drive,
                           const MeanFieldBranch& branch) {
    const complex nl(params.gamma3, params.kerr);  // iK + gamma3
    FluctuationSpec s;
    s.w = kI * drive.detuning(params) + params.gamma() + 2.0 * nl * branch.B2;
    s.v = nl * branch.B2 * std::exp(-2.0 * kI * branch.phase_B);
    std::tie(s.lambda0, s.lambda1) = relaxation_eigenvalues(s.w, s.v);
    return s;
}

namespace detail {

GreensPair greens_pair(const FluctuationSpec& spec, double t) noexcept {
    if (t < 0.0) {
        return {};
    }
    const double mean = 0.5 * spec.eigen_sum();
    const complex half_gap = 0.5 * (spec.lambda1 - spec.lambda0);
    const complex z = half_gap * t;
    const double decay = std::exp(-mean * t);
    const complex sc = sinhc(z);
    return {decay * t * sc.real(), decay * (std::cosh(z) - mean * t * sc).real()};
}

LinearResponse make_linear_response(const DetectorParams& params, const DriveParams& drive,
                                    const MeanFieldBranch& branch) {
    LinearResponse lr;
    lr.spec = compute_wv(params, drive, branch);
    lr.B2 = branch.B2;
    const double det = lr.spec.eigen_product();
    if (!(det > 0.0)) {
        throw UnstableBranchError("branch has no steady state (lambda0 lambda1 = " + std::to_string(det) + ")");
    }
    const complex w = lr.spec.w;
    const complex v = lr.spec.v;
    lr.drift << w, v, std::conj(v), std::conj(w);

    // Solution of M S + S M^dag = D with D = Re(w) coth I.
    const double coth = thermal_factor(params.beta_hbar_omega0);
    const double s = coth * std::norm(w) / (2.0 * det);
    const complex r = -v * s / w;
    lr.covariance << s, r, std::conj(r), s;

    const complex e = std::exp(kI * branch.phase_B);
    lr.readout << e, std::conj(e);
    return lr;
}

Mat2 propagator(const LinearResponse& lr, double t) noexcept {
    const GreensPair gp = greens_pair(lr.spec, t);
    return (gp.g_dot + lr.spec.eigen_sum() * gp.g) * Mat2::Identity() - gp.g * lr.drift;
}

double readout_form(const LinearResponse& lr, const Mat2& a) noexcept {
    const complex q = (lr.readout * a * lr.covariance * lr.readout.adjoint())(0, 0);
    return lr.B2 * q.real();
}

}  // namespace detail

GreensValue greens_function(const FluctuationSpec& spec, double t) noexcept {
    GreensValue out;
    out.integrable = spec.eigen_product() >= 0.0;
    if (t < 0.0) {
        return out;
    }
    const complex l0 = spec.lambda0;
    const complex l1 = spec.lambda1;
    if (std::abs(l0 - l1) < 1e-9 * (std::abs(l0) + std::abs(l1))) {
        out.value = t * std::exp(-0.5 * spec.eigen_sum() * t);
        return out;
    }
    out.value = detail::greens_pair(spec, t).g;
    return out;
}

double correlation_K(const DetectorParams& params, const DriveParams& drive, const MeanFieldBranch& branch,
                     double tau) {
    const detail::LinearResponse lr = detail::make_linear_response(params, drive, branch);
    if (branch.B2 == 0.0) {
        return 0.0;
    }
    return detail::readout_form(lr, detail::propagator(lr, std::abs(tau)));
}

double lowest_order_rate(const DetectorParams& params, const DriveParams& drive, double B2,
                         double lambda_coupling) {
    const EigenInvariants inv = eigen_invariants(params, drive.detuning(params), B2);
    const double drive_flux = 2.0 * params.gamma1 * drive.b1_in * drive.b1_in;
    return lambda_coupling * lambda_coupling * inv.sum / (inv.product * inv.product) * drive_flux *
           thermal_factor(params.beta_hbar_omega0);
}

DephasingResult dephasing_rate(const DetectorParams& params, const DriveParams& drive,
                               const MeanFieldBranch& branch, const DetectionConfig& det) {
    params.validate();
    drive.validate();
    if (!std::isfinite(det.lambda_coupling)) {
        throw ParameterError("lambda_coupling must be finite");
    }
    const EigenInvariants inv = eigen_invariants(params, drive.detuning(params), branch.B2);
    const double threshold = kDivergenceThreshold * inv.sum * inv.sum / 4.0;
    if (inv.product < -threshold) {
        throw UnstableBranchError("dephasing rate requested on an unstable branch (lambda0 lambda1 = " +
                                  std::to_string(inv.product) + ")");
    }
    DephasingResult out;
    out.thermal_factor = thermal_factor(params.beta_hbar_omega0);
    out.diverged = inv.product < threshold;
    out.rate = lowest_order_rate(params, drive, branch.B2, det.lambda_coupling);
    out.xi = out.rate / params.gamma();
    return out;
}

double sensitivity(const DetectorParams& params, const DriveParams& drive, const MeanFieldBranch& branch,
                   const DetectionConfig& det) {
    return dephasing_rate(params, drive, branch, det).xi;
}

double thermal_occupation(double beta_hbar_omega) {
    if (std::isnan(beta_hbar_omega) || !(beta_hbar_omega > 0.0)) {
        throw ParameterError("beta hbar omega must be > 0 or infinite");
    }
    if (std::isinf(beta_hbar_omega)) {
        return 0.0;
    }
    return 1.0 / std::expm1(beta_hbar_omega);
}

double thermal_factor(double beta_hbar_omega) {
    if (std::isinf(beta_hbar_omega) && beta_hbar_omega > 0.0) {
        return 1.0;
    }
    return 1.0 + 2.0 * thermal_occupation(beta_hbar_omega);
}

}  // namespace kerrqnd
