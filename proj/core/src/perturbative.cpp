#include <cmath>

#include "kerrqnd/errors.hpp"
#include "kerrqnd/oracle.hpp"
#include "linear_response.hpp"

namespace kerrqnd {

namespace {

using detail::Mat2;

/// t M^-1 - M^-2 (I - e^{-Mt}) = sum_{k>=2} (-1)^k M^{k-2} t^k / k!
Mat2 double_integral_kernel(const detail::LinearResponse& lr, double t) {
    const Mat2& m = lr.drift;
    const double norm_t = m.cwiseAbs().rowwise().sum().maxCoeff() * t;
    if (norm_t < 0.5) {
        Mat2 term = Mat2::Identity() * (t * t / 2.0);
        Mat2 sum = term;
        for (int k = 3; k < 40; ++k) {
            term = (-t / k) * (m * term);
            sum += term;
            if (term.cwiseAbs().maxCoeff() <= 1e-18 * sum.cwiseAbs().maxCoeff()) {
                break;
            }
        }
        return sum;
    }
    const Mat2 inv = m.inverse();
    return t * inv - inv * inv * (Mat2::Identity() - detail::propagator(lr, t));
}

}  // namespace

NuValue nu_perturbative(const DetectorParams& params, const DriveParams& drive, const MeanFieldBranch& branch,
                        const DetectionConfig& det, double t) {
    if (t < 0.0) {
        throw ParameterError("nu_perturbative needs t >= 0");
    }
    const detail::LinearResponse lr = detail::make_linear_response(params, drive, branch);
    const double lam2 = det.lambda_coupling * det.lambda_coupling;
    NuValue out;
    if (t == 0.0 || lam2 == 0.0 || branch.B2 == 0.0) {
        return out;
    }
    out.nu = 1.0 - 2.0 * lam2 * detail::readout_form(lr, double_integral_kernel(lr, t));
    out.valid = out.nu >= 0.0;
    return out;
}

double nu_decay_slope(const DetectorParams& params, const DriveParams& drive, const MeanFieldBranch& branch,
                      const DetectionConfig& det, double t) {
    if (t < 0.0) {
        throw ParameterError("nu_decay_slope needs t >= 0");
    }
    const detail::LinearResponse lr = detail::make_linear_response(params, drive, branch);
    const Mat2 kernel = lr.drift.inverse() * (Mat2::Identity() - detail::propagator(lr, t));
    return 2.0 * det.lambda_coupling * det.lambda_coupling * detail::readout_form(lr, kernel);
}

}  // namespace kerrqnd
