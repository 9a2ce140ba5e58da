#pragma once

// Matrix form of the linearized fluctuation dynamics, shared by the
// correlation function and the perturbative distinguishability.
//
//   d/dt (a, a^dag) = -M (a, a^dag) + noise,   M = [[w, v], [v*, w*]]
//
// W~ = B x.(a, a^dag) with x = (e^{i phi_B}, e^{-i phi_B}).

#include <Eigen/Dense>

#include "kerrqnd/fluctuations.hpp"

namespace kerrqnd::detail {

using Mat2 = Eigen::Matrix2cd;
using Row2 = Eigen::RowVector2cd;

struct LinearResponse {
    FluctuationSpec spec;
    Mat2 drift;       ///< M
    Mat2 covariance;  ///< stationary symmetrized <X X^dag>
    Row2 readout;     ///< x
    double B2 = 0.0;
};

/// Throws UnstableBranchError when lambda0 lambda1 <= 0.
LinearResponse make_linear_response(const DetectorParams& params, const DriveParams& drive,
                                    const MeanFieldBranch& branch);

/// G(t) and dG/dt for t >= 0, written as e^{-lbar t} t sinhc(delta t).
struct GreensPair {
    double g = 0.0;
    double g_dot = 0.0;
};
GreensPair greens_pair(const FluctuationSpec& spec, double t) noexcept;

/// e^{-M t} = (G' + 2 Re(w) G) I - G M, t >= 0.
Mat2 propagator(const LinearResponse& lr, double t) noexcept;

/// B^2 Re[x A Sigma x^dag]
double readout_form(const LinearResponse& lr, const Mat2& a) noexcept;

}  // namespace kerrqnd::detail
