#pragma once

#include <vector>

#include "kerrqnd/detector.hpp"

namespace kerrqnd {

/// One real root of the steady-state amplitude cubic.
struct MeanFieldBranch {
    double B2 = 0.0;       ///< mean photon number B^2
    double phase_B = 0.0;  ///< phi_B, in (-pi, pi]
    double slope = 0.0;    ///< dB^2/d omega_p; +-inf when slope_infinite
    bool slope_infinite = false;
    bool stable = true;    ///< lambda0 * lambda1 > 0
    complex lambda0{};
    complex lambda1{};

    [[nodiscard]] double B() const noexcept;
};

/// Critical (onset of bistability) point of the response.
struct OnsetPoint {
    double B2_c = 0.0;
    double omega_pc = 0.0;
    double b1c_in = 0.0;
};

/// A saddle-node point of the response curve, where a stable branch ends.
struct FoldPoint {
    double omega_p = 0.0;
    double B2 = 0.0;
};

/// All steady states at the given drive, sorted ascending in B^2 (1 to 3 entries).
[[nodiscard]] std::vector<MeanFieldBranch> solve_response(const DetectorParams& params,
                                                          const DriveParams& drive);

/// Builds the full branch record (phase, slope, eigenvalues) for a B^2 that is
/// already known to solve the cubic at this drive.
[[nodiscard]] MeanFieldBranch branch_at(const DetectorParams& params, const DriveParams& drive,
                                        double B2);

/// |cubic(B^2)| / sum of |terms|.
[[nodiscard]] double cubic_residual(const DetectorParams& params, const DriveParams& drive,
                                    double B2);

/// Largest B^2 any drive frequency can reach: B^2 (gamma + gamma3 B^2)^2 = 2 gamma1 b^2.
[[nodiscard]] double max_photon_number(const DetectorParams& params, double b1_in);

/// Closed-form onset point. Throws NoBistabilityError when |K| <= sqrt(3) gamma3.
[[nodiscard]] OnsetPoint onset_of_bistability(const DetectorParams& params);

[[nodiscard]] bool has_bistability(const DetectorParams& params) noexcept;

/// Saddle-node points of the response at drive amplitude b1_in, ascending in
/// omega_p. Empty unless b1_in exceeds the critical drive.
[[nodiscard]] std::vector<FoldPoint> fold_points(const DetectorParams& params, double b1_in);

}  // namespace kerrqnd
