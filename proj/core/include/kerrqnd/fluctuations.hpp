#pragma once

#include <utility>

#include "kerrqnd/detector.hpp"
#include "kerrqnd/meanfield.hpp"

namespace kerrqnd {

/// Linearized fluctuation dynamics about a mean-field branch:
/// a'' + 2 Re(w) a' + (|w|^2 - |v|^2) a = Gamma(t).
struct FluctuationSpec {
    complex w{};
    complex v{};
    complex lambda0{};  ///< smaller real part (ties: smaller imaginary part)
    complex lambda1{};

    /// lambda0 + lambda1 = 2 Re(w)
    [[nodiscard]] double eigen_sum() const noexcept { return 2.0 * w.real(); }
    /// lambda0 * lambda1 = |w|^2 - |v|^2
    [[nodiscard]] double eigen_product() const noexcept { return std::norm(w) - std::norm(v); }
};

/// Signal-detector coupling V = hbar lambda N_s W.
struct DetectionConfig {
    double lambda_coupling = 0.0;  ///< units of omega0
    double omega_s = 0.0;          ///< informational only
};

struct DephasingResult {
    double rate = 0.0;            ///< 1/tau_phi, units of omega0
    double xi = 0.0;              ///< rate / gamma
    double thermal_factor = 1.0;  ///< coth(beta hbar omega0 / 2)
    bool diverged = false;        ///< lambda0 lambda1 below the breakdown threshold
};

struct GreensValue {
    double value = 0.0;
    bool integrable = true;  ///< false when lambda0 lambda1 < 0
};

/// Relative threshold on lambda0 lambda1 / ((lambda0 + lambda1)/2)^2 below
/// which the lowest-order rate is flagged as diverged.
inline constexpr double kDivergenceThreshold = 1e-6;

/// Roots of lambda^2 - 2 Re(w) lambda + (|w|^2 - |v|^2) = 0, ordered by
/// ascending real part.
[[nodiscard]] std::pair<complex, complex> relaxation_eigenvalues(complex w, complex v) noexcept;

[[nodiscard]] FluctuationSpec compute_wv(const DetectorParams& params, const DriveParams& drive,
                                         const MeanFieldBranch& branch);

/// Causal Green's function (e^{-lambda0 t} - e^{-lambda1 t}) / (lambda1 - lambda0).
[[nodiscard]] GreensValue greens_function(const FluctuationSpec& spec, double t) noexcept;

/// Steady-state symmetrized correlation of W~ = B (a e^{i phi_B} + a^dag e^{-i phi_B}).
/// Throws UnstableBranchError when the branch has no steady state.
[[nodiscard]] double correlation_K(const DetectorParams& params, const DriveParams& drive,
                                   const MeanFieldBranch& branch, double tau);

[[nodiscard]] DephasingResult dephasing_rate(const DetectorParams& params, const DriveParams& drive,
                                             const MeanFieldBranch& branch,
                                             const DetectionConfig& det);

/// The lowest-order rate lambda^2 (lambda0+lambda1)/(lambda0 lambda1)^2 2 gamma1 b^2 coth,
/// evaluated at B^2 without any stability check. Negative or huge on unstable
/// and marginal branches.
[[nodiscard]] double lowest_order_rate(const DetectorParams& params, const DriveParams& drive,
                                       double B2, double lambda_coupling);

/// xi = 1 / (gamma tau_phi)
[[nodiscard]] double sensitivity(const DetectorParams& params, const DriveParams& drive,
                                 const MeanFieldBranch& branch, const DetectionConfig& det);

/// Bose occupation 1 / (e^{beta hbar omega} - 1); zero for infinite beta.
[[nodiscard]] double thermal_occupation(double beta_hbar_omega);

/// coth(beta hbar omega / 2) = 2 n + 1; exactly 1 for infinite beta.
[[nodiscard]] double thermal_factor(double beta_hbar_omega);

}  // namespace kerrqnd
