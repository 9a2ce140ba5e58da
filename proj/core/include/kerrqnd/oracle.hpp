#pragma once

#include <cstdint>
#include <vector>

#include "kerrqnd/detector.hpp"
#include "kerrqnd/fluctuations.hpp"
#include "kerrqnd/meanfield.hpp"

namespace kerrqnd {

// ---- stochastic (semiclassical Langevin) oracle -----------------------------

/// Times are in units of 1/omega0.
struct SdeConfig {
    double dt = 0.0;
    int n_traj = 0;
    double t_relax = 0.0;
    double t_sample = 0.0;
    std::uint64_t seed = 0;
    int blocks_per_traj = 4;   ///< windows of t_sample / blocks used for int K dtau
    int n_batches = 20;        ///< trajectory batches for standard errors
    int n_threads = 0;         ///< 0: hardware concurrency
    double lambda_coupling = 0.0;
    std::vector<double> lags;  ///< tau values for K(tau) estimates
};

struct SdeEstimate {
    double B2_mean = 0.0;  ///< <A^dag A> = <|alpha|^2> - 1/2 (symmetric ordering)
    double B2_stderr = 0.0;
    complex alpha_mean{};
    double integrated_K = 0.0;  ///< int K(tau) dtau over all tau
    double integrated_K_stderr = 0.0;
    double rate_estimate = 0.0;  ///< lambda^2 int K
    double rate_stderr = 0.0;
    std::vector<double> lags;
    std::vector<double> K_tau_estimate;
    std::vector<double> K_tau_stderr;
};

/// Vacuum offset of <|alpha|^2> under symmetric ordering.
inline constexpr double kSymmetricOrderingBaseline = 0.5;

/// Ensemble integration of
///   d alpha = [-(i Delta + gamma) alpha - (iK + gamma3)|alpha|^2 alpha - i eps] dt + noise
/// starting from alpha = 0. The linear part is propagated exactly over each
/// step; the Kerr, two-photon and drive terms are Euler-Maruyama (Ito).
/// Deterministic for a given seed regardless of thread count.
[[nodiscard]] SdeEstimate sde_simulate(const DetectorParams& params, const DriveParams& drive,
                                       const SdeConfig& cfg);

// ---- truncated Fock-space oracle --------------------------------------------

struct FockConfig {
    int n_max = 0;  ///< 0: max(20, ceil(4 B^2 + 10))
    double lambda_coupling = 0.0;
    int signal_photons = 1;  ///< n_s of the ket branch; the bra branch has n_s = 0
    double t_final = 0.0;    ///< 0: 200 / gamma
    double dt = 0.0;         ///< 0: chosen from the generator norm
    int n_samples = 400;
};

struct FockResult {
    std::vector<double> times;
    std::vector<double> nu;  ///< |Tr rho_01(t)|^2
    double fitted_rate = 0.0;
    int fit_points = 0;
    int n_max = 0;
    double max_edge_population = 0.0;
};

/// Evolves the cross coherence between the n_s = 0 and n_s = signal_photons
/// detector states. Linear detector only.
[[nodiscard]] FockResult fock_simulate(const DetectorParams& params, const DriveParams& drive,
                                       const FockConfig& cfg);

// ---- second-order distinguishability ----------------------------------------

struct NuValue {
    double nu = 1.0;
    bool valid = true;  ///< false once 1 - nu exceeds 1
};

/// nu(t) = 1 - lambda^2 int_0^t int_0^t K(t' - t'') dt' dt''.
[[nodiscard]] NuValue nu_perturbative(const DetectorParams& params, const DriveParams& drive,
                                      const MeanFieldBranch& branch, const DetectionConfig& det, double t);

/// d(1 - nu)/dt = 2 lambda^2 int_0^t K(s) ds; tends to the dephasing rate.
[[nodiscard]] double nu_decay_slope(const DetectorParams& params, const DriveParams& drive,
                                    const MeanFieldBranch& branch, const DetectionConfig& det, double t);

}  // namespace kerrqnd
