#pragma once

#include <complex>
#include <limits>

namespace kerrqnd {

using complex = std::complex<double>;

inline constexpr double kInfiniteBeta = std::numeric_limits<double>::infinity();

/// Physics of the driven detector mode. All rates and frequencies are in units
/// of omega0 (omega0 = 1 by convention).
struct DetectorParams {
    double omega0 = 1.0;
    double kerr = 0.0;    ///< K, signed
    double gamma1 = 0.0;  ///< coupling to the drive port
    double gamma2 = 0.0;  ///< other linear loss
    double gamma3 = 0.0;  ///< two-photon (nonlinear) damping
    double phi1 = 0.0;
    double phi2 = 0.0;
    double phi3 = 0.0;
    double beta_hbar_omega0 = kInfiniteBeta;  ///< infinity means T = 0

    [[nodiscard]] double gamma() const noexcept { return gamma1 + gamma2; }
    /// K^2 + gamma3^2, the leading coefficient of the amplitude cubic.
    [[nodiscard]] double nonlinear_norm2() const noexcept { return kerr * kerr + gamma3 * gamma3; }
    [[nodiscard]] bool is_linear() const noexcept { return kerr == 0.0 && gamma3 == 0.0; }

    /// Throws ParameterError on negative or non-finite rates, or a bad temperature.
    void validate() const;
};

struct DriveParams {
    double omega_p = 1.0;
    double b1_in = 0.0;  ///< sqrt of incident photon flux, >= 0
    double psi1 = 0.0;

    void validate() const;
    /// omega0 - omega_p
    [[nodiscard]] double detuning(const DetectorParams& p) const noexcept { return p.omega0 - omega_p; }
};

/// Worked example used throughout: K = -1e-4, gamma1 = 1e-2, gamma2 = 1.1 gamma1,
/// gamma3 = 1e-2 |K| / sqrt(3), T = 0.
[[nodiscard]] DetectorParams fig1_detector();

}  // namespace kerrqnd
