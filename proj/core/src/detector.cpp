#include "kerrqnd/detector.hpp"

#include <cmath>
#include <string>

#include "kerrqnd/errors.hpp"

namespace kerrqnd {

namespace {

void require_finite(double v, const char* name) {
    if (!std::isfinite(v)) {
        throw ParameterError(std::string(name) + " must be finite");
    }
}

void require_nonnegative(double v, const char* name) {
    require_finite(v, name);
    if (v < 0.0) {
        throw ParameterError(std::string(name) + " must be >= 0 (got " + std::to_string(v) + ")");
    }
}

}  // namespace

void DetectorParams::validate() const {
    require_finite(omega0, "omega0");
    require_finite(kerr, "kerr");
    require_nonnegative(gamma1, "gamma1");
    require_nonnegative(gamma2, "gamma2");
    require_nonnegative(gamma3, "gamma3");
    require_finite(phi1, "phi1");
    require_finite(phi2, "phi2");
    require_finite(phi3, "phi3");
    if (!(gamma1 + gamma2 > 0.0)) {
        throw ParameterError("gamma1 + gamma2 must be > 0");
    }
    if (std::isnan(beta_hbar_omega0) || !(beta_hbar_omega0 > 0.0)) {
        throw ParameterError("beta_hbar_omega0 must be > 0 or infinite");
    }
}

void DriveParams::validate() const {
    require_finite(omega_p, "omega_p");
    require_nonnegative(b1_in, "b1_in");
    require_finite(psi1, "psi1");
}

DetectorParams fig1_detector() {
    DetectorParams p;
    p.omega0 = 1.0;
    p.kerr = -1e-4;
    p.gamma1 = 1e-2;
    p.gamma2 = 1.1 * p.gamma1;
    p.gamma3 = 1e-2 * std::abs(p.kerr) / std::sqrt(3.0);
    return p;
}

}  // namespace kerrqnd
