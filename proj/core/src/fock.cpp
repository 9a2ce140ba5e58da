#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/Dense>

#include "kerrqnd/errors.hpp"
#include "kerrqnd/oracle.hpp"

namespace kerrqnd {

namespace {

constexpr double kEdgePopulationLimit = 1e-6;

using Matrix = Eigen::MatrixXcd;

/// Generator of rho_01: -i(H0 rho - rho H1) plus the thermal damping dissipator,
/// with H1 = H0 + n_s lambda N. Written out element-wise; every term couples at
/// most nearest-neighbour diagonals.
class CoherenceGenerator {
public:
    CoherenceGenerator(int n_max, double detuning, complex eps, double shift, double gamma, double n_bar)
        : n_(n_max), detuning_(detuning), eps_(eps), shift_(shift), k_down_(2.0 * gamma * (n_bar + 1.0)),
          k_up_(2.0 * gamma * n_bar) {
        sq_.resize(n_max + 2);
        for (int m = 0; m <= n_max + 1; ++m) {
            sq_[m] = std::sqrt(static_cast<double>(m));
        }
    }

    void apply(const Matrix& rho, Matrix& out) const {
        const complex kI{0.0, 1.0};
        const int n = n_;
        for (int c = 0; c <= n; ++c) {
            for (int r = 0; r <= n; ++r) {
                const complex p = rho(r, c);
                // Hamiltonian parts
                complex h = (detuning_ * r - (detuning_ + shift_) * c) * p;
                if (r > 0) {
                    h += eps_ * sq_[r] * rho(r - 1, c);
                }
                if (r < n) {
                    h += std::conj(eps_) * sq_[r + 1] * rho(r + 1, c);
                }
                if (c < n) {
                    h -= eps_ * sq_[c + 1] * rho(r, c + 1);
                }
                if (c > 0) {
                    h -= std::conj(eps_) * sq_[c] * rho(r, c - 1);
                }
                complex d = -0.5 * k_down_ * (r + c) * p;
                if (r < n && c < n) {
                    d += k_down_ * sq_[r + 1] * sq_[c + 1] * rho(r + 1, c + 1);
                }
                if (k_up_ != 0.0) {
                    const double cr = r < n ? r + 1.0 : 0.0;
                    const double cc = c < n ? c + 1.0 : 0.0;
                    d -= 0.5 * k_up_ * (cr + cc) * p;
                    if (r > 0 && c > 0) {
                        d += k_up_ * sq_[r] * sq_[c] * rho(r - 1, c - 1);
                    }
                }
                out(r, c) = -kI * h + d;
            }
        }
    }

    [[nodiscard]] double norm_bound() const noexcept {
        return (k_down_ + k_up_) * (n_ + 1) + (std::abs(detuning_) + std::abs(shift_)) * n_ +
               4.0 * std::abs(eps_) * sq_[n_ + 1];
    }

    void set_shift(double shift) noexcept { shift_ = shift; }

private:
    int n_;
    double detuning_;
    complex eps_;
    double shift_;
    double k_down_, k_up_;
    std::vector<double> sq_;
};

class Rk4 {
public:
    explicit Rk4(int dim) : k1_(dim, dim), k2_(dim, dim), k3_(dim, dim), k4_(dim, dim), tmp_(dim, dim) {}

    void step(const CoherenceGenerator& gen, Matrix& rho, double dt) {
        gen.apply(rho, k1_);
        tmp_ = rho + (0.5 * dt) * k1_;
        gen.apply(tmp_, k2_);
        tmp_ = rho + (0.5 * dt) * k2_;
        gen.apply(tmp_, k3_);
        tmp_ = rho + dt * k3_;
        gen.apply(tmp_, k4_);
        rho += (dt / 6.0) * (k1_ + 2.0 * k2_ + 2.0 * k3_ + k4_);
    }

private:
    Matrix k1_, k2_, k3_, k4_, tmp_;
};

Matrix coherent_state(complex alpha, int n_max) {
    Eigen::VectorXcd psi(n_max + 1);
    psi(0) = std::exp(-0.5 * std::norm(alpha));
    for (int m = 1; m <= n_max; ++m) {
        psi(m) = psi(m - 1) * alpha / std::sqrt(static_cast<double>(m));
    }
    return psi * psi.adjoint();
}

}  // namespace

FockResult fock_simulate(const DetectorParams& params, const DriveParams& drive, const FockConfig& cfg) {
    params.validate();
    drive.validate();
    if (!params.is_linear()) {
        throw ValidityDomainError("Fock oracle requires a linear detector (K = 0, gamma3 = 0)");
    }
    if (cfg.signal_photons != 0 && cfg.signal_photons != 1) {
        throw ParameterError("signal_photons must be 0 or 1");
    }
    if (!std::isfinite(cfg.lambda_coupling)) {
        throw ParameterError("lambda_coupling must be finite");
    }

    const complex kI{0.0, 1.0};
    const double gamma = params.gamma();
    const double detuning = drive.detuning(params);
    const complex eps = std::sqrt(2.0 * params.gamma1) * std::exp(kI * (params.phi1 - drive.psi1)) * drive.b1_in;
    const complex alpha0 = -kI * eps / (gamma + kI * detuning);
    const double b2 = std::norm(alpha0);

    const int n_min = static_cast<int>(std::ceil(4.0 * b2 + 10.0));
    const int n_max = cfg.n_max > 0 ? cfg.n_max : std::max(20, n_min);
    if (n_max < n_min) {
        throw ParameterError("n_max = " + std::to_string(n_max) + " below 4 B^2 + 10 = " + std::to_string(n_min));
    }
    const double t_final = cfg.t_final > 0.0 ? cfg.t_final : 200.0 / gamma;
    if (cfg.n_samples < 2) {
        throw ParameterError("n_samples must be >= 2");
    }

    const double n_bar = thermal_occupation(params.beta_hbar_omega0);
    CoherenceGenerator gen(n_max, detuning, eps, 0.0, gamma, n_bar);
    const double shift = cfg.signal_photons * cfg.lambda_coupling;
    double dt = cfg.dt;
    {
        CoherenceGenerator probe(n_max, detuning, eps, shift, gamma, n_bar);
        const double dt_max = 1.0 / probe.norm_bound();
        if (dt <= 0.0) {
            dt = dt_max;
        } else if (dt > 2.5 * dt_max) {
            throw StepSizeError("Fock step dt = " + std::to_string(dt) + " exceeds the RK4 stability bound " +
                                std::to_string(2.5 * dt_max));
        }
    }

    Rk4 rk(n_max + 1);
    Matrix rho = coherent_state(alpha0, n_max);
    FockResult out;
    out.n_max = n_max;
    auto track_edge = [&]() {
        out.max_edge_population = std::max(out.max_edge_population, std::abs(rho(n_max, n_max)));
        if (out.max_edge_population > kEdgePopulationLimit) {
            throw TruncationError("population " + std::to_string(out.max_edge_population) + " at n_max = " +
                                  std::to_string(n_max) + "; raise n_max");
        }
    };
    track_edge();

    if (n_bar > 0.0) {
        // Thermalize the steady state before the branches separate.
        const long burn = std::lround(std::ceil(20.0 / gamma / dt));
        for (long k = 0; k < burn; ++k) {
            rk.step(gen, rho, dt);
        }
        track_edge();
    }

    gen.set_shift(shift);
    const long n_steps = std::lround(std::ceil(t_final / dt));
    const double h = t_final / static_cast<double>(n_steps);
    // Sample i of n_samples sits at step round(i * n_steps / (n_samples - 1)).
    auto sample_step = [&](int i) {
        return std::lround(static_cast<double>(i) * static_cast<double>(n_steps) / (cfg.n_samples - 1));
    };
    int next_sample = 1;
    out.times.push_back(0.0);
    out.nu.push_back(std::norm(rho.trace()));
    for (long k = 1; k <= n_steps; ++k) {
        rk.step(gen, rho, h);
        if (next_sample < cfg.n_samples && k >= sample_step(next_sample)) {
            while (next_sample < cfg.n_samples && k >= sample_step(next_sample)) {
                ++next_sample;
            }
            track_edge();
            out.times.push_back(static_cast<double>(k) * h);
            out.nu.push_back(std::norm(rho.trace()));
        }
    }

    // Least-squares line through log nu on the post-transient window.
    double s1 = 0, st = 0, sl = 0, stt = 0, stl = 0;
    for (std::size_t i = 0; i < out.times.size(); ++i) {
        const double t = out.times[i];
        const double nu = out.nu[i];
        if (t < 3.0 / gamma || !(nu > 1e-3)) {
            continue;
        }
        const double l = std::log(nu);
        s1 += 1.0;
        st += t;
        sl += l;
        stt += t * t;
        stl += t * l;
    }
    out.fit_points = static_cast<int>(s1);
    if (out.fit_points >= 2) {
        const double denom = s1 * stt - st * st;
        out.fitted_rate = denom > 0.0 ? -(s1 * stl - st * sl) / denom : 0.0;
    }
    return out;
}

}  // namespace kerrqnd
