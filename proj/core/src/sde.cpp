#include <algorithm>
#include <array>
#include <cmath>
#include <random>
#include <string>
#include <thread>

#include "kerrqnd/errors.hpp"
#include "kerrqnd/oracle.hpp"

namespace kerrqnd {

namespace {

std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

struct LagMoments {
    // sums of x(t+tau)x(t), y(t+tau)y(t), x(t+tau)y(t), y(t+tau)x(t)
    double xx = 0, yy = 0, xy = 0, yx = 0;
    long count = 0;
};

/// Everything one trajectory contributes; reduced serially afterwards.
struct TrajectoryStats {
    double sum_n = 0.0;  // sum of |alpha|^2 over sampled steps
    double sum_x = 0.0;
    double sum_y = 0.0;
    std::array<double, 4> quarter_n{};
    std::vector<double> block_x, block_y;  // dt-weighted integrals
    std::vector<LagMoments> lags;
    bool finite = true;
};

struct Integrator {
    complex decay;       // e^{-(i Delta + gamma) dt}
    complex drift_gain;  // (1 - decay) / (i Delta + gamma)
    complex nl;          // iK + gamma3
    complex drive;       // -i eps
    double lin_noise;    // per-quadrature sd of the linear bath increment
    complex two_photon;  // -2i sqrt(gamma3) e^{i phi3} sqrt((n+1/2) dt / 2)
    bool has_two_photon;
};

Integrator make_integrator(const DetectorParams& p, const DriveParams& d, double dt) {
    const complex kI{0.0, 1.0};
    const double n_bar = thermal_occupation(p.beta_hbar_omega0);
    const double sym = n_bar + 0.5;
    const complex lin = kI * d.detuning(p) + p.gamma();
    Integrator in;
    in.decay = std::exp(-lin * dt);
    in.drift_gain = (1.0 - in.decay) / lin;
    in.nl = complex(p.gamma3, p.kerr);
    const complex eps = std::sqrt(2.0 * p.gamma1) * std::exp(kI * (p.phi1 - d.psi1)) * d.b1_in;
    in.drive = -kI * eps;
    // Stationary OU variance sym, exact over one step, split over two quadratures.
    in.lin_noise = std::sqrt(sym * -std::expm1(-2.0 * p.gamma() * dt) / 2.0);
    in.two_photon = -2.0 * kI * std::sqrt(p.gamma3) * std::exp(kI * p.phi3) * std::sqrt(sym * dt / 2.0);
    in.has_two_photon = p.gamma3 > 0.0;
    return in;
}

TrajectoryStats run_trajectory(const Integrator& in, const SdeConfig& cfg, std::uint64_t traj_seed,
                               long relax_steps, long sample_steps, const std::vector<long>& lag_steps) {
    std::mt19937_64 rng(traj_seed);
    std::normal_distribution<double> normal(0.0, 1.0);

    TrajectoryStats st;
    const int n_blocks = cfg.blocks_per_traj;
    st.block_x.assign(static_cast<std::size_t>(n_blocks), 0.0);
    st.block_y.assign(static_cast<std::size_t>(n_blocks), 0.0);
    st.lags.assign(lag_steps.size(), LagMoments{});
    const long max_lag = lag_steps.empty() ? 0 : *std::max_element(lag_steps.begin(), lag_steps.end());
    std::vector<complex> history(static_cast<std::size_t>(max_lag + 1));

    complex alpha{0.0, 0.0};
    auto step = [&]() {
        const double n = std::norm(alpha);
        complex next = in.decay * alpha + in.drift_gain * (in.drive - in.nl * n * alpha);
        const double g1 = normal(rng);
        const double g2 = normal(rng);
        next += in.lin_noise * complex(g1, g2);
        if (in.has_two_photon) {
            const double g3 = normal(rng);
            const double g4 = normal(rng);
            next += in.two_photon * std::conj(alpha) * complex(g3, g4);
        }
        alpha = next;
    };

    for (long k = 0; k < relax_steps; ++k) {
        step();
    }
    const long block_len = sample_steps / n_blocks;
    const long used = block_len * n_blocks;
    for (long k = 0; k < used; ++k) {
        step();
        const double x = alpha.real();
        const double y = alpha.imag();
        const double n = x * x + y * y;
        st.sum_n += n;
        st.sum_x += x;
        st.sum_y += y;
        st.quarter_n[static_cast<std::size_t>(k * 4 / used)] += n;
        const auto b = static_cast<std::size_t>(k / block_len);
        st.block_x[b] += x * cfg.dt;
        st.block_y[b] += y * cfg.dt;
        if (!lag_steps.empty()) {
            history[static_cast<std::size_t>(k % (max_lag + 1))] = alpha;
            for (std::size_t l = 0; l < lag_steps.size(); ++l) {
                const long lag = lag_steps[l];
                if (k < lag) {
                    continue;
                }
                const complex early = history[static_cast<std::size_t>((k - lag) % (max_lag + 1))];
                LagMoments& m = st.lags[l];
                m.xx += x * early.real();
                m.yy += y * early.imag();
                m.xy += x * early.imag();
                m.yx += y * early.real();
                ++m.count;
            }
        }
    }
    st.finite = std::isfinite(st.sum_n);
    return st;
}

double mean_of(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) {
        s += x;
    }
    return s / static_cast<double>(v.size());
}

double stderr_of(const std::vector<double>& v) {
    const double m = mean_of(v);
    double s = 0.0;
    for (double x : v) {
        s += (x - m) * (x - m);
    }
    const auto n = static_cast<double>(v.size());
    return std::sqrt(s / (n - 1.0) / n);
}

}  // namespace

SdeEstimate sde_simulate(const DetectorParams& params, const DriveParams& drive, const SdeConfig& cfg) {
    params.validate();
    drive.validate();
    if (cfg.n_traj < 100) {
        throw ParameterError("n_traj must be >= 100 (got " + std::to_string(cfg.n_traj) + ")");
    }
    if (!(cfg.dt > 0.0) || !(cfg.t_relax >= 0.0) || !(cfg.t_sample > 0.0)) {
        throw ParameterError("dt and t_sample must be positive, t_relax nonnegative");
    }
    if (cfg.blocks_per_traj < 1 || cfg.n_batches < 2 || cfg.n_batches > cfg.n_traj) {
        throw ParameterError("need blocks_per_traj >= 1 and 2 <= n_batches <= n_traj");
    }
    double fastest = params.gamma();
    for (const MeanFieldBranch& b : solve_response(params, drive)) {
        fastest = std::max({fastest, b.lambda0.real(), b.lambda1.real()});
    }
    if (!(cfg.dt * fastest < 0.05)) {
        throw StepSizeError("dt * max(Re lambda, gamma) = " + std::to_string(cfg.dt * fastest) + " must be < 0.05");
    }

    const long relax_steps = std::lround(cfg.t_relax / cfg.dt);
    const long sample_steps = std::lround(cfg.t_sample / cfg.dt);
    if (sample_steps < 4L * cfg.blocks_per_traj) {
        throw ParameterError("t_sample too short for the requested blocks");
    }
    std::vector<long> lag_steps;
    for (double tau : cfg.lags) {
        if (!(tau >= 0.0)) {
            throw ParameterError("lags must be >= 0");
        }
        lag_steps.push_back(std::lround(tau / cfg.dt));
        if (lag_steps.back() >= sample_steps / 2) {
            throw ParameterError("lag " + std::to_string(tau) + " exceeds half the sampling window");
        }
    }

    const Integrator in = make_integrator(params, drive, cfg.dt);
    const auto n_traj = static_cast<std::size_t>(cfg.n_traj);
    std::vector<TrajectoryStats> stats(n_traj);
    unsigned n_threads = cfg.n_threads > 0 ? static_cast<unsigned>(cfg.n_threads) : std::thread::hardware_concurrency();
    n_threads = std::clamp(n_threads, 1u, static_cast<unsigned>(n_traj));
    auto worker = [&](unsigned w) {
        for (std::size_t i = w; i < n_traj; i += n_threads) {
            stats[i] = run_trajectory(in, cfg, splitmix64(cfg.seed ^ static_cast<std::uint64_t>(i)), relax_steps,
                                      sample_steps, lag_steps);
        }
    };
    if (n_threads == 1) {
        worker(0);
    } else {
        std::vector<std::jthread> pool;
        for (unsigned w = 0; w < n_threads; ++w) {
            pool.emplace_back(worker, w);
        }
    }

    for (const TrajectoryStats& s : stats) {
        if (!s.finite) {
            throw NumericError("stochastic trajectory diverged; reduce dt");
        }
    }

    const long block_len = sample_steps / cfg.blocks_per_traj;
    const double samples_per_traj = static_cast<double>(block_len * cfg.blocks_per_traj);
    const double block_time = static_cast<double>(block_len) * cfg.dt;
    const auto n_batches = static_cast<std::size_t>(cfg.n_batches);

    // Ensemble means, serial and in trajectory order.
    double sx = 0.0, sy = 0.0;
    for (const TrajectoryStats& s : stats) {
        sx += s.sum_x;
        sy += s.sum_y;
    }
    const double total = samples_per_traj * static_cast<double>(n_traj);
    const double xm = sx / total;
    const double ym = sy / total;

    std::vector<double> b2(n_batches, 0.0), intk(n_batches, 0.0), drift(n_batches, 0.0);
    std::vector<std::vector<double>> ktau(cfg.lags.size(), std::vector<double>(n_batches, 0.0));
    std::vector<double> batch_traj(n_batches, 0.0);
    for (std::size_t i = 0; i < n_traj; ++i) {
        const TrajectoryStats& s = stats[i];
        const std::size_t b = i * n_batches / n_traj;
        batch_traj[b] += 1.0;
        b2[b] += s.sum_n / samples_per_traj;
        drift[b] += (s.quarter_n[3] - s.quarter_n[0]) / (samples_per_traj / 4.0);
        double sq = 0.0;
        for (std::size_t k = 0; k < s.block_x.size(); ++k) {
            const double w = 2.0 * (xm * (s.block_x[k] - xm * block_time) + ym * (s.block_y[k] - ym * block_time));
            sq += w * w;
        }
        intk[b] += sq / (static_cast<double>(s.block_x.size()) * block_time);
        for (std::size_t l = 0; l < ktau.size(); ++l) {
            const LagMoments& m = s.lags[l];
            const double c = static_cast<double>(m.count);
            const double cxx = m.xx / c - xm * xm;
            const double cyy = m.yy / c - ym * ym;
            const double cxy = m.xy / c - xm * ym;
            const double cyx = m.yx / c - ym * xm;
            ktau[l][b] += 4.0 * (xm * xm * cxx + ym * ym * cyy + xm * ym * (cxy + cyx));
        }
    }
    for (std::size_t b = 0; b < n_batches; ++b) {
        b2[b] = b2[b] / batch_traj[b] - kSymmetricOrderingBaseline;
        drift[b] /= batch_traj[b];
        intk[b] /= batch_traj[b];
        for (auto& k : ktau) {
            k[b] /= batch_traj[b];
        }
    }

    SdeEstimate out;
    out.B2_mean = mean_of(b2);
    out.B2_stderr = stderr_of(b2);
    const double drift_mean = mean_of(drift);
    const double drift_err = stderr_of(drift);
    if (std::abs(drift_mean) > 6.0 * drift_err + 1e-3 * (std::abs(out.B2_mean) + 1.0)) {
        throw TimeoutError("ensemble not stationary after burn-in: <|alpha|^2> drifts by " +
                           std::to_string(drift_mean) + " +- " + std::to_string(drift_err) +
                           " across the sampling window");
    }
    out.alpha_mean = complex(xm, ym);
    out.integrated_K = mean_of(intk);
    out.integrated_K_stderr = stderr_of(intk);
    const double lam2 = cfg.lambda_coupling * cfg.lambda_coupling;
    out.rate_estimate = lam2 * out.integrated_K;
    out.rate_stderr = lam2 * out.integrated_K_stderr;
    out.lags = cfg.lags;
    for (const auto& k : ktau) {
        out.K_tau_estimate.push_back(mean_of(k));
        out.K_tau_stderr.push_back(stderr_of(k));
    }
    return out;
}

}  // namespace kerrqnd
