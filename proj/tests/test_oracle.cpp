#include <doctest.h>

#include <cmath>

#include "kerrqnd/errors.hpp"
#include "kerrqnd/fluctuations.hpp"
#include "kerrqnd/meanfield.hpp"
#include "kerrqnd/oracle.hpp"
#include "support/oracles.hpp"

using namespace kerrqnd;

namespace {

DetectorParams linear_detector() {
    DetectorParams p;
    p.gamma1 = 1e-2;
    p.gamma2 = 1.1e-2;
    return p;
}

DriveParams drive_at(double omega_p, double b1_in) {
    DriveParams d;
    d.omega_p = omega_p;
    d.b1_in = b1_in;
    return d;
}

DetectionConfig coupling(double lambda) {
    DetectionConfig det;
    det.lambda_coupling = lambda;
    return det;
}

SdeConfig cheap_sde(double gamma, int n_traj = 200) {
    SdeConfig c;
    c.dt = 0.02 / gamma;
    c.n_traj = n_traj;
    c.t_relax = 20.0 / gamma;
    c.t_sample = 200.0 / gamma;
    c.seed = 42;
    c.lambda_coupling = 1e-3;
    c.n_threads = 1;
    return c;
}

bool same_estimate(const SdeEstimate& a, const SdeEstimate& b) {
    return a.B2_mean == b.B2_mean && a.B2_stderr == b.B2_stderr && a.alpha_mean == b.alpha_mean &&
           a.integrated_K == b.integrated_K && a.integrated_K_stderr == b.integrated_K_stderr &&
           a.rate_estimate == b.rate_estimate && a.K_tau_estimate == b.K_tau_estimate &&
           a.K_tau_stderr == b.K_tau_stderr;
}

}  // namespace

TEST_SUITE("sde") {
    TEST_CASE("linear, T = 0: photon number and rate match the closed forms") {
        const DetectorParams p = linear_detector();
        const DriveParams d = drive_at(1.01, 1.5);
        const auto br = solve_response(p, d);
        SdeConfig cfg = cheap_sde(p.gamma());
        cfg.lags = {0.0, 20.0, 60.0};
        const SdeEstimate est = sde_simulate(p, d, cfg);
        CHECK(std::abs(est.B2_mean - br[0].B2) < 3.0 * est.B2_stderr);
        const double rate = dephasing_rate(p, d, br[0], coupling(cfg.lambda_coupling)).rate;
        CHECK(std::abs(est.rate_estimate - rate) < 3.0 * est.rate_stderr);
        CHECK(est.rate_stderr < 0.1 * rate);
        CHECK(est.rate_estimate == doctest::Approx(cfg.lambda_coupling * cfg.lambda_coupling * est.integrated_K));
        REQUIRE(est.K_tau_estimate.size() == 3);
        for (std::size_t i = 0; i < 3; ++i) {
            const double k = correlation_K(p, d, br[0], cfg.lags[i]);
            CHECK(std::abs(est.K_tau_estimate[i] - k) < 3.0 * est.K_tau_stderr[i] + 1e-12);
        }
        const complex alpha_expected = std::polar(std::sqrt(br[0].B2), -br[0].phase_B);
        CHECK(std::abs(est.alpha_mean - alpha_expected) < 0.05 * std::abs(alpha_expected));
    }

    TEST_CASE("undriven mode sits at the symmetric-ordering baseline") {
        const DetectorParams p = linear_detector();
        const SdeEstimate est = sde_simulate(p, drive_at(1.0, 0.0), cheap_sde(p.gamma()));
        CHECK(std::abs(est.B2_mean) < 3.0 * est.B2_stderr);
    }

    TEST_CASE("Kerr detector below critical drive, far from resonance") {
        const DetectorParams p = fig1_detector();
        const DriveParams d = drive_at(0.9, 0.5 * onset_of_bistability(p).b1c_in);
        const auto br = solve_response(p, d);
        REQUIRE(br.size() == 1);
        SdeConfig cfg = cheap_sde(p.gamma(), 400);
        const SdeEstimate est = sde_simulate(p, d, cfg);
        const double rate = dephasing_rate(p, d, br[0], coupling(cfg.lambda_coupling)).rate;
        CHECK(oracle::relative(est.rate_estimate, rate) < 0.1);
        CHECK(oracle::relative(est.B2_mean, br[0].B2) < 0.05);
    }

    TEST_CASE("seed determinism, independent of the thread count") {
        const DetectorParams p = linear_detector();
        const DriveParams d = drive_at(0.99, 1.0);
        SdeConfig cfg = cheap_sde(p.gamma(), 120);
        cfg.t_sample = 40.0 / p.gamma();
        cfg.lags = {10.0};
        const SdeEstimate a = sde_simulate(p, d, cfg);
        const SdeEstimate b = sde_simulate(p, d, cfg);
        cfg.n_threads = 3;
        const SdeEstimate c = sde_simulate(p, d, cfg);
        CHECK(same_estimate(a, b));
        CHECK(same_estimate(a, c));
        cfg.seed = 43;
        CHECK_FALSE(same_estimate(a, sde_simulate(p, d, cfg)));
    }

    TEST_CASE("configuration errors") {
        const DetectorParams p = linear_detector();
        const DriveParams d = drive_at(1.0, 1.0);
        SdeConfig cfg = cheap_sde(p.gamma());
        cfg.dt = 3.0 / p.gamma();
        CHECK_THROWS_AS((void)sde_simulate(p, d, cfg), StepSizeError);
        cfg = cheap_sde(p.gamma(), 99);
        CHECK_THROWS_AS((void)sde_simulate(p, d, cfg), ParameterError);
        cfg = cheap_sde(p.gamma());
        cfg.lags = {cfg.t_sample};
        CHECK_THROWS_AS((void)sde_simulate(p, d, cfg), ParameterError);
        cfg.lags = {-1.0};
        CHECK_THROWS_AS((void)sde_simulate(p, d, cfg), ParameterError);
    }

    TEST_CASE("ensemble that has not settled raises a timeout") {
        const DetectorParams p = fig1_detector();
        const DriveParams d = drive_at(0.95, 2.0 * onset_of_bistability(p).b1c_in);
        SdeConfig cfg = cheap_sde(p.gamma());
        cfg.t_relax = 0.0;
        cfg.t_sample = 20.0 / p.gamma();
        CHECK_THROWS_AS((void)sde_simulate(p, d, cfg), TimeoutError);
    }
}

TEST_SUITE("fock") {
    TEST_CASE("no coupling: the coherence trace stays at one") {
        const DetectorParams p = linear_detector();
        FockConfig cfg;
        cfg.lambda_coupling = 0.0;
        cfg.t_final = 50.0 / p.gamma();
        const FockResult r = fock_simulate(p, drive_at(1.0, 0.2), cfg);
        REQUIRE(r.nu.size() >= 2);
        for (double nu : r.nu) {
            CHECK(std::abs(nu - 1.0) < 1e-8);
        }
    }

    TEST_CASE("linear resonance: fitted rate matches the closed form, lambda^2 scaling") {
        const DetectorParams p = linear_detector();
        const double g = p.gamma();
        const DriveParams d = drive_at(1.0, std::sqrt(2.0 * g * g / (2.0 * p.gamma1)));  // B^2 = 2
        FockConfig cfg;
        cfg.n_max = 40;
        double prev = 0.0;
        for (double frac : {0.025, 0.05, 0.1}) {
            cfg.lambda_coupling = frac * g;
            const FockResult r = fock_simulate(p, d, cfg);
            const double expected =
                4.0 * cfg.lambda_coupling * cfg.lambda_coupling * g * p.gamma1 * d.b1_in * d.b1_in / std::pow(g, 4);
            CHECK(oracle::relative(r.fitted_rate, expected) < 0.1);
            CHECK(r.fit_points > 10);
            CHECK(r.n_max == 40);
            CHECK(r.max_edge_population < 1e-6);
            if (prev > 0.0) {
                CHECK(r.fitted_rate / prev == doctest::Approx(4.0).epsilon(0.05));
            }
            prev = r.fitted_rate;
        }
    }

    TEST_CASE("errors: nonlinear detector, small basis, truncation overflow") {
        FockConfig cfg;
        cfg.lambda_coupling = 1e-3;
        CHECK_THROWS_AS((void)fock_simulate(fig1_detector(), drive_at(1.0, 0.1), cfg), ValidityDomainError);

        const DetectorParams p = linear_detector();
        const DriveParams d = drive_at(1.0, std::sqrt(2.0 * p.gamma() * p.gamma() / (2.0 * p.gamma1)));
        cfg.n_max = 12;
        CHECK_THROWS_AS((void)fock_simulate(p, d, cfg), ParameterError);

        DetectorParams hot = p;
        hot.beta_hbar_omega0 = 0.2;
        cfg.n_max = 20;
        cfg.t_final = 20.0 / p.gamma();
        CHECK_THROWS_AS((void)fock_simulate(hot, drive_at(1.0, 0.1), cfg), TruncationError);

        cfg = FockConfig{};
        cfg.signal_photons = 2;
        CHECK_THROWS_AS((void)fock_simulate(p, d, cfg), ParameterError);
    }
}

TEST_SUITE("perturbative") {
    TEST_CASE("t = 0 and lambda = 0 give nu = 1") {
        const DetectorParams p = fig1_detector();
        const DriveParams d = drive_at(0.95, onset_of_bistability(p).b1c_in);
        const auto br = solve_response(p, d);
        CHECK(nu_perturbative(p, d, br[0], coupling(1e-4), 0.0).nu == 1.0);
        for (double t : {1.0, 100.0, 1e4}) {
            CHECK(nu_perturbative(p, d, br[0], coupling(0.0), t).nu == 1.0);
        }
        CHECK_THROWS_AS((void)nu_perturbative(p, d, br[0], coupling(1e-4), -1.0), ParameterError);
    }

    TEST_CASE("double integral of K by quadrature") {
        const DetectorParams p = fig1_detector();
        const DriveParams d = drive_at(0.9, 2.0 * onset_of_bistability(p).b1c_in);
        const auto br = solve_response(p, d);
        const double lambda = 1e-4;
        for (double t : {0.5, 10.0, 150.0}) {
            // int_0^t int_0^t K(t'-t'') = 2 int_0^t (t - s) K(s) ds
            const double q =
                2.0 * oracle::integrate([&](double s) { return (t - s) * correlation_K(p, d, br[2], s); }, 0.0, t, 64);
            const NuValue nu = nu_perturbative(p, d, br[2], coupling(lambda), t);
            CHECK(oracle::relative(1.0 - nu.nu, lambda * lambda * q) < 1e-8);
            CHECK(nu.valid);
        }
    }

    TEST_CASE("short times are quadratic, long times linear at the dephasing rate") {
        const DetectorParams p = fig1_detector();
        const DriveParams d = drive_at(0.95, onset_of_bistability(p).b1c_in);
        const auto br = solve_response(p, d);
        const double lambda = 1e-4;
        const double k0 = correlation_K(p, d, br[0], 0.0);
        const double t = 1e-3 / p.gamma();
        const double loss = 1.0 - nu_perturbative(p, d, br[0], coupling(lambda), t).nu;
        CHECK(oracle::relative(loss, lambda * lambda * k0 * t * t) < 1e-3);

        const double rate = dephasing_rate(p, d, br[0], coupling(lambda)).rate;
        const double slowest = std::min(br[0].lambda0.real(), br[0].lambda1.real());
        CHECK(oracle::relative(nu_decay_slope(p, d, br[0], coupling(lambda), 40.0 / slowest), rate) < 1e-6);
    }

    TEST_CASE("validity flag once the expansion is exhausted") {
        const DetectorParams p = fig1_detector();
        const DriveParams d = drive_at(0.95, onset_of_bistability(p).b1c_in);
        const auto br = solve_response(p, d);
        const NuValue nu = nu_perturbative(p, d, br[0], coupling(1e-2), 1e4);
        CHECK(nu.nu < 0.0);
        CHECK_FALSE(nu.valid);
    }
}
