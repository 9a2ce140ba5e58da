#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "kerrqnd/errors.hpp"
#include "kerrqnd/meanfield.hpp"
#include "kerrqnd/sweep.hpp"
#include "support/oracles.hpp"

using namespace kerrqnd;

namespace {

const std::vector<double>& fig1_grid() {
    static const std::vector<double> g = linear_grid(0.8, 1.05, 2001);
    return g;
}

SweepTrace fig1_sweep(double ratio, SweepDirection dir) {
    const DetectorParams p = fig1_detector();
    DetectionConfig det;
    det.lambda_coupling = 1e-4;
    return frequency_sweep(p, ratio * onset_of_bistability(p).b1c_in, fig1_grid(), dir, det);
}

bool same_rows(const SweepTrace& a, const SweepTrace& b) {
    if (a.rows.size() != b.rows.size()) {
        return false;
    }
    for (std::size_t i = 0; i < a.rows.size(); ++i) {
        const SweepRow& x = a.rows[i];
        const SweepRow& y = b.rows[i];
        if (x.omega_p != y.omega_p || x.B2 != y.B2 || x.rate != y.rate || x.branch_id != y.branch_id ||
            x.stable != y.stable || x.diverged != y.diverged) {
            return false;
        }
    }
    return true;
}

}  // namespace

TEST_SUITE("sweep") {
    TEST_CASE("linear grid endpoints and validation") {
        const auto g = linear_grid(0.8, 1.05, 2001);
        REQUIRE(g.size() == 2001);
        CHECK(g.front() == 0.8);
        CHECK(g.back() == 1.05);
        CHECK(g[1000] == doctest::Approx(0.925).epsilon(1e-15));
        CHECK_THROWS_AS((void)linear_grid(0.0, 1.0, 1), ParameterError);
    }

    TEST_CASE("non-monotone grid is rejected") {
        const DetectorParams p = fig1_detector();
        const std::vector<double> bad = {0.9, 0.95, 0.93};
        CHECK_THROWS_AS((void)frequency_sweep(p, 1.0, bad, SweepDirection::up, {}), ParameterError);
    }

    TEST_CASE("half critical drive: no jumps, identical up and down traces") {
        const SweepTrace up = fig1_sweep(0.5, SweepDirection::up);
        const SweepTrace down = fig1_sweep(0.5, SweepDirection::down);
        CHECK(up.jumps.empty());
        CHECK(down.jumps.empty());
        CHECK_FALSE(up.critical.has_value());
        CHECK(up.rows.size() == 2001);
        CHECK(same_rows(up, down));
        for (const SweepRow& r : up.rows) {
            CHECK(r.branch_id == 0);
            CHECK(r.stable);
            CHECK_FALSE(r.diverged);
        }
    }

    TEST_CASE("critical drive: exactly one diverged point within one grid step of omega_pc") {
        const DetectorParams p = fig1_detector();
        const OnsetPoint op = onset_of_bistability(p);
        const double step = fig1_grid()[1] - fig1_grid()[0];
        for (SweepDirection dir : {SweepDirection::up, SweepDirection::down}) {
            const SweepTrace tr = fig1_sweep(1.0, dir);
            REQUIRE(tr.critical.has_value());
            CHECK(tr.jumps.empty());
            const auto n_div = std::count_if(tr.rows.begin(), tr.rows.end(), [](const SweepRow& r) { return r.diverged; });
            CHECK(n_div == 1);
            for (const SweepRow& r : tr.rows) {
                if (r.diverged) {
                    CHECK(std::abs(r.omega_p - op.omega_pc) <= step);
                    CHECK(r.kind == RowKind::onset);
                }
            }
        }
    }

    TEST_CASE("critical drive: rate is asymmetric about the divergence") {
        const DetectorParams p = fig1_detector();
        const OnsetPoint op = onset_of_bistability(p);
        DetectionConfig det;
        det.lambda_coupling = 1e-4;
        for (double delta : {1e-3, 5e-3, 2e-2}) {
            const std::vector<double> g = {op.omega_pc - delta, op.omega_pc + delta};
            const SweepTrace tr = frequency_sweep(p, op.b1c_in, g, SweepDirection::up, det);
            REQUIRE(tr.rows.size() == 3);  // onset row inserted between the two grid rows
            CHECK(tr.rows[1].kind == RowKind::onset);
            CHECK(oracle::relative(tr.rows[0].rate, tr.rows[2].rate) > 1e-2);
        }
    }

    TEST_CASE("twice critical drive: hysteresis with two distinct jumps") {
        const SweepTrace up = fig1_sweep(2.0, SweepDirection::up);
        const SweepTrace down = fig1_sweep(2.0, SweepDirection::down);
        REQUIRE(up.jumps.size() == 1);
        REQUIRE(down.jumps.size() == 1);
        const JumpPoint& ju = up.jumps[0];
        const JumpPoint& jd = down.jumps[0];
        CHECK(ju.omega_p == doctest::Approx(0.93142048296147117).epsilon(1e-9));
        CHECK(jd.omega_p == doctest::Approx(0.87437707870284664).epsilon(1e-9));
        CHECK(ju.from_branch == 0);
        CHECK(ju.to_branch == 2);
        CHECK(jd.from_branch == 2);
        CHECK(jd.to_branch == 0);
        CHECK(ju.B2_to > ju.B2_from);
        CHECK(jd.B2_to < jd.B2_from);
        CHECK_FALSE(ju.coarse_warning);
        CHECK_FALSE(jd.coarse_warning);

        // Loop area: integral of B2_down - B2_up over the grid rows is positive.
        double area = 0.0;
        const auto& g = fig1_grid();
        auto b2_at = [](const SweepTrace& t, double w) {
            for (const SweepRow& r : t.rows) {
                if (r.omega_p == w && r.kind == RowKind::grid) {
                    return r.B2;
                }
            }
            return std::nan("");
        };
        for (std::size_t i = 0; i + 1 < g.size(); ++i) {
            area += (b2_at(down, g[i]) - b2_at(up, g[i])) * (g[i + 1] - g[i]);
        }
        CHECK(area > 0.0);
    }

    TEST_CASE("sweep rows: ascending omega, cubic residual, occupied branch stable") {
        const DetectorParams p = fig1_detector();
        const double b = 2.0 * onset_of_bistability(p).b1c_in;
        for (SweepDirection dir : {SweepDirection::up, SweepDirection::down}) {
            const SweepTrace tr = fig1_sweep(2.0, dir);
            for (std::size_t i = 0; i < tr.rows.size(); ++i) {
                const SweepRow& r = tr.rows[i];
                if (i > 0) {
                    CHECK(r.omega_p >= tr.rows[i - 1].omega_p);
                }
                DriveParams d;
                d.omega_p = r.omega_p;
                d.b1_in = b;
                CHECK(cubic_residual(p, d, r.B2) < 1e-10);
                CHECK(r.branch_id != 1);
                if (r.kind == RowKind::grid) {
                    CHECK(r.stable);
                    CHECK(r.rate > 0.0);
                }
            }
        }
    }

    TEST_CASE("coarse grid that misses the window flags nothing but still jumps") {
        const DetectorParams p = fig1_detector();
        const double b = 2.0 * onset_of_bistability(p).b1c_in;
        const std::vector<double> g = linear_grid(0.8, 1.05, 3);  // 0.8, 0.925, 1.05
        const SweepTrace up = frequency_sweep(p, b, g, SweepDirection::up, {});
        REQUIRE(up.jumps.size() == 1);
        CHECK(up.jumps[0].omega_p == doctest::Approx(0.93142048296147117).epsilon(1e-9));
    }

    TEST_CASE("all branches lists every steady state") {
        const DetectorParams p = fig1_detector();
        const double b = 2.0 * onset_of_bistability(p).b1c_in;
        const std::vector<double> g = {0.85, 0.9, 0.95};
        const auto rows = all_branches(p, b, g, {});
        REQUIRE(rows.size() == 5);
        CHECK(rows[0].omega_p == 0.85);
        CHECK(rows[1].omega_p == 0.9);
        CHECK(rows[1].branch_id == 0);
        CHECK(rows[2].branch_id == 1);
        CHECK_FALSE(rows[2].stable);
        CHECK(rows[3].branch_id == 2);
        CHECK(rows[4].omega_p == 0.95);
    }
}
