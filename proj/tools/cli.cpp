#include "cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "kerrqnd/errors.hpp"
#include "kerrqnd/fluctuations.hpp"
#include "kerrqnd/meanfield.hpp"
#include "kerrqnd/modes.hpp"
#include "kerrqnd/oracle.hpp"
#include "kerrqnd/sweep.hpp"
#include "run_config.hpp"

namespace kerrqnd::cli {

namespace {

constexpr double kLogClipHigh = 12.0;
constexpr double kLogClipLow = -99.0;

class CsvWriter {
public:
    explicit CsvWriter(std::ostream& os) : os_(os) {}

    void header(std::initializer_list<const char*> names) {
        bool first = true;
        for (const char* n : names) {
            os_ << (first ? "" : ",") << n;
            first = false;
        }
        os_ << '\n';
    }

    CsvWriter& num(double v) { return field(format_number(v)); }
    CsvWriter& integer(long v) { return field(std::to_string(v)); }
    CsvWriter& flag(bool v) { return field(v ? "1" : "0"); }
    CsvWriter& text(const std::string& s) { return field(s); }
    CsvWriter& empty() { return field(""); }
    void end() {
        os_ << '\n';
        first_ = true;
    }

private:
    CsvWriter& field(const std::string& s) {
        if (!first_) {
            os_ << ',';
        }
        os_ << s;
        first_ = false;
        return *this;
    }

    std::ostream& os_;
    bool first_ = true;
};

/// log10(gamma / (lambda^2 tau_phi)), clipped so the CSV never holds inf or NaN.
double log10_norm_rate(const DetectorParams& p, double omega_p, double b1_in, double B2) {
    DriveParams d;
    d.omega_p = omega_p;
    d.b1_in = b1_in;
    const double v = std::log10(p.gamma() * lowest_order_rate(p, d, B2, 1.0));
    if (std::isnan(v)) {
        return kLogClipHigh;
    }
    return std::clamp(v, kLogClipLow, kLogClipHigh);
}

struct Outputs {
    std::ostream& csv;
    std::ostream& summary;
};

void cmd_response(const RunConfig& c, const Outputs& o) {
    const DriveParams drive = c.drive();
    const auto branches = solve_response(c.detector, drive);
    CsvWriter w(o.csv);
    w.header({"omega_p", "branch_index", "B2", "B", "phase_B", "slope", "slope_infinite", "stable", "lambda0_re",
              "lambda0_im", "lambda1_re", "lambda1_im", "cubic_residual"});
    for (std::size_t i = 0; i < branches.size(); ++i) {
        const MeanFieldBranch& b = branches[i];
        w.num(drive.omega_p).integer(static_cast<long>(i)).num(b.B2).num(b.B()).num(b.phase_B);
        w.num(b.slope).flag(b.slope_infinite).flag(b.stable);
        w.num(b.lambda0.real()).num(b.lambda0.imag()).num(b.lambda1.real()).num(b.lambda1.imag());
        w.num(cubic_residual(c.detector, drive, b.B2)).end();
    }
    o.summary << branches.size() << " steady state(s) at omega_p = " << format_number(drive.omega_p)
              << ", b1_in = " << format_number(drive.b1_in) << '\n';
}

void cmd_onset(const RunConfig& c, const Outputs& o) {
    const OnsetPoint op = onset_of_bistability(c.detector);
    CsvWriter w(o.csv);
    w.header({"B2_c", "omega_pc", "detuning_c", "b1c_in", "b1c_in_sq"});
    w.num(op.B2_c).num(op.omega_pc).num(c.detector.omega0 - op.omega_pc).num(op.b1c_in).num(op.b1c_in * op.b1c_in);
    w.end();
    o.summary << "B_c^2 = " << format_number(op.B2_c) << '\n'
              << "omega0 - omega_pc = " << format_number(c.detector.omega0 - op.omega_pc) << '\n'
              << "(b1c_in)^2 = " << format_number(op.b1c_in * op.b1c_in) << '\n';
}

void cmd_dephasing(const RunConfig& c, const Outputs& o) {
    const DriveParams drive = c.drive();
    const auto branches = solve_response(c.detector, drive);
    CsvWriter w(o.csv);
    w.header({"omega_p", "branch_index", "B2", "rate", "xi", "log10_norm_rate", "thermal_factor", "diverged"});
    for (std::size_t i = 0; i < branches.size(); ++i) {
        const MeanFieldBranch& b = branches[i];
        if (!b.stable) {
            o.summary << "branch " << i << " (B^2 = " << format_number(b.B2) << ") is unstable; skipped\n";
            continue;
        }
        const DephasingResult r = dephasing_rate(c.detector, drive, b, c.detection);
        w.num(drive.omega_p).integer(static_cast<long>(i)).num(b.B2).num(r.rate).num(r.xi);
        w.num(log10_norm_rate(c.detector, drive.omega_p, drive.b1_in, b.B2)).num(r.thermal_factor).flag(r.diverged);
        w.end();
        o.summary << "branch " << i << ": 1/tau_phi = " << format_number(r.rate) << ", xi = " << format_number(r.xi)
                  << (r.diverged ? " (diverged)" : "") << '\n';
    }
}

void cmd_sweep(const RunConfig& c, const Outputs& o) {
    const double b1 = c.resolve_b1_in();
    const std::vector<double> grid = linear_grid(c.omega_min, c.omega_max, c.points);
    std::vector<SweepRow> rows;
    SweepTrace trace;
    if (c.all_branches) {
        rows = all_branches(c.detector, b1, grid, c.detection);
    } else {
        trace = frequency_sweep(c.detector, b1, grid, c.direction, c.detection);
        rows = trace.rows;
    }
    CsvWriter w(o.csv);
    w.header({"omega_p", "branch_id", "B", "log10_norm_rate", "stable", "diverged"});
    for (const SweepRow& r : rows) {
        w.num(r.omega_p).integer(r.branch_id).num(std::sqrt(r.B2));
        w.num(log10_norm_rate(c.detector, r.omega_p, b1, r.B2)).flag(r.stable).flag(r.diverged).end();
    }

    o.summary << (c.all_branches ? "all branches" : (c.direction == SweepDirection::up ? "up-sweep" : "down-sweep"))
              << ": " << rows.size() << " rows, b1_in = " << format_number(b1) << '\n';
    for (const JumpPoint& j : trace.jumps) {
        o.summary << "jump at omega_p = " << format_number(j.omega_p) << ": branch " << j.from_branch << " -> "
                  << j.to_branch << ", B^2 " << format_number(j.B2_from) << " -> " << format_number(j.B2_to)
                  << (j.coarse_warning ? " [warning: grid too coarse to bracket the fold]" : "") << '\n';
    }
    const auto onset_row = std::find_if(rows.begin(), rows.end(), [](const SweepRow& r) { return r.kind == RowKind::onset; });
    if (onset_row != rows.end()) {
        o.summary << "critical drive: infinite slope at omega_pc = " << format_number(onset_row->omega_p) << '\n';
    }
}

void cmd_modes(const RunConfig& c, const Outputs& o) {
    const LineProfile profile = c.line_profile();
    const ModeSet modes = solve_modes(profile, c.n_modes, c.n_grid);
    CsvWriter w(o.csv);
    w.header({"quantity", "n", "m", "value"});
    for (int n = 1; n <= modes.size(); ++n) {
        w.text("omega").integer(n).integer(n).num(modes.omegas[static_cast<std::size_t>(n - 1)]).end();
    }
    for (int n = 1; n <= modes.size(); ++n) {
        w.text("kerr").integer(n).integer(n).num(kerr_constant(modes, profile, n)).end();
    }
    for (int n = 1; n <= modes.size(); ++n) {
        for (int m = n + 1; m <= modes.size(); ++m) {
            w.text("coupling").integer(n).integer(m).num(coupling_constant(modes, profile, n, m)).end();
        }
    }
    if (!c.shapes_out.empty()) {
        std::ofstream f(c.shapes_out);
        if (!f) {
            throw ParameterError("cannot write " + c.shapes_out);
        }
        f << "x";
        for (int n = 1; n <= modes.size(); ++n) {
            f << ",u" << n;
        }
        for (int n = 1; n <= modes.size(); ++n) {
            f << ",du" << n;
        }
        f << '\n';
        for (std::size_t j = 0; j < modes.grid.size(); ++j) {
            f << format_number(modes.grid[j]);
            for (const auto& u : modes.shapes) {
                f << ',' << format_number(u[j]);
            }
            for (const auto& du : modes.derivatives) {
                f << ',' << format_number(du[j]);
            }
            f << '\n';
        }
    }
    o.summary << modes.size() << " modes, fundamental omega_1 = " << format_number(modes.omegas.front())
              << " rad/s\n";
}

void cmd_sde(const RunConfig& c, const Outputs& o) {
    const DriveParams drive = c.drive();
    const auto branches = solve_response(c.detector, drive);
    SdeConfig cfg = c.sde;
    double fastest = c.detector.gamma();
    double slowest = c.detector.gamma();
    for (const MeanFieldBranch& b : branches) {
        fastest = std::max(fastest, b.lambda1.real());
        if (b.stable) {
            slowest = std::min(slowest, b.lambda0.real());
        }
    }
    if (cfg.dt <= 0.0) {
        cfg.dt = 0.02 / fastest;
    }
    if (cfg.t_relax <= 0.0) {
        cfg.t_relax = 20.0 / slowest;
    }
    if (cfg.t_sample <= 0.0) {
        cfg.t_sample = 200.0 / slowest;
    }
    const SdeEstimate e = sde_simulate(c.detector, drive, cfg);

    const bool unique = branches.size() == 1;
    CsvWriter w(o.csv);
    w.header({"quantity", "tau", "estimate", "stderr", "closed_form"});
    w.text("B2_mean").empty().num(e.B2_mean).num(e.B2_stderr);
    unique ? w.num(branches.front().B2).end() : w.empty().end();
    const double lam2 = c.detection.lambda_coupling * c.detection.lambda_coupling;
    w.text("integrated_K").empty().num(e.integrated_K).num(e.integrated_K_stderr);
    unique ? w.num(lowest_order_rate(c.detector, drive, branches.front().B2, 1.0)).end() : w.empty().end();
    w.text("rate").empty().num(e.rate_estimate).num(e.rate_stderr);
    unique ? w.num(lam2 * lowest_order_rate(c.detector, drive, branches.front().B2, 1.0)).end() : w.empty().end();
    for (std::size_t l = 0; l < e.lags.size(); ++l) {
        w.text("K_tau").num(e.lags[l]).num(e.K_tau_estimate[l]).num(e.K_tau_stderr[l]);
        unique ? w.num(correlation_K(c.detector, drive, branches.front(), e.lags[l])).end() : w.empty().end();
    }
    o.summary << "<A^dag A> = " << format_number(e.B2_mean) << " +- " << format_number(e.B2_stderr)
              << ", rate = " << format_number(e.rate_estimate) << " +- " << format_number(e.rate_stderr) << " ("
              << cfg.n_traj << " trajectories, dt = " << format_number(cfg.dt) << ")\n";
}

void cmd_fock(const RunConfig& c, const Outputs& o) {
    const DriveParams drive = c.drive();
    const FockResult r = fock_simulate(c.detector, drive, c.fock);
    CsvWriter w(o.csv);
    w.header({"t", "nu"});
    for (std::size_t i = 0; i < r.times.size(); ++i) {
        w.num(r.times[i]).num(r.nu[i]).end();
    }
    const MeanFieldBranch b = solve_response(c.detector, drive).front();
    const DephasingResult ref = dephasing_rate(c.detector, drive, b, c.detection);
    o.summary << "fitted nu decay rate = " << format_number(r.fitted_rate) << " (" << r.fit_points
              << " points, n_max = " << r.n_max << "); lowest-order rate = " << format_number(ref.rate) << '\n';
}

}  // namespace

std::string format_number(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Kerr-detector response, dephasing and oracle runs", "kerrqnd"};
    app.require_subcommand(1);
    app.fallthrough();

    std::string config_path, out_path, direction;
    std::vector<std::string> assignments;
    double drive_ratio = 0, b1in = 0, omega_min = 0, omega_max = 0, omega_p = 0, lambda = 0;
    long points = 0;
    long seed = 0;
    app.add_option("--config", config_path, "flat key = value config file")->check(CLI::ExistingFile);
    app.add_option("--out", out_path, "CSV output path (default: stdout)");
    auto* o_ratio = app.add_option("--drive-ratio", drive_ratio, "drive amplitude as a multiple of b1c_in");
    auto* o_b1 = app.add_option("--b1in", b1in, "absolute drive amplitude b1_in");
    auto* o_wmin = app.add_option("--omega-min", omega_min, "sweep start (units of omega0)");
    auto* o_wmax = app.add_option("--omega-max", omega_max, "sweep end (units of omega0)");
    auto* o_pts = app.add_option("--points", points, "sweep grid points");
    auto* o_dir = app.add_option("--direction", direction, "sweep direction")->check(CLI::IsMember({"up", "down"}));
    auto* o_seed = app.add_option("--seed", seed, "stochastic oracle seed")->check(CLI::NonNegativeNumber);
    auto* o_wp = app.add_option("--omega-p", omega_p, "drive frequency for single-point commands");
    auto* o_lambda = app.add_option("--lambda", lambda, "signal-detector coupling lambda (units of omega0)");
    app.add_option("--set", assignments, "override any config key: --set key=value");
    bool all = false;
    app.add_flag("--all-branches", all, "sweep: list every steady state instead of following one branch");
    o_ratio->excludes(o_b1);

    struct Command {
        const char* name;
        const char* help;
        void (*fn)(const RunConfig&, const Outputs&);
        CLI::App* sub = nullptr;
    };
    std::vector<Command> commands = {
        {"response", "steady states at one drive frequency", cmd_response},
        {"onset", "critical point of bistability", cmd_onset},
        {"dephasing", "dephasing rate and sensitivity at one drive frequency", cmd_dephasing},
        {"sweep", "hysteretic frequency sweep with dephasing rate", cmd_sweep},
        {"modes", "transmission-line eigenmodes and coupling constants", cmd_modes},
        {"sde", "stochastic Langevin oracle", cmd_sde},
        {"fock", "truncated Fock-space distinguishability oracle", cmd_fock}};
    for (Command& c : commands) {
        c.sub = app.add_subcommand(c.name, c.help);
    }

    std::vector<std::string> argv_store;
    argv_store.emplace_back("kerrqnd");
    argv_store.insert(argv_store.end(), args.begin(), args.end());
    std::vector<char*> argv;
    for (auto& s : argv_store) {
        argv.push_back(s.data());
    }

    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        app.exit(e, out, err);
        return kExitParameter;
    }

    try {
        Settings flags;
        const std::string src = "command line";
        if (*o_ratio) flags.set("drive_ratio", format_number(drive_ratio), src);
        if (*o_b1) flags.set("b1_in", format_number(b1in), src);
        if (*o_wmin) flags.set("omega_min", format_number(omega_min), src);
        if (*o_wmax) flags.set("omega_max", format_number(omega_max), src);
        if (*o_pts) flags.set("points", std::to_string(points), src);
        if (*o_dir) flags.set("direction", direction, src);
        if (*o_seed) flags.set("seed", std::to_string(seed), src);
        if (*o_wp) flags.set("omega_p", format_number(omega_p), src);
        if (*o_lambda) flags.set("lambda", format_number(lambda), src);
        if (all) flags.set("all_branches", "1", src);
        Settings overrides;
        for (const std::string& a : assignments) {
            const auto eq = a.find('=');
            if (eq == std::string::npos) {
                throw ParameterError("--set expects key=value (got '" + a + "')");
            }
            overrides.set(a.substr(0, eq), a.substr(eq + 1), "--set");
        }
        overrides.merge_over(flags);
        if (!config_path.empty()) {
            overrides.merge_over(Settings::load(config_path));
        }
        const RunConfig config = build_config(overrides);

        std::ofstream file;
        if (!out_path.empty()) {
            file.open(out_path, std::ios::binary);
            if (!file) {
                throw ParameterError("cannot open output file " + out_path);
            }
        }
        const Outputs outputs{out_path.empty() ? out : file, out_path.empty() ? err : out};
        for (const Command& c : commands) {
            if (c.sub->parsed()) {
                c.fn(config, outputs);
            }
        }
        if (file.is_open()) {
            file.close();
            if (!file) {
                throw NumericError("failed writing " + out_path);
            }
        }
    } catch (const ParameterError& e) {
        err << "parameter error: " << e.what() << '\n';
        return kExitParameter;
    } catch (const NumericError& e) {
        err << "numeric error: " << e.what() << '\n';
        return kExitNumeric;
    }
    return kExitOk;
}

}  // namespace kerrqnd::cli
