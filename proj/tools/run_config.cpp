#include "run_config.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <string_view>

#include "kerrqnd/errors.hpp"
#include "kerrqnd/meanfield.hpp"

namespace kerrqnd::cli {

namespace {

constexpr std::array kKnownKeys = {
    // detector
    "omega0", "kerr", "gamma1", "gamma2", "gamma3", "phi1", "phi2", "phi3", "beta_hbar_omega0",
    // drive
    "b1_in", "drive_ratio", "omega_p", "psi1",
    // sweep
    "omega_min", "omega_max", "points", "direction", "all_branches",
    // detection
    "lambda", "omega_s",
    // stochastic oracle
    "seed", "sde_dt", "sde_n_traj", "sde_t_relax", "sde_t_sample", "sde_blocks", "sde_batches", "sde_threads",
    "sde_lags",
    // Fock oracle
    "fock_n_max", "fock_t_final", "fock_dt", "fock_signal_photons", "fock_samples",
    // modes
    "profile", "line_length", "line_c", "line_l0", "line_dl", "critical_current", "n_modes", "n_grid",
    "shapes_out"};

std::string_view trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) {
        return {};
    }
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

double to_double(const std::string& key, const std::string& v) {
    double out = 0.0;
    const char* first = v.data();
    const char* last = v.data() + v.size();
    if (!v.empty() && v.front() == '+') {
        ++first;
    }
    const auto [ptr, ec] = std::from_chars(first, last, out);
    if (ec != std::errc() || ptr != last) {
        throw ParameterError("value of '" + key + "' is not a number: '" + v + "'");
    }
    return out;
}

long to_integer(const std::string& key, const std::string& v) {
    const double d = to_double(key, v);
    if (d != std::floor(d) || std::abs(d) > 9.0e15) {
        throw ParameterError("value of '" + key + "' must be an integer: '" + v + "'");
    }
    return static_cast<long>(d);
}

bool to_bool(const std::string& key, const std::string& v) {
    if (v == "1" || v == "true" || v == "yes" || v == "on") {
        return true;
    }
    if (v == "0" || v == "false" || v == "no" || v == "off") {
        return false;
    }
    throw ParameterError("value of '" + key + "' must be a boolean: '" + v + "'");
}

}  // namespace

bool is_known_key(const std::string& key) {
    for (const char* k : kKnownKeys) {
        if (key == k) {
            return true;
        }
    }
    return false;
}

Settings Settings::parse(const std::string& text, const std::string& source) {
    Settings s;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::string_view view(line);
        if (const auto hash = view.find('#'); hash != std::string_view::npos) {
            view = view.substr(0, hash);
        }
        view = trim(view);
        if (view.empty()) {
            continue;
        }
        const auto eq = view.find('=');
        const std::string where = source + ":" + std::to_string(lineno);
        if (eq == std::string_view::npos) {
            throw ParameterError(where + ": expected 'key = value'");
        }
        const std::string key(trim(view.substr(0, eq)));
        const std::string value(trim(view.substr(eq + 1)));
        if (s.has(key)) {
            throw ParameterError(where + ": duplicate key '" + key + "'");
        }
        s.set(key, value, where);
    }
    return s;
}

Settings Settings::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw ParameterError("cannot open config file " + path);
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse(buf.str(), path);
}

void Settings::set(const std::string& key, const std::string& value, const std::string& source) {
    if (!is_known_key(key)) {
        throw ParameterError(source + ": unknown key '" + key + "'");
    }
    if (value.empty()) {
        throw ParameterError(source + ": empty value for '" + key + "'");
    }
    values_[key] = value;
}

void Settings::merge_over(const Settings& lower) {
    const bool drive_here = has("b1_in") || has("drive_ratio");
    for (const auto& [k, v] : lower.values_) {
        if (drive_here && (k == "b1_in" || k == "drive_ratio")) {
            continue;
        }
        values_.try_emplace(k, v);
    }
}

const std::string* Settings::find(const std::string& key) const {
    const auto it = values_.find(key);
    return it == values_.end() ? nullptr : &it->second;
}

double RunConfig::resolve_b1_in() const {
    if (b1_in) {
        return *b1_in;
    }
    if (drive_ratio) {
        return *drive_ratio * onset_of_bistability(detector).b1c_in;
    }
    throw ParameterError("no drive given: set exactly one of b1_in or drive_ratio");
}

DriveParams RunConfig::drive() const {
    DriveParams d;
    d.omega_p = omega_p;
    d.b1_in = resolve_b1_in();
    d.psi1 = psi1;
    d.validate();
    return d;
}

LineProfile RunConfig::line_profile() const {
    if (!profile_path.empty()) {
        return load_profile_table(profile_path, critical_current);
    }
    return LineProfile::uniform(line_length, line_capacitance, line_inductance, line_delta_inductance,
                                critical_current);
}

RunConfig build_config(const Settings& s) {
    RunConfig c;
    auto num = [&](const char* key, double& target) {
        if (const std::string* v = s.find(key)) {
            target = to_double(key, *v);
        }
    };
    auto integer = [&](const char* key, int& target) {
        if (const std::string* v = s.find(key)) {
            target = static_cast<int>(to_integer(key, *v));
        }
    };
    auto text = [&](const char* key, std::string& target) {
        if (const std::string* v = s.find(key)) {
            target = *v;
        }
    };

    DetectorParams& d = c.detector;
    num("omega0", d.omega0);
    num("kerr", d.kerr);
    num("gamma1", d.gamma1);
    num("gamma2", d.gamma2);
    num("gamma3", d.gamma3);
    num("phi1", d.phi1);
    num("phi2", d.phi2);
    num("phi3", d.phi3);
    num("beta_hbar_omega0", d.beta_hbar_omega0);
    d.validate();

    if (s.has("b1_in") && s.has("drive_ratio")) {
        throw ParameterError("conflicting drive: both b1_in and drive_ratio given");
    }
    if (const std::string* v = s.find("b1_in")) {
        c.b1_in = to_double("b1_in", *v);
        if (!(*c.b1_in >= 0.0) || !std::isfinite(*c.b1_in)) {
            throw ParameterError("b1_in must be finite and >= 0");
        }
    }
    if (const std::string* v = s.find("drive_ratio")) {
        c.drive_ratio = to_double("drive_ratio", *v);
        if (!(*c.drive_ratio >= 0.0) || !std::isfinite(*c.drive_ratio)) {
            throw ParameterError("drive_ratio must be finite and >= 0");
        }
    }
    c.omega_p = d.omega0;
    num("omega_p", c.omega_p);
    num("psi1", c.psi1);

    num("omega_min", c.omega_min);
    num("omega_max", c.omega_max);
    integer("points", c.points);
    if (c.points < 2) {
        throw ParameterError("points must be >= 2");
    }
    if (const std::string* v = s.find("direction")) {
        if (*v == "up") {
            c.direction = SweepDirection::up;
        } else if (*v == "down") {
            c.direction = SweepDirection::down;
        } else {
            throw ParameterError("direction must be 'up' or 'down' (got '" + *v + "')");
        }
    }
    if (const std::string* v = s.find("all_branches")) {
        c.all_branches = to_bool("all_branches", *v);
    }

    num("lambda", c.detection.lambda_coupling);
    num("omega_s", c.detection.omega_s);

    if (const std::string* v = s.find("seed")) {
        const long seed = to_integer("seed", *v);
        if (seed < 0) {
            throw ParameterError("seed must be >= 0");
        }
        c.sde.seed = static_cast<std::uint64_t>(seed);
    }
    num("sde_dt", c.sde.dt);
    c.sde.n_traj = 1000;
    integer("sde_n_traj", c.sde.n_traj);
    num("sde_t_relax", c.sde.t_relax);
    num("sde_t_sample", c.sde.t_sample);
    integer("sde_blocks", c.sde.blocks_per_traj);
    integer("sde_batches", c.sde.n_batches);
    integer("sde_threads", c.sde.n_threads);
    if (const std::string* v = s.find("sde_lags")) {
        std::istringstream in(*v);
        std::string item;
        while (std::getline(in, item, ',')) {
            c.sde.lags.push_back(to_double("sde_lags", std::string(trim(item))));
        }
    }
    c.sde.lambda_coupling = c.detection.lambda_coupling;

    integer("fock_n_max", c.fock.n_max);
    num("fock_t_final", c.fock.t_final);
    num("fock_dt", c.fock.dt);
    integer("fock_signal_photons", c.fock.signal_photons);
    integer("fock_samples", c.fock.n_samples);
    c.fock.lambda_coupling = c.detection.lambda_coupling;

    text("profile", c.profile_path);
    num("line_length", c.line_length);
    num("line_c", c.line_capacitance);
    num("line_l0", c.line_inductance);
    num("line_dl", c.line_delta_inductance);
    num("critical_current", c.critical_current);
    integer("n_modes", c.n_modes);
    integer("n_grid", c.n_grid);
    text("shapes_out", c.shapes_out);
    return c;
}

}  // namespace kerrqnd::cli
