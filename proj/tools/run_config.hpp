#pragma once

#include <map>
#include <optional>
#include <string>

#include "kerrqnd/detector.hpp"
#include "kerrqnd/fluctuations.hpp"
#include "kerrqnd/modes.hpp"
#include "kerrqnd/oracle.hpp"
#include "kerrqnd/sweep.hpp"

namespace kerrqnd::cli {

/// Flat `key = value` settings. Later layers override earlier ones key by key.
class Settings {
public:
    /// Parses text in `key = value` form; `#` starts a comment. Unknown keys and
    /// malformed lines raise ParameterError naming the source and line.
    static Settings parse(const std::string& text, const std::string& source);
    static Settings load(const std::string& path);

    /// key=value from the command line.
    void set(const std::string& key, const std::string& value, const std::string& source);
    void merge_over(const Settings& lower);

    [[nodiscard]] bool has(const std::string& key) const { return values_.contains(key); }
    [[nodiscard]] const std::string* find(const std::string& key) const;
    [[nodiscard]] const std::map<std::string, std::string>& values() const noexcept { return values_; }

private:
    std::map<std::string, std::string> values_;
};

[[nodiscard]] bool is_known_key(const std::string& key);

struct RunConfig {
    DetectorParams detector = fig1_detector();
    std::optional<double> b1_in;
    std::optional<double> drive_ratio;
    double omega_p = 1.0;
    double psi1 = 0.0;

    double omega_min = 0.8;
    double omega_max = 1.05;
    int points = 2001;
    SweepDirection direction = SweepDirection::up;
    bool all_branches = false;

    DetectionConfig detection{1e-4, 0.0};

    SdeConfig sde;
    FockConfig fock;

    std::string profile_path;
    double line_length = 0.0;
    double line_capacitance = 0.0;
    double line_inductance = 0.0;
    double line_delta_inductance = 0.0;
    double critical_current = 0.0;
    int n_modes = 5;
    int n_grid = 2000;
    std::string shapes_out;

    /// Absolute drive amplitude, resolving drive_ratio against the onset.
    [[nodiscard]] double resolve_b1_in() const;
    [[nodiscard]] DriveParams drive() const;
    [[nodiscard]] LineProfile line_profile() const;
};

/// Builds a RunConfig from merged settings. Exactly one of b1_in and drive_ratio
/// may be present.
[[nodiscard]] RunConfig build_config(const Settings& s);

}  // namespace kerrqnd::cli
