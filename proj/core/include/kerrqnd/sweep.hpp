#pragma once

#include <optional>
#include <span>
#include <vector>

#include "kerrqnd/detector.hpp"
#include "kerrqnd/fluctuations.hpp"
#include "kerrqnd/meanfield.hpp"

namespace kerrqnd {

enum class SweepDirection { up, down };

enum class RowKind {
    grid,   ///< a requested grid frequency
    jump,   ///< saddle-node where the occupied branch ends
    onset,  ///< infinite-slope point at exactly critical drive
};

/// Branch ids: 0 is the low-amplitude branch, 2 the high-amplitude branch and
/// 1 the unstable middle one. Without bistability every point is on branch 0.
struct SweepRow {
    double omega_p = 0.0;
    double B2 = 0.0;
    double rate = 0.0;  ///< lowest-order 1/tau_phi
    int branch_id = 0;
    bool stable = true;
    bool diverged = false;
    RowKind kind = RowKind::grid;
};

struct JumpPoint {
    double omega_p = 0.0;
    double B2_from = 0.0;
    double B2_to = 0.0;
    int from_branch = 0;
    int to_branch = 0;
    bool coarse_warning = false;  ///< fold not bracketed by adjacent grid points
};

struct SweepTrace {
    SweepDirection direction = SweepDirection::up;
    std::vector<SweepRow> rows;  ///< ascending omega_p for either direction
    std::vector<JumpPoint> jumps;
    std::optional<OnsetPoint> critical;  ///< set when driven exactly at b1c_in
};

/// n points from lo to hi inclusive.
[[nodiscard]] std::vector<double> linear_grid(double lo, double hi, int n);

/// Adiabatic sweep that stays on the occupied stable branch until it ends at a
/// fold, then jumps to the surviving one. The grid must be strictly monotone.
[[nodiscard]] SweepTrace frequency_sweep(const DetectorParams& params, double b1_in,
                                         std::span<const double> omega_grid, SweepDirection direction,
                                         const DetectionConfig& det);

/// Every steady state at every grid point, including unstable ones, ascending
/// in omega_p then B^2.
[[nodiscard]] std::vector<SweepRow> all_branches(const DetectorParams& params, double b1_in,
                                                 std::span<const double> omega_grid,
                                                 const DetectionConfig& det);

}  // namespace kerrqnd
