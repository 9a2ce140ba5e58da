#include "kerrqnd/sweep.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "kerrqnd/errors.hpp"

namespace kerrqnd {

namespace {

constexpr double kCriticalDriveTolerance = 1e-9;

/// Labels roots by branch using the two fold energies.
class BranchLabeler {
public:
    BranchLabeler(const DetectorParams& params, std::vector<FoldPoint> folds)
        : params_(params), folds_(std::move(folds)) {
        if (folds_.size() != 2) {
            folds_.clear();
            return;
        }
        s_fold_ = params.kerr < 0.0 ? 1.0 : -1.0;
        e_lo_ = std::min(folds_[0].B2, folds_[1].B2);
        e_hi_ = std::max(folds_[0].B2, folds_[1].B2);
    }

    [[nodiscard]] bool bistable() const noexcept { return !folds_.empty(); }
    [[nodiscard]] double s_fold() const noexcept { return s_fold_; }

    [[nodiscard]] std::vector<int> label(const std::vector<MeanFieldBranch>& roots, double detuning) const {
        std::vector<int> ids(roots.size(), 0);
        if (!bistable()) {
            return ids;
        }
        if (roots.size() == 3) {
            ids = {0, 1, 2};
            return ids;
        }
        for (std::size_t i = 0; i < roots.size(); ++i) {
            const double e = roots[i].B2;
            const double s = (detuning + params_.kerr * e) < 0.0 ? -1.0 : 1.0;
            if (s != s_fold_ || e > e_hi_) {
                ids[i] = 2;
            } else if (e < e_lo_) {
                ids[i] = 0;
            } else {
                ids[i] = 1;
            }
        }
        return ids;
    }

    /// The fold where a stable outer branch (0 or 2) terminates.
    [[nodiscard]] const FoldPoint& fold_of(int branch_id) const {
        const bool lower_energy = branch_id == 0;
        const bool first_is_lower = folds_[0].B2 < folds_[1].B2;
        return (lower_energy == first_is_lower) ? folds_[0] : folds_[1];
    }

private:
    const DetectorParams& params_;
    std::vector<FoldPoint> folds_;
    double s_fold_ = 1.0;
    double e_lo_ = 0.0;
    double e_hi_ = 0.0;
};

SweepRow make_row(const DetectorParams& params, const DriveParams& drive, const MeanFieldBranch& br, int id,
                  const DetectionConfig& det, RowKind kind) {
    SweepRow row;
    row.omega_p = drive.omega_p;
    row.B2 = br.B2;
    row.branch_id = id;
    row.stable = br.stable;
    row.kind = kind;
    row.rate = lowest_order_rate(params, drive, br.B2, det.lambda_coupling);
    const double sum = (br.lambda0 + br.lambda1).real();
    const double product = (br.lambda0 * br.lambda1).real();
    row.diverged = product < kDivergenceThreshold * sum * sum / 4.0;
    return row;
}

/// A marginal row placed exactly on a fold or the onset point.
SweepRow marginal_row(const DetectorParams& params, const DriveParams& drive, double B2, int id,
                      const DetectionConfig& det, RowKind kind) {
    SweepRow row = make_row(params, drive, branch_at(params, drive, B2), id, det, kind);
    row.stable = true;
    row.diverged = true;
    return row;
}

std::vector<double> ascending_grid(std::span<const double> grid) {
    if (grid.size() < 2) {
        throw ParameterError("frequency grid needs at least 2 points");
    }
    std::vector<double> out(grid.begin(), grid.end());
    for (double w : out) {
        if (!std::isfinite(w)) {
            throw ParameterError("frequency grid contains a non-finite value");
        }
    }
    if (out.front() > out.back()) {
        std::reverse(out.begin(), out.end());
    }
    for (std::size_t i = 1; i < out.size(); ++i) {
        if (!(out[i] > out[i - 1])) {
            throw ParameterError("frequency grid must be strictly monotone");
        }
    }
    return out;
}

void drop_grid_rows_near(std::vector<SweepRow>& rows, double omega) {
    std::erase_if(rows, [omega](const SweepRow& r) {
        return r.kind == RowKind::grid && std::abs(r.omega_p - omega) <= 1e-12 * std::abs(omega);
    });
}

}  // namespace

std::vector<double> linear_grid(double lo, double hi, int n) {
    if (n < 2) {
        throw ParameterError("grid needs at least 2 points (got " + std::to_string(n) + ")");
    }
    if (!std::isfinite(lo) || !std::isfinite(hi) || !(lo < hi)) {
        throw ParameterError("grid bounds must be finite with lo < hi");
    }
    std::vector<double> g(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        g[static_cast<std::size_t>(i)] = lo + (hi - lo) * i / (n - 1);
    }
    g.back() = hi;
    return g;
}

SweepTrace frequency_sweep(const DetectorParams& params, double b1_in, std::span<const double> omega_grid,
                           SweepDirection direction, const DetectionConfig& det) {
    params.validate();
    const std::vector<double> omegas = ascending_grid(omega_grid);
    DriveParams drive;
    drive.b1_in = b1_in;
    drive.validate();

    SweepTrace trace;
    trace.direction = direction;
    const BranchLabeler labeler(params, fold_points(params, b1_in));

    const int n = static_cast<int>(omegas.size());
    const bool up = direction == SweepDirection::up;
    // Entering the bistable window from its own side of the resonance puts the
    // sweep on the branch that continues there.
    const int preferred = ((labeler.s_fold() > 0.0) == up) ? 0 : 2;
    int current = -1;
    double prev_omega = 0.0;

    for (int k = 0; k < n; ++k) {
        const double omega = omegas[static_cast<std::size_t>(up ? k : n - 1 - k)];
        drive.omega_p = omega;
        const std::vector<MeanFieldBranch> roots = solve_response(params, drive);
        const std::vector<int> ids = labeler.label(roots, drive.detuning(params));

        auto find = [&](int id) {
            const auto it = std::find(ids.begin(), ids.end(), id);
            return it == ids.end() ? -1 : static_cast<int>(it - ids.begin());
        };

        int pick = -1;
        if (current < 0) {
            pick = find(preferred);
            if (pick < 0) {
                pick = ids.size() == 1 ? 0 : find(preferred == 0 ? 2 : 0);
            }
        } else {
            pick = find(current);
            if (pick < 0 && labeler.bistable() && current != 1) {
                const FoldPoint& fold = labeler.fold_of(current);
                const int target = current == 0 ? 2 : 0;
                JumpPoint jump;
                jump.omega_p = fold.omega_p;
                jump.B2_from = fold.B2;
                jump.from_branch = current;
                jump.to_branch = target;
                jump.coarse_warning = !(std::min(prev_omega, omega) <= fold.omega_p &&
                                        fold.omega_p <= std::max(prev_omega, omega));
                DriveParams at_fold = drive;
                at_fold.omega_p = fold.omega_p;
                const std::vector<MeanFieldBranch> landing = solve_response(params, at_fold);
                double best = -1.0;
                for (const MeanFieldBranch& b : landing) {
                    if (std::abs(b.B2 - fold.B2) > best) {
                        best = std::abs(b.B2 - fold.B2);
                        jump.B2_to = b.B2;
                    }
                }
                trace.jumps.push_back(jump);
                trace.rows.push_back(marginal_row(params, at_fold, fold.B2, current, det, RowKind::jump));
                pick = find(target);
            }
            if (pick < 0) {
                // Fallback: the most stable root available.
                pick = 0;
                for (std::size_t i = 0; i < roots.size(); ++i) {
                    if (roots[i].stable) {
                        pick = static_cast<int>(i);
                        break;
                    }
                }
            }
        }
        current = ids[static_cast<std::size_t>(pick)];
        trace.rows.push_back(make_row(params, drive, roots[static_cast<std::size_t>(pick)], current, det,
                                      RowKind::grid));
        prev_omega = omega;
    }

    if (has_bistability(params) && b1_in > 0.0) {
        const OnsetPoint onset = onset_of_bistability(params);
        if (std::abs(b1_in / onset.b1c_in - 1.0) <= kCriticalDriveTolerance) {
            trace.critical = onset;
            if (onset.omega_pc >= omegas.front() && onset.omega_pc <= omegas.back()) {
                DriveParams at_onset = drive;
                at_onset.omega_p = onset.omega_pc;
                drop_grid_rows_near(trace.rows, onset.omega_pc);
                trace.rows.push_back(marginal_row(params, at_onset, onset.B2_c, 0, det, RowKind::onset));
            }
        }
    }
    for (const JumpPoint& j : trace.jumps) {
        drop_grid_rows_near(trace.rows, j.omega_p);
    }

    std::stable_sort(trace.rows.begin(), trace.rows.end(),
                     [](const SweepRow& a, const SweepRow& b) { return a.omega_p < b.omega_p; });
    return trace;
}

std::vector<SweepRow> all_branches(const DetectorParams& params, double b1_in, std::span<const double> omega_grid,
                                   const DetectionConfig& det) {
    params.validate();
    const std::vector<double> omegas = ascending_grid(omega_grid);
    DriveParams drive;
    drive.b1_in = b1_in;
    drive.validate();
    const BranchLabeler labeler(params, fold_points(params, b1_in));

    std::vector<SweepRow> rows;
    for (double omega : omegas) {
        drive.omega_p = omega;
        const std::vector<MeanFieldBranch> roots = solve_response(params, drive);
        const std::vector<int> ids = labeler.label(roots, drive.detuning(params));
        for (std::size_t i = 0; i < roots.size(); ++i) {
            rows.push_back(make_row(params, drive, roots[i], ids[i], det, RowKind::grid));
        }
    }
    return rows;
}

}  // namespace kerrqnd
