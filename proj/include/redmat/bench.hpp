#pragma once

#include "redmat/generators.hpp"
#include "redmat/redundancy.hpp"

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace redmat {

inline constexpr std::int64_t kDefaultMemoryCapBytes = std::int64_t{8} << 30;

class MemoryCapExceeded : public std::runtime_error {
public:
    MemoryCapExceeded(std::int64_t required, std::int64_t cap);
    std::int64_t required() const noexcept { return required_; }
    std::int64_t cap() const noexcept { return cap_; }

private:
    std::int64_t required_;
    std::int64_t cap_;
};

struct TimingRecord {
    std::string family;
    int n = 0;
    double alpha_achieved = 0.0;
    Payload task = Payload::diagonal;
    Method method = Method::canonical;
    double wall_time_s = 0.0; // median over repetitions
    int repetitions = 0;
    int thread_config = 1;
    std::int64_t peak_matrix_bytes = 0;
};

struct TimingOptions {
    int repetitions = 3;
    int warmup = 1;
    std::int64_t memory_cap_bytes = kDefaultMemoryCapBytes;
    RedundancyOptions redundancy;
};

/// Estimated bytes of the dense payloads one method allocates.
std::int64_t estimate_peak_bytes(const ModelCounts& counts, Payload task, Method method,
                                 const RedundancyOptions& options = {});

struct TimedRun {
    TimingRecord record;
    RedundancyResult result; // from the last repetition
};

/// Median wall time of numbering + assembly + redundancy computation after
/// `warmup` untimed runs. Throws MemoryCapExceeded before running when the
/// estimate is above the cap.
TimedRun time_task(const StructuralModel& model, Payload task, Method method, const TimingOptions& options = {},
                   const std::string& family = "custom", int size = 0);

struct SeriesConfig {
    Family family = Family::cylinder;
    std::vector<int> sizes;
    std::vector<double> alphas{0.1}; // cylinder targets; ignored by the other families
    std::vector<Payload> tasks{Payload::diagonal};
    bool run_canonical = true;
    bool run_efficient = true;
    std::optional<std::uint64_t> jitter_seed;
    double agreement_tolerance = 1e-8;
    TimingOptions timing;
};

struct SeriesCell {
    Family family = Family::cylinder;
    int n = 0;
    double alpha_target = 0.0;
    double alpha_achieved = 0.0;
    Payload task = Payload::diagonal;
    ModelCounts counts;
    std::optional<TimingRecord> canonical;
    std::optional<TimingRecord> efficient;
    std::optional<double> speedup; // t_canonical / t_efficient
    std::optional<double> max_abs_diff;
    std::string correctness = "n/a"; // ok | mismatch | n/a
    std::string status = "ok";       // ok | skipped:memory | skipped:unreachable-alpha | error:<what>
};

struct SpeedupSeries {
    std::vector<SeriesCell> cells;
};

/// Runs the (size x alpha x task) grid cell by cell in a fixed order.
/// Cells that cannot run are kept and annotated instead of aborting.
SpeedupSeries run_series(const SeriesConfig& config,
                         const std::function<void(const SeriesCell&)>& progress = {});

/// One row per cell:
/// family,n,alpha,task,method,time_s,speedup,time_canonical_s,time_efficient_s,
/// alpha_target,n_dof,n_q,n_s,repetitions,threads,peak_matrix_bytes,max_abs_diff,correctness,status
void write_series_csv(std::ostream& out, const SpeedupSeries& series);

/// Gnuplot data, one file per (task, alpha target):
/// columns n, time_canonical_s, time_efficient_s, speedup.
std::vector<std::filesystem::path> write_gnuplot_data(const SpeedupSeries& series, const std::filesystem::path& dir);

/// Parses "a:b:s" (inclusive), "a:b" (step 1), or a comma list.
std::vector<int> parse_size_range(const std::string& text);

} // namespace redmat
