#include "redmat/bench.hpp"

#include "redmat/kernels.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <map>
#include <ostream>
#include <sstream>

namespace redmat {

MemoryCapExceeded::MemoryCapExceeded(std::int64_t required, std::int64_t cap)
    : std::runtime_error("estimated " + std::to_string(required) + " bytes exceeds memory cap of " +
                         std::to_string(cap) + " bytes"),
      required_(required), cap_(cap)
{
}

std::int64_t estimate_peak_bytes(const ModelCounts& counts, Payload task, Method method,
                                 const RedundancyOptions& options)
{
    constexpr std::int64_t word = sizeof(double);
    const std::int64_t n_q = counts.n_q;
    const std::int64_t n = counts.n;
    const std::int64_t n_s = std::max<std::int64_t>(n_q - n, 0);
    const std::int64_t block = std::min<std::int64_t>(options.block_columns, n_q);
    if (method == Method::canonical) {
        const std::int64_t blocks = word * (2 * n * block + n_q * block);
        return task == Payload::full ? word * n_q * n_q + blocks : blocks;
    }
    const std::int64_t basis = 2 * word * n_q * n_s;
    if (options.kernel == KernelMethod::dense_svd) return basis + word * (n_q * n_q + n_q * n);
    return task == Payload::full ? word * n_q * n_q + basis : basis;
}

namespace {

double median(std::vector<double> v)
{
    std::sort(v.begin(), v.end());
    const std::size_t m = v.size() / 2;
    return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

} // namespace

TimedRun time_task(const StructuralModel& model, Payload task, Method method, const TimingOptions& options,
                   const std::string& family, int size)
{
    using Clock = std::chrono::steady_clock;
    const DofMap dofs = build_dof_map(model);
    const ModelCounts c = counts(model, dofs);
    const std::int64_t bytes = estimate_peak_bytes(c, task, method, options.redundancy);
    if (bytes > options.memory_cap_bytes) throw MemoryCapExceeded(bytes, options.memory_cap_bytes);

    auto run_once = [&] {
        const AssembledSystem sys = assemble(model, build_dof_map(model));
        return compute_redundancy(sys, task, method, options.redundancy);
    };

    TimedRun out;
    for (int w = 0; w < options.warmup; ++w) out.result = run_once();
    std::vector<double> times;
    const int reps = std::max(options.repetitions, 1);
    for (int r = 0; r < reps; ++r) {
        const auto start = Clock::now();
        out.result = run_once();
        times.push_back(std::chrono::duration<double>(Clock::now() - start).count());
    }

    auto& rec = out.record;
    rec.family = family;
    rec.n = size;
    rec.alpha_achieved = c.n_q > 0 ? static_cast<double>(c.n_q - c.n) / c.n_q : 0.0;
    rec.task = task;
    rec.method = method;
    rec.wall_time_s = std::max(median(times), std::numeric_limits<double>::min());
    rec.repetitions = reps;
    rec.thread_config = kernels::threads();
    rec.peak_matrix_bytes = bytes;
    return out;
}

SpeedupSeries run_series(const SeriesConfig& config, const std::function<void(const SeriesCell&)>& progress)
{
    SpeedupSeries series;
    const std::vector<double> alphas =
        config.family == Family::cylinder ? config.alphas : std::vector<double>{std::nan("")};

    for (Payload task : config.tasks) {
        for (double alpha : alphas) {
            for (int n : config.sizes) {
                SeriesCell cell;
                cell.family = config.family;
                cell.n = n;
                cell.alpha_target = alpha;
                cell.task = task;
                try {
                    GeneratorSpec spec;
                    spec.family = config.family;
                    spec.n = n;
                    if (!std::isnan(alpha)) spec.alpha_target = alpha;
                    StructuralModel model = generate(spec);
                    if (config.jitter_seed) model = apply_stiffness_jitter(std::move(model), *config.jitter_seed);

                    const AssembledSystem sys = assemble(model);
                    cell.counts = rank_and_indeterminacy(sys, config.timing.redundancy);
                    cell.alpha_achieved = *cell.counts.alpha;

                    for (Method m : {Method::canonical, Method::efficient}) {
                        if (!(m == Method::canonical ? config.run_canonical : config.run_efficient)) continue;
                        const auto bytes = estimate_peak_bytes(cell.counts, task, m, config.timing.redundancy);
                        if (bytes > config.timing.memory_cap_bytes)
                            throw MemoryCapExceeded(bytes, config.timing.memory_cap_bytes);
                    }

                    std::optional<RedundancyResult> canonical_result;
                    if (config.run_canonical) {
                        auto run = time_task(model, task, Method::canonical, config.timing, to_string(config.family), n);
                        cell.canonical = run.record;
                        canonical_result = std::move(run.result);
                    }
                    if (config.run_efficient) {
                        auto run = time_task(model, task, Method::efficient, config.timing, to_string(config.family), n);
                        cell.efficient = run.record;
                        if (canonical_result) {
                            const double diff =
                                task == Payload::full
                                    ? (*run.result.full - *canonical_result->full).cwiseAbs().maxCoeff()
                                    : (run.result.diagonal - canonical_result->diagonal).cwiseAbs().maxCoeff();
                            cell.max_abs_diff = diff;
                            cell.correctness = diff <= config.agreement_tolerance ? "ok" : "mismatch";
                        }
                    }
                    if (cell.canonical && cell.efficient)
                        cell.speedup = cell.canonical->wall_time_s / cell.efficient->wall_time_s;
                } catch (const MemoryCapExceeded&) {
                    cell.status = "skipped:memory";
                } catch (const GeneratorError& e) {
                    cell.status = std::string(e.what()).find("unreachable") != std::string::npos
                                      ? "skipped:unreachable-alpha"
                                      : std::string("error:") + e.what();
                } catch (const std::exception& e) {
                    cell.status = std::string("error:") + e.what();
                }
                if (progress) progress(cell);
                series.cells.push_back(std::move(cell));
            }
        }
    }
    return series;
}

namespace {

std::string csv_escape(const std::string& s)
{
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char ch : s) out += ch == '"' ? std::string("\"\"") : std::string(1, ch);
    return out + "\"";
}

template <typename T>
std::string opt(const std::optional<T>& v)
{
    if (!v) return "";
    std::ostringstream os;
    os << std::setprecision(10) << *v;
    return os.str();
}

std::string alpha_label(double a)
{
    if (std::isnan(a)) return "";
    std::ostringstream os;
    os << a;
    return os.str();
}

} // namespace

void write_series_csv(std::ostream& out, const SpeedupSeries& series)
{
    out << "family,n,alpha,task,method,time_s,speedup,time_canonical_s,time_efficient_s,alpha_target,"
           "n_dof,n_q,n_s,repetitions,threads,peak_matrix_bytes,max_abs_diff,correctness,status\n";
    for (const auto& c : series.cells) {
        const TimingRecord* primary = c.efficient ? &*c.efficient : (c.canonical ? &*c.canonical : nullptr);
        std::optional<double> t_can, t_eff;
        if (c.canonical) t_can = c.canonical->wall_time_s;
        if (c.efficient) t_eff = c.efficient->wall_time_s;
        std::optional<double> alpha;
        if (c.counts.alpha) alpha = *c.counts.alpha;

        out << to_string(c.family) << ',' << c.n << ',' << opt(alpha) << ',' << to_string(c.task) << ','
            << (primary ? to_string(primary->method) : "") << ',' << (primary ? opt(std::optional(primary->wall_time_s)) : "")
            << ',' << opt(c.speedup) << ',' << opt(t_can) << ',' << opt(t_eff) << ',' << alpha_label(c.alpha_target)
            << ',';
        if (c.counts.n_q > 0)
            out << c.counts.n << ',' << c.counts.n_q << ',' << opt(c.counts.n_s);
        else
            out << ",,";
        out << ',' << (primary ? std::to_string(primary->repetitions) : "") << ','
            << (primary ? std::to_string(primary->thread_config) : "") << ','
            << (primary ? std::to_string(std::max(c.canonical ? c.canonical->peak_matrix_bytes : 0,
                                                  c.efficient ? c.efficient->peak_matrix_bytes : 0))
                        : "")
            << ',' << opt(c.max_abs_diff) << ',' << c.correctness << ',' << csv_escape(c.status) << '\n';
    }
}

std::vector<std::filesystem::path> write_gnuplot_data(const SpeedupSeries& series, const std::filesystem::path& dir)
{
    std::filesystem::create_directories(dir);
    std::map<std::string, std::vector<const SeriesCell*>> groups;
    for (const auto& c : series.cells) {
        std::string key = std::string(to_string(c.family)) + "_" + to_string(c.task);
        if (!std::isnan(c.alpha_target)) key += "_alpha" + alpha_label(c.alpha_target);
        groups[key].push_back(&c);
    }
    std::vector<std::filesystem::path> written;
    for (const auto& [key, cells] : groups) {
        const auto path = dir / (key + ".dat");
        std::ofstream out(path);
        if (!out) throw std::ios_base::failure("cannot write " + path.string());
        out << "# " << key << "\n# n time_canonical_s time_efficient_s speedup\n";
        for (const auto* c : cells) {
            if (c->status != "ok") continue;
            auto field = [](const std::optional<double>& v) { return v ? std::to_string(*v) : std::string("NaN"); };
            std::optional<double> t_can, t_eff;
            if (c->canonical) t_can = c->canonical->wall_time_s;
            if (c->efficient) t_eff = c->efficient->wall_time_s;
            out << c->n << ' ' << field(t_can) << ' ' << field(t_eff) << ' ' << field(c->speedup) << '\n';
        }
        written.push_back(path);
    }
    return written;
}

std::vector<int> parse_size_range(const std::string& text)
{
    auto to_int = [&](const std::string& s) {
        std::size_t pos = 0;
        int v = 0;
        try {
            v = std::stoi(s, &pos);
        } catch (const std::exception&) {
            pos = std::string::npos;
        }
        if (pos != s.size() || s.empty()) throw std::invalid_argument("invalid size range '" + text + "'");
        return v;
    };

    std::vector<int> out;
    if (text.find(':') != std::string::npos) {
        std::vector<std::string> parts;
        std::stringstream ss(text);
        for (std::string p; std::getline(ss, p, ':');) parts.push_back(p);
        if (parts.size() < 2 || parts.size() > 3) throw std::invalid_argument("invalid size range '" + text + "'");
        const int lo = to_int(parts[0]), hi = to_int(parts[1]);
        const int step = parts.size() == 3 ? to_int(parts[2]) : 1;
        if (step <= 0 || hi < lo) throw std::invalid_argument("invalid size range '" + text + "'");
        for (int v = lo; v <= hi; v += step) out.push_back(v);
    } else if (!text.empty()) {
        std::stringstream ss(text);
        for (std::string p; std::getline(ss, p, ',');) out.push_back(to_int(p));
    }
    return out;
}

} // namespace redmat
