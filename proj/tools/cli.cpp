#include "cli.hpp"

#include "redmat/assembly.hpp"
#include "redmat/bench.hpp"
#include "redmat/export.hpp"
#include "redmat/generators.hpp"
#include "redmat/invariants.hpp"
#include "redmat/kernels.hpp"
#include "redmat/model_io.hpp"
#include "redmat/redundancy.hpp"
#include "redmat/version.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <ostream>
#include <sstream>

namespace redmat::cli {

namespace {

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Common {
    int threads = 1;
    std::optional<double> rank_tol;
    std::string kernel = "qr";
};

void add_common(CLI::App* cmd, Common& c)
{
    cmd->add_option("--threads", c.threads, "Threads for the parallel kernels")->check(CLI::PositiveNumber);
    cmd->add_option("--rank-tol", c.rank_tol,
                    "Relative rank tolerance (default max(n_q,n)*eps; env REDMAT_RANK_TOL)")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--kernel", c.kernel, "Kernel extraction: qr (sparse QR) or svd (dense fallback)")
        ->check(CLI::IsMember({"qr", "svd"}));
}

std::optional<double> env_double(const char* name)
{
    const char* v = std::getenv(name);
    if (!v || !*v) return std::nullopt;
    char* end = nullptr;
    const double d = std::strtod(v, &end);
    if (*end != '\0' || !(d > 0.0)) throw UsageError(std::string("invalid value for ") + name + ": " + v);
    return d;
}

RedundancyOptions redundancy_options(const Common& c)
{
    RedundancyOptions o;
    o.kernel = c.kernel == "svd" ? KernelMethod::dense_svd : KernelMethod::sparse_qr;
    o.rank_tolerance = c.rank_tol ? c.rank_tol : env_double("REDMAT_RANK_TOL");
    kernels::set_threads(c.threads);
    return o;
}

void print_counts(std::ostream& out, const ModelCounts& c)
{
    out << "n = " << c.n << '\n'
        << "n_q = " << c.n_q << '\n'
        << "n_e = " << c.n_e << '\n';
    if (c.n_s) out << "n_s = " << *c.n_s << '\n';
    if (c.alpha) out << "alpha = " << std::fixed << std::setprecision(6) << *c.alpha << std::defaultfloat << '\n';
}

StructuralModel load_valid_model(const std::string& path, std::ostream& err)
{
    StructuralModel model = read_model(path);
    const auto report = validate_model(model);
    for (const auto& w : report.warnings()) err << "warning: " << w << '\n';
    if (!report.ok()) {
        std::ostringstream os;
        os << "validation failed for " << path << ':';
        for (const auto& e : report.errors()) os << "\n  " << e;
        throw ModelError(os.str());
    }
    return model;
}

// ---------------------------------------------------------------- generate

struct GenerateArgs {
    std::string family;
    int n = 0;
    std::optional<double> alpha;
    std::string out_path;
    std::optional<std::uint64_t> jitter_seed;
    double jitter_spread = 0.5;
    std::optional<double> radius, height, cell, sag_ratio, rise_ratio;
};

int cmd_generate(const GenerateArgs& a, std::ostream& out, std::ostream& err)
{
    GeneratorSpec spec;
    spec.family = parse_family(a.family);
    spec.n = a.n;
    if (a.alpha) {
        if (spec.family != Family::cylinder) throw UsageError("--alpha only applies to the cylinder family");
        spec.alpha_target = *a.alpha;
    }
    if (a.radius) spec.radius = *a.radius;
    if (a.height) spec.height = *a.height;
    if (a.cell) spec.cell = *a.cell;
    if (a.sag_ratio) spec.sag_ratio = *a.sag_ratio;
    if (a.rise_ratio) spec.rise_ratio = *a.rise_ratio;

    StructuralModel model = generate(spec);
    if (a.jitter_seed) model = apply_stiffness_jitter(std::move(model), *a.jitter_seed, a.jitter_spread);

    const AssembledSystem sys = assemble(model);
    const ModelCounts c = rank_and_indeterminacy(sys);
    if (!a.out_path.empty()) {
        write_model(model, a.out_path);
        err << "wrote " << a.out_path << '\n';
    }
    out << "family = " << to_string(spec.family) << '\n';
    print_counts(out, c);
    return kOk;
}

// ----------------------------------------------------------------- analyze

struct AnalyzeArgs {
    std::string model_path;
    std::string task = "diag";
    std::string method = "efficient";
    std::string out_path;
    bool to_stdout = false;
    std::string dump_prefix;
    Common common;
};

void write_result(std::ostream& os, const RedundancyResult& r)
{
    if (r.payload == Payload::diagonal)
        write_diagonal_csv(os, r);
    else
        write_coordinate(os, *r.full, r.rows, r.rows);
}

int cmd_analyze(const AnalyzeArgs& a, std::ostream& out, std::ostream& err)
{
    const auto options = redundancy_options(a.common);
    const StructuralModel model = load_valid_model(a.model_path, err);
    const AssembledSystem sys = assemble(model);
    if (!a.dump_prefix.empty()) dump_system(sys, a.dump_prefix);

    const ModelCounts c = rank_and_indeterminacy(sys, options);
    print_counts(out, c);

    const Payload task = a.task == "full" ? Payload::full : Payload::diagonal;
    std::vector<Method> methods;
    if (a.method != "efficient") methods.push_back(Method::canonical);
    if (a.method != "canonical") methods.push_back(Method::efficient);

    std::vector<RedundancyResult> results;
    for (Method m : methods) {
        results.push_back(compute_redundancy(sys, task, m, options));
        const auto& r = results.back();
        out << "[" << to_string(m) << "] trace = " << std::fixed << std::setprecision(6) << r.trace
            << std::defaultfloat << '\n'
            << "[" << to_string(m) << "] |trace - n_s| = " << std::scientific << std::setprecision(3)
            << std::abs(r.trace - *c.n_s) << '\n'
            << "[" << to_string(m) << "] time_s = " << r.wall_time << std::defaultfloat << '\n';
    }
    if (results.size() == 2) {
        const double diff = task == Payload::full
                                ? (*results[0].full - *results[1].full).cwiseAbs().maxCoeff()
                                : (results[0].diagonal - results[1].diagonal).cwiseAbs().maxCoeff();
        out << "max-abs discrepancy = " << std::scientific << std::setprecision(3) << diff << std::defaultfloat
            << '\n';
    }

    const RedundancyResult& chosen = results.back();
    if (a.to_stdout) write_result(out, chosen);
    if (!a.out_path.empty()) {
        std::ofstream f(a.out_path);
        if (!f) throw std::ios_base::failure("cannot write " + a.out_path);
        write_result(f, chosen);
        if (!f) throw std::ios_base::failure("write failed for " + a.out_path);
    }
    return kOk;
}

// ------------------------------------------------------------------- bench

struct BenchArgs {
    std::string family = "cylinder";
    std::string sizes;
    std::vector<double> alphas{0.1};
    std::string task = "diag";
    std::string method = "both";
    int repetitions = 3;
    int warmup = 1;
    std::string out_path;
    std::string gnuplot_dir;
    std::optional<double> mem_cap_gib;
    std::optional<std::uint64_t> jitter_seed;
    Common common;
};

int cmd_bench(const BenchArgs& a, std::ostream& out, std::ostream& err)
{
    SeriesConfig config;
    config.family = parse_family(a.family);
    try {
        config.sizes = parse_size_range(a.sizes);
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    }
    config.alphas = a.alphas;
    if (a.task == "both")
        config.tasks = {Payload::full, Payload::diagonal};
    else
        config.tasks = {a.task == "full" ? Payload::full : Payload::diagonal};
    config.run_canonical = a.method != "efficient";
    config.run_efficient = a.method != "canonical";
    config.jitter_seed = a.jitter_seed;
    config.timing.repetitions = a.repetitions;
    config.timing.warmup = a.warmup;
    config.timing.redundancy = redundancy_options(a.common);
    if (a.mem_cap_gib)
        config.timing.memory_cap_bytes = static_cast<std::int64_t>(*a.mem_cap_gib * double(std::int64_t{1} << 30));
    else if (auto bytes = env_double("REDMAT_MEMORY_CAP_BYTES"))
        config.timing.memory_cap_bytes = static_cast<std::int64_t>(*bytes);

    err << "# protocol: median of " << config.timing.repetitions << " repetitions after " << config.timing.warmup
        << " warm-up run(s); threads = " << kernels::threads() << "; timing covers numbering, assembly and solve\n";
    const auto series = run_series(config, [&](const SeriesCell& c) {
        err << to_string(c.family) << " n=" << c.n << " task=" << to_string(c.task) << " status=" << c.status;
        if (c.speedup) err << " speedup=" << *c.speedup;
        err << '\n';
    });

    if (a.out_path.empty()) {
        write_series_csv(out, series);
    } else {
        std::ofstream f(a.out_path);
        if (!f) throw std::ios_base::failure("cannot write " + a.out_path);
        write_series_csv(f, series);
    }
    if (!a.gnuplot_dir.empty()) write_gnuplot_data(series, a.gnuplot_dir);
    return kOk;
}

// ------------------------------------------------------------------- check

struct CheckArgs {
    std::string model_path;
    double tolerance = 1e-8;
    bool skip_units = false;
    Common common;
};

int cmd_check(const CheckArgs& a, std::ostream& out, std::ostream& err)
{
    redundancy_options(a.common);
    const StructuralModel model = load_valid_model(a.model_path, err);
    InvariantOptions options;
    options.tolerance = a.tolerance;
    options.unit_invariance = !a.skip_units;
    const InvariantReport report = run_invariant_suite(model, options);

    print_counts(out, report.counts);
    out << "trace = " << std::fixed << std::setprecision(6) << report.trace << std::defaultfloat << '\n';
    for (const auto& c : report.checks)
        out << (c.passed ? "PASS " : "FAIL ") << std::left << std::setw(28) << c.name << " measured = "
            << std::scientific << std::setprecision(3) << c.measured << "  limit = " << c.tolerance
            << std::defaultfloat << '\n';
    out << (report.passed() ? "all invariants pass" : "invariant failure") << '\n';
    return report.passed() ? kOk : kInvariantFailure;
}

} // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Redundancy matrices of truss and frame structures"};
    app.require_subcommand(1);
    app.set_version_flag("--version",
                         std::string("redmat ") + kVersion + " (model format " + std::to_string(kModelFormatVersion) +
                             ", result format " + std::to_string(kResultFormatVersion) + ", generator version " +
                             std::to_string(kGeneratorVersion) + ")");

    GenerateArgs gen;
    auto* g = app.add_subcommand("generate", "Write a benchmark model and print its counts");
    g->add_option("family", gen.family, "cylinder | mero | hypar")->required();
    g->add_option("--n", gen.n, "Size parameter")->required();
    g->add_option("--alpha", gen.alpha, "Target relative indeterminacy (cylinder)");
    g->add_option("--out", gen.out_path, "Model file to write");
    g->add_option("--seed-stiffness-jitter", gen.jitter_seed, "Scale stiffnesses by seeded random factors");
    g->add_option("--jitter-spread", gen.jitter_spread, "Jitter factors lie in [1-s, 1+s]")->capture_default_str();
    g->add_option("--radius", gen.radius);
    g->add_option("--height", gen.height);
    g->add_option("--cell", gen.cell);
    g->add_option("--sag-ratio", gen.sag_ratio);
    g->add_option("--rise-ratio", gen.rise_ratio);

    AnalyzeArgs an;
    auto* a = app.add_subcommand("analyze", "Compute the redundancy matrix or its diagonal");
    a->add_option("model", an.model_path, "Model file")->required();
    a->add_option("--task", an.task, "full | diag")->capture_default_str()->check(CLI::IsMember({"full", "diag"}));
    a->add_option("--method", an.method, "canonical | efficient | both")->capture_default_str()
        ->check(CLI::IsMember({"canonical", "efficient", "both"}));
    auto* out_opt = a->add_option("--out", an.out_path, "Result file (CSV for diag, coordinate text for full)");
    a->add_flag("--stdout", an.to_stdout, "Write the result to standard output")->excludes(out_opt);
    a->add_option("--dump-system", an.dump_prefix, "Write <prefix>_A.mtx and <prefix>_C.mtx");
    add_common(a, an.common);

    BenchArgs be;
    auto* b = app.add_subcommand("bench", "Time canonical against efficient computation");
    b->add_option("--family", be.family, "cylinder | mero | hypar")->capture_default_str();
    b->add_option("--n", be.sizes, "Sizes as a:b:step or a comma list")->required();
    b->add_option("--alpha", be.alphas, "Cylinder alpha targets")->delimiter(',');
    b->add_option("--task", be.task, "full | diag | both")->capture_default_str()->check(CLI::IsMember({"full", "diag", "both"}));
    b->add_option("--method", be.method, "canonical | efficient | both")->capture_default_str()
        ->check(CLI::IsMember({"canonical", "efficient", "both"}));
    b->add_option("--reps", be.repetitions, "Timed repetitions per cell")->capture_default_str()->check(CLI::PositiveNumber);
    b->add_option("--warmup", be.warmup, "Untimed runs per cell")->capture_default_str()->check(CLI::NonNegativeNumber);
    b->add_option("--out", be.out_path, "CSV file (default standard output)");
    b->add_option("--gnuplot-dir", be.gnuplot_dir, "Directory for gnuplot data files");
    b->add_option("--mem-cap-gib", be.mem_cap_gib, "Memory cap for dense payloads (env REDMAT_MEMORY_CAP_BYTES)")
        ->check(CLI::PositiveNumber);
    b->add_option("--seed-stiffness-jitter", be.jitter_seed, "Jitter stiffnesses with this seed");
    add_common(b, be.common);

    CheckArgs ch;
    auto* c = app.add_subcommand("check", "Run the invariant suite on a model");
    c->add_option("model", ch.model_path, "Model file")->required();
    c->add_option("--tol", ch.tolerance, "Tolerance for the matrix identities")->capture_default_str()->check(CLI::PositiveNumber);
    c->add_flag("--no-units", ch.skip_units, "Skip the metre/millimetre comparison");
    add_common(c, ch.common);

    std::vector<const char*> argv;
    for (const auto& s : args) argv.push_back(s.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kOk : kUsageError;
    }

    try {
        if (*g) return cmd_generate(gen, out, err);
        if (*a) return cmd_analyze(an, out, err);
        if (*b) return cmd_bench(be, out, err);
        if (*c) return cmd_check(ch, out, err);
    } catch (const UsageError& e) {
        err << "error: " << e.what() << '\n';
        return kUsageError;
    } catch (const GeneratorError& e) {
        err << "error: " << e.what() << '\n';
        return kUsageError;
    } catch (const ModelFormatError& e) {
        err << "error: " << e.what() << '\n';
        return kUsageError;
    } catch (const ModelError& e) {
        err << "error: " << e.what() << '\n';
        return kUsageError;
    } catch (const KinematicallyIndeterminate& e) {
        err << "error: " << e.what() << '\n';
        return kMechanism;
    } catch (const std::ios_base::failure& e) {
        err << "error: " << e.what() << '\n';
        return kIoError;
    } catch (const std::filesystem::filesystem_error& e) {
        err << "error: " << e.what() << '\n';
        return kIoError;
    }
    return kUsageError;
}

} // namespace redmat::cli
