// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include "support.hpp"

#include "cli.hpp"
#include "redmat/bench.hpp"
#include "redmat/generators.hpp"
#include "redmat/invariants.hpp"
#include "redmat/kernels.hpp"
#include "redmat/model_io.hpp"
#include "redmat/redundancy.hpp"

#include <Eigen/Geometry>

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>
#include <limits>
#include <map>
#include <random>
#include <sstream>

using namespace redmat;
using namespace redmat::testing;

namespace {

using Clock = std::chrono::steady_clock;

struct Verdict {
    bool passed = false;
    std::string detail;
};

double seconds_since(Clock::time_point t) { return std::chrono::duration<double>(Clock::now() - t).count(); }

std::string fmt(const char* f, auto... args)
{
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

GeneratorSpec spec_of(Family f, int n, double alpha = 0.1)
{
    GeneratorSpec s;
    s.family = f;
    s.n = n;
    s.alpha_target = alpha;
    return s;
}

// Rank of C^1/2 A by dense SVD with the max(n_q, n) * eps convention.
int independent_rank(const AssembledSystem& sys)
{
    const double eps = std::numeric_limits<double>::epsilon();
    return dense_rank(sys, double(std::max(sys.A.rows(), sys.A.cols())) * eps);
}

Verdict mero_indeterminacy()
{
    const auto start = Clock::now();
    const auto path = std::filesystem::temp_directory_path() / "redmat_acceptance_mero6.json";
    std::ostringstream out, err;
    const int code = cli::run({"redmat", "generate", "mero", "--n", "6", "--out", path.string()}, out, err);
    if (code != 0) return {false, "generate failed: " + err.str()};
    const auto counts = rank_and_indeterminacy(assemble(read_model(path)));
    std::filesystem::remove(path);
    const double t = seconds_since(start);
    const bool printed = out.str().find("n_s = 45") != std::string::npos;
    return {*counts.n_s == 45 && printed && t < 1.0,
            fmt("n_s = %d, printed = %s, %.3f s (limit 1 s)", *counts.n_s, printed ? "yes" : "no", t)};
}

Verdict mero_corner_bars()
{
    const StructuralModel m = gen_mero(spec_of(Family::mero, 6));
    const AssembledSystem sys = assemble(m);
    const double width = 6.0;
    std::vector<int> corners;
    for (const auto& nd : m.nodes) {
        const bool cx = std::abs(nd.position.x()) < 1e-9 || std::abs(nd.position.x() - width) < 1e-9;
        const bool cy = std::abs(nd.position.y()) < 1e-9 || std::abs(nd.position.y() - width) < 1e-9;
        if (cx && cy) corners.push_back(nd.id);
    }
    std::map<int, int> per_corner;
    std::vector<int> bars;
    for (const auto& e : m.elements)
        for (int c : corners)
            if (e.node_ids[0] == c || e.node_ids[1] == c) {
                ++per_corner[c];
                bars.push_back(e.id);
            }
    const auto canonical = redundancy_diag_canonical(sys);
    const auto efficient = compute_redundancy(sys, Payload::diagonal, Method::efficient);
    double worst = 0.0;
    for (std::size_t row = 0; row < sys.row_index.size(); ++row)
        if (std::find(bars.begin(), bars.end(), sys.row_index[row].element_id) != bars.end())
            worst = std::max({worst, std::abs(canonical.diagonal(row)), std::abs(efficient.diagonal(row))});
    bool three_each = corners.size() == 4;
    for (const auto& [c, k] : per_corner) three_each = three_each && k == 3;
    return {three_each && bars.size() == 12 && worst <= 1e-8,
            fmt("%zu corners, %zu corner bars, max |r_ii| = %.2e (limit 1e-8)", corners.size(), bars.size(), worst)};
}

Verdict cylinder_alpha_targets()
{
    bool ok = true;
    std::string detail;
    for (double target : {0.1, 0.25, 0.4}) {
        const AssembledSystem sys = assemble(gen_cylinder(spec_of(Family::cylinder, 8, target)));
        const double alpha = double(sys.A.rows() - independent_rank(sys)) / double(sys.A.rows());
        ok = ok && std::abs(alpha - target) <= 0.02;
        detail += fmt("%s%.2f -> %.4f", detail.empty() ? "" : ", ", target, alpha);
    }
    return {ok, "n = 8, dense-SVD alpha: " + detail + " (limit +-0.02)"};
}

Verdict hypar_alpha_limit()
{
    const auto start = Clock::now();
    std::map<int, double> alpha;
    for (int n : {4, 8, 16}) alpha[n] = *rank_and_indeterminacy(assemble(gen_hypar_frame(spec_of(Family::hypar, n)))).alpha;
    const double t = seconds_since(start);
    const bool ok = alpha[4] > alpha[8] && alpha[8] > alpha[16] && alpha[16] - 0.5 < alpha[4] - 0.5 && alpha[16] > 0.5 &&
                    t < 10.0;
    return {ok, fmt("alpha(4) = %.4f, alpha(8) = %.4f, alpha(16) = %.4f, %.2f s (limit 10 s)", alpha[4], alpha[8],
                    alpha[16], t)};
}

Verdict mero_alpha_limit()
{
    const auto start = Clock::now();
    const auto c = rank_and_indeterminacy(assemble(gen_mero(spec_of(Family::mero, 60))));
    return {*c.alpha >= 0.22 && *c.alpha <= 0.26,
            fmt("alpha(60) = %.4f (n_q = %d, n_s = %d), %.1f s", *c.alpha, c.n_q, *c.n_s, seconds_since(start))};
}

struct DeskModel {
    std::string name;
    StructuralModel model;
};

std::vector<DeskModel> desk_models()
{
    std::vector<DeskModel> out;
    for (auto [n, a] : std::vector<std::pair<int, double>>{{6, 0.1}, {8, 0.25}, {10, 0.4}, {16, 0.25}, {24, 0.1}, {30, 0.4}})
        out.push_back({fmt("cylinder n=%d alpha=%.2f", n, a), gen_cylinder(spec_of(Family::cylinder, n, a))});
    for (int n : {4, 6, 10, 16, 24}) out.push_back({fmt("mero n=%d", n), gen_mero(spec_of(Family::mero, n))});
    for (int n : {3, 6, 10, 18}) out.push_back({fmt("hypar n=%d", n), gen_hypar_frame(spec_of(Family::hypar, n))});
    return out;
}

Verdict oracle_equivalence(const std::vector<DeskModel>& models)
{
    const auto start = Clock::now();
    double worst_full = 0.0, worst_diag = 0.0, worst_trace = 0.0;
    int largest = 0;
    std::map<Family, int> seen;
    for (const auto& dm : models) {
        const AssembledSystem sys = assemble(dm.model);
        largest = std::max(largest, int(sys.A.rows()));
        const int n_s = *rank_and_indeterminacy(sys).n_s;
        const auto fc = redundancy_canonical(sys);
        const auto fe = compute_redundancy(sys, Payload::full, Method::efficient);
        const auto dc = redundancy_diag_canonical(sys);
        const auto de = compute_redundancy(sys, Payload::diagonal, Method::efficient);
        const double full = max_abs(*fc.full - *fe.full);
        const double diag = std::max(max_abs(dc.diagonal - de.diagonal), max_abs(dc.diagonal - fc.diagonal));
        const double trace = std::max({std::abs(fc.trace - n_s), std::abs(fe.trace - n_s), std::abs(dc.trace - n_s),
                                       std::abs(de.trace - n_s)});
        std::printf("    %-26s n_q = %5d  n_s = %5d  full %.2e  diag %.2e  trace %.2e\n", dm.name.c_str(),
                    int(sys.A.rows()), n_s, full, diag, trace);
        worst_full = std::max(worst_full, full);
        worst_diag = std::max(worst_diag, diag);
        worst_trace = std::max(worst_trace, trace);
    }
    const double t = seconds_since(start);
    const bool ok = models.size() >= 12 && largest <= 5000 && worst_full <= 1e-8 && worst_diag <= 1e-8 &&
                    worst_trace <= 1e-6 && t < 300.0;
    return {ok, fmt("%zu models, largest n_q = %d, full %.2e, diag %.2e (limit 1e-8), trace %.2e (limit 1e-6), "
                    "%.1f s (limit 300 s)",
                    models.size(), largest, worst_full, worst_diag, worst_trace, t)};
}

Verdict projector_suite(const std::vector<DeskModel>& models)
{
    const char* wanted[] = {"projector_canonical",     "projector_efficient",       "diagonal_bounds",
                            "rank_R",                  "self_stress_symmetry",      "eigen_kernel_lambda1",
                            "eigen_image_lambda0",     "generalized_eigen_CR",      "generalized_eigen_CR_image",
                            "complement_identity"};
    InvariantOptions options;
    options.tolerance = 1e-8;
    options.rank_tau = 1e-8;
    bool ok = true;
    std::map<std::string, double> worst;
    std::string failures;
    int count = 0;
    for (const auto& dm : models) {
        const AssembledSystem sys = assemble(dm.model);
        if (sys.A.rows() > 2000) continue; // rank(R) needs a dense SVD of R
        ++count;
        const InvariantReport report = run_invariant_suite(sys, options);
        for (const char* name : wanted) {
            const InvariantCheck* c = report.find(name);
            if (!c || !c->passed) {
                ok = false;
                failures += " " + dm.name + ":" + name;
            }
            if (c && std::string(name) != "rank_R") worst[name] = std::max(worst[name], c->measured);
        }
    }
    std::string detail = fmt("%d models with n_q <= 2000;", count);
    for (const auto& [name, v] : worst) detail += fmt(" %s %.1e", name.c_str(), v);
    if (!failures.empty()) detail += " FAILED:" + failures;
    return {ok && count >= 10, detail};
}

Eigen::Matrix3d gram_schmidt_frame(const Eigen::Vector3d& a, const Eigen::Vector3d& b, const Eigen::Vector3d& ref)
{
    const Eigen::Vector3d e1 = (b - a).normalized();
    const Eigen::Vector3d e3 = (ref - ref.dot(e1) * e1).normalized();
    const Eigen::Vector3d e2 = e3.cross(e1);
    Eigen::Matrix3d F;
    F.row(0) = e1;
    F.row(1) = e2;
    F.row(2) = e3;
    return F;
}

Verdict element_oracle()
{
    std::mt19937_64 rng(20240517);
    std::uniform_real_distribution<double> coord(-10.0, 10.0), scale(0.2, 5.0), dir(-1.0, 1.0);
    double worst_k = 0.0, worst_rigid = 0.0;
    const int trials = 200;
    for (int trial = 0; trial < trials; ++trial) {
        const Eigen::Vector3d a(coord(rng), coord(rng), coord(rng));
        Eigen::Vector3d axis(dir(rng), dir(rng), dir(rng));
        axis = axis.normalized() * scale(rng) * 2.0;
        const Eigen::Vector3d b = a + axis;
        Eigen::Vector3d ref(dir(rng), dir(rng), dir(rng));
        if (ref.cross(axis.normalized()).norm() < 0.1) ref = axis.unitOrthogonal();
        const MaterialSection s{210e9 * scale(rng), 1e-2 * scale(rng), 80e9 * scale(rng),
                                1e-6 * scale(rng),  5e-5 * scale(rng), 2e-5 * scale(rng)};
        Element e = beam(1, 1, 2, s);
        e.orientation_ref = ref;
        const ElementFactors f = beam3d_factors(e, a, b);
        const Eigen::MatrixXd K = f.A_e.transpose() * f.C_e_diag.asDiagonal() * f.A_e;
        const Eigen::MatrixXd oracle = textbook_beam_global(s, gram_schmidt_frame(a, b, ref), axis.norm());
        worst_k = std::max(worst_k, (K - oracle).norm() / oracle.norm());

        const Eigen::Vector3d mid = (a + b) / 2;
        for (int k = 0; k < 6; ++k) {
            const Eigen::Vector3d d = Eigen::Vector3d::Unit(k % 3);
            Eigen::VectorXd u = Eigen::VectorXd::Zero(12);
            if (k < 3) {
                u.segment<3>(0) = d;
                u.segment<3>(6) = d;
            } else {
                u.segment<3>(0) = d.cross(a - mid);
                u.segment<3>(3) = d;
                u.segment<3>(6) = d.cross(b - mid);
                u.segment<3>(9) = d;
            }
            worst_rigid = std::max(worst_rigid, (f.A_e * u).cwiseAbs().maxCoeff() / u.cwiseAbs().maxCoeff());
        }
    }
    return {worst_k <= 1e-10 && worst_rigid <= 1e-12,
            fmt("%d random beams: stiffness rel. Frobenius %.2e (limit 1e-10), rigid-body %.2e (limit 1e-12)", trials,
                worst_k, worst_rigid)};
}

Verdict determinate_zero()
{
    double worst = 0.0;
    std::string detail;
    for (const auto& [name, model] : std::vector<std::pair<std::string, StructuralModel>>{
             {"tripod", tripod()}, {"cylinder base n=8", determinate_cylinder(8)},
             {"cylinder base n=20", determinate_cylinder(20)}}) {
        const AssembledSystem sys = assemble(model);
        const int n_s = *rank_and_indeterminacy(sys).n_s;
        const double c = max_abs(*redundancy_canonical(sys).full);
        const double e = max_abs(*compute_redundancy(sys, Payload::full, Method::efficient).full);
        worst = std::max({worst, c, e, n_s == 0 ? 0.0 : 1.0});
        detail += fmt("%s%s (n_s = %d) %.1e/%.1e", detail.empty() ? "" : ", ", name.c_str(), n_s, c, e);
    }
    return {worst <= 1e-10, detail + " (limit 1e-10)"};
}

Verdict unit_invariance()
{
    double worst = 0.0;
    for (const StructuralModel& m : {two_bar(2.0, 5.0), gen_mero(spec_of(Family::mero, 4))}) {
        const AssembledSystem metres = assemble(m), millimetres = assemble(rescale_to_millimetres(m));
        for (Method method : {Method::canonical, Method::efficient}) {
            const auto a = compute_redundancy(metres, Payload::diagonal, method);
            const auto b = compute_redundancy(millimetres, Payload::diagonal, method);
            worst = std::max(worst, max_abs(a.diagonal - b.diagonal));
        }
    }
    return {worst <= 1e-8, fmt("two-bar and mero n=4, max |diag_m - diag_mm| = %.2e (limit 1e-8)", worst)};
}

Verdict performance_shape()
{
    const auto start = Clock::now();
    SeriesConfig config;
    config.family = Family::cylinder;
    config.sizes = {40, 44};
    config.alphas = {0.1, 0.4};
    config.tasks = {Payload::diagonal};
    config.timing.repetitions = 3;
    config.timing.warmup = 1;
    const SpeedupSeries series = run_series(config, [](const SeriesCell& c) {
        std::printf("    cylinder n=%d alpha=%.2f status=%s canonical %.3f s efficient %.3f s speedup %.2f\n", c.n,
                    c.alpha_target, c.status.c_str(), c.canonical ? c.canonical->wall_time_s : 0.0,
                    c.efficient ? c.efficient->wall_time_s : 0.0, c.speedup.value_or(0.0));
        std::fflush(stdout);
    });
    std::map<double, std::vector<double>> by_alpha;
    std::map<int, std::map<double, double>> by_n;
    bool cells_ok = true;
    for (const auto& c : series.cells) {
        cells_ok = cells_ok && c.status == "ok" && c.correctness == "ok" && c.speedup;
        if (c.speedup) {
            by_alpha[c.alpha_target].push_back(*c.speedup);
            by_n[c.n][c.alpha_target] = *c.speedup;
        }
    }
    auto median = [](std::vector<double> v) {
        if (v.empty()) return 0.0;
        std::sort(v.begin(), v.end());
        return v.size() % 2 ? v[v.size() / 2] : 0.5 * (v[v.size() / 2 - 1] + v[v.size() / 2]);
    };
    const double low = median(by_alpha[0.1]), high = median(by_alpha[0.4]);
    bool ordered = !by_n.empty();
    for (auto& [n, s] : by_n) ordered = ordered && s.count(0.1) && s.count(0.4) && s[0.1] > s[0.4];
    const double t = seconds_since(start);
    return {cells_ok && low > 1.0 && ordered && t < 900.0,
            fmt("threads = %d, median speedup alpha=0.1: %.2f (must be > 1), alpha=0.4: %.2f, "
                "matched-n ordering %s, %.0f s (limit 900 s)",
                kernels::threads(), low, high, ordered ? "holds" : "violated", t)};
}

} // namespace

int main()
{
    kernels::set_threads(1);
    int failures = 0;
    auto report = [&](const char* id, const char* title, const std::function<Verdict()>& f) {
        std::printf("[%s] %s ...\n", id, title);
        std::fflush(stdout);
        Verdict v;
        try {
            v = f();
        } catch (const std::exception& e) {
            v = {false, std::string("exception: ") + e.what()};
        }
        failures += !v.passed;
        std::printf("%s %s %s: %s\n", id, v.passed ? "PASS" : "FAIL", title, v.detail.c_str());
        std::fflush(stdout);
    };

    report("AC1", "mero n=6 indeterminacy", mero_indeterminacy);
    report("AC2", "mero top-corner bars carry no redundancy", mero_corner_bars);
    report("AC3", "cylinder alpha targets at n=8", cylinder_alpha_targets);
    report("AC4", "hypar alpha decreases toward 0.5", hypar_alpha_limit);
    report("AC5", "mero alpha(60) near 0.24", mero_alpha_limit);
    const auto models = desk_models();
    report("AC6", "canonical and efficient paths agree", [&] { return oracle_equivalence(models); });
    report("AC7", "projector and eigenstructure identities", [&] { return projector_suite(models); });
    report("AC8", "beam factorization against textbook stiffness", element_oracle);
    report("AC9", "determinate structures have R = 0", determinate_zero);
    report("AC10", "length-unit invariance", unit_invariance);
    report("AC11", "speedup shape on the cylinder family", performance_shape);

    std::printf("%s: %d of 11 criteria failed\n", failures ? "FAILED" : "ALL PASSED", failures);
    return failures ? 1 : 0;
}
