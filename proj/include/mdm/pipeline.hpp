#pragma once

// End-to-end drivers behind the command-line tool:
//   tolerance -> active set -> point budget -> levels -> tables -> engine.

#include <chrono>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <tuple>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "mdm/active_set.hpp"
#include "mdm/coeff_tables.hpp"
#include "mdm/engines.hpp"
#include "mdm/error.hpp"
#include "mdm/integrands.hpp"
#include "mdm/lattice.hpp"
#include "mdm/parallel.hpp"
#include "mdm/quad1d.hpp"
#include "mdm/smolyak.hpp"
#include "mdm/tolerance.hpp"

namespace mdm {

inline constexpr int kSchemaVersion = 1;

/// Integral of the test integrand for beta = 3 over infinitely many variables.
inline constexpr double kReferenceBeta3 = 1.1011984577041;

enum class Method { Qmc, Rqmc, SmolyakDirect, SmolyakCt, NaiveQmc, NaiveSmolyakDirect, NaiveSmolyakCt };

inline const char* to_string(Method m) noexcept {
    switch (m) {
        case Method::Qmc: return "qmc";
        case Method::Rqmc: return "rqmc";
        case Method::SmolyakDirect: return "smolyak-direct";
        case Method::SmolyakCt: return "smolyak-ct";
        case Method::NaiveQmc: return "naive-qmc";
        case Method::NaiveSmolyakDirect: return "naive-smolyak-direct";
        case Method::NaiveSmolyakCt: return "naive-smolyak-ct";
    }
    return "?";
}

inline Method parse_method(std::string_view s) {
    for (Method m : {Method::Qmc, Method::Rqmc, Method::SmolyakDirect, Method::SmolyakCt, Method::NaiveQmc,
                     Method::NaiveSmolyakDirect, Method::NaiveSmolyakCt})
        if (s == to_string(m)) return m;
    throw ValidationError("unknown method: " + std::string(s));
}

inline bool is_qmc(Method m) noexcept { return m == Method::Qmc || m == Method::Rqmc || m == Method::NaiveQmc; }

struct RunSpec {
    double beta = 3.0;
    double epsilon = 1e-1;
    Method method = Method::SmolyakDirect;
    int shifts = 16;
    std::uint64_t seed = 1;
    int s = 1000;
    double t = 0.5;
    int alpha_grid = 100;
    unsigned threads = 1;
    std::optional<double> reference;
    std::optional<std::vector<std::uint64_t>> generating_vector;

    ToleranceParams tolerance() const { return {epsilon, s, t, alpha_grid}; }

    void validate() const {
        if (!(beta > 1.0)) throw ValidationError("beta must exceed 1");
        tolerance().validate();
        if (method == Method::Rqmc && shifts < 2) throw ValidationError("rqmc needs at least 2 shifts");
        if (threads < 1) throw ValidationError("threads must be >= 1");
    }

    nlohmann::json to_json() const {
        nlohmann::json j = {{"beta", beta},   {"epsilon", epsilon},      {"method", to_string(method)},
                            {"seed", seed},   {"s", s},                  {"t", t},
                            {"alpha_grid", alpha_grid}, {"threads", threads}, {"q", NormModel::q()}};
        if (method == Method::Rqmc) j["shifts"] = shifts;
        return j;
    }
};

struct ActiveSetStage {
    ToleranceResult tolerance;
    ActiveSet active;
    double seconds = 0.0;
};

inline ActiveSetStage build_active_set_stage(const RunSpec& spec) {
    spec.validate();
    const auto t0 = detail::Clock::now();
    const NormModel nm(spec.beta);
    const PodWeights w = nm.pod_weights();
    ActiveSetStage st;
    st.tolerance = compute_tolerance(w, spec.tolerance());
    st.active = build_active_set(w, st.tolerance.T);
    st.seconds = detail::seconds_since(t0);
    return st;
}

/// Census row: epsilon, T, d_sup, tau_star, counts by size; optional JSON-lines set dump.
inline nlohmann::json cmd_active_set(const RunSpec& spec, std::ostream* dump = nullptr) {
    const auto st = build_active_set_stage(spec);
    if (dump != nullptr) write_jsonl(*dump, st.active);
    nlohmann::json j = summary_json(st.active);
    j["schema"] = kSchemaVersion;
    j["beta"] = spec.beta;
    j["epsilon"] = spec.epsilon;
    j["alpha_star"] = st.tolerance.alpha_star;
    j["sum_bound"] = st.tolerance.sum_bound;
    j["t_act"] = st.seconds;
    return j;
}

struct ReferenceResult {
    double estimate = 0.0;
    std::optional<double> std_error;
    std::vector<double> per_shift;

    nlohmann::json to_json() const {
        nlohmann::json j = {{"schema", kSchemaVersion}, {"estimate", estimate}, {"per_shift", per_shift}};
        if (std_error) j["std_error"] = *std_error;
        return j;
    }
};

/// Randomly shifted lattice estimate of the integral of the test integrand
/// restricted to variables 1..dims, with 2^m points per shift.
inline ReferenceResult cmd_reference(double beta, int m, std::size_t dims, int shifts, std::uint64_t seed = 1,
                                     unsigned threads = 1) {
    if (m < 0 || m > kLatticeMaxPower) throw ValidationError("reference level m must lie in [0, 25]");
    if (shifts < 1) throw ValidationError("number of shifts must be >= 1");
    const TestIntegrand f(beta);
    ReferenceResult res;
    if (dims == 0) {
        res.per_shift.assign(static_cast<std::size_t>(shifts), 1.0);
        std::tie(res.estimate, res.std_error) = rqmc_summary(res.per_shift);
        return res;
    }
    const LatticeSequence seq(extended_generating_vector(dims));
    std::vector<Index> vars(dims);
    for (std::size_t j = 0; j < dims; ++j) vars[j] = static_cast<Index>(j + 1);

    constexpr std::uint64_t kChunk = 4096;
    const std::uint64_t n = std::uint64_t{1} << m;
    const std::size_t chunks = static_cast<std::size_t>((n + kChunk - 1) / kChunk);
    for (int q = 0; q < shifts; ++q) {
        const Shift sh = random_shift(seed, static_cast<std::uint64_t>(q), dims);
        const auto parts = parallel_map<double>(chunks, threads, [&](std::size_t c) {
            std::vector<double> x(dims);
            CompensatedSum s;
            const std::uint64_t hi = std::min(n, (c + 1) * kChunk);
            for (std::uint64_t i = c * kChunk; i < hi; ++i) {
                detail::qmc_point(seq, i, vars, vars, &sh, x);
                s.add(f.eval_uncounted(vars, x));
            }
            return s.value();
        });
        res.per_shift.push_back(ordered_sum(parts) * std::ldexp(1.0, -m));
    }
    std::tie(res.estimate, res.std_error) = rqmc_summary(res.per_shift);
    return res;
}

struct RunResult {
    RunSpec spec;
    MdmReport report;
    ToleranceResult tolerance;
    std::size_t active_sets = 0;
    std::size_t ext_sets = 0;
    int m_max = 0;
    double t_act = 0.0;
    double t_ext = 0.0;
    double t_run = 0.0;
    double reference = 0.0;
    std::string reference_source;

    double error() const { return std::abs(report.estimate - reference); }

    nlohmann::json to_json() const {
        nlohmann::json j = report.to_json();
        j["schema"] = kSchemaVersion;
        j["config"] = spec.to_json();
        j["T"] = tolerance.T;
        j["active_sets"] = active_sets;
        j["ext_sets"] = ext_sets;
        j["m_max"] = m_max;
        j["t_act"] = t_act;
        j["t_ext"] = t_ext;
        j["t_run"] = t_run;
        j["reference"] = reference;
        j["reference_source"] = reference_source;
        j["error"] = error();
        return j;
    }
};

/// Reference integral used for error reports: the given one, the known value
/// for beta = 3, or a lattice estimate otherwise.
inline std::pair<double, std::string> resolve_reference(const RunSpec& spec) {
    if (spec.reference) return {*spec.reference, "given"};
    if (spec.beta == 3.0) return {kReferenceBeta3, "known"};
    return {cmd_reference(spec.beta, 18, 200, 8, spec.seed, spec.threads).estimate, "lattice m=18 dims=200 shifts=8"};
}

inline RunResult cmd_run(const RunSpec& spec) {
    spec.validate();
    RunResult res;
    res.spec = spec;
    auto st = build_active_set_stage(spec);
    res.tolerance = st.tolerance;
    res.t_act = st.seconds;
    res.active_sets = st.active.size();

    const NormModel nm(spec.beta);
    const TestIntegrand f(spec.beta);
    const auto budget = point_budget(nm, st.active, spec.epsilon);

    auto t0 = detail::Clock::now();
    if (is_qmc(spec.method)) {
        const LevelAssignment levels = qmc_levels(budget);
        res.m_max = levels.m_max();
        const LatticeSequence seq(spec.generating_vector ? *spec.generating_vector : default_generating_vector());
        std::optional<Shift> shift;
        if (spec.method != Method::Rqmc) shift = random_shift(spec.seed, 0, st.active.tau_star);
        if (spec.method == Method::NaiveQmc) {
            res.t_ext = detail::seconds_since(t0);
            t0 = detail::Clock::now();
            res.report = run_naive(NaiveVariant::Qmc, st.active, levels, f, nullptr, &seq, shift, spec.threads);
        } else {
            const QmcTables tables = build_qmc_tables(st.active, levels);
            res.ext_sets = tables.ext.size();
            res.t_ext = detail::seconds_since(t0);
            t0 = detail::Clock::now();
            res.report = spec.method == Method::Rqmc ? run_rqmc(tables, seq, f, spec.shifts, spec.seed, spec.threads)
                                                     : run_qmc(tables, seq, f, shift, spec.threads);
        }
    } else {
        const SmolyakRule rule(trapezoidal_family());
        const LevelAssignment levels = smolyak_levels(budget, rule);
        res.m_max = levels.m_max();
        if (spec.method == Method::SmolyakDirect) {
            const SmolyakTables tables = build_smolyak_tables(st.active, levels);
            res.ext_sets = tables.ext.size();
            res.t_ext = detail::seconds_since(t0);
            t0 = detail::Clock::now();
            res.report = run_smolyak_direct(tables, rule, f, spec.threads);
        } else if (spec.method == Method::SmolyakCt) {
            const CombinationTables tables = build_combination_tables(st.active, levels);
            res.ext_sets = tables.ext.size();
            res.t_ext = detail::seconds_since(t0);
            t0 = detail::Clock::now();
            res.report = run_smolyak_combination(tables, rule, f, spec.threads);
        } else {
            res.t_ext = detail::seconds_since(t0);
            t0 = detail::Clock::now();
            const auto variant = spec.method == Method::NaiveSmolyakDirect ? NaiveVariant::SmolyakDirect
                                                                           : NaiveVariant::SmolyakCombination;
            res.report = run_naive(variant, st.active, levels, f, &rule, nullptr, std::nullopt, spec.threads);
        }
    }
    res.t_run = detail::seconds_since(t0);
    res.report.config = spec.to_json();
    std::tie(res.reference, res.reference_source) = resolve_reference(spec);
    return res;
}

inline constexpr const char* kCsvHeader =
    "schema,method,beta,epsilon,seed,shifts,estimate,std_error,reference,error,eval_count,active_sets,ext_sets,"
    "m_max,t_act,t_ext,t_run";

inline std::string csv_row(const RunResult& r) {
    auto num = [](double x) {
        std::ostringstream os;
        os.precision(17);
        os << x;
        return os.str();
    };
    std::ostringstream os;
    os << kSchemaVersion << ',' << to_string(r.spec.method) << ',' << num(r.spec.beta) << ','
       << num(r.spec.epsilon) << ',' << r.spec.seed << ',' << (r.spec.method == Method::Rqmc ? r.spec.shifts : 0)
       << ',' << num(r.report.estimate) << ',' << (r.report.std_error ? num(*r.report.std_error) : std::string())
       << ',' << num(r.reference) << ',' << num(r.error()) << ',' << r.report.eval_count << ',' << r.active_sets
       << ',' << r.ext_sets << ',' << r.m_max << ',' << num(r.t_act) << ',' << num(r.t_ext) << ','
       << num(r.t_run);
    return os.str();
}

/// Appends a row, writing the header first when the file is new or empty.
inline void append_csv(const std::string& path, const RunResult& r) {
    bool fresh = true;
    {
        std::ifstream in(path);
        fresh = !in || in.peek() == std::ifstream::traits_type::eof();
    }
    std::ofstream out(path, std::ios::app);
    if (!out) throw ValidationError("cannot open CSV file: " + path);
    if (fresh) out << kCsvHeader << '\n';
    out << csv_row(r) << '\n';
}

}  // namespace mdm
