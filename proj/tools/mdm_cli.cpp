// mdm: active-set census, MDM runs and reference integrals for the test integrand.
//
// Exit codes: 0 success, 2 invalid input, 3 numeric or capacity limit.

#include <cstdint>
#include <exception>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "mdm/mdm.hpp"

namespace {

constexpr int kExitValidation = 2;
constexpr int kExitNumeric = 3;

void emit(const nlohmann::json& j, const std::string& path) {
    if (path.empty() || path == "-") {
        std::cout << j.dump(2) << '\n';
        return;
    }
    std::ofstream out(path);
    if (!out) throw mdm::ValidationError("cannot open output file: " + path);
    out << j.dump(2) << '\n';
}

void add_tolerance_options(CLI::App* cmd, mdm::RunSpec& spec) {
    cmd->add_option("--beta", spec.beta, "decay exponent of the test integrand")->capture_default_str();
    cmd->add_option("--eps", spec.epsilon, "requested total error")->capture_default_str();
    cmd->add_option("--s", spec.s, "series truncation of the weight-sum bound")->capture_default_str();
    cmd->add_option("--t", spec.t, "Hoelder split of the tail bound, in (0,1)")->capture_default_str();
    cmd->add_option("--alpha-grid", spec.alpha_grid, "number of alpha grid points")->capture_default_str();
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Multivariate decomposition method for infinite-variate integrals"};
    app.require_subcommand(1);

    mdm::RunSpec spec;
    std::string out_path;
    std::string dump_path;
    std::string csv_path;
    std::string method = "smolyak-direct";
    std::string genvec_path;
    std::optional<double> reference;

    auto* act = app.add_subcommand("active-set", "build the active set and print its census row");
    add_tolerance_options(act, spec);
    act->add_option("--out", out_path, "JSON output path (default stdout)");
    act->add_option("--dump", dump_path, "write the sets as JSON lines to this path");

    auto* run = app.add_subcommand("run", "run one MDM engine and report the error");
    add_tolerance_options(run, spec);
    run->add_option("--method", method,
                    "qmc | rqmc | smolyak-direct | smolyak-ct | naive-qmc | naive-smolyak-direct | naive-smolyak-ct")
        ->capture_default_str();
    run->add_option("--shifts", spec.shifts, "number of random shifts for rqmc")->capture_default_str();
    run->add_option("--seed", spec.seed, "seed of the random shifts")->capture_default_str();
    run->add_option("--threads", spec.threads, "worker threads")->capture_default_str();
    run->add_option("--reference", reference, "reference integral for the error column");
    run->add_option("--gen-vector", genvec_path, "generating vector file, one integer per line");
    run->add_option("--out", out_path, "JSON output path (default stdout)");
    run->add_option("--csv", csv_path, "append a CSV row to this file");

    double ref_beta = 3.0;
    int ref_m = 18;
    std::size_t ref_dims = 600;
    int ref_shifts = 16;
    std::uint64_t ref_seed = 1;
    unsigned ref_threads = 1;
    auto* ref = app.add_subcommand("reference", "randomly shifted lattice estimate of the truncated integral");
    ref->add_option("--beta", ref_beta, "decay exponent")->capture_default_str();
    ref->add_option("--m", ref_m, "2^m points per shift, m <= 25")->capture_default_str();
    ref->add_option("--dims", ref_dims, "number of leading variables kept")->capture_default_str();
    ref->add_option("--shifts", ref_shifts, "number of random shifts")->capture_default_str();
    ref->add_option("--seed", ref_seed, "seed of the random shifts")->capture_default_str();
    ref->add_option("--threads", ref_threads, "worker threads")->capture_default_str();
    ref->add_option("--out", out_path, "JSON output path (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitValidation;
    }

    try {
        if (act->parsed()) {
            std::optional<std::ofstream> dump;
            if (!dump_path.empty()) {
                dump.emplace(dump_path);
                if (!*dump) throw mdm::ValidationError("cannot open dump file: " + dump_path);
            }
            emit(mdm::cmd_active_set(spec, dump ? &*dump : nullptr), out_path);
        } else if (run->parsed()) {
            spec.method = mdm::parse_method(method);
            spec.reference = reference;
            if (!genvec_path.empty()) {
                std::ifstream in(genvec_path);
                if (!in) throw mdm::ValidationError("cannot open generating vector file: " + genvec_path);
                spec.generating_vector = mdm::read_generating_vector(in);
            }
            const auto result = mdm::cmd_run(spec);
            if (!csv_path.empty()) mdm::append_csv(csv_path, result);
            emit(result.to_json(), out_path);
        } else if (ref->parsed()) {
            auto r = mdm::cmd_reference(ref_beta, ref_m, ref_dims, ref_shifts, ref_seed, ref_threads).to_json();
            r["beta"] = ref_beta;
            r["m"] = ref_m;
            r["dims"] = ref_dims;
            r["shifts"] = ref_shifts;
            r["seed"] = ref_seed;
            emit(r, out_path);
        }
    } catch (const mdm::ValidationError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitValidation;
    } catch (const mdm::NumericError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitNumeric;
    } catch (const nlohmann::json::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitValidation;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitNumeric;
    }
    return 0;
}
