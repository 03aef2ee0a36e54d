// Integrates the test integrand with beta = 3 to a requested error using the
// Smolyak and QMC engines, and prints the census of the active set.

#include <cstdio>

#include "mdm/mdm.hpp"

int main() {
    const double beta = 3.0;
    const double eps = 1e-2;

    const mdm::NormModel model(beta);
    const mdm::PodWeights weights = model.pod_weights();
    const auto tol = mdm::compute_tolerance(weights, {eps, 1000, 0.5, 100});
    const auto active = mdm::build_active_set(weights, tol.T);
    std::printf("T = %.3g, |U| = %zu, d_sup = %zu, tau* = %u\n", tol.T, active.size(), active.d_sup,
                active.tau_star);

    const mdm::TestIntegrand f(beta);
    const auto budget = mdm::point_budget(model, active, eps);

    const mdm::SmolyakRule rule(mdm::trapezoidal_family());
    const auto smolyak = mdm::build_smolyak_tables(active, mdm::smolyak_levels(budget, rule));
    const auto s = mdm::run_smolyak_direct(smolyak, rule, f);
    std::printf("smolyak: %.13f  error %.2e  (%llu evaluations)\n", s.estimate,
                std::abs(s.estimate - mdm::kReferenceBeta3), static_cast<unsigned long long>(s.eval_count));

    const mdm::LatticeSequence seq(mdm::default_generating_vector());
    const auto qmc = mdm::build_qmc_tables(active, mdm::qmc_levels(budget));
    const auto r = mdm::run_rqmc(qmc, seq, f, 16, 42);
    std::printf("rqmc:    %.13f  error %.2e  std_error %.2e\n", r.estimate,
                std::abs(r.estimate - mdm::kReferenceBeta3), *r.std_error);
    return 0;
}
