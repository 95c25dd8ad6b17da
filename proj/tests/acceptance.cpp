// End-to-end acceptance suite. Each criterion prints one PASS/FAIL line with
// its wall time; the process exits nonzero if any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "cpdtv/metrics.hpp"
#include "cpdtv/phantom.hpp"
#include "cpdtv/solver.hpp"
#include "cpdtv/tensor.hpp"
#include "../tests/oracles.hpp"

using namespace cpdtv;

namespace {

struct Criterion {
    std::string name;
    double budget_seconds;
    std::function<bool(std::string&)> run;
};

// objective traces recorded by the solver runs below, checked at the end
std::vector<std::vector<double>> g_traces;

bool non_increasing(const std::vector<double>& v) {
    for (std::size_t i = 1; i < v.size(); ++i)
        if (v[i] > v[i - 1])
            return false;
    return true;
}

bool check_algebraic_identities(std::string& detail) {
    std::mt19937 gen(101);
    for (int trial = 0; trial < 200; ++trial) {
        const Index n = 1 + gen() % 16, e = 1 + gen() % 6, t = 1 + gen() % 6;
        const Index rank = 1 + gen() % 4;
        const ComplexTensor3 x = oracle::random_tensor(n, e, t, gen);
        for (int mode = 1; mode <= 3; ++mode) {
            if (!(fold(unfold(x, mode), mode, x.dims()) == x)) {
                detail = "fold/unfold identity failed";
                return false;
            }
        }
        const FactorSet f = oracle::random_factors(n, e, t, rank, gen);
        const ComplexTensor3 s = cpd_synthesize(f);
        const double e1 = oracle::relative_error(
            unfold(s, 1), ComplexMatrix(f.A * khatri_rao(f.C, f.B).transpose()));
        const double e2 = oracle::relative_error(
            unfold(s, 2), ComplexMatrix(f.B * khatri_rao(f.C, f.A).transpose()));
        const double e3 = oracle::relative_error(
            unfold(s, 3), ComplexMatrix(f.C * khatri_rao(f.B, f.A).transpose()));
        if (e1 > 1e-12 || e2 > 1e-12 || e3 > 1e-12) {
            detail = "synthesis unfolding identity exceeded 1e-12";
            return false;
        }
    }
    return true;
}

bool check_gradient_oracle(std::string& detail) {
    std::mt19937 gen(202);
    double worst = 0.0;
    for (int trial = 0; trial < 50; ++trial) {
        const Index n = 2 + gen() % 5, e = 2 + gen() % 3, t = 2 + gen() % 2;
        const Index rank = 1 + gen() % 3;
        const ComplexTensor3 y = oracle::random_tensor(n, e, t, gen);
        FactorSet f = oracle::random_factors(n, e, t, rank, gen);
        SolverConfig cfg;
        cfg.rank = rank;
        cfg.lambda_e = 0.1;
        cfg.lambda_t = 0.1;
        cfg.epsilon = 0.25;
        for (int mode = 1; mode <= 3; ++mode) {
            const ComplexMatrix analytic = factor_gradient(y, f, mode, cfg);
            ComplexMatrix& target = mode == 1 ? f.A : (mode == 2 ? f.B : f.C);
            const ComplexMatrix fd = oracle::finite_difference_gradient(
                target,
                [&](const ComplexMatrix& m) {
                    FactorSet probe = f;
                    (mode == 1 ? probe.A : (mode == 2 ? probe.B : probe.C)) = m;
                    return objective(y, probe, cfg);
                },
                1e-5);
            worst = std::max(worst, oracle::relative_error(analytic, fd));
        }
    }
    detail = "worst relative error " + std::to_string(worst);
    return worst <= 1e-4;
}

bool check_objective_oracle(std::string& detail) {
    std::mt19937 gen(303);
    double worst = 0.0;
    for (int trial = 0; trial < 50; ++trial) {
        const Index n = 2 + gen() % 6, e = 2 + gen() % 4, t = 2 + gen() % 3;
        const Index rank = 1 + gen() % 3;
        const ComplexTensor3 y = oracle::random_tensor(n, e, t, gen);
        const FactorSet f = oracle::random_factors(n, e, t, rank, gen);
        SolverConfig cfg;
        cfg.rank = rank;
        cfg.lambda_e = 0.1;
        cfg.lambda_t = 0.1;
        cfg.epsilon = 0.2;
        const double got = objective(y, f, cfg);
        const double want = oracle::naive_objective(y, f, cfg.lambda_e, cfg.lambda_t,
                                                    cfg.tv_variant, *cfg.epsilon);
        worst = std::max(worst, std::abs(got - want) / want);
    }
    detail = "worst relative error " + std::to_string(worst);
    return worst <= 1e-12;
}

bool check_exact_rank_recovery(std::string& detail) {
    std::mt19937 gen(404);
    const FactorSet truth = oracle::random_factors(32, 6, 6, 3, gen);
    const ComplexTensor3 y = cpd_synthesize(truth);
    SolverConfig cfg;
    cfg.rank = 3;
    cfg.lambda_e = 0.0;
    cfg.lambda_t = 0.0;
    cfg.n_restarts = 10;
    cfg.max_outer_iters = 200; // 10 restarts x 200 = 2000 total outer iterations
    cfg.rel_tol = 1e-12;
    cfg.seed = 2024;
    const SolveResult result = solve_cpdtv(y, cfg);
    g_traces.push_back(result.diagnostics.objective_trace);
    const double err = oracle::relative_error(result.xhat, y);
    detail = "best relative error " + std::to_string(err);
    return err < 1e-3;
}

// Fixed after a one-time calibration run; see check_artifact_removal.
constexpr double kArtifactLambda = 0.0; // placeholder, calibrated below

bool check_artifact_removal(std::string& detail) {
    detail = "not yet calibrated";
    return false;
}

bool check_rank_tradeoff(std::string& detail) {
    detail = "not yet calibrated";
    return false;
}

bool check_monotonicity(std::string& detail) {
    if (g_traces.empty()) {
        detail = "no traces recorded";
        return false;
    }
    for (const auto& trace : g_traces)
        if (!non_increasing(trace)) {
            detail = "found an increasing objective trace";
            return false;
        }
    detail = std::to_string(g_traces.size()) + " traces checked";
    return true;
}

bool check_format_round_trip(std::string& detail) {
    detail = "pending";
    return false;
}

} // namespace

int main() {
    std::vector<Criterion> criteria = {
        {"algebraic-identities", 5.0, check_algebraic_identities},
        {"gradient-oracle", 30.0, check_gradient_oracle},
        {"objective-oracle", 30.0, check_objective_oracle},
        {"exact-rank-recovery", 10.0, check_exact_rank_recovery},
        {"artifact-removal", 300.0, check_artifact_removal},
        {"rank-tradeoff", 1200.0, check_rank_tradeoff},
        {"monotonic-traces", 5.0, check_monotonicity},
        {"format-round-trip", 30.0, check_format_round_trip},
    };

    int failures = 0;
    for (Criterion& c : criteria) {
        const auto start = std::chrono::steady_clock::now();
        std::string detail;
        bool ok = false;
        try {
            ok = c.run(detail);
        } catch (const std::exception& e) {
            detail = std::string("exception: ") + e.what();
        }
        const double seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (seconds > c.budget_seconds) {
            ok = false;
            detail += (detail.empty() ? "" : "; ") + std::string("over budget of ") +
                      std::to_string(c.budget_seconds) + " s";
        }
        std::printf("[%s] %-22s %7.2f s%s%s\n", ok ? "PASS" : "FAIL", c.name.c_str(), seconds,
                    detail.empty() ? "" : "  ", detail.c_str());
        std::fflush(stdout);
        if (!ok)
            ++failures;
    }
    return failures == 0 ? 0 : 1;
}
