#include "cpdtv/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include <Eigen/SVD>

#include "cpdtv/errors.hpp"
#include "detail/rng.hpp"

namespace cpdtv {

namespace {

constexpr int kMaxBacktracks = 30;

void require_compatible(const ComplexTensor3& y, const FactorSet& f) {
    f.validate();
    if (!(y.dims() == f.dims()))
        throw std::invalid_argument("tensor and factor dimensions do not match");
}

double mean_modulus(const ComplexTensor3& y) {
    double sum = 0.0;
    for (Index i = 0; i < y.size(); ++i)
        sum += std::abs(y.data()[i]);
    return sum / static_cast<double>(y.size());
}

/// Effective smoothing parameter: explicit value, or scaled to the data.
double resolve_epsilon(const SolverConfig& cfg, const ComplexTensor3& y) {
    if (cfg.epsilon)
        return *cfg.epsilon;
    return std::max(1e-8 * mean_modulus(y), std::numeric_limits<double>::min());
}

/// Applies fn(offset_of(i, m, k), step) for every tensor location that has a
/// forward neighbour along `dim`; the neighbour is at offset + step.
template <typename Fn>
void for_each_difference(const Dims3& d, TvDim dim, Fn&& fn) {
    const Index n = d.n_space;
    if (dim == TvDim::echo) {
        const Index step = n;
        for (Index k = 0; k < d.n_motion; ++k)
            for (Index j = 0; j + 1 < d.n_echo; ++j) {
                const Index base = (k * d.n_echo + j) * n;
                for (Index i = 0; i < n; ++i)
                    fn(base + i, step);
            }
    } else {
        const Index step = n * d.n_echo;
        for (Index k = 0; k + 1 < d.n_motion; ++k) {
            const Index base = k * step;
            for (Index i = 0; i < step; ++i)
                fn(base + i, step);
        }
    }
}

ComplexMatrix khatri_rao_for_mode(const FactorSet& f, int mode) {
    switch (mode) {
    case 1:
        return khatri_rao(f.C, f.B);
    case 2:
        return khatri_rao(f.C, f.A);
    case 3:
        return khatri_rao(f.B, f.A);
    default:
        throw std::invalid_argument("factor mode must be 1, 2, or 3");
    }
}

ComplexMatrix& factor_for_mode(FactorSet& f, int mode) {
    return mode == 1 ? f.A : (mode == 2 ? f.B : f.C);
}

/// Objective with the smoothing parameter already resolved (hot path).
double objective_resolved(const ComplexTensor3& y, const FactorSet& f, const SolverConfig& cfg,
                          double eps) {
    const ComplexTensor3 x = cpd_synthesize(f);
    double data = 0.0;
    for (Index i = 0; i < y.size(); ++i)
        data += std::norm(y.data()[i] - x.data()[i]);
    double value = 0.5 * data;
    if (cfg.lambda_e > 0.0)
        value += cfg.lambda_e * tv_value(x, TvDim::echo, cfg.tv_variant, eps);
    if (cfg.lambda_t > 0.0)
        value += cfg.lambda_t * tv_value(x, TvDim::motion, cfg.tv_variant, eps);
    return value;
}

ComplexMatrix factor_gradient_resolved(const ComplexTensor3& y, const FactorSet& f, int mode,
                                       const SolverConfig& cfg, double eps) {
    const ComplexTensor3 x = cpd_synthesize(f);
    // W = (X - Y) + lambda_e * Ge + lambda_t * Gt, then chain through the
    // synthesis: grad = unfold(W, mode) * conj(K).
    ComplexTensor3 w(y.dims());
    for (Index i = 0; i < y.size(); ++i)
        w.data()[i] = x.data()[i] - y.data()[i];
    if (cfg.lambda_e > 0.0) {
        const ComplexTensor3 g = tv_gradient(x, TvDim::echo, cfg.tv_variant, eps);
        for (Index i = 0; i < w.size(); ++i)
            w.data()[i] += cfg.lambda_e * g.data()[i];
    }
    if (cfg.lambda_t > 0.0) {
        const ComplexTensor3 g = tv_gradient(x, TvDim::motion, cfg.tv_variant, eps);
        for (Index i = 0; i < w.size(); ++i)
            w.data()[i] += cfg.lambda_t * g.data()[i];
    }
    const ComplexMatrix k = khatri_rao_for_mode(f, mode);
    return unfold(w, mode) * k.conjugate();
}

FactorSet random_factors(const Dims3& d, Index rank, detail::Rng& rng) {
    FactorSet f;
    f.A.resize(d.n_space, rank);
    f.B.resize(d.n_echo, rank);
    f.C.resize(d.n_motion, rank);
    for (ComplexMatrix* m : {&f.A, &f.B, &f.C})
        for (Index r = 0; r < rank; ++r) {
            for (Index i = 0; i < m->rows(); ++i)
                (*m)(i, r) = rng.complex_normal();
            const double norm = m->col(r).norm();
            if (norm > 0.0)
                m->col(r) /= norm;
        }
    return f;
}

/// Top-`count` left singular vectors of m, written into the leading columns
/// of dst; remaining columns of dst are untouched.
void leading_singular_vectors(const ComplexMatrix& m, Index count, ComplexMatrix& dst) {
    Eigen::JacobiSVD<ComplexMatrix> svd(m, Eigen::ComputeThinU);
    const Index have = std::min(count, svd.matrixU().cols());
    dst.leftCols(have) = svd.matrixU().leftCols(have);
}

std::complex<double> inner_product(const ComplexTensor3& a, const ComplexTensor3& b) {
    std::complex<double> sum{0.0, 0.0};
    for (Index i = 0; i < a.size(); ++i)
        sum += std::conj(a.data()[i]) * b.data()[i];
    return sum;
}

struct RestartOutcome {
    FactorSet factors;
    Diagnostics diagnostics;
    double final_objective = std::numeric_limits<double>::infinity();
};

RestartOutcome run_restart(const ComplexTensor3& y, const SolverConfig& cfg, double eps,
                           std::uint64_t restart_seed) {
    RestartOutcome out;
    FactorSet f = initialize_factors(y, cfg.rank, cfg.init, restart_seed);
    double obj = objective_resolved(y, f, cfg, eps);
    if (!std::isfinite(obj))
        throw NumericalFailure("objective is not finite at initialization", 0);

    Diagnostics& diag = out.diagnostics;
    double obj_prev = obj;
    for (int iter = 1; iter <= cfg.max_outer_iters; ++iter) {
        bool moved = false;
        double step_sum = 0.0;
        for (int mode = 1; mode <= 3; ++mode) {
            const ComplexMatrix grad = factor_gradient_resolved(y, f, mode, cfg, eps);
            const double grad_sq = grad.squaredNorm();
            if (!(grad_sq > 0.0))
                continue;
            if (cfg.step_policy == StepPolicy::fixed) {
                factor_for_mode(f, mode) -= cfg.step_alpha0 * grad;
                f = normalize_factors(f);
                moved = true;
                step_sum += cfg.step_alpha0;
                continue;
            }
            // Armijo backtracking; the candidate is normalized before the
            // sufficient-decrease test so the accepted objective is exactly
            // the objective of the stored state.
            double alpha = cfg.step_alpha0;
            for (int shrink = 0; shrink <= kMaxBacktracks; ++shrink) {
                FactorSet cand = f;
                factor_for_mode(cand, mode) -= alpha * grad;
                cand = normalize_factors(cand);
                const double cand_obj = objective_resolved(y, cand, cfg, eps);
                if (cand_obj <= obj - cfg.armijo_c * alpha * grad_sq) {
                    f = std::move(cand);
                    obj = cand_obj;
                    moved = true;
                    step_sum += alpha;
                    break;
                }
                alpha *= cfg.step_shrink;
            }
            // Line search exhausted: accept alpha = 0, i.e. no move.
        }
        if (cfg.step_policy == StepPolicy::fixed) {
            obj = objective_resolved(y, f, cfg, eps);
            if (!std::isfinite(obj))
                throw NumericalFailure("objective is not finite", static_cast<std::size_t>(iter));
        }
        diag.objective_trace.push_back(obj);
        diag.step_trace.push_back(step_sum / 3.0);
        diag.iterations = iter;

        if (!moved) {
            diag.termination = Termination::stalled;
            break;
        }
        const double denom = std::max(obj_prev, std::numeric_limits<double>::min());
        if (std::abs(obj_prev - obj) / denom < cfg.rel_tol) {
            diag.termination = Termination::converged;
            break;
        }
        obj_prev = obj;
    }
    out.factors = std::move(f);
    out.final_objective = obj;
    return out;
}

} // namespace

void SolverConfig::validate() const {
    if (rank < 1)
        throw std::invalid_argument("rank must be >= 1");
    if (lambda_e < 0.0 || lambda_t < 0.0)
        throw std::invalid_argument("regularization weights must be >= 0");
    if (epsilon && !(*epsilon > 0.0))
        throw std::invalid_argument("epsilon must be > 0");
    if (max_outer_iters < 1)
        throw std::invalid_argument("max_outer_iters must be >= 1");
    if (!(rel_tol > 0.0))
        throw std::invalid_argument("rel_tol must be > 0");
    if (n_restarts < 1)
        throw std::invalid_argument("n_restarts must be >= 1");
    if (!(step_alpha0 > 0.0))
        throw std::invalid_argument("step size must be > 0");
    if (!(step_shrink > 0.0) || !(step_shrink < 1.0))
        throw std::invalid_argument("step_shrink must lie in (0, 1)");
}

double tv_echo(const ComplexTensor3& x) {
    return tv_value(x, TvDim::echo, TvVariant::paper, 0.0);
}

double tv_motion(const ComplexTensor3& x) {
    return tv_value(x, TvDim::motion, TvVariant::paper, 0.0);
}

double tv_value(const ComplexTensor3& x, TvDim dim, TvVariant variant, double eps) {
    const Complex* d = x.data();
    double sum = 0.0;
    if (variant == TvVariant::paper) {
        for_each_difference(x.dims(), dim, [&](Index at, Index step) {
            sum += std::abs(d[at + step] - d[at]);
        });
    } else {
        const double eps_sq = eps * eps;
        for_each_difference(x.dims(), dim, [&](Index at, Index step) {
            sum += std::sqrt(std::norm(d[at + step] - d[at]) + eps_sq) - eps;
        });
    }
    return sum;
}

ComplexTensor3 tv_gradient(const ComplexTensor3& x, TvDim dim, TvVariant variant, double eps) {
    const Complex* d = x.data();
    ComplexTensor3 out(x.dims());
    if (variant == TvVariant::smoothed_l1) {
        const double eps_sq = eps * eps;
        for_each_difference(x.dims(), dim, [&](Index at, Index step) {
            const Complex diff = d[at + step] - d[at];
            const Complex w = diff / std::sqrt(std::norm(diff) + eps_sq);
            out.data()[at] -= w;
            out.data()[at + step] += w;
        });
        return out;
    }
    // Paper form: grad^H grad X scaled by 1/||grad X||_1, zero when the
    // differences vanish.
    double l1 = 0.0;
    for_each_difference(x.dims(), dim, [&](Index at, Index step) {
        l1 += std::abs(d[at + step] - d[at]);
    });
    if (l1 == 0.0)
        return out;
    const double inv = 1.0 / l1;
    for_each_difference(x.dims(), dim, [&](Index at, Index step) {
        const Complex w = (d[at + step] - d[at]) * inv;
        out.data()[at] -= w;
        out.data()[at + step] += w;
    });
    return out;
}

double objective(const ComplexTensor3& y, const FactorSet& f, const SolverConfig& cfg) {
    require_compatible(y, f);
    return objective_resolved(y, f, cfg, resolve_epsilon(cfg, y));
}

ComplexMatrix factor_gradient(const ComplexTensor3& y, const FactorSet& f, int mode,
                              const SolverConfig& cfg) {
    require_compatible(y, f);
    if (mode < 1 || mode > 3)
        throw std::invalid_argument("factor mode must be 1, 2, or 3");
    return factor_gradient_resolved(y, f, mode, cfg, resolve_epsilon(cfg, y));
}

FactorSet initialize_factors(const ComplexTensor3& y, Index rank, InitStrategy strategy,
                             std::uint64_t seed) {
    if (rank < 1)
        throw std::invalid_argument("rank must be >= 1");
    detail::Rng rng(detail::splitmix64(seed));
    const Dims3 d = y.dims();
    FactorSet f = random_factors(d, rank, rng);

    if (strategy == InitStrategy::svd_leading) {
        leading_singular_vectors(unfold(y, 1), rank, f.A);
        leading_singular_vectors(unfold(y, 2), rank, f.B);
        leading_singular_vectors(unfold(y, 3), rank, f.C);
        // Least-squares scalar fit of the synthesis to y, absorbed into C.
        const ComplexTensor3 s = cpd_synthesize(f);
        const double s_norm = frobenius_norm(s);
        if (s_norm > 0.0)
            f.C *= inner_product(s, y) / (s_norm * s_norm);
        return f;
    }

    // seeded_random: unit columns from random_factors; match the synthesis
    // norm to the data.
    const double y_norm = frobenius_norm(y);
    const double s_norm = frobenius_norm(cpd_synthesize(f));
    if (s_norm > 0.0)
        f.C *= y_norm / s_norm;
    return f;
}

FactorSet normalize_factors(const FactorSet& f) {
    f.validate();
    FactorSet out = f;
    for (Index r = 0; r < out.rank(); ++r) {
        double scale = 1.0;
        const double na = out.A.col(r).norm();
        if (na > 0.0) {
            out.A.col(r) /= na;
            scale *= na;
        }
        const double nb = out.B.col(r).norm();
        if (nb > 0.0) {
            out.B.col(r) /= nb;
            scale *= nb;
        }
        out.C.col(r) *= scale;
    }
    return out;
}

SolveResult solve_cpdtv(const ComplexTensor3& y, const SolverConfig& cfg) {
    cfg.validate();
    const double eps = resolve_epsilon(cfg, y);

    RestartOutcome best;
    int best_index = -1;
    for (int restart = 0; restart < cfg.n_restarts; ++restart) {
        RestartOutcome outcome =
            run_restart(y, cfg, eps, detail::mix_seed(cfg.seed, static_cast<std::uint64_t>(restart)));
        if (best_index < 0 || outcome.final_objective < best.final_objective) {
            best = std::move(outcome);
            best_index = restart;
        }
    }
    best.diagnostics.best_restart = best_index;
    SolveResult result;
    result.xhat = cpd_synthesize(best.factors);
    result.factors = std::move(best.factors);
    result.diagnostics = std::move(best.diagnostics);
    return result;
}

} // namespace cpdtv
