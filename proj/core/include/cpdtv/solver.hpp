#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "cpdtv/tensor.hpp"

namespace cpdtv {

/// Dimension a TV term differences along.
enum class TvDim { echo, motion };

/// Form of the TV regularization gradient.
///
/// `paper` is the normalized-Laplacian form grad^H grad X / ||grad X||_1 with
/// the plain complex modulus in the objective. `smoothed_l1` replaces |z| by
/// sqrt(|z|^2 + eps^2) - eps in the objective and uses its exact gradient
/// grad^H(grad X / sqrt(|grad X|^2 + eps^2)), so line search and
/// finite-difference checks are consistent.
enum class TvVariant { paper, smoothed_l1 };

enum class InitStrategy { seeded_random, svd_leading };

enum class StepPolicy { fixed, backtracking };

enum class Termination { converged, max_iters, stalled };

struct SolverConfig {
    Index rank = 13;
    double lambda_e = 0.0;
    double lambda_t = 0.0;
    TvVariant tv_variant = TvVariant::smoothed_l1;
    /// Smoothing parameter for smoothed_l1. Unset means auto:
    /// 1e-8 times the mean modulus of the input tensor.
    std::optional<double> epsilon;
    StepPolicy step_policy = StepPolicy::backtracking;
    double step_alpha0 = 1.0;   ///< initial step (backtracking) or the fixed step
    double step_shrink = 0.5;
    double armijo_c = 1e-4;
    int max_outer_iters = 500;
    double rel_tol = 1e-6;
    int n_restarts = 1;
    std::uint64_t seed = 0;
    InitStrategy init = InitStrategy::seeded_random;

    /// Throws std::invalid_argument on out-of-range fields.
    void validate() const;
};

struct Diagnostics {
    /// Objective value after each outer iteration (accepted state). With the
    /// backtracking policy this sequence is non-increasing.
    std::vector<double> objective_trace;
    /// Mean accepted step size over the three factor updates, one entry per
    /// outer iteration (a rejected update counts as step 0).
    std::vector<double> step_trace;
    Termination termination = Termination::max_iters;
    int iterations = 0;
    int best_restart = 0;
};

struct SolveResult {
    FactorSet factors;
    ComplexTensor3 xhat;
    Diagnostics diagnostics;
};

/// Exact total variation along the echo dimension:
/// sum_{j<E-1} sum_{i,k} |X(i,j+1,k) - X(i,j,k)|. Zero when E == 1.
double tv_echo(const ComplexTensor3& x);

/// Same with echo and motion roles swapped.
double tv_motion(const ComplexTensor3& x);

/// TV value as used inside objective(): the exact modulus for the paper
/// variant, sqrt(|d|^2 + eps^2) - eps per difference for smoothed_l1.
double tv_value(const ComplexTensor3& x, TvDim dim, TvVariant variant, double eps);

/// Gradient of the TV term with respect to the tensor, same shape as x, in
/// the 2*d/d(conj z) convention (real part = d/d Re, imaginary part = d/d Im).
/// The paper variant returns the zero tensor when ||grad X||_1 == 0.
ComplexTensor3 tv_gradient(const ComplexTensor3& x, TvDim dim, TvVariant variant, double eps);

/// 1/2 ||Y - X||_F^2 + lambda_e TVe(X) + lambda_t TVt(X) with
/// X = cpd_synthesize(f). Throws std::invalid_argument on dimension mismatch.
double objective(const ComplexTensor3& y, const FactorSet& f, const SolverConfig& cfg);

/// Gradient of objective() with respect to the mode's factor matrix, the
/// other two held constant; a descent step is factor <- factor - alpha * grad.
/// Mode 1 data term: -(Y_(1) - A (C(.)B)^T) conj(C(.)B); modes 2 and 3 use
/// (C(.)A) and (B(.)A). The TV term is formed in tensor domain and chained
/// through the synthesis.
ComplexMatrix factor_gradient(const ComplexTensor3& y, const FactorSet& f, int mode,
                              const SolverConfig& cfg);

/// seeded_random: complex standard normal entries from a deterministic
/// generator, columns scaled to unit 2-norm, then C scaled so the synthesis
/// matches ||y||_F. svd_leading: per mode, the top-R left singular vectors of
/// the unfolding (excess columns beyond the mode's dimension filled as in
/// seeded_random), with the least-squares scalar fit absorbed into C.
FactorSet initialize_factors(const ComplexTensor3& y, Index rank, InitStrategy strategy,
                             std::uint64_t seed);

/// Rescales so columns of A and B have unit 2-norm, absorbing the scale into
/// C; the synthesized tensor is unchanged. Zero columns pass through.
FactorSet normalize_factors(const FactorSet& f);

/// Alternating gradient descent on the TV-regularized CPD objective. Runs
/// cfg.n_restarts independent initializations and returns the restart with
/// the lowest final objective. Throws NumericalFailure if the objective
/// becomes non-finite.
SolveResult solve_cpdtv(const ComplexTensor3& y, const SolverConfig& cfg);

} // namespace cpdtv
