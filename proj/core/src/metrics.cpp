#include "cpdtv/metrics.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <mutex>
#include <stdexcept>

#include "detail/parallel.hpp"

namespace cpdtv {

namespace {

void require_same_dims(const ComplexTensor3& a, const ComplexTensor3& b) {
    if (!(a.dims() == b.dims()))
        throw std::invalid_argument("tensor dimensions do not match");
}

double diff_norm(const ComplexTensor3& a, const ComplexTensor3& b) {
    double sum = 0.0;
    for (Index i = 0; i < a.size(); ++i)
        sum += std::norm(a.data()[i] - b.data()[i]);
    return std::sqrt(sum);
}

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

} // namespace

double nrmse(const ComplexTensor3& x_hat, const ComplexTensor3& x_ref) {
    require_same_dims(x_hat, x_ref);
    const double ref_norm = frobenius_norm(x_ref);
    if (ref_norm == 0.0)
        throw std::invalid_argument("nrmse: reference tensor is zero");
    return diff_norm(x_hat, x_ref) / ref_norm;
}

double psnr(const ComplexTensor3& x_hat, const ComplexTensor3& x_ref) {
    require_same_dims(x_hat, x_ref);
    double peak = 0.0;
    for (Index i = 0; i < x_ref.size(); ++i)
        peak = std::max(peak, std::abs(x_ref.data()[i]));
    const double rmse = diff_norm(x_hat, x_ref) / std::sqrt(static_cast<double>(x_ref.size()));
    if (rmse == 0.0)
        return std::numeric_limits<double>::infinity();
    return 20.0 * std::log10(peak / rmse);
}

std::string SweepResult::to_csv() const {
    std::string out =
        "rank,lambda_e,lambda_t,nrmse_output,nrmse_input,psnr_output,iterations,wall_seconds\n";
    const double nan = std::numeric_limits<double>::quiet_NaN();
    for (const SweepRow& row : rows) {
        out += std::to_string(row.rank);
        out += ',';
        out += format_double(row.lambda_e);
        out += ',';
        out += format_double(row.lambda_t);
        out += ',';
        out += format_double(row.failed ? nan : row.nrmse_output);
        out += ',';
        out += format_double(row.nrmse_input);
        out += ',';
        out += format_double(row.failed ? nan : row.psnr_output);
        out += ',';
        out += std::to_string(row.iterations);
        out += ',';
        out += format_double(row.wall_seconds);
        out += '\n';
    }
    return out;
}

SweepResult rank_sweep(const ComplexTensor3& y, const ComplexTensor3& x_true,
                       const std::vector<Index>& ranks, const SolverConfig& cfg_base,
                       unsigned threads, const SweepObserver& observer) {
    require_same_dims(y, x_true);
    if (ranks.empty())
        throw std::invalid_argument("rank_sweep: no ranks requested");

    const double input_error = nrmse(y, x_true);
    SweepResult result;
    result.rows.resize(ranks.size());
    std::mutex observer_mutex;

    detail::parallel_for(ranks.size(), threads, [&](std::size_t idx) {
        SweepRow& row = result.rows[idx];
        row.rank = ranks[idx];
        row.lambda_e = cfg_base.lambda_e;
        row.lambda_t = cfg_base.lambda_t;
        row.nrmse_input = input_error;
        const auto start = std::chrono::steady_clock::now();
        try {
            SolverConfig cfg = cfg_base;
            cfg.rank = ranks[idx];
            const SolveResult solved = solve_cpdtv(y, cfg);
            row.nrmse_output = nrmse(solved.xhat, x_true);
            row.psnr_output = psnr(solved.xhat, x_true);
            row.iterations = solved.diagnostics.iterations;
            if (observer) {
                std::lock_guard<std::mutex> lock(observer_mutex);
                observer(idx, solved.diagnostics);
            }
        } catch (const std::exception& e) {
            row.failed = true;
            row.error = e.what();
        }
        row.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    });
    return result;
}

} // namespace cpdtv
