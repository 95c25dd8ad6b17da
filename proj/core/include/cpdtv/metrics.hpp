#pragma once

#include <functional>
#include <string>
#include <vector>

#include "cpdtv/solver.hpp"
#include "cpdtv/tensor.hpp"

namespace cpdtv {

/// ||x_hat - x_ref||_F / ||x_ref||_F. Throws std::invalid_argument on
/// dimension mismatch or a zero reference.
double nrmse(const ComplexTensor3& x_hat, const ComplexTensor3& x_ref);

/// 20 log10(max modulus of x_ref / RMS of the complex difference moduli),
/// in dB. +infinity for identical inputs. Defined on the complex difference
/// so phase errors are penalized.
double psnr(const ComplexTensor3& x_hat, const ComplexTensor3& x_ref);

struct SweepRow {
    Index rank = 0;
    double lambda_e = 0.0;
    double lambda_t = 0.0;
    double nrmse_output = 0.0;
    double nrmse_input = 0.0;
    double psnr_output = 0.0;
    int iterations = 0;
    double wall_seconds = 0.0;
    bool failed = false;
    std::string error; ///< in-memory only; failed rows serialize metrics as nan
};

struct SweepResult {
    std::vector<SweepRow> rows;

    /// Fixed header "rank,lambda_e,lambda_t,nrmse_output,nrmse_input,
    /// psnr_output,iterations,wall_seconds" followed by one line per row.
    std::string to_csv() const;
};

/// Called with each completed row's index and solver diagnostics.
using SweepObserver = std::function<void(std::size_t, const Diagnostics&)>;

/// Runs solve_cpdtv once per requested rank with cfg_base's remaining
/// settings, recording reconstruction metrics against x_true. A failing row
/// is marked failed instead of aborting the sweep. Rows may execute in
/// parallel but are returned in input order.
SweepResult rank_sweep(const ComplexTensor3& y, const ComplexTensor3& x_true,
                       const std::vector<Index>& ranks, const SolverConfig& cfg_base,
                       unsigned threads = 1, const SweepObserver& observer = nullptr);

} // namespace cpdtv
