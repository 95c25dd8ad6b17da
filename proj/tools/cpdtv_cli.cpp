// Command-line driver for the phantom -> undersample -> solve -> metrics ->
// export pipeline. Each stage reads and writes CT3 files so reconstructions
// with different settings can reuse the same input tensor.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "cpdtv/errors.hpp"
#include "cpdtv/io.hpp"
#include "cpdtv/metrics.hpp"
#include "cpdtv/phantom.hpp"
#include "cpdtv/solver.hpp"
#include "cpdtv/tensor.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitIo = 3;
constexpr int kExitNumerical = 4;

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

struct PhantomArgs {
    std::string out;
    std::string truth_out;
    std::vector<long long> grid{32, 32, 8};
    long long echoes = 6;
    long long states = 6;
    double accel = 6.0;
    std::uint64_t seed = 1;
    double motion_amp = 1.5;
    unsigned threads = 0;
};

struct SolveArgs {
    std::string in;
    std::string out;
    long long rank = 13;
    double lambda_e = 0.0;
    double lambda_t = 0.0;
    std::string variant = "smoothed_l1";
    long long max_iters = 500;
    double tol = 1e-6;
    long long restarts = 1;
    std::uint64_t seed = 1;
    std::string trace_out;
    unsigned threads = 0;
};

struct MetricsArgs {
    std::string test;
    std::string ref;
};

struct SweepArgs {
    std::string in;
    std::string truth;
    std::vector<long long> ranks;
    double lambda_e = 0.0;
    double lambda_t = 0.0;
    std::string out;
    std::uint64_t seed = 1;
    unsigned threads = 0;
};

struct ExportArgs {
    std::string in;
    long long echo = 0;
    long long state = 0;
    std::string out;
    std::string window = "auto";
};

void write_text_file(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::trunc);
    if (!out)
        throw cpdtv::IoError("cannot open " + path.string() + " for writing");
    out << text;
    if (!out)
        throw cpdtv::IoError("write failed for " + path.string());
}

void run_phantom(const PhantomArgs& args) {
    if (args.grid.size() != 3)
        throw CLI::ValidationError("--grid", "expected nx,ny,nz");
    cpdtv::PhantomConfig cfg;
    cfg.grid = {static_cast<cpdtv::Index>(args.grid[0]), static_cast<cpdtv::Index>(args.grid[1]),
                static_cast<cpdtv::Index>(args.grid[2])};
    cfg.n_echo = static_cast<cpdtv::Index>(args.echoes);
    cfg.n_motion = static_cast<cpdtv::Index>(args.states);
    cfg.acceleration = args.accel;
    cfg.seed = args.seed;
    cfg.motion_amplitude = args.motion_amp;

    const cpdtv::ComplexTensor3 x_true = cpdtv::generate_phantom(cfg, args.threads);
    const cpdtv::ComplexTensor3 y =
        cpdtv::inject_undersampling(x_true, cfg.grid, cfg.acceleration, cfg.seed, args.threads);

    cpdtv::SidecarMeta meta;
    meta.grid = cfg.grid;
    meta.te_first = cfg.te_first;
    meta.delta_te = cfg.delta_te;
    meta.acceleration = cfg.acceleration;
    meta.seed = cfg.seed;

    cpdtv::write_ct3(y, args.out);
    cpdtv::write_sidecar(meta, cpdtv::sidecar_path(args.out));
    cpdtv::write_ct3(x_true, args.truth_out);
    cpdtv::write_sidecar(meta, cpdtv::sidecar_path(args.truth_out));
}

void run_solve(const SolveArgs& args) {
    cpdtv::SolverConfig cfg;
    cfg.rank = static_cast<cpdtv::Index>(args.rank);
    cfg.lambda_e = args.lambda_e;
    cfg.lambda_t = args.lambda_t;
    if (args.variant == "paper")
        cfg.tv_variant = cpdtv::TvVariant::paper;
    else if (args.variant == "smoothed_l1")
        cfg.tv_variant = cpdtv::TvVariant::smoothed_l1;
    else
        throw CLI::ValidationError("--variant", "must be 'paper' or 'smoothed_l1'");
    cfg.max_outer_iters = static_cast<int>(args.max_iters);
    cfg.rel_tol = args.tol;
    cfg.n_restarts = static_cast<int>(args.restarts);
    cfg.seed = args.seed;

    const cpdtv::ComplexTensor3 y = cpdtv::read_ct3(args.in);
    const cpdtv::SolveResult result = cpdtv::solve_cpdtv(y, cfg);
    cpdtv::write_ct3(result.xhat, args.out);

    // Propagate the sidecar so downstream export still knows the grid.
    const auto in_meta = cpdtv::sidecar_path(args.in);
    if (std::filesystem::exists(in_meta))
        std::filesystem::copy_file(in_meta, cpdtv::sidecar_path(args.out),
                                   std::filesystem::copy_options::overwrite_existing);

    if (!args.trace_out.empty()) {
        std::string csv = "iter,objective,step\n";
        const auto& diag = result.diagnostics;
        for (std::size_t i = 0; i < diag.objective_trace.size(); ++i)
            csv += std::to_string(i + 1) + "," + format_double(diag.objective_trace[i]) + "," +
                   format_double(diag.step_trace[i]) + "\n";
        write_text_file(args.trace_out, csv);
    }
}

void run_metrics(const MetricsArgs& args) {
    const cpdtv::ComplexTensor3 test = cpdtv::read_ct3(args.test);
    const cpdtv::ComplexTensor3 ref = cpdtv::read_ct3(args.ref);
    std::cout << "nrmse=" << format_double(cpdtv::nrmse(test, ref))
              << " psnr=" << format_double(cpdtv::psnr(test, ref)) << "\n";
}

void run_sweep(const SweepArgs& args) {
    const cpdtv::ComplexTensor3 y = cpdtv::read_ct3(args.in);
    const cpdtv::ComplexTensor3 x_true = cpdtv::read_ct3(args.truth);
    std::vector<cpdtv::Index> ranks(args.ranks.begin(), args.ranks.end());
    cpdtv::SolverConfig cfg;
    cfg.lambda_e = args.lambda_e;
    cfg.lambda_t = args.lambda_t;
    cfg.seed = args.seed;
    const cpdtv::SweepResult result = cpdtv::rank_sweep(y, x_true, ranks, cfg, args.threads);
    write_text_file(args.out, result.to_csv());
}

void run_export(const ExportArgs& args) {
    const cpdtv::ComplexTensor3 x = cpdtv::read_ct3(args.in);
    const cpdtv::SidecarMeta meta = cpdtv::read_sidecar(cpdtv::sidecar_path(args.in));
    cpdtv::SliceWindow window;
    if (args.window != "auto") {
        double lo = 0.0, hi = 0.0;
        if (std::sscanf(args.window.c_str(), "%lf,%lf", &lo, &hi) != 2)
            throw CLI::ValidationError("--window", "expected 'auto' or 'lo,hi'");
        window = std::make_pair(lo, hi);
    }
    cpdtv::export_slice(x, static_cast<cpdtv::Index>(args.echo),
                        static_cast<cpdtv::Index>(args.state), args.out, meta.grid, window);
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"TV-regularized CPD reconstruction of space x echo x motion-state tensors"};
    app.require_subcommand(1);

    PhantomArgs phantom;
    auto* sub_phantom = app.add_subcommand("phantom", "Generate a synthetic undersampled tensor");
    sub_phantom->add_option("--out", phantom.out, "Output CT3 path for the input tensor Y")->required();
    sub_phantom->add_option("--truth-out", phantom.truth_out, "Output CT3 path for the ground truth")->required();
    sub_phantom->add_option("--grid", phantom.grid, "Grid as nx,ny,nz")->delimiter(',')->expected(3);
    sub_phantom->add_option("--echoes", phantom.echoes, "Echo count");
    sub_phantom->add_option("--states", phantom.states, "Motion-state count");
    sub_phantom->add_option("--accel", phantom.accel, "Undersampling acceleration factor");
    sub_phantom->add_option("--seed", phantom.seed, "RNG seed");
    sub_phantom->add_option("--motion-amp", phantom.motion_amp, "Motion amplitude in voxels");
    sub_phantom->add_option("--threads", phantom.threads, "Worker threads (0 = all cores)");

    SolveArgs solve;
    auto* sub_solve = app.add_subcommand("solve", "Reconstruct a tensor with CPD / CPD-TV");
    sub_solve->add_option("--in", solve.in, "Input CT3 path")->required();
    sub_solve->add_option("--out", solve.out, "Output CT3 path")->required();
    sub_solve->add_option("--rank", solve.rank, "Decomposition rank");
    sub_solve->add_option("--lambda-e", solve.lambda_e, "TV weight along echoes");
    sub_solve->add_option("--lambda-t", solve.lambda_t, "TV weight along motion states");
    sub_solve->add_option("--variant", solve.variant, "TV gradient variant: paper | smoothed_l1");
    sub_solve->add_option("--max-iters", solve.max_iters, "Outer iteration cap");
    sub_solve->add_option("--tol", solve.tol, "Relative objective-change tolerance");
    sub_solve->add_option("--restarts", solve.restarts, "Independent restarts");
    sub_solve->add_option("--seed", solve.seed, "RNG seed");
    sub_solve->add_option("--trace-out", solve.trace_out, "CSV path for the objective trace");
    sub_solve->add_option("--threads", solve.threads, "Worker threads (0 = all cores)");

    MetricsArgs metrics;
    auto* sub_metrics = app.add_subcommand("metrics", "Print nrmse/psnr of one tensor vs a reference");
    sub_metrics->add_option("--test", metrics.test, "CT3 path under test")->required();
    sub_metrics->add_option("--ref", metrics.ref, "Reference CT3 path")->required();

    SweepArgs sweep;
    auto* sub_sweep = app.add_subcommand("sweep", "Reconstruct at several ranks and tabulate metrics");
    sub_sweep->add_option("--in", sweep.in, "Input CT3 path")->required();
    sub_sweep->add_option("--truth", sweep.truth, "Ground-truth CT3 path")->required();
    sub_sweep->add_option("--ranks", sweep.ranks, "Comma-separated ranks")->delimiter(',')->required();
    sub_sweep->add_option("--lambda-e", sweep.lambda_e, "TV weight along echoes");
    sub_sweep->add_option("--lambda-t", sweep.lambda_t, "TV weight along motion states");
    sub_sweep->add_option("--out", sweep.out, "Output CSV path")->required();
    sub_sweep->add_option("--seed", sweep.seed, "RNG seed");
    sub_sweep->add_option("--threads", sweep.threads, "Worker threads (0 = all cores)");

    ExportArgs exp;
    auto* sub_export = app.add_subcommand("export", "Write a magnitude slice as 16-bit PGM");
    sub_export->add_option("--in", exp.in, "Input CT3 path (with .meta sidecar)")->required();
    sub_export->add_option("--echo", exp.echo, "Echo index (0-based)");
    sub_export->add_option("--state", exp.state, "Motion-state index (0-based)");
    sub_export->add_option("--out", exp.out, "Output PGM path")->required();
    sub_export->add_option("--window", exp.window, "'auto' or explicit 'lo,hi'");

    try {
        app.parse(argc, argv);
        if (sub_phantom->parsed())
            run_phantom(phantom);
        else if (sub_solve->parsed())
            run_solve(solve);
        else if (sub_metrics->parsed())
            run_metrics(metrics);
        else if (sub_sweep->parsed())
            run_sweep(sweep);
        else if (sub_export->parsed())
            run_export(exp);
    } catch (const CLI::CallForHelp& e) {
        app.exit(e);
        std::cerr << "ok\n";
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const cpdtv::NumericalFailure& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitNumerical;
    } catch (const cpdtv::IoError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitIo;
    } catch (const cpdtv::FormatError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitIo;
    } catch (const std::filesystem::filesystem_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitIo;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    }
    std::cerr << "ok\n";
    return kExitOk;
}
