#include "cpdtv/phantom.hpp"

#include <cmath>
#include <mutex>
#include <numbers>
#include <stdexcept>

#include <fftw3.h>

#include "detail/parallel.hpp"
#include "detail/rng.hpp"

namespace cpdtv {

namespace {

// FFTW's planner is not thread-safe; executing distinct plans is.
std::mutex fftw_planner_mutex;

double centered_coordinate(Index i, Index n) {
    if (n <= 1)
        return 0.0;
    const double half = 0.5 * static_cast<double>(n - 1);
    return (static_cast<double>(i) - half) / half;
}

/// Signed frequency index of FFT bin o along an axis of length n.
Index signed_frequency(Index o, Index n) {
    return o <= n / 2 ? o : o - n;
}

} // namespace

void PhantomConfig::validate() const {
    if (grid.nx < 1 || grid.ny < 1 || grid.nz < 1)
        throw std::invalid_argument("grid extents must all be >= 1");
    if (n_echo < 1 || n_motion < 1)
        throw std::invalid_argument("echo and motion-state counts must be >= 1");
    if (!(te_first > 0.0) || !(delta_te > 0.0))
        throw std::invalid_argument("echo times must be > 0");
    if (!(acceleration >= 1.0))
        throw std::invalid_argument("acceleration must be >= 1");
}

std::vector<Ellipse> default_ellipses() {
    return {
        // body outline
        {{0.00, 0.00, 0.00}, {0.90, 0.78, 0.85}, 0.80, 0.030, 0.000},
        // liver, elevated R2*
        {{-0.34, 0.18, 0.05}, {0.42, 0.36, 0.55}, 0.60, 0.120, 0.020},
        // spleen
        {{0.42, 0.30, 0.10}, {0.18, 0.20, 0.35}, 0.50, 0.080, -0.030},
        // focal lesion, fast decay
        {{-0.30, 0.12, 0.30}, {0.09, 0.09, 0.20}, 0.90, 0.300, 0.050},
        // cyst, slow decay
        {{0.05, -0.32, -0.20}, {0.11, 0.13, 0.16}, 0.70, 0.010, 0.000},
    };
}

ComplexTensor3 generate_phantom(const PhantomConfig& cfg, unsigned threads) {
    cfg.validate();
    const std::vector<Ellipse> shapes = cfg.ellipses.empty() ? default_ellipses() : cfg.ellipses;
    const Grid3 g = cfg.grid;
    const Index n_vox = g.count();
    ComplexTensor3 x(n_vox, cfg.n_echo, cfg.n_motion);

    // Per-echo complex signal of each ellipse.
    std::vector<std::vector<Complex>> decay(shapes.size());
    for (std::size_t s = 0; s < shapes.size(); ++s) {
        decay[s].resize(static_cast<std::size_t>(cfg.n_echo));
        for (Index j = 0; j < cfg.n_echo; ++j) {
            const double te = cfg.te_first + static_cast<double>(j) * cfg.delta_te;
            const double phase = 2.0 * std::numbers::pi * shapes[s].off_res_khz * te;
            decay[s][static_cast<std::size_t>(j)] =
                shapes[s].rho * std::exp(-shapes[s].r2star * te) *
                Complex{std::cos(phase), std::sin(phase)};
        }
    }

    const double half_z = g.nz > 1 ? 0.5 * static_cast<double>(g.nz - 1) : 0.0;
    detail::parallel_for(static_cast<std::size_t>(cfg.n_motion), threads, [&](std::size_t km) {
        const Index k = static_cast<Index>(km);
        // Sinusoidal superior-inferior translation, in voxels.
        const double offset_vox =
            cfg.motion_amplitude *
            std::sin(2.0 * std::numbers::pi * static_cast<double>(k) /
                     static_cast<double>(cfg.n_motion));
        const double offset = half_z > 0.0 ? offset_vox / half_z : 0.0;
        for (Index iz = 0; iz < g.nz; ++iz) {
            const double w = centered_coordinate(iz, g.nz);
            for (Index iy = 0; iy < g.ny; ++iy) {
                const double v = centered_coordinate(iy, g.ny);
                for (Index ix = 0; ix < g.nx; ++ix) {
                    const double u = centered_coordinate(ix, g.nx);
                    const Index p = ix + g.nx * (iy + g.ny * iz);
                    for (std::size_t s = 0; s < shapes.size(); ++s) {
                        const Ellipse& el = shapes[s];
                        const double du = (u - el.center[0]) / el.semi_axes[0];
                        const double dv = (v - el.center[1]) / el.semi_axes[1];
                        const double dw = (w - el.center[2] - offset) / el.semi_axes[2];
                        if (du * du + dv * dv + dw * dw <= 1.0)
                            for (Index j = 0; j < cfg.n_echo; ++j)
                                x(p, j, k) += decay[s][static_cast<std::size_t>(j)];
                    }
                }
            }
        }
    });
    return x;
}

std::vector<double> sampling_mask(const Grid3& grid, double acceleration, std::uint64_t seed,
                                  Index echo, Index motion) {
    if (!(acceleration >= 1.0))
        throw std::invalid_argument("acceleration must be >= 1");
    const Index total = grid.count();
    std::vector<double> mask(static_cast<std::size_t>(total), 0.0);

    // Fully sampled center ball: 8% of the half-width per axis.
    constexpr double kCenterRadius = 0.08;
    std::vector<Index> outer;
    outer.reserve(static_cast<std::size_t>(total));
    Index n_center = 0;
    for (Index oz = 0; oz < grid.nz; ++oz)
        for (Index oy = 0; oy < grid.ny; ++oy)
            for (Index ox = 0; ox < grid.nx; ++ox) {
                const double fx = static_cast<double>(signed_frequency(ox, grid.nx)) /
                                  std::max(1.0, 0.5 * static_cast<double>(grid.nx));
                const double fy = static_cast<double>(signed_frequency(oy, grid.ny)) /
                                  std::max(1.0, 0.5 * static_cast<double>(grid.ny));
                const double fz = static_cast<double>(signed_frequency(oz, grid.nz)) /
                                  std::max(1.0, 0.5 * static_cast<double>(grid.nz));
                const Index at = ox + grid.nx * (oy + grid.ny * oz);
                const double r_sq = (fx * fx + fy * fy + fz * fz) / (kCenterRadius * kCenterRadius);
                if (r_sq <= 1.0) {
                    mask[static_cast<std::size_t>(at)] = 1.0;
                    ++n_center;
                } else {
                    outer.push_back(at);
                }
            }

    const Index budget = static_cast<Index>(std::llround(static_cast<double>(total) / acceleration));
    if (n_center > budget)
        throw std::invalid_argument("acceleration " + std::to_string(acceleration) +
                                    " leaves no budget beyond the fully sampled center (" +
                                    std::to_string(n_center) + " center samples > " +
                                    std::to_string(budget) + " total)");

    // Exactly (budget - n_center) outer locations, drawn without replacement.
    detail::Rng rng(detail::mix_seed(seed, static_cast<std::uint64_t>(echo),
                                     static_cast<std::uint64_t>(motion)));
    const std::size_t keep = static_cast<std::size_t>(budget - n_center);
    for (std::size_t i = 0; i < keep && i < outer.size(); ++i) {
        const std::size_t j = i + static_cast<std::size_t>(rng.bits() % (outer.size() - i));
        std::swap(outer[i], outer[j]);
        mask[static_cast<std::size_t>(outer[i])] = acceleration;
    }
    return mask;
}

ComplexTensor3 inject_undersampling(const ComplexTensor3& x_true, const Grid3& grid,
                                    double acceleration, std::uint64_t seed, unsigned threads) {
    if (!(acceleration >= 1.0))
        throw std::invalid_argument("acceleration must be >= 1");
    const auto [n, e, t] = x_true.dims();
    if (grid.count() != n)
        throw std::invalid_argument("grid does not factor the spatial dimension");

    ComplexTensor3 y(x_true.dims());
    const double inv_count = 1.0 / static_cast<double>(n);
    detail::parallel_for(static_cast<std::size_t>(e * t), threads, [&](std::size_t vol) {
        const Index j = static_cast<Index>(vol) % e;
        const Index k = static_cast<Index>(vol) / e;
        const std::vector<double> mask = sampling_mask(grid, acceleration, seed, j, k);

        fftw_complex* buf;
        fftw_plan forward, backward;
        {
            std::lock_guard<std::mutex> lock(fftw_planner_mutex);
            buf = fftw_alloc_complex(static_cast<std::size_t>(n));
            // FFTW is row-major; x is the fastest axis, so pass (nz, ny, nx).
            forward = fftw_plan_dft_3d(static_cast<int>(grid.nz), static_cast<int>(grid.ny),
                                       static_cast<int>(grid.nx), buf, buf, FFTW_FORWARD,
                                       FFTW_ESTIMATE);
            backward = fftw_plan_dft_3d(static_cast<int>(grid.nz), static_cast<int>(grid.ny),
                                        static_cast<int>(grid.nx), buf, buf, FFTW_BACKWARD,
                                        FFTW_ESTIMATE);
        }
        const Complex* src = x_true.data() + (k * e + j) * n;
        for (Index i = 0; i < n; ++i) {
            buf[i][0] = src[i].real();
            buf[i][1] = src[i].imag();
        }
        fftw_execute(forward);
        for (Index i = 0; i < n; ++i) {
            buf[i][0] *= mask[static_cast<std::size_t>(i)];
            buf[i][1] *= mask[static_cast<std::size_t>(i)];
        }
        fftw_execute(backward);
        Complex* dst = y.data() + (k * e + j) * n;
        for (Index i = 0; i < n; ++i)
            dst[i] = Complex{buf[i][0], buf[i][1]} * inv_count;
        {
            std::lock_guard<std::mutex> lock(fftw_planner_mutex);
            fftw_destroy_plan(forward);
            fftw_destroy_plan(backward);
            fftw_free(buf);
        }
    });
    return y;
}

} // namespace cpdtv
