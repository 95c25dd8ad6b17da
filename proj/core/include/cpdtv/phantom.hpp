#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "cpdtv/tensor.hpp"

namespace cpdtv {

/// Voxel counts of the spatial grid; N = nx * ny * nz with x fastest.
struct Grid3 {
    Index nx = 0;
    Index ny = 0;
    Index nz = 0;

    Index count() const noexcept { return nx * ny * nz; }
    friend bool operator==(const Grid3&, const Grid3&) = default;
};

/// One ellipsoid of the synthetic multi-echo phantom. Center and semi-axes
/// are in normalized grid coordinates ([-1, 1] spans each axis); overlapping
/// ellipses add their signals.
struct Ellipse {
    std::array<double, 3> center{0.0, 0.0, 0.0};
    std::array<double, 3> semi_axes{0.5, 0.5, 0.5};
    double rho = 1.0;        ///< proton-density amplitude
    double r2star = 0.0;     ///< decay rate, 1/ms
    double off_res_khz = 0.0; ///< off-resonance frequency, kHz
};

struct PhantomConfig {
    Grid3 grid{32, 32, 8};
    Index n_echo = 6;
    Index n_motion = 6;
    double te_first = 0.032; ///< ms
    double delta_te = 1.4;   ///< ms
    std::vector<Ellipse> ellipses;
    double motion_amplitude = 1.5; ///< voxels of sinusoidal SI (z) translation
    double acceleration = 6.0;
    std::uint64_t seed = 0;

    /// Throws std::invalid_argument on out-of-range fields.
    void validate() const;
};

/// The abdominal-flavored default ellipse set used when cfg.ellipses is empty.
std::vector<Ellipse> default_ellipses();

/// Ground-truth tensor: voxel (p, echo j, motion k) carries
/// sum_ellipses rho * exp(-r2star * TE_j) * exp(i 2 pi f0 TE_j) for every
/// ellipse covering p after the state's z translation, with
/// TE_j = te_first + j * delta_te. Deterministic in cfg; `threads` only
/// splits the motion states across workers.
ComplexTensor3 generate_phantom(const PhantomConfig& cfg, unsigned threads = 1);

/// Per-volume k-space sampling weights in FFT (unshifted) frequency order:
/// 1 inside the fully sampled center ball (radius 8% of the half-width per
/// axis), `acceleration` on kept outer locations, 0 elsewhere. Exactly
/// round(count/acceleration) locations are kept, drawn without replacement
/// from a generator seeded by (seed, echo, motion). Throws
/// std::invalid_argument if the center ball alone exceeds the budget.
std::vector<double> sampling_mask(const Grid3& grid, double acceleration, std::uint64_t seed,
                                  Index echo, Index motion);

/// Simulates undersampling artifacts: per (echo, motion) volume, FFT, apply
/// sampling_mask, inverse FFT. The result is the ground truth plus structured
/// aliasing. Identity (up to FFT round-off) when acceleration == 1.
ComplexTensor3 inject_undersampling(const ComplexTensor3& x_true, const Grid3& grid,
                                    double acceleration, std::uint64_t seed,
                                    unsigned threads = 1);

} // namespace cpdtv
