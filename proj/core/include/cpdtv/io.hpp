#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <utility>

#include "cpdtv/phantom.hpp"
#include "cpdtv/tensor.hpp"

namespace cpdtv {

/// CT3 binary tensor format, fixed little-endian:
///   bytes  0-3   magic "CT3\0"
///   bytes  4-7   version, unsigned 32-bit (currently 1)
///   bytes  8-31  extents N, E, T as unsigned 64-bit
///   then N*E*T entries in storage order (space fastest, then echo, then
///   motion), each a 32-bit float real part followed by a 32-bit float
///   imaginary part.
inline constexpr std::size_t kCt3HeaderBytes = 32;
inline constexpr std::uint32_t kCt3Version = 1;

/// Writes x to path in CT3 format (values narrowed to single precision).
/// Throws IoError on write failure, std::invalid_argument if an entry
/// exceeds the single-precision range.
void write_ct3(const ComplexTensor3& x, const std::filesystem::path& path);

/// Inverse of write_ct3, widening entries to double precision. Throws
/// FormatError on bad magic/version/dims or a payload length mismatch,
/// IoError if the file cannot be opened.
ComplexTensor3 read_ct3(const std::filesystem::path& path);

/// Display window for slice export; nullopt selects [0, 99.5th percentile
/// of the slice's magnitudes].
using SliceWindow = std::optional<std::pair<double, double>>;

/// Writes the central nz/2 axial magnitude slice of the (echo, motion)
/// volume as a 16-bit binary PGM (P5, maxval 65535, nx x ny pixels) with
/// linear windowing. Throws std::invalid_argument on out-of-range indices or
/// when grid does not factor the spatial dimension.
void export_slice(const ComplexTensor3& x, Index echo, Index motion,
                  const std::filesystem::path& path, const Grid3& grid,
                  const SliceWindow& window = std::nullopt);

/// Plain-text sidecar carrying the grid factorization and acquisition
/// parameters the CT3 payload does not store (key=value lines).
struct SidecarMeta {
    Grid3 grid;
    double te_first = 0.032;
    double delta_te = 1.4;
    double acceleration = 1.0;
    std::uint64_t seed = 0;
};

void write_sidecar(const SidecarMeta& meta, const std::filesystem::path& path);
SidecarMeta read_sidecar(const std::filesystem::path& path);

/// Conventional sidecar location for a CT3 file: "<tensor path>.meta".
std::filesystem::path sidecar_path(const std::filesystem::path& tensor_path);

} // namespace cpdtv
