#include "cpdtv/io.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "cpdtv/errors.hpp"

namespace cpdtv {

namespace {

constexpr std::array<char, 4> kMagic{'C', 'T', '3', '\0'};

void put_u32le(std::string& out, std::uint32_t v) {
    for (int b = 0; b < 4; ++b)
        out.push_back(static_cast<char>((v >> (8 * b)) & 0xFF));
}

void put_u64le(std::string& out, std::uint64_t v) {
    for (int b = 0; b < 8; ++b)
        out.push_back(static_cast<char>((v >> (8 * b)) & 0xFF));
}

void put_f32le(std::string& out, float v) {
    put_u32le(out, std::bit_cast<std::uint32_t>(v));
}

std::uint32_t get_u32le(const unsigned char* p) {
    return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
           (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

std::uint64_t get_u64le(const unsigned char* p) {
    std::uint64_t v = 0;
    for (int b = 7; b >= 0; --b)
        v = (v << 8) | p[b];
    return v;
}

float get_f32le(const unsigned char* p) {
    return std::bit_cast<float>(get_u32le(p));
}

float narrow_checked(double v, const std::filesystem::path& path) {
    const float f = static_cast<float>(v);
    if (!std::isfinite(f))
        throw std::invalid_argument("value " + std::to_string(v) +
                                    " exceeds the single-precision range (writing " +
                                    path.string() + ")");
    return f;
}

} // namespace

void write_ct3(const ComplexTensor3& x, const std::filesystem::path& path) {
    const auto [n, e, t] = x.dims();
    std::string bytes;
    bytes.reserve(kCt3HeaderBytes + static_cast<std::size_t>(x.size()) * 8);
    bytes.append(kMagic.data(), kMagic.size());
    put_u32le(bytes, kCt3Version);
    put_u64le(bytes, static_cast<std::uint64_t>(n));
    put_u64le(bytes, static_cast<std::uint64_t>(e));
    put_u64le(bytes, static_cast<std::uint64_t>(t));
    for (Index i = 0; i < x.size(); ++i) {
        put_f32le(bytes, narrow_checked(x.data()[i].real(), path));
        put_f32le(bytes, narrow_checked(x.data()[i].imag(), path));
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        throw IoError("cannot open " + path.string() + " for writing");
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out)
        throw IoError("write failed for " + path.string());
}

ComplexTensor3 read_ct3(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw IoError("cannot open " + path.string() + " for reading");
    std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (in.bad())
        throw IoError("read failed for " + path.string());
    if (bytes.size() < kCt3HeaderBytes)
        throw FormatError(path.string() + ": file shorter than the 32-byte header");
    const auto* p = reinterpret_cast<const unsigned char*>(bytes.data());
    if (std::memcmp(p, kMagic.data(), kMagic.size()) != 0)
        throw FormatError(path.string() + ": bad magic");
    const std::uint32_t version = get_u32le(p + 4);
    if (version != kCt3Version)
        throw FormatError(path.string() + ": unsupported version " + std::to_string(version));
    const std::uint64_t n = get_u64le(p + 8);
    const std::uint64_t e = get_u64le(p + 16);
    const std::uint64_t t = get_u64le(p + 24);
    if (n < 1 || e < 1 || t < 1)
        throw FormatError(path.string() + ": extents must all be >= 1");
    const std::uint64_t count = n * e * t;
    const std::uint64_t expected = kCt3HeaderBytes + count * 8;
    if (bytes.size() != expected)
        throw FormatError(path.string() + ": payload length mismatch (expected " +
                          std::to_string(expected) + " bytes, got " +
                          std::to_string(bytes.size()) + ")");
    std::vector<Complex> data(count);
    const unsigned char* cursor = p + kCt3HeaderBytes;
    for (std::uint64_t i = 0; i < count; ++i, cursor += 8)
        data[i] = Complex{static_cast<double>(get_f32le(cursor)),
                          static_cast<double>(get_f32le(cursor + 4))};
    try {
        return ComplexTensor3(
            Dims3{static_cast<Index>(n), static_cast<Index>(e), static_cast<Index>(t)},
            std::move(data));
    } catch (const std::invalid_argument& err) {
        throw FormatError(path.string() + ": " + err.what());
    }
}

void export_slice(const ComplexTensor3& x, Index echo, Index motion,
                  const std::filesystem::path& path, const Grid3& grid,
                  const SliceWindow& window) {
    const auto [n, e, t] = x.dims();
    if (grid.count() != n)
        throw std::invalid_argument("grid does not factor the spatial dimension");
    if (echo < 0 || echo >= e)
        throw std::invalid_argument("echo index out of range");
    if (motion < 0 || motion >= t)
        throw std::invalid_argument("motion-state index out of range");

    const Index iz = grid.nz / 2;
    std::vector<double> magnitudes(static_cast<std::size_t>(grid.nx * grid.ny));
    for (Index iy = 0; iy < grid.ny; ++iy)
        for (Index ix = 0; ix < grid.nx; ++ix) {
            const Index p = ix + grid.nx * (iy + grid.ny * iz);
            magnitudes[static_cast<std::size_t>(iy * grid.nx + ix)] = std::abs(x(p, echo, motion));
        }

    double lo = 0.0, hi = 0.0;
    if (window) {
        lo = window->first;
        hi = window->second;
    } else {
        // auto: [0, 99.5th percentile] (nearest rank)
        std::vector<double> sorted = magnitudes;
        std::sort(sorted.begin(), sorted.end());
        const std::size_t rank = static_cast<std::size_t>(
            std::ceil(0.995 * static_cast<double>(sorted.size())));
        hi = sorted[std::min(sorted.size() - 1, std::max<std::size_t>(rank, 1) - 1)];
    }

    std::string bytes = "P5\n" + std::to_string(grid.nx) + " " + std::to_string(grid.ny) +
                        "\n65535\n";
    for (double m : magnitudes) {
        std::uint16_t pixel;
        if (hi > lo) {
            const double level = std::clamp((m - lo) / (hi - lo), 0.0, 1.0);
            pixel = static_cast<std::uint16_t>(std::lround(level * 65535.0));
        } else {
            pixel = m > lo ? 65535 : 0;
        }
        // PGM stores the most significant byte first.
        bytes.push_back(static_cast<char>(pixel >> 8));
        bytes.push_back(static_cast<char>(pixel & 0xFF));
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        throw IoError("cannot open " + path.string() + " for writing");
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out)
        throw IoError("write failed for " + path.string());
}

void write_sidecar(const SidecarMeta& meta, const std::filesystem::path& path) {
    char buf[256];
    std::snprintf(buf, sizeof(buf),
                  "nx=%lld\nny=%lld\nnz=%lld\nte_first=%.17g\ndelta_te=%.17g\n"
                  "acceleration=%.17g\nseed=%llu\n",
                  static_cast<long long>(meta.grid.nx), static_cast<long long>(meta.grid.ny),
                  static_cast<long long>(meta.grid.nz), meta.te_first, meta.delta_te,
                  meta.acceleration, static_cast<unsigned long long>(meta.seed));
    std::ofstream out(path, std::ios::trunc);
    if (!out)
        throw IoError("cannot open " + path.string() + " for writing");
    out << buf;
    if (!out)
        throw IoError("write failed for " + path.string());
}

SidecarMeta read_sidecar(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in)
        throw IoError("cannot open " + path.string() + " for reading");
    std::map<std::string, std::string> kv;
    std::string line;
    while (std::getline(in, line)) {
        const auto eq = line.find('=');
        if (eq == std::string::npos || eq == 0)
            continue;
        kv[line.substr(0, eq)] = line.substr(eq + 1);
    }
    const auto require = [&](const char* key) -> const std::string& {
        const auto it = kv.find(key);
        if (it == kv.end())
            throw FormatError(path.string() + ": missing key '" + key + "'");
        return it->second;
    };
    try {
        SidecarMeta meta;
        meta.grid.nx = static_cast<Index>(std::stoll(require("nx")));
        meta.grid.ny = static_cast<Index>(std::stoll(require("ny")));
        meta.grid.nz = static_cast<Index>(std::stoll(require("nz")));
        meta.te_first = std::stod(require("te_first"));
        meta.delta_te = std::stod(require("delta_te"));
        meta.acceleration = std::stod(require("acceleration"));
        meta.seed = std::stoull(require("seed"));
        return meta;
    } catch (const FormatError&) {
        throw;
    } catch (const std::exception& e) {
        throw FormatError(path.string() + ": " + e.what());
    }
}

std::filesystem::path sidecar_path(const std::filesystem::path& tensor_path) {
    std::filesystem::path p = tensor_path;
    p += ".meta";
    return p;
}

} // namespace cpdtv
