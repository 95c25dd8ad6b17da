#pragma once

#include <complex>
#include <cstddef>
#include <vector>

#include <Eigen/Dense>

namespace cpdtv {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd; // column-major, as all unfoldings assume
using Index = Eigen::Index;

/// Extents of a space x echo x motion-state tensor.
struct Dims3 {
    Index n_space = 0;
    Index n_echo = 0;
    Index n_motion = 0;

    Index count() const noexcept { return n_space * n_echo * n_motion; }
    friend bool operator==(const Dims3&, const Dims3&) = default;
};

/// Dense complex 3-way array indexed (space i, echo j, motion k).
///
/// Storage puts the spatial index fastest, then echo, then motion:
/// element (i, j, k) lives at linear offset (k * E + j) * N + i. That layout
/// makes the mode-1 unfolding a plain reshape of the buffer.
class ComplexTensor3 {
public:
    ComplexTensor3() = default;

    /// Zero-filled tensor. Throws std::invalid_argument unless all extents >= 1.
    ComplexTensor3(Index n_space, Index n_echo, Index n_motion);
    explicit ComplexTensor3(const Dims3& dims) : ComplexTensor3(dims.n_space, dims.n_echo, dims.n_motion) {}

    /// Adopts an existing buffer. Throws std::invalid_argument if the length
    /// is not N*E*T or any entry is non-finite.
    ComplexTensor3(const Dims3& dims, std::vector<Complex> data);

    const Dims3& dims() const noexcept { return dims_; }
    Index size() const noexcept { return static_cast<Index>(data_.size()); }

    Complex& operator()(Index i, Index j, Index k) noexcept {
        return data_[static_cast<std::size_t>((k * dims_.n_echo + j) * dims_.n_space + i)];
    }
    const Complex& operator()(Index i, Index j, Index k) const noexcept {
        return data_[static_cast<std::size_t>((k * dims_.n_echo + j) * dims_.n_space + i)];
    }

    Complex* data() noexcept { return data_.data(); }
    const Complex* data() const noexcept { return data_.data(); }
    std::vector<Complex>& storage() noexcept { return data_; }
    const std::vector<Complex>& storage() const noexcept { return data_; }

    friend bool operator==(const ComplexTensor3&, const ComplexTensor3&) = default;

private:
    Dims3 dims_{};
    std::vector<Complex> data_;
};

/// CPD factor matrices A (N x R), B (E x R), C (T x R) of
/// X = sum_r a_r o b_r o c_r.
struct FactorSet {
    ComplexMatrix A;
    ComplexMatrix B;
    ComplexMatrix C;

    Index rank() const noexcept { return A.cols(); }
    Dims3 dims() const noexcept { return Dims3{A.rows(), B.rows(), C.rows()}; }

    /// Throws std::invalid_argument unless A, B, C share a column count >= 1.
    void validate() const;
};

/// Mode-n unfolding (matricization). Shapes: mode 1 -> N x (E*T),
/// mode 2 -> E x (N*T), mode 3 -> T x (N*E); among the remaining modes the
/// lower-numbered one varies fastest along the columns, so that
/// unfold(cpd_synthesize({A,B,C}), 1) == A * khatri_rao(C, B)^T exactly.
ComplexMatrix unfold(const ComplexTensor3& x, int mode);

/// Inverse of unfold: fold(unfold(x, m), m, x.dims()) == x bit-exactly.
ComplexTensor3 fold(const ComplexMatrix& m, int mode, const Dims3& dims);

/// Column-wise Kronecker product: column r of the result is
/// kron(p.col(r), q.col(r)), i.e. entry (ip * q.rows() + iq) = p(ip,r) * q(iq,r).
ComplexMatrix khatri_rao(const ComplexMatrix& p, const ComplexMatrix& q);

/// X(i,j,k) = sum_r A(i,r) * B(j,r) * C(k,r).
ComplexTensor3 cpd_synthesize(const FactorSet& f);

/// sqrt of the sum of squared moduli.
double frobenius_norm(const ComplexTensor3& x);

} // namespace cpdtv
