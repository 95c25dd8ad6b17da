#include "cpdtv/tensor.hpp"

#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>

namespace cpdtv {

namespace {

void require_positive(const Dims3& dims) {
    if (dims.n_space < 1 || dims.n_echo < 1 || dims.n_motion < 1)
        throw std::invalid_argument("tensor extents must all be >= 1");
}

} // namespace

ComplexTensor3::ComplexTensor3(Index n_space, Index n_echo, Index n_motion)
    : dims_{n_space, n_echo, n_motion} {
    require_positive(dims_);
    data_.assign(static_cast<std::size_t>(dims_.count()), Complex{0.0, 0.0});
}

ComplexTensor3::ComplexTensor3(const Dims3& dims, std::vector<Complex> data)
    : dims_(dims), data_(std::move(data)) {
    require_positive(dims_);
    if (static_cast<Index>(data_.size()) != dims_.count())
        throw std::invalid_argument("tensor buffer length " + std::to_string(data_.size()) +
                                    " does not match extents (expected " +
                                    std::to_string(dims_.count()) + ")");
    for (const Complex& z : data_)
        if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
            throw std::invalid_argument("tensor entries must be finite");
}

void FactorSet::validate() const {
    const Index r = A.cols();
    if (r < 1)
        throw std::invalid_argument("factor rank must be >= 1");
    if (B.cols() != r || C.cols() != r)
        throw std::invalid_argument("factor matrices must share one column count");
    if (A.rows() < 1 || B.rows() < 1 || C.rows() < 1)
        throw std::invalid_argument("factor matrices must have >= 1 row");
}

ComplexMatrix unfold(const ComplexTensor3& x, int mode) {
    const auto [n, e, t] = x.dims();
    switch (mode) {
    case 1: {
        // Storage order is exactly the column-major N x (E*T) matrix.
        return Eigen::Map<const ComplexMatrix>(x.data(), n, e * t);
    }
    case 2: {
        ComplexMatrix m(e, n * t);
        for (Index k = 0; k < t; ++k)
            for (Index j = 0; j < e; ++j)
                for (Index i = 0; i < n; ++i)
                    m(j, i + k * n) = x(i, j, k);
        return m;
    }
    case 3: {
        ComplexMatrix m(t, n * e);
        for (Index k = 0; k < t; ++k)
            for (Index j = 0; j < e; ++j)
                for (Index i = 0; i < n; ++i)
                    m(k, i + j * n) = x(i, j, k);
        return m;
    }
    default:
        throw std::invalid_argument("unfold mode must be 1, 2, or 3");
    }
}

ComplexTensor3 fold(const ComplexMatrix& m, int mode, const Dims3& dims) {
    const auto [n, e, t] = dims;
    const auto expect = [&](Index rows, Index cols) {
        if (m.rows() != rows || m.cols() != cols)
            throw std::invalid_argument("fold: matrix is " + std::to_string(m.rows()) + "x" +
                                        std::to_string(m.cols()) + " but mode " +
                                        std::to_string(mode) + " expects " + std::to_string(rows) +
                                        "x" + std::to_string(cols));
    };
    ComplexTensor3 x(dims);
    switch (mode) {
    case 1:
        expect(n, e * t);
        Eigen::Map<ComplexMatrix>(x.data(), n, e * t) = m;
        break;
    case 2:
        expect(e, n * t);
        for (Index k = 0; k < t; ++k)
            for (Index j = 0; j < e; ++j)
                for (Index i = 0; i < n; ++i)
                    x(i, j, k) = m(j, i + k * n);
        break;
    case 3:
        expect(t, n * e);
        for (Index k = 0; k < t; ++k)
            for (Index j = 0; j < e; ++j)
                for (Index i = 0; i < n; ++i)
                    x(i, j, k) = m(k, i + j * n);
        break;
    default:
        throw std::invalid_argument("fold mode must be 1, 2, or 3");
    }
    return x;
}

ComplexMatrix khatri_rao(const ComplexMatrix& p, const ComplexMatrix& q) {
    if (p.cols() != q.cols())
        throw std::invalid_argument("khatri_rao: column counts differ (" +
                                    std::to_string(p.cols()) + " vs " + std::to_string(q.cols()) +
                                    ")");
    ComplexMatrix out(p.rows() * q.rows(), p.cols());
    for (Index r = 0; r < p.cols(); ++r)
        for (Index ip = 0; ip < p.rows(); ++ip)
            out.col(r).segment(ip * q.rows(), q.rows()) = p(ip, r) * q.col(r);
    return out;
}

ComplexTensor3 cpd_synthesize(const FactorSet& f) {
    f.validate();
    const Dims3 dims = f.dims();
    ComplexTensor3 x(dims);
    // Mode-1 identity: X_(1) = A * (C (.) B)^T, and the mode-1 unfolding is the
    // storage buffer itself.
    Eigen::Map<ComplexMatrix>(x.data(), dims.n_space, dims.n_echo * dims.n_motion).noalias() =
        f.A * khatri_rao(f.C, f.B).transpose();
    return x;
}

double frobenius_norm(const ComplexTensor3& x) {
    double sum = 0.0;
    for (Index idx = 0; idx < x.size(); ++idx)
        sum += std::norm(x.data()[idx]);
    return std::sqrt(sum);
}

} // namespace cpdtv
