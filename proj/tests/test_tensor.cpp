#include <doctest.h>

#include <random>

#include "cpdtv/tensor.hpp"
#include "oracles.hpp"

using namespace cpdtv;

namespace {

// x(i,j,k) = i + 2j + 4k, the hand-enumerable 2x2x2 case.
ComplexTensor3 counting_tensor() {
    ComplexTensor3 x(2, 2, 2);
    for (Index i = 0; i < 2; ++i)
        for (Index j = 0; j < 2; ++j)
            for (Index k = 0; k < 2; ++k)
                x(i, j, k) = Complex{static_cast<double>(i + 2 * j + 4 * k), 0.0};
    return x;
}

} // namespace

TEST_CASE("constructor enforces invariants") {
    CHECK_THROWS_AS(ComplexTensor3(0, 2, 2), std::invalid_argument);
    CHECK_THROWS_AS(ComplexTensor3(Dims3{2, 2, 2}, std::vector<Complex>(7)), std::invalid_argument);
    std::vector<Complex> bad(8, Complex{0.0, 0.0});
    bad[3] = Complex{std::nan(""), 0.0};
    CHECK_THROWS_AS(ComplexTensor3(Dims3{2, 2, 2}, bad), std::invalid_argument);
    CHECK_NOTHROW(ComplexTensor3(Dims3{2, 2, 2}, std::vector<Complex>(8)));
}

TEST_CASE("unfold shapes follow the mode") {
    ComplexTensor3 x(5, 3, 2);
    CHECK(unfold(x, 1).rows() == 5);
    CHECK(unfold(x, 1).cols() == 6);
    CHECK(unfold(x, 2).rows() == 3);
    CHECK(unfold(x, 2).cols() == 10);
    CHECK(unfold(x, 3).rows() == 2);
    CHECK(unfold(x, 3).cols() == 15);
    CHECK_THROWS_AS(unfold(x, 0), std::invalid_argument);
    CHECK_THROWS_AS(unfold(x, 4), std::invalid_argument);
}

TEST_CASE("unfold of the zero tensor is zero") {
    ComplexTensor3 x(2, 2, 2);
    for (int mode = 1; mode <= 3; ++mode)
        CHECK(unfold(x, mode).norm() == 0.0);
}

TEST_CASE("mode-1 unfolding of the counting tensor") {
    const ComplexMatrix m = unfold(counting_tensor(), 1);
    const double expected[2][4] = {{0, 2, 4, 6}, {1, 3, 5, 7}};
    for (Index r = 0; r < 2; ++r)
        for (Index c = 0; c < 4; ++c) {
            CHECK(m(r, c).real() == expected[r][c]);
            CHECK(m(r, c).imag() == 0.0);
        }
}

TEST_CASE("unfold matches the enumeration oracle on random tensors") {
    std::mt19937 gen(7);
    for (int trial = 0; trial < 20; ++trial) {
        const Index n = 1 + gen() % 5, e = 1 + gen() % 4, t = 1 + gen() % 3;
        const ComplexTensor3 x = oracle::random_tensor(n, e, t, gen);
        for (int mode = 1; mode <= 3; ++mode)
            CHECK(oracle::exact_equal(unfold(x, mode), oracle::naive_unfold(x, mode)));
    }
}

TEST_CASE("fold inverts unfold bit-exactly") {
    std::mt19937 gen(11);
    for (int trial = 0; trial < 20; ++trial) {
        const Index n = 1 + gen() % 5, e = 1 + gen() % 4, t = 1 + gen() % 3;
        const ComplexTensor3 x = oracle::random_tensor(n, e, t, gen);
        for (int mode = 1; mode <= 3; ++mode)
            CHECK(fold(unfold(x, mode), mode, x.dims()) == x);
    }
}

TEST_CASE("fold of the counting-tensor unfolding recovers it") {
    const ComplexTensor3 x = counting_tensor();
    CHECK(fold(unfold(x, 1), 1, x.dims()) == x);
}

TEST_CASE("fold rejects shape mismatches") {
    CHECK_THROWS_AS(fold(ComplexMatrix::Zero(2, 5), 1, Dims3{2, 2, 2}), std::invalid_argument);
    CHECK_THROWS_AS(fold(ComplexMatrix::Zero(2, 4), 5, Dims3{2, 2, 2}), std::invalid_argument);
}

TEST_CASE("fold of a zero matrix gives a zero tensor") {
    const ComplexTensor3 x = fold(ComplexMatrix::Zero(3, 8), 2, Dims3{4, 3, 2});
    CHECK(frobenius_norm(x) == 0.0);
}

TEST_CASE("khatri_rao of identities picks out e_r (x) e_r") {
    const ComplexMatrix kr = khatri_rao(ComplexMatrix::Identity(2, 2), ComplexMatrix::Identity(2, 2));
    REQUIRE(kr.rows() == 4);
    REQUIRE(kr.cols() == 2);
    ComplexMatrix expected = ComplexMatrix::Zero(4, 2);
    expected(0, 0) = 1.0; // e1 (x) e1
    expected(3, 1) = 1.0; // e2 (x) e2
    CHECK(oracle::exact_equal(kr, expected));
}

TEST_CASE("khatri_rao single column is the plain Kronecker product") {
    ComplexMatrix p(2, 1), q(2, 1);
    p << 1.0, 2.0;
    q << 3.0, 4.0;
    const ComplexMatrix kr = khatri_rao(p, q);
    CHECK(kr(0, 0) == Complex{3.0, 0.0});
    CHECK(kr(1, 0) == Complex{4.0, 0.0});
    CHECK(kr(2, 0) == Complex{6.0, 0.0});
    CHECK(kr(3, 0) == Complex{8.0, 0.0});
}

TEST_CASE("khatri_rao maps a zero column to a zero column") {
    std::mt19937 gen(3);
    ComplexMatrix p = oracle::random_matrix(3, 2, gen);
    const ComplexMatrix q = oracle::random_matrix(4, 2, gen);
    p.col(1).setZero();
    CHECK(khatri_rao(p, q).col(1).norm() == 0.0);
}

TEST_CASE("khatri_rao rejects mismatched column counts") {
    CHECK_THROWS_AS(khatri_rao(ComplexMatrix::Zero(2, 2), ComplexMatrix::Zero(2, 3)),
                    std::invalid_argument);
}

TEST_CASE("khatri_rao column r equals kron of the columns") {
    std::mt19937 gen(5);
    const ComplexMatrix p = oracle::random_matrix(3, 4, gen);
    const ComplexMatrix q = oracle::random_matrix(5, 4, gen);
    const ComplexMatrix kr = khatri_rao(p, q);
    for (Index r = 0; r < 4; ++r)
        for (Index ip = 0; ip < 3; ++ip)
            for (Index iq = 0; iq < 5; ++iq)
                CHECK(kr(ip * 5 + iq, r) == p(ip, r) * q(iq, r));
}

TEST_CASE("cpd_synthesize of basis vectors puts a single one") {
    FactorSet f;
    f.A = ComplexMatrix::Zero(3, 1);
    f.B = ComplexMatrix::Zero(2, 1);
    f.C = ComplexMatrix::Zero(4, 1);
    f.A(1, 0) = 1.0;
    f.B(0, 0) = 1.0;
    f.C(2, 0) = 1.0;
    const ComplexTensor3 x = cpd_synthesize(f);
    CHECK(x(1, 0, 2) == Complex{1.0, 0.0});
    CHECK(frobenius_norm(x) == 1.0);
}

TEST_CASE("cpd_synthesize with a zero factor is the zero tensor") {
    std::mt19937 gen(9);
    FactorSet f = oracle::random_factors(3, 2, 2, 2, gen);
    f.A.setZero();
    CHECK(frobenius_norm(cpd_synthesize(f)) == 0.0);
}

TEST_CASE("cpd_synthesize matches the triple-loop oracle") {
    std::mt19937 gen(13);
    const FactorSet f = oracle::random_factors(4, 3, 2, 2, gen);
    CHECK(oracle::relative_error(cpd_synthesize(f), oracle::naive_synthesize(f)) <= 1e-12);
}

TEST_CASE("unfoldings of a synthesis equal the factor-matrix products") {
    std::mt19937 gen(17);
    for (int trial = 0; trial < 10; ++trial) {
        const Index n = 2 + gen() % 4, e = 2 + gen() % 3, t = 2 + gen() % 3;
        const Index rank = 1 + gen() % 3;
        const FactorSet f = oracle::random_factors(n, e, t, rank, gen);
        const ComplexTensor3 x = cpd_synthesize(f);
        CHECK(oracle::relative_error(unfold(x, 1),
                                     ComplexMatrix(f.A * khatri_rao(f.C, f.B).transpose())) <= 1e-12);
        CHECK(oracle::relative_error(unfold(x, 2),
                                     ComplexMatrix(f.B * khatri_rao(f.C, f.A).transpose())) <= 1e-12);
        CHECK(oracle::relative_error(unfold(x, 3),
                                     ComplexMatrix(f.C * khatri_rao(f.B, f.A).transpose())) <= 1e-12);
    }
}

TEST_CASE("frobenius_norm basics") {
    ComplexTensor3 x(2, 2, 2);
    CHECK(frobenius_norm(x) == 0.0);
    x(1, 1, 0) = Complex{3.0, 4.0};
    CHECK(frobenius_norm(x) == doctest::Approx(5.0).epsilon(1e-15));
}

TEST_CASE("frobenius_norm matches the brute-force sum") {
    std::mt19937 gen(19);
    const ComplexTensor3 x = oracle::random_tensor(4, 3, 3, gen);
    const double got = frobenius_norm(x);
    const double want = oracle::naive_frobenius(x);
    CHECK(std::abs(got - want) <= 1e-14 * want);
}

TEST_CASE("unfolding preserves the squared norm") {
    std::mt19937 gen(23);
    const ComplexTensor3 x = oracle::random_tensor(3, 4, 2, gen);
    const double norm_sq = frobenius_norm(x) * frobenius_norm(x);
    for (int mode = 1; mode <= 3; ++mode) {
        const double m_sq = unfold(x, mode).squaredNorm();
        CHECK(std::abs(m_sq - norm_sq) <= 1e-12 * norm_sq);
    }
}

TEST_CASE("FactorSet::validate flags inconsistent ranks") {
    FactorSet f;
    f.A = ComplexMatrix::Zero(3, 2);
    f.B = ComplexMatrix::Zero(2, 3);
    f.C = ComplexMatrix::Zero(4, 2);
    CHECK_THROWS_AS(f.validate(), std::invalid_argument);
}
