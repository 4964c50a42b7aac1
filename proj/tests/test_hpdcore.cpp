#include <gtest/gtest.h>

#include <opmean/hpdcore.hpp>
#include <opmean/kubo.hpp>
#include <opmean/sampling.hpp>

#include <sstream>

#include "support.hpp"

using namespace opmean;
using testing_support::max_abs_diff;
using testing_support::real_matrix;
using testing_support::rel_diff;

TEST(Eigh, IdentityAndDiagonal) {
    const auto e = eigh(HermMatrix::identity(2));
    EXPECT_EQ(e.values, (std::vector<double>{1.0, 1.0}));
    EXPECT_LT(max_abs_diff(e.vectors, Matrix::identity(2)), 1e-15);

    const auto d = eigh(HermMatrix::diagonal({3.0, 1.0}));
    EXPECT_DOUBLE_EQ(d.values[0], 1.0);
    EXPECT_DOUBLE_EQ(d.values[1], 3.0);
}

TEST(Eigh, CharacteristicPolynomialOracles) {
    // lambda^2 - 4 lambda + 3
    const auto e = eigh(HermMatrix(real_matrix({{2, 1}, {1, 2}})));
    EXPECT_NEAR(e.values[0], 1.0, 1e-14);
    EXPECT_NEAR(e.values[1], 3.0, 1e-14);

    // [[2, 1+i], [1-i, 3]]: lambda^2 - 5 lambda + 4
    Matrix m(2);
    m(0, 0) = 2;
    m(0, 1) = cplx(1, 1);
    m(1, 0) = cplx(1, -1);
    m(1, 1) = 3;
    const auto c = eigh(HermMatrix(m));
    EXPECT_NEAR(c.values[0], 1.0, 1e-14);
    EXPECT_NEAR(c.values[1], 4.0, 1e-14);
}

TEST(Eigh, ReconstructionAndOrthonormalityOnRandomInputs) {
    Rng rng(7);
    std::normal_distribution<double> g;
    for (std::size_t n = 1; n <= 8; ++n) {
        for (int rep = 0; rep < 5; ++rep) {
            Matrix z(n);
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = 0; j < n; ++j) z(i, j) = cplx(g(rng), g(rng));
            const HermMatrix a(z + z.adjoint());
            const auto e = eigh(a);
            EXPECT_TRUE(std::is_sorted(e.values.begin(), e.values.end()));
            const Matrix back = e.vectors * Matrix::diagonal(e.values) * e.vectors.adjoint();
            EXPECT_LT((back - a.mat()).frobenius(), 1e-12 * a.frobenius()) << "n=" << n;
            EXPECT_LT(max_abs_diff(e.vectors.adjoint() * e.vectors, Matrix::identity(n)), 1e-12);
        }
    }
}

TEST(Eigh, RepeatedEigenvalues) {
    Rng rng(3);
    const Matrix u = random_unitary(4, rng);
    const HermMatrix a(u * Matrix::diagonal({2, 2, 5, 5}) * u.adjoint());
    const auto e = eigh(a);
    for (std::size_t i = 0; i < 4; ++i) EXPECT_NEAR(e.values[i], i < 2 ? 2.0 : 5.0, 1e-13);
}

TEST(HermMatrix, ConstructionSymmetrizes) {
    Matrix m(2);
    m(0, 1) = cplx(1, 2);
    m(1, 0) = cplx(3, 0);
    m(0, 0) = cplx(1, 5);
    const HermMatrix h(m);
    EXPECT_EQ(h(0, 1), std::conj(h(1, 0)));
    EXPECT_EQ(h(0, 0).imag(), 0.0);
    EXPECT_EQ(h(0, 1), cplx(2, 1));
}

TEST(PdMatrix, RejectsIndefiniteAndSingular) {
    EXPECT_THROW(PdMatrix::diagonal({1.0, -1.0}), not_positive_definite);
    EXPECT_THROW(PdMatrix::diagonal({1.0, 0.0}), not_positive_definite);
    try {
        PdMatrix::diagonal({2.0, -0.5});
    } catch (const not_positive_definite& e) {
        EXPECT_DOUBLE_EQ(e.min_eigenvalue(), -0.5);
    }
}

TEST(ApplyFn, Examples) {
    const auto sq = apply_fn(HermMatrix::identity(2), [](double x) { return x * x; });
    EXPECT_LT(max_abs_diff(sq, Matrix::identity(2)), 1e-15);

    const auto r = apply_fn(HermMatrix::diagonal({1, 4}), [](double x) { return std::sqrt(x); });
    EXPECT_LT(max_abs_diff(r, Matrix::diagonal({1, 2})), 1e-15);

    // log of [[2,1],[1,2]]: eigenvectors (1,-1)/sqrt2 and (1,1)/sqrt2 with eigenvalues 1 and 3.
    const auto l = apply_fn(HermMatrix(real_matrix({{2, 1}, {1, 2}})), [](double x) { return std::log(x); });
    const double h = std::log(3.0) / 2;
    EXPECT_LT(max_abs_diff(l, real_matrix({{h, h}, {h, h}})), 1e-14);
}

TEST(ApplyFn, CompositionHomomorphism) {
    Rng rng(11);
    for (int rep = 0; rep < 10; ++rep) {
        const PdMatrix a = random_pd(5, rng);
        const auto psi = [](double x) { return std::log(x) + 3.0; };  // positive on the spectrum
        const auto phi = [](double y) { return std::sqrt(y); };
        const auto direct = apply_fn(a.herm(), [&](double x) { return phi(psi(x)); });
        const auto nested = apply_fn(apply_fn(a.herm(), psi), phi);
        EXPECT_LT(max_abs_diff(direct, nested), 1e-10);
    }
}

TEST(ApplyFn, FailureReportsEigenvalue) {
    try {
        apply_fn(HermMatrix::diagonal({0.5, 2.0}), [](double x) {
            if (x > 1) throw std::runtime_error("boom");
            return x;
        });
        FAIL() << "expected an exception";
    } catch (const range_error& e) {
        EXPECT_NE(std::string(e.what()).find("eigenvalue 2"), std::string::npos) << e.what();
    }
    EXPECT_THROW(apply_fn(HermMatrix::diagonal({1.0, -1.0}), [](double x) { return std::log(x); }), range_error);
}

TEST(Primitives, SqrtInverseCongruence) {
    EXPECT_LT(max_abs_diff(sqrt_pd(PdMatrix::diagonal({4, 9})).mat(), Matrix::diagonal({2, 3})), 1e-15);
    EXPECT_LT(max_abs_diff(inv_pd(2.0 * PdMatrix::identity(3)).mat(), 0.5 * Matrix::identity(3)), 1e-15);
    EXPECT_LT(max_abs_diff(congruence(Matrix::diagonal({2, 1}), PdMatrix::identity(2)).mat(), Matrix::diagonal({4, 1})), 1e-15);

    Rng rng(5);
    for (int rep = 0; rep < 10; ++rep) {
        const PdMatrix a = random_pd(6, rng, 2.5);
        const PdMatrix s = sqrt_pd(a);
        EXPECT_LT((s.mat() * s.mat() - a.mat()).frobenius(), 1e-10 * a.frobenius());
        EXPECT_LT(max_abs_diff(inv_pd(a).mat() * a.mat(), Matrix::identity(6)), 1e-10);
    }
}

TEST(Primitives, SingularCongruenceIsRejected) {
    EXPECT_THROW(congruence(Matrix::diagonal({1.0, 1e-16}), PdMatrix::identity(2)), domain_error);
    EXPECT_THROW(congruence(Matrix::diagonal({1.0, 0.0}), PdMatrix::identity(2)), domain_error);
}

TEST(MeanEval, Examples) {
    const auto geo = power_family(0.5, 0.0);
    EXPECT_LT(max_abs_diff(mean_eval(geo, PdMatrix::diagonal({1, 4}), PdMatrix::diagonal({4, 1})).mat(),
                           Matrix::diagonal({2, 2})),
              1e-14);
    const auto ari = power_family(0.5, 1.0);
    EXPECT_LT(max_abs_diff(mean_eval(ari, PdMatrix::identity(2), PdMatrix::diagonal({3, 5})).mat(),
                           Matrix::diagonal({2, 3})),
              1e-14);

    Rng rng(2);
    for (const auto& f : {geo, ari, power_family(0.3, -0.4), harmonic_mixture({{0.2, 0.5}, {0.8, 0.5}})}) {
        const PdMatrix a = random_pd(4, rng);
        EXPECT_LT((mean_eval(f, a, a).mat() - a.mat()).frobenius(), 1e-12 * a.frobenius()) << f.descriptor();
    }
}

// 2x2 geometric mean: sqrt(ab) (A/a + B/b) / sqrt(det(A/a + B/b)), a = sqrt(det A), b = sqrt(det B).
TEST(MeanEval, TwoByTwoGeometricMeanClosedForm) {
    Rng rng(9);
    for (int rep = 0; rep < 20; ++rep) {
        const PdMatrix a = random_pd(2, rng, 2.0), b = random_pd(2, rng, 2.0);
        auto det = [](const Matrix& m) { return (m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0)).real(); };
        const double sa = std::sqrt(det(a.mat())), sb = std::sqrt(det(b.mat()));
        Matrix s = (1.0 / sa) * a.mat() + (1.0 / sb) * b.mat();
        const Matrix oracle = (std::sqrt(sa * sb) / std::sqrt(det(s))) * s;
        EXPECT_LT(rel_diff(mean_eval(power_family(0.5, 0.0), a, b).mat(), oracle), 1e-12);
    }
}

TEST(MeanEval, CongruenceInvariance) {
    Rng rng(4);
    for (const auto& f : {power_family(0.5, 0.0), power_family(0.7, 0.5), harmonic_mixture({{0.2, 0.5}, {0.8, 0.5}})}) {
        for (int rep = 0; rep < 5; ++rep) {
            const PdMatrix a = random_pd(4, rng), b = random_pd(4, rng);
            const Matrix c = random_invertible(4, rng);
            const Matrix lhs = c * mean_eval(f, a, b).mat() * c.adjoint();
            const PdMatrix rhs = mean_eval(f, congruence(c, a), congruence(c, b));
            EXPECT_LT(rel_diff(lhs, rhs.mat()), 1e-9);
        }
    }
}

TEST(MeanEval, DimensionMismatch) {
    EXPECT_THROW(mean_eval(power_family(0.5, 0.0), PdMatrix::identity(2), PdMatrix::identity(3)), dimension_error);
}

TEST(MatrixText, RoundTripIsExact) {
    Rng rng(1);
    const PdMatrix a = random_pd(4, rng);
    std::stringstream s;
    write_matrix(s, a.herm());
    const HermMatrix back = read_matrix(s);
    for (std::size_t i = 0; i < 4; ++i)
        for (std::size_t j = 0; j < 4; ++j) EXPECT_EQ(back(i, j), a(i, j));
}

TEST(MatrixText, ParsesRealAndComplexTokens) {
    std::istringstream s("2\n2 1,-0.5\n1,0.5 3e0\n");
    const HermMatrix m = read_matrix(s);
    EXPECT_EQ(m(0, 1), cplx(1, -0.5));
    EXPECT_EQ(m(1, 1), cplx(3, 0));
}

TEST(MatrixText, RejectsMalformedInput) {
    for (const char* text : {"", "0\n", "2\n1 2\n", "2\n1 2 3\n2 1\n", "2\n1 x\n0 1\n", "2\n1 5\n0 1\n", "1\n1.5abc\n"}) {
        std::istringstream s(text);
        EXPECT_THROW(read_matrix(s), parse_error) << '"' << text << '"';
    }
}
