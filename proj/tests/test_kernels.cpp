#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "ttutv/generators.hpp"
#include "ttutv/kernels.hpp"

using namespace ttutv;
using namespace ttutv::kernels;

namespace {

Matrix random_matrix(std::int64_t m, std::int64_t n, Rng& rng) {
    Matrix a(m, n);
    for (std::int64_t j = 0; j < n; ++j)
        for (std::int64_t i = 0; i < m; ++i) a(i, j) = rng.normal();
    return a;
}

bool bitwise_equal(const Matrix& a, const Matrix& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) return false;
    for (std::int64_t j = 0; j < a.cols(); ++j)
        for (std::int64_t i = 0; i < a.rows(); ++i)
            if (a(i, j) != b(i, j)) return false;
    return true;
}

struct ParallelGuard {
    ~ParallelGuard() { set_parallel_enabled(true); }
};

}  // namespace

TEST_CASE("matmul matches the naive triple loop in every transpose mode") {
    Rng rng(3);
    const Matrix a = random_matrix(5, 7, rng);
    const Matrix b = random_matrix(7, 4, rng);
    const Matrix at = transpose(a);
    const Matrix bt = transpose(b);

    const Matrix plain = matmul(a, b);
    REQUIRE(plain.rows() == 5);
    REQUIRE(plain.cols() == 4);
    for (std::int64_t i = 0; i < 5; ++i)
        for (std::int64_t j = 0; j < 4; ++j) {
            double sum = 0.0;
            for (std::int64_t l = 0; l < 7; ++l) sum += a(i, l) * b(l, j);
            CHECK(plain(i, j) == sum);  // same accumulation order, hence bitwise
        }

    CHECK(bitwise_equal(matmul(at, b, true, false), plain));
    CHECK(bitwise_equal(matmul(a, bt, false, true), plain));
    CHECK(bitwise_equal(matmul(at, bt, true, true), plain));
    CHECK_THROWS_AS(matmul(a, a), ArgumentError);
}

TEST_CASE("parallel matmul is bitwise identical to the serial kernel") {
    ParallelGuard guard;
    Rng rng(4);
    // Large enough to clear the flop threshold and take the parallel path.
    const Matrix a = random_matrix(70, 90, rng);
    const Matrix b = random_matrix(90, 80, rng);

    set_parallel_enabled(true);
    const Matrix par = matmul(a, b);
    const Matrix par_t = matmul(transpose(a), b, true, false);
    set_parallel_enabled(false);
    const Matrix ser = matmul(a, b);

    CHECK(bitwise_equal(par, ser));
    CHECK(bitwise_equal(par_t, ser));
    CHECK(bitwise_equal(par, matmul_serial(a, b)));
}

TEST_CASE("blocked sum of squares does not depend on threading") {
    ParallelGuard guard;
    Rng rng(9);
    std::vector<double> values(3 * 4096 + 17);
    for (double& v : values) v = rng.normal();

    set_parallel_enabled(true);
    const double on = sum_squares(values);
    set_parallel_enabled(false);
    const double off = sum_squares(values);
    CHECK(on == off);  // fixed block partition, combined in block order

    const double plain = sum_squares_serial(values);
    CHECK(on == doctest::Approx(plain).epsilon(1e-12));
}

TEST_CASE("dot and axpy") {
    const std::vector<double> x{1.0, 2.0, 3.0};
    std::vector<double> y{4.0, 5.0, 6.0};
    CHECK(dot(x, y) == 32.0);
    axpy(2.0, x, y);
    CHECK(y == std::vector<double>{6.0, 9.0, 12.0});
    CHECK_THROWS_AS(dot(x, std::vector<double>{1.0}), ArgumentError);
    std::vector<double> small{1.0};
    CHECK_THROWS_AS(axpy(1.0, x, small), ArgumentError);
}

TEST_CASE("transpose") {
    Rng rng(2);
    const Matrix a = random_matrix(3, 5, rng);
    const Matrix t = transpose(a);
    REQUIRE(t.rows() == 5);
    REQUIRE(t.cols() == 3);
    for (std::int64_t j = 0; j < 5; ++j)
        for (std::int64_t i = 0; i < 3; ++i) CHECK(t(j, i) == a(i, j));
    CHECK(bitwise_equal(transpose(t), a));
}
