#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>
#include <vector>

#include "ttutv/dense_tensor.hpp"
#include "ttutv/errors.hpp"
#include "ttutv/generators.hpp"
#include "ttutv/kernels.hpp"
#include "ttutv/shape.hpp"
#include "ttutv/tensor_ops.hpp"

using namespace ttutv;

namespace {

DenseTensor counting_tensor(const Shape& shape) {
    DenseTensor t{shape};
    for (std::int64_t i = 0; i < t.element_count(); ++i) t[i] = static_cast<double>(i + 1);
    return t;
}

}  // namespace

TEST_CASE("linearization picks the first index as fastest") {
    const Shape s45{{4, 5}};
    CHECK(ivec(std::vector<std::int64_t>{2, 3}, s45) == 10);
    CHECK(ivec(std::vector<std::int64_t>{1, 1}, s45) == 1);
    CHECK(ivec(std::vector<std::int64_t>{4, 5}, s45) == 20);

    const Shape s456{{4, 5, 6}};
    CHECK(ivec(std::vector<std::int64_t>{4, 5, 6}, s456) == 120);
    CHECK(ivec(std::vector<std::int64_t>{2, 1, 1}, s456) == 2);
    CHECK(ivec(std::vector<std::int64_t>{1, 2, 1}, s456) == 5);
    CHECK(ivec(std::vector<std::int64_t>{1, 1, 2}, s456) == 21);
}

TEST_CASE("linearization is a bijection traversed by the odometer") {
    const Shape shape{{3, 4, 5}};
    std::vector<std::int64_t> index{1, 1, 1};
    std::int64_t linear = 0;
    do {
        ++linear;
        CHECK(ivec(index, shape) == linear);
        std::vector<std::int64_t> back(3);
        ivec_inverse(linear, shape, back);
        CHECK(back == index);
    } while (next_index(index, shape));
    CHECK(linear == shape.element_count());
    CHECK(index == std::vector<std::int64_t>{1, 1, 1});  // odometer wraps to the start
}

TEST_CASE("shape and index validation") {
    CHECK_THROWS_AS(Shape({0}), ArgumentError);
    CHECK_THROWS_AS(Shape({3, -1}), ArgumentError);
    CHECK_THROWS_AS(Shape({1'000'000, 1'000'000, 1'000'000, 1'000'000}), ArgumentError);

    const Shape shape{{4, 5}};
    CHECK(shape.prefix_product(0) == 1);
    CHECK(shape.prefix_product(1) == 4);
    CHECK(shape.prefix_product(2) == 20);
    CHECK_THROWS_AS(shape.dim(0), IndexError);
    CHECK_THROWS_AS(shape.dim(3), IndexError);
    CHECK_THROWS_AS(ivec(std::vector<std::int64_t>{0, 1}, shape), IndexError);
    CHECK_THROWS_AS(ivec(std::vector<std::int64_t>{5, 1}, shape), IndexError);
    CHECK_THROWS_AS(ivec(std::vector<std::int64_t>{1}, shape), IndexError);

    const DenseTensor t{shape};
    CHECK_THROWS_AS(t.at({1, 6}), IndexError);
    CHECK(DenseTensor(Shape{{2, 2}}, {1, 2, 3, 4}).at({2, 2}) == 4);
    CHECK_THROWS_AS(DenseTensor(Shape{{2, 2}}, {1, 2, 3}), ArgumentError);
}

TEST_CASE("unfolding fuses leading modes without moving data") {
    const Shape shape{{3, 4, 5}};
    const DenseTensor t = counting_tensor(shape);
    for (std::int64_t k = 1; k < 3; ++k) {
        const Matrix m = unfold(t, k);
        CHECK(m.rows() == shape.prefix_product(k));
        CHECK(m.cols() == shape.element_count() / shape.prefix_product(k));
        const Shape row_shape{std::vector<std::int64_t>(shape.dims().begin(), shape.dims().begin() + k)};
        const Shape col_shape{std::vector<std::int64_t>(shape.dims().begin() + k, shape.dims().end())};
        std::vector<std::int64_t> index{1, 1, 1};
        do {
            const std::int64_t row = ivec(std::span(index).first(k), row_shape);
            const std::int64_t col = ivec(std::span(index).subspan(k), col_shape);
            CHECK(m(row - 1, col - 1) == t.at(index));
        } while (next_index(index, shape));
        CHECK(fold(m, shape, k) == t);
    }
    CHECK_THROWS_AS(unfold(t, 0), ArgumentError);
    CHECK_THROWS_AS(unfold(t, 3), ArgumentError);
    CHECK_THROWS_AS(fold(Matrix(3, 21), shape, 1), ArgumentError);
}

TEST_CASE("mode product matches its definition") {
    const Shape shape{{3, 4, 5}};
    DenseTensor x{shape};
    Rng rng(11);
    for (std::int64_t i = 0; i < x.element_count(); ++i) x[i] = rng.normal();
    Matrix u(6, 4);
    for (std::int64_t j = 0; j < 4; ++j)
        for (std::int64_t i = 0; i < 6; ++i) u(i, j) = rng.normal();

    const DenseTensor y = mode_product(x, u, 2);
    REQUIRE(y.shape() == Shape{{3, 6, 5}});
    for (std::int64_t i3 = 1; i3 <= 5; ++i3)
        for (std::int64_t j = 1; j <= 6; ++j)
            for (std::int64_t i1 = 1; i1 <= 3; ++i1) {
                double sum = 0.0;
                for (std::int64_t i2 = 1; i2 <= 4; ++i2)
                    sum += u(j - 1, i2 - 1) * x.at({i1, i2, i3});
                CHECK(y.at({i1, j, i3}) == doctest::Approx(sum).epsilon(1e-13));
            }
    CHECK_THROWS_AS(mode_product(x, Matrix(6, 5), 2), ArgumentError);
}

TEST_CASE("kronecker product matches the block definition") {
    Matrix a(2, 3), b(3, 2);
    Rng rng(5);
    for (std::int64_t j = 0; j < 3; ++j)
        for (std::int64_t i = 0; i < 2; ++i) a(i, j) = rng.normal();
    for (std::int64_t j = 0; j < 2; ++j)
        for (std::int64_t i = 0; i < 3; ++i) b(i, j) = rng.normal();
    const Matrix k = kron(a, b);
    REQUIRE(k.rows() == 6);
    REQUIRE(k.cols() == 6);
    for (std::int64_t ia = 0; ia < 2; ++ia)
        for (std::int64_t ja = 0; ja < 3; ++ja)
            for (std::int64_t ib = 0; ib < 3; ++ib)
                for (std::int64_t jb = 0; jb < 2; ++jb)
                    CHECK(k(ia * 3 + ib, ja * 2 + jb) == a(ia, ja) * b(ib, jb));
}

TEST_CASE("multilinear transforms act on unfoldings through kronecker factors") {
    const Shape shape{{3, 4, 2}};
    DenseTensor x{shape};
    Rng rng(17);
    for (std::int64_t i = 0; i < x.element_count(); ++i) x[i] = rng.normal();
    std::vector<Matrix> factors;
    const std::vector<std::int64_t> out_dims{4, 3, 5};
    for (std::int64_t k = 0; k < 3; ++k) {
        Matrix u(out_dims[k], shape.dim(k + 1));
        for (std::int64_t j = 0; j < u.cols(); ++j)
            for (std::int64_t i = 0; i < u.rows(); ++i) u(i, j) = rng.normal();
        factors.push_back(u);
    }
    DenseTensor y = x;
    for (std::int64_t k = 0; k < 3; ++k) y = mode_product(y, factors[k], k + 1);

    // Row side fuses modes 1..k with the first factor innermost, column side
    // the rest; the identity pins both the unfolding and the kron convention.
    for (std::int64_t k = 1; k < 3; ++k) {
        Matrix row_op = factors[0];
        for (std::int64_t j = 1; j < k; ++j) row_op = kron(factors[j], row_op);
        Matrix col_op = factors[k];
        for (std::int64_t j = k + 1; j < 3; ++j) col_op = kron(factors[j], col_op);
        const Matrix lhs = unfold(y, k);
        const Matrix rhs =
            kernels::matmul(kernels::matmul(row_op, unfold(x, k)), col_op, false, true);
        REQUIRE(lhs.rows() == rhs.rows());
        REQUIRE(lhs.cols() == rhs.cols());
        double worst = 0.0;
        for (std::int64_t j = 0; j < lhs.cols(); ++j)
            for (std::int64_t i = 0; i < lhs.rows(); ++i)
                worst = std::max(worst, std::abs(lhs(i, j) - rhs(i, j)));
        CHECK(worst <= 1e-10 * frobenius_norm(lhs));
    }
}

TEST_CASE("frobenius norm, rse and psnr") {
    DenseTensor ones{Shape{{2, 3, 4}}};
    for (std::int64_t i = 0; i < 24; ++i) ones[i] = 1.0;
    CHECK(frobenius_norm(ones) == doctest::Approx(std::sqrt(24.0)).epsilon(1e-15));

    DenseTensor est = ones;
    est[0] = 2.0;
    CHECK(rse(est, ones) == doctest::Approx(1.0 / std::sqrt(24.0)).epsilon(1e-13));
    CHECK_THROWS_AS(rse(ones, DenseTensor{Shape{{2, 3, 4}}}), ArgumentError);
    CHECK_THROWS_AS(rse(ones, DenseTensor{Shape{{2, 3, 5}}}), ArgumentError);

    DenseTensor truth{Shape{{1}}};
    truth[0] = 1.0;
    DenseTensor approx_t{Shape{{1}}};
    approx_t[0] = 0.9;
    CHECK(psnr(approx_t, truth) == doctest::Approx(20.0).epsilon(1e-12));
    CHECK(psnr(truth, truth) == std::numeric_limits<double>::infinity());
}

TEST_CASE("index reversal transposes the multi-index and is an involution") {
    const Shape shape{{3, 4, 5}};
    DenseTensor x{shape};
    Rng rng(23);
    for (std::int64_t i = 0; i < x.element_count(); ++i) x[i] = rng.normal();
    const DenseTensor y = reverse_indices(x);
    REQUIRE(y.shape() == Shape{{5, 4, 3}});
    for (std::int64_t i1 = 1; i1 <= 3; ++i1)
        for (std::int64_t i2 = 1; i2 <= 4; ++i2)
            for (std::int64_t i3 = 1; i3 <= 5; ++i3)
                CHECK(y.at({i3, i2, i1}) == x.at({i1, i2, i3}));
    const DenseTensor z = reverse_indices(y);
    REQUIRE(z.shape() == shape);
    for (std::int64_t i = 0; i < x.element_count(); ++i) CHECK(z[i] == x[i]);
}
