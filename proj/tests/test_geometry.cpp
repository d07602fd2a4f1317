#include <doctest.h>

#include <cmath>

#include "blasso/geometry.hpp"
#include "oracles.hpp"

using namespace blasso;
using geometry::Direction;
using geometry::GeometryContext;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

GeometryContext row_context(double a1, double a2, double y) {
    MatrixXd design(1, 2);
    design << a1, a2;
    VectorXd observation(1);
    observation << y;
    return GeometryContext(std::move(design), std::move(observation));
}

}  // namespace

TEST_CASE("GeometryContext caches") {
    RngStream rng(7);
    const auto ctx = oracles::random_context(rng, 3, 5);
    CHECK((ctx.At_y() - ctx.matrix().transpose() * ctx.observation()).norm() < 1e-12);
    for (int j = 0; j < 5; ++j)
        CHECK(ctx.column_norms()[j] == doctest::Approx(ctx.matrix().col(j).norm()));
    CHECK(ctx.operator_norm_1_2() == doctest::Approx(ctx.column_norms().maxCoeff()));

    // the l1->l2 operator norm is attained at a signed basis vector
    double best = 0.0;
    for (int trial = 0; trial < 2000; ++trial) {
        VectorXd s = oracles::random_vector(rng, 5);
        s /= s.lpNorm<1>();
        best = std::max(best, (ctx.matrix() * s).norm());
    }
    CHECK(best <= ctx.operator_norm_1_2() + 1e-12);

    CHECK_THROWS_AS(GeometryContext(MatrixXd::Zero(2, 2), VectorXd::Zero(3)), DimensionError);
}

TEST_CASE("Direction invariants") {
    VectorXd v(2);
    v << 3.0, -1.0;
    const auto d1 = Direction::l1_normalized(v);
    CHECK(d1.vec().lpNorm<1>() == doctest::Approx(1.0).epsilon(1e-14));
    const auto d2 = Direction::l2_normalized(v);
    CHECK(d2.vec().norm() == doctest::Approx(1.0).epsilon(1e-14));
    CHECK_THROWS_AS(Direction(v, geometry::NormTag::l1), DomainError);
    CHECK_THROWS_AS(Direction::l1_normalized(VectorXd::Zero(2)), DomainError);
}

TEST_CASE("objective") {
    const auto ctx = row_context(1.0, 1.0, 3.0);
    VectorXd x(2);
    x << 1.0, 1.0;
    CHECK(geometry::objective(ctx, x) == doctest::Approx(2.5).epsilon(1e-14));

    const auto ctx_zero = row_context(1.0, 1.0, 0.0);
    CHECK(geometry::objective(ctx_zero, VectorXd::Zero(2)) == doctest::Approx(0.0));

    SUBCASE("completed-square identity f(r x) = ||y||^2/2 - w^2/2 + (r||Ax|| + w)^2/2") {
        RngStream rng(21);
        for (int trial = 0; trial < 50; ++trial) {
            const auto ctx_r = oracles::random_context(rng, 3, 4);
            const VectorXd x_r = oracles::random_vector(rng, 4);
            const double a = (ctx_r.matrix() * x_r).norm();
            if (a < 1e-6) continue;
            const double omega = geometry::omega_lasso(ctx_r, x_r);
            const double half_y2 = 0.5 * ctx_r.observation().squaredNorm();
            for (double r : {0.1, 0.9, 2.7}) {
                const double lhs = geometry::objective(ctx_r, (r * x_r).eval());
                const double rhs = half_y2 - 0.5 * omega * omega +
                                   0.5 * (r * a + omega) * (r * a + omega);
                CHECK(lhs == doctest::Approx(rhs).epsilon(1e-11));
            }
        }
    }
    CHECK_THROWS_AS(geometry::objective(ctx, VectorXd::Zero(3)), DimensionError);
}

TEST_CASE("omega_lasso") {
    VectorXd x(2);
    x << 0.5, 0.5;
    CHECK(geometry::omega_lasso(row_context(1.0, 1.0, 0.0), x) ==
          doctest::Approx(1.0).epsilon(1e-14));

    MatrixXd eye = MatrixXd::Identity(2, 2);
    VectorXd y(2);
    y << 1.0, 0.0;
    GeometryContext ctx_eye(eye, y);
    VectorXd e1(2);
    e1 << 1.0, 0.0;
    CHECK(geometry::omega_lasso(ctx_eye, e1) == doctest::Approx(0.0).epsilon(1e-14));

    SUBCASE("scale invariance") {
        RngStream rng(5);
        for (int trial = 0; trial < 100; ++trial) {
            const auto ctx = oracles::random_context(rng, 4, 3);
            const VectorXd x_r = oracles::random_vector(rng, 3);
            if ((ctx.matrix() * x_r).norm() < 1e-9) continue;
            const double w1 = geometry::omega_lasso(ctx, x_r);
            const double w2 = geometry::omega_lasso(ctx, (2.0 * x_r).eval());
            const double w3 = geometry::omega_lasso(ctx, (0.037 * x_r).eval());
            CHECK(w1 == doctest::Approx(w2).epsilon(1e-12));
            CHECK(w1 == doctest::Approx(w3).epsilon(1e-12));
        }
    }
    SUBCASE("kernel direction raises") {
        VectorXd kernel(2);
        kernel << 1.0, -1.0;
        CHECK_THROWS_AS(geometry::omega_lasso(row_context(1.0, 1.0, 0.0), kernel),
                        SingularDirectionError);
    }
    SUBCASE("y = 0 bound: omega(s) >= 1 / operator_norm") {
        RngStream rng(11);
        MatrixXd design(2, 4);
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 4; ++j) design(i, j) = 4.0 * rng.uniform01() - 2.0;
        GeometryContext ctx(design, VectorXd::Zero(2));
        for (int trial = 0; trial < 300; ++trial) {
            VectorXd s = oracles::random_vector(rng, 4);
            s /= s.lpNorm<1>();
            if ((ctx.matrix() * s).norm() < 1e-9) continue;
            CHECK(geometry::omega_lasso(ctx, s) >= 1.0 / ctx.operator_norm_1_2() - 1e-12);
        }
    }
}

TEST_CASE("partition function: radial quadrature vs closed form") {
    SUBCASE("kernel example Z_2((1,-1)) = 0.25 for A = (1,1), y = 0") {
        const auto ctx = row_context(1.0, 1.0, 0.0);
        VectorXd x(2);
        x << 1.0, -1.0;
        CHECK(geometry::partition_radial(ctx, x) == doctest::Approx(0.25).epsilon(1e-8));
        CHECK(geometry::partition_log_closed(ctx, x) ==
              doctest::Approx(std::log(0.25)).epsilon(1e-10));
    }
    SUBCASE("homogeneity of order -p") {
        RngStream rng(17);
        for (int p = 1; p <= 5; ++p) {
            const auto ctx = oracles::random_context(rng, 3, p);
            const VectorXd x = oracles::random_vector(rng, p);
            if (x.lpNorm<1>() < 1e-3) continue;
            const double base = geometry::partition_radial(ctx, x);
            const double scaled = geometry::partition_radial(ctx, (2.0 * x).eval());
            CHECK(scaled == doctest::Approx(std::ldexp(base, -p)).epsilon(1e-8));
            const double log_base = geometry::partition_log_closed(ctx, x);
            const double log_scaled = geometry::partition_log_closed(ctx, (2.0 * x).eval());
            CHECK(log_scaled - log_base ==
                  doctest::Approx(-p * std::log(2.0)).epsilon(1e-10));
        }
    }
    SUBCASE("closed form tracks quadrature on random instances") {
        RngStream rng(23);
        int tested = 0;
        while (tested < 60) {
            const int p = 1 + int(rng.uniform01() * 6.0);
            const int n = 1 + int(rng.uniform01() * 4.0);
            const auto ctx = oracles::random_context(rng, n, p);
            const VectorXd x = oracles::random_vector(rng, p);
            if (x.lpNorm<1>() < 1e-3) continue;
            const double quadrature = geometry::partition_radial(ctx, x);
            const double closed = std::exp(geometry::partition_log_closed(ctx, x));
            CHECK(std::abs(closed - quadrature) / quadrature <= 1e-6);
            ++tested;
        }
    }
    SUBCASE("kernel-limit agreement at ||Ax|| = 1e-3") {
        // x = kernel direction + tiny off-kernel component
        MatrixXd design(1, 2);
        design << 1.0, 1.0;
        VectorXd y(1);
        y << 0.4;
        GeometryContext ctx(design, y);
        VectorXd x(2);
        const double eps = 5e-4;  // ||Ax|| = 2 eps = 1e-3
        x << 1.0 + eps, -1.0 + eps;
        const double closed = geometry::partition_log_closed(ctx, x);
        const double kernel_branch = specfun::log_gamma(2.0) - 2.0 * std::log(x.lpNorm<1>()) -
                                     0.5 * y.squaredNorm();
        CHECK(std::abs(std::exp(closed) - std::exp(kernel_branch)) /
                  std::exp(kernel_branch) <=
              0.01);
    }
    SUBCASE("survives p = 100 in log scale") {
        RngStream rng(31);
        const auto ctx = oracles::random_context(rng, 4, 100);
        const VectorXd x = oracles::random_vector(rng, 100);
        const double log_z = geometry::partition_log_closed(ctx, x);
        CHECK(std::isfinite(log_z));
        const double log_scaled = geometry::partition_log_closed(ctx, (3.0 * x).eval());
        CHECK(log_scaled - log_z == doctest::Approx(-100.0 * std::log(3.0)).epsilon(1e-9));
    }
    CHECK_THROWS_AS(geometry::partition_radial(row_context(1, 1, 0), VectorXd::Zero(2)),
                    DomainError);
}

TEST_CASE("quasi norm and max radius") {
    const auto ctx = row_context(1.0, 1.0, 0.0);
    SUBCASE("homogeneous of degree 1") {
        RngStream rng(13);
        for (int trial = 0; trial < 30; ++trial) {
            const auto ctx_r = oracles::random_context(rng, 2, 3);
            const VectorXd x = oracles::random_vector(rng, 3);
            if (x.lpNorm<1>() < 1e-3) continue;
            CHECK(geometry::quasi_norm(ctx_r, (2.0 * x).eval()) ==
                  doctest::Approx(2.0 * geometry::quasi_norm(ctx_r, x)).epsilon(1e-10));
        }
    }
    SUBCASE("origin maps to 0") { CHECK(geometry::quasi_norm(ctx, VectorXd::Zero(2)) == 0.0); }
    SUBCASE("kernel formula ||x||_1 / Gamma(p)^{1/p} when y = 0") {
        VectorXd x(2);
        x << 2.0, -2.0;
        const double expected = x.lpNorm<1>() / std::pow(std::tgamma(2.0), 0.5);
        CHECK(geometry::quasi_norm(ctx, x) == doctest::Approx(expected).epsilon(1e-10));
    }
    SUBCASE("unit ball is the Z_p >= 1 region") {
        RngStream rng(37);
        for (int trial = 0; trial < 40; ++trial) {
            const auto ctx_r = oracles::random_context(rng, 2, 3);
            const VectorXd x = oracles::random_vector(rng, 3);
            if (x.lpNorm<1>() < 1e-3) continue;
            const bool inside = geometry::quasi_norm(ctx_r, x) <= 1.0;
            const bool z_large = geometry::partition_log_closed(ctx_r, x) >= 0.0;
            CHECK(inside == z_large);
        }
    }
    SUBCASE("kernel direction r_max = 1, and r_max = 1/quasi_norm") {
        VectorXd s_vec(2);
        s_vec << 0.5, -0.5;
        const auto s = Direction(s_vec, geometry::NormTag::l1);
        CHECK(geometry::max_radius(ctx, s) == doctest::Approx(1.0).epsilon(1e-10));
        RngStream rng(41);
        for (int trial = 0; trial < 20; ++trial) {
            const auto ctx_r = oracles::random_context(rng, 2, 4);
            VectorXd v = oracles::random_vector(rng, 4);
            if (v.lpNorm<1>() < 1e-3) continue;
            const auto dir = Direction::l1_normalized(v);
            CHECK(geometry::max_radius(ctx_r, dir) ==
                  doctest::Approx(1.0 / geometry::quasi_norm(ctx_r, dir.vec())).epsilon(1e-10));
        }
    }
    SUBCASE("larger ||As|| gives smaller r_max when y = 0") {
        VectorXd s1(2);
        s1 << 1.0, 0.0;             // |As| = 1
        const auto ctx_b = row_context(1.0, 0.25, 0.0);
        const double r_strong = geometry::max_radius(ctx_b, Direction(s1, geometry::NormTag::l1));
        VectorXd s_weak(2);
        s_weak << 0.0, 1.0;         // |As| = 0.25
        const double r_weak = geometry::max_radius(ctx_b, Direction(s_weak, geometry::NormTag::l1));
        CHECK(r_strong < r_weak);
    }
}

TEST_CASE("partition_total_mc") {
    SUBCASE("zero matrix gives exactly 2^p with zero std error") {
        GeometryContext ctx(MatrixXd::Zero(2, 3), VectorXd::Zero(2));
        const auto estimate = geometry::partition_total_mc(ctx, 5000, 99);
        CHECK(estimate.estimate == doctest::Approx(8.0).epsilon(1e-14));
        CHECK(estimate.std_error == 0.0);
    }
    SUBCASE("p = 1 closed form 2 e^{1/2} sqrt(2 pi) (1 - F(1))") {
        MatrixXd design(1, 1);
        design << 1.0;
        GeometryContext ctx(design, VectorXd::Zero(1));
        const auto estimate = geometry::partition_total_mc(ctx, 400000, 2024);
        const double exact = 1.3113590848375969;
        CHECK(std::abs(estimate.estimate - exact) <= 3.0 * estimate.std_error);
        CHECK(estimate.std_error < 0.01);
    }
    SUBCASE("deterministic in the seed and the thread count") {
        RngStream rng(3);
        const auto ctx = oracles::random_context(rng, 2, 3);
        const auto first = geometry::partition_total_mc(ctx, 150000, 7);
        const auto second = geometry::partition_total_mc(ctx, 150000, 7);
        const auto threaded = geometry::partition_total_mc(ctx, 150000, 7, 4);
        CHECK(first.estimate == second.estimate);
        CHECK(first.std_error == second.std_error);
        CHECK(first.estimate == threaded.estimate);
        CHECK(first.std_error == threaded.std_error);
    }
}

TEST_CASE("volume identity at p = 2: angular integral of r_max^2/2 equals Z/2") {
    MatrixXd design(2, 2);
    design << 0.9, -0.3, 0.2, 0.7;
    VectorXd y(2);
    y << 0.3, -0.1;
    GeometryContext ctx(design, y);

    // cone parametrization of the l1 circle: s = (sig1 t, sig2 (1-t)),
    // area element r dr dt per edge, so volume = sum_edges int r_max^2/2 dt
    auto r_max_sq = [&](double sig1, double sig2, double t) {
        VectorXd s(2);
        s << sig1 * t, sig2 * (1.0 - t);
        return std::exp(geometry::partition_log_closed(ctx, s));
    };
    double volume = 0.0;
    const double signs[4][2] = {{1, 1}, {1, -1}, {-1, 1}, {-1, -1}};
    for (const auto& sign : signs)
        volume += 0.5 * oracles::simpson([&](double t) { return r_max_sq(sign[0], sign[1], t); },
                                         0.0, 1.0, 2000);

    const auto z = geometry::partition_total_mc(ctx, 600000, 424242);
    CHECK(std::abs(volume - 0.5 * z.estimate) <=
          0.01 * std::abs(volume) + 3.0 * 0.5 * z.std_error);
}
