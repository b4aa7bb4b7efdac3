#include <doctest.h>

#include <random>

#include <Eigen/Dense>

#include "sclbf/error.hpp"
#include "sclbf/numerics.hpp"

using namespace sclbf;

namespace {

Mat2 mat(double a, double b, double c, double d) {
    Mat2 m;
    m << a, b, c, d;
    return m;
}

// Brute-force oracle: apply the Lyapunov operator to each basis matrix to get
// a 4x4 system in vec(P), then least squares.
Mat2 lyapunov_oracle(const Mat2& a, const Mat2& q) {
    Eigen::Matrix4d op;
    for (int k = 0; k < 4; ++k) {
        Mat2 e = Mat2::Zero();
        e(k % 2, k / 2) = 1.0;
        const Mat2 img = a.transpose() * e + e * a;
        op.col(k) = Eigen::Map<const Eigen::Vector4d>(img.data());
    }
    const Mat2 neg_q = -q;
    const Eigen::Vector4d v = op.colPivHouseholderQr().solve(Eigen::Map<const Eigen::Vector4d>(neg_q.data()));
    return Eigen::Map<const Mat2>(v.data());
}

double residual(const Mat2& a, const Mat2& p, const Mat2& q) {
    return (a.transpose() * p + p * a + q).cwiseAbs().maxCoeff();
}

const Mat2 kQ = mat(1.0, -0.9, -0.9, 1.0);

}  // namespace

TEST_CASE("lyapunov: worked examples") {
    SUBCASE("companion of kp = kd = 1 with Q = I") {
        const SpdMat2 p = solve_lyapunov_2x2(pd_companion(1.0, 1.0), SpdMat2(Mat2::Identity()));
        CHECK((p.matrix() - mat(1.5, 0.5, 0.5, 1.0)).cwiseAbs().maxCoeff() < 1e-12);
    }
    SUBCASE("diagonal A gives Q / 2") {
        const SpdMat2 p = solve_lyapunov_2x2(-Mat2::Identity(), SpdMat2(Mat2::Identity()));
        CHECK((p.matrix() - 0.5 * Mat2::Identity()).cwiseAbs().maxCoeff() < 1e-12);
    }
    SUBCASE("first manipulator subsystem") {
        const Mat2 a = mat(0.0, 1.0, -1.5, -1.0);
        const SpdMat2 p = solve_lyapunov_2x2(a, SpdMat2(kQ));
        CHECK((p.matrix() - mat(149.0 / 60.0, 1.0 / 3.0, 1.0 / 3.0, 5.0 / 6.0)).cwiseAbs().maxCoeff() < 1e-9);
        CHECK((p.matrix() - lyapunov_oracle(a, kQ)).cwiseAbs().maxCoeff() < 1e-10);
        CHECK(p(0, 1) > 0.0);
    }
}

TEST_CASE("lyapunov: errors") {
    CHECK_THROWS_AS(solve_lyapunov_2x2(mat(0, 1, 1, 0), SpdMat2(Mat2::Identity())), Error);
    try {
        solve_lyapunov_2x2(mat(1, 0, 0, -1), SpdMat2(Mat2::Identity()));
        FAIL("expected NotHurwitz");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::NotHurwitz);
    }
    try {
        // Marginal: purely imaginary eigenvalues.
        solve_lyapunov_2x2(mat(0, 1, -1, 0), SpdMat2(Mat2::Identity()));
        FAIL("expected NotHurwitz");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::NotHurwitz);
    }
}

TEST_CASE("lyapunov: random Hurwitz companions") {
    std::mt19937_64 rng(20240611);
    std::uniform_real_distribution<double> gain(0.1, 10.0);
    std::uniform_real_distribution<double> diag(0.5, 3.0);
    std::uniform_real_distribution<double> frac(-0.95, 0.95);
    for (int i = 0; i < 1000; ++i) {
        const Mat2 a = pd_companion(gain(rng), gain(rng));
        const double q11 = diag(rng), q22 = diag(rng);
        const double q12 = frac(rng) * std::sqrt(q11 * q22);
        const Mat2 q = mat(q11, q12, q12, q22);
        const SpdMat2 p = solve_lyapunov_2x2(a, SpdMat2(q));
        REQUIRE(is_spd(p.matrix()));
        CHECK(residual(a, p.matrix(), q) < 1e-9);
    }
}

TEST_CASE("lyapunov: off-diagonal of P is positive for PD companions with the scenario Q") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> gain(0.1, 10.0);
    for (int i = 0; i < 1000; ++i) {
        const double kp = gain(rng), kd = gain(rng);
        const SpdMat2 p = solve_lyapunov_2x2(pd_companion(kp, kd), SpdMat2(kQ));
        INFO("kp=" << kp << " kd=" << kd);
        CHECK(p(0, 1) > 0.0);
    }
}

TEST_CASE("is_spd") {
    CHECK(is_spd(Mat2::Identity()));
    CHECK_FALSE(is_spd(mat(1, 2, 2, 1)));
    CHECK(is_spd(mat(2.483333, 0.333333, 0.333333, 0.833333)));
    CHECK_FALSE(is_spd(mat(1, 0.1, 0.2, 1)));
    CHECK_FALSE(is_spd(mat(0, 0, 0, 1)));
    CHECK_FALSE(is_spd(mat(-1, 0, 0, -1)));
}

TEST_CASE("SpdMat2 rejects non-SPD input") {
    try {
        SpdMat2 bad(mat(1, 2, 2, 1));
        FAIL("expected NotSpd");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::NotSpd);
    }
    const SpdMat2 p(mat(2, 0, 0, 3));
    CHECK(p.min_eigenvalue() == doctest::Approx(2.0));
    CHECK(p.max_eigenvalue() == doctest::Approx(3.0));
    CHECK(p.det() == doctest::Approx(6.0));
}

TEST_CASE("is_hurwitz") {
    CHECK(is_hurwitz(pd_companion(1.5, 1.0)));
    CHECK_FALSE(is_hurwitz(pd_companion(1.0, 0.0)));
    CHECK_FALSE(is_hurwitz(pd_companion(-1.0, 1.0)));
}

TEST_CASE("finite_diff_grad") {
    const Vec2 g1 = finite_diff_grad([](const Vec2& x) { return x[0] * x[0]; }, Vec2(1.0, 0.0));
    CHECK(g1[0] == doctest::Approx(2.0).epsilon(1e-8));
    CHECK(std::abs(g1[1]) < 1e-8);

    const Mat2 p = mat(149.0 / 60.0, 1.0 / 3.0, 1.0 / 3.0, 5.0 / 6.0);
    const Vec2 x(-0.7, -1.5);
    const Vec2 g2 = finite_diff_grad([&](const Vec2& y) { return 0.5 * y.dot(p * y); }, x);
    CHECK((g2 - p * x).norm() < 1e-6);

    const Vec2 g3 = finite_diff_grad([](const Vec2&) { return 4.2; }, Vec2(0.3, -0.1));
    CHECK(g3.norm() == 0.0);
}
