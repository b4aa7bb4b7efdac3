#include <doctest.h>

#include <random>

#include "sclbf/error.hpp"
#include "sclbf/safe_fl.hpp"

using namespace sclbf;

namespace {

ConstraintSet constraints(MatX rows, VecX offsets) { return {std::move(rows), std::move(offsets)}; }

MatX row_mat(std::initializer_list<std::initializer_list<double>> rows) {
    MatX m(rows.size(), rows.begin()->size());
    int i = 0;
    for (const auto& r : rows) {
        int j = 0;
        for (double v : r) m(i, j++) = v;
        ++i;
    }
    return m;
}

VecX vec(std::initializer_list<double> v) {
    VecX out(v.size());
    int i = 0;
    for (double x : v) out[i++] = x;
    return out;
}

ErrorCode code_of(auto&& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("no exception");
    return ErrorCode::InvalidArgument;
}

MatX phi_of(const DecouplingTransform& t) {
    const int n = t.dimension();
    MatX phi = MatX::Zero(2 * n, 2 * n);
    phi.topLeftCorner(n, n) = t.p;
    phi.bottomRightCorner(n, n) = t.p;
    return phi;
}

WeakClbf sample_clbf() {
    const SpdMat2 p = solve_lyapunov_2x2(pd_companion(1.5, 1.0), SpdMat2((Mat2() << 1.0, -0.9, -0.9, 1.0).finished()));
    return select_parameters(p, RegionBox(-1.2, 0.5, -2.5, 2.5), -1.0, 2.0);
}

}  // namespace

TEST_CASE("decoupling transform examples") {
    SUBCASE("single row completes with the second axis") {
        const DecouplingTransform t = build_transform(constraints(row_mat({{1, 0}}), vec({-1.0})));
        CHECK(t.completion.isApprox(row_mat({{0, 1}})));
        CHECK(t.p.isApprox(MatX::Identity(2, 2)));
        CHECK(t.constrained == 1);
    }
    SUBCASE("full rank set needs no completion") {
        const DecouplingTransform t = build_transform(constraints(MatX::Identity(2, 2), vec({-1.0, -1.3})));
        CHECK(t.completion.rows() == 0);
        CHECK(t.p.isApprox(MatX::Identity(2, 2)));
        CHECK(t.condition_number == doctest::Approx(1.0));
    }
    SUBCASE("diagonal constraint") {
        const DecouplingTransform t = build_transform(constraints(row_mat({{1, 1}}), vec({-1.0})));
        CHECK(t.completion(0, 0) == doctest::Approx(0.707107).epsilon(1e-6));
        CHECK(t.completion(0, 1) == doctest::Approx(-0.707107).epsilon(1e-6));
    }
    SUBCASE("completion is orthonormal and orthogonal to the constraints") {
        const MatX c = row_mat({{1.0, 2.0, 0.5, -1.0}, {0.0, 1.0, -3.0, 2.0}});
        const DecouplingTransform t = build_transform(constraints(c, vec({-1.0, -2.0})));
        CHECK((t.completion * t.completion.transpose() - MatX::Identity(2, 2)).norm() < 1e-12);
        CHECK((c * t.completion.transpose()).norm() < 1e-12);
        for (int r = 0; r < t.completion.rows(); ++r) {
            int c0 = 0;
            while (std::abs(t.completion(r, c0)) <= 1e-12) ++c0;
            CHECK(t.completion(r, c0) > 0.0);
        }
        // Deterministic across calls.
        CHECK(build_transform(constraints(c, vec({-1.0, -2.0}))).p == t.p);
    }
}

TEST_CASE("decoupling transform errors") {
    CHECK(code_of([] { build_transform(constraints(row_mat({{1, 1}, {2, 2}}), vec({-1.0, -1.0}))); }) ==
          ErrorCode::RankDeficient);
    CHECK(code_of([] { build_transform(constraints(row_mat({{1, 0}}), vec({0.5}))); }) ==
          ErrorCode::InvalidUnsafeSet);
    CHECK(code_of([] { build_transform(constraints(row_mat({{1}, {2}, {3}}), vec({-1, -1, -1}))); }) ==
          ErrorCode::InvalidArgument);
}

TEST_CASE("transform round trip and unsafe-set mapping") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    const MatX c = row_mat({{1.0, 0.4, -0.2}, {0.3, -1.0, 0.8}});
    const VecX d = vec({-0.7, -1.1});
    const DecouplingTransform t = build_transform(constraints(c, d));
    for (int k = 0; k < 200; ++k) {
        VecX x(6);
        for (int i = 0; i < 6; ++i) x[i] = u(rng);
        CHECK((t.inverse(t.apply(x)) - x).norm() < 1e-12 * std::max(1.0, x.norm()));
    }
    // A point on the boundary C_i x = d_i maps to xbar_1i = d_i.
    for (int i = 0; i < 2; ++i) {
        VecX x1 = c.row(i).transpose() * (d[i] / c.row(i).squaredNorm());
        VecX x(6);
        x << x1, VecX::Zero(3);
        CHECK(t.apply(x)[i] == doctest::Approx(d[i]).epsilon(1e-12));
    }
}

TEST_CASE("gain schedule") {
    CHECK(code_of([] { GainSchedule({{0.0, 1.0}}); }) == ErrorCode::InvalidArgument);
    CHECK(code_of([] { GainSchedule({{1.0, -1.0}}); }) == ErrorCode::InvalidArgument);
    CHECK(code_of([] { GainSchedule({{1.0, 1.0, -0.1}}); }) == ErrorCode::InvalidArgument);
    CHECK_NOTHROW(GainSchedule({{1.5, 1.0, 0.0}, {1.0, 1.0, 1.5}}));
}

TEST_CASE("gain matrix") {
    const DecouplingTransform id = build_transform(constraints(MatX::Identity(2, 2), vec({-1.0, -1.3})));
    SUBCASE("unit gains") {
        const MatX k = build_gain_matrix(id, GainSchedule({{1, 1}, {1, 1}}));
        MatX expected(2, 4);
        expected << MatX::Identity(2, 2), MatX::Identity(2, 2);
        CHECK(k.isApprox(expected));
    }
    SUBCASE("manipulator gains") {
        const MatX k = build_gain_matrix(id, GainSchedule({{1.5, 1.0}, {1.0, 1.0}}));
        CHECK(k.isApprox(row_mat({{1.5, 0, 1.0, 0}, {0, 1.0, 0, 1.0}})));
    }
    SUBCASE("closed loop splits into independent subsystems for random transforms") {
        std::mt19937_64 rng(17);
        std::uniform_real_distribution<double> u(-1.0, 1.0), g(0.2, 5.0);
        for (int trial = 0; trial < 100; ++trial) {
            MatX c(2, 3);
            for (int i = 0; i < c.size(); ++i) c.data()[i] = u(rng);
            const DecouplingTransform t = build_transform(constraints(c, vec({-1.0, -1.0})));
            const GainSchedule gs({{g(rng), g(rng)}, {g(rng), g(rng)}, {g(rng), g(rng)}});
            const MatX k = build_gain_matrix(t, gs);
            // xbar2' = P u = -P K Phi^-1 xbar must equal -[diag(kp) diag(kd)] xbar.
            const MatX transformed = t.p * k * phi_of(t).inverse();
            MatX kbar = MatX::Zero(3, 6);
            for (int i = 0; i < 3; ++i) {
                kbar(i, i) = gs.subsystems[i].kp;
                kbar(i, 3 + i) = gs.subsystems[i].kd;
            }
            CHECK((transformed - kbar).cwiseAbs().maxCoeff() < 1e-10 * std::max(1.0, t.condition_number));
        }
    }
}

TEST_CASE("u_safe assembly") {
    const DecouplingTransform id = build_transform(constraints(MatX::Identity(2, 2), vec({-1.0, -1.3})));
    CHECK(assemble_u_safe(id, MatX::Identity(2, 2), VecX::Zero(2)).norm() == 0.0);
    CHECK(assemble_u_safe(id, MatX::Identity(2, 2), vec({1.0, 0.0})).isApprox(vec({1.0, 0.0})));

    std::mt19937_64 rng(23);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int trial = 0; trial < 100; ++trial) {
        MatX c(2, 2), g(2, 2);
        for (int i = 0; i < 4; ++i) {
            c.data()[i] = u(rng);
            g.data()[i] = u(rng);
        }
        g += 2.0 * MatX::Identity(2, 2);
        c += 2.0 * MatX::Identity(2, 2);
        const DecouplingTransform t = build_transform(constraints(c, vec({-1.0, -1.0})));
        const VecX a = vec({u(rng), u(rng)});
        const VecX out = assemble_u_safe(t, g, a);
        CHECK((t.p * g * out - a).norm() < 1e-9);
    }
    CHECK(code_of([&] { assemble_u_safe(id, row_mat({{1, 1}, {1, 1}}), vec({1, 0})); }) ==
          ErrorCode::SingularInputMatrix);
    CHECK(code_of([&] { assemble_u_safe(id, row_mat({{1, 0}, {0, 1e-10}}), vec({1, 0})); }) ==
          ErrorCode::SingularInputMatrix);
}

TEST_CASE("initial set membership") {
    const DecouplingTransform id = build_transform(constraints(MatX::Identity(2, 2), vec({-1.0, -1.0})));
    const WeakClbf w = sample_clbf();
    const std::vector<WeakClbf> ws{w, w};

    const MembershipResult origin = initial_set_membership(id, ws, VecX::Zero(4));
    CHECK(origin.member);
    REQUIRE(origin.w_values.size() == 2);
    CHECK(origin.w_values[0] == doctest::Approx(-w.k));
    CHECK(origin.w_values[1] == doctest::Approx(-w.k));

    const MembershipResult deep = initial_set_membership(id, ws, vec({0.0, -1.1, 0.0, 0.4}));
    CHECK_FALSE(deep.member);
    CHECK(deep.w_values[0] < 0.0);
    CHECK(deep.w_values[1] > 0.0);
}

TEST_CASE("safety inputs only for constrained subsystems") {
    const GainSchedule gs({{1.5, 1.0, 1.0}, {1.0, 1.0, 1.0}});
    const VecX xbar = vec({-0.7, 0.2, -1.5, 0.1});
    const VecX a = safe_aux_inputs({sample_clbf()}, xbar, gs);
    CHECK(a.size() == 2);
    CHECK(a[0] != 0.0);
    CHECK(a[1] == 0.0);
    CHECK(subsystem_state(xbar, 1) == Vec2(0.2, 0.1));
}
