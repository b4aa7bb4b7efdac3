#pragma once

#include <Eigen/Dense>

#include "sclbf/error.hpp"

namespace sclbf {

using Vec2 = Eigen::Vector2d;
using Mat2 = Eigen::Matrix2d;

inline constexpr double kSymmetryTol = 1e-12;

bool is_spd(const Mat2& m);

/// Symmetric positive-definite 2x2 matrix. Construction validates the
/// invariant, so holders never need to re-check it.
class SpdMat2 {
public:
    explicit SpdMat2(const Mat2& m);

    const Mat2& matrix() const { return m_; }
    double operator()(int r, int c) const { return m_(r, c); }
    double det() const { return m_.determinant(); }
    double min_eigenvalue() const;
    double max_eigenvalue() const;

private:
    Mat2 m_;
};

/// Solves A^T P + P A = -Q for symmetric P by direct elimination on
/// (p11, p12, p22). Throws NotHurwitz or SingularSystem.
SpdMat2 solve_lyapunov_2x2(const Mat2& a, const SpdMat2& q);

/// Companion matrix [[0, 1], [-kp, -kd]] of a PD-controlled double integrator.
Mat2 pd_companion(double kp, double kd);

bool is_hurwitz(const Mat2& a);

// Central differences; error is O(h^2) for smooth fields.
template <typename Field>
Vec2 finite_diff_grad(Field&& f, const Vec2& x, double h = 1e-5) {
    Vec2 g;
    for (int i = 0; i < 2; ++i) {
        Vec2 xp = x, xm = x;
        xp[i] += h;
        xm[i] -= h;
        g[i] = (f(xp) - f(xm)) / (2.0 * h);
    }
    return g;
}

}  // namespace sclbf
