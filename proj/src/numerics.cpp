#include "sclbf/numerics.hpp"

#include <cmath>

namespace sclbf {

std::string_view to_string(ErrorCode code) {
    switch (code) {
        case ErrorCode::InvalidArgument: return "InvalidArgument";
        case ErrorCode::NotSpd: return "NotSpd";
        case ErrorCode::NotHurwitz: return "NotHurwitz";
        case ErrorCode::SingularSystem: return "SingularSystem";
        case ErrorCode::InvalidUnsafeSet: return "InvalidUnsafeSet";
        case ErrorCode::LevelTooSmall: return "LevelTooSmall";
        case ErrorCode::MarginInfeasible: return "MarginInfeasible";
        case ErrorCode::EmptyCOmega: return "EmptyCOmega";
        case ErrorCode::GridTooCoarse: return "GridTooCoarse";
        case ErrorCode::RankDeficient: return "RankDeficient";
        case ErrorCode::SingularInputMatrix: return "SingularInputMatrix";
        case ErrorCode::NearSingular: return "NearSingular";
        case ErrorCode::NonFiniteState: return "NonFiniteState";
        case ErrorCode::ConfigError: return "ConfigError";
    }
    return "Unknown";
}

bool is_spd(const Mat2& m) {
    if (!m.allFinite()) return false;
    if (std::abs(m(0, 1) - m(1, 0)) > kSymmetryTol) return false;
    return m(0, 0) > 0.0 && m.determinant() > 0.0;
}

SpdMat2::SpdMat2(const Mat2& m) : m_(m) {
    if (!is_spd(m)) throw Error(ErrorCode::NotSpd, "matrix is not symmetric positive definite");
    // Store the exactly symmetric part so downstream algebra sees p12 == p21.
    const double off = 0.5 * (m(0, 1) + m(1, 0));
    m_(0, 1) = off;
    m_(1, 0) = off;
}

double SpdMat2::min_eigenvalue() const {
    const double mean = 0.5 * m_.trace();
    const double rad = std::hypot(0.5 * (m_(0, 0) - m_(1, 1)), m_(0, 1));
    return mean - rad;
}

double SpdMat2::max_eigenvalue() const {
    const double mean = 0.5 * m_.trace();
    const double rad = std::hypot(0.5 * (m_(0, 0) - m_(1, 1)), m_(0, 1));
    return mean + rad;
}

bool is_hurwitz(const Mat2& a) {
    // For a real 2x2 matrix both eigenvalues lie in the open left half-plane
    // iff trace < 0 and det > 0.
    return a.allFinite() && a.trace() < 0.0 && a.determinant() > 0.0;
}

Mat2 pd_companion(double kp, double kd) {
    Mat2 a;
    a << 0.0, 1.0, -kp, -kd;
    return a;
}

SpdMat2 solve_lyapunov_2x2(const Mat2& a, const SpdMat2& q) {
    if (!is_hurwitz(a)) throw Error(ErrorCode::NotHurwitz, "A has an eigenvalue with non-negative real part");

    const double a11 = a(0, 0), a12 = a(0, 1), a21 = a(1, 0), a22 = a(1, 1);
    // Entries (1,1), (1,2), (2,2) of A^T P + P A, linear in (p11, p12, p22).
    Eigen::Matrix3d m;
    m << 2.0 * a11, 2.0 * a21, 0.0,
         a12, a11 + a22, a21,
         0.0, 2.0 * a12, 2.0 * a22;
    const Eigen::Vector3d rhs(-q(0, 0), -q(0, 1), -q(1, 1));

    Eigen::FullPivLU<Eigen::Matrix3d> lu(m);
    lu.setThreshold(1e-13);
    if (lu.rank() < 3) throw Error(ErrorCode::SingularSystem, "Lyapunov elimination system is rank deficient");
    const Eigen::Vector3d p = lu.solve(rhs);

    Mat2 out;
    out << p[0], p[1], p[1], p[2];
    return SpdMat2(out);
}

}  // namespace sclbf
