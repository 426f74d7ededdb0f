// core.hpp — dense complex operator arithmetic, twisted commutators,
// residual/tolerance policy, error types, seeded sampling helpers.

#pragma once

#include <Eigen/Dense>

#include <complex>
#include <random>
#include <stdexcept>
#include <string>

namespace twistkit {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealMatrix = Eigen::MatrixXd;
using RealVector = Eigen::VectorXd;
using Rng = std::mt19937_64;

// ---------------------------------- errors ----------------------------------

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct DimensionError : Error { using Error::Error; };
struct NotAntiunitaryError : Error { using Error::Error; };
struct AlgebraMismatchError : Error { using Error::Error; };
struct IrregularTwistError : Error { using Error::Error; };
struct NotInvariantError : Error { using Error::Error; };
struct RankDeficiencyError : Error { using Error::Error; };
struct NotWellDefinedError : Error { using Error::Error; };
struct IdentityViolation : Error { using Error::Error; };
struct PrecheckError : Error { using Error::Error; };
struct InconsistentCertificate : Error { using Error::Error; };
struct UnsupportedDimensionError : Error { using Error::Error; };
struct NoSuchConjugationError : Error { using Error::Error; };
struct SchemaError : Error { using Error::Error; };

// --------------------------------- tolerance --------------------------------

struct Tolerance {
    double rel = 1e-10;
    double abs = 1e-12;

    // comparison policy: resid <= rel * scale + abs
    bool ok(double resid, double scale) const { return resid <= rel * scale + abs; }
    double threshold(double scale) const { return rel * scale + abs; }
};

enum class NormKind { frobenius, spectral };

inline double opnorm(const Matrix& a, NormKind kind = NormKind::frobenius) {
    if (kind == NormKind::frobenius) return a.norm();
    if (a.size() == 0) return 0.0;
    Eigen::JacobiSVD<Matrix> svd(a);
    return svd.singularValues()(0);
}

inline void require_same_dim(const Matrix& a, const Matrix& b, const char* who) {
    if (a.rows() != b.rows() || a.cols() != b.cols())
        throw DimensionError(std::string(who) + ": dimension mismatch " +
                             std::to_string(a.rows()) + "x" + std::to_string(a.cols()) + " vs " +
                             std::to_string(b.rows()) + "x" + std::to_string(b.cols()));
}

inline double residual(const Matrix& a, const Matrix& b, NormKind kind = NormKind::frobenius) {
    require_same_dim(a, b, "residual");
    return opnorm(a - b, kind);
}

// residual normalized by the larger operand; 0/0 counts as exact agreement
inline double rel_residual(const Matrix& a, const Matrix& b, NormKind kind = NormKind::frobenius) {
    double r = residual(a, b, kind);
    double s = std::max(opnorm(a, kind), opnorm(b, kind));
    return s > 0 ? r / s : r;
}

// ----------------------------- basic operator ops ----------------------------

// [D, a]_rho = D a - rho(a) D; with rho_a == a this is the plain commutator.
inline Matrix twisted_commutator(const Matrix& d, const Matrix& a, const Matrix& rho_a) {
    require_same_dim(d, a, "twisted_commutator");
    require_same_dim(d, rho_a, "twisted_commutator");
    return d * a - rho_a * d;
}

inline Matrix commutator(const Matrix& a, const Matrix& b) {
    require_same_dim(a, b, "commutator");
    return a * b - b * a;
}

inline Matrix anticommutator(const Matrix& a, const Matrix& b) {
    require_same_dim(a, b, "anticommutator");
    return a * b + b * a;
}

inline bool is_hermitian(const Matrix& a, const Tolerance& tol = {}) {
    return tol.ok(residual(a, a.adjoint().eval()), opnorm(a));
}

inline bool is_unitary(const Matrix& a, const Tolerance& tol = {}) {
    Matrix g = a.adjoint() * a;
    return tol.ok(residual(g, Matrix::Identity(a.rows(), a.cols())), 1.0);
}

inline Matrix kron(const Matrix& a, const Matrix& b) {
    Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

// ------------------------------ seeded sampling ------------------------------

inline double gauss(Rng& rng) {
    std::normal_distribution<double> n(0.0, 1.0);
    return n(rng);
}

inline Matrix random_matrix(int rows, int cols, Rng& rng) {
    Matrix a(rows, cols);
    for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j) a(i, j) = Complex(gauss(rng), gauss(rng)) / std::sqrt(2.0);
    return a;
}

inline Matrix random_hermitian(int n, Rng& rng) {
    Matrix a = random_matrix(n, n, rng);
    return ((a + a.adjoint()) / 2.0).eval();
}

inline Matrix random_unitary(int n, Rng& rng) {
    Matrix a = random_matrix(n, n, rng);
    Eigen::HouseholderQR<Matrix> qr(a);
    Matrix q = qr.householderQ();
    Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (int i = 0; i < n; ++i) {
        Complex d = r(i, i);
        q.col(i) *= (std::abs(d) > 0 ? d / std::abs(d) : Complex(1, 0));
    }
    return q;
}

inline Vector random_vector(int n, Rng& rng) {
    Vector v(n);
    for (int i = 0; i < n; ++i) v(i) = Complex(gauss(rng), gauss(rng)) / std::sqrt(2.0);
    return v;
}

// exp(i h) for hermitian h, via spectral decomposition
inline Matrix hermitian_phase(const Matrix& h) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(h);
    Vector phases = es.eigenvalues().unaryExpr([](double x) { return std::polar(1.0, x); });
    return es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
}

}  // namespace twistkit
