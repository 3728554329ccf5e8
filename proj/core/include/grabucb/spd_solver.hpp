#pragma once

#include <Eigen/Cholesky>
#include <Eigen/Dense>

#include <cmath>
#include <stdexcept>

namespace grabucb {

/// Cholesky-backed solver for symmetric positive-definite systems whose
/// diagonal entries can span many orders of magnitude (Gram matrices of
/// Laplacian-power features do). The matrix is Jacobi-equilibrated to unit
/// diagonal before factoring; a pivoted LDLT is the fallback when plain
/// Cholesky loses positivity to roundoff. eigenvalue_floor is a known lower
/// bound on the matrix's smallest eigenvalue (the ridge parameter here) and
/// is used to clamp roundoff-degenerate pivots.
class SpdSolver {
public:
    SpdSolver() = default;

    SpdSolver(const Eigen::MatrixXd& matrix, double eigenvalue_floor) {
        factor(matrix, eigenvalue_floor);
    }

    void factor(const Eigen::MatrixXd& matrix, double eigenvalue_floor) {
        const Eigen::Index k = matrix.rows();
        if (matrix.cols() != k) throw std::invalid_argument("SpdSolver: matrix must be square");
        if (!(eigenvalue_floor > 0.0)) {
            throw std::invalid_argument("SpdSolver: eigenvalue floor must be positive");
        }
        scale_ = matrix.diagonal().array().max(eigenvalue_floor).rsqrt();
        Eigen::MatrixXd scaled = scale_.asDiagonal() * matrix * scale_.asDiagonal();
        // floor for the scaled spectrum: lambda_min(SVS) >= floor * min(S^2)
        scaled_floor_ = eigenvalue_floor * scale_.array().square().minCoeff();
        llt_.compute(scaled);
        use_ldlt_ = llt_.info() != Eigen::Success;
        if (use_ldlt_) {
            ldlt_.compute(scaled);
            if (ldlt_.info() != Eigen::Success) {
                throw std::runtime_error("SpdSolver: factorization failed on an SPD matrix");
            }
        }
    }

    bool used_pivoting() const { return use_ldlt_; }

    /// x with matrix * x = rhs.
    Eigen::VectorXd solve(const Eigen::VectorXd& rhs) const {
        const Eigen::VectorXd scaled_rhs = scale_.cwiseProduct(rhs);
        Eigen::VectorXd y =
            use_ldlt_ ? ldlt_.solve(scaled_rhs).eval() : llt_.solve(scaled_rhs).eval();
        return scale_.cwiseProduct(y);
    }

    /// Columnwise solve.
    Eigen::MatrixXd solve(const Eigen::MatrixXd& rhs) const {
        const Eigen::MatrixXd scaled_rhs = scale_.asDiagonal() * rhs;
        Eigen::MatrixXd y =
            use_ldlt_ ? ldlt_.solve(scaled_rhs).eval() : llt_.solve(scaled_rhs).eval();
        return scale_.asDiagonal() * y;
    }

    /// v^T matrix^{-1} v, clamped at zero.
    double quad_form(const Eigen::VectorXd& v) const {
        const double q = v.dot(solve(v));
        return q > 0.0 ? q : 0.0;
    }

    /// log det of the original (unscaled) matrix.
    double log_det() const {
        double scaled_logdet = 0.0;
        if (use_ldlt_) {
            for (Eigen::Index i = 0; i < ldlt_.vectorD().size(); ++i) {
                scaled_logdet += std::log(std::max(ldlt_.vectorD()(i), scaled_floor_));
            }
        } else {
            for (Eigen::Index i = 0; i < scale_.size(); ++i) {
                scaled_logdet += 2.0 * std::log(llt_.matrixLLT()(i, i));
            }
        }
        // det(V) = det(S^-1 Vs S^-1) = det(Vs) / det(S)^2
        double log_scale = 0.0;
        for (Eigen::Index i = 0; i < scale_.size(); ++i) log_scale += std::log(scale_(i));
        return scaled_logdet - 2.0 * log_scale;
    }

private:
    Eigen::VectorXd scale_;
    Eigen::LLT<Eigen::MatrixXd> llt_;
    Eigen::LDLT<Eigen::MatrixXd> ldlt_;
    double scaled_floor_ = 0.0;
    bool use_ldlt_ = false;
};

} // namespace grabucb
