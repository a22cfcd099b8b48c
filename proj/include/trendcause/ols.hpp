#pragma once

#include <cmath>
#include <string>
#include <utility>

#include <Eigen/Dense>

#include "trendcause/error.hpp"

namespace tc {

struct OlsResult {
    Eigen::VectorXd coeffs;
    Eigen::VectorXd std_errors;  ///< classical, using ssr / (n - k)
    Eigen::VectorXd residuals;
    double ssr = 0.0;
};

/**
 * Least-squares factorization of one design matrix, reusable across targets.
 *
 * Columns are scaled to unit Euclidean norm before a column-pivoted Householder
 * QR; the design is rejected as singular when |R_kk| / |R_00| < 1e-10 on the
 * scaled problem. Normal equations are never formed.
 */
class OlsSolver {
public:
    static constexpr double rank_tolerance = 1e-10;

    explicit OlsSolver(Eigen::MatrixXd design)
        : n_(design.rows()), k_(design.cols()), design_(std::move(design)) {
        if (k_ == 0) throw Error(ErrorKind::SingularDesign, "design has no columns");
        if (n_ <= k_)
            throw Error(ErrorKind::SeriesTooShort, "need more rows than columns (n=" +
                                                       std::to_string(n_) +
                                                       ", k=" + std::to_string(k_) + ")");
        scale_ = design_.colwise().norm().transpose();
        for (Eigen::Index j = 0; j < k_; ++j) {
            if (!(scale_(j) > 0.0) || !std::isfinite(scale_(j)))
                throw Error(ErrorKind::SingularDesign,
                            "design column " + std::to_string(j) + " is zero or non-finite");
        }
        const Eigen::MatrixXd scaled = design_ * scale_.cwiseInverse().asDiagonal();
        qr_.setThreshold(rank_tolerance);
        qr_.compute(scaled);
        const Eigen::MatrixXd r = qr_.matrixR().topLeftCorner(k_, k_).triangularView<Eigen::Upper>();
        const double lead = std::fabs(r(0, 0));
        for (Eigen::Index j = 0; j < k_; ++j) {
            if (!(std::fabs(r(j, j)) > rank_tolerance * lead))
                throw Error(ErrorKind::SingularDesign, "design matrix is rank deficient (rank < " +
                                                           std::to_string(k_) + ")");
        }
        // diag((X'X)^-1) on the scaled problem = row norms² of P R^-1.
        const Eigen::MatrixXd r_inv = r.triangularView<Eigen::Upper>().solve(
            Eigen::MatrixXd::Identity(k_, k_));
        const Eigen::VectorXd unpermuted = r_inv.rowwise().squaredNorm();
        xtx_inv_diag_ = qr_.colsPermutation() * unpermuted;
        xtx_inv_diag_ = xtx_inv_diag_.cwiseQuotient(scale_.cwiseAbs2());
    }

    Eigen::Index rows() const noexcept { return n_; }
    Eigen::Index cols() const noexcept { return k_; }

    /// Coefficients for one target (unscaled).
    Eigen::VectorXd coefficients(const Eigen::VectorXd& target) const {
        check_target(target.size());
        return qr_.solve(target).cwiseQuotient(scale_);
    }

    /// Coefficients for several targets at once, one column per target.
    Eigen::MatrixXd coefficients(const Eigen::MatrixXd& targets) const {
        check_target(targets.rows());
        return scale_.cwiseInverse().asDiagonal() * qr_.solve(targets);
    }

    OlsResult fit(const Eigen::VectorXd& target) const {
        OlsResult out;
        out.coeffs = coefficients(target);
        out.residuals = target - design_ * out.coeffs;
        out.ssr = out.residuals.squaredNorm();
        const double sigma2 = out.ssr / static_cast<double>(n_ - k_);
        out.std_errors = (sigma2 * xtx_inv_diag_).cwiseSqrt();
        return out;
    }

private:
    void check_target(Eigen::Index rows) const {
        if (rows != n_)
            throw Error(ErrorKind::ShapeMismatch, "target has " + std::to_string(rows) +
                                                      " rows, design has " + std::to_string(n_));
    }

    Eigen::Index n_;
    Eigen::Index k_;
    Eigen::MatrixXd design_;
    Eigen::VectorXd scale_;
    Eigen::VectorXd xtx_inv_diag_;
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr_;
};

/// One-shot least squares: design (n×k, n > k, full column rank) against target.
inline OlsResult ols(const Eigen::MatrixXd& design, const Eigen::VectorXd& target) {
    return OlsSolver(design).fit(target);
}

}  // namespace tc
