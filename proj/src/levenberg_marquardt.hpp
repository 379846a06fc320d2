#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

#include <Eigen/Dense>

namespace slimecap::detail {

// Residuals r(p) and, when the pointer is non-null, the Jacobian dr/dp.
using ResidualFn = std::function<void(const Eigen::VectorXd& p, Eigen::VectorXd& r, Eigen::MatrixXd* J)>;

struct LmResult {
    Eigen::VectorXd params;
    double cost = 0.0;  // 0.5 * |r|^2
    int iterations = 0;
    bool converged = false;
};

// Damped Gauss-Newton with Marquardt diagonal scaling and Nielsen's update of
// the damping factor (gain-ratio controlled trust region).
inline LmResult levenberg_marquardt(const ResidualFn& fn, Eigen::VectorXd p, int max_iterations,
                                    double rel_cost_tol) {
    Eigen::VectorXd r;
    Eigen::MatrixXd J;
    fn(p, r, &J);
    double cost = 0.5 * r.squaredNorm();
    if (!std::isfinite(cost)) return {p, std::numeric_limits<double>::infinity(), 0, false};

    // Scale of the problem for the exact-fit test.
    const double cost_floor = 1e-30 * std::max(1.0, cost);

    Eigen::MatrixXd A = J.transpose() * J;
    Eigen::VectorXd g = J.transpose() * r;
    double mu = 1e-3 * A.diagonal().maxCoeff();
    double nu = 2.0;

    LmResult res{p, cost, 0, false};
    for (int it = 1; it <= max_iterations; ++it) {
        res.iterations = it;
        if (cost <= cost_floor || g.lpNorm<Eigen::Infinity>() < 1e-300) {
            res.converged = true;
            break;
        }
        Eigen::VectorXd d = A.diagonal().cwiseMax(1e-12 * std::max(1e-300, A.diagonal().maxCoeff()));
        Eigen::MatrixXd damped = A;
        damped.diagonal() += mu * d;
        Eigen::VectorXd h = damped.ldlt().solve(-g);
        if (!h.allFinite()) {
            mu *= nu;
            nu *= 2.0;
            continue;
        }
        if (h.norm() <= 1e-14 * (p.norm() + 1e-14)) {
            res.converged = true;
            break;
        }
        Eigen::VectorXd p_new = p + h;
        Eigen::VectorXd r_new;
        fn(p_new, r_new, nullptr);
        const double cost_new = 0.5 * r_new.squaredNorm();
        const double predicted = 0.5 * h.dot(mu * d.cwiseProduct(h) - g);
        const double rho = (std::isfinite(cost_new) && predicted > 0) ? (cost - cost_new) / predicted : -1.0;
        if (rho > 0) {
            const double rel_change = (cost - cost_new) / std::max(cost, 1e-300);
            p = p_new;
            cost = cost_new;
            fn(p, r, &J);
            A = J.transpose() * J;
            g = J.transpose() * r;
            mu *= std::max(1.0 / 3.0, 1.0 - std::pow(2.0 * rho - 1.0, 3));
            nu = 2.0;
            res.params = p;
            res.cost = cost;
            if (rel_change < rel_cost_tol) {
                res.converged = true;
                break;
            }
        } else {
            mu *= nu;
            nu *= 2.0;
            if (mu > 1e40) {
                // No direction reduces the cost any further.
                res.converged = true;
                break;
            }
        }
    }
    res.params = p;
    res.cost = cost;
    return res;
}

}  // namespace slimecap::detail
