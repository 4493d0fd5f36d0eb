#pragma once

#include <Eigen/Core>
#include <cmath>
#include <vector>

#include "costbic/dataset.hpp"
#include "costbic/model_space.hpp"

namespace costbic {

// log(1 + exp(x)) without overflow.
inline double log1pexp(double x) {
    if (x <= -37.0) return std::exp(x);
    if (x <= 18.0) return std::log1p(std::exp(x));
    if (x <= 33.3) return x + std::exp(-x);
    return x;
}

inline double logistic(double eta) {
    if (eta >= 0.0) return 1.0 / (1.0 + std::exp(-eta));
    const double e = std::exp(eta);
    return e / (1.0 + e);
}

enum class FitKind { mle, posterior_mode };

struct FitResult {
    Eigen::VectorXd beta;         // intercept first, then included predictors
    double objective = 0.0;       // log-likelihood (mle) or h = loglik + logprior (mode)
    Eigen::MatrixXd neg_hessian;  // of the objective at beta, d x d
    int iterations = 0;
    bool converged = false;
    FitKind kind = FitKind::mle;
};

// n x d_gamma design submatrix: intercept column plus included predictors
// in index order.
Eigen::MatrixXd design_submatrix(const Dataset& d, const ModelIndicator& gamma);

// d_gamma x d_gamma slice of the precomputed X^T X.
Eigen::MatrixXd xtx_submatrix(const Dataset& d, const ModelIndicator& gamma);

// Bernoulli log-likelihood sum_i [y_i eta_i - log(1+exp(eta_i))].
double log_likelihood(const ModelIndicator& gamma, const Eigen::VectorXd& beta,
                      const Dataset& d);

// Unit-information coefficient prior N(0, 4n (X_g^T X_g)^{-1}), with
// normalizing constant. Throws RankDeficientError on singular X_g^T X_g.
double log_coefficient_prior(const ModelIndicator& gamma, const Eigen::VectorXd& beta,
                             const Dataset& d);

// h(beta) = log_likelihood + log_coefficient_prior.
double log_posterior_kernel(const ModelIndicator& gamma, const Eigen::VectorXd& beta,
                            const Dataset& d);

// Gradient and negative Hessian of the fit objective, exposed for
// finite-difference checks and quadrature.
Eigen::VectorXd objective_gradient(const ModelIndicator& gamma, const Eigen::VectorXd& beta,
                                   const Dataset& d, FitKind kind);
Eigen::MatrixXd objective_neg_hessian(const ModelIndicator& gamma, const Eigen::VectorXd& beta,
                                      const Dataset& d, FitKind kind);

// Newton with step-halving from beta = 0. Gradient max-norm tolerance 1e-8,
// cap 50 iterations; MLE declared divergent when ||beta||_inf > 30.
FitResult mle(const ModelIndicator& gamma, const Dataset& d);
FitResult posterior_mode(const ModelIndicator& gamma, const Dataset& d);

namespace detail {

// Per-model matrices shared by fits, evidence, quadrature and the samplers.
// Construction performs the rank check; singular X_g^T X_g throws
// RankDeficientError. Holds a pointer to the dataset, which must outlive it.
struct ModelLinAlg {
    const Dataset* data = nullptr;
    int dim = 0;
    std::vector<int> cols;  // column indices into X, intercept first
    Eigen::MatrixXd Xg;     // n x dim
    Eigen::MatrixXd XtX;    // dim x dim
    double logdet_xtx = 0.0;
    double log_prior_const = 0.0;  // log prior density terms independent of beta

    double log_likelihood(const Eigen::VectorXd& beta, int exclude_row = -1) const;
    double log_prior(const Eigen::VectorXd& beta) const;
    double log_posterior_kernel(const Eigen::VectorXd& beta) const {
        return log_likelihood(beta) + log_prior(beta);
    }
};

ModelLinAlg make_model_linalg(const Dataset& d, const ModelIndicator& gamma);

// Fit with one observation left out (exclude_row >= 0). The coefficient
// prior keeps the full-data X and n: conditioning on partial data does not
// change the analysis prior.
FitResult newton_fit(const ModelLinAlg& alg, FitKind kind, int exclude_row = -1);
FitResult newton_fit(const ModelIndicator& gamma, const Dataset& d, FitKind kind,
                     int exclude_row = -1);

}  // namespace detail

}  // namespace costbic
