#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <vector>

#include "costbic/dataset.hpp"
#include "costbic/model_space.hpp"

namespace costbic {

// D(beta, gamma) = -2 sum_i log f(y_i | beta, gamma) = -2 * log_likelihood.
double deviance(const ModelIndicator& gamma, const Eigen::VectorXd& beta,
                const Dataset& d);

struct WithinModelOptions {
    long draws = 10000;  // kept draws
    long burn_in = 2000;
    int thin = 1;
    std::uint64_t seed = 0;
};

// Random-walk Metropolis over beta within a fixed model: proposal covariance
// (2.38^2/d) Psi, started at the posterior mode. Deterministic per seed.
std::vector<Eigen::VectorXd> sample_coefficients(const ModelIndicator& gamma, const Dataset& d,
                                                 const WithinModelOptions& opts);

struct DevianceSummary {
    ModelIndicator gamma;
    double min = 0.0;
    double median = 0.0;
    double mean = 0.0;
    long draws = 0;
    WithinModelOptions settings;
};

// Summary of the posterior deviance sample from the within-model sampler.
DevianceSummary posterior_deviance(const ModelIndicator& gamma, const Dataset& d,
                                   const WithinModelOptions& opts);

// Leave-one-out cross-validation log score: for each i the predictive
// density f(y_i | y_{-i}) is the Bernoulli likelihood integrated against the
// Gaussian mode approximation of the leave-one-out posterior, via 64-node
// Gauss-Hermite quadrature on the linear predictor. Guarded at n <= 500.
// The parallel variant distributes refits over observations; the serial one
// is the reference and returns bit-identical values.
double cv_log_score_exact(const ModelIndicator& gamma, const Dataset& d);
double cv_log_score_exact_serial(const ModelIndicator& gamma, const Dataset& d);

struct CvMcmcResult {
    double estimate = 0.0;
    std::vector<double> per_observation;  // log predictive density terms
    long floored_terms = 0;   // per-observation densities clamped at 1e-300
    bool unreliable = false;  // some observation had every draw floored
};

// Single-run estimator: posterior mean of the inverse predictive density per
// observation, accumulated in log space over within-model draws.
CvMcmcResult cv_log_score_mcmc(const ModelIndicator& gamma, const Dataset& d,
                               const WithinModelOptions& opts);

}  // namespace costbic
