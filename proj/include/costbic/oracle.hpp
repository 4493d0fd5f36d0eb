#pragma once

#include <Eigen/Core>
#include <optional>
#include <string>
#include <vector>

#include "costbic/dataset.hpp"
#include "costbic/evidence.hpp"

namespace costbic {

// Exhaustive posterior over all 2^p models; ground truth for the samplers.
struct PosteriorRow {
    ModelIndicator gamma;
    double score = 0.0;
    double prob = 0.0;
    bool excluded = false;
};

struct PosteriorTable {
    Method method = Method::laplace;
    double log_normalizer = 0.0;
    std::vector<PosteriorRow> rows;  // sorted by descending probability
    std::vector<std::string> warnings;

    const PosteriorRow& best() const;
};

// Scores every model of the 2^p space and normalizes with max-shifted
// log-sum-exp. Parallel over model indices; the serial variant is the
// reference implementation and produces bit-identical tables.
PosteriorTable enumerate_posterior(const Dataset& d, const CostPriorSpec& spec,
                                   Method method);
PosteriorTable enumerate_posterior_serial(const Dataset& d, const CostPriorSpec& spec,
                                          Method method);

// f(gamma_j = 1 | y) for j = 1..p from an enumerated table.
Eigen::VectorXd marginal_inclusion_from_table(const PosteriorTable& t, int p);

std::string posterior_table_csv(const PosteriorTable& t, const Dataset& d);

struct QuadratureOptions {
    int nodes_per_axis = 201;    // coarse grid; refinement doubles the density
    double half_width_sd = 8.0;  // box half-width in posterior standard deviations
    // Test hook: replace the log-likelihood with a constant, so the integral
    // reduces to that constant (the prior is normalized).
    std::optional<double> replace_loglik_with;
};

struct QuadratureResult {
    double log_marginal = 0.0;
    double refinement_error = 0.0;  // |coarse - fine| in log units
};

// log integral of exp(loglik + logprior) d beta by tensor-grid trapezoid
// quadrature centered at the posterior mode. Guarded at d_gamma <= 3.
QuadratureResult quadrature_log_marginal(const ModelIndicator& gamma, const Dataset& d,
                                         const QuadratureOptions& opts = {});

// Laplace counterpart: h(mode) + (d/2) log(2 pi) - (1/2) log|Psi^{-1}|.
double laplace_log_marginal(const ModelIndicator& gamma, const Dataset& d);

}  // namespace costbic
