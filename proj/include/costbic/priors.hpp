#pragma once

#include <Eigen/Core>
#include <optional>

#include "costbic/model_space.hpp"

namespace costbic {

enum class PriorMode { cost_benefit, benefit_only };

// Cost-penalized prior on model space. Each variable enters independently
// with weight n^{-(c_j/c0 - 1)/2}; benefit_only treats every cost ratio as 1,
// which collapses to the uniform prior.
struct CostPriorSpec {
    Eigen::VectorXd costs;  // length p, positive
    double c0 = 0.0;        // baseline cost; c0 <= min_j c_j
    double n = 0.0;         // sample size
    PriorMode mode = PriorMode::cost_benefit;

    // c0 defaults to min_j c_j; overrides are accepted downward only.
    static CostPriorSpec make(const Eigen::VectorXd& costs, double n,
                              PriorMode mode = PriorMode::cost_benefit,
                              std::optional<double> c0_override = std::nullopt);

    int p() const { return static_cast<int>(costs.size()); }
    // Effective cost ratio c_j/c0 (1-based j); 1 in benefit_only mode.
    double ratio(int j) const;
};

// Exact normalized log prior mass of gamma:
//   sum_j [ -gamma_j (1/2)(c_j/c0 - 1) log n - log(1 + n^{-(c_j/c0-1)/2}) ].
// The intercept contributes nothing.
double log_model_prior(const ModelIndicator& gamma, const CostPriorSpec& spec);

// log f(gamma_k) - log f(gamma_l); normalization terms cancel exactly.
double log_prior_odds(const ModelIndicator& gamma_k, const ModelIndicator& gamma_l,
                      const CostPriorSpec& spec);

// xi = -2 log prior odds: the extra penalty the prior puts on
// -2 log Bayes factor.
double extra_penalty_xi(const ModelIndicator& gamma_k, const ModelIndicator& gamma_l,
                        const CostPriorSpec& spec);

// Total penalty on the -2 log-likelihood ratio implied by prior plus BIC
// dimension penalty: (C_k - C_l)/c0 * log n.
double omega_penalty(const ModelIndicator& gamma_k, const ModelIndicator& gamma_l,
                     const CostPriorSpec& spec);

}  // namespace costbic
