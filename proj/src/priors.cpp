#include "costbic/priors.hpp"

#include <cmath>

#include "costbic/errors.hpp"

namespace costbic {

CostPriorSpec CostPriorSpec::make(const Eigen::VectorXd& costs, double n, PriorMode mode,
                                  std::optional<double> c0_override) {
    if (costs.size() < 1) throw DataError("cost prior: need at least one variable");
    for (int j = 0; j < costs.size(); ++j) {
        if (!(costs[j] > 0.0) || !std::isfinite(costs[j]))
            throw DataError("cost prior: non-positive cost at position " + std::to_string(j + 1));
    }
    if (!(n >= 2.0)) throw DataError("cost prior: sample size must be >= 2");

    CostPriorSpec spec;
    spec.costs = costs;
    spec.n = n;
    spec.mode = mode;
    const double cmin = costs.minCoeff();
    if (c0_override) {
        // downward only: larger baselines would give negative penalties to
        // cheap variables
        if (!(*c0_override > 0.0) || *c0_override > cmin)
            throw DataError("cost prior: c0 override must satisfy 0 < c0 <= min cost");
        spec.c0 = *c0_override;
    } else {
        spec.c0 = cmin;
    }
    return spec;
}

double CostPriorSpec::ratio(int j) const {
    if (j < 1 || j > p()) throw DataError("cost prior: variable index out of range");
    if (mode == PriorMode::benefit_only) return 1.0;
    return costs[j - 1] / c0;
}

double log_model_prior(const ModelIndicator& gamma, const CostPriorSpec& spec) {
    if (gamma.p() != spec.p()) throw DataError("cost prior: indicator length mismatch");
    const double logn = std::log(spec.n);
    double lp = 0.0;
    for (int j = 1; j <= spec.p(); ++j) {
        const double log_w = -0.5 * (spec.ratio(j) - 1.0) * logn;
        if (gamma.contains(j)) lp += log_w;
        lp -= std::log1p(std::exp(log_w));  // log(1 + n^{-(c_j/c0-1)/2})
    }
    return lp;
}

double log_prior_odds(const ModelIndicator& gamma_k, const ModelIndicator& gamma_l,
                      const CostPriorSpec& spec) {
    if (gamma_k.p() != spec.p() || gamma_l.p() != spec.p())
        throw DataError("cost prior: indicator length mismatch");
    const double logn = std::log(spec.n);
    double lo = 0.0;
    for (int j = 1; j <= spec.p(); ++j) {
        const int diff = (gamma_k.contains(j) ? 1 : 0) - (gamma_l.contains(j) ? 1 : 0);
        if (diff != 0) lo += diff * (-0.5 * (spec.ratio(j) - 1.0) * logn);
    }
    return lo;
}

double extra_penalty_xi(const ModelIndicator& gamma_k, const ModelIndicator& gamma_l,
                        const CostPriorSpec& spec) {
    return -2.0 * log_prior_odds(gamma_k, gamma_l, spec);
}

double omega_penalty(const ModelIndicator& gamma_k, const ModelIndicator& gamma_l,
                     const CostPriorSpec& spec) {
    if (gamma_k.p() != spec.p() || gamma_l.p() != spec.p())
        throw DataError("cost prior: indicator length mismatch");
    const double logn = std::log(spec.n);
    double ratio_sum = 0.0;  // (C_k - C_l)/c0 with effective ratios
    for (int j = 1; j <= spec.p(); ++j) {
        const int diff = (gamma_k.contains(j) ? 1 : 0) - (gamma_l.contains(j) ? 1 : 0);
        if (diff != 0) ratio_sum += diff * spec.ratio(j);
    }
    return ratio_sum * logn;
}

}  // namespace costbic
