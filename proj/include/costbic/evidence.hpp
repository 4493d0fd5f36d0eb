#pragma once

#include <Eigen/Core>
#include <memory>
#include <optional>
#include <shared_mutex>
#include <string>
#include <unordered_map>

#include "costbic/dataset.hpp"
#include "costbic/glm.hpp"
#include "costbic/model_space.hpp"
#include "costbic/priors.hpp"

namespace costbic {

enum class Method { laplace, bic };

std::string method_name(Method m);

// Per-model evidence record. score is -2 * (approximate log posterior) up to
// a model-independent constant; only score differences are meaningful.
struct ModelScore {
    ModelIndicator gamma;
    Method method = Method::laplace;
    double loglik = 0.0;               // at posterior mode (laplace) or MLE (bic)
    std::optional<double> phi;         // laplace only
    double log_model_prior = 0.0;      // exact normalized prior mass
    double score = 0.0;
    double cost = 0.0;                 // C_gamma in actual cost units
    int dimension = 0;                 // d_gamma
    std::optional<double> cost_penalty;  // bic: (1 + C/c0) log n with effective ratios
    bool excluded = false;
    std::string exclusion_reason;
};

// Psi_gamma^{-1} = X_g^T diag{p(1-p) + 1/(4n)} X_g evaluated at the
// posterior mode carried by `fit`. Requires a converged posterior_mode fit.
Eigen::MatrixXd psi_matrix(const ModelIndicator& gamma, const FitResult& fit,
                           const Dataset& d);

// phi(gamma) = (1/4n) b^T X^T X b + d log(4n) + log|Psi^{-1}| - log|X^T X|.
double phi(const ModelIndicator& gamma, const FitResult& fit, const Dataset& d);

// Laplace: score = -2 loglik(mode) + phi - 2 log f(gamma).
// BIC:     score = -2 loglik(MLE) + (1 + C/c0) log n  (classical BIC when
//          all effective ratios are 1). Rank-deficient models and MLE
//          divergence yield excluded scores instead of throwing.
ModelScore score_model(const ModelIndicator& gamma, const Dataset& d,
                       const CostPriorSpec& spec, Method method);

struct LogOdds {
    enum class State { finite, pos_inf, neg_inf, undefined };
    State state = State::finite;
    double log_value = 0.0;  // meaningful when finite

    // Exponentiates on demand; 0 / +inf for the excluded-model states.
    // Throws NumericError when both models are excluded.
    double value() const;
};

// log PO_{kl} = -(score_k - score_l)/2 from already-computed scores.
LogOdds log_posterior_odds(const ModelScore& k, const ModelScore& l);
LogOdds log_posterior_odds(const ModelIndicator& gamma_k, const ModelIndicator& gamma_l,
                           const Dataset& d, const CostPriorSpec& spec, Method method);
double posterior_odds(const ModelIndicator& gamma_k, const ModelIndicator& gamma_l,
                      const Dataset& d, const CostPriorSpec& spec, Method method);

// Shared memo of model scores keyed by (gamma, method). Safe under
// concurrent insert/read; values are pure functions of the key.
class ScoreCache {
public:
    const ModelScore& get_or_compute(const ModelIndicator& gamma, const Dataset& d,
                                     const CostPriorSpec& spec, Method method);
    std::size_t size() const;

private:
    struct Key {
        ModelIndicator gamma;
        Method method;
        bool operator==(const Key& o) const {
            return method == o.method && gamma == o.gamma;
        }
    };
    struct KeyHash {
        std::size_t operator()(const Key& k) const {
            return k.gamma.hash() * 31 + static_cast<std::size_t>(k.method);
        }
    };

    mutable std::shared_mutex mutex_;
    std::unordered_map<Key, std::unique_ptr<ModelScore>, KeyHash> map_;
};

}  // namespace costbic
