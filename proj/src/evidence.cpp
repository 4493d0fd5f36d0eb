#include "costbic/evidence.hpp"

#include <Eigen/Cholesky>
#include <cmath>
#include <limits>
#include <mutex>

#include "costbic/errors.hpp"

namespace costbic {

std::string method_name(Method m) { return m == Method::laplace ? "laplace" : "bic"; }

Eigen::MatrixXd psi_matrix(const ModelIndicator& gamma, const FitResult& fit,
                           const Dataset& d) {
    if (fit.kind != FitKind::posterior_mode)
        throw NumericError("psi_matrix requires a posterior_mode fit");
    if (!fit.converged) throw NumericError("psi_matrix requires a converged fit");

    const auto alg = detail::make_model_linalg(d, gamma);
    if (fit.beta.size() != alg.dim) throw DataError("psi_matrix: fit dimension mismatch");

    const double inv4n = 1.0 / (4.0 * d.n);
    const Eigen::VectorXd eta = alg.Xg * fit.beta;
    Eigen::VectorXd w(d.n);
    for (int i = 0; i < d.n; ++i) {
        const double pi_ = logistic(eta[i]);
        w[i] = pi_ * (1.0 - pi_) + inv4n;
    }
    return alg.Xg.transpose() * w.asDiagonal() * alg.Xg;
}

namespace {

double logdet_spd(const Eigen::MatrixXd& m, const char* what) {
    Eigen::LLT<Eigen::MatrixXd> llt(m);
    if (llt.info() != Eigen::Success)
        throw NumericError(std::string(what) + ": matrix not positive definite");
    return 2.0 * llt.matrixL().toDenseMatrix().diagonal().array().log().sum();
}

}  // namespace

double phi(const ModelIndicator& gamma, const FitResult& fit, const Dataset& d) {
    const auto alg = detail::make_model_linalg(d, gamma);
    if (fit.beta.size() != alg.dim) throw DataError("phi: fit dimension mismatch");

    const Eigen::MatrixXd psi_inv = psi_matrix(gamma, fit, d);
    const double quad = fit.beta.dot(alg.XtX * fit.beta) / (4.0 * d.n);
    const double logdet_psi_inv = logdet_spd(psi_inv, "phi");
    return quad + alg.dim * std::log(4.0 * d.n) + logdet_psi_inv - alg.logdet_xtx;
}

ModelScore score_model(const ModelIndicator& gamma, const Dataset& d,
                       const CostPriorSpec& spec, Method method) {
    ModelScore s;
    s.gamma = gamma;
    s.method = method;
    s.cost = total_cost(gamma, d.costs);
    s.dimension = dimension(gamma);
    s.log_model_prior = log_model_prior(gamma, spec);

    try {
        if (method == Method::laplace) {
            const FitResult fit = posterior_mode(gamma, d);
            if (!fit.converged) {
                s.excluded = true;
                s.exclusion_reason = "posterior mode did not converge";
                return s;
            }
            s.loglik = log_likelihood(gamma, fit.beta, d);
            s.phi = phi(gamma, fit, d);
            s.score = -2.0 * s.loglik + *s.phi - 2.0 * s.log_model_prior;
        } else {
            const FitResult fit = mle(gamma, d);
            if (!fit.converged) {
                s.excluded = true;
                s.exclusion_reason = "MLE diverged (quasi-separation)";
                return s;
            }
            s.loglik = fit.objective;
            double ratio_sum = 0.0;  // C_gamma/c0 under the effective ratios
            for (int j : gamma.included()) ratio_sum += spec.ratio(j);
            s.cost_penalty = (1.0 + ratio_sum) * std::log(spec.n);
            s.score = -2.0 * s.loglik + *s.cost_penalty;
        }
    } catch (const RankDeficientError& err) {
        s.excluded = true;
        s.exclusion_reason = err.what();
    }
    return s;
}

double LogOdds::value() const {
    switch (state) {
        case State::finite:
            return std::exp(log_value);
        case State::pos_inf:
            return std::numeric_limits<double>::infinity();
        case State::neg_inf:
            return 0.0;
        default:
            throw NumericError("posterior odds undefined: both models excluded");
    }
}

LogOdds log_posterior_odds(const ModelScore& k, const ModelScore& l) {
    LogOdds lo;
    if (k.excluded && l.excluded) {
        lo.state = LogOdds::State::undefined;
    } else if (k.excluded) {
        lo.state = LogOdds::State::neg_inf;
    } else if (l.excluded) {
        lo.state = LogOdds::State::pos_inf;
    } else {
        lo.state = LogOdds::State::finite;
        lo.log_value = -0.5 * (k.score - l.score);
    }
    return lo;
}

LogOdds log_posterior_odds(const ModelIndicator& gamma_k, const ModelIndicator& gamma_l,
                           const Dataset& d, const CostPriorSpec& spec, Method method) {
    return log_posterior_odds(score_model(gamma_k, d, spec, method),
                              score_model(gamma_l, d, spec, method));
}

double posterior_odds(const ModelIndicator& gamma_k, const ModelIndicator& gamma_l,
                      const Dataset& d, const CostPriorSpec& spec, Method method) {
    return log_posterior_odds(gamma_k, gamma_l, d, spec, method).value();
}

const ModelScore& ScoreCache::get_or_compute(const ModelIndicator& gamma, const Dataset& d,
                                             const CostPriorSpec& spec, Method method) {
    const Key key{gamma, method};
    {
        std::shared_lock lock(mutex_);
        const auto it = map_.find(key);
        if (it != map_.end()) return *it->second;
    }
    auto computed = std::make_unique<ModelScore>(score_model(gamma, d, spec, method));
    std::unique_lock lock(mutex_);
    const auto [it, inserted] = map_.try_emplace(key, std::move(computed));
    return *it->second;  // idempotent: a racing insert wins, values are equal
}

std::size_t ScoreCache::size() const {
    std::shared_lock lock(mutex_);
    return map_.size();
}

}  // namespace costbic
