#include "costbic/diagnostics.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "costbic/errors.hpp"
#include "costbic/glm.hpp"
#include "costbic/rand.hpp"

namespace costbic {

double deviance(const ModelIndicator& gamma, const Eigen::VectorXd& beta, const Dataset& d) {
    return -2.0 * log_likelihood(gamma, beta, d);
}

namespace {

// within-model random-walk Metropolis; fn(beta) per kept draw
template <typename F>
void within_model_run(const ModelIndicator& gamma, const Dataset& d,
                      const WithinModelOptions& opts, F&& fn) {
    if (opts.draws < 1) throw DataError("within-model sampler: need at least one draw");
    if (opts.burn_in < 0 || opts.thin < 1)
        throw DataError("within-model sampler: bad burn_in/thin");

    const auto alg = detail::make_model_linalg(d, gamma);
    const FitResult fit = detail::newton_fit(alg, FitKind::posterior_mode);
    if (!fit.converged) throw NumericError("within-model sampler: mode did not converge");

    const Eigen::MatrixXd psi =
        fit.neg_hessian.llt().solve(Eigen::MatrixXd::Identity(alg.dim, alg.dim));
    Eigen::LLT<Eigen::MatrixXd> llt(psi);
    if (llt.info() != Eigen::Success)
        throw NumericError("within-model sampler: Psi not positive definite");
    const Eigen::MatrixXd chol = llt.matrixL();
    const double scale = 2.38 / std::sqrt(static_cast<double>(alg.dim));

    Rng rng(opts.seed);
    Eigen::VectorXd beta = fit.beta;
    double h = alg.log_posterior_kernel(beta);

    const long total = opts.burn_in + opts.draws * opts.thin;
    for (long t = 1; t <= total; ++t) {
        const Eigen::VectorXd z = standard_normal_vector(rng, alg.dim);
        const Eigen::VectorXd prop = beta + scale * (chol * z);
        const double hp = alg.log_posterior_kernel(prop);
        if (std::log(uniform01(rng)) < hp - h) {
            beta = prop;
            h = hp;
        }
        if (t > opts.burn_in && (t - opts.burn_in) % opts.thin == 0) fn(beta);
    }
}

// 64-node Gauss-Hermite rule via the Golub-Welsch tridiagonal eigenproblem;
// weights returned already divided by sqrt(pi).
struct HermiteRule {
    Eigen::VectorXd nodes;
    Eigen::VectorXd weights;
};

const HermiteRule& hermite64() {
    static const HermiteRule rule = [] {
        constexpr int m = 64;
        Eigen::MatrixXd j = Eigen::MatrixXd::Zero(m, m);
        for (int k = 1; k < m; ++k) {
            const double b = std::sqrt(k / 2.0);
            j(k, k - 1) = b;
            j(k - 1, k) = b;
        }
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(j);
        HermiteRule r;
        r.nodes = eig.eigenvalues();
        r.weights = eig.eigenvectors().row(0).array().square();
        return r;
    }();
    return rule;
}

double loo_predictive_logdensity(const detail::ModelLinAlg& alg, int i) {
    const FitResult fit = detail::newton_fit(alg, FitKind::posterior_mode, i);
    if (!fit.converged)
        throw NumericError("leave-one-out refit failed at observation " + std::to_string(i + 1));

    const Eigen::VectorXd xi = alg.Xg.row(i);
    const double mu = xi.dot(fit.beta);
    const Eigen::VectorXd solved = fit.neg_hessian.ldlt().solve(xi);
    const double s = std::sqrt(xi.dot(solved));

    const auto& rule = hermite64();
    const double yi = alg.data->y[i];
    double density = 0.0;
    for (int k = 0; k < rule.nodes.size(); ++k) {
        const double eta = mu + std::numbers::sqrt2 * s * rule.nodes[k];
        const double p1 = logistic(eta);
        density += rule.weights[k] * (yi == 1.0 ? p1 : 1.0 - p1);
    }
    return std::log(density);
}

double cv_exact_impl(const ModelIndicator& gamma, const Dataset& d, bool parallel) {
    if (d.n > 500)
        throw NumericError("cv_log_score_exact guarded at n <= 500, got n = " +
                           std::to_string(d.n));
    const auto alg = detail::make_model_linalg(d, gamma);

    std::vector<double> terms(d.n);
#pragma omp parallel for schedule(dynamic, 4) if (parallel)
    for (int i = 0; i < d.n; ++i) terms[i] = loo_predictive_logdensity(alg, i);

    double sum = 0.0;
    for (double v : terms) sum += v;
    return sum / d.n;
}

}  // namespace

std::vector<Eigen::VectorXd> sample_coefficients(const ModelIndicator& gamma, const Dataset& d,
                                                 const WithinModelOptions& opts) {
    std::vector<Eigen::VectorXd> out;
    out.reserve(opts.draws);
    within_model_run(gamma, d, opts, [&](const Eigen::VectorXd& b) { out.push_back(b); });
    return out;
}

DevianceSummary posterior_deviance(const ModelIndicator& gamma, const Dataset& d,
                                   const WithinModelOptions& opts) {
    const auto alg = detail::make_model_linalg(d, gamma);
    std::vector<double> devs;
    devs.reserve(opts.draws);
    within_model_run(gamma, d, opts, [&](const Eigen::VectorXd& b) {
        devs.push_back(-2.0 * alg.log_likelihood(b));
    });

    DevianceSummary s;
    s.gamma = gamma;
    s.draws = static_cast<long>(devs.size());
    s.settings = opts;
    std::vector<double> sorted = devs;
    std::sort(sorted.begin(), sorted.end());
    s.min = sorted.front();
    const std::size_t m = sorted.size();
    s.median = m % 2 ? sorted[m / 2] : 0.5 * (sorted[m / 2 - 1] + sorted[m / 2]);
    double mean = 0.0;
    for (double v : devs) mean += v;
    s.mean = mean / m;
    return s;
}

double cv_log_score_exact(const ModelIndicator& gamma, const Dataset& d) {
    return cv_exact_impl(gamma, d, true);
}

double cv_log_score_exact_serial(const ModelIndicator& gamma, const Dataset& d) {
    return cv_exact_impl(gamma, d, false);
}

CvMcmcResult cv_log_score_mcmc(const ModelIndicator& gamma, const Dataset& d,
                               const WithinModelOptions& opts) {
    const auto alg = detail::make_model_linalg(d, gamma);
    const double floor_log = std::log(1e-300);

    // streaming log-sum-exp of -log f(y_i | beta_t) per observation
    Eigen::VectorXd max_term = Eigen::VectorXd::Constant(d.n, -std::numeric_limits<double>::infinity());
    Eigen::VectorXd sum_exp = Eigen::VectorXd::Zero(d.n);
    std::vector<long> floored(d.n, 0);
    long draws = 0;

    within_model_run(gamma, d, opts, [&](const Eigen::VectorXd& b) {
        ++draws;
        const Eigen::VectorXd eta = alg.Xg * b;
        for (int i = 0; i < d.n; ++i) {
            double lf = d.y[i] * eta[i] - log1pexp(eta[i]);
            if (lf < floor_log) {
                lf = floor_log;
                ++floored[i];
            }
            const double v = -lf;
            if (v > max_term[i]) {
                sum_exp[i] = sum_exp[i] * std::exp(max_term[i] - v) + 1.0;
                max_term[i] = v;
            } else {
                sum_exp[i] += std::exp(v - max_term[i]);
            }
        }
    });

    CvMcmcResult res;
    res.per_observation.resize(d.n);
    const double log_t = std::log(static_cast<double>(draws));
    double sum = 0.0;
    for (int i = 0; i < d.n; ++i) {
        const double log_mean_inv = max_term[i] + std::log(sum_exp[i]) - log_t;
        res.per_observation[i] = -log_mean_inv;
        sum += -log_mean_inv;
        res.floored_terms += floored[i];
        if (floored[i] == draws) res.unreliable = true;
    }
    res.estimate = sum / d.n;
    return res;
}

}  // namespace costbic
