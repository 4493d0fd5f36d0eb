#include "costbic/oracle.hpp"

#include <Eigen/Cholesky>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "costbic/errors.hpp"
#include "costbic/glm.hpp"
#include "costbic/report.hpp"

namespace costbic {

const PosteriorRow& PosteriorTable::best() const {
    if (rows.empty() || rows.front().excluded)
        throw NumericError("posterior table has no scorable model");
    return rows.front();
}

namespace {

PosteriorTable enumerate_impl(const Dataset& d, const CostPriorSpec& spec, Method method,
                              bool parallel) {
    if (d.p > 20)
        throw DataError("full enumeration guarded at p <= 20, got p = " + std::to_string(d.p));
    const std::int64_t count = std::int64_t{1} << d.p;

    std::vector<ModelScore> scores(count);
#pragma omp parallel for schedule(dynamic, 16) if (parallel)
    for (std::int64_t m = 0; m < count; ++m) {
        scores[m] = score_model(ModelIndicator::from_encoding(d.p, static_cast<std::uint64_t>(m)),
                                d, spec, method);
    }

    PosteriorTable t;
    t.method = method;

    // max-shifted log-sum-exp over scorable models, in encoding order
    double max_lw = -std::numeric_limits<double>::infinity();
    for (const auto& s : scores)
        if (!s.excluded) max_lw = std::max(max_lw, -0.5 * s.score);
    if (!std::isfinite(max_lw)) throw NumericError("every model in the space is unscorable");

    double sum = 0.0;
    for (const auto& s : scores)
        if (!s.excluded) sum += std::exp(-0.5 * s.score - max_lw);
    t.log_normalizer = max_lw + std::log(sum);

    t.rows.reserve(scores.size());
    long excluded_count = 0;
    for (auto& s : scores) {
        PosteriorRow row;
        row.gamma = s.gamma;
        row.excluded = s.excluded;
        if (s.excluded) {
            row.score = std::numeric_limits<double>::quiet_NaN();
            row.prob = 0.0;
            if (++excluded_count <= 20)
                t.warnings.push_back("excluded " + notation(s.gamma) + ": " + s.exclusion_reason);
        } else {
            row.score = s.score;
            row.prob = std::exp(-0.5 * s.score - t.log_normalizer);
        }
        t.rows.push_back(std::move(row));
    }
    if (excluded_count > 20)
        t.warnings.push_back(std::to_string(excluded_count - 20) + " further models excluded");

    std::stable_sort(t.rows.begin(), t.rows.end(),
                     [](const PosteriorRow& a, const PosteriorRow& b) { return a.prob > b.prob; });
    return t;
}

}  // namespace

PosteriorTable enumerate_posterior(const Dataset& d, const CostPriorSpec& spec, Method method) {
    return enumerate_impl(d, spec, method, true);
}

PosteriorTable enumerate_posterior_serial(const Dataset& d, const CostPriorSpec& spec,
                                          Method method) {
    return enumerate_impl(d, spec, method, false);
}

Eigen::VectorXd marginal_inclusion_from_table(const PosteriorTable& t, int p) {
    Eigen::VectorXd marg = Eigen::VectorXd::Zero(p);
    for (const auto& row : t.rows) {
        if (row.excluded) continue;
        for (int j : row.gamma.included()) marg[j - 1] += row.prob;
    }
    return marg;
}

std::string posterior_table_csv(const PosteriorTable& t, const Dataset& d) {
    std::ostringstream os;
    os << "model,dim,cost,score,prob,cum_prob\n";
    double cum = 0.0;
    for (const auto& row : t.rows) {
        cum += row.prob;
        os << notation(row.gamma) << ',' << dimension(row.gamma) << ','
           << format_double(total_cost(row.gamma, d.costs)) << ','
           << (row.excluded ? std::string() : format_double(row.score)) << ','
           << format_double(row.prob) << ',' << format_double(cum) << '\n';
    }
    return os.str();
}

namespace {

// Trapezoid over a tensor grid centered at the integrand's mode; the inner
// axis is hoisted so each node costs one O(n) pass.
double log_integral_on_grid(const detail::ModelLinAlg& alg, const Eigen::VectorXd& center,
                            const Eigen::VectorXd& sd, double half_width, int nodes,
                            const std::optional<double>& loglik_override) {
    const int dim = alg.dim;
    const Dataset& d = *alg.data;

    const auto g = [&](const Eigen::VectorXd& beta, const Eigen::VectorXd& eta) {
        double ll;
        if (loglik_override) {
            ll = *loglik_override;
        } else {
            ll = 0.0;
            for (int i = 0; i < d.n; ++i) ll += d.y[i] * eta[i] - log1pexp(eta[i]);
        }
        return ll + alg.log_prior(beta);
    };

    const double g0 = g(center, alg.Xg * center);

    std::vector<double> step(dim), lo(dim);
    for (int a = 0; a < dim; ++a) {
        lo[a] = center[a] - half_width * sd[a];
        step[a] = 2.0 * half_width * sd[a] / (nodes - 1);
    }

    const int inner = dim - 1;
    std::int64_t outer_count = 1;
    for (int a = 0; a < inner; ++a) outer_count *= nodes;

    std::vector<double> partial(outer_count, 0.0);
#pragma omp parallel for schedule(static)
    for (std::int64_t of = 0; of < outer_count; ++of) {
        Eigen::VectorXd beta(dim);
        double wt_outer = 1.0;
        std::int64_t rem = of;
        for (int a = inner - 1; a >= 0; --a) {
            const int k = static_cast<int>(rem % nodes);
            rem /= nodes;
            beta[a] = lo[a] + k * step[a];
            wt_outer *= (k == 0 || k == nodes - 1) ? 0.5 : 1.0;
        }
        const Eigen::VectorXd eta_outer =
            inner > 0 ? Eigen::VectorXd(alg.Xg.leftCols(inner) * beta.head(inner))
                      : Eigen::VectorXd(Eigen::VectorXd::Zero(d.n));
        double acc = 0.0;
        Eigen::VectorXd eta(d.n);
        for (int k = 0; k < nodes; ++k) {
            beta[inner] = lo[inner] + k * step[inner];
            eta = eta_outer + beta[inner] * alg.Xg.col(inner);
            const double wt = wt_outer * ((k == 0 || k == nodes - 1) ? 0.5 : 1.0);
            acc += wt * std::exp(g(beta, eta) - g0);
        }
        partial[of] = acc;
    }

    double sum = 0.0;
    for (double v : partial) sum += v;  // fixed order: deterministic

    double log_steps = 0.0;
    for (int a = 0; a < dim; ++a) log_steps += std::log(step[a]);
    return g0 + std::log(sum) + log_steps;
}

}  // namespace

QuadratureResult quadrature_log_marginal(const ModelIndicator& gamma, const Dataset& d,
                                         const QuadratureOptions& opts) {
    const int dg = dimension(gamma);
    if (dg > 3) throw NumericError("quadrature guarded at d_gamma <= 3, got " +
                                   std::to_string(dg));
    if (opts.nodes_per_axis < 9) throw NumericError("quadrature needs at least 9 nodes per axis");

    const auto alg = detail::make_model_linalg(d, gamma);

    Eigen::VectorXd center;
    Eigen::MatrixXd neg_hess;
    if (opts.replace_loglik_with) {
        // integrand is the (normalized) prior shifted by a constant
        center = Eigen::VectorXd::Zero(dg);
        neg_hess = alg.XtX / (4.0 * d.n);
    } else {
        const FitResult fit = posterior_mode(gamma, d);
        if (!fit.converged) throw NumericError("quadrature: posterior mode did not converge");
        center = fit.beta;
        neg_hess = fit.neg_hessian;
    }

    const Eigen::MatrixXd psi = neg_hess.llt().solve(Eigen::MatrixXd::Identity(dg, dg));
    const Eigen::VectorXd sd = psi.diagonal().array().sqrt();

    const double coarse = log_integral_on_grid(alg, center, sd, opts.half_width_sd,
                                               opts.nodes_per_axis, opts.replace_loglik_with);
    const double fine = log_integral_on_grid(alg, center, sd, opts.half_width_sd,
                                             2 * opts.nodes_per_axis - 1,
                                             opts.replace_loglik_with);
    return {fine, std::abs(fine - coarse)};
}

double laplace_log_marginal(const ModelIndicator& gamma, const Dataset& d) {
    const FitResult fit = posterior_mode(gamma, d);
    if (!fit.converged) throw NumericError("laplace_log_marginal: mode did not converge");
    Eigen::LLT<Eigen::MatrixXd> llt(fit.neg_hessian);
    if (llt.info() != Eigen::Success)
        throw NumericError("laplace_log_marginal: negative Hessian not positive definite");
    const double logdet = 2.0 * llt.matrixL().toDenseMatrix().diagonal().array().log().sum();
    const int dg = dimension(gamma);
    return fit.objective + 0.5 * dg * std::log(2.0 * std::numbers::pi) - 0.5 * logdet;
}

}  // namespace costbic
