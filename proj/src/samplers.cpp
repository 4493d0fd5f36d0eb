#include "costbic/samplers.hpp"

#include <Eigen/Cholesky>
#include <algorithm>
#include <cmath>
#include <exception>
#include <memory>
#include <mutex>
#include <numbers>
#include <shared_mutex>
#include <sstream>
#include <unordered_map>

#include "costbic/errors.hpp"
#include "costbic/glm.hpp"
#include "costbic/priors.hpp"
#include "costbic/rand.hpp"
#include "costbic/report.hpp"

namespace costbic {

std::string sampler_method_name(SamplerMethod m) {
    switch (m) {
        case SamplerMethod::mc3_laplace: return "mc3_laplace";
        case SamplerMethod::mc3_bic: return "mc3_bic";
        default: return "rjmcmc";
    }
}

namespace {

void validate_config(const Dataset& d, const SamplerConfig& cfg) {
    if (cfg.iterations < 0 || cfg.burn_in < 0 || cfg.iterations < cfg.burn_in)
        throw DataError("sampler config: need iterations >= burn_in >= 0");
    if (cfg.chains < 1) throw DataError("sampler config: need at least one chain");
    if (cfg.start == StartModel::given && cfg.start_gamma.p() != d.p)
        throw DataError("sampler config: start model does not match dataset");
    if (cfg.beta_refreshes < 0) throw DataError("sampler config: negative refresh count");
}

ModelIndicator start_model(const Dataset& d, const SamplerConfig& cfg) {
    switch (cfg.start) {
        case StartModel::null_model: return ModelIndicator(d.p);
        case StartModel::full_model: {
            ModelIndicator g(d.p);
            for (int j = 1; j <= d.p; ++j) g.set(j, true);
            return g;
        }
        default: return cfg.start_gamma;
    }
}

struct ChainData {
    std::uint64_t seed = 0;
    std::vector<ModelIndicator> models;  // first-visit order
    std::unordered_map<ModelIndicator, std::uint32_t, ModelIndicatorHash> index;
    std::vector<std::uint32_t> seq;
    long proposals = 0;
    long accepts = 0;
    std::vector<Eigen::VectorXd> tracked;
};

void record_state(ChainData& c, const ModelIndicator& g) {
    const auto [it, inserted] = c.index.try_emplace(g, static_cast<std::uint32_t>(c.models.size()));
    if (inserted) c.models.push_back(g);
    c.seq.push_back(it->second);
}

ChainOutput assemble(const Dataset& d, const SamplerConfig& cfg,
                     std::vector<ChainData>&& chains) {
    ChainOutput co;
    co.p = d.p;
    co.iterations = cfg.iterations;
    co.burn_in = cfg.burn_in;
    co.chains = cfg.chains;

    std::unordered_map<ModelIndicator, std::uint32_t, ModelIndicatorHash> global;
    long proposals = 0, accepts = 0;
    for (auto& c : chains) {
        co.chain_seeds.push_back(c.seed);
        std::vector<std::uint32_t> remap(c.models.size());
        for (std::size_t k = 0; k < c.models.size(); ++k) {
            const auto [it, inserted] =
                global.try_emplace(c.models[k], static_cast<std::uint32_t>(co.models.size()));
            if (inserted) {
                co.models.push_back(c.models[k]);
                co.visit_counts.push_back(0);
            }
            remap[k] = it->second;
        }
        std::vector<std::uint32_t> seq(c.seq.size());
        for (std::size_t t = 0; t < c.seq.size(); ++t) {
            seq[t] = remap[c.seq[t]];
            ++co.visit_counts[seq[t]];
        }
        co.sequences.push_back(std::move(seq));
        proposals += c.proposals;
        accepts += c.accepts;
        for (auto& b : c.tracked) co.tracked_betas.push_back(std::move(b));
    }
    co.acceptance_rate = proposals > 0 ? static_cast<double>(accepts) / proposals : 0.0;

    const long kept = co.kept_total();
    if (kept > 0) {
        co.marginal_estimates = Eigen::VectorXd::Zero(d.p);
        for (std::size_t m = 0; m < co.models.size(); ++m) {
            for (int j : co.models[m].included())
                co.marginal_estimates[j - 1] += static_cast<double>(co.visit_counts[m]);
        }
        co.marginal_estimates /= static_cast<double>(kept);

        // top model: highest pooled count, first-visit order breaking ties
        std::size_t top = 0;
        for (std::size_t m = 1; m < co.models.size(); ++m)
            if (co.visit_counts[m] > co.visit_counts[top]) top = m;
        co.trace.top_model = co.models[top];

        const long stride = std::max<long>(1, kept / 1000);
        Eigen::VectorXd incl = Eigen::VectorXd::Zero(d.p);
        long top_hits = 0;
        long t = 0;
        std::vector<Eigen::VectorXd> rows;
        for (const auto& seq : co.sequences) {
            for (std::uint32_t mi : seq) {
                ++t;
                for (int j : co.models[mi].included()) incl[j - 1] += 1.0;
                if (mi == top) ++top_hits;
                if (t % stride == 0 || t == kept) {
                    co.trace.iteration.push_back(t);
                    rows.push_back(incl / static_cast<double>(t));
                    co.trace.top_model_freq.push_back(static_cast<double>(top_hits) / t);
                }
            }
        }
        co.trace.inclusion_means.resize(static_cast<Eigen::Index>(rows.size()), d.p);
        for (std::size_t r = 0; r < rows.size(); ++r) co.trace.inclusion_means.row(r) = rows[r];
    }
    return co;
}

double normal_logpdf(double x, double mu, double sd) {
    const double z = (x - mu) / sd;
    return -0.5 * std::log(2.0 * std::numbers::pi) - std::log(sd) - 0.5 * z * z;
}

}  // namespace

// ---------------------------------------------------------------- MC3

ChainOutput run_mc3(const Dataset& d, const CostPriorSpec& spec, const SamplerConfig& cfg) {
    validate_config(d, cfg);
    if (cfg.method == SamplerMethod::rjmcmc) throw DataError("run_mc3: wrong sampler method");
    const Method method = cfg.method == SamplerMethod::mc3_bic ? Method::bic : Method::laplace;
    const int p = d.p;

    ScoreCache cache;
    const ModelIndicator g0 = start_model(d, cfg);
    const ModelScore& s0 = cache.get_or_compute(g0, d, spec, method);
    if (s0.excluded && p > 0) {
        bool any = false;
        for (int j = 1; j <= p && !any; ++j)
            any = !cache.get_or_compute(flip(g0, j), d, spec, method).excluded;
        if (!any)
            throw NumericError("MC3: start model and its whole neighborhood are unscorable");
    }

    std::vector<ChainData> chains(cfg.chains);
    std::exception_ptr error;
#pragma omp parallel for schedule(dynamic, 1)
    for (int chain = 0; chain < cfg.chains; ++chain) {
        try {
            ChainData& c = chains[chain];
            c.seed = derive_seed(cfg.seed, static_cast<std::uint64_t>(chain));
            Rng rng(c.seed);
            std::uniform_int_distribution<int> pick(1, std::max(1, p));

            ModelIndicator g = g0;
            const ModelScore* cur = &s0;
            for (long it = 1; it <= cfg.iterations; ++it) {
                if (p > 0) {
                    const int j = cfg.scan == Scan::systematic
                                      ? 1 + static_cast<int>((it - 1) % p)
                                      : pick(rng);
                    const ModelIndicator prop = flip(g, j);
                    const ModelScore& sp = cache.get_or_compute(prop, d, spec, method);
                    ++c.proposals;
                    bool accept = false;
                    if (sp.excluded) {
                        accept = false;
                    } else if (cur->excluded) {
                        accept = true;
                    } else {
                        const double log_alpha = -0.5 * (sp.score - cur->score);
                        accept = std::log(uniform01(rng)) < log_alpha;
                    }
                    if (accept) {
                        g = prop;
                        cur = &sp;
                        ++c.accepts;
                    }
                }
                if (it > cfg.burn_in) record_state(c, g);
            }
        } catch (...) {
#pragma omp critical
            if (!error) error = std::current_exception();
        }
    }
    if (error) std::rethrow_exception(error);
    return assemble(d, cfg, std::move(chains));
}

// ---------------------------------------------------------------- RJMCMC

namespace {

// Per-model pieces for the reversible-jump moves. Deliberately excludes the
// n x d design copy so the cache stays small.
struct RjCtx {
    bool ok = false;
    std::string reason;
    int dim = 0;
    std::vector<int> cols;       // X columns, intercept first
    Eigen::MatrixXd XtX;
    double log_prior_const = 0.0;
    Eigen::VectorXd mode;        // posterior mode
    Eigen::MatrixXd psi_chol;    // lower Cholesky factor of Psi
    Eigen::VectorXd pilot_sd;    // sqrt(diag Psi)
};

double rj_loglik(const Dataset& d, const RjCtx& ctx, const Eigen::VectorXd& beta) {
    Eigen::VectorXd eta = d.X.col(0) * beta[0];
    for (int k = 1; k < ctx.dim; ++k) eta.noalias() += beta[k] * d.X.col(ctx.cols[k]);
    double ll = 0.0;
    for (int i = 0; i < d.n; ++i) ll += d.y[i] * eta[i] - log1pexp(eta[i]);
    return ll;
}

double rj_logprior(const Dataset& d, const RjCtx& ctx, const Eigen::VectorXd& beta) {
    return ctx.log_prior_const - beta.dot(ctx.XtX * beta) / (8.0 * d.n);
}

class RjCtxCache {
public:
    explicit RjCtxCache(const Dataset& d) : d_(d) {}

    std::shared_ptr<const RjCtx> get(const ModelIndicator& gamma) {
        {
            std::shared_lock lock(mutex_);
            const auto it = map_.find(gamma);
            if (it != map_.end()) return it->second;
        }
        auto ctx = std::make_shared<RjCtx>(build(gamma));
        std::unique_lock lock(mutex_);
        const auto [it, inserted] = map_.try_emplace(gamma, std::move(ctx));
        return it->second;
    }

private:
    RjCtx build(const ModelIndicator& gamma) const {
        RjCtx ctx;
        try {
            const auto alg = detail::make_model_linalg(d_, gamma);
            const FitResult fit = detail::newton_fit(alg, FitKind::posterior_mode);
            if (!fit.converged) {
                ctx.reason = "posterior mode did not converge";
                return ctx;
            }
            ctx.dim = alg.dim;
            ctx.cols = alg.cols;
            ctx.XtX = alg.XtX;
            ctx.log_prior_const = alg.log_prior_const;
            ctx.mode = fit.beta;
            const Eigen::MatrixXd psi =
                fit.neg_hessian.llt().solve(Eigen::MatrixXd::Identity(alg.dim, alg.dim));
            Eigen::LLT<Eigen::MatrixXd> llt(psi);
            if (llt.info() != Eigen::Success) {
                ctx.reason = "Psi not positive definite";
                return ctx;
            }
            ctx.psi_chol = llt.matrixL();
            ctx.pilot_sd = psi.diagonal().array().sqrt();
            ctx.ok = true;
        } catch (const RankDeficientError& err) {
            ctx.reason = err.what();
        }
        return ctx;
    }

    const Dataset& d_;
    mutable std::shared_mutex mutex_;
    std::unordered_map<ModelIndicator, std::shared_ptr<const RjCtx>, ModelIndicatorHash> map_;
};

// coefficient slot of variable j: 1 + number of included indices below j
int coefficient_position(const ModelIndicator& gamma, int j) {
    int pos = 1;
    for (int k : gamma.included()) {
        if (k == j) return pos;
        if (k < j) ++pos;
    }
    return pos;
}

Eigen::VectorXd insert_coefficient(const Eigen::VectorXd& beta, int pos, double value) {
    Eigen::VectorXd out(beta.size() + 1);
    out.head(pos) = beta.head(pos);
    out[pos] = value;
    out.tail(beta.size() - pos) = beta.tail(beta.size() - pos);
    return out;
}

Eigen::VectorXd erase_coefficient(const Eigen::VectorXd& beta, int pos) {
    Eigen::VectorXd out(beta.size() - 1);
    out.head(pos) = beta.head(pos);
    out.tail(beta.size() - pos - 1) = beta.tail(beta.size() - pos - 1);
    return out;
}

}  // namespace

ChainOutput run_rjmcmc(const Dataset& d, const CostPriorSpec& spec, const SamplerConfig& cfg) {
    validate_config(d, cfg);
    if (cfg.method != SamplerMethod::rjmcmc) throw DataError("run_rjmcmc: wrong sampler method");
    const int p = d.p;

    RjCtxCache cache(d);
    const ModelIndicator g0 = start_model(d, cfg);
    const auto ctx0 = cache.get(g0);
    if (!ctx0->ok)
        throw NumericError("RJMCMC: start model unscorable (" + ctx0->reason + ")");

    std::vector<ChainData> chains(cfg.chains);
    std::exception_ptr error;
#pragma omp parallel for schedule(dynamic, 1)
    for (int chain = 0; chain < cfg.chains; ++chain) {
        try {
            ChainData& c = chains[chain];
            c.seed = derive_seed(cfg.seed, static_cast<std::uint64_t>(chain));
            Rng rng(c.seed);
            std::uniform_int_distribution<int> pick(1, std::max(1, p));

            ModelIndicator g = g0;
            auto ctx = ctx0;
            Eigen::VectorXd beta = ctx->mode;
            double ll = rj_loglik(d, *ctx, beta);
            double lp = rj_logprior(d, *ctx, beta);
            double lmp = log_model_prior(g, spec);

            for (long it = 1; it <= cfg.iterations; ++it) {
                for (int s = 1; s <= p; ++s) {
                    const int j = cfg.scan == Scan::systematic ? s : pick(rng);
                    const bool death = g.contains(j);
                    const ModelIndicator prop = flip(g, j);
                    ++c.proposals;

                    const auto ctxp = cache.get(prop);
                    if (!ctxp->ok) continue;  // reject

                    Eigen::VectorXd beta_p;
                    double log_alpha;
                    if (!death) {
                        const int pos = coefficient_position(prop, j);
                        const double mu = ctxp->mode[pos];
                        const double sd = ctxp->pilot_sd[pos];
                        const double u = mu + sd * standard_normal(rng);
                        beta_p = insert_coefficient(beta, pos, u);
                        const double llp = rj_loglik(d, *ctxp, beta_p);
                        const double lpp = rj_logprior(d, *ctxp, beta_p);
                        const double lmpp = log_model_prior(prop, spec);
                        log_alpha = (llp + lpp + lmpp) - (ll + lp + lmp) -
                                    normal_logpdf(u, mu, sd);
                        if (std::log(uniform01(rng)) < log_alpha) {
                            g = prop; ctx = ctxp; beta = std::move(beta_p);
                            ll = llp; lp = lpp; lmp = lmpp;
                            ++c.accepts;
                        }
                    } else {
                        const int pos = coefficient_position(g, j);
                        const double mu = ctx->mode[pos];
                        const double sd = ctx->pilot_sd[pos];
                        const double u = beta[pos];
                        beta_p = erase_coefficient(beta, pos);
                        const double llp = rj_loglik(d, *ctxp, beta_p);
                        const double lpp = rj_logprior(d, *ctxp, beta_p);
                        const double lmpp = log_model_prior(prop, spec);
                        log_alpha = (llp + lpp + lmpp) + normal_logpdf(u, mu, sd) -
                                    (ll + lp + lmp);
                        if (std::log(uniform01(rng)) < log_alpha) {
                            g = prop; ctx = ctxp; beta = std::move(beta_p);
                            ll = llp; lp = lpp; lmp = lmpp;
                            ++c.accepts;
                        }
                    }
                }

                const double scale = 2.38 / std::sqrt(static_cast<double>(ctx->dim));
                for (int r = 0; r < cfg.beta_refreshes; ++r) {
                    const Eigen::VectorXd z = standard_normal_vector(rng, ctx->dim);
                    const Eigen::VectorXd beta_p = beta + scale * (ctx->psi_chol * z);
                    const double llp = rj_loglik(d, *ctx, beta_p);
                    const double lpp = rj_logprior(d, *ctx, beta_p);
                    if (std::log(uniform01(rng)) < (llp + lpp) - (ll + lp)) {
                        beta = beta_p;
                        ll = llp;
                        lp = lpp;
                    }
                }

                if (it > cfg.burn_in) {
                    record_state(c, g);
                    if (cfg.track_beta_for && g == *cfg.track_beta_for)
                        c.tracked.push_back(beta);
                }
            }
        } catch (...) {
#pragma omp critical
            if (!error) error = std::current_exception();
        }
    }
    if (error) std::rethrow_exception(error);
    return assemble(d, cfg, std::move(chains));
}

ChainOutput run_sampler(const Dataset& d, const CostPriorSpec& spec, const SamplerConfig& cfg) {
    return cfg.method == SamplerMethod::rjmcmc ? run_rjmcmc(d, spec, cfg)
                                               : run_mc3(d, spec, cfg);
}

Eigen::VectorXd marginal_inclusion(const ChainOutput& co) {
    if (co.kept_total() <= 0 || co.marginal_estimates.size() != co.p)
        throw NumericError("marginal_inclusion: chain has no post-burn-in samples");
    return co.marginal_estimates;
}

std::vector<double> model_frequency_trace(const ChainOutput& co, const ModelIndicator& gamma) {
    std::vector<double> out;
    out.reserve(co.kept_total());
    long hits = 0, t = 0;
    for (const auto& seq : co.sequences) {
        for (std::uint32_t mi : seq) {
            ++t;
            if (co.models[mi] == gamma) ++hits;
            out.push_back(static_cast<double>(hits) / t);
        }
    }
    return out;
}

std::string visits_csv(const ChainOutput& co) {
    std::vector<std::size_t> order(co.models.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (co.visit_counts[a] != co.visit_counts[b])
            return co.visit_counts[a] > co.visit_counts[b];
        return notation(co.models[a]) < notation(co.models[b]);
    });
    const double kept = static_cast<double>(std::max<long>(1, co.kept_total()));
    std::ostringstream os;
    os << "model,count,frequency\n";
    for (std::size_t i : order) {
        os << notation(co.models[i]) << ',' << co.visit_counts[i] << ','
           << format_double(co.visit_counts[i] / kept) << '\n';
    }
    return os.str();
}

std::string marginals_csv(const ChainOutput& co, const std::vector<std::string>& names) {
    std::ostringstream os;
    os << "variable,estimate\n";
    for (int j = 0; j < co.p; ++j) {
        const std::string name =
            j < static_cast<int>(names.size()) ? names[j] : "X" + std::to_string(j + 1);
        const double est =
            co.marginal_estimates.size() == co.p ? co.marginal_estimates[j] : 0.0;
        os << name << ',' << format_double(est) << '\n';
    }
    return os.str();
}

std::string trace_csv(const ChainOutput& co, const std::vector<std::string>& names) {
    std::ostringstream os;
    os << "iteration";
    for (int j = 0; j < co.p; ++j) {
        os << ',' << (j < static_cast<int>(names.size()) ? names[j] : "X" + std::to_string(j + 1));
    }
    os << ",top_model_freq\n";
    for (std::size_t r = 0; r < co.trace.iteration.size(); ++r) {
        os << co.trace.iteration[r];
        for (int j = 0; j < co.p; ++j) os << ',' << format_double(co.trace.inclusion_means(r, j));
        os << ',' << format_double(co.trace.top_model_freq[r]) << '\n';
    }
    return os.str();
}

// ---------------------------------------------------------------- two-stage

namespace {

ModelIndicator expand_indicator(const ModelIndicator& reduced_gamma,
                                const std::vector<int>& reduced, int p_full) {
    ModelIndicator g(p_full);
    for (int j : reduced_gamma.included()) g.set(reduced[j - 1], true);
    return g;
}

}  // namespace

TwoStageResult two_stage_search(const Dataset& d, const CostPriorSpec& spec,
                                const SamplerConfig& cfg, double threshold) {
    if (!(threshold > 0.0) || !(threshold < 1.0))
        throw DataError("two_stage_search: threshold must be in (0,1)");

    TwoStageResult res;
    res.stage1 = run_sampler(d, spec, cfg);
    res.stage1_marginals = marginal_inclusion(res.stage1);
    for (int j = 1; j <= d.p; ++j)
        if (res.stage1_marginals[j - 1] >= threshold) res.reduced.push_back(j);

    const Method method = cfg.method == SamplerMethod::mc3_bic ? Method::bic : Method::laplace;

    if (res.reduced.empty()) {
        res.warnings.push_back(
            "no variable reached the marginal threshold; posterior is intercept-only");
        PosteriorTable t;
        t.method = method;
        const ModelScore s = score_model(ModelIndicator(d.p), d, spec, method);
        t.log_normalizer = -0.5 * s.score;
        t.rows.push_back({s.gamma, s.score, 1.0, s.excluded});
        res.stage2_table = std::move(t);
        return res;
    }

    const int pr = static_cast<int>(res.reduced.size());
    Eigen::MatrixXd preds(d.n, pr);
    Eigen::VectorXd costs(pr);
    std::vector<std::string> names(pr);
    for (int k = 0; k < pr; ++k) {
        preds.col(k) = d.X.col(res.reduced[k]);
        costs[k] = d.costs[res.reduced[k] - 1];
        names[k] = d.names[res.reduced[k] - 1];
    }
    const Dataset reduced_data = make_dataset(d.y, preds, std::move(names), costs);
    // keep the stage-1 baseline cost so stage-2 odds stay on the same scale
    const CostPriorSpec reduced_spec = CostPriorSpec::make(costs, spec.n, spec.mode, spec.c0);

    if (pr <= 20) {
        PosteriorTable t = enumerate_posterior(reduced_data, reduced_spec, method);
        for (auto& row : t.rows) row.gamma = expand_indicator(row.gamma, res.reduced, d.p);
        res.stage2_table = std::move(t);
    } else {
        ChainOutput co = run_sampler(reduced_data, reduced_spec, cfg);
        for (auto& m : co.models) m = expand_indicator(m, res.reduced, d.p);
        if (co.marginal_estimates.size() == pr) {
            Eigen::VectorXd full = Eigen::VectorXd::Zero(d.p);
            for (int k = 0; k < pr; ++k) full[res.reduced[k] - 1] = co.marginal_estimates[k];
            co.marginal_estimates = full;
        }
        if (co.trace.inclusion_means.cols() == pr) {
            Eigen::MatrixXd full =
                Eigen::MatrixXd::Zero(co.trace.inclusion_means.rows(), d.p);
            for (int k = 0; k < pr; ++k)
                full.col(res.reduced[k] - 1) = co.trace.inclusion_means.col(k);
            co.trace.inclusion_means = std::move(full);
        }
        co.trace.top_model = expand_indicator(co.trace.top_model, res.reduced, d.p);
        co.p = d.p;
        res.stage2_chain = std::move(co);
    }
    return res;
}

}  // namespace costbic
