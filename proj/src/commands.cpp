#include "costbic/commands.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "costbic/errors.hpp"
#include "costbic/rand.hpp"

namespace costbic {

namespace {

std::string mode_name(PriorMode m) {
    return m == PriorMode::cost_benefit ? "cost-benefit" : "benefit-only";
}

struct LoadedProblem {
    Dataset data;
    CostPriorSpec prior;
};

LoadedProblem load_problem(const CommonOptions& opts) {
    Dataset d = load_dataset(opts.data_path, opts.costs_path);
    if (opts.standardize) d = standardized(d);
    CostPriorSpec prior = CostPriorSpec::make(d.costs, d.n, opts.mode);
    return {std::move(d), std::move(prior)};
}

void echo_common(RunReport& r, const std::string& command, const CommonOptions& opts) {
    r.config.emplace_back("version", kVersion);
    r.config.emplace_back("command", command);
    r.config.emplace_back("data", opts.data_path);
    r.config.emplace_back("costs", opts.costs_path);
    r.config.emplace_back("mode", mode_name(opts.mode));
    r.config.emplace_back("method", method_name(opts.method));
    r.config.emplace_back("standardize", opts.standardize ? "true" : "false");
    r.config.emplace_back("top_k", std::to_string(opts.top_k));
    r.config.emplace_back("format", opts.format);
}

void fill_top_models(RunReport& r, const PosteriorTable& t, const Dataset& d, int top_k) {
    const double best_score = t.best().score;
    int k = 0;
    for (const auto& row : t.rows) {
        if (row.excluded || k >= top_k) break;
        RunReport::ModelRow m;
        m.model = notation(row.gamma);
        m.dimension = dimension(row.gamma);
        m.cost = total_cost(row.gamma, d.costs);
        m.score = row.score;
        m.prob = row.prob;
        m.po_vs_best = std::exp(0.5 * (row.score - best_score));
        r.top_models.push_back(std::move(m));
        ++k;
    }
}

RunReport::DiagnosticsRow diagnostics_row(const ModelIndicator& gamma, const Dataset& d,
                                          long draws, std::uint64_t seed, bool cv_exact,
                                          bool cv_mcmc, std::vector<std::string>& warnings) {
    RunReport::DiagnosticsRow row;
    row.model = notation(gamma);
    row.dimension = dimension(gamma);
    row.cost = total_cost(gamma, d.costs);

    WithinModelOptions w;
    w.draws = draws;
    w.seed = derive_seed(seed, 9001);
    const DevianceSummary dev = posterior_deviance(gamma, d, w);
    row.min_deviance = dev.min;
    row.median_deviance = dev.median;

    if (cv_exact && d.n <= 500) {
        row.ls_cv_exact = cv_log_score_exact(gamma, d);
    }
    if (cv_mcmc) {
        WithinModelOptions wm;
        wm.draws = draws;
        wm.seed = derive_seed(seed, 9002);
        const CvMcmcResult cv = cv_log_score_mcmc(gamma, d, wm);
        row.ls_cv_mcmc = cv.estimate;
        if (cv.floored_terms > 0)
            warnings.push_back("LS_CV draws floored " + std::to_string(cv.floored_terms) +
                               " predictive densities for " + notation(gamma));
        if (cv.unreliable)
            warnings.push_back("LS_CV estimate unreliable for " + notation(gamma) +
                               ": some observation had every draw floored");
    }
    return row;
}

}  // namespace

CommandResult cmd_enumerate(const EnumerateOptions& opts) {
    const auto problem = load_problem(opts);
    const PosteriorTable t = enumerate_posterior(problem.data, problem.prior, opts.method);

    CommandResult res;
    echo_common(res.report, "enumerate", opts);
    fill_top_models(res.report, t, problem.data, opts.top_k);

    const Eigen::VectorXd marg = marginal_inclusion_from_table(t, problem.data.p);
    for (int j = 1; j <= problem.data.p; ++j) {
        res.report.marginals.push_back(
            {j, problem.data.names[j - 1], problem.data.costs[j - 1], marg[j - 1]});
    }
    res.report.warnings = t.warnings;
    res.extra_files.emplace_back("posterior.csv", posterior_table_csv(t, problem.data));
    return res;
}

CommandResult cmd_search(const SearchOptions& opts) {
    const auto problem = load_problem(opts);

    SamplerConfig cfg;
    if (opts.sampler == "rjmcmc") {
        cfg.method = SamplerMethod::rjmcmc;
        cfg.iterations = opts.iters.value_or(100000);
        cfg.burn_in = opts.burnin.value_or(10000);
    } else if (opts.sampler == "mc3") {
        cfg.method = opts.method == Method::bic ? SamplerMethod::mc3_bic
                                                : SamplerMethod::mc3_laplace;
        cfg.iterations = opts.iters.value_or(10000);
        cfg.burn_in = opts.burnin.value_or(1000);
    } else {
        throw DataError("unknown sampler '" + opts.sampler + "' (expected mc3 or rjmcmc)");
    }
    cfg.seed = opts.seed;
    cfg.chains = opts.chains;
    cfg.start = opts.start;

    const TwoStageResult ts = two_stage_search(problem.data, problem.prior, cfg, opts.threshold);

    CommandResult res;
    echo_common(res.report, "search", opts);
    res.report.config.emplace_back("sampler", opts.sampler);
    res.report.config.emplace_back("iters", std::to_string(cfg.iterations));
    res.report.config.emplace_back("burnin", std::to_string(cfg.burn_in));
    res.report.config.emplace_back("chains", std::to_string(cfg.chains));
    res.report.config.emplace_back("seed", std::to_string(cfg.seed));
    res.report.config.emplace_back("threshold", format_double(opts.threshold));
    res.report.config.emplace_back("start",
                                   cfg.start == StartModel::full_model ? "full" : "null");
    res.report.config.emplace_back("diagnostics", opts.run_diagnostics ? "true" : "false");
    res.report.config.emplace_back("diag_draws", std::to_string(opts.diag_draws));
    res.report.warnings = ts.warnings;

    // marginal table: stage-1 screening estimates for the surviving variables
    for (int j : ts.reduced) {
        res.report.marginals.push_back({j, problem.data.names[j - 1],
                                        problem.data.costs[j - 1],
                                        ts.stage1_marginals[j - 1]});
    }

    ModelIndicator best(problem.data.p);
    bool have_best = false;
    if (ts.stage2_table) {
        fill_top_models(res.report, *ts.stage2_table, problem.data, opts.top_k);
        for (const auto& w : ts.stage2_table->warnings) res.report.warnings.push_back(w);
        if (!ts.stage2_table->rows.empty() && !ts.stage2_table->rows.front().excluded) {
            best = ts.stage2_table->best().gamma;
            have_best = true;
        }
    } else if (ts.stage2_chain) {
        const ChainOutput& co = *ts.stage2_chain;
        std::vector<std::size_t> order(co.models.size());
        for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
        std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            if (co.visit_counts[a] != co.visit_counts[b])
                return co.visit_counts[a] > co.visit_counts[b];
            return notation(co.models[a]) < notation(co.models[b]);
        });
        const double kept = static_cast<double>(co.kept_total());
        const Method method =
            cfg.method == SamplerMethod::mc3_bic ? Method::bic : Method::laplace;
        for (std::size_t k = 0; k < order.size() && k < static_cast<std::size_t>(opts.top_k);
             ++k) {
            const auto& g = co.models[order[k]];
            const ModelScore s = score_model(g, problem.data, problem.prior, method);
            RunReport::ModelRow m;
            m.model = notation(g);
            m.dimension = dimension(g);
            m.cost = total_cost(g, problem.data.costs);
            m.score = s.excluded ? std::numeric_limits<double>::quiet_NaN() : s.score;
            m.prob = co.visit_counts[order[k]] / kept;
            m.po_vs_best = res.report.top_models.empty()
                               ? 1.0
                               : res.report.top_models.front().prob / m.prob;
            res.report.top_models.push_back(std::move(m));
        }
        if (!co.models.empty()) {
            best = co.models[order[0]];
            have_best = true;
        }
    }

    if (opts.run_diagnostics && have_best) {
        res.report.diagnostics.push_back(diagnostics_row(best, problem.data, opts.diag_draws,
                                                         opts.seed, problem.data.n <= 500, true,
                                                         res.report.warnings));
    }

    res.extra_files.emplace_back("visits.csv", visits_csv(ts.stage1));
    res.extra_files.emplace_back("marginals.csv", marginals_csv(ts.stage1, problem.data.names));
    res.extra_files.emplace_back("trace.csv", trace_csv(ts.stage1, problem.data.names));
    return res;
}

CommandResult cmd_score(const ScoreOptions& opts) {
    const auto problem = load_problem(opts);
    const ModelIndicator gamma = parse_notation(problem.data.p, opts.model, problem.data.names);

    const ModelScore s = score_model(gamma, problem.data, problem.prior, opts.method);
    if (s.excluded) throw NumericError("model " + notation(gamma) + " unscorable: " +
                                       s.exclusion_reason);

    CommandResult res;
    echo_common(res.report, "score", opts);
    res.report.config.emplace_back("model", opts.model);
    res.report.config.emplace_back("seed", std::to_string(opts.seed));
    res.report.config.emplace_back("draws", std::to_string(opts.draws));

    RunReport::ModelRow m;
    m.model = notation(gamma);
    m.dimension = s.dimension;
    m.cost = s.cost;
    m.score = s.score;
    m.prob = std::numeric_limits<double>::quiet_NaN();  // single model: no normalization
    m.po_vs_best = 1.0;
    res.report.top_models.push_back(std::move(m));

    res.report.diagnostics.push_back(diagnostics_row(gamma, problem.data, opts.draws, opts.seed,
                                                     opts.cv_exact && problem.data.n <= 500,
                                                     opts.cv_mcmc, res.report.warnings));
    return res;
}

namespace {

std::vector<double> parse_double_list(const std::string& text) {
    std::vector<double> out;
    std::string tok;
    std::istringstream is(text);
    while (std::getline(is, tok, ',')) {
        if (tok.empty()) continue;
        out.push_back(std::stod(tok));
    }
    return out;
}

}  // namespace

void cmd_simulate(const SimulateOptions& opts) {
    SyntheticSpec spec;
    spec.n = opts.n;
    spec.p = opts.p;
    spec.seed = opts.seed;

    spec.beta_true = Eigen::VectorXd::Zero(opts.p + 1);
    if (!opts.beta.empty()) {
        if (static_cast<int>(opts.beta.size()) != opts.p + 1)
            throw DataError("simulate: beta must list p+1 values (intercept first)");
        for (int k = 0; k <= opts.p; ++k) spec.beta_true[k] = opts.beta[k];
    }

    if (opts.corr == "none") {
        spec.correlation = Eigen::MatrixXd::Identity(opts.p, opts.p);
    } else if (opts.corr == "equi") {
        spec.correlation = equicorrelation(opts.p, opts.rho);
    } else if (opts.corr == "ar1") {
        spec.correlation = ar1_correlation(opts.p, opts.rho);
    } else {
        throw DataError("simulate: unknown correlation kind '" + opts.corr + "'");
    }

    spec.costs = Eigen::VectorXd::Constant(opts.p, 0.5);
    if (!opts.costs.empty()) {
        if (static_cast<int>(opts.costs.size()) != opts.p)
            throw DataError("simulate: costs must list p values");
        for (int k = 0; k < opts.p; ++k) spec.costs[k] = opts.costs[k];
    }

    const Dataset d = synthesize(spec);
    save_dataset(d, opts.out + "_data.csv", opts.out + "_costs.csv");
}

SimulateOptions apply_spec_file(SimulateOptions opts, const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open spec file: " + path);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto body_end = line.find('#');
        std::string body = line.substr(0, body_end);
        const auto eq = body.find('=');
        if (body.find_first_not_of(" \t\r") == std::string::npos) continue;
        if (eq == std::string::npos)
            throw DataError("spec file line " + std::to_string(lineno) + ": expected key=value");
        auto trim = [](std::string s) {
            const auto b = s.find_first_not_of(" \t\r");
            const auto e = s.find_last_not_of(" \t\r");
            return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
        };
        const std::string key = trim(body.substr(0, eq));
        const std::string value = trim(body.substr(eq + 1));
        if (key == "n") opts.n = std::stoi(value);
        else if (key == "p") opts.p = std::stoi(value);
        else if (key == "beta") opts.beta = parse_double_list(value);
        else if (key == "corr") opts.corr = value;
        else if (key == "rho") opts.rho = std::stod(value);
        else if (key == "costs") opts.costs = parse_double_list(value);
        else if (key == "seed") opts.seed = std::stoull(value);
        else throw DataError("spec file: unknown key '" + key + "'");
    }
    return opts;
}

std::string emit_result(const CommandResult& result, const std::string& format,
                        const std::string& out) {
    std::string rendered;
    if (format == "json") {
        rendered = report_json(result.report);
    } else if (format == "csv") {
        rendered = report_csv(result.report);
    } else {
        throw DataError("unknown format '" + format + "' (expected json or csv)");
    }
    if (!out.empty()) {
        write_file(out, rendered);
        const auto dot = out.rfind('.');
        const std::string base = dot == std::string::npos ? out : out.substr(0, dot);
        for (const auto& [suffix, content] : result.extra_files)
            write_file(base + "_" + suffix, content);
    }
    return rendered;
}

}  // namespace costbic
