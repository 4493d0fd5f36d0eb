#include <CLI11.hpp>
#include <iostream>
#include <map>

#include "costbic/commands.hpp"
#include "costbic/errors.hpp"

namespace {

using namespace costbic;

void add_common(CLI::App* cmd, CommonOptions& opts, bool data_required = true) {
    auto* data = cmd->add_option("--data", opts.data_path, "data CSV (header, response first)");
    auto* costs = cmd->add_option("--costs", opts.costs_path, "costs CSV (name,cost)");
    if (data_required) {
        data->required();
        costs->required();
    }
    cmd->add_option("--mode", opts.mode, "benefit-only | cost-benefit")
        ->transform(CLI::CheckedTransformer(
            std::map<std::string, PriorMode>{{"benefit-only", PriorMode::benefit_only},
                                             {"cost-benefit", PriorMode::cost_benefit}}));
    cmd->add_option("--method", opts.method, "laplace | bic")
        ->transform(CLI::CheckedTransformer(std::map<std::string, Method>{
            {"laplace", Method::laplace}, {"bic", Method::bic}}));
    cmd->add_flag("--standardize", opts.standardize, "center/scale predictors");
    cmd->add_option("--top-k", opts.top_k, "models in the report table");
    cmd->add_option("--format", opts.format, "json | csv")
        ->check(CLI::IsMember({"json", "csv"}));
    cmd->add_option("--out", opts.out, "report path (extras written alongside)");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Cost-aware Bayesian variable selection for logistic regression"};
    app.require_subcommand(1);

    EnumerateOptions enum_opts;
    auto* enumerate = app.add_subcommand("enumerate", "exact posterior over all 2^p models");
    add_common(enumerate, enum_opts);

    SearchOptions search_opts;
    auto* search = app.add_subcommand("search", "two-stage MCMC model search");
    add_common(search, search_opts);
    search->add_option("--sampler", search_opts.sampler, "mc3 | rjmcmc")
        ->check(CLI::IsMember({"mc3", "rjmcmc"}));
    search->add_option("--iters", search_opts.iters, "iterations (default per sampler)");
    search->add_option("--burnin", search_opts.burnin, "burn-in (default per sampler)");
    search->add_option("--chains", search_opts.chains, "independent chains");
    search->add_option("--seed", search_opts.seed, "master seed");
    search->add_option("--threshold", search_opts.threshold, "stage-1 marginal threshold");
    search->add_option("--start", search_opts.start, "null | full")
        ->transform(CLI::CheckedTransformer(std::map<std::string, StartModel>{
            {"null", StartModel::null_model}, {"full", StartModel::full_model}}));
    search->add_flag("!--no-diagnostics", search_opts.run_diagnostics,
                     "skip deviance/LS_CV for the top model");
    search->add_option("--diag-draws", search_opts.diag_draws, "within-model draws");

    ScoreOptions score_opts;
    auto* score = app.add_subcommand("score", "diagnostics for one model");
    add_common(score, score_opts);
    score->add_option("--model", score_opts.model, "model notation, e.g. X1+X3")->required();
    score->add_option("--seed", score_opts.seed, "seed for within-model sampling");
    score->add_option("--draws", score_opts.draws, "within-model draws");
    score->add_flag("!--no-cv-exact", score_opts.cv_exact, "skip the leave-one-out path");
    score->add_flag("!--no-cv-mcmc", score_opts.cv_mcmc, "skip the single-run estimator");

    SimulateOptions sim_opts;
    std::string sim_spec_file, sim_beta, sim_costs;
    auto* simulate = app.add_subcommand("simulate", "write a synthetic dataset + costs pair");
    simulate->add_option("--spec", sim_spec_file, "key=value spec file");
    auto* sim_n = simulate->add_option("--n", sim_opts.n, "observations");
    auto* sim_p = simulate->add_option("--p", sim_opts.p, "predictors");
    simulate->add_option("--beta", sim_beta, "p+1 comma-separated coefficients");
    auto* sim_corr = simulate->add_option("--corr", sim_opts.corr, "none | equi | ar1")
                         ->check(CLI::IsMember({"none", "equi", "ar1"}));
    auto* sim_rho = simulate->add_option("--rho", sim_opts.rho, "correlation parameter");
    simulate->add_option("--costs", sim_costs, "p comma-separated costs");
    auto* sim_seed = simulate->add_option("--seed", sim_opts.seed, "generator seed");
    simulate->add_option("--out", sim_opts.out, "output prefix");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help
        app.exit(e);
        return 1;
    }

    try {
        if (*enumerate) {
            std::string rendered = emit_result(cmd_enumerate(enum_opts), enum_opts.format,
                                               enum_opts.out);
            if (enum_opts.out.empty()) std::cout << rendered;
        } else if (*search) {
            std::string rendered = emit_result(cmd_search(search_opts), search_opts.format,
                                               search_opts.out);
            if (search_opts.out.empty()) std::cout << rendered;
        } else if (*score) {
            std::string rendered = emit_result(cmd_score(score_opts), score_opts.format,
                                               score_opts.out);
            if (score_opts.out.empty()) std::cout << rendered;
        } else if (*simulate) {
            SimulateOptions resolved = sim_opts;
            if (!sim_spec_file.empty()) {
                resolved = apply_spec_file(resolved, sim_spec_file);
                // explicit flags win over the spec file
                if (sim_n->count()) resolved.n = sim_opts.n;
                if (sim_p->count()) resolved.p = sim_opts.p;
                if (sim_corr->count()) resolved.corr = sim_opts.corr;
                if (sim_rho->count()) resolved.rho = sim_opts.rho;
                if (sim_seed->count()) resolved.seed = sim_opts.seed;
            }
            if (!sim_beta.empty()) {
                resolved.beta.clear();
                std::istringstream is(sim_beta);
                std::string tok;
                while (std::getline(is, tok, ',')) resolved.beta.push_back(std::stod(tok));
            }
            if (!sim_costs.empty()) {
                resolved.costs.clear();
                std::istringstream is(sim_costs);
                std::string tok;
                while (std::getline(is, tok, ',')) resolved.costs.push_back(std::stod(tok));
            }
            cmd_simulate(resolved);
            std::cout << resolved.out << "_data.csv\n" << resolved.out << "_costs.csv\n";
        }
    } catch (const DataError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const NumericError& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
    return 0;
}
