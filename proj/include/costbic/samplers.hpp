#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "costbic/dataset.hpp"
#include "costbic/evidence.hpp"
#include "costbic/oracle.hpp"

namespace costbic {

enum class SamplerMethod { mc3_laplace, mc3_bic, rjmcmc };
enum class StartModel { null_model, full_model, given };
enum class Scan { systematic, random };

std::string sampler_method_name(SamplerMethod m);

struct SamplerConfig {
    SamplerMethod method = SamplerMethod::mc3_laplace;
    // MC3: one single-flip proposal per iteration. RJMCMC: one full sweep
    // over j = 1..p plus the within-model refresh per iteration.
    long iterations = 10000;
    long burn_in = 1000;
    std::uint64_t seed = 0;
    StartModel start = StartModel::null_model;
    ModelIndicator start_gamma;  // used when start == given
    Scan scan = Scan::systematic;
    int chains = 1;
    int beta_refreshes = 1;  // rjmcmc within-model random-walk updates per iteration
    // Optional: collect post-burn-in coefficient draws whenever the chain
    // sits in this model (rjmcmc only).
    std::optional<ModelIndicator> track_beta_for;
};

struct TraceTable {
    std::vector<long> iteration;          // pooled kept-iteration index (1-based)
    Eigen::MatrixXd inclusion_means;      // rows x p running means
    std::vector<double> top_model_freq;   // running frequency of the final top model
    ModelIndicator top_model;
};

// Pooled output of `chains` independent chains. Visit counts sum to
// chains * (iterations - burn_in).
struct ChainOutput {
    int p = 0;
    long iterations = 0;
    long burn_in = 0;
    int chains = 1;
    std::vector<std::uint64_t> chain_seeds;

    std::vector<ModelIndicator> models;          // distinct visited models
    std::vector<long> visit_counts;              // aligned with models
    std::vector<std::vector<std::uint32_t>> sequences;  // per chain, kept states as model index

    double acceptance_rate = 0.0;  // model-move acceptance over all chains
    Eigen::VectorXd marginal_estimates;          // length p
    TraceTable trace;

    std::vector<Eigen::VectorXd> tracked_betas;  // rjmcmc, when requested

    long kept_total() const { return static_cast<long>(chains) * (iterations - burn_in); }
};

// Metropolized single-flip chain over model space; acceptance probability
// min(1, PO) with the cost-adjusted Laplace or BIC odds.
ChainOutput run_mc3(const Dataset& d, const CostPriorSpec& spec, const SamplerConfig& cfg);

// Reversible-jump chain over (gamma, beta). Births draw the new coefficient
// from a Gaussian pilot centered at its posterior-mode value with variance
// from the matching diagonal of Psi; deaths drop it; within-model refreshes
// are random-walk Metropolis with proposal covariance (2.38^2/d) Psi.
ChainOutput run_rjmcmc(const Dataset& d, const CostPriorSpec& spec, const SamplerConfig& cfg);

ChainOutput run_sampler(const Dataset& d, const CostPriorSpec& spec, const SamplerConfig& cfg);

// Fraction of post-burn-in states including each variable.
Eigen::VectorXd marginal_inclusion(const ChainOutput& co);

// Running posterior-frequency trace of one model, recomputed from the pooled
// visit history.
std::vector<double> model_frequency_trace(const ChainOutput& co, const ModelIndicator& gamma);

std::string visits_csv(const ChainOutput& co);
std::string marginals_csv(const ChainOutput& co, const std::vector<std::string>& names);
std::string trace_csv(const ChainOutput& co, const std::vector<std::string>& names);

struct TwoStageResult {
    std::vector<int> reduced;            // 1-based variable indices, ascending
    Eigen::VectorXd stage1_marginals;    // length p
    ChainOutput stage1;
    // Stage 2 runs exact enumeration when the reduced space allows (p <= 20,
    // the preferred path), otherwise the same sampler restricted to the
    // reduced space. Models are reported in full-space indices either way.
    std::optional<PosteriorTable> stage2_table;
    std::optional<ChainOutput> stage2_chain;
    std::vector<std::string> warnings;
};

// Screen variables at `threshold` on stage-1 marginal inclusion estimates,
// then resolve the posterior on the reduced space.
TwoStageResult two_stage_search(const Dataset& d, const CostPriorSpec& spec,
                                const SamplerConfig& cfg, double threshold = 0.3);

}  // namespace costbic
