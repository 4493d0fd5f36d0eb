#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <string>
#include <vector>

namespace costbic {

// Binary-outcome regression data with per-variable collection costs.
// Immutable after construction; safe to share read-only across chains.
struct Dataset {
    int n = 0;                       // observations
    int p = 0;                       // candidate predictors
    Eigen::VectorXd y;               // length n, entries in {0,1}
    Eigen::MatrixXd X;               // n x (p+1), column 0 identically 1
    std::vector<std::string> names;  // p labels
    Eigen::VectorXd costs;           // length p, positive minutes per observation
    Eigen::MatrixXd XtX;             // (p+1) x (p+1), precomputed X^T X
};

// Validates invariants (binary non-constant response, finite entries,
// positive costs) and prepends the intercept column.
Dataset make_dataset(const Eigen::VectorXd& y, const Eigen::MatrixXd& predictors,
                     std::vector<std::string> names, const Eigen::VectorXd& costs);

// Data CSV: header row, response first, predictors after. Costs CSV:
// name,cost rows covering every predictor exactly once (header optional).
Dataset load_dataset(const std::string& data_path, const std::string& costs_path);
void save_dataset(const Dataset& d, const std::string& data_path,
                  const std::string& costs_path);

// Centers and scales predictor columns to unit sample variance
// (intercept untouched). Off by default everywhere.
Dataset standardized(const Dataset& d);

struct SyntheticSpec {
    int n = 0;
    int p = 0;
    Eigen::VectorXd beta_true;       // length p+1, intercept first
    Eigen::MatrixXd correlation;     // p x p, positive definite
    Eigen::VectorXd costs;           // length p
    std::uint64_t seed = 0;
    std::vector<std::string> names;  // optional; default X1..Xp
};

Eigen::MatrixXd equicorrelation(int p, double rho);
Eigen::MatrixXd ar1_correlation(int p, double rho);

// Gaussian predictors with the requested correlation, Bernoulli outcomes
// with success probability logistic(X beta_true). Deterministic per seed.
Dataset synthesize(const SyntheticSpec& spec);

}  // namespace costbic
