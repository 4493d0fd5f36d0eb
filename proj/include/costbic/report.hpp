#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace costbic {

// Run report with the three table layouts the CLI emits: top models,
// marginal inclusion probabilities, and per-model fit diagnostics.
// The config echo holds every input needed to reproduce the run.
struct RunReport {
    std::vector<std::pair<std::string, std::string>> config;  // ordered key/value echo

    struct ModelRow {
        std::string model;
        int dimension = 0;
        double cost = 0.0;
        double score = 0.0;
        double prob = 0.0;
        double po_vs_best = 1.0;  // PO_{1k}
    };
    std::vector<ModelRow> top_models;

    struct MarginalRow {
        int index = 0;  // 1-based variable index
        std::string name;
        double cost = 0.0;
        double estimate = 0.0;
    };
    std::vector<MarginalRow> marginals;

    struct DiagnosticsRow {
        std::string model;
        int dimension = 0;
        double cost = 0.0;
        double min_deviance = 0.0;
        double median_deviance = 0.0;
        std::optional<double> ls_cv_exact;
        std::optional<double> ls_cv_mcmc;
    };
    std::vector<DiagnosticsRow> diagnostics;

    std::vector<std::string> warnings;
};

// Doubles rendered at 17 significant digits in both encodings so reports
// diff and round-trip exactly.
std::string format_double(double x);

std::string report_json(const RunReport& r);
std::string report_csv(const RunReport& r);

void write_file(const std::string& path, const std::string& content);

}  // namespace costbic
