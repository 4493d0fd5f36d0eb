#include "costbic/dataset.hpp"

#include <Eigen/Cholesky>
#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <unordered_map>

#include "costbic/errors.hpp"
#include "costbic/rand.hpp"
#include "costbic/report.hpp"

namespace costbic {

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    std::istringstream is(line);
    while (std::getline(is, field, ',')) {
        // trim whitespace and a possible trailing CR
        const auto b = field.find_first_not_of(" \t\r");
        const auto e = field.find_last_not_of(" \t\r");
        fields.push_back(b == std::string::npos ? "" : field.substr(b, e - b + 1));
    }
    if (!line.empty() && line.back() == ',') fields.push_back("");
    return fields;
}

double parse_number(const std::string& s, const std::string& context) {
    if (s.empty()) throw DataError(context + ": missing value");
    std::size_t pos = 0;
    double v = 0.0;
    try {
        v = std::stod(s, &pos);
    } catch (const std::exception&) {
        throw DataError(context + ": non-numeric cell '" + s + "'");
    }
    if (pos != s.size()) throw DataError(context + ": non-numeric cell '" + s + "'");
    return v;
}

}  // namespace

Dataset make_dataset(const Eigen::VectorXd& y, const Eigen::MatrixXd& predictors,
                     std::vector<std::string> names, const Eigen::VectorXd& costs) {
    const int n = static_cast<int>(y.size());
    const int p = static_cast<int>(predictors.cols());
    if (predictors.rows() != n) throw DataError("predictor row count does not match response");
    if (static_cast<int>(names.size()) != p) throw DataError("name count does not match predictors");
    if (costs.size() != p) throw DataError("cost count does not match predictors");
    if (n < 2) throw DataError("need at least two observations");

    bool any0 = false, any1 = false;
    for (int i = 0; i < n; ++i) {
        const double v = y[i];
        if (v == 0.0)
            any0 = true;
        else if (v == 1.0)
            any1 = true;
        else
            throw DataError("non-binary response value " + std::to_string(v) + " at row " +
                            std::to_string(i + 1));
    }
    if (!any0 || !any1) throw DataError("constant response: need at least one 0 and one 1");

    if (!predictors.allFinite()) throw DataError("non-finite predictor entry");
    for (int j = 0; j < p; ++j) {
        const double c = costs[j];
        if (!(c > 0.0) || !std::isfinite(c))
            throw DataError("non-positive cost for variable '" + names[j] + "'");
    }

    Dataset d;
    d.n = n;
    d.p = p;
    d.y = y;
    d.X.resize(n, p + 1);
    d.X.col(0).setOnes();
    if (p > 0) d.X.rightCols(p) = predictors;
    d.names = std::move(names);
    d.costs = costs;
    d.XtX = d.X.transpose() * d.X;
    return d;
}

Dataset load_dataset(const std::string& data_path, const std::string& costs_path) {
    std::ifstream in(data_path);
    if (!in) throw DataError("cannot open data file: " + data_path);

    std::string line;
    if (!std::getline(in, line)) throw DataError("empty data file: " + data_path);
    const auto header = split_csv_line(line);
    if (header.size() < 1) throw DataError("data header has no columns");
    const int p = static_cast<int>(header.size()) - 1;
    std::vector<std::string> names(header.begin() + 1, header.end());
    for (int a = 0; a < p; ++a)
        for (int b = a + 1; b < p; ++b)
            if (names[a] == names[b])
                throw DataError("duplicate predictor name '" + names[a] + "' in header");

    std::vector<double> ybuf;
    std::vector<double> xbuf;  // row-major
    int row = 0;
    while (std::getline(in, line)) {
        if (line.empty() || line.find_first_not_of(" \t\r") == std::string::npos) continue;
        ++row;
        const auto fields = split_csv_line(line);
        if (static_cast<int>(fields.size()) != p + 1)
            throw DataError("data row " + std::to_string(row) + " has " +
                            std::to_string(fields.size()) + " fields, expected " +
                            std::to_string(p + 1));
        const std::string ctx = "data row " + std::to_string(row);
        ybuf.push_back(parse_number(fields[0], ctx));
        for (int j = 0; j < p; ++j) xbuf.push_back(parse_number(fields[j + 1], ctx));
    }
    const int n = static_cast<int>(ybuf.size());
    if (n == 0) throw DataError("data file has no rows: " + data_path);

    Eigen::VectorXd y = Eigen::Map<Eigen::VectorXd>(ybuf.data(), n);
    Eigen::MatrixXd preds(n, p);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < p; ++j) preds(i, j) = xbuf[static_cast<std::size_t>(i) * p + j];

    // costs file: name,cost rows; a header line is tolerated
    std::ifstream cin_(costs_path);
    if (!cin_) throw DataError("cannot open costs file: " + costs_path);
    std::unordered_map<std::string, double> cost_map;
    int cost_row = 0;
    while (std::getline(cin_, line)) {
        if (line.empty() || line.find_first_not_of(" \t\r") == std::string::npos) continue;
        ++cost_row;
        const auto fields = split_csv_line(line);
        if (fields.size() != 2)
            throw DataError("costs row " + std::to_string(cost_row) + ": expected name,cost");
        double c = 0.0;
        try {
            c = parse_number(fields[1], "costs row " + std::to_string(cost_row));
        } catch (const DataError&) {
            if (cost_row == 1) continue;  // header line
            throw;
        }
        if (cost_map.count(fields[0]))
            throw DataError("duplicate cost entry for variable '" + fields[0] + "'");
        cost_map.emplace(fields[0], c);
    }

    Eigen::VectorXd costs(p);
    for (int j = 0; j < p; ++j) {
        const auto it = cost_map.find(names[j]);
        if (it == cost_map.end())
            throw DataError("missing cost entry for variable '" + names[j] + "'");
        costs[j] = it->second;
        cost_map.erase(it);
    }
    if (!cost_map.empty())
        throw DataError("extra cost entry for unknown variable '" + cost_map.begin()->first + "'");

    return make_dataset(y, preds, std::move(names), costs);
}

void save_dataset(const Dataset& d, const std::string& data_path,
                  const std::string& costs_path) {
    std::ostringstream data;
    data << "y";
    for (const auto& name : d.names) data << ',' << name;
    data << '\n';
    for (int i = 0; i < d.n; ++i) {
        data << format_double(d.y[i]);
        for (int j = 1; j <= d.p; ++j) data << ',' << format_double(d.X(i, j));
        data << '\n';
    }
    write_file(data_path, data.str());

    std::ostringstream costs;
    costs << "name,cost\n";
    for (int j = 0; j < d.p; ++j)
        costs << d.names[j] << ',' << format_double(d.costs[j]) << '\n';
    write_file(costs_path, costs.str());
}

Dataset standardized(const Dataset& d) {
    Eigen::MatrixXd preds = d.X.rightCols(d.p);
    for (int j = 0; j < d.p; ++j) {
        const double mean = preds.col(j).mean();
        preds.col(j).array() -= mean;
        const double sd = std::sqrt(preds.col(j).squaredNorm() / (d.n - 1));
        if (sd > 0.0) preds.col(j) /= sd;
    }
    return make_dataset(d.y, preds, d.names, d.costs);
}

Eigen::MatrixXd equicorrelation(int p, double rho) {
    Eigen::MatrixXd r = Eigen::MatrixXd::Constant(p, p, rho);
    r.diagonal().setOnes();
    return r;
}

Eigen::MatrixXd ar1_correlation(int p, double rho) {
    Eigen::MatrixXd r(p, p);
    for (int i = 0; i < p; ++i)
        for (int j = 0; j < p; ++j) r(i, j) = std::pow(rho, std::abs(i - j));
    return r;
}

Dataset synthesize(const SyntheticSpec& spec) {
    if (spec.n < 2 || spec.p < 0) throw DataError("synthetic spec: need n >= 2, p >= 0");
    if (spec.beta_true.size() != spec.p + 1)
        throw DataError("synthetic spec: beta_true must have length p+1");
    if (spec.correlation.rows() != spec.p || spec.correlation.cols() != spec.p)
        throw DataError("synthetic spec: correlation must be p x p");
    if (spec.costs.size() != spec.p) throw DataError("synthetic spec: costs must have length p");

    Eigen::LLT<Eigen::MatrixXd> llt(spec.correlation);
    if (spec.p > 0 && llt.info() != Eigen::Success)
        throw DataError("synthetic spec: correlation matrix not positive definite");

    std::vector<std::string> names = spec.names;
    if (names.empty()) {
        for (int j = 1; j <= spec.p; ++j) names.push_back("X" + std::to_string(j));
    }
    if (static_cast<int>(names.size()) != spec.p)
        throw DataError("synthetic spec: name count must equal p");

    Rng rng(spec.seed);
    Eigen::MatrixXd z(spec.n, spec.p);
    for (int i = 0; i < spec.n; ++i)
        for (int j = 0; j < spec.p; ++j) z(i, j) = standard_normal(rng);
    Eigen::MatrixXd preds =
        spec.p > 0 ? Eigen::MatrixXd(z * llt.matrixL().transpose()) : Eigen::MatrixXd(spec.n, 0);

    Eigen::VectorXd y(spec.n);
    int tries = 0;
    for (;;) {
        for (int i = 0; i < spec.n; ++i) {
            double eta = spec.beta_true[0];
            for (int j = 0; j < spec.p; ++j) eta += preds(i, j) * spec.beta_true[j + 1];
            const double pr = 1.0 / (1.0 + std::exp(-eta));
            y[i] = uniform01(rng) < pr ? 1.0 : 0.0;
        }
        const double s = y.sum();
        if (s > 0.0 && s < spec.n) break;  // both classes present
        if (++tries > 100) throw DataError("synthetic spec: response degenerate under beta_true");
    }

    return make_dataset(y, preds, std::move(names), spec.costs);
}

}  // namespace costbic
