#include "costbic/report.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "costbic/errors.hpp"

namespace costbic {

std::string format_double(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

namespace {

// non-finite values render as JSON null / empty CSV field
std::string json_number(double x) {
    return std::isfinite(x) ? format_double(x) : std::string("null");
}

std::string csv_number(double x) {
    return std::isfinite(x) ? format_double(x) : std::string();
}

std::string json_string(const std::string& s) {
    std::string out = "\"";
    for (char c : s) {
        switch (c) {
            case '"': out += "\\\""; break;
            case '\\': out += "\\\\"; break;
            case '\n': out += "\\n"; break;
            case '\t': out += "\\t"; break;
            case '\r': out += "\\r"; break;
            default: out += c;
        }
    }
    out += '"';
    return out;
}

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += "\"\"";
        else out += c;
    }
    out += '"';
    return out;
}

std::string opt_json(const std::optional<double>& v) {
    return v ? json_number(*v) : std::string("null");
}

std::string opt_csv(const std::optional<double>& v) {
    return v ? csv_number(*v) : std::string();
}

}  // namespace

std::string report_json(const RunReport& r) {
    std::ostringstream os;
    os << "{\n  \"config\": {";
    for (std::size_t i = 0; i < r.config.size(); ++i) {
        os << (i ? ",\n    " : "\n    ") << json_string(r.config[i].first) << ": "
           << json_string(r.config[i].second);
    }
    os << "\n  },\n  \"top_models\": [";
    for (std::size_t i = 0; i < r.top_models.size(); ++i) {
        const auto& m = r.top_models[i];
        os << (i ? ",\n    " : "\n    ") << "{\"model\": " << json_string(m.model)
           << ", \"dimension\": " << m.dimension << ", \"cost\": " << json_number(m.cost)
           << ", \"score\": " << json_number(m.score) << ", \"prob\": " << json_number(m.prob)
           << ", \"po_vs_best\": " << json_number(m.po_vs_best) << "}";
    }
    os << (r.top_models.empty() ? "]" : "\n  ]") << ",\n  \"marginals\": [";
    for (std::size_t i = 0; i < r.marginals.size(); ++i) {
        const auto& m = r.marginals[i];
        os << (i ? ",\n    " : "\n    ") << "{\"index\": " << m.index
           << ", \"name\": " << json_string(m.name) << ", \"cost\": " << json_number(m.cost)
           << ", \"estimate\": " << json_number(m.estimate) << "}";
    }
    os << (r.marginals.empty() ? "]" : "\n  ]") << ",\n  \"diagnostics\": [";
    for (std::size_t i = 0; i < r.diagnostics.size(); ++i) {
        const auto& m = r.diagnostics[i];
        os << (i ? ",\n    " : "\n    ") << "{\"model\": " << json_string(m.model)
           << ", \"dimension\": " << m.dimension << ", \"cost\": " << json_number(m.cost)
           << ", \"min_deviance\": " << json_number(m.min_deviance)
           << ", \"median_deviance\": " << json_number(m.median_deviance)
           << ", \"ls_cv_exact\": " << opt_json(m.ls_cv_exact)
           << ", \"ls_cv_mcmc\": " << opt_json(m.ls_cv_mcmc) << "}";
    }
    os << (r.diagnostics.empty() ? "]" : "\n  ]") << ",\n  \"warnings\": [";
    for (std::size_t i = 0; i < r.warnings.size(); ++i) {
        os << (i ? ", " : "") << json_string(r.warnings[i]);
    }
    os << "]\n}\n";
    return os.str();
}

std::string report_csv(const RunReport& r) {
    std::ostringstream os;
    os << "# config\nkey,value\n";
    for (const auto& [k, v] : r.config) os << csv_field(k) << ',' << csv_field(v) << '\n';
    os << "# models\nmodel,dimension,cost,score,prob,po_vs_best\n";
    for (const auto& m : r.top_models) {
        os << csv_field(m.model) << ',' << m.dimension << ',' << csv_number(m.cost) << ','
           << csv_number(m.score) << ',' << csv_number(m.prob) << ','
           << csv_number(m.po_vs_best) << '\n';
    }
    os << "# marginals\nindex,name,cost,estimate\n";
    for (const auto& m : r.marginals) {
        os << m.index << ',' << csv_field(m.name) << ',' << csv_number(m.cost) << ','
           << csv_number(m.estimate) << '\n';
    }
    os << "# diagnostics\nmodel,dimension,cost,min_deviance,median_deviance,ls_cv_exact,ls_cv_mcmc\n";
    for (const auto& m : r.diagnostics) {
        os << csv_field(m.model) << ',' << m.dimension << ',' << csv_number(m.cost) << ','
           << csv_number(m.min_deviance) << ',' << csv_number(m.median_deviance) << ','
           << opt_csv(m.ls_cv_exact) << ',' << opt_csv(m.ls_cv_mcmc) << '\n';
    }
    os << "# warnings\nwarning\n";
    for (const auto& w : r.warnings) os << csv_field(w) << '\n';
    return os.str();
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write file: " + path);
    out << content;
    if (!out) throw DataError("failed writing file: " + path);
}

}  // namespace costbic
