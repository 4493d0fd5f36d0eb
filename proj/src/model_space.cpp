#include "costbic/model_space.hpp"

#include <algorithm>
#include <bit>
#include <sstream>

#include "costbic/errors.hpp"

namespace costbic {

ModelIndicator::ModelIndicator(int p) : p_(p), words_((p + 63) / 64, 0) {
    if (p < 0) throw DataError("model indicator: negative p");
}

ModelIndicator ModelIndicator::from_indices(int p, std::initializer_list<int> indices) {
    return from_indices(p, std::vector<int>(indices));
}

ModelIndicator ModelIndicator::from_indices(int p, const std::vector<int>& indices) {
    ModelIndicator g(p);
    for (int j : indices) g.set(j, true);
    return g;
}

ModelIndicator ModelIndicator::from_encoding(int p, std::uint64_t m) {
    if (p > 63) throw DataError("model encoding limited to p <= 63");
    if (p < 64 && m >> p) throw DataError("model encoding out of range");
    ModelIndicator g(p);
    if (!g.words_.empty()) g.words_[0] = m;
    return g;
}

void ModelIndicator::check_index(int j) const {
    if (j < 1 || j > p_) {
        throw DataError("variable index " + std::to_string(j) + " out of range 1.." +
                        std::to_string(p_));
    }
}

bool ModelIndicator::contains(int j) const {
    check_index(j);
    const int b = j - 1;
    return (words_[b / 64] >> (b % 64)) & 1ULL;
}

void ModelIndicator::set(int j, bool included) {
    check_index(j);
    const int b = j - 1;
    const std::uint64_t mask = 1ULL << (b % 64);
    if (included)
        words_[b / 64] |= mask;
    else
        words_[b / 64] &= ~mask;
}

int ModelIndicator::n_included() const {
    int c = 0;
    for (auto w : words_) c += std::popcount(w);
    return c;
}

std::uint64_t ModelIndicator::encoding() const {
    if (p_ > 63) throw DataError("model encoding limited to p <= 63");
    return words_.empty() ? 0 : words_[0];
}

std::vector<int> ModelIndicator::included() const {
    std::vector<int> out;
    out.reserve(n_included());
    for (std::size_t w = 0; w < words_.size(); ++w) {
        std::uint64_t bits = words_[w];
        while (bits) {
            const int b = std::countr_zero(bits);
            out.push_back(static_cast<int>(w) * 64 + b + 1);
            bits &= bits - 1;
        }
    }
    return out;
}

std::size_t ModelIndicator::hash() const {
    std::size_t h = std::hash<int>{}(p_);
    for (auto w : words_) h = h * 0x9e3779b97f4a7c15ULL + std::hash<std::uint64_t>{}(w);
    return h;
}

int dimension(const ModelIndicator& gamma) { return 1 + gamma.n_included(); }

double total_cost(const ModelIndicator& gamma, const Eigen::VectorXd& costs) {
    if (costs.size() != gamma.p()) throw DataError("cost vector length mismatch");
    double c = 0.0;
    for (int j : gamma.included()) c += costs[j - 1];
    return c;
}

ModelIndicator flip(const ModelIndicator& gamma, int j) {
    ModelIndicator g = gamma;
    g.set(j, !gamma.contains(j));
    return g;
}

ModelEnumeration::ModelEnumeration(int p) : p_(p) {
    if (p < 0 || p > 20) {
        throw DataError("full enumeration guarded at p <= 20, got p = " + std::to_string(p));
    }
    count_ = 1ULL << p;
}

ModelEnumeration enumerate_all(int p) { return ModelEnumeration(p); }

std::string notation(const ModelIndicator& gamma) {
    const auto idx = gamma.included();
    if (idx.empty()) return "X0";
    std::ostringstream os;
    for (std::size_t k = 0; k < idx.size(); ++k) {
        if (k) os << '+';
        os << 'X' << idx[k];
    }
    return os.str();
}

ModelIndicator parse_notation(int p, const std::string& text,
                              const std::vector<std::string>& names) {
    ModelIndicator g(p);
    std::string token;
    std::istringstream is(text);
    while (std::getline(is, token, '+')) {
        // trim
        const auto b = token.find_first_not_of(" \t");
        const auto e = token.find_last_not_of(" \t");
        if (b == std::string::npos) throw DataError("model notation: empty term in '" + text + "'");
        token = token.substr(b, e - b + 1);

        int j = -1;
        if (token.size() > 1 && (token[0] == 'X' || token[0] == 'x')) {
            bool digits = std::all_of(token.begin() + 1, token.end(),
                                      [](unsigned char c) { return std::isdigit(c); });
            if (digits) j = std::stoi(token.substr(1));
        }
        if (j == -1) {
            const auto it = std::find(names.begin(), names.end(), token);
            if (it == names.end())
                throw DataError("model notation: unknown variable '" + token + "'");
            j = static_cast<int>(it - names.begin()) + 1;
        }
        if (j == 0) continue;  // X0: the intercept, always in
        if (j < 0 || j > p)
            throw DataError("model notation: index out of range in '" + token + "'");
        g.set(j, true);
    }
    return g;
}

}  // namespace costbic
