#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace costbic {

// Binary inclusion vector over p candidate predictors. Variable indices are
// 1-based; the intercept is always included and never stored. Models map to
// integers via m(gamma) = sum_j 2^(j-1) gamma_j.
class ModelIndicator {
public:
    ModelIndicator() = default;
    explicit ModelIndicator(int p);

    static ModelIndicator from_indices(int p, std::initializer_list<int> indices);
    static ModelIndicator from_indices(int p, const std::vector<int>& indices);
    static ModelIndicator from_encoding(int p, std::uint64_t m);

    int p() const { return p_; }
    bool contains(int j) const;      // 1 <= j <= p
    void set(int j, bool included);  // mutating; copies stay cheap
    int n_included() const;
    std::uint64_t encoding() const;  // requires p <= 63
    std::vector<int> included() const;

    bool operator==(const ModelIndicator& other) const {
        return p_ == other.p_ && words_ == other.words_;
    }
    bool operator!=(const ModelIndicator& other) const { return !(*this == other); }

    std::size_t hash() const;

private:
    void check_index(int j) const;

    int p_ = 0;
    std::vector<std::uint64_t> words_;
};

struct ModelIndicatorHash {
    std::size_t operator()(const ModelIndicator& g) const { return g.hash(); }
};

// d_gamma: number of included predictors plus the always-present intercept.
int dimension(const ModelIndicator& gamma);

// C_gamma: sum of per-variable costs over included predictors (intercept free).
double total_cost(const ModelIndicator& gamma, const Eigen::VectorXd& costs);

// Copy with bit j toggled; flip(flip(g, j), j) == g.
ModelIndicator flip(const ModelIndicator& gamma, int j);

// All 2^p models in encoding order. Guarded at p <= 20.
class ModelEnumeration {
public:
    explicit ModelEnumeration(int p);

    class iterator {
    public:
        iterator(int p, std::uint64_t m) : p_(p), m_(m) {}
        ModelIndicator operator*() const { return ModelIndicator::from_encoding(p_, m_); }
        iterator& operator++() { ++m_; return *this; }
        bool operator!=(const iterator& o) const { return m_ != o.m_; }

    private:
        int p_;
        std::uint64_t m_;
    };

    iterator begin() const { return iterator(p_, 0); }
    iterator end() const { return iterator(p_, count_); }
    std::uint64_t size() const { return count_; }

private:
    int p_;
    std::uint64_t count_;
};

ModelEnumeration enumerate_all(int p);

// "X1+X3+X46" notation; the intercept-only model renders as "X0".
std::string notation(const ModelIndicator& gamma);

// Parses "X1+X3" or variable names from `names` (1-based positions).
// Throws DataError naming the offending token.
ModelIndicator parse_notation(int p, const std::string& text,
                              const std::vector<std::string>& names = {});

}  // namespace costbic
