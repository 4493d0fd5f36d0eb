#include <doctest.h>

#include <cmath>
#include <random>

#include "costbic/errors.hpp"
#include "costbic/model_space.hpp"

using namespace costbic;

TEST_CASE("dimension counts the intercept") {
    CHECK(dimension(ModelIndicator(5)) == 1);

    ModelIndicator full(5);
    for (int j = 1; j <= 5; ++j) full.set(j, true);
    CHECK(dimension(full) == 6);

    // ten predictors plus the intercept
    const auto best = ModelIndicator::from_indices(83, {1, 2, 3, 5, 12, 46, 49, 51, 70, 78});
    CHECK(dimension(best) == 11);
}

TEST_CASE("total_cost sums included predictors, intercept free") {
    Eigen::VectorXd costs(5);
    costs << 0.5, 1.0, 1.5, 2.0, 2.5;
    CHECK(total_cost(ModelIndicator(5), costs) == 0.0);

    // ten-variable selection whose cost schedule sums to 7.5 minutes
    Eigen::VectorXd table_costs(10);
    table_costs << 0.5, 0.5, 1.5, 1.0, 0.5, 1.0, 0.5, 0.5, 0.5, 1.0;
    ModelIndicator all10(10);
    for (int j = 1; j <= 10; ++j) all10.set(j, true);
    CHECK(total_cost(all10, table_costs) == doctest::Approx(7.5).epsilon(1e-12));

    // a lone 10-minute variable
    Eigen::VectorXd one(1);
    one << 10.0;
    CHECK(total_cost(ModelIndicator::from_indices(1, {1}), one) == 10.0);
}

TEST_CASE("flip toggles one bit and is an involution") {
    const ModelIndicator empty(5);
    const auto g3 = flip(empty, 3);
    CHECK(g3.contains(3));
    CHECK(dimension(g3) == 2);
    CHECK(flip(g3, 3) == empty);

    const auto g12 = ModelIndicator::from_indices(5, {1, 2});
    CHECK(flip(g12, 2) == ModelIndicator::from_indices(5, {1}));

    CHECK_THROWS_AS(flip(empty, 0), DataError);
    CHECK_THROWS_AS(flip(empty, 6), DataError);
}

TEST_CASE("flip changes dimension by exactly one") {
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 50; ++trial) {
        const int p = 1 + static_cast<int>(rng() % 70);
        ModelIndicator g(p);
        for (int j = 1; j <= p; ++j) g.set(j, rng() & 1);
        const int j = 1 + static_cast<int>(rng() % p);
        const auto f = flip(g, j);
        CHECK(std::abs(dimension(f) - dimension(g)) == 1);
        CHECK(flip(f, j) == g);
    }
}

TEST_CASE("enumerate_all yields 2^p models in encoding order") {
    std::vector<ModelIndicator> seen;
    for (const auto& g : enumerate_all(2)) seen.push_back(g);
    REQUIRE(seen.size() == 4);
    CHECK(seen[0] == ModelIndicator(2));
    CHECK(seen[1] == ModelIndicator::from_indices(2, {1}));
    CHECK(seen[2] == ModelIndicator::from_indices(2, {2}));
    CHECK(seen[3] == ModelIndicator::from_indices(2, {1, 2}));

    std::size_t count = 0;
    for ([[maybe_unused]] const auto& g : enumerate_all(10)) ++count;
    CHECK(count == 1024);

    CHECK_THROWS_AS(enumerate_all(21), DataError);
}

TEST_CASE("encoding is a bijection for p <= 63") {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 100; ++trial) {
        const int p = 1 + static_cast<int>(rng() % 20);
        const std::uint64_t m = rng() & ((1ULL << p) - 1);
        const auto g = ModelIndicator::from_encoding(p, m);
        CHECK(g.encoding() == m);
    }
    // indicators double as map keys beyond 63 bits
    const auto a = ModelIndicator::from_indices(80, {1, 64, 80});
    const auto b = ModelIndicator::from_indices(80, {1, 64, 80});
    CHECK(a == b);
    CHECK(a.hash() == b.hash());
}

TEST_CASE("cost is monotone under bit additions") {
    std::mt19937_64 rng(13);
    for (int trial = 0; trial < 50; ++trial) {
        const int p = 1 + static_cast<int>(rng() % 15);
        Eigen::VectorXd costs(p);
        for (int j = 0; j < p; ++j) costs[j] = 0.25 + (rng() % 8) * 0.25;
        ModelIndicator g(p);
        for (int j = 1; j <= p; ++j) g.set(j, rng() & 1);
        const int j = 1 + static_cast<int>(rng() % p);
        if (!g.contains(j)) {
            CHECK(total_cost(flip(g, j), costs) > total_cost(g, costs));
        }
        // equal costs: C = c * (d - 1)
        Eigen::VectorXd eq = Eigen::VectorXd::Constant(p, 0.75);
        CHECK(total_cost(g, eq) == doctest::Approx(0.75 * (dimension(g) - 1)).epsilon(1e-12));
    }
}

TEST_CASE("notation round-trips") {
    const auto g = ModelIndicator::from_indices(50, {1, 3, 46});
    CHECK(notation(g) == "X1+X3+X46");
    CHECK(parse_notation(50, "X1+X3+X46") == g);
    CHECK(parse_notation(50, " X1 + X3 + X46 ") == g);
    CHECK(notation(ModelIndicator(4)) == "X0");
    CHECK(parse_notation(4, "X0") == ModelIndicator(4));

    const std::vector<std::string> names = {"age", "bun", "sbp"};
    CHECK(parse_notation(3, "age+sbp", names) == ModelIndicator::from_indices(3, {1, 3}));
    CHECK_THROWS_WITH_AS(parse_notation(3, "age+bogus", names), doctest::Contains("bogus"),
                         DataError);
    CHECK_THROWS_AS(parse_notation(3, "X9"), DataError);
}
