#include <doctest.h>

#include <cmath>

#include "costbic/dataset.hpp"
#include "costbic/errors.hpp"
#include "test_util.hpp"

using namespace costbic;
using testutil::TempDir;

TEST_CASE("load_dataset builds the intercept column") {
    TempDir tmp;
    testutil::write(tmp.file("d.csv"), "y,x\n0,1.5\n1,2.0\n1,-0.5\n");
    testutil::write(tmp.file("c.csv"), "x,0.5\n");
    const Dataset d = load_dataset(tmp.file("d.csv"), tmp.file("c.csv"));
    CHECK(d.n == 3);
    CHECK(d.p == 1);
    CHECK(d.X.col(0).isConstant(1.0));
    CHECK(d.X(0, 1) == 1.5);
    CHECK(d.y[2] == 1.0);
    CHECK(d.costs[0] == 0.5);
    CHECK(d.names[0] == "x");
}

TEST_CASE("load_dataset rejects bad inputs") {
    TempDir tmp;
    testutil::write(tmp.file("d.csv"), "y,x\n0,1.5\n1,2.0\n1,-0.5\n");

    SUBCASE("non-positive cost") {
        testutil::write(tmp.file("c.csv"), "x,0\n");
        CHECK_THROWS_WITH_AS(load_dataset(tmp.file("d.csv"), tmp.file("c.csv")),
                             doctest::Contains("non-positive cost"), DataError);
    }
    SUBCASE("non-binary response") {
        testutil::write(tmp.file("d2.csv"), "y,x\n0,1.5\n2,2.0\n1,-0.5\n");
        testutil::write(tmp.file("c.csv"), "x,0.5\n");
        CHECK_THROWS_WITH_AS(load_dataset(tmp.file("d2.csv"), tmp.file("c.csv")),
                             doctest::Contains("non-binary"), DataError);
    }
    SUBCASE("constant response") {
        testutil::write(tmp.file("d3.csv"), "y,x\n1,1.5\n1,2.0\n1,-0.5\n");
        testutil::write(tmp.file("c.csv"), "x,0.5\n");
        CHECK_THROWS_WITH_AS(load_dataset(tmp.file("d3.csv"), tmp.file("c.csv")),
                             doctest::Contains("constant response"), DataError);
    }
    SUBCASE("missing cost entry") {
        testutil::write(tmp.file("d4.csv"), "y,a,b\n0,1,2\n1,3,4\n");
        testutil::write(tmp.file("c.csv"), "a,0.5\n");
        CHECK_THROWS_WITH_AS(load_dataset(tmp.file("d4.csv"), tmp.file("c.csv")),
                             doctest::Contains("missing cost"), DataError);
    }
    SUBCASE("extra cost entry") {
        testutil::write(tmp.file("c2.csv"), "x,0.5\nzz,1.0\n");
        CHECK_THROWS_WITH_AS(load_dataset(tmp.file("d.csv"), tmp.file("c2.csv")),
                             doctest::Contains("extra cost"), DataError);
    }
    SUBCASE("non-numeric cell") {
        testutil::write(tmp.file("d5.csv"), "y,x\n0,1.5\n1,oops\n");
        testutil::write(tmp.file("c.csv"), "x,0.5\n");
        CHECK_THROWS_WITH_AS(load_dataset(tmp.file("d5.csv"), tmp.file("c.csv")),
                             doctest::Contains("non-numeric"), DataError);
    }
    SUBCASE("duplicate predictor names") {
        testutil::write(tmp.file("d7.csv"), "y,x,x\n0,1,2\n1,3,4\n");
        testutil::write(tmp.file("c.csv"), "x,0.5\n");
        CHECK_THROWS_WITH_AS(load_dataset(tmp.file("d7.csv"), tmp.file("c.csv")),
                             doctest::Contains("duplicate predictor"), DataError);
    }
    SUBCASE("missing value rejected") {
        testutil::write(tmp.file("d6.csv"), "y,x\n0,1.5\n1,\n");
        testutil::write(tmp.file("c.csv"), "x,0.5\n");
        CHECK_THROWS_AS(load_dataset(tmp.file("d6.csv"), tmp.file("c.csv")), DataError);
    }
}

TEST_CASE("costs csv header line is tolerated") {
    TempDir tmp;
    testutil::write(tmp.file("d.csv"), "y,x\n0,1.5\n1,2.0\n");
    testutil::write(tmp.file("c.csv"), "name,cost\nx,0.75\n");
    const Dataset d = load_dataset(tmp.file("d.csv"), tmp.file("c.csv"));
    CHECK(d.costs[0] == 0.75);
}

TEST_CASE("dataset round-trips through save and load") {
    const Dataset d = testutil::toy_problem(40, 3, 99, {0.2, 1.0, -0.5, 0.0},
                                            {0.5, 1.5, 2.5});
    TempDir tmp;
    save_dataset(d, tmp.file("d.csv"), tmp.file("c.csv"));
    const Dataset r = load_dataset(tmp.file("d.csv"), tmp.file("c.csv"));
    CHECK(r.n == d.n);
    CHECK(r.p == d.p);
    CHECK(testutil::bits_equal(r.y, d.y));
    CHECK(testutil::bits_equal(r.X, d.X));
    CHECK(testutil::bits_equal(r.costs, d.costs));
    CHECK(r.names == d.names);
}

TEST_CASE("synthesize: null coefficients give balanced outcomes") {
    SyntheticSpec spec;
    spec.n = 1000;
    spec.p = 2;
    spec.beta_true = Eigen::VectorXd::Zero(3);
    spec.correlation = Eigen::MatrixXd::Identity(2, 2);
    spec.costs = Eigen::VectorXd::Constant(2, 0.5);
    spec.seed = 12345;
    const Dataset d = synthesize(spec);
    CHECK(d.y.mean() == doctest::Approx(0.5).epsilon(0.1));  // 0.5 +- 0.05
    CHECK(std::abs(d.y.mean() - 0.5) < 0.05);
}

TEST_CASE("synthesize is deterministic per seed") {
    SyntheticSpec spec;
    spec.n = 200;
    spec.p = 3;
    spec.beta_true = Eigen::VectorXd::Zero(4);
    spec.beta_true << 0.1, 0.5, -0.5, 0.0;
    spec.correlation = ar1_correlation(3, 0.4);
    spec.costs = Eigen::VectorXd::Constant(3, 1.0);
    spec.seed = 777;
    const Dataset a = synthesize(spec);
    const Dataset b = synthesize(spec);
    CHECK(testutil::bits_equal(a.y, b.y));
    CHECK(testutil::bits_equal(a.X, b.X));

    spec.seed = 778;
    const Dataset c = synthesize(spec);
    CHECK(!testutil::bits_equal(a.y, c.y));
}

TEST_CASE("synthesize realizes the requested correlation") {
    SyntheticSpec spec;
    spec.n = 2000;
    spec.p = 2;
    spec.beta_true = Eigen::VectorXd::Zero(3);
    spec.correlation = equicorrelation(2, 0.9);
    spec.costs = Eigen::VectorXd::Constant(2, 0.5);
    spec.seed = 4242;
    const Dataset d = synthesize(spec);

    const Eigen::VectorXd x1 = d.X.col(1).array() - d.X.col(1).mean();
    const Eigen::VectorXd x2 = d.X.col(2).array() - d.X.col(2).mean();
    const double r = x1.dot(x2) / std::sqrt(x1.squaredNorm() * x2.squaredNorm());
    CHECK(std::abs(r - 0.9) < 0.04);
}

TEST_CASE("synthesize rejects a non positive definite correlation") {
    SyntheticSpec spec;
    spec.n = 100;
    spec.p = 2;
    spec.beta_true = Eigen::VectorXd::Zero(3);
    spec.correlation = Eigen::MatrixXd::Constant(2, 2, 1.0);  // singular
    spec.costs = Eigen::VectorXd::Constant(2, 0.5);
    CHECK_THROWS_AS(synthesize(spec), DataError);
}

TEST_CASE("standardized centers and scales predictors only") {
    const Dataset d = testutil::toy_problem(100, 2, 4, {0.0, 1.0, 0.0});
    const Dataset s = standardized(d);
    CHECK(s.X.col(0).isConstant(1.0));
    for (int j = 1; j <= 2; ++j) {
        CHECK(s.X.col(j).mean() == doctest::Approx(0.0).epsilon(1e-12));
        const double var = s.X.col(j).squaredNorm() / (s.n - 1);
        CHECK(var == doctest::Approx(1.0).epsilon(1e-12));
    }
    CHECK(testutil::bits_equal(s.costs, d.costs));  // cost schedule untouched
}
