#include <doctest.h>

#include <cmath>

#include "crilm/error.hpp"
#include "crilm/eval.hpp"
#include "crilm/imputers.hpp"
#include "crilm/missingness.hpp"
#include "helpers.hpp"

using namespace crilm;

TEST_CASE("impute_mean matches the brute-force oracle") {
    auto ds = testutil::make_dataset({{2, 1}, {4, 9}, {7, 5}});
    ds.set_missing(2, 0, true);
    auto imp = impute_mean(ds);
    CHECK(imp.data.value(2, 0) == doctest::Approx(testutil::oracle_mean({2, 4})));
    CHECK(imp.data.missing_count() == 0);
    CHECK(imp.original_mask == ds.mask());

    SUBCASE("identity on fully observed data") {
        auto full = testutil::make_dataset({{1, 2}, {3, 4}});
        auto out = impute_mean(full);
        for (std::size_t i = 0; i < 2; ++i)
            for (std::size_t j = 0; j < 2; ++j)
                CHECK(out.data.value(i, j) == full.value(i, j));
    }
    SUBCASE("two missing in one column") {
        auto two = testutil::make_dataset({{1, 0}, {2, 0}, {3, 0}, {5, 0}});
        two.set_missing(1, 0, true);
        two.set_missing(2, 0, true);
        auto out = impute_mean(two);
        CHECK(out.data.value(1, 0) == doctest::Approx(3.0));
        CHECK(out.data.value(2, 0) == doctest::Approx(3.0));
    }
    SUBCASE("fully missing feature is rejected") {
        auto bad = testutil::make_dataset({{1, 2}, {3, 4}});
        bad.set_missing(0, 0, true);
        bad.set_missing(1, 0, true);
        CHECK_THROWS_WITH_AS(impute_mean(bad),
                             doctest::Contains("FullyMissingFeature"), Error);
    }
}

TEST_CASE("impute_mean equals oracle on random tables") {
    std::mt19937_64 gen(31);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t n = 3 + gen() % 12, d = 1 + gen() % 4;
        std::vector<std::vector<double>> rows(n, std::vector<double>(d));
        for (auto& r : rows)
            for (auto& v : r) v = testutil::gaussian(gen) * 5.0;
        auto ds = testutil::make_dataset(rows);
        for (std::size_t j = 0; j < d; ++j) {
            const std::size_t keep = gen() % n; // always observe one row
            for (std::size_t i = 0; i < n; ++i)
                if (i != keep && gen() % 3 == 0) ds.set_missing(i, j, true);
        }
        auto imp = impute_mean(ds);
        for (std::size_t j = 0; j < d; ++j) {
            std::vector<double> observed;
            for (std::size_t i = 0; i < n; ++i)
                if (!ds.missing(i, j)) observed.push_back(rows[i][j]);
            const double expect = testutil::oracle_mean(observed);
            for (std::size_t i = 0; i < n; ++i) {
                if (ds.missing(i, j))
                    CHECK(imp.data.value(i, j) == doctest::Approx(expect));
                else
                    CHECK(imp.data.value(i, j) == rows[i][j]); // bit-exact
            }
        }
    }
}

TEST_CASE("impute_knn: exact duplicate row wins at k=1") {
    auto ds = testutil::make_dataset(
        {{1, 2, 3}, {1, 2, 99}, {50, 60, 70}, {51, 61, 71}});
    ds.set_missing(0, 2, true); // duplicate of row 1 on shared dims
    auto imp = impute_knn(ds, 1);
    CHECK(imp.data.value(0, 2) == doctest::Approx(99.0));
}

TEST_CASE("impute_knn matches the all-pairs brute-force fixture") {
    // A=(0,0,?), B=(0,0,10), C=(9,9,50), D=(10,10,52), k=2
    auto ds = testutil::make_dataset(
        {{0, 0, 0}, {0, 0, 10}, {9, 9, 50}, {10, 10, 52}});
    ds.set_missing(0, 2, true);

    // brute-force oracle: standardized distances from row 0 over cols 0,1
    const std::vector<double> col0{0, 0, 9, 10}, col1{0, 0, 9, 10};
    auto z = [](double v, const std::vector<double>& col) {
        return (v - testutil::oracle_mean(col)) / testutil::oracle_std(col);
    };
    std::vector<std::pair<double, std::size_t>> donors;
    for (std::size_t r = 1; r < 4; ++r) {
        double dist = std::pow(z(0, col0) - z(col0[r], col0), 2) +
                      std::pow(z(0, col1) - z(col1[r], col1), 2);
        dist *= 3.0 / 2.0; // d / |shared|
        donors.push_back({dist, r});
    }
    std::sort(donors.begin(), donors.end());
    const double expected =
        (ds.value(donors[0].second, 2) + ds.value(donors[1].second, 2)) / 2.0;

    auto imp = impute_knn(ds, 2);
    CHECK(imp.data.value(0, 2) == doctest::Approx(expected));
    CHECK(imp.data.value(0, 2) == doctest::Approx(30.0)); // B and C vote
}

TEST_CASE("impute_knn error paths") {
    auto ds = testutil::make_dataset({{0, 1}, {1, 2}, {2, 3}});
    ds.set_missing(0, 1, true);
    CHECK_THROWS_WITH_AS(impute_knn(ds, 5),
                         doctest::Contains("InsufficientDonors"), Error);

    auto nodonor = testutil::make_dataset({{0, 1}, {1, 2}});
    nodonor.set_missing(0, 1, true);
    nodonor.set_missing(1, 1, true);
    CHECK_THROWS_WITH_AS(impute_knn(nodonor, 1), doctest::Contains("NoDonor"),
                         Error);
}

TEST_CASE("impute_knn with k=n-1 approaches column-mean behavior") {
    std::mt19937_64 gen(77);
    const std::size_t n = 120;
    std::vector<std::vector<double>> rows(n, std::vector<double>(2));
    for (auto& r : rows)
        for (auto& v : r) v = testutil::gaussian(gen);
    auto ds = testutil::make_dataset(rows);
    ds.set_missing(0, 1, true);
    auto imp = impute_knn(ds, static_cast<int>(n) - 1);

    std::vector<double> col;
    for (std::size_t i = 1; i < n; ++i) col.push_back(rows[i][1]);
    const double tol = 10.0 * testutil::oracle_std(col) / std::sqrt(double(n));
    CHECK(std::abs(imp.data.value(0, 1) - testutil::oracle_mean(col)) <= tol);
}

TEST_CASE("impute_chained recovers an exact linear relation") {
    std::vector<std::vector<double>> rows;
    for (int i = 0; i < 20; ++i)
        rows.push_back({double(i), 2.0 * i});
    auto ds = testutil::make_dataset(rows);
    ds.set_missing(5, 1, true); // y at x=5
    auto imp = impute_chained(ds);
    CHECK(imp.data.value(5, 1) == doctest::Approx(10.0).epsilon(1e-6));
    CHECK(imp.converged);

    SUBCASE("fully observed input is returned unchanged") {
        auto full = testutil::make_dataset(rows);
        auto out = impute_chained(full);
        CHECK(out.converged);
        for (std::size_t i = 0; i < full.rows(); ++i)
            CHECK(out.data.value(i, 1) == rows[i][1]);
    }
}

TEST_CASE("impute_chained on uncorrelated noise stays near column means") {
    std::mt19937_64 gen(123);
    const std::size_t n = 200;
    std::vector<std::vector<double>> rows(n, std::vector<double>(3));
    for (auto& r : rows)
        for (auto& v : r) v = testutil::gaussian(gen);
    auto ds = testutil::make_dataset(rows);
    auto injected = inject_mcar(ds, 0.2, 5);
    auto imp = impute_chained(injected, 20, 1e-6);

    for (std::size_t j = 0; j < 3; ++j) {
        std::vector<double> observed;
        for (std::size_t i = 0; i < n; ++i)
            if (!injected.missing(i, j)) observed.push_back(rows[i][j]);
        const double mean = testutil::oracle_mean(observed);
        const double sd = testutil::oracle_std(observed);
        for (std::size_t i = 0; i < n; ++i)
            if (injected.missing(i, j))
                CHECK(std::abs(imp.data.value(i, j) - mean) < 0.8 * sd);
    }
}

TEST_CASE("chained beats mean substitution on correlated data") {
    int wins = 0;
    const int seeds = 8;
    for (int s = 0; s < seeds; ++s) {
        auto rows = testutil::correlated_gaussian(200, 0.9, 5000 + s);
        auto ds = testutil::make_dataset(rows);
        auto injected = inject_mcar(ds, 0.3, 42 + s);
        auto rmse = [&](const ImputedDataset& imp) {
            double ss = 0.0;
            std::size_t count = 0;
            for (std::size_t i = 0; i < ds.rows(); ++i)
                for (std::size_t j = 0; j < 2; ++j)
                    if (injected.missing(i, j)) {
                        const double delta =
                            imp.data.value(i, j) - rows[i][j];
                        ss += delta * delta;
                        ++count;
                    }
            return std::sqrt(ss / double(count));
        };
        if (rmse(impute_chained(injected)) < rmse(impute_mean(injected)))
            ++wins;
    }
    CHECK(wins >= seeds - 1);
}

TEST_CASE("imputers never touch observed cells") {
    std::mt19937_64 gen(9);
    auto rows = testutil::correlated_gaussian(60, 0.5, 9);
    auto ds = testutil::make_dataset(rows);
    auto injected = inject_mcar(ds, 0.3, 3);
    for (const auto& kind :
         {ImputerKind::mean(), ImputerKind::knn(3), ImputerKind::chained()}) {
        auto imp = impute(injected, kind);
        CHECK(imp.data.missing_count() == 0);
        for (std::size_t i = 0; i < ds.rows(); ++i)
            for (std::size_t j = 0; j < 2; ++j)
                if (!injected.missing(i, j))
                    CHECK(imp.data.value(i, j) == rows[i][j]);
    }
}

TEST_CASE("impute_with_reference uses reference statistics only") {
    auto train = testutil::make_dataset({{0, 0}, {2, 2}, {4, 4}});
    auto eval = testutil::make_dataset({{100, 100}, {200, 0}});
    eval.set_missing(1, 1, true);
    auto imp = impute_with_reference(eval, train, ImputerKind::mean());
    CHECK(imp.data.value(1, 1) == doctest::Approx(2.0)); // train mean, not eval's
}

TEST_CASE("tune_k") {
    SUBCASE("singleton grid short-circuits") {
        auto ds = testutil::make_dataset({{1, 2}, {3, 4}});
        auto proxy = [](const ImputedDataset&, const ImputedDataset&) {
            return 0.5;
        };
        CHECK(tune_k(ds, {3}, proxy, 0) == 3);
    }
    SUBCASE("deterministic and prefers the best proxy accuracy") {
        // two tight clusters with matching labels; small k keeps donors
        // inside the right cluster, so the proxy prefers it
        std::mt19937_64 gen(17);
        std::vector<std::vector<double>> rows;
        std::vector<std::string> labels;
        for (int i = 0; i < 30; ++i) {
            const bool first = i % 2 == 0;
            const double base = first ? 0.0 : 8.0;
            rows.push_back({base + 0.1 * testutil::gaussian(gen),
                            base + 0.1 * testutil::gaussian(gen)});
            labels.push_back(first ? "a" : "b");
        }
        auto ds = testutil::make_dataset(rows, labels);
        auto injected = inject_mcar(ds, 0.2, 2);
        auto proxy = [](const ImputedDataset& tr, const ImputedDataset& ev) {
            return proxy_classify(tr, ev, 3);
        };
        const int k1 = tune_k(injected, {3, 5, 7, 9}, proxy, 11);
        const int k2 = tune_k(injected, {3, 5, 7, 9}, proxy, 11);
        CHECK(k1 == k2);
    }
    SUBCASE("empty grid is rejected") {
        auto ds = testutil::make_dataset({{1, 2}, {3, 4}});
        auto proxy = [](const ImputedDataset&, const ImputedDataset&) {
            return 0.5;
        };
        CHECK_THROWS_WITH_AS(tune_k(ds, {}, proxy, 0),
                             doctest::Contains("EmptyGrid"), Error);
    }
}
