#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "kycrec/metrics.hpp"
#include "kycrec/rng.hpp"

using namespace kycrec;

namespace {

/// Independent nDCG oracle written against the formula directly.
double ndcg_oracle(const std::vector<int>& ranked, std::vector<int> pool,
                   std::size_t k) {
    auto dcg = [&](const std::vector<int>& g) {
        double d = 0.0;
        for (std::size_t i = 0; i < g.size() && i < k; ++i)
            d += (std::pow(2.0, g[i]) - 1.0) *
                 (std::log(2.0) / std::log(double(i) + 2.0));
        return d;
    };
    std::sort(pool.begin(), pool.end());
    std::reverse(pool.begin(), pool.end());
    double idcg = dcg(pool);
    if (idcg == 0.0) return 0.0;
    return dcg(ranked) / idcg;
}

UserResult user(std::vector<int> grades, std::vector<bool> clicks,
                std::vector<int> pool) {
    UserResult u;
    u.user_id = "u";
    for (std::size_t i = 0; i < grades.size(); ++i) {
        EvalEntry e;
        e.item_id = "i" + std::to_string(i);
        e.grade = grades[i];
        e.clicked = i < clicks.size() && clicks[i];
        u.entries.push_back(e);
    }
    u.candidate_grades = std::move(pool);
    return u;
}

} // namespace

TEST_CASE("ndcg hand cases") {
    SECTION("ideal order scores 1") {
        CHECK(ndcg_at_k({3, 2, 0}, {3, 2, 0}, 3) == Catch::Approx(1.0).margin(1e-12));
    }
    SECTION("zero pool scores 0, not 1") {
        CHECK(ndcg_at_k({0, 0, 0}, {0, 0, 0}, 3) == 0.0);
        CHECK(ndcg_at_k({}, {}, 5) == 0.0);
    }
    SECTION("worked example [1,0,2] against pool {2,1,0}") {
        double v = ndcg_at_k({1, 0, 2}, {2, 1, 0}, 3);
        // DCG = 1/1 + 0 + 3/2 = 2.5; IDCG = 3 + 1/log2(3)
        double idcg = 3.0 + 1.0 / std::log2(3.0);
        CHECK(v == Catch::Approx(2.5 / idcg).margin(1e-12));
        CHECK(v == Catch::Approx(0.6885).margin(5e-4));
    }
    SECTION("k below list length truncates") {
        CHECK(ndcg_at_k({0, 3}, {3, 0}, 1) == 0.0);
    }
    SECTION("k must be positive") {
        CHECK_THROWS_AS(ndcg_at_k({1}, {1}, 0), std::invalid_argument);
    }
}

TEST_CASE("ndcg matches the independent oracle on random instances") {
    Rng rng(777);
    for (int trial = 0; trial < 2000; ++trial) {
        std::size_t len = rng.below(8);
        std::vector<int> ranked, pool;
        for (std::size_t i = 0; i < len; ++i) ranked.push_back(int(rng.below(4)));
        // the pool is a superset of the ranked grades, as in the pipeline
        pool = ranked;
        std::size_t extra = rng.below(8);
        for (std::size_t i = 0; i < extra; ++i) pool.push_back(int(rng.below(4)));
        std::size_t k = 1 + rng.below(10);
        double got = ndcg_at_k(ranked, pool, k);
        double want = ndcg_oracle(ranked, pool, k);
        CHECK(got == Catch::Approx(want).margin(1e-12));
        CHECK(got >= 0.0);
        CHECK(got <= 1.0 + 1e-12);
    }
}

TEST_CASE("ctr semantics") {
    std::vector<UserResult> users;
    users.push_back(user({3, 0, 0}, {true, false, false}, {3}));
    users.push_back(user({0, 2, 0}, {false, true, false}, {2}));
    users.push_back(user({0, 0, 0}, {false, false, false}, {0}));
    users.push_back(user({0, 0, 0}, {false, false, false}, {0}));

    SECTION("ctr@1 is the mean top-click indicator") {
        CHECK(ctr_at_k(users, 1) == Catch::Approx(0.25).margin(1e-12));
    }
    SECTION("2 of 4 users clicked within the top 3") {
        CHECK(ctr_at_k(users, 3) == Catch::Approx(0.5).margin(1e-12));
    }
    SECTION("no clicks anywhere is 0, universal top clicks is 1") {
        std::vector<UserResult> none{user({0}, {false}, {0})};
        CHECK(ctr_at_k(none, 1) == 0.0);
        std::vector<UserResult> all{user({3}, {true}, {3}),
                                    user({3}, {true}, {3})};
        CHECK(ctr_at_k(all, 1) == 1.0);
    }
    SECTION("empty lists contribute zero") {
        users.push_back(user({}, {}, {}));
        CHECK(ctr_at_k(users, 3) == Catch::Approx(2.0 / 5.0).margin(1e-12));
    }
    SECTION("nesting holds on random logs") {
        Rng rng(888);
        for (int trial = 0; trial < 50; ++trial) {
            std::vector<UserResult> us;
            for (int n = 0; n < 10; ++n) {
                std::vector<int> g;
                std::vector<bool> c;
                for (int i = 0; i < 5; ++i) {
                    g.push_back(int(rng.below(4)));
                    c.push_back(rng.uniform() < 0.3);
                }
                us.push_back(user(g, c, g));
            }
            double c1 = ctr_at_k(us, 1), c3 = ctr_at_k(us, 3), c5 = ctr_at_k(us, 5);
            CHECK(c1 <= c3 + 1e-12);
            CHECK(c3 <= c5 + 1e-12);
        }
    }
    SECTION("k must be positive") {
        CHECK_THROWS_AS(ctr_at_k(users, 0), std::invalid_argument);
    }
}

TEST_CASE("serendipity semantics") {
    auto with_labels = [](std::vector<int> grades,
                          std::vector<std::string> labels,
                          std::set<std::string> history) {
        UserResult u = user(grades, {}, grades);
        for (std::size_t i = 0; i < labels.size(); ++i)
            u.entries[i].seed_label = labels[i];
        u.history = std::move(history);
        return u;
    };

    SECTION("everything inside history scores 0") {
        std::vector<UserResult> us{
            with_labels({3, 3}, {"a", "b"}, {"a", "b"})};
        CHECK(serendipity_at_k(us, 2) == 0.0);
    }
    SECTION("all relevant and outside history scores 1") {
        std::vector<UserResult> us{
            with_labels({2, 3}, {"a", "b"}, {"c"})};
        CHECK(serendipity_at_k(us, 2) == Catch::Approx(1.0).margin(1e-12));
    }
    SECTION("2 of 5 qualifying scores 0.4") {
        std::vector<UserResult> us{with_labels(
            {2, 3, 1, 0, 2}, {"new1", "old", "new2", "new3", "new4"}, {"old"})};
        // qualifying: positions 1 (grade 2, new1) and 5 (grade 2, new4);
        // position 3 is novel but grade 1, position 2 relevant but in history
        CHECK(serendipity_at_k(us, 5) == Catch::Approx(0.4).margin(1e-12));
    }
    SECTION("empty history counts relevant entries as unexpected") {
        std::vector<UserResult> us{with_labels({3, 0}, {"a", "b"}, {})};
        CHECK(serendipity_at_k(us, 2) == Catch::Approx(0.5).margin(1e-12));
    }
}

TEST_CASE("build_tables layout, gaps and invariance") {
    std::map<std::pair<std::string, Category>, std::vector<UserResult>> results;
    results[{"NoKyc", Category::Tech}] = {user({3, 2}, {true, false}, {3, 2, 0}),
                                          user({0, 2}, {false, true}, {2, 0})};
    std::vector<std::string> conditions{"Baseline", "NoKyc"};
    auto tables = build_tables(results, conditions, {1, 3});
    REQUIRE(tables.size() == 6);  // 3 metrics x 2 ks

    const MetricTable& ndcg1 = tables[0];
    CHECK(ndcg1.metric == "ndcg");
    CHECK(ndcg1.k == 1);
    SECTION("cell equals the mean of user metrics") {
        double want = (user_ndcg(results[{"NoKyc", Category::Tech}][0], 1) +
                       user_ndcg(results[{"NoKyc", Category::Tech}][1], 1)) / 2.0;
        REQUIRE(ndcg1.cell(Category::Tech, "NoKyc"));
        CHECK(*ndcg1.cell(Category::Tech, "NoKyc") ==
              Catch::Approx(want).margin(1e-12));
    }
    SECTION("missing conditions are explicit gaps, not zeros") {
        CHECK_FALSE(ndcg1.cell(Category::Tech, "Baseline").has_value());
        CHECK_FALSE(ndcg1.cell(Category::Ad, "NoKyc").has_value());
        CHECK(format_cell(ndcg1.cell(Category::Tech, "Baseline")) == "-");
    }
    SECTION("permuting user order leaves tables identical") {
        auto swapped = results;
        std::swap(swapped[{"NoKyc", Category::Tech}][0],
                  swapped[{"NoKyc", Category::Tech}][1]);
        auto tables2 = build_tables(swapped, conditions, {1, 3});
        for (std::size_t t = 0; t < tables.size(); ++t)
            CHECK(to_csv(tables2[t]) == to_csv(tables[t]));
    }
    SECTION("csv and text renderings carry the full grid") {
        std::string csv = to_csv(ndcg1);
        CHECK(csv.find("category,Baseline,NoKyc") == 0);
        CHECK(csv.find("Tech,-,") != std::string::npos);
        std::string text = to_text(ndcg1);
        CHECK(text.find("ndcg@1") == 0);
        for (Category c : kAllCategories)
            CHECK(text.find(to_string(c)) != std::string::npos);
    }
    SECTION("plot csv is long-form") {
        std::string plot = plot_csv(tables);
        CHECK(plot.find("metric,k,category,condition,value") == 0);
        CHECK(plot.find("ndcg,1,Tech,NoKyc,") != std::string::npos);
    }
}
