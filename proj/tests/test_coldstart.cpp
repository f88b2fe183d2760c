#include <catch2/catch_amalgamated.hpp>

#include "kycrec/coldstart.hpp"
#include "kycrec/rng.hpp"

using namespace kycrec;

namespace {

Vec axis(std::size_t dim, std::size_t i) {
    Vec v(dim, 0.0);
    v[i] = 1.0;
    return v;
}

EmbeddingSpace toy_space(std::size_t dim = 8) {
    EmbeddingSpace s;
    s.dimension = dim;
    std::size_t i = 0;
    for (Category c : kAllCategories)
        s.category_basis[to_string(c)] = axis(dim, i++);
    return s;
}

/// Corpus with `per_cat` items per category; popularity descends with
/// the per-category index so the popularity order is known by id.
ItemStore toy_corpus(std::size_t per_cat) {
    std::vector<ContentItem> items;
    int id = 0;
    for (Category c : kAllCategories)
        for (std::size_t i = 0; i < per_cat; ++i)
            items.push_back(ContentItem{"i" + std::to_string(100 + id++), c,
                                        {}, "a0",
                                        std::int64_t(100 - i), 0});
    return ItemStore(std::move(items));
}

} // namespace

TEST_CASE("prior bucket keys use age bands") {
    DemographicPrior p({18, 30, 45});
    Demographics d;
    d.occupation = "occ_1";
    d.age = 18;
    CHECK(p.bucket_key(d) == "age18|occ_1");
    d.age = 29;
    CHECK(p.bucket_key(d) == "age18|occ_1");
    d.age = 30;
    CHECK(p.bucket_key(d) == "age30|occ_1");
    d.age = 59;
    CHECK(p.bucket_key(d) == "age45|occ_1");
}

TEST_CASE("bucket weights must be nonnegative and sum to one") {
    DemographicPrior p({18});
    CHECK_THROWS_AS(p.set_bucket("age18|x", {{"News", 0.5}, {"Tech", 0.4}}),
                    std::invalid_argument);
    CHECK_THROWS_AS(p.set_bucket("age18|x", {{"News", 1.5}, {"Tech", -0.5}}),
                    std::invalid_argument);
    p.set_bucket("age18|x", {{"News", 0.5}, {"Tech", 0.5}});
    CHECK(p.table().size() == 1);
}

TEST_CASE("unknown buckets fall back to the uniform distribution") {
    DemographicPrior p({18});
    Demographics d;
    d.age = 20;
    d.occupation = "occ_9";
    bool known = true;
    auto dist = p.lookup(d, &known);
    CHECK_FALSE(known);
    REQUIRE(dist.size() == kCategoryCount);
    for (const auto& [label, w] : dist)
        CHECK(w == Catch::Approx(1.0 / 5.0).margin(1e-12));
}

TEST_CASE("demographic prior vector examples") {
    EmbeddingSpace s = toy_space();
    DemographicPrior prior({18});
    Demographics d;
    d.age = 20;
    d.occupation = "occ_0";
    UserProfile p;
    p.demographics = d;

    SECTION("point mass on News gives the News basis") {
        prior.set_bucket("age18|occ_0", {{"News", 1.0}});
        bool known = false;
        Vec v = demographic_prior_vector(p, prior, s, &known);
        CHECK(known);
        CHECK(v == s.category_vec(Category::News));
    }
    SECTION("mixed bucket is the normalized weighted sum") {
        prior.set_bucket("age18|occ_0", {{"Tech", 0.6}, {"Sharing", 0.4}});
        Vec v = demographic_prior_vector(p, prior, s);
        Vec want(s.dimension, 0.0);
        axpy(want, 0.6, s.category_vec(Category::Tech));
        axpy(want, 0.4, s.category_vec(Category::Sharing));
        want = normalized(std::move(want));
        for (std::size_t i = 0; i < s.dimension; ++i)
            CHECK(v[i] == Catch::Approx(want[i]).margin(1e-12));
    }
    SECTION("uniform fallback is the normalized mean of category bases") {
        bool known = true;
        Vec v = demographic_prior_vector(p, prior, s, &known);
        CHECK_FALSE(known);
        Vec want(s.dimension, 0.0);
        for (Category c : kAllCategories) axpy(want, 0.2, s.category_vec(c));
        want = normalized(std::move(want));
        for (std::size_t i = 0; i < s.dimension; ++i)
            CHECK(v[i] == Catch::Approx(want[i]).margin(1e-12));
    }
}

TEST_CASE("largest-remainder allocation") {
    std::map<Category, std::size_t> avail;
    for (Category c : kAllCategories) avail[c] = 100;

    SECTION("even split with remainder goes to the earlier category") {
        auto alloc = detail::allocate_k(
            {{Category::News, 0.5}, {Category::Tech, 0.5}}, avail, 5);
        CHECK(alloc[Category::News] == 3);  // tie broken by category order
        CHECK(alloc[Category::Tech] == 2);
        CHECK(alloc[Category::Ad] == 0);
    }
    SECTION("allocation sums to min(k, available)") {
        Rng rng(9);
        for (int trial = 0; trial < 20; ++trial) {
            std::map<Category, double> w;
            std::map<Category, std::size_t> av;
            for (Category c : kAllCategories) {
                w[c] = rng.uniform();
                av[c] = rng.below(8);
            }
            std::size_t k = 1 + rng.below(40);
            auto alloc = detail::allocate_k(w, av, k);
            std::size_t total = 0, total_av = 0;
            for (Category c : kAllCategories) {
                total += alloc[c];
                total_av += av[c];
                CHECK(alloc[c] <= av[c]);
            }
            CHECK(total == std::min(k, total_av));
        }
    }
    SECTION("surplus from a capped category spills to others") {
        std::map<Category, std::size_t> tight;
        for (Category c : kAllCategories) tight[c] = 10;
        tight[Category::News] = 1;
        auto alloc = detail::allocate_k(
            {{Category::News, 0.9}, {Category::Tech, 0.1}}, tight, 10);
        CHECK(alloc[Category::News] == 1);
        std::size_t total = 0;
        for (Category c : kAllCategories) {
            CHECK(alloc[c] <= tight[c]);
            total += alloc[c];
        }
        CHECK(total == 10);
    }
}

TEST_CASE("cold_start_recall behavior per tier") {
    EmbeddingSpace s = toy_space();
    ItemStore corpus = toy_corpus(10);
    DemographicPrior prior({18});
    UserProfile p;
    p.demographics.age = 20;
    p.demographics.occupation = "occ_0";

    SECTION("k must be positive and empty corpus yields empty") {
        CHECK_THROWS_AS(cold_start_recall(p, prior, corpus, 0),
                        std::invalid_argument);
        CHECK(cold_start_recall(p, prior, ItemStore(std::vector<ContentItem>{}), 5).empty());
    }
    SECTION("no-kyc with k=5 takes one top item per category") {
        p.kyc_tier = KycTier::NoKyc;
        auto got = cold_start_recall(p, prior, corpus, 5);
        REQUIRE(got.size() == 5);
        std::set<Category> cats;
        for (const auto& id : got) cats.insert(corpus.item(id).category);
        CHECK(cats.size() == 5);
        // each pick is its category's most popular item
        for (const auto& id : got)
            CHECK(popularity_recall(corpus, corpus.item(id).category, 1)[0] == id);
    }
    SECTION("no-kyc balance bound") {
        p.kyc_tier = KycTier::NoKyc;
        auto got = cold_start_recall(p, prior, corpus, 12);
        std::map<Category, int> per_cat;
        for (const auto& id : got) per_cat[corpus.item(id).category]++;
        for (const auto& [c, n] : per_cat) CHECK(n <= 3);  // ceil(12/5)
    }
    SECTION("point-mass bucket equals filtered popularity recall") {
        prior.set_bucket("age18|occ_0", {{"Gossip", 1.0}});
        p.kyc_tier = KycTier::BasicKyc;
        CHECK(cold_start_recall(p, prior, corpus, 3) ==
              popularity_recall(corpus, Category::Gossip, 3));
    }
    SECTION("basic tier apportions by the bucket marginal") {
        prior.set_bucket("age18|occ_0", {{"News", 0.5}, {"Tech", 0.5}});
        p.kyc_tier = KycTier::BasicKyc;
        auto got = cold_start_recall(p, prior, corpus, 5);
        std::map<Category, int> per_cat;
        for (const auto& id : got) per_cat[corpus.item(id).category]++;
        CHECK(per_cat[Category::News] == 3);
        CHECK(per_cat[Category::Tech] == 2);
    }
}

TEST_CASE("prior serialization round-trips") {
    DemographicPrior p({18, 30});
    p.set_bucket("age18|occ_0", {{"News", 0.25}, {"Tech", 0.75}});
    DemographicPrior q = DemographicPrior::from_json(p.to_json());
    CHECK(q.age_bounds() == p.age_bounds());
    CHECK(q.table() == p.table());
}
