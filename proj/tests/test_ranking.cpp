#include <catch2/catch_amalgamated.hpp>

#include "kycrec/ranking.hpp"
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

ContentItem item(std::string id, Vec f, std::int64_t pop = 10) {
    return ContentItem{std::move(id), Category::Ad, std::move(f), "a0", pop, 0};
}

} // namespace

TEST_CASE("percentile thresholds from a toy corpus") {
    EmbeddingSpace s = toy_space();
    ItemStore corpus({item("i1", axis(8, 0), 1), item("i2", axis(8, 0), 5),
                      item("i3", axis(8, 0), 9), item("i4", axis(8, 0), 13)});
    ExposureStats stats;
    stats.impressions = {{"i1", 0}, {"i2", 4}, {"i3", 8}, {"i4", 12}};
    RankingWeights w;  // exposure 20th pct, quality 50th pct
    auto th = exploration_thresholds(corpus, stats, w);
    // nearest-rank: 20% of 4 = 0.8 -> first sorted impression count (0)
    CHECK(th.exposure_threshold == 0);
    // 50% of 4 = 2 -> second sorted popularity (5)
    CHECK(th.quality_floor == 5);
}

TEST_CASE("score decomposition contract") {
    EmbeddingSpace s = toy_space();
    ContentItem it = item("i1", axis(8, 0), 100);
    Vec emb = embed_content(it, s);
    ExposureStats stats;
    stats.impressions["i1"] = 50;
    ExplorationThresholds th{10, 5};
    RankingWeights w;

    SECTION("perfect match with no tags on a well-exposed item scores w_rel") {
        RankedEntry e = score(emb, it, emb, {}, stats, th, w);
        CHECK(e.relevance_score == Catch::Approx(w.w_rel).margin(1e-12));
        CHECK(e.social_boost == 0.0);
        CHECK(e.exploration_bonus == 0.0);
        CHECK(e.total_score == e.relevance_score);
    }
    SECTION("zero user vector contributes zero relevance") {
        RankedEntry e = score(Vec(8, 0.0), it, emb, {Source::Social1}, stats, th, w);
        CHECK(e.relevance_score == 0.0);
        CHECK(e.total_score == Catch::Approx(w.w_social).margin(1e-12));
    }
    SECTION("social1 beats social2; social2 alone earns half") {
        RankedEntry both = score(emb, it, emb, {Source::Social1, Source::Social2},
                                 stats, th, w);
        CHECK(both.social_boost == w.w_social);
        RankedEntry two = score(emb, it, emb, {Source::Social2}, stats, th, w);
        CHECK(two.social_boost == w.w_social / 2.0);
        RankedEntry none = score(emb, it, emb, {Source::Knn}, stats, th, w);
        CHECK(none.social_boost == 0.0);
    }
    SECTION("exploration bonus requires low exposure and quality floor") {
        ExposureStats fresh;  // zero impressions
        RankedEntry e = score(emb, it, emb, {}, fresh, th, w);
        CHECK(e.exploration_bonus == w.w_explore);

        ContentItem junk = item("i2", axis(8, 0), 1);  // below quality floor
        RankedEntry j = score(emb, junk, emb, {}, fresh, th, w);
        CHECK(j.exploration_bonus == 0.0);

        RankedEntry seen = score(emb, it, emb, {}, stats, th, w);  // 50 >= 10
        CHECK(seen.exploration_bonus == 0.0);
    }
}

TEST_CASE("rank orders by total score with id tie-break and truncates") {
    EmbeddingSpace s = toy_space();
    ItemStore corpus({item("i1", axis(8, 0)), item("i2", axis(8, 0)),
                      item("i3", axis(8, 1))});
    EmbeddingIndex index(corpus, s);
    ExposureStats stats;
    ExplorationThresholds th{0, 0};
    RankingWeights w;
    UserProfile user;
    user.user_id = "u1";

    CandidateSet cands;
    cands.user_id = "u1";
    cands.candidates = {{"i1", {Source::Knn}},
                        {"i2", {Source::Knn}},
                        {"i3", {Source::Knn}}};
    Vec q = *index.embedding_of("i1");

    RankedList out = rank(user, q, cands, corpus, index, stats, th, w, 2);
    REQUIRE(out.entries.size() == 2);
    // i1 and i2 embed identically (same category + features): tie broken by id
    CHECK(out.entries[0].item_id == "i1");
    CHECK(out.entries[1].item_id == "i2");
    CHECK(out.cutoff == 2);
    CHECK(check_ranked_list(out).empty());

    CHECK_THROWS_AS(rank(user, q, cands, corpus, index, stats, th, w, 0),
                    std::invalid_argument);
    CandidateSet empty;
    CHECK(rank(user, q, empty, corpus, index, stats, th, w, 3).entries.empty());
}

TEST_CASE("rank matches an independent re-scoring oracle on random candidates") {
    EmbeddingSpace s = toy_space();
    Rng rng(404);
    std::vector<ContentItem> items;
    for (int i = 0; i < 20; ++i)
        items.push_back(ContentItem{"i" + std::to_string(10 + i),
                                    kAllCategories[rng.below(kCategoryCount)],
                                    rng.unit_vector(8), "a0",
                                    std::int64_t(rng.below(50)), 0});
    ItemStore corpus(items);
    EmbeddingIndex index(corpus, s);
    ExposureStats stats;
    for (const auto& it : items)
        stats.impressions[it.item_id] = std::int64_t(rng.below(10));
    RankingWeights w;
    auto th = exploration_thresholds(corpus, stats, w);

    CandidateSet cands;
    cands.user_id = "u1";
    std::vector<Source> srcs{Source::Knn, Source::Social1, Source::Social2,
                             Source::ColdStart};
    for (const auto& it : items)
        cands.candidates.push_back({it.item_id, {srcs[rng.below(srcs.size())]}});
    Vec q = rng.unit_vector(8);
    UserProfile user;
    user.user_id = "u1";

    RankedList got = rank(user, q, cands, corpus, index, stats, th, w, 20);

    // oracle: recompute each component from the contract and stable-sort
    std::vector<RankedEntry> oracle;
    for (const auto& c : cands.candidates) {
        const ContentItem& it = corpus.item(c.item_id);
        RankedEntry e;
        e.item_id = c.item_id;
        e.relevance_score = w.w_rel * cosine(q, *index.embedding_of(c.item_id));
        if (c.sources.count(Source::Social1))
            e.social_boost = w.w_social;
        else if (c.sources.count(Source::Social2))
            e.social_boost = w.w_social / 2.0;
        if (stats.count(c.item_id) < th.exposure_threshold &&
            it.popularity >= th.quality_floor)
            e.exploration_bonus = w.w_explore;
        e.total_score = e.relevance_score + e.social_boost + e.exploration_bonus;
        oracle.push_back(e);
    }
    std::stable_sort(oracle.begin(), oracle.end(),
                     [](const RankedEntry& a, const RankedEntry& b) {
                         if (a.total_score != b.total_score)
                             return a.total_score > b.total_score;
                         return a.item_id < b.item_id;
                     });
    REQUIRE(got.entries.size() == oracle.size());
    for (std::size_t i = 0; i < oracle.size(); ++i) {
        CHECK(got.entries[i].item_id == oracle[i].item_id);
        CHECK(got.entries[i].total_score ==
              Catch::Approx(oracle[i].total_score).margin(1e-12));
    }
}

TEST_CASE("with social and exploration weights zeroed, order is pure cosine") {
    EmbeddingSpace s = toy_space();
    Rng rng(505);
    std::vector<ContentItem> items;
    for (int i = 0; i < 15; ++i)
        items.push_back(ContentItem{"i" + std::to_string(10 + i), Category::Ad,
                                    rng.unit_vector(8), "a0", 5, 0});
    ItemStore corpus(items);
    EmbeddingIndex index(corpus, s);
    ExposureStats stats;
    ExplorationThresholds th{100, 0};  // everything bonus-eligible if beta > 0
    RankingWeights w;
    w.w_social = 0.0;
    w.w_explore = 0.0;

    CandidateSet cands;
    cands.user_id = "u1";
    for (const auto& it : items)
        cands.candidates.push_back({it.item_id, {Source::Social1}});
    Vec q = rng.unit_vector(8);
    UserProfile user;
    user.user_id = "u1";

    RankedList got = rank(user, q, cands, corpus, index, stats, th, w, 15);
    auto cosine_order = knn_recall(q, index, 15);
    REQUIRE(got.entries.size() == cosine_order.size());
    for (std::size_t i = 0; i < cosine_order.size(); ++i)
        CHECK(got.entries[i].item_id == cosine_order[i]);
}
