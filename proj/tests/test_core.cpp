#include <catch2/catch_amalgamated.hpp>

#include "kycrec/core.hpp"

using namespace kycrec;

namespace {

UserProfile circles_profile() {
    UserProfile p;
    p.user_id = "u000";
    p.kyc_tier = KycTier::AdvancedKycCircles;
    p.declared_tags = {"topic_Tech_0", "topic_News_1"};
    p.bio_keywords = {"topic_Tech_0"};
    p.authored_items = {"i00001"};
    for (int i = 0; i < 100; ++i)
        p.followed.push_back("a" + std::to_string(1000 + i));
    return p;
}

} // namespace

TEST_CASE("enum string round-trips") {
    for (Category c : kAllCategories)
        CHECK(category_from_string(to_string(c)) == c);
    for (KycTier t : kAllTiers) CHECK(tier_from_string(to_string(t)) == t);
    CHECK(account_kind_from_string("creator") == AccountKind::Creator);
    CHECK(interaction_kind_from_string("click") == InteractionKind::Click);
    CHECK_THROWS_AS(category_from_string("Sports"), std::invalid_argument);
    CHECK_THROWS_AS(tier_from_string("mega_kyc"), std::invalid_argument);
}

TEST_CASE("kyc tiers are totally ordered") {
    CHECK(KycTier::NoKyc < KycTier::BasicKyc);
    CHECK(KycTier::BasicKyc < KycTier::AdvancedKyc);
    CHECK(KycTier::AdvancedKyc < KycTier::AdvancedKycCircles);
}

TEST_CASE("validate_profile tier examples") {
    SECTION("no-kyc with empty context is valid") {
        UserProfile p;
        p.kyc_tier = KycTier::NoKyc;
        CHECK(validate_profile(p).empty());
    }
    SECTION("basic tier requires declared tags") {
        UserProfile p;
        p.kyc_tier = KycTier::BasicKyc;
        auto v = validate_profile(p);
        REQUIRE(v.size() == 1);
        CHECK(v[0].find("declared_tags empty") != std::string::npos);
    }
    SECTION("circles profile with 100 followees is valid") {
        CHECK(validate_profile(circles_profile()).empty());
    }
    SECTION("context below its tier is flagged") {
        UserProfile p;
        p.kyc_tier = KycTier::NoKyc;
        p.declared_tags = {"t"};
        p.bio_keywords = {"t"};
        p.authored_items = {"i"};
        p.followed = {"a"};
        CHECK(validate_profile(p).size() == 4);
    }
    SECTION("advanced tier allows bio and authored but not followed") {
        UserProfile p;
        p.kyc_tier = KycTier::AdvancedKyc;
        p.declared_tags = {"t"};
        p.bio_keywords = {"t"};
        p.authored_items = {"i"};
        CHECK(validate_profile(p).empty());
        p.followed = {"a"};
        CHECK(validate_profile(p).size() == 1);
    }
}

TEST_CASE("check_ranked_list invariants") {
    RankedList l;
    l.user_id = "u";
    l.cutoff = 3;
    // components chosen to be exactly representable so the sums are exact
    RankedEntry a{"i1", 0.875, 0.75, 0.0625, 0.0625};
    RankedEntry b{"i2", 0.5, 0.5, 0.0, 0.0};
    l.entries = {a, b};

    SECTION("valid list passes") { CHECK(check_ranked_list(l).empty()); }

    SECTION("length beyond cutoff is flagged") {
        l.cutoff = 1;
        auto v = check_ranked_list(l);
        REQUIRE_FALSE(v.empty());
        CHECK(v[0] == "length exceeds cutoff");
    }

    SECTION("duplicate ids are flagged") {
        l.entries[1] = a;
        auto v = check_ranked_list(l);
        REQUIRE_FALSE(v.empty());
        CHECK(v[0].find("duplicate") != std::string::npos);
    }

    SECTION("broken decomposition is flagged") {
        l.entries[0].total_score = 1.5;
        auto v = check_ranked_list(l);
        REQUIRE_FALSE(v.empty());
        CHECK(v[0].find("decomposition") != std::string::npos);
    }

    SECTION("ordering violation is flagged only when sortedness is required") {
        std::swap(l.entries[0], l.entries[1]);
        auto v = check_ranked_list(l);
        REQUIRE(v.size() == 1);
        CHECK(v[0].find("ordering broken") != std::string::npos);
        CHECK(check_ranked_list(l, false).empty());
    }

    SECTION("score ties break by ascending item id") {
        l.entries[1] = RankedEntry{"i0", 0.875, 0.875, 0.0, 0.0};
        // i1 before i0 at equal score violates the id tie-break
        auto v = check_ranked_list(l);
        REQUIRE(v.size() == 1);
        CHECK(v[0].find("ordering broken") != std::string::npos);
    }
}

TEST_CASE("social graph construction rules") {
    SocialGraph g;
    g.add_account({"a1", AccountKind::Creator, {1.0, 0.0}});
    g.add_account({"a2", AccountKind::Individual, {0.0, 1.0}});

    CHECK_THROWS_AS(g.add_account({"a1", AccountKind::Creator, {}}),
                    std::invalid_argument);
    CHECK_THROWS_AS(g.add_edge("a1", "a1"), std::invalid_argument);
    CHECK_THROWS_AS(g.add_edge("a1", "a9"), std::invalid_argument);
    CHECK_THROWS_AS(g.add_edge("a9", "a1"), std::invalid_argument);

    g.add_edge("a1", "a2");
    g.add_edge("a1", "a2");  // duplicate edge collapses
    CHECK(g.followees("a1") == std::vector<AccountId>{"a2"});
    CHECK(g.followees("a2").empty());
    CHECK(g.has_account("a2"));
    CHECK_FALSE(g.has_account("a3"));
    CHECK(g.account("a2").kind == AccountKind::Individual);
    CHECK(g.size() == 2);
}

TEST_CASE("json round-trips preserve every domain value") {
    SECTION("user profile") {
        UserProfile p = circles_profile();
        p.demographics = {34, "occ_2", "north", 123456.75, "other"};
        CHECK(profile_from_json(to_json(p)) == p);
    }
    SECTION("content item") {
        ContentItem it{"i00042", Category::Gossip, {0.25, -0.5, 0.125},
                       "a0007", 991, 17};
        CHECK(item_from_json(to_json(it)) == it);
    }
    SECTION("account") {
        Account a{"a0001", AccountKind::Enterprise, {0.5, 0.5, -0.25}};
        CHECK(account_from_json(to_json(a)) == a);
    }
    SECTION("interaction") {
        Interaction x{"u001", "i00003", InteractionKind::Click, 4, 1234};
        CHECK(interaction_from_json(to_json(x)) == x);
    }
    SECTION("ranked list") {
        RankedList l;
        l.user_id = "u001";
        l.cutoff = 5;
        l.entries = {{"i1", 0.875, 0.625, 0.25, 0.0},
                     {"i2", 0.5, 0.35, 0.0, 0.15}};
        CHECK(ranked_list_from_json(to_json(l)) == l);
    }
    SECTION("social graph") {
        SocialGraph g;
        g.add_account({"a1", AccountKind::Creator, {1.0, 0.0}});
        g.add_account({"a2", AccountKind::Individual, {0.0, 1.0}});
        g.add_edge("a2", "a1");
        SocialGraph h = graph_from_json(to_json(g));
        REQUIRE(h.size() == 2);
        CHECK(h.account("a1") == g.account("a1"));
        CHECK(h.account("a2") == g.account("a2"));
        CHECK(h.followees("a2") == g.followees("a2"));
        CHECK(h.followees("a1").empty());
    }
}
