#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include <json.hpp>

#include "kycrec/vecmath.hpp"

namespace kycrec {

using Json = nlohmann::ordered_json;

// ── Content categories ──────────────────────────────────────────────

enum class Category : int { Ad = 0, News = 1, Gossip = 2, Sharing = 3, Tech = 4 };

inline constexpr std::array<Category, 5> kAllCategories{
    Category::Ad, Category::News, Category::Gossip, Category::Sharing,
    Category::Tech};

inline constexpr std::size_t kCategoryCount = kAllCategories.size();

inline std::string to_string(Category c) {
    switch (c) {
        case Category::Ad: return "Ad";
        case Category::News: return "News";
        case Category::Gossip: return "Gossip";
        case Category::Sharing: return "Sharing";
        case Category::Tech: return "Tech";
    }
    throw std::invalid_argument("bad Category");
}

inline Category category_from_string(const std::string& s) {
    for (Category c : kAllCategories)
        if (to_string(c) == s) return c;
    throw std::invalid_argument("unknown category: " + s);
}

// ── KYC tiers ───────────────────────────────────────────────────────

enum class KycTier : int {
    NoKyc = 0,
    BasicKyc = 1,
    AdvancedKyc = 2,
    AdvancedKycCircles = 3
};

inline constexpr std::array<KycTier, 4> kAllTiers{
    KycTier::NoKyc, KycTier::BasicKyc, KycTier::AdvancedKyc,
    KycTier::AdvancedKycCircles};

inline std::string to_string(KycTier t) {
    switch (t) {
        case KycTier::NoKyc: return "no_kyc";
        case KycTier::BasicKyc: return "basic_kyc";
        case KycTier::AdvancedKyc: return "advanced_kyc";
        case KycTier::AdvancedKycCircles: return "advanced_kyc_circles";
    }
    throw std::invalid_argument("bad KycTier");
}

inline KycTier tier_from_string(const std::string& s) {
    for (KycTier t : kAllTiers)
        if (to_string(t) == s) return t;
    throw std::invalid_argument("unknown kyc tier: " + s);
}

// ── Domain records ──────────────────────────────────────────────────

using UserId = std::string;
using ItemId = std::string;
using AccountId = std::string;
using Tick = std::int64_t;

struct Demographics {
    int age = 0;              // years, [18, 60] in the default scenario
    std::string occupation;
    std::string region;
    double income = 0.0;      // currency units
    std::string gender;

    bool operator==(const Demographics&) const = default;
};

struct UserProfile {
    UserId user_id;
    Demographics demographics;
    std::set<std::string> declared_tags;
    std::set<std::string> bio_keywords;
    std::vector<ItemId> authored_items;
    std::vector<AccountId> followed;
    KycTier kyc_tier = KycTier::NoKyc;

    bool operator==(const UserProfile&) const = default;
};

struct ContentItem {
    ItemId item_id;
    Category category = Category::Ad;
    Vec features;             // dimension D
    AccountId author_id;
    std::int64_t popularity = 0;
    Tick created_at = 0;

    bool operator==(const ContentItem&) const = default;
};

enum class AccountKind : int { Individual = 0, Creator = 1, Enterprise = 2 };

inline std::string to_string(AccountKind k) {
    switch (k) {
        case AccountKind::Individual: return "individual";
        case AccountKind::Creator: return "creator";
        case AccountKind::Enterprise: return "enterprise";
    }
    throw std::invalid_argument("bad AccountKind");
}

inline AccountKind account_kind_from_string(const std::string& s) {
    if (s == "individual") return AccountKind::Individual;
    if (s == "creator") return AccountKind::Creator;
    if (s == "enterprise") return AccountKind::Enterprise;
    throw std::invalid_argument("unknown account kind: " + s);
}

struct Account {
    AccountId account_id;
    AccountKind kind = AccountKind::Individual;
    Vec interest_vector;      // dimension D

    bool operator==(const Account&) const = default;
};

/// Directed follow graph (follower -> followee) over accounts.
/// Adjacency is precomputed so queries are O(degree).
class SocialGraph {
public:
    void add_account(Account a) {
        if (index_.count(a.account_id))
            throw std::invalid_argument("duplicate account: " + a.account_id);
        index_[a.account_id] = accounts_.size();
        accounts_.push_back(std::move(a));
        followees_.emplace_back();
    }

    void add_edge(const AccountId& follower, const AccountId& followee) {
        if (follower == followee)
            throw std::invalid_argument("self-loop: " + follower);
        std::size_t f = index_of(follower);
        index_of(followee); // must exist
        auto& out = followees_[f];
        if (std::find(out.begin(), out.end(), followee) == out.end())
            out.push_back(followee);
    }

    bool has_account(const AccountId& id) const { return index_.count(id) > 0; }

    const Account& account(const AccountId& id) const {
        return accounts_[index_of(id)];
    }

    Account& account_mut(const AccountId& id) { return accounts_[index_of(id)]; }

    const std::vector<AccountId>& followees(const AccountId& id) const {
        return followees_[index_of(id)];
    }

    const std::vector<Account>& accounts() const { return accounts_; }

    std::size_t size() const { return accounts_.size(); }

private:
    std::size_t index_of(const AccountId& id) const {
        auto it = index_.find(id);
        if (it == index_.end())
            throw std::invalid_argument("unknown account: " + id);
        return it->second;
    }

    std::vector<Account> accounts_;
    std::vector<std::vector<AccountId>> followees_;
    std::unordered_map<AccountId, std::size_t> index_;
};

enum class InteractionKind : int { Impression = 0, Click = 1 };

inline std::string to_string(InteractionKind k) {
    return k == InteractionKind::Impression ? "impression" : "click";
}

inline InteractionKind interaction_kind_from_string(const std::string& s) {
    if (s == "impression") return InteractionKind::Impression;
    if (s == "click") return InteractionKind::Click;
    throw std::invalid_argument("unknown interaction kind: " + s);
}

struct Interaction {
    UserId user_id;
    ItemId item_id;
    InteractionKind kind = InteractionKind::Impression;
    int position = 1;  // 1-based rank at impression
    Tick tick = 0;

    bool operator==(const Interaction&) const = default;
};

struct RankedEntry {
    ItemId item_id;
    double total_score = 0.0;
    double relevance_score = 0.0;
    double social_boost = 0.0;
    double exploration_bonus = 0.0;

    bool operator==(const RankedEntry&) const = default;
};

struct RankedList {
    UserId user_id;
    std::vector<RankedEntry> entries;  // sorted by total desc, id asc
    int cutoff = 0;

    bool operator==(const RankedList&) const = default;
};

// ── Profile validation ──────────────────────────────────────────────

/// Violations are data, not faults: returns every broken tier/field
/// invariant, empty list means the profile is valid.
inline std::vector<std::string> validate_profile(const UserProfile& p) {
    std::vector<std::string> v;
    const KycTier t = p.kyc_tier;
    if (t >= KycTier::BasicKyc && p.declared_tags.empty())
        v.push_back("declared_tags empty at " + to_string(t));
    if (t < KycTier::BasicKyc && !p.declared_tags.empty())
        v.push_back("declared_tags nonempty below basic_kyc");
    if (t < KycTier::AdvancedKyc && !p.bio_keywords.empty())
        v.push_back("bio_keywords nonempty below advanced_kyc");
    if (t < KycTier::AdvancedKyc && !p.authored_items.empty())
        v.push_back("authored_items nonempty below advanced_kyc");
    if (t < KycTier::AdvancedKycCircles && !p.followed.empty())
        v.push_back("followed nonempty below advanced_kyc_circles");
    return v;
}

// ── Ranked-list invariant check ─────────────────────────────────────

/// `require_sorted` is false for re-ranked lists: the diversity rotation
/// deliberately trades score order for seed-interest coverage.
inline std::vector<std::string> check_ranked_list(const RankedList& list,
                                                  bool require_sorted = true) {
    std::vector<std::string> v;
    if (static_cast<int>(list.entries.size()) > list.cutoff)
        v.push_back("length exceeds cutoff");
    std::unordered_set<ItemId> seen;
    for (std::size_t i = 0; i < list.entries.size(); ++i) {
        const auto& e = list.entries[i];
        if (!seen.insert(e.item_id).second)
            v.push_back("duplicate item " + e.item_id);
        if (e.total_score !=
            e.relevance_score + e.social_boost + e.exploration_bonus)
            v.push_back("score decomposition broken for " + e.item_id);
        if (require_sorted && i > 0) {
            const auto& prev = list.entries[i - 1];
            bool ordered = prev.total_score > e.total_score ||
                           (prev.total_score == e.total_score &&
                            prev.item_id < e.item_id);
            if (!ordered) v.push_back("ordering broken at position " +
                                      std::to_string(i + 1));
        }
    }
    return v;
}

// ── Canonical JSON serialization ────────────────────────────────────
// All types round-trip through line-delimited JSON with snake_case
// field names; vectors are arrays of decimal floats.

inline Json to_json(const Demographics& d) {
    return Json{{"age", d.age},
                {"occupation", d.occupation},
                {"region", d.region},
                {"income", d.income},
                {"gender", d.gender}};
}

inline Demographics demographics_from_json(const Json& j) {
    Demographics d;
    d.age = j.at("age").get<int>();
    d.occupation = j.at("occupation").get<std::string>();
    d.region = j.at("region").get<std::string>();
    d.income = j.at("income").get<double>();
    d.gender = j.at("gender").get<std::string>();
    return d;
}

inline Json to_json(const UserProfile& p) {
    return Json{{"user_id", p.user_id},
                {"demographics", to_json(p.demographics)},
                {"declared_tags", p.declared_tags},
                {"bio_keywords", p.bio_keywords},
                {"authored_items", p.authored_items},
                {"followed", p.followed},
                {"kyc_tier", to_string(p.kyc_tier)}};
}

inline UserProfile profile_from_json(const Json& j) {
    UserProfile p;
    p.user_id = j.at("user_id").get<std::string>();
    p.demographics = demographics_from_json(j.at("demographics"));
    p.declared_tags = j.at("declared_tags").get<std::set<std::string>>();
    p.bio_keywords = j.at("bio_keywords").get<std::set<std::string>>();
    p.authored_items = j.at("authored_items").get<std::vector<ItemId>>();
    p.followed = j.at("followed").get<std::vector<AccountId>>();
    p.kyc_tier = tier_from_string(j.at("kyc_tier").get<std::string>());
    return p;
}

inline Json to_json(const ContentItem& it) {
    return Json{{"item_id", it.item_id},
                {"category", to_string(it.category)},
                {"features", it.features},
                {"author_id", it.author_id},
                {"popularity", it.popularity},
                {"created_at", it.created_at}};
}

inline ContentItem item_from_json(const Json& j) {
    ContentItem it;
    it.item_id = j.at("item_id").get<std::string>();
    it.category = category_from_string(j.at("category").get<std::string>());
    it.features = j.at("features").get<Vec>();
    it.author_id = j.at("author_id").get<std::string>();
    it.popularity = j.at("popularity").get<std::int64_t>();
    it.created_at = j.at("created_at").get<Tick>();
    return it;
}

inline Json to_json(const Account& a) {
    return Json{{"account_id", a.account_id},
                {"kind", to_string(a.kind)},
                {"interest_vector", a.interest_vector}};
}

inline Account account_from_json(const Json& j) {
    Account a;
    a.account_id = j.at("account_id").get<std::string>();
    a.kind = account_kind_from_string(j.at("kind").get<std::string>());
    a.interest_vector = j.at("interest_vector").get<Vec>();
    return a;
}

inline Json to_json(const Interaction& x) {
    return Json{{"user_id", x.user_id},
                {"item_id", x.item_id},
                {"kind", to_string(x.kind)},
                {"position", x.position},
                {"tick", x.tick}};
}

inline Interaction interaction_from_json(const Json& j) {
    Interaction x;
    x.user_id = j.at("user_id").get<std::string>();
    x.item_id = j.at("item_id").get<std::string>();
    x.kind = interaction_kind_from_string(j.at("kind").get<std::string>());
    x.position = j.at("position").get<int>();
    x.tick = j.at("tick").get<Tick>();
    return x;
}

inline Json to_json(const RankedEntry& e) {
    return Json{{"item_id", e.item_id},
                {"total_score", e.total_score},
                {"relevance_score", e.relevance_score},
                {"social_boost", e.social_boost},
                {"exploration_bonus", e.exploration_bonus}};
}

inline RankedEntry ranked_entry_from_json(const Json& j) {
    RankedEntry e;
    e.item_id = j.at("item_id").get<std::string>();
    e.total_score = j.at("total_score").get<double>();
    e.relevance_score = j.at("relevance_score").get<double>();
    e.social_boost = j.at("social_boost").get<double>();
    e.exploration_bonus = j.at("exploration_bonus").get<double>();
    return e;
}

inline Json to_json(const RankedList& l) {
    Json entries = Json::array();
    for (const auto& e : l.entries) entries.push_back(to_json(e));
    return Json{{"user_id", l.user_id},
                {"entries", std::move(entries)},
                {"cutoff", l.cutoff}};
}

inline RankedList ranked_list_from_json(const Json& j) {
    RankedList l;
    l.user_id = j.at("user_id").get<std::string>();
    for (const auto& e : j.at("entries"))
        l.entries.push_back(ranked_entry_from_json(e));
    l.cutoff = j.at("cutoff").get<int>();
    return l;
}

inline Json to_json(const SocialGraph& g) {
    Json nodes = Json::array();
    Json edges = Json::array();
    for (const auto& a : g.accounts()) {
        nodes.push_back(to_json(a));
        for (const auto& f : g.followees(a.account_id))
            edges.push_back(Json::array({a.account_id, f}));
    }
    return Json{{"nodes", std::move(nodes)}, {"edges", std::move(edges)}};
}

inline SocialGraph graph_from_json(const Json& j) {
    SocialGraph g;
    for (const auto& n : j.at("nodes")) g.add_account(account_from_json(n));
    for (const auto& e : j.at("edges"))
        g.add_edge(e.at(0).get<std::string>(), e.at(1).get<std::string>());
    return g;
}

} // namespace kycrec
