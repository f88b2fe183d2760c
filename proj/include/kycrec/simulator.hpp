#pragma once

#include <algorithm>
#include <cstdio>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "kycrec/coldstart.hpp"
#include "kycrec/core.hpp"
#include "kycrec/corpus.hpp"
#include "kycrec/embedding.hpp"
#include "kycrec/metrics.hpp"
#include "kycrec/propagation.hpp"
#include "kycrec/ranking.hpp"
#include "kycrec/recall.hpp"
#include "kycrec/rerank.hpp"
#include "kycrec/rng.hpp"

namespace kycrec {

// ── Experimental conditions ─────────────────────────────────────────

enum class Condition : int {
    Baseline = 0,
    NoKyc = 1,
    BasicKyc = 2,
    AdvancedKyc = 3,
    AdvancedKycCircles = 4
};

inline constexpr std::array<Condition, 5> kAllConditions{
    Condition::Baseline, Condition::NoKyc, Condition::BasicKyc,
    Condition::AdvancedKyc, Condition::AdvancedKycCircles};

inline std::string to_string(Condition c) {
    switch (c) {
        case Condition::Baseline: return "Baseline";
        case Condition::NoKyc: return "NoKyc";
        case Condition::BasicKyc: return "BasicKyc";
        case Condition::AdvancedKyc: return "AdvancedKyc";
        case Condition::AdvancedKycCircles: return "AdvancedKycCircles";
    }
    throw std::invalid_argument("bad Condition");
}

inline Condition condition_from_string(const std::string& s) {
    for (Condition c : kAllConditions)
        if (to_string(c) == s) return c;
    throw std::invalid_argument("unknown condition: " + s);
}

/// KYC tier observable under a condition; Baseline sees nothing.
inline KycTier tier_of(Condition c) {
    switch (c) {
        case Condition::Baseline:
        case Condition::NoKyc: return KycTier::NoKyc;
        case Condition::BasicKyc: return KycTier::BasicKyc;
        case Condition::AdvancedKyc: return KycTier::AdvancedKyc;
        case Condition::AdvancedKycCircles: return KycTier::AdvancedKycCircles;
    }
    throw std::invalid_argument("bad Condition");
}

// ── Scenario configuration ──────────────────────────────────────────

enum class ClickModel : int { Deterministic = 0, Bernoulli = 1 };

inline std::string to_string(ClickModel m) {
    return m == ClickModel::Deterministic ? "deterministic" : "bernoulli";
}

inline ClickModel click_model_from_string(const std::string& s) {
    if (s == "deterministic") return ClickModel::Deterministic;
    if (s == "bernoulli") return ClickModel::Bernoulli;
    throw std::invalid_argument("unknown click model: " + s);
}

struct ScenarioConfig {
    std::uint64_t seed = 42;

    // population
    std::size_t user_count = 100;
    int age_min = 18;
    int age_max = 60;
    std::size_t occupation_classes = 6;  // 5..10
    double income_min = 4.0e4;
    double income_max = 1.0e6;

    // world
    std::size_t dimension = 32;
    std::size_t corpus_per_category = 200;
    std::size_t topics_per_category = 4;
    std::size_t account_count = 500;
    std::size_t followed_count = 100;
    double zipf_exponent = 1.1;
    double popularity_scale = 1.0e6;
    double item_feature_noise = 0.35;
    double account_interest_noise = 0.25;
    // per-category overrides: broadcast-style categories have weakly
    // individuated account interests, so circles carry less signal there
    std::map<std::string, double> account_noise_by_category{
        {"Gossip", 0.6}, {"Sharing", 0.1}};
    std::size_t authored_per_user = 3;
    double authored_feature_noise = 0.6;
    std::size_t account_follow_edges = 5;
    double follow_affinity_gamma = 8.0;
    double bucket_taste_alignment = 0.7;
    std::size_t bio_topic_count = 4;
    std::size_t warmup_popular_impressions = 15;
    std::size_t warmup_random_impressions = 10;
    // fraction of users whose preferred topic in a category tracks that
    // category's globally popular topic
    std::map<std::string, double> audience_concentration{
        {"Ad", 0.5}, {"News", 0.6}, {"Gossip", 0.8},
        {"Sharing", 0.12}, {"Tech", 0.08}};

    // ground-truth relevance quantization thresholds on cosine
    double rel_t1 = 0.2;
    double rel_t2 = 0.45;
    double rel_t3 = 0.7;

    // pipeline
    EmbedConfig embed;
    // the cold-start source is allowed to cover a whole desk-scale
    // category so every condition's candidate pool shares one ideal set;
    // the other sources keep the standard cap
    RecallCaps caps{{{Source::ColdStart, 300}}, 50};
    SocialRecallConfig social;
    PropagationConfig propagation;
    RankingWeights weights;
    RerankConfig rerank;
    std::size_t cold_start_k = 300;
    int top_n = 5;
    std::vector<std::size_t> ks{1, 3, 5};
    std::vector<Condition> conditions{kAllConditions.begin(),
                                      kAllConditions.end()};
    ClickModel click_model = ClickModel::Deterministic;
    std::map<int, double> click_probs{{0, 0.02}, {1, 0.1}, {2, 0.45}, {3, 0.8}};

    std::size_t topic_count() const {
        return topics_per_category * kCategoryCount;
    }
};

/// Field-level validation; every error names the offending field.
inline std::vector<std::string> validate_config(const ScenarioConfig& c) {
    std::vector<std::string> e;
    if (c.user_count == 0) e.push_back("user_count: must be positive");
    if (c.age_min < 0 || c.age_max < c.age_min)
        e.push_back("age_min/age_max: need 0 <= age_min <= age_max");
    if (c.occupation_classes < 1)
        e.push_back("occupation_classes: must be positive");
    if (c.income_max < c.income_min)
        e.push_back("income_min/income_max: need income_min <= income_max");
    if (c.dimension == 0) e.push_back("dimension: must be positive");
    if (c.corpus_per_category == 0)
        e.push_back("corpus_per_category: must be positive");
    if (c.topics_per_category == 0)
        e.push_back("topics_per_category: must be positive");
    if (c.followed_count > c.account_count)
        e.push_back("followed_count: exceeds account_count");
    if (c.zipf_exponent <= 0.0) e.push_back("zipf_exponent: must be positive");
    if (c.propagation.damping < 0.0 || c.propagation.damping >= 1.0)
        e.push_back("propagation.damping: must be in [0,1)");
    if (c.propagation.iterations < 0)
        e.push_back("propagation.iterations: must be >= 0");
    if (c.top_n < 1) e.push_back("top_n: must be >= 1");
    if (c.ks.empty()) e.push_back("ks: must not be empty");
    for (std::size_t k : c.ks)
        if (k < 1) e.push_back("ks: every k must be >= 1");
    if (!(c.rel_t1 <= c.rel_t2 && c.rel_t2 <= c.rel_t3))
        e.push_back("rel_t1/rel_t2/rel_t3: thresholds must be nondecreasing");
    if (c.conditions.empty()) e.push_back("conditions: must not be empty");
    return e;
}

// ── World ───────────────────────────────────────────────────────────

/// Everything the pipeline is allowed to read.
struct ObservableWorld {
    ScenarioConfig config;
    EmbeddingSpace space;
    ItemStore corpus;
    SocialGraph graph;
    std::vector<UserProfile> users;  // full context, masked per condition
    DemographicPrior prior;
    std::vector<Interaction> warmup_log;
};

/// Hidden state: never passed to pipeline modules.
struct GroundTruth {
    std::map<UserId, Vec> latent;
};

struct World {
    ObservableWorld observable;
    GroundTruth truth;
};

/// Graded relevance from the hidden latent vector.
inline int relevance_grade(const GroundTruth& truth, const UserId& user,
                           const ContentItem& item, const EmbeddingSpace& space,
                           const ScenarioConfig& cfg) {
    const Vec& latent = truth.latent.at(user);
    double c = cosine(latent, embed_content(item, space, cfg.embed));
    if (c < cfg.rel_t1) return 0;
    if (c < cfg.rel_t2) return 1;
    if (c < cfg.rel_t3) return 2;
    return 3;
}

/// Mask a full-context profile down to what a tier exposes.
inline UserProfile profile_at_tier(const UserProfile& full, KycTier tier) {
    UserProfile p;
    p.user_id = full.user_id;
    p.demographics = full.demographics;
    p.kyc_tier = tier;
    if (tier >= KycTier::BasicKyc) p.declared_tags = full.declared_tags;
    if (tier >= KycTier::AdvancedKyc) {
        p.bio_keywords = full.bio_keywords;
        p.authored_items = full.authored_items;
    }
    if (tier >= KycTier::AdvancedKycCircles) p.followed = full.followed;
    return p;
}

// ── World generation ────────────────────────────────────────────────

inline std::string topic_label(Category c, std::size_t i) {
    return "topic_" + to_string(c) + "_" + std::to_string(i);
}

namespace detail {

inline std::string user_id_of(std::size_t i) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "u%03zu", i);
    return buf;
}

inline std::string account_id_of(std::size_t i) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "a%04zu", i);
    return buf;
}

inline std::string item_id_of(std::size_t i) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "i%05zu", i);
    return buf;
}

/// Ideal item direction for (category, topic): what embed_content
/// produces for a noise-free item of that topic.
inline Vec ideal_direction(const EmbeddingSpace& space, Category c,
                           const std::string& topic, const EmbedConfig& ecfg) {
    Vec v(space.dimension, 0.0);
    axpy(v, ecfg.w_cat, space.category_vec(c));
    axpy(v, ecfg.w_feat, *space.topic_vec(topic));
    return normalized(std::move(v));
}

inline Vec noisy_unit(Rng& rng, const Vec& base, double noise) {
    Vec v = base;
    for (double& x : v) x += noise * rng.normal() / std::sqrt(double(v.size()));
    // per-coordinate noise scaled so the total perturbation norm ~ noise
    return normalized(std::move(v));
}

} // namespace detail

/// Deterministic synthetic world: basis vectors, prior table, accounts,
/// corpus, users with tier-dependent observable context, follow graph
/// and a warmup interaction log. Same seed, same world.
inline World generate_world(const ScenarioConfig& cfg) {
    auto errors = validate_config(cfg);
    if (!errors.empty())
        throw std::invalid_argument("invalid scenario config: " + errors.front());

    World w;
    w.observable.config = cfg;
    const std::size_t dim = cfg.dimension;
    Rng root(cfg.seed);

    // embedding space
    Rng rng_space = root.fork("space");
    EmbeddingSpace& space = w.observable.space;
    space.dimension = dim;
    for (Category c : kAllCategories)
        space.category_basis[to_string(c)] = rng_space.unit_vector(dim);
    for (Category c : kAllCategories)
        for (std::size_t t = 0; t < cfg.topics_per_category; ++t)
            space.topic_basis[topic_label(c, t)] = rng_space.unit_vector(dim);

    // per-category topic popularity: Zipf over topic index, used both
    // for item volume and for concentrated audiences
    auto topic_weights = [&](Category) {
        std::vector<double> ws(cfg.topics_per_category);
        for (std::size_t t = 0; t < ws.size(); ++t)
            ws[t] = 1.0 / std::pow(double(t + 1), 1.0);
        return ws;
    };

    // demographic prior table
    Rng rng_prior = root.fork("prior");
    DemographicPrior prior({18, 30, 45});
    std::vector<std::string> occupations;
    for (std::size_t o = 0; o < cfg.occupation_classes; ++o)
        occupations.push_back("occ_" + std::to_string(o));
    std::map<std::string, std::map<Category, double>> bucket_cat_weights;
    std::map<std::string, std::map<Category, std::string>> bucket_topics;
    for (int band : prior.age_bounds()) {
        for (const auto& occ : occupations) {
            Demographics probe;
            probe.age = band;
            probe.occupation = occ;
            std::string key = prior.bucket_key(probe);
            // random category emphasis plus one characteristic topic per
            // category; user tastes correlate with their bucket below
            std::map<Category, double> cw;
            double sum = 0.0;
            for (Category c : kAllCategories) {
                double u = rng_prior.uniform();
                cw[c] = u * u + 0.05;
                sum += cw[c];
            }
            for (auto& [c, v] : cw) v /= sum;
            bucket_cat_weights[key] = cw;
            DemographicPrior::Distribution dist;
            for (Category c : kAllCategories) {
                std::size_t t = rng_prior.below(cfg.topics_per_category);
                bucket_topics[key][c] = topic_label(c, t);
                dist[to_string(c)] = 0.7 * cw[c];
                // topic-level mass mirrors how tastes are distributed in
                // this bucket: audience concentration on the head topic,
                // bucket alignment on the characteristic topic, the rest
                // spread evenly
                double conc = cfg.audience_concentration.at(to_string(c));
                double topic_mass = 0.3 * cw[c];
                dist[topic_label(c, 0)] += topic_mass * conc;
                dist[topic_label(c, t)] +=
                    topic_mass * (1.0 - conc) * cfg.bucket_taste_alignment;
                double rest = topic_mass * (1.0 - conc) *
                              (1.0 - cfg.bucket_taste_alignment) /
                              double(cfg.topics_per_category);
                for (std::size_t tt = 0; tt < cfg.topics_per_category; ++tt)
                    dist[topic_label(c, tt)] += rest;
            }
            prior.set_bucket(key, dist);
        }
    }
    w.observable.prior = prior;

    // accounts
    Rng rng_acc = root.fork("accounts");
    SocialGraph& graph = w.observable.graph;
    std::vector<std::pair<Category, std::string>> account_topic(cfg.account_count);
    for (std::size_t i = 0; i < cfg.account_count; ++i) {
        Account a;
        a.account_id = detail::account_id_of(i);
        double r = rng_acc.uniform();
        a.kind = r < 0.6 ? AccountKind::Creator
                         : (r < 0.8 ? AccountKind::Enterprise
                                    : AccountKind::Individual);
        Category c = kAllCategories[rng_acc.below(kCategoryCount)];
        std::size_t t = rng_acc.below(cfg.topics_per_category);
        std::string topic = topic_label(c, t);
        account_topic[i] = {c, topic};
        double acc_noise = cfg.account_interest_noise;
        if (auto it = cfg.account_noise_by_category.find(to_string(c));
            it != cfg.account_noise_by_category.end())
            acc_noise = it->second;
        a.interest_vector = detail::noisy_unit(
            rng_acc, detail::ideal_direction(space, c, topic, cfg.embed),
            acc_noise);
        graph.add_account(std::move(a));
    }
    // account-to-account follow edges by interest affinity
    for (std::size_t i = 0; i < cfg.account_count; ++i) {
        const Account& me = graph.accounts()[i];
        std::vector<double> ws(cfg.account_count, 0.0);
        for (std::size_t j = 0; j < cfg.account_count; ++j) {
            if (j == i) continue;
            double sim =
                cosine(me.interest_vector, graph.accounts()[j].interest_vector);
            ws[j] = std::max(0.0, sim) + 0.01;
        }
        std::set<std::size_t> picked;
        std::size_t budget = std::min(cfg.account_follow_edges,
                                      cfg.account_count - 1);
        while (picked.size() < budget) picked.insert(rng_acc.weighted(ws));
        for (std::size_t j : picked)
            graph.add_edge(me.account_id, graph.accounts()[j].account_id);
    }

    // corpus: per category, items with Zipf-ranked popularity where
    // popular slots lean toward popular topics (mass-market head,
    // niche long tail)
    Rng rng_items = root.fork("items");
    std::vector<ContentItem> items;
    std::size_t item_counter = 0;
    std::map<std::pair<Category, std::string>, std::vector<std::size_t>>
        accounts_by_topic;
    for (std::size_t i = 0; i < cfg.account_count; ++i)
        accounts_by_topic[account_topic[i]].push_back(i);
    for (Category c : kAllCategories) {
        auto tw = topic_weights(c);
        struct Draft {
            std::string topic;
            Vec features;
            AccountId author;
            Tick created;
            double rank_key;
        };
        std::vector<Draft> drafts;
        for (std::size_t n = 0; n < cfg.corpus_per_category; ++n) {
            std::size_t t = rng_items.weighted(tw);
            std::string topic = topic_label(c, t);
            Draft d;
            d.topic = topic;
            d.features = detail::noisy_unit(rng_items, *space.topic_vec(topic),
                                            cfg.item_feature_noise);
            auto it = accounts_by_topic.find({c, topic});
            if (it != accounts_by_topic.end() && !it->second.empty()) {
                d.author = detail::account_id_of(
                    it->second[rng_items.below(it->second.size())]);
            } else {
                d.author = detail::account_id_of(rng_items.below(cfg.account_count));
            }
            d.created = static_cast<Tick>(rng_items.below(1000));
            // popularity rank key: popular topics claim the head
            d.rank_key = double(t) + rng_items.uniform() * 1.5;
            drafts.push_back(std::move(d));
        }
        std::sort(drafts.begin(), drafts.end(),
                  [](const Draft& a, const Draft& b) {
                      return a.rank_key < b.rank_key;
                  });
        for (std::size_t r = 0; r < drafts.size(); ++r) {
            ContentItem it;
            it.item_id = detail::item_id_of(item_counter++);
            it.category = c;
            it.features = std::move(drafts[r].features);
            it.author_id = std::move(drafts[r].author);
            it.created_at = drafts[r].created;
            it.popularity = static_cast<std::int64_t>(std::llround(
                cfg.popularity_scale /
                std::pow(double(r + 1), cfg.zipf_exponent)));
            if (it.popularity < 1) it.popularity = 1;
            items.push_back(std::move(it));
        }
    }

    // users: hidden latent + tier-dependent observables
    Rng rng_users = root.fork("users");
    std::vector<std::string> regions{"north", "south", "east", "west", "central"};
    std::vector<std::string> genders{"female", "male", "other"};
    std::vector<std::string> all_topics;
    for (Category c : kAllCategories)
        for (std::size_t t = 0; t < cfg.topics_per_category; ++t)
            all_topics.push_back(topic_label(c, t));

    struct UserDraft {
        UserProfile profile;
        Vec latent;
        std::map<Category, std::string> preferred_topic;
        std::vector<std::pair<double, Category>> affinity;  // sorted desc
    };
    std::vector<UserDraft> drafts;

    for (std::size_t i = 0; i < cfg.user_count; ++i) {
        UserDraft d;
        UserProfile& p = d.profile;
        p.user_id = detail::user_id_of(i);
        p.kyc_tier = KycTier::AdvancedKycCircles;
        p.demographics.age =
            static_cast<int>(rng_users.range(cfg.age_min, cfg.age_max));
        p.demographics.occupation =
            occupations[rng_users.below(occupations.size())];
        p.demographics.region = regions[rng_users.below(regions.size())];
        p.demographics.income =
            cfg.income_min *
            std::pow(cfg.income_max / cfg.income_min, rng_users.uniform());
        p.demographics.gender = genders[rng_users.below(genders.size())];

        // category affinities: half demographic bucket, half individual,
        // sharpened so each user has one or two dominant categories
        std::string key = prior.bucket_key(p.demographics);
        const auto& bucket_w = bucket_cat_weights.at(key);
        std::map<Category, double> aff;
        double s2 = 0.0;
        for (Category c : kAllCategories) {
            double u = rng_users.uniform();
            double mix = 0.5 * bucket_w.at(c) * double(kCategoryCount) +
                         0.5 * (u * u * 2.0 + 0.1);
            mix = mix * mix;
            aff[c] = mix;
            s2 += mix * mix;
        }
        for (auto& [c, v] : aff) v /= std::sqrt(s2);  // sum of squares = 1

        // preferred topic per category: concentrated audiences track the
        // category's head topic; otherwise tastes lean toward the
        // demographic bucket's characteristic topic, else spread uniformly
        for (Category c : kAllCategories) {
            double conc = cfg.audience_concentration.at(to_string(c));
            double u = rng_users.uniform();
            if (u < conc) {
                d.preferred_topic[c] = topic_label(c, 0);
            } else if (rng_users.uniform() < cfg.bucket_taste_alignment) {
                d.preferred_topic[c] = bucket_topics.at(key).at(c);
            } else {
                d.preferred_topic[c] =
                    topic_label(c, rng_users.below(cfg.topics_per_category));
            }
        }

        // latent = sum over categories of affinity * ideal direction
        Vec latent(dim, 0.0);
        for (Category c : kAllCategories)
            axpy(latent, aff[c],
                 detail::ideal_direction(space, c, d.preferred_topic[c],
                                         cfg.embed));
        d.latent = normalized(std::move(latent));

        for (Category c : kAllCategories) d.affinity.push_back({aff[c], c});
        std::sort(d.affinity.begin(), d.affinity.end(),
                  [](auto& a, auto& b) { return a.first > b.first; });

        // declared tags: top-2 latent topics with one random swap
        std::string tag1 = d.preferred_topic[d.affinity[0].second];
        std::string tag2 = all_topics[rng_users.below(all_topics.size())];
        p.declared_tags = {tag1, tag2};
        if (p.declared_tags.size() < 2)
            p.declared_tags.insert(d.preferred_topic[d.affinity[1].second]);

        // bio keywords: preferred topics of the strongest categories
        for (std::size_t j = 0;
             j < cfg.bio_topic_count && j < d.affinity.size(); ++j)
            p.bio_keywords.insert(d.preferred_topic[d.affinity[j].second]);

        drafts.push_back(std::move(d));
    }

    // authored items: sampled near the author's strongest interests
    Rng rng_auth = root.fork("authored");
    for (auto& d : drafts) {
        for (std::size_t a = 0; a < cfg.authored_per_user; ++a) {
            Category c = d.affinity[a % 2].second;
            const std::string& topic = d.preferred_topic[c];
            ContentItem it;
            it.item_id = detail::item_id_of(item_counter++);
            it.category = c;
            it.features = detail::noisy_unit(rng_auth, *space.topic_vec(topic),
                                             cfg.authored_feature_noise);
            it.author_id = d.profile.user_id;
            it.popularity = 1 + static_cast<std::int64_t>(rng_auth.below(5));
            it.created_at = static_cast<Tick>(rng_auth.below(1000));
            d.profile.authored_items.push_back(it.item_id);
            items.push_back(std::move(it));
        }
    }

    w.observable.corpus = ItemStore(std::move(items));
    space.global_prior =
        global_prior_of(w.observable.corpus, space, cfg.embed);

    // followed accounts: the follow budget is spread across categories
    // (users keep a few circles per interest area), and within each
    // category accounts are sampled by latent-interest affinity
    Rng rng_follow = root.fork("follow");
    std::map<Category, std::vector<std::size_t>> accounts_by_cat;
    for (std::size_t j = 0; j < cfg.account_count; ++j)
        accounts_by_cat[account_topic[j].first].push_back(j);
    for (auto& d : drafts) {
        std::set<std::size_t> picked;
        std::size_t spent = 0;
        for (std::size_t ci = 0; ci < kCategoryCount; ++ci) {
            Category c = kAllCategories[ci];
            const auto& pool = accounts_by_cat[c];
            std::size_t share =
                (cfg.followed_count * (ci + 1)) / kCategoryCount - spent;
            share = std::min(share, pool.size());
            spent += share;
            std::vector<double> ws(pool.size());
            for (std::size_t p = 0; p < pool.size(); ++p) {
                double sim = cosine(d.latent,
                                    graph.accounts()[pool[p]].interest_vector);
                ws[p] = std::pow(std::max(sim, 0.01),
                                 cfg.follow_affinity_gamma);
            }
            std::size_t got = 0;
            while (got < share) {
                std::size_t p = rng_follow.weighted(ws);
                if (picked.insert(pool[p]).second) ++got;
                ws[p] = 0.0;
            }
        }
        // if some category pool ran short, top up from anywhere
        while (picked.size() < std::min(cfg.followed_count,
                                        cfg.account_count))
            picked.insert(rng_follow.below(cfg.account_count));
        for (std::size_t j : picked)
            d.profile.followed.push_back(detail::account_id_of(j));
        std::sort(d.profile.followed.begin(), d.profile.followed.end());
    }

    for (auto& d : drafts) {
        w.truth.latent[d.profile.user_id] = std::move(d.latent);
        w.observable.users.push_back(std::move(d.profile));
    }

    // warmup log: per user and category, impressions over the popular
    // head plus a few random items; deterministic clicks at grade >= 2
    Rng rng_warm = root.fork("warmup");
    const ItemStore& corpus = w.observable.corpus;
    Tick tick = 0;
    for (const auto& u : w.observable.users) {
        for (Category c : kAllCategories) {
            std::vector<ItemId> shown = popularity_recall(
                corpus, c, cfg.warmup_popular_impressions);
            auto pool = corpus.in_category(c);
            for (std::size_t r = 0; r < cfg.warmup_random_impressions &&
                                    !pool.empty();
                 ++r) {
                const ContentItem* pick = pool[rng_warm.below(pool.size())];
                if (std::find(shown.begin(), shown.end(), pick->item_id) ==
                    shown.end())
                    shown.push_back(pick->item_id);
            }
            int pos = 1;
            for (const auto& id : shown) {
                w.observable.warmup_log.push_back(
                    {u.user_id, id, InteractionKind::Impression, pos, tick});
                int g = relevance_grade(w.truth, u.user_id, corpus.item(id),
                                        space, cfg);
                if (g >= 2)
                    w.observable.warmup_log.push_back(
                        {u.user_id, id, InteractionKind::Click, pos, tick});
                ++pos;
                ++tick;
            }
        }
    }

    return w;
}

// ── Condition runner ────────────────────────────────────────────────

struct CellResult {
    Condition condition;
    Category category;
    std::vector<RankedList> lists;       // one per user, user order
    std::vector<UserResult> users;       // evaluated rows, user order
    std::vector<Interaction> log;        // impressions + clicks this run
};

struct RunResult {
    std::map<std::pair<std::string, Category>, std::vector<UserResult>> results;
    std::vector<CellResult> cells;
};

namespace detail {

inline std::vector<ItemId> filter_to_store(const std::vector<ItemId>& ids,
                                           const ItemStore& store) {
    std::vector<ItemId> out;
    for (const auto& id : ids)
        if (store.contains(id)) out.push_back(id);
    return out;
}

/// Baseline: popularity + recency, identical for every user.
inline RankedList baseline_rank(const UserId& user, const ItemStore& store,
                                std::size_t pool_k, int n) {
    auto ids = popularity_recall(store, std::nullopt, pool_k);
    double max_pop = 1.0;
    Tick min_t = 0, max_t = 0;
    bool first = true;
    for (const auto& id : ids) {
        const auto& it = store.item(id);
        max_pop = std::max(max_pop, double(it.popularity));
        if (first || it.created_at < min_t) min_t = it.created_at;
        if (first || it.created_at > max_t) max_t = it.created_at;
        first = false;
    }
    double span = double(max_t - min_t);
    RankedList out;
    out.user_id = user;
    out.cutoff = n;
    for (const auto& id : ids) {
        const auto& it = store.item(id);
        RankedEntry e;
        e.item_id = id;
        double rec = span > 0.0 ? double(it.created_at - min_t) / span : 0.0;
        e.relevance_score = 0.8 * double(it.popularity) / max_pop + 0.2 * rec;
        e.total_score = e.relevance_score;
        out.entries.push_back(e);
    }
    std::sort(out.entries.begin(), out.entries.end(),
              [](const RankedEntry& a, const RankedEntry& b) {
                  if (a.total_score != b.total_score)
                      return a.total_score > b.total_score;
                  return a.item_id < b.item_id;
              });
    if (out.entries.size() > std::size_t(n)) out.entries.resize(std::size_t(n));
    return out;
}

} // namespace detail

/// Candidate set for one (user, condition) inside one category store.
/// Reads only observable state. The candidate pool (pre-truncation) is
/// returned through `pool_out` for nDCG normalization.
inline RankedList run_user_condition(
    const ObservableWorld& world, const ItemStore& store,
    const EmbeddingIndex& index, const ExposureStats& stats,
    const ExplorationThresholds& thresholds, const SocialGraph& graph,
    const UserProfile& full_profile, Condition cond,
    std::vector<ItemId>* pool_out = nullptr) {
    const ScenarioConfig& cfg = world.config;

    if (cond == Condition::Baseline) {
        auto list = detail::baseline_rank(full_profile.user_id, store,
                                          cfg.caps.cap_for(Source::Popularity),
                                          cfg.top_n);
        if (pool_out) {
            pool_out->clear();
            auto ids = popularity_recall(store, std::nullopt,
                                         cfg.caps.cap_for(Source::Popularity));
            *pool_out = ids;
        }
        return list;
    }

    UserProfile profile = profile_at_tier(full_profile, tier_of(cond));
    Vec demo = profile.kyc_tier >= KycTier::BasicKyc
                   ? demographic_prior_vector(profile, world.prior, world.space)
                   : Vec(world.space.dimension, 0.0);
    Vec user_vec = embed_user(profile, world.space, graph, world.corpus, demo,
                              cfg.embed);

    std::map<Source, std::vector<ItemId>> lists;
    lists[Source::ColdStart] =
        cold_start_recall(profile, world.prior, store, cfg.cold_start_k);

    if (cond >= Condition::BasicKyc)
        lists[Source::Knn] =
            knn_recall(user_vec, index, cfg.caps.cap_for(Source::Knn));

    if (cond >= Condition::AdvancedKyc) {
        std::vector<ItemId> history;
        for (const auto& x : world.warmup_log)
            if (x.kind == InteractionKind::Click && x.user_id == profile.user_id)
                history.push_back(x.item_id);
        lists[Source::Cooccur] = detail::filter_to_store(
            cooccurrence_recall(history, world.warmup_log,
                                cfg.caps.cap_for(Source::Cooccur)),
            store);
    }

    if (cond == Condition::AdvancedKycCircles) {
        auto one = social_recall(profile, graph, store, 1,
                                 cfg.caps.cap_for(Source::Social1), cfg.social);
        auto two_full = social_recall(profile, graph, store, 2,
                                      cfg.caps.cap_for(Source::Social1) +
                                          cfg.caps.cap_for(Source::Social2),
                                      cfg.social);
        std::unordered_set<ItemId> one_set(one.begin(), one.end());
        std::vector<ItemId> two;
        for (const auto& id : two_full)
            if (!one_set.count(id)) two.push_back(id);
        lists[Source::Social1] = std::move(one);
        lists[Source::Social2] = std::move(two);
    }

    CandidateSet cands = merge_candidates(lists, cfg.caps, profile);
    if (pool_out) {
        pool_out->clear();
        for (const auto& c : cands.candidates) pool_out->push_back(c.item_id);
    }

    RankedList ranked = rank(profile, user_vec, cands, store, index, stats,
                             thresholds, cfg.weights, cfg.top_n);
    if (cfg.rerank.enabled)
        ranked = round_robin(ranked, store, index, world.space, profile,
                             cfg.top_n, cfg.rerank);
    return ranked;
}

/// Run one condition over every (user, category) cell, recording
/// impressions, clicks and evaluation rows. Only the click model
/// touches ground truth; ranked lists are a pure function of the
/// observable world.
inline std::vector<CellResult> run_condition(const World& w, Condition cond) {
    const ObservableWorld& world = w.observable;
    const ScenarioConfig& cfg = world.config;
    ExposureStats stats = ExposureStats::from_log(world.warmup_log);

    SocialGraph propagated;
    const SocialGraph* graph = &world.graph;
    if (cond == Condition::AdvancedKycCircles) {
        propagated = propagated_graph(world.graph, cfg.propagation);
        graph = &propagated;
    }

    // per-user warmup click history labels for serendipity
    std::map<UserId, std::vector<ItemId>> warm_clicks;
    for (const auto& x : world.warmup_log)
        if (x.kind == InteractionKind::Click)
            warm_clicks[x.user_id].push_back(x.item_id);

    std::vector<CellResult> out;
    Rng click_rng = Rng(cfg.seed).fork("clicks:" + to_string(cond));
    Tick tick = 0;
    for (Category c : kAllCategories) {
        ItemStore store = world.corpus.filtered(c);
        EmbeddingIndex index(store, world.space, cfg.embed);
        ExplorationThresholds thresholds =
            exploration_thresholds(store, stats, cfg.weights);

        CellResult cell;
        cell.condition = cond;
        cell.category = c;
        for (const auto& full : world.users) {
            std::vector<ItemId> pool;
            RankedList list =
                run_user_condition(world, store, index, stats, thresholds,
                                   *graph, full, cond, &pool);

            UserResult ur;
            ur.user_id = full.user_id;
            for (const auto& id : pool)
                ur.candidate_grades.push_back(relevance_grade(
                    w.truth, full.user_id, world.corpus.item(id), world.space,
                    cfg));

            UserProfile masked = profile_at_tier(full, tier_of(cond));
            auto it_clicks = warm_clicks.find(full.user_id);
            if (it_clicks != warm_clicks.end()) {
                for (const auto& id : it_clicks->second) {
                    const auto& item = world.corpus.item(id);
                    ur.history.insert(seed_interest_of(
                        item, embed_content(item, world.space, cfg.embed),
                        world.space, masked, cfg.rerank));
                }
            }

            int pos = 1;
            for (const auto& e : list.entries) {
                const auto& item = world.corpus.item(e.item_id);
                EvalEntry ev;
                ev.item_id = e.item_id;
                ev.grade = relevance_grade(w.truth, full.user_id, item,
                                           world.space, cfg);
                ev.seed_label = seed_interest_of(
                    item, embed_content(item, world.space, cfg.embed),
                    world.space, masked, cfg.rerank);
                cell.log.push_back({full.user_id, e.item_id,
                                    InteractionKind::Impression, pos, tick});
                bool clicked;
                if (cfg.click_model == ClickModel::Deterministic) {
                    clicked = ev.grade >= 2;
                } else {
                    double p = cfg.click_probs.count(ev.grade)
                                   ? cfg.click_probs.at(ev.grade)
                                   : 0.0;
                    clicked = click_rng.uniform() < p;
                }
                if (clicked)
                    cell.log.push_back({full.user_id, e.item_id,
                                        InteractionKind::Click, pos, tick});
                ev.clicked = clicked;
                ur.entries.push_back(std::move(ev));
                ++pos;
                ++tick;
            }
            cell.lists.push_back(std::move(list));
            cell.users.push_back(std::move(ur));
        }
        out.push_back(std::move(cell));
    }
    return out;
}

/// Run every requested condition and collect the metric inputs.
inline RunResult run_experiment(const World& w) {
    RunResult r;
    for (Condition cond : w.observable.config.conditions) {
        auto cells = run_condition(w, cond);
        for (auto& cell : cells) {
            r.results[{to_string(cond), cell.category}] = cell.users;
            r.cells.push_back(std::move(cell));
        }
    }
    return r;
}

} // namespace kycrec
