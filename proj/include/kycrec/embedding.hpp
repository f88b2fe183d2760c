#pragma once

#include <map>
#include <stdexcept>
#include <string>

#include "kycrec/core.hpp"
#include "kycrec/corpus.hpp"
#include "kycrec/vecmath.hpp"

namespace kycrec {

struct EmbedConfig {
    double w_cat = 0.5;            // content: category-basis weight
    double w_feat = 0.5;           // content: raw-feature weight
    double w_basic_tags = 0.7;     // basic tier: declared-tag centroid
    double w_basic_demo = 0.3;     // basic tier: demographic prior
    double w_adv_basic = 0.4;      // advanced tier: basic vector
    double w_adv_bio = 0.3;        // advanced tier: bio-keyword centroid
    double w_adv_authored = 0.3;   // advanced tier: authored-item centroid
    double w_circ_adv = 0.6;       // circles tier: advanced vector
    double w_circ_followed = 0.4;  // circles tier: followed-account centroid
};

/// Shared embedding space: unit basis vectors per topic label and per
/// category, plus the popularity-weighted global content prior.
struct EmbeddingSpace {
    std::size_t dimension = 32;
    std::map<std::string, Vec> topic_basis;
    std::map<std::string, Vec> category_basis;  // keyed by category name
    Vec global_prior;

    const Vec& category_vec(Category c) const {
        auto it = category_basis.find(to_string(c));
        if (it == category_basis.end())
            throw std::invalid_argument("no basis for category " + to_string(c));
        return it->second;
    }

    const Vec* topic_vec(const std::string& label) const {
        auto it = topic_basis.find(label);
        return it == topic_basis.end() ? nullptr : &it->second;
    }
};

/// L2-normalized blend of the item's category basis and its features.
inline Vec embed_content(const ContentItem& item, const EmbeddingSpace& space,
                         const EmbedConfig& cfg = {}) {
    if (item.features.size() != space.dimension)
        throw std::invalid_argument("embed_content: feature dimension " +
                                    std::to_string(item.features.size()) +
                                    " != " + std::to_string(space.dimension));
    Vec v(space.dimension, 0.0);
    axpy(v, cfg.w_cat, space.category_vec(item.category));
    axpy(v, cfg.w_feat, item.features);
    return normalized(std::move(v));
}

/// Popularity-weighted mean of all content embeddings, renormalized.
/// Empty corpus gives the zero vector.
inline Vec global_prior_of(const ItemStore& corpus, const EmbeddingSpace& space,
                           const EmbedConfig& cfg = {}) {
    Vec acc(space.dimension, 0.0);
    double total = 0.0;
    for (const auto& item : corpus.items()) {
        double w = static_cast<double>(item.popularity);
        if (w <= 0.0) continue;
        axpy(acc, w, embed_content(item, space, cfg));
        total += w;
    }
    if (total <= 0.0) return Vec(space.dimension, 0.0);
    return normalized(std::move(acc));
}

namespace detail {

/// Weighted blend of components, skipping zero vectors and
/// renormalizing the weights over the components actually present.
inline Vec blend(std::size_t dim,
                 const std::vector<std::pair<double, Vec>>& parts) {
    Vec acc(dim, 0.0);
    double wsum = 0.0;
    for (const auto& [w, v] : parts) {
        if (w <= 0.0 || is_zero(v)) continue;
        wsum += w;
    }
    if (wsum <= 0.0) return acc;
    for (const auto& [w, v] : parts) {
        if (w <= 0.0 || is_zero(v)) continue;
        axpy(acc, w / wsum, v);
    }
    return normalized(std::move(acc));
}

inline Vec topic_centroid(const EmbeddingSpace& space,
                          const std::set<std::string>& labels) {
    Vec acc(space.dimension, 0.0);
    std::size_t n = 0;
    for (const auto& l : labels) {
        if (const Vec* t = space.topic_vec(l)) {
            axpy(acc, 1.0, *t);
            ++n;
        }
    }
    if (n == 0) return acc;
    return normalized(std::move(acc));
}

} // namespace detail

/// Tier-dependent user embedding. Higher tiers blend in more of the
/// user's observable context; every result is unit-norm or exactly zero
/// (zero only when the corpus itself is empty at NoKyc).
inline Vec embed_user(const UserProfile& profile, const EmbeddingSpace& space,
                      const SocialGraph& graph, const ItemStore& corpus,
                      const Vec& demographic_prior,
                      const EmbedConfig& cfg = {}) {
    const std::size_t dim = space.dimension;

    if (profile.kyc_tier == KycTier::NoKyc) return space.global_prior;

    Vec tags = detail::topic_centroid(space, profile.declared_tags);
    Vec basic = detail::blend(dim, {{cfg.w_basic_tags, tags},
                                    {cfg.w_basic_demo, demographic_prior}});
    if (profile.kyc_tier == KycTier::BasicKyc) return basic;

    Vec bio = detail::topic_centroid(space, profile.bio_keywords);
    std::vector<Vec> authored;
    for (const auto& id : profile.authored_items)
        if (corpus.contains(id))
            authored.push_back(embed_content(corpus.item(id), space, cfg));
    Vec authored_centroid = normalized(mean_of(authored, dim));
    Vec advanced = detail::blend(dim, {{cfg.w_adv_basic, basic},
                                       {cfg.w_adv_bio, bio},
                                       {cfg.w_adv_authored, authored_centroid}});
    if (profile.kyc_tier == KycTier::AdvancedKyc) return advanced;

    std::vector<Vec> followed;
    for (const auto& id : profile.followed)
        if (graph.has_account(id))
            followed.push_back(graph.account(id).interest_vector);
    Vec circle = normalized(mean_of(followed, dim));
    return detail::blend(dim, {{cfg.w_circ_adv, advanced},
                               {cfg.w_circ_followed, circle}});
}

// ── Embedding-space serialization ───────────────────────────────────

inline Json to_json(const EmbeddingSpace& s) {
    return Json{{"dimension", s.dimension},
                {"topic_basis", s.topic_basis},
                {"category_basis", s.category_basis},
                {"global_prior", s.global_prior}};
}

inline EmbeddingSpace space_from_json(const Json& j) {
    EmbeddingSpace s;
    s.dimension = j.at("dimension").get<std::size_t>();
    s.topic_basis = j.at("topic_basis").get<std::map<std::string, Vec>>();
    s.category_basis = j.at("category_basis").get<std::map<std::string, Vec>>();
    s.global_prior = j.at("global_prior").get<Vec>();
    return s;
}

} // namespace kycrec
