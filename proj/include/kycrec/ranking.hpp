#pragma once

#include <algorithm>
#include <cstdint>
#include <vector>

#include "kycrec/core.hpp"
#include "kycrec/corpus.hpp"
#include "kycrec/recall.hpp"

namespace kycrec {

struct RankingWeights {
    double w_rel = 1.0;
    double w_social = 0.25;
    double w_explore = 0.15;             // exploration bonus beta
    double exposure_percentile = 20.0;   // tau: impression-count percentile
    double quality_percentile = 50.0;    // quality floor: popularity percentile
};

/// Resolved thresholds for the exploration bonus on one corpus snapshot.
struct ExplorationThresholds {
    std::int64_t exposure_threshold = 0;  // tau, impressions
    std::int64_t quality_floor = 0;       // minimum popularity
};

namespace detail {

// nearest-rank percentile over a sorted copy
inline std::int64_t percentile(std::vector<std::int64_t> xs, double pct) {
    if (xs.empty()) return 0;
    std::sort(xs.begin(), xs.end());
    double rank = pct / 100.0 * static_cast<double>(xs.size());
    std::size_t idx = rank <= 1.0 ? 0 : static_cast<std::size_t>(std::ceil(rank)) - 1;
    if (idx >= xs.size()) idx = xs.size() - 1;
    return xs[idx];
}

} // namespace detail

inline ExplorationThresholds exploration_thresholds(
    const ItemStore& corpus, const ExposureStats& stats,
    const RankingWeights& w = {}) {
    std::vector<std::int64_t> impressions;
    std::vector<std::int64_t> pops;
    impressions.reserve(corpus.size());
    pops.reserve(corpus.size());
    for (const auto& it : corpus.items()) {
        impressions.push_back(stats.count(it.item_id));
        pops.push_back(it.popularity);
    }
    return {detail::percentile(std::move(impressions), w.exposure_percentile),
            detail::percentile(std::move(pops), w.quality_percentile)};
}

/// Score one candidate: relevance + social boost + exploration bonus.
/// Relevance is 0 for a zero user vector. social1 beats social2; an
/// underexposed item only earns the bonus if its popularity clears the
/// quality floor.
inline RankedEntry score(const Vec& user_vec, const ContentItem& item,
                         const Vec& item_embedding,
                         const std::set<Source>& tags,
                         const ExposureStats& stats,
                         const ExplorationThresholds& thresholds,
                         const RankingWeights& w = {}) {
    RankedEntry e;
    e.item_id = item.item_id;
    e.relevance_score =
        is_zero(user_vec) ? 0.0 : w.w_rel * cosine(user_vec, item_embedding);
    if (tags.count(Source::Social1))
        e.social_boost = w.w_social;
    else if (tags.count(Source::Social2))
        e.social_boost = w.w_social / 2.0;
    if (stats.count(item.item_id) < thresholds.exposure_threshold &&
        item.popularity >= thresholds.quality_floor)
        e.exploration_bonus = w.w_explore;
    e.total_score = e.relevance_score + e.social_boost + e.exploration_bonus;
    return e;
}

/// Score every candidate, sort by total desc (ties by ascending id) and
/// truncate to N.
inline RankedList rank(const UserProfile& user, const Vec& user_vec,
                       const CandidateSet& candidates,
                       const ItemStore& corpus, const EmbeddingIndex& index,
                       const ExposureStats& stats,
                       const ExplorationThresholds& thresholds,
                       const RankingWeights& w, int n) {
    if (n < 1) throw std::invalid_argument("rank: N must be >= 1");
    RankedList out;
    out.user_id = user.user_id;
    out.cutoff = n;
    out.entries.reserve(candidates.candidates.size());
    for (const auto& c : candidates.candidates) {
        if (!corpus.contains(c.item_id)) continue;
        const Vec* emb = index.embedding_of(c.item_id);
        if (!emb) continue;
        out.entries.push_back(score(user_vec, corpus.item(c.item_id), *emb,
                                    c.sources, stats, thresholds, w));
    }
    std::sort(out.entries.begin(), out.entries.end(),
              [](const RankedEntry& a, const RankedEntry& b) {
                  if (a.total_score != b.total_score)
                      return a.total_score > b.total_score;
                  return a.item_id < b.item_id;
              });
    if (out.entries.size() > static_cast<std::size_t>(n))
        out.entries.resize(static_cast<std::size_t>(n));
    return out;
}

} // namespace kycrec
