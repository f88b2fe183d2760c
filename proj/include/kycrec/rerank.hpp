#pragma once

#include <algorithm>
#include <map>
#include <string>
#include <unordered_map>
#include <vector>

#include "kycrec/core.hpp"
#include "kycrec/embedding.hpp"
#include "kycrec/recall.hpp"

namespace kycrec {

struct RerankConfig {
    bool enabled = true;
    double tag_match_threshold = 0.5;  // cosine floor for tag assignment
};

/// Seed interest of one item: the best-matching declared tag when its
/// topic vector is close enough to the item embedding, otherwise the
/// item's category. Every item maps to exactly one label.
inline std::string seed_interest_of(const ContentItem& item,
                                    const Vec& item_embedding,
                                    const EmbeddingSpace& space,
                                    const UserProfile& profile,
                                    const RerankConfig& cfg = {}) {
    std::string best_tag;
    double best_sim = cfg.tag_match_threshold;
    for (const auto& tag : profile.declared_tags) {
        const Vec* t = space.topic_vec(tag);
        if (!t) continue;
        double sim = cosine(item_embedding, *t);
        if (sim > best_sim || (sim == best_sim && !best_tag.empty() && tag < best_tag)) {
            best_sim = sim;
            best_tag = tag;
        }
    }
    if (!best_tag.empty()) return best_tag;
    return to_string(item.category);
}

/// Round-robin diversity pass over seed-interest groups.
///
/// Entries are grouped by label preserving in-group score order; groups
/// are visited in order of their best member's score, one entry per
/// group per cycle, skipping exhausted groups, until N entries are out.
/// The input must already be sorted by score.
inline RankedList round_robin(const RankedList& list,
                              const std::vector<std::string>& labels, int n) {
    if (labels.size() != list.entries.size())
        throw std::invalid_argument("round_robin: one label per entry required");

    RankedList out;
    out.user_id = list.user_id;
    out.cutoff = n;
    if (list.entries.empty() || n <= 0) return out;

    // groups in first-seen order == order of their best member's score,
    // because the input is score-sorted
    std::vector<std::vector<const RankedEntry*>> groups;
    std::unordered_map<std::string, std::size_t> group_of;
    for (std::size_t i = 0; i < list.entries.size(); ++i) {
        auto [it, inserted] = group_of.try_emplace(labels[i], groups.size());
        if (inserted) groups.emplace_back();
        groups[it->second].push_back(&list.entries[i]);
    }

    const std::size_t want =
        std::min(static_cast<std::size_t>(n), list.entries.size());
    std::vector<std::size_t> next(groups.size(), 0);
    while (out.entries.size() < want) {
        for (std::size_t g = 0; g < groups.size() && out.entries.size() < want; ++g) {
            if (next[g] < groups[g].size())
                out.entries.push_back(*groups[g][next[g]++]);
        }
    }
    return out;
}

/// Convenience overload computing labels from the embedding index.
inline RankedList round_robin(const RankedList& list, const ItemStore& corpus,
                              const EmbeddingIndex& index,
                              const EmbeddingSpace& space,
                              const UserProfile& profile, int n,
                              const RerankConfig& cfg = {}) {
    std::vector<std::string> labels;
    labels.reserve(list.entries.size());
    for (const auto& e : list.entries) {
        const Vec* emb = index.embedding_of(e.item_id);
        Vec fallback;
        if (!emb) {
            fallback = embed_content(corpus.item(e.item_id), space);
            emb = &fallback;
        }
        labels.push_back(
            seed_interest_of(corpus.item(e.item_id), *emb, space, profile, cfg));
    }
    return round_robin(list, labels, n);
}

} // namespace kycrec
