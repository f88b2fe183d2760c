#pragma once

#include <algorithm>
#include <map>
#include <set>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "kycrec/core.hpp"
#include "kycrec/corpus.hpp"
#include "kycrec/embedding.hpp"

namespace kycrec {

enum class Source : int {
    Popularity = 0,
    Knn = 1,
    Cooccur = 2,
    Social1 = 3,
    Social2 = 4,
    ColdStart = 5
};

inline std::string to_string(Source s) {
    switch (s) {
        case Source::Popularity: return "popularity";
        case Source::Knn: return "knn";
        case Source::Cooccur: return "cooccur";
        case Source::Social1: return "social1";
        case Source::Social2: return "social2";
        case Source::ColdStart: return "coldstart";
    }
    throw std::invalid_argument("bad Source");
}

struct Candidate {
    ItemId item_id;
    std::set<Source> sources;

    bool operator==(const Candidate&) const = default;
};

struct CandidateSet {
    UserId user_id;
    std::vector<Candidate> candidates;  // sorted by item_id

    bool operator==(const CandidateSet&) const = default;
};

struct RecallCaps {
    std::map<Source, std::size_t> per_source;
    std::size_t default_cap = 50;

    std::size_t cap_for(Source s) const {
        auto it = per_source.find(s);
        return it == per_source.end() ? default_cap : it->second;
    }
};

// ── Popularity ──────────────────────────────────────────────────────

/// Top-k by popularity desc, ties by ascending item_id; optional
/// category filter applied first.
inline std::vector<ItemId> popularity_recall(
    const ItemStore& corpus, std::optional<Category> category_filter,
    std::size_t k) {
    std::vector<const ContentItem*> pool;
    if (category_filter) {
        pool = corpus.in_category(*category_filter);
    } else {
        pool.reserve(corpus.size());
        for (const auto& it : corpus.items()) pool.push_back(&it);
    }
    std::sort(pool.begin(), pool.end(),
              [](const ContentItem* a, const ContentItem* b) {
                  if (a->popularity != b->popularity)
                      return a->popularity > b->popularity;
                  return a->item_id < b->item_id;
              });
    if (pool.size() > k) pool.resize(k);
    std::vector<ItemId> out;
    out.reserve(pool.size());
    for (const auto* p : pool) out.push_back(p->item_id);
    return out;
}

// ── Exact k-NN over content embeddings ──────────────────────────────

/// Precomputed content embeddings for one corpus snapshot.
class EmbeddingIndex {
public:
    EmbeddingIndex() = default;

    EmbeddingIndex(const ItemStore& corpus, const EmbeddingSpace& space,
                   const EmbedConfig& cfg = {}) {
        entries_.reserve(corpus.size());
        for (const auto& item : corpus.items())
            entries_.push_back({item.item_id, embed_content(item, space, cfg)});
        // id order fixes the scan order, which fixes tie handling
        std::sort(entries_.begin(), entries_.end(),
                  [](const auto& a, const auto& b) { return a.id < b.id; });
    }

    struct Entry {
        ItemId id;
        Vec embedding;
    };

    const std::vector<Entry>& entries() const { return entries_; }

    const Vec* embedding_of(const ItemId& id) const {
        auto it = std::lower_bound(
            entries_.begin(), entries_.end(), id,
            [](const Entry& e, const ItemId& v) { return e.id < v; });
        if (it == entries_.end() || it->id != id) return nullptr;
        return &it->embedding;
    }

private:
    std::vector<Entry> entries_;
};

/// Exact top-k by cosine similarity; ties by ascending item_id.
/// A zero query vector signals an unpersonalized caller and returns
/// the empty list.
inline std::vector<ItemId> knn_recall(const Vec& user_vec,
                                      const EmbeddingIndex& index,
                                      std::size_t k) {
    if (is_zero(user_vec)) return {};
    std::vector<std::pair<double, const ItemId*>> scored;
    scored.reserve(index.entries().size());
    for (const auto& e : index.entries())
        scored.push_back({cosine(user_vec, e.embedding), &e.id});
    std::sort(scored.begin(), scored.end(),
              [](const auto& a, const auto& b) {
                  if (a.first != b.first) return a.first > b.first;
                  return *a.second < *b.second;
              });
    if (scored.size() > k) scored.resize(k);
    std::vector<ItemId> out;
    out.reserve(scored.size());
    for (const auto& [s, id] : scored) out.push_back(*id);
    return out;
}

// ── Click co-occurrence ─────────────────────────────────────────────

/// score(c) = Σ_{h in history} |{users who clicked both h and c}|.
/// Unseen items only; zero-score items excluded; ties by ascending id.
inline std::vector<ItemId> cooccurrence_recall(
    const std::vector<ItemId>& history, const std::vector<Interaction>& log,
    std::size_t k) {
    if (history.empty() || log.empty()) return {};

    std::unordered_map<ItemId, std::unordered_set<UserId>> clickers;
    for (const auto& x : log)
        if (x.kind == InteractionKind::Click) clickers[x.item_id].insert(x.user_id);

    std::unordered_set<ItemId> seen(history.begin(), history.end());
    std::unordered_map<ItemId, std::int64_t> score;
    for (const auto& h : history) {
        auto hit = clickers.find(h);
        if (hit == clickers.end()) continue;
        const auto& h_users = hit->second;
        for (const auto& [cand, c_users] : clickers) {
            if (seen.count(cand)) continue;
            // count distinct users who clicked both h and cand
            const auto& small = h_users.size() < c_users.size() ? h_users : c_users;
            const auto& big = h_users.size() < c_users.size() ? c_users : h_users;
            std::int64_t co = 0;
            for (const auto& u : small)
                if (big.count(u)) ++co;
            if (co > 0) score[cand] += co;
        }
    }

    std::vector<std::pair<std::int64_t, ItemId>> ranked;
    ranked.reserve(score.size());
    for (auto& [id, s] : score) ranked.push_back({s, id});
    std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
        if (a.first != b.first) return a.first > b.first;
        return a.second < b.second;
    });
    if (ranked.size() > k) ranked.resize(k);
    std::vector<ItemId> out;
    out.reserve(ranked.size());
    for (auto& [s, id] : ranked) out.push_back(std::move(id));
    return out;
}

// ── Social-graph expansion ──────────────────────────────────────────

struct SocialRecallConfig {
    std::size_t seed_neighbors = 3;  // m nearest accounts per followed seed
};

namespace detail {

inline void append_newest_first(std::vector<const ContentItem*>& band,
                                const std::vector<const ContentItem*>& items) {
    band.insert(band.end(), items.begin(), items.end());
}

inline void sort_band(std::vector<const ContentItem*>& band) {
    std::sort(band.begin(), band.end(),
              [](const ContentItem* a, const ContentItem* b) {
                  if (a->created_at != b->created_at)
                      return a->created_at > b->created_at;
                  return a->item_id < b->item_id;
              });
}

} // namespace detail

/// One-hop: items authored by followed accounts, newest first.
/// Two-hop additionally pulls items authored by accounts followed by
/// followed accounts and by the m nearest-neighbor accounts of each
/// followed seed. One-hop items always rank before two-hop items.
inline std::vector<ItemId> social_recall(const UserProfile& profile,
                                         const SocialGraph& graph,
                                         const ItemStore& corpus, int hops,
                                         std::size_t k,
                                         const SocialRecallConfig& cfg = {}) {
    if (hops != 1 && hops != 2)
        throw std::invalid_argument("social_recall: hops must be 1 or 2");
    if (profile.followed.empty()) return {};

    std::vector<const ContentItem*> one_hop;
    std::unordered_set<AccountId> seeds;
    for (const auto& acc : profile.followed) {
        if (!graph.has_account(acc)) continue;
        seeds.insert(acc);
        detail::append_newest_first(one_hop, corpus.by_author(acc));
    }
    detail::sort_band(one_hop);

    std::unordered_set<ItemId> taken;
    std::vector<ItemId> out;
    for (const auto* p : one_hop) {
        if (taken.insert(p->item_id).second) out.push_back(p->item_id);
        if (out.size() >= k) return out;
    }
    if (hops == 1) return out;

    // second-degree accounts: followees-of-followees plus embedding
    // neighbors of each seed
    std::set<AccountId> second;
    for (const auto& s : seeds)
        for (const auto& f : graph.followees(s))
            if (!seeds.count(f)) second.insert(f);

    for (const auto& s : seeds) {
        const Vec& sv = graph.account(s).interest_vector;
        std::vector<std::pair<double, const AccountId*>> sims;
        for (const auto& a : graph.accounts()) {
            if (a.account_id == s) continue;
            sims.push_back({cosine(sv, a.interest_vector), &a.account_id});
        }
        std::sort(sims.begin(), sims.end(), [](const auto& x, const auto& y) {
            if (x.first != y.first) return x.first > y.first;
            return *x.second < *y.second;
        });
        std::size_t take = std::min(cfg.seed_neighbors, sims.size());
        for (std::size_t i = 0; i < take; ++i)
            if (!seeds.count(*sims[i].second)) second.insert(*sims[i].second);
    }

    std::vector<const ContentItem*> two_hop;
    for (const auto& acc : second)
        detail::append_newest_first(two_hop, corpus.by_author(acc));
    detail::sort_band(two_hop);

    for (const auto* p : two_hop) {
        if (out.size() >= k) break;
        if (taken.insert(p->item_id).second) out.push_back(p->item_id);
    }
    return out;
}

// ── Merge ───────────────────────────────────────────────────────────

/// Union with source-tag union on duplicates; per-source cap applied
/// before union; the user's own authored items are removed.
inline CandidateSet merge_candidates(
    const std::map<Source, std::vector<ItemId>>& lists, const RecallCaps& caps,
    const UserProfile& user) {
    std::unordered_set<ItemId> authored(user.authored_items.begin(),
                                        user.authored_items.end());
    std::map<ItemId, std::set<Source>> merged;
    for (const auto& [src, ids] : lists) {
        std::size_t cap = caps.cap_for(src);
        std::size_t n = std::min(cap, ids.size());
        for (std::size_t i = 0; i < n; ++i) {
            if (authored.count(ids[i])) continue;
            merged[ids[i]].insert(src);
        }
    }
    CandidateSet out;
    out.user_id = user.user_id;
    out.candidates.reserve(merged.size());
    for (auto& [id, srcs] : merged)
        out.candidates.push_back({id, std::move(srcs)});
    return out;
}

inline Json to_json(const CandidateSet& cs) {
    Json cands = Json::array();
    for (const auto& c : cs.candidates) {
        Json tags = Json::array();
        for (Source s : c.sources) tags.push_back(to_string(s));
        cands.push_back(Json{{"item_id", c.item_id}, {"sources", tags}});
    }
    return Json{{"user_id", cs.user_id}, {"candidates", std::move(cands)}};
}

} // namespace kycrec
