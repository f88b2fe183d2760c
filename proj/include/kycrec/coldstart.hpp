#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <string>
#include <vector>

#include "kycrec/core.hpp"
#include "kycrec/corpus.hpp"
#include "kycrec/embedding.hpp"
#include "kycrec/recall.hpp"

namespace kycrec {

/// Demographic prior table: (age band x occupation class) -> weight
/// distribution over category names and topic labels. Weights per
/// bucket sum to 1; lookups outside the table fall back to uniform
/// over categories.
class DemographicPrior {
public:
    using Distribution = std::map<std::string, double>;

    DemographicPrior() = default;

    explicit DemographicPrior(std::vector<int> age_band_bounds)
        : age_bounds_(std::move(age_band_bounds)) {
        std::sort(age_bounds_.begin(), age_bounds_.end());
    }

    /// Age bands are [lo, next) with the last band open-ended.
    std::string bucket_key(const Demographics& d) const {
        int band_lo = age_bounds_.empty() ? 0 : age_bounds_.front();
        for (int b : age_bounds_)
            if (d.age >= b) band_lo = b;
        return "age" + std::to_string(band_lo) + "|" + d.occupation;
    }

    void set_bucket(const std::string& key, Distribution dist) {
        double sum = 0.0;
        for (const auto& [label, w] : dist) {
            if (w < 0.0)
                throw std::invalid_argument("negative prior weight for " + label);
            sum += w;
        }
        if (std::abs(sum - 1.0) > 1e-9)
            throw std::invalid_argument("bucket weights must sum to 1: " + key);
        table_[key] = std::move(dist);
    }

    /// Distribution for a profile; `known` reports whether the bucket
    /// was found or the uniform fallback was used.
    Distribution lookup(const Demographics& d, bool* known = nullptr) const {
        auto it = table_.find(bucket_key(d));
        if (it != table_.end()) {
            if (known) *known = true;
            return it->second;
        }
        if (known) *known = false;
        Distribution uniform;
        for (Category c : kAllCategories)
            uniform[to_string(c)] = 1.0 / static_cast<double>(kCategoryCount);
        return uniform;
    }

    /// Category marginal of a bucket distribution, renormalized to 1.
    /// Topic weights are folded in as uniform mass over categories so
    /// that a topic-heavy bucket still allocates everywhere its topics
    /// do not pin down a category.
    static std::map<Category, double> category_marginal(const Distribution& dist) {
        std::map<Category, double> out;
        double cat_mass = 0.0;
        for (Category c : kAllCategories) {
            auto it = dist.find(to_string(c));
            double w = it == dist.end() ? 0.0 : it->second;
            out[c] = w;
            cat_mass += w;
        }
        if (cat_mass <= 0.0) {
            for (Category c : kAllCategories)
                out[c] = 1.0 / static_cast<double>(kCategoryCount);
            return out;
        }
        for (auto& [c, w] : out) w /= cat_mass;
        return out;
    }

    const std::map<std::string, Distribution>& table() const { return table_; }
    const std::vector<int>& age_bounds() const { return age_bounds_; }

    Json to_json() const {
        return Json{{"age_band_bounds", age_bounds_}, {"buckets", table_}};
    }

    static DemographicPrior from_json(const Json& j) {
        DemographicPrior p(j.at("age_band_bounds").get<std::vector<int>>());
        for (const auto& [key, dist] : j.at("buckets").items())
            p.set_bucket(key, dist.get<Distribution>());
        return p;
    }

private:
    std::vector<int> age_bounds_{18, 30, 45};
    std::map<std::string, Distribution> table_;
};

/// Normalized weighted sum of category/topic basis vectors per the
/// profile's bucket distribution.
inline Vec demographic_prior_vector(const UserProfile& profile,
                                    const DemographicPrior& prior,
                                    const EmbeddingSpace& space,
                                    bool* bucket_known = nullptr) {
    auto dist = prior.lookup(profile.demographics, bucket_known);
    Vec acc(space.dimension, 0.0);
    for (const auto& [label, w] : dist) {
        if (w <= 0.0) continue;
        auto cit = space.category_basis.find(label);
        if (cit != space.category_basis.end()) {
            axpy(acc, w, cit->second);
            continue;
        }
        if (const Vec* t = space.topic_vec(label)) axpy(acc, w, *t);
    }
    return normalized(std::move(acc));
}

namespace detail {

/// Largest-remainder apportionment of k over category weights; ties on
/// remainder break by category declaration order (Ad..Tech). Categories
/// with fewer available items than their share give the surplus back.
inline std::map<Category, std::size_t> allocate_k(
    const std::map<Category, double>& weights,
    const std::map<Category, std::size_t>& available, std::size_t k) {
    std::map<Category, std::size_t> alloc;
    std::size_t total_avail = 0;
    for (const auto& [c, n] : available) total_avail += n;
    std::size_t want = std::min(k, total_avail);

    double wsum = 0.0;
    for (const auto& [c, w] : weights) wsum += w;

    std::vector<std::pair<double, Category>> remainders;
    std::size_t assigned = 0;
    for (Category c : kAllCategories) {
        double w = weights.count(c) && wsum > 0.0 ? weights.at(c) / wsum : 0.0;
        double quota = w * static_cast<double>(want);
        std::size_t base = static_cast<std::size_t>(std::floor(quota));
        alloc[c] = base;
        assigned += base;
        remainders.push_back({quota - static_cast<double>(base), c});
    }
    std::stable_sort(remainders.begin(), remainders.end(),
                     [](const auto& a, const auto& b) { return a.first > b.first; });
    for (auto& [r, c] : remainders) {
        if (assigned >= want) break;
        alloc[c] += 1;
        ++assigned;
    }

    // clamp to availability, then hand surplus to categories with spare
    // items in weight order
    std::size_t surplus = 0;
    for (Category c : kAllCategories) {
        std::size_t avail = available.count(c) ? available.at(c) : 0;
        if (alloc[c] > avail) {
            surplus += alloc[c] - avail;
            alloc[c] = avail;
        }
    }
    while (surplus > 0) {
        bool placed = false;
        std::vector<std::pair<double, Category>> order;
        for (Category c : kAllCategories)
            order.push_back({weights.count(c) ? weights.at(c) : 0.0, c});
        std::stable_sort(order.begin(), order.end(),
                         [](const auto& a, const auto& b) { return a.first > b.first; });
        for (auto& [w, c] : order) {
            std::size_t avail = available.count(c) ? available.at(c) : 0;
            if (surplus > 0 && alloc[c] < avail) {
                alloc[c] += 1;
                --surplus;
                placed = true;
            }
        }
        if (!placed) break;
    }
    return alloc;
}

} // namespace detail

/// Cold-start recall. BasicKyc and above: popularity within categories,
/// k apportioned by the bucket's category marginal. NoKyc: balanced
/// round-robin over per-category popularity lists.
inline std::vector<ItemId> cold_start_recall(const UserProfile& profile,
                                             const DemographicPrior& prior,
                                             const ItemStore& corpus,
                                             std::size_t k) {
    if (k < 1) throw std::invalid_argument("cold_start_recall: k must be >= 1");
    if (corpus.empty()) return {};

    if (profile.kyc_tier >= KycTier::BasicKyc) {
        auto dist = prior.lookup(profile.demographics);
        auto weights = DemographicPrior::category_marginal(dist);
        std::map<Category, std::size_t> available;
        for (Category c : kAllCategories)
            available[c] = corpus.in_category(c).size();
        auto alloc = detail::allocate_k(weights, available, k);
        std::vector<ItemId> out;
        for (Category c : kAllCategories) {
            if (alloc[c] == 0) continue;
            auto ids = popularity_recall(corpus, c, alloc[c]);
            out.insert(out.end(), ids.begin(), ids.end());
        }
        return out;
    }

    // NoKyc: one pass per cycle over the fixed category order
    std::map<Category, std::vector<ItemId>> per_cat;
    for (Category c : kAllCategories)
        per_cat[c] = popularity_recall(corpus, c, k);
    std::vector<ItemId> out;
    std::map<Category, std::size_t> cursor;
    while (out.size() < k) {
        bool any = false;
        for (Category c : kAllCategories) {
            if (out.size() >= k) break;
            auto& ids = per_cat[c];
            auto& i = cursor[c];
            if (i < ids.size()) {
                out.push_back(ids[i++]);
                any = true;
            }
        }
        if (!any) break;
    }
    return out;
}

} // namespace kycrec
