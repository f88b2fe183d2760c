#pragma once

#include <algorithm>
#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "kycrec/core.hpp"

namespace kycrec {

/// Immutable content corpus with id / category / author lookups.
class ItemStore {
public:
    ItemStore() = default;

    explicit ItemStore(std::vector<ContentItem> items)
        : items_(std::move(items)) {
        for (std::size_t i = 0; i < items_.size(); ++i) {
            const auto& it = items_[i];
            if (!index_.emplace(it.item_id, i).second)
                throw std::invalid_argument("duplicate item: " + it.item_id);
            by_category_[static_cast<int>(it.category)].push_back(i);
            by_author_[it.author_id].push_back(i);
        }
    }

    const std::vector<ContentItem>& items() const { return items_; }
    std::size_t size() const { return items_.size(); }
    bool empty() const { return items_.empty(); }

    bool contains(const ItemId& id) const { return index_.count(id) > 0; }

    const ContentItem& item(const ItemId& id) const {
        auto it = index_.find(id);
        if (it == index_.end())
            throw std::invalid_argument("unknown item: " + id);
        return items_[it->second];
    }

    std::vector<const ContentItem*> in_category(Category c) const {
        std::vector<const ContentItem*> out;
        auto it = by_category_.find(static_cast<int>(c));
        if (it == by_category_.end()) return out;
        out.reserve(it->second.size());
        for (auto i : it->second) out.push_back(&items_[i]);
        return out;
    }

    std::vector<const ContentItem*> by_author(const AccountId& a) const {
        std::vector<const ContentItem*> out;
        auto it = by_author_.find(a);
        if (it == by_author_.end()) return out;
        for (auto i : it->second) out.push_back(&items_[i]);
        return out;
    }

    /// New store holding only items of one category.
    ItemStore filtered(Category c) const {
        std::vector<ContentItem> kept;
        for (const auto* p : in_category(c)) kept.push_back(*p);
        return ItemStore(std::move(kept));
    }

private:
    std::vector<ContentItem> items_;
    std::unordered_map<ItemId, std::size_t> index_;
    std::unordered_map<int, std::vector<std::size_t>> by_category_;
    std::unordered_map<AccountId, std::vector<std::size_t>> by_author_;
};

/// Per-item impression counts, used by the exploration bonus.
struct ExposureStats {
    std::unordered_map<ItemId, std::int64_t> impressions;

    std::int64_t count(const ItemId& id) const {
        auto it = impressions.find(id);
        return it == impressions.end() ? 0 : it->second;
    }

    static ExposureStats from_log(const std::vector<Interaction>& log) {
        ExposureStats s;
        for (const auto& x : log)
            if (x.kind == InteractionKind::Impression) s.impressions[x.item_id]++;
        return s;
    }
};

} // namespace kycrec
