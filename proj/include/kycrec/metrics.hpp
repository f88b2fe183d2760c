#pragma once

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "kycrec/core.hpp"

namespace kycrec {

// ── nDCG ────────────────────────────────────────────────────────────

inline double dcg_at_k(const std::vector<int>& grades, std::size_t k) {
    double dcg = 0.0;
    std::size_t n = std::min(k, grades.size());
    for (std::size_t i = 0; i < n; ++i)
        dcg += (std::exp2(static_cast<double>(grades[i])) - 1.0) /
               std::log2(static_cast<double>(i) + 2.0);
    return dcg;
}

/// nDCG@k with gain 2^rel - 1 and log2(i+1) discount. The ideal DCG is
/// computed from the pool sorted descending; IDCG = 0 maps to 0, not 1.
inline double ndcg_at_k(const std::vector<int>& ranked_grades,
                        std::vector<int> ideal_pool, std::size_t k) {
    if (k < 1) throw std::invalid_argument("ndcg_at_k: k must be >= 1");
    std::sort(ideal_pool.begin(), ideal_pool.end(), std::greater<>());
    double idcg = dcg_at_k(ideal_pool, k);
    if (idcg == 0.0) return 0.0;
    return dcg_at_k(ranked_grades, k) / idcg;
}

// ── Per-user evaluation rows ────────────────────────────────────────

/// One ranked entry as the metrics layer sees it.
struct EvalEntry {
    ItemId item_id;
    int grade = 0;           // relevance grade in {0..3}
    std::string seed_label;  // seed interest for serendipity
    bool clicked = false;
};

/// One user's evaluated list for a (condition, category) cell.
struct UserResult {
    UserId user_id;
    std::vector<EvalEntry> entries;      // ranked order, truncated at max k
    std::vector<int> candidate_grades;   // ideal pool: full candidate set
    std::set<std::string> history;       // labels with prior clicks
};

inline double user_ndcg(const UserResult& u, std::size_t k) {
    std::vector<int> grades;
    grades.reserve(u.entries.size());
    for (const auto& e : u.entries) grades.push_back(e.grade);
    return ndcg_at_k(grades, u.candidate_grades, k);
}

/// CTR@1: mean of "top item clicked". CTR@k, k>1: fraction of users
/// with at least one click within the top k. A user with an empty list
/// contributes 0.
inline double ctr_at_k(const std::vector<UserResult>& users, std::size_t k) {
    if (k < 1) throw std::invalid_argument("ctr_at_k: k must be >= 1");
    if (users.empty()) return 0.0;
    double hits = 0.0;
    for (const auto& u : users) {
        std::size_t n = std::min(k, u.entries.size());
        bool hit = false;
        if (k == 1) {
            hit = n >= 1 && u.entries[0].clicked;
        } else {
            for (std::size_t i = 0; i < n && !hit; ++i)
                hit = u.entries[i].clicked;
        }
        if (hit) hits += 1.0;
    }
    return hits / static_cast<double>(users.size());
}

/// Mean over the top-k entries of "relevant and outside the user's
/// history profile", averaged over users. An empty history counts
/// every entry as unexpected.
inline double serendipity_at_k(const std::vector<UserResult>& users,
                               std::size_t k) {
    if (k < 1) throw std::invalid_argument("serendipity_at_k: k must be >= 1");
    if (users.empty()) return 0.0;
    double sum = 0.0;
    for (const auto& u : users) {
        std::size_t n = std::min(k, u.entries.size());
        if (n == 0) continue;
        double q = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const auto& e = u.entries[i];
            if (e.grade >= 2 && u.history.count(e.seed_label) == 0) q += 1.0;
        }
        sum += q / static_cast<double>(n);
    }
    return sum / static_cast<double>(users.size());
}

// ── Tables ──────────────────────────────────────────────────────────

/// Category rows x condition columns; missing cells are explicit gaps.
struct MetricTable {
    std::string metric;  // "ndcg", "ctr" or "serendipity"
    std::size_t k = 0;
    std::vector<std::string> conditions;  // column order
    std::map<Category, std::map<std::string, std::optional<double>>> cells;

    std::optional<double> cell(Category c, const std::string& cond) const {
        auto r = cells.find(c);
        if (r == cells.end()) return std::nullopt;
        auto it = r->second.find(cond);
        if (it == r->second.end()) return std::nullopt;
        return it->second;
    }
};

/// Logs keyed by (condition name, category); conditions without data
/// get gap markers, never silent zeros.
inline std::vector<MetricTable> build_tables(
    const std::map<std::pair<std::string, Category>, std::vector<UserResult>>&
        results,
    const std::vector<std::string>& conditions, const std::vector<std::size_t>& ks,
    const std::vector<std::string>& metrics = {"ndcg", "ctr", "serendipity"}) {
    std::vector<MetricTable> tables;
    for (const auto& metric : metrics) {
        for (std::size_t k : ks) {
            MetricTable t;
            t.metric = metric;
            t.k = k;
            t.conditions = conditions;
            for (Category c : kAllCategories) {
                for (const auto& cond : conditions) {
                    auto it = results.find({cond, c});
                    if (it == results.end() || it->second.empty()) {
                        t.cells[c][cond] = std::nullopt;
                        continue;
                    }
                    const auto& users = it->second;
                    double v = 0.0;
                    if (metric == "ndcg") {
                        for (const auto& u : users) v += user_ndcg(u, k);
                        v /= static_cast<double>(users.size());
                    } else if (metric == "ctr") {
                        v = ctr_at_k(users, k);
                    } else if (metric == "serendipity") {
                        v = serendipity_at_k(users, k);
                    } else {
                        throw std::invalid_argument("unknown metric: " + metric);
                    }
                    t.cells[c][cond] = v;
                }
            }
            tables.push_back(std::move(t));
        }
    }
    return tables;
}

inline std::string format_cell(const std::optional<double>& v) {
    if (!v) return "-";
    std::ostringstream os;
    os << std::fixed << std::setprecision(3) << *v;
    return os.str();
}

inline std::string to_csv(const MetricTable& t) {
    std::ostringstream os;
    os << "category";
    for (const auto& c : t.conditions) os << "," << c;
    os << "\n";
    for (Category c : kAllCategories) {
        os << to_string(c);
        for (const auto& cond : t.conditions)
            os << "," << format_cell(t.cell(c, cond));
        os << "\n";
    }
    return os.str();
}

/// Aligned text table matching the category-by-condition layout of the
/// report output.
inline std::string to_text(const MetricTable& t) {
    std::ostringstream os;
    std::string title = t.metric + "@" + std::to_string(t.k);
    os << title << "\n";
    os << std::left << std::setw(10) << "Category";
    for (const auto& c : t.conditions) os << std::right << std::setw(22) << c;
    os << "\n";
    for (Category c : kAllCategories) {
        os << std::left << std::setw(10) << to_string(c);
        for (const auto& cond : t.conditions)
            os << std::right << std::setw(22) << format_cell(t.cell(c, cond));
        os << "\n";
    }
    return os.str();
}

/// Long-form plot data: category x condition x metric rows.
inline std::string plot_csv(const std::vector<MetricTable>& tables) {
    std::ostringstream os;
    os << "metric,k,category,condition,value\n";
    for (const auto& t : tables)
        for (Category c : kAllCategories)
            for (const auto& cond : t.conditions) {
                os << t.metric << "," << t.k << "," << to_string(c) << ","
                   << cond << "," << format_cell(t.cell(c, cond)) << "\n";
            }
    return os.str();
}

} // namespace kycrec
