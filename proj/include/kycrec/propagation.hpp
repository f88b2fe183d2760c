#pragma once

#include <stdexcept>
#include <unordered_map>
#include <vector>

#include "kycrec/core.hpp"
#include "kycrec/vecmath.hpp"

namespace kycrec {

/// Damped synchronous interest propagation over the follow graph.
/// Each round: v_i <- normalize((1-a) * v_i0 + a * mean over followees).
struct PropagationConfig {
    double damping = 0.3;  // a in [0, 1)
    int iterations = 3;    // T >= 0
};

/// Returns the propagated interest vector per account id. Nodes with no
/// followees keep their seed vector. Deterministic; the input graph is
/// not modified.
inline std::unordered_map<AccountId, Vec> propagate(
    const SocialGraph& graph, const PropagationConfig& cfg) {
    if (cfg.damping < 0.0 || cfg.damping >= 1.0)
        throw std::invalid_argument("propagate: damping must be in [0,1)");
    if (cfg.iterations < 0)
        throw std::invalid_argument("propagate: iterations must be >= 0");

    const auto& accounts = graph.accounts();
    std::unordered_map<AccountId, Vec> seed;
    std::unordered_map<AccountId, Vec> cur;
    for (const auto& a : accounts) {
        seed[a.account_id] = a.interest_vector;
        cur[a.account_id] = a.interest_vector;
    }

    const double a = cfg.damping;
    for (int t = 0; t < cfg.iterations; ++t) {
        std::unordered_map<AccountId, Vec> next;
        next.reserve(cur.size());
        for (const auto& node : accounts) {
            const auto& out = graph.followees(node.account_id);
            if (out.empty() || a == 0.0) {
                next[node.account_id] = seed[node.account_id];
                continue;
            }
            Vec mean(node.interest_vector.size(), 0.0);
            for (const auto& f : out) axpy(mean, 1.0, cur.at(f));
            for (double& x : mean) x /= static_cast<double>(out.size());
            Vec v = scaled(seed[node.account_id], 1.0 - a);
            axpy(v, a, mean);
            next[node.account_id] = normalized(std::move(v));
        }
        cur = std::move(next);
    }
    return cur;
}

/// Graph with account interest vectors replaced by their propagated
/// values.
inline SocialGraph propagated_graph(const SocialGraph& graph,
                                    const PropagationConfig& cfg) {
    auto vectors = propagate(graph, cfg);
    SocialGraph out;
    for (const auto& a : graph.accounts()) {
        Account b = a;
        b.interest_vector = vectors.at(a.account_id);
        out.add_account(std::move(b));
    }
    for (const auto& a : graph.accounts())
        for (const auto& f : graph.followees(a.account_id))
            out.add_edge(a.account_id, f);
    return out;
}

} // namespace kycrec
