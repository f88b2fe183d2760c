#pragma once

#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "kycrec/simulator.hpp"

namespace kycrec {

// ── Scenario config <-> JSON ────────────────────────────────────────

inline Json to_json(const ScenarioConfig& c) {
    Json caps = Json::object();
    for (const auto& [src, cap] : c.caps.per_source) caps[to_string(src)] = cap;
    Json conc = Json::object();
    for (const auto& [k, v] : c.audience_concentration) conc[k] = v;
    Json acc_noise = Json::object();
    for (const auto& [k, v] : c.account_noise_by_category) acc_noise[k] = v;
    Json probs = Json::object();
    for (const auto& [g, p] : c.click_probs) probs[std::to_string(g)] = p;
    Json conds = Json::array();
    for (Condition cd : c.conditions) conds.push_back(to_string(cd));
    return Json{
        {"seed", c.seed},
        {"user_count", c.user_count},
        {"age_min", c.age_min},
        {"age_max", c.age_max},
        {"occupation_classes", c.occupation_classes},
        {"income_min", c.income_min},
        {"income_max", c.income_max},
        {"dimension", c.dimension},
        {"corpus_per_category", c.corpus_per_category},
        {"topics_per_category", c.topics_per_category},
        {"account_count", c.account_count},
        {"followed_count", c.followed_count},
        {"zipf_exponent", c.zipf_exponent},
        {"popularity_scale", c.popularity_scale},
        {"item_feature_noise", c.item_feature_noise},
        {"account_interest_noise", c.account_interest_noise},
        {"account_noise_by_category", acc_noise},
        {"authored_per_user", c.authored_per_user},
        {"authored_feature_noise", c.authored_feature_noise},
        {"account_follow_edges", c.account_follow_edges},
        {"follow_affinity_gamma", c.follow_affinity_gamma},
        {"bucket_taste_alignment", c.bucket_taste_alignment},
        {"bio_topic_count", c.bio_topic_count},
        {"warmup_popular_impressions", c.warmup_popular_impressions},
        {"warmup_random_impressions", c.warmup_random_impressions},
        {"audience_concentration", conc},
        {"rel_thresholds", Json::array({c.rel_t1, c.rel_t2, c.rel_t3})},
        {"embed",
         Json{{"w_cat", c.embed.w_cat},
              {"w_feat", c.embed.w_feat},
              {"w_basic_tags", c.embed.w_basic_tags},
              {"w_basic_demo", c.embed.w_basic_demo},
              {"w_adv_basic", c.embed.w_adv_basic},
              {"w_adv_bio", c.embed.w_adv_bio},
              {"w_adv_authored", c.embed.w_adv_authored},
              {"w_circ_adv", c.embed.w_circ_adv},
              {"w_circ_followed", c.embed.w_circ_followed}}},
        {"recall_caps", Json{{"default", c.caps.default_cap},
                             {"per_source", caps}}},
        {"seed_neighbors", c.social.seed_neighbors},
        {"propagation", Json{{"damping", c.propagation.damping},
                             {"iterations", c.propagation.iterations}}},
        {"ranking", Json{{"w_rel", c.weights.w_rel},
                         {"w_social", c.weights.w_social},
                         {"w_explore", c.weights.w_explore},
                         {"exposure_percentile", c.weights.exposure_percentile},
                         {"quality_percentile", c.weights.quality_percentile}}},
        {"rerank", Json{{"enabled", c.rerank.enabled},
                        {"tag_match_threshold", c.rerank.tag_match_threshold}}},
        {"cold_start_k", c.cold_start_k},
        {"top_n", c.top_n},
        {"ks", c.ks},
        {"conditions", conds},
        {"click_model", to_string(c.click_model)},
        {"click_probs", probs}};
}

inline ScenarioConfig config_from_json(const Json& j) {
    ScenarioConfig c;  // defaults, overridden by present fields
    auto get = [&](const char* key, auto& field) {
        if (j.contains(key)) field = j.at(key).get<std::decay_t<decltype(field)>>();
    };
    get("seed", c.seed);
    get("user_count", c.user_count);
    get("age_min", c.age_min);
    get("age_max", c.age_max);
    get("occupation_classes", c.occupation_classes);
    get("income_min", c.income_min);
    get("income_max", c.income_max);
    get("dimension", c.dimension);
    get("corpus_per_category", c.corpus_per_category);
    get("topics_per_category", c.topics_per_category);
    get("account_count", c.account_count);
    get("followed_count", c.followed_count);
    get("zipf_exponent", c.zipf_exponent);
    get("popularity_scale", c.popularity_scale);
    get("item_feature_noise", c.item_feature_noise);
    get("account_interest_noise", c.account_interest_noise);
    get("authored_per_user", c.authored_per_user);
    get("authored_feature_noise", c.authored_feature_noise);
    get("account_follow_edges", c.account_follow_edges);
    get("follow_affinity_gamma", c.follow_affinity_gamma);
    get("bucket_taste_alignment", c.bucket_taste_alignment);
    get("bio_topic_count", c.bio_topic_count);
    get("warmup_popular_impressions", c.warmup_popular_impressions);
    get("warmup_random_impressions", c.warmup_random_impressions);
    if (j.contains("audience_concentration"))
        for (const auto& [k, v] : j.at("audience_concentration").items())
            c.audience_concentration[k] = v.get<double>();
    if (j.contains("account_noise_by_category")) {
        c.account_noise_by_category.clear();
        for (const auto& [k, v] : j.at("account_noise_by_category").items())
            c.account_noise_by_category[k] = v.get<double>();
    }
    if (j.contains("rel_thresholds")) {
        const auto& t = j.at("rel_thresholds");
        c.rel_t1 = t.at(0).get<double>();
        c.rel_t2 = t.at(1).get<double>();
        c.rel_t3 = t.at(2).get<double>();
    }
    if (j.contains("embed")) {
        const auto& e = j.at("embed");
        auto ge = [&](const char* key, double& f) {
            if (e.contains(key)) f = e.at(key).get<double>();
        };
        ge("w_cat", c.embed.w_cat);
        ge("w_feat", c.embed.w_feat);
        ge("w_basic_tags", c.embed.w_basic_tags);
        ge("w_basic_demo", c.embed.w_basic_demo);
        ge("w_adv_basic", c.embed.w_adv_basic);
        ge("w_adv_bio", c.embed.w_adv_bio);
        ge("w_adv_authored", c.embed.w_adv_authored);
        ge("w_circ_adv", c.embed.w_circ_adv);
        ge("w_circ_followed", c.embed.w_circ_followed);
    }
    if (j.contains("recall_caps")) {
        const auto& r = j.at("recall_caps");
        if (r.contains("default"))
            c.caps.default_cap = r.at("default").get<std::size_t>();
        if (r.contains("per_source"))
            for (const auto& [k, v] : r.at("per_source").items()) {
                for (Source s : {Source::Popularity, Source::Knn, Source::Cooccur,
                                 Source::Social1, Source::Social2,
                                 Source::ColdStart})
                    if (to_string(s) == k)
                        c.caps.per_source[s] = v.get<std::size_t>();
            }
    }
    get("seed_neighbors", c.social.seed_neighbors);
    if (j.contains("propagation")) {
        const auto& p = j.at("propagation");
        if (p.contains("damping"))
            c.propagation.damping = p.at("damping").get<double>();
        if (p.contains("iterations"))
            c.propagation.iterations = p.at("iterations").get<int>();
    }
    if (j.contains("ranking")) {
        const auto& r = j.at("ranking");
        auto gr = [&](const char* key, double& f) {
            if (r.contains(key)) f = r.at(key).get<double>();
        };
        gr("w_rel", c.weights.w_rel);
        gr("w_social", c.weights.w_social);
        gr("w_explore", c.weights.w_explore);
        gr("exposure_percentile", c.weights.exposure_percentile);
        gr("quality_percentile", c.weights.quality_percentile);
    }
    if (j.contains("rerank")) {
        const auto& r = j.at("rerank");
        if (r.contains("enabled")) c.rerank.enabled = r.at("enabled").get<bool>();
        if (r.contains("tag_match_threshold"))
            c.rerank.tag_match_threshold =
                r.at("tag_match_threshold").get<double>();
    }
    get("cold_start_k", c.cold_start_k);
    get("top_n", c.top_n);
    get("ks", c.ks);
    if (j.contains("conditions")) {
        c.conditions.clear();
        for (const auto& s : j.at("conditions"))
            c.conditions.push_back(condition_from_string(s.get<std::string>()));
    }
    if (j.contains("click_model"))
        c.click_model =
            click_model_from_string(j.at("click_model").get<std::string>());
    if (j.contains("click_probs")) {
        c.click_probs.clear();
        for (const auto& [k, v] : j.at("click_probs").items())
            c.click_probs[std::stoi(k)] = v.get<double>();
    }
    return c;
}

// ── Hashing ─────────────────────────────────────────────────────────

inline std::uint64_t fnv1a(const std::string& bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : bytes) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    return h;
}

inline std::string hash_hex(const std::string& bytes) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx",
                  static_cast<unsigned long long>(fnv1a(bytes)));
    return buf;
}

// ── Run manifest ────────────────────────────────────────────────────

struct RunManifest {
    std::string run_id;
    std::string config_hash;
    std::uint64_t seed = 0;
    std::string artifact_version = "0.1.0";
    std::string created_at;  // ISO date or "deterministic"
    std::vector<std::string> output_paths;
};

inline Json to_json(const RunManifest& m) {
    return Json{{"run_id", m.run_id},
                {"config_hash", m.config_hash},
                {"seed", m.seed},
                {"artifact_version", m.artifact_version},
                {"created_at", m.created_at},
                {"output_paths", m.output_paths}};
}

inline RunManifest manifest_from_json(const Json& j) {
    RunManifest m;
    m.run_id = j.at("run_id").get<std::string>();
    m.config_hash = j.at("config_hash").get<std::string>();
    m.seed = j.at("seed").get<std::uint64_t>();
    m.artifact_version = j.at("artifact_version").get<std::string>();
    m.created_at = j.at("created_at").get<std::string>();
    m.output_paths = j.at("output_paths").get<std::vector<std::string>>();
    return m;
}

inline RunManifest make_manifest(const ScenarioConfig& cfg) {
    RunManifest m;
    std::string bytes = to_json(cfg).dump();
    m.config_hash = hash_hex(bytes);
    m.seed = cfg.seed;
    m.run_id = "run-" + m.config_hash;
    m.created_at = "deterministic";
    return m;
}

// ── World snapshot (line-delimited JSON) ────────────────────────────

inline std::string world_to_ndjson(const World& w) {
    std::ostringstream os;
    auto line = [&](const char* type, Json payload) {
        Json rec{{"type", type}};
        rec.update(Json{{"data", std::move(payload)}});
        os << rec.dump() << "\n";
    };
    line("config", to_json(w.observable.config));
    line("space", to_json(w.observable.space));
    line("prior", w.observable.prior.to_json());
    for (const auto& a : w.observable.graph.accounts())
        line("account", to_json(a));
    for (const auto& a : w.observable.graph.accounts())
        for (const auto& f : w.observable.graph.followees(a.account_id))
            line("edge", Json::array({a.account_id, f}));
    for (const auto& it : w.observable.corpus.items()) line("item", to_json(it));
    for (const auto& u : w.observable.users) line("user", to_json(u));
    for (const auto& x : w.observable.warmup_log)
        line("interaction", to_json(x));
    for (const auto& [uid, v] : w.truth.latent)
        line("latent", Json{{"user_id", uid}, {"vector", v}});
    return os.str();
}

inline World world_from_ndjson(std::istream& in) {
    World w;
    std::vector<ContentItem> items;
    std::string linebuf;
    while (std::getline(in, linebuf)) {
        if (linebuf.empty()) continue;
        Json rec = Json::parse(linebuf);
        const std::string type = rec.at("type").get<std::string>();
        const Json& d = rec.at("data");
        if (type == "config") {
            w.observable.config = config_from_json(d);
        } else if (type == "space") {
            w.observable.space = space_from_json(d);
        } else if (type == "prior") {
            w.observable.prior = DemographicPrior::from_json(d);
        } else if (type == "account") {
            w.observable.graph.add_account(account_from_json(d));
        } else if (type == "edge") {
            w.observable.graph.add_edge(d.at(0).get<std::string>(),
                                        d.at(1).get<std::string>());
        } else if (type == "item") {
            items.push_back(item_from_json(d));
        } else if (type == "user") {
            w.observable.users.push_back(profile_from_json(d));
        } else if (type == "interaction") {
            w.observable.warmup_log.push_back(interaction_from_json(d));
        } else if (type == "latent") {
            w.truth.latent[d.at("user_id").get<std::string>()] =
                d.at("vector").get<Vec>();
        } else {
            throw std::runtime_error("unknown snapshot record type: " + type);
        }
    }
    w.observable.corpus = ItemStore(std::move(items));
    return w;
}

inline void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out << content;
}

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open for reading: " + path);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

} // namespace kycrec
