// kycrec command-line harness: generate synthetic worlds, run the
// condition experiment, and report metric tables.
//
// Exit codes: 0 success, 1 usage/config error, 2 data error.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "kycrec/io.hpp"
#include "kycrec/metrics.hpp"
#include "kycrec/simulator.hpp"

namespace fs = std::filesystem;
using namespace kycrec;

namespace {

Json table_to_json(const MetricTable& t) {
    Json cells = Json::object();
    for (Category c : kAllCategories) {
        Json row = Json::object();
        for (const auto& cond : t.conditions) {
            auto v = t.cell(c, cond);
            if (v)
                row[cond] = *v;
            else
                row[cond] = nullptr;
        }
        cells[to_string(c)] = std::move(row);
    }
    return Json{{"metric", t.metric},
                {"k", t.k},
                {"conditions", t.conditions},
                {"cells", std::move(cells)}};
}

MetricTable table_from_json(const Json& j) {
    MetricTable t;
    t.metric = j.at("metric").get<std::string>();
    t.k = j.at("k").get<std::size_t>();
    t.conditions = j.at("conditions").get<std::vector<std::string>>();
    for (Category c : kAllCategories) {
        const Json& row = j.at("cells").at(to_string(c));
        for (const auto& cond : t.conditions) {
            const Json& v = row.at(cond);
            t.cells[c][cond] =
                v.is_null() ? std::nullopt : std::optional<double>(v.get<double>());
        }
    }
    return t;
}

ScenarioConfig load_config(const std::string& path,
                           std::optional<std::uint64_t> seed_override) {
    ScenarioConfig cfg;
    if (!path.empty()) cfg = config_from_json(Json::parse(read_file(path)));
    if (seed_override) cfg.seed = *seed_override;
    return cfg;
}

int cmd_generate(const std::string& config_path,
                 std::optional<std::uint64_t> seed, const std::string& out) {
    ScenarioConfig cfg;
    try {
        cfg = load_config(config_path, seed);
    } catch (const std::exception& e) {
        std::cerr << "error: cannot read config: " << e.what() << "\n";
        return 1;
    }
    auto errors = validate_config(cfg);
    if (!errors.empty()) {
        for (const auto& e : errors) std::cerr << "config error: " << e << "\n";
        return 1;
    }
    World w = generate_world(cfg);
    write_file(out, world_to_ndjson(w));
    RunManifest m = make_manifest(cfg);
    m.output_paths = {out};
    write_file(out + ".manifest.json", to_json(m).dump(2) + "\n");
    std::cout << "wrote " << out << " (" << w.observable.users.size()
              << " users, " << w.observable.corpus.size() << " items, seed "
              << cfg.seed << ", config hash " << m.config_hash << ")\n";
    return 0;
}

int cmd_run(const std::string& world_path,
            const std::vector<std::string>& condition_names,
            const std::vector<std::size_t>& ks_flag,
            const std::string& click_model, const std::string& out_dir,
            const std::string& format) {
    World w;
    try {
        std::ifstream in(world_path, std::ios::binary);
        if (!in) throw std::runtime_error("cannot open " + world_path);
        w = world_from_ndjson(in);
    } catch (const std::exception& e) {
        std::cerr << "error: cannot load world: " << e.what() << "\n";
        return 2;
    }
    ScenarioConfig& cfg = w.observable.config;
    if (!condition_names.empty()) {
        cfg.conditions.clear();
        try {
            for (const auto& s : condition_names)
                cfg.conditions.push_back(condition_from_string(s));
        } catch (const std::exception& e) {
            std::cerr << "error: " << e.what() << "\n";
            return 1;
        }
    }
    if (!ks_flag.empty()) cfg.ks = ks_flag;
    if (!click_model.empty()) {
        try {
            cfg.click_model = click_model_from_string(click_model);
        } catch (const std::exception& e) {
            std::cerr << "error: " << e.what() << "\n";
            return 1;
        }
    }

    fs::create_directories(out_dir);
    RunResult r = run_experiment(w);

    // columns always span the full design; conditions not run get gaps
    std::vector<std::string> columns;
    for (Condition c : kAllConditions) columns.push_back(to_string(c));
    auto tables = build_tables(r.results, columns, cfg.ks);

    // interaction log and ranked lists
    {
        std::ostringstream log;
        std::ostringstream lists;
        for (const auto& cell : r.cells) {
            for (const auto& x : cell.log) {
                Json rec = to_json(x);
                rec["condition"] = to_string(cell.condition);
                rec["category"] = to_string(cell.category);
                log << rec.dump() << "\n";
            }
            for (const auto& l : cell.lists) {
                Json rec = to_json(l);
                rec["condition"] = to_string(cell.condition);
                rec["category"] = to_string(cell.category);
                lists << rec.dump() << "\n";
            }
        }
        write_file((fs::path(out_dir) / "interactions.ndjson").string(),
                   log.str());
        write_file((fs::path(out_dir) / "ranked_lists.ndjson").string(),
                   lists.str());
    }

    Json tables_json = Json::array();
    for (const auto& t : tables) {
        tables_json.push_back(table_to_json(t));
        std::string name = t.metric + "_at_" + std::to_string(t.k) + ".csv";
        write_file((fs::path(out_dir) / name).string(), to_csv(t));
    }
    write_file((fs::path(out_dir) / "tables.json").string(),
               tables_json.dump(2) + "\n");
    write_file((fs::path(out_dir) / "plot_data.csv").string(),
               plot_csv(tables));

    RunManifest m = make_manifest(cfg);
    m.output_paths = {"tables.json", "plot_data.csv", "interactions.ndjson",
                      "ranked_lists.ndjson"};
    write_file((fs::path(out_dir) / "manifest.json").string(),
               to_json(m).dump(2) + "\n");

    if (format == "text") {
        for (const auto& t : tables)
            if (t.metric == "ndcg") std::cout << to_text(t) << "\n";
    }
    std::cout << "run complete: " << tables.size() << " tables in " << out_dir
              << "\n";
    return 0;
}

int cmd_report(const std::string& run_dir, const std::string& format) {
    fs::path tables_path = fs::path(run_dir) / "tables.json";
    if (!fs::exists(tables_path)) {
        std::cerr << "error: missing " << tables_path.string()
                  << " (expected files: tables.json, plot_data.csv, "
                     "interactions.ndjson, ranked_lists.ndjson, manifest.json)\n";
        return 2;
    }
    Json tables_json;
    try {
        tables_json = Json::parse(read_file(tables_path.string()));
    } catch (const std::exception& e) {
        std::cerr << "error: corrupt tables.json: " << e.what() << "\n";
        return 2;
    }
    for (const auto& tj : tables_json) {
        MetricTable t = table_from_json(tj);
        if (format == "csv")
            std::cout << t.metric << "@" << t.k << "\n" << to_csv(t) << "\n";
        else
            std::cout << to_text(t) << "\n";
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"KYC-tiered recommendation experiment harness"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_path = "world.ndjson";
    std::optional<std::uint64_t> seed;

    auto* gen = app.add_subcommand("generate", "Generate a synthetic world");
    gen->add_option("--config", config_path, "Scenario config JSON file");
    gen->add_option("--seed", seed, "Override the scenario seed");
    gen->add_option("--out", out_path, "Snapshot output path");

    std::string world_path;
    std::vector<std::string> conditions;
    std::string k_csv;
    std::string click_model;
    std::string run_out = "run_out";
    std::string format = "csv";

    auto* run = app.add_subcommand("run", "Run the condition experiment");
    run->add_option("--world", world_path, "World snapshot path")->required();
    run->add_option("--conditions", conditions,
                    "Subset of conditions to run")->delimiter(',');
    run->add_option("--k", k_csv, "Comma-separated truncation depths");
    run->add_option("--click-model", click_model,
                    "deterministic or bernoulli");
    run->add_option("--out", run_out, "Output directory");
    run->add_option("--format", format, "csv or text")
        ->check(CLI::IsMember({"csv", "text"}));

    std::string report_dir;
    auto* rep = app.add_subcommand("report", "Print metric tables for a run");
    rep->add_option("dir", report_dir, "Run output directory")->required();
    rep->add_option("--format", format, "csv or text")
        ->check(CLI::IsMember({"csv", "text"}));

    CLI11_PARSE(app, argc, argv);

    try {
        if (gen->parsed()) return cmd_generate(config_path, seed, out_path);
        if (run->parsed()) {
            std::vector<std::size_t> ks;
            if (!k_csv.empty()) {
                std::stringstream ss(k_csv);
                std::string tok;
                while (std::getline(ss, tok, ',')) {
                    int v = std::stoi(tok);
                    if (v < 1) {
                        std::cerr << "error: --k values must be >= 1\n";
                        return 1;
                    }
                    ks.push_back(static_cast<std::size_t>(v));
                }
            }
            return cmd_run(world_path, conditions, ks, click_model, run_out,
                           format);
        }
        if (rep->parsed()) return cmd_report(report_dir, format);
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 1;
}
