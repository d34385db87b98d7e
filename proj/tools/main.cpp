#include <filesystem>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "synoq/datagen.hpp"
#include "synoq/engine.hpp"

namespace fs = std::filesystem;
using namespace synoq;

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidParameter("cannot open file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_json(const std::string& path, const nlohmann::json& doc) {
  std::ofstream out(path);
  out << doc.dump(2) << "\n";
}

std::vector<LogicalQuery> parse_workload_file(const std::string& path,
                                              const Database& db) {
  std::vector<LogicalQuery> out;
  for (const std::string& stmt : split_statements(read_file(path))) {
    out.push_back(parse_query(stmt, db));
  }
  return out;
}

std::vector<AttrPair> parse_pairs_file(const std::string& path,
                                       const std::string& relation) {
  // JSON: { "relation": [ {"ft": ..., "j": ...}, ... ], ... }
  nlohmann::json doc = nlohmann::json::parse(read_file(path));
  std::vector<AttrPair> pairs;
  if (!doc.contains(relation)) return pairs;
  for (const nlohmann::json& p : doc.at(relation)) {
    AttrPair pair;
    if (p.contains("ft") && !p.at("ft").is_null()) {
      pair.filter_attr = p.at("ft").get<std::string>();
    }
    if (p.contains("j") && !p.at("j").is_null()) {
      pair.join_attr = p.at("j").get<std::string>();
    }
    pairs.push_back(pair);
  }
  return pairs;
}

struct CatalogArgs {
  std::string data_dir;
  std::string synopses_dir;
  std::string config_file;
  u64 release_seed = 1;
};

EngineConfig load_engine_config(const CatalogArgs& args) {
  return args.config_file.empty() ? EngineConfig{}
                                  : load_config(args.config_file);
}

// Load data and synopses from disk; stores are rebuilt from the synopses.
EngineCatalog open_catalog(const CatalogArgs& args) {
  EngineConfig config = load_engine_config(args);
  Database db = load_database(args.data_dir);
  EngineCatalog cat;
  cat.config = config;
  if (!args.synopses_dir.empty()) {
    for (const auto& entry : fs::directory_iterator(args.synopses_dir)) {
      if (entry.path().extension() != ".json") continue;
      if (entry.path().filename().string().rfind("synopsis_", 0) != 0) {
        continue;
      }
      Synopsis s = synopsis_from_json(
          nlohmann::json::parse(read_file(entry.path().string())));
      cat.account.record_release(s.relation,
                                 static_cast<i64>(s.entries.size()),
                                 s.epsilon, s.delta);
      cat.synopses.emplace(s.relation, std::move(s));
    }
  }
  cat.db = std::move(db);
  return cat;
}

void build_stores(EngineCatalog& cat,
                  const std::vector<LogicalQuery>& workload) {
  for (const auto& [table, attr] :
       hottest_attrs(workload, cat.db, cat.synopses)) {
    cat.stores.emplace(table, build_indexed_store(cat.db.table(table),
                                                  cat.synopses.at(table),
                                                  attr));
  }
}

std::vector<LogicalQuery> default_workload(const Database& db) {
  std::vector<LogicalQuery> out;
  for (const auto& [name, sql] : benchmark_workload()) {
    out.push_back(parse_query(sql, db));
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"synopsis-assisted secure collaborative analytics engine"};
  app.require_subcommand(1);

  // gen-data
  auto* gen = app.add_subcommand("gen-data", "generate synthetic tables");
  u64 gen_scale = 1, gen_seed = 1;
  std::string gen_out = "data";
  gen->add_option("--scale", gen_scale, "row-count multiplier");
  gen->add_option("--seed", gen_seed, "generator seed");
  gen->add_option("--out", gen_out, "output directory")->required();

  // release-synopses
  auto* rel = app.add_subcommand("release-synopses",
                                 "one-time DP release of table statistics");
  CatalogArgs rel_args;
  std::string rel_pairs_file, rel_workload_file, rel_out = "synopses";
  double rel_epsilon = -1.0, rel_delta = -1.0;
  rel->add_option("--data", rel_args.data_dir, "data directory")->required();
  rel->add_option("--epsilon", rel_epsilon, "per-mechanism epsilon");
  rel->add_option("--delta", rel_delta, "per-mechanism delta");
  rel->add_option("--pairs", rel_pairs_file, "JSON file of attribute pairs");
  rel->add_option("--from-workload", rel_workload_file,
                  "derive pairs from a workload file");
  rel->add_option("--seed", rel_args.release_seed, "release seed");
  rel->add_option("--config", rel_args.config_file, "config file");
  rel->add_option("--out", rel_out, "output directory");

  // build-index
  auto* bix = app.add_subcommand("build-index",
                                 "build an indexed store for a relation");
  CatalogArgs bix_args;
  std::string bix_relation, bix_attr, bix_out = "stores";
  bix->add_option("--data", bix_args.data_dir)->required();
  bix->add_option("--synopses", bix_args.synopses_dir)->required();
  bix->add_option("--relation", bix_relation)->required();
  bix->add_option("--attr", bix_attr)->required();
  bix->add_option("--config", bix_args.config_file);
  bix->add_option("--out", bix_out);

  // plan
  auto* pl = app.add_subcommand("plan", "plan a query and print the tree");
  CatalogArgs pl_args;
  std::string pl_query_file, pl_mode = "special";
  bool pl_explain = false;
  u64 pl_seed = 1;
  pl->add_option("--data", pl_args.data_dir)->required();
  pl->add_option("--synopses", pl_args.synopses_dir);
  pl->add_option("--query", pl_query_file)->required();
  pl->add_option("--mode", pl_mode, "special|exhaustive|reactive");
  pl->add_option("--seed", pl_seed, "order seed for baseline modes");
  pl->add_option("--config", pl_args.config_file);
  pl->add_flag("--explain", pl_explain, "print the JSON explain document");

  // execute
  auto* ex = app.add_subcommand("execute", "plan, execute and report");
  CatalogArgs ex_args;
  std::string ex_query_file, ex_mode = "special", ex_out;
  bool ex_verify = false;
  u64 ex_seed = 1;
  ex->add_option("--data", ex_args.data_dir)->required();
  ex->add_option("--synopses", ex_args.synopses_dir);
  ex->add_option("--query", ex_query_file)->required();
  ex->add_option("--mode", ex_mode);
  ex->add_option("--seed", ex_seed);
  ex->add_option("--config", ex_args.config_file);
  ex->add_option("--out", ex_out, "write the run report JSON here");
  ex->add_flag("--verify", ex_verify, "compare against the plaintext oracle");

  // privacy-report
  auto* pr = app.add_subcommand("privacy-report",
                                "composed loss and continual-query curves");
  CatalogArgs pr_args;
  i64 pr_k = 100;
  bool pr_cdp = false;
  pr->add_option("--data", pr_args.data_dir)->required();
  pr->add_option("--synopses", pr_args.synopses_dir)->required();
  pr->add_option("--k", pr_k, "number of queries");
  pr->add_option("--config", pr_args.config_file);
  pr->add_flag("--cdp", pr_cdp, "include the zCDP approximation curve");

  // bench
  auto* be = app.add_subcommand("bench", "run the q1..q8 benchmark");
  CatalogArgs be_args;
  std::string be_suite = "q1,q2,q3,q4,q5,q6,q7,q8";
  std::string be_modes = "special";
  std::string be_out;
  u64 be_scale = 1;
  int be_seeds = 1;
  be->add_option("--data", be_args.data_dir,
                 "data directory (generated fresh per seed when omitted)");
  be->add_option("--suite", be_suite, "comma-separated query names");
  be->add_option("--modes", be_modes, "comma-separated modes");
  be->add_option("--seeds", be_seeds, "number of seeds");
  be->add_option("--scale", be_scale, "scale for generated data");
  be->add_option("--config", be_args.config_file);
  be->add_option("--out", be_out, "metrics JSON path");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*gen) {
      save_database(gen_data(gen_scale, gen_seed), gen_out);
      std::cout << "wrote " << gen_out << "\n";
      return 0;
    }

    if (*rel) {
      EngineConfig config = load_engine_config(rel_args);
      if (rel_epsilon > 0) config.epsilon = rel_epsilon;
      if (rel_delta > 0) config.delta = rel_delta;
      Database db = load_database(rel_args.data_dir);
      std::map<std::string, std::vector<AttrPair>> pairs;
      if (!rel_workload_file.empty()) {
        pairs = pairs_from_workload(parse_workload_file(rel_workload_file, db),
                                    db);
      } else if (!rel_pairs_file.empty()) {
        for (const auto& [table, relation] : db.tables) {
          auto p = parse_pairs_file(rel_pairs_file, table);
          if (!p.empty()) pairs[table] = std::move(p);
        }
      } else {
        pairs = pairs_from_workload(default_workload(db), db);
      }
      fs::create_directories(rel_out);
      u64 idx = 0;
      for (const auto& [table, table_pairs] : pairs) {
        Rng rng =
            seeded_rng(rel_args.release_seed + 0x9e3779b97f4a7c15ull * (++idx));
        Synopsis syn = gen_synopsis(table_pairs, db.table(table),
                                    config.epsilon, config.delta, config.bins,
                                    rng);
        write_json(rel_out + "/synopsis_" + table + ".json",
                   synopsis_to_json(syn));
      }
      std::cout << "released synopses for " << pairs.size()
                << " relations into " << rel_out << "\n";
      return 0;
    }

    if (*bix) {
      EngineCatalog cat = open_catalog(bix_args);
      IndexedStore store = build_indexed_store(
          cat.db.table(bix_relation), cat.synopses.at(bix_relation), bix_attr);
      fs::create_directories(bix_out);
      Database one;
      one.tables.emplace(bix_relation + "_sorted_" + bix_attr, store.sorted);
      one.tables.begin()->second.schema.name = one.tables.begin()->first;
      save_database(one, bix_out);
      write_json(bix_out + "/index_" + bix_relation + "_" + bix_attr + ".json",
                 index_to_json(store.index));
      std::cout << "built index for " << bix_relation << "." << bix_attr
                << "\n";
      return 0;
    }

    if (*pl || *ex) {
      const CatalogArgs& args = *pl ? pl_args : ex_args;
      EngineCatalog cat = open_catalog(args);
      std::vector<LogicalQuery> rep;
      for (const std::string& sql : representative_statements()) {
        rep.push_back(parse_query(sql, cat.db));
      }
      build_stores(cat, rep);
      const std::string query_file = *pl ? pl_query_file : ex_query_file;
      const LogicalQuery q = parse_query(read_file(query_file), cat.db);
      const PlanMode mode =
          plan_mode_from_string(*pl ? pl_mode : ex_mode);
      if (*pl) {
        PlanPtr plan = plan_query(q, cat.planner_inputs(), mode, pl_seed);
        std::cout << explain_text(*plan);
        if (pl_explain) std::cout << explain_json(*plan).dump(2) << "\n";
        return 0;
      }
      RunOutcome r = run_query(cat, q, fs::path(query_file).stem().string(),
                               mode, ex_seed, ex_verify);
      nlohmann::json doc;
      doc["metrics"] = metrics_to_json({r.metrics})[0];
      doc["plan"] = explain_json(*r.plan);
      doc["reports"] = reports_to_json(r.reports);
      nlohmann::json rows = nlohmann::json::array();
      for (const auto& row : r.result.rows) rows.push_back(row);
      doc["result_rows"] = rows;
      if (!ex_out.empty()) write_json(ex_out, doc);
      std::cout << doc["metrics"].dump(2) << "\n";
      if (ex_verify && !r.metrics.lossless) {
        std::cerr << "losslessness check FAILED\n";
        return 1;
      }
      return 0;
    }

    if (*pr) {
      EngineCatalog cat = open_catalog(pr_args);
      std::cout << privacy_report(cat, pr_k, pr_cdp).dump(2) << "\n";
      return 0;
    }

    if (*be) {
      EngineConfig config = load_engine_config(be_args);
      std::vector<std::string> suite;
      {
        std::stringstream ss(be_suite);
        std::string item;
        while (std::getline(ss, item, ',')) suite.push_back(item);
      }
      std::vector<PlanMode> modes;
      {
        std::stringstream ss(be_modes);
        std::string item;
        while (std::getline(ss, item, ',')) {
          modes.push_back(plan_mode_from_string(item));
        }
      }
      std::vector<RunMetrics> all;
      bool lossless_ok = true;
      for (int s = 1; s <= be_seeds; ++s) {
        Database db = be_args.data_dir.empty()
                          ? gen_data(be_scale, static_cast<u64>(s))
                          : load_database(be_args.data_dir);
        std::vector<LogicalQuery> rep;
        for (const std::string& sql : representative_statements()) {
          rep.push_back(parse_query(sql, db));
        }
        EngineCatalog cat = build_catalog(std::move(db), config, rep,
                                          static_cast<u64>(s) * 7919);
        auto metrics =
            run_benchmark(cat, suite, modes, {static_cast<u64>(s)});
        for (const RunMetrics& m : metrics) {
          if (m.verified && !m.lossless) lossless_ok = false;
          std::cout << m.query << " " << m.mode << " seed=" << m.seed
                    << (m.executed ? "" : " (not executed)")
                    << " intermediate=" << m.total_intermediate
                    << (m.verified ? (m.lossless ? " lossless" : " LOSSY")
                                   : "")
                    << "\n";
        }
        all.insert(all.end(), metrics.begin(), metrics.end());
      }
      if (!be_out.empty()) write_json(be_out, metrics_to_json(all));
      return lossless_ok ? 0 : 1;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
