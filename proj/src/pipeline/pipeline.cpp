#include "domainkit/pipeline/pipeline.hpp"

#include <functional>
#include <map>

#include "domainkit/common/error.hpp"
#include "domainkit/common/hash.hpp"
#include "domainkit/dedup/dedup.hpp"
#include "domainkit/evalharness/eval.hpp"
#include "domainkit/filters/filters.hpp"
#include "domainkit/ingest/ingest.hpp"
#include "domainkit/mixer/mixer.hpp"
#include "domainkit/sftgen/generate.hpp"

namespace domainkit {

namespace fs = std::filesystem;

namespace {

const std::vector<std::string> kStageOrder{"ingest", "filter", "dedup", "mix", "gen", "eval"};

json section(const json& raw, const std::string& name) {
  if (!raw.contains(name)) return json::object();
  const auto& s = raw[name];
  if (!s.is_object()) throw Error(ErrorCode::ConfigError, "config section '" + name + "' must be an object");
  return s;
}

std::vector<fs::path> files_under(const fs::path& p) {
  std::vector<fs::path> out;
  if (fs::is_directory(p)) {
    for (const auto& e : fs::recursive_directory_iterator(p)) {
      if (e.is_regular_file()) out.push_back(e.path());
    }
    std::sort(out.begin(), out.end());
  } else {
    out.push_back(p);
  }
  return out;
}

std::size_t checked_size(const json& s, const char* key, std::size_t fallback) {
  if (!s.contains(key)) return fallback;
  if (!s[key].is_number_integer() || s[key].get<long long>() < 0) {
    throw Error(ErrorCode::ConfigError, std::string("'") + key + "' must be a non-negative integer");
  }
  return s[key].get<std::size_t>();
}

struct Stage {
  std::string name;
  std::vector<fs::path> inputs;
  std::vector<fs::path> outputs;
  json config;
  std::function<void()> run;
};

}  // namespace

PipelineConfig PipelineConfig::load(const fs::path& path) {
  if (!fs::exists(path)) throw Error(ErrorCode::ConfigError, "config not found: " + path.string());
  json j;
  try {
    j = json::parse(read_file(path));
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ConfigError, path.string() + ": " + e.what());
  }
  return from_json(j, path.parent_path());
}

PipelineConfig PipelineConfig::from_json(const json& j, const fs::path& base_dir) {
  if (!j.is_object()) throw Error(ErrorCode::ConfigError, "pipeline config must be a JSON object");
  for (const auto& [key, _] : j.items()) {
    if (key != "seed" && key != "out_dir" &&
        std::find(kStageOrder.begin(), kStageOrder.end(), key) == kStageOrder.end()) {
      throw Error(ErrorCode::ConfigError, "unknown config section '" + key + "'");
    }
  }
  PipelineConfig c;
  c.base_dir = base_dir;
  c.raw = j;
  if (j.contains("seed")) {
    if (!j["seed"].is_number_unsigned()) throw Error(ErrorCode::ConfigError, "seed must be a non-negative integer");
    c.seed = j["seed"].get<std::uint64_t>();
  }
  c.out_dir = c.resolve(j.value("out_dir", std::string("out")));
  const json ingest = section(j, "ingest");
  if (!ingest.contains("inputs") || !ingest["inputs"].is_array() || ingest["inputs"].empty()) {
    throw Error(ErrorCode::ConfigError, "ingest.inputs must be a non-empty array");
  }
  for (const auto& in : ingest["inputs"]) {
    if (!in.is_object() || !in.contains("path") || !in["path"].is_string()) {
      throw Error(ErrorCode::ConfigError, "each ingest input needs a 'path'");
    }
    if (in.contains("kind") && !parse_source_kind(in["kind"].get<std::string>())) {
      throw Error(ErrorCode::ConfigError, "unknown source kind '" + in["kind"].get<std::string>() + "'");
    }
  }
  // Parse the remaining sections once so errors surface before any stage runs.
  FilterConfig::from_json(section(j, "filter"), base_dir);
  DedupConfig::from_json(section(j, "dedup")).validate();
  const json mixs = section(j, "mix");
  MixPlan::parse_ratio(mixs.value("ratio", std::string("1:0")));
  parse_mix_mode(mixs.value("mode", std::string("dapt")));
  parse_mix_unit(mixs.value("unit", std::string("tokens")));
  return c;
}

fs::path PipelineConfig::resolve(const std::string& p) const {
  const fs::path path(p);
  return path.is_absolute() ? path : base_dir / path;
}

bool PipelineConfig::has_stage(const std::string& stage) const { return raw.contains(stage); }

PipelineResult run_pipeline(const PipelineConfig& cfg, const PipelineOptions& opts) {
  const std::uint64_t seed = opts.seed.value_or(cfg.seed);
  const fs::path out = opts.out_dir.value_or(cfg.out_dir);
  fs::create_directories(out);

  PipelineResult result;
  result.out_dir = out;
  result.manifest_path = out / "manifest.jsonl";
  if (!opts.resume && fs::exists(result.manifest_path)) fs::remove(result.manifest_path);
  Manifest manifest(result.manifest_path);

  const json ingest_cfg = section(cfg.raw, "ingest");
  const TokenizerSpec tokenizer{ingest_cfg.value("tokenizer", std::string(kDefaultTokenizer))};
  if (!is_registered_tokenizer(tokenizer.name)) {
    throw Error(ErrorCode::UnknownTokenizer, "tokenizer '" + tokenizer.name + "' is not registered");
  }

  const fs::path docs_path = out / "docs.jsonl";
  const fs::path ingest_stats_path = out / "ingest_stats.json";
  const fs::path kept_path = out / "kept.jsonl";
  const fs::path filter_report_path = out / "filter_report.json";
  const fs::path unique_path = out / "unique.jsonl";
  const fs::path pairs_path = out / "dup_pairs.jsonl";
  const fs::path dedup_report_path = out / "dedup_report.json";
  const fs::path train_path = out / "train.jsonl";
  const fs::path mix_report_path = out / "mix_report.json";
  const fs::path trainer_path = out / "trainer.json";

  std::vector<Stage> stages;

  {
    Stage s{"ingest", {}, {docs_path, ingest_stats_path}, ingest_cfg, {}};
    for (const auto& in : ingest_cfg["inputs"]) {
      for (auto& f : files_under(cfg.resolve(in["path"].get<std::string>()))) s.inputs.push_back(std::move(f));
    }
    s.run = [&, ingest_cfg] {
      std::vector<RawRecord> records;
      for (const auto& in : ingest_cfg["inputs"]) {
        std::optional<SourceKind> kind;
        if (in.contains("kind")) kind = parse_source_kind(in["kind"].get<std::string>());
        auto part = load_raw_records(cfg.resolve(in["path"].get<std::string>()), kind);
        records.insert(records.end(), std::make_move_iterator(part.begin()), std::make_move_iterator(part.end()));
      }
      auto res = ingest_stream(records, tokenizer, checked_size(ingest_cfg, "workers", 1));
      if (res.docs.empty()) throw Error(ErrorCode::EmptyInput, "ingest produced no documents");
      write_documents(docs_path, res.docs);
      write_json(ingest_stats_path, res.stats.to_json());
    };
    stages.push_back(std::move(s));
  }

  {
    const json fcfg = section(cfg.raw, "filter");
    const FilterConfig filter = FilterConfig::from_json(fcfg, cfg.base_dir);
    Stage s{"filter", {docs_path}, {kept_path, filter_report_path}, fcfg, {}};
    if (filter.sensitive_word_list) s.inputs.push_back(*filter.sensitive_word_list);
    s.run = [&, filter] {
      const auto docs = read_documents(docs_path);
      const auto res = run_filters(docs, filter);
      write_documents(kept_path, res.retained);
      write_json(filter_report_path, res.report.to_json());
    };
    stages.push_back(std::move(s));
  }

  {
    json dcfg = section(cfg.raw, "dedup");
    if (!dcfg.contains("seed")) dcfg["seed"] = seed;
    const DedupConfig dedup = DedupConfig::from_json(dcfg);
    Stage s{"dedup", {kept_path}, {unique_path, pairs_path, dedup_report_path}, dcfg, {}};
    s.run = [&, dedup] {
      auto res = run_dedup(read_documents(kept_path), dedup, tokenizer);
      write_documents(unique_path, res.retained);
      std::vector<json> rows;
      for (const auto& p : res.pairs) rows.push_back(p.to_json());
      write_jsonl(pairs_path, rows);
      write_json(dedup_report_path, res.report.to_json());
    };
    stages.push_back(std::move(s));
  }

  {
    json mcfg = section(cfg.raw, "mix");
    if (!mcfg.contains("seed")) mcfg["seed"] = seed;
    MixPlan plan;
    plan.ratio_general = MixPlan::parse_ratio(mcfg.value("ratio", std::string("1:0")));
    plan.mode = parse_mix_mode(mcfg.value("mode", std::string("dapt")));
    plan.unit = parse_mix_unit(mcfg.value("unit", std::string("tokens")));
    plan.allow_short = mcfg.value("allow_short", false);
    plan.seed = mcfg["seed"].get<std::uint64_t>();
    std::optional<fs::path> general_file;
    std::optional<fs::path> instructions_file;
    if (mcfg.contains("general")) general_file = cfg.resolve(mcfg["general"].get<std::string>());
    if (mcfg.contains("instructions")) instructions_file = cfg.resolve(mcfg["instructions"].get<std::string>());
    if (plan.mode != MixMode::DAPT && !instructions_file) {
      throw Error(ErrorCode::ConfigError, "mix.instructions is required for SFT and MIP modes");
    }
    Stage s{"mix", {unique_path}, {train_path, mix_report_path, trainer_path}, mcfg, {}};
    if (general_file) s.inputs.push_back(*general_file);
    if (instructions_file) s.inputs.push_back(*instructions_file);
    s.run = [&, plan, general_file, instructions_file] {
      const auto unique = read_documents(unique_path);
      std::vector<TrainingItem> domain_docs;
      std::vector<TrainingItem> general_docs;
      for (const auto& d : unique) {
        (is_domain(d.source_kind) ? domain_docs : general_docs).push_back(item_from_document(d, ""));
      }
      for (auto& it : domain_docs) it.origin = "domain";
      for (auto& it : general_docs) it.origin = "general";
      MixResult res;
      if (plan.mode == MixMode::MIP) {
        const auto instr = load_training_items(*instructions_file, "domain_instruction", tokenizer);
        res = build_mip(domain_docs, instr, plan.seed);
      } else {
        std::vector<TrainingItem> domain;
        std::vector<TrainingItem> general;
        if (plan.mode == MixMode::DAPT) {
          domain = std::move(domain_docs);
          general = std::move(general_docs);
        } else {
          domain = load_training_items(*instructions_file, "domain_instruction", tokenizer);
        }
        if (general_file) {
          auto extra = load_training_items(*general_file, "general", tokenizer);
          general.insert(general.end(), std::make_move_iterator(extra.begin()), std::make_move_iterator(extra.end()));
        }
        res = mix(domain, general, plan);
      }
      res.report.tokenizer = tokenizer.name;
      write_training_items(train_path, res.items);
      write_json(mix_report_path, res.report.to_json());
      write_json(trainer_path, emit_trainer_config(plan).to_json());
    };
    stages.push_back(std::move(s));
  }

  if (cfg.has_stage("gen")) {
    const json gcfg = section(cfg.raw, "gen");
    std::vector<GenKind> kinds;
    for (const auto& k : gcfg.value("kinds", json::array({"one_turn", "multi_turn", "mcq"}))) {
      kinds.push_back(parse_gen_kind(k.get<std::string>()));
    }
    if (!gcfg.contains("endpoint")) throw Error(ErrorCode::ConfigError, "gen.endpoint is required");
    const fs::path ep_path = cfg.resolve(gcfg["endpoint"].get<std::string>());
    const fs::path archive_dir = gcfg.contains("archive") ? cfg.resolve(gcfg["archive"].get<std::string>())
                                                          : out / "archive";
    const std::size_t budget = checked_size(gcfg, "budget", 1000);
    const bool offline = opts.offline || gcfg.value("offline", false);
    const fs::path sft_out = out / "sft.jsonl";
    const fs::path mcq_out = out / "mcq.jsonl";
    const fs::path gen_report = out / "gen_report.json";
    Stage s{"gen", {unique_path, ep_path}, {sft_out, mcq_out, gen_report}, gcfg, {}};
    s.run = [&, kinds, ep_path, archive_dir, budget, offline, sft_out, mcq_out, gen_report] {
      const auto ep_cfg = load_endpoint_config(ep_path);
      std::unique_ptr<ChatEndpoint> endpoint;
      if (!offline) endpoint = std::make_unique<HttpChatEndpoint>(ep_cfg);
      RequestRunner runner(endpoint.get(), ResponseArchive(archive_dir), budget, ep_cfg.max_retries, ep_cfg.backoff_ms);
      std::map<GenKind, PromptTemplate> templates;
      for (GenKind k : kinds) templates[k] = load_default_template(k);
      GenOptions gopts;
      gopts.lenient = opts.lenient;
      gopts.temperature = ep_cfg.temperature;
      auto res = batch_generate(read_documents(unique_path), kinds, runner, templates, gopts, ep_cfg.concurrency_limit);
      write_instructions(sft_out, res.samples);
      write_mcq_items(mcq_out, res.mcq);
      write_json(gen_report, res.report.to_json());
      if (res.report.budget_exhausted) {
        throw Error(ErrorCode::BudgetExhausted, "request budget spent; partial output written, rerun to resume");
      }
    };
    stages.push_back(std::move(s));
  }

  if (cfg.has_stage("eval")) {
    const json ecfg = section(cfg.raw, "eval");
    if (!ecfg.contains("dataset") || !ecfg.contains("endpoint")) {
      throw Error(ErrorCode::ConfigError, "eval needs 'dataset' and 'endpoint'");
    }
    const fs::path ds_path = cfg.resolve(ecfg["dataset"].get<std::string>());
    const fs::path ep_path = cfg.resolve(ecfg["endpoint"].get<std::string>());
    std::optional<fs::path> dev_path;
    if (ecfg.contains("dev")) dev_path = cfg.resolve(ecfg["dev"].get<std::string>());
    const fs::path archive_dir = ecfg.contains("archive") ? cfg.resolve(ecfg["archive"].get<std::string>())
                                                          : out / "eval_archive";
    const fs::path report_path = out / "eval_report.json";
    Stage s{"eval", {ds_path, ep_path}, {report_path}, ecfg, {}};
    if (dev_path) s.inputs.push_back(*dev_path);
    const bool offline = opts.offline || ecfg.value("offline", false);
    s.run = [&, ecfg, ds_path, ep_path, dev_path, archive_dir, report_path, offline] {
      const auto ep_cfg = load_endpoint_config(ep_path);
      std::unique_ptr<ChatEndpoint> endpoint;
      if (!offline) endpoint = std::make_unique<HttpChatEndpoint>(ep_cfg);
      RequestRunner runner(endpoint.get(), ResponseArchive(archive_dir), checked_size(ecfg, "budget", 100000),
                           ep_cfg.max_retries, ep_cfg.backoff_ms);
      const auto ds = load_dataset(ds_path);
      const std::vector<MCQItem> pool = dev_path ? load_dataset(*dev_path).items : std::vector<MCQItem>{};
      std::vector<EvalReport> reports;
      for (const auto& k : ecfg.value("shots", json::array({0, 5}))) {
        EvalRunConfig rc;
        rc.shots = k.get<std::size_t>();
        rc.seed = seed;
        rc.model_label = ecfg.value("model_label", ep_cfg.model_name);
        rc.ratio_label = ecfg.value("ratio_label", "");
        reports.push_back(run_eval(ds, pool, rc, runner, ep_cfg.concurrency_limit));
      }
      json runs = json::array();
      for (const auto& r : reports) runs.push_back(r.to_json());
      write_json(report_path, {{"best_shots", best_of_settings(reports).config.shots}, {"runs", runs}});
    };
    stages.push_back(std::move(s));
  }

  for (auto& stage : stages) {
    const std::string config_digest =
        sha256_hex(dump_line({{"stage", stage.name}, {"config", stage.config}, {"seed", seed},
                              {"tokenizer", tokenizer.name}}));
    std::vector<FileDigest> inputs;
    for (const auto& p : stage.inputs) {
      if (!fs::exists(p)) {
        throw Error(ErrorCode::StageFailure, "stage '" + stage.name + "': missing input " + p.string());
      }
      inputs.push_back(manifest.digest(p));
    }

    if (opts.resume) {
      if (const ManifestEntry* prev = manifest.find(stage.name)) {
        for (const auto& o : prev->outputs) {
          const fs::path p = manifest.resolve(o.path);
          if (!fs::exists(p)) continue;
          const auto actual = sha256_file(p);
          if (actual != o.sha256) {
            throw Error(ErrorCode::DigestMismatch, "stage '" + stage.name + "': " + o.path + " has digest " + actual +
                                                       ", manifest records " + o.sha256);
          }
        }
        bool all_present = true;
        for (const auto& o : prev->outputs) all_present &= fs::exists(manifest.resolve(o.path));
        if (all_present && prev->inputs == inputs && prev->config_digest == config_digest) {
          result.stages.push_back({stage.name, true});
          continue;
        }
      }
    }

    ManifestEntry entry;
    entry.stage = stage.name;
    entry.inputs = std::move(inputs);
    entry.config_digest = config_digest;
    entry.seed = seed;
    entry.toolkit_version = toolkit_version();
    entry.started_at = now_utc();
    try {
      stage.run();
    } catch (const Error& e) {
      if (e.code() == ErrorCode::BudgetExhausted || e.code() == ErrorCode::DigestMismatch) throw;
      throw Error(ErrorCode::StageFailure, "stage '" + stage.name + "': " + e.what());
    } catch (const std::exception& e) {
      throw Error(ErrorCode::StageFailure, "stage '" + stage.name + "': " + e.what());
    }
    for (const auto& p : stage.outputs) entry.outputs.push_back(manifest.digest(p));
    entry.finished_at = now_utc();
    manifest.append(entry);
    result.stages.push_back({stage.name, false});
  }
  return result;
}

}  // namespace domainkit
