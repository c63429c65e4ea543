#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <memory>

#include "domainkit/common/error.hpp"
#include "domainkit/common/hash.hpp"
#include "domainkit/dedup/dedup.hpp"
#include "domainkit/evalharness/eval.hpp"
#include "domainkit/evalharness/sweep.hpp"
#include "domainkit/filters/filters.hpp"
#include "domainkit/ingest/ingest.hpp"
#include "domainkit/mixer/mixer.hpp"
#include "domainkit/pipeline/pipeline.hpp"
#include "domainkit/pipeline/stats.hpp"
#include "domainkit/sftgen/generate.hpp"
#include "domainkit/sftgen/term_frequency.hpp"

namespace fs = std::filesystem;
using namespace domainkit;

namespace {

struct Globals {
  std::optional<std::uint64_t> seed;
  std::string config;
  std::string out_dir;
  bool resume = false;
  bool lenient = false;
};

fs::path out_path(const Globals& g, const std::string& p) {
  const fs::path path(p);
  if (path.is_absolute() || g.out_dir.empty()) return path;
  return fs::path(g.out_dir) / path;
}

json read_json_file(const fs::path& p) {
  try {
    return json::parse(read_file(p));
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ConfigError, p.string() + ": " + e.what());
  }
}

void ensure_parent(const fs::path& p) {
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
}

std::vector<std::size_t> parse_shots(const std::string& s) {
  std::vector<std::size_t> shots;
  std::size_t start = 0;
  while (start <= s.size()) {
    const auto comma = s.find(',', start);
    const auto piece = s.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
    try {
      std::size_t used = 0;
      const long v = std::stol(piece, &used);
      if (used != piece.size() || v < 0) throw std::invalid_argument(piece);
      shots.push_back(static_cast<std::size_t>(v));
    } catch (const std::exception&) {
      throw Error(ErrorCode::ConfigError, "bad --shots value '" + s + "'");
    }
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return shots;
}

std::unique_ptr<ChatEndpoint> make_endpoint(const EndpointConfig& cfg, bool offline) {
  if (offline) return nullptr;
  return std::make_unique<HttpChatEndpoint>(cfg);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Domain corpus preprocessing, data mixing, instruction generation and MCQ evaluation"};
  app.set_version_flag("--version", toolkit_version());
  app.require_subcommand(1);
  app.fallthrough();

  Globals g;
  app.add_option("--seed", g.seed, "RNG seed (mix, dedup, eval, run)");
  app.add_option("--config", g.config, "Stage config (filter, dedup) or pipeline config (run)");
  app.add_option("--out-dir", g.out_dir, "Directory for relative output paths / pipeline outputs");
  app.add_flag("--resume", g.resume, "Skip pipeline stages verified against the manifest");
  app.add_flag("--lenient", g.lenient, "Keep salvageable generation output instead of rejecting it");

  // ingest
  auto* ingest = app.add_subcommand("ingest", "Extract clean documents from raw sources");
  std::vector<std::string> ingest_in;
  std::string ingest_kind;
  std::string ingest_out = "docs.jsonl";
  std::string ingest_stats;
  std::string tokenizer_name{kDefaultTokenizer};
  std::size_t workers = 1;
  ingest->add_option("--in", ingest_in, "Input files or directories")->required();
  ingest->add_option("--kind", ingest_kind, "Source kind for inputs that do not name one");
  ingest->add_option("--out", ingest_out, "Documents JSONL");
  ingest->add_option("--stats", ingest_stats, "Ingest statistics JSON");
  ingest->add_option("--tokenizer", tokenizer_name, "Token counter");
  ingest->add_option("--workers", workers, "Extraction threads")->check(CLI::PositiveNumber);

  // filter
  auto* filter = app.add_subcommand("filter", "Sensitive-word, language and length filters");
  std::string filter_in;
  std::string filter_out = "kept.jsonl";
  std::string filter_report;
  std::string filter_dropped;
  filter->add_option("--in", filter_in)->required();
  filter->add_option("--out", filter_out);
  filter->add_option("--report", filter_report);
  filter->add_option("--dropped", filter_dropped, "Write dropped documents with their reasons");

  // dedup
  auto* dedup = app.add_subcommand("dedup", "Exact, near-duplicate and sentence-level deduplication");
  std::string dedup_in;
  std::string dedup_out = "unique.jsonl";
  std::string dedup_pairs;
  std::string dedup_report;
  dedup->add_option("--in", dedup_in)->required();
  dedup->add_option("--out", dedup_out);
  dedup->add_option("--pairs", dedup_pairs);
  dedup->add_option("--report", dedup_report);
  dedup->add_option("--tokenizer", tokenizer_name);

  // mix
  auto* mixc = app.add_subcommand("mix", "Build a DAPT/SFT/MIP training set at a 1:k ratio");
  std::string mix_domain;
  std::string mix_general;
  std::string mix_instructions;
  std::string mix_ratio = "1:0";
  std::string mix_mode = "dapt";
  std::string mix_unit = "tokens";
  bool allow_short = false;
  std::string mix_out = "train.jsonl";
  std::string mix_report;
  std::string mix_trainer;
  mixc->add_option("--domain", mix_domain, "Domain documents (DAPT, MIP) or domain instructions (SFT)")->required();
  mixc->add_option("--general", mix_general, "General pool");
  mixc->add_option("--instructions", mix_instructions, "Domain instruction data (MIP)");
  mixc->add_option("--ratio", mix_ratio, "Domain:general ratio 1:k");
  mixc->add_option("--mode", mix_mode, "dapt | sft | mip");
  mixc->add_option("--unit", mix_unit, "tokens | examples");
  mixc->add_flag("--allow-short", allow_short, "Use the whole general pool when it is too small");
  mixc->add_option("--out", mix_out);
  mixc->add_option("--report", mix_report);
  mixc->add_option("--trainer-config", mix_trainer, "Also write the trainer config");
  mixc->add_option("--tokenizer", tokenizer_name);

  // emit-config
  auto* emit = app.add_subcommand("emit-config", "Write trainer hyper-parameters for a mode");
  std::string emit_mode = "dapt";
  std::string emit_out = "trainer.json";
  emit->add_option("--mode", emit_mode);
  emit->add_option("--out", emit_out);

  // gen
  auto* gen = app.add_subcommand("gen", "Generate instruction data or MCQ items from knowledge documents");
  std::vector<std::string> gen_kinds;
  std::string gen_knowledge;
  std::string gen_endpoint;
  std::string gen_out;
  std::string gen_report;
  std::string gen_archive;
  std::string gen_categories;
  std::string gen_prompts;
  std::string gen_difficulty = "fundamentals";
  std::string gen_category = "generated";
  std::size_t budget = 1000;
  bool offline = false;
  gen->add_option("--kind", gen_kinds, "one-turn | multi-turn | mcq (repeatable)")->required();
  gen->add_option("--knowledge", gen_knowledge, "Retained documents JSONL")->required();
  gen->add_option("--endpoint", gen_endpoint, "Endpoint config JSON")->required();
  gen->add_option("--out", gen_out, "Output JSONL")->required();
  gen->add_option("--report", gen_report);
  gen->add_option("--archive", gen_archive, "Raw-response archive directory (default <out>.archive)");
  gen->add_option("--budget", budget, "Maximum network requests");
  gen->add_option("--categories", gen_categories, "Category list file (one-turn)");
  gen->add_option("--prompts-dir", gen_prompts, "Directory with <kind>.txt prompt templates");
  gen->add_option("--difficulty", gen_difficulty, "Difficulty recorded on generated MCQ items");
  gen->add_option("--category", gen_category, "Category recorded on generated MCQ items");
  gen->add_flag("--offline", offline, "Replay the archive only; never contact the endpoint");

  // eval
  auto* evalc = app.add_subcommand("eval", "Evaluate an endpoint on an MCQ dataset");
  std::string eval_dataset;
  std::string eval_dev;
  std::string eval_endpoint;
  std::string eval_shots = "0,5";
  std::string eval_out = "report.json";
  std::string eval_archive;
  std::string eval_extraction = "letter_regex";
  std::string exemplar_source = "dev";
  std::string model_label;
  std::string ratio_label;
  std::size_t eval_budget = 100000;
  evalc->add_option("--dataset", eval_dataset)->required();
  evalc->add_option("--dev", eval_dev, "Exemplar pool (MCQ JSONL)");
  evalc->add_option("--endpoint", eval_endpoint)->required();
  evalc->add_option("--shots", eval_shots, "Comma-separated shot counts");
  evalc->add_option("--out", eval_out);
  evalc->add_option("--archive", eval_archive, "Raw-response archive directory (default <out>.archive)");
  evalc->add_option("--extraction", eval_extraction, "letter_regex | option_logprob");
  evalc->add_option("--exemplar-split", exemplar_source, "Split tag used as exemplar pool");
  evalc->add_option("--model-label", model_label);
  evalc->add_option("--ratio-label", ratio_label);
  evalc->add_option("--budget", eval_budget);
  evalc->add_flag("--offline", offline);

  // sweep-report
  auto* sweep = app.add_subcommand("sweep-report", "Tabulate eval reports by model and data ratio");
  std::vector<std::string> sweep_runs;
  std::string sweep_out = "table.csv";
  sweep->add_option("--runs", sweep_runs, "Eval report JSON files")->required();
  sweep->add_option("--out", sweep_out, "CSV output (an aligned .txt table is written next to it)");

  // stats
  auto* stats = app.add_subcommand("stats", "Summarise any artifact file");
  std::string stats_file;
  std::size_t top_terms = 20;
  std::string stopwords;
  bool stats_json = false;
  stats->add_option("file", stats_file)->required();
  stats->add_option("--top", top_terms, "Number of terms in frequency tables");
  stats->add_option("--stopwords", stopwords, "Stop-word list");
  stats->add_flag("--json", stats_json, "Print the JSON summary");

  // run
  auto* run = app.add_subcommand("run", "Run the configured pipeline with a manifest");
  run->add_flag("--offline", offline);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (*ingest) {
      std::optional<SourceKind> kind;
      if (!ingest_kind.empty()) {
        kind = parse_source_kind(ingest_kind);
        if (!kind) throw Error(ErrorCode::ConfigError, "unknown source kind '" + ingest_kind + "'");
      }
      std::vector<RawRecord> records;
      for (const auto& p : ingest_in) {
        auto part = load_raw_records(p, kind);
        records.insert(records.end(), std::make_move_iterator(part.begin()), std::make_move_iterator(part.end()));
      }
      const auto res = ingest_stream(records, TokenizerSpec{tokenizer_name}, workers);
      const auto out = out_path(g, ingest_out);
      ensure_parent(out);
      write_documents(out, res.docs);
      if (!ingest_stats.empty()) write_json(out_path(g, ingest_stats), res.stats.to_json());
      std::cout << "ingested " << res.docs.size() << " documents from " << res.stats.records << " records ("
                << res.stats.total_tokens() << " tokens, " << tokenizer_name << ")\n";
    } else if (*filter) {
      const FilterConfig cfg = g.config.empty() ? FilterConfig{}
                                                : FilterConfig::from_json(read_json_file(g.config),
                                                                          fs::path(g.config).parent_path());
      const auto res = run_filters(read_documents(filter_in), cfg);
      const auto out = out_path(g, filter_out);
      ensure_parent(out);
      write_documents(out, res.retained);
      if (!filter_dropped.empty()) write_documents(out_path(g, filter_dropped), res.dropped);
      if (!filter_report.empty()) write_json(out_path(g, filter_report), res.report.to_json());
      std::cout << dump_line(res.report.to_json()) << "\n";
    } else if (*dedup) {
      DedupConfig cfg = g.config.empty() ? DedupConfig{} : DedupConfig::from_json(read_json_file(g.config));
      if (g.seed) cfg.seed = *g.seed;
      auto res = run_dedup(read_documents(dedup_in), cfg, TokenizerSpec{tokenizer_name});
      const auto out = out_path(g, dedup_out);
      ensure_parent(out);
      write_documents(out, res.retained);
      if (!dedup_pairs.empty()) {
        std::vector<json> rows;
        for (const auto& p : res.pairs) rows.push_back(p.to_json());
        write_jsonl(out_path(g, dedup_pairs), rows);
      }
      if (!dedup_report.empty()) write_json(out_path(g, dedup_report), res.report.to_json());
      std::cout << dump_line(res.report.to_json()) << "\n";
    } else if (*mixc) {
      const TokenizerSpec tok{tokenizer_name};
      MixPlan plan;
      plan.ratio_general = MixPlan::parse_ratio(mix_ratio);
      plan.mode = parse_mix_mode(mix_mode);
      plan.unit = parse_mix_unit(mix_unit);
      plan.allow_short = allow_short;
      plan.seed = g.seed.value_or(42);
      MixResult res;
      if (plan.mode == MixMode::MIP) {
        if (mix_instructions.empty()) throw Error(ErrorCode::ConfigError, "MIP mode needs --instructions");
        res = build_mip(load_training_items(mix_domain, "domain", tok),
                        load_training_items(mix_instructions, "domain_instruction", tok), plan.seed);
      } else {
        const auto domain =
            load_training_items(mix_domain, plan.mode == MixMode::SFT ? "domain_instruction" : "domain", tok);
        const auto general =
            mix_general.empty() ? std::vector<TrainingItem>{} : load_training_items(mix_general, "general", tok);
        res = mix(domain, general, plan);
      }
      res.report.tokenizer = tokenizer_name;
      const auto out = out_path(g, mix_out);
      ensure_parent(out);
      write_training_items(out, res.items);
      if (!mix_report.empty()) write_json(out_path(g, mix_report), res.report.to_json());
      if (!mix_trainer.empty()) write_json(out_path(g, mix_trainer), emit_trainer_config(plan).to_json());
      std::cout << dump_line(res.report.to_json()) << "\n";
    } else if (*emit) {
      const auto out = out_path(g, emit_out);
      ensure_parent(out);
      const auto cfg = emit_trainer_config(parse_mix_mode(emit_mode));
      write_json(out, cfg.to_json());
      std::cout << dump_line(cfg.to_json()) << "\n";
    } else if (*gen) {
      const auto ep_cfg = load_endpoint_config(gen_endpoint);
      const auto out = out_path(g, gen_out);
      ensure_parent(out);
      const fs::path archive_dir = gen_archive.empty() ? fs::path(out.string() + ".archive") : out_path(g, gen_archive);
      const auto difficulty = parse_difficulty(gen_difficulty);
      if (!difficulty) throw Error(ErrorCode::ConfigError, "unknown difficulty '" + gen_difficulty + "'");
      std::vector<GenKind> kinds;
      for (const auto& k : gen_kinds) kinds.push_back(parse_gen_kind(k));
      std::map<GenKind, PromptTemplate> templates;
      const fs::path prompts = gen_prompts.empty() ? default_data_dir() / "prompts" : fs::path(gen_prompts);
      const fs::path cats = gen_categories.empty() ? default_data_dir() / "categories.txt" : fs::path(gen_categories);
      for (GenKind k : kinds) templates[k] = load_template(k, prompts, cats);
      auto endpoint = make_endpoint(ep_cfg, offline);
      RequestRunner runner(endpoint.get(), ResponseArchive(archive_dir), budget, ep_cfg.max_retries,
                           ep_cfg.backoff_ms);
      GenOptions opts;
      opts.lenient = g.lenient;
      opts.temperature = ep_cfg.temperature;
      opts.mcq_difficulty = *difficulty;
      opts.mcq_category = gen_category;
      auto res = batch_generate(read_documents(gen_knowledge), kinds, runner, templates, opts,
                                ep_cfg.concurrency_limit);
      const bool mcq_only = kinds.size() == 1 && kinds[0] == GenKind::mcq;
      if (mcq_only) {
        write_mcq_items(out, res.mcq);
      } else {
        write_instructions(out, res.samples);
        if (!res.mcq.empty()) write_mcq_items(out.string() + ".mcq.jsonl", res.mcq);
      }
      for (const auto& w : res.report.warnings) std::cerr << "warning: " << w << "\n";
      if (!gen_report.empty()) write_json(out_path(g, gen_report), res.report.to_json());
      std::cout << "accepted " << res.report.accepted << ", rejected " << res.report.rejected << " of "
                << res.report.requests << " requests; " << res.report.samples << " samples, "
                << res.report.mcq_items << " mcq items\n";
      if (res.report.budget_exhausted) {
        throw Error(ErrorCode::BudgetExhausted, "budget of " + std::to_string(budget) +
                                                    " requests spent; partial output written, rerun to resume");
      }
    } else if (*evalc) {
      const auto ep_cfg = load_endpoint_config(eval_endpoint);
      const auto out = out_path(g, eval_out);
      ensure_parent(out);
      const fs::path archive_dir =
          eval_archive.empty() ? fs::path(out.string() + ".archive") : out_path(g, eval_archive);
      auto endpoint = make_endpoint(ep_cfg, offline);
      RequestRunner runner(endpoint.get(), ResponseArchive(archive_dir), eval_budget, ep_cfg.max_retries,
                           ep_cfg.backoff_ms);
      const auto ds = load_dataset(eval_dataset);
      const std::vector<MCQItem> pool = eval_dev.empty() ? std::vector<MCQItem>{} : load_dataset(eval_dev).items;
      std::vector<EvalReport> reports;
      for (std::size_t k : parse_shots(eval_shots)) {
        EvalRunConfig rc;
        rc.shots = k;
        rc.exemplar_source = exemplar_source;
        rc.extraction = parse_extraction(eval_extraction);
        rc.seed = g.seed.value_or(42);
        rc.model_label = model_label.empty() ? ep_cfg.model_name : model_label;
        rc.ratio_label = ratio_label;
        reports.push_back(run_eval(ds, pool, rc, runner, ep_cfg.concurrency_limit));
      }
      const auto& best = best_of_settings(reports);
      json runs = json::array();
      for (const auto& r : reports) runs.push_back(r.to_json());
      write_json(out, {{"best_shots", best.config.shots}, {"runs", runs}});
      const auto table = build_sweep(rows_from_reports(reports));
      write_file(out.string() + ".csv", sweep_csv(table));
      write_file(out.string() + ".txt", sweep_text(table));
      for (const auto& r : reports) {
        std::cout << r.dataset << " k=" << r.config.shots << ": " << format_percent(r.overall.hundredths()) << " ("
                  << r.overall.correct << "/" << r.overall.total << ")" << (r.degraded ? " [degraded]" : "") << "\n";
      }
      std::cout << "best: k=" << best.config.shots << "\n";
    } else if (*sweep) {
      std::vector<EvalReport> reports;
      for (const auto& p : sweep_runs) {
        const json j = read_json_file(p);
        if (j.contains("runs")) {
          for (const auto& r : j["runs"]) reports.push_back(EvalReport::from_json(r));
        } else {
          reports.push_back(EvalReport::from_json(j));
        }
      }
      const auto table = build_sweep(rows_from_reports(reports));
      const auto out = out_path(g, sweep_out);
      ensure_parent(out);
      write_file(out, sweep_csv(table));
      fs::path txt = out;
      txt.replace_extension(".txt");
      const auto text = sweep_text(table);
      write_file(txt, text);
      std::cout << text;
    } else if (*stats) {
      const auto s = artifact_stats(stats_file, top_terms, stopwords);
      std::cout << "schema: " << to_string(s.schema) << "\n";
      std::cout << (stats_json ? dump_pretty(s.summary) + "\n" : s.text);
    } else if (*run) {
      if (g.config.empty()) throw Error(ErrorCode::ConfigError, "run needs --config");
      const auto cfg = PipelineConfig::load(g.config);
      PipelineOptions opts;
      if (!g.out_dir.empty()) opts.out_dir = g.out_dir;
      opts.seed = g.seed;
      opts.resume = g.resume;
      opts.lenient = g.lenient;
      opts.offline = offline;
      const auto res = run_pipeline(cfg, opts);
      for (const auto& s : res.stages) std::cout << s.stage << (s.skipped ? ": verified, skipped\n" : ": done\n");
      std::cout << "manifest: " << res.manifest_path.string() << "\n";
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
