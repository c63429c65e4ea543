#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "domainkit/common/jsonl.hpp"
#include "domainkit/ingest/document.hpp"
#include "domainkit/ingest/tokenizer.hpp"
#include "domainkit/sftgen/instruction.hpp"

namespace domainkit {

enum class MixMode { DAPT, SFT, MIP };
enum class MixUnit { tokens, examples };

std::string_view to_string(MixMode mode);
std::string_view to_string(MixUnit unit);
// Case-insensitive "dapt" / "sft" / "mip"; throws ConfigError.
MixMode parse_mix_mode(std::string_view s);
MixUnit parse_mix_unit(std::string_view s);

struct MixPlan {
  std::size_t ratio_domain = 1;
  std::size_t ratio_general = 0;
  MixMode mode = MixMode::DAPT;
  std::uint64_t seed = 42;
  MixUnit unit = MixUnit::tokens;
  bool allow_short = false;

  // "1:k"; the domain side must be 1.
  static std::size_t parse_ratio(std::string_view ratio);
  std::string ratio_label() const;
};

// One line of a training set.
struct TrainingItem {
  std::string id;
  std::string origin;  // domain | general | domain_instruction
  std::string text;
  std::size_t tokens = 0;
  std::vector<Turn> turns;  // instruction items only

  json to_json() const;
  friend bool operator==(const TrainingItem&, const TrainingItem&) = default;
};

TrainingItem item_from_document(const Document& doc, std::string origin);
// Text is the SFT rendering; tokens are counted on it.
TrainingItem item_from_instruction(const InstructionSample& sample, std::string origin,
                                   const TokenizerSpec& tokenizer = {});

// Reads Document, InstructionSample, Alpaca-style {"instruction","input",
// "output"} or plain {"id","text"} lines. Items without an id get
// "<file stem>:<line>".
std::vector<TrainingItem> load_training_items(const std::filesystem::path& path, std::string origin,
                                              const TokenizerSpec& tokenizer = {});

struct MixReport {
  MixMode mode = MixMode::DAPT;
  std::string ratio;
  MixUnit unit = MixUnit::tokens;
  std::uint64_t seed = 0;
  std::string tokenizer{kDefaultTokenizer};
  std::size_t domain_items = 0;
  std::size_t general_items = 0;
  std::size_t domain_tokens = 0;
  std::size_t general_tokens = 0;
  std::size_t instruction_items = 0;
  double target = 0.0;
  double achieved_ratio = 0.0;
  std::size_t shortfall = 0;

  json to_json() const;
};

struct MixResult {
  std::vector<TrainingItem> items;
  MixReport report;
};

// All domain items exactly once, plus general items drawn without replacement
// (seeded uniform order) until the general total first reaches k times the
// domain total; the union is then shuffled with the same seed.
// Throws EmptyDomain, or InsufficientGeneralData unless plan.allow_short.
MixResult mix(std::span<const TrainingItem> domain, std::span<const TrainingItem> general,
              const MixPlan& plan);

// Pretraining documents plus rendered instruction samples, shuffled; no
// general data. Throws EmptyInput if either side is empty.
MixResult build_mip(std::span<const TrainingItem> domain_pretrain,
                    std::span<const TrainingItem> domain_instructions, std::uint64_t seed);

// Portable seeded Fisher-Yates (std::shuffle's algorithm is unspecified).
template <typename T>
void seeded_shuffle(std::vector<T>& v, std::mt19937_64& rng) {
  for (std::size_t i = v.size(); i > 1; --i) {
    const std::uint64_t n = i;
    const std::uint64_t threshold = (0 - n) % n;
    std::uint64_t r = rng();
    while (r < threshold) r = rng();
    std::swap(v[i - 1], v[static_cast<std::size_t>(r % n)]);
  }
}

void write_training_items(const std::filesystem::path& path, std::span<const TrainingItem> items);

struct TrainerConfig {
  std::string precision = "fp16";
  int epochs = 4;
  int batch_size = 64;
  double learning_rate = 1e-4;
  double warmup_ratio = 0.1;
  std::string lr_scheduler = "cosine";
  int max_length = 1024;

  json to_json() const;
  static TrainerConfig from_json(const json& j);
  friend bool operator==(const TrainerConfig&, const TrainerConfig&) = default;
};

// Shared hyper-parameters; max_length is 1024 for DAPT and MIP, 1536 for SFT.
TrainerConfig emit_trainer_config(const MixPlan& plan);
TrainerConfig emit_trainer_config(MixMode mode);

}  // namespace domainkit
