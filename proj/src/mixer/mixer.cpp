#include "domainkit/mixer/mixer.hpp"

#include <cmath>

#include "domainkit/common/error.hpp"
#include "domainkit/common/text.hpp"

namespace domainkit {

std::string_view to_string(MixMode mode) {
  switch (mode) {
    case MixMode::DAPT: return "dapt";
    case MixMode::SFT: return "sft";
    case MixMode::MIP: return "mip";
  }
  return "dapt";
}

std::string_view to_string(MixUnit unit) { return unit == MixUnit::tokens ? "tokens" : "examples"; }

MixMode parse_mix_mode(std::string_view s) {
  const auto lower = text::to_lower_ascii(s);
  if (lower == "dapt") return MixMode::DAPT;
  if (lower == "sft") return MixMode::SFT;
  if (lower == "mip") return MixMode::MIP;
  throw Error(ErrorCode::ConfigError, "unknown mix mode '" + std::string(s) + "'");
}

MixUnit parse_mix_unit(std::string_view s) {
  if (s == "tokens") return MixUnit::tokens;
  if (s == "examples") return MixUnit::examples;
  throw Error(ErrorCode::ConfigError, "unknown mix unit '" + std::string(s) + "'");
}

std::size_t MixPlan::parse_ratio(std::string_view ratio) {
  const auto colon = ratio.find(':');
  auto parse_uint = [&](std::string_view part) -> std::size_t {
    if (part.empty()) throw Error(ErrorCode::ConfigError, "bad ratio '" + std::string(ratio) + "'");
    std::size_t v = 0;
    for (char c : part) {
      if (c < '0' || c > '9') throw Error(ErrorCode::ConfigError, "bad ratio '" + std::string(ratio) + "'");
      v = v * 10 + static_cast<std::size_t>(c - '0');
    }
    return v;
  };
  if (colon == std::string_view::npos) throw Error(ErrorCode::ConfigError, "ratio must look like 1:k");
  if (parse_uint(ratio.substr(0, colon)) != 1) {
    throw Error(ErrorCode::ConfigError, "the domain side of a ratio must be 1");
  }
  return parse_uint(ratio.substr(colon + 1));
}

std::string MixPlan::ratio_label() const {
  return std::to_string(ratio_domain) + ":" + std::to_string(ratio_general);
}

json MixReport::to_json() const {
  return json{{"mode", domainkit::to_string(mode)},
              {"ratio", ratio},
              {"unit", domainkit::to_string(unit)},
              {"seed", seed},
              {"tokenizer", tokenizer},
              {"domain_items", domain_items},
              {"general_items", general_items},
              {"instruction_items", instruction_items},
              {"domain_tokens", domain_tokens},
              {"general_tokens", general_tokens},
              {"target", target},
              {"achieved_ratio", achieved_ratio},
              {"shortfall", shortfall}};
}

MixResult mix(std::span<const TrainingItem> domain, std::span<const TrainingItem> general,
              const MixPlan& plan) {
  if (plan.ratio_domain != 1) throw Error(ErrorCode::ConfigError, "ratio_domain must be 1");
  if (plan.mode == MixMode::MIP) {
    throw Error(ErrorCode::ConfigError, "MIP sets are built with build_mip, not mixed with general data");
  }
  if (domain.empty()) throw Error(ErrorCode::EmptyDomain, "domain dataset is empty");
  const std::size_t k = plan.ratio_general;
  if (k > 0 && general.empty()) {
    throw Error(ErrorCode::InsufficientGeneralData, "general pool is empty but ratio is " + plan.ratio_label());
  }

  MixResult result;
  auto& rep = result.report;
  rep.mode = plan.mode;
  rep.ratio = plan.ratio_label();
  rep.unit = plan.unit;
  rep.seed = plan.seed;
  rep.domain_items = domain.size();
  for (const auto& d : domain) rep.domain_tokens += d.tokens;

  const double domain_total =
      plan.unit == MixUnit::tokens ? static_cast<double>(rep.domain_tokens) : static_cast<double>(domain.size());
  const std::size_t target = k * (plan.unit == MixUnit::tokens ? rep.domain_tokens : domain.size());
  rep.target = static_cast<double>(target);

  std::mt19937_64 rng(plan.seed);
  std::vector<std::size_t> order(general.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  seeded_shuffle(order, rng);

  std::vector<TrainingItem> out(domain.begin(), domain.end());
  std::size_t achieved = 0;
  for (std::size_t i = 0; i < order.size() && achieved < target; ++i) {
    const auto& g = general[order[i]];
    out.push_back(g);
    ++rep.general_items;
    rep.general_tokens += g.tokens;
    achieved += plan.unit == MixUnit::tokens ? g.tokens : 1;
  }
  if (achieved < target) {
    rep.shortfall = target - achieved;
    if (!plan.allow_short) {
      throw Error(ErrorCode::InsufficientGeneralData,
                  "general pool short by " + std::to_string(rep.shortfall) + " " +
                      std::string(domainkit::to_string(plan.unit)) + " for ratio " + plan.ratio_label());
    }
  }
  rep.achieved_ratio = domain_total > 0 ? static_cast<double>(achieved) / domain_total : 0.0;

  seeded_shuffle(out, rng);
  result.items = std::move(out);
  return result;
}

MixResult build_mip(std::span<const TrainingItem> domain_pretrain,
                    std::span<const TrainingItem> domain_instructions, std::uint64_t seed) {
  if (domain_pretrain.empty()) throw Error(ErrorCode::EmptyInput, "MIP needs domain pre-training data");
  if (domain_instructions.empty()) throw Error(ErrorCode::EmptyInput, "MIP needs domain instruction data");

  MixResult result;
  auto& rep = result.report;
  rep.mode = MixMode::MIP;
  rep.ratio = "1:0";
  rep.unit = MixUnit::tokens;
  rep.seed = seed;
  rep.domain_items = domain_pretrain.size();
  rep.instruction_items = domain_instructions.size();

  std::vector<TrainingItem> out;
  out.reserve(domain_pretrain.size() + domain_instructions.size());
  for (const auto& d : domain_pretrain) {
    out.push_back(d);
    rep.domain_tokens += d.tokens;
  }
  for (const auto& s : domain_instructions) {
    TrainingItem item = s;
    // Pre-training consumes plain text only.
    item.turns.clear();
    out.push_back(std::move(item));
    rep.domain_tokens += s.tokens;
  }
  std::mt19937_64 rng(seed);
  seeded_shuffle(out, rng);
  result.items = std::move(out);
  return result;
}

}  // namespace domainkit
