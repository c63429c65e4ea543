#include "domainkit/sftgen/instruction.hpp"

#include "domainkit/common/error.hpp"

namespace domainkit {

std::string_view to_string(SampleKind kind) {
  return kind == SampleKind::one_turn ? "one_turn" : "multi_turn";
}

std::string_view to_string(Role role) { return role == Role::user ? "user" : "assistant"; }

std::optional<Role> parse_role(std::string_view name) {
  if (name == "user") return Role::user;
  if (name == "assistant") return Role::assistant;
  return std::nullopt;
}

void validate_role_order(const std::vector<Turn>& turns) {
  if (turns.empty()) throw Error(ErrorCode::MalformedResponse, "dialogue has no turns");
  if (turns.front().role != Role::user) {
    throw Error(ErrorCode::RoleOrderViolation, "dialogue must start with a user turn");
  }
  for (std::size_t i = 1; i < turns.size(); ++i) {
    if (turns[i].role == turns[i - 1].role) {
      throw Error(ErrorCode::RoleOrderViolation,
                  "consecutive " + std::string(to_string(turns[i].role)) + " turns at " +
                      std::to_string(i));
    }
  }
}

void validate(const InstructionSample& sample) {
  validate_role_order(sample.turns);
  for (const auto& t : sample.turns) {
    if (t.content.empty()) throw Error(ErrorCode::MalformedResponse, "empty turn content");
  }
  if (sample.kind == SampleKind::one_turn) {
    if (sample.turns.size() != 2) {
      throw Error(ErrorCode::MalformedResponse, "one-turn sample needs exactly 2 turns, got " +
                                                    std::to_string(sample.turns.size()));
    }
  } else if (sample.turns.size() < 4) {
    throw Error(ErrorCode::MalformedResponse, "multi-turn sample needs at least 4 turns, got " +
                                                  std::to_string(sample.turns.size()));
  }
}

json to_json(const InstructionSample& s) {
  json turns = json::array();
  for (const auto& t : s.turns) turns.push_back({{"role", to_string(t.role)}, {"content", t.content}});
  return json{{"id", s.id},
              {"kind", to_string(s.kind)},
              {"turns", turns},
              {"category", s.category ? json(*s.category) : json(nullptr)},
              {"knowledge_id", s.knowledge_id},
              {"gen_meta",
               {{"model_name", s.gen_meta.model_name},
                {"timestamp", s.gen_meta.timestamp},
                {"raw_response_hash", s.gen_meta.raw_response_hash}}}};
}

InstructionSample instruction_from_json(const json& j) {
  InstructionSample s;
  try {
    if (!j.is_object()) throw Error(ErrorCode::SchemaError, "instruction sample must be an object");
    s.id = j.at("id").get<std::string>();
    const auto kind = j.at("kind").get<std::string>();
    if (kind == "one_turn") s.kind = SampleKind::one_turn;
    else if (kind == "multi_turn") s.kind = SampleKind::multi_turn;
    else throw Error(ErrorCode::SchemaError, "unknown sample kind '" + kind + "'");
    for (const auto& t : j.at("turns")) {
      const auto role = parse_role(t.at("role").get<std::string>());
      if (!role) throw Error(ErrorCode::SchemaError, "unknown role " + t.at("role").dump());
      s.turns.push_back({*role, t.at("content").get<std::string>()});
    }
    if (j.contains("category") && !j["category"].is_null()) s.category = j["category"].get<std::string>();
    s.knowledge_id = j.value("knowledge_id", "");
    if (j.contains("gen_meta") && j["gen_meta"].is_object()) {
      const auto& m = j["gen_meta"];
      s.gen_meta = {m.value("model_name", ""), m.value("timestamp", ""), m.value("raw_response_hash", "")};
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::SchemaError, std::string("instruction sample: ") + e.what());
  }
  validate(s);
  return s;
}

std::vector<InstructionSample> read_instructions(const std::filesystem::path& path) {
  std::vector<InstructionSample> out;
  for_each_jsonl(path, [&](const json& j, std::size_t line) {
    try {
      out.push_back(instruction_from_json(j));
    } catch (const Error& e) {
      throw Error(e.code(), path.string() + ":" + std::to_string(line) + ": " + e.detail());
    }
  });
  return out;
}

void write_instructions(const std::filesystem::path& path, const std::vector<InstructionSample>& samples) {
  std::vector<json> rows;
  rows.reserve(samples.size());
  for (const auto& s : samples) rows.push_back(to_json(s));
  write_jsonl(path, rows);
}

}  // namespace domainkit
