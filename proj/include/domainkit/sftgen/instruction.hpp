#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "domainkit/common/jsonl.hpp"

namespace domainkit {

enum class SampleKind { one_turn, multi_turn };
enum class Role { user, assistant };

std::string_view to_string(SampleKind kind);
std::string_view to_string(Role role);
std::optional<Role> parse_role(std::string_view name);

struct Turn {
  Role role = Role::user;
  std::string content;

  friend bool operator==(const Turn&, const Turn&) = default;
};

struct GenMeta {
  std::string model_name;
  std::string timestamp;  // ISO-8601 UTC, taken from the endpoint response
  std::string raw_response_hash;

  friend bool operator==(const GenMeta&, const GenMeta&) = default;
};

struct InstructionSample {
  std::string id;
  SampleKind kind = SampleKind::one_turn;
  std::vector<Turn> turns;
  std::optional<std::string> category;
  std::string knowledge_id;
  GenMeta gen_meta;

  friend bool operator==(const InstructionSample&, const InstructionSample&) = default;
};

// one_turn: exactly user, assistant. multi_turn: >= 4 turns alternating from
// user. Throws RoleOrderViolation or MalformedResponse (empty content, too few
// turns).
void validate(const InstructionSample& sample);
// Role alternation rules alone (start with user, no two equal roles in a row).
void validate_role_order(const std::vector<Turn>& turns);

json to_json(const InstructionSample& sample);
// Parses and validates; throws SchemaError / RoleOrderViolation.
InstructionSample instruction_from_json(const json& j);

std::vector<InstructionSample> read_instructions(const std::filesystem::path& path);
void write_instructions(const std::filesystem::path& path, const std::vector<InstructionSample>& samples);

}  // namespace domainkit
