#include "domainkit/common/error.hpp"
#include "domainkit/mixer/mixer.hpp"
#include "domainkit/mixer/sft_template.hpp"

namespace domainkit {

json TrainingItem::to_json() const {
  json j{{"id", id}, {"origin", origin}, {"text", text}, {"token_count", tokens}};
  if (!turns.empty()) {
    json msgs = json::array();
    for (const auto& t : turns) msgs.push_back({{"role", domainkit::to_string(t.role)}, {"content", t.content}});
    j["messages"] = std::move(msgs);
  }
  return j;
}

TrainingItem item_from_document(const Document& doc, std::string origin) {
  return TrainingItem{doc.doc_id, std::move(origin), doc.text, doc.token_count, {}};
}

TrainingItem item_from_instruction(const InstructionSample& sample, std::string origin,
                                   const TokenizerSpec& tokenizer) {
  TrainingItem item;
  item.id = sample.id;
  item.origin = std::move(origin);
  item.text = render_sft(sample.turns);
  item.tokens = count_tokens(item.text, tokenizer);
  item.turns = sample.turns;
  return item;
}

std::vector<TrainingItem> load_training_items(const std::filesystem::path& path, std::string origin,
                                              const TokenizerSpec& tokenizer) {
  std::vector<TrainingItem> items;
  const std::string stem = path.stem().string();
  for_each_jsonl(path, [&](const json& j, std::size_t line) {
    const std::string where = path.string() + ":" + std::to_string(line);
    if (!j.is_object()) throw Error(ErrorCode::SchemaError, where + ": expected an object");
    try {
      if (j.contains("doc_id")) {
        items.push_back(item_from_document(document_from_json(j), origin));
      } else if (j.contains("turns")) {
        items.push_back(item_from_instruction(instruction_from_json(j), origin, tokenizer));
      } else if (j.contains("instruction") && j.contains("output")) {
        std::string prompt = j["instruction"].get<std::string>();
        const std::string input = j.value("input", "");
        if (!input.empty()) prompt += "\n" + input;
        InstructionSample s;
        s.id = j.contains("id") ? j["id"].get<std::string>() : stem + ":" + std::to_string(line);
        s.kind = SampleKind::one_turn;
        s.turns = {{Role::user, prompt}, {Role::assistant, j["output"].get<std::string>()}};
        items.push_back(item_from_instruction(s, origin, tokenizer));
      } else if (j.contains("text")) {
        TrainingItem item;
        item.id = j.contains("id") ? j["id"].get<std::string>() : stem + ":" + std::to_string(line);
        item.origin = origin;
        item.text = j["text"].get<std::string>();
        item.tokens = count_tokens(item.text, tokenizer);
        items.push_back(std::move(item));
      } else {
        throw Error(ErrorCode::SchemaError, "unrecognized training record");
      }
    } catch (const json::exception& e) {
      throw Error(ErrorCode::SchemaError, where + ": " + e.what());
    } catch (const Error& e) {
      throw Error(e.code(), where + ": " + e.detail());
    }
  });
  return items;
}

void write_training_items(const std::filesystem::path& path, std::span<const TrainingItem> items) {
  std::string out;
  for (const auto& item : items) {
    out += dump_line(item.to_json());
    out += '\n';
  }
  write_file(path, out);
}

}  // namespace domainkit
