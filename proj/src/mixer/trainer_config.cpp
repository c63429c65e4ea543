#include "domainkit/common/error.hpp"
#include "domainkit/mixer/mixer.hpp"

namespace domainkit {

json TrainerConfig::to_json() const {
  return json{{"precision", precision},         {"epochs", epochs},
              {"batch_size", batch_size},       {"learning_rate", learning_rate},
              {"warmup_ratio", warmup_ratio},   {"lr_scheduler", lr_scheduler},
              {"max_length", max_length}};
}

TrainerConfig TrainerConfig::from_json(const json& j) {
  try {
    TrainerConfig c;
    c.precision = j.at("precision").get<std::string>();
    c.epochs = j.at("epochs").get<int>();
    c.batch_size = j.at("batch_size").get<int>();
    c.learning_rate = j.at("learning_rate").get<double>();
    c.warmup_ratio = j.at("warmup_ratio").get<double>();
    c.lr_scheduler = j.at("lr_scheduler").get<std::string>();
    c.max_length = j.at("max_length").get<int>();
    return c;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::SchemaError, std::string("trainer config: ") + e.what());
  }
}

TrainerConfig emit_trainer_config(MixMode mode) {
  TrainerConfig c;
  c.max_length = mode == MixMode::SFT ? 1536 : 1024;
  return c;
}

TrainerConfig emit_trainer_config(const MixPlan& plan) { return emit_trainer_config(plan.mode); }

}  // namespace domainkit
