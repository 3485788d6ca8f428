#include "reasonsum/config.hpp"

#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

namespace reasonsum::config {

std::optional<std::string> process_env(const std::string& name) {
  if (const char* v = std::getenv(name.c_str())) return std::string(v);
  return std::nullopt;
}

json interpolate_env(const json& j, const EnvLookup& env) {
  if (j.is_string()) {
    const auto& s = j.get_ref<const std::string&>();
    std::string out;
    std::size_t pos = 0;
    while (pos < s.size()) {
      const auto open = s.find("${", pos);
      const auto close = open == std::string::npos ? std::string::npos : s.find('}', open + 2);
      if (close == std::string::npos) {
        out.append(s, pos, std::string::npos);
        break;
      }
      out.append(s, pos, open - pos);
      out += env(s.substr(open + 2, close - open - 2)).value_or("");
      pos = close + 1;
    }
    return out;
  }
  if (j.is_array()) {
    json out = json::array();
    for (const auto& v : j) out.push_back(interpolate_env(v, env));
    return out;
  }
  if (j.is_object()) {
    json out = json::object();
    for (auto it = j.begin(); it != j.end(); ++it) out[it.key()] = interpolate_env(it.value(), env);
    return out;
  }
  return j;
}

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& message) {
  throw Error(ErrorCode::config_error, path + ": " + message);
}

const json* find(const json& obj, const char* key) {
  auto it = obj.find(key);
  return it == obj.end() ? nullptr : &*it;
}

template <typename T>
void read(const json& obj, const char* key, const std::string& path, T& out) {
  const json* v = find(obj, key);
  if (v == nullptr || v->is_null()) return;
  const auto where = path.empty() ? std::string(key) : path + "." + key;
  if constexpr (std::is_same_v<T, bool>) {
    if (!v->is_boolean()) fail(where, "must be true or false");
  } else if constexpr (std::is_integral_v<T>) {
    if (!v->is_number_integer()) fail(where, "must be an integer");
    if constexpr (std::is_unsigned_v<T>) {
      if (v->get<long long>() < 0) fail(where, "must not be negative");
    }
  } else if constexpr (std::is_floating_point_v<T>) {
    if (!v->is_number()) fail(where, "must be a number");
  } else {
    if (!v->is_string()) fail(where, "must be a string");
  }
  out = v->get<T>();
}

fs::path resolve(const fs::path& base, const std::string& p) {
  fs::path path(p);
  return path.is_absolute() ? path : (base / path).lexically_normal();
}

StrategySpec parse_strategy_entry(const json& j, const std::string& path) {
  try {
    if (j.is_string()) return StrategySpec{.strategy = [&] {
      auto id = parse_strategy(j.get<std::string>());
      if (!id) fail(path, "unknown strategy '" + j.get<std::string>() + "'");
      return *id;
    }()};
    if (!j.is_object()) fail(path, "must be a strategy name or an object");
    if (const json* name = find(j, "strategy"); name != nullptr && name->is_string() &&
                                                 !parse_strategy(name->get<std::string>())) {
      fail(path + ".strategy", "unknown strategy '" + name->get<std::string>() + "'");
    }
    if (const json* effort = find(j, "reasoning_effort"); effort != nullptr && effort->is_string() &&
                                                           !parse_effort(effort->get<std::string>())) {
      fail(path + ".reasoning_effort", "unknown effort '" + effort->get<std::string>() + "'");
    }
    return j.get<StrategySpec>();
  } catch (const json::exception& e) {
    fail(path, e.what());
  } catch (const Error& e) {
    if (e.code() == ErrorCode::config_error) throw;
    fail(path, e.what());
  }
}

}  // namespace

std::string spec_key(const StrategySpec& spec) {
  return std::string(to_string(spec.strategy)) + "/" + std::to_string(spec.shots) + "/" +
         std::string(to_string(spec.reasoning_effort));
}

ExperimentConfig parse_config(const json& raw, const fs::path& base_dir, const EnvLookup& env) {
  if (!raw.is_object()) fail("config", "must be a JSON object");
  const json j = interpolate_env(raw, env);
  ExperimentConfig c;

  std::string run_dir;
  read(j, "run_dir", "", run_dir);
  if (!run_dir.empty()) c.run_dir = resolve(base_dir, run_dir);
  else c.run_dir = resolve(base_dir, c.run_dir.string());
  read(j, "sample_n", "", c.sample_n);
  read(j, "seed", "", c.seed);
  read(j, "concurrency", "", c.concurrency);
  read(j, "qag_min_confidence", "", c.qag_min_confidence);
  read(j, "exemplar_token_cap", "", c.exemplar_token_cap);

  if (const json* budget = find(j, "budget"); budget != nullptr) {
    if (!budget->is_object()) fail("budget", "must be an object");
    read(*budget, "max_calls", "budget", c.budget.max_calls);
    read(*budget, "max_total_tokens", "budget", c.budget.max_total_tokens);
  }

  if (const json* d = find(j, "decoding"); d != nullptr) {
    if (!d->is_object()) fail("decoding", "must be an object");
    read(*d, "temperature", "decoding", c.decoding.temperature);
    read(*d, "max_output_tokens", "decoding", c.decoding.max_output_tokens);
    read(*d, "reasoning_max_output_tokens", "decoding", c.decoding.reasoning_max_output_tokens);
    read(*d, "sc_temperature", "decoding", c.decoding.sc_temperature);
  }

  if (const json* judge = find(j, "judge"); judge != nullptr) {
    if (!judge->is_object()) fail("judge", "must be an object");
    read(*judge, "geval", "judge", c.geval);
    if (const json* w = find(*judge, "weights"); w != nullptr) {
      if (!w->is_object()) fail("judge.weights", "must be an object");
      read(*w, "faithfulness", "judge.weights", c.weights.faithfulness);
      read(*w, "coverage", "judge.weights", c.weights.coverage);
      read(*w, "coherence", "judge.weights", c.weights.coherence);
      read(*w, "concision", "judge.weights", c.weights.concision);
    }
  }

  if (const json* p = find(j, "provider"); p != nullptr) {
    if (!p->is_object()) fail("provider", "must be an object");
    auto& pc = c.provider;
    read(*p, "kind", "provider", pc.kind);
    read(*p, "base_url", "provider", pc.http.base_url);
    read(*p, "model", "provider", pc.http.model);
    read(*p, "api_key", "provider", pc.http.api_key);
    read(*p, "api_key_env", "provider", pc.api_key_env);
    read(*p, "json_response_format", "provider", pc.http.json_response_format);
    read(*p, "effort_field", "provider", pc.http.effort_field);
    std::int64_t timeout = pc.http.timeout.count();
    read(*p, "timeout_s", "provider", timeout);
    pc.http.timeout = std::chrono::seconds(timeout);
    std::string script;
    read(*p, "mock_script", "provider", script);
    if (!script.empty()) pc.mock_script = resolve(base_dir, script);
    if (const json* r = find(*p, "retry"); r != nullptr) {
      if (!r->is_object()) fail("provider.retry", "must be an object");
      read(*r, "max_attempts", "provider.retry", pc.retry.max_attempts);
      std::int64_t base = pc.retry.base_delay.count(), max = pc.retry.max_delay.count();
      read(*r, "base_delay_ms", "provider.retry", base);
      read(*r, "max_delay_ms", "provider.retry", max);
      read(*r, "multiplier", "provider.retry", pc.retry.multiplier);
      read(*r, "full_jitter", "provider.retry", pc.retry.full_jitter);
      pc.retry.base_delay = std::chrono::milliseconds(base);
      pc.retry.max_delay = std::chrono::milliseconds(max);
    }
    if (const json* m = find(*p, "stage_models"); m != nullptr) {
      if (!m->is_object()) fail("provider.stage_models", "must be an object");
      for (auto it = m->begin(); it != m->end(); ++it) {
        if (!it.value().is_string()) fail("provider.stage_models." + it.key(), "must be a string");
        pc.stage_models[it.key()] = it.value().get<std::string>();
      }
    }
  }

  if (const json* ds = find(j, "datasets"); ds != nullptr) {
    if (!ds->is_array()) fail("datasets", "must be an array");
    for (std::size_t i = 0; i < ds->size(); ++i) {
      const auto path = "datasets[" + std::to_string(i) + "]";
      const json& entry = (*ds)[i];
      if (!entry.is_object()) fail(path, "must be an object");
      DatasetEntry e;
      try {
        e.descriptor = entry.get<datasets::DatasetDescriptor>();
      } catch (const Error& err) {
        fail(path, err.what());
      }
      std::string file, train;
      read(entry, "path", path, file);
      if (file.empty()) fail(path + ".path", "is required");
      e.path = resolve(base_dir, file);
      read(entry, "train_path", path, train);
      if (!train.empty()) e.train_path = resolve(base_dir, train);
      c.datasets.push_back(std::move(e));
    }
  }

  if (const json* ss = find(j, "strategies"); ss != nullptr) {
    if (!ss->is_array()) fail("strategies", "must be an array");
    for (std::size_t i = 0; i < ss->size(); ++i) {
      c.strategies.push_back(parse_strategy_entry((*ss)[i], "strategies[" + std::to_string(i) + "]"));
    }
  }

  if (auto url = env("REASON_SUM_BASE_URL"); url && !url->empty()) c.provider.http.base_url = *url;
  if (auto model = env("REASON_SUM_MODEL"); model && !model->empty()) c.provider.http.model = *model;
  if (auto p = env("REASON_SUM_CONCURRENCY"); p && !p->empty()) {
    try {
      std::size_t used = 0;
      c.concurrency = std::stoi(*p, &used);
      if (used != p->size()) throw std::invalid_argument("trailing characters");
    } catch (const std::exception&) {
      fail("REASON_SUM_CONCURRENCY", "must be an integer");
    }
  }
  if (c.provider.http.api_key.empty() && !c.provider.api_key_env.empty()) {
    c.provider.http.api_key = env(c.provider.api_key_env).value_or("");
  }
  return c;
}

ExperimentConfig load_config(const fs::path& path, const EnvLookup& env) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::config_error, "cannot open config " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  const auto j = json::parse(buffer.str(), nullptr, false);
  if (j.is_discarded()) throw Error(ErrorCode::config_error, path.string() + " is not valid JSON");
  return parse_config(j, fs::absolute(path).parent_path(), env);
}

std::vector<std::string> validate_config(const ExperimentConfig& c) {
  std::vector<std::string> out;
  if (c.datasets.empty()) out.emplace_back("datasets: at least one dataset is required");
  if (c.strategies.empty()) out.emplace_back("strategies: at least one strategy is required");
  if (c.concurrency < 1) out.emplace_back("concurrency: must be ≥ 1");
  if (c.run_dir.empty()) out.emplace_back("run_dir: must not be empty");
  if (c.budget.max_calls < 0) out.emplace_back("budget.max_calls: must be ≥ 0");
  if (c.budget.max_total_tokens < 0) out.emplace_back("budget.max_total_tokens: must be ≥ 0");
  if (c.qag_min_confidence < 1 || c.qag_min_confidence > 5) {
    out.emplace_back("qag_min_confidence: must be in [1, 5]");
  }
  if (c.decoding.temperature < 0 || c.decoding.sc_temperature < 0) {
    out.emplace_back("decoding: temperatures must be ≥ 0");
  }
  if (c.decoding.max_output_tokens <= 0 || c.decoding.reasoning_max_output_tokens <= 0) {
    out.emplace_back("decoding: output token limits must be positive");
  }
  for (const auto& v : c.weights.validate()) out.push_back("judge.weights: " + v);
  if (c.provider.kind != "openai" && c.provider.kind != "mock") {
    out.push_back("provider.kind: must be \"openai\" or \"mock\", got \"" + c.provider.kind + "\"");
  }
  if (c.provider.kind == "mock" && !c.provider.mock_script) {
    out.emplace_back("provider.mock_script: required for the mock provider");
  }
  if (c.provider.kind == "openai" && c.provider.http.model.empty()) {
    out.emplace_back("provider.model: required for the openai provider");
  }
  if (c.provider.retry.max_attempts < 1) out.emplace_back("provider.retry.max_attempts: must be ≥ 1");

  std::set<std::string> ids;
  bool two_shot = false;
  std::set<std::string> keys;
  for (std::size_t i = 0; i < c.strategies.size(); ++i) {
    const auto path = "strategies[" + std::to_string(i) + "]";
    for (const auto& v : validate_spec(c.strategies[i])) out.push_back(path + ": " + v);
    if (!keys.insert(spec_key(c.strategies[i])).second) {
      out.push_back(path + ": duplicate strategy/shots/effort combination " + spec_key(c.strategies[i]));
    }
    two_shot = two_shot || c.strategies[i].shots == 2;
  }
  for (std::size_t i = 0; i < c.datasets.size(); ++i) {
    const auto path = "datasets[" + std::to_string(i) + "]";
    const auto& d = c.datasets[i];
    for (const auto& v : datasets::validate_descriptor(d.descriptor)) out.push_back(path + ": " + v);
    if (!ids.insert(d.descriptor.dataset_id).second) {
      out.push_back(path + ".dataset_id: duplicate dataset '" + d.descriptor.dataset_id + "'");
    }
    if (two_shot && !d.train_path) out.push_back(path + ".train_path: required for 2-shot strategies");
  }
  return out;
}

json snapshot(const ExperimentConfig& c) {
  json datasets = json::array();
  for (const auto& d : c.datasets) {
    json entry = d.descriptor;
    entry["path"] = d.path.string();
    entry["train_path"] = d.train_path ? json(d.train_path->string()) : json(nullptr);
    datasets.push_back(std::move(entry));
  }
  return json{
      {"datasets", datasets},
      {"strategies", c.strategies},
      {"provider",
       {{"kind", c.provider.kind},
        {"base_url", c.provider.kind == "mock" ? "" : c.provider.http.base_url},
        {"model", c.provider.http.model},
        {"stage_models", c.provider.stage_models}}},
      {"decoding",
       {{"temperature", c.decoding.temperature},
        {"max_output_tokens", c.decoding.max_output_tokens},
        {"reasoning_max_output_tokens", c.decoding.reasoning_max_output_tokens},
        {"sc_temperature", c.decoding.sc_temperature}}},
      {"judge",
       {{"geval", c.geval},
        {"weights",
         {{"faithfulness", c.weights.faithfulness},
          {"coverage", c.weights.coverage},
          {"coherence", c.weights.coherence},
          {"concision", c.weights.concision}}}}},
      {"qag_min_confidence", c.qag_min_confidence},
      {"exemplar_token_cap", c.exemplar_token_cap},
      {"sample_n", c.sample_n},
      {"seed", c.seed},
      {"concurrency", c.concurrency},
      {"budget", {{"max_calls", c.budget.max_calls}, {"max_total_tokens", c.budget.max_total_tokens}}},
  };
}

json identity(const json& snap) {
  json out = snap;
  out.erase("concurrency");
  out.erase("budget");
  return out;
}

}  // namespace reasonsum::config
