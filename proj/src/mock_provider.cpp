#include "reasonsum/mock_provider.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "reasonsum/payloads.hpp"
#include "reasonsum/textproc.hpp"

namespace reasonsum::provider {

namespace {

std::optional<TransportFailure::Kind> parse_failure(const std::string& s) {
  using K = TransportFailure::Kind;
  if (s == "transient") return K::transient;
  if (s == "rate_limited") return K::rate_limited;
  if (s == "auth") return K::auth;
  if (s == "fatal") return K::fatal;
  if (s == "malformed") return K::malformed;
  throw Error(ErrorCode::config_error, "unknown mock error kind '" + s + "'");
}

FinishReason parse_finish(const std::string& s) {
  if (s == "stop") return FinishReason::stop;
  if (s == "length") return FinishReason::length;
  if (s == "other") return FinishReason::other;
  throw Error(ErrorCode::config_error, "unknown finish_reason '" + s + "'");
}

MockReply parse_reply(const json& j, const std::string& where) {
  MockReply reply;
  if (j.is_string()) {
    reply.text = j.get<std::string>();
    return reply;
  }
  if (!j.is_object()) {
    throw Error(ErrorCode::config_error, where + ": a mock reply must be a string or an object");
  }
  try {
    if (j.contains("text")) {
      // Non-string bodies are serialized, so scripts can inline JSON payloads.
      reply.text = j["text"].is_string() ? j["text"].get<std::string>() : j["text"].dump();
    }
    if (j.contains("error")) reply.failure = parse_failure(j["error"].get<std::string>());
    reply.prompt_tokens = j.value("prompt_tokens", std::int64_t{0});
    reply.completion_tokens = j.value("completion_tokens", std::int64_t{0});
    reply.reasoning_tokens = j.value("reasoning_tokens", std::int64_t{0});
    if (j.contains("finish_reason")) reply.finish_reason = parse_finish(j["finish_reason"].get<std::string>());
  } catch (const json::exception& e) {
    throw Error(ErrorCode::config_error, where + ": " + e.what());
  }
  return reply;
}

std::int64_t word_count(std::string_view s) {
  std::int64_t n = 0;
  bool in_word = false;
  for (char c : s) {
    const bool space = c == ' ' || c == '\n' || c == '\t' || c == '\r';
    if (!space && !in_word) ++n;
    in_word = !space;
  }
  return n;
}

}  // namespace

MockScript MockScript::from_json(const json& j) {
  if (!j.is_object()) throw Error(ErrorCode::config_error, "mock script must be a JSON object");
  MockScript script;
  if (auto it = j.find("fallback"); it != j.end()) {
    const auto name = it->get<std::string>();
    if (name == "none") {
      script.fallback = Fallback::none;
    } else if (name == "simulate") {
      script.fallback = Fallback::simulate;
    } else if (name == "echo") {
      script.fallback = Fallback::echo;
    } else {
      throw Error(ErrorCode::config_error, "unknown mock fallback '" + name + "'");
    }
  }
  if (auto it = j.find("stages"); it != j.end()) {
    if (!it->is_object()) throw Error(ErrorCode::config_error, "mock 'stages' must be an object");
    for (auto stage = it->begin(); stage != it->end(); ++stage) {
      const auto where = "stages." + stage.key();
      if (stage.value().is_array()) {
        auto& seq = script.sequences[stage.key()];
        for (std::size_t i = 0; i < stage.value().size(); ++i) {
          seq.push_back(parse_reply(stage.value()[i], where + "[" + std::to_string(i) + "]"));
        }
      } else {
        script.constants[stage.key()] = parse_reply(stage.value(), where);
      }
    }
  }
  if (auto it = j.find("fingerprints"); it != j.end()) {
    if (!it->is_object()) throw Error(ErrorCode::config_error, "mock 'fingerprints' must be an object");
    for (auto fp = it->begin(); fp != it->end(); ++fp) {
      script.fingerprints[fp.key()] = parse_reply(fp.value(), "fingerprints." + fp.key());
    }
  }
  return script;
}

MockScript MockScript::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::io_error, "cannot open mock script " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  const auto j = json::parse(buffer.str(), nullptr, false);
  if (j.is_discarded()) throw Error(ErrorCode::config_error, "mock script " + path.string() + " is not valid JSON");
  return from_json(j);
}

MockScript MockScript::constant(std::map<std::string, std::string> replies) {
  MockScript script;
  for (auto& [stage, text] : replies) script.constants[stage].text = std::move(text);
  return script;
}

MockTransport::MockTransport(MockScript script) : script_(std::move(script)) {}

ChatResponse MockTransport::send(const ChatRequest& request) {
  std::optional<MockReply> reply;
  {
    std::lock_guard lock(mutex_);
    recorded_.push_back(request);
    if (!script_.fingerprints.empty()) {
      if (auto it = script_.fingerprints.find(request.fingerprint()); it != script_.fingerprints.end()) {
        reply = it->second;
      }
    }
    if (!reply) {
      if (auto it = script_.sequences.find(request.stage); it != script_.sequences.end()) {
        auto& cursor = cursors_[request.stage];
        if (cursor < it->second.size()) reply = it->second[cursor++];
      }
    }
    if (!reply) {
      if (auto it = script_.constants.find(request.stage); it != script_.constants.end()) {
        reply = it->second;
      }
    }
  }

  if (!reply) {
    switch (script_.fallback) {
      case MockScript::Fallback::none:
        throw Error(ErrorCode::unscripted_request,
                    "mock has no reply for stage '" + request.stage + "'");
      case MockScript::Fallback::echo:
        reply = MockReply{};
        reply->text = "echo " + request.fingerprint();
        break;
      case MockScript::Fallback::simulate:
        reply = MockReply{};
        reply->text = simulate_response(request);
        break;
    }
  }

  if (reply->failure) {
    throw TransportFailure(*reply->failure, "scripted failure for stage '" + request.stage + "'");
  }
  ChatResponse response;
  response.text = reply->text;
  response.finish_reason = reply->finish_reason;
  response.prompt_tokens = reply->prompt_tokens;
  response.completion_tokens = reply->completion_tokens;
  response.reasoning_tokens = reply->reasoning_tokens;
  if (script_.fallback == MockScript::Fallback::simulate && response.prompt_tokens == 0 &&
      response.completion_tokens == 0) {
    for (const auto& m : request.messages) response.prompt_tokens += word_count(m.text);
    response.completion_tokens = word_count(response.text);
  }
  return response;
}

std::vector<ChatRequest> MockTransport::requests() const {
  std::lock_guard lock(mutex_);
  return recorded_;
}

std::size_t MockTransport::request_count() const {
  std::lock_guard lock(mutex_);
  return recorded_.size();
}

std::vector<std::string> MockTransport::stage_sequence() const {
  std::lock_guard lock(mutex_);
  std::vector<std::string> out;
  out.reserve(recorded_.size());
  for (const auto& r : recorded_) out.push_back(r.stage);
  return out;
}

// ---------------------------------------------------------------------------
// Simulator

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

// Text between the last `open` marker and the first of `terminators` after
// it (or the end of the prompt).
std::string section(std::string_view prompt, std::string_view open,
                    std::initializer_list<std::string_view> terminators) {
  const auto start = prompt.rfind(open);
  if (start == std::string_view::npos) return {};
  auto body = prompt.substr(start + open.size());
  auto end = body.size();
  for (auto t : terminators) end = std::min(end, body.find(t));
  return std::string(trim(body.substr(0, end)));
}

std::string target_document(std::string_view prompt) {
  if (prompt.rfind("DOCUMENT: ") != std::string_view::npos) {
    return section(prompt, "DOCUMENT: ",
                   {"\nPLAN: ", "\nCURRENT_SUMMARY: ", "\nQUESTIONS: ", "\nSUMMARY: ",
                    "\nCANDIDATE_", "\n\nSUMMARY:"});
  }
  auto doc = section(prompt, "[Begin Document]\n", {"\n[End Document]"});
  if (doc.rfind("SOURCE (truncated if long):\n", 0) == 0) {
    doc = doc.substr(std::string_view("SOURCE (truncated if long):\n").size());
  }
  return doc;
}

json parse_or_null(const std::string& s) { return json::parse(s, nullptr, false); }

std::string lead(const std::vector<std::string>& sentences, std::size_t n) {
  std::vector<std::string> head(sentences.begin(),
                                sentences.begin() + static_cast<std::ptrdiff_t>(std::min(n, sentences.size())));
  return text::join(head);
}

std::string dump(const json& j) { return j.dump(-1, ' ', false, json::error_handler_t::replace); }

std::string simulate_summary(const std::string& document) {
  const auto sentences = text::split_sentences(document);
  if (sentences.empty()) return "No content.";
  return lead(sentences, 2);
}

std::string simulate_extract(const std::vector<std::string>& sentences) {
  const int n = static_cast<int>(sentences.size());
  const int k = payloads::e2a_expected_budget(n);
  json selected = json::array();
  for (int i = 0; i < k; ++i) {
    const int index = i * n / k;
    selected.push_back({{"index", index}, {"text", sentences[static_cast<std::size_t>(index)]}});
  }
  return dump({{"stats", {{"total_sentences", n}, {"selected_budget", k}}}, {"selected", selected}});
}

std::string simulate_questions(const std::vector<std::string>& sentences) {
  const int h = std::clamp(4 + static_cast<int>(sentences.size()) / 10, 4, 8);
  json questions = json::array();
  for (int i = 0; i < h; ++i) {
    const auto facet = payloads::kFacets[static_cast<std::size_t>(i) % payloads::kFacets.size()];
    questions.push_back({{"id", "q" + std::to_string(i + 1)},
                         {"facet", std::string(facet)},
                         {"question", "What does the text say about its " + std::string(facet) + "?"}});
  }
  return dump({{"questions", questions}});
}

std::string simulate_answers(std::string_view prompt, const std::vector<std::string>& sentences) {
  const auto asked = parse_or_null(section(prompt, "QUESTIONS: ", {}));
  json answers = json::array();
  if (asked.is_array()) {
    for (const auto& q : asked) {
      if (!q.is_object()) continue;
      const json id = q.contains("id") ? q["id"] : json("");
      const auto answer = sentences.empty()
                              ? std::string("Not stated.")
                              : sentences[fnv1a64(dump(id)) % sentences.size()];
      answers.push_back({{"id", id},
                         {"question", q.value("question", std::string())},
                         {"answer", answer},
                         {"confidence", 4}});
    }
  }
  return dump({{"answers", answers}});
}

std::string simulate_cite(const std::vector<std::string>& sentences) {
  const auto summary_sentences = std::min<std::size_t>(2, sentences.size());
  json alignments = json::array();
  for (std::size_t i = 0; i < summary_sentences; ++i) {
    alignments.push_back({{"summary_id", i},
                          {"support", json::array({i})},
                          {"importance_reason", "States a central fact."},
                          {"support_strength", 4}});
  }
  return dump({{"summary_text", lead(sentences, 2)}, {"alignments", alignments}});
}

std::string simulate_chunks(const std::vector<std::string>& sentences) {
  constexpr std::size_t kChunk = 10;
  const auto n = sentences.size();
  json chunks = json::array();
  for (std::size_t start = 0, id = 1; start < n; start += kChunk, ++id) {
    const auto end = std::min(n, start + kChunk) - 1;
    json contexts = json::array();
    for (std::size_t k = 0; k < 3; ++k) contexts.push_back(sentences[start + k % (end - start + 1)]);
    chunks.push_back({{"id", "c" + std::to_string(id)},
                      {"span", {start, end}},
                      {"summary", sentences[start]},
                      {"contexts", contexts}});
  }
  return dump({{"doc_stats", {{"total_sentences", n}, {"chunk_count", chunks.size()}}},
               {"chunks", chunks}});
}

std::string simulate_merge(std::string_view prompt) {
  const auto summaries =
      parse_or_null(section(prompt, "Below are summaries of different parts:\n", {"\n\nBelow are"}));
  std::vector<std::string> parts;
  if (summaries.is_array()) {
    for (const auto& s : summaries) {
      if (s.is_object() && s.contains("summary") && s["summary"].is_string()) {
        parts.push_back(s["summary"].get<std::string>());
      }
    }
  }
  if (parts.empty()) return "No content.";
  if (parts.size() > 2) parts.resize(2);
  return text::join(parts);
}

std::string simulate_plan(const std::vector<std::string>& sentences) {
  const auto length = sentences.size() <= 10 ? "1-2 sentences" : "2-4 sentences";
  return dump({{"domain", "general"},
               {"goal", "inform readers of the main points"},
               {"audience", "general readers"},
               {"style", "concise, neutral"},
               {"salient_info", {"main event", "key entities", "outcome"}},
               {"length_guidance", length}});
}

std::string simulate_evaluate(std::string_view prompt) {
  const auto current = section(prompt, "CURRENT_SUMMARY: ", {"\nEVALUATION (JSON): "});
  if (text::split_sentences(current).size() <= 1) {
    return dump({{"score", 5}, {"suggestions", json::array()}, {"stop", true}});
  }
  return dump({{"score", 3},
               {"suggestions", {{{"type", "shorten"},
                                 {"content", "Keep only the most central sentence."},
                                 {"evidence", ""}}}},
               {"stop", false}});
}

std::string simulate_revise(std::string_view prompt) {
  const auto current = section(prompt, "CURRENT_SUMMARY: ", {"\nEVALUATION (JSON): "});
  const auto sentences = text::split_sentences(current);
  return sentences.empty() ? std::string("No content.") : sentences.front();
}

std::string simulate_judge(std::string_view prompt) {
  // CANDIDATE_<label>: text, one per line, in label order.
  std::vector<std::pair<std::string, std::string>> candidates;
  std::size_t pos = 0;
  for (;;) {
    pos = prompt.find("\nCANDIDATE_", pos);
    if (pos == std::string_view::npos) break;
    const auto label_start = pos + std::string_view("\nCANDIDATE_").size();
    const auto colon = prompt.find(": ", label_start);
    if (colon == std::string_view::npos) break;
    auto next = prompt.find("\nCANDIDATE_", colon);
    const auto body_end = next == std::string_view::npos ? prompt.size() : next;
    candidates.emplace_back(std::string(prompt.substr(label_start, colon - label_start)),
                            std::string(prompt.substr(colon + 2, body_end - colon - 2)));
    pos = body_end;
  }
  if (candidates.empty()) return dump({{"scores", json::object()}, {"winner", ""}});
  std::size_t best = 0;
  json scores = json::object();
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    if (candidates[i].second.size() < candidates[best].second.size()) best = i;
  }
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    const int concision = i == best ? 5 : 4;
    scores[candidates[i].first] = {
        {"faithfulness", 5}, {"coverage", 4}, {"coherence", 5}, {"concision", concision}};
  }
  return dump({{"scores", scores},
               {"winner", candidates[best].first},
               {"reason", "Equally faithful; the shortest candidate is the most concise."},
               {"final_summary", candidates[best].second}});
}

std::string simulate_geval(std::string_view prompt) {
  const auto summary = section(prompt, "SUMMARY: ", {});
  const auto words = text::tokenize(summary).size();
  const double conciseness = words <= 60 ? 5.0 : words <= 120 ? 4.0 : 3.0;
  return dump({{"completeness", 4.0}, {"conciseness", conciseness}, {"faithfulness", 5.0}});
}

}  // namespace

std::string simulate_response(const ChatRequest& request) {
  if (request.messages.empty()) throw Error(ErrorCode::unscripted_request, "empty request");
  // A re-ask repeats the original prompt in the first message.
  const std::string_view original = request.messages.front().text;
  const auto& stage = request.stage;

  if (stage == "vanilla_summarize" || stage == "cot_summarize" || stage == "sc_candidate" ||
      stage == "ir_draft" || stage == "e2a_abstract" || stage == "qag_summarize" ||
      stage == "plan_write") {
    return simulate_summary(target_document(original));
  }
  if (stage == "deco_merge") return simulate_merge(original);
  if (stage == "ir_evaluate") return simulate_evaluate(original);
  if (stage == "ir_revise") return simulate_revise(original);
  if (stage == "sc_judge") return simulate_judge(original);
  if (stage == "geval_score") return simulate_geval(original);

  const auto sentences = text::split_sentences(target_document(original));
  if (stage == "e2a_extract") return simulate_extract(sentences);
  if (stage == "qag_questions") return simulate_questions(sentences);
  if (stage == "qag_answer") return simulate_answers(original, sentences);
  if (stage == "cite_summarize") return simulate_cite(sentences);
  if (stage == "deco_chunk") return simulate_chunks(sentences);
  if (stage == "plan_plan") return simulate_plan(sentences);
  throw Error(ErrorCode::unscripted_request, "simulator has no behavior for stage '" + stage + "'");
}

}  // namespace reasonsum::provider
