#include "reasonsum/prompts.hpp"

#include <algorithm>

#include "reasonsum/resources.hpp"

namespace reasonsum::prompts {

namespace {

constexpr std::string_view kOpen = "{{";
constexpr std::string_view kClose = "}}";

std::string rtrim(std::string s) {
  while (!s.empty() && (s.back() == '\n' || s.back() == ' ' || s.back() == '\r' || s.back() == '\t')) {
    s.pop_back();
  }
  return s;
}

std::string resource_text(const std::string& path) {
  const auto raw = resources::get(path);
  std::string out;
  out.reserve(raw.size());
  std::size_t pos = 0;
  while (pos < raw.size()) {
    auto eol = raw.find('\n', pos);
    const auto line = raw.substr(pos, eol == std::string_view::npos ? std::string_view::npos : eol - pos);
    if (line.substr(0, 2) != "%%") {
      out.append(line);
      if (eol != std::string_view::npos) out.push_back('\n');
    }
    if (eol == std::string_view::npos) break;
    pos = eol + 1;
  }
  return rtrim(std::move(out));
}

}  // namespace

std::string load_template(std::string_view name) {
  return resource_text("prompts/" + std::string(name) + ".txt");
}

std::vector<std::string> slot_names(std::string_view tmpl) {
  std::vector<std::string> names;
  for (auto open = tmpl.find(kOpen); open != std::string_view::npos; open = tmpl.find(kOpen, open)) {
    const auto close = tmpl.find(kClose, open + kOpen.size());
    if (close == std::string_view::npos) break;
    std::string name(tmpl.substr(open + kOpen.size(), close - open - kOpen.size()));
    if (std::find(names.begin(), names.end(), name) == names.end()) names.push_back(name);
    open = close + kClose.size();
  }
  return names;
}

std::string render(std::string_view tmpl, const Slots& slots) {
  std::string out;
  out.reserve(tmpl.size());
  std::size_t pos = 0;
  while (pos < tmpl.size()) {
    const auto open = tmpl.find(kOpen, pos);
    if (open == std::string_view::npos) break;
    const auto close = tmpl.find(kClose, open + kOpen.size());
    if (close == std::string_view::npos) break;
    const auto name = tmpl.substr(open + kOpen.size(), close - open - kOpen.size());
    auto it = slots.find(name);
    if (it == slots.end()) {
      throw Error(ErrorCode::missing_slot, "template slot '" + std::string(name) + "' was not filled");
    }
    out.append(tmpl.substr(pos, open - pos));
    out.append(it->second);
    pos = close + kClose.size();
  }
  out.append(tmpl.substr(pos));
  return out;
}

std::string template_name(StrategyId strategy, std::string_view stage) {
  return std::string(to_string(strategy)) + "_" + std::string(stage);
}

std::string exemplar_block(std::span<const Exemplar> exemplars) {
  if (exemplars.empty()) return {};
  std::string out = "Here are " + std::to_string(exemplars.size()) +
                    " example documents with their reference summaries:\n\n";
  for (std::size_t i = 0; i < exemplars.size(); ++i) {
    out += "[Example " + std::to_string(i + 1) + "]\n";
    out += "[Begin Document]\n" + exemplars[i].document + "\n[End Document]\n";
    out += "SUMMARY: " + exemplars[i].summary + "\n\n";
  }
  out += "Now summarize the following document.\n\n";
  return out;
}

std::string reasoning_guidance(std::string_view domain) {
  const std::string path = "cot/" + std::string(domain) + ".txt";
  return resource_text(resources::contains(path) ? path : "cot/generic.txt");
}

std::vector<ChatMessage> assemble_prompt(StrategyId strategy, std::string_view stage,
                                         std::string_view document,
                                         std::span<const Exemplar> exemplars, Slots payloads) {
  const auto tmpl = load_template(template_name(strategy, stage));
  payloads.insert_or_assign("document", std::string(document));
  payloads.insert_or_assign("exemplars", exemplar_block(exemplars));
  return {ChatMessage{Role::user, render(tmpl, payloads)}};
}

std::map<std::string, std::string> template_checksums() {
  std::map<std::string, std::string> sums;
  for (const auto& prefix : {"prompts/", "cot/"}) {
    for (const auto& name : resources::list(prefix)) sums[name] = hex64(fnv1a64(resources::get(name)));
  }
  return sums;
}

std::string dump(const json& value) {
  return value.dump(-1, ' ', false, json::error_handler_t::replace);
}

}  // namespace reasonsum::prompts
