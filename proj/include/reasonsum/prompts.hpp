#pragma once

#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "reasonsum/core.hpp"

namespace reasonsum::prompts {

using Slots = std::map<std::string, std::string, std::less<>>;

/// A worked (document, reference summary) pair inlined for 2-shot runs.
struct Exemplar {
  std::string document;
  std::string summary;

  bool operator==(const Exemplar&) const = default;
};

/// Template text for `prompts/<name>.txt` with `%%` comment lines removed and
/// trailing whitespace trimmed. Throws missing_template.
std::string load_template(std::string_view name);

/// Names of every `{{slot}}` in order of first appearance.
std::vector<std::string> slot_names(std::string_view tmpl);

/// Replaces every `{{slot}}`. Slot values are inserted literally (never
/// re-scanned). Throws missing_slot naming the first unfilled slot; extra
/// entries in `slots` are ignored.
std::string render(std::string_view tmpl, const Slots& slots);

/// `<strategy>_<stage>`, e.g. `e2a_extract`. Also the stage name recorded in
/// traces and keyed on by mock scripts.
std::string template_name(StrategyId strategy, std::string_view stage);

/// Renders the template for (strategy, stage) into a single user message.
/// `document` fills `{{document}}`; exemplars fill `{{exemplars}}` when the
/// template has that slot (final summarization stages only) and are ignored
/// otherwise.
std::vector<ChatMessage> assemble_prompt(StrategyId strategy, std::string_view stage,
                                         std::string_view document,
                                         std::span<const Exemplar> exemplars = {},
                                         Slots payloads = {});

/// Text spliced in front of the target document in 2-shot prompts. Empty
/// when there are no exemplars.
std::string exemplar_block(std::span<const Exemplar> exemplars);

/// Domain-conditioned reasoning cues for the CoT prompt. Unknown domains get
/// the generic block.
std::string reasoning_guidance(std::string_view domain);

/// FNV-1a checksum of every prompt template and CoT block, keyed by resource
/// name. Stored in run manifests to detect template drift.
std::map<std::string, std::string> template_checksums();

/// Compact JSON rendering used for every JSON slot.
std::string dump(const json& value);

}  // namespace reasonsum::prompts
