#pragma once

#include <string>
#include <vector>

#include "reasonsum/core.hpp"
#include "reasonsum/judge.hpp"
#include "reasonsum/prompts.hpp"
#include "reasonsum/provider.hpp"
#include "reasonsum/session.hpp"

namespace reasonsum::strategies {

struct PipelineOptions {
  provider::DecodingSettings decoding;
  // Model override by stage name; "" is the default for every stage.
  std::map<std::string, std::string> stage_models;
  judge::RubricWeights weights;
  // QAG answers below this confidence are left out of the Q&A table.
  int qag_min_confidence = 1;
};

struct PipelineInput {
  SampleRecord sample;
  // Registry domain of the sample's dataset; selects the CoT guidance block.
  std::string domain = "generic";
  // Inlined only when StrategySpec::shots is 2.
  std::vector<prompts::Exemplar> exemplars;
};

using Runner = SummaryResult (*)(const PipelineInput&, const StrategySpec&, provider::Gateway&,
                                 const PipelineOptions&);

SummaryResult run_vanilla(const PipelineInput& input, const StrategySpec& spec,
                          provider::Gateway& gateway, const PipelineOptions& options = {});
SummaryResult run_cot(const PipelineInput& input, const StrategySpec& spec,
                      provider::Gateway& gateway, const PipelineOptions& options = {});
SummaryResult run_e2a(const PipelineInput& input, const StrategySpec& spec,
                      provider::Gateway& gateway, const PipelineOptions& options = {});
SummaryResult run_qag(const PipelineInput& input, const StrategySpec& spec,
                      provider::Gateway& gateway, const PipelineOptions& options = {});
SummaryResult run_cite(const PipelineInput& input, const StrategySpec& spec,
                       provider::Gateway& gateway, const PipelineOptions& options = {});
SummaryResult run_deco(const PipelineInput& input, const StrategySpec& spec,
                       provider::Gateway& gateway, const PipelineOptions& options = {});
SummaryResult run_plan(const PipelineInput& input, const StrategySpec& spec,
                       provider::Gateway& gateway, const PipelineOptions& options = {});
SummaryResult run_ir(const PipelineInput& input, const StrategySpec& spec,
                     provider::Gateway& gateway, const PipelineOptions& options = {});
SummaryResult run_sc(const PipelineInput& input, const StrategySpec& spec,
                     provider::Gateway& gateway, const PipelineOptions& options = {});

/// Dispatches on spec.strategy.
SummaryResult run_strategy(const PipelineInput& input, const StrategySpec& spec,
                           provider::Gateway& gateway, const PipelineOptions& options = {});

/// Calls the pipeline makes when every payload validates first time. QAG
/// depends on the question count, IR on when the evaluator stops; both
/// bounds are returned as [min, max].
std::pair<int, int> expected_calls(const StrategySpec& spec);

}  // namespace reasonsum::strategies
