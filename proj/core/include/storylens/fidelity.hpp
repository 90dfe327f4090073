/* Copyright 2026 The Storylens Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#ifndef STORYLENS_FIDELITY_HPP_
#define STORYLENS_FIDELITY_HPP_

#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "storylens/corpus.hpp"
#include "storylens/prompts.hpp"
#include "storylens/providers.hpp"

namespace storylens::fidelity {

// Similarity band edges. AutoPass at s >= kAutoPass, arbitration on
// [kAutoFail, kAutoPass), AutoFail below kAutoFail.
inline constexpr double kAutoFail = 0.50;
inline constexpr double kAutoPass = 0.85;

// Local fidelity weights.
inline constexpr double kNekgWeight = 0.9;
inline constexpr double kSvoWeight = 0.1;

struct SvoTriplet {
  std::string subject;  // non-empty
  std::string verb;     // non-empty
  std::string object;
};

std::string triplet_text(const SvoTriplet& t);  // "subject | verb | object"

struct NekgEntry {
  std::string entity;  // non-empty
  std::string attribute_or_relation;
  std::string value;
};

enum class MatchVerdict { AutoPass, AutoFail, ArbitratedPass, ArbitratedFail, Unmatched };

struct TripletMatch {
  std::size_t original_index = 0;
  std::optional<std::size_t> rewrite_index;  // absent iff Unmatched
  double similarity = -1.0;                  // -1 sentinel for Unmatched
  MatchVerdict verdict = MatchVerdict::Unmatched;

  bool passed() const {
    return verdict == MatchVerdict::AutoPass || verdict == MatchVerdict::ArbitratedPass;
  }
};

enum class LocalVerdict { Supported, Unsupported, LocalContradiction };
enum class ClaimLabel { Entailment, Neutral, Contradiction };

std::string to_string(MatchVerdict v);
std::string to_string(ClaimLabel l);
std::string to_string(LocalVerdict v);

struct JudgedClaim {
  std::string claim;
  std::string claim_kind;  // e.g. "event", "state"; may be empty
  LocalVerdict local_verdict = LocalVerdict::Unsupported;
  ClaimLabel label = ClaimLabel::Neutral;
};

struct LocalFidelityReport {
  double s_svo = 0.0;
  double s_nekg = 0.0;
  double f_local = 0.0;  // 0.9 * s_nekg + 0.1 * s_svo
  bool empty_extraction = false;
  std::vector<TripletMatch> matches;
  std::vector<std::pair<NekgEntry, bool>> nekg_judgments;
};

struct GlobalFidelityReport {
  std::size_t n_entail = 0;
  std::size_t n_neutral = 0;
  std::size_t n_contra = 0;
  std::size_t n_total = 0;
  double f_global = 0.0;
  bool empty_extraction = false;
  std::vector<JudgedClaim> claims;
};

template <typename T>
struct Extraction {
  std::vector<T> items;
  std::size_t warnings = 0;  // malformed rows dropped
};

Extraction<SvoTriplet> extract_svo(providers::Provider& provider,
                                   const prompts::PromptRegistry& registry,
                                   const std::string& text);

// Deduplicates entries equal under case-folded field comparison.
Extraction<NekgEntry> extract_nekg(providers::Provider& provider,
                                   const prompts::PromptRegistry& registry,
                                   const std::string& text);

struct Assignment {
  std::size_t original_index = 0;
  std::optional<std::size_t> rewrite_index;
  double similarity = -1.0;
};

// The assignment rule behind match_triplets, on a raw similarity matrix
// (rows = originals, columns = rewrites).
std::vector<Assignment> greedy_assign(const std::vector<std::vector<double>>& similarity);

using Embedder = std::function<providers::EmbeddingVector(const std::string&)>;
using Arbitrator = std::function<bool(const SvoTriplet& original,
                                      const SvoTriplet& rewrite, double similarity)>;

// Greedy one-to-one assignment: candidate pairs sorted by similarity
// descending, ties broken by (original_index, rewrite_index); a pair is
// accepted if both sides are still unassigned. Every original yields exactly
// one TripletMatch; originals left without a partner are Unmatched. The
// arbitrator is consulted only for similarities in [kAutoFail, kAutoPass).
std::vector<TripletMatch> match_triplets(const Embedder& embedder,
                                         const std::vector<SvoTriplet>& original,
                                         const std::vector<SvoTriplet>& rewritten,
                                         const Arbitrator& arbitrator);

// Binary preservation arbitration for a fuzzy-band pair. Precondition:
// kAutoFail <= similarity < kAutoPass.
bool arbitrate_match(providers::Provider& provider, const prompts::PromptRegistry& registry,
                     const SvoTriplet& original, const SvoTriplet& rewrite,
                     double similarity);

// Chat-judged preservation of one NEKG entry in the rewritten text.
bool judge_nekg_entry(providers::Provider& provider, const prompts::PromptRegistry& registry,
                      const NekgEntry& entry, const std::string& rewrite_text);

// S_SVO over original triplets, S_NEKG over judged entries, combined
// 0.9/0.1. A channel with no items scores 1.0; empty_extraction is set when
// both channels are empty.
LocalFidelityReport score_local(const std::vector<TripletMatch>& matches,
                                const std::vector<std::pair<NekgEntry, bool>>& nekg_judgments);

Extraction<std::string> extract_claims(providers::Provider& provider,
                                       const prompts::PromptRegistry& registry,
                                       const std::string& rewrite_text);

// Two-stage cascade: the claim is judged against the original text first;
// only Unsupported claims are escalated to the structured context.
JudgedClaim judge_claim_cascade(providers::Provider& provider,
                                const prompts::PromptRegistry& registry,
                                const std::string& claim, const std::string& original_text,
                                const corpus::StructuredContext& context);

GlobalFidelityReport score_global(const std::vector<JudgedClaim>& claims);

// Full pipelines over a (original, rewrite) pair.
LocalFidelityReport local_fidelity(providers::Provider& provider,
                                   const prompts::PromptRegistry& registry,
                                   const std::string& original_text,
                                   const std::string& rewrite_text);

GlobalFidelityReport global_fidelity(providers::Provider& provider,
                                     const prompts::PromptRegistry& registry,
                                     const std::string& original_text,
                                     const std::string& rewrite_text,
                                     const corpus::StructuredContext& context);

}  // namespace storylens::fidelity

#endif  // STORYLENS_FIDELITY_HPP_
