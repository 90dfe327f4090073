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

#include "storylens/fidelity.hpp"

#include <algorithm>
#include <cctype>
#include <set>
#include <sstream>

namespace storylens::fidelity {

namespace {

std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  std::size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

std::vector<std::string> split_lines(const std::string& text) {
  std::vector<std::string> lines;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    line = trim(line);
    if (!line.empty()) lines.push_back(line);
  }
  return lines;
}

std::vector<std::string> split_pipe(const std::string& line) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  while (true) {
    std::size_t pos = line.find('|', start);
    if (pos == std::string::npos) {
      fields.push_back(trim(line.substr(start)));
      break;
    }
    fields.push_back(trim(line.substr(start, pos - start)));
    start = pos + 1;
  }
  return fields;
}

// First word of the reply, lowercased and stripped of punctuation.
std::string first_word(const std::string& reply) {
  std::string w;
  for (char c : reply) {
    if (std::isalpha(static_cast<unsigned char>(c))) {
      w.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    } else if (!w.empty()) {
      break;
    }
  }
  return w;
}

providers::ChatRequest judge_request(const prompts::PromptRegistry& registry,
                                     const std::string& prompt_name,
                                     const std::map<std::string, std::string>& values) {
  providers::ChatRequest req;
  req.system = registry.get(prompt_name).system;
  req.user = registry.render(prompt_name, values);
  return req;
}

bool is_empty_reply(const std::vector<std::string>& lines) {
  return lines.empty() || (lines.size() == 1 && lower(lines[0]) == "none");
}

// Parses pipe rows with callback `parse` returning optional<T>. Replies where
// every row is malformed are retried once, then rejected.
template <typename T, typename ParseFn>
Extraction<T> extract_rows(providers::Provider& provider, const providers::ChatRequest& req,
                           ParseFn&& parse, const char* what) {
  for (int attempt = 0; attempt < 2; ++attempt) {
    const std::string reply = provider.chat(req);
    const auto lines = split_lines(reply);
    if (is_empty_reply(lines)) return {};
    Extraction<T> out;
    for (const auto& line : lines) {
      if (auto item = parse(line))
        out.items.push_back(std::move(*item));
      else
        ++out.warnings;
    }
    if (!out.items.empty()) return out;
    // Every row malformed: treat as an unparseable reply.
  }
  throw JudgeError(std::string(what) + ": unparseable judge reply after retry");
}

}  // namespace

std::string triplet_text(const SvoTriplet& t) {
  return t.subject + " | " + t.verb + " | " + t.object;
}

std::string to_string(MatchVerdict v) {
  switch (v) {
    case MatchVerdict::AutoPass: return "auto_pass";
    case MatchVerdict::AutoFail: return "auto_fail";
    case MatchVerdict::ArbitratedPass: return "arbitrated_pass";
    case MatchVerdict::ArbitratedFail: return "arbitrated_fail";
    case MatchVerdict::Unmatched: return "unmatched";
  }
  return "unmatched";
}

std::string to_string(ClaimLabel l) {
  switch (l) {
    case ClaimLabel::Entailment: return "entailment";
    case ClaimLabel::Neutral: return "neutral";
    case ClaimLabel::Contradiction: return "contradiction";
  }
  return "neutral";
}

std::string to_string(LocalVerdict v) {
  switch (v) {
    case LocalVerdict::Supported: return "supported";
    case LocalVerdict::Unsupported: return "unsupported";
    case LocalVerdict::LocalContradiction: return "local_contradiction";
  }
  return "unsupported";
}

Extraction<SvoTriplet> extract_svo(providers::Provider& provider,
                                   const prompts::PromptRegistry& registry,
                                   const std::string& text) {
  if (text.empty()) throw PreconditionError("extract_svo: empty text");
  const auto req = judge_request(registry, "svo_extract", {{"text", text}});
  return extract_rows<SvoTriplet>(
      provider, req,
      [](const std::string& line) -> std::optional<SvoTriplet> {
        const auto fields = split_pipe(line);
        if (fields.size() != 3 || fields[0].empty() || fields[1].empty()) return std::nullopt;
        return SvoTriplet{fields[0], fields[1], fields[2]};
      },
      "extract_svo");
}

Extraction<NekgEntry> extract_nekg(providers::Provider& provider,
                                   const prompts::PromptRegistry& registry,
                                   const std::string& text) {
  if (text.empty()) throw PreconditionError("extract_nekg: empty text");
  const auto req = judge_request(registry, "nekg_extract", {{"text", text}});
  auto out = extract_rows<NekgEntry>(
      provider, req,
      [](const std::string& line) -> std::optional<NekgEntry> {
        const auto fields = split_pipe(line);
        if (fields.size() != 3 || fields[0].empty()) return std::nullopt;
        return NekgEntry{fields[0], fields[1], fields[2]};
      },
      "extract_nekg");
  // Dedup under case-folded field equality, keeping first occurrences.
  std::set<std::string> seen;
  std::vector<NekgEntry> unique;
  for (auto& e : out.items) {
    const std::string key =
        lower(e.entity) + "\x1f" + lower(e.attribute_or_relation) + "\x1f" + lower(e.value);
    if (seen.insert(key).second) unique.push_back(std::move(e));
  }
  out.items = std::move(unique);
  return out;
}

std::vector<Assignment> greedy_assign(const std::vector<std::vector<double>>& similarity) {
  const std::size_t n_orig = similarity.size();
  const std::size_t n_rw = n_orig ? similarity.front().size() : 0;

  struct Pair {
    double sim;
    std::size_t oi;
    std::size_t ri;
  };
  std::vector<Pair> candidates;
  candidates.reserve(n_orig * n_rw);
  for (std::size_t oi = 0; oi < n_orig; ++oi)
    for (std::size_t ri = 0; ri < n_rw; ++ri)
      candidates.push_back({similarity[oi][ri], oi, ri});
  std::sort(candidates.begin(), candidates.end(), [](const Pair& a, const Pair& b) {
    if (a.sim != b.sim) return a.sim > b.sim;
    if (a.oi != b.oi) return a.oi < b.oi;
    return a.ri < b.ri;
  });

  std::vector<bool> orig_taken(n_orig, false), rw_taken(n_rw, false);
  std::vector<Assignment> assignments(n_orig);
  for (std::size_t oi = 0; oi < n_orig; ++oi) assignments[oi].original_index = oi;
  for (const auto& p : candidates) {
    if (orig_taken[p.oi] || rw_taken[p.ri]) continue;
    orig_taken[p.oi] = true;
    rw_taken[p.ri] = true;
    assignments[p.oi].rewrite_index = p.ri;
    assignments[p.oi].similarity = p.sim;
  }
  return assignments;
}

std::vector<TripletMatch> match_triplets(const Embedder& embedder,
                                         const std::vector<SvoTriplet>& original,
                                         const std::vector<SvoTriplet>& rewritten,
                                         const Arbitrator& arbitrator) {
  if (original.empty()) return {};

  std::vector<providers::EmbeddingVector> orig_vecs, rw_vecs;
  orig_vecs.reserve(original.size());
  rw_vecs.reserve(rewritten.size());
  for (const auto& t : original) orig_vecs.push_back(embedder(triplet_text(t)));
  for (const auto& t : rewritten) rw_vecs.push_back(embedder(triplet_text(t)));

  std::vector<std::vector<double>> similarity(original.size(),
                                              std::vector<double>(rewritten.size(), -1.0));
  for (std::size_t oi = 0; oi < original.size(); ++oi)
    for (std::size_t ri = 0; ri < rewritten.size(); ++ri)
      similarity[oi][ri] = providers::cosine(orig_vecs[oi], rw_vecs[ri]);

  std::vector<TripletMatch> matches(original.size());
  for (const auto& a : greedy_assign(similarity)) {
    TripletMatch& m = matches[a.original_index];
    m.original_index = a.original_index;
    if (!a.rewrite_index) continue;  // stays Unmatched
    m.rewrite_index = a.rewrite_index;
    m.similarity = a.similarity;
    if (a.similarity >= kAutoPass) {
      m.verdict = MatchVerdict::AutoPass;
    } else if (a.similarity < kAutoFail) {
      m.verdict = MatchVerdict::AutoFail;
    } else {
      m.verdict = arbitrator(original[a.original_index], rewritten[*a.rewrite_index],
                             a.similarity)
                      ? MatchVerdict::ArbitratedPass
                      : MatchVerdict::ArbitratedFail;
    }
  }
  return matches;
}

bool arbitrate_match(providers::Provider& provider, const prompts::PromptRegistry& registry,
                     const SvoTriplet& original, const SvoTriplet& rewrite,
                     double similarity) {
  if (similarity < kAutoFail || similarity >= kAutoPass)
    throw PreconditionError("arbitrate_match: similarity " + std::to_string(similarity) +
                            " outside fuzzy band [0.50, 0.85)");
  const auto req = judge_request(
      registry, "svo_arbitrate",
      {{"original", triplet_text(original)}, {"rewrite", triplet_text(rewrite)}});
  for (int attempt = 0; attempt < 2; ++attempt) {
    const std::string w = first_word(provider.chat(req));
    if (w == "pass" || w == "yes" || w == "true") return true;
    if (w == "fail" || w == "no" || w == "false") return false;
  }
  throw JudgeError("arbitrate_match: non-boolean judge reply after reprompt");
}

bool judge_nekg_entry(providers::Provider& provider, const prompts::PromptRegistry& registry,
                      const NekgEntry& entry, const std::string& rewrite_text) {
  const std::string entry_text =
      entry.entity + " | " + entry.attribute_or_relation + " | " + entry.value;
  const auto req = judge_request(registry, "nekg_judge",
                                 {{"entry", entry_text}, {"text", rewrite_text}});
  for (int attempt = 0; attempt < 2; ++attempt) {
    const std::string w = first_word(provider.chat(req));
    if (w == "preserved" || w == "pass" || w == "yes") return true;
    if (w == "lost" || w == "fail" || w == "no") return false;
  }
  throw JudgeError("judge_nekg_entry: non-boolean judge reply after reprompt");
}

LocalFidelityReport score_local(const std::vector<TripletMatch>& matches,
                                const std::vector<std::pair<NekgEntry, bool>>& nekg_judgments) {
  LocalFidelityReport report;
  report.matches = matches;
  report.nekg_judgments = nekg_judgments;

  if (matches.empty()) {
    report.s_svo = 1.0;  // no checkable items
  } else {
    std::size_t passed = 0;
    for (const auto& m : matches)
      if (m.passed()) ++passed;
    report.s_svo = static_cast<double>(passed) / static_cast<double>(matches.size());
  }
  if (nekg_judgments.empty()) {
    report.s_nekg = 1.0;
  } else {
    std::size_t preserved = 0;
    for (const auto& [entry, pass] : nekg_judgments)
      if (pass) ++preserved;
    report.s_nekg = static_cast<double>(preserved) / static_cast<double>(nekg_judgments.size());
  }
  report.empty_extraction = matches.empty() && nekg_judgments.empty();
  report.f_local = kNekgWeight * report.s_nekg + kSvoWeight * report.s_svo;
  return report;
}

Extraction<std::string> extract_claims(providers::Provider& provider,
                                       const prompts::PromptRegistry& registry,
                                       const std::string& rewrite_text) {
  if (rewrite_text.empty()) throw PreconditionError("extract_claims: empty text");
  const auto req = judge_request(registry, "claim_extract", {{"text", rewrite_text}});
  const std::string reply = provider.chat(req);
  const auto lines = split_lines(reply);
  Extraction<std::string> out;
  if (is_empty_reply(lines)) return out;
  out.items = lines;  // one claim per line, order preserved
  return out;
}

JudgedClaim judge_claim_cascade(providers::Provider& provider,
                                const prompts::PromptRegistry& registry,
                                const std::string& claim, const std::string& original_text,
                                const corpus::StructuredContext& context) {
  JudgedClaim judged;
  judged.claim = claim;
  if (claim.size() > 2 && claim.front() == '[') {
    const std::size_t close = claim.find(']');
    if (close != std::string::npos) judged.claim_kind = lower(claim.substr(1, close - 1));
  }

  // Stage 1: against the original text.
  const auto local_req = judge_request(registry, "claim_judge_local",
                                       {{"claim", claim}, {"text", original_text}});
  std::string verdict;
  for (int attempt = 0; attempt < 2 && verdict.empty(); ++attempt) {
    const std::string w = first_word(provider.chat(local_req));
    if (w == "supported" || w == "contradiction" || w == "unsupported") verdict = w;
  }
  if (verdict.empty())
    throw JudgeError("judge_claim_cascade: unparseable local verdict for claim: " + claim);

  if (verdict == "supported") {
    judged.local_verdict = LocalVerdict::Supported;
    judged.label = ClaimLabel::Entailment;
    return judged;
  }
  if (verdict == "contradiction") {
    judged.local_verdict = LocalVerdict::LocalContradiction;
    judged.label = ClaimLabel::Contradiction;
    return judged;
  }

  // Stage 2: against the structured context, serialized exactly as prompts see it.
  judged.local_verdict = LocalVerdict::Unsupported;
  const auto global_req = judge_request(
      registry, "claim_judge_global",
      {{"claim", claim}, {"context", corpus::compact_context_json(context)}});
  for (int attempt = 0; attempt < 2; ++attempt) {
    const std::string w = first_word(provider.chat(global_req));
    if (w == "consistent" || w == "neutral" || w == "plausible") {
      judged.label = ClaimLabel::Neutral;
      return judged;
    }
    if (w == "conflict" || w == "contradiction" || w == "conflicting") {
      judged.label = ClaimLabel::Contradiction;
      return judged;
    }
  }
  throw JudgeError("judge_claim_cascade: unparseable global verdict for claim: " + claim);
}

GlobalFidelityReport score_global(const std::vector<JudgedClaim>& claims) {
  GlobalFidelityReport report;
  report.claims = claims;
  report.n_total = claims.size();
  for (const auto& c : claims) {
    switch (c.label) {
      case ClaimLabel::Entailment: ++report.n_entail; break;
      case ClaimLabel::Neutral: ++report.n_neutral; break;
      case ClaimLabel::Contradiction: ++report.n_contra; break;
    }
  }
  if (report.n_total == 0) {
    report.f_global = 1.0;
    report.empty_extraction = true;
  } else {
    report.f_global = static_cast<double>(report.n_entail + report.n_neutral) /
                      static_cast<double>(report.n_total);
  }
  return report;
}

LocalFidelityReport local_fidelity(providers::Provider& provider,
                                   const prompts::PromptRegistry& registry,
                                   const std::string& original_text,
                                   const std::string& rewrite_text) {
  const auto orig_svo = extract_svo(provider, registry, original_text);
  const auto rw_svo = extract_svo(provider, registry, rewrite_text);
  const auto orig_nekg = extract_nekg(provider, registry, original_text);

  Embedder embedder = [&provider](const std::string& text) {
    return provider.embed("", text);
  };
  Arbitrator arbitrator = [&](const SvoTriplet& o, const SvoTriplet& r, double sim) {
    return arbitrate_match(provider, registry, o, r, sim);
  };
  const auto matches = match_triplets(embedder, orig_svo.items, rw_svo.items, arbitrator);

  std::vector<std::pair<NekgEntry, bool>> nekg_judgments;
  nekg_judgments.reserve(orig_nekg.items.size());
  for (const auto& entry : orig_nekg.items)
    nekg_judgments.emplace_back(entry, judge_nekg_entry(provider, registry, entry, rewrite_text));

  return score_local(matches, nekg_judgments);
}

GlobalFidelityReport global_fidelity(providers::Provider& provider,
                                     const prompts::PromptRegistry& registry,
                                     const std::string& original_text,
                                     const std::string& rewrite_text,
                                     const corpus::StructuredContext& context) {
  const auto claims = extract_claims(provider, registry, rewrite_text);
  std::vector<JudgedClaim> judged;
  judged.reserve(claims.items.size());
  for (const auto& claim : claims.items)
    judged.push_back(judge_claim_cascade(provider, registry, claim, original_text, context));
  return score_global(judged);
}

}  // namespace storylens::fidelity
