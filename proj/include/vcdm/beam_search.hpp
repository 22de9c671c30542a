#pragma once

#include <algorithm>
#include <cstddef>
#include <span>
#include <vector>

#include "vcdm/vocabulary.hpp"

namespace vcdm {

struct BeamResult {
  std::vector<TokenId> tokens;  // generated tokens, EOS excluded
  double score = 0.0;           // raw cumulative log-probability (EOS included when finished)
  bool finished = false;
};

// A step model exposes
//   State start() const;
//   std::pair<State, std::vector<double>> step(const State&, TokenId input) const;
// where the vector holds log-probabilities of the next token.
//
// Beam search over raw cumulative log-probability. Each round expands every
// live hypothesis, keeps the `beam_width` best candidates (ties: lower token
// id, then earlier beam), and retires candidates ending in EOS. The result is
// the highest scoring finished hypothesis, unless max_len cut the search short
// and the best unfinished hypothesis scores strictly higher.
template <class Model>
BeamResult beam_search(const Model& model, std::size_t beam_width, std::size_t max_len, TokenId bos = kBos,
                       TokenId eos = kEos) {
  using State = decltype(model.start());
  struct Hyp {
    std::vector<TokenId> tokens;
    double score;
    State state;
    TokenId last;
  };
  struct Candidate {
    double score;
    TokenId token;
    std::size_t beam;
  };
  auto better = [](const Candidate& x, const Candidate& y) {
    if (x.score != y.score) return x.score > y.score;
    if (x.token != y.token) return x.token < y.token;
    return x.beam < y.beam;
  };

  if (beam_width == 0) beam_width = 1;
  std::vector<Hyp> live;
  live.push_back({{}, 0.0, model.start(), bos});
  std::vector<BeamResult> finished;

  for (std::size_t length = 1; length <= max_len && !live.empty(); ++length) {
    std::vector<State> next_states;
    std::vector<Candidate> candidates;
    next_states.reserve(live.size());
    for (std::size_t bi = 0; bi < live.size(); ++bi) {
      auto [state, log_probs] = model.step(live[bi].state, live[bi].last);
      next_states.push_back(std::move(state));
      for (std::size_t t = 0; t < log_probs.size(); ++t) {
        candidates.push_back({live[bi].score + log_probs[t], static_cast<TokenId>(t), bi});
      }
    }
    const std::size_t keep = std::min(beam_width, candidates.size());
    std::partial_sort(candidates.begin(), candidates.begin() + static_cast<std::ptrdiff_t>(keep), candidates.end(),
                      better);

    std::vector<Hyp> next_live;
    for (std::size_t k = 0; k < keep; ++k) {
      const Candidate& c = candidates[k];
      std::vector<TokenId> tokens = live[c.beam].tokens;
      if (c.token == eos) {
        finished.push_back({std::move(tokens), c.score, true});
      } else {
        tokens.push_back(c.token);
        next_live.push_back({std::move(tokens), c.score, next_states[c.beam], c.token});
      }
    }
    live = std::move(next_live);

    // Extensions can only lower a score, so a finished hypothesis at least as
    // good as every live one cannot be beaten.
    if (!finished.empty() && !live.empty()) {
      double best_finished = finished.front().score;
      for (const auto& f : finished) best_finished = std::max(best_finished, f.score);
      if (best_finished >= live.front().score) break;
    }
  }

  std::size_t best = 0;
  for (std::size_t i = 1; i < finished.size(); ++i) {
    if (finished[i].score > finished[best].score) best = i;
  }
  // Live hypotheses remain only when max_len was reached; the best of them
  // competes with the finished ones on raw score (finished wins ties).
  if (!live.empty() && (finished.empty() || live.front().score > finished[best].score)) {
    return {live.front().tokens, live.front().score, false};
  }
  if (finished.empty()) return {};
  return finished[best];
}

// Argmax decoding (ties toward the lower token id).
template <class Model>
BeamResult greedy_decode(const Model& model, std::size_t max_len, TokenId bos = kBos, TokenId eos = kEos) {
  BeamResult out;
  auto state = model.start();
  TokenId last = bos;
  for (std::size_t length = 1; length <= max_len; ++length) {
    auto [next, log_probs] = model.step(state, last);
    std::size_t arg = 0;
    for (std::size_t t = 1; t < log_probs.size(); ++t) {
      if (log_probs[t] > log_probs[arg]) arg = t;
    }
    out.score += log_probs[arg];
    if (static_cast<TokenId>(arg) == eos) {
      out.finished = true;
      return out;
    }
    out.tokens.push_back(static_cast<TokenId>(arg));
    state = std::move(next);
    last = static_cast<TokenId>(arg);
  }
  return out;
}

}  // namespace vcdm
