// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "faqir/corpus.hpp"

namespace faqir {

// Parameters of a generated FAQ corpus. Questions mix a few intent-specific
// topic words with filler drawn from a vocabulary shared by every corpus with
// the same language_seed, which is what makes raw n-gram similarity
// unreliable and a learned projection useful. Held-out queries use fresh
// topic-word combinations, more filler and character typos.
struct SyntheticSpec {
  std::string tenant_id = "synthetic";
  // Prepended to every intent label; defaults to tenant_id + "/".
  std::string intent_prefix;
  std::size_t num_intents = 20;
  std::size_t train_per_intent = 5;
  std::size_t test_per_intent = 5;
  std::size_t oos_queries = 0;
  std::size_t topic_words_per_intent = 6;
  std::size_t topic_words_per_question = 2;
  std::size_t filler_vocabulary = 40;
  std::size_t filler_words_per_question = 4;
  std::size_t filler_words_per_query = 5;
  double typo_rate = 0.15;
  std::uint64_t seed = 1;
  std::uint64_t language_seed = 7;
};

FaqCorpus make_synthetic_corpus(const SyntheticSpec& spec);

// A corpus whose intent i holds exactly counts[i] distinct questions.
FaqCorpus make_sized_corpus(std::string tenant_id, const std::vector<std::size_t>& counts,
                            std::uint64_t seed = 1);

}  // namespace faqir
