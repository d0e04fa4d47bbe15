// SPDX-License-Identifier: Apache-2.0
#include "faqir/synthetic.hpp"

#include <algorithm>
#include <set>

#include "faqir/error.hpp"
#include "faqir/rng.hpp"

namespace faqir {
namespace {

constexpr const char* kOnsets[] = {"b", "c", "d", "f", "g", "h", "j", "k", "l", "m", "n",
                                   "p", "r", "s", "t", "v", "w", "z", "br", "st", "tr", "gl"};
constexpr const char* kNuclei[] = {"a", "e", "i", "o", "u", "ai", "ou", "ea"};

std::string make_word(Rng& rng) {
  const std::size_t syllables = 2 + rng.uniform_index(2);
  std::string word;
  for (std::size_t s = 0; s < syllables; ++s) {
    word += kOnsets[rng.uniform_index(std::size(kOnsets))];
    word += kNuclei[rng.uniform_index(std::size(kNuclei))];
  }
  if (rng.uniform_index(3) == 0) word += "n";
  return word;
}

std::vector<std::string> make_vocabulary(Rng& rng, std::size_t count, std::set<std::string>& used) {
  std::vector<std::string> words;
  while (words.size() < count) {
    std::string w = make_word(rng);
    if (used.insert(w).second) words.push_back(std::move(w));
  }
  return words;
}

std::string add_typo(Rng& rng, std::string word) {
  if (word.size() < 4) return word;
  const std::size_t pos = 1 + rng.uniform_index(word.size() - 2);
  switch (rng.uniform_index(3)) {
    case 0: std::swap(word[pos], word[pos + 1 < word.size() ? pos + 1 : pos - 1]); break;
    case 1: word.insert(word.begin() + static_cast<std::ptrdiff_t>(pos), word[pos]); break;
    default: word.erase(pos, 1); break;
  }
  return word;
}

std::vector<std::string> pick(Rng& rng, const std::vector<std::string>& from, std::size_t n) {
  std::vector<std::size_t> idx(from.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  n = std::min(n, idx.size());
  for (std::size_t i = 0; i < n; ++i) std::swap(idx[i], idx[i + rng.uniform_index(idx.size() - i)]);
  std::vector<std::string> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back(from[idx[i]]);
  return out;
}

std::string join_shuffled(Rng& rng, std::vector<std::string> words) {
  rng.shuffle(std::span<std::string>(words));
  std::string text;
  for (const auto& w : words) {
    if (!text.empty()) text += ' ';
    text += w;
  }
  return text;
}

}  // namespace

FaqCorpus make_synthetic_corpus(const SyntheticSpec& spec) {
  if (spec.num_intents == 0 || spec.train_per_intent == 0) {
    fail(ErrorCode::kInvalidArgument, "synthetic corpus needs intents and questions");
  }
  const std::string prefix = spec.intent_prefix.empty() ? spec.tenant_id + "/" : spec.intent_prefix;

  std::set<std::string> used;
  Rng language = Rng::derive(spec.language_seed, 0xF111E4);
  const auto filler = make_vocabulary(language, spec.filler_vocabulary, used);

  Rng topics = Rng::derive(spec.seed, 0x70B1C);
  std::vector<std::vector<std::string>> topic_words;
  for (std::size_t c = 0; c < spec.num_intents; ++c) {
    topic_words.push_back(make_vocabulary(topics, spec.topic_words_per_intent, used));
  }

  Rng rng = Rng::derive(spec.seed, 0x5E47);
  std::vector<FaqEntry> train;
  std::vector<LabeledQuery> test;
  for (std::size_t c = 0; c < spec.num_intents; ++c) {
    char label[16];
    std::snprintf(label, sizeof(label), "intent%03zu", c);
    const std::string intent = prefix + label;
    std::set<std::string> texts;
    std::size_t attempts = 0;
    while (texts.size() < spec.train_per_intent && attempts++ < 100 * spec.train_per_intent) {
      auto words = pick(rng, topic_words[c], spec.topic_words_per_question);
      for (auto& f : pick(rng, filler, spec.filler_words_per_question)) words.push_back(f);
      std::string text = join_shuffled(rng, std::move(words));
      if (!texts.insert(text).second) continue;
      train.push_back(FaqEntry{QuestionId{static_cast<std::uint32_t>(train.size())}, text, intent,
                               "answer for " + intent});
    }
    for (std::size_t t = 0; t < spec.test_per_intent; ++t) {
      auto words = pick(rng, topic_words[c], spec.topic_words_per_question);
      for (auto& w : words) {
        if (rng.uniform01() < spec.typo_rate) w = add_typo(rng, w);
      }
      for (auto& f : pick(rng, filler, spec.filler_words_per_query)) words.push_back(f);
      test.push_back(LabeledQuery{join_shuffled(rng, std::move(words)), intent});
    }
  }

  std::vector<std::string> oos;
  if (spec.oos_queries > 0) {
    const auto stray = make_vocabulary(topics, 4 * spec.topic_words_per_intent, used);
    for (std::size_t i = 0; i < spec.oos_queries; ++i) {
      auto words = pick(rng, stray, spec.topic_words_per_question);
      for (auto& f : pick(rng, filler, spec.filler_words_per_query)) words.push_back(f);
      oos.push_back(join_shuffled(rng, std::move(words)));
    }
  }
  return FaqCorpus(spec.tenant_id, std::move(train), std::move(test), std::move(oos));
}

FaqCorpus make_sized_corpus(std::string tenant_id, const std::vector<std::size_t>& counts,
                            std::uint64_t seed) {
  Rng rng = Rng::derive(seed, 0x512E);
  std::set<std::string> used;
  std::vector<FaqEntry> train;
  for (std::size_t c = 0; c < counts.size(); ++c) {
    char label[16];
    std::snprintf(label, sizeof(label), "intent%03zu", c);
    for (std::size_t i = 0; i < counts[c]; ++i) {
      std::string text = make_word(rng) + " " + make_word(rng) + " " + std::to_string(train.size());
      train.push_back(FaqEntry{QuestionId{static_cast<std::uint32_t>(train.size())},
                               std::move(text), label, std::nullopt});
    }
  }
  return FaqCorpus(std::move(tenant_id), std::move(train));
}

}  // namespace faqir
