// SPDX-License-Identifier: Apache-2.0
#include "faqir/lexical.hpp"

#include <cmath>

#include "faqir/error.hpp"

namespace faqir {

std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> tokens;
  std::string current;
  for (unsigned char c : text) {
    const bool ascii_alnum = (c >= '0' && c <= '9') || (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z');
    if (ascii_alnum || c >= 0x80) {
      current.push_back(static_cast<char>(c >= 'A' && c <= 'Z' ? c - 'A' + 'a' : c));
    } else if (!current.empty()) {
      tokens.push_back(std::move(current));
      current.clear();
    }
  }
  if (!current.empty()) tokens.push_back(std::move(current));
  return tokens;
}

LexicalIndex::LexicalIndex(const FaqCorpus& corpus) : intents_(corpus.intents()) {
  if (corpus.empty()) fail(ErrorCode::kInvalidArgument, "cannot index an empty corpus");
  const auto& labels = corpus.train_intent_ids();
  for (std::size_t d = 0; d < corpus.size(); ++d) {
    const auto tokens = tokenize(corpus.train()[d].text);
    doc_lengths_.push_back(tokens.size());
    entries_.push_back({corpus.train()[d].id, labels[d]});
    for (const auto& t : tokens) {
      auto& list = terms_[t];
      if (!list.empty() && list.back().doc == d) {
        ++list.back().tf;
      } else {
        list.push_back({static_cast<std::uint32_t>(d), 1});
      }
    }
  }
}

const std::vector<LexicalIndex::Posting>* LexicalIndex::postings(const std::string& term) const {
  const auto it = terms_.find(term);
  return it == terms_.end() ? nullptr : &it->second;
}

std::size_t LexicalIndex::document_frequency(std::string_view term) const {
  const auto* p = postings(std::string(term));
  return p ? p->size() : 0;
}

Bm25Ranker::Bm25Ranker(const FaqCorpus& corpus, double k1, double b)
    : LexicalIndex(corpus), k1_(k1), b_(b) {
  double total = 0.0;
  for (auto len : doc_lengths_) total += static_cast<double>(len);
  average_length_ = total / static_cast<double>(doc_lengths_.size());
}

double Bm25Ranker::idf(std::string_view term) const {
  const double n = static_cast<double>(documents());
  const double df = static_cast<double>(document_frequency(term));
  return std::max(0.0, std::log((n - df + 0.5) / (df + 0.5)));
}

std::vector<double> Bm25Ranker::question_scores(std::string_view query) const {
  std::vector<double> scores(documents(), 0.0);
  for (const auto& term : tokenize(query)) {
    const auto* list = postings(term);
    if (!list) continue;
    const double w = idf(term);
    for (const auto& p : *list) {
      const double tf = p.tf;
      const double norm = average_length_ > 0.0
                              ? 1.0 - b_ + b_ * static_cast<double>(doc_lengths_[p.doc]) / average_length_
                              : 1.0;
      scores[p.doc] += w * tf * (k1_ + 1.0) / (tf + k1_ * norm);
    }
  }
  return scores;
}

LexicalRanking Bm25Ranker::rank(std::string_view query, std::size_t k) const {
  LexicalRanking out;
  if (tokenize(query).empty()) {
    out.empty_query = true;
    return out;
  }
  out.intents = aggregate_by_intent(question_scores(query), entries_, intents_, k);
  return out;
}

TfidfRanker::TfidfRanker(const FaqCorpus& corpus) : LexicalIndex(corpus) {
  doc_norms_.assign(documents(), 0.0);
  for (const auto& [term, list] : terms_) {
    const double w = idf(term);
    for (const auto& p : list) {
      const double x = p.tf * w;
      doc_norms_[p.doc] += x * x;
    }
  }
  for (auto& n : doc_norms_) n = std::sqrt(n);
}

double TfidfRanker::idf(std::string_view term) const {
  const double n = static_cast<double>(documents());
  const double df = static_cast<double>(document_frequency(term));
  return std::log((1.0 + n) / (1.0 + df)) + 1.0;
}

std::vector<double> TfidfRanker::question_scores(std::string_view query) const {
  std::unordered_map<std::string, double> counts;
  for (auto& t : tokenize(query)) {
    if (postings(t)) counts[t] += 1.0;
  }
  std::vector<double> scores(documents(), 0.0);
  double query_norm = 0.0;
  for (const auto& [term, tf] : counts) {
    const double w = idf(term);
    const double qx = tf * w;
    query_norm += qx * qx;
    for (const auto& p : *postings(term)) scores[p.doc] += qx * p.tf * w;
  }
  if (query_norm == 0.0) return scores;
  query_norm = std::sqrt(query_norm);
  for (std::size_t d = 0; d < scores.size(); ++d) {
    if (doc_norms_[d] > 0.0) scores[d] = std::min(1.0, scores[d] / (query_norm * doc_norms_[d]));
  }
  return scores;
}

LexicalRanking TfidfRanker::rank(std::string_view query, std::size_t k) const {
  LexicalRanking out;
  if (tokenize(query).empty()) {
    out.empty_query = true;
    return out;
  }
  out.intents = aggregate_by_intent(question_scores(query), entries_, intents_, k);
  return out;
}

LexicalRanking bm25_rank(const FaqCorpus& corpus, std::string_view query, std::size_t k) {
  return Bm25Ranker(corpus).rank(query, k);
}

LexicalRanking tfidf_rank(const FaqCorpus& corpus, std::string_view query, std::size_t k) {
  return TfidfRanker(corpus).rank(query, k);
}

}  // namespace faqir
