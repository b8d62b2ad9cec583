#pragma once

// Feature extraction: the sparse TF-IDF block over tokens/n-grams and the
// dense 17-column conversational block (author role, lengths, positions,
// timing, code presence), plus assembly into the configured final vector.

#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "issuetypes/corpus.hpp"
#include "issuetypes/sparse.hpp"

namespace issuetypes {

// ---------------------------------------------------------------------------
// Textual block: TF-IDF over word n-grams
// ---------------------------------------------------------------------------

struct TextualVectorizer {
  int ngram_lo = 1;
  int ngram_hi = 1;
  std::map<std::string, std::uint32_t> vocabulary;  // n-gram -> column, lexicographic
  std::vector<double> idf;                          // aligned to columns
  std::size_t fitted_on = 0;                        // training sentence count

  bool fitted() const { return fitted_on > 0; }
  std::uint32_t width() const { return static_cast<std::uint32_t>(vocabulary.size()); }
};

namespace detail {

template <typename Fn>
void for_each_ngram(const std::vector<std::string>& tokens, int lo, int hi, Fn&& fn) {
  for (int n = lo; n <= hi; ++n) {
    if (tokens.size() < static_cast<std::size_t>(n)) continue;
    for (std::size_t i = 0; i + static_cast<std::size_t>(n) <= tokens.size(); ++i) {
      std::string gram = tokens[i];
      for (std::size_t j = 1; j < static_cast<std::size_t>(n); ++j) {
        gram += ' ';
        gram += tokens[i + j];
      }
      fn(std::move(gram));
    }
  }
}

}  // namespace detail

// Vocabulary = every n-gram of the training sentences (no frequency pruning);
// idf(t) = ln((1+N)/(1+df(t))) + 1. Column order is lexicographic, so fitting
// is insensitive to sentence order.
inline TextualVectorizer fit_vectorizer(const std::vector<std::vector<std::string>>& train_sentences,
                                        int ngram_lo = 1, int ngram_hi = 1) {
  if (train_sentences.empty()) {
    throw ValidationError("fit_vectorizer: empty training set");
  }
  if (ngram_lo != 1 || (ngram_hi != 1 && ngram_hi != 2)) {
    throw std::invalid_argument("fit_vectorizer: supported ngram ranges are (1,1) and (1,2)");
  }
  TextualVectorizer vec;
  vec.ngram_lo = ngram_lo;
  vec.ngram_hi = ngram_hi;
  vec.fitted_on = train_sentences.size();

  std::map<std::string, std::size_t> df;
  std::vector<std::string> seen;  // per-document scratch
  for (const auto& tokens : train_sentences) {
    seen.clear();
    detail::for_each_ngram(tokens, ngram_lo, ngram_hi,
                           [&seen](std::string gram) { seen.push_back(std::move(gram)); });
    std::sort(seen.begin(), seen.end());
    seen.erase(std::unique(seen.begin(), seen.end()), seen.end());
    for (const std::string& gram : seen) ++df[gram];
  }

  const double n_docs = static_cast<double>(train_sentences.size());
  vec.idf.reserve(df.size());
  std::uint32_t column = 0;
  for (const auto& [gram, doc_freq] : df) {
    vec.vocabulary.emplace(gram, column++);
    vec.idf.push_back(std::log((1.0 + n_docs) / (1.0 + static_cast<double>(doc_freq))) + 1.0);
  }
  return vec;
}

// Term counts times idf, L2-normalized. Out-of-vocabulary n-grams are
// ignored; a sentence with no known n-grams maps to the zero vector.
inline SparseVector transform_textual(const TextualVectorizer& vec,
                                      const std::vector<std::string>& tokens) {
  if (!vec.fitted()) throw ValidationError("transform_textual: vectorizer not fitted");
  std::map<std::uint32_t, double> counts;
  detail::for_each_ngram(tokens, vec.ngram_lo, vec.ngram_hi, [&](std::string gram) {
    auto it = vec.vocabulary.find(gram);
    if (it != vec.vocabulary.end()) counts[it->second] += 1.0;
  });
  SparseVector out;
  out.dim = vec.width();
  out.indices.reserve(counts.size());
  out.values.reserve(counts.size());
  for (const auto& [column, count] : counts) out.push(column, count * vec.idf[column]);
  const double norm = out.l2_norm();
  if (norm > 0.0) out.scale(1.0 / norm);
  return out;
}

// ---------------------------------------------------------------------------
// Conversational block
// ---------------------------------------------------------------------------

inline constexpr std::uint32_t kConversationalWidth = 17;

struct ConversationalFeatures {
  AuthorAssociation aa = AuthorAssociation::Other;
  bool begauth = false;   // comment author == original poster
  int len = 0;            // characters in the masked sentence
  double tlen = 0.0;      // words / longest sentence in thread
  double clen = 0.0;      // words / longest sentence in comment
  double tloc = 0.0;      // sentence position in comment / sentences in comment
  double cloc = 0.0;      // sentence position in thread / sentences in thread
  bool first_turn = false;
  bool last_turn = false;
  double tpos1 = 0.0;     // time from thread start to comment / thread duration
  double tpos2 = 0.0;     // time from comment to thread end / thread duration
  double ppau = 0.0;      // pause before the comment / thread duration
  double npau = 0.0;      // pause after the comment / thread duration
  bool has_code = false;

  // Dense encoding: AA one-hot (OWNER, CL, MBR, OTHER), then the remaining
  // features in table order; booleans as {0,1}.
  std::array<double, kConversationalWidth> encode() const {
    std::array<double, kConversationalWidth> v{};
    v[static_cast<std::size_t>(aa)] = 1.0;
    v[4] = begauth ? 1.0 : 0.0;
    v[5] = static_cast<double>(len);
    v[6] = tlen;
    v[7] = clen;
    v[8] = tloc;
    v[9] = cloc;
    v[10] = first_turn ? 1.0 : 0.0;
    v[11] = last_turn ? 1.0 : 0.0;
    v[12] = tpos1;
    v[13] = tpos2;
    v[14] = ppau;
    v[15] = npau;
    v[16] = has_code ? 1.0 : 0.0;
    return v;
  }
};

// Columns of the encoded block holding {0,1} values.
inline const std::vector<std::uint32_t>& conversational_binary_columns() {
  static const std::vector<std::uint32_t> cols = {0, 1, 2, 3, 4, 10, 11, 16};
  return cols;
}

// Precomputes the thread-level context (sentence counts, longest sentences,
// timestamps) so per-sentence extraction is O(1).
class ConversationalExtractor {
 public:
  explicit ConversationalExtractor(const IssueThread& thread) : thread_(&thread) {
    if (!thread.segmented) {
      throw ValidationError("conversational features need a segmented thread: " +
                            thread.display_id());
    }
    max_words_in_comment_.resize(thread.comments.size(), 0);
    for (std::size_t ci = 0; ci < thread.comments.size(); ++ci) {
      for (const Sentence& s : thread.comments[ci].sentences) {
        const int words = word_count(s.text_masked);
        max_words_in_comment_[ci] = std::max(max_words_in_comment_[ci], words);
        max_words_in_thread_ = std::max(max_words_in_thread_, words);
        ++sentences_in_thread_;
      }
    }
    t_first_ = thread.comments.front().created_at;
    t_last_ = thread.comments.back().created_at;
  }

  static int word_count(const std::string& masked_sentence) {
    int count = 0;
    bool in_word = false;
    for (char c : masked_sentence) {
      const bool space = std::isspace(static_cast<unsigned char>(c));
      if (!space && !in_word) ++count;
      in_word = !space;
    }
    return count;
  }

  ConversationalFeatures extract(int comment_index, const Sentence& sentence) const {
    const auto& comments = thread_->comments;
    const IssueComment& comment = comments[static_cast<std::size_t>(comment_index)];
    ConversationalFeatures f;
    f.aa = comment.author_association;
    f.begauth = comment.author_login == comments.front().author_login;
    f.len = static_cast<int>(sentence.text_masked.size());
    const int words = word_count(sentence.text_masked);
    f.tlen = max_words_in_thread_ > 0 ? static_cast<double>(words) / max_words_in_thread_ : 0.0;
    f.clen = max_words_in_comment_[static_cast<std::size_t>(comment_index)] > 0
                 ? static_cast<double>(words) /
                       max_words_in_comment_[static_cast<std::size_t>(comment_index)]
                 : 0.0;
    f.tloc = static_cast<double>(sentence.sentence_index_in_comment) /
             static_cast<double>(comment.sentences.size());
    f.cloc = static_cast<double>(sentence.sentence_index_in_thread) /
             static_cast<double>(sentences_in_thread_);
    f.first_turn = comment_index == 0;
    f.last_turn = static_cast<std::size_t>(comment_index) + 1 == comments.size();
    const double duration = static_cast<double>(t_last_ - t_first_);
    if (duration > 0.0) {
      const double t = static_cast<double>(comment.created_at);
      f.tpos1 = (t - static_cast<double>(t_first_)) / duration;
      f.tpos2 = (static_cast<double>(t_last_) - t) / duration;
      f.ppau = comment_index == 0
                   ? 0.0
                   : (t - static_cast<double>(
                              comments[static_cast<std::size_t>(comment_index - 1)].created_at)) /
                         duration;
      f.npau = f.last_turn
                   ? 0.0
                   : (static_cast<double>(
                          comments[static_cast<std::size_t>(comment_index + 1)].created_at) -
                      t) /
                         duration;
    }
    f.has_code = comment.has_code;
    return f;
  }

 private:
  const IssueThread* thread_;
  std::vector<int> max_words_in_comment_;
  int max_words_in_thread_ = 0;
  int sentences_in_thread_ = 0;
  std::int64_t t_first_ = 0;
  std::int64_t t_last_ = 0;
};

inline ConversationalFeatures extract_conversational(const IssueThread& thread, int comment_index,
                                                     const Sentence& sentence) {
  return ConversationalExtractor(thread).extract(comment_index, sentence);
}

// ---------------------------------------------------------------------------
// Standardization and assembly
// ---------------------------------------------------------------------------

struct StandardScaler {
  std::vector<double> mean;
  std::vector<double> stddev;  // population

  bool fitted() const { return !mean.empty(); }

  void fit(const std::vector<std::array<double, kConversationalWidth>>& rows) {
    if (rows.empty()) throw ValidationError("StandardScaler::fit: no rows");
    mean.assign(kConversationalWidth, 0.0);
    stddev.assign(kConversationalWidth, 0.0);
    for (const auto& row : rows) {
      for (std::size_t j = 0; j < kConversationalWidth; ++j) mean[j] += row[j];
    }
    for (double& m : mean) m /= static_cast<double>(rows.size());
    for (const auto& row : rows) {
      for (std::size_t j = 0; j < kConversationalWidth; ++j) {
        const double d = row[j] - mean[j];
        stddev[j] += d * d;
      }
    }
    for (double& s : stddev) s = std::sqrt(s / static_cast<double>(rows.size()));
  }

  // z-score; constant columns map to 0.
  std::vector<double> transform(const std::array<double, kConversationalWidth>& row) const {
    if (!fitted()) throw ValidationError("StandardScaler: not fitted");
    std::vector<double> out(kConversationalWidth);
    for (std::size_t j = 0; j < kConversationalWidth; ++j) {
      out[j] = stddev[j] > 1e-12 ? (row[j] - mean[j]) / stddev[j] : 0.0;
    }
    return out;
  }
};

enum class FeatureSet { Textual, Conversational, Both };

inline char to_char(FeatureSet f) {
  switch (f) {
    case FeatureSet::Textual: return 'T';
    case FeatureSet::Conversational: return 'C';
    case FeatureSet::Both: return 'B';
  }
  return '?';
}

inline std::string to_string(FeatureSet f) {
  switch (f) {
    case FeatureSet::Textual: return "Textual";
    case FeatureSet::Conversational: return "Conversational";
    case FeatureSet::Both: return "Both";
  }
  return "?";
}

struct FeatureVector {
  FeatureSet config = FeatureSet::Textual;
  SparseVector textual;                 // empty unless Textual/Both
  std::vector<double> conversational;   // standardized, empty unless Conversational/Both

  // Textual block first, conversational block appended.
  SparseVector combined() const {
    if (config == FeatureSet::Textual) return textual;
    SparseVector out;
    const std::uint32_t offset = config == FeatureSet::Both ? textual.dim : 0;
    out.dim = offset + kConversationalWidth;
    if (config == FeatureSet::Both) {
      out.indices = textual.indices;
      out.values = textual.values;
    }
    for (std::uint32_t j = 0; j < kConversationalWidth; ++j) {
      if (conversational[j] != 0.0) out.push(offset + j, conversational[j]);
    }
    return out;
  }
};

inline FeatureVector assemble_features(FeatureSet config, const SparseVector& textual,
                                       const std::array<double, kConversationalWidth>& conv_raw,
                                       const StandardScaler& scaler) {
  FeatureVector out;
  out.config = config;
  if (config != FeatureSet::Conversational) out.textual = textual;
  if (config != FeatureSet::Textual) {
    if (!scaler.fitted()) {
      throw ValidationError("assemble_features: scaler must be fitted for conversational configs");
    }
    out.conversational = scaler.transform(conv_raw);
  }
  return out;
}

// Post-interpolation snap targets for the {0,1} conversational columns of an
// assembled vector (standardization maps 0/1 to lo/hi). Constant columns are
// omitted: they standardize to 0 for every sample.
struct BinarySnap {
  std::uint32_t column;
  double lo, hi, mid;
};

inline std::vector<BinarySnap> binary_snap_columns(FeatureSet config, std::uint32_t textual_width,
                                                   const StandardScaler& scaler) {
  std::vector<BinarySnap> snaps;
  if (config == FeatureSet::Textual) return snaps;
  const std::uint32_t offset = config == FeatureSet::Both ? textual_width : 0;
  for (std::uint32_t j : conversational_binary_columns()) {
    const double sd = scaler.stddev[j];
    if (sd <= 1e-12) continue;
    const double mu = scaler.mean[j];
    snaps.push_back({offset + j, (0.0 - mu) / sd, (1.0 - mu) / sd, (0.5 - mu) / sd});
  }
  return snaps;
}

}  // namespace issuetypes
