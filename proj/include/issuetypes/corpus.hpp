#pragma once

// Corpus data model and IO. A corpus is a list of issue threads; each thread
// is an ordered list of comments (comment 0 is the original post, with the
// issue title segmented in front of it) and each comment an ordered list of
// sentences. Threads are immutable once built/preprocessed.
//
// On disk a corpus is JSONL, one thread per line:
//   {"project","issue_number","title","opened_at","comments":[
//     {"author_login","author_association","created_at","body_raw",
//      "sentences":[{"text","labels":["..."]}]}]}
// "sentences" appears once a thread has been preprocessed. Serialization is
// canonical (fixed key order, compact), so save(load(f)) == f for any f this
// module wrote.

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "issuetypes/errors.hpp"
#include "issuetypes/info_type.hpp"
#include "issuetypes/iso8601.hpp"
#include "issuetypes/preprocess.hpp"

namespace issuetypes {

using ordered_json = nlohmann::ordered_json;

enum class AuthorAssociation { Owner, Collaborator, Member, Other };

inline std::string to_string(AuthorAssociation a) {
  switch (a) {
    case AuthorAssociation::Owner: return "OWNER";
    case AuthorAssociation::Collaborator: return "CL";
    case AuthorAssociation::Member: return "MBR";
    case AuthorAssociation::Other: return "OTHER";
  }
  return "OTHER";
}

inline AuthorAssociation author_association_from_string(const std::string& s) {
  if (s == "OWNER") return AuthorAssociation::Owner;
  if (s == "CL") return AuthorAssociation::Collaborator;
  if (s == "MBR") return AuthorAssociation::Member;
  if (s == "OTHER") return AuthorAssociation::Other;
  throw ValidationError("unknown author association: '" + s + "'");
}

// Maps the GitHub API's author_association values onto the four roles kept
// in the corpus. Anything unrecognized (CONTRIBUTOR, NONE, ...) is OTHER.
inline AuthorAssociation author_association_from_github(const std::string& s) {
  if (s == "OWNER") return AuthorAssociation::Owner;
  if (s == "COLLABORATOR") return AuthorAssociation::Collaborator;
  if (s == "MEMBER") return AuthorAssociation::Member;
  return AuthorAssociation::Other;
}

struct Sentence {
  std::string id;  // thread-unique, "c<comment>s<sentence>"
  std::string text_raw;
  std::string text_masked;
  std::vector<std::string> tokens;
  std::vector<InfoType> labels;  // empty when unannotated
  int comment_index = 0;             // 0-based
  int sentence_index_in_comment = 1;  // 1-based
  int sentence_index_in_thread = 1;   // 1-based
};

struct IssueComment {
  std::string author_login;
  AuthorAssociation author_association = AuthorAssociation::Other;
  std::int64_t created_at = 0;  // UTC epoch seconds
  std::string body_raw;
  bool has_code = false;
  std::vector<Sentence> sentences;
};

struct IssueThread {
  std::string project;
  int issue_number = 0;
  std::string title;
  std::vector<IssueComment> comments;
  std::int64_t opened_at = 0;
  // True when created_at values were fabricated (CSV import without
  // timestamps); temporal features computed from them are degraded.
  bool timestamps_synthetic = false;
  bool segmented = false;

  std::string display_id() const { return project + "#" + std::to_string(issue_number); }

  std::int64_t last_comment_at() const {
    return comments.empty() ? opened_at : comments.back().created_at;
  }
};

// ---------------------------------------------------------------------------
// Validation
// ---------------------------------------------------------------------------

inline void validate_thread(const IssueThread& thread) {
  const std::string id = thread.display_id();
  if (thread.comments.empty()) {
    throw ValidationError("thread " + id + ": no comments (the original post is required)");
  }
  if (thread.issue_number <= 0) {
    throw ValidationError("thread " + id + ": issue_number must be positive");
  }
  for (std::size_t i = 1; i < thread.comments.size(); ++i) {
    if (thread.comments[i].created_at < thread.comments[i - 1].created_at) {
      throw ValidationError("thread " + id + ": comments not sorted by created_at (comment " +
                            std::to_string(i) + ")");
    }
  }
  if (thread.last_comment_at() < thread.opened_at) {
    throw ValidationError("thread " + id + ": negative thread duration");
  }
  for (const IssueComment& c : thread.comments) {
    for (const Sentence& s : c.sentences) {
      std::set<InfoType> seen;
      for (InfoType l : s.labels) {
        if (!seen.insert(l).second) {
          throw ValidationError("thread " + id + ", sentence " + s.id + ": duplicate label " +
                                to_string(l));
        }
      }
    }
  }
}

// ---------------------------------------------------------------------------
// Preprocessing a thread (masking, segmentation, tokenization)
// ---------------------------------------------------------------------------

// Fills text_masked/tokens for every sentence and has_code for every comment.
// Threads without sentence lists are segmented from their masked bodies, the
// title's sentences leading comment 0. Already-segmented threads keep their
// sentence boundaries. Idempotent.
inline void preprocess_thread(IssueThread& thread,
                              const WordLists& lists = WordLists::defaults(),
                              std::vector<std::string>* warnings = nullptr) {
  const bool already_segmented = thread.segmented;
  int thread_sentence_counter = 0;
  for (std::size_t ci = 0; ci < thread.comments.size(); ++ci) {
    IssueComment& comment = thread.comments[ci];
    MaskResult masked_body = mask_markdown(comment.body_raw);
    comment.has_code = masked_body.had_code;
    if (masked_body.unterminated_fence && warnings) {
      warnings->push_back("thread " + thread.display_id() + ", comment " + std::to_string(ci) +
                          ": unterminated code fence, rest of comment treated as code");
    }

    if (!already_segmented) {
      comment.sentences.clear();
      std::vector<std::string> fragments;
      if (ci == 0 && !thread.title.empty()) {
        fragments = split_sentences(mask_markdown(thread.title).text, lists);
      }
      for (std::string& s : split_sentences(masked_body.text, lists)) {
        fragments.push_back(std::move(s));
      }
      for (std::string& fragment : fragments) {
        Sentence s;
        s.text_raw = std::move(fragment);
        comment.sentences.push_back(std::move(s));
      }
    }

    int in_comment = 0;
    for (Sentence& s : comment.sentences) {
      s.comment_index = static_cast<int>(ci);
      s.sentence_index_in_comment = ++in_comment;
      s.sentence_index_in_thread = ++thread_sentence_counter;
      s.id = "c" + std::to_string(ci) + "s" + std::to_string(in_comment);
      s.text_masked = mask_markdown(s.text_raw).text;
      s.tokens = tokenize(s.text_masked, lists);
    }
  }
  thread.segmented = true;
}

// ---------------------------------------------------------------------------
// JSONL serialization
// ---------------------------------------------------------------------------

inline ordered_json thread_to_json(const IssueThread& thread) {
  ordered_json j;
  j["project"] = thread.project;
  j["issue_number"] = thread.issue_number;
  j["title"] = thread.title;
  j["opened_at"] = format_iso8601_utc(thread.opened_at);
  if (thread.timestamps_synthetic) j["timestamps_synthetic"] = true;
  ordered_json comments = ordered_json::array();
  for (const IssueComment& c : thread.comments) {
    ordered_json jc;
    jc["author_login"] = c.author_login;
    jc["author_association"] = to_string(c.author_association);
    jc["created_at"] = format_iso8601_utc(c.created_at);
    jc["body_raw"] = c.body_raw;
    if (thread.segmented) {
      ordered_json sentences = ordered_json::array();
      for (const Sentence& s : c.sentences) {
        ordered_json js;
        js["text"] = s.text_raw;
        ordered_json labels = ordered_json::array();
        for (InfoType l : s.labels) labels.push_back(to_string(l));
        js["labels"] = labels;
        sentences.push_back(std::move(js));
      }
      jc["sentences"] = std::move(sentences);
    }
    comments.push_back(std::move(jc));
  }
  j["comments"] = std::move(comments);
  return j;
}

inline IssueThread thread_from_json(const ordered_json& j) {
  IssueThread thread;
  thread.project = j.at("project").get<std::string>();
  thread.issue_number = j.at("issue_number").get<int>();
  thread.title = j.at("title").get<std::string>();
  thread.opened_at = parse_iso8601_utc(j.at("opened_at").get<std::string>());
  thread.timestamps_synthetic = j.value("timestamps_synthetic", false);
  for (const auto& jc : j.at("comments")) {
    IssueComment c;
    c.author_login = jc.at("author_login").get<std::string>();
    c.author_association = author_association_from_string(jc.at("author_association").get<std::string>());
    c.created_at = parse_iso8601_utc(jc.at("created_at").get<std::string>());
    c.body_raw = jc.at("body_raw").get<std::string>();
    if (jc.contains("sentences")) {
      thread.segmented = true;
      int index = 0;
      for (const auto& js : jc["sentences"]) {
        Sentence s;
        s.text_raw = js.at("text").get<std::string>();
        for (const auto& jl : js.at("labels")) {
          const std::string name = jl.get<std::string>();
          const auto label = info_type_from_string(name);
          if (!label) {
            throw ValidationError("thread " + thread.display_id() + ": unknown label '" + name +
                                  "'");
          }
          s.labels.push_back(*label);
        }
        s.comment_index = static_cast<int>(thread.comments.size());
        s.sentence_index_in_comment = ++index;
        c.sentences.push_back(std::move(s));
      }
    }
    thread.comments.push_back(std::move(c));
  }
  // Renumber thread-wide sentence positions and ids.
  int counter = 0;
  for (std::size_t ci = 0; ci < thread.comments.size(); ++ci) {
    int in_comment = 0;
    for (Sentence& s : thread.comments[ci].sentences) {
      s.comment_index = static_cast<int>(ci);
      s.sentence_index_in_comment = ++in_comment;
      s.sentence_index_in_thread = ++counter;
      s.id = "c" + std::to_string(ci) + "s" + std::to_string(in_comment);
    }
  }
  validate_thread(thread);
  return thread;
}

inline std::vector<IssueThread> load_corpus(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open corpus file: " + path);
  std::vector<IssueThread> threads;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    ordered_json j;
    try {
      j = ordered_json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw ParseError(path + ":" + std::to_string(lineno) + ": " + e.what());
    }
    try {
      threads.push_back(thread_from_json(j));
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(path + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
  return threads;
}

inline void save_corpus(const std::vector<IssueThread>& threads, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ParseError("cannot open file for writing: " + path);
  for (const IssueThread& t : threads) out << thread_to_json(t).dump() << "\n";
}

// First thread of a JSONL file (used by predict/report, which operate on a
// single thread).
inline IssueThread load_thread(const std::string& path) {
  auto threads = load_corpus(path);
  if (threads.empty()) throw ValidationError("no thread found in " + path);
  return std::move(threads.front());
}

// ---------------------------------------------------------------------------
// Labeled CSV import
// ---------------------------------------------------------------------------

namespace detail {

// Minimal RFC-4180 reader: quoted fields, embedded commas/quotes/newlines.
inline std::vector<std::vector<std::string>> read_csv(std::istream& in) {
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> row;
  std::string field;
  bool in_quotes = false;
  bool any = false;
  char c;
  while (in.get(c)) {
    any = true;
    if (in_quotes) {
      if (c == '"') {
        if (in.peek() == '"') {
          field.push_back('"');
          in.get();
        } else {
          in_quotes = false;
        }
      } else {
        field.push_back(c);
      }
      continue;
    }
    switch (c) {
      case '"': in_quotes = true; break;
      case ',':
        row.push_back(std::move(field));
        field.clear();
        break;
      case '\r': break;
      case '\n':
        row.push_back(std::move(field));
        field.clear();
        rows.push_back(std::move(row));
        row.clear();
        break;
      default: field.push_back(c);
    }
  }
  if (any && (!field.empty() || !row.empty())) {
    row.push_back(std::move(field));
    rows.push_back(std::move(row));
  }
  return rows;
}

inline std::vector<InfoType> parse_label_list(const std::string& joined) {
  std::vector<InfoType> labels;
  std::stringstream ss(joined);
  std::string piece;
  while (std::getline(ss, piece, ';')) {
    // trim
    std::size_t b = piece.find_first_not_of(" \t");
    std::size_t e = piece.find_last_not_of(" \t");
    if (b == std::string::npos) continue;
    const std::string name = piece.substr(b, e - b + 1);
    const auto label = info_type_from_string_lenient(name);
    if (!label) throw ValidationError("unknown label name: '" + name + "'");
    labels.push_back(*label);
  }
  return labels;
}

}  // namespace detail

// Reconstructs threads from a sentence-per-row CSV with header columns
// project, issue_number, comment_index, sentence_index_in_comment, text,
// labels (semicolon-separated names) and optional author_login,
// author_association, created_at. Threads missing timestamps get synthetic
// uniform spacing and are flagged.
inline std::vector<IssueThread> import_labeled_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open CSV file: " + path);
  auto rows = detail::read_csv(in);
  if (rows.empty()) throw ParseError(path + ": empty CSV (header required)");

  std::map<std::string, std::size_t> columns;
  for (std::size_t i = 0; i < rows[0].size(); ++i) columns[rows[0][i]] = i;
  for (const char* required : {"project", "issue_number", "comment_index",
                               "sentence_index_in_comment", "text", "labels"}) {
    if (!columns.count(required)) {
      throw ParseError(path + ": missing required column '" + std::string(required) + "'");
    }
  }
  auto cell = [&](const std::vector<std::string>& row, const char* name) -> std::optional<std::string> {
    auto it = columns.find(name);
    if (it == columns.end() || it->second >= row.size()) return std::nullopt;
    return row[it->second];
  };

  struct RawSentence {
    int sentence_index;
    std::string text;
    std::vector<InfoType> labels;
  };
  struct RawComment {
    std::string author_login = "unknown";
    AuthorAssociation association = AuthorAssociation::Other;
    std::optional<std::int64_t> created_at;
    std::vector<RawSentence> sentences;
  };
  // (project, issue) -> comment_index -> comment; maps keep key order stable.
  std::map<std::pair<std::string, int>, std::map<int, RawComment>> grouped;
  std::vector<std::pair<std::string, int>> thread_order;

  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& row = rows[r];
    if (row.size() == 1 && row[0].empty()) continue;
    const std::string where = path + ":" + std::to_string(r + 1);
    try {
      const std::string project = *cell(row, "project");
      const int issue = std::stoi(*cell(row, "issue_number"));
      const int comment_index = std::stoi(*cell(row, "comment_index"));
      const int sentence_index = std::stoi(*cell(row, "sentence_index_in_comment"));
      const std::pair<std::string, int> key{project, issue};
      if (!grouped.count(key)) thread_order.push_back(key);
      RawComment& comment = grouped[key][comment_index];
      if (auto login = cell(row, "author_login"); login && !login->empty()) {
        comment.author_login = *login;
      }
      if (auto assoc = cell(row, "author_association"); assoc && !assoc->empty()) {
        comment.association = author_association_from_string(*assoc);
      }
      if (auto ts = cell(row, "created_at"); ts && !ts->empty()) {
        comment.created_at = parse_iso8601_utc(*ts);
      }
      comment.sentences.push_back(
          {sentence_index, *cell(row, "text"), detail::parse_label_list(*cell(row, "labels"))});
    } catch (const std::invalid_argument&) {
      throw ParseError(where + ": malformed numeric field");
    } catch (const ValidationError& e) {
      throw ValidationError(where + ": " + e.what());
    }
  }

  std::vector<IssueThread> threads;
  for (const auto& key : thread_order) {
    const auto& comment_map = grouped.at(key);
    IssueThread thread;
    thread.project = key.first;
    thread.issue_number = key.second;
    thread.segmented = true;
    bool all_timestamps = true;
    for (const auto& [index, raw] : comment_map) {
      if (!raw.created_at) all_timestamps = false;
    }
    std::int64_t synthetic_t = 0;
    for (const auto& [index, raw] : comment_map) {
      IssueComment comment;
      comment.author_login = raw.author_login;
      comment.author_association = raw.association;
      if (all_timestamps) {
        comment.created_at = *raw.created_at;
      } else {
        comment.created_at = synthetic_t;  // uniform hourly spacing
        synthetic_t += 3600;
      }
      std::vector<RawSentence> ordered = raw.sentences;
      std::sort(ordered.begin(), ordered.end(),
                [](const RawSentence& a, const RawSentence& b) {
                  return a.sentence_index < b.sentence_index;
                });
      std::string body;
      for (RawSentence& s : ordered) {
        Sentence sentence;
        sentence.text_raw = s.text;
        sentence.labels = std::move(s.labels);
        comment.sentences.push_back(std::move(sentence));
        if (!body.empty()) body += " ";
        body += s.text;
      }
      comment.body_raw = std::move(body);
      thread.comments.push_back(std::move(comment));
    }
    thread.timestamps_synthetic = !all_timestamps;
    thread.opened_at = thread.comments.front().created_at;
    // Positions and ids, as in thread_from_json.
    int counter = 0;
    for (std::size_t ci = 0; ci < thread.comments.size(); ++ci) {
      int in_comment = 0;
      for (Sentence& s : thread.comments[ci].sentences) {
        s.comment_index = static_cast<int>(ci);
        s.sentence_index_in_comment = ++in_comment;
        s.sentence_index_in_thread = ++counter;
        s.id = "c" + std::to_string(ci) + "s" + std::to_string(in_comment);
      }
    }
    validate_thread(thread);
    threads.push_back(std::move(thread));
  }
  return threads;
}

// ---------------------------------------------------------------------------
// Training dataset
// ---------------------------------------------------------------------------

struct DatasetItem {
  std::size_t thread_index;
  int comment_index;               // 0-based
  int sentence_index_in_comment;   // 1-based
  InfoType label;
};

struct Dataset {
  const std::vector<IssueThread>* threads = nullptr;
  std::vector<DatasetItem> items;
  std::map<InfoType, std::size_t> class_counts;

  const Sentence& sentence(const DatasetItem& item) const {
    return (*threads)[item.thread_index]
        .comments[static_cast<std::size_t>(item.comment_index)]
        .sentences[static_cast<std::size_t>(item.sentence_index_in_comment - 1)];
  }

  const IssueThread& thread(const DatasetItem& item) const {
    return (*threads)[item.thread_index];
  }
};

// Keeps exactly the sentences usable for supervised training: annotated with
// a single label that is not excluded. Multi-labeled and unlabeled sentences
// are dropped (they stay in the corpus files).
inline Dataset filter_for_training(const std::vector<IssueThread>& threads,
                                   const std::set<InfoType>& excluded = default_excluded_labels()) {
  Dataset ds;
  ds.threads = &threads;
  for (std::size_t ti = 0; ti < threads.size(); ++ti) {
    const IssueThread& thread = threads[ti];
    for (std::size_t ci = 0; ci < thread.comments.size(); ++ci) {
      const IssueComment& comment = thread.comments[ci];
      for (const Sentence& s : comment.sentences) {
        if (s.labels.size() != 1) continue;
        const InfoType label = s.labels.front();
        if (excluded.count(label)) continue;
        ds.items.push_back({ti, static_cast<int>(ci), s.sentence_index_in_comment, label});
        ++ds.class_counts[label];
      }
    }
  }
  if (ds.items.empty()) {
    throw ValidationError("no trainable sentences after filtering (corpus unannotated?)");
  }
  return ds;
}

struct LabelStats {
  std::size_t count = 0;
  double fraction = 0.0;
};

inline std::map<InfoType, LabelStats> dataset_stats(const Dataset& ds) {
  if (ds.items.empty()) throw ValidationError("dataset_stats: empty dataset");
  std::map<InfoType, LabelStats> stats;
  for (const auto& [label, count] : ds.class_counts) {
    stats[label] = {count, static_cast<double>(count) / static_cast<double>(ds.items.size())};
  }
  return stats;
}

}  // namespace issuetypes
