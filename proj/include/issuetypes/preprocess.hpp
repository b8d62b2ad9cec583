#pragma once

// Text cleanup for issue comments: markdown masking, sentence segmentation
// and tokenization. All three stages are pure functions; the word lists they
// consult (abbreviations, contractions) ship with built-in defaults and can
// be reloaded from plain text files.

#include <algorithm>
#include <cctype>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "issuetypes/errors.hpp"

namespace issuetypes {

namespace mask_token {
inline constexpr std::string_view kCode = "CODE";
inline constexpr std::string_view kQuote = "QUOTE";
inline constexpr std::string_view kUrl = "URL";
inline constexpr std::string_view kScreenName = "SCREEN_NAME";
}  // namespace mask_token

inline bool is_mask_token(std::string_view word) {
  return word == mask_token::kCode || word == mask_token::kQuote || word == mask_token::kUrl ||
         word == mask_token::kScreenName;
}

// ---------------------------------------------------------------------------
// Word lists
// ---------------------------------------------------------------------------

struct WordLists {
  // Abbreviations that end with '.' and must not terminate a sentence.
  std::set<std::string> abbreviations;
  // Contraction -> space-separated expansion, keyed lowercase.
  std::map<std::string, std::string> contractions;

  static const WordLists& defaults();

  // One entry per line, blank lines and '#' comments ignored.
  void load_abbreviations(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open abbreviation list: " + path);
    abbreviations.clear();
    std::string line;
    while (std::getline(in, line)) {
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line.empty() || line[0] == '#') continue;
      abbreviations.insert(line);
    }
  }

  // One entry per line as "contraction<TAB>expansion".
  void load_contractions(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open contraction table: " + path);
    contractions.clear();
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line.empty() || line[0] == '#') continue;
      const auto tab = line.find('\t');
      if (tab == std::string::npos) {
        throw ParseError("contraction table line " + std::to_string(lineno) +
                         ": expected <contraction>\\t<expansion>");
      }
      contractions[line.substr(0, tab)] = line.substr(tab + 1);
    }
  }
};

inline const WordLists& WordLists::defaults() {
  static const WordLists lists = [] {
    WordLists w;
    w.abbreviations = {
        "e.g.", "i.e.",  "etc.",  "vs.",  "cf.",   "al.",   "fig.",  "eq.",
        "sec.", "chap.", "ver.",  "ca.",  "resp.", "incl.", "misc.", "approx.",
        "mr.",  "mrs.",  "ms.",   "dr.",  "prof.", "st.",   "dept.", "repr.",
    };
    const char* pairs[][2] = {
        {"i'm", "i am"},           {"i've", "i have"},       {"i'll", "i will"},
        {"i'd", "i would"},        {"you're", "you are"},    {"you've", "you have"},
        {"you'll", "you will"},    {"you'd", "you would"},   {"he's", "he is"},
        {"she's", "she is"},       {"it's", "it is"},        {"we're", "we are"},
        {"we've", "we have"},      {"we'll", "we will"},     {"we'd", "we would"},
        {"they're", "they are"},   {"they've", "they have"}, {"they'll", "they will"},
        {"they'd", "they would"},  {"that's", "that is"},    {"there's", "there is"},
        {"here's", "here is"},     {"what's", "what is"},    {"who's", "who is"},
        {"let's", "let us"},       {"don't", "do not"},      {"doesn't", "does not"},
        {"didn't", "did not"},     {"can't", "can not"},     {"couldn't", "could not"},
        {"won't", "will not"},     {"wouldn't", "would not"},{"shouldn't", "should not"},
        {"isn't", "is not"},       {"aren't", "are not"},    {"wasn't", "was not"},
        {"weren't", "were not"},   {"hasn't", "has not"},    {"haven't", "have not"},
        {"hadn't", "had not"},     {"ain't", "is not"},
    };
    for (const auto& p : pairs) w.contractions[p[0]] = p[1];
    return w;
  }();
  return lists;
}

// ---------------------------------------------------------------------------
// Markdown masking
// ---------------------------------------------------------------------------

struct MaskResult {
  std::string text;
  bool had_code = false;
  bool unterminated_fence = false;
};

namespace detail {

inline bool is_username_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '-';
}

// GitHub usernames: alphanumerics and hyphens, 1-39 chars, no leading or
// trailing hyphen. Returns the match length after '@', or 0.
inline std::size_t match_username(std::string_view s, std::size_t at) {
  std::size_t start = at + 1;
  std::size_t end = start;
  while (end < s.size() && end - start < 39 && is_username_char(s[end])) ++end;
  if (end == start) return 0;
  if (end < s.size() && is_username_char(s[end])) return 0;  // longer than 39
  if (s[start] == '-' || s[end - 1] == '-') return 0;
  return end - start;
}

inline bool is_word_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
}

}  // namespace detail

// Replaces GitHub markdown constructs with reserved tokens: fenced and inline
// code spans -> CODE, quoted lines -> QUOTE (contiguous quoted lines collapse
// to one), http(s) URLs -> URL, @mentions -> SCREEN_NAME. Idempotent.
inline MaskResult mask_markdown(const std::string& body_raw) {
  MaskResult result;
  const std::string& in = body_raw;

  // Pass 1: fenced blocks ``` ... ``` (anywhere, may span lines).
  std::string pass1;
  pass1.reserve(in.size());
  std::size_t pos = 0;
  while (pos < in.size()) {
    const std::size_t fence = in.find("```", pos);
    if (fence == std::string::npos) {
      pass1.append(in, pos, in.size() - pos);
      break;
    }
    pass1.append(in, pos, fence - pos);
    const std::size_t close = in.find("```", fence + 3);
    pass1.append(mask_token::kCode);
    result.had_code = true;
    if (close == std::string::npos) {
      result.unterminated_fence = true;
      pos = in.size();
    } else {
      pos = close + 3;
    }
  }

  // Pass 2: inline spans `...` within a single line.
  std::string pass2;
  pass2.reserve(pass1.size());
  pos = 0;
  while (pos < pass1.size()) {
    if (pass1[pos] == '`') {
      const std::size_t line_end = pass1.find('\n', pos + 1);
      const std::size_t close = pass1.find('`', pos + 1);
      if (close != std::string::npos && (line_end == std::string::npos || close < line_end)) {
        pass2.append(mask_token::kCode);
        result.had_code = true;
        pos = close + 1;
        continue;
      }
    }
    pass2.push_back(pass1[pos]);
    ++pos;
  }

  // Pass 3: quoted lines. A run of contiguous "> ..." lines becomes one QUOTE.
  std::string pass3;
  pass3.reserve(pass2.size());
  {
    std::istringstream lines(pass2);
    std::string line;
    bool first = true;
    bool prev_was_quote = false;
    // istringstream::getline drops a trailing newline; remember it.
    const bool trailing_newline = !pass2.empty() && pass2.back() == '\n';
    while (std::getline(lines, line)) {
      std::size_t i = 0;
      while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
      const bool is_quote = i < line.size() && line[i] == '>';
      if (is_quote && prev_was_quote) continue;  // collapse
      if (!first) pass3.push_back('\n');
      pass3.append(is_quote ? std::string(mask_token::kQuote) : line);
      first = false;
      prev_was_quote = is_quote;
    }
    if (trailing_newline) pass3.push_back('\n');
  }

  // Pass 4: URLs. Trailing sentence punctuation stays outside the token.
  std::string pass4;
  pass4.reserve(pass3.size());
  pos = 0;
  while (pos < pass3.size()) {
    bool matched = false;
    if (pass3[pos] == 'h' &&
        (pass3.compare(pos, 7, "http://") == 0 || pass3.compare(pos, 8, "https://") == 0)) {
      std::size_t end = pos;
      while (end < pass3.size() && !std::isspace(static_cast<unsigned char>(pass3[end]))) ++end;
      while (end > pos && std::string_view(".,;:!?)]}>'\"").find(pass3[end - 1]) !=
                              std::string_view::npos) {
        --end;
      }
      if (end > pos + 7) {
        pass4.append(mask_token::kUrl);
        pos = end;
        matched = true;
      }
    }
    if (!matched) {
      pass4.push_back(pass3[pos]);
      ++pos;
    }
  }

  // Pass 5: @mentions.
  std::string pass5;
  pass5.reserve(pass4.size());
  pos = 0;
  while (pos < pass4.size()) {
    if (pass4[pos] == '@' && (pos == 0 || !detail::is_word_char(pass4[pos - 1]))) {
      const std::size_t len = detail::match_username(pass4, pos);
      if (len > 0) {
        pass5.append(mask_token::kScreenName);
        pos += 1 + len;
        continue;
      }
    }
    pass5.push_back(pass4[pos]);
    ++pos;
  }

  result.text = std::move(pass5);
  return result;
}

// ---------------------------------------------------------------------------
// Sentence segmentation
// ---------------------------------------------------------------------------

namespace detail {

// The word ending at `end` (exclusive), stripped of leading punctuation and
// lowercased, e.g. "(e.g." -> "e.g.".
inline std::string trailing_word_lower(std::string_view line, std::size_t end) {
  std::size_t start = end;
  while (start > 0 && !std::isspace(static_cast<unsigned char>(line[start - 1]))) --start;
  while (start < end && !std::isalnum(static_cast<unsigned char>(line[start]))) ++start;
  std::string word;
  word.reserve(end - start);
  for (std::size_t i = start; i < end; ++i) {
    word.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(line[i]))));
  }
  return word;
}

inline std::string trim_copy(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

}  // namespace detail

// Splits masked text into sentences. Terminators are runs of '.', '!' or '?'
// followed by whitespace and a capital letter, or at end of line. Periods
// inside decimals/version strings never match (no whitespace follows), and a
// terminator directly after a listed abbreviation is ignored. Newlines are
// hard boundaries.
inline std::vector<std::string> split_sentences(const std::string& masked,
                                                const WordLists& lists = WordLists::defaults()) {
  std::vector<std::string> sentences;
  std::istringstream stream(masked);
  std::string line;
  while (std::getline(stream, line)) {
    std::size_t start = 0;
    std::size_t i = 0;
    while (i < line.size()) {
      const char c = line[i];
      if (c != '.' && c != '!' && c != '?') {
        ++i;
        continue;
      }
      std::size_t run_end = i;
      while (run_end < line.size() &&
             (line[run_end] == '.' || line[run_end] == '!' || line[run_end] == '?')) {
        ++run_end;
      }
      // Candidate boundary only when followed by whitespace then a capital,
      // or at end of line.
      bool boundary = false;
      if (run_end == line.size()) {
        boundary = true;
      } else if (std::isspace(static_cast<unsigned char>(line[run_end]))) {
        std::size_t next = run_end;
        while (next < line.size() && std::isspace(static_cast<unsigned char>(line[next]))) ++next;
        boundary = next < line.size() && std::isupper(static_cast<unsigned char>(line[next]));
      }
      if (boundary && line[run_end - 1] == '.') {
        const std::string word = detail::trailing_word_lower(line, run_end);
        if (lists.abbreviations.count(word)) boundary = false;
      }
      if (boundary) {
        std::string sentence = detail::trim_copy(
            std::string_view(line).substr(start, run_end - start));
        if (!sentence.empty()) sentences.push_back(std::move(sentence));
        start = run_end;
      }
      i = run_end;
    }
    if (start < line.size()) {
      std::string rest = detail::trim_copy(std::string_view(line).substr(start));
      if (!rest.empty()) sentences.push_back(std::move(rest));
    }
  }
  return sentences;
}

// ---------------------------------------------------------------------------
// Tokenization
// ---------------------------------------------------------------------------

namespace detail {

inline bool has_vowel(std::string_view s) {
  for (char c : s) {
    if (c == 'a' || c == 'e' || c == 'i' || c == 'o' || c == 'u' || c == 'y') return true;
  }
  return false;
}

inline bool ends_with(std::string_view s, std::string_view suffix) {
  return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

// Irregular forms plus a handful of words the suffix rules would mangle.
inline const std::map<std::string, std::string>& irregular_lemmas() {
  static const std::map<std::string, std::string> table = {
      {"is", "be"},        {"are", "be"},       {"was", "be"},       {"were", "be"},
      {"been", "be"},      {"being", "be"},     {"am", "be"},
      {"has", "have"},     {"had", "have"},     {"having", "have"},
      {"does", "do"},      {"did", "do"},       {"done", "do"},      {"doing", "do"},
      {"goes", "go"},      {"went", "go"},      {"gone", "go"},      {"going", "go"},
      {"made", "make"},    {"making", "make"},
      {"said", "say"},     {"saying", "say"},
      {"got", "get"},      {"gotten", "get"},   {"getting", "get"},
      {"ran", "run"},      {"running", "run"},
      {"came", "come"},    {"coming", "come"},
      {"took", "take"},    {"taken", "take"},   {"taking", "take"},
      {"saw", "see"},      {"seen", "see"},
      {"found", "find"},   {"thought", "think"},
      {"wrote", "write"},  {"written", "write"},
      {"broke", "break"},  {"broken", "break"},
      {"built", "build"},  {"sent", "send"},    {"left", "leave"},   {"kept", "keep"},
      {"knew", "know"},    {"known", "know"},
      {"gave", "give"},    {"given", "give"},
      {"told", "tell"},    {"became", "become"},
      {"began", "begin"},  {"begun", "begin"},  {"felt", "feel"},
      {"used", "use"},     {"using", "use"},    {"uses", "use"},
      {"added", "add"},    {"threw", "throw"},  {"thrown", "throw"},
      {"men", "man"},      {"women", "woman"},  {"children", "child"},
      // Words that merely look inflected.
      {"nothing", "nothing"},       {"something", "something"},
      {"anything", "anything"},     {"everything", "everything"},
      {"during", "during"},         {"morning", "morning"},
      {"evening", "evening"},       {"spring", "spring"},
  };
  return table;
}

// Suffix-rule lemmatizer for lowercase alphabetic tokens: plural -s/-es/-ies,
// progressive -ing, past -ed, with the irregular lookup above. Rules are
// intentionally coarse; the TF-IDF consumer only needs stable merging of
// inflected forms.
inline std::string lemmatize(const std::string& word) {
  const auto& irregular = irregular_lemmas();
  if (auto it = irregular.find(word); it != irregular.end()) return it->second;

  auto undouble = [](std::string& s) {
    static constexpr std::string_view doubled = "bgmnprt";
    if (s.size() >= 2 && s[s.size() - 1] == s[s.size() - 2] &&
        doubled.find(s.back()) != std::string_view::npos) {
      s.pop_back();
    }
  };
  auto restore_e = [](std::string& s) {
    static constexpr std::string_view needs_e = "cgsuvz";
    if (!s.empty() && needs_e.find(s.back()) != std::string_view::npos && !ends_with(s, "ss")) {
      s.push_back('e');
    }
  };

  if (ends_with(word, "ies") && word.size() > 4) {
    return word.substr(0, word.size() - 3) + "y";
  }
  if (ends_with(word, "ied") && word.size() > 4) {
    return word.substr(0, word.size() - 3) + "y";
  }
  if (ends_with(word, "sses")) {
    return word.substr(0, word.size() - 2);
  }
  if (ends_with(word, "es")) {
    std::string stem = word.substr(0, word.size() - 2);
    if (ends_with(stem, "x") || ends_with(stem, "z") || ends_with(stem, "ch") ||
        ends_with(stem, "sh") || ends_with(stem, "ss")) {
      return stem;
    }
  }
  if (ends_with(word, "s") && !ends_with(word, "ss") && !ends_with(word, "us") &&
      !ends_with(word, "is") && word.size() > 3) {
    return word.substr(0, word.size() - 1);
  }
  if (ends_with(word, "ing") && word.size() >= 6) {
    std::string stem = word.substr(0, word.size() - 3);
    if (has_vowel(stem)) {
      const std::size_t before = stem.size();
      undouble(stem);
      if (stem.size() == before) restore_e(stem);
      return stem;
    }
  }
  if (ends_with(word, "ed") && word.size() >= 5 && !ends_with(word, "eed")) {
    std::string stem = word.substr(0, word.size() - 2);
    if (has_vowel(stem)) {
      const std::size_t before = stem.size();
      undouble(stem);
      if (stem.size() == before) restore_e(stem);
      return stem;
    }
  }
  return word;
}

inline bool is_token_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '.' || c == '-' || c == '\'';
}

inline bool all_alpha(std::string_view s) {
  for (char c : s) {
    if (!std::isalpha(static_cast<unsigned char>(c))) return false;
  }
  return true;
}

}  // namespace detail

// Tokenizes one sentence: whitespace split, mask tokens passed through
// verbatim, everything else lowercased, contractions expanded, punctuation
// stripped, suffix-rule lemmatization. Stop words are kept.
inline std::vector<std::string> tokenize(const std::string& sentence,
                                         const WordLists& lists = WordLists::defaults()) {
  std::vector<std::string> tokens;
  std::istringstream stream(sentence);
  std::string word;

  auto emit_piece = [&tokens](std::string piece) {
    // Trim '.', '-', '\'' from the ends; internal ones stay ("0.101").
    std::size_t b = 0, e = piece.size();
    while (b < e && !std::isalnum(static_cast<unsigned char>(piece[b]))) ++b;
    while (e > b && !std::isalnum(static_cast<unsigned char>(piece[e - 1]))) --e;
    if (b >= e) return;
    piece = piece.substr(b, e - b);
    if (detail::ends_with(piece, "'s")) piece.resize(piece.size() - 2);  // possessive
    piece.erase(std::remove(piece.begin(), piece.end(), '\''), piece.end());
    if (piece.empty()) return;
    if (detail::all_alpha(piece)) piece = detail::lemmatize(piece);
    tokens.push_back(std::move(piece));
  };

  auto process_plain = [&](const std::string& w) {
    std::string lower;
    lower.reserve(w.size());
    for (char c : w) lower.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));

    // Contraction lookup happens before punctuation removal, on the word
    // trimmed of surrounding punctuation (apostrophes inside stay).
    std::size_t b = 0, e = lower.size();
    while (b < e && !std::isalnum(static_cast<unsigned char>(lower[b]))) ++b;
    while (e > b && !std::isalnum(static_cast<unsigned char>(lower[e - 1]))) --e;
    const std::string core = lower.substr(b, e - b);
    if (auto it = lists.contractions.find(core); it != lists.contractions.end()) {
      std::istringstream expansion(it->second);
      std::string part;
      while (expansion >> part) emit_piece(part);
      return;
    }

    // Split at punctuation boundaries into token-char runs.
    std::size_t i = 0;
    while (i < lower.size()) {
      while (i < lower.size() && !detail::is_token_char(lower[i])) ++i;
      std::size_t j = i;
      while (j < lower.size() && detail::is_token_char(lower[j])) ++j;
      if (j > i) emit_piece(lower.substr(i, j - i));
      i = j;
    }
  };

  while (stream >> word) {
    // Mask tokens may carry adjacent punctuation ("CODE,").
    std::size_t b = 0, e = word.size();
    while (b < e && !std::isalnum(static_cast<unsigned char>(word[b]))) ++b;
    while (e > b && !std::isalnum(static_cast<unsigned char>(word[e - 1]))) --e;
    if (is_mask_token(std::string_view(word).substr(b, e - b))) {
      tokens.emplace_back(word.substr(b, e - b));
      continue;
    }
    process_plain(word);
  }
  return tokens;
}

}  // namespace issuetypes
