#pragma once

// The 16 information types assignable to a sentence in an issue discussion
// thread. Ordinals and names are stable; serialized corpora and models refer
// to types by name.

#include <array>
#include <cctype>
#include <cstddef>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace issuetypes {

enum class InfoType : int {
  ExpectedBehaviour = 0,
  Motivation = 1,
  ObservedBugBehaviour = 2,
  BugReproduction = 3,
  InvestigationAndExploration = 4,
  SolutionDiscussion = 5,
  ContributionAndCommitment = 6,
  TaskProgress = 7,
  Testing = 8,
  FuturePlan = 9,
  PotentialNewIssuesAndRequests = 10,
  SolutionUsage = 11,
  Workarounds = 12,
  IssueContentManagement = 13,
  ActionOnIssue = 14,
  SocialConversation = 15,
};

inline constexpr std::size_t kInfoTypeCount = 16;

namespace detail {
inline constexpr std::array<std::string_view, kInfoTypeCount> kInfoTypeNames = {
    "ExpectedBehaviour",
    "Motivation",
    "ObservedBugBehaviour",
    "BugReproduction",
    "InvestigationAndExploration",
    "SolutionDiscussion",
    "ContributionAndCommitment",
    "TaskProgress",
    "Testing",
    "FuturePlan",
    "PotentialNewIssuesAndRequests",
    "SolutionUsage",
    "Workarounds",
    "IssueContentManagement",
    "ActionOnIssue",
    "SocialConversation",
};

// Human-readable names as they appear in reports.
inline constexpr std::array<std::string_view, kInfoTypeCount> kInfoTypeDisplayNames = {
    "Expected Behaviour",
    "Motivation",
    "Observed Bug Behaviour",
    "Bug Reproduction",
    "Investigation and Exploration",
    "Solution Discussion",
    "Contribution and Commitment",
    "Task Progress",
    "Testing",
    "Future Plan",
    "Potential New Issues and Requests",
    "Solution Usage",
    "Workarounds",
    "Issue Content Management",
    "Action on Issue",
    "Social Conversation",
};
}  // namespace detail

inline int ordinal(InfoType t) { return static_cast<int>(t); }

inline std::string to_string(InfoType t) {
  return std::string(detail::kInfoTypeNames[static_cast<std::size_t>(t)]);
}

inline std::string display_name(InfoType t) {
  return std::string(detail::kInfoTypeDisplayNames[static_cast<std::size_t>(t)]);
}

inline std::optional<InfoType> info_type_from_string(std::string_view name) {
  for (std::size_t i = 0; i < kInfoTypeCount; ++i) {
    if (detail::kInfoTypeNames[i] == name) return static_cast<InfoType>(i);
  }
  return std::nullopt;
}

// Accepts canonical names plus common spelling variants found in exported
// annotation files ("Work-Arounds", "Social conversation", ...). Matching
// ignores case and any spaces, hyphens or underscores.
inline std::optional<InfoType> info_type_from_string_lenient(std::string_view name) {
  auto squash = [](std::string_view s) {
    std::string out;
    out.reserve(s.size());
    for (char c : s) {
      if (c == ' ' || c == '-' || c == '_' || c == '\t') continue;
      out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    }
    return out;
  };
  const std::string key = squash(name);
  for (std::size_t i = 0; i < kInfoTypeCount; ++i) {
    if (squash(detail::kInfoTypeNames[i]) == key) return static_cast<InfoType>(i);
  }
  return std::nullopt;
}

inline std::vector<InfoType> all_info_types() {
  std::vector<InfoType> out;
  out.reserve(kInfoTypeCount);
  for (std::size_t i = 0; i < kInfoTypeCount; ++i) out.push_back(static_cast<InfoType>(i));
  return out;
}

// Labels too rare in the corpus to train on. Sentences carrying one of these
// are dropped by the training filter.
inline const std::set<InfoType>& default_excluded_labels() {
  static const std::set<InfoType> excluded = {
      InfoType::FuturePlan, InfoType::IssueContentManagement, InfoType::Testing};
  return excluded;
}

// The 13 label values used for classification.
inline std::vector<InfoType> training_info_types() {
  std::vector<InfoType> out;
  for (InfoType t : all_info_types()) {
    if (!default_excluded_labels().count(t)) out.push_back(t);
  }
  return out;
}

}  // namespace issuetypes
