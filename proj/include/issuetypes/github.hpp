#pragma once

// GitHub REST v3 client for pulling one issue thread: the issue itself plus
// its comments, paginated at 100 per page. Only what the corpus needs is
// mapped; bodies are stored raw and sentences are filled later by
// preprocessing.

#include <cstdlib>
#include <optional>
#include <string>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "issuetypes/corpus.hpp"
#include "issuetypes/errors.hpp"

namespace issuetypes {

struct GithubOptions {
  std::string api_base = "https://api.github.com";
  std::optional<std::string> auth_token;
  int per_page = 100;
};

namespace detail {

inline nlohmann::json github_get(httplib::Client& client, const std::string& path,
                                 const GithubOptions& opts) {
  httplib::Headers headers = {
      {"Accept", "application/vnd.github+json"},
      {"User-Agent", "issuetypes-cli"},
  };
  if (opts.auth_token) headers.emplace("Authorization", "Bearer " + *opts.auth_token);
  auto res = client.Get(path, headers);
  if (!res) {
    throw HttpError("GET " + opts.api_base + path + ": connection failed", 0);
  }
  if (res->status == 404) {
    throw NotFoundError("GET " + path + ": not found (404)");
  }
  if (res->status == 403 && res->get_header_value("X-RateLimit-Remaining") == "0") {
    std::int64_t reset = 0;
    if (res->has_header("X-RateLimit-Reset")) {
      reset = std::strtoll(res->get_header_value("X-RateLimit-Reset").c_str(), nullptr, 10);
    }
    throw RateLimitError("GitHub rate limit exhausted (resets at epoch " +
                             std::to_string(reset) + ")",
                         reset);
  }
  if (res->status < 200 || res->status >= 300) {
    throw HttpError("GET " + path + ": HTTP " + std::to_string(res->status), res->status);
  }
  try {
    return nlohmann::json::parse(res->body);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError("GET " + path + ": bad JSON: " + e.what());
  }
}

inline IssueComment comment_from_github(const nlohmann::json& j) {
  IssueComment c;
  if (j.contains("user") && j["user"].is_object()) {
    c.author_login = j["user"].value("login", std::string("ghost"));
  } else {
    c.author_login = "ghost";
  }
  c.author_association = author_association_from_github(j.value("author_association", "NONE"));
  c.created_at = parse_iso8601_utc(j.value("created_at", "1970-01-01T00:00:00Z"));
  c.body_raw = j.contains("body") && j["body"].is_string() ? j["body"].get<std::string>() : "";
  return c;
}

}  // namespace detail

// Fetches /repos/{owner}/{repo}/issues/{n} and its comments. The returned
// thread has the original post as comment 0 and is not yet segmented.
inline IssueThread fetch_thread(const std::string& owner, const std::string& repo,
                                int issue_number, const GithubOptions& opts = {}) {
  httplib::Client client(opts.api_base);
  client.set_follow_location(true);
  client.set_connection_timeout(30);
  client.set_read_timeout(60);

  const std::string issue_path =
      "/repos/" + owner + "/" + repo + "/issues/" + std::to_string(issue_number);
  const nlohmann::json issue = detail::github_get(client, issue_path, opts);

  IssueThread thread;
  thread.project = owner + "/" + repo;
  thread.issue_number = issue_number;
  thread.title = issue.value("title", std::string());
  thread.opened_at = parse_iso8601_utc(issue.value("created_at", "1970-01-01T00:00:00Z"));
  thread.comments.push_back(detail::comment_from_github(issue));

  for (int page = 1;; ++page) {
    const std::string comments_path = issue_path + "/comments?per_page=" +
                                      std::to_string(opts.per_page) +
                                      "&page=" + std::to_string(page);
    const nlohmann::json comments = detail::github_get(client, comments_path, opts);
    if (!comments.is_array()) {
      throw ParseError("GET " + comments_path + ": expected a JSON array");
    }
    for (const auto& jc : comments) thread.comments.push_back(detail::comment_from_github(jc));
    if (comments.size() < static_cast<std::size_t>(opts.per_page)) break;
  }

  std::stable_sort(thread.comments.begin() + 1, thread.comments.end(),
                   [](const IssueComment& a, const IssueComment& b) {
                     return a.created_at < b.created_at;
                   });
  // The post itself can carry a marginally later timestamp than its issue
  // record; clamp so thread invariants hold.
  if (!thread.comments.empty() && thread.comments.front().created_at < thread.opened_at) {
    thread.opened_at = thread.comments.front().created_at;
  }
  validate_thread(thread);
  return thread;
}

inline std::optional<std::string> token_from_env(const std::string& env_var = "GITHUB_TOKEN") {
  const char* value = std::getenv(env_var.c_str());
  if (value && *value) return std::string(value);
  return std::nullopt;
}

}  // namespace issuetypes
