#include "netmon/http_fetcher.hpp"

#include "httplib.h"
#include "netmon/errors.hpp"
#include "netmon/url.hpp"

namespace netmon {

HttpRedirectOracle::HttpRedirectOracle(std::chrono::milliseconds timeout, std::string user_agent)
    : timeout_(timeout), user_agent_(std::move(user_agent)) {}

namespace {

struct HeaderAnswer {
  bool ok = false;
  int status = 0;
  std::string location;
  std::string error;
};

bool is_redirect(int status) {
  return status == 301 || status == 302 || status == 303 || status == 307 || status == 308;
}

}  // namespace

FetchAnswer HttpRedirectOracle::fetch(const std::string& url) const {
  ParsedUrl parts;
  try {
    parts = parse_url(url);
  } catch (const UrlParseError& e) {
    return FetchFailure{e.what()};
  }
  std::string origin = parts.scheme + "://" + parts.host;
  if (parts.port) origin += ":" + std::to_string(*parts.port);
  std::string target = parts.path.empty() ? "/" : parts.path;
  if (parts.query) target += "?" + *parts.query;

  httplib::Client client(origin);
  if (!client.is_valid()) return FetchFailure{"cannot create client for " + origin};
  client.set_follow_location(false);
  client.set_connection_timeout(timeout_);
  client.set_read_timeout(timeout_);
  client.set_write_timeout(timeout_);
  const httplib::Headers headers{{"User-Agent", user_agent_}};

  HeaderAnswer head;
  if (auto res = client.Head(target, headers)) {
    head.ok = true;
    head.status = res->status;
    head.location = res->get_header_value("Location");
  } else {
    head.error = httplib::to_string(res.error());
  }

  const bool retry_with_get = !head.ok || head.status == 405 || head.status == 501 || head.status == 403;
  HeaderAnswer answer = head;
  if (retry_with_get) {
    HeaderAnswer get;
    auto res = client.Get(
        target, headers,
        [&](const httplib::Response& response) {
          get.ok = true;
          get.status = response.status;
          get.location = response.get_header_value("Location");
          return false;
        },
        [](const char*, size_t) { return false; });
    if (!get.ok && !res) get.error = httplib::to_string(res.error());
    if (get.ok || !head.ok) answer = get;
  }

  if (!answer.ok) return FetchFailure{answer.error.empty() ? "request failed" : answer.error};
  if (is_redirect(answer.status)) {
    if (answer.location.empty()) return FetchFailure{"redirect without Location header"};
    return Redirect{answer.location};
  }
  return Terminal{};
}

}  // namespace netmon
