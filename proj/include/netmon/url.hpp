#pragma once

#include <optional>
#include <string>
#include <string_view>

namespace netmon {

/// Components of an absolute http(s) URL. Path and query keep their bytes.
struct ParsedUrl {
  std::string scheme;
  std::string userinfo;
  std::string host;
  std::optional<unsigned> port;
  std::string path;
  std::optional<std::string> query;
  std::optional<std::string> fragment;
};

/// Throws UrlParseError unless `url` is "scheme://host[:port][/path][?query][#fragment]"
/// with an http or https scheme and a non-empty host.
ParsedUrl parse_url(std::string_view url);

/// Lowercase scheme and host, drop the scheme's default port and the fragment,
/// and drop a path that is exactly "/". Path and query are untouched.
std::string canonicalize(std::string_view url);

/// Lowercased host of an absolute URL.
std::string url_host(std::string_view url);

/// Resolves a Location header value against the URL that produced it.
std::string resolve_reference(std::string_view base, std::string_view reference);

}  // namespace netmon
