#include "netmon/url.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>

#include "netmon/errors.hpp"

namespace netmon {

namespace {

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

bool valid_host_char(char c) {
  const auto u = static_cast<unsigned char>(c);
  return std::isalnum(u) || c == '-' || c == '.' || c == '_' || c == '~' || c == '%' || u >= 0x80 ||
         c == '[' || c == ']' || c == ':';
}

unsigned default_port(std::string_view scheme) { return scheme == "https" ? 443u : 80u; }

}  // namespace

ParsedUrl parse_url(std::string_view url) {
  const auto sep = url.find("://");
  if (sep == std::string_view::npos) throw UrlParseError("missing scheme in '" + std::string(url) + "'");
  ParsedUrl p;
  p.scheme = lower(url.substr(0, sep));
  if (p.scheme != "http" && p.scheme != "https")
    throw UrlParseError("unsupported scheme in '" + std::string(url) + "'");

  std::string_view rest = url.substr(sep + 3);
  const auto authority_end = rest.find_first_of("/?#");
  std::string_view authority = rest.substr(0, authority_end);
  rest = authority_end == std::string_view::npos ? std::string_view{} : rest.substr(authority_end);

  if (const auto at = authority.rfind('@'); at != std::string_view::npos) {
    p.userinfo = std::string(authority.substr(0, at));
    authority = authority.substr(at + 1);
  }
  std::string_view host = authority;
  const auto colon = authority.rfind(':');
  const bool ipv6 = !authority.empty() && authority.front() == '[';
  if (colon != std::string_view::npos && (!ipv6 || colon > authority.rfind(']'))) {
    host = authority.substr(0, colon);
    const std::string_view port_text = authority.substr(colon + 1);
    if (!port_text.empty()) {
      unsigned port = 0;
      const auto [ptr, ec] = std::from_chars(port_text.data(), port_text.data() + port_text.size(), port);
      if (ec != std::errc{} || ptr != port_text.data() + port_text.size() || port > 65535)
        throw UrlParseError("bad port in '" + std::string(url) + "'");
      p.port = port;
    }
  }
  if (host.empty()) throw UrlParseError("empty host in '" + std::string(url) + "'");
  if (!std::all_of(host.begin(), host.end(), valid_host_char))
    throw UrlParseError("bad host in '" + std::string(url) + "'");
  p.host = lower(host);

  if (const auto hash = rest.find('#'); hash != std::string_view::npos) {
    p.fragment = std::string(rest.substr(hash + 1));
    rest = rest.substr(0, hash);
  }
  if (const auto q = rest.find('?'); q != std::string_view::npos) {
    p.query = std::string(rest.substr(q + 1));
    rest = rest.substr(0, q);
  }
  p.path = std::string(rest);
  return p;
}

std::string canonicalize(std::string_view url) {
  const ParsedUrl p = parse_url(url);
  std::string out = p.scheme + "://";
  if (!p.userinfo.empty()) out += p.userinfo + "@";
  out += p.host;
  if (p.port && *p.port != default_port(p.scheme)) out += ":" + std::to_string(*p.port);
  if (p.path != "/") out += p.path;
  if (p.query) out += "?" + *p.query;
  return out;
}

std::string url_host(std::string_view url) { return parse_url(url).host; }

std::string resolve_reference(std::string_view base, std::string_view reference) {
  if (reference.find("://") != std::string_view::npos) return std::string(reference);
  const ParsedUrl b = parse_url(base);
  std::string origin = b.scheme + "://" + b.host;
  if (b.port) origin += ":" + std::to_string(*b.port);
  if (reference.starts_with("//")) return b.scheme + ":" + std::string(reference);
  if (reference.starts_with("/")) return origin + std::string(reference);
  if (reference.starts_with("?")) return origin + b.path + std::string(reference);
  const auto slash = b.path.rfind('/');
  const std::string dir = slash == std::string::npos ? "/" : b.path.substr(0, slash + 1);
  return origin + dir + std::string(reference);
}

}  // namespace netmon
