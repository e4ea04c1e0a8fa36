#include "netmon/linknet.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <set>
#include <thread>
#include <unordered_map>

#include "json.hpp"
#include "netmon/errors.hpp"
#include "netmon/url.hpp"

namespace netmon {

namespace {

bool ends_url(unsigned char c) {
  if (c <= 0x20 || c == 0x7f || c >= 0x80) return true;
  switch (c) {
    case '"': case '<': case '>': case '`': case '{': case '}': case '|': case '\\': case '^':
      return true;
    default:
      return false;
  }
}

bool is_trailing_punct(char c) {
  return c == '.' || c == ',' || c == ';' || c == ':' || c == '!' || c == '?';
}

char opener_for(char close) {
  switch (close) {
    case ')': return '(';
    case ']': return '[';
    case '}': return '{';
    default: return 0;
  }
}

// Strips trailing punctuation and closing brackets that have no opener inside the URL.
std::string_view trim_url_tail(std::string_view candidate) {
  while (!candidate.empty()) {
    const char last = candidate.back();
    if (is_trailing_punct(last)) {
      candidate.remove_suffix(1);
      continue;
    }
    if (const char open = opener_for(last)) {
      const auto opens = std::count(candidate.begin(), candidate.end(), open);
      const auto closes = std::count(candidate.begin(), candidate.end(), last);
      if (closes > opens) {
        candidate.remove_suffix(1);
        continue;
      }
    }
    break;
  }
  return candidate;
}

// Length of an "http://" or "https://" prefix at `at`, any letter case; 0 if none.
std::size_t scheme_length(std::string_view text, std::size_t at) {
  auto matches = [&](std::string_view scheme) {
    if (text.size() - at < scheme.size()) return false;
    for (std::size_t i = 0; i < scheme.size(); ++i) {
      if (std::tolower(static_cast<unsigned char>(text[at + i])) != scheme[i]) return false;
    }
    return true;
  };
  if (matches("https://")) return 8;
  if (matches("http://")) return 7;
  return 0;
}

}  // namespace

std::vector<ExtractedLink> extract_links(const Message& message) {
  const std::string_view text = message.text;
  std::vector<ExtractedLink> links;
  std::size_t pos = 0;
  while (pos < text.size()) {
    const std::size_t scheme_len = scheme_length(text, pos);
    if (scheme_len == 0) {
      ++pos;
      continue;
    }
    std::size_t end = pos + scheme_len;
    while (end < text.size() && !ends_url(static_cast<unsigned char>(text[end]))) ++end;
    const std::string_view candidate = trim_url_tail(text.substr(pos, end - pos));

    bool valid = candidate.size() > scheme_len;
    if (valid) {
      try {
        parse_url(candidate);
      } catch (const UrlParseError&) {
        valid = false;
      }
    }
    if (valid) {
      links.push_back({message.id, std::string(candidate), pos});
      pos += candidate.size();
    } else {
      pos += scheme_len;
    }
  }
  return links;
}

ShortenerRegistry ShortenerRegistry::defaults() {
  ShortenerRegistry r;
  for (const char* base : {"http://migre.me/", "http://bit.ly/", "http://ow.ly/", "http://tinyurl.com/",
                           "https://lnkd.in/", "https://goo.gl/", "http://wp.me/", "http://j.mp/",
                           "http://dlvr.it/"}) {
    r.add(base);
  }
  return r;
}

ShortenerRegistry ShortenerRegistry::parse(std::istream& in) {
  if (!in) throw InputError("shortener registry stream is not readable");
  ShortenerRegistry r;
  std::string line;
  while (std::getline(in, line)) {
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    const auto last = line.find_last_not_of(" \t\r");
    r.add(std::string_view(line).substr(first, last - first + 1));
  }
  return r;
}

void ShortenerRegistry::add(std::string_view base_address) {
  if (base_address.find("://") == std::string_view::npos) {
    hosts_.insert(url_host("http://" + std::string(base_address)));
  } else {
    hosts_.insert(url_host(base_address));
  }
}

bool is_shortener(std::string_view url, const ShortenerRegistry& registry) {
  return registry.contains_host(url_host(url));
}

bool is_social_host(std::string_view host) {
  static constexpr std::string_view kSocial[] = {"youtu.be",     "youtube.com", "fb.me",
                                                 "facebook.com", "vk.com",      "twitter.com",
                                                 "plus.google.com", "livejournal.com"};
  for (std::string_view s : kSocial) {
    if (host == s) return true;
    if (host.size() > s.size() && host.ends_with(s) && host[host.size() - s.size() - 1] == '.') return true;
  }
  return false;
}

namespace {

std::string canonical_or_raw(std::string_view url) {
  try {
    return canonicalize(url);
  } catch (const UrlParseError&) {
    return std::string(url);
  }
}

}  // namespace

OfflineRedirectMap::OfflineRedirectMap(std::map<std::string, std::optional<std::string>> table)
    : table_(std::move(table)) {
  std::map<std::string, std::optional<std::string>> canonical;
  for (const auto& [from, to] : table_) canonical.emplace(canonical_or_raw(from), to);
  for (auto& [from, to] : canonical) table_.emplace(from, to);
}

OfflineRedirectMap OfflineRedirectMap::parse(std::istream& in) {
  if (!in) throw InputError("redirect map stream is not readable");
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("redirect map is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw InputError("redirect map must be a JSON object");
  std::map<std::string, std::optional<std::string>> table;
  for (const auto& [from, to] : j.items()) {
    if (to.is_null()) table.emplace(from, std::nullopt);
    else if (to.is_string()) table.emplace(from, to.get<std::string>());
    else throw InputError("redirect target for '" + from + "' must be a string or null");
  }
  return OfflineRedirectMap(std::move(table));
}

FetchAnswer OfflineRedirectMap::fetch(const std::string& url) const {
  auto it = table_.find(url);
  if (it == table_.end()) it = table_.find(canonical_or_raw(url));
  if (it == table_.end()) return Terminal{};
  if (!it->second || it->second->empty()) return FetchFailure{"offline map marks '" + url + "' as failing"};
  return Redirect{*it->second};
}

std::string_view to_string(ResolveStatus status) {
  switch (status) {
    case ResolveStatus::resolved: return "resolved";
    case ResolveStatus::loop_detected: return "loop_detected";
    case ResolveStatus::depth_exceeded: return "depth_exceeded";
    case ResolveStatus::fetch_failed: return "fetch_failed";
    case ResolveStatus::not_shortened: return "not_shortened";
  }
  return "unknown";
}

ResolveStatus resolve_status_from_string(std::string_view name) {
  for (auto s : {ResolveStatus::resolved, ResolveStatus::loop_detected, ResolveStatus::depth_exceeded,
                 ResolveStatus::fetch_failed, ResolveStatus::not_shortened}) {
    if (to_string(s) == name) return s;
  }
  throw InputError("unknown resolve status '" + std::string(name) + "'");
}

ResolvedLink resolve(const ExtractedLink& link, const RedirectOracle& fetcher, const ShortenerRegistry& registry,
                     int max_depth) {
  if (max_depth < 1) throw std::invalid_argument("max_depth must be positive");
  ResolvedLink out;
  out.message_id = link.message_id;
  out.raw_url = link.raw_url;
  out.redirect_chain.push_back(link.raw_url);

  bool listed = false;
  try {
    listed = is_shortener(link.raw_url, registry);
  } catch (const UrlParseError&) {
    out.status = ResolveStatus::fetch_failed;
    out.final_url = link.raw_url;
    return out;
  }

  std::set<std::string> visited{canonical_or_raw(link.raw_url)};
  std::string current = link.raw_url;
  int followed = 0;
  for (;;) {
    const FetchAnswer answer = fetcher.fetch(current);
    if (const auto* redirect = std::get_if<Redirect>(&answer)) {
      std::string target;
      try {
        target = resolve_reference(current, redirect->target);
        parse_url(target);
      } catch (const UrlParseError&) {
        out.status = ResolveStatus::fetch_failed;
        break;
      }
      if (!visited.insert(canonical_or_raw(target)).second) {
        out.status = ResolveStatus::loop_detected;
        break;
      }
      if (followed == max_depth) {
        out.status = ResolveStatus::depth_exceeded;
        break;
      }
      out.redirect_chain.push_back(target);
      ++followed;
      current = std::move(target);
    } else if (std::holds_alternative<Terminal>(answer)) {
      out.status = (followed == 0 && !listed) ? ResolveStatus::not_shortened : ResolveStatus::resolved;
      break;
    } else {
      out.status = ResolveStatus::fetch_failed;
      break;
    }
  }
  out.final_url = canonical_or_raw(current);
  out.was_shortened = listed || followed > 0;
  try {
    out.social = is_social_host(url_host(out.final_url));
  } catch (const UrlParseError&) {
    out.social = false;
  }
  return out;
}

std::vector<ResolvedLink> resolve_all(const std::vector<ExtractedLink>& links, const RedirectOracle& fetcher,
                                      const ShortenerRegistry& registry, int max_depth, unsigned max_in_flight) {
  // Each distinct raw URL is looked up once; results are keyed by it.
  std::vector<std::string> distinct;
  std::unordered_map<std::string, std::size_t> slot;
  for (const auto& l : links) {
    if (slot.emplace(l.raw_url, distinct.size()).second) distinct.push_back(l.raw_url);
  }
  std::vector<ResolvedLink> by_raw(distinct.size());
  auto work = [&](std::size_t i) { by_raw[i] = resolve({"", distinct[i], 0}, fetcher, registry, max_depth); };

  const std::size_t workers = std::min<std::size_t>(std::max(1u, max_in_flight), distinct.size());
  if (workers <= 1) {
    for (std::size_t i = 0; i < distinct.size(); ++i) work(i);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < distinct.size(); i = next++) work(i);
      });
    }
  }

  std::vector<ResolvedLink> out;
  out.reserve(links.size());
  for (const auto& l : links) {
    ResolvedLink r = by_raw[slot.at(l.raw_url)];
    r.message_id = l.message_id;
    out.push_back(std::move(r));
  }
  return out;
}

LinkStats link_stats(const std::vector<Message>& messages, const std::vector<ResolvedLink>& links) {
  if (messages.empty()) throw UndefinedFractionError("link statistics are undefined for zero messages");
  LinkStats s;
  s.total_messages = messages.size();
  s.total_links = links.size();

  std::set<std::string> linked_ids;
  std::set<std::string> finals;
  std::set<std::string> raws;
  for (const auto& l : links) {
    linked_ids.insert(l.message_id);
    finals.insert(l.final_url);
    raws.insert(canonical_or_raw(l.raw_url));
    if (l.succeeded()) {
      ++s.resolved_links;
      ++s.per_source_counts[url_host(l.final_url)];
    }
  }
  std::set<std::string> seen;
  for (const auto& m : messages) {
    if (seen.insert(m.id).second && linked_ids.contains(m.id)) ++s.messages_with_links;
  }
  s.distinct_final_urls = finals.size();
  s.distinct_raw_urls = raws.size();
  s.messages_with_links_fraction = static_cast<double>(s.messages_with_links) / static_cast<double>(s.total_messages);
  if (!links.empty()) {
    s.unique_links_fraction = static_cast<double>(finals.size()) / static_cast<double>(links.size());
    s.unique_links_fraction_pre_resolution = static_cast<double>(raws.size()) / static_cast<double>(links.size());
  }
  return s;
}

}  // namespace netmon
