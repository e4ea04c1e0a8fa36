#pragma once

#include <cstddef>
#include <istream>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "netmon/ingest.hpp"

namespace netmon {

struct ExtractedLink {
  std::string message_id;
  std::string raw_url;
  /// Byte offset of raw_url in the message's UTF-8 text.
  std::size_t position = 0;

  bool operator==(const ExtractedLink&) const = default;
};

/// Every http:// or https:// URL (scheme in any letter case) in the text, in order. A URL ends at
/// whitespace or a character that cannot appear in a URL; trailing
/// sentence punctuation (.,;:!?) and unbalanced closing brackets are
/// not part of it.
std::vector<ExtractedLink> extract_links(const Message& message);

/// Hosts of known URL shortening services.
class ShortenerRegistry {
 public:
  /// migre.me, bit.ly, ow.ly, tinyurl.com, lnkd.in, goo.gl, wp.me, j.mp, dlvr.it
  static ShortenerRegistry defaults();
  /// One base address per line ("http://bit.ly/" or a bare host); '#' comments.
  static ShortenerRegistry parse(std::istream& in);

  void add(std::string_view base_address);
  bool contains_host(std::string_view host) const { return hosts_.contains(std::string(host)); }
  const std::set<std::string>& hosts() const { return hosts_; }

 private:
  std::set<std::string> hosts_;
};

/// True iff the url's host equals a registry host. Throws UrlParseError.
bool is_shortener(std::string_view url, const ShortenerRegistry& registry);

/// Hosts that point back into social networks; such links are kept but tagged.
bool is_social_host(std::string_view host);

struct Redirect {
  std::string target;
};
struct Terminal {};
struct FetchFailure {
  std::string reason;
};
using FetchAnswer = std::variant<Redirect, Terminal, FetchFailure>;

/// Answers "where does this URL send me". Implementations must be safe to
/// call from several threads at once.
class RedirectOracle {
 public:
  virtual ~RedirectOracle() = default;
  virtual FetchAnswer fetch(const std::string& url) const = 0;
};

/// Redirects from a fixed table. URLs absent from the table are terminal;
/// entries whose target is empty fail.
class OfflineRedirectMap final : public RedirectOracle {
 public:
  OfflineRedirectMap() = default;
  explicit OfflineRedirectMap(std::map<std::string, std::optional<std::string>> table);
  /// JSON object {url: target}; a null target marks a fetch failure.
  static OfflineRedirectMap parse(std::istream& in);

  FetchAnswer fetch(const std::string& url) const override;

 private:
  std::map<std::string, std::optional<std::string>> table_;
};

enum class ResolveStatus { resolved, loop_detected, depth_exceeded, fetch_failed, not_shortened };

std::string_view to_string(ResolveStatus status);
ResolveStatus resolve_status_from_string(std::string_view name);

struct ResolvedLink {
  std::string message_id;
  std::string raw_url;
  std::string final_url;
  std::vector<std::string> redirect_chain;
  bool was_shortened = false;
  ResolveStatus status = ResolveStatus::not_shortened;
  bool social = false;

  /// resolved or not_shortened: the final URL is trustworthy.
  bool succeeded() const {
    return status == ResolveStatus::resolved || status == ResolveStatus::not_shortened;
  }

  bool operator==(const ResolvedLink&) const = default;
};

/// Follows redirects from link.raw_url. Never throws for network trouble:
/// the outcome is carried in `status`, with the partial chain kept.
ResolvedLink resolve(const ExtractedLink& link, const RedirectOracle& fetcher,
                     const ShortenerRegistry& registry, int max_depth = 10);

/// Resolves links with at most `max_in_flight` concurrent lookups. The
/// output is index-aligned with the input.
std::vector<ResolvedLink> resolve_all(const std::vector<ExtractedLink>& links, const RedirectOracle& fetcher,
                                      const ShortenerRegistry& registry, int max_depth = 10,
                                      unsigned max_in_flight = 8);

struct LinkStats {
  std::size_t total_messages = 0;
  std::size_t messages_with_links = 0;
  std::size_t total_links = 0;
  std::size_t distinct_final_urls = 0;
  std::size_t distinct_raw_urls = 0;
  std::size_t resolved_links = 0;
  double messages_with_links_fraction = 0.0;
  /// Distinct canonical final URLs over all extracted links; absent with no links.
  std::optional<double> unique_links_fraction;
  /// The same ratio computed on canonical raw URLs, before short-link expansion.
  std::optional<double> unique_links_fraction_pre_resolution;
  std::map<std::string, std::size_t> per_source_counts;
};

/// Throws UndefinedFractionError when `messages` is empty.
LinkStats link_stats(const std::vector<Message>& messages, const std::vector<ResolvedLink>& links);

}  // namespace netmon
