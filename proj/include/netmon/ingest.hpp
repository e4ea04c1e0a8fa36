#pragma once

#include <chrono>
#include <cstddef>
#include <istream>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace netmon {

using Instant = std::chrono::sys_time<std::chrono::milliseconds>;

/// Accepts "YYYY-MM-DDTHH:MM:SS[.fff...][Z|+hh:mm|-hh:mm]"; throws InputError.
Instant parse_rfc3339(std::string_view text);
/// UTC with a "Z" suffix; milliseconds are printed only when non-zero.
std::string format_rfc3339(Instant t);

struct QueryPacket {
  std::string name;
  std::vector<std::string> queries;

  /// Throws InputError when the packet is empty or a query is blank.
  void validate() const;
};

/// One query per line; blank lines and lines starting with '#' are skipped.
QueryPacket parse_query_packet(std::istream& in, std::string name);

struct Message {
  std::string id;
  std::string author;
  Instant timestamp{};
  std::string text;
  std::set<std::size_t> matched_queries;

  bool operator==(const Message&) const = default;
};

struct RejectedLine {
  std::size_t line = 0;
  std::string reason;
};

struct CorpusLoad {
  std::vector<Message> messages;
  std::vector<RejectedLine> rejects;
};

/// Reads line-delimited JSON objects with id, author, timestamp and text.
/// Bad lines are reported in `rejects` (1-based line numbers); blank lines are
/// ignored. Throws InputError if the stream is unreadable.
CorpusLoad load_corpus(std::istream& in);

/// Case-folded alphanumeric runs of a UTF-8 string. Any character that is not
/// a Unicode letter or digit separates tokens.
std::vector<std::string> tokenize(std::string_view text);

/// Keeps messages in which every term of at least one query occurs as a whole
/// word, and records the indices of all matching queries.
std::vector<Message> match_queries(const std::vector<Message>& messages, const QueryPacket& packet);

/// First occurrence of each id wins; relative order is preserved.
std::vector<Message> dedupe(const std::vector<Message>& messages);

}  // namespace netmon
