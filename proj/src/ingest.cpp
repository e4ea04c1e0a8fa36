#include "netmon/ingest.hpp"

#include <unicode/uchar.h>
#include <unicode/unistr.h>

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <unordered_set>

#include "json.hpp"
#include "netmon/errors.hpp"

namespace netmon {

namespace {

int parse_digits(std::string_view text, std::size_t pos, std::size_t count) {
  if (pos + count > text.size()) throw InputError("timestamp too short: '" + std::string(text) + "'");
  int value = 0;
  for (std::size_t i = pos; i < pos + count; ++i) {
    const char c = text[i];
    if (c < '0' || c > '9') throw InputError("bad digit in timestamp '" + std::string(text) + "'");
    value = value * 10 + (c - '0');
  }
  return value;
}

void expect(std::string_view text, std::size_t pos, char c) {
  if (pos >= text.size() || (text[pos] != c && !(c == 'T' && (text[pos] == 't' || text[pos] == ' '))))
    throw InputError("malformed timestamp '" + std::string(text) + "'");
}

}  // namespace

Instant parse_rfc3339(std::string_view text) {
  using namespace std::chrono;
  const int y = parse_digits(text, 0, 4);
  expect(text, 4, '-');
  const int mo = parse_digits(text, 5, 2);
  expect(text, 7, '-');
  const int d = parse_digits(text, 8, 2);
  expect(text, 10, 'T');
  const int hh = parse_digits(text, 11, 2);
  expect(text, 13, ':');
  const int mm = parse_digits(text, 14, 2);
  expect(text, 16, ':');
  const int ss = parse_digits(text, 17, 2);

  const year_month_day ymd{year{y}, month{static_cast<unsigned>(mo)}, day{static_cast<unsigned>(d)}};
  if (!ymd.ok() || hh > 23 || mm > 59 || ss > 60)
    throw InputError("timestamp out of range '" + std::string(text) + "'");

  std::size_t pos = 19;
  milliseconds frac{0};
  if (pos < text.size() && text[pos] == '.') {
    ++pos;
    int digits = 0;
    int ms = 0;
    while (pos < text.size() && text[pos] >= '0' && text[pos] <= '9') {
      if (digits < 3) ms = ms * 10 + (text[pos] - '0');
      ++digits;
      ++pos;
    }
    if (digits == 0) throw InputError("empty fraction in timestamp '" + std::string(text) + "'");
    for (int i = digits; i < 3; ++i) ms *= 10;
    frac = milliseconds{ms};
  }

  minutes offset{0};
  if (pos < text.size() && (text[pos] == 'Z' || text[pos] == 'z')) {
    ++pos;
  } else if (pos < text.size() && (text[pos] == '+' || text[pos] == '-')) {
    const int sign = text[pos] == '-' ? -1 : 1;
    const int oh = parse_digits(text, pos + 1, 2);
    expect(text, pos + 3, ':');
    const int om = parse_digits(text, pos + 4, 2);
    offset = minutes{sign * (oh * 60 + om)};
    pos += 6;
  } else {
    throw InputError("timestamp lacks a UTC offset '" + std::string(text) + "'");
  }
  if (pos != text.size()) throw InputError("trailing characters in timestamp '" + std::string(text) + "'");

  const auto local = sys_days{ymd} + hours{hh} + minutes{mm} + seconds{ss} + frac;
  return time_point_cast<milliseconds>(local - offset);
}

std::string format_rfc3339(Instant t) {
  using namespace std::chrono;
  const auto day_point = floor<days>(t);
  const year_month_day ymd{day_point};
  const hh_mm_ss<milliseconds> tod{t - day_point};
  char buf[40];
  const int ms = static_cast<int>(tod.subseconds().count());
  if (ms == 0) {
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02d:%02d:%02dZ", static_cast<int>(ymd.year()),
                  static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()),
                  static_cast<int>(tod.hours().count()), static_cast<int>(tod.minutes().count()),
                  static_cast<int>(tod.seconds().count()));
  } else {
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02d:%02d:%02d.%03dZ", static_cast<int>(ymd.year()),
                  static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()),
                  static_cast<int>(tod.hours().count()), static_cast<int>(tod.minutes().count()),
                  static_cast<int>(tod.seconds().count()), ms);
  }
  return buf;
}

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

}  // namespace

void QueryPacket::validate() const {
  if (queries.empty()) throw InputError("query packet '" + name + "' is empty");
  for (std::size_t i = 0; i < queries.size(); ++i) {
    if (trim(queries[i]).empty()) throw InputError("query " + std::to_string(i) + " is blank");
    if (tokenize(queries[i]).empty())
      throw InputError("query " + std::to_string(i) + " has no searchable terms");
  }
}

QueryPacket parse_query_packet(std::istream& in, std::string name) {
  if (!in) throw InputError("query packet stream is not readable");
  QueryPacket packet;
  packet.name = std::move(name);
  std::string line;
  while (std::getline(in, line)) {
    const auto t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    packet.queries.emplace_back(t);
  }
  packet.validate();
  return packet;
}

CorpusLoad load_corpus(std::istream& in) {
  if (!in) throw InputError("corpus stream is not readable");
  CorpusLoad out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    try {
      const auto j = nlohmann::json::parse(line);
      if (!j.is_object()) throw InputError("line is not a JSON object");
      Message m;
      for (const char* field : {"id", "author", "timestamp", "text"}) {
        if (!j.contains(field) || !j[field].is_string())
          throw InputError(std::string("missing or non-string field '") + field + "'");
      }
      m.id = j["id"].get<std::string>();
      m.author = j["author"].get<std::string>();
      m.timestamp = parse_rfc3339(j["timestamp"].get<std::string>());
      m.text = j["text"].get<std::string>();
      if (m.id.empty()) throw InputError("empty id");
      out.messages.push_back(std::move(m));
    } catch (const nlohmann::json::exception& e) {
      out.rejects.push_back({line_no, e.what()});
    } catch (const InputError& e) {
      out.rejects.push_back({line_no, e.what()});
    }
  }
  if (in.bad()) throw InputError("error while reading corpus stream");
  return out;
}

namespace {

bool is_word_char(UChar32 c) {
  if (u_isalnum(c)) return true;
  const auto type = u_charType(c);
  return type == U_NON_SPACING_MARK || type == U_COMBINING_SPACING_MARK;
}

}  // namespace

std::vector<std::string> tokenize(std::string_view text) {
  icu::UnicodeString folded =
      icu::UnicodeString::fromUTF8(icu::StringPiece(text.data(), static_cast<int32_t>(text.size())));
  folded.foldCase(U_FOLD_CASE_DEFAULT);

  std::vector<std::string> tokens;
  icu::UnicodeString current;
  for (int32_t i = 0; i < folded.length(); i = folded.moveIndex32(i, 1)) {
    const UChar32 c = folded.char32At(i);
    if (is_word_char(c)) {
      current.append(c);
    } else if (!current.isEmpty()) {
      tokens.emplace_back();
      current.toUTF8String(tokens.back());
      current.remove();
    }
  }
  if (!current.isEmpty()) {
    tokens.emplace_back();
    current.toUTF8String(tokens.back());
  }
  return tokens;
}

std::vector<Message> match_queries(const std::vector<Message>& messages, const QueryPacket& packet) {
  std::vector<std::vector<std::string>> query_terms;
  query_terms.reserve(packet.queries.size());
  for (const auto& q : packet.queries) query_terms.push_back(tokenize(q));

  std::vector<Message> out;
  for (const auto& message : messages) {
    const auto tokens = tokenize(message.text);
    const std::unordered_set<std::string> words(tokens.begin(), tokens.end());
    Message matched = message;
    matched.matched_queries.clear();
    for (std::size_t qi = 0; qi < query_terms.size(); ++qi) {
      const auto& terms = query_terms[qi];
      if (terms.empty()) continue;
      if (std::all_of(terms.begin(), terms.end(), [&](const std::string& t) { return words.contains(t); }))
        matched.matched_queries.insert(qi);
    }
    if (!matched.matched_queries.empty()) out.push_back(std::move(matched));
  }
  return out;
}

std::vector<Message> dedupe(const std::vector<Message>& messages) {
  std::unordered_set<std::string> seen;
  std::vector<Message> out;
  out.reserve(messages.size());
  for (const auto& m : messages) {
    if (seen.insert(m.id).second) out.push_back(m);
  }
  return out;
}

}  // namespace netmon
