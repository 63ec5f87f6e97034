#include "trf/events.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <tuple>

#include <absl/container/flat_hash_map.h>
#include <json.hpp>

namespace trf {

namespace {

using json = nlohmann::json;

// Primary actor and the tie-breaking tail of the total order.
std::tuple<std::uint64_t, std::uint64_t, std::uint64_t, double> order_tail(const Event& e) {
  return std::visit(
      [](const auto& b) -> std::tuple<std::uint64_t, std::uint64_t, std::uint64_t, double> {
        using T = std::decay_t<decltype(b)>;
        if constexpr (std::is_same_v<T, Tweet>) {
          return {to_int(b.author), to_int(b.msg), 0, 0.0};
        } else if constexpr (std::is_same_v<T, Retweet>) {
          return {to_int(b.repeater), to_int(b.msg), to_int(b.origin_author), b.origin_t};
        } else {
          return {to_int(b.follower), to_int(b.followee), 0, 0.0};
        }
      },
      e.body);
}

[[noreturn]] void malformed(const std::string& why) { throw Error(Errc::malformed_record, why); }

std::uint64_t id_field(const json& obj, const char* key) {
  auto it = obj.find(key);
  if (it == obj.end()) malformed(std::string("missing field '") + key + "'");
  if (it->is_number_unsigned()) return it->get<std::uint64_t>();
  if (it->is_number_integer()) {
    const auto v = it->get<std::int64_t>();
    if (v >= 0) return static_cast<std::uint64_t>(v);
  }
  malformed(std::string("field '") + key + "' must be a non-negative integer");
}

double time_field(const json& obj, const char* key) {
  auto it = obj.find(key);
  if (it == obj.end()) malformed(std::string("missing field '") + key + "'");
  if (!it->is_number()) malformed(std::string("field '") + key + "' must be a number");
  const double v = it->get<double>();
  if (!std::isfinite(v) || v < 0.0)
    malformed(std::string("field '") + key + "' must be finite and non-negative");
  return v;
}

void expect_size(const json& obj, std::size_t n) {
  if (obj.size() != n) malformed("unexpected field set");
}

}  // namespace

bool event_less(const Event& a, const Event& b) {
  if (a.t != b.t) return a.t < b.t;
  if (a.body.index() != b.body.index()) return a.body.index() < b.body.index();
  return order_tail(a) < order_tail(b);
}

bool is_sorted_log(std::span<const Event> events) {
  return std::is_sorted(events.begin(), events.end(), event_less);
}

Event make_tweet(Timestamp t, UserId author, MsgId msg) { return {t, Tweet{author, msg}}; }

Event make_retweet(Timestamp t, UserId repeater, MsgId msg, UserId origin_author,
                   Timestamp origin_t) {
  return {t, Retweet{repeater, msg, origin_author, origin_t}};
}

Event make_follow(Timestamp t, UserId follower, UserId followee) {
  return {t, Follow{follower, followee}};
}

std::string serialize_event(const Event& e) {
  std::string out = "{\"t\":" + format_number(e.t);
  std::visit(
      [&out](const auto& b) {
        using T = std::decay_t<decltype(b)>;
        if constexpr (std::is_same_v<T, Tweet>) {
          out += ",\"kind\":\"tweet\",\"author\":" + std::to_string(to_int(b.author)) +
                 ",\"msg\":" + std::to_string(to_int(b.msg));
        } else if constexpr (std::is_same_v<T, Retweet>) {
          out += ",\"kind\":\"retweet\",\"repeater\":" + std::to_string(to_int(b.repeater)) +
                 ",\"msg\":" + std::to_string(to_int(b.msg)) +
                 ",\"origin_author\":" + std::to_string(to_int(b.origin_author)) +
                 ",\"origin_t\":" + format_number(b.origin_t);
        } else {
          out += ",\"kind\":\"follow\",\"follower\":" + std::to_string(to_int(b.follower)) +
                 ",\"followee\":" + std::to_string(to_int(b.followee));
        }
      },
      e.body);
  out += '}';
  return out;
}

Event parse_event_line(std::string_view text) {
  json obj;
  try {
    obj = json::parse(text.begin(), text.end());
  } catch (const json::exception& ex) {
    malformed(std::string("invalid JSON: ") + ex.what());
  }
  if (!obj.is_object()) malformed("record is not a JSON object");
  auto kind_it = obj.find("kind");
  if (kind_it == obj.end() || !kind_it->is_string()) malformed("missing field 'kind'");
  const auto kind = kind_it->get<std::string>();
  const double t = time_field(obj, "t");

  if (kind == "tweet") {
    expect_size(obj, 4);
    return make_tweet(t, user_id(id_field(obj, "author")), msg_id(id_field(obj, "msg")));
  }
  if (kind == "retweet") {
    expect_size(obj, 6);
    const double origin_t = time_field(obj, "origin_t");
    if (!(origin_t < t)) malformed("retweet must strictly follow its tweet (origin_t < t)");
    return make_retweet(t, user_id(id_field(obj, "repeater")), msg_id(id_field(obj, "msg")),
                        user_id(id_field(obj, "origin_author")), origin_t);
  }
  if (kind == "follow") {
    expect_size(obj, 4);
    const auto a = id_field(obj, "follower");
    const auto b = id_field(obj, "followee");
    if (a == b) malformed("follow event with follower == followee");
    return make_follow(t, user_id(a), user_id(b));
  }
  malformed("unknown kind '" + kind + "'");
}

void write_log(std::ostream& out, std::span<const Event> events) {
  if (!is_sorted_log(events)) throw Error(Errc::unsorted_input, "event log is not sorted");
  for (const auto& e : events) out << serialize_event(e) << '\n';
}

EventLog read_log(std::istream& in) {
  EventLog log;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    try {
      log.push_back(parse_event_line(line));
    } catch (const Error& e) {
      throw Error(e.code(), "line " + std::to_string(lineno) + ": " + e.what());
    }
    if (log.size() > 1 && event_less(log.back(), log[log.size() - 2]))
      throw Error(Errc::unsorted_input, "line " + std::to_string(lineno) + ": event out of order");
  }
  return log;
}

EventLog load_log(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::io, "cannot open " + path);
  try {
    return read_log(in);
  } catch (const Error& e) {
    throw Error(e.code(), path + ": " + e.what());
  }
}

void save_log(const std::string& path, std::span<const Event> events) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(Errc::io, "cannot write " + path);
  write_log(out, events);
}

void validate_log(std::span<const Event> events) {
  struct Origin {
    UserId author;
    Timestamp t;
  };
  absl::flat_hash_map<MsgId, Origin> tweets;
  for (std::size_t i = 0; i < events.size(); ++i) {
    const auto& e = events[i];
    const auto where = "event " + std::to_string(i) + ": ";
    if (const auto* tw = e.tweet()) {
      if (!tweets.try_emplace(tw->msg, Origin{tw->author, e.t}).second)
        throw Error(Errc::malformed_record,
                    where + "duplicate message id " + std::to_string(to_int(tw->msg)));
    } else if (const auto* rt = e.retweet()) {
      auto it = tweets.find(rt->msg);
      if (it == tweets.end())
        throw Error(Errc::malformed_record,
                    where + "retweet of unknown message " + std::to_string(to_int(rt->msg)));
      if (it->second.author != rt->origin_author || it->second.t != rt->origin_t)
        throw Error(Errc::malformed_record, where + "retweet origin does not match its tweet");
    }
  }
}

EventLog merge_logs(std::span<const Event> a, std::span<const Event> b) {
  EventLog out;
  out.reserve(a.size() + b.size());
  // Ties go to `a`, which keeps the merge stable.
  std::merge(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out), event_less);
  return out;
}

std::string serialize_snapshot(const Snapshot& s) {
  std::string out = "{\"user\":" + std::to_string(to_int(s.user)) + ",\"t\":" + format_number(s.t) +
                    ",\"followers\":[";
  for (std::size_t i = 0; i < s.followers.size(); ++i) {
    if (i) out += ',';
    out += std::to_string(to_int(s.followers[i]));
  }
  out += "]}";
  return out;
}

Snapshot parse_snapshot_line(std::string_view text) {
  json obj;
  try {
    obj = json::parse(text.begin(), text.end());
  } catch (const json::exception& ex) {
    malformed(std::string("invalid JSON: ") + ex.what());
  }
  if (!obj.is_object()) malformed("record is not a JSON object");
  expect_size(obj, 3);
  Snapshot s{user_id(id_field(obj, "user")), time_field(obj, "t"), {}};
  auto it = obj.find("followers");
  if (it == obj.end() || !it->is_array()) malformed("field 'followers' must be an array");
  for (const auto& v : *it) {
    if (!v.is_number_integer() || (v.is_number_integer() && !v.is_number_unsigned() && v.get<std::int64_t>() < 0))
      malformed("follower ids must be non-negative integers");
    s.followers.push_back(user_id(v.get<std::uint64_t>()));
  }
  if (!std::is_sorted(s.followers.begin(), s.followers.end()) ||
      std::adjacent_find(s.followers.begin(), s.followers.end()) != s.followers.end())
    malformed("followers must be strictly ascending");
  if (std::binary_search(s.followers.begin(), s.followers.end(), s.user))
    malformed("snapshot lists the user among her own followers");
  return s;
}

void write_snapshots(std::ostream& out, std::span<const Snapshot> snapshots) {
  for (const auto& s : snapshots) out << serialize_snapshot(s) << '\n';
}

std::vector<Snapshot> read_snapshots(std::istream& in) {
  std::vector<Snapshot> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    try {
      out.push_back(parse_snapshot_line(line));
    } catch (const Error& e) {
      throw Error(e.code(), "line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  return out;
}

}  // namespace trf
