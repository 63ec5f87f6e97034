#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "trf/types.hpp"

namespace trf {

struct Tweet {
  UserId author;
  MsgId msg;
  friend bool operator==(const Tweet&, const Tweet&) = default;
};

// Retweets carry the original author and tweet time so analyzers never have
// to join against tweet records.
struct Retweet {
  UserId repeater;
  MsgId msg;
  UserId origin_author;
  Timestamp origin_t;
  friend bool operator==(const Retweet&, const Retweet&) = default;
};

struct Follow {
  UserId follower;
  UserId followee;
  friend bool operator==(const Follow&, const Follow&) = default;
};

enum class EventKind { tweet = 0, retweet = 1, follow = 2 };

struct Event {
  Timestamp t = 0.0;
  std::variant<Tweet, Retweet, Follow> body;

  EventKind kind() const { return static_cast<EventKind>(body.index()); }
  const Tweet* tweet() const { return std::get_if<Tweet>(&body); }
  const Retweet* retweet() const { return std::get_if<Retweet>(&body); }
  const Follow* follow() const { return std::get_if<Follow>(&body); }

  friend bool operator==(const Event&, const Event&) = default;
};

using EventLog = std::vector<Event>;

// Log order: time, then kind (tweet < retweet < follow), then the acting user,
// then the remaining fields so the order is total.
bool event_less(const Event& a, const Event& b);

bool is_sorted_log(std::span<const Event> events);

Event make_tweet(Timestamp t, UserId author, MsgId msg);
Event make_retweet(Timestamp t, UserId repeater, MsgId msg, UserId origin_author,
                   Timestamp origin_t);
Event make_follow(Timestamp t, UserId follower, UserId followee);

// JSON Lines. Field order is fixed: t, kind, then the kind's own fields.
std::string serialize_event(const Event& e);
Event parse_event_line(std::string_view text);

void write_log(std::ostream& out, std::span<const Event> events);
EventLog read_log(std::istream& in);
EventLog load_log(const std::string& path);
void save_log(const std::string& path, std::span<const Event> events);

// Checks message-level consistency: unique tweet ids and retweets that
// reference a known tweet with a matching author and time.
void validate_log(std::span<const Event> events);

EventLog merge_logs(std::span<const Event> a, std::span<const Event> b);

// Follower set of one user as seen by a poll at time t.
struct Snapshot {
  UserId user;
  Timestamp t;
  std::vector<UserId> followers;  // ascending, never contains `user`
  friend bool operator==(const Snapshot&, const Snapshot&) = default;
};

std::string serialize_snapshot(const Snapshot& s);
Snapshot parse_snapshot_line(std::string_view text);
void write_snapshots(std::ostream& out, std::span<const Snapshot> snapshots);
std::vector<Snapshot> read_snapshots(std::istream& in);

}  // namespace trf
