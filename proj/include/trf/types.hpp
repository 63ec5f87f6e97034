#pragma once

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace trf {

// Opaque user identifier. Speaker, Repeater and Listener are roles a UserId
// plays in a particular event, not separate types.
enum class UserId : std::uint64_t {};

// Identifier of a tweeted message.
enum class MsgId : std::uint64_t {};

// Seconds since the start of a run.
using Timestamp = double;

constexpr UserId user_id(std::uint64_t v) { return static_cast<UserId>(v); }
constexpr std::uint64_t to_int(UserId u) { return static_cast<std::uint64_t>(u); }
constexpr MsgId msg_id(std::uint64_t v) { return static_cast<MsgId>(v); }
constexpr std::uint64_t to_int(MsgId m) { return static_cast<std::uint64_t>(m); }

enum class Errc {
  self_edge,
  duplicate_edge,
  unknown_user,
  malformed_record,
  unsorted_input,
  invalid_config,
  inconsistent_log,
  empty_input,
  no_qualifying_tweets,
  no_qualifying_retweets,
  underdetermined,
  all_zero_successes,
  separable,
  rank_deficient,
  not_converged,
  unreachable,
  io,
};

std::string_view to_string(Errc code);

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what) : std::runtime_error(what), code_(code) {}
  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

// Shortest decimal that round-trips to the same double; integral values keep
// a trailing ".0" so numbers read back as reals.
std::string format_number(double v);

// Strict full-string parses used by the text formats.
double parse_number(std::string_view text);
std::uint64_t parse_uint(std::string_view text);

}  // namespace trf
