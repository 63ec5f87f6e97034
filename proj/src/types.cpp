#include "trf/types.hpp"

#include <charconv>
#include <cmath>
#include <string>

namespace trf {

std::string_view to_string(Errc code) {
  switch (code) {
    case Errc::self_edge: return "SelfEdge";
    case Errc::duplicate_edge: return "DuplicateEdge";
    case Errc::unknown_user: return "UnknownUser";
    case Errc::malformed_record: return "MalformedRecord";
    case Errc::unsorted_input: return "UnsortedInput";
    case Errc::invalid_config: return "InvalidConfig";
    case Errc::inconsistent_log: return "InconsistentLog";
    case Errc::empty_input: return "EmptyInput";
    case Errc::no_qualifying_tweets: return "NoQualifyingTweets";
    case Errc::no_qualifying_retweets: return "NoQualifyingRetweets";
    case Errc::underdetermined: return "Underdetermined";
    case Errc::all_zero_successes: return "AllZeroSuccesses";
    case Errc::separable: return "Separable";
    case Errc::rank_deficient: return "RankDeficient";
    case Errc::not_converged: return "NotConverged";
    case Errc::unreachable: return "Unreachable";
    case Errc::io: return "IoError";
  }
  return "Unknown";
}

std::string format_number(double v) {
  if (!std::isfinite(v)) {
    if (std::isnan(v)) return "nan";
    return v > 0 ? "inf" : "-inf";
  }
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  std::string out(buf, end);
  if (out.find_first_of(".eE") == std::string::npos) out += ".0";
  return out;
}

double parse_number(std::string_view text) {
  while (!text.empty() && (text.front() == ' ' || text.front() == '\t')) text.remove_prefix(1);
  while (!text.empty() && (text.back() == ' ' || text.back() == '\t' || text.back() == '\r'))
    text.remove_suffix(1);
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size() || text.empty())
    throw Error(Errc::malformed_record, "not a number: '" + std::string(text) + "'");
  return v;
}

std::uint64_t parse_uint(std::string_view text) {
  while (!text.empty() && (text.front() == ' ' || text.front() == '\t')) text.remove_prefix(1);
  while (!text.empty() && (text.back() == ' ' || text.back() == '\t' || text.back() == '\r'))
    text.remove_suffix(1);
  std::uint64_t v = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size() || text.empty())
    throw Error(Errc::malformed_record, "not a non-negative integer: '" + std::string(text) + "'");
  return v;
}

}  // namespace trf
