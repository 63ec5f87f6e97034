#include "trf/records.hpp"

#include <istream>
#include <ostream>
#include <tuple>

namespace trf {

namespace {

template <class Row, class Parse>
std::vector<Row> read_rows(std::istream& in, std::string_view header, std::size_t fields,
                           Parse parse) {
  std::vector<Row> rows;
  std::string line;
  std::size_t lineno = 0;
  bool seen_header = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (!seen_header) {
      if (line != header)
        throw Error(Errc::malformed_record, "expected header '" + std::string(header) + "'");
      seen_header = true;
      continue;
    }
    const auto cols = split_csv(line);
    if (cols.size() != fields)
      throw Error(Errc::malformed_record, "line " + std::to_string(lineno) + ": expected " +
                                              std::to_string(fields) + " fields");
    try {
      rows.push_back(parse(cols));
    } catch (const Error& e) {
      throw Error(e.code(), "line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  if (!seen_header) throw Error(Errc::malformed_record, "missing header");
  return rows;
}

UserId uid(std::string_view s) { return user_id(parse_uint(s)); }

bool flag(std::string_view s) {
  if (s == "1") return true;
  if (s == "0") return false;
  throw Error(Errc::malformed_record, "expected 0 or 1");
}

}  // namespace

std::vector<std::string_view> split_csv(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(',', start);
    if (pos == std::string_view::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
}

bool group_less(const RetweetGroup& a, const RetweetGroup& b) {
  return std::tie(a.t_r, a.speaker, a.listener) < std::tie(b.t_r, b.speaker, b.listener);
}

bool detection_less(const TrfDetection& a, const TrfDetection& b) {
  return std::tie(a.t_l, a.speaker, a.listener, a.t_r, a.repeater) <
         std::tie(b.t_l, b.speaker, b.listener, b.t_r, b.repeater);
}

void write_ground_truth_csv(std::ostream& out, std::span<const GroundTruthTrf> rows) {
  out << "speaker,repeater,listener,t_s,t_r,t_l,n_received,reciprocal\n";
  for (const auto& r : rows)
    out << to_int(r.speaker) << ',' << to_int(r.repeater) << ',' << to_int(r.listener) << ','
        << format_number(r.t_s) << ',' << format_number(r.t_r) << ',' << format_number(r.t_l)
        << ',' << r.n_received << ',' << (r.reciprocal ? 1 : 0) << '\n';
}

std::vector<GroundTruthTrf> read_ground_truth_csv(std::istream& in) {
  return read_rows<GroundTruthTrf>(
      in, "speaker,repeater,listener,t_s,t_r,t_l,n_received,reciprocal", 8, [](const auto& c) {
        return GroundTruthTrf{uid(c[0]),
                              uid(c[1]),
                              uid(c[2]),
                              parse_number(c[3]),
                              parse_number(c[4]),
                              parse_number(c[5]),
                              static_cast<std::uint32_t>(parse_uint(c[6])),
                              flag(c[7])};
      });
}

void write_groups_csv(std::ostream& out, std::span<const RetweetGroup> rows) {
  out << "speaker,listener,t_r,n,n_window,i_delta,reciprocal\n";
  for (const auto& g : rows)
    out << to_int(g.speaker) << ',' << to_int(g.listener) << ',' << format_number(g.t_r) << ','
        << g.n << ',' << g.n_window << ',' << (g.i_delta ? 1 : 0) << ','
        << (g.reciprocal ? 1 : 0) << '\n';
}

std::vector<RetweetGroup> read_groups_csv(std::istream& in) {
  return read_rows<RetweetGroup>(
      in, "speaker,listener,t_r,n,n_window,i_delta,reciprocal", 7, [](const auto& c) {
        return RetweetGroup{uid(c[0]),
                            uid(c[1]),
                            parse_number(c[2]),
                            static_cast<std::uint32_t>(parse_uint(c[3])),
                            static_cast<std::uint32_t>(parse_uint(c[4])),
                            flag(c[5]),
                            flag(c[6])};
      });
}

void write_detections_csv(std::ostream& out, std::span<const TrfDetection> rows) {
  out << "speaker,repeater,listener,t_s,t_r,t_l,latency,reciprocal\n";
  for (const auto& d : rows)
    out << to_int(d.speaker) << ',' << to_int(d.repeater) << ',' << to_int(d.listener) << ','
        << format_number(d.t_s) << ',' << format_number(d.t_r) << ',' << format_number(d.t_l)
        << ',' << format_number(d.latency) << ',' << (d.reciprocal ? 1 : 0) << '\n';
}

std::vector<TrfDetection> read_detections_csv(std::istream& in) {
  return read_rows<TrfDetection>(
      in, "speaker,repeater,listener,t_s,t_r,t_l,latency,reciprocal", 8, [](const auto& c) {
        return TrfDetection{uid(c[0]),          uid(c[1]),          uid(c[2]),
                            parse_number(c[3]), parse_number(c[4]), parse_number(c[5]),
                            parse_number(c[6]), flag(c[7])};
      });
}

}  // namespace trf
