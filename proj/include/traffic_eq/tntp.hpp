#pragma once

#include <cmath>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "traffic_eq/bpr.hpp"
#include "traffic_eq/detail/text.hpp"
#include "traffic_eq/errors.hpp"
#include "traffic_eq/network.hpp"

namespace traffic_eq {

/// One row of a TNTP net file. Node ids are 1-based as in the file.
struct TntpLinkRow {
  long long init_node = 0;
  long long term_node = 0;
  double capacity = 0.0;
  double length = 0.0;
  double free_flow_time = 0.0;
  double b = 0.15;
  double power = 4.0;
  double speed = 0.0;
  double toll = 0.0;
  long long link_type = 1;

  friend bool operator==(const TntpLinkRow&, const TntpLinkRow&) = default;
};

struct TntpNetworkFile {
  std::size_t zones = 0;
  std::size_t nodes = 0;
  std::size_t first_thru_node = 1;  // 1-based
  std::vector<TntpLinkRow> rows;

  friend bool operator==(const TntpNetworkFile&, const TntpNetworkFile&) = default;
};

/// One origin-destination entry of a TNTP trips file, 1-based zone ids.
struct TntpTrip {
  long long origin = 0;
  long long destination = 0;
  double flow = 0.0;

  friend bool operator==(const TntpTrip&, const TntpTrip&) = default;
};

struct TntpTripsFile {
  std::size_t zones = 0;
  double total_flow = 0.0;
  std::vector<TntpTrip> trips;  // file order, including intra-zone and zero entries

  friend bool operator==(const TntpTripsFile&, const TntpTripsFile&) = default;
};

struct NetworkOptions {
  /// Zero free-flow times are rejected unless a floor is given, in which case
  /// every time is raised to at least this value.
  std::optional<double> min_free_flow_time;
};

enum class TotalCheck { raise, ignore };

struct TripsOptions {
  double total_tolerance = 1e-4;  // relative
  TotalCheck on_mismatch = TotalCheck::raise;
};

namespace detail {

/// Strips a `~` comment. Returns the code part of the line.
inline std::string_view strip_comment(std::string_view line) {
  const std::size_t tilde = line.find('~');
  return tilde == std::string_view::npos ? line : line.substr(0, tilde);
}

struct MetadataLine {
  std::string key;
  std::string_view value;
};

/// Parses "<KEY> value". Returns nullopt for lines that are not metadata.
inline std::optional<MetadataLine> metadata_line(std::string_view line, std::size_t number) {
  line = trim(line);
  if (line.empty() || line.front() != '<') return std::nullopt;
  const std::size_t close = line.find('>');
  if (close == std::string_view::npos) throw ParseError(number, "unterminated metadata tag");
  MetadataLine out;
  for (char c : line.substr(1, close - 1))
    out.key.push_back(c >= 'a' && c <= 'z' ? static_cast<char>(c - 'a' + 'A') : c);
  out.value = trim(line.substr(close + 1));
  return out;
}

inline std::size_t metadata_count(const MetadataLine& m, std::size_t number) {
  const auto v = parse_integer(m.value);
  if (!v || *v < 0) throw ParseError(number, "bad value for <" + m.key + ">");
  return static_cast<std::size_t>(*v);
}

}  // namespace detail

/// Reads a TNTP net file without interpreting it.
inline TntpNetworkFile parse_network_file(std::string_view text) {
  TntpNetworkFile file;
  std::optional<std::size_t> declared_links;
  bool in_metadata = true;
  bool saw_first_thru = false;
  const auto all = detail::lines(text);
  for (std::size_t i = 0; i < all.size(); ++i) {
    const std::size_t number = i + 1;
    if (in_metadata) {
      const auto m = detail::metadata_line(all[i], number);
      if (!m) {
        if (detail::trim(detail::strip_comment(all[i])).empty()) continue;
        in_metadata = false;  // data before <END OF METADATA>
      } else {
        if (m->key == "END OF METADATA") {
          in_metadata = false;
        } else if (m->key == "NUMBER OF ZONES") {
          file.zones = detail::metadata_count(*m, number);
        } else if (m->key == "NUMBER OF NODES") {
          file.nodes = detail::metadata_count(*m, number);
        } else if (m->key == "NUMBER OF LINKS") {
          declared_links = detail::metadata_count(*m, number);
        } else if (m->key == "FIRST THRU NODE") {
          file.first_thru_node = detail::metadata_count(*m, number);
          saw_first_thru = true;
        }
        continue;
      }
    }
    std::string_view code = detail::trim(detail::strip_comment(all[i]));
    if (!code.empty() && code.back() == ';') code = detail::trim(code.substr(0, code.size() - 1));
    if (code.empty()) continue;
    const auto f = detail::fields(code);
    if (f.size() < 5 || f.size() > 10)
      throw ParseError(number, "expected 5 to 10 link columns, got " + std::to_string(f.size()));
    TntpLinkRow row;
    auto integer = [&](std::size_t k) {
      const auto v = detail::parse_integer(f[k]);
      if (!v) throw ParseError(number, "bad integer '" + std::string(f[k]) + "'");
      return *v;
    };
    auto real = [&](std::size_t k) {
      const auto v = detail::parse_double(f[k]);
      if (!v || !std::isfinite(*v)) throw ParseError(number, "bad number '" + std::string(f[k]) + "'");
      return *v;
    };
    row.init_node = integer(0);
    row.term_node = integer(1);
    row.capacity = real(2);
    row.length = real(3);
    row.free_flow_time = real(4);
    if (f.size() > 5) row.b = real(5);
    if (f.size() > 6) row.power = real(6);
    if (f.size() > 7) row.speed = real(7);
    if (f.size() > 8) row.toll = real(8);
    if (f.size() > 9) row.link_type = integer(9);
    if (row.init_node < 1 || row.term_node < 1 ||
        (file.nodes > 0 && (static_cast<std::size_t>(row.init_node) > file.nodes ||
                            static_cast<std::size_t>(row.term_node) > file.nodes)))
      throw ParseError(number, "node id out of range");
    if (!(row.capacity > 0.0)) throw ParseError(number, "capacity must be positive");
    if (row.free_flow_time < 0.0) throw ParseError(number, "negative free-flow time");
    file.rows.push_back(row);
  }
  if (!declared_links) throw ParseError(all.size(), "missing <NUMBER OF LINKS>");
  if (file.nodes == 0) throw ParseError(all.size(), "missing <NUMBER OF NODES>");
  if (file.rows.size() != *declared_links)
    throw ParseError(all.size(), "declared " + std::to_string(*declared_links) + " links, found " +
                                     std::to_string(file.rows.size()));
  if (!saw_first_thru) file.first_thru_node = 1;
  return file;
}

/// Builds the internal network: 0-based node ids, rows in file order.
inline Network to_network(const TntpNetworkFile& file, const NetworkOptions& options = {}) {
  std::vector<Link> links;
  links.reserve(file.rows.size());
  for (std::size_t e = 0; e < file.rows.size(); ++e) {
    const TntpLinkRow& row = file.rows[e];
    double time = row.free_flow_time;
    if (options.min_free_flow_time) {
      time = std::max(time, *options.min_free_flow_time);
    } else if (!(time > 0.0)) {
      throw ValidationError("link " + std::to_string(e) + " (" + std::to_string(row.init_node) +
                            " -> " + std::to_string(row.term_node) +
                            ") has zero free-flow time; pass a minimum free-flow time to clamp");
    }
    links.push_back({static_cast<NodeId>(row.init_node - 1), static_cast<NodeId>(row.term_node - 1),
                     time, row.capacity});
  }
  const std::size_t first_thru = file.first_thru_node > 0 ? file.first_thru_node - 1 : 0;
  return Network(file.nodes, std::move(links), first_thru);
}

inline Network parse_network(std::string_view text, const NetworkOptions& options = {}) {
  return to_network(parse_network_file(text), options);
}

/// BPR parameters taken from the b and power columns, which must be the same
/// on every row.
inline BprParams file_bpr(const TntpNetworkFile& file) {
  if (file.rows.empty()) return BprParams{};
  const double b = file.rows.front().b;
  const double power = file.rows.front().power;
  for (const TntpLinkRow& row : file.rows)
    if (row.b != b || row.power != power)
      throw ValidationError("per-link BPR parameters differ; only uniform b and power are supported");
  if (!(power > 0.0)) throw ValidationError("BPR power must be positive");
  BprParams p{b, 1.0 / power};
  p.validate();
  return p;
}

/// Reads a TNTP trips file without filtering it.
inline TntpTripsFile parse_trips_file(std::string_view text) {
  TntpTripsFile file;
  bool in_metadata = true;
  bool saw_total = false;
  std::optional<long long> origin;
  const auto all = detail::lines(text);
  for (std::size_t i = 0; i < all.size(); ++i) {
    const std::size_t number = i + 1;
    if (in_metadata) {
      if (const auto m = detail::metadata_line(all[i], number)) {
        if (m->key == "END OF METADATA") {
          in_metadata = false;
        } else if (m->key == "NUMBER OF ZONES") {
          file.zones = detail::metadata_count(*m, number);
        } else if (m->key == "TOTAL OD FLOW") {
          const auto v = detail::parse_double(m->value);
          if (!v || *v < 0.0) throw ParseError(number, "bad value for <TOTAL OD FLOW>");
          file.total_flow = *v;
          saw_total = true;
        }
        continue;
      }
      if (detail::trim(detail::strip_comment(all[i])).empty()) continue;
      in_metadata = false;
    }
    std::string_view code = detail::trim(detail::strip_comment(all[i]));
    if (code.empty()) continue;
    const auto words = detail::fields(code);
    if (words.front() == "Origin" || words.front() == "origin") {
      if (words.size() != 2) throw ParseError(number, "expected 'Origin <zone>'");
      const auto o = detail::parse_integer(words[1]);
      if (!o || *o < 1) throw ParseError(number, "bad origin '" + std::string(words[1]) + "'");
      origin = *o;
      continue;
    }
    if (!origin) throw ParseError(number, "destination entries before any 'Origin' line");
    // entries: "dest : flow;" repeated, with flexible spacing
    std::size_t pos = 0;
    while (pos < code.size()) {
      const std::size_t end = code.find(';', pos);
      const std::string_view entry =
          detail::trim(code.substr(pos, end == std::string_view::npos ? std::string_view::npos : end - pos));
      pos = end == std::string_view::npos ? code.size() : end + 1;
      if (entry.empty()) continue;
      const std::size_t colon = entry.find(':');
      if (colon == std::string_view::npos) throw ParseError(number, "expected 'dest : flow'");
      const auto d = detail::parse_integer(entry.substr(0, colon));
      const auto v = detail::parse_double(entry.substr(colon + 1));
      if (!d || *d < 1) throw ParseError(number, "bad destination in '" + std::string(entry) + "'");
      if (!v || !std::isfinite(*v) || *v < 0.0)
        throw ParseError(number, "bad flow in '" + std::string(entry) + "'");
      if (file.zones > 0 &&
          (static_cast<std::size_t>(*d) > file.zones || static_cast<std::size_t>(*origin) > file.zones))
        throw ParseError(number, "zone id out of range");
      file.trips.push_back({*origin, *d, *v});
    }
  }
  if (!saw_total) throw ParseError(all.size(), "missing <TOTAL OD FLOW>");
  return file;
}

/// Relative deviation of the summed entries from the declared total.
inline double total_deviation(const TntpTripsFile& file) {
  double sum = 0.0;
  for (const TntpTrip& t : file.trips) sum += t.flow;
  const double scale = std::max(std::abs(file.total_flow), 1e-12);
  return std::abs(sum - file.total_flow) / scale;
}

/// Demands with 0-based ids; intra-zone and zero entries are dropped.
inline Demands to_demands(const TntpTripsFile& file, const TripsOptions& options = {}) {
  if (options.on_mismatch == TotalCheck::raise) {
    const double dev = total_deviation(file);
    if (dev > options.total_tolerance)
      throw TotalMismatch("trip entries sum differs from <TOTAL OD FLOW> by " +
                          detail::format_double(dev) + " (relative)");
  }
  std::map<std::pair<long long, long long>, double> seen;
  std::vector<OdDemand> entries;
  for (const TntpTrip& t : file.trips) {
    if (t.origin == t.destination || t.flow == 0.0) continue;
    if (!seen.emplace(std::pair{t.origin, t.destination}, t.flow).second)
      throw ValidationError("duplicate trips entry " + std::to_string(t.origin) + " -> " +
                            std::to_string(t.destination));
    entries.push_back({static_cast<NodeId>(t.origin - 1), static_cast<NodeId>(t.destination - 1), t.flow});
  }
  return Demands(std::move(entries));
}

inline Demands parse_trips(std::string_view text, const TripsOptions& options = {}) {
  return to_demands(parse_trips_file(text), options);
}

inline std::string write_network_file(const TntpNetworkFile& file) {
  using detail::format_double;
  std::string out;
  out += "<NUMBER OF ZONES> " + std::to_string(file.zones) + "\n";
  out += "<NUMBER OF NODES> " + std::to_string(file.nodes) + "\n";
  out += "<FIRST THRU NODE> " + std::to_string(file.first_thru_node) + "\n";
  out += "<NUMBER OF LINKS> " + std::to_string(file.rows.size()) + "\n";
  out += "<END OF METADATA>\n\n";
  out += "~\tinit_node\tterm_node\tcapacity\tlength\tfree_flow_time\tb\tpower\tspeed\ttoll\tlink_type\t;\n";
  for (const TntpLinkRow& r : file.rows) {
    out += '\t' + std::to_string(r.init_node) + '\t' + std::to_string(r.term_node) + '\t' +
           format_double(r.capacity) + '\t' + format_double(r.length) + '\t' +
           format_double(r.free_flow_time) + '\t' + format_double(r.b) + '\t' +
           format_double(r.power) + '\t' + format_double(r.speed) + '\t' + format_double(r.toll) +
           '\t' + std::to_string(r.link_type) + "\t;\n";
  }
  return out;
}

inline std::string write_trips_file(const TntpTripsFile& file) {
  std::string out;
  out += "<NUMBER OF ZONES> " + std::to_string(file.zones) + "\n";
  out += "<TOTAL OD FLOW> " + detail::format_double(file.total_flow) + "\n";
  out += "<END OF METADATA>\n";
  std::optional<long long> origin;
  for (const TntpTrip& t : file.trips) {
    if (origin != t.origin) {
      out += "\n\nOrigin " + std::to_string(t.origin) + "\n";
      origin = t.origin;
    }
    out += "    " + std::to_string(t.destination) + " :\t" + detail::format_double(t.flow) + ";\n";
  }
  return out;
}

/// TNTP rows for an internal network, with the BPR columns filled from `bpr`.
inline TntpNetworkFile to_network_file(const Network& network, std::size_t zones,
                                       const BprParams& bpr = {}) {
  TntpNetworkFile file;
  file.zones = zones;
  file.nodes = network.node_count();
  file.first_thru_node = network.first_thru_node() + 1;
  for (const Link& l : network.links()) {
    TntpLinkRow row;
    row.init_node = static_cast<long long>(l.tail) + 1;
    row.term_node = static_cast<long long>(l.head) + 1;
    row.capacity = l.capacity;
    row.free_flow_time = l.free_flow_time;
    row.b = bpr.rho;
    row.power = 1.0 / bpr.mu;
    file.rows.push_back(row);
  }
  return file;
}

}  // namespace traffic_eq
