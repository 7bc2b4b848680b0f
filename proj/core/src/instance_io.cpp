#include "hmtsp/io.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <optional>
#include <ostream>
#include <sstream>
#include <vector>

namespace hmtsp {

std::string_view to_string(FormatErrorKind kind) {
  switch (kind) {
    case FormatErrorKind::kUnreadable: return "unreadable file";
    case FormatErrorKind::kMalformedHeader: return "malformed header";
    case FormatErrorKind::kCountMismatch: return "count mismatch";
    case FormatErrorKind::kNonFinite: return "non-finite value";
    case FormatErrorKind::kMalformedLine: return "malformed line";
    case FormatErrorKind::kIndexOutOfRange: return "index out of range";
    case FormatErrorKind::kProbabilityOutOfRange: return "probability out of range";
    case FormatErrorKind::kConflictingDuplicate: return "conflicting duplicate edge";
    case FormatErrorKind::kNotAPermutation: return "tour is not a permutation";
  }
  return "format error";
}

namespace {

std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    std::size_t j = i;
    while (j < line.size() && !std::isspace(static_cast<unsigned char>(line[j]))) ++j;
    if (j > i) out.push_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

std::string trim(std::string_view s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

std::optional<double> parse_double(std::string_view tok) {
  double v = 0.0;
  const char* first = tok.data();
  const char* last = tok.data() + tok.size();
  if (first != last && *first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last) return std::nullopt;
  return v;
}

template <typename Int>
std::optional<Int> parse_int(std::string_view tok) {
  Int v{};
  auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc() || ptr != tok.data() + tok.size()) return std::nullopt;
  return v;
}

double finite_coord(std::string_view tok, std::size_t line_no) {
  auto v = parse_double(tok);
  if (!v) {
    throw FormatError(FormatErrorKind::kMalformedLine,
                      "line " + std::to_string(line_no) + ": bad number '" + std::string(tok) + "'");
  }
  if (!std::isfinite(*v)) {
    throw FormatError(FormatErrorKind::kNonFinite,
                      "line " + std::to_string(line_no) + ": '" + std::string(tok) + "'");
  }
  return *v;
}

std::size_t parse_count_header(std::string_view line) {
  auto toks = split_ws(line);
  if (toks.size() != 2 || toks[0] != "n") {
    throw FormatError(FormatErrorKind::kMalformedHeader, "expected 'n <count>', got '" + trim(line) + "'");
  }
  auto n = parse_int<std::size_t>(toks[1]);
  if (!n) {
    throw FormatError(FormatErrorKind::kMalformedHeader, "bad count '" + std::string(toks[1]) + "'");
  }
  return *n;
}

bool next_content_line(std::istream& in, std::string& line, std::size_t& line_no) {
  while (std::getline(in, line)) {
    ++line_no;
    if (!trim(line).empty()) return true;
  }
  return false;
}

Instance normalize(std::vector<Point> pts) {
  const bool inside = std::all_of(pts.begin(), pts.end(), [](const Point& p) {
    return p.x >= 0.0 && p.x <= 1.0 && p.y >= 0.0 && p.y <= 1.0;
  });
  if (inside || pts.empty()) return Instance(std::move(pts));

  auto [xmin_it, xmax_it] = std::minmax_element(pts.begin(), pts.end(),
                                                [](const Point& a, const Point& b) { return a.x < b.x; });
  auto [ymin_it, ymax_it] = std::minmax_element(pts.begin(), pts.end(),
                                                [](const Point& a, const Point& b) { return a.y < b.y; });
  Normalization norm;
  norm.x_offset = xmin_it->x;
  norm.y_offset = ymin_it->y;
  const double extent = std::max(xmax_it->x - xmin_it->x, ymax_it->y - ymin_it->y);
  norm.scale = extent > 0.0 ? 1.0 / extent : 1.0;
  for (auto& p : pts) {
    p.x = std::clamp(norm.scale * (p.x - norm.x_offset), 0.0, 1.0);
    p.y = std::clamp(norm.scale * (p.y - norm.y_offset), 0.0, 1.0);
  }
  return Instance(std::move(pts), norm);
}

Instance parse_simple(std::istream& in, std::size_t n, std::size_t line_no) {
  std::vector<Point> pts;
  pts.reserve(n);
  std::string line;
  while (next_content_line(in, line, line_no)) {
    auto toks = split_ws(line);
    if (toks.size() == 1 && toks[0] == "EOF") break;
    if (toks.size() != 2) {
      throw FormatError(FormatErrorKind::kMalformedLine,
                        "line " + std::to_string(line_no) + ": expected '<x> <y>'");
    }
    if (pts.size() == n) {
      throw FormatError(FormatErrorKind::kCountMismatch,
                        "header declares " + std::to_string(n) + " points but more follow");
    }
    pts.push_back({finite_coord(toks[0], line_no), finite_coord(toks[1], line_no)});
  }
  if (pts.size() != n) {
    throw FormatError(FormatErrorKind::kCountMismatch, "header declares " + std::to_string(n) +
                                                           " points, found " + std::to_string(pts.size()));
  }
  return normalize(std::move(pts));
}

Instance parse_tsplib(std::istream& in, std::string first_line, std::size_t line_no) {
  std::optional<std::size_t> dimension;
  std::string line = std::move(first_line);
  bool in_coords = false;
  do {
    const std::string t = trim(line);
    if (t.rfind("NODE_COORD_SECTION", 0) == 0) {
      in_coords = true;
      break;
    }
    if (t == "EOF") break;
    const auto colon = t.find(':');
    std::string key = trim(colon == std::string::npos ? std::string_view(t).substr(0, t.find(' '))
                                                      : std::string_view(t).substr(0, colon));
    std::string value = colon == std::string::npos ? trim(std::string_view(t).substr(key.size()))
                                                   : trim(std::string_view(t).substr(colon + 1));
    if (key == "DIMENSION") {
      auto d = parse_int<std::size_t>(value);
      if (!d) throw FormatError(FormatErrorKind::kMalformedHeader, "bad DIMENSION '" + value + "'");
      dimension = *d;
    } else if (key == "EDGE_WEIGHT_TYPE" && value != "EUC_2D") {
      throw FormatError(FormatErrorKind::kMalformedHeader, "unsupported EDGE_WEIGHT_TYPE " + value);
    } else if (key != "NAME" && key != "TYPE" && key != "COMMENT" && key != "EDGE_WEIGHT_TYPE") {
      throw FormatError(FormatErrorKind::kMalformedHeader, "unknown TSPLIB keyword '" + key + "'");
    }
  } while (next_content_line(in, line, line_no));

  if (!dimension) throw FormatError(FormatErrorKind::kMalformedHeader, "missing DIMENSION");
  if (!in_coords) throw FormatError(FormatErrorKind::kMalformedHeader, "missing NODE_COORD_SECTION");

  std::vector<Point> pts;
  pts.reserve(*dimension);
  while (next_content_line(in, line, line_no)) {
    auto toks = split_ws(line);
    if (toks.size() == 1 && toks[0] == "EOF") break;
    if (toks.size() != 3) {
      throw FormatError(FormatErrorKind::kMalformedLine,
                        "line " + std::to_string(line_no) + ": expected '<id> <x> <y>'");
    }
    if (pts.size() == *dimension) {
      throw FormatError(FormatErrorKind::kCountMismatch,
                        "DIMENSION " + std::to_string(*dimension) + " but more nodes follow");
    }
    pts.push_back({finite_coord(toks[1], line_no), finite_coord(toks[2], line_no)});
  }
  if (pts.size() != *dimension) {
    throw FormatError(FormatErrorKind::kCountMismatch, "DIMENSION " + std::to_string(*dimension) +
                                                           ", found " + std::to_string(pts.size()) + " nodes");
  }
  return normalize(std::move(pts));
}

std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw FormatError(FormatErrorKind::kUnreadable, path.string());
  return in;
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw InstanceError("cannot write " + path.string());
  return out;
}

std::string format_g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

Instance parse_instance(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  if (!next_content_line(in, line, line_no)) {
    throw FormatError(FormatErrorKind::kMalformedHeader, "empty instance file");
  }
  auto toks = split_ws(line);
  if (toks.front() == "n") {
    const std::size_t n = parse_count_header(line);
    return parse_simple(in, n, line_no);
  }
  return parse_tsplib(in, line, line_no);
}

Instance read_instance(const std::filesystem::path& path) {
  auto in = open_in(path);
  return parse_instance(in);
}

void write_instance(std::ostream& out, const Instance& inst) {
  out << "n " << inst.size() << '\n';
  for (const auto& p : inst.coords()) {
    out << format_g17(p.x) << ' ' << format_g17(p.y) << '\n';
  }
}

void write_instance(const std::filesystem::path& path, const Instance& inst) {
  auto out = open_out(path);
  write_instance(out, inst);
}

TourFile parse_tour(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  if (!next_content_line(in, line, line_no)) {
    throw FormatError(FormatErrorKind::kMalformedHeader, "empty tour file");
  }
  const std::size_t n = parse_count_header(line);
  TourFile tf;
  tf.tour.reserve(n);
  if (!next_content_line(in, line, line_no)) {
    throw FormatError(FormatErrorKind::kCountMismatch, "missing tour line");
  }
  for (auto tok : split_ws(line)) {
    auto v = parse_int<Vertex>(tok);
    if (!v) throw FormatError(FormatErrorKind::kMalformedLine, "bad vertex '" + std::string(tok) + "'");
    tf.tour.push_back(*v);
  }
  if (tf.tour.size() != n) {
    throw FormatError(FormatErrorKind::kCountMismatch,
                      "header declares " + std::to_string(n) + " vertices, found " + std::to_string(tf.tour.size()));
  }
  if (!is_permutation_tour(tf.tour, n)) {
    throw FormatError(FormatErrorKind::kNotAPermutation, "tour line");
  }
  if (!next_content_line(in, line, line_no)) {
    throw FormatError(FormatErrorKind::kMalformedLine, "missing 'length <value>' line");
  }
  auto toks = split_ws(line);
  if (toks.size() != 2 || toks[0] != "length") {
    throw FormatError(FormatErrorKind::kMalformedLine, "expected 'length <value>'");
  }
  tf.length = finite_coord(toks[1], line_no);
  return tf;
}

TourFile read_tour(const std::filesystem::path& path) {
  auto in = open_in(path);
  return parse_tour(in);
}

void write_tour(std::ostream& out, std::span<const Vertex> tour, double length) {
  out << "n " << tour.size() << '\n';
  for (std::size_t i = 0; i < tour.size(); ++i) {
    if (i) out << ' ';
    out << tour[i];
  }
  out << '\n' << "length " << format_g17(length) << '\n';
}

void write_tour(const std::filesystem::path& path, std::span<const Vertex> tour, double length) {
  auto out = open_out(path);
  write_tour(out, tour, length);
}

}  // namespace hmtsp
