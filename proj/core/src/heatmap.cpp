#include "hmtsp/heatmap.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "hmtsp/io.hpp"
#include "hmtsp/spatial_grid.hpp"

namespace hmtsp {

HeatMap::HeatMap(std::size_t n, std::vector<HeatEntry> entries) : n_(n) {
  for (auto& e : entries) {
    if (e.i == e.j) throw std::invalid_argument("heat map: self loop at vertex " + std::to_string(e.i));
    if (e.i < 0 || e.j < 0 || static_cast<std::size_t>(e.i) >= n || static_cast<std::size_t>(e.j) >= n) {
      throw std::invalid_argument("heat map: edge (" + std::to_string(e.i) + "," + std::to_string(e.j) +
                                  ") out of range for n=" + std::to_string(n));
    }
    if (!(e.p >= 0.0 && e.p <= 1.0)) {
      throw std::invalid_argument("heat map: probability outside [0,1]");
    }
    if (e.i > e.j) std::swap(e.i, e.j);
  }
  std::sort(entries.begin(), entries.end(), [](const HeatEntry& a, const HeatEntry& b) {
    return a.i != b.i ? a.i < b.i : (a.j != b.j ? a.j < b.j : a.p > b.p);
  });
  // after the sort the first of each duplicate run carries the maximum
  entries.erase(std::unique(entries.begin(), entries.end(),
                            [](const HeatEntry& a, const HeatEntry& b) { return a.i == b.i && a.j == b.j; }),
                entries.end());
  entries_ = std::move(entries);

  offsets_.assign(n + 1, 0);
  for (const auto& e : entries_) {
    ++offsets_[e.i + 1];
    ++offsets_[e.j + 1];
  }
  for (std::size_t v = 0; v < n; ++v) offsets_[v + 1] += offsets_[v];
  adj_.resize(offsets_[n]);
  adj_p_.resize(offsets_[n]);
  std::vector<std::size_t> fill(offsets_.begin(), offsets_.end() - 1);
  // entries_ is sorted by (i, j): for each vertex the smaller neighbors (as j)
  // arrive before larger ones (as i), so adjacency ends up index-sorted.
  std::vector<std::vector<std::pair<Vertex, double>>> lower(n);
  for (const auto& e : entries_) lower[e.j].emplace_back(e.i, e.p);
  for (std::size_t v = 0; v < n; ++v) {
    for (auto [u, p] : lower[v]) {
      adj_[fill[v]] = u;
      adj_p_[fill[v]++] = p;
    }
  }
  for (const auto& e : entries_) {
    adj_[fill[e.i]] = e.j;
    adj_p_[fill[e.i]++] = e.p;
  }
}

std::optional<std::size_t> HeatMap::slot(Vertex a, Vertex b) const {
  if (a < 0 || static_cast<std::size_t>(a) >= n_) return std::nullopt;
  const auto first = adj_.begin() + static_cast<std::ptrdiff_t>(offsets_[a]);
  const auto last = adj_.begin() + static_cast<std::ptrdiff_t>(offsets_[a + 1]);
  const auto it = std::lower_bound(first, last, b);
  if (it == last || *it != b) return std::nullopt;
  return static_cast<std::size_t>(it - adj_.begin());
}

double HeatMap::at(Vertex a, Vertex b) const {
  const auto s = slot(a, b);
  return s ? adj_p_[*s] : 0.0;
}

namespace {

template <typename Value>
HeatMap knn_map(const Instance& inst, std::size_t kappa, Value value_for_rank) {
  const std::size_t n = inst.size();
  std::vector<HeatEntry> entries;
  if (n < 2 || kappa == 0) return HeatMap(n, {});
  const std::size_t k = std::min(kappa, n - 1);
  entries.reserve(n * k);
  SpatialGrid grid(inst.coords());
  for (std::size_t v = 0; v < n; ++v) {
    const auto nbrs = grid.nearest(static_cast<Vertex>(v), k);
    for (std::size_t r = 0; r < nbrs.size(); ++r) {
      entries.push_back({static_cast<Vertex>(v), nbrs[r], value_for_rank(r + 1)});
    }
  }
  return HeatMap(n, std::move(entries));
}

}  // namespace

HeatMap surrogate_heatmap(const Instance& inst, std::size_t kappa) {
  return knn_map(inst, kappa, [](std::size_t rank) { return std::ldexp(1.0, -static_cast<int>(rank)); });
}

HeatMap uniform_heatmap(const Instance& inst, std::size_t kappa, double value) {
  return knn_map(inst, kappa, [value](std::size_t) { return value; });
}

HeatMap complete_heatmap(std::size_t n, double value) {
  std::vector<HeatEntry> entries;
  entries.reserve(n * (n - 1) / 2);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      entries.push_back({static_cast<Vertex>(i), static_cast<Vertex>(j), value});
    }
  }
  return HeatMap(n, std::move(entries));
}

HeatMap prune_unpromising(const HeatMap& hm, const Instance& inst, double epsilon) {
  const std::size_t n = hm.size();
  if (inst.size() != n) throw std::invalid_argument("prune_unpromising: instance/heat map size mismatch");

  std::vector<HeatEntry> kept;
  kept.reserve(hm.edge_count());
  std::vector<std::size_t> degree(n, 0);
  for (const auto& e : hm.entries()) {
    if (e.p < epsilon) continue;
    kept.push_back(e);
    ++degree[e.i];
    ++degree[e.j];
  }
  const bool floor_needed =
      n >= 3 && std::any_of(degree.begin(), degree.end(), [](std::size_t d) { return d < 2; });
  if (!floor_needed) return HeatMap(n, std::move(kept));

  auto key = [](Vertex a, Vertex b) {
    return std::make_pair(std::min(a, b), std::max(a, b));
  };
  std::map<std::pair<Vertex, Vertex>, bool> present;
  for (const auto& e : kept) present[key(e.i, e.j)] = true;

  SpatialGrid grid(inst.coords());
  for (std::size_t v = 0; v < n; ++v) {
    if (degree[v] >= 2) continue;
    // kept degree < 2, so at most one neighbor is already linked
    const auto nbrs = grid.nearest(static_cast<Vertex>(v), 3);
    for (Vertex u : nbrs) {
      if (degree[v] >= 2) break;
      const auto k = key(static_cast<Vertex>(v), u);
      if (present.count(k)) continue;
      present[k] = true;
      kept.push_back({k.first, k.second, std::clamp(epsilon, 0.0, 1.0)});
      ++degree[v];
      ++degree[static_cast<std::size_t>(u)];
    }
  }
  return HeatMap(n, std::move(kept));
}

HeatMap parse_heatmap(std::istream& in, std::size_t n) {
  std::string line;
  std::size_t line_no = 0;
  auto next = [&]() -> bool {
    while (std::getline(in, line)) {
      ++line_no;
      if (line.find_first_not_of(" \t\r") != std::string::npos) return true;
    }
    return false;
  };
  if (!next()) throw FormatError(FormatErrorKind::kMalformedHeader, "empty heat-map file");
  {
    std::istringstream hs(line);
    std::string tag;
    std::size_t count = 0;
    std::string extra;
    if (!(hs >> tag >> count) || tag != "n" || (hs >> extra)) {
      throw FormatError(FormatErrorKind::kMalformedHeader, "expected 'n <count>'");
    }
    if (count != n) {
      throw FormatError(FormatErrorKind::kCountMismatch,
                        "heat map declares n=" + std::to_string(count) + ", instance has " + std::to_string(n));
    }
  }

  // orientation-preserving key: the same (i, j) twice must agree, while (i, j)
  // and (j, i) are symmetrized by max in the HeatMap constructor
  std::map<std::pair<Vertex, Vertex>, double> seen;
  std::vector<HeatEntry> entries;
  while (next()) {
    std::istringstream ls(line);
    long long i = 0, j = 0;
    std::string ptok, extra;
    if (!(ls >> i >> j >> ptok) || (ls >> extra)) {
      throw FormatError(FormatErrorKind::kMalformedLine, "line " + std::to_string(line_no) + ": expected '<i> <j> <p>'");
    }
    if (i < 0 || j < 0 || static_cast<std::size_t>(i) >= n || static_cast<std::size_t>(j) >= n || i == j) {
      throw FormatError(FormatErrorKind::kIndexOutOfRange,
                        "line " + std::to_string(line_no) + ": edge (" + std::to_string(i) + "," + std::to_string(j) + ")");
    }
    char* end = nullptr;
    const double p = std::strtod(ptok.c_str(), &end);
    if (end != ptok.c_str() + ptok.size()) {
      throw FormatError(FormatErrorKind::kMalformedLine, "line " + std::to_string(line_no) + ": bad probability");
    }
    if (!std::isfinite(p)) {
      throw FormatError(FormatErrorKind::kNonFinite, "line " + std::to_string(line_no));
    }
    if (p < 0.0 || p > 1.0) {
      throw FormatError(FormatErrorKind::kProbabilityOutOfRange,
                        "line " + std::to_string(line_no) + ": p=" + ptok);
    }
    const auto key = std::make_pair(static_cast<Vertex>(i), static_cast<Vertex>(j));
    if (auto it = seen.find(key); it != seen.end()) {
      if (std::abs(it->second - p) > 1e-12) {
        throw FormatError(FormatErrorKind::kConflictingDuplicate,
                          "line " + std::to_string(line_no) + ": edge (" + std::to_string(i) + "," + std::to_string(j) + ")");
      }
      continue;
    }
    seen.emplace(key, p);
    entries.push_back({key.first, key.second, p});
  }
  return HeatMap(n, std::move(entries));
}

HeatMap load_heatmap(const std::filesystem::path& path, std::size_t n) {
  std::ifstream in(path);
  if (!in) throw FormatError(FormatErrorKind::kUnreadable, path.string());
  return parse_heatmap(in, n);
}

void write_heatmap(std::ostream& out, const HeatMap& hm) {
  out << "n " << hm.size() << '\n';
  char buf[48];
  for (const auto& e : hm.entries()) {
    std::snprintf(buf, sizeof buf, "%.17g", e.p);
    out << e.i << ' ' << e.j << ' ' << buf << '\n';
  }
}

void write_heatmap(const std::filesystem::path& path, const HeatMap& hm) {
  std::ofstream out(path);
  if (!out) throw InstanceError("cannot write " + path.string());
  write_heatmap(out, hm);
}

}  // namespace hmtsp
