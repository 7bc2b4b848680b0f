#include "hmtsp/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include "hmtsp/io.hpp"

namespace hmtsp {

std::uint32_t CoverageCounters::edge_count(Vertex a, Vertex b) const {
  const auto it = edge_.find(edge_key(a, b));
  return it == edge_.end() ? 0 : it->second;
}

std::uint32_t CoverageCounters::min_vertex_count() const {
  if (vertex_.empty()) return 0;
  return *std::min_element(vertex_.begin(), vertex_.end());
}

void CoverageCounters::add_sample(std::span<const Vertex> members, std::uint32_t times) {
  for (std::size_t a = 0; a < members.size(); ++a) {
    vertex_[static_cast<std::size_t>(members[a])] += times;
    for (std::size_t b = a + 1; b < members.size(); ++b) {
      edge_[edge_key(members[a], members[b])] += times;
    }
  }
}

std::size_t default_sample_size(std::size_t n) {
  const std::size_t m = n <= 100 ? 20 : 50;
  return std::min(m, n);
}

SubGraphSample sample_around(const Instance& inst, const SpatialGrid& grid, Vertex center, std::size_t m) {
  if (m < 2 || m > inst.size()) {
    throw InstanceError("sample size m=" + std::to_string(m) + " must lie in [2, n=" + std::to_string(inst.size()) + "]");
  }
  SubGraphSample s;
  s.center = center;
  s.members.reserve(m);
  s.members.push_back(center);
  for (Vertex v : grid.nearest(center, m - 1)) s.members.push_back(v);

  double x_min = inst[center].x, x_max = x_min, y_min = inst[center].y, y_max = y_min;
  for (Vertex v : s.members) {
    x_min = std::min(x_min, inst[v].x);
    x_max = std::max(x_max, inst[v].x);
    y_min = std::min(y_min, inst[v].y);
    y_max = std::max(y_max, inst[v].y);
  }
  const double extent = std::max(x_max - x_min, y_max - y_min);
  if (!(extent > 0.0)) {
    throw DegenerateSampleError("all members of the sample around vertex " + std::to_string(center) + " coincide");
  }
  s.conversion = {1.0 / extent, x_min, y_min};
  return s;
}

SubGraphSample extract_subgraph(const Instance& inst, const SpatialGrid& grid, CoverageCounters& counters,
                                std::size_t m, Rng& rng) {
  if (m > inst.size()) {
    throw InstanceError("sample size m=" + std::to_string(m) + " exceeds n=" + std::to_string(inst.size()));
  }
  const std::uint32_t low = counters.min_vertex_count();
  std::vector<Vertex> minimizers;
  for (std::size_t v = 0; v < counters.size(); ++v) {
    if (counters.vertex_count(static_cast<Vertex>(v)) == low) minimizers.push_back(static_cast<Vertex>(v));
  }
  constexpr int kMaxRedraws = 100;
  for (int attempt = 0; attempt < kMaxRedraws && !minimizers.empty(); ++attempt) {
    const std::size_t pick = static_cast<std::size_t>(rng.uniform_index(minimizers.size()));
    const Vertex center = minimizers[pick];
    try {
      SubGraphSample s = sample_around(inst, grid, center, m);
      counters.add_sample(s.members);
      return s;
    } catch (const DegenerateSampleError&) {
      minimizers[pick] = minimizers.back();
      minimizers.pop_back();
    }
  }
  throw DegenerateSampleError("no non-degenerate sample after repeated redraws");
}

Instance convert_subgraph(const Instance& inst, const SubGraphSample& sample) {
  const auto& c = sample.conversion;
  if (!(c.scale > 0.0) || !std::isfinite(c.scale)) {
    throw DegenerateSampleError("sample has no spatial extent");
  }
  // divide by the extent rather than multiply by its reciprocal so that the
  // extremal member lands exactly on 1
  const double extent = 1.0 / c.scale;
  double x_max = -std::numeric_limits<double>::infinity();
  double y_max = x_max;
  for (Vertex v : sample.members) {
    x_max = std::max(x_max, inst[v].x);
    y_max = std::max(y_max, inst[v].y);
  }
  const double span_x = x_max - c.x_offset;
  const double span_y = y_max - c.y_offset;
  const double denom = std::max(span_x, span_y) > 0.0 ? std::max(span_x, span_y) : extent;

  std::vector<Point> pts;
  pts.reserve(sample.members.size());
  for (Vertex v : sample.members) {
    pts.push_back({std::clamp((inst[v].x - c.x_offset) / denom, 0.0, 1.0),
                   std::clamp((inst[v].y - c.y_offset) / denom, 0.0, 1.0)});
  }
  return Instance(std::move(pts), c);
}

void AccumulatedMap::add(std::span<const Vertex> members, const HeatMap& submap, std::uint32_t times) {
  for (const auto& e : submap.entries()) {
    if (e.p == 0.0) continue;
    sums_[edge_key(members[static_cast<std::size_t>(e.i)], members[static_cast<std::size_t>(e.j)])] +=
        e.p * static_cast<double>(times);
  }
}

HeatMap average_submaps(const AccumulatedMap& acc, const CoverageCounters& counters) {
  std::vector<HeatEntry> entries;
  entries.reserve(acc.sums().size());
  for (const auto& [key, sum] : acc.sums()) {
    const auto [i, j] = edge_from_key(key);
    const std::uint32_t o = counters.edge_count(i, j);
    if (o == 0 || sum <= 0.0) continue;
    entries.push_back({i, j, std::min(1.0, sum / static_cast<double>(o))});
  }
  return HeatMap(counters.size(), std::move(entries));
}

HeatMap merge_submaps(const Instance& inst, const AccumulatedMap& acc, const CoverageCounters& counters,
                      double epsilon) {
  return prune_unpromising(average_submaps(acc, counters), inst, epsilon);
}

PipelineResult build_global_heatmap(const Instance& inst, const HeatMapProvider& provider,
                                    const PipelineOptions& options, Rng& rng) {
  const std::size_t n = inst.size();
  const std::size_t m = options.m == 0 ? default_sample_size(n) : options.m;
  if (m < 2 || m > n) {
    throw InstanceError("sample size m=" + std::to_string(m) + " must lie in [2, n=" + std::to_string(n) + "]");
  }
  if (options.omega < 1) throw InstanceError("omega must be at least 1");

  PipelineResult result;
  result.counters = CoverageCounters(n);
  AccumulatedMap acc;
  SpatialGrid grid(inst.coords());

  if (m == n) {
    // every sample would be the whole instance: predict once, count omega times
    SubGraphSample s;
    Vertex center = static_cast<Vertex>(rng.uniform_index(n));
    s = sample_around(inst, grid, center, m);
    SampleRecord rec{s, provider.predict(convert_subgraph(inst, s))};
    result.counters.add_sample(s.members, options.omega);
    acc.add(s.members, rec.submap, options.omega);
    result.provider_calls = 1;
    result.samples = options.omega;
    if (options.on_sample) {
      for (std::uint32_t r = 0; r < options.omega; ++r) options.on_sample(rec);
    }
  } else {
    while (result.counters.min_vertex_count() < options.omega) {
      SampleRecord rec;
      rec.sample = extract_subgraph(inst, grid, result.counters, m, rng);
      rec.submap = provider.predict(convert_subgraph(inst, rec.sample));
      acc.add(rec.sample.members, rec.submap);
      ++result.samples;
      ++result.provider_calls;
      if (options.on_sample) options.on_sample(rec);
    }
  }
  result.heatmap = merge_submaps(inst, acc, result.counters, options.epsilon);
  return result;
}

PipelineResult merge_sample_records(const Instance& inst, std::span<const SampleRecord> records, double epsilon) {
  PipelineResult result;
  result.counters = CoverageCounters(inst.size());
  AccumulatedMap acc;
  for (const auto& rec : records) {
    result.counters.add_sample(rec.sample.members);
    acc.add(rec.sample.members, rec.submap);
    ++result.samples;
  }
  result.heatmap = merge_submaps(inst, acc, result.counters, epsilon);
  return result;
}

namespace {

std::filesystem::path record_path(const std::filesystem::path& dir, std::size_t index, const char* ext) {
  char name[64];
  std::snprintf(name, sizeof name, "sub_%06zu.%s", index, ext);
  return dir / name;
}

}  // namespace

void write_sample_record(const std::filesystem::path& dir, std::size_t index, const Instance& inst,
                         const SampleRecord& record) {
  std::filesystem::create_directories(dir);
  {
    std::ofstream out(record_path(dir, index, "members"));
    if (!out) throw InstanceError("cannot write sample members into " + dir.string());
    out << "n " << record.sample.members.size() << '\n';
    for (std::size_t i = 0; i < record.sample.members.size(); ++i) {
      out << (i ? " " : "") << record.sample.members[i];
    }
    out << '\n';
  }
  write_instance(record_path(dir, index, "tsp"), convert_subgraph(inst, record.sample));
  write_heatmap(record_path(dir, index, "heat"), record.submap);
}

std::vector<SampleRecord> read_sample_records(const std::filesystem::path& dir, const Instance& inst) {
  std::vector<SampleRecord> out;
  for (std::size_t index = 0;; ++index) {
    const auto members_path = record_path(dir, index, "members");
    if (!std::filesystem::exists(members_path)) break;
    std::ifstream in(members_path);
    std::string tag;
    std::size_t m = 0;
    if (!(in >> tag >> m) || tag != "n") {
      throw FormatError(FormatErrorKind::kMalformedHeader, members_path.string());
    }
    SampleRecord rec;
    rec.sample.members.resize(m);
    for (auto& v : rec.sample.members) {
      if (!(in >> v)) throw FormatError(FormatErrorKind::kCountMismatch, members_path.string());
      if (v < 0 || static_cast<std::size_t>(v) >= inst.size()) {
        throw FormatError(FormatErrorKind::kIndexOutOfRange, members_path.string());
      }
    }
    if (m == 0) throw FormatError(FormatErrorKind::kCountMismatch, members_path.string());
    rec.sample.center = rec.sample.members.front();
    rec.submap = load_heatmap(record_path(dir, index, "heat"), m);
    out.push_back(std::move(rec));
  }
  if (out.empty()) throw FormatError(FormatErrorKind::kUnreadable, "no sub_*.members files in " + dir.string());
  return out;
}

}  // namespace hmtsp
