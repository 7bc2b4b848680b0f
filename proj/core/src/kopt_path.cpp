#include "hmtsp/kopt.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>
#include <string>

namespace hmtsp {

std::vector<Vertex> Action::sequence() const {
  std::vector<Vertex> seq;
  seq.reserve(2 * a.size() + 1);
  for (std::size_t i = 0; i < a.size(); ++i) {
    seq.push_back(a[i]);
    seq.push_back(b[i]);
  }
  if (!a.empty()) seq.push_back(a.front());
  return seq;
}

double action_delta(const Instance& inst, const Action& action) {
  double added = 0.0;
  double removed = 0.0;
  for (std::size_t i = 0; i < action.k(); ++i) {
    added += inst.dist(action.b[i], action.next_a(i));
    removed += inst.dist(action.a[i], action.b[i]);
  }
  return added - removed;
}

void KOptPath::reset(const TourArray& tour, Vertex a1) {
  tour_ = &tour;
  head_ = a1;
  runs_.clear();
  const std::size_t n = tour.size();
  const std::size_t p = tour.pos(a1);
  // a1 backwards around the cycle down to succ(a1)
  runs_.push_back({p, (p + 1) % n, false});
}

std::size_t KOptPath::run_length(const Run& r) const {
  const std::size_t n = tour_->size();
  return (r.forward ? (r.last + n - r.first) : (r.first + n - r.last)) % n + 1;
}

std::size_t KOptPath::run_pos(const Run& r, std::size_t offset) const {
  const std::size_t n = tour_->size();
  return r.forward ? (r.first + offset) % n : (r.first + n - offset % n) % n;
}

std::pair<std::size_t, std::size_t> KOptPath::locate(Vertex v) const {
  const std::size_t n = tour_->size();
  const std::size_t p = tour_->pos(v);
  for (std::size_t s = 0; s < runs_.size(); ++s) {
    const Run& r = runs_[s];
    const std::size_t off = r.forward ? (p + n - r.first) % n : (r.first + n - p) % n;
    if (off < run_length(r)) return {s, off};
  }
  throw std::logic_error("KOptPath: vertex not on path");
}

Vertex KOptPath::tail() const { return tour_->at(runs_.back().last); }

Vertex KOptPath::tail_neighbor() const {
  const Run& r = runs_.back();
  const std::size_t len = run_length(r);
  if (len >= 2) return tour_->at(run_pos(r, len - 2));
  return tour_->at(runs_[runs_.size() - 2].last);
}

std::optional<Vertex> KOptPath::next_toward_tail(Vertex j) const {
  const auto [s, off] = locate(j);
  const Run& r = runs_[s];
  if (off + 1 < run_length(r)) return tour_->at(run_pos(r, off + 1));
  if (s + 1 < runs_.size()) return tour_->at(runs_[s + 1].first);
  return std::nullopt;
}

Vertex KOptPath::extend(Vertex j) {
  const auto [s, off] = locate(j);
  const Run r = runs_[s];
  const std::size_t len = run_length(r);
  if (s + 1 == runs_.size() && off + 1 == len) {
    throw std::logic_error("KOptPath::extend: vertex is the tail");
  }
  // Path = P[0..t] (ends at j) + P[t+1..end]. The new path is
  // P[0..t] followed by P[t+1..end] reversed.
  scratch_.assign(runs_.begin(), runs_.begin() + static_cast<std::ptrdiff_t>(s));
  scratch_.push_back({r.first, run_pos(r, off), r.forward});
  auto flip = [](const Run& x) { return Run{x.last, x.first, !x.forward}; };
  for (std::size_t t = runs_.size(); t-- > s + 1;) scratch_.push_back(flip(runs_[t]));
  if (off + 1 < len) scratch_.push_back(flip(Run{run_pos(r, off + 1), r.last, r.forward}));
  std::swap(runs_, scratch_);
  return tail();
}

std::vector<Vertex> KOptPath::cycle() const {
  std::vector<Vertex> out;
  out.reserve(tour_->size());
  for (const Run& r : runs_) {
    const std::size_t len = run_length(r);
    for (std::size_t off = 0; off < len; ++off) out.push_back(tour_->at(run_pos(r, off)));
  }
  return out;
}

namespace {

std::pair<Vertex, Vertex> undirected(Vertex a, Vertex b) { return {std::min(a, b), std::max(a, b)}; }

}  // namespace

Action complete_action(const Instance& inst, const TourArray& tour, std::vector<Vertex> a) {
  if (a.size() < 2) throw std::invalid_argument("action needs k >= 2");
  KOptPath path(tour, a.front());
  Action act;
  act.a = std::move(a);
  act.b.push_back(path.tail());
  std::set<std::pair<Vertex, Vertex>> removed{undirected(act.a[0], act.b[0])};
  std::set<std::pair<Vertex, Vertex>> added;
  for (std::size_t i = 1; i < act.a.size(); ++i) {
    const Vertex ai = act.a[i];
    const Vertex end = path.tail();
    if (ai == path.head() || ai == end || ai == path.tail_neighbor()) {
      throw std::invalid_argument("invalid sub-decision a_" + std::to_string(i + 1));
    }
    const Vertex bi = *path.next_toward_tail(ai);
    if (removed.count(undirected(end, ai)) || !added.insert(undirected(end, ai)).second) {
      throw std::invalid_argument("added edge repeats a removed or added edge");
    }
    if (added.count(undirected(ai, bi)) || !removed.insert(undirected(ai, bi)).second) {
      throw std::invalid_argument("removed edge repeats an added or removed edge");
    }
    path.extend(ai);
    act.b.push_back(bi);
  }
  const auto closing = undirected(act.b.back(), act.a.front());
  if (removed.count(closing) || !added.insert(closing).second) {
    throw std::invalid_argument("closing edge repeats a removed or added edge");
  }
  act.delta = action_delta(inst, act);
  return act;
}

void apply_action(TourArray& tour, const Action& action) {
  if (action.k() < 2 || action.b.size() != action.k()) throw std::invalid_argument("malformed action");
  KOptPath path(tour, action.a.front());
  if (path.tail() != action.b.front()) throw std::invalid_argument("b_1 is not the successor of a_1");
  for (std::size_t i = 1; i < action.k(); ++i) {
    const Vertex ai = action.a[i];
    if (ai == path.head() || ai == path.tail() || ai == path.tail_neighbor()) {
      throw std::invalid_argument("invalid sub-decision in action");
    }
    if (path.next_toward_tail(ai) != action.b[i]) throw std::invalid_argument("b_i does not match tour");
    path.extend(ai);
  }
  const auto order = path.cycle();
  tour.assign(order);
}

}  // namespace hmtsp
