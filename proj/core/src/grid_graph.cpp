#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <queue>
#include <sstream>

#include "ccdist/distance.hpp"
#include "ccdist/errors.hpp"
#include "ccdist/functionals.hpp"

namespace ccdist {

std::vector<GraphMove> flow_word_moves(int dim_k, double tau, int max_letters) {
  if (dim_k < 1) throw InvalidArgument("flow_word_moves needs dim_k >= 1");
  if (!(tau > 0.0)) throw InvalidArgument("move time tau must be positive");
  if (max_letters < 1 || max_letters > 2) throw InvalidArgument("max_letters must be 1 or 2");
  std::vector<GraphMove> moves;
  const double signs[2] = {1.0, -1.0};
  for (int i = 0; i < dim_k; ++i) {
    for (double s : signs) {
      FlowWord w{{{i, s * tau}}};
      std::ostringstream label;
      label << (s > 0 ? "+" : "-") << i;
      moves.push_back({concat_control(w, dim_k), label.str()});
    }
  }
  if (max_letters == 2) {
    for (int i = 0; i < dim_k; ++i) {
      for (int j = 0; j < dim_k; ++j) {
        if (i == j) continue;
        for (double s : signs) {
          for (double r : signs) {
            FlowWord w{{{i, s * tau}, {j, r * tau}}};
            std::ostringstream label;
            label << (s > 0 ? "+" : "-") << i << (r > 0 ? "+" : "-") << j;
            moves.push_back({concat_control(w, dim_k), label.str()});
          }
        }
      }
    }
  }
  return moves;
}

std::vector<GraphMove> chord_moves(int dim_k, double tau, int radius) {
  if (dim_k < 1 || radius < 1) throw InvalidArgument("chord_moves needs dim_k, radius >= 1");
  if (!(tau > 0.0)) throw InvalidArgument("move time tau must be positive");
  std::vector<GraphMove> moves;
  std::vector<int> c(static_cast<std::size_t>(dim_k), -radius);
  while (true) {
    int g = 0;
    for (int v : c) g = std::gcd(g, std::abs(v));
    if (g == 1) {
      Vec value(dim_k);
      std::ostringstream label;
      label << "c";
      for (int i = 0; i < dim_k; ++i) {
        value(i) = tau * c[static_cast<std::size_t>(i)];
        label << (i ? "," : "(") << c[static_cast<std::size_t>(i)];
      }
      label << ")";
      moves.push_back({PiecewiseConstantControl::constant(value), label.str()});
    }
    int axis = 0;
    while (axis < dim_k && ++c[static_cast<std::size_t>(axis)] > radius) {
      c[static_cast<std::size_t>(axis)] = -radius;
      ++axis;
    }
    if (axis == dim_k) break;
  }
  return moves;
}

void GridGraphSpec::validate(int dim_m) const {
  if (static_cast<int>(resolution.size()) != dim_m) {
    throw DimensionMismatch("grid resolution needs one entry per axis");
  }
  for (int r : resolution) {
    if (r < 2) throw InvalidArgument("grid resolution must be >= 2 per axis");
  }
  if (!(tau > 0.0) || tau > 1.0) throw InvalidArgument("grid tau must lie in (0, 1]");
  if (moves.empty()) throw InvalidArgument("grid move set is empty");
  if (!(snap_tolerance >= 0.0)) throw InvalidArgument("snap tolerance must be >= 0");
  if (steps_per_move < 1) throw InvalidArgument("steps_per_move must be >= 1");
}

namespace {

class Lattice {
 public:
  Lattice(const GridGraphSpec& spec, const ChartBox& box)
      : box_(box), res_(spec.resolution), spacing_(box.dim()) {
    size_ = 1;
    for (int i = 0; i < box.dim(); ++i) {
      spacing_(i) = box.widths()(i) / (res_[static_cast<std::size_t>(i)] - 1);
      size_ *= static_cast<std::size_t>(res_[static_cast<std::size_t>(i)]);
    }
  }

  std::size_t size() const { return size_; }

  // Axis 0 is the most significant digit, so index order is lexicographic.
  Vec point(std::size_t index) const {
    Vec x(box_.dim());
    for (int i = box_.dim() - 1; i >= 0; --i) {
      const auto r = static_cast<std::size_t>(res_[static_cast<std::size_t>(i)]);
      x(i) = box_.lower()(i) + spacing_(i) * static_cast<double>(index % r);
      index /= r;
    }
    return x;
  }

  // Nearest node, or false when x lies off the lattice.
  bool snap(const Vec& x, std::size_t& index, double& gap) const {
    index = 0;
    Vec node(box_.dim());
    for (int i = 0; i < box_.dim(); ++i) {
      const double c = std::round((x(i) - box_.lower()(i)) / spacing_(i));
      const int r = res_[static_cast<std::size_t>(i)];
      if (!(c >= 0.0 && c <= r - 1)) return false;
      index = index * static_cast<std::size_t>(r) + static_cast<std::size_t>(c);
      node(i) = box_.lower()(i) + spacing_(i) * c;
    }
    gap = (x - node).norm();
    return true;
  }

 private:
  const ChartBox& box_;
  std::vector<int> res_;
  Vec spacing_;
  std::size_t size_ = 0;
};

struct Edge {
  std::size_t target;
  double weight;
};

class GraphSearch {
 public:
  GraphSearch(const VectorFieldStructure& f, const VaryingNorm& norm, const GridGraphSpec& spec,
              const ChartBox& box)
      : f_(f), norm_(norm), spec_(spec), lattice_(spec, box) {
    if (box.dim() != f.dim_m()) throw DimensionMismatch("grid box and structure dimensions differ");
    if (norm.dim_k() != f.dim_k()) throw DimensionMismatch("norm and structure dimensions differ");
    spec.validate(f.dim_m());
    for (const auto& move : spec.moves) {
      if (move.control.dim_k() != f.dim_k()) throw DimensionMismatch("move control dimension differs from k");
      packed_.push_back(move.control.packed());
    }
    bounds_ = detail::make_bounds(box, 0.0);
  }

  const Lattice& lattice() const { return lattice_; }
  long evaluations() const { return evaluations_; }

  std::size_t require_node(const Vec& x, const char* what) const {
    std::size_t index = 0;
    double gap = 0.0;
    if (x.size() != f_.dim_m() || !lattice_.snap(x, index, gap) ||
        gap > spec_.snap_tolerance + 1e-12) {
      throw InvalidArgument(std::string(what) + " " + format_point(x) +
                            " is not within the snap tolerance of a lattice node");
    }
    return index;
  }

  // Dijkstra from `source`; stops after popping `stop` or passing `cutoff`.
  void run(std::size_t source, std::optional<std::size_t> stop, double cutoff) {
    dist_.assign(lattice_.size(), std::numeric_limits<double>::infinity());
    parent_.assign(lattice_.size(), kNone);
    parent_move_.assign(lattice_.size(), -1);
    done_.assign(lattice_.size(), false);
    using Item = std::pair<double, std::size_t>;
    std::priority_queue<Item, std::vector<Item>, std::greater<Item>> queue;
    dist_[source] = 0.0;
    queue.push({0.0, source});
    std::vector<Vec> states;
    while (!queue.empty()) {
      const auto [d, node] = queue.top();
      queue.pop();
      if (done_[node] || d > dist_[node]) continue;
      if (d > cutoff) break;
      done_[node] = true;
      if (stop && node == *stop) break;
      const Vec x = lattice_.point(node);
      for (std::size_t m = 0; m < spec_.moves.size(); ++m) {
        Edge e;
        if (!edge(x, m, states, e)) continue;
        const double nd = d + e.weight;
        // Ties go to the lexicographically smaller parent.
        if (nd < dist_[e.target] ||
            (nd == dist_[e.target] && !done_[e.target] && node < parent_[e.target])) {
          dist_[e.target] = nd;
          parent_[e.target] = node;
          parent_move_[e.target] = static_cast<int>(m);
          queue.push({nd, e.target});
        }
      }
    }
  }

  double distance(std::size_t node) const { return dist_[node]; }
  bool settled(std::size_t node) const { return done_[node]; }

  GraphPath path_to(std::size_t target) const {
    GraphPath path;
    for (std::size_t n = target; n != kNone; n = parent_[n]) {
      path.nodes.push_back(n);
      if (parent_[n] != kNone) path.moves.push_back(parent_move_[n]);
    }
    std::reverse(path.nodes.begin(), path.nodes.end());
    std::reverse(path.moves.begin(), path.moves.end());
    return path;
  }

 private:
  static constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();

  bool edge(const Vec& x, std::size_t m, std::vector<Vec>& states, Edge& e) {
    ++evaluations_;
    const PiecewiseConstantControl& u = spec_.moves[m].control;
    const int steps = spec_.steps_per_move;
    Vec arrival;
    double weight = 0.0;
    if (u.is_uniform()) {
      if (detail::integrate_uniform(x, f_, packed_[m], f_.dim_k(), u.segments(), steps, bounds_,
                                    states) != detail::IntegrationStatus::kOk) {
        return false;
      }
      arrival = states.back();
      const double h = 1.0 / (static_cast<double>(u.segments()) * steps);
      for (int j = 0; j < u.segments(); ++j) {
        const Vec& value = u.value(j);
        if (value.isZero(0.0)) continue;
        if (!norm_.position_dependent()) {
          weight += h * steps * norm_(x, value);
          continue;
        }
        const std::size_t s = static_cast<std::size_t>(j) * steps;
        double prev = norm_(states[s], value);
        for (int i = 1; i <= steps; ++i) {
          const double cur = norm_(states[s + static_cast<std::size_t>(i)], value);
          weight += 0.5 * h * (prev + cur);
          prev = cur;
        }
      }
    } else {
      EndpointOptions opts;
      opts.steps_per_segment = steps;
      try {
        const Trajectory traj = endpoint(x, f_, u, opts);
        arrival = traj.end();
        if (bounds_.active) {
          for (const Vec& p : traj.points) {
            for (Eigen::Index i = 0; i < p.size(); ++i) {
              if (p(i) < bounds_.lower(i) || p(i) > bounds_.upper(i)) return false;
            }
          }
        }
        weight = length(traj, norm_);
      } catch (const Error&) {
        return false;
      }
    }
    double gap = 0.0;
    if (!lattice_.snap(arrival, e.target, gap) || gap > spec_.snap_tolerance + 1e-12) return false;
    e.weight = weight;
    return std::isfinite(weight);
  }

  const VectorFieldStructure& f_;
  const VaryingNorm& norm_;
  const GridGraphSpec& spec_;
  Lattice lattice_;
  std::vector<VecX> packed_;
  detail::BoxBounds bounds_;
  std::vector<double> dist_;
  std::vector<std::size_t> parent_;
  std::vector<int> parent_move_;
  std::vector<bool> done_;
  long evaluations_ = 0;
};

}  // namespace

DistanceEstimate cc_distance_graph(const Vec& p, const Vec& q, const VectorFieldStructure& f,
                                   const VaryingNorm& norm, const GridGraphSpec& spec,
                                   const ChartBox& box, GraphPath* path) {
  GraphSearch search(f, norm, spec, box);
  const std::size_t source = search.require_node(p, "start point");
  const std::size_t target = search.require_node(q, "target point");
  DistanceEstimate est;
  est.method = DistanceMethod::kGridGraph;
  if (source == target) {
    est.value = 0.0;
    est.converged = true;
    est.found = true;
    if (path) *path = GraphPath{{source}, {}};
    return est;
  }
  search.run(source, target, std::numeric_limits<double>::infinity());
  est.evaluations = search.evaluations();
  if (!search.settled(target)) {
    est.found = false;
    est.converged = false;
    est.value = 0.0;
    if (path) *path = GraphPath{};
    return est;
  }
  est.value = search.distance(target);
  est.found = true;
  est.converged = true;
  const GraphPath route = search.path_to(target);
  std::vector<PiecewiseConstantControl> parts;
  for (int m : route.moves) parts.push_back(spec.moves[static_cast<std::size_t>(m)].control);
  if (!parts.empty()) {
    est.best_control = PiecewiseConstantControl::concatenate(parts);
    // Distance from the lattice end point of the (unsnapped) route to q.
    EndpointOptions opts;
    opts.steps_per_segment = spec.steps_per_move;
    try {
      est.endpoint_residual = (end_point(p, f, *est.best_control, opts) - q).norm();
    } catch (const Error&) {
      est.endpoint_residual = std::numeric_limits<double>::infinity();
    }
  }
  if (path) *path = route;
  return est;
}

std::vector<BallPoint> metric_ball(const Vec& p, double r, const VectorFieldStructure& f,
                                   const VaryingNorm& norm, const GridGraphSpec& spec,
                                   const ChartBox& box) {
  if (!(r > 0.0)) throw InvalidArgument("ball radius must be positive");
  GraphSearch search(f, norm, spec, box);
  const std::size_t source = search.require_node(p, "ball center");
  search.run(source, std::nullopt, r);
  std::vector<BallPoint> ball;
  for (std::size_t n = 0; n < search.lattice().size(); ++n) {
    if (search.settled(n) && search.distance(n) <= r) {
      ball.push_back({search.lattice().point(n), search.distance(n)});
    }
  }
  return ball;
}

}  // namespace ccdist
