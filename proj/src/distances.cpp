#include "wdistlab/distances.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <numeric>
#include <stdexcept>

#include "wdistlab/mlp.hpp"

namespace wdistlab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require_same_support(const DiscreteDistribution& p, const DiscreteDistribution& q) {
  if (p.size() != q.size()) {
    throw std::invalid_argument("support length mismatch: " + std::to_string(p.size()) + " vs " +
                                std::to_string(q.size()));
  }
}

void require_same_dim(const EmpiricalMeasure& p, const EmpiricalMeasure& q) {
  if (p.dim() != q.dim()) {
    throw std::invalid_argument("dimension mismatch: " + std::to_string(p.dim()) + " vs " +
                                std::to_string(q.dim()));
  }
}

// p log(p / m) with the 0 log 0 = 0 convention; m >= p / 2 > 0 whenever p > 0.
double kl_term(double p, double m) { return p > 0.0 ? p * std::log(p / m) : 0.0; }

}  // namespace

double tv_discrete(const DiscreteDistribution& p, const DiscreteDistribution& q) {
  require_same_support(p, q);
  double l1 = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) l1 += std::abs(p[i] - q[i]);
  return std::min(1.0, 0.5 * l1);
}

double kl_discrete(const DiscreteDistribution& p, const DiscreteDistribution& q) {
  require_same_support(p, q);
  double kl = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] == 0.0) continue;
    if (q[i] == 0.0) return kInf;
    kl += p[i] * std::log(p[i] / q[i]);
  }
  return std::max(0.0, kl);
}

double js_discrete(const DiscreteDistribution& p, const DiscreteDistribution& q) {
  require_same_support(p, q);
  double js = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double m = 0.5 * (p[i] + q[i]);
    js += 0.5 * kl_term(p[i], m) + 0.5 * kl_term(q[i], m);
  }
  return std::clamp(js, 0.0, std::numbers::ln2);
}

double w1_1d(const EmpiricalMeasure& p, const EmpiricalMeasure& q) {
  if (p.dim() != 1 || q.dim() != 1) throw std::invalid_argument("w1_1d: measures must be one-dimensional");
  if (p.size() != q.size() || !p.has_uniform_weights() || !q.has_uniform_weights()) {
    throw std::invalid_argument("w1_1d: requires equal-size uniformly weighted measures");
  }
  std::vector<double> a(p.points().col(0).begin(), p.points().col(0).end());
  std::vector<double> b(q.points().col(0).begin(), q.points().col(0).end());
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  double total = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) total += std::abs(a[i] - b[i]);
  return total / static_cast<double>(a.size());
}

Matrix euclidean_cost(const Matrix& x, const Matrix& y) {
  if (x.cols() != y.cols()) throw std::invalid_argument("euclidean_cost: dimension mismatch");
  Matrix c(x.rows(), y.rows());
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    for (Eigen::Index j = 0; j < y.rows(); ++j) c(i, j) = (x.row(i) - y.row(j)).norm();
  }
  return c;
}

std::vector<std::size_t> solve_assignment(const Matrix& cost) {
  if (cost.rows() != cost.cols()) throw std::invalid_argument("solve_assignment: cost must be square");
  if (!cost.allFinite()) throw std::invalid_argument("solve_assignment: non-finite cost");
  const auto n = static_cast<std::size_t>(cost.rows());
  // 1-based potentials; column 0 is a virtual source.
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
  std::vector<std::size_t> match(n + 1, 0), way(n + 1, 0);
  std::vector<double> minv(n + 1);
  std::vector<char> used(n + 1);
  for (std::size_t i = 1; i <= n; ++i) {
    match[0] = i;
    std::size_t j0 = 0;
    std::fill(minv.begin(), minv.end(), kInf);
    std::fill(used.begin(), used.end(), 0);
    do {
      used[j0] = 1;
      const std::size_t i0 = match[j0];
      double delta = kInf;
      std::size_t j1 = 0;
      for (std::size_t j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = cost(static_cast<Eigen::Index>(i0 - 1), static_cast<Eigen::Index>(j - 1)) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (std::size_t j = 0; j <= n; ++j) {
        if (used[j]) {
          u[match[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (match[j0] != 0);
    do {
      const std::size_t j1 = way[j0];
      match[j0] = match[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  std::vector<std::size_t> assignment(n);
  for (std::size_t j = 1; j <= n; ++j) assignment[match[j] - 1] = j - 1;
  return assignment;
}

namespace {

// Basis of the transportation simplex: a spanning tree over n row nodes and
// m column nodes, one edge per basic cell.
class TransportBasis {
 public:
  TransportBasis(std::size_t n, std::size_t m) : n_(n), m_(m), adj_(n + m) {}

  void add(std::size_t i, std::size_t j, double flow) {
    const std::size_t id = cells_.size();
    cells_.push_back({i, j, flow});
    adj_[i].push_back(id);
    adj_[n_ + j].push_back(id);
  }

  void replace(std::size_t id, std::size_t i, std::size_t j, double flow) {
    auto drop = [id](std::vector<std::size_t>& v) { v.erase(std::find(v.begin(), v.end(), id)); };
    drop(adj_[cells_[id].row]);
    drop(adj_[n_ + cells_[id].col]);
    cells_[id] = {i, j, flow};
    adj_[i].push_back(id);
    adj_[n_ + j].push_back(id);
  }

  // Row potentials u and column potentials v with c_ij = u_i + v_j on the basis.
  void potentials(const Matrix& cost, std::vector<double>& u, std::vector<double>& v) const {
    std::vector<char> seen(n_ + m_, 0);
    std::vector<double> pot(n_ + m_, 0.0);
    std::vector<std::size_t> stack{0};
    seen[0] = 1;
    while (!stack.empty()) {
      const std::size_t node = stack.back();
      stack.pop_back();
      for (const std::size_t id : adj_[node]) {
        const Cell& c = cells_[id];
        const std::size_t other = node < n_ ? n_ + c.col : c.row;
        if (seen[other]) continue;
        const double cij = cost(static_cast<Eigen::Index>(c.row), static_cast<Eigen::Index>(c.col));
        pot[other] = cij - pot[node];
        seen[other] = 1;
        stack.push_back(other);
      }
    }
    u.assign(pot.begin(), pot.begin() + static_cast<std::ptrdiff_t>(n_));
    v.assign(pot.begin() + static_cast<std::ptrdiff_t>(n_), pot.end());
  }

  // Basic cells on the tree path from row node i to column node j, ordered
  // starting at the cell touching row i.
  std::vector<std::size_t> path(std::size_t i, std::size_t j) const {
    const std::size_t none = std::numeric_limits<std::size_t>::max();
    std::vector<std::size_t> via(n_ + m_, none);
    std::vector<char> seen(n_ + m_, 0);
    std::vector<std::size_t> queue{i};
    seen[i] = 1;
    const std::size_t target = n_ + j;
    for (std::size_t head = 0; head < queue.size() && !seen[target]; ++head) {
      const std::size_t node = queue[head];
      for (const std::size_t id : adj_[node]) {
        const Cell& c = cells_[id];
        const std::size_t other = node < n_ ? n_ + c.col : c.row;
        if (seen[other]) continue;
        seen[other] = 1;
        via[other] = id;
        queue.push_back(other);
      }
    }
    if (!seen[target]) throw std::logic_error("transportation simplex: basis is not a spanning tree");
    std::vector<std::size_t> edges;
    for (std::size_t node = target; node != i;) {
      const std::size_t id = via[node];
      edges.push_back(id);
      node = node < n_ ? n_ + cells_[id].col : cells_[id].row;
    }
    std::reverse(edges.begin(), edges.end());
    return edges;
  }

  struct Cell {
    std::size_t row;
    std::size_t col;
    double flow;
  };

  std::vector<Cell>& cells() { return cells_; }
  const std::vector<Cell>& cells() const { return cells_; }

 private:
  std::size_t n_;
  std::size_t m_;
  std::vector<Cell> cells_;
  std::vector<std::vector<std::size_t>> adj_;
};

}  // namespace

Matrix solve_transportation(const Vector& supply, const Vector& demand, const Matrix& cost) {
  const auto n = static_cast<std::size_t>(supply.size());
  const auto m = static_cast<std::size_t>(demand.size());
  if (n == 0 || m == 0) throw std::invalid_argument("solve_transportation: empty marginal");
  if (cost.rows() != supply.size() || cost.cols() != demand.size()) {
    throw std::invalid_argument("solve_transportation: cost shape mismatch");
  }
  if ((supply.array() < 0.0).any() || (demand.array() < 0.0).any()) {
    throw std::invalid_argument("solve_transportation: negative marginal");
  }
  if (std::abs(supply.sum() - demand.sum()) > 1e-9) {
    throw std::invalid_argument("solve_transportation: marginals have different mass");
  }

  // North-west corner start: exactly n + m - 1 basic cells, some possibly
  // carrying zero flow.
  TransportBasis basis(n, m);
  {
    std::vector<double> a(supply.begin(), supply.end());
    std::vector<double> b(demand.begin(), demand.end());
    std::size_t i = 0;
    std::size_t j = 0;
    while (i < n && j < m) {
      const double x = (i == n - 1 && j == m - 1) ? std::max(a[i], b[j]) : std::min(a[i], b[j]);
      basis.add(i, j, x);
      a[i] -= x;
      b[j] -= x;
      if (i == n - 1) {
        ++j;
      } else if (j == m - 1) {
        ++i;
      } else if (a[i] < b[j]) {
        ++i;
      } else {
        ++j;
      }
    }
  }

  const double scale = std::max(1.0, cost.cwiseAbs().maxCoeff());
  const double tol = 1e-12 * scale;
  const std::size_t max_iters = 50 * (n + m) * (n + m) + 1000;
  std::vector<double> u, v;
  for (std::size_t iter = 0;; ++iter) {
    if (iter > max_iters) throw std::runtime_error("transportation simplex: iteration limit reached");
    basis.potentials(cost, u, v);
    double best = -tol;
    std::size_t bi = n, bj = m;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < m; ++j) {
        const double r = cost(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) - u[i] - v[j];
        if (r < best) {
          best = r;
          bi = i;
          bj = j;
        }
      }
    }
    if (bi == n) break;

    const auto edges = basis.path(bi, bj);
    auto& cells = basis.cells();
    // Edges at even positions (0, 2, ...) lose flow, the others gain it.
    double theta = kInf;
    std::size_t leaving = edges.front();
    for (std::size_t k = 0; k < edges.size(); k += 2) {
      if (cells[edges[k]].flow < theta) {
        theta = cells[edges[k]].flow;
        leaving = edges[k];
      }
    }
    for (std::size_t k = 0; k < edges.size(); ++k) {
      cells[edges[k]].flow += (k % 2 == 0) ? -theta : theta;
    }
    basis.replace(leaving, bi, bj, theta);
  }

  Matrix plan = Matrix::Zero(cost.rows(), cost.cols());
  for (const auto& c : basis.cells()) {
    plan(static_cast<Eigen::Index>(c.row), static_cast<Eigen::Index>(c.col)) += std::max(0.0, c.flow);
  }
  return plan;
}

TransportPlan w1_exact(const EmpiricalMeasure& p, const EmpiricalMeasure& q) {
  require_same_dim(p, q);
  if (p.size() + q.size() > kMaxTransportSupport) {
    throw std::invalid_argument("w1_exact: combined support " + std::to_string(p.size() + q.size()) +
                                " exceeds solver limit " + std::to_string(kMaxTransportSupport));
  }
  const Matrix cost = euclidean_cost(p.points(), q.points());
  TransportPlan plan;
  if (p.size() == q.size() && p.has_uniform_weights() && q.has_uniform_weights()) {
    const auto assignment = solve_assignment(cost);
    const double w = 1.0 / static_cast<double>(p.size());
    plan.coupling = Matrix::Zero(cost.rows(), cost.cols());
    for (std::size_t i = 0; i < assignment.size(); ++i) {
      plan.coupling(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(assignment[i])) = w;
    }
  } else {
    plan.coupling = solve_transportation(p.weights(), q.weights(), cost);
  }
  plan.cost = plan.coupling.cwiseProduct(cost).sum();
  return plan;
}

double ipm_estimate(const MlpNetwork& f, const EmpiricalMeasure& p, const EmpiricalMeasure& q) {
  require_same_dim(p, q);
  if (f.output_dim() != 1) throw std::invalid_argument("ipm_estimate: critic must have one output");
  if (f.input_dim() != p.dim()) throw std::invalid_argument("ipm_estimate: critic input dimension mismatch");
  const Matrix fp = evaluate(f, p.points());
  const Matrix fq = evaluate(f, q.points());
  return p.weights().dot(fp.col(0)) - q.weights().dot(fq.col(0));
}

namespace {

double kernel_cross_sum(const EmpiricalMeasure& a, const EmpiricalMeasure& b, double inv_two_h2) {
  const Matrix& x = a.points();
  const Matrix& y = b.points();
  double total = 0.0;
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    double row = 0.0;
    for (Eigen::Index j = 0; j < y.rows(); ++j) {
      row += b.weights()(j) * std::exp(-(x.row(i) - y.row(j)).squaredNorm() * inv_two_h2);
    }
    total += a.weights()(i) * row;
  }
  return total;
}

}  // namespace

double mmd_squared(const EmpiricalMeasure& p, const EmpiricalMeasure& q, const KernelSpec& k) {
  require_same_dim(p, q);
  if (!(k.bandwidth > 0.0)) throw std::invalid_argument("mmd_squared: bandwidth must be positive");
  const double inv = 1.0 / (2.0 * k.bandwidth * k.bandwidth);
  const double value = kernel_cross_sum(p, p, inv) + kernel_cross_sum(q, q, inv) - 2.0 * kernel_cross_sum(p, q, inv);
  // The V-statistic is a squared RKHS norm; negative values are rounding.
  return std::max(0.0, value);
}

ParallelLinesDistances parallel_lines_closed_form(double theta) {
  if (theta == 0.0) return {0.0, 0.0, 0.0, 0.0};
  return {std::abs(theta), std::numbers::ln2, kInf, 1.0};
}

std::pair<DiscreteDistribution, DiscreteDistribution> align_on_union_support(
    const EmpiricalMeasure& p, const EmpiricalMeasure& q) {
  require_same_dim(p, q);
  std::map<std::vector<double>, std::size_t> index;
  std::vector<double> pp, qq;
  auto accumulate = [&](const EmpiricalMeasure& m, bool is_p) {
    for (Eigen::Index i = 0; i < m.points().rows(); ++i) {
      std::vector<double> key(m.points().row(i).begin(), m.points().row(i).end());
      auto [it, inserted] = index.emplace(std::move(key), pp.size());
      if (inserted) {
        pp.push_back(0.0);
        qq.push_back(0.0);
      }
      (is_p ? pp : qq)[it->second] += m.weights()(i);
    }
  };
  accumulate(p, true);
  accumulate(q, false);
  return {DiscreteDistribution(std::move(pp)), DiscreteDistribution(std::move(qq))};
}

}  // namespace wdistlab
