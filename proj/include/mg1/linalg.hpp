#ifndef MG1_LINALG_HPP
#define MG1_LINALG_HPP

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <queue>
#include <string>
#include <vector>

#include "mg1/error.hpp"

namespace mg1 {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using RowVector = Eigen::RowVectorXd;

/// Maximum absolute row sum.
template <typename Derived>
typename Derived::Scalar inf_norm(const Eigen::MatrixBase<Derived>& m) {
  if (m.size() == 0) return typename Derived::Scalar(0);
  return m.cwiseAbs().rowwise().sum().maxCoeff();
}

template <typename Derived>
bool all_finite(const Eigen::MatrixBase<Derived>& m) {
  return m.allFinite();
}

/// Solves (I - M) X = rhs by LU with partial pivoting plus one step of
/// iterative refinement. M is expected to have spectral radius below one.
template <typename DerivedM, typename DerivedB>
Eigen::Matrix<typename DerivedM::Scalar, Eigen::Dynamic, DerivedB::ColsAtCompileTime>
solve_i_minus(const Eigen::MatrixBase<DerivedM>& M, const Eigen::MatrixBase<DerivedB>& rhs,
              typename DerivedM::Scalar pivot_tol = 1e-14) {
  using Scalar = typename DerivedM::Scalar;
  using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  using Result = Eigen::Matrix<Scalar, Eigen::Dynamic, DerivedB::ColsAtCompileTime>;

  const Eigen::Index n = M.rows();
  if (M.cols() != n || rhs.rows() != n)
    fail(Errc::DimensionMismatch, "solve_i_minus: incompatible dimensions");

  const Mat system = Mat::Identity(n, n) - M;
  Eigen::PartialPivLU<Mat> lu(system);
  const Scalar min_pivot = lu.matrixLU().diagonal().cwiseAbs().minCoeff();
  if (!(min_pivot >= pivot_tol))
    fail(Errc::SingularSystem, "solve_i_minus: pivot " + num(min_pivot) + " below tolerance");

  Result X = lu.solve(rhs);
  X += lu.solve(rhs - system * X);

  // backward-error scale: the residual of a stable solve is O(eps * |I - M| |X|)
  const Scalar scale = std::max(inf_norm(rhs), inf_norm(system) * inf_norm(X));
  const Scalar residual = inf_norm(rhs - system * X);
  if (!X.allFinite() || residual > Scalar(1e-12) * scale)
    fail(Errc::SingularSystem, "solve_i_minus: residual " + num(residual) + " too large");
  return X;
}

/// Same as solve_i_minus but for a row-vector left-hand side: x (I - M) = rhs.
template <typename DerivedM, typename DerivedB>
Eigen::Matrix<typename DerivedM::Scalar, 1, Eigen::Dynamic>
solve_i_minus_left(const Eigen::MatrixBase<DerivedM>& M, const Eigen::MatrixBase<DerivedB>& rhs) {
  return solve_i_minus(M.transpose(), rhs.transpose()).transpose();
}

struct GraphAnalysis {
  int num_classes = 0;
  bool is_strongly_connected = false;
  // Period of the single class; 0 when there are several classes.
  int period = 0;
  std::vector<int> class_of;        // communicating class id per state
  std::vector<int> class_period;    // 0 for a singleton without a self-loop
  std::vector<bool> class_closed;   // no edge leaves the class
};

namespace detail {

inline void tarjan_visit(int v, const std::vector<std::vector<int>>& adj, std::vector<int>& index,
                         std::vector<int>& low, std::vector<bool>& on_stack, std::vector<int>& stack,
                         int& counter, std::vector<int>& class_of, int& num_classes) {
  // explicit frame stack so deep graphs cannot overflow the call stack
  struct Frame {
    int v;
    std::size_t next;
  };
  std::vector<Frame> frames{{v, 0}};
  index[v] = low[v] = counter++;
  stack.push_back(v);
  on_stack[v] = true;
  while (!frames.empty()) {
    Frame& f = frames.back();
    if (f.next < adj[f.v].size()) {
      const int w = adj[f.v][f.next++];
      if (index[w] < 0) {
        index[w] = low[w] = counter++;
        stack.push_back(w);
        on_stack[w] = true;
        frames.push_back({w, 0});
      } else if (on_stack[w]) {
        low[f.v] = std::min(low[f.v], index[w]);
      }
      continue;
    }
    const int u = f.v;
    if (low[u] == index[u]) {
      int w;
      do {
        w = stack.back();
        stack.pop_back();
        on_stack[w] = false;
        class_of[w] = num_classes;
      } while (w != u);
      ++num_classes;
    }
    frames.pop_back();
    if (!frames.empty()) low[frames.back().v] = std::min(low[frames.back().v], low[u]);
  }
}

}  // namespace detail

/// Communicating classes and periods of the support digraph of M, where an
/// edge i -> j exists iff M(i,j) > support_tol. Periods use the BFS
/// level-difference method: gcd over intra-class edges (u,v) of d(u) + 1 - d(v).
template <typename Derived>
GraphAnalysis graph_analysis(const Eigen::MatrixBase<Derived>& M, double support_tol = 1e-14) {
  const int n = static_cast<int>(M.rows());
  if (M.cols() != M.rows()) fail(Errc::DimensionMismatch, "graph_analysis: matrix must be square");

  std::vector<std::vector<int>> adj(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (M(i, j) > support_tol) adj[i].push_back(j);

  GraphAnalysis out;
  out.class_of.assign(n, -1);
  std::vector<int> index(n, -1), low(n, 0), stack;
  std::vector<bool> on_stack(n, false);
  int counter = 0;
  for (int v = 0; v < n; ++v)
    if (index[v] < 0) detail::tarjan_visit(v, adj, index, low, on_stack, stack, counter, out.class_of, out.num_classes);

  out.class_period.assign(out.num_classes, 0);
  out.class_closed.assign(out.num_classes, true);
  std::vector<int> depth(n, -1);
  for (int c = 0; c < out.num_classes; ++c) {
    const int root = static_cast<int>(std::find(out.class_of.begin(), out.class_of.end(), c) - out.class_of.begin());
    std::queue<int> q;
    q.push(root);
    depth[root] = 0;
    int g = 0;
    while (!q.empty()) {
      const int u = q.front();
      q.pop();
      for (int v : adj[u]) {
        if (out.class_of[v] != c) {
          out.class_closed[c] = false;
          continue;
        }
        if (depth[v] < 0) {
          depth[v] = depth[u] + 1;
          q.push(v);
        } else {
          g = std::gcd(g, std::abs(depth[u] + 1 - depth[v]));
        }
      }
    }
    out.class_period[c] = g;
  }

  out.is_strongly_connected = out.num_classes == 1;
  out.period = out.is_strongly_connected ? out.class_period[0] : 0;
  return out;
}

namespace detail {

template <typename Mat>
Eigen::Matrix<typename Mat::Scalar, 1, Eigen::Dynamic> gth_core(Mat A) {
  using Scalar = typename Mat::Scalar;
  const Eigen::Index n = A.rows();
  for (Eigen::Index k = n - 1; k > 0; --k) {
    const Scalar s = A.row(k).head(k).sum();
    if (!(s > Scalar(0)))
      fail(Errc::Reducible, "gth_stationary: zero pivot at state " + std::to_string(k));
    A.col(k).head(k) /= s;
    A.topLeftCorner(k, k).noalias() += A.col(k).head(k) * A.row(k).head(k);
  }
  Eigen::Matrix<Scalar, 1, Eigen::Dynamic> x(n);
  x(0) = Scalar(1);
  for (Eigen::Index k = 1; k < n; ++k) x(k) = x.head(k).dot(A.col(k).head(k));
  x /= x.sum();
  return x;
}

}  // namespace detail

/// Stationary distribution of a stochastic matrix with a single closed
/// communicating class, by Grassmann-Taksar-Heyman elimination.
///
/// The reduction only ever adds nonnegative quantities; the pivot of each
/// eliminated state is its off-diagonal mass towards the states still
/// present, never 1 - P(n,n). Transient states get probability zero; the
/// elimination runs on the closed class.
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, 1, Eigen::Dynamic>
gth_stationary(const Eigen::MatrixBase<Derived>& P, typename Derived::Scalar row_tol = 1e-10) {
  using Scalar = typename Derived::Scalar;
  using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  using Row = Eigen::Matrix<Scalar, 1, Eigen::Dynamic>;

  const Eigen::Index n = P.rows();
  if (n == 0 || P.cols() != n) fail(Errc::NotStochastic, "gth_stationary: matrix must be square and non-empty");
  if (!P.allFinite()) fail(Errc::NotStochastic, "gth_stationary: non-finite entry");
  if ((P.array() < Scalar(0)).any()) fail(Errc::NotStochastic, "gth_stationary: negative entry");
  for (Eigen::Index i = 0; i < n; ++i) {
    const Scalar s = P.row(i).sum();
    if (std::abs(s - Scalar(1)) > row_tol)
      fail(Errc::NotStochastic, "gth_stationary: row " + std::to_string(i) + " sums to " + num(s));
  }

  const GraphAnalysis ga = graph_analysis(P, 0.0);
  if (ga.is_strongly_connected) return detail::gth_core(Mat(P));

  int closed = -1;
  for (int c = 0; c < ga.num_classes; ++c) {
    if (!ga.class_closed[c]) continue;
    if (closed >= 0) fail(Errc::Reducible, "gth_stationary: more than one closed class");
    closed = c;
  }
  std::vector<Eigen::Index> members;
  for (Eigen::Index i = 0; i < n; ++i)
    if (ga.class_of[static_cast<std::size_t>(i)] == closed) members.push_back(i);
  const auto m = static_cast<Eigen::Index>(members.size());
  Mat sub(m, m);
  for (Eigen::Index i = 0; i < m; ++i)
    for (Eigen::Index j = 0; j < m; ++j) sub(i, j) = P(members[i], members[j]);
  const Row xs = detail::gth_core(std::move(sub));
  Row x = Row::Zero(n);
  for (Eigen::Index i = 0; i < m; ++i) x(members[i]) = xs(i);
  return x;
}

}  // namespace mg1

#endif  // MG1_LINALG_HPP
