#include "eclab/lp.hpp"

#include <limits>
#include <utility>
#include <vector>

namespace eclab::lp {

namespace {

class Tableau {
 public:
  Tableau(const Mat& A, const Vec& b, const Vec& c, double eps)
      : m_(static_cast<int>(b.size())),
        n_(static_cast<int>(c.size())),
        eps_(eps),
        basis_(m_),
        nonbasis_(n_ + 1),
        D_(Mat::Zero(m_ + 2, n_ + 2)) {
    D_.topLeftCorner(m_, n_) = A;
    for (int i = 0; i < m_; ++i) {
      basis_[i] = n_ + i;
      D_(i, n_) = -1.0;
      D_(i, n_ + 1) = b[i];
    }
    for (int j = 0; j < n_; ++j) {
      nonbasis_[j] = j;
      D_(m_, j) = -c[j];
    }
    nonbasis_[n_] = -1;
    D_(m_ + 1, n_) = 1.0;
  }

  Solution solve() {
    Solution sol;
    int r = 0;
    for (int i = 1; i < m_; ++i)
      if (D_(i, n_ + 1) < D_(r, n_ + 1)) r = i;
    if (m_ > 0 && D_(r, n_ + 1) < -eps_) {
      pivot(r, n_);
      if (!simplex(1) || D_(m_ + 1, n_ + 1) < -1e-9) {
        sol.status = Status::Infeasible;
        return sol;
      }
      for (int i = 0; i < m_; ++i) {
        if (basis_[i] != -1) continue;
        int s = -1;
        for (int j = 0; j <= n_; ++j)
          if (s == -1 || D_(i, j) < D_(i, s) || (D_(i, j) == D_(i, s) && nonbasis_[j] < nonbasis_[s])) s = j;
        pivot(i, s);
      }
    }
    if (!simplex(2)) {
      sol.status = Status::Unbounded;
      sol.objective = std::numeric_limits<double>::infinity();
      return sol;
    }
    sol.status = Status::Optimal;
    sol.x = Vec::Zero(n_);
    for (int i = 0; i < m_; ++i)
      if (basis_[i] >= 0 && basis_[i] < n_) sol.x[basis_[i]] = D_(i, n_ + 1);
    sol.objective = D_(m_, n_ + 1);
    return sol;
  }

 private:
  void pivot(int r, int s) {
    const double inv = 1.0 / D_(r, s);
    for (int i = 0; i < m_ + 2; ++i) {
      if (i == r) continue;
      const double f = D_(i, s) * inv;
      if (f == 0.0) continue;
      for (int j = 0; j < n_ + 2; ++j)
        if (j != s) D_(i, j) -= D_(r, j) * f;
    }
    for (int j = 0; j < n_ + 2; ++j)
      if (j != s) D_(r, j) *= inv;
    for (int i = 0; i < m_ + 2; ++i)
      if (i != r) D_(i, s) *= -inv;
    D_(r, s) = inv;
    std::swap(basis_[r], nonbasis_[s]);
  }

  bool simplex(int phase) {
    const int x = phase == 1 ? m_ + 1 : m_;
    for (int iter = 0; iter < 100000; ++iter) {
      int s = -1;
      for (int j = 0; j <= n_; ++j) {
        if (phase == 2 && nonbasis_[j] == -1) continue;
        if (s == -1 || D_(x, j) < D_(x, s) || (D_(x, j) == D_(x, s) && nonbasis_[j] < nonbasis_[s])) s = j;
      }
      if (s == -1 || D_(x, s) > -eps_) return true;
      int r = -1;
      for (int i = 0; i < m_; ++i) {
        if (D_(i, s) < eps_) continue;
        if (r == -1) {
          r = i;
          continue;
        }
        const double lhs = D_(i, n_ + 1) / D_(i, s);
        const double rhs = D_(r, n_ + 1) / D_(r, s);
        if (lhs < rhs || (lhs == rhs && basis_[i] < basis_[r])) r = i;
      }
      if (r == -1) return false;
      pivot(r, s);
    }
    return true;
  }

  int m_, n_;
  double eps_;
  std::vector<int> basis_, nonbasis_;
  Mat D_;
};

}  // namespace

Solution maximize(const Mat& A, const Vec& b, const Vec& c, double eps) {
  Tableau t(A, b, c, eps);
  return t.solve();
}

Vec nnls(const Mat& A, const Vec& b, int max_iter, double tol) {
  const int n = static_cast<int>(A.cols());
  Vec x = Vec::Zero(n);
  if (n == 0) return x;
  std::vector<bool> passive(n, false);
  Vec w = A.transpose() * (b - A * x);

  for (int outer = 0; outer < max_iter; ++outer) {
    int t = -1;
    double best = tol * (1.0 + b.norm()) * (1.0 + A.norm());
    for (int j = 0; j < n; ++j)
      if (!passive[j] && w[j] > best) {
        best = w[j];
        t = j;
      }
    if (t < 0) break;
    passive[t] = true;

    for (int inner = 0; inner < max_iter; ++inner) {
      std::vector<int> idx;
      for (int j = 0; j < n; ++j)
        if (passive[j]) idx.push_back(j);
      Mat Ap(A.rows(), static_cast<Eigen::Index>(idx.size()));
      for (std::size_t k = 0; k < idx.size(); ++k) Ap.col(static_cast<Eigen::Index>(k)) = A.col(idx[k]);
      Vec zp = Ap.completeOrthogonalDecomposition().solve(b);
      Vec z = Vec::Zero(n);
      for (std::size_t k = 0; k < idx.size(); ++k) z[idx[k]] = zp[static_cast<Eigen::Index>(k)];

      bool feasible = true;
      for (int j : idx)
        if (z[j] <= 0.0) feasible = false;
      if (feasible) {
        x = z;
        break;
      }
      double alpha = 1.0;
      for (int j : idx)
        if (z[j] <= 0.0) alpha = std::min(alpha, x[j] / (x[j] - z[j]));
      x += alpha * (z - x);
      for (int j : idx)
        if (x[j] <= tol) {
          x[j] = 0.0;
          passive[j] = false;
        }
    }
    w = A.transpose() * (b - A * x);
  }
  return x;
}

}  // namespace eclab::lp
