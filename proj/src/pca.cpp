#include "psci/pca.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "psci/error.hpp"

namespace psci {

SymmetricEigen jacobi_eigen(std::vector<double> a, std::size_t n) {
  std::vector<double> v(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) v[i * n + i] = 1.0;
  auto at = [n](std::vector<double>& m, std::size_t r, std::size_t c) -> double& { return m[r * n + c]; };

  double norm = 0.0;
  for (double x : a) norm += x * x;
  const double eps = 1e-30 * std::max(norm, 1e-300);

  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) off += at(a, p, q) * at(a, p, q);
    }
    if (off <= eps) break;
    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = at(a, p, q);
        if (apq == 0.0) continue;
        const double theta = (at(a, q, q) - at(a, p, p)) / (2.0 * apq);
        const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (std::size_t r = 0; r < n; ++r) {
          const double arp = at(a, r, p), arq = at(a, r, q);
          at(a, r, p) = c * arp - s * arq;
          at(a, r, q) = s * arp + c * arq;
        }
        for (std::size_t r = 0; r < n; ++r) {
          const double apr = at(a, p, r), aqr = at(a, q, r);
          at(a, p, r) = c * apr - s * aqr;
          at(a, q, r) = s * apr + c * aqr;
        }
        for (std::size_t r = 0; r < n; ++r) {
          const double vrp = at(v, r, p), vrq = at(v, r, q);
          at(v, r, p) = c * vrp - s * vrq;
          at(v, r, q) = s * vrp + c * vrq;
        }
      }
    }
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t x, std::size_t y) { return a[x * n + x] > a[y * n + y]; });
  SymmetricEigen out;
  out.values.resize(n);
  out.vectors.resize(n * n);
  for (std::size_t c = 0; c < n; ++c) {
    out.values[c] = a[order[c] * n + order[c]];
    for (std::size_t r = 0; r < n; ++r) out.vectors[r * n + c] = v[r * n + order[c]];
  }
  return out;
}

namespace {

double dot(const std::vector<double>& x, const std::vector<double>& y) {
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) s += x[i] * y[i];
  return s;
}

void normalize(std::vector<double>& x) {
  const double len = std::sqrt(dot(x, x));
  for (auto& v : x) v /= len;
}

// Unit vector orthogonal to every vector in `basis`.
std::vector<double> orthogonal_complement(const std::vector<std::vector<double>>& basis,
                                          std::size_t dim) {
  std::vector<double> best;
  double best_len = -1.0;
  for (std::size_t e = 0; e < dim; ++e) {
    std::vector<double> cand(dim, 0.0);
    cand[e] = 1.0;
    for (const auto& b : basis) {
      const double proj = dot(cand, b);
      for (std::size_t i = 0; i < dim; ++i) cand[i] -= proj * b[i];
    }
    const double len = dot(cand, cand);
    if (len > best_len) {
      best_len = len;
      best = std::move(cand);
    }
  }
  normalize(best);
  return best;
}

void orient(std::vector<double>& loading) {
  std::size_t arg = 0;
  for (std::size_t i = 1; i < loading.size(); ++i) {
    if (std::abs(loading[i]) > std::abs(loading[arg]) + 1e-12) arg = i;
  }
  if (loading[arg] < 0) {
    for (auto& x : loading) x = -x;
  }
}

}  // namespace

PcaProjection pca_assessors(const ScoreGrid& grid, std::vector<std::string> assessors,
                            const PcaOptions& options) {
  const std::size_t n_subj = grid.rows;
  const std::size_t k = grid.cols;
  if (assessors.size() != k) throw Error(ErrorKind::schema_error, "assessor labels do not match grid");
  if (k < 3) throw Error(ErrorKind::insufficient_data, "PCA needs at least 3 assessors");
  if (n_subj < 2) throw Error(ErrorKind::insufficient_data, "PCA needs at least 2 subjects");

  // x[a][s]: centered (optionally standardized) observation matrix.
  std::vector<std::vector<double>> x(k, std::vector<double>(n_subj, 0.0));
  for (std::size_t s = 0; s < n_subj; ++s) {
    double mean = 0.0;
    for (std::size_t a = 0; a < k; ++a) mean += grid(s, a);
    mean /= static_cast<double>(k);
    double scale = 1.0;
    if (options.zscore) {
      double ss = 0.0;
      for (std::size_t a = 0; a < k; ++a) ss += (grid(s, a) - mean) * (grid(s, a) - mean);
      const double sd = std::sqrt(ss / static_cast<double>(k - 1));
      scale = sd > 0 ? 1.0 / sd : 0.0;
    }
    for (std::size_t a = 0; a < k; ++a) x[a][s] = (grid(s, a) - mean) * scale;
  }

  // Covariance over subjects shares its nonzero spectrum with the k x k Gram
  // matrix; decompose the Gram matrix and map eigenvectors back.
  const double denom = static_cast<double>(k - 1);
  std::vector<double> gram(k * k, 0.0);
  for (std::size_t a = 0; a < k; ++a) {
    for (std::size_t b = a; b < k; ++b) {
      const double g = dot(x[a], x[b]) / denom;
      gram[a * k + b] = g;
      gram[b * k + a] = g;
    }
  }
  double trace = 0.0;
  for (std::size_t a = 0; a < k; ++a) trace += gram[a * k + a];
  const auto eig = jacobi_eigen(gram, k);

  PcaProjection out;
  out.assessors = std::move(assessors);
  out.total_variance = trace;
  std::vector<std::vector<double>> basis;
  for (std::size_t c = 0; c < 2; ++c) {
    const double lambda = c < eig.values.size() ? eig.values[c] : 0.0;
    std::vector<double> loading(n_subj, 0.0);
    if (trace > 0 && lambda > 1e-12 * trace) {
      for (std::size_t a = 0; a < k; ++a) {
        const double u = eig.vectors[a * k + c];
        for (std::size_t s = 0; s < n_subj; ++s) loading[s] += u * x[a][s];
      }
      normalize(loading);
      out.eigenvalues[c] = lambda;
      out.explained_variance[c] = lambda / trace;
    } else {
      loading = orthogonal_complement(basis, n_subj);
    }
    // Re-orthogonalize against the first component for numerical hygiene.
    for (const auto& b : basis) {
      const double proj = dot(loading, b);
      for (std::size_t s = 0; s < n_subj; ++s) loading[s] -= proj * b[s];
    }
    normalize(loading);
    orient(loading);
    basis.push_back(loading);
    out.loadings[c] = std::move(loading);
  }

  out.coordinates.resize(k);
  for (std::size_t a = 0; a < k; ++a) {
    out.coordinates[a] = {dot(x[a], out.loadings[0]), dot(x[a], out.loadings[1])};
  }
  return out;
}

PcaProjection pca_assessors(const RatingMatrix& complete, const PcaOptions& options) {
  std::vector<std::string> ids;
  for (const auto& a : complete.assessors()) ids.push_back(a.id);
  return pca_assessors(to_grid(complete), std::move(ids), options);
}

}  // namespace psci
