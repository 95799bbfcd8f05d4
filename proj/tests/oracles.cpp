// Copyright 2026 The qoctk Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <Eigen/Eigenvalues>
#include <Eigen/QR>

namespace oracle {

CMatrix expm_hermitian(const CMatrix& h, double t) {
  Eigen::SelfAdjointEigenSolver<CMatrix> es(h);
  const auto& w = es.eigenvalues();
  CVector phases(w.size());
  for (Eigen::Index i = 0; i < w.size(); ++i) phases(i) = std::exp(cplx(0.0, -t * w(i)));
  return es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
}

CMatrix expm_taylor(const CMatrix& a) {
  double norm = 0.0;
  for (Eigen::Index j = 0; j < a.cols(); ++j) norm = std::max(norm, a.col(j).cwiseAbs().sum());
  int squarings = 0;
  while (norm > 0.25) {
    norm /= 2.0;
    ++squarings;
  }
  const CMatrix b = a / std::pow(2.0, squarings);
  CMatrix term = CMatrix::Identity(a.rows(), a.cols());
  CMatrix sum = term;
  for (int k = 1; k <= 30; ++k) {
    term = term * b / static_cast<double>(k);
    sum += term;
  }
  for (int s = 0; s < squarings; ++s) sum = sum * sum;
  return sum;
}

CMatrix kron_loops(const CMatrix& a, const CMatrix& b) {
  CMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      for (Eigen::Index k = 0; k < b.rows(); ++k)
        for (Eigen::Index l = 0; l < b.cols(); ++l)
          out(i * b.rows() + k, j * b.cols() + l) = a(i, j) * b(k, l);
  return out;
}

namespace {

CMatrix ginibre(int d, std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  CMatrix g(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) g(i, j) = cplx(n(rng), n(rng));
  return g;
}

}  // namespace

CMatrix random_hermitian(int d, std::mt19937_64& rng, double scale) {
  const CMatrix g = ginibre(d, rng);
  return scale * 0.5 * (g + g.adjoint());
}

CMatrix random_unitary(int d, std::mt19937_64& rng) {
  Eigen::HouseholderQR<CMatrix> qr(ginibre(d, rng));
  CMatrix q = qr.householderQ();
  const CMatrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int i = 0; i < d; ++i) q.col(i) *= r(i, i) / std::abs(r(i, i));
  return q;
}

CMatrix random_density(int d, std::mt19937_64& rng) {
  const CMatrix g = ginibre(d, rng);
  CMatrix rho = g * g.adjoint();
  return rho / rho.trace().real();
}

CMatrix random_pure_state(int d, std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  CVector v(d);
  for (int i = 0; i < d; ++i) v(i) = cplx(n(rng), n(rng));
  v.normalize();
  return v * v.adjoint();
}

std::vector<double> fd_gradient(const std::function<double(const std::vector<double>&)>& f,
                                const std::vector<double>& x, double h) {
  std::vector<double> g(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    std::vector<double> a = x, b = x;
    a[i] += h;
    b[i] -= h;
    g[i] = (f(a) - f(b)) / (2.0 * h);
  }
  return g;
}

CMatrix ising_drift_bits(int n, double J, double g) {
  const int d = 1 << n;
  CMatrix h = CMatrix::Zero(d, d);
  auto z = [n](int label, int site) { return ((label >> (n - 1 - site)) & 1) ? -1.0 : 1.0; };
  for (int s = 0; s < d; ++s) {
    double e = 0.0;
    for (int j = 0; j + 1 < n; ++j) e -= J * z(s, j) * z(s, j + 1);
    for (int j = 0; j + 2 < n; ++j) e -= g * z(s, j) * z(s, j + 2);
    h(s, s) = e;
  }
  return h;
}

CMatrix ising_control_bits(int n) {
  const int d = 1 << n;
  CMatrix h = CMatrix::Zero(d, d);
  for (int s = 0; s < d; ++s)
    for (int j = 0; j < n; ++j) h(s ^ (1 << (n - 1 - j)), s) += 1.0;
  return h;
}

std::vector<double> reference_nelder_mead(const std::function<double(const std::vector<double>&)>& f,
                                          std::vector<double> x0, const std::vector<double>& offsets,
                                          bool adaptive, int max_evals) {
  const std::size_t n = x0.size();
  const double dn = static_cast<double>(n);
  const double alpha = 1.0;
  const double beta = adaptive ? 1.0 + 2.0 / dn : 2.0;
  const double gamma = adaptive ? 0.75 - 1.0 / (2.0 * dn) : 0.5;
  const double delta = adaptive ? 1.0 - 1.0 / dn : 0.5;

  std::vector<double> values;
  struct P {
    std::vector<double> x;
    double f;
    long order;
  };
  long counter = 0;
  bool exhausted = false;
  auto eval = [&](const std::vector<double>& x) {
    if (static_cast<int>(values.size()) >= max_evals) {
      exhausted = true;
      return P{x, 0.0, counter++};
    }
    const double v = f(x);
    values.push_back(v);
    return P{x, v, counter++};
  };
  std::vector<P> s;
  s.push_back(eval(x0));
  for (std::size_t i = 0; i < n && !exhausted; ++i) {
    std::vector<double> x = x0;
    x[i] += offsets[i];
    s.push_back(eval(x));
  }
  auto point = [&](const std::vector<double>& c, const std::vector<double>& w, double t) {
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = c[i] + t * (c[i] - w[i]);
    return out;
  };
  while (!exhausted) {
    std::stable_sort(s.begin(), s.end(), [](const P& a, const P& b) {
      return a.f < b.f || (a.f == b.f && a.order < b.order);
    });
    std::vector<double> c(n, 0.0);
    for (std::size_t v = 0; v < n; ++v)
      for (std::size_t i = 0; i < n; ++i) c[i] += s[v].x[i];
    for (auto& ci : c) ci /= dn;
    const double f1 = s[0].f, fn = s[n - 1].f, fw = s[n].f;
    const P r = eval(point(c, s[n].x, alpha));
    if (exhausted) break;
    if (f1 <= r.f && r.f < fn) {
      s[n] = r;
      continue;
    }
    if (r.f < f1) {
      const P e = eval(point(c, s[n].x, alpha * beta));
      if (exhausted) break;
      s[n] = e.f < r.f ? e : r;
      continue;
    }
    if (r.f < fw) {
      const P oc = eval(point(c, s[n].x, alpha * gamma));
      if (exhausted) break;
      if (oc.f <= r.f) {
        s[n] = oc;
        continue;
      }
    } else {
      const P ic = eval(point(c, s[n].x, -gamma));
      if (exhausted) break;
      if (ic.f < fw) {
        s[n] = ic;
        continue;
      }
    }
    for (std::size_t v = 1; v <= n && !exhausted; ++v) {
      std::vector<double> x(n);
      for (std::size_t i = 0; i < n; ++i) x[i] = s[0].x[i] + delta * (s[v].x[i] - s[0].x[i]);
      s[v] = eval(x);
    }
  }
  return values;
}

GridMin brute_force_2d(const std::function<double(double, double)>& f, double lo, double hi, int steps) {
  GridMin best{0.0, 0.0, std::numeric_limits<double>::infinity()};
  for (int i = 0; i <= steps; ++i)
    for (int j = 0; j <= steps; ++j) {
      const double x = lo + (hi - lo) * i / steps;
      const double y = lo + (hi - lo) * j / steps;
      const double v = f(x, y);
      if (v < best.f) best = {x, y, v};
    }
  return best;
}

double rosenbrock(std::span<const double> x) {
  double s = 0.0;
  for (std::size_t i = 0; i + 1 < x.size(); ++i)
    s += 100.0 * std::pow(x[i + 1] - x[i] * x[i], 2) + std::pow(1.0 - x[i], 2);
  return s;
}

double sphere(std::span<const double> x) {
  return std::inner_product(x.begin(), x.end(), x.begin(), 0.0);
}

double prob_greater(double a, double sa, double b, double sb) {
  const double s = std::sqrt(sa * sa + sb * sb);
  return 0.5 * std::erfc(-(a - b) / (s * std::sqrt(2.0)));
}

}  // namespace oracle
