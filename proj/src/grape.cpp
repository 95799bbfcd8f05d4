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

#include "qoc/grape.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

#include "qoc/fidelity.hpp"
#include "qoc/rng.hpp"

namespace qoc {

namespace {

constexpr double kHermitianTol = 1e-12;
constexpr double kTraceTol = 1e-12;
constexpr double kStationaryFomGap = 1e-6;

void require_density(const CMatrix& rho, Eigen::Index d, const char* name) {
  if (rho.rows() != d || rho.cols() != d)
    throw std::invalid_argument(std::string(name) + " has the wrong dimension");
  if (!is_hermitian(rho, kHermitianTol))
    throw std::invalid_argument(std::string(name) + " is not Hermitian");
  if (std::abs(rho.trace() - cplx(1.0)) > kTraceTol)
    throw std::invalid_argument(std::string(name) + " does not have unit trace");
  Eigen::SelfAdjointEigenSolver<CMatrix> eig(0.5 * (rho + rho.adjoint()));
  if (eig.eigenvalues().minCoeff() < -1e-10)
    throw std::invalid_argument(std::string(name) + " is not positive semidefinite");
}

// sum_ij a_ij b_ji = tr(a b)
cplx trace_product(const CMatrix& a, const CMatrix& b) {
  return a.cwiseProduct(b.transpose()).sum();
}

struct SliceData {
  std::vector<CMatrix> u;
  std::vector<std::vector<CMatrix>> du;  // du[k][j]
};

SliceData slice_derivatives(const GrapeProblem& p, std::span<const std::vector<double>> pulses,
                            Exec exec) {
  const auto n = static_cast<long>(pulses.front().size());
  const std::size_t nc = p.hamiltonian.controls.size();
  const double dt = p.duration / static_cast<double>(n);
  const Eigen::Index d = p.hamiltonian.drift.rows();
  SliceData out;
  out.u.resize(static_cast<std::size_t>(n));
  out.du.assign(static_cast<std::size_t>(n), std::vector<CMatrix>(nc));
  auto body = [&](long k) {
    const CMatrix hk = p.hamiltonian.at_slice(static_cast<std::size_t>(k), pulses);
    CMatrix aux = CMatrix::Zero(2 * d, 2 * d);
    aux.topLeftCorner(d, d) = hk;
    aux.bottomRightCorner(d, d) = hk;
    for (std::size_t j = 0; j < nc; ++j) {
      aux.topRightCorner(d, d) = p.hamiltonian.controls[j];
      const CMatrix e = expm((-kI * dt) * aux);
      if (j == 0) out.u[k] = e.topLeftCorner(d, d);
      out.du[k][j] = e.topRightCorner(d, d);
    }
  };
  if (exec == Exec::serial) {
    for (long k = 0; k < n; ++k) body(k);
  } else {
#pragma omp parallel for schedule(static)
    for (long k = 0; k < n; ++k) body(k);
  }
  return out;
}

void check_slices(const GrapeProblem& p, std::span<const std::vector<double>> pulses) {
  check_pulses(p.hamiltonian, pulses);
  if (static_cast<int>(pulses.front().size()) != p.slices)
    throw std::invalid_argument("pulse length does not match the slice count");
}

}  // namespace

void validate_problem(const GrapeProblem& p) {
  const Eigen::Index d = p.hamiltonian.drift.rows();
  if (d == 0 || p.hamiltonian.drift.cols() != d)
    throw std::invalid_argument("drift Hamiltonian must be square and non-empty");
  if (!is_hermitian(p.hamiltonian.drift, kHermitianTol))
    throw std::invalid_argument("drift Hamiltonian is not Hermitian");
  if (p.hamiltonian.controls.empty())
    throw std::invalid_argument("at least one control Hamiltonian is required");
  for (const auto& hc : p.hamiltonian.controls) {
    if (hc.rows() != d || hc.cols() != d)
      throw std::invalid_argument("control Hamiltonian dimension mismatch");
    if (!is_hermitian(hc, kHermitianTol))
      throw std::invalid_argument("control Hamiltonian is not Hermitian");
  }
  for (const auto& h0 : p.hamiltonian.drift_slices)
    if (h0.rows() != d || !is_hermitian(h0, kHermitianTol))
      throw std::invalid_argument("drift slice is not a Hermitian matrix of the right size");
  if (p.slices < 1) throw std::invalid_argument("slice count must be >= 1");
  if (!(p.duration > 0.0)) throw std::invalid_argument("duration must be positive");
  if (p.u_aim) {
    if (p.u_aim->rows() != d || p.u_aim->cols() != d)
      throw std::invalid_argument("target gate has the wrong dimension");
  } else {
    require_density(p.rho0, d, "rho0");
    require_density(p.rho_aim, d, "rho_aim");
  }
}

double grape_fom(const GrapeProblem& p, std::span<const std::vector<double>> pulses, Exec exec) {
  check_slices(p, pulses);
  const auto props = slice_propagators(p.hamiltonian, pulses, p.duration, exec);
  if (p.u_aim) return gate_fidelity(total_propagator(props), *p.u_aim);
  return fom_hilbert_schmidt(evolve_state(p.rho0, props), p.rho_aim);
}

GrapeGradient grape_gradient(const GrapeProblem& p, std::span<const std::vector<double>> pulses,
                             Exec exec) {
  check_slices(p, pulses);
  const SliceData s = slice_derivatives(p, pulses, exec);
  const auto n = static_cast<long>(s.u.size());
  const std::size_t nc = p.hamiltonian.controls.size();
  const Eigen::Index d = p.hamiltonian.drift.rows();

  GrapeGradient out;
  out.gradient.assign(nc, std::vector<double>(static_cast<std::size_t>(n)));
  // weights[k] is the matrix M_k with dF/du_j[k] = scale * Re(phase * tr(dU_kj M_k)).
  std::vector<CMatrix> weights(static_cast<std::size_t>(n));
  cplx phase{1.0, 0.0};
  double scale = 2.0;

  if (p.u_aim) {
    std::vector<CMatrix> forward(static_cast<std::size_t>(n));  // U_{k-1} ... U_0
    forward[0] = CMatrix::Identity(d, d);
    for (long k = 1; k < n; ++k) forward[k] = s.u[k - 1] * forward[k - 1];
    CMatrix back = p.u_aim->adjoint();  // U_aim^dagger U_{N-1} ... U_{k+1}
    for (long k = n - 1; k >= 0; --k) {
      weights[k] = forward[k] * back;
      back = back * s.u[k];
    }
    // back now equals U_aim^dagger U.
    const cplx z = back.trace();
    out.fom = std::norm(z) / static_cast<double>(d * d);
    phase = std::conj(z);
    scale = 2.0 / static_cast<double>(d * d);
  } else {
    std::vector<CMatrix> rho(static_cast<std::size_t>(n));  // state before slice k
    rho[0] = p.rho0;
    for (long k = 1; k < n; ++k) rho[k] = s.u[k - 1] * rho[k - 1] * s.u[k - 1].adjoint();
    const CMatrix rho_t = s.u[n - 1] * rho[n - 1] * s.u[n - 1].adjoint();
    out.fom = fom_hilbert_schmidt(rho_t, p.rho_aim);
    CMatrix lambda = p.rho_aim;  // co-state after slice k
    for (long k = n - 1; k >= 0; --k) {
      weights[k] = rho[k] * s.u[k].adjoint() * lambda;
      lambda = s.u[k].adjoint() * lambda * s.u[k];
    }
  }

  auto body = [&](long k) {
    for (std::size_t j = 0; j < nc; ++j)
      out.gradient[j][k] = scale * (phase * trace_product(s.du[k][j], weights[k])).real();
  };
  if (exec == Exec::serial) {
    for (long k = 0; k < n; ++k) body(k);
  } else {
#pragma omp parallel for schedule(static)
    for (long k = 0; k < n; ++k) body(k);
  }
  return out;
}

const char* to_string(GrapeTermination t) {
  switch (t) {
    case GrapeTermination::ftol: return "ftol";
    case GrapeTermination::gtol: return "gtol";
    case GrapeTermination::max_eval: return "max_eval";
    case GrapeTermination::line_search: return "line_search";
    case GrapeTermination::interrupted: return "interrupted";
    case GrapeTermination::goal_reached: return "goal_reached";
    case GrapeTermination::time_limit: return "time_limit";
  }
  return "unknown";
}

GrapeResult run_grape(const GrapeProblem& p, std::span<const std::vector<double>> guess,
                      const GrapeSettings& settings) {
  validate_problem(p);
  check_slices(p, guess);
  const std::size_t nc = p.hamiltonian.controls.size();
  const auto n = static_cast<std::size_t>(p.slices);
  auto per_control = [&](const std::vector<double>& v, double fallback, const char* what) {
    if (v.empty()) return std::vector<double>(nc, fallback);
    if (v.size() != nc)
      throw std::invalid_argument(std::string("GRAPE settings: one ") + what +
                                  " per control is required");
    return v;
  };
  const auto lower = per_control(settings.lower, -std::numeric_limits<double>::infinity(), "lower");
  const auto upper = per_control(settings.upper, std::numeric_limits<double>::infinity(), "upper");
  const auto variation = per_control(settings.amplitude_variation, 1.0, "amplitude_variation");

  std::vector<double> x(nc * n), lo(nc * n), hi(nc * n);
  for (std::size_t j = 0; j < nc; ++j) {
    if (!(lower[j] < upper[j])) throw std::invalid_argument("GRAPE settings: lower >= upper");
    for (std::size_t k = 0; k < n; ++k) {
      lo[j * n + k] = lower[j];
      hi[j * n + k] = upper[j];
      x[j * n + k] = std::clamp(guess[j][k], lower[j], upper[j]);
    }
  }

  std::vector<std::vector<double>> pulses(nc, std::vector<double>(n));
  auto unpack = [&](std::span<const double> v) {
    for (std::size_t j = 0; j < nc; ++j)
      std::copy_n(v.begin() + static_cast<long>(j * n), n, pulses[j].begin());
  };
  long evaluations = 0;
  auto fg = [&](std::span<const double> v, std::span<double> grad) {
    ++evaluations;
    unpack(v);
    const GrapeGradient gg = grape_gradient(p, pulses, settings.exec);
    for (std::size_t j = 0; j < nc; ++j)
      for (std::size_t k = 0; k < n; ++k) grad[j * n + k] = -gg.gradient[j][k];
    return -gg.fom;
  };

  GrapeResult result;
  if (settings.perturb_stationary_guess) {
    std::vector<double> g(x.size());
    const double f0 = -fg(x, g);
    if (projected_gradient_norm(x, g, lo, hi) <= settings.gtol && f0 < 1.0 - kStationaryFomGap) {
      Rng rng = child_rng(settings.seed, Stream::search, 0);
      for (std::size_t j = 0; j < nc; ++j) {
        std::uniform_real_distribution<double> kick(-variation[j], variation[j]);
        for (std::size_t k = 0; k < n; ++k)
          x[j * n + k] = std::clamp(x[j * n + k] + kick(rng), lower[j], upper[j]);
      }
      result.guess_perturbed = true;
    }
  }

  BoxLbfgsOptions opts;
  opts.memory = settings.memory;
  opts.ftol = settings.ftol;
  opts.gtol = settings.gtol;
  opts.max_iterations = settings.max_iterations;
  SteadyClock wall;
  const Clock& clock = settings.clock ? *settings.clock : wall;
  GrapeTermination stopped_by = GrapeTermination::interrupted;
  opts.stop_requested = [&](double f) {
    if (settings.interrupt && settings.interrupt->load()) {
      stopped_by = GrapeTermination::interrupted;
      return true;
    }
    if (settings.fom_goal && -f >= *settings.fom_goal) {
      stopped_by = GrapeTermination::goal_reached;
      return true;
    }
    if (settings.time_limit_minutes && clock.elapsed_minutes() >= *settings.time_limit_minutes) {
      stopped_by = GrapeTermination::time_limit;
      return true;
    }
    return false;
  };
  const BoxLbfgsResult r = minimize_box(fg, x, lo, hi, opts);

  unpack(r.x);
  result.optimal_pulses = pulses;
  result.final_fom = -r.f;
  result.iterations = r.iterations;
  result.evaluations = evaluations;
  for (double f : r.f_history) result.fom_history.push_back(-f);
  result.gradient_norm_history = r.pg_history;
  switch (r.termination) {
    case BoxLbfgsTermination::ftol: result.termination = GrapeTermination::ftol; break;
    case BoxLbfgsTermination::gtol: result.termination = GrapeTermination::gtol; break;
    case BoxLbfgsTermination::line_search: result.termination = GrapeTermination::line_search; break;
    case BoxLbfgsTermination::interrupted: result.termination = stopped_by; break;
    default: result.termination = GrapeTermination::max_eval; break;
  }
  return result;
}

}  // namespace qoc
