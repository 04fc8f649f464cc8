// Copyright 2026 The cvkrotov Authors
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

#include "cvkrotov/fock.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <unordered_map>

#include <Eigen/Eigenvalues>

namespace cvk::fock {

namespace {

using cd = std::complex<double>;
using Triplet = Eigen::Triplet<cd>;
constexpr cd kI{0.0, 1.0};

std::int64_t stride(const FockSpace& s, int mode) {
  std::int64_t st = 1;
  for (int m = mode + 1; m < s.n_modes(); ++m) st *= s.cutoff();
  return st;
}

void require_mode(const FockSpace& s, int mode) {
  if (mode < 0 || mode >= s.n_modes()) throw std::invalid_argument("fock: mode out of range");
}

double one_norm(const SparseOp& g) {
  Vector col = Vector::Zero(g.cols());
  for (int k = 0; k < g.outerSize(); ++k)
    for (SparseOp::InnerIterator it(g, k); it; ++it) col[it.col()] += std::abs(it.value());
  return g.cols() == 0 ? 0.0 : col.maxCoeff();
}

std::vector<double> hermitian_eigenvalues(const Density& h) {
  Eigen::SelfAdjointEigenSolver<Density> es(h, Eigen::EigenvaluesOnly);
  return {es.eigenvalues().begin(), es.eigenvalues().end()};
}

// Trace norm of a Hermitian matrix given by its non-zero entries; the
// matrix is split into connected blocks first.
double trace_norm_hermitian(std::int64_t dim, const std::vector<Triplet>& entries) {
  std::vector<std::int64_t> parent(static_cast<std::size_t>(dim));
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](std::int64_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (const auto& t : entries) parent[find(t.row())] = find(t.col());

  std::unordered_map<std::int64_t, std::vector<std::int64_t>> members;
  std::vector<char> used(static_cast<std::size_t>(dim), 0);
  for (const auto& t : entries) used[t.row()] = used[t.col()] = 1;
  for (std::int64_t i = 0; i < dim; ++i)
    if (used[i]) members[find(i)].push_back(i);

  std::unordered_map<std::int64_t, std::pair<std::int64_t, std::int64_t>> local;  // index -> (root, pos)
  for (auto& [root, idx] : members)
    for (std::size_t p = 0; p < idx.size(); ++p) local[idx[p]] = {root, static_cast<std::int64_t>(p)};

  std::unordered_map<std::int64_t, Density> blocks;
  for (auto& [root, idx] : members) {
    const auto n = static_cast<Eigen::Index>(idx.size());
    blocks.emplace(root, Density::Zero(n, n));
  }
  for (const auto& t : entries) {
    const auto [root, r] = local[t.row()];
    const auto c = local[t.col()].second;
    blocks[root](r, c) += t.value();
  }
  double norm = 0.0;
  for (auto& [root, b] : blocks)
    for (double ev : hermitian_eigenvalues(b)) norm += std::abs(ev);
  return norm;
}

Density sqrt_psd(const Density& rho) {
  Eigen::SelfAdjointEigenSolver<Density> es(rho);
  Eigen::VectorXd ev = es.eigenvalues();
  if (ev.minCoeff() < -1e-8) throw std::domain_error("bures_fidelity: negative eigenvalue");
  for (Eigen::Index k = 0; k < ev.size(); ++k) ev[k] = std::sqrt(std::max(0.0, ev[k]));
  return es.eigenvectors() * ev.cast<cd>().asDiagonal() * es.eigenvectors().adjoint();
}

}  // namespace

FockSpace::FockSpace(int n_modes, int cutoff) : n_modes_(n_modes), cutoff_(cutoff) {
  if (n_modes < 1 || n_modes > 3) throw std::invalid_argument("FockSpace: 1 to 3 modes supported");
  if (cutoff < 2) throw std::invalid_argument("FockSpace: cutoff must be >= 2");
  dimension_ = 1;
  for (int m = 0; m < n_modes; ++m) {
    dimension_ *= cutoff;
    if (dimension_ > kMaxDimension)
      throw std::invalid_argument("FockSpace: dimension exceeds " + std::to_string(kMaxDimension));
  }
}

int FockSpace::occupation(std::int64_t index, int mode) const {
  return static_cast<int>((index / stride(*this, mode)) % cutoff_);
}

std::vector<ModeOperators> build_operators(const FockSpace& space) {
  const std::int64_t dim = space.dimension();
  std::vector<ModeOperators> ops;
  for (int m = 0; m < space.n_modes(); ++m) {
    const std::int64_t st = stride(space, m);
    std::vector<Triplet> t;
    for (std::int64_t i = 0; i < dim; ++i) {
      const int n = space.occupation(i, m);
      if (n > 0) t.emplace_back(i - st, i, std::sqrt(double(n)));
    }
    ModeOperators o;
    o.a.resize(dim, dim);
    o.a.setFromTriplets(t.begin(), t.end());
    o.adag = SparseOp(o.a.adjoint());
    o.q = SparseOp((o.adag + o.a) / std::sqrt(2.0));
    o.p = SparseOp(kI * (o.adag - o.a) / std::sqrt(2.0));
    ops.push_back(std::move(o));
  }
  return ops;
}

SparseOp identity(const FockSpace& space) {
  SparseOp id(space.dimension(), space.dimension());
  id.setIdentity();
  return id;
}

State vacuum(const FockSpace& space) {
  State v = State::Zero(space.dimension());
  v[0] = 1.0;
  return v;
}

State apply_exponential(const SparseOp& generator, const State& v) {
  const double norm = one_norm(generator);
  const int substeps = std::max(1, static_cast<int>(std::ceil(norm / 0.5)));
  const SparseOp g = generator / double(substeps);
  State out = v;
  for (int s = 0; s < substeps; ++s) {
    State term = out;
    State acc = out;
    for (int k = 1; k < 60; ++k) {
      term = (g * term) / double(k);
      acc += term;
      if (term.norm() <= 1e-17 * acc.norm()) break;
    }
    out = std::move(acc);
  }
  return out;
}

SparseOp two_mode_squeeze_generator(const FockSpace& space, int mode_i, int mode_j, double r) {
  require_mode(space, mode_i);
  require_mode(space, mode_j);
  const auto ops = build_operators(space);
  const auto& a = ops[mode_i];
  const auto& b = ops[mode_j];
  return SparseOp(r * (a.a * b.a) - r * (a.adag * b.adag));
}

SparseOp squeeze_generator(const FockSpace& space, int mode, double r) {
  require_mode(space, mode);
  const auto ops = build_operators(space);
  const auto& a = ops[mode];
  return SparseOp(0.5 * r * (a.a * a.a) - 0.5 * r * (a.adag * a.adag));
}

SparseOp rotation_generator(const FockSpace& space, int mode, double theta) {
  require_mode(space, mode);
  const auto ops = build_operators(space);
  return SparseOp(cd(0.0, -theta) * (ops[mode].adag * ops[mode].a));
}

SparseOp beam_splitter_generator(const FockSpace& space, int mode_i, int mode_j, double theta) {
  require_mode(space, mode_i);
  require_mode(space, mode_j);
  const auto ops = build_operators(space);
  return SparseOp(theta * (ops[mode_i].adag * ops[mode_j].a) - theta * (ops[mode_i].a * ops[mode_j].adag));
}

State tmss_state(const FockSpace& space, double r) {
  if (space.n_modes() != 2) throw std::invalid_argument("tmss_state: two-mode space required");
  State psi = apply_exponential(two_mode_squeeze_generator(space, 0, 1, r), vacuum(space));
  if (edge_population(space, psi) > 1e-4)
    throw std::domain_error("tmss_state: cutoff too small for r = " + std::to_string(r));
  psi.normalize();
  return psi;
}

double edge_population(const FockSpace& space, const State& psi, int width) {
  double pop = 0.0;
  for (std::int64_t i = 0; i < space.dimension(); ++i)
    for (int m = 0; m < space.n_modes(); ++m)
      if (space.occupation(i, m) >= space.cutoff() - width) {
        pop += std::norm(psi[i]);
        break;
      }
  return pop;
}

double edge_population(const FockSpace& space, const Density& rho, int width) {
  double pop = 0.0;
  for (std::int64_t i = 0; i < space.dimension(); ++i)
    for (int m = 0; m < space.n_modes(); ++m)
      if (space.occupation(i, m) >= space.cutoff() - width) {
        pop += rho(i, i).real();
        break;
      }
  return pop;
}

namespace {

std::vector<SparseOp> quadratures(const FockSpace& space) {
  const auto ops = build_operators(space);
  std::vector<SparseOp> r;
  for (const auto& o : ops) r.push_back(o.q);
  for (const auto& o : ops) r.push_back(o.p);
  return r;
}

}  // namespace

Vector extract_means(const FockSpace& space, const State& psi) {
  const auto r = quadratures(space);
  Vector v(static_cast<Eigen::Index>(r.size()));
  for (std::size_t i = 0; i < r.size(); ++i) v[i] = psi.dot(r[i] * psi).real();
  return v;
}

Vector extract_means(const FockSpace& space, const Density& rho) {
  const auto r = quadratures(space);
  Vector v(static_cast<Eigen::Index>(r.size()));
  for (std::size_t i = 0; i < r.size(); ++i) v[i] = Density(r[i] * rho).trace().real();
  return v;
}

CovarianceMatrix extract_cm(const FockSpace& space, const State& psi) {
  const auto r = quadratures(space);
  const auto n = static_cast<Eigen::Index>(r.size());
  std::vector<State> rpsi;
  for (const auto& op : r) rpsi.push_back(op * psi);
  const Vector mean = extract_means(space, psi);
  Matrix g(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j)
      g(i, j) = 2.0 * rpsi[i].dot(rpsi[j]).real() - 2.0 * mean[i] * mean[j];
  return CovarianceMatrix(0.5 * (g + g.transpose()));
}

CovarianceMatrix extract_cm(const FockSpace& space, const Density& rho) {
  const auto r = quadratures(space);
  const auto n = static_cast<Eigen::Index>(r.size());
  std::vector<Density> r_rho;
  for (const auto& op : r) r_rho.push_back(op * rho);
  const Vector mean = extract_means(space, rho);
  Matrix g(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) {
      // Tr(R_i R_j rho) = sum_ab (R_i)_ab (R_j rho)_ba
      cd acc = 0.0;
      for (int k = 0; k < r[i].outerSize(); ++k)
        for (SparseOp::InnerIterator it(r[i], k); it; ++it)
          acc += it.value() * r_rho[j](it.col(), it.row());
      g(i, j) = 2.0 * acc.real() - 2.0 * mean[i] * mean[j];
    }
  return CovarianceMatrix(0.5 * (g + g.transpose()));
}

SparseOp quadratic_hamiltonian(const FockSpace& space, const Matrix& form) {
  const auto r = quadratures(space);
  if (form.rows() != static_cast<Eigen::Index>(r.size()))
    throw std::invalid_argument("quadratic_hamiltonian: form size mismatch");
  SparseOp h(space.dimension(), space.dimension());
  for (std::size_t i = 0; i < r.size(); ++i)
    for (std::size_t j = 0; j < r.size(); ++j) {
      const double m = form(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
      if (m != 0.0) h += SparseOp(0.5 * m * (r[i] * r[j]));
    }
  return h;
}

Density lindblad_propagate(const Density& rho0, const std::function<SparseOp(int step)>& hamiltonian,
                           const SparseOp& jump, const TimeGrid& grid,
                           const DensityObserver& observer) {
  const SparseOp jd = jump.adjoint();
  const SparseOp jdj = jd * jump;
  const double dt = grid.dt();
  const double trace0 = rho0.trace().real();
  Density rho = rho0;
  if (observer) observer(0, rho);
  for (int k = 0; k < grid.n_steps; ++k) {
    const SparseOp h = hamiltonian(k);
    auto rhs = [&](const Density& x) -> Density {
      Density hx = h * x;
      Density out = -kI * (hx - hx.adjoint());
      if (jump.nonZeros() > 0) {
        Density lx = jump * x;
        Density jx = jdj * x;
        // L x L^dag = (L (L x)^dag)^dag keeps the sparse factor on the left.
        Density lxl = jump * lx.adjoint();
        out += lxl.adjoint() - 0.5 * (jx + jx.adjoint());
      }
      return out;
    };
    const Density k1 = rhs(rho);
    const Density k2 = rhs(rho + 0.5 * dt * k1);
    const Density k3 = rhs(rho + 0.5 * dt * k2);
    const Density k4 = rhs(rho + dt * k3);
    rho += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    rho = 0.5 * (rho + rho.adjoint()).eval();
    if (!rho.allFinite()) throw PropagationError("lindblad_propagate: non-finite density", k);
    if (std::abs(rho.trace().real() - trace0) > 1e-6)
      throw PropagationError("lindblad_propagate: trace drift", k);
    if (observer) observer(k + 1, rho);
  }
  return rho;
}

double bures_fidelity(const Density& rho1, const Density& rho2) {
  const Density s = sqrt_psd(rho1);
  const Density m = s * rho2 * s;
  double f = 0.0;
  for (double ev : hermitian_eigenvalues(0.5 * (m + m.adjoint()))) {
    if (ev < -1e-8) throw std::domain_error("bures_fidelity: negative eigenvalue");
    f += std::sqrt(std::max(0.0, ev));
  }
  return f;
}

double bures_fidelity(const State& psi1, const State& psi2) { return std::abs(psi1.dot(psi2)); }

double bures_fidelity(const State& psi, const Density& rho) {
  return std::sqrt(std::max(0.0, psi.dot(rho * psi).real()));
}

double log_negativity_fock(const FockSpace& space, const Density& rho) {
  if (space.n_modes() != 2) throw std::invalid_argument("log_negativity_fock: two modes required");
  const int c = space.cutoff();
  Density pt(rho.rows(), rho.cols());
  for (int n1 = 0; n1 < c; ++n1)
    for (int n2 = 0; n2 < c; ++n2)
      for (int m1 = 0; m1 < c; ++m1)
        for (int m2 = 0; m2 < c; ++m2)
          pt(n1 * c + m2, m1 * c + n2) = rho(n1 * c + n2, m1 * c + m2);
  double norm = 0.0;
  for (double ev : hermitian_eigenvalues(pt)) norm += std::abs(ev);
  return std::log2(norm);
}

double log_negativity_fock(const FockSpace& space, const State& psi) {
  if (space.n_modes() != 2) throw std::invalid_argument("log_negativity_fock: two modes required");
  const int c = space.cutoff();
  const double thr = 1e-14 * psi.cwiseAbs().maxCoeff();
  std::vector<std::int64_t> support;
  for (std::int64_t i = 0; i < space.dimension(); ++i)
    if (std::abs(psi[i]) > thr) support.push_back(i);
  std::vector<Triplet> entries;
  entries.reserve(support.size() * support.size());
  for (std::int64_t a : support)
    for (std::int64_t b : support) {
      const std::int64_t n1 = a / c, n2 = a % c, m1 = b / c, m2 = b % c;
      entries.emplace_back(n1 * c + m2, m1 * c + n2, psi[a] * std::conj(psi[b]));
    }
  return std::log2(trace_norm_hermitian(space.dimension(), entries));
}

bool is_valid_density(const Density& rho) {
  if ((rho - rho.adjoint()).cwiseAbs().maxCoeff() > 1e-10) return false;
  if (std::abs(rho.trace() - cd(1.0)) > 1e-8) return false;
  const auto ev = hermitian_eigenvalues(rho);
  return *std::min_element(ev.begin(), ev.end()) >= -1e-8;
}

}  // namespace cvk::fock
