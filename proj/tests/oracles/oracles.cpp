// Copyright 2026 The rpzeno Authors
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

#include <cmath>
#include <stdexcept>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/numeric/odeint.hpp>
#include <unsupported/Eigen/MatrixFunctions>

namespace oracle {

namespace {

using State = std::vector<double>;

const Complex kI{0.0, 1.0};

void unpack(const State& x, Eigen::Index d, CMatrix& rho) {
  for (Eigen::Index c = 0; c < d; ++c)
    for (Eigen::Index r = 0; r < d; ++r) {
      const std::size_t k = 2 * static_cast<std::size_t>(r + c * d);
      rho(r, c) = Complex(x[k], x[k + 1]);
    }
}

void pack(const CMatrix& rho, State& x) {
  const Eigen::Index d = rho.rows();
  for (Eigen::Index c = 0; c < d; ++c)
    for (Eigen::Index r = 0; r < d; ++r) {
      const std::size_t k = 2 * static_cast<std::size_t>(r + c * d);
      x[k] = rho(r, c).real();
      x[k + 1] = rho(r, c).imag();
    }
}

CMatrix effective(const CMatrix& h, const CMatrix& projector, double k_b) {
  return h - kI * (0.5 * k_b) * projector;
}

struct MasterSystem {
  CMatrix heff;
  CMatrix projector;
  double k_b;
  double k_f;

  void operator()(const State& x, State& dxdt, double /*t*/) const {
    const Eigen::Index d = heff.rows();
    CMatrix rho(d, d);
    unpack(x, d, rho);
    pack(master_rhs(heff, k_f, rho), dxdt);
    const std::size_t n = 2 * static_cast<std::size_t>(d * d);
    dxdt[n] = k_b * (projector * rho).trace().real();
    dxdt[n + 1] = k_f * rho.trace().real();
  }
};

}  // namespace

Spin spin(int multiplicity) {
  if (multiplicity < 2) throw std::invalid_argument("multiplicity < 2");
  const double s = 0.5 * (multiplicity - 1);
  CMatrix plus = CMatrix::Zero(multiplicity, multiplicity);
  CMatrix z = CMatrix::Zero(multiplicity, multiplicity);
  for (int i = 0; i < multiplicity; ++i) {
    const double m = s - i;
    z(i, i) = m;
    if (i > 0) plus(i - 1, i) = std::sqrt(s * (s + 1) - m * (m + 1));
  }
  const CMatrix minus = plus.adjoint();
  return {0.5 * (plus + minus), -0.5 * kI * (plus - minus), z};
}

CMatrix kron(const CMatrix& a, const CMatrix& b) {
  const Eigen::Index ar = a.rows(), ac = a.cols(), br = b.rows(), bc = b.cols();
  CMatrix out(ar * br, ac * bc);
  for (Eigen::Index i = 0; i < ar; ++i)
    for (Eigen::Index j = 0; j < ac; ++j)
      for (Eigen::Index k = 0; k < br; ++k)
        for (Eigen::Index l = 0; l < bc; ++l) out(i * br + k, j * bc + l) = a(i, j) * b(k, l);
  return out;
}

CMatrix embed(const CMatrix& op, std::size_t slot, const std::vector<int>& dims) {
  Eigen::Index total = 1;
  for (const int d : dims) total *= d;
  auto digits = [&](Eigen::Index index) {
    std::vector<Eigen::Index> out(dims.size());
    for (std::size_t s = dims.size(); s-- > 0;) {
      out[s] = index % dims[s];
      index /= dims[s];
    }
    return out;
  };
  CMatrix out = CMatrix::Zero(total, total);
  for (Eigen::Index r = 0; r < total; ++r) {
    const auto dr = digits(r);
    for (Eigen::Index c = 0; c < total; ++c) {
      const auto dc = digits(c);
      bool same = true;
      for (std::size_t s = 0; s < dims.size(); ++s)
        if (s != slot && dr[s] != dc[s]) same = false;
      if (same) out(r, c) = op(dr[slot], dc[slot]);
    }
  }
  return out;
}

CMatrix pair_op(int electron, int axis) {
  const Spin s = spin(2);
  const CMatrix* ops[3] = {&s.x, &s.y, &s.z};
  return embed(*ops[axis], static_cast<std::size_t>(electron), {2, 2});
}

Eigen::Vector4cd ket_singlet() {
  Eigen::Vector4cd v = Eigen::Vector4cd::Zero();
  v(1) = 1.0 / std::sqrt(2.0);
  v(2) = -1.0 / std::sqrt(2.0);
  return v;
}

Eigen::Vector4cd ket_t0() {
  Eigen::Vector4cd v = Eigen::Vector4cd::Zero();
  v(1) = 1.0 / std::sqrt(2.0);
  v(2) = 1.0 / std::sqrt(2.0);
  return v;
}

CMatrix exchange_unitary(double a) {
  CMatrix dot = CMatrix::Zero(4, 4);
  for (int axis = 0; axis < 3; ++axis) dot += pair_op(0, axis) * pair_op(1, axis);
  const CMatrix gen = (kI * a) * dot;
  return gen.exp();
}

CMatrix master_rhs(const CMatrix& heff, double k_f, const CMatrix& rho) {
  return -kI * (heff * rho - rho * heff.adjoint()) - k_f * rho;
}

IntegratedYields integrate_yields(const CMatrix& h, const CMatrix& projector, double k_b,
                                  double k_f, const CMatrix& rho0, double tolerance,
                                  double trace_floor) {
  namespace ode = boost::numeric::odeint;
  if (!(k_f > 0.0)) throw std::invalid_argument("integrate_yields needs k_f > 0");
  const Eigen::Index d = h.rows();
  MasterSystem sys{effective(h, projector, k_b), projector, k_b, k_f};
  State x(2 * static_cast<std::size_t>(d * d) + 2, 0.0);
  pack(rho0, x);
  auto stepper =
      ode::make_controlled(tolerance, tolerance, ode::runge_kutta_fehlberg78<State>());
  const double chunk = 1.0 / k_f;
  double t = 0.0;
  CMatrix rho(d, d);
  for (int i = 0; i < 100000; ++i) {
    ode::integrate_adaptive(stepper, sys, x, t, t + chunk, 1e-4 * chunk);
    t += chunk;
    unpack(x, d, rho);
    if (rho.trace().real() < trace_floor) break;
  }
  const std::size_t n = 2 * static_cast<std::size_t>(d * d);
  return {x[n], x[n + 1], rho.trace().real()};
}

CMatrix integrate_state(const CMatrix& h, const CMatrix& projector, double k_b, double k_f,
                        const CMatrix& rho0, double t, double tolerance) {
  namespace ode = boost::numeric::odeint;
  const Eigen::Index d = h.rows();
  MasterSystem sys{effective(h, projector, k_b), projector, k_b, k_f};
  State x(2 * static_cast<std::size_t>(d * d) + 2, 0.0);
  pack(rho0, x);
  auto stepper =
      ode::make_controlled(tolerance, tolerance, ode::runge_kutta_fehlberg78<State>());
  if (t > 0.0) ode::integrate_adaptive(stepper, sys, x, 0.0, t, 1e-4 * t);
  CMatrix rho(d, d);
  unpack(x, d, rho);
  return rho;
}

Complex spectral_density_quadrature(double omega, double variance, double tau_c) {
  using Quad = boost::math::quadrature::gauss_kronrod<double, 31>;
  const double end = 60.0 * tau_c;
  double panel = tau_c;
  if (omega != 0.0) panel = std::min(panel, 1.0 / std::abs(omega));
  const auto panels = static_cast<long>(std::ceil(end / panel));
  double re = 0.0, im = 0.0;
  for (long p = 0; p < panels; ++p) {
    const double a = end * static_cast<double>(p) / static_cast<double>(panels);
    const double b = end * static_cast<double>(p + 1) / static_cast<double>(panels);
    re += Quad::integrate([&](double t) { return std::exp(-t / tau_c) * std::cos(omega * t); },
                          a, b, 8, 1e-14);
    im += Quad::integrate([&](double t) { return std::exp(-t / tau_c) * std::sin(omega * t); },
                          a, b, 8, 1e-14);
  }
  return variance * Complex(re, im);
}

CMatrix superop_left_right(const CMatrix& a, const CMatrix& b) {
  const Eigen::Index d = a.rows();
  CMatrix out(d * d, d * d);
  for (Eigen::Index q = 0; q < d; ++q)
    for (Eigen::Index p = 0; p < d; ++p) {
      CMatrix e = CMatrix::Zero(d, d);
      e(p, q) = 1.0;
      const CMatrix image = a * e * b;
      for (Eigen::Index c = 0; c < d; ++c)
        for (Eigen::Index r = 0; r < d; ++r) out(r + c * d, p + q * d) = image(r, c);
    }
  return out;
}

CMatrix nz_superoperator(const CMatrix& heff, const std::vector<int>& dims, double variance,
                         double tau_c, double k_f, bool include_kf) {
  const Eigen::Index d = heff.rows();
  const CMatrix id = CMatrix::Identity(d, d);
  const CMatrix id2 = CMatrix::Identity(d * d, d * d);
  CMatrix l = superop_left_right(-kI * heff, id) + superop_left_right(id, kI * heff.adjoint());
  if (include_kf) l -= k_f * id2;
  const CMatrix resolvent = (id2 / tau_c - l).partialPivLu().inverse();
  const Spin s = spin(2);
  const CMatrix* ops[3] = {&s.x, &s.y, &s.z};
  CMatrix r = CMatrix::Zero(d * d, d * d);
  for (std::size_t electron = 0; electron < 2; ++electron)
    for (const CMatrix* op : ops) {
      const CMatrix a = embed(*op, electron, dims);
      const CMatrix comm = superop_left_right(a, id) - superop_left_right(id, a);
      r -= variance * comm * resolvent * comm;
    }
  return r;
}

CMatrix random_hermitian(Eigen::Index d, std::mt19937_64& gen, double scale) {
  std::normal_distribution<double> n(0.0, 1.0);
  CMatrix g(d, d);
  for (Eigen::Index i = 0; i < d; ++i)
    for (Eigen::Index j = 0; j < d; ++j) g(i, j) = Complex(n(gen), n(gen));
  return 0.5 * scale * (g + g.adjoint());
}

CMatrix random_density(Eigen::Index d, std::mt19937_64& gen) {
  std::normal_distribution<double> n(0.0, 1.0);
  CMatrix g(d, d);
  for (Eigen::Index i = 0; i < d; ++i)
    for (Eigen::Index j = 0; j < d; ++j) g(i, j) = Complex(n(gen), n(gen));
  CMatrix rho = g * g.adjoint();
  return rho / rho.trace().real();
}

}  // namespace oracle
