#include "ptqed/system.hpp"

#include <unsupported/Eigen/MatrixFunctions>

namespace ptqed::sys {

namespace {
constexpr cd I{0.0, 1.0};

// kron(A, B) for 3x3 blocks -> 9x9.
Matrix9cd kron3(const Matrix3cd& a, const Matrix3cd& b) {
  Matrix9cd k;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) k.block<3, 3>(3 * i, 3 * j) = a(i, j) * b;
  return k;
}

// Lindblad dissipator in superoperator form: D[A] = A (x) A* - {A^dag A, .}/2.
Matrix9cd dissipator(const Matrix3cd& a) {
  const Matrix3cd ada = a.adjoint() * a;
  const Matrix3cd id = Matrix3cd::Identity();
  return kron3(a.conjugate(), a) - 0.5 * kron3(id, ada) - 0.5 * kron3(ada.transpose(), id);
}
}  // namespace

void SystemParams::validate() const {
  if (g < 0.0) throw std::domain_error("system: g must be >= 0");
  if (kappa < 0.0) throw std::domain_error("system: kappa must be >= 0");
  if (gamma < 0.0) throw std::domain_error("system: gamma must be >= 0");
  if (gamma_star < 0.0) throw std::domain_error("system: gamma_star must be >= 0");
}

Matrix3cd annihilation_op() {
  Matrix3cd a = Matrix3cd::Zero();
  a(0, 1) = 1.0;  // a |1,0> = |0,0>
  return a;
}

Matrix3cd exciton_lower_op() {
  Matrix3cd s = Matrix3cd::Zero();
  s(0, 2) = 1.0;  // |0,0><0,X|
  return s;
}

Matrix3cd exciton_project_op() {
  Matrix3cd p = Matrix3cd::Zero();
  p(2, 2) = 1.0;
  return p;
}

Matrix3cd build_system_hamiltonian(const SystemParams& p) {
  p.validate();
  Matrix3cd h = Matrix3cd::Zero();
  h(1, 1) = -p.delta;           // -delta a^dag a
  h(2, 1) = p.g;                // g |0,X><1,0|  (= |X><0| a)
  h(1, 2) = p.g;
  return h;
}

Matrix9cd build_liouvillian(const SystemParams& p) {
  p.validate();
  const Matrix3cd h = build_system_hamiltonian(p);
  const Matrix3cd id = Matrix3cd::Identity();
  Matrix9cd l = -I * (kron3(id, h) - kron3(h.transpose(), id));
  if (p.kappa > 0.0) l += p.kappa * dissipator(annihilation_op());
  if (p.gamma > 0.0) l += p.gamma * dissipator(exciton_lower_op());
  if (p.gamma_star > 0.0) l += 2.0 * p.gamma_star * dissipator(exciton_project_op());
  return l;
}

Matrix9cd half_step_propagator(const SystemParams& p, double dt) {
  if (!(dt > 0.0)) throw std::domain_error("half_step_propagator: dt must be positive");
  const Matrix9cd l = build_liouvillian(p);
  Eigen::MatrixXcd m = l * (0.5 * dt);
  return Matrix9cd(m.exp());
}

Matrix3cd initial_state() {
  Matrix3cd rho = Matrix3cd::Zero();
  rho(2, 2) = 1.0;
  return rho;
}

Vector9cd vectorize(const Matrix3cd& rho) {
  Vector9cd v;
  for (int r = 0; r < 3; ++r)
    for (int s = 0; s < 3; ++s) v(s + 3 * r) = rho(s, r);
  return v;
}

Matrix3cd unvectorize(const Vector9cd& v) {
  Matrix3cd rho;
  for (int r = 0; r < 3; ++r)
    for (int s = 0; s < 3; ++s) rho(s, r) = v(s + 3 * r);
  return rho;
}

RowVector9cd trace_functional() {
  RowVector9cd t = RowVector9cd::Zero();
  for (int s = 0; s < 3; ++s) t(s + 3 * s) = 1.0;
  return t;
}

Matrix9cd left_mult_superop(const Matrix3cd& a) { return kron3(Matrix3cd::Identity(), a); }

Matrix9cd right_mult_superop(const Matrix3cd& b) { return kron3(b.transpose(), Matrix3cd::Identity()); }

Propagators make_propagators(const SystemParams& p, double dt) {
  Propagators pr;
  pr.dt = dt;
  pr.half = half_step_propagator(p, dt);
  pr.full = pr.half * pr.half;
  return pr;
}

}  // namespace ptqed::sys
