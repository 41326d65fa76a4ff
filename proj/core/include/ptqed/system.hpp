// system.hpp -- three-state emitter-cavity system in the frame rotating at the
// emitter frequency, plus its Lindblad generator and split-step propagators.
//
// Basis (fixed order): |0,0>, |1,0>, |0,X>  -- photon number first, X = exciton.
// Only the exciton state couples to the phonon displacement (lambda = [0,0,1]).
//
//   H = -delta a^dag a + g (|X><0| a + |0><X| a^dag),   delta = omega_X - omega_c.
//   L[rho] = -i[H,rho] + kappa D[a] + gamma D[|0><X|] + 2 gamma* D[|X><X|],
//   D[A]rho = A rho A^dag - (A^dag A rho + rho A^dag A)/2.
//
// Liouville vectors use column stacking: index alpha = s + 3*r for component <s|rho|r>.
#pragma once

#include <Eigen/Dense>
#include <array>
#include <complex>

#include "ptqed/errors.hpp"

namespace ptqed::sys {

using cd = std::complex<double>;
using Matrix3cd = Eigen::Matrix3cd;
using Matrix9cd = Eigen::Matrix<cd, 9, 9>;
using Vector9cd = Eigen::Matrix<cd, 9, 1>;
using RowVector9cd = Eigen::Matrix<cd, 1, 9>;

struct SystemParams {
  double delta = 0.0;       // cavity detuning omega_X - omega_c, ps^-1
  double g = 0.0;           // light-matter coupling, ps^-1
  double kappa = 0.0;       // cavity loss rate, ps^-1
  double gamma = 0.0;       // radiative background decay of the exciton, ps^-1
  double gamma_star = 0.0;  // thermal pure-dephasing rate, ps^-1

  void validate() const;  // throws std::domain_error on negative rates / g < 0
};

struct Basis {
  static constexpr int dim = 3;
  static constexpr int liouville_dim = 9;
  // Phonon-coupling eigenvalue of each basis state.
  static constexpr std::array<int, 3> lambda{0, 0, 1};
  static constexpr std::array<const char*, 3> labels{"|0,0>", "|1,0>", "|0,X>"};

  static constexpr int ket_index(int alpha) { return alpha % 3; }
  static constexpr int bra_index(int alpha) { return alpha / 3; }
  static constexpr int lambda_ket(int alpha) { return lambda[ket_index(alpha)]; }
  static constexpr int lambda_bra(int alpha) { return lambda[bra_index(alpha)]; }
  // Group Liouville indices by the (lambda_ket, lambda_bra) pair: 0..3.
  static constexpr int coupling_class(int alpha) { return 2 * lambda_ket(alpha) + lambda_bra(alpha); }
  // lambda_ket - lambda_bra of a class, in {-1, 0, +1}.
  static constexpr int class_difference(int cls) { return cls / 2 - cls % 2; }
  static constexpr int class_lambda_ket(int cls) { return cls / 2; }
  static constexpr int class_lambda_bra(int cls) { return cls % 2; }
};

// Elementary operators in the fixed basis.
Matrix3cd annihilation_op();     // a
Matrix3cd exciton_lower_op();    // |0,0><0,X|
Matrix3cd exciton_project_op();  // |0,X><0,X|

Matrix3cd build_system_hamiltonian(const SystemParams& p);
Matrix9cd build_liouvillian(const SystemParams& p);

// exp(L dt / 2); dt must be positive.
Matrix9cd half_step_propagator(const SystemParams& p, double dt);

// rho(0) = |0,X><0,X| (excited emitter, empty cavity).
Matrix3cd initial_state();

// Column-stacking helpers.
Vector9cd vectorize(const Matrix3cd& rho);
Matrix3cd unvectorize(const Vector9cd& v);
RowVector9cd trace_functional();           // row vector t with t.vec(rho) = Tr rho
Matrix9cd left_mult_superop(const Matrix3cd& a);   // vec(A rho)
Matrix9cd right_mult_superop(const Matrix3cd& b);  // vec(rho B)

struct Propagators {
  double dt = 0.0;
  Matrix9cd half;  // exp(L dt/2)
  Matrix9cd full;  // exp(L dt)
};
Propagators make_propagators(const SystemParams& p, double dt);

}  // namespace ptqed::sys
